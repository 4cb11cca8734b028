use proptest::prelude::*;
use rand::Rng;
use ratchet_core::cgp::*;
use ratchet_core::seeded_rng;

fn spec(w: usize, h: usize) -> ImageSpec {
    ImageSpec::new(w, h).unwrap()
}

fn node(function: u8, conn_a: usize, conn_b: usize, pm: f64) -> Node {
    Node {
        function,
        conn_a,
        conn_b,
        pm,
        pm_sigma: DEFAULT_PM_SIGMA,
    }
}

/// A chain in which every node feeds the next and the last node drives all
/// three outputs, so nothing is inactive.
fn fully_active(function: u8, n: usize) -> CgpGenome {
    let nodes = (0..n)
        .map(|i| {
            let prev = if i == 0 { 0 } else { CgpGenome::address(i - 1) };
            node(function, prev, if i == 0 { 1 } else { 0 }, 40.0 + i as f64)
        })
        .collect();
    let last = CgpGenome::address(n - 1);
    CgpGenome {
        nodes,
        outputs: [last, last, last],
    }
}

#[test]
fn identity_program_is_a_horizontal_ramp() {
    let mut rng = seeded_rng(1);
    let mut g = CgpGenome::random(&mut rng, 20);
    g.outputs = [0, 0, 0];
    let p = decode(&g).unwrap();
    assert!(p.active_nodes().is_empty());
    assert_eq!(p.eval_pixel(0.5, 0.1), [127.5; 3]);
    assert_eq!(p.eval_pixel(0.5, 0.9), [127.5; 3]);

    let img = render(&g, spec(8, 4)).unwrap();
    for row in 0..4 {
        for col in 0..8 {
            let expected = quantize(col as f64 / 8.0 * 255.0);
            assert_eq!(img.pixel(row * 8 + col), (expected, expected, expected));
        }
    }
}

#[test]
fn subgraph_without_y_ignores_rows() {
    // 255 - (255 - x): neither node reads y
    let g = CgpGenome {
        nodes: vec![node(5, 0, 0, 0.0), node(5, 2, 0, 0.0)],
        outputs: [3, 3, 3],
    };
    let p = decode(&g).unwrap();
    assert_eq!(p.eval_pixel(0.25, 0.1), p.eval_pixel(0.25, 0.8));
    assert_eq!(p.eval_pixel(0.25, 0.1), [255.0 - (255.0 - 0.25 * 255.0); 3]);
}

#[test]
fn full_activity_is_decoded_entirely() {
    let g = fully_active(9, 100);
    assert_eq!(decode(&g).unwrap().active_nodes().len(), 100);
    assert!(active_mask(&g).iter().all(|&a| a));
}

#[test]
fn saturated_genome_reports_saturation() {
    let g = fully_active(9, 100);
    assert!(neutral_genes(&g).is_empty());
    let mut rng = seeded_rng(0);
    let v = neutral_variant(&g, &mut rng, 10);
    assert!(v.saturated);
    assert_eq!(v.genome, g);
}

#[test]
fn unary_active_nodes_expose_neutral_genes() {
    let g = fully_active(5, 10);
    let genes = neutral_genes(&g);
    assert_eq!(genes.len(), 20);
    let mut rng = seeded_rng(0);
    let v = neutral_variant(&g, &mut rng, 50);
    assert!(!v.saturated);
    assert_ne!(v.genome, g);
    assert_eq!(decode(&v.genome).unwrap(), decode(&g).unwrap());
}

#[test]
fn inactive_gene_mutation_preserves_canonical_form() {
    let mut rng = seeded_rng(77);
    for _ in 0..200 {
        let g = CgpGenome::random(&mut rng, 100);
        let mask = active_mask(&g);
        let Some(i) = mask.iter().position(|&a| !a) else { continue };
        let mut h = g.clone();
        h.nodes[i].function = (h.nodes[i].function % 13) + 1;
        h.nodes[i].conn_a = rng.gen_range(0..CgpGenome::address(i));
        h.nodes[i].pm = rng.gen_range(0.0..=255.0);
        assert_eq!(
            decode(&g).unwrap().canonical_form(),
            decode(&h).unwrap().canonical_form()
        );
    }
}

#[test]
fn neutral_variants_render_identically() {
    let mut rng = seeded_rng(6);
    let s = spec(24, 24);
    let mut changed = 0;
    for _ in 0..100 {
        let g = CgpGenome::random(&mut rng, 100);
        let base = render(&g, s).unwrap();
        for _ in 0..10 {
            let v = neutral_variant(&g, &mut rng, 100);
            if v.genome != g {
                changed += 1;
            }
            assert_eq!(render(&v.genome, s).unwrap(), base);
        }
    }
    assert!(changed > 900);
}

#[test]
fn active_mutation_can_change_the_program() {
    let mut rng = seeded_rng(8);
    let mut differs = 0;
    let trials = 1000;
    for _ in 0..trials {
        let g = CgpGenome::random(&mut rng, 100);
        let v = neutral_variant(&g, &mut rng, 10).genome;
        let mask = active_mask(&v);
        let active: Vec<usize> = (0..v.nodes.len()).filter(|&i| mask[i]).collect();
        let mut m = v.clone();
        if let Some(&i) = active.first() {
            m.nodes[i].function = (m.nodes[i].function % 13) + 1;
        } else {
            m.outputs[0] = (m.outputs[0] + 1) % 2;
        }
        if decode(&m).unwrap().canonical_form() != decode(&v).unwrap().canonical_form() {
            differs += 1;
        }
    }
    assert!(differs > trials / 2, "{differs}");
}

#[test]
fn zero_rates_leave_the_genome_alone() {
    let mut rng = seeded_rng(9);
    let g = CgpGenome::random(&mut rng, 100);
    assert_eq!(mutate(&g, &mut rng, MutationRates::NONE), g);
}

#[test]
fn full_rate_mutants_stay_valid() {
    let mut rng = seeded_rng(10);
    let rates = MutationRates {
        point: 1.0,
        pm_step: true,
    };
    let mut g = CgpGenome::random(&mut rng, 100);
    for _ in 0..1000 {
        g = mutate(&g, &mut rng, rates);
        g.validate().unwrap();
        for n in &g.nodes {
            assert!((1..=13).contains(&n.function));
            assert!((PM_SIGMA_MIN..=PM_SIGMA_MAX).contains(&n.pm_sigma));
        }
    }
}

#[test]
fn parameter_steps_clamp_at_the_top() {
    assert_eq!(perturb_pm(255.0, 10.0), 255.0);
    assert_eq!(perturb_pm(0.0, -10.0), 0.0);
    assert_eq!(perturb_pm(100.0, 5.5), 105.5);
}

#[test]
fn step_sizes_adapt_by_fixed_factors() {
    let mut rng = seeded_rng(12);
    let g = CgpGenome::random(&mut rng, 50);
    let m = mutate(
        &g,
        &mut rng,
        MutationRates {
            point: 0.0,
            pm_step: true,
        },
    );
    for (a, b) in g.nodes.iter().zip(&m.nodes) {
        let ratio = b.pm_sigma / a.pm_sigma;
        assert!((ratio - 1.15).abs() < 1e-12 || (ratio - 0.87).abs() < 1e-12);
        assert!((b.pm - a.pm).abs() <= b.pm_sigma + 1e-9);
    }
}

#[test]
fn text_round_trip() {
    let mut rng = seeded_rng(13);
    for _ in 0..50 {
        let g = mutate(&CgpGenome::random(&mut rng, 100), &mut rng, MutationRates::default());
        let back = CgpGenome::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
        assert_eq!(decode(&back).unwrap(), decode(&g).unwrap());
    }
}

#[test]
fn malformed_text_reports_the_line() {
    let mut rng = seeded_rng(14);
    let g = CgpGenome::random(&mut rng, 3);
    let mut lines: Vec<String> = g.to_text().lines().map(String::from).collect();
    lines[1] = "1 2".into();
    let err = CgpGenome::from_text(&lines.join("\n")).unwrap_err();
    assert_eq!(err.line, 2);

    // node 0 may only reach the inputs
    let bad = "1 2 0 0 1\n0 0 0\n";
    assert!(CgpGenome::from_text(bad).is_err());
    assert!(CgpGenome::from_text("").is_err());
}

#[test]
fn invalid_genomes_fail_to_decode() {
    let mut rng = seeded_rng(15);
    let mut g = CgpGenome::random(&mut rng, 10);
    g.nodes[3].function = 14;
    assert!(decode(&g).is_err());
    let mut g = CgpGenome::random(&mut rng, 10);
    g.outputs[1] = 12;
    assert!(decode(&g).is_err());
}

#[test]
fn renders_are_deterministic_and_banded() {
    let mut rng = seeded_rng(16);
    let s = spec(33, 17);
    for _ in 0..20 {
        let g = CgpGenome::random(&mut rng, 100);
        let p = decode(&g).unwrap();
        let full = render_phenotype(&p, s);
        assert_eq!(full, render(&g, s).unwrap());
        let mut stacked = HsvImage::filled(33, 0, 0, 0, 0);
        for band in [0..5, 5..6, 6..17] {
            let part = render_rows(&p, s, band);
            stacked.h.extend(part.h);
            stacked.s.extend(part.s);
            stacked.v.extend(part.v);
            stacked.height += part.height;
        }
        assert_eq!(stacked, full);
    }
}

#[test]
fn one_pixel_image() {
    let mut rng = seeded_rng(17);
    let g = CgpGenome::random(&mut rng, 100);
    let img = render(&g, spec(1, 1)).unwrap();
    assert_eq!(img.len(), 1);
    let [h, s, v] = decode(&g).unwrap().eval_pixel(0.0, 0.0);
    assert_eq!(img.pixel(0), (quantize(h), quantize(s), quantize(v)));
    assert!(ImageSpec::new(0, 4).is_err());
}

#[test]
fn random_pixels_stay_in_range() {
    let mut rng = seeded_rng(18);
    for _ in 0..10 {
        let p = decode(&CgpGenome::random(&mut rng, 100)).unwrap();
        for _ in 0..1000 {
            let out = p.eval_pixel(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            assert!(out.iter().all(|c| c.is_finite() && (0.0..=255.0).contains(c)));
        }
    }
}

#[test]
fn apply_function_fuzz() {
    let mut rng = seeded_rng(19);
    for _ in 0..1_000_000 {
        let k = rng.gen_range(1..=13u8);
        let (a, b, pm) = (
            rng.gen_range(0.0..=255.0),
            rng.gen_range(0.0..=255.0),
            rng.gen_range(0.0..=255.0),
        );
        let out = apply_function(k, a, b, pm).unwrap();
        assert!(out.is_finite() && (0.0..=255.0).contains(&out));
    }
}

#[test]
fn crossover_mixes_whole_nodes() {
    let mut rng = seeded_rng(20);
    let a = CgpGenome::random(&mut rng, 100);
    let b = CgpGenome::random(&mut rng, 100);
    let c = uniform_crossover(&a, &b, &mut rng);
    c.validate().unwrap();
    let from_a = c.nodes.iter().zip(&a.nodes).filter(|(x, y)| x == y).count();
    let from_b = c.nodes.iter().zip(&b.nodes).filter(|(x, y)| x == y).count();
    assert_eq!(from_a + from_b, 100);
    assert!(from_a > 20 && from_b > 20);
}

#[test]
fn hsv_round_trip_through_rgb() {
    let mut rng = seeded_rng(21);
    let g = CgpGenome::random(&mut rng, 100);
    let img = render(&g, spec(16, 16)).unwrap();
    let rgb = img.to_rgb();
    assert_eq!(rgb.len(), 16 * 16 * 3);
    let back = HsvImage::from_rgb(16, 16, &rgb).unwrap();
    assert_eq!(back.to_rgb(), rgb);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_is_stable_under_text_round_trip(seed in any::<u64>(), n in 1..120usize) {
        let mut rng = seeded_rng(seed);
        let g = CgpGenome::random(&mut rng, n);
        let p = decode(&g).unwrap();
        let again = decode(&CgpGenome::from_text(&g.to_text()).unwrap()).unwrap();
        prop_assert_eq!(p.canonical_form(), again.canonical_form());
        prop_assert!(p.active_nodes().len() <= n);
    }

    #[test]
    fn equal_phenotypes_paint_equal_images(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let g = CgpGenome::random(&mut rng, 60);
        let v = neutral_variant(&g, &mut rng, 30).genome;
        prop_assert_eq!(decode(&g).unwrap(), decode(&v).unwrap());
        prop_assert_eq!(render(&g, spec(9, 7)).unwrap(), render(&v, spec(9, 7)).unwrap());
    }

    #[test]
    fn functions_stay_in_range(k in 1..=13u8, a in 0.0..=255.0f64, b in 0.0..=255.0f64, pm in 0.0..=255.0f64) {
        let out = apply_function(k, a, b, pm).unwrap();
        prop_assert!(out.is_finite() && (0.0..=255.0).contains(&out));
    }
}
