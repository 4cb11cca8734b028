//! Resemblance and the three painterly rules.
//!
//! The painterly rules are heuristic stand-ins for a portrait painter's
//! knowledge: tonal separation of face and background with a quiet
//! background (composition), tonal fidelity plus analogous/complementary
//! hue harmony (tonality and colour), and one dominant hue with one
//! subdominant hue (dominance). Every constant is a field of
//! [`RuleConstants`].

use crate::cgp::HsvImage;
use crate::color::hue_degrees;
use crate::Error;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::assets::SitterAssets;

const HUE_BINS: usize = 12;

/// How the three rule scores fold into one painterly score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PainterlyAggregate {
    /// A single very high rule dominates.
    #[default]
    Max,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RuleConstants {
    /// Resemblance weight of face pixels relative to background pixels.
    pub face_weight: f64,
    pub weight_v: f64,
    pub weight_h: f64,
    pub weight_s: f64,
    /// V difference (in channel units) that counts as full tonal separation
    /// and the background V deviation that counts as fully busy.
    pub tonal_units: f64,
    /// Half-width in degrees of the analogous and complementary windows.
    pub harmony_window_deg: f64,
    pub dominant_share: f64,
    pub subdominant_share: f64,
    pub tonal_weight: f64,
    pub aggregate: PainterlyAggregate,
}

impl Default for RuleConstants {
    fn default() -> Self {
        RuleConstants {
            face_weight: 2.0,
            weight_v: 0.5,
            weight_h: 0.25,
            weight_s: 0.25,
            tonal_units: 64.0,
            harmony_window_deg: 30.0,
            dominant_share: 0.65,
            subdominant_share: 0.25,
            tonal_weight: 0.6,
            aggregate: PainterlyAggregate::Max,
        }
    }
}

impl RuleConstants {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("face_weight", self.face_weight),
            ("tonal_units", self.tonal_units),
            ("dominant_share", self.dominant_share),
            ("subdominant_share", self.subdominant_share),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, "must be > 0"));
            }
        }
        if !(self.harmony_window_deg > 0.0 && self.harmony_window_deg < 90.0) {
            return Err(Error::config("harmony_window_deg", "must be in (0, 90)"));
        }
        crate::error::check_probability("tonal_weight", self.tonal_weight)?;
        let sum = self.weight_v + self.weight_h + self.weight_s;
        if self.weight_v < 0.0 || self.weight_h < 0.0 || self.weight_s < 0.0 || libm::fabs(sum - 1.0) > 1e-9 {
            return Err(Error::config("weight_v", "channel weights must be >= 0 and sum to 1"));
        }
        Ok(())
    }
}

/// Resemblance plus the three painterly rules for one image. All in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleScores {
    pub resemblance: f64,
    pub p1_composition: f64,
    pub p2_tonal_color: f64,
    pub p3_dominance: f64,
    pub painterly: f64,
}

impl RuleScores {
    pub fn from_parts(resemblance: f64, rules: (f64, f64, f64), aggregate: PainterlyAggregate) -> Self {
        let (p1, p2, p3) = rules;
        let painterly = match aggregate {
            PainterlyAggregate::Max => f64::max(p1, f64::max(p2, p3)),
            PainterlyAggregate::Mean => (p1 + p2 + p3) / 3.0,
        };
        RuleScores {
            resemblance,
            p1_composition: p1,
            p2_tonal_color: p2,
            p3_dominance: p3,
            painterly,
        }
    }
}

/// Circular hue distance on the 8-bit wheel, in [0, 127.5].
fn hue_distance(a: u8, b: u8) -> f64 {
    let d = libm::fabs(f64::from(a) - f64::from(b));
    f64::min(d, 255.0 - d)
}

/// 1 minus the weighted mean per-pixel HSV distance to the sitter.
pub fn resemblance(image: &HsvImage, assets: &SitterAssets, k: &RuleConstants) -> Result<f64, Error> {
    assets.check_dimensions(image)?;
    let sitter = assets.image();
    let (mut total, mut weight) = (0.0, 0.0);
    for (i, &is_face) in assets.face().iter().enumerate() {
        let dv = libm::fabs(f64::from(image.v[i]) - f64::from(sitter.v[i])) / 255.0;
        let ds = libm::fabs(f64::from(image.s[i]) - f64::from(sitter.s[i])) / 255.0;
        let dh = 2.0 * hue_distance(image.h[i], sitter.h[i]) / 255.0;
        let w = if is_face { k.face_weight } else { 1.0 };
        total += w * (k.weight_v * dv + k.weight_h * dh + k.weight_s * ds);
        weight += w;
    }
    Ok((1.0 - total / weight).clamp(0.0, 1.0))
}

/// 12-bin hue histogram with saturation*value weights, over the pixels
/// selected by `select`. Returns the bin weights and their total.
fn hue_histogram(image: &HsvImage, mut select: impl FnMut(usize) -> bool) -> ([f64; HUE_BINS], f64) {
    let mut bins = [0.0; HUE_BINS];
    for i in 0..image.len() {
        if !select(i) {
            continue;
        }
        let w = f64::from(image.s[i]) * f64::from(image.v[i]) / (255.0 * 255.0);
        let bin = (hue_degrees(image.h[i]) / 30.0) as usize % HUE_BINS;
        bins[bin] += w;
    }
    let total = bins.iter().sum();
    (bins, total)
}

/// Centre (degrees) of the heaviest bin; first bin wins ties.
fn dominant_hue(bins: &[f64; HUE_BINS]) -> f64 {
    let mut best = 0;
    for (i, &w) in bins.iter().enumerate() {
        if w > bins[best] {
            best = i;
        }
    }
    best as f64 * 30.0 + 15.0
}

/// 1 inside the analogous or complementary windows, falling linearly to 0
/// at the point farthest from both.
fn harmony(face_deg: f64, bg_deg: f64, window: f64) -> f64 {
    let d = libm::fabs(face_deg - bg_deg) % 360.0;
    let d = f64::min(d, 360.0 - d);
    let complement = 180.0 - window;
    if d <= window || d >= complement {
        return 1.0;
    }
    let miss = f64::min(d - window, complement - d);
    let farthest = (complement - window) / 2.0;
    (1.0 - miss / farthest).clamp(0.0, 1.0)
}

struct Moments {
    sum: f64,
    sum_sq: f64,
    n: f64,
}

impl Moments {
    fn mean(&self) -> f64 {
        if self.n == 0.0 {
            0.0
        } else {
            self.sum / self.n
        }
    }

    fn std(&self) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        let m = self.mean();
        libm::sqrt(f64::max(0.0, self.sum_sq / self.n - m * m))
    }
}

/// Composition, tonal/colour and dominance scores.
pub fn painterly_rules(image: &HsvImage, assets: &SitterAssets, k: &RuleConstants) -> Result<(f64, f64, f64), Error> {
    assets.check_dimensions(image)?;
    let face = assets.face();

    // p1: face/background tonal separation and a quiet background
    let mut fm = Moments { sum: 0.0, sum_sq: 0.0, n: 0.0 };
    let mut bm = Moments { sum: 0.0, sum_sq: 0.0, n: 0.0 };
    for (i, &is_face) in face.iter().enumerate() {
        let v = f64::from(image.v[i]);
        let m = if is_face { &mut fm } else { &mut bm };
        m.sum += v;
        m.sum_sq += v * v;
        m.n += 1.0;
    }
    let separation = f64::min(1.0, libm::fabs(fm.mean() - bm.mean()) / k.tonal_units);
    let quietness = f64::max(0.0, 1.0 - bm.std() / k.tonal_units);
    let p1 = 0.5 * separation + 0.5 * quietness;

    // p2: tonal fidelity to the sitter and hue harmony
    let sitter = assets.image();
    let v_dist: f64 = (0..image.len())
        .map(|i| libm::fabs(f64::from(image.v[i]) - f64::from(sitter.v[i])))
        .sum::<f64>()
        / image.len() as f64;
    let (face_bins, face_total) = hue_histogram(image, |i| face[i]);
    let (bg_bins, bg_total) = hue_histogram(image, |i| !face[i]);
    let harmony = if face_total > 0.0 && bg_total > 0.0 {
        harmony(dominant_hue(&face_bins), dominant_hue(&bg_bins), k.harmony_window_deg)
    } else {
        0.0
    };
    let p2 = k.tonal_weight * (1.0 - v_dist / 255.0) + (1.0 - k.tonal_weight) * harmony;

    // p3: one dominant and one subdominant hue
    let (bins, total) = hue_histogram(image, |_| true);
    let mut shares = if total > 0.0 {
        bins.map(|w| w / total)
    } else {
        [1.0 / HUE_BINS as f64; HUE_BINS]
    };
    shares.sort_by(|a, b| b.total_cmp(a));
    let (q1, q2) = (shares[0], shares[1]);
    let miss = (libm::fabs(q1 - k.dominant_share) / k.dominant_share
        + libm::fabs(q2 - k.subdominant_share) / k.subdominant_share)
        / 2.0;
    let p3 = 1.0 - miss.clamp(0.0, 1.0);

    Ok((p1.clamp(0.0, 1.0), p2.clamp(0.0, 1.0), p3))
}

/// All four scores for one image.
pub fn score_image(image: &HsvImage, assets: &SitterAssets, k: &RuleConstants) -> Result<RuleScores, Error> {
    let r = resemblance(image, assets, k)?;
    let rules = painterly_rules(image, assets, k)?;
    Ok(RuleScores::from_parts(r, rules, k.aggregate))
}

/// Blend of resemblance and the painterly score at painterly weight `w`.
pub fn blend(scores: &RuleScores, w_painterly: f64) -> f64 {
    (1.0 - w_painterly) * scores.resemblance + w_painterly * scores.painterly
}
