//! HSV <-> RGB conversion on the 8-bit channel model used throughout the
//! crate: H, S and V are all in [0, 255], with H spanning the full colour
//! wheel (255 wraps to 0).

/// Hue byte to degrees in [0, 360).
pub fn hue_degrees(h: u8) -> f64 {
    let deg = f64::from(h) * 360.0 / 255.0;
    if deg >= 360.0 {
        deg - 360.0
    } else {
        deg
    }
}

/// Hexcone HSV to RGB.
pub fn hsv_to_rgb(h: u8, s: u8, v: u8) -> [u8; 3] {
    let s_f = f64::from(s) / 255.0;
    let v_f = f64::from(v) / 255.0;
    let sector = hue_degrees(h) / 60.0;
    let i = libm::floor(sector);
    let frac = sector - i;
    let p = v_f * (1.0 - s_f);
    let q = v_f * (1.0 - s_f * frac);
    let t = v_f * (1.0 - s_f * (1.0 - frac));
    let (r, g, b) = match i as u8 {
        0 => (v_f, t, p),
        1 => (q, v_f, p),
        2 => (p, v_f, t),
        3 => (p, q, v_f),
        4 => (t, p, v_f),
        _ => (v_f, p, q),
    };
    [r, g, b].map(to_byte)
}

/// Hexcone RGB to HSV.
pub fn rgb_to_hsv(rgb: [u8; 3]) -> (u8, u8, u8) {
    let [r, g, b] = rgb.map(|c| f64::from(c) / 255.0);
    let max = f64::max(r, f64::max(g, b));
    let min = f64::min(r, f64::min(g, b));
    let delta = max - min;
    let hue_deg = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta) % 6.0)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let hue_deg = if hue_deg < 0.0 { hue_deg + 360.0 } else { hue_deg };
    let h = libm::round(hue_deg * 255.0 / 360.0);
    let h = if h >= 255.0 { 0.0 } else { h };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h as u8, to_byte(s), to_byte(max))
}

fn to_byte(unit: f64) -> u8 {
    libm::round((unit * 255.0).clamp(0.0, 255.0)) as u8
}
