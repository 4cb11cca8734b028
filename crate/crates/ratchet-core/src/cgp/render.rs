use alloc::vec::Vec;

use super::genome::CgpGenome;
use super::phenotype::{decode, Phenotype};
use crate::color::hsv_to_rgb;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSpec {
    pub width: usize,
    pub height: usize,
}

impl ImageSpec {
    pub fn new(width: usize, height: usize) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::config("image", "width and height must be >= 1"));
        }
        Ok(ImageSpec { width, height })
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }
}

/// An image as three row-major 8-bit planes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HsvImage {
    pub width: usize,
    pub height: usize,
    pub h: Vec<u8>,
    pub s: Vec<u8>,
    pub v: Vec<u8>,
}

impl HsvImage {
    pub fn filled(width: usize, height: usize, h: u8, s: u8, v: u8) -> Self {
        let n = width * height;
        HsvImage {
            width,
            height,
            h: alloc::vec![h; n],
            s: alloc::vec![s; n],
            v: alloc::vec![v; n],
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel(&self, i: usize) -> (u8, u8, u8) {
        (self.h[i], self.s[i], self.v[i])
    }

    pub fn set_pixel(&mut self, i: usize, (h, s, v): (u8, u8, u8)) {
        self.h[i] = h;
        self.s[i] = s;
        self.v[i] = v;
    }

    /// Interleaved 8-bit RGB, row-major.
    pub fn to_rgb(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() * 3);
        for i in 0..self.len() {
            out.extend_from_slice(&hsv_to_rgb(self.h[i], self.s[i], self.v[i]));
        }
        out
    }

    pub fn from_rgb(width: usize, height: usize, rgb: &[u8]) -> Result<Self, Error> {
        if rgb.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                got_w: rgb.len() / 3,
                got_h: 1,
                want_w: width,
                want_h: height,
            });
        }
        let mut img = HsvImage::filled(width, height, 0, 0, 0);
        for (i, px) in rgb.chunks_exact(3).enumerate() {
            img.set_pixel(i, crate::color::rgb_to_hsv([px[0], px[1], px[2]]));
        }
        Ok(img)
    }
}

/// Rounds a node output onto the 8-bit channel scale.
pub fn quantize(value: f64) -> u8 {
    libm::round(value.clamp(0.0, 255.0)) as u8
}

/// Paints every pixel of `spec` with the phenotype, in row-major order.
/// Pixel (col, row) is evaluated at unit coordinates (col/width, row/height).
pub fn render_phenotype(phenotype: &Phenotype, spec: ImageSpec) -> HsvImage {
    render_rows(phenotype, spec, 0..spec.height)
}

/// Renders a horizontal band of rows. Bands are position-addressed, so
/// rendering them independently and stacking them in row order equals the
/// full render.
pub fn render_rows(phenotype: &Phenotype, spec: ImageSpec, rows: core::ops::Range<usize>) -> HsvImage {
    let band_height = rows.len();
    let mut img = HsvImage::filled(spec.width, band_height, 0, 0, 0);
    let mut scratch = Vec::with_capacity(phenotype.active_nodes().len() + 2);
    for (band_row, row) in rows.enumerate() {
        let y = row as f64 / spec.height as f64 * 255.0;
        for col in 0..spec.width {
            let x = col as f64 / spec.width as f64 * 255.0;
            let [h, s, v] = phenotype.eval_into(x, y, &mut scratch);
            img.set_pixel(band_row * spec.width + col, (quantize(h), quantize(s), quantize(v)));
        }
    }
    img
}

pub fn render(genome: &CgpGenome, spec: ImageSpec) -> Result<HsvImage, Error> {
    Ok(render_phenotype(&decode(genome)?, spec))
}
