use alloc::vec::Vec;

use crate::cgp::{HsvImage, ImageSpec};
use crate::Error;

/// The sitter image and its face mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SitterAssets {
    image: HsvImage,
    face: Vec<bool>,
}

impl SitterAssets {
    pub fn new(image: HsvImage, face: Vec<bool>) -> Result<Self, Error> {
        if face.len() != image.len() {
            return Err(Error::InvalidAssets("mask dimensions differ from the sitter image"));
        }
        if image.is_empty() {
            return Err(Error::InvalidAssets("sitter image is empty"));
        }
        if !face.iter().any(|&f| f) {
            return Err(Error::InvalidAssets("mask has no face pixel"));
        }
        if face.iter().all(|&f| f) {
            return Err(Error::InvalidAssets("mask has no background pixel"));
        }
        Ok(SitterAssets { image, face })
    }

    pub fn image(&self) -> &HsvImage {
        &self.image
    }

    pub fn face(&self) -> &[bool] {
        &self.face
    }

    pub fn spec(&self) -> ImageSpec {
        ImageSpec {
            width: self.image.width,
            height: self.image.height,
        }
    }

    pub(crate) fn check_dimensions(&self, image: &HsvImage) -> Result<(), Error> {
        if image.width != self.image.width || image.height != self.image.height {
            return Err(Error::DimensionMismatch {
                got_w: image.width,
                got_h: image.height,
                want_w: self.image.width,
                want_h: self.image.height,
            });
        }
        Ok(())
    }
}

/// A procedurally drawn test sitter: a shaded skin-toned oval face with dark
/// eyes and mouth, on a cool blue-grey background with a soft vertical
/// gradient. The mask is the face oval.
pub fn synthetic_sitter(width: usize, height: usize) -> SitterAssets {
    let mut img = HsvImage::filled(width, height, 0, 0, 0);
    let mut face = alloc::vec![false; width * height];
    let (w, h) = (width as f64, height as f64);
    let (cx, cy) = (0.5 * w, 0.47 * h);
    let (rx, ry) = (0.26 * w, 0.34 * h);
    for row in 0..height {
        for col in 0..width {
            let i = row * width + col;
            let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
            let (dx, dy) = ((x - cx) / rx, (y - cy) / ry);
            let r2 = dx * dx + dy * dy;
            if r2 <= 1.0 {
                face[i] = true;
                // light from the upper left
                let shade = 1.0 - 0.25 * r2 - 0.1 * dx + 0.05 * dy;
                let mut v = 200.0 * shade;
                let eye_y = cy - 0.2 * ry;
                for ex in [cx - 0.38 * rx, cx + 0.38 * rx] {
                    let (ddx, ddy) = ((x - ex) / (0.16 * rx), (y - eye_y) / (0.08 * ry));
                    if ddx * ddx + ddy * ddy <= 1.0 {
                        v = 55.0;
                    }
                }
                let (mdx, mdy) = ((x - cx) / (0.4 * rx), (y - (cy + 0.5 * ry)) / (0.06 * ry));
                if mdx * mdx + mdy * mdy <= 1.0 {
                    v = 95.0;
                }
                img.set_pixel(i, (16, 120, clamp_byte(v)));
            } else {
                let v = 70.0 + 50.0 * (y / h);
                img.set_pixel(i, (150, 70, clamp_byte(v)));
            }
        }
    }
    SitterAssets::new(img, face).expect("synthetic sitter has face and background")
}

fn clamp_byte(v: f64) -> u8 {
    libm::round(v.clamp(0.0, 255.0)) as u8
}
