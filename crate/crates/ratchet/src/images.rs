use std::path::Path;

use anyhow::Context;
use image::{GrayImage, RgbImage};
use ratchet_core::cgp::HsvImage;
use ratchet_core::portrait::SitterAssets;

use crate::AppError;

/// Mask pixels at or above this luminance belong to the face.
pub const MASK_THRESHOLD: u8 = 128;

/// Loads the sitter and its face mask. Every problem with the inputs is a
/// validation error.
pub fn load_sitter(sitter: &Path, mask: &Path) -> Result<SitterAssets, AppError> {
    let invalid = |what: &str, p: &Path, e: &dyn std::fmt::Display| {
        AppError::Validation(format!("{what} {}: {e}", p.display()))
    };
    let rgb = image::open(sitter)
        .map_err(|e| invalid("cannot read sitter", sitter, &e))?
        .to_rgb8();
    let luma = image::open(mask)
        .map_err(|e| invalid("cannot read mask", mask, &e))?
        .to_luma8();
    if rgb.dimensions() != luma.dimensions() {
        return Err(AppError::Validation(format!(
            "mask {} is {}x{} but the sitter is {}x{}",
            mask.display(),
            luma.width(),
            luma.height(),
            rgb.width(),
            rgb.height()
        )));
    }
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let hsv = HsvImage::from_rgb(w, h, rgb.as_raw()).map_err(|e| invalid("bad sitter", sitter, &e))?;
    let face = luma.as_raw().iter().map(|&l| l >= MASK_THRESHOLD).collect();
    SitterAssets::new(hsv, face).map_err(|e| invalid("bad mask", mask, &e))
}

pub fn write_png(image: &HsvImage, path: &Path) -> anyhow::Result<()> {
    let rgb = RgbImage::from_raw(image.width as u32, image.height as u32, image.to_rgb())
        .context("image buffer size")?;
    rgb.save_with_format(path, image::ImageFormat::Png)
        .with_context(|| format!("writing {}", path.display()))
}

/// Writes a sitter and its mask (face white, background black).
pub fn write_sitter(assets: &SitterAssets, sitter: &Path, mask: &Path) -> anyhow::Result<()> {
    write_png(assets.image(), sitter)?;
    let spec = assets.spec();
    let pixels = assets.face().iter().map(|&f| if f { 255 } else { 0 }).collect();
    GrayImage::from_raw(spec.width as u32, spec.height as u32, pixels)
        .context("mask buffer size")?
        .save_with_format(mask, image::ImageFormat::Png)
        .with_context(|| format!("writing {}", mask.display()))
}
