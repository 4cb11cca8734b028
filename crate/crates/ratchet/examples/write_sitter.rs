//! Writes the procedural test sitter and its face mask as PNGs.
//!
//! Usage: `cargo run -p ratchet --example write_sitter -- [dir] [size]`

use std::path::PathBuf;

use ratchet::images::write_sitter;
use ratchet_core::portrait::synthetic_sitter;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "assets".into()));
    let size: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(64);
    std::fs::create_dir_all(&dir)?;
    let assets = synthetic_sitter(size, size);
    write_sitter(&assets, &dir.join("sitter.png"), &dir.join("mask.png"))?;
    println!("wrote {}/sitter.png and {}/mask.png", dir.display(), dir.display());
    Ok(())
}
