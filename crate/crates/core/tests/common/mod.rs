//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use castseg::raster::{encode_png_gray, BinaryMask, GrayImage};

pub fn castseg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_castseg"))
}

pub fn run(args: &[&str]) -> Output {
    castseg().args(args).output().expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

pub fn write_png(path: &Path, image: &GrayImage) {
    std::fs::write(path, encode_png_gray(image).unwrap()).unwrap();
}

/// A disc or axis-aligned ellipse blob.
#[derive(Debug, Clone, Copy)]
pub struct Blob {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
}

impl Blob {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        let dx = (x as f64 + 0.5 - self.cx) / self.rx;
        let dy = (y as f64 + 0.5 - self.cy) / self.ry;
        dx * dx + dy * dy <= 1.0
    }
}

/// One synthetic radiograph: flat dark background, bright flat blobs.
pub struct Scene {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub background: u8,
    pub foreground: u8,
    pub blobs: Vec<Blob>,
}

impl Scene {
    pub fn mask(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            self.blobs.iter().any(|b| b.contains(x, y))
        })
        .unwrap()
    }

    pub fn image(&self) -> GrayImage {
        let mask = self.mask();
        GrayImage::from_fn(self.width, self.height, |x, y| {
            if mask.get(x, y) {
                self.foreground
            } else {
                self.background
            }
        })
        .unwrap()
    }
}

/// Six noise-free scenes with 0 to 3 separated blobs each.
pub fn synthetic_corpus() -> Vec<Scene> {
    let blob = |cx, cy, rx, ry| Blob { cx, cy, rx, ry };
    let layouts: [Vec<Blob>; 6] = [
        vec![blob(16.0, 14.0, 6.0, 6.0)],
        vec![blob(12.0, 12.0, 4.0, 4.0), blob(44.0, 30.0, 7.0, 4.5)],
        vec![
            blob(10.0, 36.0, 3.5, 6.0),
            blob(30.0, 12.0, 5.0, 5.0),
            blob(52.0, 36.0, 4.0, 4.0),
        ],
        vec![],
        vec![blob(32.0, 24.0, 12.0, 8.0)],
        vec![blob(8.0, 8.0, 3.0, 3.0), blob(54.0, 10.0, 5.5, 3.0)],
    ];
    layouts
        .into_iter()
        .enumerate()
        .map(|(i, blobs)| Scene {
            name: format!("cast_{:02}.png", i + 1),
            width: 64,
            height: 48,
            background: 20 + 4 * i as u8,
            foreground: 225 + 5 * i as u8,
            blobs,
        })
        .collect()
}

/// Write images to `dir/images` and masks to `dir/masks`.
pub fn write_corpus(dir: &Path, scenes: &[Scene]) -> (PathBuf, PathBuf) {
    let images = dir.join("images");
    let masks = dir.join("masks");
    std::fs::create_dir_all(&images).unwrap();
    std::fs::create_dir_all(&masks).unwrap();
    for s in scenes {
        write_png(&images.join(&s.name), &s.image());
        write_png(&masks.join(&s.name), &s.mask().to_gray());
    }
    (images, masks)
}
