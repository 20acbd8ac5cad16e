//! PGM (P2/P5) and PNG codecs for gray images and masks.

use std::io::Cursor;
use std::path::Path;

use super::{BinaryMask, GrayImage};
use crate::error::{Error, Result};

/// Read an 8-bit PNG or PGM from disk. RGB input is collapsed to luma.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// Decode PNG or PGM bytes, picked by signature.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat(format!(
            "netpbm P{} (only P2/P5 graymaps are read)",
            bytes[1] as char
        )))
    } else {
        Err(Error::UnsupportedFormat("unrecognized signature".into()))
    }
}

/// `round(0.299 R + 0.587 G + 0.114 B)`.
pub(crate) fn luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .round()
        .min(255.0) as u8
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::MalformedImage(format!("PNG: {e}")))?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "PNG with {}-bit samples",
            depth as u8
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::MalformedImage("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::MalformedImage(format!("PNG: {e}")))?;
    buf.truncate(info.buffer_size());

    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => {
            return Err(Error::UnsupportedFormat("PNG indexed color".into()));
        }
    };
    let (w, h) = (info.width, info.height);
    let stride = info.line_size;
    let mut data = Vec::with_capacity(w as usize * h as usize);
    for row in buf.chunks_exact(stride).take(h as usize) {
        for px in row[..w as usize * channels].chunks_exact(channels) {
            data.push(match channels {
                1 | 2 => px[0],
                _ => luma(px[0], px[1], px[2]),
            });
        }
    }
    GrayImage::new(w, h, data)
}

fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let binary = bytes[1] == b'5';
    let mut pos = 2;
    let mut header = [0u32; 3];
    for field in header.iter_mut() {
        *field = next_token(bytes, &mut pos)?;
    }
    let [width, height, maxval] = header;
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat(format!(
            "PGM with maxval {maxval} (8-bit only)"
        )));
    }
    let n = width as usize * height as usize;
    let raw: Vec<u32> = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let raster = bytes
            .get(pos..pos + n)
            .ok_or_else(|| Error::MalformedImage("PGM raster truncated".into()))?;
        raster.iter().map(|&v| v as u32).collect()
    } else {
        (0..n).map(|_| next_token(bytes, &mut pos)).collect::<Result<_>>()?
    };
    if let Some(v) = raw.iter().find(|&&v| v > maxval) {
        return Err(Error::MalformedImage(format!("PGM sample {v} exceeds maxval {maxval}")));
    }
    // maxval is white: rescale to the 0..=255 range, rounding to nearest
    let data = raw
        .into_iter()
        .map(|v| ((v * 255 + maxval / 2) / maxval) as u8)
        .collect();
    GrayImage::new(width, height, data)
}

/// Next decimal token, skipping whitespace and `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&c) = bytes.get(*pos) {
                    *pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            }
            Some(c) if c.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::MalformedImage("PGM header truncated".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedImage(format!("PGM: expected number at byte {start}")))
}

/// Binary PGM (P5, maxval 255).
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.data());
    out
}

/// Mask as P5 PGM: 0 background, 255 defect.
pub fn encode_mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    encode_pgm(&mask.to_gray())
}

pub fn encode_png_gray(image: &GrayImage) -> Result<Vec<u8>> {
    encode_png(image.width(), image.height(), png::ColorType::Grayscale, image.data())
}

/// 8-bit RGB PNG from interleaved `data` (length `3 × width × height`).
pub fn encode_png_rgb(width: u32, height: u32, data: &[u8]) -> Result<Vec<u8>> {
    encode_png(width, height, png::ColorType::Rgb, data)
}

fn encode_png(width: u32, height: u32, color: png::ColorType, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width, height);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(data)?;
        writer.finish()?;
    }
    Ok(out)
}
