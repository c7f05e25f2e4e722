use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::display::{DisplaySpec, IMAGE_SIZE};
use super::task::{Rgb, StimulusTable};
use crate::error::{Error, Result};

/// 8-bit RGB raster, row-major, no padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl Image {
    pub const CHANNELS: usize = 3;

    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let pixels = color
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * Self::CHANNELS)
            .collect();
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * Self::CHANNELS;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn put(&mut self, x: u32, y: u32, color: Rgb) {
        let i = (y as usize * self.width as usize + x as usize) * Self::CHANNELS;
        self.pixels[i..i + 3].copy_from_slice(&color);
    }

    pub fn count_not(&self, color: Rgb) -> usize {
        self.pixels
            .chunks_exact(Self::CHANNELS)
            .filter(|px| *px != color)
            .count()
    }

    pub fn write_png<W: Write>(&self, w: W) -> std::result::Result<(), png::EncodingError> {
        let mut encoder = png::Encoder::new(w, self.width, self.height);
        encoder.set_color(png::ColorType::Rgb);
        encoder.set_depth(png::BitDepth::Eight);
        encoder.set_compression(png::Compression::Fast);
        let mut writer = encoder.write_header()?;
        writer.write_image_data(&self.pixels)?;
        writer.finish()
    }

    pub fn encode_png(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_png(&mut buf)
            .expect("encoding into memory cannot fail");
        buf
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write_png(&mut out).map_err(|e| match e {
            png::EncodingError::IoError(source) => Error::io(path, source),
            other => Error::Png {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })?;
        out.flush().map_err(|e| Error::io(path, e))
    }
}

/// Rasterizes a display on the standard dark background. Pixels are either
/// fully covered or untouched; no anti-aliasing.
pub fn render_display(spec: &DisplaySpec) -> Image {
    render_display_on(spec, StimulusTable::standard().background)
}

pub fn render_display_on(spec: &DisplaySpec, background: Rgb) -> Image {
    let mut img = Image::filled(IMAGE_SIZE, IMAGE_SIZE, background);
    let last = IMAGE_SIZE as i32 - 1;
    for item in &spec.items {
        let (x0, y0, x1, y1) = item.bounds();
        let (cx, cy) = item.center;
        for y in y0.max(0)..=y1.min(last) {
            for x in x0.max(0)..=x1.min(last) {
                if item.shape.covers(f64::from(x - cx), f64::from(y - cy)) {
                    img.put(x as u32, y as u32, item.color);
                }
            }
        }
    }
    img
}
