use std::io::Write;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};

use super::ImagingError;

/// Row-major 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::InvalidRaster("width and height must be at least 1".into()));
        }
        if pixels.len() != width as usize * height as usize * 3 {
            return Err(ImagingError::InvalidRaster(format!(
                "expected {} bytes for {width}x{height} RGB, got {}",
                width as usize * height as usize * 3,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, ImagingError> {
        let pixels = rgb.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Copy of the `w`x`h` window at (`x0`, `y0`). The window must lie inside
    /// the image.
    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> RasterImage {
        assert!(x0 + w <= self.width && y0 + h <= self.height, "crop window outside image");
        let mut pixels = Vec::with_capacity(w as usize * h as usize * 3);
        for y in y0..y0 + h {
            let start = (y as usize * self.width as usize + x0 as usize) * 3;
            pixels.extend_from_slice(&self.pixels[start..start + w as usize * 3]);
        }
        RasterImage { width: w, height: h, pixels }
    }

    pub fn from_ppm_bytes(bytes: &[u8]) -> Result<Self, ImagingError> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Pnm)?.to_rgb8();
        let (w, h) = img.dimensions();
        Self::new(w, h, img.into_raw())
    }

    pub fn read_ppm<P: AsRef<Path>>(path: P) -> Result<Self, ImagingError> {
        Self::from_ppm_bytes(&std::fs::read(path)?)
    }

    /// Binary P6 encoding.
    pub fn to_ppm_bytes(&self) -> Result<Vec<u8>, ImagingError> {
        let mut buf = Vec::new();
        PnmEncoder::new(&mut buf).with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary)).write_image(
            &self.pixels,
            self.width,
            self.height,
            ExtendedColorType::Rgb8,
        )?;
        Ok(buf)
    }

    pub fn write_ppm<P: AsRef<Path>>(&self, path: P) -> Result<(), ImagingError> {
        std::fs::File::create(path)?.write_all(&self.to_ppm_bytes()?)?;
        Ok(())
    }
}

/// Per-pixel values in [0, 1]; binary masks hold only 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl Mask {
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::InvalidRaster("width and height must be at least 1".into()));
        }
        if values.len() != width as usize * height as usize {
            return Err(ImagingError::InvalidRaster(format!(
                "expected {} mask values, got {}",
                width as usize * height as usize,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ImagingError::InvalidRaster(format!("mask value {v} outside [0,1]")));
        }
        Ok(Self { width, height, values })
    }

    pub fn filled(width: u32, height: u32, value: f64) -> Result<Self, ImagingError> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: f64) {
        assert!((0.0..=1.0).contains(&v), "mask value outside [0,1]");
        self.values[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn same_shape(&self, other: &Mask) -> Result<(), ImagingError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImagingError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    /// Number of set pixels, reading values ≥ 0.5 as foreground.
    pub fn count_set(&self) -> usize {
        self.values.iter().filter(|&&v| v >= 0.5).count()
    }

    pub fn from_pgm_bytes(bytes: &[u8]) -> Result<Self, ImagingError> {
        let img = image::load_from_memory_with_format(bytes, ImageFormat::Pnm)?.to_luma8();
        let (w, h) = img.dimensions();
        Self::new(w, h, img.into_raw().into_iter().map(|v| f64::from(v) / 255.0).collect())
    }

    pub fn read_pgm<P: AsRef<Path>>(path: P) -> Result<Self, ImagingError> {
        Self::from_pgm_bytes(&std::fs::read(path)?)
    }

    /// Binary P5 encoding with value v stored as round(255·v).
    pub fn to_pgm_bytes(&self) -> Result<Vec<u8>, ImagingError> {
        let raw: Vec<u8> = self.values.iter().map(|v| (v * 255.0).round() as u8).collect();
        let mut buf = Vec::new();
        PnmEncoder::new(&mut buf).with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary)).write_image(
            &raw,
            self.width,
            self.height,
            ExtendedColorType::L8,
        )?;
        Ok(buf)
    }

    pub fn write_pgm<P: AsRef<Path>>(&self, path: P) -> Result<(), ImagingError> {
        std::fs::File::create(path)?.write_all(&self.to_pgm_bytes()?)?;
        Ok(())
    }
}
