//! 8-bit raster images and binary PPM (P6) / PGM (P5) serialization.

use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// A row-major 8-bit image with 1 (gray/binary) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new_gray(width: usize, height: usize) -> Self {
        RasterImage {
            width,
            height,
            channels: 1,
            data: vec![0; width * height],
        }
    }

    pub fn new_rgb(width: usize, height: usize) -> Self {
        RasterImage {
            width,
            height,
            channels: 3,
            data: vec![0; width * height * 3],
        }
    }

    /// Wrap raw row-major data. The length must be `width * height * channels`.
    pub fn from_raw(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::ImageFormat(format!(
                "unsupported channel count {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::ImageFormat(format!(
                "data length {} does not match {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, value: u8) {
        self.data[(y * self.width + x) * self.channels + c] = value;
    }

    #[inline]
    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_rgb(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn fill(&mut self, value: u8) {
        self.data.fill(value);
    }

    /// Copy of the sub-rectangle `[x0, x0+w) x [y0, y0+h)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<RasterImage> {
        if x0 + w > self.width || y0 + h > self.height {
            return Err(Error::ImageFormat(format!(
                "crop {w}x{h}+{x0}+{y0} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut out = Vec::with_capacity(w * h * self.channels);
        for y in y0..y0 + h {
            let start = (y * self.width + x0) * self.channels;
            out.extend_from_slice(&self.data[start..start + w * self.channels]);
        }
        RasterImage::from_raw(w, h, self.channels, out)
    }

    /// Write as binary PPM (P6) for RGB or PGM (P5) for single-channel.
    pub fn write_pnm<W: Write>(&self, w: &mut W) -> Result<()> {
        let magic = if self.channels == 3 { "P6" } else { "P5" };
        write!(w, "{magic}\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn save_pnm<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_pnm(&mut f)
    }

    /// Read a binary PPM (P6) or PGM (P5) image.
    pub fn read_pnm<R: Read>(r: R) -> Result<RasterImage> {
        let mut reader = BufReader::new(r);
        let mut header = Vec::new();
        // Header: magic, width, height, maxval; whitespace separated, with
        // '#' comments allowed between tokens.
        let mut tokens: Vec<String> = Vec::new();
        while tokens.len() < 4 {
            header.clear();
            let n = reader.read_until(b'\n', &mut header)?;
            if n == 0 {
                return Err(Error::ImageFormat("truncated PNM header".into()));
            }
            let line = String::from_utf8_lossy(&header);
            let line = line.split('#').next().unwrap_or("");
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        let magic = tokens[0].as_str();
        let channels = match magic {
            "P6" => 3,
            "P5" => 1,
            other => {
                return Err(Error::ImageFormat(format!(
                    "unsupported PNM magic {other:?}"
                )))
            }
        };
        let width: usize = tokens[1]
            .parse()
            .map_err(|_| Error::ImageFormat("bad width".into()))?;
        let height: usize = tokens[2]
            .parse()
            .map_err(|_| Error::ImageFormat("bad height".into()))?;
        let maxval: usize = tokens[3]
            .parse()
            .map_err(|_| Error::ImageFormat("bad maxval".into()))?;
        if maxval != 255 {
            return Err(Error::ImageFormat(format!(
                "only maxval 255 supported, got {maxval}"
            )));
        }
        let mut data = vec![0u8; width * height * channels];
        reader.read_exact(&mut data)?;
        RasterImage::from_raw(width, height, channels, data)
    }

    pub fn load_pnm<P: AsRef<Path>>(path: P) -> Result<RasterImage> {
        RasterImage::read_pnm(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pnm_round_trip_rgb() {
        let mut img = RasterImage::new_rgb(4, 3);
        img.set_rgb(1, 2, [10, 20, 30]);
        img.set_rgb(3, 0, [255, 0, 127]);
        let mut buf = Vec::new();
        img.write_pnm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n4 3\n255\n"));
        let back = RasterImage::read_pnm(&buf[..]).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn pnm_round_trip_gray() {
        let mut img = RasterImage::new_gray(5, 5);
        img.set(2, 2, 0, 200);
        let mut buf = Vec::new();
        img.write_pnm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n5 5\n255\n"));
        let back = RasterImage::read_pnm(&buf[..]).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut buf: Vec<u8> = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        buf.extend_from_slice(&[7, 9]);
        let img = RasterImage::read_pnm(&buf[..]).unwrap();
        assert_eq!(img.get(0, 0, 0), 7);
        assert_eq!(img.get(1, 0, 0), 9);
    }

    #[test]
    fn crop_extracts_subrect() {
        let mut img = RasterImage::new_gray(6, 4);
        for y in 0..4 {
            for x in 0..6 {
                img.set(x, y, 0, (y * 6 + x) as u8);
            }
        }
        let sub = img.crop(2, 1, 3, 2).unwrap();
        assert_eq!(sub.width(), 3);
        assert_eq!(sub.height(), 2);
        assert_eq!(sub.get(0, 0, 0), 8);
        assert_eq!(sub.get(2, 1, 0), 16);
    }

    #[test]
    fn mismatched_raw_length_rejected() {
        assert!(RasterImage::from_raw(2, 2, 3, vec![0; 5]).is_err());
    }
}
