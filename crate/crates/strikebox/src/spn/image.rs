//! RGB image buffers and binary pixmap (P6) I/O.

use super::SpnError;
use std::io::{Read, Write};

/// An RGB image held as three separate byte planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    planes: [Vec<u8>; 3],
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, r: Vec<u8>, g: Vec<u8>, b: Vec<u8>) -> Result<Self, SpnError> {
        let expected = width * height;
        for (plane, name) in [(&r, "red"), (&g, "green"), (&b, "blue")] {
            if plane.len() != expected {
                return Err(SpnError::LengthMismatch { expected, found: plane.len(), what: name });
            }
        }
        Ok(Self { width, height, planes: [r, g, b] })
    }

    /// Uniform-color image.
    pub fn filled(width: usize, height: usize, rgb: (u8, u8, u8)) -> Self {
        let n = width * height;
        Self {
            width,
            height,
            planes: [vec![rgb.0; n], vec![rgb.1; n], vec![rgb.2; n]],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Bytes per channel plane.
    pub fn channel_len(&self) -> usize {
        self.width * self.height
    }

    pub fn planes(&self) -> &[Vec<u8>; 3] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [Vec<u8>; 3] {
        &mut self.planes
    }

    /// Builds from interleaved RGB bytes (3 per pixel, row-major).
    pub fn from_interleaved(width: usize, height: usize, data: &[u8]) -> Result<Self, SpnError> {
        let expected = width * height * 3;
        if data.len() != expected {
            return Err(SpnError::LengthMismatch { expected, found: data.len(), what: "rgb data" });
        }
        let n = width * height;
        let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for px in data.chunks_exact(3) {
            planes[0].push(px[0]);
            planes[1].push(px[1]);
            planes[2].push(px[2]);
        }
        Ok(Self { width, height, planes })
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.channel_len() * 3);
        for i in 0..self.channel_len() {
            out.push(self.planes[0][i]);
            out.push(self.planes[1][i]);
            out.push(self.planes[2][i]);
        }
        out
    }

    /// Writes the image as a binary pixmap (P6, maxval 255).
    pub fn write_ppm(&self, mut w: impl Write) -> std::io::Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.to_interleaved())
    }

    /// Reads a binary pixmap (P6, maxval 255). `#` comments in the header
    /// are accepted.
    pub fn read_ppm(mut r: impl Read) -> Result<Self, SpnError> {
        let mut data = Vec::new();
        r.read_to_end(&mut data).map_err(|e| SpnError::MalformedImage(e.to_string()))?;
        let mut pos = 0usize;

        let next_token = |data: &[u8], pos: &mut usize| -> Result<String, SpnError> {
            // skip whitespace and comment lines
            loop {
                while *pos < data.len() && data[*pos].is_ascii_whitespace() {
                    *pos += 1;
                }
                if *pos < data.len() && data[*pos] == b'#' {
                    while *pos < data.len() && data[*pos] != b'\n' {
                        *pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = *pos;
            while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if start == *pos {
                return Err(SpnError::MalformedImage("truncated header".into()));
            }
            Ok(String::from_utf8_lossy(&data[start..*pos]).into_owned())
        };

        let magic = next_token(&data, &mut pos)?;
        if magic != "P6" {
            return Err(SpnError::MalformedImage(format!("expected P6 magic, found {magic:?}")));
        }
        let parse = |tok: String| -> Result<usize, SpnError> {
            tok.parse().map_err(|_| SpnError::MalformedImage(format!("bad header field {tok:?}")))
        };
        let width = parse(next_token(&data, &mut pos)?)?;
        let height = parse(next_token(&data, &mut pos)?)?;
        let maxval = parse(next_token(&data, &mut pos)?)?;
        if maxval != 255 {
            return Err(SpnError::MalformedImage(format!("unsupported maxval {maxval}")));
        }
        // exactly one whitespace byte separates the header from the pixels
        if pos >= data.len() || !data[pos].is_ascii_whitespace() {
            return Err(SpnError::MalformedImage("missing pixel data separator".into()));
        }
        pos += 1;
        let pixels = &data[pos..];
        let expected = width * height * 3;
        if pixels.len() < expected {
            return Err(SpnError::MalformedImage(format!(
                "expected {expected} pixel bytes, found {}",
                pixels.len()
            )));
        }
        Self::from_interleaved(width, height, &pixels[..expected])
    }
}
