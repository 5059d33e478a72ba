//! Netpbm bitmap (PBM, `P1`/`P4`) reading and writing, plus a grayscale
//! (`P5`) writer for rendered overlays.
//!
//! PBM value 1 is the object, 0 the background. The plain reader accepts
//! arbitrary whitespace and `#` comments anywhere outside a token.

use thiserror::Error;

use crate::grid::BinaryImage;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("PBM error at byte {offset}: {kind}")]
pub struct PbmError {
    pub offset: usize,
    pub kind: PbmErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbmErrorKind {
    #[error("bad magic number, expected P1 or P4")]
    BadMagic,
    #[error("expected a decimal integer in the header")]
    ExpectedInteger,
    #[error("header integer too large")]
    IntegerOverflow,
    #[error("width and height must be positive")]
    ZeroDimension,
    #[error("missing whitespace after header")]
    MissingSeparator,
    #[error("unexpected end of data, {missing} pixel(s) missing")]
    Truncated { missing: usize },
    #[error("invalid pixel character {0:?}")]
    InvalidPixel(char),
}

/// Raster encoding of a PBM file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PbmFormat {
    /// `P1`: ASCII digits.
    #[default]
    Plain,
    /// `P4`: packed bits, most significant bit first, rows padded to bytes.
    Raw,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, kind: PbmErrorKind) -> PbmError {
        PbmError { offset: self.pos, kind }
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_uint(&mut self) -> Result<usize, PbmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or(PbmError {
                    offset: start,
                    kind: PbmErrorKind::IntegerOverflow,
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(PbmErrorKind::ExpectedInteger));
        }
        Ok(value)
    }
}

/// Parse a plain or raw PBM file.
pub fn load_pbm(bytes: &[u8]) -> Result<BinaryImage, PbmError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let format = match bytes.get(..2) {
        Some(b"P1") => PbmFormat::Plain,
        Some(b"P4") => PbmFormat::Raw,
        _ => return Err(cur.err(PbmErrorKind::BadMagic)),
    };
    cur.pos = 2;
    let dims_offset = cur.pos;
    let width = cur.read_uint()?;
    let height = cur.read_uint()?;
    if width == 0 || height == 0 {
        return Err(PbmError {
            offset: dims_offset,
            kind: PbmErrorKind::ZeroDimension,
        });
    }
    let count = width.checked_mul(height).ok_or(PbmError {
        offset: dims_offset,
        kind: PbmErrorKind::IntegerOverflow,
    })?;

    let mask = match format {
        PbmFormat::Plain => {
            let mut mask = Vec::with_capacity(count);
            while mask.len() < count {
                cur.skip_whitespace_and_comments();
                match cur.bytes.get(cur.pos) {
                    None => {
                        return Err(cur.err(PbmErrorKind::Truncated {
                            missing: count - mask.len(),
                        }))
                    }
                    Some(b'0') => mask.push(false),
                    Some(b'1') => mask.push(true),
                    Some(&b) => return Err(cur.err(PbmErrorKind::InvalidPixel(b as char))),
                }
                cur.pos += 1;
            }
            mask
        }
        PbmFormat::Raw => {
            match cur.bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(cur.err(PbmErrorKind::MissingSeparator)),
            }
            let row_bytes = width.div_ceil(8);
            let payload = &bytes[cur.pos..];
            if payload.len() < row_bytes * height {
                let complete_rows = payload.len() / row_bytes;
                return Err(PbmError {
                    offset: bytes.len(),
                    kind: PbmErrorKind::Truncated {
                        missing: count - complete_rows * width,
                    },
                });
            }
            let mut mask = Vec::with_capacity(count);
            for row in payload.chunks_exact(row_bytes).take(height) {
                mask.extend((0..width).map(|x| row[x / 8] & (0x80 >> (x % 8)) != 0));
            }
            mask
        }
    };
    Ok(BinaryImage::from_mask(width, height, mask).expect("dimensions validated above"))
}

/// Serialize `image` as PBM. Plain rows are wrapped at 70 characters.
pub fn save_pbm(image: &BinaryImage, format: PbmFormat) -> Vec<u8> {
    let (w, h) = image.dims();
    let mask = image.mask();
    match format {
        PbmFormat::Plain => {
            let mut out = format!("P1\n{w} {h}\n").into_bytes();
            for row in mask.chunks_exact(w) {
                for line in row.chunks(70) {
                    out.extend(line.iter().map(|&b| if b { b'1' } else { b'0' }));
                    out.push(b'\n');
                }
            }
            out
        }
        PbmFormat::Raw => {
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            for row in mask.chunks_exact(w) {
                for byte_pixels in row.chunks(8) {
                    let byte = byte_pixels
                        .iter()
                        .enumerate()
                        .fold(0u8, |acc, (i, &b)| if b { acc | (0x80 >> i) } else { acc });
                    out.push(byte);
                }
            }
            out
        }
    }
}

/// Serialize an 8-bit grayscale raster as binary PGM (`P5`, maxval 255).
/// Panics if `pixels.len() != width * height`.
pub fn save_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height, "PGM raster size mismatch");
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}
