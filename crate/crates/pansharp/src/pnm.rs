//! Netpbm graymap/pixmap codec, 8-bit only.
//!
//! ```text
//! Type | Plain | Binary | Bands
//! -----+-------+--------+------
//! PGM  | P2    | P5     | 1
//! PPM  | P3    | P6     | 3 (RGB interleaved)
//! ```
//!
//! Comments (`#` to end of line) are accepted anywhere between header
//! tokens, and between samples of the plain variants. Binary payloads start
//! after exactly one whitespace byte following the maxval.

use std::fmt;

use pansharp_core::raster::{quantize_image, rescale_to_8bit};
use pansharp_core::{Band, MultiBandImage, QuantizationPolicy};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    PlainGraymap,
    PlainPixmap,
    BinaryGraymap,
    BinaryPixmap,
}

impl ImageFormat {
    pub fn magic(self) -> &'static [u8; 2] {
        match self {
            ImageFormat::PlainGraymap => b"P2",
            ImageFormat::PlainPixmap => b"P3",
            ImageFormat::BinaryGraymap => b"P5",
            ImageFormat::BinaryPixmap => b"P6",
        }
    }

    pub fn from_magic(magic: &[u8]) -> Option<Self> {
        match magic {
            b"P2" => Some(ImageFormat::PlainGraymap),
            b"P3" => Some(ImageFormat::PlainPixmap),
            b"P5" => Some(ImageFormat::BinaryGraymap),
            b"P6" => Some(ImageFormat::BinaryPixmap),
            _ => None,
        }
    }

    pub fn bands(self) -> usize {
        match self {
            ImageFormat::PlainGraymap | ImageFormat::BinaryGraymap => 1,
            ImageFormat::PlainPixmap | ImageFormat::BinaryPixmap => 3,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, ImageFormat::BinaryGraymap | ImageFormat::BinaryPixmap)
    }

    /// Binary format carrying `bands` bands, if there is one.
    pub fn binary_for(bands: usize) -> Option<Self> {
        match bands {
            1 => Some(ImageFormat::BinaryGraymap),
            3 => Some(ImageFormat::BinaryPixmap),
            _ => None,
        }
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(self.magic()).unwrap_or("P?"))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("byte {offset}: {message}")]
    Format { offset: usize, message: String },
    #[error("{format} stores {expected} band(s), image has {actual}")]
    BandCount { format: ImageFormat, expected: usize, actual: usize },
}

fn format_err<T>(offset: usize, message: impl Into<String>) -> Result<T, CodecError> {
    Err(CodecError::Format { offset, message: message.into() })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && !matches!(self.bytes[self.pos], b'\n' | b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token; returns (value, offset of its first byte).
    fn number(&mut self, what: &str) -> Result<(u64, usize), CodecError> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = match value.checked_mul(10).and_then(|v| v.checked_add(u64::from(b - b'0'))) {
                Some(v) => v,
                None => return format_err(start, format!("{what} is too large")),
            };
            self.pos += 1;
        }
        if self.pos == start {
            return match self.bytes.get(start) {
                None => format_err(start, format!("unexpected end of data, expected {what}")),
                Some(&b) => format_err(start, format!("expected {what}, found byte 0x{b:02x}")),
            };
        }
        if let Some(&b) = self.bytes.get(self.pos) {
            if !(b.is_ascii_whitespace() || b == b'#') {
                return format_err(self.pos, format!("unexpected byte 0x{b:02x} after {what}"));
            }
        }
        Ok((value, start))
    }
}

struct Header {
    format: ImageFormat,
    width: usize,
    height: usize,
    maxval: u32,
    maxval_offset: usize,
    /// First byte after the header (after the single separator for binary).
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, CodecError> {
    if bytes.len() < 2 {
        return format_err(0, "missing magic number");
    }
    let format = ImageFormat::from_magic(&bytes[..2])
        .ok_or_else(|| CodecError::Format { offset: 0, message: "unsupported magic number".into() })?;
    let mut cur = Cursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        Some(_) => return format_err(2, "magic number must be followed by whitespace"),
        None => return format_err(2, "unexpected end of data after magic number"),
    }
    let (width, woff) = cur.number("width")?;
    let (height, hoff) = cur.number("height")?;
    let (maxval, moff) = cur.number("maxval")?;
    if width == 0 {
        return format_err(woff, "width must be positive");
    }
    if height == 0 {
        return format_err(hoff, "height must be positive");
    }
    if width.checked_mul(height).and_then(|p| p.checked_mul(3)).is_none_or(|n| n > isize::MAX as u64) {
        return format_err(woff, "image dimensions overflow");
    }
    if maxval == 0 || maxval > 65535 {
        return format_err(moff, format!("maxval {maxval} out of range"));
    }
    let mut data_start = cur.pos;
    if format.is_binary() {
        match bytes.get(data_start) {
            Some(b) if b.is_ascii_whitespace() => data_start += 1,
            _ => return format_err(data_start, "expected a single whitespace byte before the payload"),
        }
    }
    Ok(Header {
        format,
        width: width as usize,
        height: height as usize,
        maxval: maxval as u32,
        maxval_offset: moff,
        data_start,
    })
}

fn read_samples(bytes: &[u8], h: &Header) -> Result<Vec<u8>, CodecError> {
    let count = h.width * h.height * h.format.bands();
    if h.format.is_binary() {
        let payload = &bytes[h.data_start..];
        if payload.len() < count {
            return format_err(bytes.len(), format!("truncated payload: need {count} bytes, have {}", payload.len()));
        }
        if let Some(i) = payload[..count].iter().position(|&v| u32::from(v) > h.maxval) {
            return format_err(h.data_start + i, format!("sample exceeds maxval {}", h.maxval));
        }
        return Ok(payload[..count].to_vec());
    }
    let mut cur = Cursor { bytes, pos: h.data_start };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (v, off) = cur.number("sample")?;
        if v > u64::from(h.maxval) {
            return format_err(off, format!("sample {v} exceeds maxval {}", h.maxval));
        }
        out.push(v as u8);
    }
    Ok(out)
}

fn to_image(h: &Header, samples: &[u8]) -> MultiBandImage {
    let k = h.format.bands();
    let bands = (0..k)
        .map(|b| {
            let v = samples.iter().skip(b).step_by(k).map(|&s| f64::from(s)).collect();
            Band::new(h.width, h.height, v).expect("header dimensions are positive")
        })
        .collect();
    MultiBandImage::new(bands).expect("bands share dimensions")
}

/// Decodes a graymap/pixmap of the given format. The magic number must
/// match `format` and maxval must be 255.
pub fn decode_image(bytes: &[u8], format: ImageFormat) -> Result<MultiBandImage, CodecError> {
    let h = parse_header(bytes)?;
    if h.format != format {
        return format_err(0, format!("expected {format}, found {}", h.format));
    }
    decode_with_header(bytes, &h)
}

/// Like [`decode_image`] but takes the format from the magic number.
pub fn decode_any(bytes: &[u8]) -> Result<MultiBandImage, CodecError> {
    let h = parse_header(bytes)?;
    decode_with_header(bytes, &h)
}

fn decode_with_header(bytes: &[u8], h: &Header) -> Result<MultiBandImage, CodecError> {
    if h.maxval != 255 {
        return format_err(h.maxval_offset, format!("maxval must be 255, found {}", h.maxval));
    }
    let samples = read_samples(bytes, h)?;
    Ok(to_image(h, &samples))
}

/// Decodes any supported format, also accepting maxval below 255 (e.g. 63
/// for 6-bit sensors); such data is linearly stretched onto 0..=255.
pub fn decode_rescaled(bytes: &[u8]) -> Result<MultiBandImage, CodecError> {
    let h = parse_header(bytes)?;
    if h.maxval > 255 {
        return format_err(h.maxval_offset, format!("maxval {} exceeds 8 bits", h.maxval));
    }
    let img = to_image(&h, &read_samples(bytes, &h)?);
    if h.maxval == 255 {
        return Ok(img);
    }
    Ok(img.map_bands(|b| rescale_to_8bit(b, h.maxval)).expect("finite samples stay finite"))
}

/// Encodes after quantizing with the default 0..=255 policy.
pub fn encode_image(img: &MultiBandImage, format: ImageFormat) -> Result<Vec<u8>, CodecError> {
    let k = format.bands();
    if img.band_count() != k {
        return Err(CodecError::BandCount { format, expected: k, actual: img.band_count() });
    }
    let q = quantize_image(img, &QuantizationPolicy::default());
    let (w, h) = q.dims();
    let mut out = Vec::with_capacity(16 + w * h * k * if format.is_binary() { 1 } else { 4 });
    out.extend_from_slice(format.magic());
    out.extend_from_slice(format!("\n{w} {h}\n255\n").as_bytes());
    let bands = q.bands();
    let interleaved = (0..w * h).flat_map(|i| bands.iter().map(move |b| b.samples()[i] as u8));
    if format.is_binary() {
        out.extend(interleaved);
    } else {
        // Plain lines stay under 70 characters.
        let mut line_len = 0;
        for v in interleaved {
            let s = v.to_string();
            if line_len > 0 && line_len + 1 + s.len() > 69 {
                out.push(b'\n');
                line_len = 0;
            } else if line_len > 0 {
                out.push(b' ');
                line_len += 1;
            }
            out.extend_from_slice(s.as_bytes());
            line_len += s.len();
        }
        out.push(b'\n');
    }
    Ok(out)
}
