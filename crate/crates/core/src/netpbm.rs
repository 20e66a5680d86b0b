//! Binary Netpbm codecs (P5 grayscale, P6 color), maxval 255 only.
//!
//! Header tokens are whitespace separated and `#` comments are skipped on
//! load. Writers never emit comments. Binary images are stored as P5 with
//! samples 0 and 255.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage, RgbImage};

struct Header {
    width: usize,
    height: usize,
    payload_start: usize,
}

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .next_token()
            .ok_or_else(|| Error::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("bad {what} {:?}", String::from_utf8_lossy(tok))))
    }
}

fn parse_header(bytes: &[u8], magic: &[u8; 2]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(Error::MalformedHeader("missing magic number".into()));
    }
    if &bytes[..2] != magic {
        return Err(Error::MalformedHeader(format!(
            "expected magic {}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&bytes[..2])
        )));
    }
    let mut toks = Tokens { bytes, pos: 2 };
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::MalformedHeader("magic number not followed by whitespace".into()));
    }
    let width = toks.next_number("width")? as usize;
    let height = toks.next_number("height")? as usize;
    let maxval = toks.next_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(toks.pos) {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => return Err(Error::MalformedHeader("no whitespace after maxval".into())),
    }
    Ok(Header {
        width,
        height,
        payload_start: toks.pos + 1,
    })
}

fn payload(bytes: &[u8], header: &Header, channels: usize) -> Result<Vec<u8>> {
    let expected = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(channels))
        .filter(|&n| n <= i32::MAX as usize)
        .ok_or_else(|| Error::MalformedHeader("image too large".into()))?;
    let actual = bytes.len() - header.payload_start;
    if actual < expected {
        return Err(Error::Truncated { expected, actual });
    }
    Ok(bytes[header.payload_start..header.payload_start + expected].to_vec())
}

fn encode(magic: &str, width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn load_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let header = parse_header(bytes, b"P6")?;
    let data = payload(bytes, &header, 3)?;
    RgbImage::new(header.width, header.height, data)
}

pub fn save_ppm(img: &RgbImage) -> Vec<u8> {
    encode("P6", img.width(), img.height(), img.data())
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let header = parse_header(bytes, b"P5")?;
    let data = payload(bytes, &header, 1)?;
    GrayImage::new(header.width, header.height, data)
}

pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    encode("P5", img.width(), img.height(), img.data())
}

/// Binary images are written as P5 with 0 -> 0 and 1 -> 255.
pub fn save_pbm(img: &BinaryImage) -> Vec<u8> {
    save_pgm(&img.to_gray())
}

/// Reads a P5 file as a binary image; any nonzero sample is object.
pub fn load_pbm(bytes: &[u8]) -> Result<BinaryImage> {
    Ok(BinaryImage::from_gray(&load_pgm(bytes)?))
}
