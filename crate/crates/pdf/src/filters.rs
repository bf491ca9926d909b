//! Stream decoding: FlateDecode (with PNG and TIFF predictors) and
//! ASCIIHexDecode.

use std::io::Read;

use flate2::read::ZlibDecoder;

use crate::object::{is_whitespace, Dict, Object};
use crate::PdfError;

fn filter_list(dict: &Dict) -> Vec<(Vec<u8>, Option<&Dict>)> {
    let filters: Vec<&[u8]> = match dict.get(&b"Filter"[..]) {
        Some(Object::Name(n)) => vec![n.as_slice()],
        Some(Object::Array(a)) => a.iter().filter_map(Object::as_name).collect(),
        _ => Vec::new(),
    };
    let parms: Vec<Option<&Dict>> = match dict.get(&b"DecodeParms"[..]) {
        Some(Object::Dict(d)) => vec![Some(d)],
        Some(Object::Array(a)) => a.iter().map(Object::as_dict).collect(),
        _ => Vec::new(),
    };
    filters.into_iter().enumerate().map(|(i, f)| (f.to_vec(), parms.get(i).copied().flatten())).collect()
}

/// Applies every filter named in `dict` in order.
pub fn decode_stream(dict: &Dict, raw: &[u8]) -> Result<Vec<u8>, PdfError> {
    let mut data = raw.to_vec();
    for (name, parms) in filter_list(dict) {
        data = match name.as_slice() {
            b"FlateDecode" | b"Fl" => {
                let inflated = inflate(&data)?;
                match parms {
                    Some(p) => unpredict(inflated, p)?,
                    None => inflated,
                }
            }
            b"ASCIIHexDecode" | b"AHx" => ascii_hex(&data)?,
            _ => return Err(PdfError::UnsupportedFilter(String::from_utf8_lossy(&name).into_owned())),
        };
    }
    Ok(data)
}

fn inflate(data: &[u8]) -> Result<Vec<u8>, PdfError> {
    let mut out = Vec::new();
    match ZlibDecoder::new(data).read_to_end(&mut out) {
        Ok(_) => Ok(out),
        // truncated streams are common; keep what inflated cleanly
        Err(_) if !out.is_empty() => Ok(out),
        Err(e) => Err(PdfError::Decode(format!("flate: {e}"))),
    }
}

fn ascii_hex(data: &[u8]) -> Result<Vec<u8>, PdfError> {
    let mut digits = Vec::new();
    for &c in data {
        match c {
            b'>' => break,
            c if c.is_ascii_hexdigit() => digits.push((c as char).to_digit(16).unwrap() as u8),
            c if is_whitespace(c) => {}
            _ => return Err(PdfError::Decode(format!("ASCIIHex: bad byte 0x{c:02x}"))),
        }
    }
    if digits.len() % 2 == 1 {
        digits.push(0);
    }
    Ok(digits.chunks(2).map(|p| p[0] << 4 | p[1]).collect())
}

fn parm(p: &Dict, key: &[u8], default: i64) -> i64 {
    p.get(key).and_then(Object::as_i64).unwrap_or(default)
}

fn unpredict(data: Vec<u8>, p: &Dict) -> Result<Vec<u8>, PdfError> {
    let predictor = parm(p, b"Predictor", 1);
    if predictor == 1 {
        return Ok(data);
    }
    let colors = parm(p, b"Colors", 1).max(1) as usize;
    let bpc = parm(p, b"BitsPerComponent", 8).max(1) as usize;
    let columns = parm(p, b"Columns", 1).max(1) as usize;
    let bpp = (colors * bpc).div_ceil(8);
    let row_len = (colors * bpc * columns).div_ceil(8);
    if predictor == 2 {
        if bpc != 8 {
            return Err(PdfError::Decode("TIFF predictor needs 8 bits per component".into()));
        }
        let mut out = data;
        for row in out.chunks_mut(row_len) {
            for i in bpp..row.len() {
                row[i] = row[i].wrapping_add(row[i - bpp]);
            }
        }
        return Ok(out);
    }
    if predictor < 10 {
        return Err(PdfError::Decode(format!("unknown predictor {predictor}")));
    }
    let mut out = Vec::with_capacity(data.len());
    let mut prev = vec![0u8; row_len];
    for chunk in data.chunks(row_len + 1) {
        let (kind, src) = (chunk[0], &chunk[1..]);
        let mut row = vec![0u8; row_len];
        row[..src.len()].copy_from_slice(src);
        for i in 0..row_len {
            let left = if i >= bpp { row[i - bpp] } else { 0 };
            let up = prev[i];
            let up_left = if i >= bpp { prev[i - bpp] } else { 0 };
            row[i] = match kind {
                0 => row[i],
                1 => row[i].wrapping_add(left),
                2 => row[i].wrapping_add(up),
                3 => row[i].wrapping_add(((left as u16 + up as u16) / 2) as u8),
                4 => row[i].wrapping_add(paeth(left, up, up_left)),
                k => return Err(PdfError::Decode(format!("bad PNG filter type {k}"))),
            };
        }
        out.extend_from_slice(&row[..src.len()]);
        prev = row;
    }
    Ok(out)
}

fn paeth(a: u8, b: u8, c: u8) -> u8 {
    let p = a as i16 + b as i16 - c as i16;
    let (pa, pb, pc) = ((p - a as i16).abs(), (p - b as i16).abs(), (p - c as i16).abs());
    if pa <= pb && pa <= pc {
        a
    } else if pb <= pc {
        b
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use flate2::write::ZlibEncoder;
    use flate2::Compression;

    use super::*;
    use crate::object::Parser;

    fn dict(src: &str) -> Dict {
        Parser::new(src.as_bytes()).object().unwrap().as_dict().unwrap().clone()
    }

    fn deflate(data: &[u8]) -> Vec<u8> {
        let mut e = ZlibEncoder::new(Vec::new(), Compression::default());
        e.write_all(data).unwrap();
        e.finish().unwrap()
    }

    #[test]
    fn no_filter_is_identity() {
        assert_eq!(decode_stream(&dict("<< >>"), b"abc").unwrap(), b"abc");
    }

    #[test]
    fn flate_and_hex_chain() {
        let hex = b"48656c6c6f>";
        let d = dict("<< /Filter [/FlateDecode /ASCIIHexDecode] >>");
        assert_eq!(decode_stream(&d, &deflate(hex)).unwrap(), b"Hello");
    }

    #[test]
    fn png_up_predictor() {
        // two rows of 3 bytes, second row filtered with Up
        let rows = [0u8, 1, 2, 3, 2, 1, 1, 1];
        let d = dict("<< /Filter /FlateDecode /DecodeParms << /Predictor 12 /Columns 3 >> >>");
        assert_eq!(decode_stream(&d, &deflate(&rows)).unwrap(), [1, 2, 3, 2, 3, 4]);
    }

    #[test]
    fn png_predictors_against_direct_reconstruction() {
        // encode with each filter type by hand, then decode
        let plain: Vec<u8> = (0..24u8).map(|i| i.wrapping_mul(37)).collect();
        let (cols, bpp) = (6, 2);
        let row_len = cols * bpp;
        for kind in 0..5u8 {
            let mut enc = Vec::new();
            let mut prev = vec![0u8; row_len];
            for row in plain.chunks(row_len) {
                enc.push(kind);
                for i in 0..row_len {
                    let a = if i >= bpp { row[i - bpp] } else { 0 };
                    let b = prev[i];
                    let c = if i >= bpp { prev[i - bpp] } else { 0 };
                    let pred = match kind {
                        0 => 0,
                        1 => a,
                        2 => b,
                        3 => ((a as u16 + b as u16) / 2) as u8,
                        _ => paeth(a, b, c),
                    };
                    enc.push(row[i].wrapping_sub(pred));
                }
                prev = row.to_vec();
            }
            let d = dict("<< /Filter /FlateDecode /DecodeParms << /Predictor 15 /Colors 2 /Columns 6 >> >>");
            assert_eq!(decode_stream(&d, &deflate(&enc)).unwrap(), plain, "filter type {kind}");
        }
    }

    #[test]
    fn unsupported_filter_is_named() {
        let err = decode_stream(&dict("<< /Filter /DCTDecode >>"), b"").unwrap_err();
        assert!(matches!(err, PdfError::UnsupportedFilter(ref f) if f == "DCTDecode"));
    }
}
