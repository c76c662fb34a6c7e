//! Reading and writing embedding sets in the numpy npy format.
//!
//! Only 2-D, C-order, little-endian `f4`/`f8` arrays are supported. Files
//! are written as version 1.0 with the header padded to a 64-byte boundary,
//! which is what `numpy.save` produces.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::EmbeddingSet;
use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;

/// On-disk element type for [`write_embedding_set_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// `<f4` when every value survives the narrowing exactly, `<f8` otherwise.
    Auto,
    F32,
    F64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dtype {
    F4,
    F8,
}

impl Dtype {
    fn descr(self) -> &'static str {
        match self {
            Dtype::F4 => "<f4",
            Dtype::F8 => "<f8",
        }
    }

    fn size(self) -> usize {
        match self {
            Dtype::F4 => 4,
            Dtype::F8 => 8,
        }
    }
}

struct Header {
    dtype: Dtype,
    fortran_order: bool,
    shape: Vec<usize>,
}

pub fn read_embedding_set(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let set = read_npy(&mut BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    Ok(set.with_source(path.display().to_string()))
}

pub fn write_embedding_set(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    write_embedding_set_with(set, path, Precision::Auto)
}

pub fn write_embedding_set_with(
    set: &EmbeddingSet,
    path: impl AsRef<Path>,
    precision: Precision,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    write_npy(&mut writer, set, precision)
        .and_then(|_| writer.flush().map_err(|e| Error::io(path, e)))
        .map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
}

/// Reads an npy stream positioned at its first byte.
pub fn read_npy<R: Read>(reader: &mut R) -> Result<EmbeddingSet> {
    let header = read_header(reader)?;
    if header.fortran_order {
        return Err(Error::format("Fortran-order arrays are not supported"));
    }
    let (n, dim) = match header.shape[..] {
        [n, d] => (n, d),
        _ => {
            return Err(Error::format(format!(
                "expected a 2-D array, found shape {:?}",
                header.shape
            )))
        }
    };
    if n == 0 {
        return Err(Error::data("embedding file has zero rows"));
    }
    if dim == 0 {
        return Err(Error::data("embedding file has zero columns"));
    }
    let expected = n
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(header.dtype.size()))
        .ok_or_else(|| Error::format("array shape overflows"))?;
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<npy stream>", e))?;
    if bytes.len() != expected {
        return Err(Error::format(format!(
            "payload has {} bytes, shape ({n}, {dim}) of {} needs {expected}",
            bytes.len(),
            header.dtype.descr()
        )));
    }
    let data: Vec<f64> = match header.dtype {
        Dtype::F4 => bytes
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect(),
        Dtype::F8 => bytes
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
            .collect(),
    };
    EmbeddingSet::new(data, n, dim)
}

/// Writes `set` as an npy stream.
pub fn write_npy<W: Write>(writer: &mut W, set: &EmbeddingSet, precision: Precision) -> Result<()> {
    let dtype = match precision {
        Precision::F32 => Dtype::F4,
        Precision::F64 => Dtype::F8,
        Precision::Auto => {
            let lossless = set
                .as_slice()
                .iter()
                .all(|&v| f64::from(v as f32).to_bits() == v.to_bits());
            if lossless {
                Dtype::F4
            } else {
                Dtype::F8
            }
        }
    };
    let io_err = |e| Error::io("<npy stream>", e);

    let mut dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({}, {}), }}",
        dtype.descr(),
        set.len(),
        set.dim()
    );
    let unpadded = MAGIC.len() + 2 + 2 + dict.len() + 1;
    let padding = (ALIGN - unpadded % ALIGN) % ALIGN;
    dict.extend(std::iter::repeat_n(' ', padding));
    dict.push('\n');
    let header_len = u16::try_from(dict.len()).map_err(|_| Error::format("npy header too long"))?;

    writer.write_all(MAGIC).map_err(io_err)?;
    writer.write_all(&[1, 0]).map_err(io_err)?;
    writer
        .write_all(&header_len.to_le_bytes())
        .map_err(io_err)?;
    writer.write_all(dict.as_bytes()).map_err(io_err)?;
    match dtype {
        Dtype::F4 => {
            for &v in set.as_slice() {
                writer
                    .write_all(&(v as f32).to_le_bytes())
                    .map_err(io_err)?;
            }
        }
        Dtype::F8 => {
            for &v in set.as_slice() {
                writer.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn read_header<R: Read>(reader: &mut R) -> Result<Header> {
    let mut magic = [0u8; 6];
    read_exact(reader, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::format("missing npy magic string"));
    }
    let mut version = [0u8; 2];
    read_exact(reader, &mut version)?;
    let header_len = match version[0] {
        1 => {
            let mut len = [0u8; 2];
            read_exact(reader, &mut len)?;
            usize::from(u16::from_le_bytes(len))
        }
        2 | 3 => {
            let mut len = [0u8; 4];
            read_exact(reader, &mut len)?;
            u32::from_le_bytes(len) as usize
        }
        v => {
            return Err(Error::format(format!(
                "unsupported npy version {v}.{}",
                version[1]
            )))
        }
    };
    if header_len > 1 << 20 {
        return Err(Error::format("npy header length is implausibly large"));
    }
    let mut raw = vec![0u8; header_len];
    read_exact(reader, &mut raw)?;
    let text = std::str::from_utf8(&raw).map_err(|_| Error::format("npy header is not UTF-8"))?;
    parse_header_dict(text)
}

fn read_exact<R: Read>(reader: &mut R, buf: &mut [u8]) -> Result<()> {
    reader.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::format("truncated npy header")
        } else {
            Error::io("<npy stream>", e)
        }
    })
}

/// Parses the Python dict literal stored in an npy header.
fn parse_header_dict(text: &str) -> Result<Header> {
    let mut p = DictParser {
        s: text.trim_end().as_bytes(),
        pos: 0,
    };
    let mut descr = None;
    let mut fortran = None;
    let mut shape = None;

    p.expect(b'{')?;
    loop {
        p.skip_ws();
        if p.eat(b'}') {
            break;
        }
        let key = p.string()?;
        p.skip_ws();
        p.expect(b':')?;
        p.skip_ws();
        match key.as_str() {
            "descr" => descr = Some(p.string()?),
            "fortran_order" => fortran = Some(p.boolean()?),
            "shape" => shape = Some(p.tuple()?),
            other => {
                return Err(Error::format(format!(
                    "unexpected npy header key '{other}'"
                )))
            }
        }
        p.skip_ws();
        if !p.eat(b',') {
            p.skip_ws();
            p.expect(b'}')?;
            break;
        }
    }

    let descr = descr.ok_or_else(|| Error::format("npy header lacks 'descr'"))?;
    let dtype = match descr.as_str() {
        "<f4" => Dtype::F4,
        "<f8" => Dtype::F8,
        other => {
            return Err(Error::format(format!(
                "unsupported dtype '{other}' (expected '<f4' or '<f8')"
            )))
        }
    };
    Ok(Header {
        dtype,
        fortran_order: fortran.ok_or_else(|| Error::format("npy header lacks 'fortran_order'"))?,
        shape: shape.ok_or_else(|| Error::format("npy header lacks 'shape'"))?,
    })
}

struct DictParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl DictParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::format(format!(
                "malformed npy header: expected '{}' at offset {}",
                c as char, self.pos
            )))
        }
    }

    fn string(&mut self) -> Result<String> {
        let quote = match self.s.get(self.pos) {
            Some(&q @ (b'\'' | b'"')) => q,
            _ => return Err(Error::format("malformed npy header: expected string")),
        };
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != quote {
            self.pos += 1;
        }
        if self.pos == self.s.len() {
            return Err(Error::format("malformed npy header: unterminated string"));
        }
        let out = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        self.pos += 1;
        Ok(out)
    }

    fn boolean(&mut self) -> Result<bool> {
        let rest = &self.s[self.pos..];
        if rest.starts_with(b"True") {
            self.pos += 4;
            Ok(true)
        } else if rest.starts_with(b"False") {
            self.pos += 5;
            Ok(false)
        } else {
            Err(Error::format(
                "malformed npy header: expected True or False",
            ))
        }
    }

    fn tuple(&mut self) -> Result<Vec<usize>> {
        self.expect(b'(')?;
        let mut dims = Vec::new();
        loop {
            self.skip_ws();
            if self.eat(b')') {
                return Ok(dims);
            }
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or_default();
            let dim = digits
                .parse()
                .map_err(|_| Error::format("malformed npy header: bad shape entry"))?;
            dims.push(dim);
            self.skip_ws();
            if !self.eat(b',') {
                self.skip_ws();
                self.expect(b')')?;
                return Ok(dims);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(set: &EmbeddingSet, precision: Precision) -> Vec<u8> {
        let mut buf = Vec::new();
        write_npy(&mut buf, set, precision).unwrap();
        buf
    }

    #[test]
    fn header_is_aligned_and_numpy_shaped() {
        let set = EmbeddingSet::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let bytes = encode(&set, Precision::Auto);
        let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        assert_eq!((10 + header_len) % 64, 0);
        let header = std::str::from_utf8(&bytes[10..10 + header_len]).unwrap();
        assert!(header.starts_with("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 3), }"));
        assert!(header.ends_with('\n'));
        assert_eq!(bytes.len(), 10 + header_len + 6 * 4);
        let back = read_npy(&mut bytes.as_slice()).unwrap();
        assert_eq!(back.as_slice(), set.as_slice());
    }

    #[test]
    fn auto_precision_widens_when_needed() {
        let exact = EmbeddingSet::from_rows(&[[0.5]]).unwrap();
        assert!(String::from_utf8_lossy(&encode(&exact, Precision::Auto)).contains("<f4"));
        let wide = EmbeddingSet::from_rows(&[[0.1]]).unwrap();
        let bytes = encode(&wide, Precision::Auto);
        assert!(String::from_utf8_lossy(&bytes).contains("<f8"));
        assert_eq!(read_npy(&mut bytes.as_slice()).unwrap().row(0), &[0.1]);
    }

    #[test]
    fn parses_foreign_header_spellings() {
        let h = parse_header_dict("{\"shape\":(4,2),\"fortran_order\":False,\"descr\":\"<f8\"}")
            .unwrap();
        assert_eq!(h.shape, vec![4, 2]);
        assert_eq!(h.dtype, Dtype::F8);
        let h =
            parse_header_dict("{'descr': '<f4', 'fortran_order': True, 'shape': (3,), }").unwrap();
        assert!(h.fortran_order);
        assert_eq!(h.shape, vec![3]);
    }

    #[test]
    fn rejects_bad_headers() {
        for bad in [
            "{'descr': '>f4', 'fortran_order': False, 'shape': (1, 1), }",
            "{'descr': '<i8', 'fortran_order': False, 'shape': (1, 1), }",
            "{'descr': '<f4', 'shape': (1, 1), }",
            "{'descr': '<f4', 'fortran_order': Maybe, 'shape': (1, 1), }",
            "{'descr': '<f4', 'fortran_order': False, 'shape': (1, x), }",
            "'descr': '<f4'",
        ] {
            assert!(
                matches!(parse_header_dict(bad), Err(Error::Format { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn nan_reports_row() {
        let mut rows = vec![[1.0f64, 2.0]; 10];
        rows[7][1] = 0.25;
        let set = EmbeddingSet::from_rows(&rows).unwrap();
        let mut bytes = encode(&set, Precision::F32);
        let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        let at = 10 + header_len + (7 * 2 + 1) * 4;
        bytes[at..at + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        let err = read_npy(&mut bytes.as_slice()).unwrap_err();
        assert!(matches!(err, Error::Data { row: Some(7), .. }), "{err}");
        assert!(err.to_string().contains("row 7"));
    }

    fn raw_npy(dict: &str, payload: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&[1, 0]);
        out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
        out.extend_from_slice(dict.as_bytes());
        out.extend_from_slice(payload);
        out
    }

    #[test]
    fn zero_rows_and_bad_shapes() {
        let zero = raw_npy(
            "{'descr': '<f4', 'fortran_order': False, 'shape': (0, 3), }\n",
            &[],
        );
        assert!(matches!(
            read_npy(&mut zero.as_slice()),
            Err(Error::Data { .. })
        ));
        let one_d = raw_npy(
            "{'descr': '<f4', 'fortran_order': False, 'shape': (3,), }\n",
            &[0; 12],
        );
        assert!(matches!(
            read_npy(&mut one_d.as_slice()),
            Err(Error::Format { .. })
        ));
        let fortran = raw_npy(
            "{'descr': '<f4', 'fortran_order': True, 'shape': (1, 1), }\n",
            &[0; 4],
        );
        assert!(matches!(
            read_npy(&mut fortran.as_slice()),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn truncated_payload() {
        let set = EmbeddingSet::from_rows(&[[1.0, 2.0]]).unwrap();
        let bytes = encode(&set, Precision::F32);
        let cut = &bytes[..bytes.len() - 1];
        assert!(matches!(read_npy(&mut &cut[..]), Err(Error::Format { .. })));
        assert!(matches!(
            read_npy(&mut &bytes[..5]),
            Err(Error::Format { .. })
        ));
    }
}
