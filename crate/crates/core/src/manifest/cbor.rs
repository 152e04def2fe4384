// SPDX-License-Identifier: Apache-2.0

//! The slice of CBOR (RFC 8949) the manifest needs: unsigned integers,
//! byte and text strings, arrays, and maps with unsigned keys. Encoding is
//! always core-deterministic; decoding rejects anything else.

use super::ManifestError;

const UINT: u8 = 0;
const BYTES: u8 = 2;
const TEXT: u8 = 3;
const ARRAY: u8 = 4;
const MAP: u8 = 5;
const TAG: u8 = 6;

#[derive(Debug, Default)]
pub(crate) struct Encoder {
    pub out: Vec<u8>,
}

impl Encoder {
    fn head(&mut self, major: u8, arg: u64) {
        let m = major << 5;
        match arg {
            0..=23 => self.out.push(m | arg as u8),
            24..=0xff => self.out.extend_from_slice(&[m | 24, arg as u8]),
            0x100..=0xffff => {
                self.out.push(m | 25);
                self.out.extend_from_slice(&(arg as u16).to_be_bytes());
            }
            0x1_0000..=0xffff_ffff => {
                self.out.push(m | 26);
                self.out.extend_from_slice(&(arg as u32).to_be_bytes());
            }
            _ => {
                self.out.push(m | 27);
                self.out.extend_from_slice(&arg.to_be_bytes());
            }
        }
    }

    pub fn uint(&mut self, v: u64) -> &mut Self {
        self.head(UINT, v);
        self
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.head(BYTES, b.len() as u64);
        self.out.extend_from_slice(b);
        self
    }

    pub fn text(&mut self, s: &str) -> &mut Self {
        self.head(TEXT, s.len() as u64);
        self.out.extend_from_slice(s.as_bytes());
        self
    }

    pub fn array(&mut self, len: usize) -> &mut Self {
        self.head(ARRAY, len as u64);
        self
    }

    /// Callers emit keys in ascending order.
    pub fn map(&mut self, len: usize) -> &mut Self {
        self.head(MAP, len as u64);
        self
    }
}

/// Length of the head that `encode` would put in front of `len` bytes.
pub(crate) fn head_len(len: u64) -> usize {
    match len {
        0..=23 => 1,
        24..=0xff => 2,
        0x100..=0xffff => 3,
        0x1_0000..=0xffff_ffff => 5,
        _ => 9,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Value {
    Uint(u64),
    Bytes(Vec<u8>),
    Text(String),
    Array(Vec<Item>),
    Map(Vec<(u64, Item)>),
}

/// A decoded value and the offset of its first byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Item {
    pub offset: usize,
    pub value: Value,
}

const MAX_DEPTH: usize = 8;

pub(crate) fn decode(buf: &[u8]) -> Result<Item, ManifestError> {
    let mut d = Decoder { buf, pos: 0 };
    let item = d.item(0)?;
    if d.pos != buf.len() {
        return Err(ManifestError::malformed(d.pos, "trailing bytes"));
    }
    Ok(item)
}

struct Decoder<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Decoder<'_> {
    fn byte(&mut self) -> Result<u8, ManifestError> {
        let b = *self
            .buf
            .get(self.pos)
            .ok_or_else(|| ManifestError::malformed(self.pos, "unexpected end of input"))?;
        self.pos += 1;
        Ok(b)
    }

    fn take(&mut self, len: u64) -> Result<&[u8], ManifestError> {
        let left = (self.buf.len() - self.pos) as u64;
        if len > left {
            return Err(ManifestError::malformed(
                self.pos,
                format!("length {len} exceeds the {left} bytes left"),
            ));
        }
        let s = &self.buf[self.pos..self.pos + len as usize];
        self.pos += len as usize;
        Ok(s)
    }

    /// Returns (major type, argument); `None` argument means indefinite length.
    fn head(&mut self) -> Result<(u8, Option<u64>), ManifestError> {
        let start = self.pos;
        let ib = self.byte()?;
        let (major, ai) = (ib >> 5, ib & 0x1f);
        let arg = match ai {
            0..=23 => u64::from(ai),
            24..=27 => {
                let n = 1usize << (ai - 24);
                let raw = self.take(n as u64)?;
                let v = raw.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b));
                if head_len(v) != 1 + n {
                    return Err(ManifestError::non_canonical(start, format!("{v} not in shortest form")));
                }
                v
            }
            28..=30 => return Err(ManifestError::malformed(start, format!("reserved additional info {ai}"))),
            _ => return Ok((major, None)),
        };
        Ok((major, Some(arg)))
    }

    fn item(&mut self, depth: usize) -> Result<Item, ManifestError> {
        if depth > MAX_DEPTH {
            return Err(ManifestError::malformed(self.pos, "nesting too deep"));
        }
        let offset = self.pos;
        let (major, arg) = self.head()?;
        let Some(arg) = arg else {
            return Err(match major {
                BYTES | TEXT | ARRAY | MAP => ManifestError::non_canonical(offset, "indefinite length"),
                _ => ManifestError::malformed(offset, "unexpected break or indefinite marker"),
            });
        };
        let value = match major {
            UINT => Value::Uint(arg),
            BYTES => Value::Bytes(self.take(arg)?.to_vec()),
            TEXT => {
                let raw = self.take(arg)?.to_vec();
                Value::Text(String::from_utf8(raw).map_err(|_| ManifestError::malformed(offset, "invalid UTF-8 text"))?)
            }
            ARRAY => {
                // Every element takes at least one byte.
                if arg > (self.buf.len() - self.pos) as u64 {
                    return Err(ManifestError::malformed(offset, "array longer than input"));
                }
                let mut items = Vec::with_capacity(arg as usize);
                for _ in 0..arg {
                    items.push(self.item(depth + 1)?);
                }
                Value::Array(items)
            }
            MAP => {
                if arg > (self.buf.len() - self.pos) as u64 / 2 {
                    return Err(ManifestError::malformed(offset, "map longer than input"));
                }
                let mut entries: Vec<(u64, Item)> = Vec::with_capacity(arg as usize);
                for _ in 0..arg {
                    let key_at = self.pos;
                    let key = match self.item(depth + 1)?.value {
                        Value::Uint(k) => k,
                        _ => return Err(ManifestError::malformed(key_at, "map key is not an unsigned integer")),
                    };
                    if let Some((prev, _)) = entries.last() {
                        if key <= *prev {
                            return Err(ManifestError::non_canonical(
                                key_at,
                                if key == *prev { "duplicate map key" } else { "map keys out of order" },
                            ));
                        }
                    }
                    entries.push((key, self.item(depth + 1)?));
                }
                Value::Map(entries)
            }
            TAG => return Err(ManifestError::non_canonical(offset, format!("unexpected tag {arg}"))),
            _ => return Err(ManifestError::malformed(offset, format!("unsupported major type {major}"))),
        };
        Ok(Item { offset, value })
    }
}

impl Item {
    fn kind(&self) -> &'static str {
        match self.value {
            Value::Uint(_) => "unsigned integer",
            Value::Bytes(_) => "byte string",
            Value::Text(_) => "text string",
            Value::Array(_) => "array",
            Value::Map(_) => "map",
        }
    }

    fn expected(&self, what: &str) -> ManifestError {
        ManifestError::malformed(self.offset, format!("expected {what}, found {}", self.kind()))
    }

    pub fn uint(&self) -> Result<u64, ManifestError> {
        match self.value {
            Value::Uint(v) => Ok(v),
            _ => Err(self.expected("unsigned integer")),
        }
    }

    pub fn bytes(&self) -> Result<&[u8], ManifestError> {
        match &self.value {
            Value::Bytes(b) => Ok(b),
            _ => Err(self.expected("byte string")),
        }
    }

    pub fn text(&self) -> Result<&str, ManifestError> {
        match &self.value {
            Value::Text(s) => Ok(s),
            _ => Err(self.expected("text string")),
        }
    }

    pub fn array(&self, len: usize) -> Result<&[Item], ManifestError> {
        match &self.value {
            Value::Array(a) if a.len() == len => Ok(a),
            Value::Array(a) => Err(ManifestError::malformed(
                self.offset,
                format!("expected {len}-element array, found {}", a.len()),
            )),
            _ => Err(self.expected("array")),
        }
    }

    /// Map whose keys are exactly `1..=len`.
    pub fn keyed(&self, len: u64) -> Result<Vec<&Item>, ManifestError> {
        let Value::Map(entries) = &self.value else {
            return Err(self.expected("map"));
        };
        if entries.len() as u64 != len || entries.iter().zip(1..).any(|((k, _), want)| *k != want) {
            let keys: Vec<u64> = entries.iter().map(|(k, _)| *k).collect();
            return Err(ManifestError::malformed(
                self.offset,
                format!("expected keys 1..={len}, found {keys:?}"),
            ));
        }
        Ok(entries.iter().map(|(_, v)| v).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enc(f: impl FnOnce(&mut Encoder)) -> Vec<u8> {
        let mut e = Encoder::default();
        f(&mut e);
        e.out
    }

    #[test]
    fn rfc8949_appendix_a_integers() {
        let cases: [(u64, &str); 9] = [
            (0, "00"),
            (10, "0a"),
            (23, "17"),
            (24, "1818"),
            (100, "1864"),
            (1000, "1903e8"),
            (1_000_000, "1a000f4240"),
            (1_000_000_000_000, "1b000000e8d4a51000"),
            (u64::MAX, "1bffffffffffffffff"),
        ];
        for (v, hex_) in cases {
            let bytes = enc(|e| {
                e.uint(v);
            });
            assert_eq!(hex::encode(&bytes), hex_);
            assert_eq!(decode(&bytes).unwrap().uint().unwrap(), v);
        }
        assert_eq!(hex::encode(enc(|e| { e.text("IETF"); })), "6449455446");
        assert_eq!(hex::encode(enc(|e| { e.bytes(&[1, 2, 3, 4]); })), "4401020304");
    }

    #[test]
    fn overlong_integers_are_non_canonical() {
        for bad in ["1817", "190017", "1a00000017", "1b0000000000000017", "1900ff"] {
            let err = decode(&hex::decode(bad).unwrap()).unwrap_err();
            assert!(matches!(err, ManifestError::NonCanonical { offset: 0, .. }), "{bad}: {err}");
        }
    }

    #[test]
    fn indefinite_and_unsorted_forms_are_non_canonical() {
        for (bad, at) in [("5f4101ff", 0), ("9f01ff", 0), ("a2020101 01", 3), ("a201010101", 3)] {
            let bytes = hex::decode(bad.replace(' ', "")).unwrap();
            match decode(&bytes) {
                Err(ManifestError::NonCanonical { offset, .. }) => assert_eq!(offset, at, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn malformed_input_reports_offset() {
        match decode(&hex::decode("824401").unwrap()) {
            Err(ManifestError::Malformed { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(decode(&[0x1c]), Err(ManifestError::Malformed { offset: 0, .. })));
        assert!(matches!(decode(&[0x00, 0x00]), Err(ManifestError::Malformed { offset: 1, .. })));
        assert!(matches!(decode(&[0x9b, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff]), Err(ManifestError::Malformed { .. })));
    }
}
