// SPDX-License-Identifier: Apache-2.0

use super::params::{HASH_LEN, ID_LEN};
use super::Reject;

/// Big-endian cursor over RFC 8554 encodings.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn take(&mut self, len: usize) -> Result<&'a [u8], Reject> {
        if self.buf.len() - self.pos < len {
            return Err(Reject::Malformed(format!(
                "truncated at offset {}: need {len} bytes, {} left",
                self.pos,
                self.buf.len() - self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    pub fn u32(&mut self) -> Result<u32, Reject> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn node(&mut self) -> Result<[u8; HASH_LEN], Reject> {
        Ok(self.take(HASH_LEN)?.try_into().unwrap())
    }

    pub fn id(&mut self) -> Result<[u8; ID_LEN], Reject> {
        Ok(self.take(ID_LEN)?.try_into().unwrap())
    }

    pub fn finish(&self) -> Result<(), Reject> {
        if self.pos != self.buf.len() {
            return Err(Reject::Malformed(format!(
                "{} trailing bytes after offset {}",
                self.buf.len() - self.pos,
                self.pos
            )));
        }
        Ok(())
    }
}
