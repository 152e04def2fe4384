// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::Mutex;

use suitpq::lms::{MemoryStore, StateStore, StoreError};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn read_data(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `key hex` per line.
pub fn keyed_hex(name: &str) -> HashMap<String, Vec<u8>> {
    read_data(name)
        .lines()
        .filter_map(|l| l.split_once(' '))
        .map(|(k, v)| (k.to_string(), hex::decode(v.trim()).unwrap()))
        .collect()
}

pub fn flip_bit(bytes: &[u8], bit: usize) -> Vec<u8> {
    let mut out = bytes.to_vec();
    out[bit / 8] ^= 1 << (bit % 8);
    out
}

#[derive(Clone, Copy, Debug)]
pub enum Fault {
    None,
    /// Nothing written, error returned.
    BeforeWrite,
    /// Written, then the caller sees an error (power cut before the ack).
    AfterWrite,
}

#[derive(Default)]
pub struct FlakyStore {
    pub inner: MemoryStore,
    pub faults: Mutex<VecDeque<Fault>>,
}

impl StateStore for FlakyStore {
    fn generation(&self) -> Result<Option<u64>, StoreError> {
        self.inner.generation()
    }
    fn load(&self) -> Result<Option<Vec<u8>>, StoreError> {
        self.inner.load()
    }
    fn commit(&self, expected: Option<u64>, generation: u64, blob: &[u8]) -> Result<(), StoreError> {
        match self.faults.lock().unwrap().pop_front().unwrap_or(Fault::None) {
            Fault::None => self.inner.commit(expected, generation, blob),
            Fault::BeforeWrite => Err(StoreError::Io("injected".into())),
            Fault::AfterWrite => {
                self.inner.commit(expected, generation, blob)?;
                Err(StoreError::Io("injected after write".into()))
            }
        }
    }
}
