// SPDX-License-Identifier: Apache-2.0

pub mod hashes;
pub mod lms;
pub mod costmodel;
pub mod manifest;
pub mod sigsuite;
pub mod workflow;
pub mod cli;
