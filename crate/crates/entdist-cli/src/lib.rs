//! Library surface of the CLI crate: file formats and report types, shared
//! between the binary and its integration tests.

pub mod formats;
