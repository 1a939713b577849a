//! Evaluation harness for role-play prompting over reasoning benchmarks.
//!
//! This crate carries everything that needs an operating system: the HTTP
//! and mock chat backends, the retrying client, the response cache, dataset
//! files, the prompt registry, run records, configuration, and the CLI.
//! The pure logic (formats, parsing, digests, strategies, voting, scoring)
//! lives in `roleplay-core`.

#![deny(unsafe_code)]

pub mod backend;
pub mod cache;
pub mod cli;
pub mod client;
pub mod config;
pub mod datasets;
pub mod mock_author;
pub mod pipeline;
pub mod records;
pub mod registry;
pub mod texts;
