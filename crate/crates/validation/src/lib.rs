//! Acceptance suite for the workspace; see `tests/acceptance.rs`.
//!
//! Kept in its own package so `cargo test --workspace` runs it after every
//! other test target.
