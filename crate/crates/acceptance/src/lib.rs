//! Holds the `acceptance` integration test; see `tests/acceptance.rs`.
