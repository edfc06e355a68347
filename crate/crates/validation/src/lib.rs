//! End-to-end acceptance checks for `qrpm`; see `tests/acceptance.rs`.
