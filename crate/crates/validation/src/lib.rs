//! Holds the `acceptance` test target; run it with
//! `cargo test -p respat-validation --test acceptance`.
