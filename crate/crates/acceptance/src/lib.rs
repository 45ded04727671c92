//! Holds the `acceptance` test target; run it with
//! `cargo test -p fleetassign-acceptance --test acceptance`.
