// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

mod common;

#[test]
fn codec_round_trips() {
    let n = common::codec_properties(25_000).unwrap();
    assert!(n >= 100_000);
}

#[test]
fn chunkset_file_round_trip() {
    common::file_roundtrip_properties(64).unwrap();
}
