// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

mod common;

use common::workload;

#[test]
fn birth_selection_bounds_scan_work() {
    println!("{}", workload::scan_work_check().unwrap());
}

#[test]
fn q5_runtime_follows_birth_fraction() {
    println!("{}", workload::q5_trend_check(5).unwrap());
}

#[test]
fn birth_action_prunes_chunks() {
    println!("{}", workload::pruning_check().unwrap());
}

#[test]
fn benchmark_queries_match_oracle() {
    println!("{}", workload::benchmark_queries_check().unwrap());
}
