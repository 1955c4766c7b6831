// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use crate::model::ActivityTuple;

/// Replicates every user `x` times. Replica 0 keeps the original user id;
/// replica `r > 0` of user `u` is named `r:u`. Output is in input order,
/// replica by replica; callers sort if they need primary-key order.
pub fn scale_dataset(base: &[ActivityTuple], x: usize) -> Vec<ActivityTuple> {
    let x = x.max(1);
    let mut out = Vec::with_capacity(base.len() * x);
    out.extend_from_slice(base);
    for r in 1..x {
        out.extend(base.iter().map(|t| ActivityTuple {
            user: format!("{r}:{}", t.user),
            ..t.clone()
        }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::sample::sample_tuples;
    use std::collections::{BTreeMap, HashSet};

    #[test]
    fn identity_at_one() {
        assert_eq!(scale_dataset(&sample_tuples(), 1), sample_tuples());
    }

    #[test]
    fn doubles_sample_table() {
        let scaled = scale_dataset(&sample_tuples(), 2);
        assert_eq!(scaled.len(), 20);
        let users: HashSet<&str> = scaled.iter().map(|t| t.user.as_str()).collect();
        assert_eq!(users.len(), 6);

        let strip = |u: &str| u.rsplit(':').next().unwrap().to_string();
        let mut per_user: BTreeMap<&str, Vec<(i64, String)>> = BTreeMap::new();
        for t in &scaled {
            per_user.entry(&t.user).or_default().push((t.time, t.action.clone()));
        }
        for (u, rows) in &per_user {
            let original: Vec<(i64, String)> = sample_tuples()
                .into_iter()
                .filter(|t| t.user == strip(u))
                .map(|t| (t.time, t.action))
                .collect();
            assert_eq!(rows, &original);
        }
    }
}
