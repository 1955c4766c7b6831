// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

use super::scale::scale_dataset;
use crate::model::{parse_day, ActivitySchema, ActivityTuple, ColumnKind, Timestamp, Value};

/// The game's action vocabulary.
pub const ACTIONS: [&str; 16] = [
    "launch",
    "shop",
    "achievement",
    "fight",
    "quest",
    "chat",
    "levelup",
    "trade",
    "craft",
    "explore",
    "pvp",
    "guild",
    "gift",
    "upgrade",
    "tutorial",
    "logout",
];

// Relative frequency of each action after a user's first launch.
const ACTION_WEIGHTS: [u32; 16] = [14, 14, 4, 10, 8, 6, 4, 5, 5, 6, 5, 4, 3, 4, 2, 6];

const DAY: i64 = 86_400;

pub fn game_schema() -> ActivitySchema {
    ActivitySchema::new(
        "player",
        "time",
        "action",
        vec![
            ("role".into(), ColumnKind::String),
            ("country".into(), ColumnKind::String),
            ("city".into(), ColumnKind::String),
        ],
        vec!["sessionLength".into(), "gold".into()],
    )
    .expect("valid schema")
}

/// Number of activity tuples per user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivityDistribution {
    /// Uniform over `min..=max`.
    Uniform { min: usize, max: usize },
    /// Zipf over `1..=max` with the given exponent.
    Zipf { max: usize, exponent: f64 },
}

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub users: usize,
    pub activity: ActivityDistribution,
    /// Births fall in `[start, end - 7 days)`; activity runs until `end`.
    pub start: Timestamp,
    pub end: Timestamp,
    pub countries: Vec<(String, f64)>,
    pub cities_per_country: usize,
    pub roles: Vec<String>,
    /// Probability that a later tuple switches the user's role.
    pub role_switch: f64,
    /// Probability that a later tuple is recorded in another country.
    pub travel: f64,
    pub seed: u64,
    /// Replication factor applied after generation.
    pub scale: usize,
    /// When set, only the first `n` users (in id order) ever perform
    /// `achievement`.
    pub achievement_users: Option<usize>,
}

impl Default for GenSpec {
    fn default() -> Self {
        let countries = [
            ("United States", 0.30),
            ("China", 0.20),
            ("Australia", 0.10),
            ("Germany", 0.10),
            ("Japan", 0.10),
            ("Brazil", 0.08),
            ("India", 0.07),
            ("France", 0.05),
        ];
        GenSpec {
            users: 5_000,
            activity: ActivityDistribution::Uniform { min: 1, max: 120 },
            start: parse_day("2013-05-19").expect("valid date"),
            end: parse_day("2013-06-26").expect("valid date"),
            countries: countries.iter().map(|(c, w)| (c.to_string(), *w)).collect(),
            cities_per_country: 4,
            roles: ["dwarf", "assassin", "wizard", "bandit", "knight", "archer"]
                .iter()
                .map(|r| r.to_string())
                .collect(),
            role_switch: 0.05,
            travel: 0.05,
            seed: 42,
            scale: 1,
            achievement_users: None,
        }
    }
}

impl GenSpec {
    /// Zero-padded id of user `i`; lexical order equals numeric order.
    pub fn user_id(&self, i: usize) -> String {
        let width = self.users.max(1).to_string().len();
        format!("u{i:0width$}")
    }
}

/// Generates a synthetic game activity table conforming to [`game_schema`].
/// Output is deterministic in `spec` and sorted by primary key. Every
/// user's first tuple is a `launch`.
pub fn generate(spec: &GenSpec) -> Vec<ActivityTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let actions = WeightedIndex::new(ACTION_WEIGHTS).expect("valid weights");
    let countries = WeightedIndex::new(spec.countries.iter().map(|(_, w)| *w)).expect("country weights");
    let zipf = match spec.activity {
        ActivityDistribution::Zipf { max, exponent } => {
            Some(Zipf::new(max.max(1) as f64, exponent).expect("valid zipf parameters"))
        }
        ActivityDistribution::Uniform { .. } => None,
    };
    let last_birth = (spec.end - 7 * DAY).max(spec.start + 1);

    let mut out = Vec::new();
    for u in 0..spec.users {
        let user = spec.user_id(u);
        let n = match (spec.activity, &zipf) {
            (ActivityDistribution::Uniform { min, max }, _) => rng.random_range(min.max(1)..=max.max(min.max(1))),
            (_, Some(z)) => z.sample(&mut rng) as usize,
            _ => unreachable!(),
        };
        let birth = rng.random_range(spec.start..last_birth);
        let mut times: Vec<Timestamp> = (1..n)
            .map(|_| rng.random_range(birth + 1..spec.end.max(birth + 2)))
            .collect();
        times.sort_unstable();
        times.dedup();

        let home = countries.sample(&mut rng);
        let mut city = rng.random_range(0..spec.cities_per_country.max(1));
        let mut role = rng.random_range(0..spec.roles.len());
        let may_achieve = spec.achievement_users.is_none_or(|k| u < k);

        for (k, time) in std::iter::once(birth).chain(times).enumerate() {
            let action = if k == 0 {
                "launch"
            } else {
                match ACTIONS[actions.sample(&mut rng)] {
                    "achievement" if !may_achieve => "quest",
                    a => a,
                }
            };
            if k > 0 && rng.random_bool(spec.role_switch) {
                role = rng.random_range(0..spec.roles.len());
            }
            let country = if k > 0 && rng.random_bool(spec.travel) {
                city = rng.random_range(0..spec.cities_per_country.max(1));
                countries.sample(&mut rng)
            } else {
                home
            };
            let country_name = &spec.countries[country].0;
            let gold = if action == "shop" { rng.random_range(1..=500) } else { 0 };
            let session = if action == "launch" {
                rng.random_range(30..=7200)
            } else {
                rng.random_range(0..=600)
            };
            out.push(ActivityTuple {
                user: user.clone(),
                time,
                action: action.to_string(),
                dims: vec![
                    Value::from(spec.roles[role].as_str()),
                    Value::from(country_name.as_str()),
                    Value::Str(format!("{country_name}/{city}")),
                ],
                measures: vec![session, gold],
            });
        }
    }
    out.sort_by(ActivityTuple::cmp_key);
    if spec.scale > 1 {
        out = scale_dataset(&out, spec.scale);
        out.sort_by(ActivityTuple::cmp_key);
    }
    out
}
