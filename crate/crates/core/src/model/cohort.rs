// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::fmt;
use std::str::FromStr;

use super::schema::ColumnId;
use super::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggFunc {
    Sum,
    Avg,
    Count,
    Min,
    Max,
    /// Number of distinct users contributing to a (cohort, age) bucket.
    UserCount,
}

impl AggFunc {
    pub const ALL: [AggFunc; 6] = [
        AggFunc::Sum,
        AggFunc::Avg,
        AggFunc::Count,
        AggFunc::Min,
        AggFunc::Max,
        AggFunc::UserCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AggFunc::Sum => "Sum",
            AggFunc::Avg => "Avg",
            AggFunc::Count => "Count",
            AggFunc::Min => "Min",
            AggFunc::Max => "Max",
            AggFunc::UserCount => "UserCount",
        }
    }

    /// Whether the function reads a measure column.
    pub fn needs_measure(self) -> bool {
        matches!(self, AggFunc::Sum | AggFunc::Avg | AggFunc::Min | AggFunc::Max)
    }
}

impl fmt::Display for AggFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AggFunc {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        AggFunc::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

/// One aggregate of a cohort query. `column` is the measure for
/// Sum/Avg/Min/Max and `None` for Count and UserCount.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AggSpec {
    pub func: AggFunc,
    pub column: Option<ColumnId>,
}

/// An aggregate result. Avg is the only floating-point aggregate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AggValue {
    Int(i128),
    Float(f64),
}

impl AggValue {
    /// Exact equality for integers, relative tolerance `rel` for floats.
    pub fn approx_eq(&self, other: &AggValue, rel: f64) -> bool {
        match (self, other) {
            (AggValue::Int(a), AggValue::Int(b)) => a == b,
            (AggValue::Float(a), AggValue::Float(b)) => a == b || (a - b).abs() <= rel * a.abs().max(b.abs()),
            _ => false,
        }
    }
}

impl fmt::Display for AggValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AggValue::Int(v) => write!(f, "{v}"),
            AggValue::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Exact running state of one aggregate over one bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accumulator {
    pub count: u64,
    pub sum: i128,
    pub min: i64,
    pub max: i64,
    pub users: u64,
}

impl Default for Accumulator {
    fn default() -> Self {
        Accumulator {
            count: 0,
            sum: 0,
            min: i64::MAX,
            max: i64::MIN,
            users: 0,
        }
    }
}

impl Accumulator {
    #[inline]
    pub fn add(&mut self, v: i64) {
        self.count += 1;
        self.sum += v as i128;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        self.users += other.users;
    }

    pub fn finish(&self, func: AggFunc) -> AggValue {
        match func {
            AggFunc::Sum => AggValue::Int(self.sum),
            AggFunc::Avg => AggValue::Float(self.sum as f64 / self.count as f64),
            AggFunc::Count => AggValue::Int(self.count as i128),
            AggFunc::Min => AggValue::Int(self.min as i128),
            AggFunc::Max => AggValue::Int(self.max as i128),
            AggFunc::UserCount => AggValue::Int(self.users as i128),
        }
    }
}

/// One output row `(cohort key, age, cohort size, measures)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortRow {
    pub key: Vec<Value>,
    pub age: u32,
    pub size: u64,
    pub measures: Vec<AggValue>,
}

impl CohortRow {
    pub fn approx_eq(&self, other: &CohortRow, rel: f64) -> bool {
        self.key == other.key
            && self.age == other.age
            && self.size == other.size
            && self.measures.len() == other.measures.len()
            && self
                .measures
                .iter()
                .zip(&other.measures)
                .all(|(a, b)| a.approx_eq(b, rel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agg_names_parse_case_insensitively() {
        for a in AggFunc::ALL {
            assert_eq!(a.name().to_uppercase().parse::<AggFunc>(), Ok(a));
        }
        assert!("Median".parse::<AggFunc>().is_err());
    }

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let values = [5, -3, 12, 7, 0, 9];
        let mut whole = Accumulator::default();
        values.iter().for_each(|v| whole.add(*v));
        let (mut a, mut b) = (Accumulator::default(), Accumulator::default());
        values[..2].iter().for_each(|v| a.add(*v));
        values[2..].iter().for_each(|v| b.add(*v));
        a.merge(&b);
        assert_eq!(a, whole);
        assert_eq!(a.finish(AggFunc::Avg), AggValue::Float(30.0 / 6.0));
        assert_eq!(a.finish(AggFunc::Min), AggValue::Int(-3));
        assert_eq!(a.finish(AggFunc::Max), AggValue::Int(12));
    }

    #[test]
    fn float_tolerance() {
        assert!(AggValue::Float(1.0).approx_eq(&AggValue::Float(1.0 + 1e-12), 1e-9));
        assert!(!AggValue::Float(1.0).approx_eq(&AggValue::Float(1.001), 1e-9));
        assert!(!AggValue::Int(1).approx_eq(&AggValue::Float(1.0), 1e-9));
    }
}
