// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::cmp::Ordering;

use super::predicate::Row;
use super::schema::{ActivitySchema, ColumnId, ColumnKind};
use super::time::Timestamp;
use super::value::{Value, ValueRef};

/// One row of the activity table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActivityTuple {
    pub user: String,
    pub time: Timestamp,
    pub action: String,
    pub dims: Vec<Value>,
    pub measures: Vec<i64>,
}

impl ActivityTuple {
    /// Primary-key order: `(user, time, action)`.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        (&self.user, self.time, &self.action).cmp(&(&other.user, other.time, &other.action))
    }

    /// Checks arity and dimension kinds against `schema`.
    pub fn conforms_to(&self, schema: &ActivitySchema) -> bool {
        self.dims.len() == schema.dimensions().len()
            && self.measures.len() == schema.measures().len()
            && self.dims.iter().zip(schema.dimensions()).all(|(v, (_, kind))| {
                matches!(
                    (v, kind),
                    (Value::Int(_), ColumnKind::Integer) | (Value::Str(_), ColumnKind::String)
                )
            })
    }
}

impl Row for ActivityTuple {
    fn value(&self, column: ColumnId) -> ValueRef<'_> {
        match column.0 {
            0 => ValueRef::Str(&self.user),
            1 => ValueRef::Int(self.time),
            2 => ValueRef::Str(&self.action),
            i if i < 3 + self.dims.len() => self.dims[i - 3].as_ref(),
            i => ValueRef::Int(self.measures[i - 3 - self.dims.len()]),
        }
    }
}

/// A user's birth with respect to one birth action. `None` means the user
/// never performed the action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BirthInfo {
    pub birth: Option<(Timestamp, usize)>,
}

impl BirthInfo {
    pub const NEVER: BirthInfo = BirthInfo { birth: None };

    pub fn at(time: Timestamp, index: usize) -> Self {
        BirthInfo {
            birth: Some((time, index)),
        }
    }

    pub fn time(&self) -> Option<Timestamp> {
        self.birth.map(|(t, _)| t)
    }

    /// Position of the birth tuple within the user's tuple block.
    pub fn tuple_index(&self) -> Option<usize> {
        self.birth.map(|(_, i)| i)
    }

    pub fn is_never(&self) -> bool {
        self.birth.is_none()
    }
}
