// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Physical type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    String,
    Integer,
}

/// What a column means to the cohort operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnRole {
    User,
    Time,
    Action,
    Dimension,
    Measure,
}

/// Position of a column in the flattened schema layout:
/// user, time, action, then dimensions, then measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnId(pub usize);

impl ColumnId {
    pub const USER: ColumnId = ColumnId(0);
    pub const TIME: ColumnId = ColumnId(1);
    pub const ACTION: ColumnId = ColumnId(2);

    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDef<'a> {
    pub id: ColumnId,
    pub name: &'a str,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("duplicate attribute name `{0}`")]
    DuplicateName(String),
    #[error("attribute name must not be empty")]
    EmptyName,
}

/// The activity relation: mandatory user, time and action attributes followed
/// by any number of dimensions and (integer) measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivitySchema {
    user: String,
    time: String,
    action: String,
    dimensions: Vec<(String, ColumnKind)>,
    measures: Vec<String>,
}

impl ActivitySchema {
    pub fn new(
        user: impl Into<String>,
        time: impl Into<String>,
        action: impl Into<String>,
        dimensions: Vec<(String, ColumnKind)>,
        measures: Vec<String>,
    ) -> Result<Self, SchemaError> {
        let schema = ActivitySchema {
            user: user.into(),
            time: time.into(),
            action: action.into(),
            dimensions,
            measures,
        };
        let mut seen = HashSet::new();
        for col in schema.columns() {
            if col.name.is_empty() {
                return Err(SchemaError::EmptyName);
            }
            if !seen.insert(col.name) {
                return Err(SchemaError::DuplicateName(col.name.to_string()));
            }
        }
        Ok(schema)
    }

    pub fn user_attr(&self) -> &str {
        &self.user
    }

    pub fn time_attr(&self) -> &str {
        &self.time
    }

    pub fn action_attr(&self) -> &str {
        &self.action
    }

    pub fn dimensions(&self) -> &[(String, ColumnKind)] {
        &self.dimensions
    }

    pub fn measures(&self) -> &[String] {
        &self.measures
    }

    pub fn column_count(&self) -> usize {
        3 + self.dimensions.len() + self.measures.len()
    }

    /// Panics if `id` is out of range.
    pub fn column(&self, id: ColumnId) -> ColumnDef<'_> {
        let nd = self.dimensions.len();
        let (name, kind, role) = match id.0 {
            0 => (self.user.as_str(), ColumnKind::String, ColumnRole::User),
            1 => (self.time.as_str(), ColumnKind::Integer, ColumnRole::Time),
            2 => (self.action.as_str(), ColumnKind::String, ColumnRole::Action),
            i if i < 3 + nd => {
                let (name, kind) = &self.dimensions[i - 3];
                (name.as_str(), *kind, ColumnRole::Dimension)
            }
            i => (
                self.measures[i - 3 - nd].as_str(),
                ColumnKind::Integer,
                ColumnRole::Measure,
            ),
        };
        ColumnDef { id, name, kind, role }
    }

    pub fn columns(&self) -> impl Iterator<Item = ColumnDef<'_>> + '_ {
        (0..self.column_count()).map(|i| self.column(ColumnId(i)))
    }

    pub fn lookup(&self, name: &str) -> Option<ColumnId> {
        self.columns().find(|c| c.name == name).map(|c| c.id)
    }

    pub fn kind(&self, id: ColumnId) -> ColumnKind {
        self.column(id).kind
    }

    pub fn role(&self, id: ColumnId) -> ColumnRole {
        self.column(id).role
    }

    pub fn name(&self, id: ColumnId) -> &str {
        self.column(id).name
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::String => "string",
            ColumnKind::Integer => "integer",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game() -> ActivitySchema {
        ActivitySchema::new(
            "player",
            "time",
            "action",
            vec![
                ("role".into(), ColumnKind::String),
                ("country".into(), ColumnKind::String),
            ],
            vec!["gold".into()],
        )
        .unwrap()
    }

    #[test]
    fn flattened_layout() {
        let s = game();
        assert_eq!(s.column_count(), 6);
        assert_eq!(s.lookup("player"), Some(ColumnId::USER));
        assert_eq!(s.lookup("country"), Some(ColumnId(4)));
        let gold = s.column(ColumnId(5));
        assert_eq!(gold.name, "gold");
        assert_eq!(gold.role, ColumnRole::Measure);
        assert_eq!(gold.kind, ColumnKind::Integer);
        assert_eq!(s.lookup("missing"), None);
    }

    #[test]
    fn rejects_duplicate_names() {
        let err = ActivitySchema::new(
            "player",
            "time",
            "action",
            vec![("player".into(), ColumnKind::String)],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, SchemaError::DuplicateName("player".into()));
    }

    #[test]
    fn dimensions_and_measures_may_be_empty() {
        let s = ActivitySchema::new("u", "t", "e", vec![], vec![]).unwrap();
        assert_eq!(s.column_count(), 3);
    }
}
