// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::fmt;

use crate::model::{AggFunc, CmpOp, TimeUnit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Str(String),
    Int(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Attr(String),
    Birth(String),
    Age,
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Compare {
        left: Term,
        op: CmpOp,
        right: Term,
    },
    In {
        term: Term,
        list: Vec<Literal>,
        negated: bool,
    },
    Between {
        term: Term,
        low: Literal,
        high: Literal,
        negated: bool,
    },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectItem {
    Attr(String),
    CohortSize,
    Age,
    Agg {
        func: AggFunc,
        arg: Option<String>,
        alias: Option<String>,
    },
}

/// Which of the two clauses was written first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClauseOrder {
    #[default]
    BirthFirst,
    AgeFirst,
}

/// A parsed, not yet schema-checked cohort query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    pub select: Vec<SelectItem>,
    pub table: String,
    /// Attribute named in `BIRTH FROM <attr> = e`; must be the action attribute.
    pub birth_attr: String,
    pub birth_action: String,
    pub birth_predicate: Option<Expr>,
    pub age_predicate: Option<Expr>,
    pub cohort_by: Vec<String>,
    pub clause_order: ClauseOrder,
    /// Age normalization unit. Not part of the query text.
    pub age_unit: TimeUnit,
}

fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !super::lexer::is_reserved(s)
}

struct Ident<'a>(&'a str);

impl fmt::Display for Ident<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_plain_ident(self.0) {
            f.write_str(self.0)
        } else {
            write!(f, "`{}`", self.0.replace('`', "``"))
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Attr(a) => write!(f, "{}", Ident(a)),
            Term::Birth(a) => write!(f, "Birth({})", Ident(a)),
            Term::Age => f.write_str("AGE"),
            Term::Lit(l) => write!(f, "{l}"),
        }
    }
}

fn list(f: &mut fmt::Formatter<'_>, items: &[Literal]) -> fmt::Result {
    f.write_str("[")?;
    for (i, l) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{l}")?;
    }
    f.write_str("]")
}

// Canonical form: every compound sub-expression is parenthesized.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let not = |n: bool| if n { "NOT " } else { "" };
        match self {
            Expr::Compare { left, op, right } => write!(f, "{left} {} {right}", op.symbol()),
            Expr::In {
                term,
                list: items,
                negated,
            } => {
                write!(f, "{term} {}IN ", not(*negated))?;
                list(f, items)
            }
            Expr::Between {
                term,
                low,
                high,
                negated,
            } => write!(f, "{term} {}BETWEEN {low} AND {high}", not(*negated)),
            Expr::And(a, b) => write!(f, "({a} AND {b})"),
            Expr::Or(a, b) => write!(f, "({a} OR {b})"),
            Expr::Not(a) => write!(f, "NOT ({a})"),
        }
    }
}

impl fmt::Display for SelectItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectItem::Attr(a) => write!(f, "{}", Ident(a)),
            SelectItem::CohortSize => f.write_str("COHORTSIZE"),
            SelectItem::Age => f.write_str("AGE"),
            SelectItem::Agg { func, arg, alias } => {
                write!(f, "{func}(")?;
                if let Some(a) = arg {
                    write!(f, "{}", Ident(a))?;
                }
                f.write_str(")")?;
                if let Some(a) = alias {
                    write!(f, " AS {}", Ident(a))?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for QuerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        for (i, item) in self.select.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        write!(f, " FROM {}", Ident(&self.table))?;
        let birth = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            write!(
                f,
                " BIRTH FROM {} = {}",
                Ident(&self.birth_attr),
                Literal::Str(self.birth_action.clone())
            )?;
            if let Some(p) = &self.birth_predicate {
                write!(f, " AND {p}")?;
            }
            Ok(())
        };
        let age = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            match &self.age_predicate {
                Some(p) => write!(f, " AGE ACTIVITIES IN {p}"),
                None => Ok(()),
            }
        };
        match self.clause_order {
            ClauseOrder::BirthFirst => {
                birth(f)?;
                age(f)?;
            }
            ClauseOrder::AgeFirst => {
                age(f)?;
                birth(f)?;
            }
        }
        f.write_str(" COHORT BY ")?;
        for (i, c) in self.cohort_by.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", Ident(c))?;
        }
        Ok(())
    }
}
