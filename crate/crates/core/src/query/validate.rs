// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use thiserror::Error;

use super::ast::{Expr, Literal, QuerySpec, SelectItem, Term};
use crate::model::{
    parse_day, parse_timestamp, ActivitySchema, AggFunc, AggSpec, ColumnId, ColumnKind, Operand, Predicate, TimeUnit,
    Value,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("BIRTH FROM must name the action attribute `{expected}`, not `{found}`")]
    BirthAttribute { expected: String, found: String },
    #[error("cannot cohort by `{0}`: the user and action attributes are not cohort attributes")]
    CohortOnUserOrAction(String),
    #[error("`{0}` appears twice in COHORT BY")]
    DuplicateCohortAttribute(String),
    #[error("`{0}` is selected but is not a COHORT BY attribute")]
    NotCohortAttribute(String),
    #[error("Birth() is not allowed in the birth predicate")]
    BirthInBirthPredicate,
    #[error("AGE may only appear in the select list and the AGE ACTIVITIES IN clause")]
    AgeOutsideAgeClause,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("{func}() needs a measure argument, and `{arg}` is not a measure")]
    NotAMeasure { func: AggFunc, arg: String },
    #[error("{0}() needs an argument")]
    MissingArgument(AggFunc),
    #[error("UserCount() takes no argument")]
    UnexpectedArgument,
    #[error("`{0}` is not a valid timestamp")]
    BadTimestamp(String),
}

/// What a result column shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// Position in the cohort key.
    Cohort(usize),
    CohortSize,
    Age,
    /// Position in the aggregate list.
    Agg(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputColumn {
    pub name: String,
    pub kind: OutputKind,
}

/// A query bound to a schema and ready for planning.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundQuery {
    pub spec: QuerySpec,
    pub birth_action: String,
    pub birth_predicate: Option<Predicate>,
    pub age_predicate: Option<Predicate>,
    pub cohort_by: Vec<ColumnId>,
    pub aggregates: Vec<AggSpec>,
    pub output: Vec<OutputColumn>,
    pub age_unit: TimeUnit,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Clause {
    Birth,
    Age,
}

#[derive(Clone, Copy)]
struct Typed {
    kind: ColumnKind,
    is_time: bool,
}

struct Binder<'a> {
    schema: &'a ActivitySchema,
    clause: Clause,
}

impl Binder<'_> {
    fn column(&self, name: &str) -> Result<ColumnId, ValidationError> {
        self.schema
            .lookup(name)
            .ok_or_else(|| ValidationError::UnknownAttribute(name.to_string()))
    }

    fn typed(&self, col: ColumnId) -> Typed {
        Typed {
            kind: self.schema.kind(col),
            is_time: col == ColumnId::TIME,
        }
    }

    // Non-literal terms bind to an operand with a known type.
    fn term(&self, t: &Term) -> Result<Option<(Operand, Typed)>, ValidationError> {
        Ok(Some(match t {
            Term::Attr(a) => {
                let c = self.column(a)?;
                (Operand::Column(c), self.typed(c))
            }
            Term::Birth(a) => {
                if self.clause == Clause::Birth {
                    return Err(ValidationError::BirthInBirthPredicate);
                }
                let c = self.column(a)?;
                (Operand::Birth(c), self.typed(c))
            }
            Term::Age => {
                if self.clause == Clause::Birth {
                    return Err(ValidationError::AgeOutsideAgeClause);
                }
                (
                    Operand::Age,
                    Typed {
                        kind: ColumnKind::Integer,
                        is_time: false,
                    },
                )
            }
            Term::Lit(_) => return Ok(None),
        }))
    }

    fn coerce(&self, lit: &Literal, ty: Typed) -> Result<Value, ValidationError> {
        match (lit, ty.kind) {
            (Literal::Str(s), ColumnKind::String) => Ok(Value::Str(s.clone())),
            (Literal::Int(v), ColumnKind::Integer) => Ok(Value::Int(*v)),
            (Literal::Str(s), ColumnKind::Integer) if ty.is_time => parse_timestamp(s)
                .map(Value::Int)
                .ok_or_else(|| ValidationError::BadTimestamp(s.clone())),
            (lit, kind) => Err(ValidationError::TypeMismatch(format!(
                "{lit} compared with a {kind} value"
            ))),
        }
    }

    fn literal_value(lit: &Literal) -> Value {
        match lit {
            Literal::Str(s) => Value::Str(s.clone()),
            Literal::Int(v) => Value::Int(*v),
        }
    }

    fn expr(&self, e: &Expr) -> Result<Predicate, ValidationError> {
        Ok(match e {
            Expr::And(a, b) => self.expr(a)?.and(self.expr(b)?),
            Expr::Or(a, b) => self.expr(a)?.or(self.expr(b)?),
            Expr::Not(a) => self.expr(a)?.not(),
            Expr::Compare { left, op, right } => {
                let (l, r) = match (self.term(left)?, self.term(right)?) {
                    (Some((l, lt)), Some((r, rt))) => {
                        if lt.kind != rt.kind {
                            return Err(ValidationError::TypeMismatch(format!(
                                "{left} ({}) compared with {right} ({})",
                                lt.kind, rt.kind
                            )));
                        }
                        (l, r)
                    }
                    (Some((l, lt)), None) => {
                        let Term::Lit(lit) = right else { unreachable!() };
                        (l, Operand::Literal(self.coerce(lit, lt)?))
                    }
                    (None, Some((r, rt))) => {
                        let Term::Lit(lit) = left else { unreachable!() };
                        (Operand::Literal(self.coerce(lit, rt)?), r)
                    }
                    (None, None) => {
                        let (Term::Lit(a), Term::Lit(b)) = (left, right) else {
                            unreachable!()
                        };
                        let (a, b) = (Self::literal_value(a), Self::literal_value(b));
                        if std::mem::discriminant(&a) != std::mem::discriminant(&b) {
                            return Err(ValidationError::TypeMismatch(format!("{left} compared with {right}")));
                        }
                        (Operand::Literal(a), Operand::Literal(b))
                    }
                };
                Predicate::Compare {
                    left: l,
                    op: *op,
                    right: r,
                }
            }
            Expr::In { term, list, negated } => {
                let (operand, list) = match self.term(term)? {
                    Some((op, ty)) => (
                        op,
                        list.iter().map(|l| self.coerce(l, ty)).collect::<Result<Vec<_>, _>>()?,
                    ),
                    None => {
                        let Term::Lit(lit) = term else { unreachable!() };
                        let v = Self::literal_value(lit);
                        let ty = Typed {
                            kind: match v {
                                Value::Int(_) => ColumnKind::Integer,
                                Value::Str(_) => ColumnKind::String,
                            },
                            is_time: false,
                        };
                        let list = list.iter().map(|l| self.coerce(l, ty)).collect::<Result<Vec<_>, _>>()?;
                        (Operand::Literal(v), list)
                    }
                };
                let p = Predicate::InList { operand, list };
                if *negated {
                    p.not()
                } else {
                    p
                }
            }
            Expr::Between {
                term,
                low,
                high,
                negated,
            } => {
                let Some((operand, ty)) = self.term(term)? else {
                    return Err(ValidationError::TypeMismatch(
                        "BETWEEN needs an attribute, Birth() or AGE on its left".into(),
                    ));
                };
                let lo = self.coerce(low, ty)?;
                let mut hi = self.coerce(high, ty)?;
                // A date-only upper bound on a timestamp covers that whole day.
                if let (true, Literal::Str(s), Value::Int(h)) = (ty.is_time, high, &mut hi) {
                    if parse_day(s).is_some() {
                        *h += 86_399;
                    }
                }
                let p = Predicate::Between {
                    operand,
                    low: lo,
                    high: hi,
                };
                if *negated {
                    p.not()
                } else {
                    p
                }
            }
        })
    }
}

/// Checks `spec` against `schema` and binds attribute names to columns.
pub fn validate(spec: &QuerySpec, schema: &ActivitySchema) -> Result<BoundQuery, ValidationError> {
    if spec.birth_attr != schema.action_attr() {
        return Err(ValidationError::BirthAttribute {
            expected: schema.action_attr().to_string(),
            found: spec.birth_attr.clone(),
        });
    }
    let mut cohort_by = Vec::with_capacity(spec.cohort_by.len());
    for name in &spec.cohort_by {
        let c = schema
            .lookup(name)
            .ok_or_else(|| ValidationError::UnknownAttribute(name.clone()))?;
        if c == ColumnId::USER || c == ColumnId::ACTION {
            return Err(ValidationError::CohortOnUserOrAction(name.clone()));
        }
        if cohort_by.contains(&c) {
            return Err(ValidationError::DuplicateCohortAttribute(name.clone()));
        }
        cohort_by.push(c);
    }

    let mut aggregates = Vec::new();
    let mut output = Vec::with_capacity(spec.select.len());
    for item in &spec.select {
        let (name, kind) = match item {
            SelectItem::Attr(a) => {
                let c = schema
                    .lookup(a)
                    .ok_or_else(|| ValidationError::UnknownAttribute(a.clone()))?;
                let pos = cohort_by
                    .iter()
                    .position(|x| *x == c)
                    .ok_or_else(|| ValidationError::NotCohortAttribute(a.clone()))?;
                (a.clone(), OutputKind::Cohort(pos))
            }
            SelectItem::CohortSize => ("COHORTSIZE".to_string(), OutputKind::CohortSize),
            SelectItem::Age => ("AGE".to_string(), OutputKind::Age),
            SelectItem::Agg { func, arg, alias } => {
                let column = match (func, arg) {
                    (AggFunc::UserCount, Some(_)) => return Err(ValidationError::UnexpectedArgument),
                    (AggFunc::UserCount, None) | (AggFunc::Count, None) => None,
                    (AggFunc::Count, Some(a)) => {
                        schema
                            .lookup(a)
                            .ok_or_else(|| ValidationError::UnknownAttribute(a.clone()))?;
                        None
                    }
                    (f, None) => return Err(ValidationError::MissingArgument(*f)),
                    (f, Some(a)) => {
                        let c = schema
                            .lookup(a)
                            .ok_or_else(|| ValidationError::UnknownAttribute(a.clone()))?;
                        if schema.role(c) != crate::model::ColumnRole::Measure {
                            return Err(ValidationError::NotAMeasure {
                                func: *f,
                                arg: a.clone(),
                            });
                        }
                        Some(c)
                    }
                };
                aggregates.push(AggSpec { func: *func, column });
                let name = alias.clone().unwrap_or_else(|| {
                    let mut item = item.clone();
                    if let SelectItem::Agg { alias, .. } = &mut item {
                        *alias = None;
                    }
                    item.to_string()
                });
                (name, OutputKind::Agg(aggregates.len() - 1))
            }
        };
        output.push(OutputColumn { name, kind });
    }

    let birth_predicate = spec
        .birth_predicate
        .as_ref()
        .map(|e| {
            Binder {
                schema,
                clause: Clause::Birth,
            }
            .expr(e)
        })
        .transpose()?;
    let age_predicate = spec
        .age_predicate
        .as_ref()
        .map(|e| {
            Binder {
                schema,
                clause: Clause::Age,
            }
            .expr(e)
        })
        .transpose()?;

    Ok(BoundQuery {
        spec: spec.clone(),
        birth_action: spec.birth_action.clone(),
        birth_predicate,
        age_predicate,
        cohort_by,
        aggregates,
        output,
        age_unit: spec.age_unit,
    })
}
