// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use super::schema::{ActivitySchema, ColumnId};
use super::time::Age;
use super::value::{Value, ValueRef};

/// Anything that can hand out attribute values by column id.
pub trait Row {
    fn value(&self, column: ColumnId) -> ValueRef<'_>;
}

impl<R: Row + ?Sized> Row for &R {
    fn value(&self, column: ColumnId) -> ValueRef<'_> {
        (**self).value(column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    /// The operator with its operands swapped: `a op b` iff `b op.flipped() a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            op => op,
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Column(ColumnId),
    /// The attribute's value in the current user's birth tuple.
    Birth(ColumnId),
    /// The normalized age of the current tuple.
    Age,
    Literal(Value),
}

/// A schema-bound boolean condition over one activity tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    Const(bool),
    Compare {
        left: Operand,
        op: CmpOp,
        right: Operand,
    },
    InList {
        operand: Operand,
        list: Vec<Value>,
    },
    /// Closed interval `[low, high]`.
    Between {
        operand: Operand,
        low: Value,
        high: Value,
    },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("Birth() referenced but no birth tuple is available")]
    MissingBirth,
    #[error("AGE referenced but no age is available")]
    MissingAge,
    #[error("cannot compare {0} with {1}")]
    TypeMismatch(String, String),
}

fn compare(a: ValueRef<'_>, b: ValueRef<'_>) -> Result<Ordering, EvalError> {
    match (a, b) {
        (ValueRef::Int(x), ValueRef::Int(y)) => Ok(x.cmp(&y)),
        (ValueRef::Str(x), ValueRef::Str(y)) => Ok(x.cmp(y)),
        (a, b) => Err(EvalError::TypeMismatch(a.to_string(), b.to_string())),
    }
}

struct Env<'a, R: ?Sized, B: ?Sized> {
    row: &'a R,
    birth: Option<&'a B>,
    age: Option<Age>,
}

impl<'a, R: Row + ?Sized, B: Row + ?Sized> Env<'a, R, B> {
    fn operand<'o>(&self, op: &'o Operand) -> Result<ValueRef<'o>, EvalError>
    where
        'a: 'o,
    {
        Ok(match op {
            Operand::Column(c) => self.row.value(*c),
            Operand::Birth(c) => self.birth.ok_or(EvalError::MissingBirth)?.value(*c),
            Operand::Age => ValueRef::Int(self.age.ok_or(EvalError::MissingAge)?.0 as i64),
            Operand::Literal(v) => v.as_ref(),
        })
    }

    fn eval(&self, p: &Predicate) -> Result<bool, EvalError> {
        Ok(match p {
            Predicate::Const(b) => *b,
            Predicate::Compare { left, op, right } => op.holds(compare(self.operand(left)?, self.operand(right)?)?),
            Predicate::InList { operand, list } => {
                let v = self.operand(operand)?;
                let mut found = false;
                for item in list {
                    if compare(v, item.as_ref())? == Ordering::Equal {
                        found = true;
                        break;
                    }
                }
                found
            }
            Predicate::Between { operand, low, high } => {
                let v = self.operand(operand)?;
                compare(v, low.as_ref())? != Ordering::Less && compare(v, high.as_ref())? != Ordering::Greater
            }
            Predicate::And(a, b) => self.eval(a)? && self.eval(b)?,
            Predicate::Or(a, b) => self.eval(a)? || self.eval(b)?,
            Predicate::Not(a) => !self.eval(a)?,
        })
    }
}

/// Evaluates `p` on `row`. `birth` resolves `Birth(attr)` references and
/// `age` binds `AGE`; either may be omitted when the predicate does not use it.
pub fn eval_predicate<R, B>(p: &Predicate, row: &R, birth: Option<&B>, age: Option<Age>) -> Result<bool, EvalError>
where
    R: Row + ?Sized,
    B: Row + ?Sized,
{
    Env { row, birth, age }.eval(p)
}

impl Predicate {
    pub fn and(self, other: Predicate) -> Predicate {
        Predicate::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Predicate) -> Predicate {
        Predicate::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Predicate {
        Predicate::Not(Box::new(self))
    }

    pub fn eval<R: Row + ?Sized, B: Row + ?Sized>(
        &self,
        row: &R,
        birth: Option<&B>,
        age: Option<Age>,
    ) -> Result<bool, EvalError> {
        eval_predicate(self, row, birth, age)
    }

    fn operands<'a>(&'a self, out: &mut Vec<&'a Operand>) {
        match self {
            Predicate::Const(_) => {}
            Predicate::Compare { left, right, .. } => {
                out.push(left);
                out.push(right);
            }
            Predicate::InList { operand, .. } | Predicate::Between { operand, .. } => out.push(operand),
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.operands(out);
                b.operands(out);
            }
            Predicate::Not(a) => a.operands(out),
        }
    }

    fn collect_operands(&self) -> Vec<&Operand> {
        let mut out = Vec::new();
        self.operands(&mut out);
        out
    }

    /// Columns read from the current tuple.
    pub fn row_columns(&self) -> Vec<ColumnId> {
        self.collect_operands()
            .into_iter()
            .filter_map(|o| match o {
                Operand::Column(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    /// Columns read from the birth tuple through `Birth(attr)`.
    pub fn birth_columns(&self) -> Vec<ColumnId> {
        self.collect_operands()
            .into_iter()
            .filter_map(|o| match o {
                Operand::Birth(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    pub fn uses_birth(&self) -> bool {
        self.collect_operands().iter().any(|o| matches!(o, Operand::Birth(_)))
    }

    pub fn uses_age(&self) -> bool {
        self.collect_operands().iter().any(|o| matches!(o, Operand::Age))
    }

    /// Top-level `AND` operands, left to right.
    pub fn conjuncts(&self) -> Vec<&Predicate> {
        match self {
            Predicate::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }

    /// Renders the predicate with attribute names from `schema`.
    pub fn display<'a>(&'a self, schema: &'a ActivitySchema) -> impl fmt::Display + 'a {
        DisplayPredicate { p: self, schema }
    }
}

struct DisplayPredicate<'a> {
    p: &'a Predicate,
    schema: &'a ActivitySchema,
}

fn literal(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Str(s) => format!("{s:?}"),
    }
}

impl DisplayPredicate<'_> {
    fn operand(&self, o: &Operand) -> String {
        match o {
            Operand::Column(c) => self.schema.name(*c).to_string(),
            Operand::Birth(c) => format!("Birth({})", self.schema.name(*c)),
            Operand::Age => "AGE".to_string(),
            Operand::Literal(v) => literal(v),
        }
    }

    fn render(&self, p: &Predicate, out: &mut String) {
        match p {
            Predicate::Const(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
            Predicate::Compare { left, op, right } => {
                out.push_str(&format!(
                    "{} {} {}",
                    self.operand(left),
                    op.symbol(),
                    self.operand(right)
                ));
            }
            Predicate::InList { operand, list } => {
                let items: Vec<String> = list.iter().map(literal).collect();
                out.push_str(&format!("{} IN [{}]", self.operand(operand), items.join(", ")));
            }
            Predicate::Between { operand, low, high } => out.push_str(&format!(
                "{} BETWEEN {} AND {}",
                self.operand(operand),
                literal(low),
                literal(high)
            )),
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                let kw = if matches!(p, Predicate::And(..)) { "AND" } else { "OR" };
                out.push('(');
                self.render(a, out);
                out.push_str(&format!(" {kw} "));
                self.render(b, out);
                out.push(')');
            }
            Predicate::Not(a) => {
                out.push_str("NOT (");
                self.render(a, out);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for DisplayPredicate<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(self.p, &mut s);
        f.write_str(&s)
    }
}
