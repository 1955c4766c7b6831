// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use super::ast::{ClauseOrder, Expr, Literal, QuerySpec, SelectItem, Term};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::model::{AggFunc, CmpOp, TimeUnit};

const RELATIONAL: &[&str] = &["WHERE", "GROUP", "JOIN", "HAVING", "ORDER", "LIMIT", "UNION", "WITH"];

/// Parses cohort query text.
pub fn parse(text: &str) -> Result<QuerySpec, ParseError> {
    let tokens = tokenize(text)?;
    Parser { tokens, at: 0 }.query()
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.at + k).min(self.tokens.len() - 1)].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::new(self.pos(), msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Quoted(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Int(v) => format!("number {v}"),
            Tok::Eof => "end of query".into(),
            t => format!("{t:?}").to_lowercase(),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        self.is_kw_at(0, kw)
    }

    fn is_kw_at(&self, k: usize, kw: &str) -> bool {
        matches!(self.peek_at(k), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected {kw}, found {}", self.describe()))
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", self.describe()))
        }
    }

    fn reject_relational(&self) -> Result<(), ParseError> {
        if let Tok::Word(w) = self.peek() {
            if let Some(kw) = RELATIONAL.iter().find(|k| k.eq_ignore_ascii_case(w)) {
                return self.err(format!(
                    "{kw} is a relational operator and is not allowed in a cohort query"
                ));
            }
        }
        Ok(())
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) if !super::lexer::is_reserved(&w) => {
                self.bump();
                Ok(w)
            }
            Tok::Quoted(w) => {
                self.bump();
                Ok(w)
            }
            _ => {
                self.reject_relational()?;
                self.err(format!("expected {what}, found {}", self.describe()))
            }
        }
    }

    fn query(mut self) -> Result<QuerySpec, ParseError> {
        self.reject_relational()?;
        self.expect_kw("SELECT")?;
        let mut select = vec![self.select_item()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            select.push(self.select_item()?);
        }
        self.expect_kw("FROM")?;
        let table = self.ident("table name")?;

        let mut birth: Option<(String, String, Option<Expr>)> = None;
        let mut age: Option<Expr> = None;
        let mut order = ClauseOrder::BirthFirst;
        loop {
            self.reject_relational()?;
            if self.is_kw("BIRTH") {
                if birth.is_some() {
                    return self.err("duplicate BIRTH FROM clause");
                }
                self.bump();
                self.expect_kw("FROM")?;
                let attr = self.ident("action attribute")?;
                self.expect(Tok::Eq, "`=`")?;
                let Tok::Str(action) = self.peek().clone() else {
                    return self.err("expected a quoted birth action");
                };
                self.bump();
                let pred = if self.eat_kw("AND") { Some(self.expr()?) } else { None };
                birth = Some((attr, action, pred));
            } else if self.is_kw("AGE") && self.is_kw_at(1, "ACTIVITIES") {
                if age.is_some() {
                    return self.err("duplicate AGE ACTIVITIES IN clause");
                }
                self.bump();
                self.bump();
                self.expect_kw("IN")?;
                if birth.is_none() {
                    order = ClauseOrder::AgeFirst;
                }
                age = Some(self.expr()?);
            } else {
                break;
            }
        }
        if !self.is_kw("COHORT") {
            return self.err(format!(
                "expected BIRTH FROM, AGE ACTIVITIES IN or COHORT BY, found {}",
                self.describe()
            ));
        }
        let Some((birth_attr, birth_action, birth_predicate)) = birth else {
            return self.err("missing birth action (BIRTH FROM <action> = \"...\")");
        };
        self.bump();
        self.expect_kw("BY")?;
        let mut cohort_by = vec![self.ident("cohort attribute")?];
        while *self.peek() == Tok::Comma {
            self.bump();
            cohort_by.push(self.ident("cohort attribute")?);
        }
        if *self.peek() == Tok::Semi {
            self.bump();
        }
        self.reject_relational()?;
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {} after COHORT BY", self.describe()));
        }
        Ok(QuerySpec {
            select,
            table,
            birth_attr,
            birth_action,
            birth_predicate,
            age_predicate: age,
            cohort_by,
            clause_order: order,
            age_unit: TimeUnit::default(),
        })
    }

    fn select_item(&mut self) -> Result<SelectItem, ParseError> {
        if self.eat_kw("COHORTSIZE") {
            return Ok(SelectItem::CohortSize);
        }
        if self.eat_kw("AGE") {
            return Ok(SelectItem::Age);
        }
        if let (Tok::Word(w), Tok::LParen) = (self.peek().clone(), self.peek_at(1)) {
            let Ok(func) = w.parse::<AggFunc>() else {
                return self.err(format!("unknown aggregate function `{w}`"));
            };
            self.bump();
            self.bump();
            let arg = match self.peek() {
                Tok::RParen => None,
                Tok::Star => {
                    self.bump();
                    None
                }
                _ => Some(self.ident("aggregate argument")?),
            };
            self.expect(Tok::RParen, "`)`")?;
            let alias = if self.eat_kw("AS") {
                Some(self.ident("alias")?)
            } else {
                None
            };
            return Ok(SelectItem::Agg { func, arg, alias });
        }
        Ok(SelectItem::Attr(self.ident("select item")?))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.conj()?;
        while self.eat_kw("OR") {
            let right = self.conj()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.unary()?;
        while self.eat_kw("AND") {
            let right = self.unary()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_kw("NOT") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let e = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(e);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let term = self.term()?;
        let negated = self.is_kw("NOT") && (self.is_kw_at(1, "IN") || self.is_kw_at(1, "BETWEEN"));
        if negated {
            self.bump();
        }
        if self.eat_kw("IN") {
            let list = self.literal_list()?;
            return Ok(Expr::In { term, list, negated });
        }
        if self.eat_kw("BETWEEN") {
            let low = self.literal()?;
            self.expect_kw("AND")?;
            let high = self.literal()?;
            return Ok(Expr::Between {
                term,
                low,
                high,
                negated,
            });
        }
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => {
                self.reject_relational()?;
                return self.err(format!(
                    "expected a comparison, IN or BETWEEN, found {}",
                    self.describe()
                ));
            }
        };
        self.bump();
        let right = self.term()?;
        Ok(Expr::Compare { left: term, op, right })
    }

    fn literal_list(&mut self) -> Result<Vec<Literal>, ParseError> {
        let close = match self.peek() {
            Tok::LBracket => Tok::RBracket,
            Tok::LParen => Tok::RParen,
            _ => return self.err(format!("expected `[`, found {}", self.describe())),
        };
        self.bump();
        let mut items = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.literal()?);
        }
        let what = if close == Tok::RBracket { "`]`" } else { "`)`" };
        self.expect(close, what)?;
        Ok(items)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(Literal::Str(s))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Literal::Int(v))
            }
            _ => self.err(format!("expected a literal, found {}", self.describe())),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Str(_) | Tok::Int(_) => Ok(Term::Lit(self.literal()?)),
            Tok::Word(w) if w.eq_ignore_ascii_case("AGE") => {
                self.bump();
                Ok(Term::Age)
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("BIRTH") && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let attr = self.ident("attribute")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::Birth(attr))
            }
            _ => Ok(Term::Attr(self.ident("attribute or literal")?)),
        }
    }
}
