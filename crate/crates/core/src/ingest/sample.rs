// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

//! A ten-row mobile game activity table, handy for examples and tests.
//!
//! ```text
//!      player time            action role     country       gold
//! t1   001    2013/05/19:1000 launch dwarf    Australia     0
//! t2   001    2013/05/20:0800 shop   dwarf    Australia     50
//! t3   001    2013/05/20:1400 shop   dwarf    Australia     100
//! t4   001    2013/05/21:1400 shop   assassin Australia     50
//! t5   001    2013/05/22:0900 fight  assassin Australia     0
//! t6   002    2013/05/20:0900 launch wizard   United States 0
//! t7   002    2013/05/21:1500 shop   wizard   United States 30
//! t8   002    2013/05/22:1700 shop   wizard   United States 40
//! t9   003    2013/05/20:1000 launch bandit   China         0
//! t10  003    2013/05/21:1000 fight  bandit   China         0
//! ```

use crate::model::{parse_timestamp, ActivitySchema, ActivityTuple, ColumnKind, Value};

const ROWS: [(&str, &str, &str, &str, &str, i64); 10] = [
    ("001", "2013/05/19:1000", "launch", "dwarf", "Australia", 0),
    ("001", "2013/05/20:0800", "shop", "dwarf", "Australia", 50),
    ("001", "2013/05/20:1400", "shop", "dwarf", "Australia", 100),
    ("001", "2013/05/21:1400", "shop", "assassin", "Australia", 50),
    ("001", "2013/05/22:0900", "fight", "assassin", "Australia", 0),
    ("002", "2013/05/20:0900", "launch", "wizard", "United States", 0),
    ("002", "2013/05/21:1500", "shop", "wizard", "United States", 30),
    ("002", "2013/05/22:1700", "shop", "wizard", "United States", 40),
    ("003", "2013/05/20:1000", "launch", "bandit", "China", 0),
    ("003", "2013/05/21:1000", "fight", "bandit", "China", 0),
];

pub fn sample_schema() -> ActivitySchema {
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
    .expect("valid schema")
}

/// The ten tuples, `t1` at index 0.
pub fn sample_tuples() -> Vec<ActivityTuple> {
    ROWS.iter()
        .map(|&(user, time, action, role, country, gold)| ActivityTuple {
            user: user.into(),
            time: parse_timestamp(time).expect("valid timestamp"),
            action: action.into(),
            dims: vec![Value::from(role), Value::from(country)],
            measures: vec![gold],
        })
        .collect()
}

/// The same table as CSV text with a header row.
pub fn sample_csv() -> String {
    let mut s = String::from("player,time,action,role,country,gold\n");
    for (user, time, action, role, country, gold) in ROWS {
        s.push_str(&format!("{user},{time},{action},{role},{country},{gold}\n"));
    }
    s
}
