//! Deterministic output rendering: floats at 12 significant digits, JSON
//! with keys in insertion order, CSV with a header row and `\n` endings.
//! Every command builds its full output as a string before printing, so a
//! given invocation is byte-identical run to run.

/// Formats with at most 12 significant digits, trailing zeros stripped,
/// switching to exponent notation outside a readable magnitude window.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "null".to_string()
        } else if v > 0.0 {
            "1e999".to_string()
        } else {
            "-1e999".to_string()
        };
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{v:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponential format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    } else {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

/// A JSON value with deterministic key order.
pub enum Val {
    Null,
    Bool(bool),
    UInt(u64),
    Int(i64),
    Float(f64),
    Str(String),
    Arr(Vec<Val>),
    Obj(Vec<(&'static str, Val)>),
}

impl Val {
    pub fn obj(fields: Vec<(&'static str, Val)>) -> Val {
        Val::Obj(fields)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Val::Null => out.push_str("null"),
            Val::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Val::UInt(n) => out.push_str(&n.to_string()),
            Val::Int(n) => out.push_str(&n.to_string()),
            Val::Float(v) => out.push_str(&fmt_g(*v)),
            Val::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Val::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Val::Obj(fields) => {
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('"');
                    out.push_str(key);
                    out.push_str("\":");
                    value.write(out);
                }
                out.push('}');
            }
        }
    }

    /// Key,value rows for record-shaped output in CSV mode. Nested arrays
    /// and objects are flattened with dotted, indexed keys.
    pub fn to_csv_pairs(&self) -> String {
        fn scalar(v: &Val) -> Option<String> {
            match v {
                Val::Null => Some(String::new()),
                Val::Bool(b) => Some(b.to_string()),
                Val::UInt(n) => Some(n.to_string()),
                Val::Int(n) => Some(n.to_string()),
                Val::Float(f) => Some(fmt_g(*f)),
                Val::Str(s) => Some(s.clone()),
                _ => None,
            }
        }
        fn walk(prefix: &str, v: &Val, rows: &mut Vec<(String, String)>) {
            if let Some(s) = scalar(v) {
                rows.push((prefix.to_string(), s));
                return;
            }
            match v {
                Val::Arr(items) => {
                    for (i, item) in items.iter().enumerate() {
                        walk(&format!("{prefix}.{i}"), item, rows);
                    }
                }
                Val::Obj(fields) => {
                    for (key, value) in fields {
                        let path = if prefix.is_empty() {
                            (*key).to_string()
                        } else {
                            format!("{prefix}.{key}")
                        };
                        walk(&path, value, rows);
                    }
                }
                _ => unreachable!(),
            }
        }
        let mut rows = Vec::new();
        walk("", self, &mut rows);
        let mut out = String::from("key,value\n");
        for (k, v) in rows {
            out.push_str(&k);
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

/// Cell in a CSV table.
pub enum Cell {
    UInt(u64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::UInt(n) => n.to_string(),
            Cell::Float(v) => fmt_g(*v),
        }
    }
}

/// Renders a CSV table: header row, `\n` line endings, no trailing comma.
pub fn csv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// A CSV table as a JSON object of parallel arrays.
pub fn table_to_json(header: &[&'static str], rows: &[Vec<Cell>]) -> Val {
    let fields = header
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let column: Vec<Val> = rows
                .iter()
                .map(|row| match row[i] {
                    Cell::UInt(n) => Val::UInt(n),
                    Cell::Float(v) => Val::Float(v),
                })
                .collect();
            (*name, Val::Arr(column))
        })
        .collect();
    Val::Obj(fields)
}
