//! Deterministic machine-readable output.
//!
//! Every float is printed with exactly 12 significant digits and fields
//! keep a fixed order, so identical configs yield byte-identical output.
//! JSON carries the schema tag `"hc3/1"`; CSV uses a header row, commas
//! and LF line endings.

/// 12 significant digits, scientific; valid as a JSON number.
pub fn sig12(x: f64) -> String {
    // Normalize the sign of zero so byte-identical runs do not depend
    // on how a vanishing coefficient was produced.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Print a line to stdout; a closed pipe ends the program quietly.
fn emit(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("hc3: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Minimal JSON value with insertion-ordered objects and pre-formatted
/// numbers.
pub enum Json {
    Num(f64),
    Int(i64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn schema_obj(fields: Vec<(&'static str, Json)>) -> Json {
        let mut all = vec![("schema", Json::Str("hc3/1".into()))];
        all.extend(fields);
        Json::Obj(all)
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Num(x) => out.push_str(&sig12(*x)),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('"');
                    out.push_str(k);
                    out.push_str("\":");
                    v.write(out);
                }
                out.push('}');
            }
        }
    }

    pub fn print(&self) {
        let mut s = String::new();
        self.write(&mut s);
        emit(&s);
    }
}

/// CSV table with a fixed header; cells are already formatted.
pub struct Csv {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn print(&self) {
        emit(&self.header.join(","));
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.header.len());
            emit(&row.join(","));
        }
    }
}
