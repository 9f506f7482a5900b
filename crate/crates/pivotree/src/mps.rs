//! MPS reader (fixed or free format, whitespace separated fields).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported MPS feature: {0}")]
    UnsupportedFeature(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> MpsError {
    MpsError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjSense {
    #[default]
    Min,
    Max,
}

impl fmt::Display for ObjSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Min => "min",
            Self::Max => "max",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub name: String,
    pub kind: RowKind,
    pub rhs: f64,
    pub range: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub cost: f64,
    pub lower: f64,
    pub upper: Option<f64>,
}

/// An LP as written in the file, before conversion to standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLP {
    pub name: String,
    pub sense: ObjSense,
    pub objective_name: String,
    /// Constant term of the objective (minus the RHS given on the
    /// objective row).
    pub objective_constant: f64,
    pub rows: Vec<RawRow>,
    pub columns: Vec<RawColumn>,
    /// `(row, column, value)`, row and column indices into the vectors
    /// above.
    pub entries: Vec<(usize, usize, f64)>,
}

impl RawLP {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }
}

impl FromStr for RawLP {
    type Err = MpsError;

    fn from_str(s: &str) -> Result<Self, MpsError> {
        parse_mps(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

enum RowRef {
    Objective,
    Ignored,
    Row(usize),
}

struct Parser {
    lp: RawLP,
    row_index: HashMap<String, RowRef>,
    column_index: HashMap<String, usize>,
    rhs_set: Option<String>,
    range_set: Option<String>,
    bound_set: Option<String>,
}

/// Parses MPS text. Only the first RHS, RANGES and BOUNDS set is read;
/// free rows after the first are ignored.
pub fn parse_mps(text: &str) -> Result<RawLP, MpsError> {
    let mut p = Parser {
        lp: RawLP {
            name: String::new(),
            sense: ObjSense::Min,
            objective_name: String::new(),
            objective_constant: 0.0,
            rows: Vec::new(),
            columns: Vec::new(),
            entries: Vec::new(),
        },
        row_index: HashMap::new(),
        column_index: HashMap::new(),
        rhs_set: None,
        range_set: None,
        bound_set: None,
    };
    let mut section = Section::None;
    let mut ended = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with([' ', '\t']) {
            let keyword = fields[0].to_ascii_uppercase();
            section = match keyword.as_str() {
                "NAME" => {
                    p.lp.name = fields.get(1..).map(|f| f.join(" ")).unwrap_or_default();
                    Section::None
                }
                "OBJSENSE" => {
                    if let Some(s) = fields.get(1) {
                        p.lp.sense = parse_sense(s, line)?;
                        Section::None
                    } else {
                        Section::ObjSense
                    }
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                "MAX" | "MIN" | "MAXIMIZE" | "MINIMIZE" if section == Section::ObjSense => {
                    p.lp.sense = parse_sense(&keyword, line)?;
                    Section::None
                }
                "QUADOBJ" | "QMATRIX" | "QSECTION" | "QCMATRIX" | "CSECTION" | "SOS"
                | "INDICATORS" => {
                    return Err(MpsError::UnsupportedFeature(format!("{keyword} section")))
                }
                other => return Err(parse_err(line, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::None => return Err(parse_err(line, "data line outside a section")),
            Section::ObjSense => {
                p.lp.sense = parse_sense(fields[0], line)?;
                section = Section::None;
            }
            Section::Rows => p.row(&fields, line)?,
            Section::Columns => p.column(&fields, line)?,
            Section::Rhs => p.rhs(&fields, line)?,
            Section::Ranges => p.range(&fields, line)?,
            Section::Bounds => p.bound(&fields, line)?,
        }
    }
    if !ended {
        return Err(parse_err(text.lines().count(), "missing ENDATA"));
    }
    if p.lp.objective_name.is_empty() {
        return Err(parse_err(0, "no objective (N) row"));
    }
    Ok(p.lp)
}

fn parse_sense(s: &str, line: usize) -> Result<ObjSense, MpsError> {
    match s.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" => Ok(ObjSense::Min),
        "MAX" | "MAXIMIZE" => Ok(ObjSense::Max),
        other => Err(parse_err(
            line,
            format!("unknown objective sense `{other}`"),
        )),
    }
}

fn number(s: &str, line: usize) -> Result<f64, MpsError> {
    let v: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{s}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("non-finite number `{s}`")))
    }
}

/// Splits `[set] name value [name value]` into its set name and pairs.
fn set_and_pairs<'a>(fields: &[&'a str]) -> (Option<&'a str>, Vec<(&'a str, &'a str)>) {
    let (set, rest) = if fields.len() % 2 == 1 {
        (Some(fields[0]), &fields[1..])
    } else {
        (None, fields)
    };
    (set, rest.chunks(2).map(|c| (c[0], c[1])).collect())
}

/// True if `set` belongs to the first set seen for this section.
fn first_set(slot: &mut Option<String>, set: Option<&str>) -> bool {
    let set = set.unwrap_or("");
    match slot {
        Some(s) => s == set,
        None => {
            *slot = Some(set.to_string());
            true
        }
    }
}

impl Parser {
    fn row_ref(&self, name: &str, line: usize) -> Result<&RowRef, MpsError> {
        self.row_index
            .get(name)
            .ok_or_else(|| parse_err(line, format!("unknown row `{name}`")))
    }

    fn row(&mut self, fields: &[&str], line: usize) -> Result<(), MpsError> {
        let [kind, name] = fields else {
            return Err(parse_err(line, "expected `<kind> <name>` in ROWS"));
        };
        if self.row_index.contains_key(*name) {
            return Err(parse_err(line, format!("duplicate row `{name}`")));
        }
        let kind = match kind.to_ascii_uppercase().as_str() {
            "N" => {
                let r = if self.lp.objective_name.is_empty() {
                    self.lp.objective_name = name.to_string();
                    RowRef::Objective
                } else {
                    RowRef::Ignored
                };
                self.row_index.insert(name.to_string(), r);
                return Ok(());
            }
            "L" => RowKind::Le,
            "G" => RowKind::Ge,
            "E" => RowKind::Eq,
            other => return Err(parse_err(line, format!("unknown row kind `{other}`"))),
        };
        self.row_index
            .insert(name.to_string(), RowRef::Row(self.lp.rows.len()));
        self.lp.rows.push(RawRow {
            name: name.to_string(),
            kind,
            rhs: 0.0,
            range: None,
        });
        Ok(())
    }

    fn column(&mut self, fields: &[&str], line: usize) -> Result<(), MpsError> {
        if fields
            .iter()
            .any(|f| f.trim_matches('\'').eq_ignore_ascii_case("MARKER"))
        {
            return Err(MpsError::UnsupportedFeature(
                "integer MARKER in COLUMNS".into(),
            ));
        }
        if fields.len() != 3 && fields.len() != 5 {
            return Err(parse_err(
                line,
                "expected `<column> <row> <value> [<row> <value>]`",
            ));
        }
        let name = fields[0];
        let col = match self.column_index.get(name) {
            Some(&c) => c,
            None => {
                let c = self.lp.columns.len();
                self.column_index.insert(name.to_string(), c);
                self.lp.columns.push(RawColumn {
                    name: name.to_string(),
                    cost: 0.0,
                    lower: 0.0,
                    upper: None,
                });
                c
            }
        };
        for pair in fields[1..].chunks(2) {
            let value = number(pair[1], line)?;
            match *self.row_ref(pair[0], line)? {
                RowRef::Objective => self.lp.columns[col].cost += value,
                RowRef::Ignored => {}
                RowRef::Row(r) => self.lp.entries.push((r, col, value)),
            }
        }
        Ok(())
    }

    fn rhs(&mut self, fields: &[&str], line: usize) -> Result<(), MpsError> {
        let (set, pairs) = set_and_pairs(fields);
        if pairs.is_empty() {
            return Err(parse_err(line, "expected `[<set>] <row> <value>` in RHS"));
        }
        if !first_set(&mut self.rhs_set, set) {
            return Ok(());
        }
        for (row, value) in pairs {
            let value = number(value, line)?;
            match *self.row_ref(row, line)? {
                RowRef::Objective => self.lp.objective_constant = -value,
                RowRef::Ignored => {}
                RowRef::Row(r) => self.lp.rows[r].rhs = value,
            }
        }
        Ok(())
    }

    fn range(&mut self, fields: &[&str], line: usize) -> Result<(), MpsError> {
        let (set, pairs) = set_and_pairs(fields);
        if pairs.is_empty() {
            return Err(parse_err(
                line,
                "expected `[<set>] <row> <value>` in RANGES",
            ));
        }
        if !first_set(&mut self.range_set, set) {
            return Ok(());
        }
        for (row, value) in pairs {
            let value = number(value, line)?;
            match *self.row_ref(row, line)? {
                RowRef::Row(r) => self.lp.rows[r].range = Some(value),
                _ => return Err(parse_err(line, format!("range on free row `{row}`"))),
            }
        }
        Ok(())
    }

    fn bound(&mut self, fields: &[&str], line: usize) -> Result<(), MpsError> {
        let kind = fields[0].to_ascii_uppercase();
        let needs_value = match kind.as_str() {
            "UP" | "LO" | "FX" => true,
            "PL" => false,
            "FR" | "MI" | "BV" | "LI" | "UI" | "SC" => {
                return Err(MpsError::UnsupportedFeature(format!("bound type {kind}")));
            }
            other => return Err(parse_err(line, format!("unknown bound type `{other}`"))),
        };
        let rest = &fields[1..];
        let (set, name, value) = match (needs_value, rest.len()) {
            (true, 3) => (Some(rest[0]), rest[1], Some(rest[2])),
            (true, 2) => (None, rest[0], Some(rest[1])),
            (false, 2) => (Some(rest[0]), rest[1], None),
            (false, 1) => (None, rest[0], None),
            _ => return Err(parse_err(line, "malformed BOUNDS line")),
        };
        if !first_set(&mut self.bound_set, set) {
            return Ok(());
        }
        let col = *self
            .column_index
            .get(name)
            .ok_or_else(|| parse_err(line, format!("unknown column `{name}`")))?;
        let value = value.map(|v| number(v, line)).transpose()?;
        let column = &mut self.lp.columns[col];
        match (kind.as_str(), value) {
            ("UP", Some(v)) => {
                if v < 0.0 && column.lower == 0.0 {
                    return Err(MpsError::UnsupportedFeature(format!(
                        "negative upper bound on `{name}` (implies a free lower bound)"
                    )));
                }
                column.upper = Some(v);
            }
            ("LO", Some(v)) => column.lower = v,
            ("FX", Some(v)) => {
                column.lower = v;
                column.upper = Some(v);
            }
            _ => column.upper = None,
        }
        Ok(())
    }
}
