use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densela::Matrix;
use crate::partialmat::{parse_scalar, PartialMatrix, Pattern, PatternError, Position};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {context}: {message}")]
    Field {
        path: String,
        context: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Pattern {
        path: String,
        #[source]
        source: PatternError,
    },
}

/// A number or a `"p/q"` fraction, kept as written for the echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(serde_json::Number),
    Text(String),
}

impl Scalar {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            Self::Number(n) => n
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{n} is not a finite number")),
            Self::Text(t) => parse_scalar(t).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Square,
    Rectangular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecifiedEntry {
    pub i: usize,
    pub j: usize,
    pub v: Scalar,
}

/// On-disk partial matrix, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub specified: Vec<SpecifiedEntry>,
    /// Groups of tied positions; absent means every unspecified position
    /// is its own class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<[usize; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn syntax(path: &Path, e: serde_json::Error) -> InputError {
    InputError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl InputDocument {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        Self::parse(&read(path)?, path)
    }

    /// `origin` only labels error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| syntax(origin, e))
    }

    pub fn to_partial_matrix(&self, origin: &Path) -> Result<PartialMatrix, InputError> {
        let field = |context: String, message: String| InputError::Field {
            path: origin.display().to_string(),
            context,
            message,
        };
        let (rows, cols) = (self.rows, self.cols);
        if rows == 0 || cols == 0 {
            return Err(field("rows/cols".into(), format!("dimensions must be positive, got {rows}x{cols}")));
        }
        match self.mode {
            Some(ModeName::Square) if rows != cols => {
                return Err(field("mode".into(), format!("\"square\" but the matrix is {rows}x{cols}")))
            }
            Some(ModeName::Rectangular) if rows == cols => {
                return Err(field("mode".into(), format!("\"rectangular\" but the matrix is {rows}x{cols}")))
            }
            _ => {}
        }
        let position = |context: String, i: usize, j: usize| -> Result<Position, InputError> {
            if (1..=rows).contains(&i) && (1..=cols).contains(&j) {
                Ok((i - 1, j - 1))
            } else {
                Err(field(context, format!("position ({i}, {j}) outside {rows}x{cols}")))
            }
        };

        let mut seen: BTreeMap<Position, String> = BTreeMap::new();
        let mut specified = Vec::with_capacity(self.specified.len());
        for (n, e) in self.specified.iter().enumerate() {
            let ctx = format!("specified[{n}]");
            let pos = position(ctx.clone(), e.i, e.j)?;
            if let Some(first) = seen.get(&pos) {
                return Err(field(ctx, format!("position ({}, {}) already given at {first}", e.i, e.j)));
            }
            let v = e.v.value().map_err(|m| field(ctx.clone(), m))?;
            seen.insert(pos, ctx);
            specified.push((pos, v));
        }

        let pattern = match &self.classes {
            None => Pattern::untied(rows, cols, specified),
            Some(groups) => {
                let mut classes = Vec::with_capacity(groups.len());
                for (c, group) in groups.iter().enumerate() {
                    if group.is_empty() {
                        return Err(field(format!("classes[{c}]"), "empty class".into()));
                    }
                    let mut class = Vec::with_capacity(group.len());
                    for (m, &[i, j]) in group.iter().enumerate() {
                        let ctx = format!("classes[{c}][{m}]");
                        let pos = position(ctx.clone(), i, j)?;
                        if let Some(first) = seen.get(&pos) {
                            return Err(field(ctx, format!("position ({i}, {j}) already used at {first}")));
                        }
                        seen.insert(pos, ctx);
                        class.push(pos);
                    }
                    classes.push(class);
                }
                Pattern::new(rows, cols, specified, classes)
            }
        };
        pattern.map(PartialMatrix::new).map_err(|source| InputError::Pattern {
            path: origin.display().to_string(),
            source,
        })
    }
}

/// A dense right-hand side: a list of rows of numbers or fraction strings.
pub fn load_matrix(path: &Path) -> Result<Matrix, InputError> {
    let rows: Vec<Vec<Scalar>> = serde_json::from_str(&read(path)?).map_err(|e| syntax(path, e))?;
    let field = |context: String, message: String| InputError::Field {
        path: path.display().to_string(),
        context,
        message,
    };
    if rows.is_empty() || rows[0].is_empty() {
        return Err(field("matrix".into(), "must have at least one row and one column".into()));
    }
    let width = rows[0].len();
    let mut values = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(field(format!("[{r}]"), format!("has {} entries, expected {width}", row.len())));
        }
        let parsed = row
            .iter()
            .enumerate()
            .map(|(c, s)| s.value().map_err(|m| field(format!("[{r}][{c}]"), m)))
            .collect::<Result<Vec<f64>, _>>()?;
        values.push(parsed);
    }
    Ok(Matrix::from_rows(&values).expect("validated shape and values"))
}

/// Comma-separated unknowns, decimals or fractions.
pub fn parse_x(text: &str) -> Result<Vec<f64>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .enumerate()
        .map(|(n, t)| parse_scalar(t).map_err(|e| format!("--x entry {}: {e}", n + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> Result<PartialMatrix, InputError> {
        let origin = Path::new("in.json");
        InputDocument::parse(text, origin)?.to_partial_matrix(origin)
    }

    #[test]
    fn parses_fractions_and_classes() {
        let pm = build(
            r#"{"rows":2,"cols":2,"specified":[{"i":1,"j":1,"v":"1/4"},{"i":2,"j":2,"v":3}],
               "classes":[[[1,2],[2,1]]]}"#,
        )
        .unwrap();
        assert_eq!(pm.k(), 1);
        assert_eq!(pm.pattern().specified()[&(0, 0)], 0.25);
    }

    #[test]
    fn errors_name_the_offending_entry() {
        let err = build(r#"{"rows":2,"cols":2,"specified":[{"i":1,"j":1,"v":1},{"i":3,"j":1,"v":1}]}"#).unwrap_err();
        assert!(err.to_string().contains("specified[1]"), "{err}");
        let err = build(r#"{"rows":2,"cols":2,"specified":[{"i":1,"j":1,"v":1},{"i":1,"j":1,"v":2}]}"#).unwrap_err();
        assert!(err.to_string().contains("already given at specified[0]"), "{err}");
        let err = build(r#"{"rows":2,"cols":2,"specified":[{"i":1,"j":1,"v":"1/0"}]}"#).unwrap_err();
        assert!(err.to_string().contains("specified[0]"), "{err}");
        let err = build("{\"rows\":2,\n\"cols\":}").unwrap_err();
        assert!(err.to_string().starts_with("in.json:2:"), "{err}");
        let err = build(r#"{"rows":2,"cols":2,"classes":[[[1,1]],[[1,1],[2,2]]]}"#).unwrap_err();
        assert!(err.to_string().contains("classes[1][0]"), "{err}");
        let err = build(r#"{"rows":2,"cols":3,"mode":"square"}"#).unwrap_err();
        assert!(err.to_string().contains("mode"), "{err}");
    }

    #[test]
    fn echo_keeps_fraction_text() {
        let text = r#"{"rows":1,"cols":1,"specified":[{"i":1,"j":1,"v":"-16/929"}]}"#;
        let doc = InputDocument::parse(text, Path::new("x")).unwrap();
        assert_eq!(serde_json::to_string(&doc).unwrap(), text);
    }

    #[test]
    fn x_list() {
        assert_eq!(parse_x("-16/929").unwrap(), vec![-16.0 / 929.0]);
        assert_eq!(parse_x("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_x("1,,2").is_err());
        assert!(parse_x("").unwrap().is_empty());
    }
}
