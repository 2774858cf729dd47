use std::collections::BTreeMap;

use thiserror::Error;

use crate::densela::Matrix;

/// 0-based `(row, col)`.
pub type Position = (usize, usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("position ({}, {}) is outside a {rows}x{cols} matrix", .pos.0 + 1, .pos.1 + 1)]
    OutOfRange { pos: Position, rows: usize, cols: usize },
    #[error("position ({}, {}) is specified more than once", .0.0 + 1, .0.1 + 1)]
    DuplicateSpecified(Position),
    #[error("specified value at ({}, {}) is not finite", .0.0 + 1, .0.1 + 1)]
    NonFinite(Position),
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("position ({}, {}) is both specified and in class {class}", .pos.0 + 1, .pos.1 + 1)]
    ClassOverlapsSpecified { pos: Position, class: usize },
    #[error("position ({}, {}) appears in classes {first} and {second}", .pos.0 + 1, .pos.1 + 1)]
    ClassOverlap {
        pos: Position,
        first: usize,
        second: usize,
    },
    #[error("unspecified position ({}, {}) belongs to no class", .0.0 + 1, .0.1 + 1)]
    Uncovered(Position),
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
}

/// Specified entries plus variable classes covering every other position.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    specified: BTreeMap<Position, f64>,
    classes: Vec<Vec<Position>>,
}

impl Pattern {
    pub fn new(
        rows: usize,
        cols: usize,
        specified: Vec<(Position, f64)>,
        classes: Vec<Vec<Position>>,
    ) -> Result<Self, PatternError> {
        if rows == 0 || cols == 0 {
            return Err(PatternError::ZeroDimension { rows, cols });
        }
        let in_range = |pos: Position| {
            if pos.0 < rows && pos.1 < cols {
                Ok(())
            } else {
                Err(PatternError::OutOfRange { pos, rows, cols })
            }
        };

        let mut spec = BTreeMap::new();
        for (pos, v) in specified {
            in_range(pos)?;
            if !v.is_finite() {
                return Err(PatternError::NonFinite(pos));
            }
            if spec.insert(pos, v).is_some() {
                return Err(PatternError::DuplicateSpecified(pos));
            }
        }

        let mut owner: BTreeMap<Position, usize> = BTreeMap::new();
        for (c, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(PatternError::EmptyClass(c));
            }
            for &pos in class {
                in_range(pos)?;
                if spec.contains_key(&pos) {
                    return Err(PatternError::ClassOverlapsSpecified { pos, class: c });
                }
                if let Some(&first) = owner.get(&pos) {
                    return Err(PatternError::ClassOverlap {
                        pos,
                        first,
                        second: c,
                    });
                }
                owner.insert(pos, c);
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                if !spec.contains_key(&(i, j)) && !owner.contains_key(&(i, j)) {
                    return Err(PatternError::Uncovered((i, j)));
                }
            }
        }

        Ok(Self {
            rows,
            cols,
            specified: spec,
            classes,
        })
    }

    /// Pattern whose unknown positions are singleton classes in row-major order.
    pub fn untied(rows: usize, cols: usize, specified: Vec<(Position, f64)>) -> Result<Self, PatternError> {
        let fixed: std::collections::BTreeSet<Position> = specified.iter().map(|&(p, _)| p).collect();
        let classes = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .filter(|p| !fixed.contains(p))
            .map(|p| vec![p])
            .collect();
        Self::new(rows, cols, specified, classes)
    }

    /// Fully specified pattern from a matrix.
    pub fn from_matrix(m: &Matrix) -> Self {
        let specified = (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| ((i, j), m[(i, j)])))
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            specified,
            classes: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn specified(&self) -> &BTreeMap<Position, f64> {
        &self.specified
    }

    pub fn classes(&self) -> &[Vec<Position>] {
        &self.classes
    }

    /// Number of unknown scalars `k`.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Every class is a single position.
    pub fn is_untied(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// `(class index, position)` for every unknown position, class by class.
    pub fn unknown_positions(&self) -> impl Iterator<Item = (usize, Position)> + '_ {
        self.classes
            .iter()
            .enumerate()
            .flat_map(|(c, class)| class.iter().map(move |&p| (c, p)))
    }

    pub fn max_abs_specified(&self) -> f64 {
        self.specified.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Swap rows and columns; class order (and hence `x`) is preserved.
    pub fn transpose(&self) -> Pattern {
        Pattern {
            rows: self.cols,
            cols: self.rows,
            specified: self.specified.iter().map(|(&(i, j), &v)| ((j, i), v)).collect(),
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&(i, j)| (j, i)).collect())
                .collect(),
        }
    }

    /// Square, specified values symmetric, and every class either a
    /// diagonal singleton or a mirrored pair `{(i,j),(j,i)}`.
    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let values_mirror = self
            .specified
            .iter()
            .all(|(&(i, j), &v)| self.specified.get(&(j, i)) == Some(&v));
        let classes_mirror = self.classes.iter().all(|c| match c.as_slice() {
            [(i, j)] => i == j,
            [(a, b), (c, d)] => a == d && b == c && a != b,
            _ => false,
        });
        values_mirror && classes_mirror
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Square,
    Rectangular,
}

/// Transpose a tall pattern into the `rows <= cols` working orientation.
///
/// Returns the flag that must be used to transpose results back.
pub fn normalize_rect(pattern: &Pattern) -> (Pattern, bool) {
    if pattern.rows() > pattern.cols() {
        (pattern.transpose(), true)
    } else {
        (pattern.clone(), false)
    }
}

/// A pattern in working orientation together with the transposition flag.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMatrix {
    pattern: Pattern,
    transposed: bool,
}

impl PartialMatrix {
    pub fn new(pattern: Pattern) -> Self {
        let (pattern, transposed) = normalize_rect(&pattern);
        Self {
            pattern,
            transposed,
        }
    }

    /// Working-orientation pattern (`rows <= cols`).
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Pattern as originally supplied.
    pub fn original_pattern(&self) -> Pattern {
        if self.transposed {
            self.pattern.transpose()
        } else {
            self.pattern.clone()
        }
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    pub fn mode(&self) -> Mode {
        if self.pattern.rows() == self.pattern.cols() {
            Mode::Square
        } else {
            Mode::Rectangular
        }
    }

    pub fn k(&self) -> usize {
        self.pattern.class_count()
    }

    /// Map a working-orientation matrix back to the caller's orientation.
    pub fn to_original(&self, m: &Matrix) -> Matrix {
        if self.transposed {
            m.transpose()
        } else {
            m.clone()
        }
    }

    pub fn to_original_position(&self, (i, j): Position) -> Position {
        if self.transposed {
            (j, i)
        } else {
            (i, j)
        }
    }

    /// Default half-width of the multistart sampling box, `2(1 + max|σᵢⱼ|)`.
    pub fn default_start_range(&self) -> f64 {
        2.0 * (1.0 + self.pattern.max_abs_specified())
    }
}

/// Parses a decimal literal or an exact fraction `p/q` to the nearest double.
pub fn parse_scalar(text: &str) -> Result<f64, PatternError> {
    let bad = || PatternError::BadScalar(text.to_string());
    let t = text.trim();
    let value = match t.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| bad())?;
            let d: f64 = den.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            n / d
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}
