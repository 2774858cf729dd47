use std::fmt;

use super::pattern::{Mode, PartialMatrix, Position};
use crate::densela::{lu_factor, Matrix};

/// Structural reasons why a square pattern can have no critical point.
#[derive(Debug, Clone, PartialEq)]
pub enum StructuralWarning {
    /// All unknowns share one row, so `det Σ(x)` is affine in `x`.
    SingleRow { row: usize },
    /// All unknowns share one column.
    SingleColumn { col: usize },
    /// The cofactor of a singleton class involves no unknown and is
    /// nonzero: `det Σ(x)` has constant nonzero slope in that unknown.
    ConstantSlope {
        class: usize,
        position: Position,
        slope: f64,
    },
}

impl fmt::Display for StructuralWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SingleRow { row } => write!(
                f,
                "all unknowns lie in row {}; the determinant is affine in them and has no critical point",
                row + 1
            ),
            Self::SingleColumn { col } => write!(
                f,
                "all unknowns lie in column {}; the determinant is affine in them and has no critical point",
                col + 1
            ),
            Self::ConstantSlope {
                class,
                position,
                slope,
            } => write!(
                f,
                "class {} at ({}, {}) has constant cofactor {slope:e}; the determinant has no critical point in it",
                class + 1,
                position.0 + 1,
                position.1 + 1
            ),
        }
    }
}

/// Non-fatal structural checks for square patterns.
///
/// Rectangular patterns and fully specified ones always come back clear.
pub fn structural_precheck(pm: &PartialMatrix) -> Vec<StructuralWarning> {
    let mut warnings = Vec::new();
    if pm.mode() != Mode::Square || pm.k() == 0 {
        return warnings;
    }
    let p = pm.pattern();
    let positions: Vec<Position> = p.unknown_positions().map(|(_, pos)| pos).collect();
    let first = positions[0];
    if positions.iter().all(|pos| pos.0 == first.0) {
        warnings.push(StructuralWarning::SingleRow { row: first.0 });
    } else if positions.iter().all(|pos| pos.1 == first.1) {
        warnings.push(StructuralWarning::SingleColumn { col: first.1 });
    }

    let n = p.rows();
    for (c, class) in p.classes().iter().enumerate() {
        let &[(i, j)] = class.as_slice() else {
            continue;
        };
        // the minor must be made of specified entries only
        if positions.iter().any(|&(a, b)| a != i && b != j) {
            continue;
        }
        let slope = if n == 1 {
            1.0
        } else {
            let minor = Matrix::from_fn(n - 1, n - 1, |r, s| {
                let rr = if r < i { r } else { r + 1 };
                let ss = if s < j { s } else { s + 1 };
                p.specified()[&(rr, ss)]
            });
            let lu = lu_factor(&minor).expect("minor is square");
            if lu.is_singular() {
                continue;
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * lu.det()
        };
        warnings.push(StructuralWarning::ConstantSlope {
            class: c,
            position: pm.to_original_position((i, j)),
            slope,
        });
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partialmat::Pattern;

    #[test]
    fn column_pattern_warns() {
        // [[1, x12], [3, x22]]
        let p = Pattern::untied(2, 2, vec![((0, 0), 1.0), ((1, 0), 3.0)]).unwrap();
        let w = structural_precheck(&PartialMatrix::new(p));
        assert!(w.contains(&StructuralWarning::SingleColumn { col: 1 }));
        // cofactor of (1,2) is -3, cofactor of (2,2) is 1
        assert!(w.contains(&StructuralWarning::ConstantSlope {
            class: 0,
            position: (0, 1),
            slope: -3.0
        }));
        assert!(w.contains(&StructuralWarning::ConstantSlope {
            class: 1,
            position: (1, 1),
            slope: 1.0
        }));
    }

    #[test]
    fn clear_cases() {
        let full = Pattern::from_matrix(&Matrix::identity(3));
        assert!(structural_precheck(&PartialMatrix::new(full)).is_empty());
        let spread = Pattern::untied(
            2,
            2,
            vec![((0, 0), 1.0), ((1, 1), 1.0)],
        )
        .unwrap();
        // each unknown's minor contains the other unknown
        assert!(structural_precheck(&PartialMatrix::new(spread)).is_empty());
    }

    #[test]
    fn vanishing_cofactor_is_not_reported() {
        // det [[2, x], [0, 3]] = 6 regardless of x
        let p = Pattern::untied(2, 2, vec![((0, 0), 2.0), ((1, 0), 0.0), ((1, 1), 3.0)]).unwrap();
        let w = structural_precheck(&PartialMatrix::new(p));
        assert_eq!(w, vec![StructuralWarning::SingleRow { row: 0 }]);
    }
}
