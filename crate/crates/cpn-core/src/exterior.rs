//! Pointwise dense exterior algebra over a `2n`-dimensional (co)tangent
//! space.
//!
//! A grade-`k` element is stored as one coefficient per strictly increasing
//! `k`-tuple of axis indices; with the top dimension capped at 16 the
//! largest coefficient block is `C(16,8) = 12870`, so everything is dense
//! and allocation-free beyond a single `Vec`. Basis subsets are bitmasks
//! enumerated in colexicographic order, which coincides with numeric order
//! of the masks.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Largest supported tangent-space dimension (`2n` with `n <= 8`).
pub const MAX_DIM: usize = 16;

const fn binom_table() -> [[usize; MAX_DIM + 1]; MAX_DIM + 1] {
    let mut t = [[0usize; MAX_DIM + 1]; MAX_DIM + 1];
    let mut i = 0;
    while i <= MAX_DIM {
        t[i][0] = 1;
        let mut j = 1;
        while j <= i {
            t[i][j] = t[i - 1][j - 1] + if j <= i - 1 { t[i - 1][j] } else { 0 };
            j += 1;
        }
        i += 1;
    }
    t
}

static BINOM: [[usize; MAX_DIM + 1]; MAX_DIM + 1] = binom_table();

/// `C(n, k)` for `n <= 16`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        0
    } else {
        BINOM[n][k]
    }
}

/// Colexicographic rank of a `k`-subset bitmask among all `k`-subsets.
#[inline]
fn colex_rank(mask: u32) -> usize {
    let mut rank = 0;
    let mut rest = mask;
    let mut t = 1;
    while rest != 0 {
        let b = rest.trailing_zeros() as usize;
        rank += binomial(b, t);
        t += 1;
        rest &= rest - 1;
    }
    rank
}

/// Iterate the `k`-subset masks of `{0..dim}` in colex (= numeric) order.
fn for_each_subset(dim: usize, k: usize, mut f: impl FnMut(usize, u32)) {
    if k == 0 {
        f(0, 0);
        return;
    }
    let count = binomial(dim, k);
    let mut mask: u32 = (1 << k) - 1;
    for idx in 0..count {
        f(idx, mask);
        if idx + 1 < count {
            // Gosper's hack: next bitmask with the same popcount
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
}

/// Parity sign of concatenating sorted index tuple `a` before sorted `b`.
#[inline]
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        inversions += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Errors from the exterior algebra kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum ExteriorError {
    /// Operands live over tangent spaces of different dimension.
    DimensionMismatch { left: usize, right: usize },
    /// Operands must have equal grade (pairing, addition).
    GradeMismatch { left: usize, right: usize },
    /// The requested grade exceeds the dimension.
    GradeOverflow { dim: usize, grade: usize },
    /// Axis list is not a strictly increasing tuple in range.
    InvalidAxes,
    /// Operand is not of top grade where one is required.
    NotTopGrade { dim: usize, grade: usize },
    /// Top-degree division by a coefficient below the epsilon guard.
    DegenerateDenominator { denominator: f64 },
    /// Dimension exceeds [`MAX_DIM`].
    DimensionTooLarge { dim: usize },
}

impl fmt::Display for ExteriorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExteriorError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            ExteriorError::GradeMismatch { left, right } => {
                write!(f, "grade mismatch: {left} vs {right}")
            }
            ExteriorError::GradeOverflow { dim, grade } => {
                write!(f, "grade {grade} overflows dimension {dim}")
            }
            ExteriorError::InvalidAxes => write!(f, "axes must be strictly increasing and in range"),
            ExteriorError::NotTopGrade { dim, grade } => {
                write!(f, "expected top grade {dim}, got {grade}")
            }
            ExteriorError::DegenerateDenominator { denominator } => {
                write!(f, "top-degree denominator {denominator:.3e} below epsilon")
            }
            ExteriorError::DimensionTooLarge { dim } => {
                write!(f, "dimension {dim} exceeds supported maximum {MAX_DIM}")
            }
        }
    }
}

impl core::error::Error for ExteriorError {}

fn check_shape(dim: usize, grade: usize) -> Result<(), ExteriorError> {
    if dim > MAX_DIM {
        return Err(ExteriorError::DimensionTooLarge { dim });
    }
    if grade > dim {
        return Err(ExteriorError::GradeOverflow { dim, grade });
    }
    Ok(())
}

fn axes_to_mask(dim: usize, axes: &[usize]) -> Result<u32, ExteriorError> {
    let mut mask = 0u32;
    let mut prev: Option<usize> = None;
    for &a in axes {
        if a >= dim || prev.is_some_and(|p| a <= p) {
            return Err(ExteriorError::InvalidAxes);
        }
        mask |= 1 << a;
        prev = Some(a);
    }
    Ok(mask)
}

fn wedge_raw(
    dim: usize,
    ga: usize,
    ca: &[f64],
    gb: usize,
    cb: &[f64],
) -> Result<(usize, Vec<f64>), ExteriorError> {
    let grade = ga + gb;
    check_shape(dim, grade)?;
    let mut out = vec![0.0; binomial(dim, grade)];
    // collect (mask, coeff) once per operand so the double loop is cheap
    let mut masks_b = Vec::with_capacity(cb.len());
    for_each_subset(dim, gb, |j, mask| masks_b.push((mask, cb[j])));
    for_each_subset(dim, ga, |i, mask_a| {
        let va = ca[i];
        if va == 0.0 {
            return;
        }
        for &(mask_b, vb) in &masks_b {
            if vb == 0.0 || mask_a & mask_b != 0 {
                continue;
            }
            let sign = merge_sign(mask_a, mask_b);
            out[colex_rank(mask_a | mask_b)] += sign * va * vb;
        }
    });
    Ok((grade, out))
}

macro_rules! alternating_tensor {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            dim: usize,
            grade: usize,
            coeffs: Vec<f64>,
        }

        impl $name {
            /// Zero element of the given grade.
            pub fn zero(dim: usize, grade: usize) -> Result<Self, ExteriorError> {
                check_shape(dim, grade)?;
                Ok(Self {
                    dim,
                    grade,
                    coeffs: vec![0.0; binomial(dim, grade)],
                })
            }

            /// Grade-0 element with the given value.
            pub fn scalar(dim: usize, value: f64) -> Result<Self, ExteriorError> {
                check_shape(dim, 0)?;
                Ok(Self {
                    dim,
                    grade: 0,
                    coeffs: vec![value],
                })
            }

            /// Unit decomposable element on a strictly increasing axis tuple.
            pub fn basis(dim: usize, axes: &[usize]) -> Result<Self, ExteriorError> {
                let mut out = Self::zero(dim, axes.len())?;
                let mask = axes_to_mask(dim, axes)?;
                out.coeffs[colex_rank(mask)] = 1.0;
                Ok(out)
            }

            /// Build from a full coefficient slice in colex slot order.
            pub fn from_coeffs(
                dim: usize,
                grade: usize,
                coeffs: Vec<f64>,
            ) -> Result<Self, ExteriorError> {
                check_shape(dim, grade)?;
                if coeffs.len() != binomial(dim, grade) {
                    return Err(ExteriorError::InvalidAxes);
                }
                Ok(Self { dim, grade, coeffs })
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn grade(&self) -> usize {
                self.grade
            }

            /// Coefficients in colex slot order over all `C(dim, grade)` slots.
            pub fn coeffs(&self) -> &[f64] {
                &self.coeffs
            }

            /// Coefficient on a strictly increasing axis tuple.
            pub fn coeff(&self, axes: &[usize]) -> Result<f64, ExteriorError> {
                if axes.len() != self.grade {
                    return Err(ExteriorError::GradeMismatch {
                        left: self.grade,
                        right: axes.len(),
                    });
                }
                let mask = axes_to_mask(self.dim, axes)?;
                Ok(self.coeffs[colex_rank(mask)])
            }

            /// Overwrite the coefficient on a strictly increasing axis tuple.
            pub fn set_coeff(&mut self, axes: &[usize], value: f64) -> Result<(), ExteriorError> {
                if axes.len() != self.grade {
                    return Err(ExteriorError::GradeMismatch {
                        left: self.grade,
                        right: axes.len(),
                    });
                }
                let mask = axes_to_mask(self.dim, axes)?;
                self.coeffs[colex_rank(mask)] = value;
                Ok(())
            }

            pub fn scaled(&self, s: f64) -> Self {
                Self {
                    dim: self.dim,
                    grade: self.grade,
                    coeffs: self.coeffs.iter().map(|v| v * s).collect(),
                }
            }

            /// Componentwise sum; both operands must share dim and grade.
            pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
                if self.dim != other.dim {
                    return Err(ExteriorError::DimensionMismatch {
                        left: self.dim,
                        right: other.dim,
                    });
                }
                if self.grade != other.grade {
                    return Err(ExteriorError::GradeMismatch {
                        left: self.grade,
                        right: other.grade,
                    });
                }
                Ok(Self {
                    dim: self.dim,
                    grade: self.grade,
                    coeffs: self
                        .coeffs
                        .iter()
                        .zip(other.coeffs.iter())
                        .map(|(a, b)| a + b)
                        .collect(),
                })
            }

            /// Exterior product. Bilinear, signed by merge parity, zero on
            /// repeated axes.
            pub fn wedge(&self, other: &Self) -> Result<Self, ExteriorError> {
                if self.dim != other.dim {
                    return Err(ExteriorError::DimensionMismatch {
                        left: self.dim,
                        right: other.dim,
                    });
                }
                let (grade, coeffs) =
                    wedge_raw(self.dim, self.grade, &self.coeffs, other.grade, &other.coeffs)?;
                Ok(Self {
                    dim: self.dim,
                    grade,
                    coeffs,
                })
            }

            /// `k`-fold exterior power; `k = 0` is the unit scalar.
            pub fn wedge_power(&self, k: usize) -> Result<Self, ExteriorError> {
                check_shape(self.dim, k * self.grade)?;
                let mut acc = Self::scalar(self.dim, 1.0)?;
                for _ in 0..k {
                    acc = acc.wedge(self)?;
                }
                Ok(acc)
            }

            /// The single coefficient of a top-grade element.
            pub fn top_coeff(&self) -> Result<f64, ExteriorError> {
                if self.grade != self.dim {
                    return Err(ExteriorError::NotTopGrade {
                        dim: self.dim,
                        grade: self.grade,
                    });
                }
                Ok(self.coeffs[0])
            }

            pub fn max_abs(&self) -> f64 {
                self.coeffs.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
            }
        }
    };
}

alternating_tensor!(
    MultiVector,
    "Dense grade-`k` alternating contravariant tensor at a point."
);
alternating_tensor!(
    MultiForm,
    "Dense grade-`k` alternating covariant tensor at a point."
);

/// Ratio of two top-degree coefficients.
///
/// Fails with [`ExteriorError::DegenerateDenominator`] when the denominator
/// coefficient is not safely away from zero.
pub fn top_ratio(
    numerator: &MultiVector,
    denominator: &MultiVector,
    epsilon: f64,
) -> Result<f64, ExteriorError> {
    if numerator.dim() != denominator.dim() {
        return Err(ExteriorError::DimensionMismatch {
            left: numerator.dim(),
            right: denominator.dim(),
        });
    }
    let num = numerator.top_coeff()?;
    let den = denominator.top_coeff()?;
    if math::abs(den) <= epsilon {
        return Err(ExteriorError::DegenerateDenominator { denominator: den });
    }
    Ok(num / den)
}

/// Duality pairing on matching canonical slots: `<e_I, e^J> = delta_IJ`.
pub fn pair(vector: &MultiVector, form: &MultiForm) -> Result<f64, ExteriorError> {
    if vector.dim() != form.dim() {
        return Err(ExteriorError::DimensionMismatch {
            left: vector.dim(),
            right: form.dim(),
        });
    }
    if vector.grade() != form.grade() {
        return Err(ExteriorError::GradeMismatch {
            left: vector.grade(),
            right: form.grade(),
        });
    }
    Ok(vector
        .coeffs()
        .iter()
        .zip(form.coeffs().iter())
        .map(|(a, b)| a * b)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn e(axes: &[usize]) -> MultiVector {
        MultiVector::basis(4, axes).unwrap()
    }

    #[test]
    fn wedge_is_antisymmetric_on_vectors() {
        let a = e(&[0]).wedge(&e(&[1])).unwrap();
        assert_abs_diff_eq!(a.coeff(&[0, 1]).unwrap(), 1.0);
        let b = e(&[1]).wedge(&e(&[0])).unwrap();
        assert_abs_diff_eq!(b.coeff(&[0, 1]).unwrap(), -1.0);
    }

    #[test]
    fn wedge_kills_repeated_axes() {
        let a = e(&[0, 1]).wedge(&e(&[0, 2])).unwrap();
        assert_eq!(a.max_abs(), 0.0);
    }

    #[test]
    fn symplectic_square_is_twice_top() {
        // (e01 + e23)^2 = 2 e0123, expanding the square by hand
        let pi_s = e(&[0, 1]).add(&e(&[2, 3])).unwrap();
        let sq = pi_s.wedge(&pi_s).unwrap();
        assert_abs_diff_eq!(sq.top_coeff().unwrap(), 2.0);
    }

    #[test]
    fn symplectic_cube_is_factorial_top() {
        // n = 3: (sum of three commuting blocks)^3 = 3! * top
        let dim = 6;
        let mut pi = MultiVector::zero(dim, 2).unwrap();
        for i in 0..3 {
            pi.set_coeff(&[2 * i, 2 * i + 1], 1.0).unwrap();
        }
        let cube = pi.wedge_power(3).unwrap();
        assert_abs_diff_eq!(cube.top_coeff().unwrap(), 6.0);
    }

    #[test]
    fn bruhat_square_matches_hand_expansion() {
        // n = 2 at x = (0.8, -0.3): 0.8 e01 + 0.3 e12 + 0.5 e23,
        // square = 2 * 0.8 * 0.5 * e0123
        let mut pi = MultiVector::zero(4, 2).unwrap();
        pi.set_coeff(&[0, 1], 0.8).unwrap();
        pi.set_coeff(&[1, 2], 0.3).unwrap();
        pi.set_coeff(&[2, 3], 0.5).unwrap();
        let sq = pi.wedge_power(2).unwrap();
        assert_abs_diff_eq!(sq.top_coeff().unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn wedge_power_zero_is_unit() {
        let pi = e(&[0, 1]);
        let unit = pi.wedge_power(0).unwrap();
        assert_eq!(unit.grade(), 0);
        assert_abs_diff_eq!(unit.coeffs()[0], 1.0);
    }

    #[test]
    fn wedge_power_overflow_is_rejected() {
        let pi = e(&[0, 1]);
        assert!(matches!(
            pi.wedge_power(3),
            Err(ExteriorError::GradeOverflow { .. })
        ));
    }

    #[test]
    fn pairing_picks_matching_slots() {
        let v = e(&[0, 1]);
        let dual = MultiForm::basis(4, &[0, 1]).unwrap();
        let off = MultiForm::basis(4, &[0, 2]).unwrap();
        assert_abs_diff_eq!(pair(&v, &dual).unwrap(), 1.0);
        assert_abs_diff_eq!(pair(&v, &off).unwrap(), 0.0);
    }

    #[test]
    fn single_slot_pairing_multiplies_coefficients() {
        // n = 1 at x = 0.4: <0.4 e01, e^01> = 0.4
        let mut v = MultiVector::zero(2, 2).unwrap();
        v.set_coeff(&[0, 1], 0.4).unwrap();
        let w = MultiForm::basis(2, &[0, 1]).unwrap();
        assert_abs_diff_eq!(pair(&v, &w).unwrap(), 0.4);
    }

    #[test]
    fn top_ratio_basics() {
        let top3 = e(&[0, 1, 2, 3]).scaled(3.0);
        let top2 = e(&[0, 1, 2, 3]).scaled(2.0);
        let zero = e(&[0, 1, 2, 3]).scaled(0.0);
        assert_abs_diff_eq!(top_ratio(&top3, &top2, 1e-12).unwrap(), 1.5);
        assert_abs_diff_eq!(top_ratio(&zero, &top2, 1e-12).unwrap(), 0.0);
        assert!(matches!(
            top_ratio(&top2, &zero, 1e-12),
            Err(ExteriorError::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn top_ratio_of_mixed_pencil_terms() {
        // n = 2, c = (0.8, 0.5): (pi_inf ^ pi_s) / pi_s^2 = (c1 + c2) / 2
        let mut pi_inf = MultiVector::zero(4, 2).unwrap();
        pi_inf.set_coeff(&[0, 1], 0.8).unwrap();
        pi_inf.set_coeff(&[1, 2], 0.3).unwrap();
        pi_inf.set_coeff(&[2, 3], 0.5).unwrap();
        let pi_s = e(&[0, 1]).add(&e(&[2, 3])).unwrap();
        let num = pi_inf.wedge(&pi_s).unwrap();
        let den = pi_s.wedge_power(2).unwrap();
        assert_abs_diff_eq!(top_ratio(&num, &den, 1e-12).unwrap(), 0.65, epsilon = 1e-15);
    }

    #[test]
    fn grade_and_dim_mismatches_error() {
        let v = e(&[0, 1]);
        let other_dim = MultiVector::basis(6, &[0, 1]).unwrap();
        assert!(matches!(
            v.wedge(&other_dim),
            Err(ExteriorError::DimensionMismatch { .. })
        ));
        let f = MultiForm::basis(4, &[0]).unwrap();
        assert!(matches!(
            pair(&v, &f),
            Err(ExteriorError::GradeMismatch { .. })
        ));
    }
}
