//! Bivector fields on the open cell and the Poisson calculus built on them.
//!
//! The chart axes are ordered `(x_1, phi_1, x_2, phi_2, ..., x_n, phi_n)`.
//! Two structures are provided:
//!
//! * the invariant symplectic bivector, coefficient `+1` on every
//!   `(x_i, phi_i)` slot, dual to `omega = sum dx_i ^ dphi_i`;
//! * the Bruhat bivector `sum_i Theta_i ^ d/dphi_i` with
//!   `Theta_i = (x_1 + ... + x_i) d/dx_i + sum_{j>i} x_j d/dx_j`,
//!   whose coefficients are linear in `x` and carry an exact Jacobian.
//!
//! Sign conventions are anchored by `{x_1, phi_1} = +1` and by the
//! Hamiltonian field of `x_1` under the symplectic structure being
//! `+d/dphi_1`; concretely `X_f^v = sum_u (d_u f) P^{uv}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::charts::MomentumAnglePoint;
use crate::exterior::MultiVector;
use crate::linalg::Mat;
use crate::scalar::{fd_gradient, ScalarField};
use crate::DEFAULT_FD_STEP;

/// Chart axis of `x_{i+1}` (0-based `i`).
#[inline]
pub fn x_axis(i: usize) -> usize {
    2 * i
}

/// Chart axis of `phi_{i+1}` (0-based `i`).
#[inline]
pub fn phi_axis(i: usize) -> usize {
    2 * i + 1
}

/// Grade-3 value of the Schouten bracket at a point.
pub type TrivectorValue = MultiVector;

/// Errors from the Poisson layer.
#[derive(Debug, Clone, PartialEq)]
pub enum PoissonError {
    DimensionMismatch { left: usize, right: usize },
    /// Both pencil parameters vanish.
    DegeneratePencil,
}

impl fmt::Display for PoissonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoissonError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: n = {left} vs {right}")
            }
            PoissonError::DegeneratePencil => write!(f, "pencil parameters (0, 0) are degenerate"),
        }
    }
}

impl core::error::Error for PoissonError {}

/// A bivector field given by its antisymmetric coefficient matrix in the
/// chart basis, evaluated pointwise.
pub trait PoissonStructure {
    /// Complex dimension `n`; matrices are `2n x 2n`.
    fn n(&self) -> usize;

    /// Coefficient matrix at a point.
    fn coeff(&self, p: &MomentumAnglePoint) -> Mat;

    /// Partial derivatives of the coefficient matrix along every chart
    /// axis; the default falls back to central differences of [`coeff`].
    ///
    /// [`coeff`]: PoissonStructure::coeff
    fn coeff_partials(&self, p: &MomentumAnglePoint, h: f64) -> Vec<Mat> {
        let dim = 2 * self.n();
        let mut out = Vec::with_capacity(dim);
        for axis in 0..dim {
            let shifted = |delta: f64| {
                let mut x = p.x().to_vec();
                let mut phi = p.phi().to_vec();
                if axis % 2 == 0 {
                    x[axis / 2] += delta;
                } else {
                    phi[axis / 2] += delta;
                }
                MomentumAnglePoint::new_unchecked(x, phi)
            };
            let plus = self.coeff(&shifted(h));
            let minus = self.coeff(&shifted(-h));
            out.push(plus.sub(&minus).scale(1.0 / (2.0 * h)));
        }
        out
    }

    fn has_analytic_partials(&self) -> bool {
        false
    }

    /// Coefficients repackaged as a grade-2 multivector.
    fn as_bivector(&self, p: &MomentumAnglePoint) -> MultiVector {
        matrix_to_bivector(&self.coeff(p))
    }
}

/// Antisymmetric matrix (entries on `u < v`) to a grade-2 multivector.
pub fn matrix_to_bivector(m: &Mat) -> MultiVector {
    let dim = m.size();
    let mut out = MultiVector::zero(dim, 2).expect("grade 2 fits");
    for u in 0..dim {
        for v in (u + 1)..dim {
            let val = m.get(u, v);
            if val != 0.0 {
                out.set_coeff(&[u, v], val).expect("valid slot");
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Symplectic,
    Bruhat,
}

/// One of the two canonical bivector fields on the cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivectorField {
    n: usize,
    kind: Kind,
}

impl BivectorField {
    /// The invariant symplectic bivector; point-independent.
    pub fn symplectic(n: usize) -> Self {
        assert!(n >= 1, "need n >= 1");
        BivectorField {
            n,
            kind: Kind::Symplectic,
        }
    }

    /// The Bruhat bivector in momentum-angle form.
    pub fn bruhat(n: usize) -> Self {
        assert!(n >= 1, "need n >= 1");
        BivectorField {
            n,
            kind: Kind::Bruhat,
        }
    }

    pub fn is_symplectic(&self) -> bool {
        self.kind == Kind::Symplectic
    }

    /// Coefficient matrix evaluated on a raw momentum vector.
    ///
    /// The formulas are polynomial in `x`, so this extends to the closed
    /// simplex and beyond; useful at cell-boundary limits where no valid
    /// point exists.
    pub fn coeff_at_x(&self, x: &[f64]) -> Mat {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        let mut m = Mat::zeros(2 * n);
        match self.kind {
            Kind::Symplectic => {
                for i in 0..n {
                    m.set(x_axis(i), phi_axis(i), 1.0);
                    m.set(phi_axis(i), x_axis(i), -1.0);
                }
            }
            Kind::Bruhat => {
                let mut c = 0.0;
                for i in 0..n {
                    c += x[i];
                    // Theta_i = c_i d/dx_i + sum_{a>i} x_a d/dx_a
                    m.set(x_axis(i), phi_axis(i), c);
                    m.set(phi_axis(i), x_axis(i), -c);
                    for a in (i + 1)..n {
                        m.set(x_axis(a), phi_axis(i), x[a]);
                        m.set(phi_axis(i), x_axis(a), -x[a]);
                    }
                }
            }
        }
        m
    }
}

impl PoissonStructure for BivectorField {
    fn n(&self) -> usize {
        self.n
    }

    fn coeff(&self, p: &MomentumAnglePoint) -> Mat {
        self.coeff_at_x(p.x())
    }

    fn coeff_partials(&self, _p: &MomentumAnglePoint, _h: f64) -> Vec<Mat> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n);
        for axis in 0..2 * n {
            let mut d = Mat::zeros(2 * n);
            if self.kind == Kind::Bruhat && axis % 2 == 0 {
                let l = axis / 2;
                // d c_i / d x_l = [l <= i], d x_a / d x_l = [a == l]
                for i in 0..n {
                    if l <= i {
                        d.set(x_axis(i), phi_axis(i), 1.0);
                        d.set(phi_axis(i), x_axis(i), -1.0);
                    }
                    if l > i {
                        d.set(x_axis(l), phi_axis(i), 1.0);
                        d.set(phi_axis(i), x_axis(l), -1.0);
                    }
                }
            }
            out.push(d);
        }
        out
    }

    fn has_analytic_partials(&self) -> bool {
        true
    }
}

/// Linear combination `alpha * first + beta * second` of two bivector
/// fields; every member of the pencil spanned by the canonical pair is
/// again Poisson.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonPencil {
    pub alpha: f64,
    pub beta: f64,
    first: BivectorField,
    second: BivectorField,
}

impl PoissonPencil {
    pub fn new(
        alpha: f64,
        first: BivectorField,
        beta: f64,
        second: BivectorField,
    ) -> Result<Self, PoissonError> {
        if alpha == 0.0 && beta == 0.0 {
            return Err(PoissonError::DegeneratePencil);
        }
        if first.n != second.n {
            return Err(PoissonError::DimensionMismatch {
                left: first.n,
                right: second.n,
            });
        }
        Ok(PoissonPencil {
            alpha,
            beta,
            first,
            second,
        })
    }

    /// The standard pencil `alpha * bruhat + beta * symplectic`.
    pub fn standard(n: usize, alpha: f64, beta: f64) -> Result<Self, PoissonError> {
        PoissonPencil::new(
            alpha,
            BivectorField::bruhat(n),
            beta,
            BivectorField::symplectic(n),
        )
    }
}

impl PoissonStructure for PoissonPencil {
    fn n(&self) -> usize {
        self.first.n
    }

    fn coeff(&self, p: &MomentumAnglePoint) -> Mat {
        self.first
            .coeff(p)
            .scale(self.alpha)
            .add(&self.second.coeff(p).scale(self.beta))
    }

    fn coeff_partials(&self, p: &MomentumAnglePoint, h: f64) -> Vec<Mat> {
        let da = self.first.coeff_partials(p, h);
        let db = self.second.coeff_partials(p, h);
        da.into_iter()
            .zip(db)
            .map(|(a, b)| a.scale(self.alpha).add(&b.scale(self.beta)))
            .collect()
    }

    fn has_analytic_partials(&self) -> bool {
        true
    }
}

/// The Bruhat coefficient matrix reconstructed through the radial-log
/// chart, machine-checking the substitution chain behind the closed form.
///
/// The point is pushed through affine, Lu and `q` coordinates; the prefix
/// sums are recovered as `c_k = exp(-(q_1 + ... + q_k))` and the
/// action-angle form of the Bruhat bivector in `(q, phi)` is pushed
/// forward with `dx_a/dq_i`. The orientation of the action-angle form is
/// the one induced by the complex Lu formula, i.e.
/// `sum_i dphi_i ^ dq_i` in this chart's ordering; it reproduces the
/// `Theta` coefficient matrix exactly.
pub fn bruhat_coeff_via_q_chart(p: &MomentumAnglePoint) -> Mat {
    let n = p.n();
    let affine = crate::charts::affine_from_momentum(p);
    let q = crate::charts::q_from_lu(&crate::charts::lu_from_affine(&affine));
    let mut partial = 0.0;
    let c: Vec<f64> = q
        .q()
        .iter()
        .map(|qi| {
            partial += qi;
            crate::math::exp(-partial)
        })
        .collect();
    // dx_a/dq_i = (c_{a-1} - c_a) for i < a, -c_a for i = a, 0 for i > a
    let mut m = Mat::zeros(2 * n);
    for i in 0..n {
        for a in 0..n {
            let dx_dq = if i < a {
                let prev = if a == 0 { 1.0 } else { c[a - 1] };
                prev - c[a]
            } else if i == a {
                -c[a]
            } else {
                0.0
            };
            if dx_dq != 0.0 {
                // slot (x_a, phi_i) carries -dx_a/dq_i
                m.set(x_axis(a), phi_axis(i), -dx_dq);
                m.set(phi_axis(i), x_axis(a), dx_dq);
            }
        }
    }
    m
}

/// Poisson bracket `{f, g} = sum_{u,v} P^{uv} d_u f d_v g`.
pub fn bracket(
    f: &ScalarField,
    g: &ScalarField,
    p: &dyn PoissonStructure,
    at: &MomentumAnglePoint,
) -> f64 {
    bracket_with_step(f, g, p, at, DEFAULT_FD_STEP)
}

pub fn bracket_with_step(
    f: &ScalarField,
    g: &ScalarField,
    p: &dyn PoissonStructure,
    at: &MomentumAnglePoint,
    h: f64,
) -> f64 {
    let m = p.coeff(at);
    let df = f.gradient(at, h);
    let dg = g.gradient(at, h);
    contract_bracket(&m, &df, &dg)
}

fn contract_bracket(m: &Mat, df: &[f64], dg: &[f64]) -> f64 {
    let dim = m.size();
    let mut acc = 0.0;
    for u in 0..dim {
        if df[u] == 0.0 {
            continue;
        }
        for v in 0..dim {
            let c = m.get(u, v);
            if c != 0.0 {
                acc += df[u] * c * dg[v];
            }
        }
    }
    acc
}

/// Hamiltonian vector field `X_f^v = sum_u (d_u f) P^{uv}`.
///
/// With the symplectic structure and `f = x_1` this is `+d/dphi_1`.
pub fn hamiltonian_vector_field(
    f: &ScalarField,
    p: &dyn PoissonStructure,
    at: &MomentumAnglePoint,
) -> Vec<f64> {
    hamiltonian_vector_field_with_step(f, p, at, DEFAULT_FD_STEP)
}

pub fn hamiltonian_vector_field_with_step(
    f: &ScalarField,
    p: &dyn PoissonStructure,
    at: &MomentumAnglePoint,
    h: f64,
) -> Vec<f64> {
    let m = p.coeff(at);
    let df = f.gradient(at, h);
    apply_gradient(&m, &df)
}

pub(crate) fn apply_gradient(m: &Mat, df: &[f64]) -> Vec<f64> {
    let dim = m.size();
    let mut out = vec![0.0; dim];
    for u in 0..dim {
        if df[u] == 0.0 {
            continue;
        }
        for v in 0..dim {
            out[v] += df[u] * m.get(u, v);
        }
    }
    out
}

/// Schouten bracket of two bivector fields at a point.
///
/// Componentwise, for `i < j < k`,
///
/// ```text
/// [P,Q]^{ijk} = sum_l ( P^{li} d_l Q^{jk} + P^{lj} d_l Q^{ki} + P^{lk} d_l Q^{ij}
///                     + Q^{li} d_l P^{jk} + Q^{lj} d_l P^{ki} + Q^{lk} d_l P^{ij} )
/// ```
///
/// Only the vanishing of the result is load-bearing; the normalization is
/// fixed by this formula so independent implementations can cross-check.
pub fn schouten_bracket(
    p: &dyn PoissonStructure,
    q: &dyn PoissonStructure,
    at: &MomentumAnglePoint,
) -> Result<TrivectorValue, PoissonError> {
    schouten_bracket_with_step(p, q, at, DEFAULT_FD_STEP)
}

pub fn schouten_bracket_with_step(
    p: &dyn PoissonStructure,
    q: &dyn PoissonStructure,
    at: &MomentumAnglePoint,
    h: f64,
) -> Result<TrivectorValue, PoissonError> {
    if p.n() != q.n() {
        return Err(PoissonError::DimensionMismatch {
            left: p.n(),
            right: q.n(),
        });
    }
    let dim = 2 * p.n();
    let pm = p.coeff(at);
    let qm = q.coeff(at);
    let dp = p.coeff_partials(at, h);
    let dq = q.coeff_partials(at, h);
    let mut out = MultiVector::zero(dim, 3).expect("grade 3 fits");
    for i in 0..dim {
        for j in (i + 1)..dim {
            for k in (j + 1)..dim {
                let mut acc = 0.0;
                for l in 0..dim {
                    acc += pm.get(l, i) * dq[l].get(j, k)
                        + pm.get(l, j) * dq[l].get(k, i)
                        + pm.get(l, k) * dq[l].get(i, j)
                        + qm.get(l, i) * dp[l].get(j, k)
                        + qm.get(l, j) * dp[l].get(k, i)
                        + qm.get(l, k) * dp[l].get(i, j);
                }
                if acc != 0.0 {
                    out.set_coeff(&[i, j, k], acc).expect("valid slot");
                }
            }
        }
    }
    Ok(out)
}

/// Cyclic sum `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}` under one structure;
/// an independent pointwise check that the structure is Poisson.
pub fn jacobiator(
    p: &dyn PoissonStructure,
    f: &ScalarField,
    g: &ScalarField,
    k: &ScalarField,
    at: &MomentumAnglePoint,
) -> f64 {
    jacobiator_with_step(p, f, g, k, at, DEFAULT_FD_STEP)
}

pub fn jacobiator_with_step(
    p: &dyn PoissonStructure,
    f: &ScalarField,
    g: &ScalarField,
    k: &ScalarField,
    at: &MomentumAnglePoint,
    h: f64,
) -> f64 {
    let term = |a: &ScalarField, b: &ScalarField, c: &ScalarField| {
        // {a, {b, c}} with the inner bracket differentiated numerically
        let inner = |q: &MomentumAnglePoint| bracket_with_step(b, c, p, q, h);
        let d_inner = fd_gradient(inner, at, h);
        let da = a.gradient(at, h);
        contract_bracket(&p.coeff(at), &da, &d_inner)
    };
    term(f, g, k) + term(g, k, f) + term(k, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::PointSampler;
    use crate::scalar::{coordinate_phi, coordinate_x, linear_x};
    use approx::assert_abs_diff_eq;

    fn point2() -> MomentumAnglePoint {
        MomentumAnglePoint::new(vec![0.8, -0.3], vec![0.4, 1.1]).unwrap()
    }

    #[test]
    fn symplectic_slots() {
        let pi_s = BivectorField::symplectic(3);
        let p = MomentumAnglePoint::new(vec![0.7, -0.2, -0.1], vec![0.0; 3]).unwrap();
        let m = pi_s.coeff(&p);
        for i in 0..3 {
            assert_eq!(m.get(x_axis(i), phi_axis(i)), 1.0);
        }
        // everything else vanishes
        let mut nonzero = 0;
        for u in 0..6 {
            for v in 0..6 {
                if m.get(u, v) != 0.0 {
                    nonzero += 1;
                }
            }
        }
        assert_eq!(nonzero, 6);

        let pi_s1 = BivectorField::symplectic(1);
        let p1 = MomentumAnglePoint::new(vec![0.4], vec![0.0]).unwrap();
        assert_eq!(pi_s1.coeff(&p1).get(0, 1), 1.0);
    }

    #[test]
    fn canonical_bracket_relations() {
        let pi_s = BivectorField::symplectic(2);
        let p = point2();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                // the angle coordinate has no analytic gradient, so the
                // finite-difference path carries ~1e-12 relative rounding
                let b = bracket(&coordinate_x(2, i), &coordinate_phi(2, j), &pi_s, &p);
                assert_abs_diff_eq!(b, expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn bruhat_slots_by_direct_substitution() {
        // n = 2 at x = (0.8, -0.3): (x1,phi1) = c_1, (x2,phi1) = x_2,
        // (x2,phi2) = c_2, (x1,phi2) = 0
        let pi_inf = BivectorField::bruhat(2);
        let m = pi_inf.coeff(&point2());
        assert_abs_diff_eq!(m.get(x_axis(0), phi_axis(0)), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(x_axis(1), phi_axis(0)), -0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(x_axis(1), phi_axis(1)), 0.5, epsilon = 1e-15);
        assert_eq!(m.get(x_axis(0), phi_axis(1)), 0.0);
        assert_eq!(m.antisymmetry_defect(), 0.0);

        let pi_inf1 = BivectorField::bruhat(1);
        let p1 = MomentumAnglePoint::new(vec![0.4], vec![0.0]).unwrap();
        assert_abs_diff_eq!(pi_inf1.coeff(&p1).get(0, 1), 0.4);
        let b = bracket(&coordinate_x(1, 0), &coordinate_phi(1, 0), &pi_inf1, &p1);
        assert_abs_diff_eq!(b, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn bruhat_rank_at_simplex_vertices() {
        // at the c-vertex (1, 0, ..., 0) (i.e. x = (1, -1, 0, ...)) only the
        // first angle column survives: rank 2
        let pi_inf = BivectorField::bruhat(3);
        let m = pi_inf.coeff_at_x(&[1.0, -1.0, 0.0]);
        assert_eq!(m.rank(1e-12), 2);
        // at the cell center x = (1, 0, ..., 0) all c_i = 1: full rank
        let m = pi_inf.coeff_at_x(&[1.0, 0.0, 0.0]);
        assert_eq!(m.rank(1e-12), 6);
    }

    #[test]
    fn hamiltonian_field_sign_anchor() {
        let pi_s = BivectorField::symplectic(2);
        let p = point2();
        let v = hamiltonian_vector_field(&coordinate_x(2, 0), &pi_s, &p);
        assert_eq!(v, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn weighted_linear_flow_is_constant_integers() {
        let n = 3;
        let weights: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
        let f = linear_x("weighted", weights);
        let pi_s = BivectorField::symplectic(n);
        let p = MomentumAnglePoint::new(vec![0.7, -0.2, -0.1], vec![0.0; 3]).unwrap();
        let v = hamiltonian_vector_field(&f, &pi_s, &p);
        for i in 0..n {
            assert_eq!(v[x_axis(i)], 0.0);
            assert_abs_diff_eq!(v[phi_axis(i)], (n - i) as f64);
        }
    }

    #[test]
    fn bruhat_field_of_weighted_sum_matches_theta_action() {
        // f = c_1 + c_2 = 2 x_1 + x_2; angle components (2c_1 + x_2, c_2)
        let f = linear_x("c-sum", vec![2.0, 1.0]);
        let pi_inf = BivectorField::bruhat(2);
        let p = point2();
        let v = hamiltonian_vector_field(&f, &pi_inf, &p);
        assert_abs_diff_eq!(v[phi_axis(0)], 2.0 * 0.8 - 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(v[phi_axis(1)], 0.5, epsilon = 1e-14);
        assert_eq!(v[x_axis(0)], 0.0);
        assert_eq!(v[x_axis(1)], 0.0);
    }

    #[test]
    fn bracket_of_field_with_itself_vanishes() {
        let f = linear_x("probe", vec![1.3, -0.7]);
        let p = point2();
        for alpha_beta in [(1.0, 0.0), (0.0, 1.0), (2.0, -1.0)] {
            let pencil = PoissonPencil::standard(2, alpha_beta.0, alpha_beta.1).unwrap();
            assert_eq!(bracket(&f, &f, &pencil, &p), 0.0);
        }
    }

    #[test]
    fn pencil_combines_members() {
        let p = point2();
        let pi_s = BivectorField::symplectic(2);
        let pi_inf = BivectorField::bruhat(2);
        let pencil = PoissonPencil::standard(2, 1.0, 1.0).unwrap();
        let sum = pi_inf.coeff(&p).add(&pi_s.coeff(&p));
        assert_eq!(pencil.coeff(&p), sum);
        assert_eq!(pencil.coeff(&p).antisymmetry_defect(), 0.0);

        let only_inf = PoissonPencil::standard(2, 1.0, 0.0).unwrap();
        assert_eq!(only_inf.coeff(&p), pi_inf.coeff(&p));
        let only_s = PoissonPencil::standard(2, 0.0, 1.0).unwrap();
        assert_eq!(only_s.coeff(&p), pi_s.coeff(&p));

        assert!(matches!(
            PoissonPencil::standard(2, 0.0, 0.0),
            Err(PoissonError::DegeneratePencil)
        ));
    }

    #[test]
    fn analytic_jacobian_matches_central_differences() {
        let pi_inf = BivectorField::bruhat(3);
        let mut sampler = PointSampler::new(3, 11, 0.05).unwrap();
        for _ in 0..10 {
            let p = sampler.next_point();
            let analytic = pi_inf.coeff_partials(&p, DEFAULT_FD_STEP);
            // finite differences through the trait's default path
            struct FdOnly(BivectorField);
            impl PoissonStructure for FdOnly {
                fn n(&self) -> usize {
                    self.0.n()
                }
                fn coeff(&self, p: &MomentumAnglePoint) -> Mat {
                    self.0.coeff(p)
                }
            }
            let fd = FdOnly(pi_inf.clone()).coeff_partials(&p, DEFAULT_FD_STEP);
            for (a, b) in analytic.iter().zip(fd.iter()) {
                assert!(a.sub(b).max_abs() < 1e-6);
            }
        }
    }

    #[test]
    fn q_chart_route_reproduces_the_closed_form() {
        for n in 1..=4 {
            let mut sampler = PointSampler::new(n, 19, 0.05).unwrap();
            let pi_inf = BivectorField::bruhat(n);
            for _ in 0..20 {
                let p = sampler.next_point();
                let direct = pi_inf.coeff(&p);
                let via_q = bruhat_coeff_via_q_chart(&p);
                assert!(
                    direct.sub(&via_q).max_abs() < 1e-12,
                    "n = {n}: q-route disagrees by {}",
                    direct.sub(&via_q).max_abs()
                );
            }
        }
    }

    #[test]
    fn schouten_of_constant_structure_is_exactly_zero() {
        let pi_s = BivectorField::symplectic(2);
        let s = schouten_bracket(&pi_s, &pi_s, &point2()).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn structures_are_compatible_at_a_point() {
        let pi_s = BivectorField::symplectic(2);
        let pi_inf = BivectorField::bruhat(2);
        let p = point2();
        let s = schouten_bracket(&pi_inf, &pi_s, &p).unwrap();
        assert!(s.max_abs() < 1e-12);
        let s = schouten_bracket(&pi_inf, &pi_inf, &p).unwrap();
        assert!(s.max_abs() < 1e-12);
    }

    #[test]
    fn jacobiator_of_coordinates() {
        let p = point2();
        let x1 = coordinate_x(2, 0);
        let phi1 = coordinate_phi(2, 0);
        let x2 = coordinate_x(2, 1);
        let pi_s = BivectorField::symplectic(2);
        assert_abs_diff_eq!(jacobiator(&pi_s, &x1, &phi1, &x2, &p), 0.0, epsilon = 1e-10);
        let pi_inf = BivectorField::bruhat(2);
        assert!(crate::math::abs(jacobiator(&pi_inf, &x1, &phi1, &x2, &p)) < 1e-7);
        let pencil = PoissonPencil::standard(2, 2.0, -1.0).unwrap();
        assert!(crate::math::abs(jacobiator(&pencil, &x1, &phi1, &x2, &p)) < 1e-7);
    }
}
