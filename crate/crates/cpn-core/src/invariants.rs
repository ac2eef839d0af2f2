//! The commuting family built from the two bivector fields.
//!
//! At a point of the open cell, `f_j` is the top-degree ratio of
//! `bruhat^j ^ symplectic^(n-j)` against `symplectic^n`; equivalently (up
//! to constants) the duality pairing of `bruhat^k` against the `k`-th
//! wedge power of the symplectic form. Expanding the triangular `Theta`
//! structure shows
//!
//! ```text
//! f_j (ratio form)   =  e_j(c) / C(n, j)
//! f_j (pairing form) = (j!)^2 e_j(c)
//! ```
//!
//! with `e_j` the elementary symmetric polynomials in the prefix sums
//! `c`. The constants are not hard-coded anywhere in the verification
//! path: [`verify_elementary_theorem`] measures them across points,
//! checks they are point-independent, and compares against the binomial
//! hypothesis.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::charts::MomentumAnglePoint;
use crate::exterior::{binomial, pair, top_ratio, ExteriorError, MultiForm, MultiVector};
use crate::linalg::Mat;
use crate::math;
use crate::poisson::{x_axis, phi_axis, BivectorField, PoissonPencil, PoissonStructure};
use crate::scalar::ScalarField;
use crate::DEFAULT_EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub enum InvariantsError {
    /// A per-`k` ratio that must be point-independent spread out too far.
    NonconstantRatio { k: usize, spread: f64, tol: f64 },
    /// Need at least two sample points to measure constancy.
    NotEnoughPoints,
    Exterior(ExteriorError),
}

impl fmt::Display for InvariantsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantsError::NonconstantRatio { k, spread, tol } => write!(
                f,
                "ratio e_{k}/f_{k} is not point-independent: spread {spread:.3e} > {tol:.3e}"
            ),
            InvariantsError::NotEnoughPoints => write!(f, "need at least two sample points"),
            InvariantsError::Exterior(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for InvariantsError {}

impl From<ExteriorError> for InvariantsError {
    fn from(e: ExteriorError) -> Self {
        InvariantsError::Exterior(e)
    }
}

/// `e_1..e_n` by the per-element update `e_k += c_i * e_{k-1}`.
pub fn elementary_symmetric(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &ci) in c.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += ci * e[k - 1];
        }
    }
    e.remove(0);
    e
}

/// Power sums `p_1..p_kmax` of the entries of `c`.
pub fn power_sums(c: &[f64], kmax: usize) -> Vec<f64> {
    (1..=kmax)
        .map(|k| c.iter().map(|&ci| math::powi(ci, k)).sum())
        .collect()
}

/// Gradient of `e_k(c)` with respect to `c`: entry `l` is `e_{k-1}` of `c`
/// with `c_l` removed.
pub fn elementary_gradient_in_c(c: &[f64], k: usize) -> Vec<f64> {
    let n = c.len();
    let mut g = Vec::with_capacity(n);
    for l in 0..n {
        let reduced: Vec<f64> = c
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| (i != l).then_some(v))
            .collect();
        if k == 1 {
            g.push(1.0);
        } else {
            let e = elementary_symmetric(&reduced);
            g.push(e[k - 2]);
        }
    }
    g
}

/// Chain rule from `c` to `x`: `d/dx_i = sum_{l >= i} d/dc_l`.
pub fn c_gradient_to_x(grad_c: &[f64]) -> Vec<f64> {
    let n = grad_c.len();
    let mut out = vec![0.0; n];
    let mut tail = 0.0;
    for i in (0..n).rev() {
        tail += grad_c[i];
        out[i] = tail;
    }
    out
}

/// The wedge powers of both bivectors at a point, reused by the two
/// family evaluations.
fn bivector_powers(
    at: &MomentumAnglePoint,
) -> Result<(Vec<MultiVector>, Vec<MultiVector>), ExteriorError> {
    let n = at.n();
    let pi_inf = BivectorField::bruhat(n).as_bivector(at);
    let pi_s = BivectorField::symplectic(n).as_bivector(at);
    let mut inf_pows = Vec::with_capacity(n + 1);
    let mut s_pows = Vec::with_capacity(n + 1);
    inf_pows.push(MultiVector::scalar(2 * n, 1.0)?);
    s_pows.push(MultiVector::scalar(2 * n, 1.0)?);
    for k in 1..=n {
        inf_pows.push(inf_pows[k - 1].wedge(&pi_inf)?);
        s_pows.push(s_pows[k - 1].wedge(&pi_s)?);
    }
    Ok((inf_pows, s_pows))
}

/// `f_1..f_n` by top-degree division of wedge powers.
pub fn family_via_ratio(at: &MomentumAnglePoint) -> Result<Vec<f64>, ExteriorError> {
    let n = at.n();
    let (inf_pows, s_pows) = bivector_powers(at)?;
    let denominator = &s_pows[n];
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let numerator = inf_pows[j].wedge(&s_pows[n - j])?;
        out.push(top_ratio(&numerator, denominator, DEFAULT_EPSILON)?);
    }
    Ok(out)
}

/// `f_1..f_n` by duality pairing against wedge powers of the symplectic
/// form.
pub fn family_via_pairing(at: &MomentumAnglePoint) -> Result<Vec<f64>, ExteriorError> {
    let n = at.n();
    let (inf_pows, _) = bivector_powers(at)?;
    let mut omega = MultiForm::zero(2 * n, 2)?;
    for i in 0..n {
        omega.set_coeff(&[x_axis(i), phi_axis(i)], 1.0)?;
    }
    let mut out = Vec::with_capacity(n);
    let mut omega_pow = MultiForm::scalar(2 * n, 1.0)?;
    for k in 1..=n {
        omega_pow = omega_pow.wedge(&omega)?;
        out.push(pair(&inf_pows[k], &omega_pow)?);
    }
    Ok(out)
}

/// The invariant family evaluated at one point, together with the
/// constants relating the ratio values to `e_k(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantFamily {
    pub n: usize,
    /// `f_1..f_n` in the ratio normalization.
    pub values: Vec<f64>,
    /// Per-`k` measured constant `e_k(c) / f_k`.
    pub normalization: Vec<f64>,
}

impl InvariantFamily {
    pub fn evaluate(at: &MomentumAnglePoint) -> Result<Self, ExteriorError> {
        let values = family_via_ratio(at)?;
        let e = elementary_symmetric(&at.c());
        let normalization = e
            .iter()
            .zip(values.iter())
            .map(|(ek, fk)| ek / fk)
            .collect();
        Ok(InvariantFamily {
            n: at.n(),
            values,
            normalization,
        })
    }
}

/// Report of the elementary-polynomial identification.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ElementaryTheoremReport {
    pub n: usize,
    /// Measured per-`k` constants `e_k(c) / f_k` (ratio form), averaged.
    pub constants: Vec<f64>,
    /// Largest relative deviation of each constant across the points.
    pub spread: Vec<f64>,
    /// Measured constants relating the pairing form to the ratio form.
    pub pairing_constants: Vec<f64>,
    /// Whether `constants[k-1]` agrees with `C(n, k)` to the tolerance.
    pub binomial_hypothesis: bool,
}

/// Measure the constants `e_k(c)/f_k` across sample points and check they
/// are point-independent to `tol` (relative spread).
pub fn verify_elementary_theorem(
    points: &[MomentumAnglePoint],
    tol: f64,
) -> Result<ElementaryTheoremReport, InvariantsError> {
    if points.len() < 2 {
        return Err(InvariantsError::NotEnoughPoints);
    }
    let n = points[0].n();
    let mut ratio_consts = vec![Vec::with_capacity(points.len()); n];
    let mut pairing_consts = vec![Vec::with_capacity(points.len()); n];
    for at in points {
        let f_ratio = family_via_ratio(at)?;
        let f_pair = family_via_pairing(at)?;
        let e = elementary_symmetric(&at.c());
        for k in 0..n {
            ratio_consts[k].push(e[k] / f_ratio[k]);
            pairing_consts[k].push(f_pair[k] / f_ratio[k]);
        }
    }
    let mut constants = Vec::with_capacity(n);
    let mut spread = Vec::with_capacity(n);
    for (k, vals) in ratio_consts.iter().enumerate() {
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        let dev = vals
            .iter()
            .fold(0.0_f64, |m, v| m.max(math::abs(v - mean) / math::abs(mean)));
        if dev > tol {
            return Err(InvariantsError::NonconstantRatio {
                k: k + 1,
                spread: dev,
                tol,
            });
        }
        constants.push(mean);
        spread.push(dev);
    }
    let pairing_constants: Vec<f64> = pairing_consts
        .iter()
        .map(|vals| vals.iter().sum::<f64>() / vals.len() as f64)
        .collect();
    let binomial_hypothesis = constants
        .iter()
        .enumerate()
        .all(|(k, cst)| math::abs(cst - binomial(n, k + 1) as f64) <= 1e-6 * binomial(n, k + 1) as f64);
    Ok(ElementaryTheoremReport {
        n,
        constants,
        spread,
        pairing_constants,
        binomial_hypothesis,
    })
}

/// Closed-form invariant `f_k = e_k(c) / C(n,k)` as a scalar field with
/// analytic gradient; this is the smooth route used by bracket tests, kept
/// deliberately independent of the wedge-power route.
pub fn invariant_field(n: usize, k: usize) -> ScalarField {
    assert!(k >= 1 && k <= n);
    let scale = 1.0 / binomial(n, k) as f64;
    ScalarField::torus_invariant(alloc::format!("f_{k}"), n, move |x: &[f64]| {
        let c = crate::charts::c_from_x(x);
        elementary_symmetric(&c)[k - 1] * scale
    })
    .with_gradient(move |x: &[f64]| {
        let c = crate::charts::c_from_x(x);
        let gc: Vec<f64> = elementary_gradient_in_c(&c, k)
            .into_iter()
            .map(|g| g * scale)
            .collect();
        c_gradient_to_x(&gc)
    })
}

/// `e_k(c)` as a scalar field with analytic gradient.
pub fn elementary_field(n: usize, k: usize) -> ScalarField {
    assert!(k >= 1 && k <= n);
    ScalarField::torus_invariant(alloc::format!("e_{k}"), n, move |x: &[f64]| {
        elementary_symmetric(&crate::charts::c_from_x(x))[k - 1]
    })
    .with_gradient(move |x: &[f64]| {
        let c = crate::charts::c_from_x(x);
        c_gradient_to_x(&elementary_gradient_in_c(&c, k))
    })
}

/// `p_k(c) = c_1^k + ... + c_n^k` as a scalar field with analytic gradient.
pub fn power_sum_field(n: usize, k: usize) -> ScalarField {
    assert!(k >= 1);
    ScalarField::torus_invariant(alloc::format!("p_{k}"), n, move |x: &[f64]| {
        crate::charts::c_from_x(x)
            .iter()
            .map(|&ci| math::powi(ci, k))
            .sum()
    })
    .with_gradient(move |x: &[f64]| {
        let c = crate::charts::c_from_x(x);
        let gc: Vec<f64> = c.iter().map(|&ci| k as f64 * math::powi(ci, k - 1)).collect();
        c_gradient_to_x(&gc)
    })
}

/// `c_1 + ... + c_n = n x_1 + (n-1) x_2 + ... + x_n`; the weighted linear
/// Hamiltonian whose angle frequencies are the consecutive integers.
pub fn elementary_sum_field(n: usize) -> ScalarField {
    let weights: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
    crate::scalar::linear_x("e-sum", weights)
}

/// `x_1 + ... + x_n = c_n`; the degenerate seed.
pub fn x_sum_field(n: usize) -> ScalarField {
    crate::scalar::linear_x("x-sum", vec![1.0; n])
}

/// Involution sweep summary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvolutionReport {
    pub n: usize,
    /// Largest `|{f_i, f_j}|` under the symplectic structure.
    pub max_bracket_s: f64,
    /// Largest `|{f_i, f_j}|` under the Bruhat structure.
    pub max_bracket_b: f64,
    /// Largest `|{f_i, f_j}|` under the sampled pencil members.
    pub max_bracket_pencil: f64,
}

/// Max `|{f_i, f_j}|` over points, pairs, both structures and the given
/// pencil parameters, with the family evaluated in its smooth closed form.
pub fn involution_report(
    points: &[MomentumAnglePoint],
    pencil_params: &[(f64, f64)],
) -> InvolutionReport {
    assert!(!points.is_empty());
    let n = points[0].n();
    let fields: Vec<ScalarField> = (1..=n).map(|k| invariant_field(n, k)).collect();
    let pi_s = BivectorField::symplectic(n);
    let pi_inf = BivectorField::bruhat(n);
    let pencils: Vec<PoissonPencil> = pencil_params
        .iter()
        .map(|&(a, b)| PoissonPencil::standard(n, a, b).expect("nonzero parameters"))
        .collect();
    let mut max_s: f64 = 0.0;
    let mut max_b: f64 = 0.0;
    let mut max_p: f64 = 0.0;
    for at in points {
        for i in 0..n {
            for j in (i + 1)..n {
                let bs = crate::poisson::bracket(&fields[i], &fields[j], &pi_s, at);
                let bb = crate::poisson::bracket(&fields[i], &fields[j], &pi_inf, at);
                max_s = max_s.max(math::abs(bs));
                max_b = max_b.max(math::abs(bb));
                for pencil in &pencils {
                    let bp = crate::poisson::bracket(&fields[i], &fields[j], pencil, at);
                    max_p = max_p.max(math::abs(bp));
                }
            }
        }
    }
    InvolutionReport {
        n,
        max_bracket_s: max_s,
        max_bracket_b: max_b,
        max_bracket_pencil: max_p,
    }
}

/// The intertwining endomorphism `N = bruhat . flat(omega)` of the tangent
/// space, in the chart basis.
///
/// Block-diagonal over the `x`- and `phi`-sectors with the triangular
/// `Theta` matrix and its transpose, so its spectrum is the `c_i`, each
/// twice; traces of powers are twice the power sums of `c`.
pub fn recursion_operator(at: &MomentumAnglePoint) -> Mat {
    let n = at.n();
    let p = BivectorField::bruhat(n).coeff(at);
    let omega = BivectorField::symplectic(n).coeff(at);
    p.matmul(&omega.transpose())
}

/// `tr(N^0), ..., tr(N^kmax)`.
pub fn traces_of_powers(n_mat: &Mat, kmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(n_mat.size() as f64);
    let mut acc = Mat::identity(n_mat.size());
    for _ in 1..=kmax {
        acc = acc.matmul(n_mat);
        out.push(acc.trace());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::PointSampler;
    use crate::DEFAULT_FD_STEP;
    use approx::assert_abs_diff_eq;

    #[test]
    fn elementary_symmetric_examples() {
        assert_eq!(elementary_symmetric(&[1.0, 1.0, 1.0]), vec![3.0, 3.0, 1.0]);
        let e = elementary_symmetric(&[0.8, 0.5]);
        assert_abs_diff_eq!(e[0], 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1], 0.4, epsilon = 1e-15);
        let c = [0.9, 0.7, 0.4, 0.2];
        let e = elementary_symmetric(&c);
        assert_abs_diff_eq!(e[3], c.iter().product::<f64>(), epsilon = 1e-15);
    }

    #[test]
    fn ratio_family_at_known_points() {
        let p = MomentumAnglePoint::new(vec![0.4], vec![0.0]).unwrap();
        let f = family_via_ratio(&p).unwrap();
        assert_abs_diff_eq!(f[0], 0.4, epsilon = 1e-14);

        let p = MomentumAnglePoint::from_c(&[0.8, 0.5], vec![0.0, 0.0]).unwrap();
        let f = family_via_ratio(&p).unwrap();
        assert_abs_diff_eq!(f[0], 0.65, epsilon = 1e-14);
        assert_abs_diff_eq!(f[1], 0.40, epsilon = 1e-14);
    }

    #[test]
    fn ratio_family_at_cell_center_is_all_ones() {
        for n in 1..=4 {
            let mut x = vec![0.0; n];
            x[0] = 1.0;
            let p = MomentumAnglePoint::new(x, vec![0.0; n]).unwrap();
            for (k, fk) in family_via_ratio(&p).unwrap().into_iter().enumerate() {
                assert_abs_diff_eq!(fk, 1.0, epsilon = 1e-12);
                let _ = k;
            }
        }
    }

    #[test]
    fn pairing_family_matches_ratio_for_n1() {
        let p = MomentumAnglePoint::new(vec![0.37], vec![0.0]).unwrap();
        let r = family_via_ratio(&p).unwrap();
        let q = family_via_pairing(&p).unwrap();
        assert_abs_diff_eq!(r[0], q[0], epsilon = 1e-14);
    }

    #[test]
    fn pairing_to_ratio_constants_are_squared_factorials() {
        // measured across points: f_pair / f_ratio = (k!)^2 C(n,k)
        let mut sampler = PointSampler::new(3, 5, 0.05).unwrap();
        let points: Vec<_> = (0..20).map(|_| sampler.next_point()).collect();
        let report = verify_elementary_theorem(&points, 1e-9).unwrap();
        let expected = [
            1.0 * binomial(3, 1) as f64,
            4.0 * binomial(3, 2) as f64,
            36.0 * binomial(3, 3) as f64,
        ];
        for (measured, want) in report.pairing_constants.iter().zip(expected) {
            assert_abs_diff_eq!(*measured, want, epsilon = 1e-9 * want);
        }
    }

    #[test]
    fn theorem_constants_are_binomial() {
        for n in 1..=4 {
            let mut sampler = PointSampler::new(n, 17, 0.05).unwrap();
            let points: Vec<_> = (0..50).map(|_| sampler.next_point()).collect();
            let report = verify_elementary_theorem(&points, 1e-9).unwrap();
            assert!(report.binomial_hypothesis, "n = {n}: {report:?}");
            for (k, cst) in report.constants.iter().enumerate() {
                assert_abs_diff_eq!(
                    *cst,
                    binomial(n, k + 1) as f64,
                    epsilon = 1e-9 * binomial(n, k + 1) as f64
                );
            }
            for dev in report.spread {
                assert!(dev < 1e-9);
            }
        }
    }

    #[test]
    fn closed_form_field_matches_wedge_route() {
        let mut sampler = PointSampler::new(4, 23, 0.05).unwrap();
        for _ in 0..10 {
            let p = sampler.next_point();
            let via_wedge = family_via_ratio(&p).unwrap();
            for k in 1..=4 {
                let f = invariant_field(4, k);
                assert_abs_diff_eq!(f.eval(&p), via_wedge[k - 1], epsilon = 1e-12);
                assert!(f.gradient_consistency(&p, DEFAULT_FD_STEP) < 1e-6);
            }
        }
    }

    #[test]
    fn first_invariant_is_weighted_momentum_sum() {
        // f_1 = (n x_1 + (n-1) x_2 + ... + x_n) / n, a positive multiple
        let n = 3;
        let mut sampler = PointSampler::new(n, 2, 0.05).unwrap();
        let weighted = elementary_sum_field(n);
        for _ in 0..10 {
            let p = sampler.next_point();
            let f1 = family_via_ratio(&p).unwrap()[0];
            assert_abs_diff_eq!(f1, weighted.eval(&p) / n as f64, epsilon = 1e-13);
        }
    }

    #[test]
    fn involution_is_tight() {
        let mut sampler = PointSampler::new(3, 9, 0.05).unwrap();
        let points: Vec<_> = (0..100).map(|_| sampler.next_point()).collect();
        let report = involution_report(&points, &[(1.0, 1.0)]);
        assert!(report.max_bracket_s < 1e-7);
        assert!(report.max_bracket_b < 1e-7);
        assert!(report.max_bracket_pencil < 1e-7);
    }

    #[test]
    fn single_function_family_is_trivially_involutive() {
        let p = MomentumAnglePoint::new(vec![0.4], vec![0.2]).unwrap();
        let report = involution_report(&[p], &[(2.0, 3.0)]);
        assert_eq!(report.max_bracket_s, 0.0);
        assert_eq!(report.max_bracket_b, 0.0);
    }

    #[test]
    fn recursion_operator_n1_is_scalar() {
        let p = MomentumAnglePoint::new(vec![0.4], vec![0.0]).unwrap();
        let n_mat = recursion_operator(&p);
        assert_abs_diff_eq!(n_mat.get(0, 0), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(n_mat.get(1, 1), 0.4, epsilon = 1e-15);
        assert_eq!(n_mat.get(0, 1), 0.0);
        assert_eq!(n_mat.get(1, 0), 0.0);
    }

    #[test]
    fn traces_of_powers_are_doubled_power_sums() {
        let mut sampler = PointSampler::new(3, 31, 0.05).unwrap();
        for _ in 0..10 {
            let p = sampler.next_point();
            let n_mat = recursion_operator(&p);
            let traces = traces_of_powers(&n_mat, 4);
            assert_eq!(traces[0], 6.0);
            let ps = power_sums(&p.c(), 4);
            for k in 1..=4 {
                assert_abs_diff_eq!(traces[k], 2.0 * ps[k - 1], epsilon = 1e-12);
            }
        }
    }
}
