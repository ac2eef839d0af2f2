//! The Lenard step for torus-invariant Hamiltonians and the chains it
//! generates.
//!
//! Both bivector fields send `x`-gradients into angle directions, so for a
//! Hamiltonian `g(x)` the recursion `i_{dg} bruhat = i_{dg'} symplectic`
//! reduces to a closed condition on `x`-gradients: the next member must
//! have
//!
//! ```text
//! dg'/dx_i = alpha_i(x) = (x_1 + ... + x_i) dg/dx_i + sum_{j>i} x_j dg/dx_j
//! ```
//!
//! In prefix-sum coordinates this is simply `dg'/dc_k = c_k dg/dc_k`, so a
//! step succeeds exactly when the resulting one-form is closed. Members
//! are reconstructed by line-segment quadrature from a base point and keep
//! the one-form as their exact gradient.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::charts::MomentumAnglePoint;
use crate::linalg::{rank_from_singular_values, singular_values, EigenNoConvergence};
use crate::math;
use crate::poisson::{bracket, BivectorField};
use crate::scalar::ScalarField;
use crate::{DEFAULT_FD_STEP};

/// One-form on the momentum simplex, as a function of the raw `x` vector.
pub type OneForm = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum LenardError {
    /// The seed (or a member) depends on the angles.
    NotTorusInvariant { name: String },
    /// The one-form failed the closedness check; the chain obstructs here.
    NotClosed {
        step: usize,
        residual: f64,
        tol: f64,
    },
    /// Rank computation did not converge.
    Eigen(EigenNoConvergence),
    /// Chain construction needs at least one region sample.
    EmptyRegion,
}

impl fmt::Display for LenardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LenardError::NotTorusInvariant { name } => {
                write!(f, "field '{name}' is not torus-invariant")
            }
            LenardError::NotClosed {
                step,
                residual,
                tol,
            } => write!(
                f,
                "one-form at step {step} is not closed: residual {residual:.3e} > {tol:.3e}"
            ),
            LenardError::Eigen(e) => write!(f, "{e}"),
            LenardError::EmptyRegion => write!(f, "need at least one region sample"),
        }
    }
}

impl core::error::Error for LenardError {}

impl From<EigenNoConvergence> for LenardError {
    fn from(e: EigenNoConvergence) -> Self {
        LenardError::Eigen(e)
    }
}

/// The one-form `alpha_i = Theta_i g` that the next chain member must have
/// as its `x`-gradient, evaluated at one point.
pub fn lenard_oneform(g: &ScalarField, at: &MomentumAnglePoint) -> Result<Vec<f64>, LenardError> {
    if !g.is_torus_invariant() {
        return Err(LenardError::NotTorusInvariant {
            name: g.name().into(),
        });
    }
    let grad = g.gradient_x(at, DEFAULT_FD_STEP);
    Ok(theta_apply(at.x(), &grad))
}

/// `alpha_i = c_i grad_i + sum_{j>i} x_j grad_j` on a raw momentum vector.
pub(crate) fn theta_apply(x: &[f64], grad: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    // suffix sums of x_j grad_j
    let mut tail = 0.0;
    let mut c = 0.0;
    let prefix: Vec<f64> = x
        .iter()
        .map(|&xi| {
            c += xi;
            c
        })
        .collect();
    for i in (0..n).rev() {
        out[i] = prefix[i] * grad[i] + tail;
        tail += x[i] * grad[i];
    }
    out
}

/// Largest `|d alpha_i / dx_j - d alpha_j / dx_i|` by central differences
/// over the sample region.
pub fn closedness_residual(alpha: &OneForm, region: &[MomentumAnglePoint], h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for p in region {
        let x = p.x();
        let n = x.len();
        for j in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let ap = alpha(&xp);
            let am = alpha(&xm);
            for i in 0..n {
                if i == j {
                    continue;
                }
                // d alpha_i / dx_j, accumulated antisymmetrically below
                let d_ij = (ap[i] - am[i]) / (2.0 * h);
                let mut yp = x.to_vec();
                let mut ym = x.to_vec();
                yp[i] += h;
                ym[i] -= h;
                let bp = alpha(&yp);
                let bm = alpha(&ym);
                let d_ji = (bp[j] - bm[j]) / (2.0 * h);
                worst = worst.max(math::abs(d_ij - d_ji));
            }
        }
    }
    worst
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; points];
    let mut weights = vec![0.0; points];
    let m = (points + 1) / 2;
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut z = math::cos(core::f64::consts::PI * (i as f64 + 0.75) / (points as f64 + 0.5));
        loop {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..points {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            // p0 = P_n(z); derivative via the standard identity
            let dp = points as f64 * (z * p0 - p1) / (z * z - 1.0);
            let z_next = z - p0 / dp;
            if math::abs(z_next - z) < 1e-15 {
                z = z_next;
                let mut q0 = 1.0;
                let mut q1 = 0.0;
                for j in 0..points {
                    let q2 = q1;
                    q1 = q0;
                    q0 = ((2.0 * j as f64 + 1.0) * z * q1 - j as f64 * q2) / (j as f64 + 1.0);
                }
                let dq = points as f64 * (z * q0 - q1) / (z * z - 1.0);
                nodes[i] = -z;
                nodes[points - 1 - i] = z;
                weights[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                weights[points - 1 - i] = weights[i];
                break;
            }
            z = z_next;
        }
    }
    (nodes, weights)
}

const QUADRATURE_POINTS: usize = 32;
const QUADRATURE_REL_TOL: f64 = 1e-10;
const QUADRATURE_MAX_REFINES: usize = 10;

/// Line integral `int_0^1 alpha(b + t(x-b)) . (x-b) dt` by composite
/// Gauss-Legendre, panels halved until the value settles.
fn line_integral(alpha: &OneForm, base: &[f64], x: &[f64]) -> f64 {
    let n = base.len();
    let delta: Vec<f64> = x.iter().zip(base.iter()).map(|(a, b)| a - b).collect();
    if delta.iter().all(|&d| d == 0.0) {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(QUADRATURE_POINTS);
    let mut point = vec![0.0; n];
    let mut eval_panels = |panels: usize| -> f64 {
        let width = 1.0 / panels as f64;
        let mut acc = 0.0;
        for panel in 0..panels {
            let mid = (panel as f64 + 0.5) * width;
            for (node, weight) in nodes.iter().zip(weights.iter()) {
                let t = mid + 0.5 * width * node;
                for i in 0..n {
                    point[i] = base[i] + t * delta[i];
                }
                let a = alpha(&point);
                let along: f64 = a.iter().zip(delta.iter()).map(|(ai, di)| ai * di).sum();
                acc += weight * 0.5 * width * along;
            }
        }
        acc
    };
    let mut panels = 1;
    let mut value = eval_panels(panels);
    for _ in 0..QUADRATURE_MAX_REFINES {
        panels *= 2;
        let refined = eval_panels(panels);
        let settled = math::abs(refined - value) <= QUADRATURE_REL_TOL * math::abs(refined).max(1.0);
        value = refined;
        if settled {
            break;
        }
    }
    value
}

/// Reconstruct the potential of a closed one-form by line-segment
/// quadrature from `base`; the result vanishes at `base` and carries
/// `alpha` as its exact gradient.
pub fn integrate_potential(
    name: impl Into<String>,
    alpha: OneForm,
    base: &[f64],
    region: &[MomentumAnglePoint],
    closedness_tol: f64,
) -> Result<ScalarField, LenardError> {
    if region.is_empty() {
        return Err(LenardError::EmptyRegion);
    }
    let residual = closedness_residual(&alpha, region, DEFAULT_FD_STEP);
    if residual > closedness_tol {
        return Err(LenardError::NotClosed {
            step: 0,
            residual,
            tol: closedness_tol,
        });
    }
    Ok(potential_field(name, alpha, base))
}

fn potential_field(name: impl Into<String>, alpha: OneForm, base: &[f64]) -> ScalarField {
    let n = base.len();
    let base_eval: Vec<f64> = base.to_vec();
    let alpha_eval = Arc::clone(&alpha);
    ScalarField::torus_invariant(name, n, move |x: &[f64]| {
        line_integral(&alpha_eval, &base_eval, x)
    })
    .with_gradient(move |x: &[f64]| alpha(x))
}

/// A Lenard chain: the seed plus `K` recursion steps, with the closedness
/// residual recorded at every step.
pub struct LenardChain {
    members: Vec<Arc<ScalarField>>,
    closedness_residuals: Vec<f64>,
    base_point: MomentumAnglePoint,
}

impl LenardChain {
    pub fn members(&self) -> &[Arc<ScalarField>] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &ScalarField {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn closedness_residuals(&self) -> &[f64] {
        &self.closedness_residuals
    }

    pub fn base_point(&self) -> &MomentumAnglePoint {
        &self.base_point
    }
}

/// Run `steps` Lenard steps from a torus-invariant seed.
///
/// Potentials are integrated from `base_point` and normalized to vanish
/// there; `region` is where closedness is certified.
pub fn lenard_chain(
    seed: ScalarField,
    steps: usize,
    base_point: &MomentumAnglePoint,
    region: &[MomentumAnglePoint],
    closedness_tol: f64,
) -> Result<LenardChain, LenardError> {
    if !seed.is_torus_invariant() {
        return Err(LenardError::NotTorusInvariant {
            name: seed.name().into(),
        });
    }
    if region.is_empty() {
        return Err(LenardError::EmptyRegion);
    }
    let base = base_point.x().to_vec();
    let mut members: Vec<Arc<ScalarField>> = vec![Arc::new(seed)];
    let mut residuals = Vec::with_capacity(steps);
    for step in 0..steps {
        let current = Arc::clone(&members[step]);
        let alpha: OneForm = Arc::new(move |x: &[f64]| {
            let point = MomentumAnglePoint::new_unchecked(x.to_vec(), vec![0.0; x.len()]);
            let grad = current.gradient_x(&point, DEFAULT_FD_STEP);
            theta_apply(x, &grad)
        });
        let residual = closedness_residual(&alpha, region, DEFAULT_FD_STEP);
        if residual > closedness_tol {
            return Err(LenardError::NotClosed {
                step: step + 1,
                residual,
                tol: closedness_tol,
            });
        }
        residuals.push(residual);
        let name = alloc::format!("{}[{}]", members[0].name(), step + 2);
        members.push(Arc::new(potential_field(name, alpha, &base)));
    }
    Ok(LenardChain {
        members,
        closedness_residuals: residuals,
        base_point: base_point.clone(),
    })
}

/// Generic rank of the family's differentials: at every sample point the
/// `x`-gradients are stacked into a `K x n` matrix whose numerical rank
/// (singular values above `1e-8` of the largest) is taken, and the maximum
/// over the points is returned. A functionally dependent family has rank
/// below its size at every point.
pub fn independence_rank(
    fields: &[&ScalarField],
    points: &[MomentumAnglePoint],
) -> Result<usize, LenardError> {
    let rows = fields.len();
    if rows == 0 || points.is_empty() {
        return Ok(0);
    }
    let n = points[0].n();
    let mut best = 0;
    for p in points {
        let mut data = Vec::with_capacity(rows * n);
        for field in fields {
            data.extend(field.gradient_x(p, DEFAULT_FD_STEP));
        }
        let sigma = singular_values(&data, rows, n)?;
        best = best.max(rank_from_singular_values(&sigma, 1e-8));
    }
    Ok(best)
}

/// Summary of a chain run, shaped for serialization.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainReport {
    pub seed: String,
    pub k: usize,
    /// Closedness residual per recursion step.
    pub residuals: Vec<f64>,
    /// Scale of member `k+1` against the power sum `p_{k+1}`, per step.
    pub ratios: Vec<f64>,
    /// Gradient cosine of member `k+1` against `p_{k+1}`, per step.
    pub cosines: Vec<f64>,
    pub rank: usize,
    pub involution_max: f64,
}

/// Measure a chain against the power-sum family and the involution
/// property at the given points.
pub fn chain_report(
    chain: &LenardChain,
    points: &[MomentumAnglePoint],
) -> Result<ChainReport, LenardError> {
    assert!(!points.is_empty());
    let n = chain.base_point().n();
    let mut ratios = Vec::with_capacity(chain.len() - 1);
    let mut cosines = Vec::with_capacity(chain.len() - 1);
    for (idx, member) in chain.members().iter().enumerate().skip(1) {
        let reference = crate::invariants::power_sum_field(n, idx + 1);
        let mut dot = 0.0;
        let mut norm_m = 0.0;
        let mut norm_r = 0.0;
        let mut ratio_acc = 0.0;
        for p in points {
            let gm = member.gradient_x(p, DEFAULT_FD_STEP);
            let gr = reference.gradient_x(p, DEFAULT_FD_STEP);
            let d: f64 = gm.iter().zip(gr.iter()).map(|(a, b)| a * b).sum();
            let rr: f64 = gr.iter().map(|v| v * v).sum();
            dot += d;
            norm_m += gm.iter().map(|v| v * v).sum::<f64>();
            norm_r += rr;
            ratio_acc += d / rr;
        }
        cosines.push(dot / math::sqrt(norm_m * norm_r));
        ratios.push(ratio_acc / points.len() as f64);
    }
    let field_refs: Vec<&ScalarField> = chain.members().iter().map(|m| m.as_ref()).collect();
    let rank = independence_rank(&field_refs, points)?;
    let pi_s = BivectorField::symplectic(n);
    let pi_inf = BivectorField::bruhat(n);
    let mut involution_max: f64 = 0.0;
    for i in 0..chain.len() {
        for j in (i + 1)..chain.len() {
            for p in points {
                let bs = bracket(chain.member(i), chain.member(j), &pi_s, p);
                let bb = bracket(chain.member(i), chain.member(j), &pi_inf, p);
                involution_max = involution_max.max(math::abs(bs)).max(math::abs(bb));
            }
        }
    }
    Ok(ChainReport {
        seed: chain.member(0).name().into(),
        k: chain.len() - 1,
        residuals: chain.closedness_residuals().to_vec(),
        ratios,
        cosines,
        rank,
        involution_max,
    })
}
