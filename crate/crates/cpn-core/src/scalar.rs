//! Scalar fields on the open cell, with optional analytic gradients.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::charts::MomentumAnglePoint;
use crate::DEFAULT_FD_STEP;

type EvalFn = dyn Fn(&MomentumAnglePoint) -> f64 + Send + Sync;
type GradXFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A scalar function of the momentum-angle point.
///
/// Torus-invariant fields read only `x`; those may carry a closed-form
/// `x`-gradient, which the bracket and flow machinery prefers over finite
/// differences whenever present.
pub struct ScalarField {
    name: String,
    n: usize,
    eval: Box<EvalFn>,
    grad_x: Option<Box<GradXFn>>,
    torus_invariant: bool,
}

impl core::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("torus_invariant", &self.torus_invariant)
            .field("analytic_gradient", &self.grad_x.is_some())
            .finish()
    }
}

impl ScalarField {
    /// General field of the full point (may depend on angles).
    pub fn new(
        name: impl Into<String>,
        n: usize,
        eval: impl Fn(&MomentumAnglePoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            name: name.into(),
            n,
            eval: Box::new(eval),
            grad_x: None,
            torus_invariant: false,
        }
    }

    /// Field depending on `x` alone.
    pub fn torus_invariant(
        name: impl Into<String>,
        n: usize,
        eval_x: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            name: name.into(),
            n,
            eval: Box::new(move |p: &MomentumAnglePoint| eval_x(p.x())),
            grad_x: None,
            torus_invariant: true,
        }
    }

    /// Attach a closed-form `x`-gradient (torus-invariant fields only).
    pub fn with_gradient(
        mut self,
        grad_x: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        debug_assert!(self.torus_invariant);
        self.grad_x = Some(Box::new(grad_x));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_torus_invariant(&self) -> bool {
        self.torus_invariant
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad_x.is_some()
    }

    pub fn eval(&self, p: &MomentumAnglePoint) -> f64 {
        (self.eval)(p)
    }

    /// Gradient in `x` only (length `n`); analytic when available.
    pub fn gradient_x(&self, p: &MomentumAnglePoint, h: f64) -> Vec<f64> {
        if let Some(g) = &self.grad_x {
            return g(p.x());
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            out.push(fd_partial(|q| self.eval(q), p, 2 * i, h));
        }
        out
    }

    /// Full gradient over `(x_1, phi_1, ..., x_n, phi_n)` (length `2n`).
    pub fn gradient(&self, p: &MomentumAnglePoint, h: f64) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n);
        if let Some(g) = &self.grad_x {
            let gx = g(p.x());
            for i in 0..n {
                out.push(gx[i]);
                out.push(0.0);
            }
            return out;
        }
        for axis in 0..2 * n {
            if self.torus_invariant && axis % 2 == 1 {
                out.push(0.0);
            } else {
                out.push(fd_partial(|q| self.eval(q), p, axis, h));
            }
        }
        out
    }

    /// Largest gap between the analytic gradient and central differences;
    /// zero when no analytic gradient is attached.
    pub fn gradient_consistency(&self, p: &MomentumAnglePoint, h: f64) -> f64 {
        let Some(g) = &self.grad_x else { return 0.0 };
        let analytic = g(p.x());
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let fd = fd_partial(|q| self.eval(q), p, 2 * i, h);
            worst = worst.max(crate::math::abs(analytic[i] - fd));
        }
        worst
    }
}

/// Central difference of `f` along one of the `2n` chart axes.
///
/// Even axes move `x`, odd axes move `phi`. Perturbed points skip
/// validation: every evaluator in this crate is a closed formula that
/// extends smoothly past the simplex boundary.
pub fn fd_partial(
    f: impl Fn(&MomentumAnglePoint) -> f64,
    p: &MomentumAnglePoint,
    axis: usize,
    h: f64,
) -> f64 {
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
    (f(&shifted(h)) - f(&shifted(-h))) / (2.0 * h)
}

/// Central-difference full gradient of a closure (length `2n`).
pub fn fd_gradient(
    f: impl Fn(&MomentumAnglePoint) -> f64,
    p: &MomentumAnglePoint,
    h: f64,
) -> Vec<f64> {
    (0..2 * p.n()).map(|axis| fd_partial(&f, p, axis, h)).collect()
}

/// Coordinate function `x_{i+1}` (0-based `i`).
pub fn coordinate_x(n: usize, i: usize) -> ScalarField {
    ScalarField::torus_invariant(alloc::format!("x_{}", i + 1), n, move |x: &[f64]| x[i])
        .with_gradient(move |x: &[f64]| {
            let mut g = alloc::vec![0.0; x.len()];
            g[i] = 1.0;
            g
        })
}

/// Coordinate function `phi_{i+1}` (0-based `i`).
pub fn coordinate_phi(n: usize, i: usize) -> ScalarField {
    ScalarField::new(alloc::format!("phi_{}", i + 1), n, move |p: &MomentumAnglePoint| {
        p.phi()[i]
    })
}

/// Linear momentum field `sum_i w_i x_i` with its constant gradient.
pub fn linear_x(name: impl Into<String>, weights: Vec<f64>) -> ScalarField {
    let n = weights.len();
    let w_eval = weights.clone();
    ScalarField::torus_invariant(name, n, move |x: &[f64]| {
        x.iter().zip(w_eval.iter()).map(|(a, b)| a * b).sum()
    })
    .with_gradient(move |_x: &[f64]| weights.clone())
}

/// Fixed-step setting shared by gradient consumers.
pub fn default_step() -> f64 {
    DEFAULT_FD_STEP
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn analytic_and_fd_gradients_agree() {
        let f = ScalarField::torus_invariant("quadratic", 2, |x: &[f64]| {
            x[0] * x[0] + 0.5 * x[0] * x[1]
        })
        .with_gradient(|x: &[f64]| alloc::vec![2.0 * x[0] + 0.5 * x[1], 0.5 * x[0]]);
        let p = MomentumAnglePoint::new(alloc::vec![0.8, -0.3], alloc::vec![0.1, 0.2]).unwrap();
        assert!(f.gradient_consistency(&p, 1e-5) < 1e-9);
    }

    #[test]
    fn angle_fields_have_angle_gradients() {
        let f = coordinate_phi(2, 1);
        let p = MomentumAnglePoint::new(alloc::vec![0.8, -0.3], alloc::vec![0.1, 0.2]).unwrap();
        let g = f.gradient(&p, 1e-5);
        assert_abs_diff_eq!(g[3], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g[0], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn linear_field_gradient_is_exact() {
        let f = linear_x("weights", alloc::vec![3.0, 2.0, 1.0]);
        let p = MomentumAnglePoint::new(alloc::vec![0.7, -0.2, -0.1], alloc::vec![0.0; 3]).unwrap();
        assert_eq!(f.gradient_x(&p, 1e-5), alloc::vec![3.0, 2.0, 1.0]);
        assert_abs_diff_eq!(f.eval(&p), 3.0 * 0.7 - 0.4 - 0.1, epsilon = 1e-15);
    }
}
