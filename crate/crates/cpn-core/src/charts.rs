//! The coordinate tower on the big cell of `CP^n`.
//!
//! Homogeneous coordinates `[Z_0 : ... : Z_n]` restrict to the cell
//! `Z_0 != 0`, where `z_i = Z_i / Z_0`. Polar variables `z_i = r_i e^{i
//! phi_i}` lead to the momentum coordinates
//!
//! ```text
//! x_i = delta_{1,i} - r_i^2 / (1 + r_1^2 + ... + r_n^2)
//! ```
//!
//! whose prefix sums `c_k = x_1 + ... + x_k` parameterize the moment
//! simplex `1 >= c_1 >= ... >= c_n > 0` (all strict on the interior). Two
//! auxiliary charts are carried along: Lu coordinates
//! `y_i = z_i / sqrt(1 + |z_{i+1}|^2 + ... + |z_n|^2)` and their radial
//! logs `q_i = log(1 + |y_i|^2)`, which satisfy `c_k = exp(-(q_1 + ... +
//! q_k))` and give an independent route to `x`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::DEFAULT_EPSILON;

/// Slack allowed on the closed-cell inequalities when validating points;
/// keeps states produced by long numerical flows constructible.
pub const SIMPLEX_SLACK: f64 = 1e-9;

/// Errors from chart transforms and point validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartError {
    /// The point lies on (or numerically too close to) the locus `Z_0 = 0`.
    OutsideBigCell { abs_z0: f64 },
    /// Momentum data violates `1 >= c_1 >= ... >= c_n > 0`.
    InvalidSimplexPoint,
    /// Coordinates must be finite.
    NonFinite,
    /// All homogeneous coordinates are zero.
    ZeroVector,
    /// Vector lengths disagree or `n = 0`.
    BadDimension,
    /// Sampling margin must lie in `(0, 0.5)`.
    BadMargin { margin: f64 },
}

impl fmt::Display for ChartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartError::OutsideBigCell { abs_z0 } => {
                write!(f, "point outside the big cell: |Z_0| = {abs_z0:.3e}")
            }
            ChartError::InvalidSimplexPoint => {
                write!(f, "momentum data violates 1 >= c_1 >= ... >= c_n > 0")
            }
            ChartError::NonFinite => write!(f, "coordinates must be finite"),
            ChartError::ZeroVector => write!(f, "homogeneous coordinates are all zero"),
            ChartError::BadDimension => write!(f, "inconsistent or zero dimension"),
            ChartError::BadMargin { margin } => {
                write!(f, "margin {margin} outside (0, 0.5)")
            }
        }
    }
}

impl core::error::Error for ChartError {}

/// A point of `CP^n` in homogeneous coordinates; equality is projective.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoint {
    coords: Vec<Complex64>,
}

impl HomogeneousPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self, ChartError> {
        if coords.len() < 2 {
            return Err(ChartError::BadDimension);
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ChartError::NonFinite);
        }
        if coords.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(ChartError::ZeroVector);
        }
        Ok(HomogeneousPoint { coords })
    }

    /// Complex dimension `n` of the ambient projective space.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Projective coincidence test: parallel as complex vectors, up to
    /// `tol` relative to the larger norm.
    pub fn projectively_close(&self, other: &HomogeneousPoint, tol: f64) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        // cross products Z_i W_j - Z_j W_i all vanish iff parallel
        let scale = self
            .coords
            .iter()
            .zip(other.coords.iter())
            .fold(0.0_f64, |m, (a, b)| m.max(a.norm() * b.norm()));
        for i in 0..self.coords.len() {
            for j in (i + 1)..self.coords.len() {
                let cross = self.coords[i] * other.coords[j] - self.coords[j] * other.coords[i];
                if cross.norm() > tol * scale.max(1e-300) {
                    return false;
                }
            }
        }
        true
    }
}

/// A point of the big cell in affine coordinates `z_i = Z_i / Z_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    z: Vec<Complex64>,
}

impl AffinePoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self, ChartError> {
        if z.is_empty() {
            return Err(ChartError::BadDimension);
        }
        if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(ChartError::NonFinite);
        }
        Ok(AffinePoint { z })
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }
}

/// Lu coordinates on the big cell.
#[derive(Debug, Clone, PartialEq)]
pub struct LuPoint {
    y: Vec<Complex64>,
}

impl LuPoint {
    pub fn new(y: Vec<Complex64>) -> Result<Self, ChartError> {
        if y.is_empty() {
            return Err(ChartError::BadDimension);
        }
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(ChartError::NonFinite);
        }
        Ok(LuPoint { y })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[Complex64] {
        &self.y
    }
}

/// Radial-log coordinates `q_i = log(1 + |y_i|^2) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QPoint {
    q: Vec<f64>,
}

impl QPoint {
    pub fn new(q: Vec<f64>) -> Result<Self, ChartError> {
        if q.is_empty() {
            return Err(ChartError::BadDimension);
        }
        if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(ChartError::NonFinite);
        }
        Ok(QPoint { q })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }
}

/// A point of the open cell in momentum-angle form.
///
/// Angles are stored unreduced; reduce mod `2 pi` only when comparing.
/// Validation accepts the closed cell up to [`SIMPLEX_SLACK`] on the sign
/// constraints, while `c_n > 0` stays strict (it is what keeps the point
/// inside the cell).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumAnglePoint {
    x: Vec<f64>,
    phi: Vec<f64>,
}

impl MomentumAnglePoint {
    pub fn new(x: Vec<f64>, phi: Vec<f64>) -> Result<Self, ChartError> {
        if x.is_empty() || x.len() != phi.len() {
            return Err(ChartError::BadDimension);
        }
        if x.iter().chain(phi.iter()).any(|v| !v.is_finite()) {
            return Err(ChartError::NonFinite);
        }
        if x[0] <= 0.0 || x[0] > 1.0 + SIMPLEX_SLACK {
            return Err(ChartError::InvalidSimplexPoint);
        }
        if x.iter().skip(1).any(|&v| v > SIMPLEX_SLACK) {
            return Err(ChartError::InvalidSimplexPoint);
        }
        let c_n: f64 = x.iter().sum();
        if c_n <= 0.0 {
            return Err(ChartError::InvalidSimplexPoint);
        }
        Ok(MomentumAnglePoint { x, phi })
    }

    /// Build from the prefix-sum coordinates `c` instead of `x`.
    pub fn from_c(c: &[f64], phi: Vec<f64>) -> Result<Self, ChartError> {
        MomentumAnglePoint::new(x_from_c(c), phi)
    }

    pub(crate) fn new_unchecked(x: Vec<f64>, phi: Vec<f64>) -> Self {
        MomentumAnglePoint { x, phi }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Prefix sums `c_k = x_1 + ... + x_k`, left to right.
    pub fn c(&self) -> Vec<f64> {
        c_from_x(&self.x)
    }

    /// Strictly inside the margin-shrunk simplex with strictly decreasing `c`.
    pub fn is_interior(&self, margin: f64) -> bool {
        let c = self.c();
        if !(c[0] < 1.0 - margin && c[c.len() - 1] > margin) {
            return false;
        }
        c.windows(2).all(|w| w[1] < w[0])
    }

    /// How far outside the closed simplex the point sits (<= 0 means inside).
    pub fn simplex_violation(&self) -> f64 {
        let c = self.c();
        let mut v = c[0] - 1.0;
        v = v.max(-c[c.len() - 1]);
        for &xj in self.x.iter().skip(1) {
            v = v.max(xj);
        }
        v
    }
}

#[cfg(feature = "serde")]
mod serde_impls {
    use super::MomentumAnglePoint;
    use alloc::vec::Vec;
    use serde::ser::SerializeStruct;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    struct PointRepr {
        n: usize,
        x: Vec<f64>,
        phi: Vec<f64>,
    }

    impl Serialize for MomentumAnglePoint {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut st = s.serialize_struct("MomentumAnglePoint", 3)?;
            st.serialize_field("n", &self.n())?;
            st.serialize_field("x", self.x())?;
            st.serialize_field("phi", self.phi())?;
            st.end()
        }
    }

    // deserialization funnels through the validating constructor, so
    // malformed points are rejected at the parser
    impl<'de> Deserialize<'de> for MomentumAnglePoint {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let repr = PointRepr::deserialize(d)?;
            if repr.x.len() != repr.n || repr.phi.len() != repr.n {
                return Err(serde::de::Error::custom("x and phi must both have length n"));
            }
            MomentumAnglePoint::new(repr.x, repr.phi).map_err(serde::de::Error::custom)
        }
    }
}

/// `z_i = Z_i / Z_0`; fails off the big cell.
pub fn affine_from_homogeneous(p: &HomogeneousPoint) -> Result<AffinePoint, ChartError> {
    let z0 = p.coords()[0];
    let scale = p.coords().iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let abs_z0 = z0.norm();
    if abs_z0 <= DEFAULT_EPSILON * scale {
        return Err(ChartError::OutsideBigCell { abs_z0 });
    }
    let z = p.coords().iter().skip(1).map(|zi| zi / z0).collect();
    AffinePoint::new(z)
}

/// Polar split plus the momentum formula; the angle at a radial zero is 0.
pub fn momentum_from_affine(p: &AffinePoint) -> MomentumAnglePoint {
    let n = p.n();
    let mut r2 = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for zi in p.z() {
        let rho2 = zi.norm_sqr();
        r2.push(rho2);
        phi.push(if rho2 == 0.0 {
            0.0
        } else {
            math::atan2(zi.im, zi.re)
        });
    }
    let denom = 1.0 + r2.iter().sum::<f64>();
    let mut x = Vec::with_capacity(n);
    for (i, rho2) in r2.iter().enumerate() {
        let base = if i == 0 { 1.0 } else { 0.0 };
        x.push(base - rho2 / denom);
    }
    MomentumAnglePoint::new_unchecked(x, phi)
}

/// Inverse of [`momentum_from_affine`]: `r_k^2 = (c_{k-1} - c_k) / c_n`
/// with `c_0 = 1`.
pub fn affine_from_momentum(p: &MomentumAnglePoint) -> AffinePoint {
    let c = p.c();
    let n = p.n();
    let c_n = c[n - 1];
    let mut z = Vec::with_capacity(n);
    for k in 0..n {
        let prev = if k == 0 { 1.0 } else { c[k - 1] };
        // monotone chain makes this non-negative up to rounding
        let rho2 = ((prev - c[k]) / c_n).max(0.0);
        let r = math::sqrt(rho2);
        z.push(Complex64::new(
            r * math::cos(p.phi()[k]),
            r * math::sin(p.phi()[k]),
        ));
    }
    AffinePoint::new_unchecked_internal(z)
}

impl AffinePoint {
    fn new_unchecked_internal(z: Vec<Complex64>) -> AffinePoint {
        AffinePoint { z }
    }
}

/// `y_i = z_i / sqrt(1 + |z_{i+1}|^2 + ... + |z_n|^2)`; the tail is empty
/// for `i = n`.
pub fn lu_from_affine(p: &AffinePoint) -> LuPoint {
    let n = p.n();
    let mut tail = 0.0;
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        y[i] = p.z()[i] / math::sqrt(1.0 + tail);
        tail += p.z()[i].norm_sqr();
    }
    LuPoint { y }
}

/// `q_i = log(1 + |y_i|^2)`.
pub fn q_from_lu(p: &LuPoint) -> QPoint {
    QPoint {
        q: p.y().iter().map(|y| math::ln_1p(y.norm_sqr())).collect(),
    }
}

/// `x_1 = e^{-q_1}`, `x_j = e^{-(q_1+...+q_j)} - e^{-(q_1+...+q_{j-1})}`.
pub fn x_from_q(p: &QPoint) -> Vec<f64> {
    let mut x = Vec::with_capacity(p.n());
    let mut partial = 0.0;
    let mut prev_exp = 1.0;
    for &qi in p.q() {
        partial += qi;
        let e = math::exp(-partial);
        x.push(e - if x.is_empty() { 0.0 } else { prev_exp });
        prev_exp = e;
    }
    x
}

/// Prefix sums, summed left to right.
pub fn c_from_x(x: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for &xi in x {
        acc += xi;
        c.push(acc);
    }
    c
}

/// First differences; inverse of [`c_from_x`].
pub fn x_from_c(c: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(c.len());
    let mut prev = 0.0;
    for &ck in c {
        x.push(ck - prev);
        prev = ck;
    }
    x
}

/// Seeded sampler of interior momentum-angle points.
///
/// Owns its generator; use one sampler per thread of execution.
pub struct PointSampler {
    rng: ChaCha8Rng,
    n: usize,
    margin: f64,
}

impl PointSampler {
    pub fn new(n: usize, seed: u64, margin: f64) -> Result<Self, ChartError> {
        if n == 0 {
            return Err(ChartError::BadDimension);
        }
        if !(margin > 0.0 && margin < 0.5) {
            return Err(ChartError::BadMargin { margin });
        }
        Ok(PointSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
            margin,
        })
    }

    /// Next point: `c` strictly decreasing in `(margin, 1 - margin)`,
    /// angles uniform in `[0, 2 pi)`.
    pub fn next_point(&mut self) -> MomentumAnglePoint {
        let n = self.n;
        let lo = self.margin;
        let hi = 1.0 - self.margin;
        let mut c = vec![0.0; n];
        loop {
            for ck in c.iter_mut() {
                *ck = lo + (hi - lo) * self.rng.random::<f64>();
            }
            c.sort_by(|a, b| b.partial_cmp(a).expect("finite samples"));
            if c.windows(2).all(|w| w[1] < w[0]) {
                break;
            }
        }
        let phi: Vec<f64> = (0..n)
            .map(|_| 2.0 * core::f64::consts::PI * self.rng.random::<f64>())
            .collect();
        MomentumAnglePoint::from_c(&c, phi).expect("sampled chain is valid by construction")
    }
}

/// One-shot deterministic sample; identical output for identical inputs.
pub fn random_point(n: usize, seed: u64, margin: f64) -> Result<MomentumAnglePoint, ChartError> {
    Ok(PointSampler::new(n, seed, margin)?.next_point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn affine_chart_basics() {
        let p = HomogeneousPoint::new(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let a = affine_from_homogeneous(&p).unwrap();
        assert_eq!(a.z(), &[c64(0.0, 0.0), c64(0.0, 0.0)]);

        // overall scalar cancels: [2 : 2i : -2] -> (i, -1)
        let p = HomogeneousPoint::new(vec![c64(2.0, 0.0), c64(0.0, 2.0), c64(-2.0, 0.0)]).unwrap();
        let a = affine_from_homogeneous(&p).unwrap();
        assert_abs_diff_eq!((a.z()[0] - c64(0.0, 1.0)).norm(), 0.0);
        assert_abs_diff_eq!((a.z()[1] - c64(-1.0, 0.0)).norm(), 0.0);

        let p = HomogeneousPoint::new(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!(matches!(
            affine_from_homogeneous(&p),
            Err(ChartError::OutsideBigCell { .. })
        ));
    }

    #[test]
    fn momentum_of_cell_center() {
        let a = AffinePoint::new(vec![c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let m = momentum_from_affine(&a);
        assert_eq!(m.x(), &[1.0, 0.0]);
        assert_eq!(m.phi(), &[0.0, 0.0]);
    }

    #[test]
    fn momentum_formula_direct_substitution() {
        // |z_1|^2 = 0.4, |z_2|^2 = 0.6 -> denominator 2, x = (0.8, -0.3)
        let a = AffinePoint::new(vec![c64(math::sqrt(0.4), 0.0), c64(0.0, math::sqrt(0.6))])
            .unwrap();
        let m = momentum_from_affine(&a);
        assert_abs_diff_eq!(m.x()[0], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.x()[1], -0.3, epsilon = 1e-15);

        let a = AffinePoint::new(vec![c64(1.0, 0.0)]).unwrap();
        let m = momentum_from_affine(&a);
        assert_abs_diff_eq!(m.x()[0], 0.5, epsilon = 1e-15);
        assert_eq!(m.phi()[0], 0.0);
    }

    #[test]
    fn inverse_momentum_map() {
        let m = MomentumAnglePoint::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let a = affine_from_momentum(&m);
        assert_eq!(a.z(), &[c64(0.0, 0.0), c64(0.0, 0.0)]);

        let m = MomentumAnglePoint::from_c(&[0.8, 0.5], vec![0.0, 0.0]).unwrap();
        let a = affine_from_momentum(&m);
        assert_abs_diff_eq!(a.z()[0].norm_sqr(), 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(a.z()[1].norm_sqr(), 0.6, epsilon = 1e-14);

        assert!(matches!(
            MomentumAnglePoint::from_c(&[0.5, 0.6], vec![0.0, 0.0]),
            Err(ChartError::InvalidSimplexPoint)
        ));
    }

    #[test]
    fn lu_coordinates() {
        let a = AffinePoint::new(vec![c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        assert!(lu_from_affine(&a).y().iter().all(|y| y.norm() == 0.0));

        // n = 2, z = (1, 1): tail for i = 1 is 1 + |z_2|^2 = 2
        let a = AffinePoint::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).unwrap();
        let y = lu_from_affine(&a);
        assert_abs_diff_eq!(y.y()[0].re, 1.0 / math::sqrt(2.0), epsilon = 1e-15);
        assert_abs_diff_eq!(y.y()[1].re, 1.0, epsilon = 1e-15);

        // empty tail for n = 1
        let a = AffinePoint::new(vec![c64(3.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(lu_from_affine(&a).y()[0].re, 3.0);
    }

    #[test]
    fn q_route_examples() {
        let y = LuPoint::new(vec![c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let q = q_from_lu(&y);
        assert_eq!(q.q(), &[0.0, 0.0]);
        assert_eq!(x_from_q(&q), vec![1.0, 0.0]);

        // |y_1|^2 = 1 -> q_1 = log 2 -> x_1 = 1/2, matching z = 1 directly
        let y = LuPoint::new(vec![c64(1.0, 0.0)]).unwrap();
        let q = q_from_lu(&y);
        assert_abs_diff_eq!(q.q()[0], 2.0_f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(x_from_q(&q)[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn q_route_agrees_with_polar_route() {
        let mut sampler = PointSampler::new(2, 7, 0.05).unwrap();
        for _ in 0..50 {
            let p = sampler.next_point();
            let a = affine_from_momentum(&p);
            let via_q = x_from_q(&q_from_lu(&lu_from_affine(&a)));
            let direct = momentum_from_affine(&a);
            for i in 0..2 {
                assert_abs_diff_eq!(via_q[i], direct.x()[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn prefix_sum_examples() {
        assert_eq!(c_from_x(&[1.0, 0.0, 0.0]), vec![1.0, 1.0, 1.0]);
        let x = x_from_c(&[0.8, 0.5]);
        assert_abs_diff_eq!(x[0], 0.8);
        assert_abs_diff_eq!(x[1], -0.3, epsilon = 1e-16);
    }

    #[test]
    fn prefix_sum_roundtrip_exact_on_dyadics() {
        // dyadic inputs incur no rounding at all
        let x = vec![0.75, -0.25, -0.125, -0.0625];
        assert_eq!(x_from_c(&c_from_x(&x)), x);
        let c = vec![0.875, 0.75, 0.5, 0.25];
        assert_eq!(c_from_x(&x_from_c(&c)), c);
    }

    #[test]
    fn sampler_is_deterministic_and_valid() {
        let a = random_point(4, 42, 0.05).unwrap();
        let b = random_point(4, 42, 0.05).unwrap();
        assert_eq!(a, b);

        let mut sampler = PointSampler::new(4, 3, 0.05).unwrap();
        for _ in 0..1000 {
            let p = sampler.next_point();
            assert!(p.is_interior(0.05 - 1e-12));
            assert!(p.simplex_violation() < 0.0);
            assert!(p.phi().iter().all(|&v| (0.0..2.0 * core::f64::consts::PI).contains(&v)));
        }
    }

    #[test]
    fn sampler_rejects_bad_margin() {
        assert!(matches!(
            PointSampler::new(3, 1, 0.7),
            Err(ChartError::BadMargin { .. })
        ));
    }

    #[test]
    fn vertex_point_is_constructible() {
        // the cell center x = (1, 0, ..., 0) sits on the closed chain
        let p = MomentumAnglePoint::new(vec![1.0, 0.0, 0.0], vec![0.0; 3]).unwrap();
        assert_eq!(p.c(), vec![1.0, 1.0, 1.0]);
        assert!(!p.is_interior(0.05));
    }
}
