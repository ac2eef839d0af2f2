//! The rank-one coadjoint orbit picture and its triangular eigenvalue
//! patterns.
//!
//! A frame `A` in `U(n+1)` conjugates the seed `i lambda E_11` to
//! `M = i lambda v v*` with `v` the first column of `A`; the orbit is a
//! copy of `CP^n`, identified through `v` as homogeneous coordinates.
//! Nested principal Hermitian submatrices of `-iM` produce a triangular
//! pattern of eigenvalues whose rows interlace.
//!
//! Because `-iM` has rank one, the top eigenvalue of the principal block
//! on an index set `S` is just `lambda * sum_{i in S} |v_i|^2`, and any
//! claimed identity between pattern entries and the momentum prefix sums
//! `c_k` reduces to bookkeeping over index sets. Three nested chains are
//! natural candidates and are all implemented:
//!
//! * `UpperLeft` — blocks `{0..m}`, deleting the last index first;
//! * `LowerRight` — blocks `{size-m..size}`, deleting the first index
//!   first;
//! * `CornerAnchored` — blocks `{0} + {last m-1 indices}`, keeping the
//!   seed corner while deleting the leading affine indices first.
//!
//! [`verify_mu_formula`] measures, for every chain and both row-to-`c`
//! matching orders, the residual of `mu_1^k = lambda * c_sigma(k)` and
//! reports the convention (if any) that realizes the identity. Structurally
//! identical conventions (they collide for `n = 1`) are merged before the
//! uniqueness check.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::charts::{
    affine_from_homogeneous, c_from_x, momentum_from_affine, ChartError, HomogeneousPoint,
};
use crate::linalg::{hermitian_eigenvalues, CMat, EigenNoConvergence};
use crate::math;

/// Errors from the coadjoint-orbit layer.
#[derive(Debug, Clone, PartialEq)]
pub enum GtError {
    /// Orbit scale must be positive.
    NonPositiveLambda { lambda: f64 },
    /// Frame size must be at least 2 (`n >= 1`).
    BadDimension,
    /// The projected point missed the big cell.
    Chart(ChartError),
    Eigen(EigenNoConvergence),
    /// No enumerated convention realizes the identity.
    NoConventionMatches { best_residual: f64 },
    /// More than one structurally distinct convention matched.
    MultipleConventionsMatch { count: usize },
}

impl fmt::Display for GtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GtError::NonPositiveLambda { lambda } => {
                write!(f, "orbit scale lambda = {lambda} must be positive")
            }
            GtError::BadDimension => write!(f, "frame size must be at least 2"),
            GtError::Chart(e) => write!(f, "{e}"),
            GtError::Eigen(e) => write!(f, "{e}"),
            GtError::NoConventionMatches { best_residual } => write!(
                f,
                "no submatrix convention realizes the identity (best residual {best_residual:.3e})"
            ),
            GtError::MultipleConventionsMatch { count } => {
                write!(f, "{count} distinct conventions match; expected exactly one")
            }
        }
    }
}

impl core::error::Error for GtError {}

impl From<ChartError> for GtError {
    fn from(e: ChartError) -> Self {
        GtError::Chart(e)
    }
}

impl From<EigenNoConvergence> for GtError {
    fn from(e: EigenNoConvergence) -> Self {
        GtError::Eigen(e)
    }
}

/// A unitary frame: columns orthonormal to working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFrame {
    a: CMat,
}

impl UnitaryFrame {
    pub fn identity(size: usize) -> Self {
        UnitaryFrame {
            a: CMat::identity(size),
        }
    }

    /// Wrap an externally produced matrix; the caller vouches for
    /// unitarity (checked in debug builds).
    pub fn from_matrix(a: CMat) -> Self {
        debug_assert!(a.unitary_defect() < 1e-10);
        UnitaryFrame { a }
    }

    pub fn size(&self) -> usize {
        self.a.size()
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn first_column(&self) -> Vec<Complex64> {
        self.a.column(0)
    }

    pub fn unitary_defect(&self) -> f64 {
        self.a.unitary_defect()
    }
}

/// Haar-like random frame: seeded complex Gaussian matrix orthonormalized
/// by modified Gram-Schmidt. Deterministic per seed.
pub fn random_unitary(size: usize, seed: u64) -> UnitaryFrame {
    assert!(size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..size)
            .map(|_| {
                (0..size)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        let mut ok = true;
        for j in 0..size {
            for i in 0..j {
                let proj: Complex64 = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for r in 0..size {
                    let v = cols[j][r] - proj * cols[i][r];
                    cols[j][r] = v;
                }
            }
            let norm = math::sqrt(cols[j].iter().map(|z| z.norm_sqr()).sum());
            if norm < 1e-8 {
                ok = false; // degenerate draw, try again
                break;
            }
            for r in 0..size {
                cols[j][r] /= norm;
            }
        }
        if ok {
            let mut a = CMat::zeros(size);
            for (j, col) in cols.iter().enumerate() {
                for (r, &v) in col.iter().enumerate() {
                    a.set(r, j, v);
                }
            }
            return UnitaryFrame { a };
        }
    }
}

/// A point of the rank-one orbit: skew-Hermitian `M = i lambda v v*`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitMatrix {
    m: CMat,
    lambda: f64,
}

impl OrbitMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn size(&self) -> usize {
        self.m.size()
    }

    /// `-iM`: the Hermitian positive semi-definite rank-one form.
    pub fn hermitian_form(&self) -> CMat {
        let size = self.m.size();
        let mut h = CMat::zeros(size);
        let minus_i = Complex64::new(0.0, -1.0);
        for r in 0..size {
            for c in 0..size {
                h.set(r, c, minus_i * self.m.get(r, c));
            }
        }
        h
    }

    /// Distance of the spectrum of `-iM` from `(lambda, 0, ..., 0)`.
    pub fn spectral_defect(&self) -> Result<f64, EigenNoConvergence> {
        let eigs = hermitian_eigenvalues(&self.hermitian_form())?;
        let mut worst = math::abs(eigs[0] - self.lambda);
        for &e in &eigs[1..] {
            worst = worst.max(math::abs(e));
        }
        Ok(worst)
    }
}

/// Conjugate the corner seed by a frame, using the rank-one shortcut
/// `M = i lambda v v*` with `v` the first column.
pub fn orbit_point(frame: &UnitaryFrame, lambda: f64) -> Result<OrbitMatrix, GtError> {
    if !(lambda > 0.0) {
        return Err(GtError::NonPositiveLambda { lambda });
    }
    let size = frame.size();
    if size < 2 {
        return Err(GtError::BadDimension);
    }
    let v = frame.first_column();
    let i_lambda = Complex64::new(0.0, lambda);
    let mut m = CMat::zeros(size);
    for r in 0..size {
        for c in 0..size {
            m.set(r, c, i_lambda * v[r] * v[c].conj());
        }
    }
    Ok(OrbitMatrix { m, lambda })
}

/// The same orbit point by the full product `A (i lambda E_11) A*`;
/// retained as the oracle for the rank-one shortcut.
pub fn orbit_point_full_conjugation(frame: &UnitaryFrame, lambda: f64) -> CMat {
    let size = frame.size();
    let mut seed = CMat::zeros(size);
    seed.set(0, 0, Complex64::new(0.0, lambda));
    frame.a.matmul(&seed).matmul(&frame.a.adjoint())
}

/// The orbit-to-projective-space identification: the first column of the
/// frame read as homogeneous coordinates.
pub fn project_to_cpn(frame: &UnitaryFrame) -> HomogeneousPoint {
    HomogeneousPoint::new(frame.first_column()).expect("unitary column is nonzero")
}

/// Which nested chain of principal submatrices to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Chain {
    UpperLeft,
    LowerRight,
    CornerAnchored,
}

impl Chain {
    pub const ALL: [Chain; 3] = [Chain::UpperLeft, Chain::LowerRight, Chain::CornerAnchored];

    /// Index set of the `m`-dimensional member of the chain.
    pub fn indices(self, size: usize, m: usize) -> Vec<usize> {
        debug_assert!(m >= 1 && m <= size);
        match self {
            Chain::UpperLeft => (0..m).collect(),
            Chain::LowerRight => (size - m..size).collect(),
            Chain::CornerAnchored => {
                let mut idx = vec![0];
                idx.extend(size - (m - 1)..size);
                idx
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Chain::UpperLeft => "upper-left",
            Chain::LowerRight => "lower-right",
            Chain::CornerAnchored => "corner-anchored",
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Triangular array of submatrix eigenvalues; row `k` (1-based) has
/// length `n + 1 - k`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct GTPattern {
    rows: Vec<Vec<f64>>,
}

#[cfg(feature = "serde")]
mod serde_impls {
    use super::GTPattern;
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    // the wire form is the bare triangular array of rows
    impl Serialize for GTPattern {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            self.rows().serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for GTPattern {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let rows = Vec::<Vec<f64>>::deserialize(d)?;
            GTPattern::from_rows(rows).map_err(serde::de::Error::custom)
        }
    }
}

impl GTPattern {
    /// Accepts a triangular array: row lengths must descend one by one to
    /// a final singleton, and each row must be sorted descending.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, GtError> {
        if rows.is_empty() {
            return Err(GtError::BadDimension);
        }
        let n = rows.len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n - k {
                return Err(GtError::BadDimension);
            }
            if row.windows(2).any(|w| w[1] > w[0]) {
                return Err(GtError::BadDimension);
            }
        }
        Ok(GTPattern { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `mu_1^k`, the leading entry of row `k` (1-based).
    pub fn leading(&self, k: usize) -> f64 {
        self.rows[k - 1][0]
    }

    /// Largest violation of
    /// `row_k[i] >= row_{k+1}[i] >= row_k[i+1]` between consecutive rows;
    /// zero or negative means the pattern interlaces.
    pub fn interlacing_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..self.rows.len().saturating_sub(1) {
            let upper = &self.rows[k];
            let lower = &self.rows[k + 1];
            for i in 0..lower.len() {
                worst = worst.max(lower[i] - upper[i]);
                worst = worst.max(upper[i + 1] - lower[i]);
            }
        }
        if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        }
    }

    /// Largest `mu_r^k` with `r >= 2`; all of them vanish on a rank-one
    /// orbit.
    pub fn max_trailing_entry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            for &v in row.iter().skip(1) {
                worst = worst.max(math::abs(v));
            }
        }
        worst
    }
}

/// Extract the pattern of an orbit matrix along a chain: row `k` holds the
/// descending eigenvalues of the `(n + 1 - k)`-dimensional member.
pub fn gt_pattern(orbit: &OrbitMatrix, chain: Chain) -> Result<GTPattern, GtError> {
    let size = orbit.size();
    let n = size - 1;
    let h = orbit.hermitian_form();
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        let m = size - k;
        let idx = chain.indices(size, m);
        let block = h.principal_submatrix(&idx);
        rows.push(hermitian_eigenvalues(&block)?);
    }
    Ok(GTPattern { rows })
}

/// How pattern rows are matched against the prefix sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum COrder {
    /// `mu_1^k` against `c_k`.
    Identity,
    /// `mu_1^k` against `c_{n+1-k}`.
    Reversed,
}

impl COrder {
    pub const ALL: [COrder; 2] = [COrder::Identity, COrder::Reversed];

    /// 1-based index of the `c` entry matched to row `k`.
    pub fn sigma(self, n: usize, k: usize) -> usize {
        match self {
            COrder::Identity => k,
            COrder::Reversed => n + 1 - k,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            COrder::Identity => "identity",
            COrder::Reversed => "reversed",
        }
    }
}

impl fmt::Display for COrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Residual summary of one structurally distinct convention. Conventions
/// that coincide for the given `n` are merged; `aliases` lists every
/// (chain, order) pair in the merged class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConventionResidual {
    pub chain: Chain,
    pub order: COrder,
    pub aliases: Vec<(Chain, COrder)>,
    pub max_residual: f64,
    pub matches: bool,
}

/// Full report of the identity sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MuReport {
    pub n: usize,
    pub lambda: f64,
    pub samples: usize,
    /// One entry per structurally distinct convention.
    pub conventions: Vec<ConventionResidual>,
    /// The unique matching convention.
    pub matched: (Chain, COrder),
    /// Largest `mu_r^k`, `r >= 2`, over all patterns and chains.
    pub max_trailing: f64,
    /// Largest interlacing violation over all patterns and chains.
    pub max_interlacing_violation: f64,
}

/// Sweep random frames and measure, for every convention, the residual of
/// `mu_1^k = lambda * c_sigma(k)`, where the momentum point comes from the
/// frame's first column through the chart tower. Exactly one structurally
/// distinct convention must match within `tol`.
pub fn verify_mu_formula(
    n: usize,
    lambda: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<MuReport, GtError> {
    if n < 1 {
        return Err(GtError::BadDimension);
    }
    if !(lambda > 0.0) {
        return Err(GtError::NonPositiveLambda { lambda });
    }
    let size = n + 1;
    // structurally distinct conventions: (index-set chain, sigma) keys
    let mut groups: Vec<(Vec<Vec<usize>>, Vec<usize>, Vec<(Chain, COrder)>)> = Vec::new();
    for chain in Chain::ALL {
        for order in COrder::ALL {
            let sets: Vec<Vec<usize>> = (1..=n).map(|k| chain.indices(size, size - k)).collect();
            let sigma: Vec<usize> = (1..=n).map(|k| order.sigma(n, k)).collect();
            match groups
                .iter_mut()
                .find(|(s, g, _)| *s == sets && *g == sigma)
            {
                Some((_, _, members)) => members.push((chain, order)),
                None => groups.push((sets, sigma, vec![(chain, order)])),
            }
        }
    }
    let mut residuals = vec![0.0_f64; groups.len()];
    let mut max_trailing: f64 = 0.0;
    let mut max_interlacing: f64 = f64::NEG_INFINITY;
    let mut used = 0;
    let mut draw = 0u64;
    while used < samples {
        let frame = random_unitary(size, seed.wrapping_add(draw));
        draw += 1;
        let orbit = orbit_point(&frame, lambda)?;
        let affine = match affine_from_homogeneous(&project_to_cpn(&frame)) {
            Ok(a) => a,
            // vanishingly rare: first column orthogonal to the cell
            Err(ChartError::OutsideBigCell { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let c = c_from_x(momentum_from_affine(&affine).x());
        let mut patterns = Vec::with_capacity(Chain::ALL.len());
        for chain in Chain::ALL {
            let pat = gt_pattern(&orbit, chain)?;
            max_trailing = max_trailing.max(pat.max_trailing_entry());
            max_interlacing = max_interlacing.max(pat.interlacing_violation());
            patterns.push(pat);
        }
        for (gi, (_, sigma, members)) in groups.iter().enumerate() {
            let chain = members[0].0;
            let pat = &patterns[Chain::ALL.iter().position(|&c| c == chain).expect("present")];
            for k in 1..=n {
                let want = lambda * c[sigma[k - 1] - 1];
                let got = pat.leading(k);
                residuals[gi] = residuals[gi].max(math::abs(got - want));
            }
        }
        used += 1;
    }
    let conventions: Vec<ConventionResidual> = groups
        .iter()
        .zip(residuals.iter())
        .map(|((_, _, members), &res)| ConventionResidual {
            chain: members[0].0,
            order: members[0].1,
            aliases: members.clone(),
            max_residual: res,
            matches: res < tol,
        })
        .collect();
    let matching: Vec<&ConventionResidual> =
        conventions.iter().filter(|c| c.matches).collect();
    match matching.len() {
        0 => Err(GtError::NoConventionMatches {
            best_residual: residuals.iter().fold(f64::INFINITY, |m, &v| m.min(v)),
        }),
        1 => {
            // canonical name: prefer the alias that stays valid for all n
            let class = matching[0];
            let canonical = class
                .aliases
                .iter()
                .find(|(ch, or)| *ch == Chain::CornerAnchored && *or == COrder::Identity)
                .copied()
                .unwrap_or((class.chain, class.order));
            Ok(MuReport {
                n,
                lambda,
                samples: used,
                conventions,
                matched: canonical,
                max_trailing,
                max_interlacing_violation: if max_interlacing == f64::NEG_INFINITY {
                    0.0
                } else {
                    max_interlacing
                },
            })
        }
        count => Err(GtError::MultipleConventionsMatch { count }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn random_frames_are_unitary() {
        for seed in 0..5 {
            let f = random_unitary(4, seed);
            assert!(f.unitary_defect() < 1e-12);
            let v = f.first_column();
            let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-12);
            // |det|^2 = product of eigenvalues of A* A
            let gram = f.matrix().adjoint().matmul(f.matrix());
            let det2: f64 = hermitian_eigenvalues(&gram).unwrap().iter().product();
            assert_abs_diff_eq!(det2, 1.0, epsilon = 1e-10);
        }
        assert_eq!(random_unitary(3, 9), random_unitary(3, 9));
    }

    #[test]
    fn orbit_of_identity_frame_is_the_seed() {
        let orbit = orbit_point(&UnitaryFrame::identity(3), 2.5).unwrap();
        assert_abs_diff_eq!(orbit.matrix().get(0, 0).im, 2.5);
        assert_abs_diff_eq!(orbit.matrix().get(1, 1).norm(), 0.0);
        assert!(orbit.spectral_defect().unwrap() < 1e-12);
    }

    #[test]
    fn rank_one_shortcut_matches_full_conjugation() {
        for seed in 0..10 {
            let frame = random_unitary(4, seed);
            let fast = orbit_point(&frame, 1.0).unwrap();
            let full = orbit_point_full_conjugation(&frame, 1.0);
            assert!(fast.matrix().sub(&full).max_abs() < 1e-12);
            // trace of -iM is lambda
            let h = fast.hermitian_form();
            let tr: f64 = (0..4).map(|i| h.get(i, i).re).sum();
            assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lambda_must_be_positive() {
        assert!(matches!(
            orbit_point(&UnitaryFrame::identity(3), 0.0),
            Err(GtError::NonPositiveLambda { .. })
        ));
    }

    #[test]
    fn projection_reads_the_first_column() {
        let z = project_to_cpn(&UnitaryFrame::identity(3));
        assert_abs_diff_eq!(z.coords()[0].re, 1.0);
        assert_abs_diff_eq!(z.coords()[1].norm(), 0.0);

        // rotating a column by a phase keeps both the frame unitary and
        // the projective point fixed
        let frame = random_unitary(3, 4);
        let mut rotated = frame.matrix().clone();
        let phase = Complex64::from_polar(1.0, 1.234);
        for r in 0..3 {
            rotated.set(r, 0, rotated.get(r, 0) * phase);
        }
        let rotated = UnitaryFrame::from_matrix(rotated);
        assert!(project_to_cpn(&frame).projectively_close(&project_to_cpn(&rotated), 1e-12));
    }

    #[test]
    fn identity_frame_pattern_is_diagonal() {
        let orbit = orbit_point(&UnitaryFrame::identity(3), 1.0).unwrap();
        for chain in [Chain::UpperLeft, Chain::CornerAnchored] {
            let pat = gt_pattern(&orbit, chain).unwrap();
            assert_eq!(pat.rows().len(), 2);
            assert_abs_diff_eq!(pat.rows()[0][0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pat.rows()[0][1], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pat.rows()[1][0], 1.0, epsilon = 1e-12);
        }
        // the lower-right chain misses the corner entirely
        let pat = gt_pattern(&orbit, Chain::LowerRight).unwrap();
        assert_abs_diff_eq!(pat.rows()[0][0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_one_spectral_law() {
        // row k equals (lambda * s_k, 0, ...) with s_k the squared norm of
        // the chain's sub-block of the first column: the brute-force oracle
        // for the eigenvalue path
        let lambda = 1.7;
        for seed in 0..10 {
            let frame = random_unitary(5, seed);
            let v = frame.first_column();
            let orbit = orbit_point(&frame, lambda).unwrap();
            for chain in Chain::ALL {
                let pat = gt_pattern(&orbit, chain).unwrap();
                for k in 1..=4 {
                    let idx = chain.indices(5, 5 - k);
                    let s_k: f64 = idx.iter().map(|&i| v[i].norm_sqr()).sum();
                    assert_abs_diff_eq!(pat.leading(k), lambda * s_k, epsilon = 1e-11);
                }
                assert!(pat.max_trailing_entry() < 1e-11);
                assert!(pat.interlacing_violation() <= 1e-11);
            }
        }
    }

    #[test]
    fn pattern_depends_only_on_first_column_phase_class() {
        let frame_a = random_unitary(4, 11);
        let frame_b = {
            // different frame, same first column up to phase
            let mut m = frame_a.matrix().clone();
            let phase = Complex64::from_polar(1.0, -0.77);
            for r in 0..4 {
                m.set(r, 0, m.get(r, 0) * phase);
            }
            // also rotate another column to change the frame body
            for r in 0..4 {
                m.set(r, 2, m.get(r, 2) * Complex64::from_polar(1.0, 0.3));
            }
            UnitaryFrame::from_matrix(m)
        };
        let pa = gt_pattern(&orbit_point(&frame_a, 1.0).unwrap(), Chain::CornerAnchored).unwrap();
        let pb = gt_pattern(&orbit_point(&frame_b, 1.0).unwrap(), Chain::CornerAnchored).unwrap();
        for (ra, rb) in pa.rows().iter().zip(pb.rows().iter()) {
            for (a, b) in ra.iter().zip(rb.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn exactly_one_convention_realizes_the_identity() {
        let report = verify_mu_formula(2, 1.0, 50, 123, 1e-8).unwrap();
        assert_eq!(report.matched, (Chain::CornerAnchored, COrder::Identity));
        assert!(report.max_trailing < 1e-8);
        assert!(report.max_interlacing_violation <= 1e-9);
        // the contiguous chains visibly fail
        for conv in &report.conventions {
            let is_match = conv
                .aliases
                .iter()
                .any(|&(c, o)| c == Chain::CornerAnchored && o == COrder::Identity);
            assert_eq!(conv.matches, is_match, "{conv:?}");
            if !conv.matches {
                assert!(conv.max_residual > 1e-3);
            }
        }
    }

    #[test]
    fn conventions_collapse_consistently_for_n1() {
        let report = verify_mu_formula(1, 1.0, 20, 7, 1e-8).unwrap();
        // for n = 1 the corner-anchored chain coincides with upper-left and
        // both orders coincide: two distinct classes remain, one matching
        assert_eq!(report.conventions.len(), 2);
        assert_eq!(report.matched, (Chain::CornerAnchored, COrder::Identity));
    }
}
