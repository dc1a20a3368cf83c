//! Holomorphic functional calculus for complex matrices.
//!
//! Two independent routes are provided. [`eigen_oracle`] computes Riesz
//! projectors algebraically from a reordered Schur form (block Parlett
//! recurrence for the indicator function of each eigenvalue cluster).
//! The contour routes ([`riesz_projection`], [`sectorial_projection_matrix`],
//! [`matrix_complex_power`]) integrate resolvents numerically and never look
//! at eigenvectors; eigenvalues are only used to place the contour.

use std::f64::consts::TAU;

use nalgebra::Schur;

use crate::cmat::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::contour::{ray_distance, ContourError, ContourSpec, CutPair, Orientation, DEFAULT_NODES};
use crate::quadrature::CompensatedSum;

/// Numerical settings shared by the matrix routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Distinct eigenvalue clusters must be farther apart than this
    /// (relative to `max(1, |A|)`).
    pub cluster_tolerance: f64,
    /// Target accuracy of contour quadrature.
    pub contour_tolerance: f64,
    /// Minimal distance between a nonzero eigenvalue and a cut ray or
    /// contour (relative to `max(1, |A|)`).
    pub ray_clearance: f64,
    /// Node budget for contours.
    pub nodes: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { cluster_tolerance: 1e-8, contour_tolerance: 1e-9, ray_clearance: 1e-6, nodes: DEFAULT_NODES }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("eigenvalue clusters cannot be separated unambiguously (closest distinct clusters {distance:.3e} apart)")]
    ClusterAmbiguity { distance: f64 },
    #[error("eigenvalue {eigenvalue} lies within {distance:.3e} of the contour")]
    PoleOnContour { eigenvalue: C64, distance: f64 },
    #[error("no radius separates the zero eigenvalues from the nonzero ones (smallest nonzero modulus {smallest:.3e})")]
    ZeroSeparationFailure { smallest: f64 },
    #[error("cut ray at angle {theta} passes within {distance:.3e} of eigenvalue {eigenvalue}")]
    BranchViolation { theta: f64, eigenvalue: C64, distance: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error(transparent)]
    Contour(#[from] ContourError),
}

/// One eigenvalue cluster with its Riesz projector.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Mean of the computed eigenvalues in the cluster.
    pub eigenvalue: C64,
    /// Algebraic multiplicity.
    pub multiplicity: usize,
    /// Largest distance between a member and the mean.
    pub radius: f64,
    pub projector: ComplexMatrix,
}

fn scale_of(a: &ComplexMatrix) -> f64 {
    a.norm_fro().max(1.0)
}

/// Complex Schur form `A = Q T Q^*` with `T` upper triangular.
fn schur(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (q, t) = Schur::new(a.to_nalgebra()).unpack();
    let q = ComplexMatrix::from_nalgebra(&q);
    let mut t = ComplexMatrix::from_nalgebra(&t);
    let n = t.dim();
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    (q, t)
}

/// Eigenvalues in Schur order.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>, KernelError> {
    if !a.is_finite() {
        return Err(KernelError::NonFinite);
    }
    let (_, t) = schur(a);
    Ok((0..t.dim()).map(|i| t[(i, i)]).collect())
}

/// Single-linkage grouping of `values` at radius `r`.
fn link(values: &[C64], r: f64) -> Vec<usize> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if label[i] != label[j] && (values[i] - values[j]).norm() <= r {
                    let (lo, hi) = (label[i].min(label[j]), label[i].max(label[j]));
                    for l in label.iter_mut() {
                        if *l == hi {
                            *l = lo;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Groups eigenvalues into clusters. The linkage radius starts at the
/// cluster tolerance and grows by decades until the remaining clusters are
/// at least a hundred radii apart; if that never happens below `1e-3`
/// (relative), the clustering is ambiguous.
fn cluster(values: &[C64], scale: f64, cfg: &KernelConfig) -> Result<Vec<usize>, KernelError> {
    let mut r = cfg.cluster_tolerance * scale;
    let limit = 1e-3 * scale;
    let mut last_gap = f64::INFINITY;
    while r <= limit * (1.0 + 1e-12) {
        let label = link(values, r);
        let mut gap = f64::INFINITY;
        for i in 0..values.len() {
            for j in 0..values.len() {
                if label[i] != label[j] {
                    gap = gap.min((values[i] - values[j]).norm());
                }
            }
        }
        if gap > 100.0 * r {
            return Ok(label);
        }
        last_gap = gap;
        r *= 10.0;
    }
    Err(KernelError::ClusterAmbiguity { distance: last_gap })
}

/// Swaps the adjacent diagonal entries `k`, `k+1` of the triangular `t`
/// by a unitary rotation, updating `q` so that `Q T Q^*` is unchanged.
fn swap_adjacent(q: &mut ComplexMatrix, t: &mut ComplexMatrix, k: usize) {
    let n = t.dim();
    let (a, b, c) = (t[(k, k)], t[(k + 1, k + 1)], t[(k, k + 1)]);
    // eigenvector of the 2x2 block for eigenvalue b
    let (v0, v1) = (c, b - a);
    let nrm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return;
    }
    let (g00, g10) = (v0 / nrm, v1 / nrm);
    let (g01, g11) = (-v1.conj() / nrm, v0.conj() / nrm);
    // T <- G^* T (rows k, k+1)
    for j in 0..n {
        let (x, y) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = g00.conj() * x + g10.conj() * y;
        t[(k + 1, j)] = g01.conj() * x + g11.conj() * y;
    }
    // T <- T G, Q <- Q G (columns k, k+1)
    for m in [&mut *t, &mut *q] {
        for i in 0..n {
            let (x, y) = (m[(i, k)], m[(i, k + 1)]);
            m[(i, k)] = x * g00 + y * g10;
            m[(i, k + 1)] = x * g01 + y * g11;
        }
    }
    t[(k + 1, k)] = ZERO;
    t[(k, k)] = b;
    t[(k + 1, k + 1)] = a;
}

/// Solves `A X - X B = C` for upper-triangular `A` (p x p) and `B` (q x q),
/// all given as dense row-major blocks.
fn sylvester_triangular(a: &[C64], p: usize, b: &[C64], q: usize, c: &[C64]) -> Vec<C64> {
    let mut x = vec![ZERO; p * q];
    for j in 0..q {
        // rhs_j = c_j + sum_{l<j} x_l b_{lj}
        let mut rhs: Vec<C64> = (0..p).map(|i| c[i * q + j]).collect();
        for l in 0..j {
            let blj = b[l * q + j];
            if blj != ZERO {
                for i in 0..p {
                    rhs[i] += x[i * q + l] * blj;
                }
            }
        }
        let bjj = b[j * q + j];
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for k in i + 1..p {
                s -= a[i * p + k] * x[k * q + j];
            }
            x[i * q + j] = s / (a[i * p + i] - bjj);
        }
    }
    x
}

fn block(t: &ComplexMatrix, r0: usize, r1: usize, c0: usize, c1: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity((r1 - r0) * (c1 - c0));
    for i in r0..r1 {
        for j in c0..c1 {
            out.push(t[(i, j)]);
        }
    }
    out
}

/// Riesz projectors of all eigenvalue clusters of `a`, computed from a
/// reordered Schur form. Clusters are returned sorted by real part, then
/// imaginary part.
pub fn eigen_oracle(a: &ComplexMatrix, cfg: &KernelConfig) -> Result<Vec<EigenCluster>, KernelError> {
    if !a.is_finite() {
        return Err(KernelError::NonFinite);
    }
    let n = a.dim();
    let (mut q, mut t) = schur(a);
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let label = cluster(&values, scale_of(a), cfg)?;

    // cluster summaries, ordered
    let mut ids: Vec<usize> = label.clone();
    ids.sort_unstable();
    ids.dedup();
    let mut summaries: Vec<(usize, C64, usize, f64)> = ids
        .iter()
        .map(|&id| {
            let members: Vec<C64> =
                values.iter().zip(&label).filter(|(_, &l)| l == id).map(|(v, _)| *v).collect();
            let mean = members.iter().sum::<C64>() / members.len() as f64;
            let radius = members.iter().map(|m| (m - mean).norm()).fold(0.0, f64::max);
            (id, mean, members.len(), radius)
        })
        .collect();
    summaries.sort_by(|x, y| x.1.re.total_cmp(&y.1.re).then(x.1.im.total_cmp(&y.1.im)));
    let rank_of = |id: usize| summaries.iter().position(|s| s.0 == id).unwrap();

    // reorder so clusters are contiguous along the diagonal
    let mut pos_rank: Vec<usize> = label.iter().map(|&l| rank_of(l)).collect();
    loop {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if pos_rank[k] > pos_rank[k + 1] {
                swap_adjacent(&mut q, &mut t, k);
                pos_rank.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut bounds = Vec::with_capacity(summaries.len() + 1);
    bounds.push(0);
    for c in 0..summaries.len() {
        let count = pos_rank.iter().filter(|&&r| r == c).count();
        bounds.push(bounds.last().unwrap() + count);
    }
    let nb = summaries.len();
    let diag_blocks: Vec<Vec<C64>> =
        (0..nb).map(|i| block(&t, bounds[i], bounds[i + 1], bounds[i], bounds[i + 1])).collect();

    let qh = q.adjoint();
    let mut out = Vec::with_capacity(nb);
    for (c, summary) in summaries.iter().enumerate() {
        // block Parlett recurrence for the indicator of cluster c
        let mut f = ComplexMatrix::zeros(n);
        for i in bounds[c]..bounds[c + 1] {
            f[(i, i)] = ONE;
        }
        for width in 1..nb {
            for bi in 0..nb - width {
                let bj = bi + width;
                let (r0, r1, c0, c1) = (bounds[bi], bounds[bi + 1], bounds[bj], bounds[bj + 1]);
                let (p, qq) = (r1 - r0, c1 - c0);
                let fi = if bi == c { ONE } else { ZERO };
                let fj = if bj == c { ONE } else { ZERO };
                let mut rhs = vec![ZERO; p * qq];
                for i in 0..p {
                    for j in 0..qq {
                        let mut s = t[(r0 + i, c0 + j)] * (fi - fj);
                        for k in r1..c0 {
                            s += f[(r0 + i, k)] * t[(k, c0 + j)] - t[(r0 + i, k)] * f[(k, c0 + j)];
                        }
                        rhs[i * qq + j] = s;
                    }
                }
                let x = sylvester_triangular(&diag_blocks[bi], p, &diag_blocks[bj], qq, &rhs);
                for i in 0..p {
                    for j in 0..qq {
                        f[(r0 + i, c0 + j)] = x[i * qq + j];
                    }
                }
            }
        }
        let projector = &(&q * &f) * &qh;
        out.push(EigenCluster {
            eigenvalue: summary.1,
            multiplicity: summary.2,
            radius: summary.3,
            projector,
        });
    }
    Ok(out)
}

fn min_distance_to_polygon(nodes: &[C64], z: C64) -> f64 {
    let n = nodes.len();
    (0..n)
        .map(|k| {
            let a = nodes[k];
            let ab = nodes[(k + 1) % n] - a;
            let t = (((z - a) * ab.conj()).re / ab.norm_sqr().max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
            (z - (a + ab * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

fn resolvent(a: &ComplexMatrix, lambda: C64) -> Result<ComplexMatrix, KernelError> {
    let shifted = a - &ComplexMatrix::scalar(a.dim(), lambda);
    shifted
        .inverse()
        .map_err(|e| KernelError::PoleOnContour { eigenvalue: lambda, distance: e.pivot })
}

/// `(-1/2i pi) \oint_gamma (A - mu)^{-1} d mu`.
pub fn riesz_projection(
    a: &ComplexMatrix,
    gamma: &ContourSpec,
    cfg: &KernelConfig,
) -> Result<ComplexMatrix, KernelError> {
    let floor = cfg.ray_clearance * scale_of(a);
    for ev in eigenvalues(a)? {
        let d = min_distance_to_polygon(&gamma.nodes, ev);
        if d <= floor {
            return Err(KernelError::PoleOnContour { eigenvalue: ev, distance: d });
        }
    }
    let n = a.dim();
    let mut acc = CompensatedSum::new(n * n);
    for (lambda, w) in gamma.nodes.iter().zip(&gamma.weights) {
        let r = resolvent(a, *lambda)?;
        acc.add_scaled(*w, r.as_slice());
    }
    let factor = -ONE / (TAU * I);
    Ok(ComplexMatrix::from_row_major(n, acc.finish()).scale(factor))
}

/// Splits the clusters of `a` into the zero cluster and the rest, and
/// returns `(r, R, nonzero eigenvalues)` for an annular contour.
fn annulus_radii(a: &ComplexMatrix, cfg: &KernelConfig) -> Result<(f64, f64, Vec<C64>), KernelError> {
    let scale = scale_of(a);
    let values = eigenvalues(a)?;
    let label = cluster(&values, scale, cfg)?;
    let mut zero_radius: f64 = 0.0;
    let mut nonzero = Vec::new();
    let mut ids = label.clone();
    ids.sort_unstable();
    ids.dedup();
    for id in ids {
        let members: Vec<C64> =
            values.iter().zip(&label).filter(|(_, &l)| l == id).map(|(v, _)| *v).collect();
        let mean = members.iter().sum::<C64>() / members.len() as f64;
        let spread = members.iter().map(|m| (m - mean).norm()).fold(0.0, f64::max);
        if mean.norm() <= (10.0 * spread).max(cfg.cluster_tolerance * scale) {
            zero_radius = members.iter().map(|m| m.norm()).fold(zero_radius, f64::max);
        } else {
            nonzero.extend(members);
        }
    }
    let smallest = nonzero.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let largest = nonzero.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if nonzero.is_empty() {
        return Ok((0.5, 1.0, nonzero));
    }
    if smallest <= 100.0 * zero_radius.max(cfg.cluster_tolerance * scale) {
        return Err(KernelError::ZeroSeparationFailure { smallest });
    }
    Ok((0.5 * smallest, 2.0 * largest + 1.0, nonzero))
}

/// Sectorial projection `(1/2i pi) \int lambda^{-1} A (A - lambda)^{-1} d lambda`
/// over the closed contour bounding the sector between the cuts, taken in
/// the direction inward along `theta` and outward along `theta'`.
pub fn sectorial_projection_matrix(
    a: &ComplexMatrix,
    cuts: &CutPair,
    cfg: &KernelConfig,
) -> Result<ComplexMatrix, KernelError> {
    let n = a.dim();
    let (r, big_r, poles) = annulus_radii(a, cfg)?;
    let floor = cfg.ray_clearance * scale_of(a);
    for &ev in &poles {
        let d = cuts.ray_distance(ev);
        if d <= floor {
            return Err(KernelError::PoleOnContour { eigenvalue: ev, distance: d });
        }
    }
    if poles.is_empty() {
        return Ok(ComplexMatrix::zeros(n));
    }
    let gamma = ContourSpec::sector_annulus(cuts.theta, cuts.theta_prime, r, big_r, &poles, cfg.nodes)?;
    let mut acc = CompensatedSum::new(n * n);
    for (lambda, w) in gamma.nodes.iter().zip(&gamma.weights) {
        let res = resolvent(a, *lambda)?;
        let integrand = (a * &res).scale(ONE / lambda);
        acc.add_scaled(*w, integrand.as_slice());
    }
    debug_assert_eq!(gamma.orientation, Orientation::Negative);
    Ok(ComplexMatrix::from_row_major(n, acc.finish()).scale(ONE / (TAU * I)))
}

/// `lambda^s` with the argument taken from `label`.
fn power_with_arg(lambda: C64, label: f64, s: C64) -> C64 {
    (s * C64::new(lambda.norm().ln(), label)).exp()
}

/// Complex power `A^s_theta`, branch `arg in (theta - 2pi, theta)`.
///
/// For `Re s < 0` this is `(-1/2i pi) \int lambda^s (A - lambda)^{-1}` over
/// the keyhole contour along the cut; other exponents use
/// `A^s = A^k A^{s-k}`. The result vanishes on the root space of 0.
pub fn matrix_complex_power(
    a: &ComplexMatrix,
    s: C64,
    theta: f64,
    cfg: &KernelConfig,
) -> Result<ComplexMatrix, KernelError> {
    if s.re >= 0.0 {
        let k = s.re.floor() as u32 + 1;
        let base = matrix_complex_power(a, s - C64::new(k as f64, 0.0), theta, cfg)?;
        return Ok(&a.pow(k) * &base);
    }
    let n = a.dim();
    let (r, big_r, poles) = annulus_radii(a, cfg)?;
    let floor = cfg.ray_clearance * scale_of(a);
    for &ev in &poles {
        let d = ray_distance(ev, theta);
        if d <= floor {
            return Err(KernelError::BranchViolation { theta, eigenvalue: ev, distance: d });
        }
    }
    if poles.is_empty() {
        return Ok(ComplexMatrix::zeros(n));
    }
    let gamma = ContourSpec::sector_annulus(theta, theta - TAU, r, big_r, &poles, cfg.nodes)?;
    let labels = gamma.arg_labels.as_ref().expect("annulus contours carry argument labels");
    let mut acc = CompensatedSum::new(n * n);
    for ((lambda, w), label) in gamma.nodes.iter().zip(&gamma.weights).zip(labels) {
        let res = resolvent(a, *lambda)?;
        acc.add_scaled(*w * power_with_arg(*lambda, *label, s), res.as_slice());
    }
    Ok(ComplexMatrix::from_row_major(n, acc.finish()).scale(-ONE / (TAU * I)))
}

/// Branch of `lambda^s` used by [`matrix_complex_power`], for scalar checks.
pub fn scalar_power(lambda: C64, s: C64, theta: f64) -> C64 {
    let label = theta - TAU + (lambda.arg() - (theta - TAU)).rem_euclid(TAU);
    power_with_arg(lambda, label, s)
}

/// Sum of oracle projectors over clusters whose eigenvalue satisfies `keep`.
pub fn oracle_sum<F: Fn(C64) -> bool>(clusters: &[EigenCluster], dim: usize, keep: F) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim);
    for c in clusters {
        if keep(c.eigenvalue) {
            out += &c.projector;
        }
    }
    out
}

/// Oracle-side `f(A)` for `f` applied clusterwise to a diagonalizable `A`.
pub fn oracle_function<F: Fn(C64) -> C64>(clusters: &[EigenCluster], dim: usize, f: F) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim);
    for c in clusters {
        out += &c.projector.scale(f(c.eigenvalue));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn oracle_on_triangular_example() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]);
        let cl = eigen_oracle(&a, &KernelConfig::default()).unwrap();
        assert_eq!(cl.len(), 2);
        let p1 = ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[0.0, 0.0]]);
        let p2 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 1.0]]);
        assert!((cl[0].eigenvalue - c(1.0, 0.0)).norm() < 1e-13);
        assert!(cl[0].projector.dist(&p1) < 1e-13);
        assert!(cl[1].projector.dist(&p2) < 1e-13);
    }

    #[test]
    fn oracle_handles_jordan_block() {
        let a = ComplexMatrix::from_real_rows(&[&[3.0, 1.0, 0.0], &[0.0, 3.0, 0.0], &[0.0, 0.0, -1.0]]);
        let cl = eigen_oracle(&a, &KernelConfig::default()).unwrap();
        assert_eq!(cl.len(), 2);
        let three = cl.iter().find(|x| (x.eigenvalue - c(3.0, 0.0)).norm() < 1e-6).unwrap();
        assert_eq!(three.multiplicity, 2);
        let p = ComplexMatrix::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(three.projector.dist(&p) < 1e-12);
    }

    #[test]
    fn oracle_reports_ambiguity_for_graded_spectrum() {
        let a = ComplexMatrix::diag(&[c(0.0, 0.0), c(1e-7, 0.0), c(1e-5, 0.0), c(1e-3, 0.0), c(1e-1, 0.0)]);
        let err = eigen_oracle(&a, &KernelConfig::default()).unwrap_err();
        assert!(matches!(err, KernelError::ClusterAmbiguity { .. }));
    }

    #[test]
    fn riesz_on_circle() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]);
        let g = ContourSpec::circle(c(2.0, 0.0), 0.5, 256);
        let p = riesz_projection(&a, &g, &KernelConfig::default()).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 1.0]]);
        assert!(p.dist(&expect) < 1e-13);
        let empty = ContourSpec::circle(c(10.0, 0.0), 0.5, 256);
        let z = riesz_projection(&a, &empty, &KernelConfig::default()).unwrap();
        assert!(z.norm_max() < 1e-14);
    }

    #[test]
    fn riesz_rejects_pole_on_contour() {
        let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let g = ContourSpec::circle(c(0.0, 0.0), 1.0, 64);
        assert!(matches!(
            riesz_projection(&a, &g, &KernelConfig::default()),
            Err(KernelError::PoleOnContour { .. })
        ));
    }

    #[test]
    fn sectorial_examples() {
        let cfg = KernelConfig::default();
        let a = ComplexMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let cuts = CutPair::new(PI / 4.0, 3.0 * PI / 4.0).unwrap();
        let p = sectorial_projection_matrix(&a, &cuts, &cfg).unwrap();
        assert!(p.dist(&ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)])) < 1e-12);

        let b = ComplexMatrix::diag(&[c(2.0, 0.0), c(-3.0, 0.0)]);
        let p = sectorial_projection_matrix(&b, &CutPair::up_down(), &cfg).unwrap();
        assert!(p.dist(&ComplexMatrix::diag(&[c(0.0, 0.0), c(1.0, 0.0)])) < 1e-12);
    }

    #[test]
    fn sectorial_requires_ray_clearance() {
        let a = ComplexMatrix::diag(&[c(0.0, 1.0), c(1.0, 0.0)]);
        let cuts = CutPair::new(PI / 2.0, PI).unwrap();
        assert!(matches!(
            sectorial_projection_matrix(&a, &cuts, &KernelConfig::default()),
            Err(KernelError::PoleOnContour { .. })
        ));
    }

    #[test]
    fn zero_separation_failure() {
        let a = ComplexMatrix::diag(&[c(5e-8, 0.0), c(-1.0, 0.0)]);
        let err = sectorial_projection_matrix(&a, &CutPair::up_down(), &KernelConfig::default());
        assert!(matches!(err, Err(KernelError::ZeroSeparationFailure { .. })));
    }

    #[test]
    fn square_root_of_four() {
        let a = ComplexMatrix::diag(&[c(4.0, 0.0)]);
        let r = matrix_complex_power(&a, c(0.5, 0.0), PI, &KernelConfig::default()).unwrap();
        assert!((r[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn integer_powers_do_not_depend_on_cut() {
        let cfg = KernelConfig::default();
        let a = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let up = matrix_complex_power(&a, c(-1.0, 0.0), PI / 2.0, &cfg).unwrap();
        let down = matrix_complex_power(&a, c(-1.0, 0.0), 3.0 * PI / 2.0, &cfg).unwrap();
        assert!(up.dist(&down) < 1e-12);
        assert!(up.dist(&a) < 1e-12);
    }

    #[test]
    fn branch_violation_on_eigenvalue_argument() {
        let a = ComplexMatrix::diag(&[c(0.0, 2.0)]);
        let err = matrix_complex_power(&a, c(-0.5, 0.0), PI / 2.0, &KernelConfig::default());
        assert!(matches!(err, Err(KernelError::BranchViolation { .. })));
    }

    #[test]
    fn partial_inverse_kills_nilpotent_part() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 2.0]]);
        let inv = matrix_complex_power(&a, c(-1.0, 0.0), PI, &KernelConfig::default()).unwrap();
        let expect = ComplexMatrix::diag(&[c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(inv.dist(&expect) < 1e-12);
    }

    #[test]
    fn scalar_branch_range() {
        let z = scalar_power(c(-1.0, 0.0), c(0.5, 0.0), PI / 2.0);
        assert!((z - c(0.0, -1.0)).norm() < 1e-15);
        let w = scalar_power(c(-1.0, 0.0), c(0.5, 0.0), 3.0 * PI / 2.0);
        assert!((w - c(0.0, 1.0)).norm() < 1e-15);
    }
}
