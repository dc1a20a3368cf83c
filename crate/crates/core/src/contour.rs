//! Spectral cuts and discretized contours in the spectral plane.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::cmat::{C64, I};
use crate::quadrature::gauss_legendre;

/// Ordered pair of cut angles `(theta, theta')` bounding the open sector
/// `theta < arg(lambda) < theta'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPair {
    pub theta: f64,
    #[serde(rename = "thetaPrime")]
    pub theta_prime: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid cut pair ({theta}, {theta_prime}): need 0 <= theta < 2pi and theta < theta' <= theta + 2pi")]
pub struct InvalidCutPair {
    pub theta: f64,
    pub theta_prime: f64,
}

impl CutPair {
    pub fn new(theta: f64, theta_prime: f64) -> Result<Self, InvalidCutPair> {
        let ok = theta.is_finite()
            && theta_prime.is_finite()
            && (0.0..TAU).contains(&theta)
            && theta < theta_prime
            && theta_prime <= theta + TAU;
        if ok {
            Ok(Self { theta, theta_prime })
        } else {
            Err(InvalidCutPair { theta, theta_prime })
        }
    }

    /// Builds a pair from arbitrary real angles by shifting `theta` into
    /// `[0, 2pi)` and `theta'` by the same amount.
    pub fn normalized(theta: f64, theta_prime: f64) -> Result<Self, InvalidCutPair> {
        let shift = theta.rem_euclid(TAU) - theta;
        Self::new(theta + shift, theta_prime + shift)
    }

    /// Cut in the upper half-plane followed by the cut in the lower one;
    /// the sector between them holds the negative real axis.
    pub fn up_down() -> Self {
        Self { theta: PI / 2.0, theta_prime: 3.0 * PI / 2.0 }
    }

    /// The sector `(theta', theta + 2pi)` completing this one.
    pub fn complement(&self) -> Self {
        Self::normalized(self.theta_prime, self.theta + TAU).expect("complement of a valid pair")
    }

    pub fn width(&self) -> f64 {
        self.theta_prime - self.theta
    }

    /// Argument of `z` lifted into `[theta, theta + 2pi)`.
    pub fn lifted_arg(&self, z: C64) -> f64 {
        self.theta + (z.arg() - self.theta).rem_euclid(TAU)
    }

    /// Whether a nonzero `z` lies in the open sector.
    pub fn contains(&self, z: C64) -> bool {
        let a = self.lifted_arg(z);
        a > self.theta && a < self.theta_prime
    }

    /// Distance from `z` to the union of both cut rays.
    pub fn ray_distance(&self, z: C64) -> f64 {
        ray_distance(z, self.theta).min(ray_distance(z, self.theta_prime))
    }
}

/// Distance from `z` to the closed ray `{t e^{i phi}, t >= 0}`.
pub fn ray_distance(z: C64, phi: f64) -> f64 {
    let d = C64::from_polar(1.0, phi);
    let along = (z * d.conj()).re;
    if along <= 0.0 {
        z.norm()
    } else {
        (z - d * along).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Counter-clockwise around the enclosed region.
    Positive,
    /// Clockwise around the enclosed region.
    Negative,
}

/// Quadrature for a closed contour: `sum_k weights[k] f(nodes[k])`
/// approximates the oriented integral `\oint f(lambda) d lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    /// Continuous argument of each node, when the contour follows a cut.
    pub arg_labels: Option<Vec<f64>>,
    /// Smallest distance between the contour and the declared poles.
    pub clearance: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContourError {
    #[error("contour passes within {distance:.3e} of a pole (required clearance > 0)")]
    NoClearance { distance: f64 },
    #[error("invalid contour geometry: {0}")]
    Geometry(String),
}

/// Default number of trapezoid nodes on smooth closed contours.
pub const DEFAULT_NODES: usize = 1024;
const PANEL_ORDER: usize = 16;
const MAX_PANEL_DEPTH: u32 = 48;

impl ContourSpec {
    /// Positively oriented circle, trapezoid rule.
    pub fn circle(center: C64, radius: f64, n: usize) -> Self {
        Self::ellipse(center, radius, radius, 0.0, n)
    }

    /// Positively oriented ellipse `center + e^{i rot}(a cos t + i b sin t)`.
    pub fn ellipse(center: C64, a: f64, b: f64, rot: f64, n: usize) -> Self {
        assert!(n >= 3 && a > 0.0 && b > 0.0);
        let rotation = C64::from_polar(1.0, rot);
        let h = TAU / n as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let t = h * k as f64;
            let (s, c) = t.sin_cos();
            nodes.push(center + rotation * C64::new(a * c, b * s));
            weights.push(rotation * C64::new(-a * s, b * c) * h);
        }
        Self {
            nodes,
            weights,
            arg_labels: None,
            clearance: f64::INFINITY,
            orientation: Orientation::Positive,
        }
    }

    /// Records the clearance of this contour with respect to `poles`,
    /// measured against the node polygon.
    pub fn with_poles(mut self, poles: &[C64]) -> Result<Self, ContourError> {
        let d = polygon_distance(&self.nodes, poles);
        if !poles.is_empty() && d <= 0.0 {
            return Err(ContourError::NoClearance { distance: d });
        }
        self.clearance = d;
        Ok(self)
    }

    /// Closed contour bounding `{r <= |lambda| <= big_r}` between the rays at
    /// angles `alpha0` and `alpha1`: in along `alpha0`, along the small arc
    /// from `alpha0` to `alpha1`, out along `alpha1`, back along the large
    /// arc. With `alpha0 < alpha1` this runs clockwise around the region;
    /// with `alpha0 > alpha1` counter-clockwise.
    ///
    /// Each piece is split into Gauss-Legendre panels no longer than their
    /// distance to the nearest of `poles` (the origin is always included),
    /// so the rule converges geometrically despite the corners.
    pub fn sector_annulus(
        alpha0: f64,
        alpha1: f64,
        r: f64,
        big_r: f64,
        poles: &[C64],
        min_nodes: usize,
    ) -> Result<Self, ContourError> {
        if !(r > 0.0 && big_r > r && alpha0 != alpha1) {
            return Err(ContourError::Geometry(format!(
                "need 0 < r < R and distinct angles (r={r}, R={big_r})"
            )));
        }
        let mut all_poles = poles.to_vec();
        all_poles.push(C64::new(0.0, 0.0));
        let pieces = [
            Piece::Ray { phi: alpha0, from: big_r, to: r },
            Piece::Arc { radius: r, from: alpha0, to: alpha1 },
            Piece::Ray { phi: alpha1, from: r, to: big_r },
            Piece::Arc { radius: big_r, from: alpha1, to: alpha0 },
        ];
        let clearance = pieces
            .iter()
            .map(|p| poles.iter().map(|&z| p.distance(z)).fold(f64::INFINITY, f64::min))
            .fold(f64::INFINITY, f64::min);
        if clearance <= 0.0 {
            return Err(ContourError::NoClearance { distance: clearance });
        }
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let initial = (min_nodes / (4 * PANEL_ORDER)).max(1);
        let mut out = Self {
            nodes: Vec::new(),
            weights: Vec::new(),
            arg_labels: Some(Vec::new()),
            clearance,
            orientation: if alpha0 < alpha1 { Orientation::Negative } else { Orientation::Positive },
        };
        for piece in &pieces {
            for k in 0..initial {
                let t0 = k as f64 / initial as f64;
                let t1 = (k + 1) as f64 / initial as f64;
                piece.refine(t0, t1, &all_poles, 0, &gx, &gw, &mut out);
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Winding number of the closed node polygon around `z`.
    pub fn winding_number(&self, z: C64) -> i32 {
        let mut total = 0.0;
        let n = self.nodes.len();
        for k in 0..n {
            let a = self.nodes[k] - z;
            let b = self.nodes[(k + 1) % n] - z;
            total += (b / a).arg();
        }
        (total / TAU).round() as i32
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Ray { phi: f64, from: f64, to: f64 },
    Arc { radius: f64, from: f64, to: f64 },
}

impl Piece {
    fn point(&self, t: f64) -> (C64, C64, f64) {
        match *self {
            Piece::Ray { phi, from, to } => {
                let d = C64::from_polar(1.0, phi);
                let rho = from + (to - from) * t;
                (d * rho, d * (to - from), phi)
            }
            Piece::Arc { radius, from, to } => {
                let a = from + (to - from) * t;
                let z = C64::from_polar(radius, a);
                (z, I * z * (to - from), a)
            }
        }
    }

    fn length(&self, t0: f64, t1: f64) -> f64 {
        match *self {
            Piece::Ray { from, to, .. } => ((to - from) * (t1 - t0)).abs(),
            Piece::Arc { radius, from, to } => (radius * (to - from) * (t1 - t0)).abs(),
        }
    }

    fn distance(&self, z: C64) -> f64 {
        match *self {
            Piece::Ray { phi, from, to } => {
                let d = C64::from_polar(1.0, phi);
                let (lo, hi) = if from < to { (from, to) } else { (to, from) };
                let along = (z * d.conj()).re.clamp(lo, hi);
                (z - d * along).norm()
            }
            Piece::Arc { radius, from, to } => {
                let (lo, hi) = if from < to { (from, to) } else { (to, from) };
                let a = lo + (z.arg() - lo).rem_euclid(TAU);
                if a <= hi {
                    (z.norm() - radius).abs()
                } else {
                    let e0 = C64::from_polar(radius, lo);
                    let e1 = C64::from_polar(radius, hi);
                    (z - e0).norm().min((z - e1).norm())
                }
            }
        }
    }

    fn sub_distance(&self, t0: f64, t1: f64, poles: &[C64]) -> f64 {
        let sub = match *self {
            Piece::Ray { phi, from, to } => {
                Piece::Ray { phi, from: from + (to - from) * t0, to: from + (to - from) * t1 }
            }
            Piece::Arc { radius, from, to } => {
                Piece::Arc { radius, from: from + (to - from) * t0, to: from + (to - from) * t1 }
            }
        };
        poles.iter().map(|&z| sub.distance(z)).fold(f64::INFINITY, f64::min)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        t0: f64,
        t1: f64,
        poles: &[C64],
        depth: u32,
        gx: &[f64],
        gw: &[f64],
        out: &mut ContourSpec,
    ) {
        let half = 0.5 * self.length(t0, t1);
        let dist = self.sub_distance(t0, t1, poles);
        if half > dist && depth < MAX_PANEL_DEPTH {
            let tm = 0.5 * (t0 + t1);
            self.refine(t0, tm, poles, depth + 1, gx, gw, out);
            self.refine(tm, t1, poles, depth + 1, gx, gw, out);
            return;
        }
        let (mid, hw) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
        for (x, w) in gx.iter().zip(gw) {
            let (z, dz, label) = self.point(mid + hw * x);
            out.nodes.push(z);
            out.weights.push(dz * (w * hw));
            if let Some(labels) = out.arg_labels.as_mut() {
                labels.push(label);
            }
        }
    }
}

fn polygon_distance(nodes: &[C64], poles: &[C64]) -> f64 {
    let n = nodes.len();
    let mut best = f64::INFINITY;
    for &p in poles {
        for k in 0..n {
            let a = nodes[k];
            let b = nodes[(k + 1) % n];
            let ab = b - a;
            let t = (((p - a) * ab.conj()).re / ab.norm_sqr().max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
            best = best.min((p - (a + ab * t)).norm());
        }
    }
    best
}
