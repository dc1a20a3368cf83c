//! Quadrature on the unit cosphere `S^{n-1}` for `n = 1..=4`.
//!
//! All rules are antipodally symmetric, so a rule integrates odd functions
//! to zero up to rounding. Exactness degrees are stated per dimension.

use std::f64::consts::{PI, TAU};

use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Largest total degree of polynomials integrated exactly.
    pub exactness: usize,
}

/// Default resolution used by the residue machinery.
pub fn default_resolution(n: usize) -> usize {
    match n {
        1 => 1,
        2 => 64,
        3 => 16,
        _ => 10,
    }
}

impl SphereRule {
    pub fn default_for(n: usize) -> Self {
        Self::new(n, default_resolution(n))
    }

    /// `n = 2`: `res` equispaced angles. `n = 3`: `res` Gauss-Legendre
    /// heights times `2 res` angles. `n = 4`: `res` Gauss-Chebyshev (second
    /// kind) heights times the `n = 3` rule of the same resolution.
    pub fn new(n: usize, res: usize) -> Self {
        match n {
            1 => Self { dim: 1, points: vec![vec![1.0], vec![-1.0]], weights: vec![1.0, 1.0], exactness: usize::MAX },
            2 => circle(res.max(2) & !1),
            3 => sphere2(res.max(2)),
            4 => sphere3(res.max(2)),
            _ => panic!("cosphere rules exist for n = 1..=4"),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn circle(m: usize) -> SphereRule {
    let w = TAU / m as f64;
    let points = (0..m).map(|k| {
        let a = w * k as f64;
        vec![a.cos(), a.sin()]
    });
    SphereRule { dim: 2, points: points.collect(), weights: vec![w; m], exactness: m - 1 }
}

fn sphere2(res: usize) -> SphereRule {
    let (t, wt) = gauss_legendre(res);
    let nphi = 2 * res;
    let wphi = TAU / nphi as f64;
    let mut points = Vec::with_capacity(res * nphi);
    let mut weights = Vec::with_capacity(res * nphi);
    for (ti, wi) in t.iter().zip(&wt) {
        let r = (1.0 - ti * ti).max(0.0).sqrt();
        for k in 0..nphi {
            let a = wphi * k as f64;
            points.push(vec![r * a.cos(), r * a.sin(), *ti]);
            weights.push(wi * wphi);
        }
    }
    SphereRule { dim: 3, points, weights, exactness: (2 * res - 1).min(nphi - 1) }
}

fn sphere3(res: usize) -> SphereRule {
    let inner = sphere2(res);
    let m = res;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for k in 1..=m {
        let a = k as f64 * PI / (m + 1) as f64;
        let (t, s) = (a.cos(), a.sin());
        let wt = PI / (m + 1) as f64 * s * s;
        for (p, w) in inner.points.iter().zip(&inner.weights) {
            points.push(vec![s * p[0], s * p[1], s * p[2], t]);
            weights.push(wt * w);
        }
    }
    SphereRule { dim: 4, points, weights, exactness: (2 * m - 1).min(inner.exactness) }
}

/// Dense scan of `S^{n-1}` with `m` samples per angular axis (`m^{n-1}` points).
pub fn scan_points(n: usize, m: usize) -> Vec<Vec<f64>> {
    let mid = |k: usize| (k as f64 + 0.5) * PI / m as f64;
    let ang = |k: usize| k as f64 * TAU / m as f64;
    let mut out = Vec::new();
    match n {
        1 => {
            out.push(vec![1.0]);
            out.push(vec![-1.0]);
        }
        2 => out.extend((0..m).map(|k| vec![ang(k).cos(), ang(k).sin()])),
        3 => {
            for i in 0..m {
                let (c, s) = (mid(i).cos(), mid(i).sin());
                for k in 0..m {
                    out.push(vec![s * ang(k).cos(), s * ang(k).sin(), c]);
                }
            }
        }
        4 => {
            for h in 0..m {
                let (c1, s1) = (mid(h).cos(), mid(h).sin());
                for i in 0..m {
                    let (c2, s2) = (mid(i).cos(), mid(i).sin());
                    for k in 0..m {
                        out.push(vec![s1 * s2 * ang(k).cos(), s1 * s2 * ang(k).sin(), s1 * c2, c1]);
                    }
                }
            }
        }
        _ => panic!("cosphere scans exist for n = 1..=4"),
    }
    out
}

/// Surface area of `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => TAU,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => panic!("sphere_area supports n = 1..=4"),
    }
}
