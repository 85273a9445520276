//! Adaptive Gauss–Legendre quadrature for complex-valued integrands on a
//! finite interval.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::error::{Result, ZetaError};

/// Fixed-order Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre
    /// polynomial, starting from the Chebyshev-like asymptotic guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F>(&self, f: &F, a: f64, b: f64) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Like `integrate`, also returning ∫|f| under the same rule.
    fn integrate_with_mass<F>(&self, f: &F, a: f64, b: f64) -> (Complex64, f64)
    where
        F: Fn(f64) -> Complex64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            acc += v * *w;
            mass += v.norm() * *w;
        }
        (acc * half, mass * half.abs())
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature scheme used for the Hermite integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    GaussLegendre7,
    GaussLegendre15,
    GaussLegendre31,
}

impl QuadRule {
    pub fn rule(self) -> &'static GaussLegendre {
        static GL7: OnceLock<GaussLegendre> = OnceLock::new();
        static GL15: OnceLock<GaussLegendre> = OnceLock::new();
        static GL31: OnceLock<GaussLegendre> = OnceLock::new();
        match self {
            QuadRule::GaussLegendre7 => GL7.get_or_init(|| GaussLegendre::new(7)),
            QuadRule::GaussLegendre15 => GL15.get_or_init(|| GaussLegendre::new(15)),
            QuadRule::GaussLegendre31 => GL31.get_or_init(|| GaussLegendre::new(31)),
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum of the accepted panel error estimates.
    pub error: f64,
    pub evaluations: usize,
}

const ROUNDOFF_FACTOR: f64 = 64.0;

/// Dyadic adaptive Gauss–Legendre integration over `[a, b]`.
///
/// The interval is first cut at `breakpoints` (those strictly inside
/// `(a, b)`). A panel is accepted when the two-halves estimate differs from
/// the whole-panel estimate by less than its share of `abs_tol`; otherwise
/// both halves are refined. A panel whose two estimates already agree to
/// within rounding of ∫|f| is accepted too, since refining cannot help.
/// Exceeding `max_refinements` splits yields an
/// accuracy error carrying the best available estimate.
pub fn adaptive_gauss_legendre<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    max_refinements: usize,
    rule: QuadRule,
) -> Result<Quadrature>
where
    F: Fn(f64) -> Complex64,
{
    let gl = rule.rule();
    let total = b - a;
    if total <= 0.0 {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }

    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    let mut evaluations = 0usize;
    let mut stack: Vec<(f64, f64, Complex64)> = Vec::new();
    for w in cuts.windows(2) {
        let est = gl.integrate(&f, w[0], w[1]);
        evaluations += gl.len();
        stack.push((w[0], w[1], est));
    }

    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut refinements = 0usize;
    while let Some((lo, hi, est)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, mass_l) = gl.integrate_with_mass(&f, lo, mid);
        let (right, mass_r) = gl.integrate_with_mass(&f, mid, hi);
        evaluations += 2 * gl.len();
        let refined = left + right;
        let err = (refined - est).norm();
        let local_tol = abs_tol * (hi - lo) / total;
        if !err.is_finite() || !refined.re.is_finite() || !refined.im.is_finite() {
            return Err(ZetaError::Accuracy {
                estimate: value,
                residual: f64::INFINITY,
            });
        }
        let roundoff = ROUNDOFF_FACTOR * f64::EPSILON * (mass_l + mass_r);
        if err <= local_tol.max(roundoff) || (hi - lo) < 1e-12 * total {
            value += refined;
            error += err;
            continue;
        }
        refinements += 1;
        if refinements > max_refinements {
            let pending: Complex64 = stack.iter().map(|p| p.2).sum::<Complex64>() + refined;
            let residual = error + err + stack.len() as f64 * local_tol;
            return Err(ZetaError::Accuracy {
                estimate: value + pending,
                residual,
            });
        }
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }

    Ok(Quadrature {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_weights_are_consistent() {
        for n in [1, 2, 7, 15, 31] {
            let gl = GaussLegendre::new(n);
            let wsum: f64 = gl.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n = {n}: weight sum {wsum}");
            for w in gl.nodes().windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let gl = GaussLegendre::new(7);
        for deg in 0..14 {
            let f = |x: f64| Complex64::new(x.powi(deg), 0.0);
            let got = gl.integrate(&f, 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((got.re - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // integral of 1/(1e-4 + x^2) on [-1, 1] = 2/sqrt(eps) * atan(1/sqrt(eps))
        let eps = 1e-4f64;
        let f = |x: f64| Complex64::new(1.0 / (eps + x * x), 0.0);
        let q = adaptive_gauss_legendre(f, -1.0, 1.0, &[], 1e-10, 1000, QuadRule::GaussLegendre15)
            .unwrap();
        let exact = 2.0 / eps.sqrt() * (1.0 / eps.sqrt()).atan();
        assert!((q.value.re - exact).abs() < 1e-8);
    }

    #[test]
    fn refinement_cap_reports_best_estimate() {
        let f = |x: f64| Complex64::new((1.0 / (x + 1e-9)).sin(), 0.0);
        let r = adaptive_gauss_legendre(f, 0.0, 1.0, &[], 1e-14, 3, QuadRule::GaussLegendre7);
        match r {
            Err(ZetaError::Accuracy { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }
}
