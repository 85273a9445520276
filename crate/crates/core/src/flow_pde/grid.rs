//! Complex fields on a periodic grid and their spectral operators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Result, ZetaError};
use crate::flow_ode::pole_distance;

pub const MIN_POINTS: usize = 16;

/// u(t, ·) sampled on a uniform periodic grid of period `length` per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    shape: Vec<usize>,
    length: f64,
    values: Vec<Complex64>,
    pub time: f64,
}

impl GridField {
    /// `shape` has one entry per axis (1 or 2 axes); values are row-major.
    pub fn new(shape: Vec<usize>, length: f64, values: Vec<Complex64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 2 {
            return Err(ZetaError::Config(format!(
                "{} axes; only 1 or 2 supported",
                shape.len()
            )));
        }
        for &n in &shape {
            if n < MIN_POINTS || !n.is_power_of_two() {
                return Err(ZetaError::Config(format!(
                    "{n} points per axis; need a power of two >= {MIN_POINTS}"
                )));
            }
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(ZetaError::Config(format!(
                "period {length} must be positive"
            )));
        }
        let total: usize = shape.iter().product();
        if values.len() != total {
            return Err(ZetaError::Config(format!(
                "{} values for a grid of {total} points",
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(ZetaError::Config(format!("non-finite value at index {i}")));
        }
        Ok(GridField {
            shape,
            length,
            values,
            time: 0.0,
        })
    }

    pub fn constant(shape: Vec<usize>, length: f64, value: Complex64) -> Result<Self> {
        let total = shape.iter().product();
        Self::new(shape, length, vec![value; total])
    }

    /// Samples `f` at the grid points (x) or (x, y).
    pub fn from_fn<F>(shape: Vec<usize>, length: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let values = grid_points(&shape, length).iter().map(|p| f(p)).collect();
        Self::new(shape, length, values)
    }

    pub fn dims(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replaces the values, keeping the grid; rejects non-finite data.
    pub fn with_values(&self, values: Vec<Complex64>, time: f64) -> Result<Self> {
        let mut f = GridField::new(self.shape.clone(), self.length, values)?;
        f.time = time;
        Ok(f)
    }

    pub(crate) fn same_grid(&self, values: Vec<Complex64>, time: f64) -> Self {
        GridField {
            shape: self.shape.clone(),
            length: self.length,
            values,
            time,
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// inf over the grid of P(u) = |u₁ − 1| + |u₂|, with its index.
    pub fn min_pole_distance(&self) -> (usize, f64) {
        self.values
            .iter()
            .map(|&v| pole_distance(v))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, p)| if p < acc.1 { (i, p) } else { acc },
            )
    }

    /// sup |u|.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max(sup |u₁|, sup |u₂|).
    pub fn y_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re.abs().max(v.im.abs()))
            .fold(0.0, f64::max)
    }

    /// (inf u₁, sup u₁, inf u₂, sup u₂).
    pub fn extrema(&self) -> (f64, f64, f64, f64) {
        self.values.iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), v| (a.min(v.re), b.max(v.re), c.min(v.im), d.max(v.im)),
        )
    }

    /// sup |u − z|.
    pub fn sup_distance_to(&self, z: Complex64) -> f64 {
        self.values
            .iter()
            .map(|v| (v - z).norm())
            .fold(0.0, f64::max)
    }

    /// sup |u − v| over two fields on the same grid.
    pub fn sup_difference(&self, other: &GridField) -> f64 {
        assert_eq!(self.shape, other.shape, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    /// CSV `index,re,im` (1-d) or `ix,iy,re,im` (2-d).
    pub fn to_csv(&self) -> String {
        use crate::output::fmt_f64;
        let mut out = String::new();
        if self.dims() == 1 {
            out.push_str("index,re,im\n");
            for (i, v) in self.values.iter().enumerate() {
                out.push_str(&format!("{i},{},{}\n", fmt_f64(v.re), fmt_f64(v.im)));
            }
        } else {
            out.push_str("ix,iy,re,im\n");
            let ny = self.shape[1];
            for (i, v) in self.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    i / ny,
                    i % ny,
                    fmt_f64(v.re),
                    fmt_f64(v.im)
                ));
            }
        }
        out
    }
}

fn grid_points(shape: &[usize], length: f64) -> Vec<Vec<f64>> {
    match shape {
        [n] => (0..*n)
            .map(|i| vec![length * i as f64 / *n as f64])
            .collect(),
        [nx, ny] => (0..*nx)
            .flat_map(|i| {
                (0..*ny).map(move |j| {
                    vec![
                        length * i as f64 / *nx as f64,
                        length * j as f64 / *ny as f64,
                    ]
                })
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Signed integer frequency of FFT bin `i` out of `n`.
fn frequency(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// FFT plans and Laplacian eigenvalues for one grid geometry.
#[derive(Clone)]
pub struct Spectral {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    /// |k|² per Fourier coefficient, row-major like the field.
    k2: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("shape", &self.shape)
            .finish()
    }
}

impl Spectral {
    pub fn new(field: &GridField) -> Self {
        let mut planner = FftPlanner::new();
        let shape = field.shape.clone();
        let forward = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        let w = 2.0 * PI / field.length;
        let k2 = match shape.as_slice() {
            [n] => (0..*n).map(|i| (w * frequency(i, *n)).powi(2)).collect(),
            [nx, ny] => (0..*nx)
                .flat_map(|i| {
                    (0..*ny).map(move |j| {
                        (w * frequency(i, *nx)).powi(2) + (w * frequency(j, *ny)).powi(2)
                    })
                })
                .collect(),
            _ => unreachable!("grid dimension validated at construction"),
        };
        Spectral {
            shape,
            forward,
            inverse,
            k2,
        }
    }

    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        match self.shape.as_slice() {
            [_] => plans[0].process(data),
            [nx, ny] => {
                for row in data.chunks_mut(*ny) {
                    plans[1].process(row);
                }
                let mut col = vec![Complex64::new(0.0, 0.0); *nx];
                for j in 0..*ny {
                    for i in 0..*nx {
                        col[i] = data[i * ny + j];
                    }
                    plans[0].process(&mut col);
                    for i in 0..*nx {
                        data[i * ny + j] = col[i];
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// Unnormalised forward transform.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut data = values.to_vec();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse transform including the 1/N normalisation.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut data = coeffs.to_vec();
        self.transform(&mut data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
        data
    }

    /// Applies the Fourier multiplier m(|k|²).
    pub fn apply<F>(&self, values: &[Complex64], m: F) -> Vec<Complex64>
    where
        F: Fn(f64) -> f64,
    {
        let mut c = self.forward(values);
        for (v, &k2) in c.iter_mut().zip(&self.k2) {
            *v *= m(k2);
        }
        self.inverse(&c)
    }
}

/// e^{tΔ} on the torus: each mode is damped by e^{−|k|²t}.
pub fn heat_semigroup(field: &GridField, t: f64) -> Result<GridField> {
    if !(t >= 0.0) {
        return Err(ZetaError::Domain(format!(
            "heat semigroup needs t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    let fft = Spectral::new(field);
    let values = fft.apply(field.values(), |k2| (-k2 * t).exp());
    Ok(field.same_grid(values, field.time))
}

/// One cosine mode a·cos(2π k·x/L + phase) of a Fourier datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    /// Wave numbers per axis (one or two entries).
    pub k: Vec<i32>,
    pub amp: [f64; 2],
    #[serde(default)]
    pub phase: f64,
}

fn default_modes() -> usize {
    4
}

fn default_fraction() -> f64 {
    0.9
}

/// Initial data families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialDatum {
    Constant {
        value: [f64; 2],
    },
    FourierModes {
        mean: [f64; 2],
        modes: Vec<FourierMode>,
    },
    /// Random smooth complex datum z0 + r·g(x), g a trigonometric polynomial
    /// with a random mean, sup |g| = 1 and r = fraction·radius.
    DiscRandom {
        center: [f64; 2],
        radius: f64,
        seed: u64,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "default_fraction")]
        fraction: f64,
        #[serde(default)]
        real: bool,
    },
    /// Random smooth real datum whose range is mapped onto
    /// [lo + w/100, hi − w/100], w = hi − lo.
    IntervalRandom {
        lo: f64,
        hi: f64,
        seed: u64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
}

fn random_trig(
    shape: &[usize],
    length: f64,
    modes: usize,
    seed: u64,
    complex: bool,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = modes.max(1) as i32;
    let mut terms: Vec<(Vec<i32>, Complex64, Complex64)> = Vec::new();
    let wave_vectors: Vec<Vec<i32>> = if shape.len() == 1 {
        (0..=kmax).map(|k| vec![k]).collect()
    } else {
        let mut v = Vec::new();
        for kx in 0..=kmax {
            for ky in -kmax..=kmax {
                if (kx == 0 && ky < 0) || kx * kx + ky * ky > kmax * kmax {
                    continue;
                }
                v.push(vec![kx, ky]);
            }
        }
        v
    };
    for k in wave_vectors {
        let norm = (k.iter().map(|x| (x * x) as f64).sum::<f64>())
            .sqrt()
            .max(1.0);
        let mut draw = || {
            let re = rng.gen_range(-1.0..1.0) / norm;
            let im = if complex {
                rng.gen_range(-1.0..1.0) / norm
            } else {
                0.0
            };
            Complex64::new(re, im)
        };
        let a = draw();
        let b = draw();
        terms.push((k, a, b));
    }
    grid_points(shape, length)
        .iter()
        .map(|x| {
            terms
                .iter()
                .map(|(k, a, b)| {
                    let phase: f64 =
                        k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum::<f64>() * 2.0 * PI
                            / length;
                    a * phase.cos() + b * phase.sin()
                })
                .sum()
        })
        .collect()
}

impl InitialDatum {
    pub fn build(&self, shape: Vec<usize>, length: f64) -> Result<GridField> {
        match self {
            InitialDatum::Constant { value } => {
                GridField::constant(shape, length, Complex64::new(value[0], value[1]))
            }
            InitialDatum::FourierModes { mean, modes } => {
                for m in modes {
                    if m.k.len() != shape.len() {
                        return Err(ZetaError::Config(format!(
                            "mode {:?} does not match a {}-d grid",
                            m.k,
                            shape.len()
                        )));
                    }
                }
                let mean = Complex64::new(mean[0], mean[1]);
                GridField::from_fn(shape, length, |x| {
                    mean + modes
                        .iter()
                        .map(|m| {
                            let ph: f64 =
                                m.k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum::<f64>()
                                    * 2.0
                                    * PI
                                    / length
                                    + m.phase;
                            Complex64::new(m.amp[0], m.amp[1]) * ph.cos()
                        })
                        .sum::<Complex64>()
                })
            }
            InitialDatum::DiscRandom {
                center,
                radius,
                seed,
                modes,
                fraction,
                real,
            } => {
                if !(*radius > 0.0) || !(*fraction > 0.0 && *fraction < 1.0) {
                    return Err(ZetaError::Config(
                        "disc radius > 0 and fraction in (0, 1) required".into(),
                    ));
                }
                let g = random_trig(&shape, length, *modes, *seed, !real);
                let sup = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let c = Complex64::new(center[0], center[1]);
                let r = fraction * radius;
                let values = g.iter().map(|v| c + v * (r / sup)).collect();
                GridField::new(shape, length, values)
            }
            InitialDatum::IntervalRandom {
                lo,
                hi,
                seed,
                modes,
            } => {
                if !(lo < hi) {
                    return Err(ZetaError::Config("interval needs lo < hi".into()));
                }
                let g = random_trig(&shape, length, *modes, *seed, false);
                let (gmin, gmax) = g
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                        (a.min(v.re), b.max(v.re))
                    });
                let w = hi - lo;
                let (a, b) = (lo + 0.01 * w, hi - 0.01 * w);
                let values = g
                    .iter()
                    .map(|v| Complex64::new(a + (v.re - gmin) / (gmax - gmin) * (b - a), 0.0))
                    .collect();
                GridField::new(shape, length, values)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        assert!(GridField::constant(vec![8], 1.0, c(0.0, 0.0)).is_err());
        assert!(GridField::constant(vec![24], 1.0, c(0.0, 0.0)).is_err());
        assert!(GridField::constant(vec![16, 16, 16], 1.0, c(0.0, 0.0)).is_err());
        assert!(GridField::new(vec![16], 1.0, vec![c(f64::NAN, 0.0); 16]).is_err());
        let g = GridField::constant(vec![16, 32], 1.0, c(2.0, -1.0)).unwrap();
        assert_eq!(g.len(), 512);
        assert_eq!(g.mean(), c(2.0, -1.0));
        assert_eq!(g.min_pole_distance().1, 2.0);
    }

    #[test]
    fn constant_is_invariant_under_heat() {
        let g = GridField::constant(vec![32], 2.0 * PI, c(3.0, 1.0)).unwrap();
        let h = heat_semigroup(&g, 7.0).unwrap();
        assert!(h.sup_difference(&g) < 1e-14);
    }

    #[test]
    fn eigenmode_decays_at_its_rate() {
        for shape in [vec![32], vec![16, 32]] {
            let l = 3.0;
            let g = GridField::from_fn(shape.clone(), l, |x| {
                Complex64::from_polar(1.5, 2.0 * PI * x[0] / l)
            })
            .unwrap();
            let t = 0.2;
            let h = heat_semigroup(&g, t).unwrap();
            let factor = (-(2.0 * PI / l).powi(2) * t).exp();
            for (a, b) in h.values().iter().zip(g.values()) {
                assert!((a - b * factor).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn two_dimensional_mode_uses_both_wavenumbers() {
        let l = 2.0 * PI;
        let g = GridField::from_fn(vec![16, 16], l, |x| c((x[0] + 2.0 * x[1]).cos(), 0.0)).unwrap();
        let h = heat_semigroup(&g, 0.1).unwrap();
        let factor = (-5.0f64 * 0.1).exp();
        for (a, b) in h.values().iter().zip(g.values()) {
            assert!((a - b * factor).norm() < 1e-13);
        }
    }

    #[test]
    fn random_field_energy_decays() {
        let g = InitialDatum::DiscRandom {
            center: [0.0, 0.0],
            radius: 1.0,
            seed: 3,
            modes: 6,
            fraction: 0.9,
            real: false,
        }
        .build(vec![64], 2.0 * PI)
        .unwrap();
        let energy = |f: &GridField| {
            let m = f.mean();
            f.values().iter().map(|v| (v - m).norm_sqr()).sum::<f64>()
        };
        let h = heat_semigroup(&g, 1.0).unwrap();
        assert!(energy(&h) <= (-2.0f64).exp() * energy(&g) * (1.0 + 1e-12));
        assert!((h.mean() - g.mean()).norm() < 1e-14);
        assert!(heat_semigroup(&g, -1.0).is_err());
    }

    #[test]
    fn random_data_respect_their_ranges() {
        let d = InitialDatum::DiscRandom {
            center: [-2.0, 0.0],
            radius: 0.05,
            seed: 11,
            modes: 4,
            fraction: 0.9,
            real: false,
        };
        let g = d.build(vec![32], 2.0 * PI).unwrap();
        assert!(g.sup_distance_to(c(-2.0, 0.0)) <= 0.045 + 1e-15);
        assert_eq!(g, d.build(vec![32], 2.0 * PI).unwrap());
        let g = InitialDatum::IntervalRandom {
            lo: -7.5,
            hi: -2.5,
            seed: 1,
            modes: 4,
        }
        .build(vec![32], 2.0 * PI)
        .unwrap();
        let (a, b, c2, d2) = g.extrema();
        assert!((a + 7.45).abs() < 1e-12 && (b + 2.55).abs() < 1e-12);
        assert!(c2 == 0.0 && d2 == 0.0);
    }

    #[test]
    fn data_parse_from_json() {
        let d: InitialDatum = serde_json::from_str(
            r#"{"kind":"disc_random","center":[-2,0],"radius":0.05,"seed":7}"#,
        )
        .unwrap();
        assert!(matches!(d, InitialDatum::DiscRandom { modes: 4, .. }));
        let d: InitialDatum = serde_json::from_str(
            r#"{"kind":"fourier_modes","mean":[3,0],"modes":[{"k":[1],"amp":[0.5,0]}]}"#,
        )
        .unwrap();
        let g = d.build(vec![16], 2.0 * PI).unwrap();
        assert!((g.values()[0] - c(3.5, 0.0)).norm() < 1e-15);
        assert!(d.build(vec![16, 16], 2.0 * PI).is_err());
    }
}
