//! L_m(s) = m^{−s} Σ_r χ(r) ζ(s, r/m) with the pole residues combined
//! before any floating-point evaluation.

use num_complex::Complex64;
use serde::Serialize;

use super::character::{principal_character, CharacterTable};
use crate::error::{Result, ZetaError};
use crate::special::{hurwitz_regular, hurwitz_regular_deriv, riemann_zeta, EvalConfig, EvalPath};

/// A character bundled with its evaluation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct LFunctionHandle {
    character: CharacterTable,
    has_pole: bool,
    eval_cfg: EvalConfig,
}

impl LFunctionHandle {
    pub fn new(character: CharacterTable, eval_cfg: EvalConfig) -> Result<Self> {
        eval_cfg.validate()?;
        let has_pole = character.is_principal();
        Ok(LFunctionHandle {
            character,
            has_pole,
            eval_cfg,
        })
    }

    /// The Riemann zeta function, L for the trivial character mod 1.
    pub fn zeta(eval_cfg: EvalConfig) -> Result<Self> {
        Self::new(principal_character(1), eval_cfg)
    }

    pub fn character(&self) -> &CharacterTable {
        &self.character
    }

    pub fn has_pole(&self) -> bool {
        self.has_pole
    }

    pub fn eval_cfg(&self) -> &EvalConfig {
        &self.eval_cfg
    }

    pub fn period(&self) -> usize {
        self.character.period()
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        l_eval(self, s)
    }

    pub fn deriv(&self, s: Complex64) -> Result<Complex64> {
        l_eval_deriv(self, s)
    }
}

/// Value with accumulated error estimate; `path` is `None` when the
/// Hurwitz terms did not all use the same path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LEvaluation {
    pub value: Complex64,
    pub error: f64,
    pub path: Option<EvalPath>,
}

fn pole_guard(l: &LFunctionHandle, s: Complex64) -> Result<()> {
    if l.has_pole && s.re == 1.0 && s.im == 0.0 {
        Err(ZetaError::Pole)
    } else {
        Ok(())
    }
}

/// Returns (Σ χ(r)·reg(s, r/m), error, path) over the nonzero residues.
fn weighted_regular<F>(l: &LFunctionHandle, eval: F) -> Result<(Complex64, f64, Option<EvalPath>)>
where
    F: Fn(f64) -> Result<crate::special::Evaluation>,
{
    let m = l.period();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut path: Option<Option<EvalPath>> = None;
    for (i, chi) in l.character.values().iter().enumerate() {
        if chi.re == 0.0 && chi.im == 0.0 {
            continue;
        }
        let alpha = (i + 1) as f64 / m as f64;
        let e = eval(alpha)?;
        acc += chi * e.value;
        err += e.error;
        path = match path {
            None => Some(Some(e.path)),
            Some(Some(p)) if p == e.path => Some(Some(p)),
            _ => Some(None),
        };
    }
    Ok((acc, err, path.flatten()))
}

pub fn l_eval_detailed(l: &LFunctionHandle, s: Complex64) -> Result<LEvaluation> {
    pole_guard(l, s)?;
    let cfg = &l.eval_cfg;
    let m = l.period();
    if m == 1 {
        let e = crate::special::hurwitz_zeta_detailed(s, 1.0, cfg)?;
        return Ok(LEvaluation {
            value: e.value,
            error: e.error,
            path: Some(e.path),
        });
    }
    let (reg, err, path) = weighted_regular(l, |a| hurwitz_regular(s, a, cfg))?;
    let residue = l.character.value_sum();
    let mut inner = reg;
    if residue != 0.0 {
        inner += residue / (s - 1.0);
    }
    let scale = (-s * (m as f64).ln()).exp();
    Ok(LEvaluation {
        value: scale * inner,
        error: scale.norm() * err,
        path,
    })
}

/// L_m(s). For non-principal characters the residues Σχ(r) cancel exactly
/// and L_m(1) is finite.
pub fn l_eval(l: &LFunctionHandle, s: Complex64) -> Result<Complex64> {
    if l.period() == 1 {
        return riemann_zeta(s, &l.eval_cfg);
    }
    Ok(l_eval_detailed(l, s)?.value)
}

/// dL_m/ds.
pub fn l_eval_deriv(l: &LFunctionHandle, s: Complex64) -> Result<Complex64> {
    pole_guard(l, s)?;
    let cfg = &l.eval_cfg;
    let m = l.period();
    let lm = (m as f64).ln();
    let (reg, _, _) = weighted_regular(l, |a| hurwitz_regular(s, a, cfg))?;
    let (dreg, _, _) = weighted_regular(l, |a| hurwitz_regular_deriv(s, a, cfg))?;
    let residue = l.character.value_sum();
    let (mut g, mut dg) = (reg, dreg);
    if residue != 0.0 {
        let q = 1.0 / (s - 1.0);
        g += residue * q;
        dg -= residue * q * q;
    }
    Ok((-s * lm).exp() * (dg - lm * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::character::validate_character;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn chi4() -> CharacterTable {
        validate_character(4, vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn principal_mod_two_at_two() {
        let l = LFunctionHandle::new(principal_character(2), EvalConfig::default()).unwrap();
        assert!(l.has_pole());
        assert!((l_eval(&l, c(2.0, 0.0)).unwrap().re - PI * PI / 8.0).abs() < 1e-10);
    }

    #[test]
    fn mod_four_at_one_is_leibniz() {
        let l = LFunctionHandle::new(chi4(), EvalConfig::default()).unwrap();
        assert!(!l.has_pole());
        let v = l_eval(&l, c(1.0, 0.0)).unwrap();
        assert!((v.re - PI / 4.0).abs() < 1e-10 && v.im.abs() < 1e-15);
    }

    #[test]
    fn pole_only_for_principal() {
        let z = LFunctionHandle::zeta(EvalConfig::default()).unwrap();
        assert!(matches!(l_eval(&z, c(1.0, 0.0)), Err(ZetaError::Pole)));
        let p6 = LFunctionHandle::new(principal_character(6), EvalConfig::default()).unwrap();
        assert!(matches!(l_eval(&p6, c(1.0, 0.0)), Err(ZetaError::Pole)));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let l = LFunctionHandle::new(chi4(), EvalConfig::default()).unwrap();
        let s = c(0.7, 3.0);
        let h = 1e-5;
        let fd = (l_eval(&l, s + h).unwrap() - l_eval(&l, s - h).unwrap()) / (2.0 * h);
        assert!((fd - l_eval_deriv(&l, s).unwrap()).norm() < 1e-6);
        let p = LFunctionHandle::new(principal_character(3), EvalConfig::default()).unwrap();
        let fd = (l_eval(&p, s + h).unwrap() - l_eval(&p, s - h).unwrap()) / (2.0 * h);
        assert!((fd - l_eval_deriv(&p, s).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn detailed_reports_common_path() {
        let l = LFunctionHandle::new(chi4(), EvalConfig::default()).unwrap();
        let e = l_eval_detailed(&l, c(9.0, 0.0)).unwrap();
        assert_eq!(e.path, Some(EvalPath::EulerMaclaurin));
        assert!(e.error < 1e-10);
    }
}
