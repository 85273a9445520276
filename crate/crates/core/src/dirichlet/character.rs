//! Dirichlet characters as validated period-m value tables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, ZetaError};

const TOL: f64 = 1e-12;

/// A Dirichlet character χ_m stored as χ(1), …, χ(m); the last entry is
/// χ(m) = χ(0 mod m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCharacter", into = "RawCharacter")]
pub struct CharacterTable {
    period: usize,
    values: Vec<Complex64>,
    is_principal: bool,
    is_real: bool,
}

/// On-disk form: `{"period": m, "values": [[re, im], …]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawCharacter {
    pub period: usize,
    pub values: Vec<[f64; 2]>,
}

impl TryFrom<RawCharacter> for CharacterTable {
    type Error = ZetaError;

    fn try_from(raw: RawCharacter) -> Result<Self> {
        let values = raw
            .values
            .iter()
            .map(|v| Complex64::new(v[0], v[1]))
            .collect();
        validate_character(raw.period, values)
    }
}

impl From<CharacterTable> for RawCharacter {
    fn from(c: CharacterTable) -> Self {
        RawCharacter {
            period: c.period,
            values: c.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn totient(m: usize) -> usize {
    (1..=m).filter(|&r| gcd(r, m) == 1).count()
}

impl CharacterTable {
    pub fn period(&self) -> usize {
        self.period
    }

    /// Values χ(1), …, χ(m).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_principal(&self) -> bool {
        self.is_principal
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    /// χ(n) for any integer n, by periodicity.
    pub fn at(&self, n: i64) -> Complex64 {
        let m = self.period as i64;
        let r = n.rem_euclid(m);
        if r == 0 {
            self.values[self.period - 1]
        } else {
            self.values[(r - 1) as usize]
        }
    }

    /// Σ_{r=1}^{m} χ(r): φ(m) for the principal character, 0 otherwise.
    pub fn value_sum(&self) -> f64 {
        if self.is_principal {
            totient(self.period) as f64
        } else {
            0.0
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCharacter = serde_json::from_str(text)?;
        CharacterTable::try_from(raw)
    }
}

/// Checks a raw period-m table against the defining properties of a
/// Dirichlet character and caches the principal/real flags.
pub fn validate_character(period: usize, values: Vec<Complex64>) -> Result<CharacterTable> {
    let m = period;
    if m == 0 {
        return Err(ZetaError::Validation("period must be positive".into()));
    }
    if values.len() != m {
        return Err(ZetaError::Validation(format!(
            "expected {m} values, got {}",
            values.len()
        )));
    }
    if values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(ZetaError::Validation("non-finite value".into()));
    }
    let phi = totient(m) as i32;
    let mut clean = values.clone();
    for r in 1..=m {
        let v = values[r - 1];
        if gcd(r, m) > 1 {
            if v.norm() > TOL {
                return Err(ZetaError::Validation(format!(
                    "residue {r} shares a factor with {m} but chi({r}) = {v}"
                )));
            }
            clean[r - 1] = Complex64::new(0.0, 0.0);
        } else {
            if (v.norm() - 1.0).abs() > TOL {
                return Err(ZetaError::Validation(format!(
                    "chi({r}) = {v} is not a root of unity"
                )));
            }
            if (v.powi(phi) - 1.0).norm() > TOL * phi as f64 {
                return Err(ZetaError::Validation(format!(
                    "chi({r}) = {v} is not a root of unity"
                )));
            }
        }
    }
    let one = clean[0];
    if (one - 1.0).norm() > TOL {
        return Err(ZetaError::Validation(format!("chi(1) = {one}, expected 1")));
    }
    let at = |n: usize| {
        let r = n % m;
        if r == 0 {
            clean[m - 1]
        } else {
            clean[r - 1]
        }
    };
    for a in 1..=m {
        for b in a..=m {
            let lhs = at(a * b);
            let rhs = at(a) * at(b);
            if (lhs - rhs).norm() > TOL {
                return Err(ZetaError::Validation(format!(
                    "multiplicativity fails for (a, b) = ({a}, {b}): chi(ab) = {lhs}, chi(a)chi(b) = {rhs}"
                )));
            }
        }
    }
    let is_principal = (1..=m).all(|r| gcd(r, m) > 1 || (clean[r - 1] - 1.0).norm() <= TOL);
    let is_real = clean.iter().all(|v| v.im.abs() < TOL);
    if is_real {
        for v in clean.iter_mut() {
            v.im = 0.0;
        }
    }
    Ok(CharacterTable {
        period: m,
        values: clean,
        is_principal,
        is_real,
    })
}

/// The principal character mod m: 1 on residues coprime to m, 0 elsewhere.
pub fn principal_character(m: usize) -> CharacterTable {
    assert!(m >= 1, "period must be positive");
    let values = (1..=m)
        .map(|r| Complex64::new(if gcd(r, m) == 1 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    CharacterTable {
        period: m,
        values,
        is_principal: true,
        is_real: true,
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Smallest primitive root modulo the prime p.
pub fn primitive_root(p: usize) -> Result<usize> {
    if !is_prime(p) {
        return Err(ZetaError::Domain(format!("{p} is not prime")));
    }
    if p == 2 {
        return Ok(1);
    }
    let order = p - 1;
    let factors: Vec<usize> = (2..=order)
        .filter(|&q| order.is_multiple_of(q) && is_prime(q))
        .collect();
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .ok_or_else(|| ZetaError::Domain(format!("no primitive root mod {p}")))
}

fn pow_mod(mut base: usize, mut exp: usize, m: usize) -> usize {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// All p − 1 characters modulo a prime p, indexed by j so that
/// χ_j(g^k) = e^{2πijk/(p−1)} for the smallest primitive root g.
/// Index 0 is the principal character.
pub fn prime_characters(p: usize) -> Result<Vec<CharacterTable>> {
    let g = primitive_root(p)?;
    let order = p - 1;
    let mut log = vec![0usize; p];
    let mut x = 1usize;
    for k in 0..order {
        log[x] = k;
        x = x * g % p;
    }
    (0..order)
        .map(|j| {
            let values = (1..=p)
                .map(|r| {
                    if r == p {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let k = (j * log[r]) % order;
                        if 2 * k == order {
                            Complex64::new(-1.0, 0.0)
                        } else if k == 0 {
                            Complex64::new(1.0, 0.0)
                        } else if 4 * k == order {
                            Complex64::new(0.0, 1.0)
                        } else if 4 * k == 3 * order {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::from_polar(1.0, 2.0 * PI * k as f64 / order as f64)
                        }
                    }
                })
                .collect();
            validate_character(p, values)
        })
        .collect()
}
