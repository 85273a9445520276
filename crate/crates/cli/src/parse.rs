//! Parsers for complex numbers and datum strings given on the command line.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use zetaflow::flow_pde::InitialDatum;

/// Accepts `2`, `-2`, `0.5+14.13i`, `0.5-14.13i`, `3i` and `0.5,14.13`.
pub fn complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let bad = || anyhow!("cannot read {text:?} as a complex number");
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        ));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    Ok(Complex64::new(
        re.parse().map_err(|_| bad())?,
        im.trim_start_matches('+').parse().map_err(|_| bad())?,
    ))
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `const:Z`, `disc:CENTER:RADIUS[:SEED]` or `interval:LO:HI[:SEED]`;
/// a missing seed falls back to `default_seed`.
pub fn datum(text: &str, default_seed: Option<u64>) -> Result<InitialDatum> {
    let parts: Vec<&str> = text.split(':').collect();
    let seed = |i: usize| -> Result<u64> {
        match parts.get(i) {
            Some(s) => s.parse().with_context(|| format!("bad seed {s:?}")),
            None => default_seed.ok_or_else(|| anyhow!("random datum {text:?} needs a seed")),
        }
    };
    let num = |i: usize| -> Result<f64> {
        let s = parts
            .get(i)
            .ok_or_else(|| anyhow!("datum {text:?} is missing fields"))?;
        s.parse()
            .with_context(|| format!("bad number {s:?} in datum"))
    };
    Ok(match parts[0] {
        "const" if parts.len() == 2 => InitialDatum::Constant {
            value: pair(complex(parts[1])?),
        },
        "disc" if (3..=4).contains(&parts.len()) => InitialDatum::DiscRandom {
            center: pair(complex(parts[1])?),
            radius: num(2)?,
            seed: seed(3)?,
            modes: 4,
            fraction: 0.9,
            real: false,
        },
        "interval" if (3..=4).contains(&parts.len()) => InitialDatum::IntervalRandom {
            lo: num(1)?,
            hi: num(2)?,
            seed: seed(3)?,
            modes: 4,
        },
        _ => bail!(
            "unrecognised datum {text:?}; use const:Z, disc:Z:R[:SEED] or interval:LO:HI[:SEED]"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert_eq!(complex("0.5+14.13i").unwrap(), Complex64::new(0.5, 14.13));
        assert_eq!(complex("0.5-14.13i").unwrap(), Complex64::new(0.5, -14.13));
        assert_eq!(complex("-3i").unwrap(), Complex64::new(0.0, -3.0));
        assert_eq!(complex("1e-3+2e-1i").unwrap(), Complex64::new(1e-3, 0.2));
        assert_eq!(complex("2+i").unwrap(), Complex64::new(2.0, 1.0));
        assert_eq!(complex("0.5, 14").unwrap(), Complex64::new(0.5, 14.0));
        assert!(complex("abc").is_err());
    }

    #[test]
    fn datum_forms() {
        assert_eq!(
            datum("const:3", None).unwrap(),
            InitialDatum::Constant { value: [3.0, 0.0] }
        );
        assert!(matches!(
            datum("disc:-2:0.05", Some(0)).unwrap(),
            InitialDatum::DiscRandom { seed: 0, radius, .. } if radius == 0.05
        ));
        assert!(matches!(
            datum("interval:-7.5:-2.5:9", None).unwrap(),
            InitialDatum::IntervalRandom { seed: 9, .. }
        ));
        assert!(datum("disc:-2:0.05", None).is_err());
        assert!(datum("wave:1", None).is_err());
    }
}
