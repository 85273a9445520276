//! Plain-text serialisation helpers shared by the flows and the CLI.

use num_complex::Complex64;

/// A float with 17 significant digits, the precision that round-trips
/// every f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row; every float is written by `fmt_f64`.
pub fn complex_series_csv<'a, I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = (f64, &'a Complex64)>,
{
    let mut out = String::from(header);
    out.push('\n');
    for (t, z) in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(t),
            fmt_f64(z.re),
            fmt_f64(z.im)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, std::f64::consts::PI, -1e-300, 6.02214076e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.replace('.', "").len(), 17);
        }
    }

    #[test]
    fn csv_has_header() {
        let z = [Complex64::new(1.0, -2.0)];
        let csv = complex_series_csv("t,re,im", [(0.5, &z[0])]);
        assert_eq!(
            csv,
            "t,re,im\n5.0000000000000000e-1,1.0000000000000000e0,-2.0000000000000000e0\n"
        );
    }
}
