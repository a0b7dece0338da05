//! Number formatting for CSV cells and manifests.

/// Formats `x` with 9 significant digits in the style of C's `%.9g`:
/// trailing zeros dropped, exponent form outside `[1e-4, 1e9)`, and
/// infinities as `inf`.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let decimals = (8 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::real;

    #[test]
    fn matches_printf_g9() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.3, "0.3"),
            (1.0 / 3.0, "0.333333333"),
            (8e8, "800000000"),
            (1e9, "1e+09"),
            (123456789.4, "123456789"),
            (1234567891.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (f64::INFINITY, "inf"),
            (999999999.6, "1e+09"),
            (2.0 / 3.0, "0.666666667"),
        ];
        for (x, want) in cases {
            assert_eq!(real(x), want, "{x}");
        }
    }
}
