//! Number formatting for CSV output.

/// Formats like C's `%.15g`: 15 significant digits, trailing zeros removed,
/// exponent notation when the decimal exponent is below -4 or at least 15.
pub fn g15(x: f64) -> String {
    const PRECISION: i32 = 15;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
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
    use super::g15;

    #[test]
    fn matches_printf() {
        let cases = [
            (1.0 / 3.0, "0.333333333333333"),
            (0.2, "0.2"),
            (2.0, "2"),
            (-1.5, "-1.5"),
            (3.90625, "3.90625"),
            (1e-5, "1e-05"),
            (1.234e-7, "1.234e-07"),
            (0.0001, "0.0001"),
            (123456789012345.0, "123456789012345"),
            (1e15, "1e+15"),
            (9.9999999999999999, "10"),
            (0.0, "0"),
            (42.0, "42"),
        ];
        for (x, want) in cases {
            assert_eq!(g15(x), want, "{x:e}");
        }
        assert_eq!(g15(f64::NAN), "nan");
    }
}
