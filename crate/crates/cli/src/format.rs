//! Number formatting for text output.

/// Six significant digits, `%g` style: fixed notation for moderate
/// exponents, scientific otherwise, trailing zeros trimmed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round first so 999999.5 moves to the next decade before choosing a style.
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `a + bj` with both parts at six significant digits.
pub fn complex6(z: num_complex::Complex64) -> String {
    if z.im == 0.0 {
        return sig6(z.re);
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{} {sign} {}j", sig6(z.re), sig6(z.im.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(-1.0), "-1");
        assert_eq!(sig6(51.8273), "51.8273");
        assert_eq!(sig6(51.82729), "51.8273");
        assert_eq!(sig6(0.786151377), "0.786151");
        assert_eq!(sig6(-15.56302500767), "-15.563");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(1.5e-7), "1.5e-7");
        assert_eq!(sig6(f64::NEG_INFINITY), "-inf");
    }
}
