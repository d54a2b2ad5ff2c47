//! Fixed-precision number formatting shared by the text formats.

/// Format like C's `%.17g`: 17 significant digits, positional notation when the
/// decimal exponent lies in `[-5, 17)`, trailing zeros removed. Parsing the
/// result with `str::parse::<f64>` recovers the value exactly.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            let (int, frac) = digits.split_at(split);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let (first, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        let mant = if rest.is_empty() { first.to_string() } else { format!("{first}.{rest}") };
        format!("{sign}{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1234.5), "1234.5");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(-2.5e20), "-2.5e+20");
        assert_eq!(g17(0.00012), "0.00012");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = g17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
