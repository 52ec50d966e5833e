//! C-style `%.17g` formatting: 17 significant digits, trailing zeros
//! trimmed, two-digit exponent. Seventeen digits round-trip f64 exactly.

pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
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
    const P: i32 = 17;
    let sci = format!("{x:e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if exp >= -4 && exp < P {
        let prec = (P - 1 - exp).max(0) as usize;
        let mut s = format!("{x:.prec$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        let mut mant = format!("{x:.*e}", (P - 1) as usize);
        let epos = mant.find('e').unwrap();
        let exp2: i32 = mant[epos + 1..].parse().unwrap();
        mant.truncate(epos);
        if mant.contains('.') {
            while mant.ends_with('0') {
                mant.pop();
            }
            if mant.ends_with('.') {
                mant.pop();
            }
        }
        format!("{}e{}{:02}", mant, if exp2 < 0 { "-" } else { "+" }, exp2.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::g17;

    #[test]
    fn matches_printf_g_conventions() {
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(0.0001), "0.0001");
        // 1e-5 is not exactly representable; 17 digits expose that
        assert_eq!(g17(0.00001), "1.0000000000000001e-05");
        assert_eq!(g17(3.0517578125e-05), "3.0517578125e-05");
        assert_eq!(g17(1e16), "10000000000000000");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(1.5e-300), "1.5000000000000001e-300");
        assert_eq!(g17(0.5e-300), "5.0000000000000001e-301");
        assert_eq!(g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
    }

    #[test]
    fn round_trips_exactly() {
        for &x in &[
            std::f64::consts::PI,
            1.0 / 3.0,
            -4.940656458412465e-324,
            1.7976931348623157e308,
            123456.78901234567,
            2.2250738585072014e-308,
        ] {
            let s = g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
    }
}
