//! Full-precision decimal formatting for the file formats.
//!
//! Every float the tool writes must read back as the identical `f64` (and
//! carry at least nine significant digits), so values are printed in plain
//! positional decimal with 17+ significant digits, enough to pin down any
//! double exactly.

/// Formats a finite `f64` so that `s.parse::<f64>()` returns it exactly.
///
/// # Panics
///
/// Panics on NaN or infinity; the file formats only carry finite values.
pub fn format_f64_full(x: f64) -> String {
    assert!(x.is_finite(), "file formats carry finite numbers only");
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".to_string()
        } else {
            "0.0".to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    // 18 significant digits nominally; never fewer than 17 even if the
    // floor(log10) estimate is off by one at a power of ten.
    let frac_digits = (17 - magnitude).max(1) as usize;
    format!("{x:.frac_digits$}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use mrtime_core::rng::SplitMix64;

    fn significant_digits(s: &str) -> usize {
        s.trim_start_matches('-')
            .chars()
            .filter(|c| c.is_ascii_digit())
            .collect::<String>()
            .trim_start_matches('0')
            .len()
    }

    #[test]
    fn spot_values() {
        assert_eq!(format_f64_full(0.0), "0.0");
        assert_eq!(format_f64_full(-0.0), "-0.0");
        assert_eq!(format_f64_full(10.5), "10.5000000000000000");
        assert_eq!(format_f64_full(-0.05), "-0.0500000000000000028");
    }

    #[test]
    fn round_trips_exactly_and_keeps_nine_digits() {
        let mut rng = SplitMix64::new(12021);
        let mut checked = 0;
        while checked < 5_000 {
            let bits = rng.next_u64();
            let x = f64::from_bits(bits);
            if !x.is_finite() {
                continue;
            }
            checked += 1;
            let s = format_f64_full(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x:e} -> {s}");
            if x != 0.0 {
                assert!(significant_digits(&s) >= 9, "{x:e} -> {s}");
            }
        }
    }

    #[test]
    fn round_trips_typical_times() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..2_000 {
            let x = rng.next_f64() * 1e4 + 1e-9;
            let s = format_f64_full(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
