//! Small helpers shared by the text file formats.

/// Scientific notation with 17 significant digits; parses back to the same
/// `f64` bits.
pub fn format_sample(v: f64) -> String {
    format!("{v:.16e}")
}

/// Splits `key = value`, trimming both sides. Returns `None` without `=`.
pub fn parse_key_value(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k, v.trim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn key_value_parsing() {
        assert_eq!(parse_key_value(" count = 12 "), Some(("count", "12")));
        assert_eq!(parse_key_value("novalue"), None);
        assert_eq!(parse_key_value(" = 3"), None);
    }

    proptest! {
        #[test]
        fn samples_round_trip(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let s = format_sample(v);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
            prop_assert!(!s.contains(','));
        }
    }
}
