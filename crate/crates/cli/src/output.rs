//! Output formatting.

use std::fs;
use std::io::Write;
use std::path::Path;

use entbound::Result;

/// `x` with 12 significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn opt_sig12(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

pub fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(0.7), "0.7");
        assert_eq!(sig12(0.7000000000000002), "0.7");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(-1.0e-17), "-1.00000000000e-17");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.0), "0");
    }
}
