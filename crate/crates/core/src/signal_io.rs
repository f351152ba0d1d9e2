//! Signal files: raw little-endian `f32`, or CSV with one value per line.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn parse_raw_f32(bytes: &[u8]) -> Result<Vec<f32>> {
    if !bytes.len().is_multiple_of(4) {
        return Err(Error::Input(format!(
            "raw f32 data must be a multiple of 4 bytes, got {}",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn to_raw_f32(samples: &[f32]) -> Vec<u8> {
    samples.iter().flat_map(|s| s.to_le_bytes()).collect()
}

pub fn parse_csv(text: &str) -> Result<Vec<f32>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f32>()
                .map_err(|e| Error::Input(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn read_signal(path: &Path) -> Result<Vec<f32>> {
    if is_csv(path) {
        parse_csv(&fs::read_to_string(path)?)
    } else {
        parse_raw_f32(&fs::read(path)?)
    }
}

pub fn write_signal(path: &Path, samples: &[f32]) -> Result<()> {
    if is_csv(path) {
        let mut s = String::with_capacity(samples.len() * 12);
        for v in samples {
            s.push_str(&v.to_string());
            s.push('\n');
        }
        fs::write(path, s)?;
    } else {
        fs::write(path, to_raw_f32(samples))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_and_csv() {
        let v = vec![1.5f32, -0.25, 1e-7];
        assert_eq!(parse_raw_f32(&to_raw_f32(&v)).unwrap(), v);
        assert!(parse_raw_f32(&[0, 0, 0]).is_err());
        assert_eq!(parse_csv("1.5\n\n-0.25\n").unwrap(), vec![1.5, -0.25]);
        assert!(matches!(parse_csv("1\nx\n"), Err(Error::Input(_))));
    }
}
