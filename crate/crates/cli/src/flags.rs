//! Value parsers that enforce the simulation caps before any work starts.

use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;

/// Largest `n` for which the `4ⁿ`-point bias transform is allowed.
pub(crate) const MAX_KEY_QUBITS: usize = 14;
/// Largest `n` for dense density-matrix work.
pub(crate) const MAX_DENSE_QUBITS: usize = 10;
/// Largest key set, in bits of `log₂|E|`.
pub(crate) const MAX_SET_BITS: u32 = 26;

pub(crate) const DEFAULT_SEED: u64 = 0x5153_544c;

fn bounded(s: &str, lo: usize, hi: usize, what: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a whole number"))?;
    if v < lo || v > hi {
        return Err(format!("{what} must be in {lo}..={hi}, got {v}"));
    }
    Ok(v)
}

pub(crate) fn key_qubits(s: &str) -> Result<usize, String> {
    bounded(s, 1, MAX_KEY_QUBITS, "qubit count")
}

pub(crate) fn dense_qubits(s: &str) -> Result<usize, String> {
    bounded(s, 1, MAX_DENSE_QUBITS, "qubit count for dense simulation")
}

pub(crate) fn parties(s: &str) -> Result<usize, String> {
    bounded(s, 2, 64, "party count")
}

pub(crate) fn hops(s: &str) -> Result<usize, String> {
    bounded(s, 1, 63, "hop count")
}

pub(crate) fn epsilon(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v > 0.0 && v <= 1.0) {
        return Err(format!("epsilon must be in (0, 1], got {v}"));
    }
    Ok(v)
}

pub(crate) fn epsilon_list(s: &str) -> Result<EpsilonList, String> {
    let values = s.split(',').map(|p| epsilon(p.trim())).collect::<Result<Vec<_>, _>>()?;
    Ok(EpsilonList(values))
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct EpsilonList(pub Vec<f64>);

impl fmt::Display for EpsilonList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Inclusive qubit range: `4`, `1-8`, `1..8` or `1..=8`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct QubitRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for QubitRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (lo, hi) = if let Some((a, b)) = s.split_once("..=") {
            (a, b)
        } else if let Some((a, b)) = s.split_once("..") {
            (a, b)
        } else if let Some((a, b)) = s.split_once('-') {
            (a, b)
        } else {
            (s, s)
        };
        let lo = bounded(lo.trim(), 1, 64, "range start")?;
        let hi = bounded(hi.trim(), 1, 64, "range end")?;
        if lo > hi {
            return Err(format!("empty range {lo}..={hi}"));
        }
        Ok(QubitRange { lo, hi })
    }
}

impl fmt::Display for QubitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

pub(crate) fn taps(s: &str) -> Result<Vec<usize>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| bounded(p.trim(), 1, 63, "tapped hop")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum KeyFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum TableFormat {
    Csv,
    Json,
}

pub(crate) fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_in_all_spellings() {
        for s in ["1-8", "1..8", "1..=8", " 1 - 8 "] {
            assert_eq!(s.parse::<QubitRange>().unwrap(), QubitRange { lo: 1, hi: 8 });
        }
        assert_eq!("4".parse::<QubitRange>().unwrap(), QubitRange { lo: 4, hi: 4 });
        assert!("5-2".parse::<QubitRange>().is_err());
        assert!("0-2".parse::<QubitRange>().is_err());
    }

    #[test]
    fn caps_are_enforced() {
        assert!(key_qubits("14").is_ok());
        assert!(key_qubits("15").is_err());
        assert!(dense_qubits("11").is_err());
        assert!(epsilon("0").is_err());
        assert!(epsilon("1.5").is_err());
        assert_eq!(epsilon_list("1, 0.5").unwrap().0, vec![1.0, 0.5]);
        assert_eq!(taps("1,3").unwrap(), vec![1, 3]);
        assert_eq!(taps("").unwrap(), Vec::<usize>::new());
    }
}
