use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliKey;

/// Largest `2n` for which the full multiplicity vector over `{0,1}^{2n}` is built.
pub const BIAS_CAP_BITS: usize = 28;

/// Certification metadata carried with a key set file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KeySetMeta {
    pub epsilon: Option<f64>,
    pub certified: bool,
    pub beta_max: Option<f64>,
}

/// An ordered multiset `E ⊂ {0,1}^{2n}` of keys.
#[derive(Clone, Debug, PartialEq)]
pub struct KeySet {
    n: usize,
    keys: Vec<PauliKey>,
    unique: bool,
    pub meta: KeySetMeta,
}

impl KeySet {
    pub fn new(n: usize, keys: Vec<PauliKey>) -> Result<Self> {
        if keys.is_empty() {
            return Err(Error::EmptyKeySet);
        }
        if let Some(bad) = keys.iter().find(|k| k.n() != n) {
            return Err(Error::QubitMismatch(n, bad.n()));
        }
        let unique = keys.iter().collect::<BTreeSet<_>>().len() == keys.len();
        Ok(KeySet { n, keys, unique, meta: KeySetMeta::default() })
    }

    /// Every key in `{0,1}^{2n}`, in index order.
    pub fn full(n: usize) -> Result<Self> {
        if 2 * n > BIAS_CAP_BITS {
            return Err(Error::OverCap { n, cap: BIAS_CAP_BITS / 2 });
        }
        let keys = (0..1u64 << (2 * n)).map(|i| PauliKey::from_index(n, i)).collect::<Result<_>>()?;
        KeySet::new(n, keys)
    }

    pub fn singleton(key: PauliKey) -> Self {
        KeySet { n: key.n(), keys: vec![key], unique: true, meta: KeySetMeta::default() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `s = |E|`, counting repeats.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[PauliKey] {
        &self.keys
    }

    pub fn is_unique(&self) -> bool {
        self.unique
    }

    pub(crate) fn check_bias_cap(&self) -> Result<()> {
        if 2 * self.n > BIAS_CAP_BITS {
            return Err(Error::OverCap { n: self.n, cap: BIAS_CAP_BITS / 2 });
        }
        Ok(())
    }

    /// Multiplicity of each key over `{0,1}^{2n}`.
    pub fn multiplicities(&self) -> Result<Vec<i64>> {
        self.check_bias_cap()?;
        let mut counts = vec![0i64; 1 << (2 * self.n)];
        for k in &self.keys {
            counts[k.index() as usize] += 1;
        }
        Ok(counts)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = KeySetFile {
            n: self.n,
            epsilon: self.meta.epsilon,
            certified: self.meta.certified,
            beta_max: self.meta.beta_max,
            keys: self.keys.iter().map(PauliKey::to_hex).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KeySetFile = serde_json::from_str(text)?;
        let keys = file.keys.iter().map(|h| PauliKey::from_hex(file.n, h)).collect::<Result<_>>()?;
        let mut set = KeySet::new(file.n, keys)?;
        set.meta = KeySetMeta { epsilon: file.epsilon, certified: file.certified, beta_max: file.beta_max };
        Ok(set)
    }

    /// One hex key per line, with an `# n = <qubits>` header comment.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n = {}\n", self.n);
        if let Some(eps) = self.meta.epsilon {
            let _ = writeln!(out, "# epsilon = {eps}");
        }
        if let Some(beta) = self.meta.beta_max {
            let _ = writeln!(out, "# beta_max = {beta}");
        }
        let _ = writeln!(out, "# certified = {}", self.meta.certified);
        for k in &self.keys {
            out.push_str(&k.to_hex());
            out.push('\n');
        }
        out
    }

    /// Parses the plain-text form. `n` comes from an `# n = …` comment or,
    /// failing that, from `n_hint`.
    pub fn from_text(text: &str, n_hint: Option<usize>) -> Result<Self> {
        let mut n = None;
        let mut meta = KeySetMeta::default();
        let mut hexes = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    let v = v.trim();
                    let bad = |what: &str| Error::Parse(format!("line {}: bad {what} {v:?}", lineno + 1));
                    match k.trim() {
                        "n" => n = Some(v.parse().map_err(|_| bad("n"))?),
                        "epsilon" => meta.epsilon = Some(v.parse().map_err(|_| bad("epsilon"))?),
                        "beta_max" => meta.beta_max = Some(v.parse().map_err(|_| bad("beta_max"))?),
                        "certified" => meta.certified = v.parse().map_err(|_| bad("certified"))?,
                        _ => {}
                    }
                }
                continue;
            }
            if !line.is_empty() {
                hexes.push((lineno + 1, line));
            }
        }
        let n = n.or(n_hint).ok_or_else(|| Error::Parse("missing '# n = <qubits>' header".into()))?;
        let keys = hexes
            .into_iter()
            .map(|(lineno, h)| {
                PauliKey::from_hex(n, h).map_err(|e| Error::Parse(format!("line {lineno}: {e}")))
            })
            .collect::<Result<_>>()?;
        let mut set = KeySet::new(n, keys)?;
        set.meta = meta;
        Ok(set)
    }
}

#[derive(Serialize, Deserialize)]
struct KeySetFile {
    n: usize,
    epsilon: Option<f64>,
    certified: bool,
    beta_max: Option<f64>,
    keys: Vec<String>,
}
