//! n-qubit Pauli operators named by 2n-bit keys.
//!
//! A key `(a, b)` names `ι^{a*b} X^a Z^b`, where `a*b` is the mod-2 inner
//! product. Bit `j` of `a` and `b` acts on qubit `j`, and qubit 0 is the
//! most significant bit of an amplitude index, so the integer value of `a`
//! is exactly the index mask that `X^a` flips.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::PureState;

/// Largest qubit count a key can describe (2n bits must fit in a `u64`).
pub const MAX_KEY_QUBITS: usize = 32;

/// Largest qubit count for which dense `2ⁿ×2ⁿ` matrices are materialized.
pub const DENSE_CAP: usize = 10;

#[inline]
pub(crate) fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A fixed-length bit string; character 0 of the text form is the most
/// significant bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    bits: u64,
}

impl BitString {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > 64 || bits & !low_mask(len) != 0 {
            return Err(Error::Parse(format!("{bits:#x} does not fit in {len} bits")));
        }
        Ok(BitString { len, bits })
    }

    pub fn zeros(len: usize) -> Self {
        BitString { len, bits: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn popcount(&self) -> u32 {
        self.bits.count_ones()
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 64 {
            return Err(Error::Parse(format!("bit string too long: {}", s.len())));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::Parse(format!("invalid bit '{c}' in {s:?}"))),
            }
        }
        Ok(BitString { len: s.len(), bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in (0..self.len).rev() {
            f.write_str(if self.bits >> j & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Mod-2 inner product `x*y = Σ x_j y_j mod 2`.
pub fn star(x: &BitString, y: &BitString) -> Result<u8> {
    if x.len != y.len {
        return Err(Error::LengthMismatch(x.len, y.len));
    }
    Ok(parity(x.bits & y.bits))
}

/// Sign of `X^u Z^v (X^a Z^b) Z^v X^u = (-1)^{a*v + b*u} X^a Z^b`.
pub fn symplectic_sign(u: &BitString, v: &BitString, a: &BitString, b: &BitString) -> Result<i8> {
    let n = u.len;
    for s in [v, a, b] {
        if s.len != n {
            return Err(Error::LengthMismatch(n, s.len));
        }
    }
    Ok(sign_of(parity(a.bits & v.bits) ^ parity(b.bits & u.bits)))
}

#[inline]
pub(crate) fn sign_of(bit: u8) -> i8 {
    if bit & 1 == 0 {
        1
    } else {
        -1
    }
}

/// A 2n-bit key `(a, b)` naming one n-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliKey {
    n: usize,
    a: u64,
    b: u64,
}

impl PauliKey {
    pub fn new(n: usize, a: u64, b: u64) -> Result<Self> {
        check_qubits(n)?;
        let mask = low_mask(n);
        if a & !mask != 0 || b & !mask != 0 {
            return Err(Error::Parse(format!("key parts ({a:#x}, {b:#x}) exceed {n} bits")));
        }
        Ok(PauliKey { n, a, b })
    }

    pub fn from_bits(a: &BitString, b: &BitString) -> Result<Self> {
        if a.len != b.len {
            return Err(Error::LengthMismatch(a.len, b.len));
        }
        PauliKey::new(a.len, a.bits, b.bits)
    }

    pub fn identity(n: usize) -> Result<Self> {
        PauliKey::new(n, 0, 0)
    }

    /// Key of the 2n-bit integer `a‖b`.
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        check_qubits(n)?;
        if 2 * n < 64 && index >> (2 * n) != 0 {
            return Err(Error::Parse(format!("index {index:#x} exceeds {} bits", 2 * n)));
        }
        PauliKey::new(n, index >> n, index & low_mask(n))
    }

    /// Single-qubit `X` on `qubit`.
    pub fn x(n: usize, qubit: usize) -> Result<Self> {
        PauliKey::new(n, qubit_mask(n, qubit)?, 0)
    }

    /// Single-qubit `Z` on `qubit`.
    pub fn z(n: usize, qubit: usize) -> Result<Self> {
        PauliKey::new(n, 0, qubit_mask(n, qubit)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// X-part as an amplitude-index mask.
    pub fn a(&self) -> u64 {
        self.a
    }

    /// Z-part as an amplitude-index mask.
    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn a_bits(&self) -> BitString {
        BitString { len: self.n, bits: self.a }
    }

    pub fn b_bits(&self) -> BitString {
        BitString { len: self.n, bits: self.b }
    }

    /// The 2n-bit integer `a‖b`.
    pub fn index(&self) -> u64 {
        (self.a << self.n) | self.b
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `ι^{a*b}` exponent, 0 or 1.
    fn own_phase(&self) -> u8 {
        parity(self.a & self.b)
    }

    pub fn xor(&self, other: &PauliKey) -> Result<PauliKey> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        Ok(PauliKey { n: self.n, a: self.a ^ other.a, b: self.b ^ other.b })
    }

    /// Flips one bit of the 2n-bit string (bit 0 = most significant of `a‖b`).
    pub fn flip_bit(&self, bit: usize) -> Result<PauliKey> {
        if bit >= 2 * self.n {
            return Err(Error::Parse(format!("bit {bit} out of range for n={}", self.n)));
        }
        PauliKey::from_index(self.n, self.index() ^ (1u64 << (2 * self.n - 1 - bit)))
    }

    pub fn hex_width(n: usize) -> usize {
        (2 * n).div_ceil(4)
    }

    /// Lowercase hex of `a‖b`, `ceil(2n/4)` digits.
    pub fn to_hex(&self) -> String {
        format!("{:0width$x}", self.index(), width = Self::hex_width(self.n))
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        check_qubits(n)?;
        let s = s.trim();
        if s.len() != Self::hex_width(n) {
            return Err(Error::Parse(format!(
                "key {s:?} has {} hex digits, expected {} for n={n}",
                s.len(),
                Self::hex_width(n)
            )));
        }
        if !s.bytes().all(|c| c.is_ascii_digit() || (b'a'..=b'f').contains(&c)) {
            return Err(Error::Parse(format!("key {s:?} is not lowercase hex")));
        }
        let index = u64::from_str_radix(s, 16).map_err(|e| Error::Parse(format!("key {s:?}: {e}")))?;
        PauliKey::from_index(n, index)
    }
}

impl fmt::Display for PauliKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(n));
    }
    if n > MAX_KEY_QUBITS {
        return Err(Error::OverCap { n, cap: MAX_KEY_QUBITS });
    }
    Ok(())
}

fn qubit_mask(n: usize, qubit: usize) -> Result<u64> {
    if qubit >= n {
        return Err(Error::Parse(format!("qubit {qubit} out of range for n={n}")));
    }
    Ok(1u64 << (n - 1 - qubit))
}

/// A power of `ι`: 0 → +1, 1 → +i, 2 → −1, 3 → −i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_quarter_turns(k: u8) -> Phase {
        Phase(k & 3)
    }

    pub fn quarter_turns(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) & 3)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// `phase · ι^{a*b} X^a Z^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub key: PauliKey,
    pub phase: Phase,
}

impl PhasedPauli {
    pub fn new(key: PauliKey) -> Self {
        PhasedPauli { key, phase: Phase::ONE }
    }

    pub fn matrix(&self) -> Result<DMatrix<Complex64>> {
        Ok(key_matrix(&self.key)? * self.phase.to_complex())
    }
}

impl From<PauliKey> for PhasedPauli {
    fn from(key: PauliKey) -> Self {
        PhasedPauli::new(key)
    }
}

/// Operator product `p · q` (apply `q` first).
///
/// `ι^{a₁*b₁}X^{a₁}Z^{b₁} · ι^{a₂*b₂}X^{a₂}Z^{b₂} = ι^{a₁*b₁+a₂*b₂}(-1)^{b₁*a₂} X^{a₁⊕a₂}Z^{b₁⊕b₂}`,
/// and the result is re-expressed against the product key's own `ι^{a*b}`.
pub fn compose(p: &PhasedPauli, q: &PhasedPauli) -> Result<PhasedPauli> {
    let key = p.key.xor(&q.key)?;
    let turns = p.key.own_phase() + q.key.own_phase() + 2 * parity(p.key.b & q.key.a) + 4
        - key.own_phase();
    let phase = p.phase * q.phase * Phase::from_quarter_turns(turns);
    Ok(PhasedPauli { key, phase })
}

/// Product of a sequence of operators in application order: the first
/// element acts first, so the result is `ops[k-1] ⋯ ops[0]`.
pub fn compose_sequence<'a, I>(ops: I) -> Result<Option<PhasedPauli>>
where
    I: IntoIterator<Item = &'a PhasedPauli>,
{
    let mut acc: Option<PhasedPauli> = None;
    for op in ops {
        acc = Some(match acc {
            None => *op,
            Some(prev) => compose(op, &prev)?,
        });
    }
    Ok(acc)
}

/// Applies `ι^{a*b} X^a Z^b` to amplitudes in place of a copy.
pub(crate) fn apply_key_amplitudes(amps: &[Complex64], key: &PauliKey) -> Vec<Complex64> {
    let phase = Phase::from_quarter_turns(key.own_phase()).to_complex();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, amp) in amps.iter().enumerate() {
        let i = i as u64;
        let z = if parity(i & key.b) == 1 { -phase } else { phase };
        out[(i ^ key.a) as usize] = amp * z;
    }
    out
}

/// `P_K |ψ⟩` without forming the operator matrix.
pub fn apply_key(state: &PureState, key: &PauliKey) -> Result<PureState> {
    if state.n() != key.n {
        return Err(Error::QubitMismatch(state.n(), key.n));
    }
    PureState::from_amplitudes_unchecked(state.n(), apply_key_amplitudes(state.amplitudes(), key))
}

/// Dense `2ⁿ×2ⁿ` matrix of `ι^{a*b} X^a Z^b`.
pub fn key_matrix(key: &PauliKey) -> Result<DMatrix<Complex64>> {
    if key.n > DENSE_CAP {
        return Err(Error::OverCap { n: key.n, cap: DENSE_CAP });
    }
    let dim = 1usize << key.n;
    let phase = Phase::from_quarter_turns(key.own_phase()).to_complex();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for col in 0..dim as u64 {
        let z = if parity(col & key.b) == 1 { -phase } else { phase };
        m[((col ^ key.a) as usize, col as usize)] = z;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::random_pure_state;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(&bits("101"), &bits("110")).unwrap(), 1);
        assert_eq!(star(&bits("0000"), &bits("1011")).unwrap(), 0);
        assert_eq!(star(&bits("11"), &bits("11")).unwrap(), 0);
        assert_eq!(star(&bits("111"), &bits("111")).unwrap(), 1);
        assert!(matches!(star(&bits("10"), &bits("101")), Err(Error::LengthMismatch(2, 3))));
    }

    #[test]
    fn bitstring_text_roundtrip() {
        assert_eq!(bits("0110").to_string(), "0110");
        assert_eq!(bits("0110").bits(), 6);
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn symplectic_sign_examples() {
        assert_eq!(symplectic_sign(&bits("1"), &bits("0"), &bits("0"), &bits("1")).unwrap(), -1);
        for (a, b) in [("0", "0"), ("1", "0"), ("0", "1"), ("1", "1")] {
            assert_eq!(symplectic_sign(&bits("0"), &bits("0"), &bits(a), &bits(b)).unwrap(), 1);
        }
        assert_eq!(symplectic_sign(&bits("1"), &bits("1"), &bits("1"), &bits("1")).unwrap(), 1);
        assert!(symplectic_sign(&bits("1"), &bits("10"), &bits("1"), &bits("1")).is_err());
    }

    fn conj_sign_by_matrix(u: u64, v: u64, a: u64, b: u64, n: usize) -> i8 {
        let x_u = key_matrix(&PauliKey::new(n, u, 0).unwrap()).unwrap();
        let z_v = key_matrix(&PauliKey::new(n, 0, v).unwrap()).unwrap();
        let x_a = key_matrix(&PauliKey::new(n, a, 0).unwrap()).unwrap();
        let z_b = key_matrix(&PauliKey::new(n, 0, b).unwrap()).unwrap();
        let target = &x_a * &z_b;
        let conj = &x_u * &z_v * &target * &z_v * &x_u;
        let plus = (&conj - &target).iter().all(|z| z.norm() < 1e-12);
        let minus = (&conj + &target).iter().all(|z| z.norm() < 1e-12);
        assert!(plus ^ minus);
        if plus {
            1
        } else {
            -1
        }
    }

    #[test]
    fn symplectic_sign_matches_matrix_conjugation_exhaustively() {
        // All 256 (u,v,a,b) tuples at n = 2, then all 16 at n = 1.
        let mut count = 0;
        for t in 0..256u64 {
            let (u, v, a, b) = (t & 3, t >> 2 & 3, t >> 4 & 3, t >> 6 & 3);
            let s = symplectic_sign(
                &BitString::new(2, u).unwrap(),
                &BitString::new(2, v).unwrap(),
                &BitString::new(2, a).unwrap(),
                &BitString::new(2, b).unwrap(),
            )
            .unwrap();
            assert_eq!(s, conj_sign_by_matrix(u, v, a, b, 2));
            count += 1;
        }
        assert_eq!(count, 256);
        for t in 0..16u64 {
            let (u, v, a, b) = (t & 1, t >> 1 & 1, t >> 2 & 1, t >> 3 & 1);
            let bs = |x| BitString::new(1, x).unwrap();
            assert_eq!(
                symplectic_sign(&bs(u), &bs(v), &bs(a), &bs(b)).unwrap(),
                conj_sign_by_matrix(u, v, a, b, 1)
            );
        }
    }

    #[test]
    fn symplectic_sign_matches_matrix_conjugation_sampled_n2() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, 0, 0);
        for _ in 0..4096 {
            let (u, v, a, b): (u64, u64, u64, u64) =
                (rng.random_range(0..4), rng.random_range(0..4), rng.random_range(0..4), rng.random_range(0..4));
            let bs = |x| BitString::new(2, x).unwrap();
            assert_eq!(
                symplectic_sign(&bs(u), &bs(v), &bs(a), &bs(b)).unwrap(),
                conj_sign_by_matrix(u, v, a, b, 2)
            );
        }
    }

    #[test]
    fn key_matrix_examples() {
        let id = key_matrix(&PauliKey::identity(1).unwrap()).unwrap();
        assert_eq!(id, DMatrix::identity(2, 2));
        let y = key_matrix(&PauliKey::new(1, 1, 1).unwrap()).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(y, expected);
        assert!(matches!(
            key_matrix(&PauliKey::identity(11).unwrap()),
            Err(Error::OverCap { n: 11, cap: 10 })
        ));
    }

    #[test]
    fn key_matrices_are_hermitian_involutions() {
        for n in 1..=3 {
            for idx in 0..(1u64 << (2 * n)) {
                let m = key_matrix(&PauliKey::from_index(n, idx).unwrap()).unwrap();
                let dim = 1 << n;
                assert!((&m - m.adjoint()).iter().all(|z| z.norm() < 1e-12));
                assert!((&m * &m - DMatrix::<Complex64>::identity(dim, dim)).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn apply_key_examples() {
        let zero = PureState::basis(1, 0).unwrap();
        let flipped = apply_key(&zero, &PauliKey::x(1, 0).unwrap()).unwrap();
        assert_eq!(flipped.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::from_amplitudes(1, vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let minus = apply_key(&plus, &PauliKey::z(1, 0).unwrap()).unwrap();
        assert_eq!(minus.amplitudes(), &[c(h, 0.0), c(-h, 0.0)]);

        let psi = random_pure_state(3, 5).unwrap();
        let key = PauliKey::new(3, 0b101, 0b011).unwrap();
        let twice = apply_key(&apply_key(&psi, &key).unwrap(), &key).unwrap();
        assert!((psi.fidelity(&twice).unwrap() - 1.0).abs() < 1e-12);

        assert!(apply_key(&psi, &PauliKey::identity(2).unwrap()).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = PureState::basis(3, 0).unwrap();
        let out = apply_key(&s, &PauliKey::x(3, 0).unwrap()).unwrap();
        assert!((out.amplitudes()[0b100].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn key_matrix_agrees_with_apply_key() {
        for trial in 0..100 {
            let n = 1 + trial % 4;
            let psi = random_pure_state(n, 1000 + trial as u64).unwrap();
            let key = PauliKey::from_index(n, (trial as u64 * 2654435761) % (1 << (2 * n))).unwrap();
            let fast = apply_key(&psi, &key).unwrap();
            let dense = key_matrix(&key).unwrap() * nalgebra::DVector::from_column_slice(psi.amplitudes());
            let diff = fast
                .amplitudes()
                .iter()
                .zip(dense.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "trial {trial}: {diff}");
        }
    }

    #[test]
    fn compose_examples() {
        let x = PhasedPauli::new(PauliKey::x(1, 0).unwrap());
        let z = PhasedPauli::new(PauliKey::z(1, 0).unwrap());
        let xx = compose(&x, &x).unwrap();
        assert!(xx.key.is_identity());
        assert_eq!(xx.phase, Phase::ONE);

        let zx = compose(&z, &x).unwrap();
        let xz = compose(&x, &z).unwrap();
        assert_eq!(zx.key, xz.key);
        assert_eq!(zx.phase * Phase::MINUS_ONE, xz.phase);

        assert!(compose(&x, &PhasedPauli::new(PauliKey::x(2, 0).unwrap())).is_err());
    }

    #[test]
    fn three_key_product_with_zero_xor_is_a_multiple_of_identity() {
        // X, Z, Y: the keys XOR to zero; the product Y·Z·X is +i·1, so the
        // phase is exactly reported and need not be real.
        let x = PhasedPauli::new(PauliKey::new(1, 1, 0).unwrap());
        let z = PhasedPauli::new(PauliKey::new(1, 0, 1).unwrap());
        let y = PhasedPauli::new(PauliKey::new(1, 1, 1).unwrap());
        let prod = compose_sequence([&x, &z, &y]).unwrap().unwrap();
        assert!(prod.key.is_identity());
        assert_eq!(prod.phase, Phase::I);
        let dense = y.matrix().unwrap() * z.matrix().unwrap() * x.matrix().unwrap();
        assert!((dense - DMatrix::<Complex64>::identity(2, 2) * c(0.0, 1.0)).iter().all(|v| v.norm() < 1e-12));

        // Pairwise-commuting keys give a real phase.
        let z2 = PhasedPauli::new(PauliKey::new(2, 0, 0b11).unwrap());
        let zi = PhasedPauli::new(PauliKey::new(2, 0, 0b10).unwrap());
        let iz = PhasedPauli::new(PauliKey::new(2, 0, 0b01).unwrap());
        let prod = compose_sequence([&z2, &zi, &iz]).unwrap().unwrap();
        assert!(prod.key.is_identity());
        assert!(prod.phase.is_real());
    }

    #[test]
    fn hex_form() {
        let k = PauliKey::new(4, 0b1000, 0b0001).unwrap();
        assert_eq!(k.to_hex(), "81");
        assert_eq!(PauliKey::from_hex(4, "81").unwrap(), k);
        let k1 = PauliKey::new(1, 1, 0).unwrap();
        assert_eq!(k1.to_hex(), "2");
        assert_eq!(PauliKey::new(3, 0b111, 0b111).unwrap().to_hex(), "3f");
        assert!(PauliKey::from_hex(4, "8").is_err());
        assert!(PauliKey::from_hex(4, "8G").is_err());
        assert!(PauliKey::from_hex(4, "8A").is_err());
        assert!(PauliKey::from_hex(1, "4").is_err());
    }

    #[test]
    fn flip_bit_counts_from_the_most_significant_end() {
        let k = PauliKey::identity(2).unwrap();
        assert_eq!(k.flip_bit(0).unwrap(), PauliKey::new(2, 0b10, 0).unwrap());
        assert_eq!(k.flip_bit(3).unwrap(), PauliKey::new(2, 0, 0b01).unwrap());
        assert!(k.flip_bit(4).is_err());
    }

    fn phased(n: usize) -> impl Strategy<Value = PhasedPauli> {
        (0..(1u64 << (2 * n)), 0u8..4).prop_map(move |(idx, ph)| PhasedPauli {
            key: PauliKey::from_index(n, idx).unwrap(),
            phase: Phase::from_quarter_turns(ph),
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative(p in phased(3), q in phased(3), r in phased(3)) {
            let left = compose(&compose(&p, &q).unwrap(), &r).unwrap();
            let right = compose(&p, &compose(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn compose_matches_matrix_product(p in phased(2), q in phased(2)) {
            let fast = compose(&p, &q).unwrap().matrix().unwrap();
            let dense = p.matrix().unwrap() * q.matrix().unwrap();
            prop_assert!((fast - dense).iter().all(|z| z.norm() < 1e-12));
        }

        #[test]
        fn apply_key_preserves_norm(idx in 0u64..4096, seed in any::<u64>()) {
            let psi = random_pure_state(6, seed).unwrap();
            let out = apply_key(&psi, &PauliKey::from_index(6, idx).unwrap()).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn hex_roundtrip(n in 1usize..=12, raw in any::<u64>()) {
            let key = PauliKey::from_index(n, raw & low_mask(2 * n)).unwrap();
            prop_assert_eq!(PauliKey::from_hex(n, &key.to_hex()).unwrap(), key);
        }
    }
}
