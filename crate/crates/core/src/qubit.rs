//! Pauli strings, qubit operators and the Jordan-Wigner mapping.
//!
//! Mode `j` maps to qubit `j` with
//! `a_j = I^(j) (X + iY)/2 Z^(N-j-1)`, i.e. the parity string sits on the
//! qubits above `j`. Occupied modes are `|1>`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, Ladder};

/// Coefficients below this magnitude are removed by [`QubitOperator::simplify`].
pub const PRUNE_TOL: f64 = 1e-12;
/// Largest imaginary residue tolerated for operators claimed Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const I_POWERS: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Pauli word on up to 64 qubits in symplectic form: qubit `q` carries X if
/// bit `q` of `x` is set, Z if bit `q` of `z` is set, and Y if both are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64, "at most 64 qubits supported");
        Self { n_qubits, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        p
    }

    /// Word with the given letters on the listed qubits, identity elsewhere.
    pub fn from_sparse(n_qubits: usize, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n_qubits);
        for &(q, l) in letters {
            if q >= n_qubits {
                return Err(Error::Bounds { index: q, limit: n_qubits });
            }
            p.set(q, l);
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn set(&mut self, q: usize, letter: Pauli) {
        let bit = 1u64 << q;
        let (x, z) = letter.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn letter(&self, q: usize) -> Pauli {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Action on a computational basis state: `P|b> = phase |b ^ x>`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        // P = i^{#Y} X^x Z^z
        let k = self.y_count() + 2 * (b & self.z).count_ones();
        (I_POWERS[(k % 4) as usize], b ^ self.x)
    }

    /// Whether the two words commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Argument(format!("not a Pauli letter: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() > 64 {
            return Err(Error::Argument("at most 64 qubits supported".into()));
        }
        Ok(Self::from_letters(&letters))
    }
}

/// Product `a * b = phase * word` with `phase` in `{1, i, -1, -i}`.
pub fn pauli_product(a: &PauliString, b: &PauliString) -> Result<(Complex64, PauliString)> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Argument(format!("Pauli strings on {} and {} qubits", a.n_qubits, b.n_qubits)));
    }
    Ok(product_unchecked(a, b))
}

#[inline]
fn product_unchecked(a: &PauliString, b: &PauliString) -> (Complex64, PauliString) {
    let out = PauliString { n_qubits: a.n_qubits, x: a.x ^ b.x, z: a.z ^ b.z };
    // i^{ya} X^xa Z^za i^{yb} X^xb Z^zb = i^{ya+yb} (-1)^{|za & xb|} X^x Z^z
    // and X^x Z^z = i^{-y} P
    let k = a.y_count() + b.y_count() + 2 * (a.z & b.x).count_ones() + 4 - out.y_count() % 4;
    (I_POWERS[(k % 4) as usize], out)
}

/// Sum of Pauli strings with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl QubitOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coeff: impl Into<Complex64>) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(PauliString::identity(n_qubits), coeff);
        op
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Adds `coeff * word`, accumulating onto an existing entry.
    pub fn add_term(&mut self, word: PauliString, coeff: impl Into<Complex64>) {
        assert_eq!(word.n_qubits, self.n_qubits, "qubit count mismatch");
        *self.terms.entry(word).or_default() += coeff.into();
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &PauliString) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops coefficients with `|c| < 1e-12`.
    pub fn simplify(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().filter(|(_, c)| c.norm() >= PRUNE_TOL).map(|(p, c)| (*p, *c)).collect(),
        }
    }

    pub fn scale(mut self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        self.terms.values_mut().for_each(|c| *c *= factor);
        self
    }

    pub fn adjoint(&self) -> Self {
        Self { n_qubits: self.n_qubits, terms: self.terms.iter().map(|(p, c)| (*p, c.conj())).collect() }
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_imag() < HERMITIAN_TOL
    }

    /// Real parts of the coefficients, failing if any imaginary part exceeds
    /// the Hermitian tolerance.
    pub fn real_terms(&self) -> Result<Vec<(PauliString, f64)>> {
        if !self.is_hermitian() {
            return Err(Error::Contract(format!("operator is not Hermitian (max |Im c| = {:e})", self.max_imag())));
        }
        Ok(self.terms.iter().map(|(p, c)| (*p, c.re)).collect())
    }
}

impl Add for QubitOperator {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.n_qubits, rhs.n_qubits, "qubit count mismatch");
        for (p, c) in rhs.terms {
            self.add_term(p, c);
        }
        self
    }
}

impl Sub for QubitOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Mul for &QubitOperator {
    type Output = QubitOperator;
    fn mul(self, rhs: Self) -> QubitOperator {
        assert_eq!(self.n_qubits, rhs.n_qubits, "qubit count mismatch");
        let mut out = QubitOperator::zero(self.n_qubits);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                let (phase, p) = product_unchecked(pa, pb);
                out.add_term(p, phase * ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for QubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (p, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            if c.im == 0.0 {
                write!(f, "({:+}) {}", c.re, p)?;
            } else {
                write!(f, "({:+}{:+}i) {}", c.re, c.im, p)?;
            }
        }
        Ok(())
    }
}

/// The two Pauli terms of a single ladder operator on `n` qubits.
fn ladder_terms(mode: usize, kind: Ladder, n: usize) -> [(Complex64, PauliString); 2] {
    let above = if mode + 1 >= 64 { 0 } else { (u64::MAX << (mode + 1)) & low_mask(n) };
    let bit = 1u64 << mode;
    let x_word = PauliString { n_qubits: n, x: bit, z: above };
    let y_word = PauliString { n_qubits: n, x: bit, z: above | bit };
    let y_coeff = match kind {
        Ladder::Annihilate => Complex64::new(0.0, 0.5),
        Ladder::Create => Complex64::new(0.0, -0.5),
    };
    [(Complex64::new(0.5, 0.0), x_word), (y_coeff, y_word)]
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Jordan-Wigner image of a fermionic operator on `n_modes` qubits.
pub fn jordan_wigner(op: &FermionOperator, n_modes: usize) -> Result<QubitOperator> {
    if n_modes > 64 {
        return Err(Error::Argument("at most 64 modes supported".into()));
    }
    if let Some(m) = op.max_mode() {
        if m >= n_modes {
            return Err(Error::Bounds { index: m, limit: n_modes });
        }
    }
    let mut out = QubitOperator::zero(n_modes);
    let mut partial: Vec<(Complex64, PauliString)> = Vec::new();
    let mut next = Vec::new();
    for (coeff, word) in op.terms() {
        partial.clear();
        partial.push((*coeff, PauliString::identity(n_modes)));
        for ladder in word {
            next.clear();
            for (c, p) in &partial {
                for (lc, lp) in ladder_terms(ladder.mode, ladder.kind, n_modes) {
                    let (phase, prod) = product_unchecked(p, &lp);
                    next.push((c * lc * phase, prod));
                }
            }
            std::mem::swap(&mut partial, &mut next);
        }
        for (c, p) in partial.drain(..) {
            out.add_term(p, c);
        }
    }
    Ok(out.simplify())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{FermionOperator, LadderOp};

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(pauli_product(&ps("X"), &ps("Y")).unwrap(), (cx(0.0, 1.0), ps("Z")));
        assert_eq!(pauli_product(&ps("Y"), &ps("X")).unwrap(), (cx(0.0, -1.0), ps("Z")));
        assert_eq!(pauli_product(&ps("Z"), &ps("Z")).unwrap(), (cx(1.0, 0.0), ps("I")));
        assert_eq!(pauli_product(&ps("Y"), &ps("Z")).unwrap(), (cx(0.0, 1.0), ps("X")));
        assert_eq!(pauli_product(&ps("Z"), &ps("X")).unwrap(), (cx(0.0, 1.0), ps("Y")));
        assert_eq!(pauli_product(&ps("Y"), &ps("Y")).unwrap(), (cx(1.0, 0.0), ps("I")));
    }

    #[test]
    fn product_size_mismatch() {
        assert!(matches!(pauli_product(&ps("XX"), &ps("X")), Err(Error::Argument(_))));
    }

    #[test]
    fn rendering_round_trip() {
        assert_eq!(ps("XIYZ").to_string(), "XIYZ");
        assert_eq!(ps("XIYZ").letter(2), Pauli::Y);
        let mut op = QubitOperator::zero(4);
        op.add_term(ps("XIYZ"), 0.5);
        assert_eq!(op.to_string(), "(+0.5) XIYZ");
    }

    #[test]
    fn simplify_merges_and_prunes() {
        let mut op = QubitOperator::zero(2);
        op.add_term(ps("XI"), 0.5);
        op.add_term(ps("XI"), 0.5);
        op.add_term(ps("ZZ"), 1e-15);
        let s = op.simplify();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&ps("XI")), cx(1.0, 0.0));
        assert_eq!(s.simplify(), s);
    }

    #[test]
    fn number_operator_image() {
        let n0 = FermionOperator::term(1.0, vec![LadderOp::create(0), LadderOp::annihilate(0)]);
        let q = jordan_wigner(&n0, 1).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.coefficient(&ps("I")), cx(0.5, 0.0));
        assert_eq!(q.coefficient(&ps("Z")), cx(-0.5, 0.0));
    }

    #[test]
    fn anticommutator_maps_to_zero() {
        let a0 = FermionOperator::term(1.0, vec![LadderOp::annihilate(0)]);
        let a1d = FermionOperator::term(1.0, vec![LadderOp::create(1)]);
        let anti = &a0 * &a1d + &a1d * &a0;
        assert!(jordan_wigner(&anti, 2).unwrap().is_empty());
    }

    #[test]
    fn single_excitation_generator_pattern() {
        // theta (a^m a_i - a^i a_m) with i = 1, m = 4 on 6 modes
        let theta = 0.3;
        let (i, m) = (1, 4);
        let gen = FermionOperator::term(theta, vec![LadderOp::create(m), LadderOp::annihilate(i)])
            - FermionOperator::term(theta, vec![LadderOp::create(i), LadderOp::annihilate(m)]);
        let q = jordan_wigner(&gen, 6).unwrap();
        assert_eq!(q.len(), 2);
        // Z string strictly between i and m, Y/X on the endpoints
        assert_eq!(q.coefficient(&ps("IYZZXI")), cx(0.0, theta / 2.0));
        assert_eq!(q.coefficient(&ps("IXZZYI")), cx(0.0, -theta / 2.0));
    }

    #[test]
    fn out_of_range_mode() {
        let op = FermionOperator::term(1.0, vec![LadderOp::create(2)]);
        assert!(matches!(jordan_wigner(&op, 2), Err(Error::Bounds { .. })));
    }

    #[test]
    fn hermitian_check() {
        let mut op = QubitOperator::zero(1);
        op.add_term(ps("X"), cx(1.0, 1e-3));
        assert!(matches!(op.real_terms(), Err(Error::Contract(_))));
    }
}
