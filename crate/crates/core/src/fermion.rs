//! Fermionic ladder-operator algebra and the molecular Hamiltonians built from it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::SpinOrbitalIntegrals;

/// Terms with `|c|` below this are dropped when simplifying.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ladder {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderOp {
    pub mode: usize,
    pub kind: Ladder,
}

impl LadderOp {
    pub const fn create(mode: usize) -> Self {
        Self { mode, kind: Ladder::Create }
    }

    pub const fn annihilate(mode: usize) -> Self {
        Self { mode, kind: Ladder::Annihilate }
    }

    pub fn adjoint(self) -> Self {
        let kind = match self.kind {
            Ladder::Create => Ladder::Annihilate,
            Ladder::Annihilate => Ladder::Create,
        };
        Self { mode: self.mode, kind }
    }
}

impl fmt::Display for LadderOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Ladder::Create => write!(f, "a^{}", self.mode),
            Ladder::Annihilate => write!(f, "a{}", self.mode),
        }
    }
}

pub type LadderWord = Vec<LadderOp>;

/// Sort key for the canonical term order: length, then modes, then kinds.
type TermKey = (usize, Vec<usize>, Vec<Ladder>);

fn canonical_key(word: &[LadderOp]) -> TermKey {
    (word.len(), word.iter().map(|op| op.mode).collect(), word.iter().map(|op| op.kind).collect())
}

/// Complex-weighted sum of ladder words.
///
/// Builders store terms as given; [`FermionOperator::simplify`] brings the
/// operator to vacuum normal order (creators ascending, then annihilators
/// descending), merges equal words, prunes and sorts canonically.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FermionOperator {
    terms: Vec<(Complex64, LadderWord)>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(coeff: impl Into<Complex64>) -> Self {
        let mut op = Self::zero();
        op.add_term(coeff, Vec::new());
        op
    }

    pub fn term(coeff: impl Into<Complex64>, word: LadderWord) -> Self {
        let mut op = Self::zero();
        op.add_term(coeff, word);
        op
    }

    pub fn add_term(&mut self, coeff: impl Into<Complex64>, word: LadderWord) {
        self.terms.push((coeff.into(), word));
    }

    pub fn terms(&self) -> &[(Complex64, LadderWord)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest mode index referenced, if any.
    pub fn max_mode(&self) -> Option<usize> {
        self.terms.iter().flat_map(|(_, w)| w.iter().map(|op| op.mode)).max()
    }

    pub fn scale(mut self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        for (c, _) in &mut self.terms {
            *c *= factor;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c, w)| (c.conj(), w.iter().rev().map(|op| op.adjoint()).collect()))
                .collect(),
        }
    }

    /// Merges identical words, drops small and identically-zero terms and
    /// sorts; does not reorder ladder operators inside a word.
    pub fn compress(&self) -> Self {
        let mut acc: BTreeMap<TermKey, (Complex64, LadderWord)> = BTreeMap::new();
        for (c, w) in &self.terms {
            if has_adjacent_repeat(w) {
                continue;
            }
            acc.entry(canonical_key(w)).and_modify(|(acc_c, _)| *acc_c += *c).or_insert((*c, w.clone()));
        }
        Self { terms: acc.into_values().filter(|(c, _)| c.norm() >= PRUNE_TOL).collect() }
    }

    /// Vacuum normal ordering with anticommutation bookkeeping, then [`compress`](Self::compress).
    pub fn simplify(&self) -> Self {
        let mut out = Vec::new();
        let mut stack: Vec<(Complex64, LadderWord)> = self.terms.clone();
        while let Some((c, mut w)) = stack.pop() {
            match first_disorder(&w) {
                None => {
                    if !has_adjacent_repeat(&w) {
                        out.push((c, w));
                    }
                }
                Some(i) => {
                    let (left, right) = (w[i], w[i + 1]);
                    if left.mode == right.mode && left.kind == right.kind {
                        continue;
                    }
                    if left.mode == right.mode {
                        // a_p a^p = 1 - a^p a_p
                        let mut contracted = w.clone();
                        contracted.drain(i..i + 2);
                        stack.push((c, contracted));
                    }
                    w.swap(i, i + 1);
                    stack.push((-c, w));
                }
            }
        }
        Self { terms: out }.compress()
    }

    /// Expectation value on an occupation-number basis state.
    pub fn expectation_on(&self, state: &OccupationState) -> Complex64 {
        let bits = state.bits();
        self.terms
            .iter()
            .filter_map(|(c, w)| apply_word(w, bits).and_then(|(sign, out)| (out == bits).then(|| *c * sign)))
            .sum()
    }

    /// Dense matrix in the occupation basis (bit `j` of the index = mode `j`),
    /// built by acting with each word on every basis determinant.
    pub fn to_dense(&self, n_modes: usize) -> Result<DMatrix<Complex64>> {
        if let Some(m) = self.max_mode() {
            if m >= n_modes {
                return Err(Error::Bounds { index: m, limit: n_modes });
            }
        }
        let dim = 1usize << n_modes;
        let mut mat = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            for (c, w) in &self.terms {
                if let Some((sign, row)) = apply_word(w, col as u64) {
                    mat[(row as usize, col)] += *c * sign;
                }
            }
        }
        Ok(mat)
    }
}

fn ladder_rank(op: &LadderOp) -> (u8, isize) {
    match op.kind {
        Ladder::Create => (0, op.mode as isize),
        Ladder::Annihilate => (1, -(op.mode as isize)),
    }
}

fn first_disorder(w: &[LadderOp]) -> Option<usize> {
    w.windows(2).position(|pair| ladder_rank(&pair[0]) > ladder_rank(&pair[1]))
}

fn has_adjacent_repeat(w: &[LadderOp]) -> bool {
    w.windows(2).any(|pair| pair[0] == pair[1])
}

/// Applies a ladder word (rightmost operator first) to a determinant.
///
/// The fermionic sign of `a_j` / `a^j` is `(-1)^(occupied modes above j)`,
/// which is the parity string the Jordan-Wigner convention in
/// [`crate::qubit`] produces.
pub fn apply_word(word: &[LadderOp], mut bits: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    for op in word.iter().rev() {
        let mask = 1u64 << op.mode;
        let occupied = bits & mask != 0;
        match op.kind {
            Ladder::Create if occupied => return None,
            Ladder::Annihilate if !occupied => return None,
            _ => {}
        }
        if (bits >> (op.mode + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        bits ^= mask;
    }
    Some((sign, bits))
}

impl Add for FermionOperator {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Sub for FermionOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Neg for FermionOperator {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul for &FermionOperator {
    type Output = FermionOperator;
    fn mul(self, rhs: Self) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (ca, wa) in &self.terms {
            for (cb, wb) in &rhs.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(ca * cb, w);
            }
        }
        out
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (c, w)) in self.terms.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            if c.im == 0.0 {
                write!(f, "({:?})", c.re)?;
            } else {
                write!(f, "({:?}{:+?}i)", c.re, c.im)?;
            }
            for op in w {
                write!(f, " {op}")?;
            }
        }
        Ok(())
    }
}

/// A Slater determinant given by its occupied modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupationState {
    pub n_modes: usize,
    pub occupied: BTreeSet<usize>,
}

impl OccupationState {
    pub fn new(n_modes: usize, occupied: impl IntoIterator<Item = usize>) -> Result<Self> {
        let occupied: BTreeSet<usize> = occupied.into_iter().collect();
        if let Some(&m) = occupied.iter().next_back() {
            if m >= n_modes {
                return Err(Error::Bounds { index: m, limit: n_modes });
            }
        }
        Ok(Self { n_modes, occupied })
    }

    pub fn n_electrons(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.occupied.contains(&mode)
    }

    pub fn virtuals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_modes).filter(|m| !self.occupied.contains(m))
    }

    /// Basis-state index with bit `j` set for each occupied mode `j`.
    pub fn bits(&self) -> u64 {
        self.occupied.iter().fold(0, |acc, &m| acc | (1 << m))
    }
}

/// Hartree-Fock determinant: the `n_electrons` lowest spin orbitals.
pub fn hf_reference(n_electrons: usize, n_modes: usize) -> Result<OccupationState> {
    if n_electrons > n_modes {
        return Err(Error::Argument(format!("{n_electrons} electrons exceed {n_modes} modes")));
    }
    OccupationState::new(n_modes, 0..n_electrons)
}

/// Second-quantized molecular Hamiltonian including the core constant.
pub fn build_sq_hamiltonian(so: &SpinOrbitalIntegrals) -> FermionOperator {
    let n = so.n_so;
    let mut op = FermionOperator::zero();
    if so.e_core != 0.0 {
        op.add_term(so.e_core, Vec::new());
    }
    for p in 0..n {
        for q in 0..n {
            let h = so.h(p, q);
            if h != 0.0 {
                op.add_term(h, vec![LadderOp::create(p), LadderOp::annihilate(q)]);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = so.g(p, q, r, s);
                    if g != 0.0 {
                        op.add_term(
                            0.5 * g,
                            vec![
                                LadderOp::create(p),
                                LadderOp::create(q),
                                LadderOp::annihilate(s),
                                LadderOp::annihilate(r),
                            ],
                        );
                    }
                }
            }
        }
    }
    op.simplify()
}

/// `F_rs = h_rs + sum_i (<ri|g|si> - <ri|g|is>)`.
pub fn fock_matrix(so: &SpinOrbitalIntegrals, occ: &OccupationState) -> DMatrix<f64> {
    let n = so.n_so;
    DMatrix::from_fn(n, n, |r, s| {
        so.h(r, s) + occ.occupied.iter().map(|&i| so.g(r, i, s, i) - so.g(r, i, i, s)).sum::<f64>()
    })
}

/// Determinant energy `<Phi0|H|Phi0>` including the core constant.
pub fn hf_energy(so: &SpinOrbitalIntegrals, occ: &OccupationState) -> f64 {
    let one: f64 = occ.occupied.iter().map(|&i| so.h(i, i)).sum();
    let mut two = 0.0;
    for &i in &occ.occupied {
        for &j in &occ.occupied {
            two += so.g(i, j, i, j) - so.g(i, j, j, i);
        }
    }
    so.e_core + one + 0.5 * two
}

/// Particle-hole Hamiltonian: `e_hf` plus the body normal-ordered with
/// respect to the reference determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct PhHamiltonian {
    pub e_hf: f64,
    pub body: FermionOperator,
    pub occupied: OccupationState,
}

impl PhHamiltonian {
    /// `e_hf * I + body` as a single operator.
    pub fn full_operator(&self) -> FermionOperator {
        FermionOperator::identity(self.e_hf) + self.body.clone()
    }
}

/// True when the operator creates a quasi-particle: a particle in a virtual
/// mode or a hole in an occupied one.
fn is_quasi_creator(op: &LadderOp, occ: &OccupationState) -> bool {
    match op.kind {
        Ladder::Create => !occ.is_occupied(op.mode),
        Ladder::Annihilate => occ.is_occupied(op.mode),
    }
}

/// Normal order with respect to `occ`: quasi-creators are moved left of all
/// quasi-annihilators (stable within each group) and the permutation sign is
/// returned. Contractions are not generated.
pub fn ph_normal_order(word: &[LadderOp], occ: &OccupationState) -> (f64, LadderWord) {
    let mut creators = Vec::with_capacity(word.len());
    let mut annihilators = Vec::with_capacity(word.len());
    let mut swaps = 0usize;
    for op in word {
        if is_quasi_creator(op, occ) {
            swaps += annihilators.len();
            creators.push(*op);
        } else {
            annihilators.push(*op);
        }
    }
    creators.extend(annihilators);
    let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
    (sign, creators)
}

fn contains_repeat(word: &[LadderOp]) -> bool {
    word.iter().enumerate().any(|(i, a)| word[i + 1..].contains(a))
}

/// Rewrites the Hamiltonian around the reference determinant `occ`.
pub fn build_ph_hamiltonian(so: &SpinOrbitalIntegrals, occ: &OccupationState) -> PhHamiltonian {
    let n = so.n_so;
    let fock = fock_matrix(so, occ);
    let mut body = FermionOperator::zero();
    let mut push = |coeff: f64, word: LadderWord| {
        let (sign, ordered) = ph_normal_order(&word, occ);
        // a repeated ladder operator inside a normal-ordered word vanishes
        if !contains_repeat(&ordered) {
            body.add_term(sign * coeff, ordered);
        }
    };
    for r in 0..n {
        for s in 0..n {
            let f = fock[(r, s)];
            if f != 0.0 {
                push(f, vec![LadderOp::create(r), LadderOp::annihilate(s)]);
            }
        }
    }
    for r in 0..n {
        for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    let g = so.g(r, s, t, u);
                    if g != 0.0 {
                        push(
                            0.5 * g,
                            vec![
                                LadderOp::create(r),
                                LadderOp::create(s),
                                LadderOp::annihilate(u),
                                LadderOp::annihilate(t),
                            ],
                        );
                    }
                }
            }
        }
    }
    PhHamiltonian { e_hf: hf_energy(so, occ), body: body.compress(), occupied: occ.clone() }
}

/// `sum_p a^p a_p`.
pub fn number_operator(n_modes: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for p in 0..n_modes {
        op.add_term(1.0, vec![LadderOp::create(p), LadderOp::annihilate(p)]);
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{spin_of, SpinOrbitalIntegrals};
    use crate::testutil::random_integrals;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn toy_integrals() -> SpinOrbitalIntegrals {
        let mut so = SpinOrbitalIntegrals::zeros(2, 2);
        so.h_so = vec![-1.0, 0.0, 0.0, -1.0];
        so
    }

    #[test]
    fn sq_hamiltonian_of_free_toy() {
        let h = build_sq_hamiltonian(&toy_integrals());
        assert_eq!(
            h.terms(),
            &[
                (c(-1.0), vec![LadderOp::create(0), LadderOp::annihilate(0)]),
                (c(-1.0), vec![LadderOp::create(1), LadderOp::annihilate(1)]),
            ]
        );
        assert_eq!(h.to_string(), "(-1.0) a^0 a0\n(-1.0) a^1 a1");
    }

    #[test]
    fn sq_hamiltonian_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = build_sq_hamiltonian(&random_integrals(4, 2, &mut rng));
        assert!((h.clone() - h.adjoint()).simplify().is_empty());
    }

    #[test]
    fn anticommutator_simplifies_to_delta() {
        let a0 = FermionOperator::term(1.0, vec![LadderOp::annihilate(0)]);
        let a0d = FermionOperator::term(1.0, vec![LadderOp::create(0)]);
        let a1d = FermionOperator::term(1.0, vec![LadderOp::create(1)]);
        let same = (&a0 * &a0d + &a0d * &a0).simplify();
        assert_eq!(same.terms(), &[(c(1.0), vec![])]);
        let other = (&a0 * &a1d + &a1d * &a0).simplify();
        assert!(other.is_empty());
        let nilpotent = (&a0d * &a0d).simplify();
        assert!(nilpotent.is_empty());
    }

    #[test]
    fn hf_reference_examples() {
        assert_eq!(hf_reference(2, 8).unwrap().occupied, BTreeSet::from([0, 1]));
        assert_eq!(hf_reference(8, 12).unwrap().occupied, (0..8).collect());
        assert!(hf_reference(0, 4).unwrap().occupied.is_empty());
        assert!(matches!(hf_reference(5, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn fock_without_interaction_is_core_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut so = random_integrals(4, 2, &mut rng);
        let empty = OccupationState::new(4, []).unwrap();
        let h = DMatrix::from_row_slice(4, 4, &so.h_so);
        assert_eq!(fock_matrix(&so, &empty), h);
        so.g_phys.iter_mut().for_each(|g| *g = 0.0);
        assert_eq!(fock_matrix(&so, &hf_reference(2, 4).unwrap()), h);
    }

    #[test]
    fn fock_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let so = random_integrals(4, 2, &mut rng);
        let f = fock_matrix(&so, &hf_reference(2, 4).unwrap());
        assert!((&f - f.transpose()).amax() < 1e-10);
    }

    #[test]
    fn hf_energy_examples() {
        let so = toy_integrals();
        assert_eq!(hf_energy(&so, &hf_reference(2, 2).unwrap()), -2.0);
        let mut so = so;
        so.e_core = 0.3;
        assert_eq!(hf_energy(&so, &OccupationState::new(2, []).unwrap()), 0.3);
    }

    #[test]
    fn hf_energy_matches_dense_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let so = random_integrals(4, 2, &mut rng);
        let occ = hf_reference(2, 4).unwrap();
        let dense = build_sq_hamiltonian(&so).to_dense(4).unwrap();
        let b = occ.bits() as usize;
        assert!((dense[(b, b)].re - hf_energy(&so, &occ)).abs() < 1e-10);
    }

    #[test]
    fn ph_normal_order_signs() {
        let occ = hf_reference(2, 4).unwrap();
        // a^0 a1: a1 (occupied) creates a hole and moves left
        let (sign, w) = ph_normal_order(&[LadderOp::create(0), LadderOp::annihilate(1)], &occ);
        assert_eq!(sign, -1.0);
        assert_eq!(w, vec![LadderOp::annihilate(1), LadderOp::create(0)]);
        // a^2 a3 already ordered: particle creator then particle annihilator
        let (sign, w) = ph_normal_order(&[LadderOp::create(2), LadderOp::annihilate(3)], &occ);
        assert_eq!(sign, 1.0);
        assert_eq!(w, vec![LadderOp::create(2), LadderOp::annihilate(3)]);
    }

    #[test]
    fn ph_body_annihilates_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let so = random_integrals(4, 2, &mut rng);
        let occ = hf_reference(2, 4).unwrap();
        let ph = build_ph_hamiltonian(&so, &occ);
        assert!(ph.body.expectation_on(&occ).norm() < 1e-10);
        assert!((ph.e_hf - hf_energy(&so, &occ)).abs() < 1e-14);
    }

    #[test]
    fn ph_identity_on_spin_structured_toy() {
        // 2 spatial orbitals, spin selection rules enforced
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut so = random_integrals(4, 2, &mut rng);
        for p in 0..4 {
            for q in 0..4 {
                if spin_of(p) != spin_of(q) {
                    so.h_so[p * 4 + q] = 0.0;
                }
                for r in 0..4 {
                    for s in 0..4 {
                        if spin_of(p) != spin_of(r) || spin_of(q) != spin_of(s) {
                            *so.g_mut(p, q, r, s) = 0.0;
                        }
                    }
                }
            }
        }
        let occ = hf_reference(2, 4).unwrap();
        let sq = build_sq_hamiltonian(&so).to_dense(4).unwrap();
        let ph = build_ph_hamiltonian(&so, &occ).full_operator().to_dense(4).unwrap();
        assert!(max_diff(&sq, &ph) < 1e-10);
    }

    #[test]
    fn number_operator_on_reference() {
        assert_eq!(
            number_operator(2).terms(),
            &[
                (c(1.0), vec![LadderOp::create(0), LadderOp::annihilate(0)]),
                (c(1.0), vec![LadderOp::create(1), LadderOp::annihilate(1)]),
            ]
        );
        let occ = hf_reference(2, 4).unwrap();
        assert_eq!(number_operator(4).expectation_on(&occ), c(2.0));
    }

    #[test]
    fn to_dense_rejects_out_of_range_modes() {
        let op = FermionOperator::term(1.0, vec![LadderOp::create(3)]);
        assert!(matches!(op.to_dense(2), Err(Error::Bounds { .. })));
    }

    fn arb_word() -> impl Strategy<Value = LadderWord> {
        prop::collection::vec(
            (0usize..4, any::<bool>()).prop_map(
                |(m, create)| {
                    if create {
                        LadderOp::create(m)
                    } else {
                        LadderOp::annihilate(m)
                    }
                },
            ),
            0..5,
        )
    }

    fn arb_operator() -> impl Strategy<Value = FermionOperator> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, arb_word()), 1..6).prop_map(|terms| {
            let mut op = FermionOperator::zero();
            for (re, im, w) in terms {
                op.add_term(Complex64::new(re, im), w);
            }
            op
        })
    }

    proptest! {
        #[test]
        fn simplify_is_a_fixpoint(op in arb_operator()) {
            let once = op.simplify();
            prop_assert_eq!(once.simplify(), once);
        }

        #[test]
        fn simplify_preserves_dense_matrix(op in arb_operator()) {
            let before = op.to_dense(4).unwrap();
            let after = op.simplify().to_dense(4).unwrap();
            prop_assert!(max_diff(&before, &after) < 1e-12);
        }

        #[test]
        fn ph_identity_random_tensors(seed in any::<u64>(), n_el in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let so = random_integrals(4, n_el, &mut rng);
            let occ = hf_reference(n_el, 4).unwrap();
            let sq = build_sq_hamiltonian(&so).to_dense(4).unwrap();
            let ph = build_ph_hamiltonian(&so, &occ).full_operator().to_dense(4).unwrap();
            prop_assert!(max_diff(&sq, &ph) < 1e-10);
        }
    }
}
