//! Statevector simulation of parametrized circuits.
//!
//! Amplitude index bit `j` is the state of qubit `j` (little-endian).

mod circuit;
mod decompose;
mod gate;

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::qubit::{PauliString, QubitOperator};

pub use circuit::{expand_block, Circuit, GateTemplate, ParamSlot, SlotUse};
pub use decompose::{decompose_exchange, pauli_exponential_circuit, unitary_distance_up_to_phase};
pub use gate::{ex1_matrix, ex2_matrix, rx_matrix, rz_matrix, Gate, Matrix2, Matrix4, ParamRole};

/// Largest register the simulator allocates.
pub const MAX_QUBITS: usize = 28;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Argument(format!("{len} amplitudes is not a power of two")));
        }
        Ok(Self { n_qubits: len.trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(Error::Bounds { index: q, limit: self.n_qubits })
        } else {
            Ok(())
        }
    }

    fn apply_1q(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_2q(&mut self, q0: usize, q1: usize, m: &Matrix4) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        for i in 0..self.amps.len() {
            if i & (b0 | b1) == 0 {
                let idx = [i, i | b0, i | b1, i | b0 | b1];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
                }
            }
        }
    }

    /// `|psi> <- exp(i theta P / 2) |psi>` applied directly from `P`'s action
    /// on basis states.
    pub fn apply_pauli_exponential(&mut self, word: &PauliString, theta: f64) -> Result<()> {
        if word.n_qubits() != self.n_qubits {
            return Err(Error::Argument(format!(
                "word on {} qubits applied to {}-qubit state",
                word.n_qubits(),
                self.n_qubits
            )));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        let is = Complex64::new(0.0, s);
        let flip = word.x_mask() as usize;
        for b in 0..self.amps.len() {
            let partner = b ^ flip;
            if flip == 0 {
                let (phase, _) = word.apply_to_basis(b as u64);
                self.amps[b] *= c + is * phase;
            } else if b < partner {
                let (pb, _) = word.apply_to_basis(b as u64);
                let (pp, _) = word.apply_to_basis(partner as u64);
                let (ab, ap) = (self.amps[b], self.amps[partner]);
                self.amps[partner] = c * ap + is * pb * ab;
                self.amps[b] = c * ab + is * pp * ap;
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for q in gate.qubits() {
            self.check_qubit(q)?;
        }
        match gate {
            Gate::PauliExp { word, theta } => self.apply_pauli_exponential(word, *theta)?,
            Gate::Cnot { control, target }
            | Gate::Ex1 { q0: control, q1: target, .. }
            | Gate::Ex2 { q0: control, q1: target, .. }
            | Gate::Dense2q { q0: control, q1: target, .. } => {
                if control == target {
                    return Err(Error::Argument(format!("two-qubit gate on repeated qubit {control}")));
                }
                let m = gate.matrix_2q().expect("two-qubit gate");
                self.apply_2q(*control, *target, &m);
            }
            _ => {
                let m = gate.matrix_1q().expect("one-qubit gate");
                self.apply_1q(gate.qubits()[0], &m);
            }
        }
        Ok(())
    }

    /// Draws `shots` computational-basis outcomes.
    pub fn sample_counts(&self, shots: usize, rng: &mut impl Rng) -> BTreeMap<u64, usize> {
        let weights: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        let dist = WeightedIndex::new(&weights).expect("nonzero state");
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(dist.sample(rng) as u64).or_insert(0) += 1;
        }
        counts
    }
}

/// Computational basis state with the listed qubits set to `|1>`.
pub fn init_basis_state(n_qubits: usize, occupied: &BTreeSet<usize>) -> Result<Statevector> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::Argument(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
    }
    let mut index = 0usize;
    for &q in occupied {
        if q >= n_qubits {
            return Err(Error::Bounds { index: q, limit: n_qubits });
        }
        index |= 1 << q;
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amps[index] = Complex64::new(1.0, 0.0);
    Ok(Statevector { n_qubits, amps })
}

pub fn apply_gate(state: &mut Statevector, gate: &Gate) -> Result<()> {
    state.apply_gate(gate)
}

pub fn apply_pauli_exponential(state: &mut Statevector, word: &PauliString, theta: f64) -> Result<()> {
    state.apply_pauli_exponential(word, theta)
}

/// Precompiled Hermitian Pauli sum for repeated expectation values.
///
/// Terms sharing an X-mask are evaluated together: for each basis index the
/// diagonal phases are summed before multiplying the amplitude pair.
#[derive(Debug, Clone)]
pub struct ExpectationPlan {
    n_qubits: usize,
    groups: Vec<(usize, Vec<(u64, Complex64)>)>,
    n_terms: usize,
}

impl ExpectationPlan {
    pub fn new(op: &QubitOperator) -> Result<Self> {
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        let terms = op.real_terms()?;
        let n_terms = terms.len();
        for (p, c) in terms {
            // P|b> = i^{#Y} (-1)^{|b & z|} |b ^ x>
            let (phase0, _) = p.apply_to_basis(0);
            groups.entry(p.x_mask()).or_default().push((p.z_mask(), phase0 * c));
        }
        Ok(Self {
            n_qubits: op.n_qubits(),
            groups: groups.into_iter().map(|(x, t)| (x as usize, t)).collect(),
            n_terms,
        })
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.n_qubits != self.n_qubits {
            return Err(Error::Argument(format!("{}-qubit operator on {}-qubit state", self.n_qubits, state.n_qubits)));
        }
        let amps = &state.amps;
        let mut total = Complex64::new(0.0, 0.0);
        for (flip, terms) in &self.groups {
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, &amp) in amps.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                let diag: Complex64 = terms
                    .iter()
                    .map(|&(z, c)| if (b as u64 & z).count_ones().is_multiple_of(2) { c } else { -c })
                    .sum();
                acc += amps[b ^ flip].conj() * diag * amp;
            }
            total += acc;
        }
        if total.im.abs() > 1e-10 {
            return Err(Error::Contract(format!("expectation has imaginary part {:e}", total.im)));
        }
        Ok(total.re)
    }
}

/// `<psi|op|psi>` for a Hermitian operator.
pub fn expectation(state: &Statevector, op: &QubitOperator) -> Result<f64> {
    ExpectationPlan::new(op)?.expectation(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{hf_reference, number_operator};
    use crate::qubit::jordan_wigner;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn basis_state_examples() {
        let s = init_basis_state(2, &BTreeSet::from([0])).unwrap();
        assert_eq!(s.amplitudes(), &[cx(0., 0.), cx(1., 0.), cx(0., 0.), cx(0., 0.)]);
        let s = init_basis_state(8, &BTreeSet::from([0, 1])).unwrap();
        assert_eq!(s.amplitudes()[3], cx(1.0, 0.0));
        let s = init_basis_state(3, &BTreeSet::new()).unwrap();
        assert_eq!(s.amplitudes()[0], cx(1.0, 0.0));
        assert!(matches!(init_basis_state(2, &BTreeSet::from([2])), Err(Error::Bounds { .. })));
    }

    fn basis(n: usize, idx: usize) -> Statevector {
        let mut amps = vec![cx(0.0, 0.0); 1 << n];
        amps[idx] = cx(1.0, 0.0);
        Statevector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn ex2_at_zero_is_identity() {
        let m = ex2_matrix(0.0);
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v, if r == c { cx(1., 0.) } else { cx(0., 0.) });
            }
        }
    }

    #[test]
    fn ex1_swap_point() {
        let g = Gate::Ex1 { q0: 0, q1: 1, theta1: FRAC_PI_2, theta2: 0.0 };
        for (from, to) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            let mut s = basis(2, from);
            s.apply_gate(&g).unwrap();
            assert!((s.amplitudes()[to] - cx(1.0, 0.0)).norm() < 1e-15, "{from}->{to}");
        }
    }

    #[test]
    fn ex1_diagonal_point() {
        let m = ex1_matrix(0.0, 1.234);
        let diag = [1.0, 1.0, -1.0, 1.0];
        for (r, row) in m.iter().enumerate() {
            for (c, entry) in row.iter().enumerate() {
                let expect = if r == c { cx(diag[r], 0.0) } else { cx(0.0, 0.0) };
                assert!((entry - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn out_of_range_gate() {
        let mut s = basis(2, 0);
        assert!(matches!(s.apply_gate(&Gate::X { q: 2 }), Err(Error::Bounds { .. })));
        assert!(s.apply_gate(&Gate::Cnot { control: 1, target: 1 }).is_err());
    }

    #[test]
    fn z_exponential_is_a_phase() {
        let theta = 0.77;
        let mut s = basis(1, 0);
        s.apply_pauli_exponential(&"Z".parse().unwrap(), theta).unwrap();
        assert!((s.amplitudes()[0] - Complex64::from_polar(1.0, theta / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn yx_exponential_at_pi() {
        // exp(i pi P / 2) = i P; (Y on q0)(X on q1)|00> = i|11>
        let mut s = basis(2, 0);
        s.apply_pauli_exponential(&"YX".parse().unwrap(), PI).unwrap();
        let expected = [cx(0., 0.), cx(0., 0.), cx(0., 0.), cx(-1., 0.)];
        assert!(close(s.amplitudes(), &expected, 1e-15));
    }

    #[test]
    fn number_expectation_on_reference() {
        let occ = hf_reference(2, 4).unwrap();
        let s = init_basis_state(4, &occ.occupied).unwrap();
        let n = jordan_wigner(&number_operator(4), 4).unwrap();
        assert!((expectation(&s, &n).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut op = QubitOperator::zero(1);
        op.add_term("Y".parse().unwrap(), cx(0.0, 1.0));
        assert!(matches!(expectation(&basis(1, 0), &op), Err(Error::Contract(_))));
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        use rand::SeedableRng;
        let mut s = basis(1, 0);
        s.apply_gate(&Gate::H { q: 0 }).unwrap();
        let a = s.sample_counts(1000, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        let b = s.sample_counts(1000, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<usize>(), 1000);
        assert!(a[&0] > 400 && a[&1] > 400);
    }
}
