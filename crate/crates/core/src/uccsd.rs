//! Spin-conserving excitation lists and the Trotterized UCCSD circuit.
//!
//! Each excitation operator `tau` enters through the anti-Hermitian generator
//! `theta (tau - tau^dag)`. Its Jordan-Wigner image is `sum_k i alpha_k P_k`
//! with mutually commuting words, so `exp` of it is an exact product of
//! Pauli exponentials: two for a single, eight for a double.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, LadderOp, OccupationState};
use crate::integrals::spin_of;
use crate::qubit::{jordan_wigner, PauliString};
use crate::sim::{init_basis_state, Circuit, Gate, ParamRole, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Excitation {
    /// `a^m a_i`
    Single { i: usize, m: usize },
    /// `a^n a^m a_j a_i` with `i < j`, `m < n`
    Double { i: usize, j: usize, m: usize, n: usize },
}

impl Excitation {
    /// `tau - tau^dag`.
    pub fn generator(&self) -> FermionOperator {
        let word = match *self {
            Excitation::Single { i, m } => vec![LadderOp::create(m), LadderOp::annihilate(i)],
            Excitation::Double { i, j, m, n } => {
                vec![LadderOp::create(n), LadderOp::create(m), LadderOp::annihilate(j), LadderOp::annihilate(i)]
            }
        };
        let tau = FermionOperator::term(1.0, word);
        let adj = tau.adjoint();
        tau - adj
    }

    /// Pauli words and real weights `alpha_k` with `JW(tau - tau^dag) = sum i alpha_k P_k`.
    pub fn pauli_terms(&self, n_qubits: usize) -> Result<Vec<(PauliString, f64)>> {
        let q = jordan_wigner(&self.generator(), n_qubits)?.simplify();
        let mut out = Vec::with_capacity(q.len());
        for (p, c) in q.terms() {
            if c.re.abs() > 1e-12 {
                return Err(Error::Contract(format!("generator of {self:?} has a real coefficient on {p}")));
            }
            out.push((*p, c.im));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExcitationList {
    pub singles: Vec<(usize, usize)>,
    pub doubles: Vec<(usize, usize, usize, usize)>,
    pub active_occupied: Vec<usize>,
    pub active_virtual: Vec<usize>,
}

impl ExcitationList {
    pub fn len(&self) -> usize {
        self.singles.len() + self.doubles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Singles in ascending order, then doubles; this is also the parameter order.
    pub fn excitations(&self) -> Vec<Excitation> {
        let singles = self.singles.iter().map(|&(i, m)| Excitation::Single { i, m });
        let doubles = self.doubles.iter().map(|&(i, j, m, n)| Excitation::Double { i, j, m, n });
        singles.chain(doubles).collect()
    }
}

/// The `k_occ` highest occupied and `k_virt` lowest virtual spin orbitals.
pub fn active_window(occ: &OccupationState, k_occ: usize, k_virt: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let occupied: Vec<usize> = occ.occupied.iter().copied().collect();
    let virtuals: Vec<usize> = occ.virtuals().collect();
    if k_occ > occupied.len() || k_virt > virtuals.len() {
        return Err(Error::Argument(format!(
            "active space ({k_occ} occupied, {k_virt} virtual) exceeds ({}, {})",
            occupied.len(),
            virtuals.len()
        )));
    }
    Ok((occupied[occupied.len() - k_occ..].to_vec(), virtuals[..k_virt].to_vec()))
}

/// All spin-conserving singles and Sz-conserving doubles inside the active
/// window, canonicalized to `i < j`, `m < n`.
pub fn enumerate_excitations(
    n_so: usize,
    occ: &BTreeSet<usize>,
    active_occ: &BTreeSet<usize>,
    active_virt: &BTreeSet<usize>,
) -> Result<ExcitationList> {
    if let Some(&q) = occ.iter().chain(active_virt).find(|&&q| q >= n_so) {
        return Err(Error::Bounds { index: q, limit: n_so });
    }
    if let Some(q) = active_occ.intersection(active_virt).next() {
        return Err(Error::Argument(format!("mode {q} is in both active sets")));
    }
    if let Some(q) = active_occ.difference(occ).next() {
        return Err(Error::Argument(format!("active occupied mode {q} is not occupied")));
    }
    if let Some(q) = active_virt.intersection(occ).next() {
        return Err(Error::Argument(format!("active virtual mode {q} is occupied")));
    }
    let ao: Vec<usize> = active_occ.iter().copied().collect();
    let av: Vec<usize> = active_virt.iter().copied().collect();
    let mut list = ExcitationList { active_occupied: ao.clone(), active_virtual: av.clone(), ..Default::default() };
    for &i in &ao {
        for &m in &av {
            if spin_of(i) == spin_of(m) {
                list.singles.push((i, m));
            }
        }
    }
    for (a, &i) in ao.iter().enumerate() {
        for &j in &ao[a + 1..] {
            for (b, &m) in av.iter().enumerate() {
                for &n in &av[b + 1..] {
                    if spin_of(i) + spin_of(j) == spin_of(m) + spin_of(n) {
                        list.doubles.push((i, j, m, n));
                    }
                }
            }
        }
    }
    Ok(list)
}

/// Trotterized UCCSD with one angle per excitation shared by all steps.
#[derive(Debug, Clone, PartialEq)]
pub struct UccsdAnsatz {
    pub n_qubits: usize,
    pub excitations: ExcitationList,
    pub trotter_steps: usize,
    terms: Vec<Vec<(PauliString, f64)>>,
}

impl UccsdAnsatz {
    pub fn new(n_qubits: usize, excitations: ExcitationList, trotter_steps: usize) -> Result<Self> {
        if trotter_steps == 0 {
            return Err(Error::Argument("at least one Trotter step is required".into()));
        }
        let terms = excitations.excitations().iter().map(|e| e.pauli_terms(n_qubits)).collect::<Result<_>>()?;
        Ok(Self { n_qubits, excitations, trotter_steps, terms })
    }

    /// Same excitations with a different step count.
    pub fn with_trotter_steps(&self, trotter_steps: usize) -> Result<Self> {
        if trotter_steps == 0 {
            return Err(Error::Argument("at least one Trotter step is required".into()));
        }
        Ok(Self { trotter_steps, ..self.clone() })
    }

    pub fn n_params(&self) -> usize {
        self.excitations.len()
    }

    /// Pauli decomposition of each generator, in parameter order.
    pub fn pauli_terms(&self) -> &[Vec<(PauliString, f64)>] {
        &self.terms
    }

    /// Unbound circuit: `exp(i alpha theta P / n)` is `PAULI_EXP(P, 2 alpha theta / n)`.
    pub fn circuit_template(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits);
        let slots: Vec<usize> = (0..self.n_params()).map(|_| c.new_slot()).collect();
        let n = self.trotter_steps as f64;
        for _ in 0..self.trotter_steps {
            for (slot, terms) in slots.iter().zip(&self.terms) {
                for &(word, alpha) in terms {
                    c.push_bound(Gate::PauliExp { word, theta: 0.0 }, *slot, ParamRole::Theta, 2.0 * alpha / n)?;
                }
            }
        }
        Ok(c)
    }
}

pub fn build_uccsd_circuit(ansatz: &UccsdAnsatz, theta: &[f64]) -> Result<Circuit> {
    let mut c = ansatz.circuit_template()?;
    c.bind(theta)?;
    Ok(c)
}

pub fn uccsd_state(ansatz: &UccsdAnsatz, theta: &[f64], reference: &OccupationState) -> Result<Statevector> {
    if reference.n_modes != ansatz.n_qubits {
        return Err(Error::Argument(format!(
            "reference on {} modes, ansatz on {} qubits",
            reference.n_modes, ansatz.n_qubits
        )));
    }
    let mut state = init_basis_state(ansatz.n_qubits, &reference.occupied)?;
    build_uccsd_circuit(ansatz, theta)?.run(&mut state)?;
    Ok(state)
}
