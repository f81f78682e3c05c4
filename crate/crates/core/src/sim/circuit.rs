use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{init_basis_state, Gate, ParamRole, Statevector};
use crate::error::{Error, Result};

/// One place a parameter is written: `gate.role = scale * theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotUse {
    pub gate: usize,
    pub role: ParamRole,
    pub scale: f64,
}

/// A free parameter; it may drive several gate angles (shared Trotter steps,
/// the Pauli terms of one excitation).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSlot {
    pub uses: Vec<SlotUse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    slots: Vec<ParamSlot>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), slots: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn slots(&self) -> &[ParamSlot] {
        &self.slots
    }

    pub fn n_params(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a fixed gate and returns its position.
    pub fn push(&mut self, gate: Gate) -> Result<usize> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::Bounds { index: q, limit: self.n_qubits });
            }
        }
        self.gates.push(gate);
        Ok(self.gates.len() - 1)
    }

    /// Opens a new, initially unused, parameter slot.
    pub fn new_slot(&mut self) -> usize {
        self.slots.push(ParamSlot::default());
        self.slots.len() - 1
    }

    /// Appends `gate` whose `role` angle is `scale` times parameter `slot`.
    pub fn push_bound(&mut self, gate: Gate, slot: usize, role: ParamRole, scale: f64) -> Result<usize> {
        if slot >= self.slots.len() {
            return Err(Error::Bounds { index: slot, limit: self.slots.len() });
        }
        let mut probe = gate.clone();
        if !probe.set_param(role, 0.0) {
            return Err(Error::Argument(format!("{} has no {role:?} angle", gate.name())));
        }
        let idx = self.push(gate)?;
        self.slots[slot].uses.push(SlotUse { gate: idx, role, scale });
        Ok(idx)
    }

    /// Appends `gate` driven by a fresh parameter slot; returns the slot.
    pub fn push_parametrized(&mut self, gate: Gate, role: ParamRole) -> Result<usize> {
        let slot = self.new_slot();
        self.push_bound(gate, slot, role, 1.0)?;
        Ok(slot)
    }

    /// Appends all gates of `other`; its parameter slots become new slots
    /// after the existing ones.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::Argument(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.n_qubits, self.n_qubits
            )));
        }
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        self.slots.extend(
            other
                .slots
                .iter()
                .map(|s| ParamSlot { uses: s.uses.iter().map(|u| SlotUse { gate: u.gate + offset, ..*u }).collect() }),
        );
        Ok(())
    }

    /// Writes the angle vector into the gates.
    pub fn bind(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.slots.len() {
            return Err(Error::Argument(format!("expected {} parameters, got {}", self.slots.len(), theta.len())));
        }
        for (slot, &t) in self.slots.iter().zip(theta) {
            for u in &slot.uses {
                self.gates[u.gate].set_param(u.role, u.scale * t);
            }
        }
        Ok(())
    }

    pub fn run(&self, state: &mut Statevector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Argument(format!(
                "{}-qubit circuit on {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        for g in &self.gates {
            state.apply_gate(g)?;
        }
        Ok(())
    }

    /// Elementary `(one-qubit, two-qubit)` gate counts.
    pub fn gate_counts(&self) -> (usize, usize) {
        self.gates.iter().fold((0, 0), |(a, b), g| {
            let (x, y) = g.elementary_counts();
            (a + x, b + y)
        })
    }

    /// Dense unitary, column `k` being the image of basis state `k`.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        const LIMIT: usize = 12;
        if self.n_qubits > LIMIT {
            return Err(Error::DimensionGuard { n_qubits: self.n_qubits, limit: LIMIT });
        }
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let occ = (0..self.n_qubits).filter(|q| k >> q & 1 == 1).collect();
            let mut s = init_basis_state(self.n_qubits, &occ)?;
            self.run(&mut s)?;
            for (r, a) in s.amplitudes().iter().enumerate() {
                u[(r, k)] = *a;
            }
        }
        Ok(u)
    }

    /// One gate per line, e.g. `RZ q0 1.5707963`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }
}

/// Gate pattern repeated by [`expand_block`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateTemplate {
    Rx,
    Rz,
    H,
    Cnot,
    Ex1,
    Ex2,
}

impl GateTemplate {
    fn is_two_qubit(self) -> bool {
        matches!(self, GateTemplate::Cnot | GateTemplate::Ex1 | GateTemplate::Ex2)
    }
}

/// Instantiates `template` on every qubit of `q_start..=q_end`, or on each
/// neighbouring pair `(q, q+1)` in that range for two-qubit templates. Every
/// instance gets its own parameter slots.
pub fn expand_block(template: GateTemplate, q_start: usize, q_end: usize) -> Result<Circuit> {
    if q_end < q_start || (template.is_two_qubit() && q_end == q_start) {
        return Err(Error::Argument(format!("empty range {q_start}..={q_end} for {template:?}")));
    }
    let mut c = Circuit::new(q_end + 1);
    if template.is_two_qubit() {
        for q in q_start..q_end {
            match template {
                GateTemplate::Cnot => {
                    c.push(Gate::Cnot { control: q, target: q + 1 })?;
                }
                GateTemplate::Ex1 => {
                    let g = Gate::Ex1 { q0: q, q1: q + 1, theta1: 0.0, theta2: 0.0 };
                    let s1 = c.new_slot();
                    let s2 = c.new_slot();
                    let idx = c.push_bound(g, s1, ParamRole::Theta1, 1.0)?;
                    c.slots[s2].uses.push(SlotUse { gate: idx, role: ParamRole::Theta2, scale: 1.0 });
                }
                GateTemplate::Ex2 => {
                    c.push_parametrized(Gate::Ex2 { q0: q, q1: q + 1, theta: 0.0 }, ParamRole::Theta)?;
                }
                _ => unreachable!(),
            }
        }
    } else {
        for q in q_start..=q_end {
            match template {
                GateTemplate::Rx => {
                    c.push_parametrized(Gate::Rx { q, theta: 0.0 }, ParamRole::Theta)?;
                }
                GateTemplate::Rz => {
                    c.push_parametrized(Gate::Rz { q, theta: 0.0 }, ParamRole::Theta)?;
                }
                GateTemplate::H => {
                    c.push(Gate::H { q })?;
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(c)
}
