//! Lowering of Pauli exponentials and exchange gates to one-qubit gates and
//! CNOTs.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::qubit::{Pauli, PauliString};

/// `exp(i theta P / 2)` as basis change, CNOT parity ladder, `RZ(-theta)` on
/// the last support qubit, and the mirror image.
pub fn pauli_exponential_circuit(word: &PauliString, theta: f64) -> Result<Circuit> {
    let n = word.n_qubits();
    let mut c = Circuit::new(n.max(1));
    let support = word.support();
    let Some(&last) = support.last() else {
        let phase = Complex64::from_polar(1.0, theta / 2.0);
        let zero = Complex64::new(0.0, 0.0);
        c.push(Gate::Dense1q { q: 0, matrix: [[phase, zero], [zero, phase]] })?;
        return Ok(c);
    };
    // V^dag Z V = X for V = H, and = Y for V = RX(pi/2).
    let change = |c: &mut Circuit, forward: bool| -> Result<()> {
        for &q in &support {
            match word.letter(q) {
                Pauli::X => {
                    c.push(Gate::H { q })?;
                }
                Pauli::Y => {
                    let theta = if forward { FRAC_PI_2 } else { -FRAC_PI_2 };
                    c.push(Gate::Rx { q, theta })?;
                }
                _ => {}
            }
        }
        Ok(())
    };
    change(&mut c, true)?;
    for w in support.windows(2) {
        c.push(Gate::Cnot { control: w[0], target: w[1] })?;
    }
    c.push(Gate::Rz { q: last, theta: -theta })?;
    for w in support.windows(2).rev() {
        c.push(Gate::Cnot { control: w[0], target: w[1] })?;
    }
    change(&mut c, false)?;
    Ok(c)
}

fn push_lowered(c: &mut Circuit, letters: [Pauli; 2], theta: f64) -> Result<()> {
    let word = PauliString::from_letters(&letters);
    c.extend(&pauli_exponential_circuit(&word, theta)?)
}

/// Rotation by `beta` about the y axis of the `{|01>, |10>}` subspace:
/// `exp(-i beta/4 (X0 Y1 - Y0 X1))`.
fn push_subspace_ry(c: &mut Circuit, beta: f64) -> Result<()> {
    push_lowered(c, [Pauli::X, Pauli::Y], -beta / 2.0)?;
    push_lowered(c, [Pauli::Y, Pauli::X], beta / 2.0)
}

/// Rotation by `phi` about the z axis of the same subspace:
/// `exp(-i phi/4 (Z1 - Z0))`.
fn push_subspace_rz(c: &mut Circuit, phi: f64) -> Result<()> {
    c.push(Gate::Rz { q: 1, theta: phi / 2.0 })?;
    c.push(Gate::Rz { q: 0, theta: -phi / 2.0 })?;
    Ok(())
}

/// Two-qubit circuit (on local qubits 0 and 1, standing for the gate's `q0`
/// and `q1`) made of one-qubit gates and CNOTs that equals `gate` up to a
/// global phase.
///
/// EX2 is `exp(-i theta (XX + YY))`, two commuting Pauli exponentials. EX1 is
/// a reflection `n.sigma` inside the one-particle subspace, written as
/// `R diag(1,1,-1,1) R^dag` with `R` rotating the subspace z axis onto `n`.
pub fn decompose_exchange(gate: &Gate) -> Result<Circuit> {
    let mut c = Circuit::new(2);
    match *gate {
        Gate::Ex2 { theta, .. } => {
            push_lowered(&mut c, [Pauli::X, Pauli::X], -2.0 * theta)?;
            push_lowered(&mut c, [Pauli::Y, Pauli::Y], -2.0 * theta)?;
        }
        Gate::Ex1 { theta1, theta2, .. } => {
            let phi = -theta2;
            push_subspace_rz(&mut c, -phi)?;
            push_subspace_ry(&mut c, -theta1)?;
            // diag(1,1,-1,1): controlled-Z conjugated by X on q0
            c.push(Gate::X { q: 0 })?;
            c.push(Gate::H { q: 1 })?;
            c.push(Gate::Cnot { control: 0, target: 1 })?;
            c.push(Gate::H { q: 1 })?;
            c.push(Gate::X { q: 0 })?;
            push_subspace_ry(&mut c, theta1)?;
            push_subspace_rz(&mut c, phi)?;
        }
        _ => return Err(Error::Argument(format!("{} is not an exchange gate", gate.name()))),
    }
    Ok(c)
}

/// `max |U - e^{i a} V|` with the phase `a` taken from `tr(V^dag U)`.
pub fn unitary_distance_up_to_phase(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    assert_eq!(u.shape(), v.shape(), "shape mismatch");
    let overlap: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let phase = if overlap.norm() > 1e-300 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    u.iter().zip(v.iter()).map(|(a, b)| (a - phase * b).norm()).fold(0.0, f64::max)
}
