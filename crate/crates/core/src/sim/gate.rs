use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::qubit::PauliString;

pub type Matrix2 = [[Complex64; 2]; 2];
pub type Matrix4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which angle of a gate a parameter slot writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Theta,
    Theta1,
    Theta2,
}

/// A circuit instruction.
///
/// Two-qubit matrices use the basis `|00>, |01>, |10>, |11>` where the first
/// listed qubit (`q0` / `control`) is the low bit, so index `k = b(q0) + 2 b(q1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `exp(-i theta X / 2)`
    Rx {
        q: usize,
        theta: f64,
    },
    /// `exp(-i theta Z / 2)`
    Rz {
        q: usize,
        theta: f64,
    },
    H {
        q: usize,
    },
    X {
        q: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    /// Two-parameter exchange gate; see [`ex1_matrix`].
    Ex1 {
        q0: usize,
        q1: usize,
        theta1: f64,
        theta2: f64,
    },
    /// Single-parameter exchange gate; see [`ex2_matrix`].
    Ex2 {
        q0: usize,
        q1: usize,
        theta: f64,
    },
    /// `exp(i theta P / 2)` for the Pauli word `P`.
    PauliExp {
        word: PauliString,
        theta: f64,
    },
    Dense1q {
        q: usize,
        matrix: Matrix2,
    },
    Dense2q {
        q0: usize,
        q1: usize,
        matrix: Matrix4,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rx { q, .. } | Gate::Rz { q, .. } | Gate::H { q } | Gate::X { q } => vec![*q],
            Gate::Dense1q { q, .. } => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Ex1 { q0, q1, .. } | Gate::Ex2 { q0, q1, .. } | Gate::Dense2q { q0, q1, .. } => {
                vec![*q0, *q1]
            }
            Gate::PauliExp { word, .. } => word.support(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "RX",
            Gate::Rz { .. } => "RZ",
            Gate::H { .. } => "H",
            Gate::X { .. } => "X",
            Gate::Cnot { .. } => "CNOT",
            Gate::Ex1 { .. } => "EX1",
            Gate::Ex2 { .. } => "EX2",
            Gate::PauliExp { .. } => "PAULI_EXP",
            Gate::Dense1q { .. } => "DENSE1Q",
            Gate::Dense2q { .. } => "DENSE2Q",
        }
    }

    /// Writes `value` into the angle named by `role`. Returns false if the
    /// gate has no such angle.
    pub fn set_param(&mut self, role: ParamRole, value: f64) -> bool {
        match (self, role) {
            (Gate::Rx { theta, .. }, ParamRole::Theta)
            | (Gate::Rz { theta, .. }, ParamRole::Theta)
            | (Gate::Ex2 { theta, .. }, ParamRole::Theta)
            | (Gate::PauliExp { theta, .. }, ParamRole::Theta)
            | (Gate::Ex1 { theta1: theta, .. }, ParamRole::Theta1)
            | (Gate::Ex1 { theta2: theta, .. }, ParamRole::Theta2) => {
                *theta = value;
                true
            }
            _ => false,
        }
    }

    /// `(one-qubit, two-qubit)` gate count, with Pauli exponentials counted
    /// as their basis-change / CNOT-ladder / RZ lowering.
    pub fn elementary_counts(&self) -> (usize, usize) {
        match self {
            Gate::Rx { .. } | Gate::Rz { .. } | Gate::H { .. } | Gate::X { .. } | Gate::Dense1q { .. } => (1, 0),
            Gate::Cnot { .. } | Gate::Ex1 { .. } | Gate::Ex2 { .. } | Gate::Dense2q { .. } => (0, 1),
            Gate::PauliExp { word, .. } => {
                let w = word.weight();
                if w == 0 {
                    return (0, 0);
                }
                let rotated = (word.x_mask()).count_ones() as usize;
                (2 * rotated + 1, 2 * (w - 1))
            }
        }
    }

    /// Dense matrix of a one-qubit gate.
    pub fn matrix_1q(&self) -> Option<Matrix2> {
        Some(match self {
            Gate::Rx { theta, .. } => rx_matrix(*theta),
            Gate::Rz { theta, .. } => rz_matrix(*theta),
            Gate::H { .. } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::X { .. } => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Dense1q { matrix, .. } => *matrix,
            _ => return None,
        })
    }

    /// Dense matrix of a two-qubit gate in the `(q0, q1)` basis.
    pub fn matrix_2q(&self) -> Option<Matrix4> {
        Some(match self {
            Gate::Cnot { .. } => {
                // control = low bit: |01> <-> |11>
                let mut m = [[ZERO; 4]; 4];
                m[0][0] = ONE;
                m[2][2] = ONE;
                m[1][3] = ONE;
                m[3][1] = ONE;
                m
            }
            Gate::Ex1 { theta1, theta2, .. } => ex1_matrix(*theta1, *theta2),
            Gate::Ex2 { theta, .. } => ex2_matrix(*theta),
            Gate::Dense2q { matrix, .. } => *matrix,
            _ => return None,
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if let Gate::PauliExp { word, theta } = self {
            return write!(f, " {word} {theta:.7}");
        }
        for q in self.qubits() {
            write!(f, " q{q}")?;
        }
        match self {
            Gate::Rx { theta, .. } | Gate::Rz { theta, .. } | Gate::Ex2 { theta, .. } => {
                write!(f, " {theta:.7}")
            }
            Gate::Ex1 { theta1, theta2, .. } => write!(f, " {theta1:.7} {theta2:.7}"),
            Gate::Dense1q { matrix, .. } => write_entries(f, matrix.iter().flatten()),
            Gate::Dense2q { matrix, .. } => write_entries(f, matrix.iter().flatten()),
            _ => Ok(()),
        }
    }
}

fn write_entries<'a>(f: &mut fmt::Formatter<'_>, entries: impl Iterator<Item = &'a Complex64>) -> fmt::Result {
    for z in entries {
        write!(f, " {:.7}{:+.7}i", z.re, z.im)?;
    }
    Ok(())
}

pub fn rx_matrix(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let ms = Complex64::new(0.0, -s);
    [[Complex64::new(c, 0.0), ms], [ms, Complex64::new(c, 0.0)]]
}

pub fn rz_matrix(theta: f64) -> Matrix2 {
    [[Complex64::from_polar(1.0, -theta / 2.0), ZERO], [ZERO, Complex64::from_polar(1.0, theta / 2.0)]]
}

/// Two-parameter particle-conserving exchange gate:
/// on `span{|01>, |10>}` it is `[[cos t1, e^{i t2} sin t1], [e^{-i t2} sin t1, -cos t1]]`.
pub fn ex1_matrix(theta1: f64, theta2: f64) -> Matrix4 {
    let (s, c) = theta1.sin_cos();
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[3][3] = ONE;
    m[1][1] = Complex64::new(c, 0.0);
    m[1][2] = Complex64::from_polar(s, theta2);
    m[2][1] = Complex64::from_polar(s, -theta2);
    m[2][2] = Complex64::new(-c, 0.0);
    m
}

/// Single-parameter exchange gate:
/// on `span{|01>, |10>}` it is `[[cos 2t, -i sin 2t], [-i sin 2t, cos 2t]]`.
pub fn ex2_matrix(theta: f64) -> Matrix4 {
    let (s, c) = (2.0 * theta).sin_cos();
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[3][3] = ONE;
    m[1][1] = Complex64::new(c, 0.0);
    m[2][2] = Complex64::new(c, 0.0);
    m[1][2] = Complex64::new(0.0, -s);
    m[2][1] = Complex64::new(0.0, -s);
    m
}
