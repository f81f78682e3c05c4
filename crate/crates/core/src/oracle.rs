//! Brute-force references: dense operator matrices, exact diagonalization in
//! a particle-number sector, and UCCSD energies from exact (or Trotterized)
//! exponentials of the fermionic generators.
//!
//! The UCCSD reference works directly with fermionic determinants and never
//! touches Jordan-Wigner strings or circuits, so agreeing with the circuit
//! path is a genuine cross-check.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{apply_word, FermionOperator};
use crate::qubit::QubitOperator;
use crate::uccsd::ExcitationList;
use crate::vqe::{bfgs, BfgsOptions, MolecularProblem, VqeConfig};

/// Largest register [`operator_to_matrix`] will densify.
pub const DENSE_QUBIT_LIMIT: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense `2^n x 2^n` matrix of a qubit operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub n_qubits: usize,
    pub matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |M - M^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Ascending eigenvalues of a Hermitian matrix.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.hermiticity_defect() > 1e-10 {
            return Err(Error::Contract("matrix is not Hermitian".into()));
        }
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

/// Column `b` is `op |b>`, assembled from each word's action on basis states.
pub fn operator_to_matrix(op: &QubitOperator) -> Result<DenseOperator> {
    let n = op.n_qubits();
    if n > DENSE_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { n_qubits: n, limit: DENSE_QUBIT_LIMIT });
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::from_element(dim, dim, ZERO);
    for (p, c) in op.terms() {
        for b in 0..dim {
            let (phase, row) = p.apply_to_basis(b as u64);
            matrix[(row as usize, b)] += c * phase;
        }
    }
    Ok(DenseOperator { n_qubits: n, matrix })
}

/// Basis indices with exactly `n_electrons` bits set, ascending.
pub fn sector_basis(n_qubits: usize, n_electrons: usize) -> Result<Vec<usize>> {
    if n_electrons > n_qubits || n_qubits > 30 {
        return Err(Error::EmptySector { n_electrons, n_qubits });
    }
    Ok((0..1usize << n_qubits).filter(|b| b.count_ones() as usize == n_electrons).collect())
}

fn index_of(basis: &[usize]) -> HashMap<usize, usize> {
    basis.iter().enumerate().map(|(i, &b)| (b, i)).collect()
}

/// Restriction of a qubit operator to the span of `basis`. Matrix elements
/// leaving the span are dropped.
pub fn sector_matrix(op: &QubitOperator, basis: &[usize]) -> DMatrix<Complex64> {
    let index = index_of(basis);
    let mut m = DMatrix::from_element(basis.len(), basis.len(), ZERO);
    for (p, c) in op.terms() {
        for (col, &b) in basis.iter().enumerate() {
            let (phase, out) = p.apply_to_basis(b as u64);
            if let Some(&row) = index.get(&(out as usize)) {
                m[(row, col)] += c * phase;
            }
        }
    }
    m
}

/// Restriction of a fermionic operator to determinants in `basis`.
pub fn fermion_sector_matrix(op: &FermionOperator, basis: &[usize]) -> DMatrix<Complex64> {
    let index = index_of(basis);
    let mut m = DMatrix::from_element(basis.len(), basis.len(), ZERO);
    for (c, word) in op.terms() {
        for (col, &b) in basis.iter().enumerate() {
            if let Some((sign, out)) = apply_word(word, b as u64) {
                if let Some(&row) = index.get(&(out as usize)) {
                    m[(row, col)] += c * sign;
                }
            }
        }
    }
    m
}

/// Lowest eigenpair of `op` among states with `n_electrons` particles. The
/// eigenvector is returned embedded in the full `2^n` space.
pub fn ground_energy_in_sector(op: &QubitOperator, n_electrons: usize) -> Result<(f64, Vec<Complex64>)> {
    let n = op.n_qubits();
    let basis = sector_basis(n, n_electrons)?;
    let block = sector_matrix(op, &basis);
    let eig = block.symmetric_eigen();
    let (k, &e) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty sector");
    let mut full = vec![ZERO; 1 << n];
    for (i, &b) in basis.iter().enumerate() {
        full[b] = eig.eigenvectors[(i, k)];
    }
    Ok((e, full))
}

/// `exp(A) v` by a Taylor series on `s` scaled steps, `s >= ||A||_1`.
pub fn expm_multiply(a: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let norm1 = (0..a.ncols()).map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = norm1.ceil().max(1.0) as usize;
    let scale = Complex64::new(1.0 / steps as f64, 0.0);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..60 {
            term = (a * &term) * (scale / k as f64);
            acc += &term;
            if term.norm() <= 1e-18 * acc.norm() {
                break;
            }
        }
        out = acc;
    }
    out
}

/// Dense UCCSD energies inside the `N`-electron sector.
#[derive(Debug, Clone)]
pub struct UccsdOracle {
    hamiltonian: DMatrix<Complex64>,
    generators: Vec<DMatrix<Complex64>>,
    reference: DVector<Complex64>,
}

impl UccsdOracle {
    pub fn new(problem: &MolecularProblem, excitations: &ExcitationList) -> Result<Self> {
        if problem.n_qubits > 12 {
            return Err(Error::DimensionGuard { n_qubits: problem.n_qubits, limit: 12 });
        }
        let basis = sector_basis(problem.n_qubits, problem.n_electrons)?;
        let ref_bits = problem.reference.bits() as usize;
        let reference = DVector::from_iterator(
            basis.len(),
            basis.iter().map(|&b| if b == ref_bits { Complex64::new(1.0, 0.0) } else { ZERO }),
        );
        Ok(Self {
            hamiltonian: fermion_sector_matrix(&problem.fermionic, &basis),
            generators: excitations
                .excitations()
                .iter()
                .map(|e| fermion_sector_matrix(&e.generator(), &basis))
                .collect(),
            reference,
        })
    }

    pub fn n_params(&self) -> usize {
        self.generators.len()
    }

    pub fn sector_dim(&self) -> usize {
        self.reference.len()
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::Argument(format!("expected {} parameters, got {}", self.n_params(), theta.len())));
        }
        Ok(())
    }

    fn energy_of(&self, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(&self.hamiltonian * psi)).re
    }

    /// `exp(sum_k theta_k G_k) |ref>`.
    pub fn state_exact(&self, theta: &[f64]) -> Result<DVector<Complex64>> {
        self.check(theta)?;
        let mut a = DMatrix::from_element(self.sector_dim(), self.sector_dim(), ZERO);
        for (g, &t) in self.generators.iter().zip(theta) {
            a += g * Complex64::new(t, 0.0);
        }
        Ok(expm_multiply(&a, &self.reference))
    }

    /// `prod_steps prod_k exp(theta_k G_k / n) |ref>`, excitations applied in
    /// parameter order within each step.
    pub fn state_trotter(&self, theta: &[f64], n: usize) -> Result<DVector<Complex64>> {
        self.check(theta)?;
        if n == 0 {
            return Err(Error::Argument("at least one Trotter step is required".into()));
        }
        let mut psi = self.reference.clone();
        let scaled: Vec<DMatrix<Complex64>> =
            self.generators.iter().zip(theta).map(|(g, &t)| g * Complex64::new(t / n as f64, 0.0)).collect();
        for _ in 0..n {
            for a in &scaled {
                psi = expm_multiply(a, &psi);
            }
        }
        Ok(psi)
    }

    pub fn energy_exact(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.energy_of(&self.state_exact(theta)?))
    }

    pub fn energy_trotter(&self, theta: &[f64], n: usize) -> Result<f64> {
        Ok(self.energy_of(&self.state_trotter(theta, n)?))
    }
}

/// Optimum of the exact-exponential UCCSD energy (`trotter_steps = None`) or
/// of its `n`-step product form. Returns the energy and the angles.
pub fn uccsd_analytic_energy(
    problem: &MolecularProblem,
    excitations: &ExcitationList,
    trotter_steps: Option<usize>,
    config: &VqeConfig,
) -> Result<(f64, Vec<f64>)> {
    config.validate()?;
    let oracle = UccsdOracle::new(problem, excitations)?;
    let energy = |x: &[f64]| -> f64 {
        let e = match trotter_steps {
            None => oracle.energy_exact(x),
            Some(n) => oracle.energy_trotter(x, n),
        };
        e.unwrap_or(f64::NAN)
    };
    let h = config.gradient_step;
    let grad = |x: &[f64]| -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut y = x.to_vec();
                y[i] = x[i] + h;
                let plus = energy(&y);
                y[i] = x[i] - h;
                (plus - energy(&y)) / (2.0 * h)
            })
            .collect()
    };
    let options =
        BfgsOptions { tolerance: config.tolerance, max_iterations: config.max_iterations, ..Default::default() };
    let x0 = vec![0.0; oracle.n_params()];
    let out = bfgs::minimize(&x0, &options, |x, _| energy(x), |x, _| grad(x), |_, _, _| {});
    if !out.value.is_finite() {
        return Err(Error::Contract("analytic UCCSD energy is not finite".into()));
    }
    Ok((out.value, out.x))
}
