//! The variational loop: penalized energy, finite-difference gradients and
//! BFGS, plus the Trotter replay experiment.

pub mod bfgs;

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fermion::{
    build_ph_hamiltonian, build_sq_hamiltonian, hf_reference, number_operator, FermionOperator, OccupationState,
};
use crate::heuristic::HeuristicAnsatz;
use crate::integrals::{to_spin_orbitals, MolecularIntegrals};
use crate::qubit::{jordan_wigner, QubitOperator};
use crate::sim::{init_basis_state, Circuit, ExpectationPlan, Statevector};
use crate::uccsd::UccsdAnsatz;

pub use bfgs::{BfgsOptions, BfgsOutcome};

/// Which fermionic form of the Hamiltonian is mapped to qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HamiltonianForm {
    /// Normal-ordered around the reference: `E_HF + body`.
    #[default]
    ParticleHole,
    /// Plain second-quantized form with the core constant.
    SecondQuantized,
}

/// A molecule ready for simulation: qubit Hamiltonian, number operator and
/// Hartree-Fock reference.
#[derive(Debug, Clone)]
pub struct MolecularProblem {
    pub n_qubits: usize,
    pub n_electrons: usize,
    pub reference: OccupationState,
    pub e_hf: f64,
    pub form: HamiltonianForm,
    /// Fermionic Hamiltonian that `hamiltonian` is the image of.
    pub fermionic: FermionOperator,
    pub hamiltonian: QubitOperator,
    pub number: QubitOperator,
}

impl MolecularProblem {
    pub fn from_integrals(mi: &MolecularIntegrals, form: HamiltonianForm) -> Result<Self> {
        let so = to_spin_orbitals(mi);
        let n = so.n_so;
        let reference = hf_reference(so.n_electrons, n)?;
        let ph = build_ph_hamiltonian(&so, &reference);
        let fermionic = match form {
            HamiltonianForm::ParticleHole => ph.full_operator(),
            HamiltonianForm::SecondQuantized => build_sq_hamiltonian(&so),
        };
        Ok(Self {
            n_qubits: n,
            n_electrons: so.n_electrons,
            e_hf: ph.e_hf,
            form,
            hamiltonian: jordan_wigner(&fermionic, n)?,
            number: jordan_wigner(&number_operator(n), n)?,
            fermionic,
            reference,
        })
    }

    pub fn reference_state(&self) -> Result<Statevector> {
        init_basis_state(self.n_qubits, &self.reference.occupied)
    }
}

/// Trial-state family used by the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum Ansatz {
    Uccsd(UccsdAnsatz),
    Heuristic(HeuristicAnsatz),
}

impl Ansatz {
    pub fn n_params(&self) -> usize {
        match self {
            Ansatz::Uccsd(a) => a.n_params(),
            Ansatz::Heuristic(a) => a.n_params(),
        }
    }

    pub fn circuit_template(&self) -> Result<Circuit> {
        match self {
            Ansatz::Uccsd(a) => a.circuit_template(),
            Ansatz::Heuristic(a) => a.circuit_template(),
        }
    }

    pub fn conserves_particles(&self) -> bool {
        match self {
            Ansatz::Uccsd(_) => true,
            Ansatz::Heuristic(a) => a.kind.conserves_particles(),
        }
    }

    /// Zero for UCCSD (the reference point); a seeded uniform draw from
    /// `[0, 2 pi)` for the heuristic circuits.
    pub fn initial_angles(&self, seed: u64) -> Vec<f64> {
        match self {
            Ansatz::Uccsd(a) => vec![0.0; a.n_params()],
            Ansatz::Heuristic(a) => a.random_angles(&mut ChaCha8Rng::seed_from_u64(seed)),
        }
    }
}

/// Piecewise-linear penalty strength over the iteration index.
#[derive(Debug, Clone, PartialEq)]
pub struct MuSchedule {
    breakpoints: Vec<(usize, f64)>,
}

impl MuSchedule {
    /// Breakpoints `(iteration, mu)`; constant before the first and after the last.
    pub fn new(mut breakpoints: Vec<(usize, f64)>) -> Result<Self> {
        breakpoints.sort_by_key(|b| b.0);
        if breakpoints.is_empty() {
            return Err(Error::Argument("empty penalty schedule".into()));
        }
        if breakpoints.iter().any(|b| b.1.is_nan() || b.1 < 0.0) || breakpoints.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(Error::Argument("penalty schedule must be non-negative and non-decreasing".into()));
        }
        Ok(Self { breakpoints })
    }

    pub fn constant(mu: f64) -> Result<Self> {
        Self::new(vec![(0, mu)])
    }

    /// Zero for the first quarter of the run, linear up to `mu_max` at the
    /// half-way point, constant afterwards.
    pub fn ramp(max_iterations: usize, mu_max: f64) -> Result<Self> {
        let start = max_iterations / 4;
        let end = (max_iterations / 2).max(start + 1);
        Self::new(vec![(start, 0.0), (end, mu_max)])
    }

    pub fn at(&self, iteration: usize) -> f64 {
        let b = &self.breakpoints;
        if iteration <= b[0].0 {
            return b[0].1;
        }
        for w in b.windows(2) {
            let ((i0, m0), (i1, m1)) = (w[0], w[1]);
            if iteration <= i1 {
                return m0 + (m1 - m0) * (iteration - i0) as f64 / (i1 - i0) as f64;
            }
        }
        b[b.len() - 1].1
    }

    pub fn max(&self) -> f64 {
        self.breakpoints.last().map(|b| b.1).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    pub tolerance: f64,
    pub gradient_step: f64,
    pub max_iterations: usize,
    pub mu: MuSchedule,
    pub seed: u64,
}

impl VqeConfig {
    pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
    pub const DEFAULT_MU_MAX: f64 = 10.0;

    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 || self.gradient_step.is_nan() || self.gradient_step <= 0.0
        {
            return Err(Error::Argument("tolerance and gradient step must be positive".into()));
        }
        Ok(())
    }

    fn bfgs_options(&self) -> BfgsOptions {
        BfgsOptions { tolerance: self.tolerance, max_iterations: self.max_iterations, ..Default::default() }
    }
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            gradient_step: 1e-6,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            mu: MuSchedule::ramp(Self::DEFAULT_MAX_ITERATIONS, Self::DEFAULT_MU_MAX).expect("valid default"),
            seed: 0,
        }
    }
}

/// One evaluation of the trial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// `<H>`
    pub energy: f64,
    /// `<N>`, or `None` when the penalty was off and it was not computed.
    pub number: Option<f64>,
    /// `<H> + mu (<N> - N)^2`
    pub objective: f64,
}

/// Energy functional for a fixed problem and circuit, with evaluation counters.
pub struct Evaluator {
    hamiltonian: ExpectationPlan,
    number: ExpectationPlan,
    template: Circuit,
    reference: Statevector,
    n_electrons: f64,
    energy_evals: AtomicUsize,
    pauli_evals: AtomicUsize,
}

impl Evaluator {
    pub fn new(
        hamiltonian: &QubitOperator,
        number: &QubitOperator,
        template: Circuit,
        reference: Statevector,
        n_electrons: usize,
    ) -> Result<Self> {
        if template.n_qubits() != reference.n_qubits() || hamiltonian.n_qubits() != reference.n_qubits() {
            return Err(Error::Argument("circuit, operator and reference sizes differ".into()));
        }
        Ok(Self {
            hamiltonian: ExpectationPlan::new(hamiltonian)?,
            number: ExpectationPlan::new(number)?,
            template,
            reference,
            n_electrons: n_electrons as f64,
            energy_evals: AtomicUsize::new(0),
            pauli_evals: AtomicUsize::new(0),
        })
    }

    pub fn for_problem(problem: &MolecularProblem, ansatz: &Ansatz) -> Result<Self> {
        Self::new(
            &problem.hamiltonian,
            &problem.number,
            ansatz.circuit_template()?,
            problem.reference_state()?,
            problem.n_electrons,
        )
    }

    pub fn n_params(&self) -> usize {
        self.template.n_params()
    }

    pub fn state(&self, theta: &[f64]) -> Result<Statevector> {
        let mut c = self.template.clone();
        c.bind(theta)?;
        let mut s = self.reference.clone();
        c.run(&mut s)?;
        Ok(s)
    }

    /// `<H> + mu (<N> - N)^2`; `<N>` is computed when `mu > 0` or `with_number`.
    pub fn evaluate(&self, theta: &[f64], mu: f64, with_number: bool) -> Result<Evaluation> {
        let s = self.state(theta)?;
        let energy = self.hamiltonian.expectation(&s)?;
        self.energy_evals.fetch_add(1, Ordering::Relaxed);
        self.pauli_evals.fetch_add(self.hamiltonian.n_terms(), Ordering::Relaxed);
        let number = if mu > 0.0 || with_number {
            self.pauli_evals.fetch_add(self.number.n_terms(), Ordering::Relaxed);
            Some(self.number.expectation(&s)?)
        } else {
            None
        };
        let objective = match number {
            Some(n) if mu > 0.0 => energy + mu * (n - self.n_electrons).powi(2),
            _ => energy,
        };
        Ok(Evaluation { energy, number, objective })
    }

    /// Central finite differences, components in parallel.
    pub fn gradient(&self, theta: &[f64], mu: f64, h: f64) -> Result<Vec<f64>> {
        if theta.len() != self.n_params() {
            return Err(Error::Argument(format!("expected {} parameters, got {}", self.n_params(), theta.len())));
        }
        (0..theta.len())
            .into_par_iter()
            .map(|i| {
                let mut x = theta.to_vec();
                x[i] = theta[i] + h;
                let plus = self.evaluate(&x, mu, false)?.objective;
                x[i] = theta[i] - h;
                let minus = self.evaluate(&x, mu, false)?.objective;
                Ok((plus - minus) / (2.0 * h))
            })
            .collect()
    }

    pub fn energy_evaluations(&self) -> usize {
        self.energy_evals.load(Ordering::Relaxed)
    }

    pub fn pauli_term_evaluations(&self) -> usize {
        self.pauli_evals.load(Ordering::Relaxed)
    }
}

/// `<psi(theta)|H|psi(theta)> + mu (<N> - N)^2` for a one-off evaluation.
pub fn energy_eval(
    hamiltonian: &QubitOperator,
    number: &QubitOperator,
    circuit: &Circuit,
    theta: &[f64],
    reference: &OccupationState,
    mu: f64,
) -> Result<f64> {
    let ev = Evaluator::new(
        hamiltonian,
        number,
        circuit.clone(),
        init_basis_state(reference.n_modes, &reference.occupied)?,
        reference.n_electrons(),
    )?;
    Ok(ev.evaluate(theta, mu, false)?.objective)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub theta: Vec<f64>,
    /// Objective at the last accepted point (equals `energy` when the penalty is inactive).
    pub objective: f64,
    /// `<H>` at `theta`.
    pub energy: f64,
    pub number: f64,
    /// Objective per accepted iterate, starting at the initial angles.
    pub energy_trace: Vec<f64>,
    /// `<N>` per accepted iterate.
    pub number_trace: Vec<f64>,
    pub iterations: usize,
    pub energy_evaluations: usize,
    pub pauli_term_evaluations: usize,
    pub converged: bool,
    pub mu_final: f64,
    pub seed: u64,
}

impl VqeResult {
    /// Flat `key=value` record.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let theta: Vec<String> = self.theta.iter().map(|t| format!("{t:.17e}")).collect();
        let _ = writeln!(out, "energy={:.15e}", self.energy);
        let _ = writeln!(out, "objective={:.15e}", self.objective);
        let _ = writeln!(out, "number={:.15e}", self.number);
        let _ = writeln!(out, "iterations={}", self.iterations);
        let _ = writeln!(out, "energy_evaluations={}", self.energy_evaluations);
        let _ = writeln!(out, "pauli_term_evaluations={}", self.pauli_term_evaluations);
        let _ = writeln!(out, "converged={}", self.converged);
        let _ = writeln!(out, "mu_final={}", self.mu_final);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "theta={}", theta.join(","));
        out
    }

    /// `iteration,objective,number` rows with a header.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,objective,number\n");
        for (i, (e, n)) in self.energy_trace.iter().zip(&self.number_trace).enumerate() {
            let _ = writeln!(out, "{i},{e:.15e},{n:.15e}");
        }
        out
    }
}

/// Runs BFGS from `theta0` on `evaluator`.
pub fn minimize_from(evaluator: &Evaluator, theta0: &[f64], config: &VqeConfig) -> Result<VqeResult> {
    config.validate()?;
    if theta0.len() != evaluator.n_params() {
        return Err(Error::Argument(format!("expected {} parameters, got {}", evaluator.n_params(), theta0.len())));
    }
    let h = config.gradient_step;
    let mut number_trace = Vec::new();
    let mut step_error = None;
    let objective = |x: &[f64], k: usize| match evaluator.evaluate(x, config.mu.at(k), false) {
        Ok(e) => e.objective,
        Err(_) => f64::NAN,
    };
    let gradient =
        |x: &[f64], k: usize| evaluator.gradient(x, config.mu.at(k), h).unwrap_or_else(|_| vec![f64::NAN; x.len()]);
    let out = bfgs::minimize(theta0, &config.bfgs_options(), objective, gradient, |_, x, _| {
        match evaluator.state(x).and_then(|s| evaluator.number.expectation(&s)) {
            Ok(n) => number_trace.push(n),
            Err(e) => step_error = Some(e),
        }
    });
    if let Some(e) = step_error {
        return Err(e);
    }
    let last_mu = config.mu.at(out.iterations);
    let final_eval = evaluator.evaluate(&out.x, last_mu, true)?;
    if !final_eval.objective.is_finite() {
        return Err(Error::Contract("objective is not finite".into()));
    }
    Ok(VqeResult {
        objective: out.value,
        energy: final_eval.energy,
        number: final_eval.number.unwrap_or(f64::NAN),
        theta: out.x,
        energy_trace: out.trace,
        number_trace,
        iterations: out.iterations,
        energy_evaluations: evaluator.energy_evaluations(),
        pauli_term_evaluations: evaluator.pauli_term_evaluations(),
        converged: out.converged,
        mu_final: last_mu,
        seed: config.seed,
    })
}

/// Full VQE run from the ansatz's default starting angles.
pub fn minimize(problem: &MolecularProblem, ansatz: &Ansatz, config: &VqeConfig) -> Result<VqeResult> {
    let evaluator = Evaluator::for_problem(problem, ansatz)?;
    minimize_from(&evaluator, &ansatz.initial_angles(config.seed), config)
}

/// `<H>` of the `n`-step Trotterized UCCSD circuit at frozen angles.
pub fn trotter_replay(problem: &MolecularProblem, ansatz: &UccsdAnsatz, theta: &[f64], n: usize) -> Result<f64> {
    let stepped = Ansatz::Uccsd(ansatz.with_trotter_steps(n)?);
    let ev = Evaluator::for_problem(problem, &stepped)?;
    Ok(ev.evaluate(theta, 0.0, false)?.energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristic::EntanglerKind;
    use crate::integrals::MolecularIntegrals;
    use crate::uccsd::{active_window, enumerate_excitations};

    /// Two spatial orbitals, two electrons: a minimal-basis H2-like toy.
    fn toy() -> MolecularIntegrals {
        let mut mi = MolecularIntegrals::zeros(2, 2);
        mi.e_core = 0.7;
        mi.set_h(0, 0, -1.25);
        mi.set_h(1, 1, -0.48);
        mi.set_g(0, 0, 0, 0, 0.67);
        mi.set_g(1, 1, 1, 1, 0.70);
        mi.set_g(0, 0, 1, 1, 0.66);
        mi.set_g(0, 1, 0, 1, 0.18);
        mi
    }

    fn uccsd(problem: &MolecularProblem) -> UccsdAnsatz {
        let (ao, av) = active_window(&problem.reference, 2, 2).unwrap();
        let list =
            enumerate_excitations(4, &problem.reference.occupied, &ao.into_iter().collect(), &av.into_iter().collect())
                .unwrap();
        UccsdAnsatz::new(4, list, 1).unwrap()
    }

    #[test]
    fn zero_angles_give_hf_energy() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = uccsd(&p);
        let c = a.circuit_template().unwrap();
        let e = energy_eval(&p.hamiltonian, &p.number, &c, &[0.0; 3], &p.reference, 0.0).unwrap();
        assert!((e - p.e_hf).abs() < 1e-12);
        // the penalty vanishes on a particle-conserving state
        let e10 = energy_eval(&p.hamiltonian, &p.number, &c, &[0.0; 3], &p.reference, 10.0).unwrap();
        assert_eq!(e, e10);
    }

    #[test]
    fn both_forms_agree_on_reference() {
        let ph = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let sq = MolecularProblem::from_integrals(&toy(), HamiltonianForm::SecondQuantized).unwrap();
        let a = Ansatz::Uccsd(uccsd(&ph));
        let theta = [0.1, -0.2, 0.3];
        let e1 = Evaluator::for_problem(&ph, &a).unwrap().evaluate(&theta, 0.0, false).unwrap();
        let e2 = Evaluator::for_problem(&sq, &a).unwrap().evaluate(&theta, 0.0, false).unwrap();
        assert!((e1.energy - e2.energy).abs() < 1e-12);
    }

    #[test]
    fn penalty_is_non_negative_and_counts_terms() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = Ansatz::Heuristic(HeuristicAnsatz::new(4, EntanglerKind::CnotBlock, 2).unwrap());
        let ev = Evaluator::for_problem(&p, &a).unwrap();
        let theta = a.initial_angles(4);
        let plain = ev.evaluate(&theta, 0.0, true).unwrap();
        let pen = ev.evaluate(&theta, 10.0, false).unwrap();
        let n = plain.number.unwrap();
        assert!(pen.objective >= plain.energy);
        assert!((pen.objective - plain.energy - 10.0 * (n - 2.0).powi(2)).abs() < 1e-12);
        assert_eq!(ev.energy_evaluations(), 2);
        assert_eq!(ev.pauli_term_evaluations(), 2 * (p.hamiltonian.len() + p.number.len()));
    }

    #[test]
    fn gradient_symmetry_and_flat_direction() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = Ansatz::Uccsd(uccsd(&p));
        let ev = Evaluator::for_problem(&p, &a).unwrap();
        let g = ev.gradient(&[0.0; 3], 0.0, 1e-6).unwrap();
        // singles are Brillouin-flat at the HF point; the double is not
        assert!(g[0].abs() < 1e-8 && g[1].abs() < 1e-8);
        assert!((g[0] - g[1]).abs() < 1e-8);
        assert!(g[2].abs() > 1e-3);
    }

    #[test]
    fn toy_uccsd_reaches_exact_ground_state() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = Ansatz::Uccsd(uccsd(&p));
        let r = minimize(&p, &a, &VqeConfig::default()).unwrap();
        let (e_diag, _) = crate::oracle::ground_energy_in_sector(&p.hamiltonian, 2).unwrap();
        assert!(r.converged);
        assert!((r.energy - e_diag).abs() < 1e-8, "{} vs {e_diag}", r.energy);
        assert!(r.energy_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert_eq!(r.energy_trace.len(), r.number_trace.len());
        assert_eq!(*r.energy_trace.last().unwrap(), r.objective);
        assert!(r.to_record().contains("converged=true"));
        assert!(r.trace_csv().starts_with("iteration,objective,number\n"));
    }

    #[test]
    fn runs_are_deterministic() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = Ansatz::Heuristic(HeuristicAnsatz::new(4, EntanglerKind::Ex2Block, 2).unwrap());
        let cfg = VqeConfig { seed: 17, max_iterations: 60, ..Default::default() };
        let r1 = minimize(&p, &a, &cfg).unwrap();
        let r2 = minimize(&p, &a, &cfg).unwrap();
        assert_eq!(r1.energy_trace, r2.energy_trace);
    }

    #[test]
    fn mu_schedule_shape() {
        let s = MuSchedule::ramp(100, 10.0).unwrap();
        assert_eq!(s.at(0), 0.0);
        assert_eq!(s.at(25), 0.0);
        assert!((s.at(37) - 4.8).abs() < 1e-12);
        assert_eq!(s.at(50), 10.0);
        assert_eq!(s.at(900), 10.0);
        assert!(MuSchedule::new(vec![(0, 2.0), (5, 1.0)]).is_err());
        assert!(MuSchedule::new(vec![(0, -1.0)]).is_err());
        let bad = VqeConfig { tolerance: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn penalty_does_not_change_conserving_runs() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = Ansatz::Heuristic(HeuristicAnsatz::new(4, EntanglerKind::Ex1Block, 2).unwrap());
        let base =
            VqeConfig { seed: 3, max_iterations: 80, mu: MuSchedule::constant(0.0).unwrap(), ..Default::default() };
        let ramped = VqeConfig { mu: MuSchedule::ramp(80, 10.0).unwrap(), ..base.clone() };
        let r0 = minimize(&p, &a, &base).unwrap();
        let r1 = minimize(&p, &a, &ramped).unwrap();
        assert_eq!(r0.theta, r1.theta);
        assert_eq!(r0.energy, r1.energy);
    }

    #[test]
    fn replay_converges_to_exact_exponential() {
        let p = MolecularProblem::from_integrals(&toy(), HamiltonianForm::ParticleHole).unwrap();
        let a = uccsd(&p);
        let theta = [0.05, -0.07, 0.2];
        let oracle = crate::oracle::UccsdOracle::new(&p, &a.excitations).unwrap();
        let exact = oracle.energy_exact(&theta).unwrap();
        let coarse = trotter_replay(&p, &a, &theta, 1).unwrap();
        let fine = trotter_replay(&p, &a, &theta, 200).unwrap();
        // first-order product formula: error ~ 1/n
        assert!((fine - exact).abs() < (coarse - exact).abs() / 100.0);
        assert!((coarse - oracle.energy_trotter(&theta, 1).unwrap()).abs() < 1e-12);
        assert!((fine - oracle.energy_trotter(&theta, 200).unwrap()).abs() < 1e-12);
    }
}
