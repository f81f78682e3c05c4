//! Hardware-style trial states: `D` entangler blocks interleaved with
//! single-qubit rotation layers on a nearest-neighbour chain.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::sim::{expand_block, Circuit, GateTemplate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntanglerKind {
    /// Two-angle exchange gates only.
    Ex1Block,
    /// One-angle exchange gates followed by an RZ on every qubit.
    Ex2Block,
    /// CNOT ladder with ZXZ Euler rotations on every qubit.
    CnotBlock,
}

impl EntanglerKind {
    pub fn conserves_particles(self) -> bool {
        !matches!(self, EntanglerKind::CnotBlock)
    }
}

impl fmt::Display for EntanglerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntanglerKind::Ex1Block => "ex1",
            EntanglerKind::Ex2Block => "ex2",
            EntanglerKind::CnotBlock => "cnot",
        })
    }
}

impl FromStr for EntanglerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex1" => Ok(EntanglerKind::Ex1Block),
            "ex2" => Ok(EntanglerKind::Ex2Block),
            "cnot" => Ok(EntanglerKind::CnotBlock),
            other => Err(Error::Argument(format!("unknown entangler `{other}`"))),
        }
    }
}

/// Number of free angles for `depth` blocks on `n_qubits`.
pub fn param_count(kind: EntanglerKind, n_qubits: usize, depth: usize) -> Result<usize> {
    if depth < 1 {
        return Err(Error::Argument("depth must be at least 1".into()));
    }
    if n_qubits < 2 {
        return Err(Error::Argument("an entangler needs at least two qubits".into()));
    }
    let n = n_qubits;
    Ok(match kind {
        EntanglerKind::Ex1Block => 2 * (n - 1) * depth,
        EntanglerKind::Ex2Block => (n - 1) * depth + n * depth,
        EntanglerKind::CnotBlock => n * (3 * depth + 2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicAnsatz {
    pub n_qubits: usize,
    pub kind: EntanglerKind,
    pub depth: usize,
}

impl HeuristicAnsatz {
    pub fn new(n_qubits: usize, kind: EntanglerKind, depth: usize) -> Result<Self> {
        param_count(kind, n_qubits, depth)?;
        Ok(Self { n_qubits, kind, depth })
    }

    pub fn n_params(&self) -> usize {
        param_count(self.kind, self.n_qubits, self.depth).expect("validated at construction")
    }

    /// Uniform draw from `[0, 2 pi)` for every angle.
    pub fn random_angles(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.n_params()).map(|_| rng.gen_range(0.0..TAU)).collect()
    }

    fn rotations(&self, c: &mut Circuit, templates: &[GateTemplate]) -> Result<()> {
        for &t in templates {
            c.extend(&expand_block(t, 0, self.n_qubits - 1)?)?;
        }
        Ok(())
    }

    /// Unbound circuit. Parameters are ordered gate by gate.
    pub fn circuit_template(&self) -> Result<Circuit> {
        let last = self.n_qubits - 1;
        let mut c = Circuit::new(self.n_qubits);
        match self.kind {
            EntanglerKind::Ex1Block => {
                for _ in 0..self.depth {
                    c.extend(&expand_block(GateTemplate::Ex1, 0, last)?)?;
                }
            }
            EntanglerKind::Ex2Block => {
                for _ in 0..self.depth {
                    c.extend(&expand_block(GateTemplate::Ex2, 0, last)?)?;
                    self.rotations(&mut c, &[GateTemplate::Rz])?;
                }
            }
            EntanglerKind::CnotBlock => {
                // the leading Z of the first Euler layer only phases the basis state
                self.rotations(&mut c, &[GateTemplate::Rx, GateTemplate::Rz])?;
                for _ in 0..self.depth {
                    c.extend(&expand_block(GateTemplate::Cnot, 0, last)?)?;
                    self.rotations(&mut c, &[GateTemplate::Rz, GateTemplate::Rx, GateTemplate::Rz])?;
                }
            }
        }
        debug_assert_eq!(c.n_params(), self.n_params());
        Ok(c)
    }
}

pub fn build_heuristic_circuit(ansatz: &HeuristicAnsatz, theta: &[f64]) -> Result<Circuit> {
    let mut c = ansatz.circuit_template()?;
    c.bind(theta)?;
    Ok(c)
}

/// Warm start for a deeper circuit: the shallow optimum followed by angles
/// under which the extra blocks act as the identity.
///
/// EX2 blocks are the identity at zero angles. An EX1 block at zero angles is
/// a diagonal sign pattern that squares to the identity, so EX1 needs an even
/// number of extra blocks. CNOT ladders have no identity point.
pub fn embed_angles(shallow: &HeuristicAnsatz, theta: &[f64], deeper: &HeuristicAnsatz) -> Result<Vec<f64>> {
    if shallow.kind != deeper.kind || shallow.n_qubits != deeper.n_qubits || deeper.depth < shallow.depth {
        return Err(Error::Argument("deeper ansatz must extend the shallow one".into()));
    }
    if theta.len() != shallow.n_params() {
        return Err(Error::Argument(format!("expected {} angles, got {}", shallow.n_params(), theta.len())));
    }
    let extra_blocks = deeper.depth - shallow.depth;
    match deeper.kind {
        EntanglerKind::Ex2Block => {}
        EntanglerKind::Ex1Block if extra_blocks.is_multiple_of(2) => {}
        kind => return Err(Error::Argument(format!("{extra_blocks} extra {kind} blocks have no identity setting"))),
    }
    let mut out = theta.to_vec();
    out.resize(deeper.n_params(), 0.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{hf_reference, number_operator};
    use crate::qubit::jordan_wigner;
    use crate::sim::{expectation, init_basis_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_counts() {
        assert_eq!(param_count(EntanglerKind::Ex1Block, 8, 8).unwrap(), 112);
        assert_eq!(param_count(EntanglerKind::Ex2Block, 8, 8).unwrap(), 120);
        assert_eq!(param_count(EntanglerKind::CnotBlock, 8, 2).unwrap(), 64);
        assert!(param_count(EntanglerKind::Ex1Block, 8, 0).is_err());
    }

    #[test]
    fn templates_match_counts() {
        for kind in [EntanglerKind::Ex1Block, EntanglerKind::Ex2Block, EntanglerKind::CnotBlock] {
            for (n, d) in [(2, 1), (4, 3), (8, 8)] {
                let a = HeuristicAnsatz::new(n, kind, d).unwrap();
                let c = a.circuit_template().unwrap();
                assert_eq!(c.n_params(), param_count(kind, n, d).unwrap());
                // every slot drives exactly one gate angle
                assert!(c.slots().iter().all(|s| s.uses.len() == 1));
            }
        }
    }

    #[test]
    fn ex2_zero_is_identity() {
        let a = HeuristicAnsatz::new(6, EntanglerKind::Ex2Block, 3).unwrap();
        let c = build_heuristic_circuit(&a, &vec![0.0; a.n_params()]).unwrap();
        let occ = hf_reference(2, 6).unwrap();
        let mut s = init_basis_state(6, &occ.occupied).unwrap();
        let before = s.clone();
        c.run(&mut s).unwrap();
        let overlap = before.inner(&s);
        assert!((overlap.norm() - 1.0).abs() < 1e-14);
    }

    fn number_spread(kind: EntanglerKind, seed: u64) -> (f64, f64) {
        let n = 8;
        let a = HeuristicAnsatz::new(n, kind, 4).unwrap();
        let theta = a.random_angles(&mut ChaCha8Rng::seed_from_u64(seed));
        let occ = hf_reference(2, n).unwrap();
        let mut s = init_basis_state(n, &occ.occupied).unwrap();
        build_heuristic_circuit(&a, &theta).unwrap().run(&mut s).unwrap();
        let num = jordan_wigner(&number_operator(n), n).unwrap();
        let n_mean = expectation(&s, &num).unwrap();
        let n_sq = expectation(&s, &(&num * &num)).unwrap();
        (n_mean, n_sq - 2.0 * 2.0 * n_mean + 4.0)
    }

    #[test]
    fn exchange_blocks_conserve_particles() {
        for kind in [EntanglerKind::Ex1Block, EntanglerKind::Ex2Block] {
            for seed in 0..5 {
                let (mean, var) = number_spread(kind, seed);
                assert!((mean - 2.0).abs() < 1e-10, "{kind}: {mean}");
                assert!(var.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cnot_block_mixes_particle_number() {
        let (_, var) = number_spread(EntanglerKind::CnotBlock, 1);
        assert!(var > 1e-3, "<(N-2)^2> = {var}");
    }

    #[test]
    fn embedded_angles_reproduce_shallow_state() {
        let occ = hf_reference(2, 6).unwrap();
        for (kind, extra) in [(EntanglerKind::Ex2Block, 1), (EntanglerKind::Ex1Block, 2)] {
            let shallow = HeuristicAnsatz::new(6, kind, 2).unwrap();
            let deeper = HeuristicAnsatz::new(6, kind, 2 + extra).unwrap();
            let theta = shallow.random_angles(&mut ChaCha8Rng::seed_from_u64(3));
            let wide = embed_angles(&shallow, &theta, &deeper).unwrap();
            let mut a = init_basis_state(6, &occ.occupied).unwrap();
            build_heuristic_circuit(&shallow, &theta).unwrap().run(&mut a).unwrap();
            let mut b = init_basis_state(6, &occ.occupied).unwrap();
            build_heuristic_circuit(&deeper, &wide).unwrap().run(&mut b).unwrap();
            assert!((a.inner(&b).norm() - 1.0).abs() < 1e-12, "{kind}");
        }
        let shallow = HeuristicAnsatz::new(6, EntanglerKind::Ex1Block, 1).unwrap();
        let deeper = HeuristicAnsatz::new(6, EntanglerKind::Ex1Block, 2).unwrap();
        assert!(embed_angles(&shallow, &[0.0; 10], &deeper).is_err());
    }

    #[test]
    fn kind_round_trip() {
        for k in [EntanglerKind::Ex1Block, EntanglerKind::Ex2Block, EntanglerKind::CnotBlock] {
            assert_eq!(k.to_string().parse::<EntanglerKind>().unwrap(), k);
        }
        assert!("uccsd".parse::<EntanglerKind>().is_err());
    }
}
