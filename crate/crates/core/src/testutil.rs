//! Shared helpers for unit tests.

use rand::Rng;

use crate::integrals::SpinOrbitalIntegrals;

/// Random spin-free integrals with `<pq|rs> = <qp|sr> = <rs|pq>`.
pub fn random_integrals(n_so: usize, n_el: usize, rng: &mut impl Rng) -> SpinOrbitalIntegrals {
    let mut so = SpinOrbitalIntegrals::zeros(n_so, n_el);
    so.e_core = rng.gen_range(-1.0..1.0);
    for p in 0..n_so {
        for q in 0..=p {
            let v = rng.gen_range(-1.0..1.0);
            so.h_so[p * n_so + q] = v;
            so.h_so[q * n_so + p] = v;
        }
    }
    for p in 0..n_so {
        for q in 0..n_so {
            for r in 0..n_so {
                for s in 0..n_so {
                    let v = rng.gen_range(-0.5..0.5);
                    for (a, b, cc, d) in [(p, q, r, s), (q, p, s, r), (r, s, p, q), (s, r, q, p)] {
                        *so.g_mut(a, b, cc, d) = v;
                    }
                }
            }
        }
    }
    so
}
