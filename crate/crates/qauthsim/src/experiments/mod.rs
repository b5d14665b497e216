//! The security games: real/ideal experiments, trace-distance comparisons,
//! and the derived-property measurements.

pub mod concentration;
pub mod counterexample;
pub mod games;
pub mod lifting;
pub mod qftgame;
pub mod qkd;

pub use concentration::{haar_concentration, total_auth_game, ConcentrationReport};
pub use counterexample::{counterexample_keyed_vs_averaged, CounterexampleReport};
pub use games::{encryption_game, indist_from_measured, unforgeability_game, EncryptionReport, ForgeryReport};
pub use lifting::{lifting_hybrid_check, LiftingReport};
pub use qftgame::{qft_keyleak_gap, QftGapReport};
pub use qkd::{qkd_simulation, EveStrategy, QkdRunResult};

use crate::adversaries::Adversary;
use crate::error::{Error, Result};
use crate::qlinalg::trace_norm;
use crate::qlinalg::QuantumState;
use crate::schemes::{AuthScheme, KeyedEnsemble};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

/// Exhaustive key averaging up to this key-space size; larger spaces are
/// uniformly subsampled with a declared count.
pub const EXHAUSTIVE_KEY_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub enum KeySampling {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

impl KeySampling {
    pub fn auto(scheme: &AuthScheme, n: u64, seed: u64) -> KeySampling {
        if scheme.key_count <= EXHAUSTIVE_KEY_LIMIT {
            KeySampling::Exhaustive
        } else {
            KeySampling::Sampled { n, seed }
        }
    }

    /// The (key, probability weight) list this policy induces.
    pub fn keys(&self, scheme: &AuthScheme) -> Vec<(u64, f64)> {
        match self {
            KeySampling::Exhaustive => {
                let w = 1.0 / scheme.key_count as f64;
                scheme.keys().map(|k| (k, w)).collect()
            }
            KeySampling::Sampled { n, seed } => {
                let mut rng = ChaCha12Rng::seed_from_u64(*seed);
                let w = 1.0 / *n as f64;
                (0..*n).map(|_| (rng.gen_range(0..scheme.key_count), w)).collect()
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            KeySampling::Exhaustive => "exhaustive".into(),
            KeySampling::Sampled { n, seed } => format!("sampled(n={n},seed={seed})"),
        }
    }
}

/// E_k |k><k| (x) [Ver_k . A . Auth_k](rho), held extensionally per key.
pub fn real_experiment(
    scheme: &AuthScheme,
    adversary: &Adversary,
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<KeyedEnsemble> {
    let mut entries = Vec::new();
    for (key, w) in sampling.keys(scheme) {
        let authed = scheme.auth_apply(key, rho)?;
        let attacked = adversary.apply(&authed, key)?;
        let verified = scheme.ver_apply(key, &attacked)?;
        entries.push((key, w, verified));
    }
    Ok(KeyedEnsemble { entries, exhaustive: matches!(sampling, KeySampling::Exhaustive) })
}

/// Same pipeline with an ideal adversary (optionally keyed through a leakage
/// function); retained as a named operation for symmetry with the games.
pub fn ideal_experiment(
    scheme: &AuthScheme,
    ideal: &Adversary,
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<KeyedEnsemble> {
    real_experiment(scheme, ideal, rho, sampling)
}

/// Trace distance between two keyed ensembles.
///
/// Both states are block diagonal in the classical key register, and the
/// trace norm of a block-diagonal operator is the sum of the blocks' trace
/// norms, so the distance is computed exactly as sum_k w_k |sigma_k - tau_k|_1.
pub fn epsilon_between(e1: &KeyedEnsemble, e2: &KeyedEnsemble) -> Result<f64> {
    Ok(per_key_distances(e1, e2)?.iter().map(|(_, w, d)| w * d).sum())
}

/// Per-key trace distances (key, weight, distance); errors on key mismatch.
pub fn per_key_distances(
    e1: &KeyedEnsemble,
    e2: &KeyedEnsemble,
) -> Result<Vec<(u64, f64, f64)>> {
    if e1.entries.len() != e2.entries.len() {
        return Err(Error::KeySetMismatch);
    }
    let mut out = Vec::with_capacity(e1.entries.len());
    for ((k1, w1, s1), (k2, w2, s2)) in e1.entries.iter().zip(e2.entries.iter()) {
        if k1 != k2 || (w1 - w2).abs() > 1e-12 {
            return Err(Error::KeySetMismatch);
        }
        let s2 = s2.aligned_with(s1)?;
        let d = trace_norm(&(s1.density_matrix() - s2.density_matrix()));
        out.push((*k1, *w1, d));
    }
    Ok(out)
}

/// Monte-Carlo standard error of the epsilon estimate (0 when exhaustive).
pub fn epsilon_sigma(e1: &KeyedEnsemble, e2: &KeyedEnsemble) -> Result<f64> {
    if e1.exhaustive {
        return Ok(0.0);
    }
    let d = per_key_distances(e1, e2)?;
    let n = d.len() as f64;
    let mean: f64 = d.iter().map(|(_, _, x)| x).sum::<f64>() / n;
    let var: f64 = d.iter().map(|(_, _, x)| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((var / n).sqrt())
}

/// A single security measurement, serializable as one report row.
#[derive(Debug, Clone, Serialize)]
pub struct SecurityReport {
    pub experiment: String,
    pub scheme: serde_json::Value,
    pub attack: serde_json::Value,
    pub input_state: String,
    pub epsilon: f64,
    pub acceptance: f64,
    pub bound: Option<f64>,
    pub bound_formula: Option<String>,
    pub sigma: f64,
    pub seed: u64,
    pub key_sampling: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_key: Option<Vec<(u64, f64)>>,
}

impl SecurityReport {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0 + 1e-9).contains(&self.epsilon) {
            return Err(Error::Numerical(format!("epsilon {} outside [0,2]", self.epsilon)));
        }
        if !(0.0..=1.0 + 1e-9).contains(&self.acceptance) {
            return Err(Error::Numerical(format!(
                "acceptance {} outside [0,1]",
                self.acceptance
            )));
        }
        Ok(())
    }
}

/// Epsilon of an attack against the computational-basis-respecting simulator;
/// the measurement behind the classical-scheme security claims.
pub struct ClassicalSecurityRun {
    pub epsilon: f64,
    pub sigma: f64,
    pub acceptance: f64,
}

pub fn classical_security_epsilon(
    scheme: &AuthScheme,
    attack: &crate::adversaries::StinespringAttack,
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<ClassicalSecurityRun> {
    let mlabels = scheme.message_space.labels();
    let side_space = rho.space.without(&mlabels)?;
    let ideal = crate::adversaries::construct_ideal_basis_respecting(
        attack,
        &scheme.authenticated_space,
        &side_space,
        None,
    )?;
    let real = real_experiment(scheme, &Adversary::Attack(attack.clone()), rho, sampling)?;
    let idealized =
        ideal_experiment(scheme, &Adversary::BasisRespecting(ideal), rho, sampling)?;
    Ok(ClassicalSecurityRun {
        epsilon: epsilon_between(&real, &idealized)?,
        sigma: epsilon_sigma(&real, &idealized)?,
        acceptance: real.acceptance_probability(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{identity_attack, random_unitary_attack, tag_substitution};
    use crate::hashfam::{GF2wField, PolyHashFamily};
    use crate::qlinalg::{Channel, CVector, Cx, RegisterSpace};
    use crate::schemes::{ver_full, wegman_carter_scheme};

    fn wc(w: u32, tag_bits: u32, message_bits: u32) -> AuthScheme {
        let fam = PolyHashFamily::new(GF2wField::new(w).unwrap(), tag_bits).unwrap();
        wegman_carter_scheme(fam, message_bits).unwrap()
    }

    fn entangled_input() -> QuantumState {
        // (|0>_Z |0>_M + |1>_Z |1>_M)/sqrt(2), with Z listed after M
        let space = RegisterSpace::new(vec![("M", 2), ("Z", 2)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = CVector::zeros(4);
        v[0] = Cx::new(r, 0.0);
        v[3] = Cx::new(r, 0.0);
        QuantumState::pure(space, v).unwrap()
    }

    #[test]
    fn identity_attack_gives_zero_epsilon_and_full_acceptance() {
        let scheme = wc(2, 2, 1);
        let rho = entangled_input();
        let run = classical_security_epsilon(
            &scheme,
            &identity_attack(),
            &rho,
            &KeySampling::Exhaustive,
        )
        .unwrap();
        assert!(run.epsilon < 1e-9, "epsilon = {}", run.epsilon);
        assert!((run.acceptance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tag_substitution_acceptance_is_one_over_tag_space() {
        let scheme = wc(2, 2, 1);
        let rho = QuantumState::basis(scheme.message_space.clone(), &[1]);
        let attack = tag_substitution("T", 4, 2).unwrap();
        let real = real_experiment(
            &scheme,
            &Adversary::Attack(attack),
            &rho,
            &KeySampling::Exhaustive,
        )
        .unwrap();
        // averaged acceptance = 1/|T| by 1-wise uniformity; some keys hit 0
        assert!((real.acceptance_probability() - 0.25).abs() < 1e-9);
        let zero_keys = real.entries.iter().filter(|(_, _, s)| s.weight() < 1e-12).count();
        assert!(zero_keys > 0);
    }

    #[test]
    fn epsilon_metric_properties() {
        let scheme = wc(2, 2, 1);
        let rho = entangled_input();
        let mk = |seed: u64| {
            real_experiment(
                &scheme,
                &Adversary::Attack(
                    random_unitary_attack(
                        scheme.authenticated_space.tensor(&RegisterSpace::single("Z", 2)).unwrap(),
                        seed,
                    )
                    .unwrap(),
                ),
                &rho,
                &KeySampling::Exhaustive,
            )
            .unwrap()
        };
        let a = mk(1);
        let b = mk(2);
        let c = mk(3);
        let dab = epsilon_between(&a, &b).unwrap();
        let dba = epsilon_between(&b, &a).unwrap();
        let daa = epsilon_between(&a, &a).unwrap();
        let dac = epsilon_between(&a, &c).unwrap();
        let dcb = epsilon_between(&c, &b).unwrap();
        assert!(daa < 1e-12);
        assert!((dab - dba).abs() < 1e-12);
        assert!(dab <= dac + dcb + 1e-9);
        assert!((0.0..=2.0).contains(&dab));
    }

    /// Post-processing both ensembles by the same per-key channel never
    /// increases the distance.
    #[test]
    fn epsilon_monotone_under_channels() {
        let scheme = wc(2, 2, 1);
        let rho = entangled_input();
        let mk = |seed: u64| {
            real_experiment(
                &scheme,
                &Adversary::Attack(
                    random_unitary_attack(
                        scheme.authenticated_space.tensor(&RegisterSpace::single("Z", 2)).unwrap(),
                        seed,
                    )
                    .unwrap(),
                ),
                &rho,
                &KeySampling::Exhaustive,
            )
            .unwrap()
        };
        let a = mk(4);
        let b = mk(5);
        let before = epsilon_between(&a, &b).unwrap();
        // a random dephasing-like channel on M
        let m = RegisterSpace::single("M", 2);
        let ch = Channel::dephase_in_basis(
            m.clone(),
            &crate::qlinalg::LinearMap::identity(m),
        )
        .unwrap();
        let push = |e: &KeyedEnsemble| KeyedEnsemble {
            entries: e
                .entries
                .iter()
                .map(|(k, w, s)| (*k, *w, ch.apply_on(s, &["M"]).unwrap()))
                .collect(),
            exhaustive: e.exhaustive,
        };
        let after = epsilon_between(&push(&a), &push(&b)).unwrap();
        assert!(after <= before + 1e-8, "before {before} after {after}");
    }

    /// Acceptance from the filter path equals the accept-branch weight of the
    /// two-branch verification map.
    #[test]
    fn two_path_acceptance_consistency() {
        let scheme = wc(2, 2, 1);
        let rho = entangled_input();
        let attack = random_unitary_attack(
            scheme.authenticated_space.tensor(&RegisterSpace::single("Z", 2)).unwrap(),
            9,
        )
        .unwrap();
        for key in [0u64, 17, 63] {
            let authed = scheme.auth_apply(key, &rho).unwrap();
            let attacked = attack.apply(&authed).unwrap();
            let filtered = scheme.ver_apply(key, &attacked).unwrap();
            let branches = ver_full(&scheme, key, &attacked).unwrap();
            assert!((filtered.weight() - branches.accept.weight()).abs() < 1e-9);
            assert!(
                (branches.accept.weight() + branches.reject_weight - attacked.weight()).abs()
                    < 1e-9
            );
        }
    }

    /// Fully depolarized authenticated register is accepted with probability
    /// |M|/|Y|, and rejection leaves the message maximally mixed.
    #[test]
    fn ver_full_depolarized_input() {
        let scheme = wc(2, 2, 1);
        let y = scheme.authenticated_space.clone();
        let d = y.total_dim();
        let mixed = QuantumState::density(
            y,
            crate::qlinalg::CMatrix::identity(d, d) * Cx::new(1.0 / d as f64, 0.0),
        )
        .unwrap();
        for key in [0u64, 33] {
            let b = ver_full(&scheme, key, &mixed).unwrap();
            assert!((b.accept.weight() - 2.0 / 8.0).abs() < 1e-9);
            // reject branch is exactly I_M/|M| scaled by the reject weight
            let expect =
                crate::qlinalg::CMatrix::identity(2, 2) * Cx::new(b.reject_weight / 2.0, 0.0);
            assert!(
                crate::qlinalg::norms::max_abs_entry(&(b.reject.density_matrix() - expect))
                    < 1e-9
            );
            assert!((b.accept.weight() + b.reject_weight - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_keys_are_deterministic_given_seed() {
        let scheme = wc(2, 2, 1);
        let s1 = KeySampling::Sampled { n: 10, seed: 7 }.keys(&scheme);
        let s2 = KeySampling::Sampled { n: 10, seed: 7 }.keys(&scheme);
        assert_eq!(
            s1.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            s2.iter().map(|(k, _)| *k).collect::<Vec<_>>()
        );
    }
}
