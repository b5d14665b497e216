//! The appended-random-bit counterexample: key-averaged security holds while
//! the keyed comparison is bounded away from zero, because the adversary's
//! copy of the extra bit is perfectly correlated with the key.

use super::{epsilon_between, real_experiment, KeySampling};
use crate::adversaries::{Adversary, IdealOblivious, StinespringAttack, StructuredOp};
use crate::error::Result;
use crate::qlinalg::{trace_norm, QuantumState};
use crate::schemes::AuthScheme;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    /// distance with the key register traced out, against the witness that
    /// fabricates its own random bit
    pub epsilon_key_averaged: f64,
    /// keyed distance against the identity-oblivious witness
    pub epsilon_keyed_identity: f64,
    /// smallest keyed distance over the declared witness set
    pub epsilon_keyed_best: f64,
    pub witnesses: Vec<String>,
}

/// CNOT-copy of the appended bit register into the adversary's side qubit.
pub fn copy_appended_bit_attack() -> StinespringAttack {
    let mut perm = vec![0usize; 4];
    for b in 0..2usize {
        for z in 0..2usize {
            perm[b * 2 + z] = b * 2 + (z ^ b);
        }
    }
    StinespringAttack {
        name: "copy-appended-bit".into(),
        ancillas: vec![],
        ops: vec![StructuredOp::Perm {
            targets: vec!["B".into(), "Z".into()],
            perm,
            phases: None,
        }],
        projector: None,
        trace_out: vec![],
        descriptor: serde_json::json!({"name": "copy-appended-bit"}),
    }
}

/// Runs the real experiment under `attack` and compares it against oblivious
/// witnesses both keyed and key-averaged. `scheme` must carry the appended
/// bit register "B"; `rho` holds the adversary qubit "Z".
pub fn counterexample_keyed_vs_averaged(
    scheme: &AuthScheme,
    attack: &StinespringAttack,
    rho: &QuantumState,
) -> Result<CounterexampleReport> {
    let sampling = KeySampling::Exhaustive;
    let real = real_experiment(scheme, &Adversary::Attack(attack.clone()), rho, &sampling)?;

    let z_space = rho.space.subspace(&["Z"])?;
    let witnesses = vec![
        IdealOblivious::identity(z_space.clone()),
        IdealOblivious::randomize(z_space),
    ];
    let mut keyed = Vec::new();
    let mut averaged = Vec::new();
    for w in &witnesses {
        let ideal = real_experiment(scheme, &Adversary::Oblivious(w.clone()), rho, &sampling)?;
        keyed.push(epsilon_between(&real, &ideal)?);
        let ra = real.key_averaged_state()?;
        let ia = ideal.key_averaged_state()?;
        averaged.push(trace_norm(&(ra.density_matrix() - ia.aligned_with(&ra)?.density_matrix())));
    }
    Ok(CounterexampleReport {
        epsilon_key_averaged: averaged[1],
        epsilon_keyed_identity: keyed[0],
        epsilon_keyed_best: keyed.iter().cloned().fold(f64::INFINITY, f64::min),
        witnesses: witnesses.iter().map(|w| w.name.clone()).collect(),
    })
}
