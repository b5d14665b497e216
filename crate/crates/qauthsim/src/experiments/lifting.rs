//! Teleportation-hybrid equalities behind the key-averaged lifting argument:
//! running the Pauli-randomized protocol on a state is circuit-identical to
//! teleporting the state through a maximally entangled pair, re-indexing the
//! Pauli key against the measurement outcome, and deferring the measurement
//! past the protocol.

use super::KeySampling;
use crate::adversaries::StinespringAttack;
use crate::error::{Error, Result};
use crate::qlinalg::{
    maximally_entangled, pauli_operator, trace_norm, CMatrix, Channel, Cx, LinearMap,
    QuantumState, RegisterSpace,
};
use crate::schemes::AuthScheme;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct LiftingReport {
    /// | real - hybrid(teleport + immediate correction) |_1
    pub teleport_discrepancy: f64,
    /// | hybrid(immediate correction) - hybrid(deferred correction) |_1
    pub reindex_discrepancy: f64,
    /// | deferred correction - measurement pushed past the protocol |_1
    pub commutation_discrepancy: f64,
    /// key-averaged distance from the oblivious witness extracted out of the
    /// maximally-entangled-input game
    pub final_epsilon: f64,
}

fn pauli_on(label: &str, p: u64, q: u64) -> LinearMap {
    pauli_operator(RegisterSpace::single(label, 2), p, q).expect("single qubit")
}

/// Key-averaged protocol output on (M, Z): E_k Ver_k(O(Auth_k(rho))).
fn protocol_average(
    scheme: &AuthScheme,
    attack: &StinespringAttack,
    rho: &QuantumState,
) -> Result<QuantumState> {
    let sampling = KeySampling::Exhaustive;
    let ens = super::real_experiment(
        scheme,
        &crate::adversaries::Adversary::Attack(attack.clone()),
        rho,
        &sampling,
    )?;
    ens.key_averaged_state()
}

/// Unnormalized residual on the non-measured registers after projecting
/// (l1, l2) onto the Bell vector indexed by (p, q).
fn bell_branch(
    state: &QuantumState,
    l1: &str,
    l2: &str,
    p: u64,
    q: u64,
) -> Result<QuantumState> {
    let bell = maximally_entangled(2, (l1, l2))?;
    let rotated = bell.apply(&pauli_on(l1, p, q), &[l1])?;
    let v = rotated.vector().expect("pure");
    let proj = v * v.adjoint();
    let sub = RegisterSpace::new(vec![(l1, 2), (l2, 2)])?;
    let projected = state.apply(&LinearMap::endo(sub, proj)?, &[l1, l2])?;
    projected.partial_trace(&[l1, l2])
}

/// The three hybrid equalities plus the final key-averaged epsilon.
///
/// `scheme` must be the Pauli-randomized composition on a single message
/// qubit; `rho` lives on (Mi, Z) with a qubit side register.
pub fn lifting_hybrid_check(
    scheme: &AuthScheme,
    attack: &StinespringAttack,
    rho: &QuantumState,
) -> Result<LiftingReport> {
    if scheme.message_space.total_dim() != 2 {
        return Err(Error::InvalidArgument("hybrid check runs on one message qubit".into()));
    }
    let rho_m = rho.renamed("Mi", "M")?;
    let real = protocol_average(scheme, attack, &rho_m)?;

    // ancilla pair (A, B); teleport Mi -> A via a Bell measurement on (Mi, B)
    let mes = maximally_entangled(2, ("A", "B"))?;
    let joint = mes.tensor(rho)?;

    let mut h1: Option<CMatrix> = None;
    let mut h2: Option<CMatrix> = None;
    for pq in 0..4u64 {
        let (p, q) = (pq >> 1, pq & 1);
        let branch = bell_branch(&joint, "Mi", "B", p, q)?; // on (A, Z)
        // hybrid 1: correct immediately, then run the protocol
        let corrected = branch.apply(&pauli_on("A", p, q), &["A"])?.renamed("A", "M")?;
        let out1 = protocol_average(scheme, attack, &corrected)?;
        let m1 = out1.density_matrix();
        h1 = Some(match h1 {
            None => m1,
            Some(acc) => acc + m1,
        });
        // hybrid 2: run the protocol uncorrected, correct at the end
        let uncorrected = branch.renamed("A", "M")?;
        let out2 = protocol_average(scheme, attack, &uncorrected)?
            .apply(&pauli_on("M", p, q).adjoint(), &["M"])?;
        let m2 = out2.aligned_with(&out1)?.density_matrix();
        h2 = Some(match h2 {
            None => m2,
            Some(acc) => acc + m2,
        });
    }
    let h1 = h1.expect("four branches");
    let h2 = h2.expect("four branches");

    // hybrid 3: protocol first (on A), Bell measurement afterwards
    let authed_first = {
        let renamed = joint.renamed("A", "M")?;
        protocol_average(scheme, attack, &renamed)?.renamed("M", "A")?
    };
    let mut h3: Option<CMatrix> = None;
    for pq in 0..4u64 {
        let (p, q) = (pq >> 1, pq & 1);
        let branch = bell_branch(&authed_first, "Mi", "B", p, q)?;
        let out = branch.apply(&pauli_on("A", p, q).adjoint(), &["A"])?.renamed("A", "M")?;
        let m = out.aligned_with(&real)?.density_matrix();
        h3 = Some(match h3 {
            None => m,
            Some(acc) => acc + m,
        });
    }
    let h3 = h3.expect("four branches");

    let real_m = real.density_matrix();
    let teleport_discrepancy = trace_norm(&(real_m.clone() - &h1));
    let reindex_discrepancy = trace_norm(&(h1 - &h2));
    let commutation_discrepancy = trace_norm(&(h2 - &h3));

    // Witness channel on Z from the maximally-entangled-input game: feed the
    // side register with matrix units, run the protocol on the entangled
    // half, and keep the block where the pair stayed intact.
    let dz = rho.space.dim_of("Z")?;
    let z_space = RegisterSpace::single("Z", dz);
    let mut choi = CMatrix::zeros(dz * dz, dz * dz);
    for i in 0..dz {
        for j in 0..dz {
            let mut unit = CMatrix::zeros(dz, dz);
            unit[(i, j)] = Cx::new(1.0, 0.0);
            let zin = QuantumState::density(z_space.clone(), unit)?;
            let input = maximally_entangled(2, ("A", "B"))?.tensor(&zin)?.renamed("A", "M")?;
            let avg = protocol_average(scheme, attack, &input)?;
            let kept = bell_branch(&avg, "M", "B", 0, 0)?;
            let kd = kept.permuted(&["Z"])?.density_matrix();
            for o in 0..dz {
                for oo in 0..dz {
                    choi[(o * dz + i, oo * dz + j)] += kd[(o, oo)];
                }
            }
        }
    }
    let witness = Channel::from_choi(z_space, RegisterSpace::single("Z", dz), &choi, 1e-7)?;
    let ideal = witness.apply_on(&rho_m, &["Z"])?;
    let final_epsilon =
        trace_norm(&(real_m - ideal.aligned_with(&real)?.density_matrix()));

    Ok(LiftingReport {
        teleport_discrepancy,
        reindex_discrepancy,
        commutation_discrepancy,
        final_epsilon,
    })
}
