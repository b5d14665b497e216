use super::{real_experiment, KeySampling};
use crate::adversaries::{Adversary, StinespringAttack};
use crate::error::{Error, Result};
use crate::qlinalg::{trace_norm, Channel, LinearMap, QuantumState};
use crate::schemes::AuthScheme;
use serde::Serialize;

/// Codeword index in Y for every message, for classical (computational-basis
/// permutation) schemes.
fn classical_codewords(scheme: &AuthScheme, key: u64) -> Result<Vec<usize>> {
    let auth = scheme.auth_isometry(key);
    let mut out = Vec::with_capacity(auth.matrix.ncols());
    for c in 0..auth.matrix.ncols() {
        let mut hit = None;
        for r in 0..auth.matrix.nrows() {
            let v = auth.matrix[(r, c)];
            if v.norm() > 1e-12 {
                if hit.is_some() || (v - crate::qlinalg::Cx::new(1.0, 0.0)).norm() > 1e-9 {
                    return Err(Error::InvalidArgument(
                        "unforgeability game needs a classical (MAC) scheme".into(),
                    ));
                }
                hit = Some(r);
            }
        }
        out.push(hit.ok_or_else(|| Error::InvalidArgument("empty codeword column".into()))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ForgeryReport {
    pub forger: String,
    pub probability: f64,
}

/// Probability that measuring the key and both emitted signed-message
/// registers yields two valid signed messages with distinct message parts.
/// Exhaustive over keys; the forger must emit cloned registers `<label>2`
/// for every authenticated register.
pub fn unforgeability_game(
    scheme: &AuthScheme,
    forger: &StinespringAttack,
    rho: &QuantumState,
) -> Result<ForgeryReport> {
    let ylabels = scheme.authenticated_space.labels();
    let clone_labels: Vec<String> = ylabels.iter().map(|l| format!("{l}2")).collect();
    let mut probability = 0.0;
    let kw = 1.0 / scheme.key_count as f64;
    for key in scheme.keys() {
        let code = classical_codewords(scheme, key)?;
        let authed = scheme.auth_apply(key, rho)?;
        let out = forger.apply(&authed)?;
        // positions of (Y, Y2) registers in the output layout
        let space = &out.space;
        let mut ypos = Vec::new();
        for l in &ylabels {
            ypos.push(space.position(l)?);
        }
        let mut y2pos = Vec::new();
        for l in &clone_labels {
            y2pos.push(space.position(l)?);
        }
        let rho_out = out.density_matrix();
        let dims = space.dims();
        for flat in 0..space.total_dim() {
            let idx = space.unpack(flat);
            let mut y1 = 0usize;
            for &p in &ypos {
                y1 = y1 * dims[p] + idx[p];
            }
            let mut y2 = 0usize;
            for &p in &y2pos {
                y2 = y2 * dims[p] + idx[p];
            }
            // valid distinct signed pair?
            let m1 = code.iter().position(|&c| c == y1);
            let m2 = code.iter().position(|&c| c == y2);
            if let (Some(m1), Some(m2)) = (m1, m2) {
                if m1 != m2 {
                    probability += kw * rho_out[(flat, flat)].re;
                }
            }
        }
    }
    Ok(ForgeryReport { forger: forger.name.clone(), probability })
}

/// Trace distance between the key-averaged authenticated state and its
/// computational-basis-measured version (key register traced out, matching
/// the key-averaged statement being tested).
pub fn indist_from_measured(
    scheme: &AuthScheme,
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<f64> {
    let ens = real_auth_only(scheme, rho, sampling)?;
    let avg = ens.key_averaged_state()?;
    let ylabels = scheme.authenticated_space.labels();
    let basis = LinearMap::identity(scheme.authenticated_space.clone());
    let measured = avg.measure_in_basis(&ylabels, &basis)?;
    Ok(trace_norm(&(avg.density_matrix() - measured.density_matrix())))
}

/// E_k Auth_k(rho) without verification, as a keyed ensemble.
fn real_auth_only(
    scheme: &AuthScheme,
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<crate::schemes::KeyedEnsemble> {
    let mut entries = Vec::new();
    for (key, w) in sampling.keys(scheme) {
        entries.push((key, w, scheme.auth_apply(key, rho)?));
    }
    Ok(crate::schemes::KeyedEnsemble {
        entries,
        exhaustive: matches!(sampling, KeySampling::Exhaustive),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EncryptionReport {
    /// trace distance of the two key-averaged authenticated states
    pub distance: f64,
    /// trace distance of the side-information marginals of the two inputs
    pub delta_z: f64,
}

/// Compares E_k Auth_k(rho0) against E_k Auth_k(rho1); nearness means the
/// scheme hides the message from an adversary holding the side registers.
pub fn encryption_game(
    scheme: &AuthScheme,
    rho0: &QuantumState,
    rho1: &QuantumState,
    sampling: &KeySampling,
) -> Result<EncryptionReport> {
    let mlabels = scheme.message_space.labels();
    let delta_z = if rho0.space.len() > mlabels.len() {
        let z0 = rho0.partial_trace(&mlabels)?;
        let z1 = rho1.partial_trace(&mlabels)?;
        trace_norm(&(z0.density_matrix() - z1.aligned_with(&z0)?.density_matrix()))
    } else {
        0.0
    };
    let a0 = real_auth_only(scheme, rho0, sampling)?.key_averaged_state()?;
    let a1 = real_auth_only(scheme, rho1, sampling)?.key_averaged_state()?;
    let distance = trace_norm(&(a0.density_matrix() - a1.aligned_with(&a0)?.density_matrix()));
    Ok(EncryptionReport { distance, delta_z })
}

/// Convenience: the maximum measured epsilon across an attack battery; the
/// scheme-level measured security parameter that the forgery and
/// indistinguishability bounds are stated against.
pub fn scheme_level_epsilon(
    scheme: &AuthScheme,
    attacks: &[StinespringAttack],
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for a in attacks {
        let run = super::classical_security_epsilon(scheme, a, rho, sampling)?;
        worst = worst.max(run.epsilon);
    }
    Ok(worst)
}

/// Applies a channel to every entry of an ensemble (used by property tests
/// and the measured/unmeasured comparisons).
pub fn map_ensemble(
    ens: &crate::schemes::KeyedEnsemble,
    ch: &Channel,
    targets: &[&str],
) -> Result<crate::schemes::KeyedEnsemble> {
    let mut entries = Vec::with_capacity(ens.entries.len());
    for (k, w, s) in &ens.entries {
        entries.push((*k, *w, ch.apply_on(s, targets)?));
    }
    Ok(crate::schemes::KeyedEnsemble { entries, exhaustive: ens.exhaustive })
}

/// Real experiment acceptance for a named adversary; small helper for the
/// runners.
pub fn acceptance_of(
    scheme: &AuthScheme,
    adversary: &Adversary,
    rho: &QuantumState,
    sampling: &KeySampling,
) -> Result<f64> {
    Ok(real_experiment(scheme, adversary, rho, sampling)?.acceptance_probability())
}
