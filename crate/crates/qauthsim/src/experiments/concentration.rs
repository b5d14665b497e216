use super::{
    epsilon_between, epsilon_sigma, ideal_experiment, real_experiment, KeySampling,
    SecurityReport,
};
use crate::adversaries::{construct_ideal_oblivious_gamma, oblivious_side_map, Adversary};
use crate::error::{Error, Result};
use crate::qlinalg::{haar_random_unitary, CMatrix, CVector, Cx, LinearMap, QuantumState};
use crate::schemes::AuthScheme;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
    /// closed-form bound on the mean: (NM - 1)/(N^2 - 1)
    pub mean_bound: f64,
    pub tail_threshold: f64,
    pub tail_frequency: f64,
}

/// Samples f(U) = | gamma rho - lambda_U rho |_2^2 over Haar keys, where
/// lambda_U is the verified effective map of the keyed-unitary scheme under
/// attack V and gamma is V's accept-branch side map.
pub fn haar_concentration(
    v: &LinearMap,
    y_labels: &[&str],
    rho: &QuantumState,
    message_dim: usize,
    s: u32,
    samples: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    let tdim = 1usize << s;
    let n = message_dim * tdim;
    let full = v.input.total_dim();
    if full % n != 0 {
        return Err(Error::DimensionMismatch(
            "attack dimension is not a multiple of the authenticated dimension".into(),
        ));
    }
    let dz = full / n;
    let rvec = rho
        .vector()
        .ok_or_else(|| Error::InvalidArgument("concentration needs a pure input".into()))?;
    if rvec.len() != message_dim * dz {
        return Err(Error::DimensionMismatch("input lives on M (x) Z".into()));
    }
    // reference vector: (I_M (x) gamma) |rho>
    let gamma = oblivious_side_map(v, y_labels)?;
    let id_m = CMatrix::identity(message_dim, message_dim);
    let reference = id_m.kronecker(&gamma) * rvec;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let u = haar_random_unitary(n, &mut rng)?;
        // columns of U at |x> (x) |0^s>
        let mut a = CMatrix::zeros(n, message_dim);
        for x in 0..message_dim {
            a.set_column(x, &u.column(x * tdim));
        }
        let a_z = a.kronecker(&CMatrix::identity(dz, dz));
        let lambda = a_z.adjoint() * &v.matrix * a_z;
        let diff = &lambda * rvec - &reference;
        values.push(diff.norm_squared());
    }
    let nf = samples as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let nn = n as f64;
    let mm = message_dim as f64;
    let tail_threshold = 2f64.powi(-(s as i32)) + 2.0 * mm / nn;
    let tail = values.iter().filter(|&&x| x >= tail_threshold).count() as f64 / nf;
    Ok(ConcentrationReport {
        samples,
        mean,
        std_error: (var / nf).sqrt(),
        mean_bound: (nn * mm - 1.0) / (nn * nn - 1.0),
        tail_threshold,
        tail_frequency: tail,
    })
}

/// Measured epsilon of the keyed-unitary scheme against the oblivious
/// side-map ideal, for a unitary attack with entangled side information.
pub fn total_auth_game(
    scheme: &AuthScheme,
    attack_unitary: &LinearMap,
    rho: &QuantumState,
    sampling: &KeySampling,
    seed: u64,
) -> Result<SecurityReport> {
    let ylabels = scheme.authenticated_space.labels();
    let ideal = construct_ideal_oblivious_gamma(attack_unitary, &ylabels)?;
    let attack = crate::adversaries::StinespringAttack {
        name: "unitary-attack".into(),
        ancillas: vec![],
        ops: vec![crate::adversaries::StructuredOp::Gate {
            map: attack_unitary.clone(),
            targets: attack_unitary.input.labels().iter().map(|s| s.to_string()).collect(),
        }],
        projector: None,
        trace_out: vec![],
        descriptor: serde_json::json!({"name": "unitary-attack"}),
    };
    let real = real_experiment(scheme, &Adversary::Attack(attack), rho, sampling)?;
    let idealized = ideal_experiment(scheme, &Adversary::Oblivious(ideal), rho, sampling)?;
    let epsilon = epsilon_between(&real, &idealized)?;
    let sigma = epsilon_sigma(&real, &idealized)?;
    let s = scheme
        .descriptor
        .get("s")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::InvalidArgument("scheme descriptor lacks s".into()))?;
    let report = SecurityReport {
        experiment: "total-auth".into(),
        scheme: scheme.descriptor.clone(),
        attack: serde_json::json!({"name": "random-unitary"}),
        input_state: "entangled".into(),
        epsilon,
        acceptance: real.acceptance_probability(),
        bound: Some(2f64.powf(-(s as f64) / 2.0)),
        bound_formula: Some("2^(-s/2)".into()),
        sigma,
        seed,
        key_sampling: sampling.tag(),
        per_key: None,
    };
    report.validate()?;
    Ok(report)
}

/// Entangled input (1/sqrt(d)) sum |m>_M |m>_Z used by the total
/// authentication and lifting games.
pub fn entangled_message_state(message_dim: usize) -> QuantumState {
    let space = crate::qlinalg::RegisterSpace::new(vec![("M", message_dim), ("Z", message_dim)])
        .expect("fresh labels");
    let amp = Cx::new(1.0 / (message_dim as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(message_dim * message_dim);
    for m in 0..message_dim {
        v[m * message_dim + m] = amp;
    }
    QuantumState::pure(space, v).expect("dims agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::RegisterSpace;
    use crate::schemes::{unitary_design_scheme, DesignEnsemble};

    fn attack_space(m: usize, s: u32, dz: usize) -> RegisterSpace {
        RegisterSpace::new(vec![("M", m), ("T", 1usize << s), ("Z", dz)]).unwrap()
    }

    #[test]
    fn identity_attack_concentrates_at_zero() {
        let m = 2usize;
        let s = 2u32;
        let sp = attack_space(m, s, 2);
        let v = LinearMap::identity(sp);
        let rho = entangled_message_state(m);
        let rep = haar_concentration(&v, &["M", "T"], &rho, m, s, 50, 3).unwrap();
        assert!(rep.mean < 1e-18, "mean = {}", rep.mean);
        assert_eq!(rep.tail_frequency, 0.0);
    }

    #[test]
    fn side_only_attack_concentrates_at_zero() {
        let m = 2usize;
        let s = 2u32;
        let n = m << s;
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let w = haar_random_unitary(2, &mut rng).unwrap();
        let sp = attack_space(m, s, 2);
        let v = LinearMap::endo(sp, CMatrix::identity(n, n).kronecker(&w)).unwrap();
        let rho = entangled_message_state(m);
        let rep = haar_concentration(&v, &["M", "T"], &rho, m, s, 50, 4).unwrap();
        assert!(rep.mean < 1e-18, "mean = {}", rep.mean);
    }

    #[test]
    fn random_attack_mean_below_bound() {
        let m = 2usize;
        let s = 3u32;
        let sp = attack_space(m, s, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let u = haar_random_unitary(sp.total_dim(), &mut rng).unwrap();
        let v = LinearMap::endo(sp, u).unwrap();
        let rho = entangled_message_state(m);
        let rep = haar_concentration(&v, &["M", "T"], &rho, m, s, 200, 11).unwrap();
        assert!(
            rep.mean <= rep.mean_bound + 3.0 * rep.std_error,
            "mean {} bound {} se {}",
            rep.mean,
            rep.mean_bound,
            rep.std_error
        );
    }

    #[test]
    fn total_auth_identity_and_side_attacks_have_zero_epsilon() {
        let m = 2usize;
        let s = 2u32;
        let scheme =
            unitary_design_scheme(m, s, DesignEnsemble::HaarTable { keys: 24, seed: 9 }).unwrap();
        let rho = entangled_message_state(m);
        let sp = attack_space(m, s, m);
        let sampling = KeySampling::Exhaustive;
        // identity attack
        let rep = total_auth_game(&scheme, &LinearMap::identity(sp.clone()), &rho, &sampling, 0)
            .unwrap();
        assert!(rep.epsilon < 1e-9, "identity epsilon = {}", rep.epsilon);
        // attack acting on the side register only
        let mut rng = ChaCha12Rng::seed_from_u64(12);
        let w = haar_random_unitary(m, &mut rng).unwrap();
        let n = m << s;
        let v = LinearMap::endo(sp, CMatrix::identity(n, n).kronecker(&w)).unwrap();
        let rep = total_auth_game(&scheme, &v, &rho, &sampling, 0).unwrap();
        assert!(rep.epsilon < 1e-9, "side-only epsilon = {}", rep.epsilon);
    }
}
