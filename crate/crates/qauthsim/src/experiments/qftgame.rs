use crate::adversaries::{construct_ideal_keyleak_qft, IdealBasisRespecting};
use crate::error::{Error, Result};
use crate::qlinalg::{schmidt_decomposition, CMatrix, CVector, Cx, QuantumState};
use crate::schemes::AuthQftAuth;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct QftGapReport {
    pub inner_tag_dim: usize,
    pub message_dim: usize,
    /// E_k | verified-real - key-leaked-ideal |_2^2 at a fixed outer key
    pub mean_sq_gap: f64,
    pub sigma: f64,
    pub keys: u64,
    /// reference scale M^(3/2)/T1 the gap is calibrated against
    pub reference_scale: f64,
}

/// Key-averaged squared vector gap between the verified state under a
/// basis-respecting witness on the outer space and the key-leaked oblivious
/// reference at a fixed outer key.
///
/// The witness must act on the outer authenticated space (inner output (x)
/// outer tag) with ancilla-free blocks on the side space.
pub fn qft_keyleak_gap(
    aqa: &AuthQftAuth,
    witness: &IdealBasisRespecting,
    outer_key: u64,
    rho: &QuantumState,
    max_keys: u64,
) -> Result<QftGapReport> {
    if !witness.ancillas.is_empty() || witness.projector.is_some() {
        return Err(Error::InvalidArgument("witness must be ancilla-free".into()));
    }
    let mdim = 1usize << aqa.inner_message_bits;
    let t1 = aqa.inner.tag_space() as usize;
    let t2 = aqa.outer.tag_space() as usize;
    let n = mdim * t1;
    if witness.blocks.len() != n * t2 {
        return Err(Error::DimensionMismatch(format!(
            "witness has {} blocks, outer space needs {}",
            witness.blocks.len(),
            n * t2
        )));
    }
    let dz = witness.side_space.total_dim();

    // Schmidt data of the input on the M | Z cut
    let mlabels = aqa.message_space().labels();
    let sd = schmidt_decomposition(rho, &mlabels)?;
    let rank = sd.coefficients.len();

    // outer tags h(x) for every inner output index x
    let hkey = aqa.outer.key_from_index(outer_key);
    let mut outer_tags = Vec::with_capacity(n);
    for x in 0..n as u64 {
        outer_tags.push(aqa.outer.hash_eval(&hkey, x)?);
    }

    // reference state: (I_M (x) side map) |rho>
    let ideal = construct_ideal_keyleak_qft(witness, t2, &outer_tags)?;
    let kraus = ideal.z_channel.kraus_ops()?;
    let side_map = &kraus[0];

    // per (x, z-rank) side vectors: W_{x, h(x)} |phi_z|
    let mut side_vecs = vec![vec![CVector::zeros(dz); rank]; n];
    for x in 0..n {
        let block = &witness.blocks[x * t2 + outer_tags[x] as usize];
        for z in 0..rank {
            side_vecs[x][z] = block * &sd.right[z];
        }
    }
    // reference on (M, Z): sum_z c_z sum_m alpha_zm |m> (x) side_map |phi_z>
    let mut reference = CVector::zeros(mdim * dz);
    for z in 0..rank {
        let mapped = side_map * &sd.right[z];
        for m in 0..mdim {
            let amp = Cx::new(sd.coefficients[z], 0.0) * sd.left[z][m];
            for zz in 0..dz {
                reference[m * dz + zz] += amp * mapped[zz];
            }
        }
    }

    // inner tags k(m) for every message, per inner key
    let total_keys = aqa.inner.key_count();
    let (keys, weight): (Vec<u64>, f64) = if total_keys <= max_keys {
        ((0..total_keys).collect(), 1.0 / total_keys as f64)
    } else {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(outer_key ^ 0x51f15eed);
        (
            (0..max_keys).map(|_| rng.gen_range(0..total_keys)).collect(),
            1.0 / max_keys as f64,
        )
    };
    let exhaustive = total_keys <= max_keys;

    let t1_bits = aqa.inner.tag_bits;
    let mut gaps = Vec::with_capacity(keys.len());
    for &ki in &keys {
        let key = aqa.inner.key_from_index(ki);
        let mut tags = Vec::with_capacity(mdim);
        for m in 0..mdim as u64 {
            tags.push(aqa.inner.hash_eval(&key, m)?);
        }
        // verified state: mu[m] = (1/N) sum_{x,z,m'} c_z alpha_{zm'} sign * W_x |phi_z>
        let scale = Cx::new(1.0 / n as f64, 0.0);
        let mut verified = CVector::zeros(mdim * dz);
        for m in 0..mdim {
            for x in 0..n {
                let x1 = (x >> t1_bits) as u64;
                let x2 = (x as u64) & ((1u64 << t1_bits) - 1);
                for z in 0..rank {
                    let mut coef = Cx::new(0.0, 0.0);
                    for mp in 0..mdim {
                        let dm = (m as u64 ^ mp as u64) & x1;
                        let dt = (tags[m] ^ tags[mp]) & x2;
                        let sign = if (dm.count_ones() + dt.count_ones()) % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        coef += Cx::new(sign * sd.coefficients[z], 0.0) * sd.left[z][mp];
                    }
                    let amp = coef * scale;
                    for zz in 0..dz {
                        verified[m * dz + zz] += amp * side_vecs[x][z][zz];
                    }
                }
            }
        }
        let gap = (&verified - &reference).norm_squared();
        gaps.push(gap);
    }
    let nf = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / nf;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / nf;
    let sigma = if exhaustive { 0.0 } else { (var / nf).sqrt() };
    let _ = weight;
    Ok(QftGapReport {
        inner_tag_dim: t1,
        message_dim: mdim,
        mean_sq_gap: mean,
        sigma,
        keys: keys.len() as u64,
        reference_scale: (mdim as f64).powf(1.5) / t1 as f64,
    })
}

/// The verified real state computed through the full dense pipeline
/// (auth stages, witness attack, stagewise verification); oracle for the
/// closed-form accumulation above at small parameters.
pub fn qft_verified_state_pipeline(
    aqa: &AuthQftAuth,
    witness: &IdealBasisRespecting,
    inner_key: u64,
    outer_key: u64,
    rho: &QuantumState,
) -> Result<QuantumState> {
    let key = inner_key * aqa.outer_keys + outer_key;
    let scheme = aqa.scheme();
    let authed = scheme.auth_apply(key, rho)?;
    let attacked = witness.apply(&authed)?;
    scheme.ver_apply(key, &attacked)
}

/// Reference (key-leaked ideal) state through the channel path.
pub fn qft_ideal_state(
    aqa: &AuthQftAuth,
    witness: &IdealBasisRespecting,
    outer_key: u64,
    rho: &QuantumState,
) -> Result<QuantumState> {
    let t2 = aqa.outer.tag_space() as usize;
    let n = (1usize << aqa.inner_message_bits) * aqa.inner.tag_space() as usize;
    let hkey = aqa.outer.key_from_index(outer_key);
    let mut outer_tags = Vec::with_capacity(n);
    for x in 0..n as u64 {
        outer_tags.push(aqa.outer.hash_eval(&hkey, x)?);
    }
    let ideal = construct_ideal_keyleak_qft(witness, t2, &outer_tags)?;
    ideal.apply(rho)
}
