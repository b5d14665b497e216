use super::AuthScheme;
use crate::error::{Error, Result};
use crate::qlinalg::{haar_random_unitary, CMatrix, Cx, LinearMap, RegisterSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::json;
use std::sync::Arc;

/// Keyed unitary source for the design scheme. At desk scale the key indexes
/// a table drawn once per experiment seed; exact Haar samples stand in for an
/// approximate-design circuit family.
#[derive(Debug, Clone)]
pub enum DesignEnsemble {
    /// `keys` exact Haar samples on U(N)
    HaarTable { keys: u64, seed: u64 },
    /// caller-supplied unitaries
    Explicit(Vec<CMatrix>),
    /// layers of independent single-qubit Haar gates separated by CNOT
    /// ladders; N must be a power of two
    LocalCircuit { keys: u64, layers: u32, seed: u64 },
    /// random circuits over {H, S, CNOT}; heuristic stand-in for the
    /// Clifford group, not a uniform group sample
    CliffordCircuit { keys: u64, gates: u32, seed: u64 },
}

impl DesignEnsemble {
    pub fn kind_tag(&self) -> &'static str {
        match self {
            DesignEnsemble::HaarTable { .. } => "haar-table",
            DesignEnsemble::Explicit(_) => "explicit",
            DesignEnsemble::LocalCircuit { .. } => "local-circuit",
            DesignEnsemble::CliffordCircuit { .. } => "clifford-circuit",
        }
    }

    /// Materializes the keyed unitary table on U(n).
    pub fn build_table(&self, n: usize) -> Result<Vec<CMatrix>> {
        match self {
            DesignEnsemble::HaarTable { keys, seed } => {
                let mut rng = ChaCha12Rng::seed_from_u64(*seed);
                (0..*keys).map(|_| haar_random_unitary(n, &mut rng)).collect()
            }
            DesignEnsemble::Explicit(list) => {
                for u in list {
                    if u.nrows() != n || u.ncols() != n {
                        return Err(Error::DimensionMismatch(format!(
                            "ensemble unitary is {}x{}, scheme needs {n}",
                            u.nrows(),
                            u.ncols()
                        )));
                    }
                }
                Ok(list.clone())
            }
            DesignEnsemble::LocalCircuit { keys, layers, seed } => {
                if !n.is_power_of_two() {
                    return Err(Error::InvalidArgument(
                        "local circuits need a power-of-two dimension".into(),
                    ));
                }
                let qubits = n.trailing_zeros() as usize;
                let mut rng = ChaCha12Rng::seed_from_u64(*seed);
                let mut table = Vec::with_capacity(*keys as usize);
                for _ in 0..*keys {
                    let mut u = CMatrix::identity(n, n);
                    for _ in 0..*layers {
                        let mut layer = CMatrix::identity(1, 1);
                        for _ in 0..qubits {
                            let g = haar_random_unitary(2, &mut rng)?;
                            layer = layer.kronecker(&g);
                        }
                        u = layer * u;
                        if qubits > 1 {
                            u = cnot_ladder(qubits) * u;
                        }
                    }
                    table.push(u);
                }
                Ok(table)
            }
            DesignEnsemble::CliffordCircuit { keys, gates, seed } => {
                if !n.is_power_of_two() {
                    return Err(Error::InvalidArgument(
                        "clifford circuits need a power-of-two dimension".into(),
                    ));
                }
                let qubits = n.trailing_zeros() as usize;
                let mut rng = ChaCha12Rng::seed_from_u64(*seed);
                let mut table = Vec::with_capacity(*keys as usize);
                for _ in 0..*keys {
                    let mut u = CMatrix::identity(n, n);
                    for _ in 0..*gates {
                        u = random_clifford_gate(qubits, &mut rng) * u;
                    }
                    table.push(u);
                }
                Ok(table)
            }
        }
    }
}

fn embed_two_level(n_qubits: usize, gate: &CMatrix, qubit: usize) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for q in 0..n_qubits {
        if q == qubit {
            m = m.kronecker(gate);
        } else {
            m = m.kronecker(&CMatrix::identity(2, 2));
        }
    }
    m
}

fn cnot_matrix(n_qubits: usize, control: usize, target: usize) -> CMatrix {
    let n = 1usize << n_qubits;
    let mut m = CMatrix::zeros(n, n);
    for x in 0..n {
        let cbit = (x >> (n_qubits - 1 - control)) & 1;
        let y = if cbit == 1 { x ^ (1 << (n_qubits - 1 - target)) } else { x };
        m[(y, x)] = Cx::new(1.0, 0.0);
    }
    m
}

fn cnot_ladder(n_qubits: usize) -> CMatrix {
    let mut m = CMatrix::identity(1 << n_qubits, 1 << n_qubits);
    for q in 0..n_qubits - 1 {
        m = cnot_matrix(n_qubits, q, q + 1) * m;
    }
    m
}

fn random_clifford_gate<R: Rng>(n_qubits: usize, rng: &mut R) -> CMatrix {
    let h = CMatrix::from_row_slice(2, 2, &[
        Cx::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Cx::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Cx::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Cx::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ]);
    let s = CMatrix::from_row_slice(2, 2, &[
        Cx::new(1.0, 0.0),
        Cx::new(0.0, 0.0),
        Cx::new(0.0, 0.0),
        Cx::new(0.0, 1.0),
    ]);
    match rng.gen_range(0..3) {
        0 => embed_two_level(n_qubits, &h, rng.gen_range(0..n_qubits)),
        1 => embed_two_level(n_qubits, &s, rng.gen_range(0..n_qubits)),
        _ => {
            if n_qubits == 1 {
                embed_two_level(1, &h, 0)
            } else {
                let c = rng.gen_range(0..n_qubits);
                let mut t = rng.gen_range(0..n_qubits);
                while t == c {
                    t = rng.gen_range(0..n_qubits);
                }
                cnot_matrix(n_qubits, c, t)
            }
        }
    }
}

/// The keyed-unitary scheme: append s zeroed qubits, scramble with U_k; the
/// receiver unscrambles and accepts iff the s tag qubits read zero.
pub fn unitary_design_scheme(
    message_dim: usize,
    s: u32,
    ensemble: DesignEnsemble,
) -> Result<AuthScheme> {
    if message_dim == 0 {
        return Err(Error::InvalidArgument("message dimension 0".into()));
    }
    let tdim = 1usize << s;
    let n = message_dim * tdim;
    let table = Arc::new(ensemble.build_table(n)?);
    if table.is_empty() {
        return Err(Error::InvalidArgument("empty unitary ensemble".into()));
    }
    let message_space = RegisterSpace::single("M", message_dim);
    let authenticated_space = RegisterSpace::new(vec![("M", message_dim), ("T", tdim)])?;
    let key_count = table.len() as u64;

    let tbl = table.clone();
    let msp = message_space.clone();
    let ysp = authenticated_space.clone();
    let auth_fn = Arc::new(move |key: u64| {
        let u = &tbl[key as usize];
        // columns of U at |m> (x) |0^s>
        let mut m = CMatrix::zeros(n, message_dim);
        for x in 0..message_dim {
            m.set_column(x, &u.column(x * tdim));
        }
        LinearMap::new(msp.clone(), ysp.clone(), m).expect("isometry dims")
    });

    Ok(AuthScheme::canonical(
        "unitary-design",
        message_space,
        authenticated_space,
        key_count,
        auth_fn,
        json!({
            "kind": "unitary-design",
            "message_dim": message_dim,
            "s": s,
            "ensemble": ensemble.kind_tag(),
            "keys": key_count,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::norms::max_abs_entry;
    use crate::qlinalg::QuantumState;
    use crate::schemes::completeness_error;

    #[test]
    fn identity_attack_roundtrip() {
        let scheme =
            unitary_design_scheme(2, 3, DesignEnsemble::HaarTable { keys: 16, seed: 5 }).unwrap();
        let states = vec![
            QuantumState::basis(scheme.message_space.clone(), &[0]),
            crate::qlinalg::plus_state("M", 2),
        ];
        let err = completeness_error(&scheme, &states).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn zero_tag_qubits_accepts_everything() {
        let scheme =
            unitary_design_scheme(2, 0, DesignEnsemble::HaarTable { keys: 4, seed: 9 }).unwrap();
        for key in scheme.keys() {
            let p = scheme.accept_projector(key);
            assert!(max_abs_entry(&(p.matrix - CMatrix::identity(2, 2))) < 1e-9);
        }
    }

    /// Haar-random tampering is accepted with probability about 2^-s.
    #[test]
    fn random_attack_acceptance_matches_rank_ratio() {
        let s = 4u32;
        let scheme = unitary_design_scheme(
            2,
            s,
            DesignEnsemble::HaarTable { keys: 200, seed: 31 },
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let psi = crate::qlinalg::plus_state("M", 2);
        let mut acc = 0.0;
        let mut sq = 0.0;
        let nn = scheme.authenticated_space.total_dim();
        let trials = 200usize;
        for key in 0..trials as u64 {
            let v = haar_random_unitary(nn, &mut rng).unwrap();
            let vm = LinearMap::endo(scheme.authenticated_space.clone(), v).unwrap();
            let authed = scheme.auth_apply(key, &psi).unwrap();
            let tampered = authed.apply(&vm, &["M", "T"]).unwrap();
            let back = scheme.ver_apply(key, &tampered).unwrap();
            let w = back.weight();
            acc += w;
            sq += w * w;
        }
        let mean = acc / trials as f64;
        let se = ((sq / trials as f64 - mean * mean) / trials as f64).sqrt();
        let expect = 2f64.powi(-(s as i32));
        assert!(
            (mean - expect).abs() < 4.0 * se + 0.01,
            "mean = {mean}, expect = {expect}, se = {se}"
        );
    }

    #[test]
    fn ensembles_build_unitary_tables() {
        for ens in [
            DesignEnsemble::LocalCircuit { keys: 3, layers: 2, seed: 1 },
            DesignEnsemble::CliffordCircuit { keys: 3, gates: 20, seed: 2 },
        ] {
            let table = ens.build_table(8).unwrap();
            for u in &table {
                let err = max_abs_entry(&(u.adjoint() * u - CMatrix::identity(8, 8)));
                assert!(err < 1e-9);
            }
        }
    }
}
