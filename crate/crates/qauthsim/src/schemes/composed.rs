use super::AuthScheme;
use crate::error::{Error, Result};
use crate::qlinalg::{pauli_operator, CMatrix, Channel, Cx, LinearMap, RegisterSpace};
use serde_json::json;
use std::sync::Arc;

/// Prepends a keyed Pauli randomization to an existing scheme: the composed
/// key is (inner key, p, q) and Auth = Auth_k X^p Z^q, with the Pauli undone
/// after inner verification.
pub fn pauli_composed_scheme(inner: AuthScheme) -> Result<AuthScheme> {
    let mdim = inner.message_space.total_dim();
    if !mdim.is_power_of_two() || inner.message_space.len() != 1 {
        return Err(Error::InvalidArgument(
            "pauli composition needs a single power-of-two message register".into(),
        ));
    }
    let n = mdim.trailing_zeros() as u64;
    let pauli_count = 1u64 << (2 * n);
    let key_count = inner.key_count * pauli_count;
    let message_space = inner.message_space.clone();
    let authenticated_space = inner.authenticated_space.clone();
    let descriptor = json!({
        "kind": "pauli-composed",
        "qubits": n,
        "inner": inner.descriptor.clone(),
    });

    let split = move |key: u64| -> (u64, u64, u64) {
        let kp = key / pauli_count;
        let rest = key % pauli_count;
        (kp, rest >> n, rest & ((1 << n) - 1))
    };

    let inner_a = inner.clone();
    let msp = message_space.clone();
    let auth_fn = Arc::new(move |key: u64| {
        let (k, p, q) = split(key);
        let pauli = pauli_operator(msp.clone(), p, q).expect("validated qubit count");
        inner_a.auth_isometry(k).compose(&pauli).expect("message dims agree")
    });

    let inner_v = inner.clone();
    let msp2 = message_space.clone();
    let ver_fn = Arc::new(move |key: u64| {
        let (k, p, q) = split(key);
        let pauli_inv = pauli_operator(msp2.clone(), p, q)
            .expect("validated qubit count")
            .adjoint();
        let inner_ch = inner_v.ver_channel(k);
        let ops = match &inner_ch.repr {
            crate::qlinalg::ChannelRepr::Kraus(ops) => {
                ops.iter().map(|a| &pauli_inv.matrix * a).collect()
            }
            _ => inner_ch
                .kraus_ops()
                .expect("inner ver has a Kraus form")
                .iter()
                .map(|a| &pauli_inv.matrix * a)
                .collect(),
        };
        Channel::kraus(inner_ch.input.clone(), msp2.clone(), ops).expect("filtered Kraus set")
    });

    let inner_p = inner.clone();
    let proj_fn = Arc::new(move |key: u64| {
        let (k, _, _) = split(key);
        inner_p.accept_projector(k).matrix
    });

    Ok(AuthScheme::with_custom_ver(
        format!("pauli+{}", inner.name),
        message_space,
        authenticated_space,
        key_count,
        auth_fn,
        ver_fn,
        proj_fn,
        descriptor,
    ))
}

/// The keyed-but-useless extra bit: Auth appends |b>, Ver ignores it. The
/// verifier is deliberately not the canonical filter of the Auth isometry;
/// both values of the appended bit are accepted.
pub fn append_random_bit_scheme(inner: AuthScheme) -> Result<AuthScheme> {
    let message_space = inner.message_space.clone();
    let authenticated_space =
        inner.authenticated_space.tensor(&RegisterSpace::single("B", 2))?;
    let key_count = inner.key_count * 2;
    let descriptor = json!({
        "kind": "append-random-bit",
        "inner": inner.descriptor.clone(),
    });

    let inner_a = inner.clone();
    let ysp = authenticated_space.clone();
    let auth_fn = Arc::new(move |key: u64| {
        let (k, b) = (key / 2, key % 2);
        let a = inner_a.auth_isometry(k);
        let mut bit = CMatrix::zeros(2, 1);
        bit[(b as usize, 0)] = Cx::new(1.0, 0.0);
        LinearMap::new(a.input.clone(), ysp.clone(), a.matrix.kronecker(&bit))
            .expect("isometry dims")
    });

    let inner_v = inner.clone();
    let msp = message_space.clone();
    let ysp2 = authenticated_space.clone();
    let ver_fn = Arc::new(move |key: u64| {
        let (k, _) = (key / 2, key % 2);
        let inner_ops = inner_v.ver_channel(k).kraus_ops().expect("inner ver Kraus form");
        let mut ops = Vec::with_capacity(inner_ops.len() * 2);
        for a in &inner_ops {
            for bit in 0..2usize {
                let mut sel = CMatrix::zeros(1, 2);
                sel[(0, bit)] = Cx::new(1.0, 0.0);
                ops.push(a.kronecker(&sel));
            }
        }
        Channel::kraus(ysp2.clone(), msp.clone(), ops).expect("trace-out Kraus set")
    });

    let inner_p = inner.clone();
    let proj_fn = Arc::new(move |key: u64| {
        let (k, _) = (key / 2, key % 2);
        inner_p.accept_projector(k).matrix.kronecker(&CMatrix::identity(2, 2))
    });

    Ok(AuthScheme::with_custom_ver(
        format!("append-bit+{}", inner.name),
        message_space,
        authenticated_space,
        key_count,
        auth_fn,
        ver_fn,
        proj_fn,
        descriptor,
    ))
}
