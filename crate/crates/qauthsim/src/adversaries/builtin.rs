//! The named attack library. Every constructor is dimension-parametric so
//! one attack name runs across schemes.

use super::{StinespringAttack, StructuredOp};
use crate::error::{Error, Result};
use crate::qlinalg::{
    basis_vector, haar_random_unitary, pauli_operator, CMatrix, CVector, Cx, LinearMap,
    RegisterSpace,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::json;

pub fn identity_attack() -> StinespringAttack {
    StinespringAttack::identity()
}

/// Dephases the authenticated registers in a basis by copying the basis index
/// into a discarded record register.
pub fn measure_in_basis_attack(
    y_space: &RegisterSpace,
    basis: Option<LinearMap>,
) -> Result<StinespringAttack> {
    let n = y_space.total_dim();
    let record = RegisterSpace::single("Rec", n);
    let ylabels: Vec<String> = y_space.labels().iter().map(|s| s.to_string()).collect();
    let mut ops = Vec::new();
    if let Some(b) = &basis {
        ops.push(StructuredOp::Gate { map: b.adjoint(), targets: ylabels.clone() });
    }
    let mut perm = vec![0usize; n * n];
    for y in 0..n {
        for c in 0..n {
            perm[y * n + c] = y * n + ((c + y) % n);
        }
    }
    let mut targets = ylabels.clone();
    targets.push("Rec".into());
    ops.push(StructuredOp::Perm { targets, perm, phases: None });
    if let Some(b) = &basis {
        ops.push(StructuredOp::Gate { map: b.clone(), targets: ylabels });
    }
    Ok(StinespringAttack {
        name: "measure-basis".into(),
        ancillas: vec![(record, basis_vector(n, 0))],
        ops,
        projector: None,
        trace_out: vec!["Rec".into()],
        descriptor: json!({"name": "measure-basis", "rotated": basis.is_some()}),
    })
}

/// Swaps the named registers with a junk state and discards the originals.
pub fn replace_with_junk(
    replaced: &RegisterSpace,
    junk: CVector,
) -> Result<StinespringAttack> {
    let n = replaced.total_dim();
    if junk.len() != n {
        return Err(Error::DimensionMismatch("junk state dimension".into()));
    }
    let jreg = RegisterSpace::single("Junk", n);
    let mut perm = vec![0usize; n * n];
    for y in 0..n {
        for j in 0..n {
            perm[y * n + j] = j * n + y;
        }
    }
    let mut targets: Vec<String> = replaced.labels().iter().map(|s| s.to_string()).collect();
    targets.push("Junk".into());
    Ok(StinespringAttack {
        name: "replace-junk".into(),
        ancillas: vec![(jreg, junk)],
        ops: vec![StructuredOp::Perm { targets, perm, phases: None }],
        projector: None,
        trace_out: vec!["Junk".into()],
        descriptor: json!({"name": "replace-junk", "registers": replaced.labels()}),
    })
}

/// Replaces the tag register with a fixed wrong tag value.
pub fn tag_substitution(tag_label: &str, tag_dim: usize, wrong_tag: usize) -> Result<StinespringAttack> {
    if wrong_tag >= tag_dim {
        return Err(Error::InvalidArgument("substituted tag out of range".into()));
    }
    let mut a = replace_with_junk(
        &RegisterSpace::single(tag_label, tag_dim),
        basis_vector(tag_dim, wrong_tag),
    )?;
    a.name = "tag-substitution".into();
    a.descriptor = json!({"name": "tag-substitution", "tag": wrong_tag});
    Ok(a)
}

/// The side-information attack: controlled on the adversary's qubit, either
/// forward the authenticated registers untouched or swap in a junk state.
pub fn controlled_replace(
    control_label: &str,
    y_space: &RegisterSpace,
    junk: CVector,
) -> Result<StinespringAttack> {
    let n = y_space.total_dim();
    if junk.len() != n {
        return Err(Error::DimensionMismatch("junk state dimension".into()));
    }
    let jreg = RegisterSpace::single("Junk", n);
    // targets (control, Y..., Junk): c = 1 swaps Y <-> Junk
    let mut perm = vec![0usize; 2 * n * n];
    for c in 0..2usize {
        for y in 0..n {
            for j in 0..n {
                let src = (c * n + y) * n + j;
                perm[src] = if c == 0 { src } else { (c * n + j) * n + y };
            }
        }
    }
    let mut targets = vec![control_label.to_string()];
    targets.extend(y_space.labels().iter().map(|s| s.to_string()));
    targets.push("Junk".into());
    Ok(StinespringAttack {
        name: "controlled-replace".into(),
        ancillas: vec![(jreg, junk)],
        ops: vec![StructuredOp::Perm { targets, perm, phases: None }],
        projector: None,
        trace_out: vec!["Junk".into()],
        descriptor: json!({"name": "controlled-replace", "control": control_label}),
    })
}

/// Haar-random unitary on the named registers.
pub fn random_unitary_attack(space: RegisterSpace, seed: u64) -> Result<StinespringAttack> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let u = haar_random_unitary(space.total_dim(), &mut rng)?;
    let targets: Vec<String> = space.labels().iter().map(|s| s.to_string()).collect();
    Ok(StinespringAttack {
        name: "random-unitary".into(),
        ancillas: vec![],
        ops: vec![StructuredOp::Gate { map: LinearMap::endo(space, u)?, targets }],
        projector: None,
        trace_out: vec![],
        descriptor: json!({"name": "random-unitary", "seed": seed}),
    })
}

/// X^p Z^q tampering on a power-of-two register group.
pub fn pauli_tamper(space: RegisterSpace, p: u64, q: u64) -> Result<StinespringAttack> {
    let targets: Vec<String> = space.labels().iter().map(|s| s.to_string()).collect();
    let map = pauli_operator(space, p, q)?;
    Ok(StinespringAttack {
        name: "pauli-tamper".into(),
        ancillas: vec![],
        ops: vec![StructuredOp::Gate { map, targets }],
        projector: None,
        trace_out: vec![],
        descriptor: json!({"name": "pauli-tamper", "p": p, "q": q}),
    })
}

/// Copies the named registers (as a joint index) into a fresh register the
/// adversary keeps.
pub fn copy_register_attack(copied: &RegisterSpace, copy_label: &str) -> Result<StinespringAttack> {
    let n = copied.total_dim();
    let creg = RegisterSpace::single(copy_label, n);
    let mut perm = vec![0usize; n * n];
    for y in 0..n {
        for c in 0..n {
            perm[y * n + c] = y * n + ((c + y) % n);
        }
    }
    let mut targets: Vec<String> = copied.labels().iter().map(|s| s.to_string()).collect();
    targets.push(copy_label.to_string());
    Ok(StinespringAttack {
        name: "copy-register".into(),
        ancillas: vec![(creg, basis_vector(n, 0))],
        ops: vec![StructuredOp::Perm { targets, perm, phases: None }],
        projector: None,
        trace_out: vec![],
        descriptor: json!({"name": "copy-register", "registers": copied.labels()}),
    })
}

fn mirror_labels(space: &RegisterSpace, suffix: &str) -> Vec<(String, usize)> {
    space
        .registers()
        .iter()
        .map(|r| (format!("{}{}", r.label, suffix), r.dim))
        .collect()
}

/// Measures the authenticated registers in the computational basis and emits
/// the result twice, on the original registers and on a cloned register set.
pub fn forger_duplicate(y_space: &RegisterSpace) -> Result<StinespringAttack> {
    let n = y_space.total_dim();
    let clone_space = RegisterSpace::new(mirror_labels(y_space, "2"))?;
    let record = RegisterSpace::single("Rec", n);
    let copy = |targets: Vec<String>| {
        let mut perm = vec![0usize; n * n];
        for y in 0..n {
            for c in 0..n {
                perm[y * n + c] = y * n + ((c + y) % n);
            }
        }
        StructuredOp::Perm { targets, perm, phases: None }
    };
    let ylabels: Vec<String> = y_space.labels().iter().map(|s| s.to_string()).collect();
    let mut t1 = ylabels.clone();
    t1.extend(clone_space.labels().iter().map(|s| s.to_string()));
    let mut t2 = ylabels;
    t2.push("Rec".into());
    Ok(StinespringAttack {
        name: "forger-duplicate".into(),
        ancillas: vec![
            (clone_space.clone(), basis_vector(n, 0)),
            (record, basis_vector(n, 0)),
        ],
        ops: vec![copy(t1), copy(t2)],
        projector: None,
        trace_out: vec!["Rec".into()],
        descriptor: json!({"name": "forger-duplicate"}),
    })
}

/// Keeps the signed message intact and fabricates a second signed message
/// with a shifted message value and a uniformly random tag.
pub fn forger_random_tag(
    m_label: &str,
    m_dim: usize,
    t_label: &str,
    t_dim: usize,
    message_shift: usize,
) -> Result<StinespringAttack> {
    if message_shift == 0 || message_shift >= m_dim {
        return Err(Error::InvalidArgument("message shift must be nonzero mod |M|".into()));
    }
    let m2 = format!("{m_label}2");
    let t2 = format!("{t_label}2");
    let tref = format!("{t_label}2ref");
    let m2_space = RegisterSpace::single(&m2, m_dim);
    let pair_space = RegisterSpace::new(vec![(t2.clone(), t_dim), (tref.clone(), t_dim)])?;
    let mut pair_init = CVector::zeros(t_dim * t_dim);
    let amp = Cx::new(1.0 / (t_dim as f64).sqrt(), 0.0);
    for t in 0..t_dim {
        pair_init[t * t_dim + t] = amp;
    }
    // copy message with shift into M2
    let mut perm = vec![0usize; m_dim * m_dim];
    for m in 0..m_dim {
        for c in 0..m_dim {
            perm[m * m_dim + c] = m * m_dim + ((c + m + message_shift) % m_dim);
        }
    }
    Ok(StinespringAttack {
        name: "forger-random-tag".into(),
        ancillas: vec![
            (m2_space, basis_vector(m_dim, 0)),
            (pair_space, pair_init),
        ],
        ops: vec![StructuredOp::Perm {
            targets: vec![m_label.to_string(), m2],
            perm,
            phases: None,
        }],
        projector: None,
        trace_out: vec![tref],
        descriptor: json!({"name": "forger-random-tag", "shift": message_shift}),
    })
}

/// Copies one register the adversary can see (used against the appended
/// random bit).
pub fn copy_single_register(label: &str, dim: usize, into: &str) -> Result<StinespringAttack> {
    let mut a = copy_register_attack(&RegisterSpace::single(label, dim), into)?;
    a.name = "copy-bit".into();
    a.descriptor = json!({"name": "copy-bit", "register": label});
    Ok(a)
}

/// Discarding attack with an always-failing post-selection; weight drops to
/// zero.
pub fn abort_attack(z_label: &str) -> StinespringAttack {
    let zero = CMatrix::zeros(1, 1);
    StinespringAttack {
        name: "abort".into(),
        ancillas: vec![(RegisterSpace::single("Abort", 1), basis_vector(1, 0))],
        ops: vec![],
        projector: Some((zero, vec!["Abort".into()])),
        trace_out: vec!["Abort".into()],
        descriptor: json!({"name": "abort", "z": z_label}),
    }
}
