use super::AuthScheme;
use crate::error::{Error, Result};
use crate::hashfam::PolyHashFamily;
use crate::qlinalg::{CMatrix, Cx, RegisterSpace};
use serde_json::json;
use std::sync::Arc;

/// The classical MAC Auth_k|m> = |m, h_k(m)> run in superposition, with the
/// hash drawn from the polynomial family over GF(2^w).
pub fn wegman_carter_scheme(family: PolyHashFamily, message_bits: u32) -> Result<AuthScheme> {
    let w = family.field.w;
    if message_bits == 0 || message_bits > w {
        return Err(Error::InvalidArgument(format!(
            "message width {message_bits} outside 1..={w}"
        )));
    }
    let mdim = 1usize << message_bits;
    let tdim = family.tag_space() as usize;
    let message_space = RegisterSpace::single("M", mdim);
    let authenticated_space = RegisterSpace::new(vec![("M", mdim), ("T", tdim)])?;

    let auth_fam = family;
    let auth_fn = Arc::new(move |key: u64| {
        let k = auth_fam.key_from_index(key);
        let mut m = CMatrix::zeros(mdim * tdim, mdim);
        for msg in 0..mdim as u64 {
            let tag = auth_fam.hash_eval(&k, msg).expect("message fits the field");
            m[((msg * tdim as u64 + tag) as usize, msg as usize)] = Cx::new(1.0, 0.0);
        }
        crate::qlinalg::LinearMap::new(
            RegisterSpace::single("M", mdim),
            RegisterSpace::new(vec![("M", mdim), ("T", tdim)]).expect("fresh labels"),
            m,
        )
        .expect("isometry dims")
    });

    Ok(AuthScheme::canonical(
        "wegman-carter",
        message_space,
        authenticated_space,
        family.key_count(),
        auth_fn,
        json!({
            "kind": "wegman-carter",
            "w": w,
            "message_bits": message_bits,
            "tag_bits": family.tag_bits,
            "reduction_poly": family.field.reduction_poly,
            "degree": match family.degree {
                crate::hashfam::HashDegree::Quadratic => "quadratic",
                crate::hashfam::HashDegree::Linear => "linear",
            },
        }),
    ))
}
