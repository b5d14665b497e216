use super::{wegman_carter_scheme, AuthScheme};
use crate::error::{Error, Result};
use crate::hashfam::PolyHashFamily;
use crate::qlinalg::{hadamard_all, LinearMap, RegisterSpace};
use serde_json::json;
use std::sync::Arc;

/// Classical authentication in two complementary bases: an inner MAC, a
/// Fourier transform over Z_2 on the full inner output, then an outer MAC
/// with an independent key.
#[derive(Debug, Clone)]
pub struct AuthQftAuth {
    pub inner: PolyHashFamily,
    pub inner_message_bits: u32,
    pub outer: PolyHashFamily,
    pub inner_keys: u64,
    pub outer_keys: u64,
}

impl AuthQftAuth {
    pub fn new(
        inner: PolyHashFamily,
        inner_message_bits: u32,
        outer: PolyHashFamily,
    ) -> Result<Self> {
        let inner_out_bits = inner_message_bits + inner.tag_bits;
        // the outer MAC signs the whole inner output
        let outer_msg_bits = inner_out_bits;
        if outer_msg_bits > outer.field.w {
            return Err(Error::InvalidArgument(format!(
                "outer field width {} cannot sign {} message bits",
                outer.field.w, outer_msg_bits
            )));
        }
        Ok(AuthQftAuth {
            inner,
            inner_message_bits,
            outer,
            inner_keys: inner.key_count(),
            outer_keys: outer.key_count(),
        })
    }

    pub fn key_count(&self) -> u64 {
        self.inner_keys * self.outer_keys
    }

    pub fn split_key(&self, key: u64) -> (u64, u64) {
        (key / self.outer_keys, key % self.outer_keys)
    }

    /// The outer key is the leaked part of the composed key.
    pub fn outer_key_of(&self, key: u64) -> u64 {
        key % self.outer_keys
    }

    pub fn message_space(&self) -> RegisterSpace {
        RegisterSpace::single("M", 1 << self.inner_message_bits)
    }

    pub fn inner_output_space(&self) -> RegisterSpace {
        RegisterSpace::new(vec![
            ("M", 1 << self.inner_message_bits),
            ("T1", self.inner.tag_space() as usize),
        ])
        .expect("fresh labels")
    }

    pub fn authenticated_space(&self) -> RegisterSpace {
        RegisterSpace::new(vec![
            ("M", 1 << self.inner_message_bits),
            ("T1", self.inner.tag_space() as usize),
            ("T2", self.outer.tag_space() as usize),
        ])
        .expect("fresh labels")
    }

    /// Stage 1: the inner MAC isometry M -> (M, T1).
    pub fn inner_auth(&self, inner_key: u64) -> LinearMap {
        let scheme = wegman_carter_scheme(self.inner, self.inner_message_bits)
            .expect("validated in new()");
        let mut map = scheme.auth_isometry(inner_key);
        map.output = self.inner_output_space();
        map
    }

    /// Stage 2: Hadamard on every qubit of the inner output.
    pub fn fourier_stage(&self) -> LinearMap {
        hadamard_all(self.inner_output_space()).expect("power-of-two dimensions")
    }

    /// Stage 3: the outer MAC isometry (M, T1) -> (M, T1, T2), signing the
    /// joint inner output index.
    pub fn outer_auth(&self, outer_key: u64) -> LinearMap {
        let n = self.inner_output_space().total_dim();
        let t2 = self.outer.tag_space() as usize;
        let k = self.outer.key_from_index(outer_key);
        let mut m = crate::qlinalg::CMatrix::zeros(n * t2, n);
        for x in 0..n as u64 {
            let tag = self.outer.hash_eval(&k, x).expect("x fits the outer field");
            m[((x * t2 as u64 + tag) as usize, x as usize)] = crate::qlinalg::Cx::new(1.0, 0.0);
        }
        LinearMap::new(self.inner_output_space(), self.authenticated_space(), m)
            .expect("isometry dims")
    }

    /// The composed Auth_{k,h} isometry.
    pub fn auth_isometry(&self, key: u64) -> LinearMap {
        let (k, h) = self.split_key(key);
        self.outer_auth(h)
            .compose(&self.fourier_stage())
            .and_then(|m| m.compose(&self.inner_auth(k)))
            .expect("stage dimensions chain")
    }

    /// Stagewise Ver: outer filter, inverse Fourier, inner filter. Equal to
    /// the adjoint of the composed Auth isometry.
    pub fn ver_filter_map(&self, key: u64) -> LinearMap {
        let (k, h) = self.split_key(key);
        self.inner_auth(k)
            .adjoint()
            .compose(&self.fourier_stage().adjoint())
            .and_then(|m| m.compose(&self.outer_auth(h).adjoint()))
            .expect("stage dimensions chain")
    }

    pub fn scheme(&self) -> AuthScheme {
        let this = self.clone();
        let auth_fn = Arc::new(move |key: u64| this.auth_isometry(key));
        AuthScheme::canonical(
            "auth-qft-auth",
            self.message_space(),
            self.authenticated_space(),
            self.key_count(),
            auth_fn,
            json!({
                "kind": "auth-qft-auth",
                "message_bits": self.inner_message_bits,
                "inner_tag_bits": self.inner.tag_bits,
                "inner_w": self.inner.field.w,
                "outer_tag_bits": self.outer.tag_bits,
                "outer_w": self.outer.field.w,
            }),
        )
    }
}

/// Convenience constructor used by the catalog.
pub fn auth_qft_auth_scheme(
    inner: PolyHashFamily,
    inner_message_bits: u32,
    outer: PolyHashFamily,
) -> Result<AuthScheme> {
    Ok(AuthQftAuth::new(inner, inner_message_bits, outer)?.scheme())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashfam::GF2wField;
    use crate::qlinalg::norms::max_abs_entry;
    use crate::qlinalg::{Cx, QuantumState};
    use crate::schemes::completeness_error;

    fn small() -> AuthQftAuth {
        let inner = PolyHashFamily::new(GF2wField::new(1).unwrap(), 1).unwrap();
        let outer = PolyHashFamily::new(GF2wField::new(2).unwrap(), 2).unwrap();
        AuthQftAuth::new(inner, 1, outer).unwrap()
    }

    #[test]
    fn completeness_all_keys_one_bit_message() {
        let aqa = small();
        let scheme = aqa.scheme();
        assert_eq!(scheme.key_count, 8 * 64);
        let states = vec![
            QuantumState::basis(scheme.message_space.clone(), &[0]),
            QuantumState::basis(scheme.message_space.clone(), &[1]),
            crate::qlinalg::plus_state("M", 2),
        ];
        let err = completeness_error(&scheme, &states).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn composed_isometry_equals_stage_product() {
        let aqa = small();
        for key in [0u64, 5, 100, 511] {
            let (k, h) = aqa.split_key(key);
            let dense = aqa.outer_auth(h).matrix.clone()
                * aqa.fourier_stage().matrix.clone()
                * aqa.inner_auth(k).matrix.clone();
            let got = aqa.auth_isometry(key);
            assert!(max_abs_entry(&(got.matrix.clone() - dense)) < 1e-12);
            assert!(got.is_isometry(1e-9));
        }
    }

    /// Amplitudes of Auth_{k,h}|m> are (1/sqrt(N)) (-1)^{(m,k(m)).x} on
    /// |x, h(x)>.
    #[test]
    fn authenticated_amplitudes_have_fourier_form() {
        let aqa = small();
        let n = 4usize; // inner output dimension
        for key in 0..aqa.key_count() {
            let (ki, ho) = aqa.split_key(key);
            let kin = aqa.inner.key_from_index(ki);
            let hout = aqa.outer.key_from_index(ho);
            let auth = aqa.auth_isometry(key);
            for m in 0..2u64 {
                let tag = aqa.inner.hash_eval(&kin, m).unwrap();
                let y1 = m * 2 + tag; // inner output index (m, k(m))
                for x in 0..n as u64 {
                    let t2 = aqa.outer.hash_eval(&hout, x).unwrap();
                    let row = (x * 4 + t2) as usize;
                    let sign = if ((y1 & x).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                    let expect = Cx::new(sign / (n as f64).sqrt(), 0.0);
                    let got = auth.matrix[(row, m as usize)];
                    assert!((got - expect).norm() < 1e-12, "key {key} m {m} x {x}");
                }
            }
        }
    }

    /// Outer Ver then inverse Fourier recovers the inner-authenticated state
    /// exactly under the identity attack.
    #[test]
    fn outer_stage_roundtrip_is_exact() {
        let aqa = small();
        let plus = crate::qlinalg::plus_state("M", 2);
        for key in [3u64, 260] {
            let (k, h) = aqa.split_key(key);
            let inner_authed = plus.apply(&aqa.inner_auth(k), &["M"]).unwrap();
            let sent = inner_authed
                .apply(&aqa.fourier_stage(), &["M", "T1"])
                .unwrap()
                .apply(&aqa.outer_auth(h), &["M", "T1"])
                .unwrap();
            let back = sent
                .apply(&aqa.outer_auth(h).adjoint(), &["M", "T1", "T2"])
                .unwrap()
                .apply(&aqa.fourier_stage().adjoint(), &["M", "T1"])
                .unwrap();
            let diff = max_abs_entry(
                &(back.density_matrix() - inner_authed.density_matrix()),
            );
            assert!(diff < 1e-12);
            assert!((back.weight() - 1.0).abs() < 1e-12);
        }
    }
}
