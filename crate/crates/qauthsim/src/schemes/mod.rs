//! Keyed authentication schemes: an `Auth` isometry from the message space
//! into the authenticated space, and the `Ver` filter that inverts it on the
//! accepting branch.

pub mod composed;
pub mod design;
pub mod qft;
pub mod wegman_carter;

pub use composed::{append_random_bit_scheme, pauli_composed_scheme};
pub use design::{unitary_design_scheme, DesignEnsemble};
pub use qft::{auth_qft_auth_scheme, AuthQftAuth};
pub use wegman_carter::wegman_carter_scheme;

use crate::error::{Error, Result};
use crate::qlinalg::{
    Channel, CMatrix, Cx, LinearMap, QuantumState, RegisterSpace,
};
use std::sync::Arc;

type AuthFn = dyn Fn(u64) -> LinearMap + Send + Sync;
type VerFn = dyn Fn(u64) -> Channel + Send + Sync;
type ProjFn = dyn Fn(u64) -> CMatrix + Send + Sync;

/// A keyed pair (Auth_k, Ver_k) with an enumerable key space.
///
/// The classical key is extensional: experiments iterate or sample key
/// indices and hold one subnormalized state per key, rather than carrying a
/// quantum key register.
#[derive(Clone)]
pub struct AuthScheme {
    pub name: String,
    pub message_space: RegisterSpace,
    pub authenticated_space: RegisterSpace,
    pub key_count: u64,
    /// true when Ver_k is exactly the inverse-isometry filter of Auth_k
    pub canonical: bool,
    auth_fn: Arc<AuthFn>,
    ver_fn: Arc<VerFn>,
    proj_fn: Arc<ProjFn>,
    pub descriptor: serde_json::Value,
}

impl std::fmt::Debug for AuthScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AuthScheme")
            .field("name", &self.name)
            .field("message_space", &self.message_space)
            .field("authenticated_space", &self.authenticated_space)
            .field("key_count", &self.key_count)
            .finish()
    }
}

impl AuthScheme {
    /// Canonical scheme: Ver_k is the adjoint filter of the Auth_k isometry.
    pub fn canonical(
        name: impl Into<String>,
        message_space: RegisterSpace,
        authenticated_space: RegisterSpace,
        key_count: u64,
        auth_fn: Arc<AuthFn>,
        descriptor: serde_json::Value,
    ) -> Self {
        let m = message_space.clone();
        let y = authenticated_space.clone();
        let af = auth_fn.clone();
        let ver_fn: Arc<VerFn> = Arc::new(move |k| {
            let auth = af(k);
            Channel::kraus(y.clone(), m.clone(), vec![auth.matrix.adjoint()])
                .expect("adjoint filter is a valid Kraus set")
        });
        let af2 = auth_fn.clone();
        let proj_fn: Arc<ProjFn> = Arc::new(move |k| {
            let a = af2(k).matrix;
            &a * a.adjoint()
        });
        AuthScheme {
            name: name.into(),
            message_space,
            authenticated_space,
            key_count,
            canonical: true,
            auth_fn,
            ver_fn,
            proj_fn,
            descriptor,
        }
    }

    pub fn with_custom_ver(
        name: impl Into<String>,
        message_space: RegisterSpace,
        authenticated_space: RegisterSpace,
        key_count: u64,
        auth_fn: Arc<AuthFn>,
        ver_fn: Arc<VerFn>,
        proj_fn: Arc<ProjFn>,
        descriptor: serde_json::Value,
    ) -> Self {
        AuthScheme {
            name: name.into(),
            message_space,
            authenticated_space,
            key_count,
            canonical: false,
            auth_fn,
            ver_fn,
            proj_fn,
            descriptor,
        }
    }

    pub fn auth_isometry(&self, key: u64) -> LinearMap {
        debug_assert!(key < self.key_count);
        self.auth_fn.as_ref()(key)
    }

    pub fn ver_channel(&self, key: u64) -> Channel {
        self.ver_fn.as_ref()(key)
    }

    /// Projector onto the accepted subspace of Y.
    pub fn accept_projector(&self, key: u64) -> LinearMap {
        LinearMap::endo(self.authenticated_space.clone(), self.proj_fn.as_ref()(key))
            .expect("projector dims")
    }

    /// Applies Auth_k to the message registers of a larger state.
    pub fn auth_apply(&self, key: u64, state: &QuantumState) -> Result<QuantumState> {
        let targets = self.message_space.labels();
        state.apply(&self.auth_isometry(key), &targets)
    }

    /// Applies the Ver_k filter to the authenticated registers; the output
    /// weight is the acceptance probability.
    pub fn ver_apply(&self, key: u64, state: &QuantumState) -> Result<QuantumState> {
        let targets = self.authenticated_space.labels();
        self.ver_channel(key).apply_on(state, &targets)
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> {
        0..self.key_count
    }
}

/// Both branches of the full verification map: the accepting filter output
/// and the rejecting branch, whose message part is maximally mixed.
#[derive(Debug, Clone)]
pub struct VerdictBranches {
    pub accept: QuantumState,
    pub reject_weight: f64,
    /// maximally mixed on M tensored with the rest of the rejected state
    pub reject: QuantumState,
}

/// Filter form of verification: project onto the accepted subspace and
/// un-authenticate. Output weight = acceptance probability.
pub fn ver_filter(scheme: &AuthScheme, key: u64, state: &QuantumState) -> Result<QuantumState> {
    scheme.ver_apply(key, state)
}

/// Full verification with both accept and reject branches.
pub fn ver_full(scheme: &AuthScheme, key: u64, state: &QuantumState) -> Result<VerdictBranches> {
    let accept = scheme.ver_apply(key, state)?;
    let ylabels = scheme.authenticated_space.labels();
    let proj = scheme.accept_projector(key);
    let d = scheme.authenticated_space.total_dim();
    let rejector = LinearMap::endo(
        scheme.authenticated_space.clone(),
        CMatrix::identity(d, d) - proj.matrix,
    )?;
    let rejected = state.apply(&rejector, &ylabels)?;
    let rest = rejected.partial_trace(&ylabels)?;
    let reject_weight = rest.weight();
    let mdim = scheme.message_space.total_dim();
    let mixed = QuantumState::density(
        scheme.message_space.clone(),
        CMatrix::identity(mdim, mdim) * Cx::new(1.0 / mdim as f64, 0.0),
    )?;
    let reject = mixed.tensor(&rest)?;
    Ok(VerdictBranches { accept, reject_weight, reject })
}

/// A classical-key-indexed family of subnormalized states; the object the
/// security games compare. Entries are (key index, probability weight,
/// state).
#[derive(Debug, Clone)]
pub struct KeyedEnsemble {
    pub entries: Vec<(u64, f64, QuantumState)>,
    pub exhaustive: bool,
}

impl KeyedEnsemble {
    /// Total acceptance probability sum_k w_k tr(rho_k).
    pub fn acceptance_probability(&self) -> f64 {
        self.entries.iter().map(|(_, w, st)| w * st.weight()).sum()
    }

    /// sum_k w_k rho_k with every entry aligned to the first entry's layout.
    pub fn key_averaged_state(&self) -> Result<QuantumState> {
        let first = &self.entries.first().ok_or_else(|| {
            Error::InvalidArgument("empty ensemble".into())
        })?.2;
        let mut acc = CMatrix::zeros(first.space.total_dim(), first.space.total_dim());
        for (_, w, st) in &self.entries {
            let st = st.aligned_with(first)?;
            acc += st.density_matrix() * Cx::new(*w, 0.0);
        }
        QuantumState::density(first.space.clone(), acc)
    }

    pub fn probability_sum(&self) -> f64 {
        self.entries.iter().map(|(_, w, _)| w).sum()
    }
}

/// Exhaustive completeness check: Ver_k(Auth_k(rho)) = rho with weight 1 for
/// every key, for each supplied test state on the message space.
pub fn completeness_error(scheme: &AuthScheme, states: &[QuantumState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for key in scheme.keys() {
        for st in states {
            let authed = scheme.auth_apply(key, st)?;
            let back = scheme.ver_apply(key, &authed)?;
            let aligned = back.aligned_with(st)?;
            let err = crate::qlinalg::norms::max_abs_entry(
                &(aligned.density_matrix() - st.density_matrix()),
            );
            let werr = (back.weight() - st.weight()).abs();
            worst = worst.max(err).max(werr);
        }
    }
    Ok(worst)
}
