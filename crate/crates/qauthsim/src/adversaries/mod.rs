//! Adversaries in Stinespring form: fresh ancilla registers, a sequence of
//! unitaries on the attacked registers, an optional post-selection projector
//! on the adversary's side, and a set of discarded ancillas.

pub mod builtin;
pub mod ideal;

pub use builtin::*;
pub use ideal::{
    construct_ideal_basis_respecting, construct_ideal_keyleak_qft,
    construct_ideal_oblivious_gamma, five_step_simulator, oblivious_side_map,
    IdealBasisRespecting, IdealOblivious,
};

use crate::error::{Error, Result};
use crate::qlinalg::{CMatrix, CVector, Cx, LinearMap, QuantumState, RegisterSpace};
use std::sync::Arc;

/// One unitary step of an attack circuit.
#[derive(Debug, Clone)]
pub enum StructuredOp {
    /// dense unitary on the named registers
    Gate { map: LinearMap, targets: Vec<String> },
    /// permutation (with optional phases) of the joint target index; applied
    /// in O(total dimension) without building a matrix
    Perm { targets: Vec<String>, perm: Vec<usize>, phases: Option<Vec<Cx>> },
}

impl StructuredOp {
    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        match self {
            StructuredOp::Gate { map, targets } => {
                let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
                state.apply(map, &t)
            }
            StructuredOp::Perm { targets, perm, phases } => {
                let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
                state.apply_perm(&t, perm, phases.as_deref())
            }
        }
    }
}

/// An arbitrary completely positive trace non-increasing attack, realized as
/// ancilla preparation, unitaries, projective post-selection, and discard.
#[derive(Debug, Clone)]
pub struct StinespringAttack {
    pub name: String,
    /// joint-initialized ancilla register groups appended to the state
    pub ancillas: Vec<(RegisterSpace, CVector)>,
    pub ops: Vec<StructuredOp>,
    /// projector on named registers, applied after the unitaries
    pub projector: Option<(CMatrix, Vec<String>)>,
    /// ancilla registers discarded at the end (all others stay with the
    /// adversary as side information)
    pub trace_out: Vec<String>,
    pub descriptor: serde_json::Value,
}

impl StinespringAttack {
    pub fn identity() -> Self {
        StinespringAttack {
            name: "identity".into(),
            ancillas: vec![],
            ops: vec![],
            projector: None,
            trace_out: vec![],
            descriptor: serde_json::json!({"name": "identity"}),
        }
    }

    /// Applies the full Stinespring pipeline to a state containing the
    /// attacked registers. Output weight absorbs the post-selection
    /// probability.
    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        let mut st = state.clone();
        for (space, init) in &self.ancillas {
            let anc = QuantumState::pure(space.clone(), init.clone())?;
            st = st.tensor(&anc)?;
        }
        for op in &self.ops {
            st = op.apply(&st)?;
        }
        if let Some((proj, targets)) = &self.projector {
            let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
            let sub = st.space.subspace(&t)?;
            let pm = LinearMap::endo(sub, proj.clone())?;
            st = st.apply(&pm, &t)?;
        }
        if self.trace_out.is_empty() {
            Ok(st)
        } else {
            let t: Vec<&str> = self.trace_out.iter().map(|s| s.as_str()).collect();
            st.partial_trace(&t)
        }
    }

    /// The attack's net unitary as a dense matrix on the given register
    /// layout (attacked registers plus all ancillas). Feasible at small
    /// dimension only; used to derive ideal adversaries.
    pub fn dense_unitary(&self, layout: &RegisterSpace) -> Result<LinearMap> {
        let d = layout.total_dim();
        let mut cols: Vec<CVector> = Vec::with_capacity(d);
        for i in 0..d {
            let mut st = QuantumState::basis(layout.clone(), &layout.unpack(i));
            for op in &self.ops {
                st = op.apply(&st)?;
            }
            let st = st.permuted(&layout.labels())?;
            cols.push(st.vector().expect("unitary pipeline keeps purity").clone());
        }
        LinearMap::endo(layout.clone(), CMatrix::from_columns(&cols))
    }

    /// The register layout the dense unitary acts on: the attacked registers
    /// in the order of `base`, then every ancilla group.
    pub fn full_layout(&self, base: &RegisterSpace) -> Result<RegisterSpace> {
        let mut layout = base.clone();
        for (space, _) in &self.ancillas {
            layout = layout.tensor(space)?;
        }
        Ok(layout)
    }

    /// True when the pipeline applies no post-selection.
    pub fn is_trace_preserving_form(&self) -> bool {
        self.projector.is_none()
    }
}

/// Any adversary an experiment can run: a real attack or one of the ideal
/// classes, optionally indexed by leaked key material.
#[derive(Clone)]
pub enum Adversary {
    Attack(StinespringAttack),
    BasisRespecting(IdealBasisRespecting),
    Oblivious(IdealOblivious),
    /// family of oblivious adversaries selected by a key-leakage function
    ObliviousKeyed {
        family: Arc<dyn Fn(u64) -> IdealOblivious + Send + Sync>,
        leak: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
    },
}

impl Adversary {
    pub fn apply(&self, state: &QuantumState, key: u64) -> Result<QuantumState> {
        match self {
            Adversary::Attack(a) => a.apply(state),
            Adversary::BasisRespecting(i) => i.apply(state),
            Adversary::Oblivious(i) => i.apply(state),
            Adversary::ObliviousKeyed { family, leak } => family(leak(key)).apply(state),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Adversary::Attack(a) => a.name.clone(),
            Adversary::BasisRespecting(i) => i.name.clone(),
            Adversary::Oblivious(i) => i.name.clone(),
            Adversary::ObliviousKeyed { .. } => "oblivious-keyed".into(),
        }
    }
}

/// Checks the CPTNI Kraus bound of an attack by compiling it to a channel on
/// a given small layout.
pub fn attack_kraus_bound_ok(
    attack: &StinespringAttack,
    base: &RegisterSpace,
    tol: f64,
) -> Result<bool> {
    let layout = attack.full_layout(base)?;
    if layout.total_dim() > 512 {
        return Err(Error::InvalidArgument("layout too large for a dense Kraus check".into()));
    }
    // isometry: |b> -> U (|b> (x) |ancilla inits>)
    let d_base = base.total_dim();
    let mut cols: Vec<CVector> = Vec::with_capacity(d_base);
    for i in 0..d_base {
        let mut st = QuantumState::basis(base.clone(), &base.unpack(i));
        for (space, init) in &attack.ancillas {
            st = st.tensor(&QuantumState::pure(space.clone(), init.clone())?)?;
        }
        for op in &attack.ops {
            st = op.apply(&st)?;
        }
        let st = st.permuted(&layout.labels())?;
        cols.push(st.vector().expect("unitary pipeline keeps purity").clone());
    }
    let iso = LinearMap::new(base.clone(), layout.clone(), CMatrix::from_columns(&cols))?;
    let projector = match &attack.projector {
        Some((proj, targets)) => {
            let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
            let sub = layout.subspace(&t)?;
            Some(LinearMap::endo(sub, proj.clone())?)
        }
        None => None,
    };
    let ch = crate::qlinalg::Channel::stinespring(iso, projector, attack.trace_out.clone())?;
    Ok(ch.kraus_bound_ok(tol))
}
