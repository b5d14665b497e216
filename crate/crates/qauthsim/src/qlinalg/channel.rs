use crate::qlinalg::norms::max_abs_entry;
use super::linmap::LinearMap;
use super::norms::hermitian_eigenvalues;
use super::{CMatrix, QuantumState, RegisterSpace};
use crate::error::{Error, Result};

/// A completely positive, trace non-increasing map in either Kraus or
/// Stinespring (isometry + projector + trace-out) form.
#[derive(Debug, Clone)]
pub struct Channel {
    pub input: RegisterSpace,
    pub output: RegisterSpace,
    pub repr: ChannelRepr,
}

#[derive(Debug, Clone)]
pub enum ChannelRepr {
    Kraus(Vec<CMatrix>),
    Stinespring {
        /// isometry from the input registers to a larger register set
        isometry: LinearMap,
        /// optional projector applied after the isometry, on named registers
        projector: Option<LinearMap>,
        /// registers of the isometry output to trace out at the end
        trace_out: Vec<String>,
    },
}

impl Channel {
    pub fn kraus(input: RegisterSpace, output: RegisterSpace, ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus list".into()));
        }
        for a in &ops {
            if a.ncols() != input.total_dim() || a.nrows() != output.total_dim() {
                return Err(Error::DimensionMismatch("Kraus operator shape".into()));
            }
        }
        let ch = Channel { input, output, repr: ChannelRepr::Kraus(ops) };
        if !ch.kraus_bound_ok(1e-7) {
            return Err(Error::InvalidArgument("Kraus set exceeds the trace bound".into()));
        }
        Ok(ch)
    }

    /// Single-Kraus channel from a linear map (e.g. a verification filter).
    pub fn from_map(map: &LinearMap) -> Result<Self> {
        Channel::kraus(map.input.clone(), map.output.clone(), vec![map.matrix.clone()])
    }

    pub fn identity(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        Channel {
            input: space.clone(),
            output: space,
            repr: ChannelRepr::Kraus(vec![CMatrix::identity(d, d)]),
        }
    }

    pub fn stinespring(
        isometry: LinearMap,
        projector: Option<LinearMap>,
        trace_out: Vec<String>,
    ) -> Result<Self> {
        if !isometry.is_isometry(1e-7) {
            return Err(Error::InvalidArgument("Stinespring map is not an isometry".into()));
        }
        Channel::from_dilation(isometry, projector, trace_out)
    }

    /// Stinespring-shaped channel whose dilation map is merely a contraction
    /// (an already-projected isometry); the trace bound is checked instead.
    pub fn from_dilation(
        dilation: LinearMap,
        projector: Option<LinearMap>,
        trace_out: Vec<String>,
    ) -> Result<Self> {
        for l in &trace_out {
            dilation.output.position(l)?;
        }
        let labels: Vec<&str> = trace_out.iter().map(|s| s.as_str()).collect();
        let output = dilation.output.without(&labels)?;
        let ch = Channel {
            input: dilation.input.clone(),
            output,
            repr: ChannelRepr::Stinespring { isometry: dilation, projector, trace_out },
        };
        if !ch.kraus_bound_ok(1e-7) {
            return Err(Error::InvalidArgument("dilation exceeds the trace bound".into()));
        }
        Ok(ch)
    }

    /// Full dephasing of a space in the given orthonormal basis.
    pub fn dephase_in_basis(space: RegisterSpace, basis: &LinearMap) -> Result<Self> {
        if !basis.is_unitary(1e-9) {
            return Err(Error::NotUnitary("dephasing basis".into()));
        }
        let d = space.total_dim();
        if basis.matrix.nrows() != d {
            return Err(Error::DimensionMismatch("basis vs space".into()));
        }
        let ops = (0..d)
            .map(|i| {
                let col = basis.matrix.column(i).into_owned();
                &col * col.adjoint()
            })
            .collect();
        Channel::kraus(space.clone(), space, ops)
    }

    pub fn kraus_ops(&self) -> Result<Vec<CMatrix>> {
        match &self.repr {
            ChannelRepr::Kraus(ops) => Ok(ops.clone()),
            ChannelRepr::Stinespring { isometry, projector, trace_out } => {
                // K_e = (<e|_traced (x) I) P V, computed by reading blocks of PV
                let mut pv = isometry.clone();
                if let Some(p) = projector {
                    let labels: Vec<&str> = p.input.labels();
                    // embed projector on the isometry output space
                    let full = embed_on(&isometry.output, p, &labels)?;
                    pv = LinearMap::new(
                        isometry.input.clone(),
                        isometry.output.clone(),
                        full * &isometry.matrix,
                    )?;
                }
                let labels: Vec<&str> = trace_out.iter().map(|s| s.as_str()).collect();
                let kept = isometry.output.without(&labels)?;
                let traced = isometry.output.subspace(&labels)?;
                let dk = kept.total_dim();
                let dt = traced.total_dim();
                let din = self.input.total_dim();
                let mut ops = Vec::with_capacity(dt);
                // row index of PV output decomposes over the full output space
                let full_out = &isometry.output;
                let mut row_of = vec![0usize; full_out.total_dim()];
                for flat in 0..full_out.total_dim() {
                    let idx = full_out.unpack(flat);
                    let mut ki = 0usize;
                    let mut ti = 0usize;
                    for (pos, reg) in full_out.registers().iter().enumerate() {
                        if labels.contains(&reg.label.as_str()) {
                            ti = ti * reg.dim + idx[pos];
                        } else {
                            ki = ki * reg.dim + idx[pos];
                        }
                    }
                    row_of[flat] = ti * dk + ki;
                }
                for e in 0..dt {
                    let mut k = CMatrix::zeros(dk, din);
                    for flat in 0..full_out.total_dim() {
                        let packed = row_of[flat];
                        if packed / dk == e {
                            for c in 0..din {
                                k[(packed % dk, c)] = pv.matrix[(flat, c)];
                            }
                        }
                    }
                    ops.push(k);
                }
                Ok(ops)
            }
        }
    }

    /// lambda_max(sum A^dagger A) <= 1 + tol.
    pub fn kraus_bound_ok(&self, tol: f64) -> bool {
        match self.kraus_ops() {
            Ok(ops) => {
                let din = self.input.total_dim();
                let mut s = CMatrix::zeros(din, din);
                for a in &ops {
                    s += a.adjoint() * a;
                }
                let eigs = hermitian_eigenvalues(&s);
                eigs.first().map(|&e| e <= 1.0 + tol).unwrap_or(true)
            }
            Err(_) => false,
        }
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        match self.kraus_ops() {
            Ok(ops) => {
                let din = self.input.total_dim();
                let mut s = CMatrix::zeros(din, din);
                for a in &ops {
                    s += a.adjoint() * a;
                }
                max_abs_entry(&(s - CMatrix::identity(din, din))) <= tol
            }
            Err(_) => false,
        }
    }

    /// Applies the channel to the named registers of a state.
    pub fn apply_on(&self, state: &QuantumState, targets: &[&str]) -> Result<QuantumState> {
        match &self.repr {
            ChannelRepr::Kraus(ops) => {
                if ops.len() == 1 {
                    let m = LinearMap::new(self.input.clone(), self.output.clone(), ops[0].clone())?;
                    return state.apply(&m, targets);
                }
                let mut acc: Option<QuantumState> = None;
                for a in ops {
                    let m = LinearMap::new(self.input.clone(), self.output.clone(), a.clone())?;
                    let branch = state.apply(&m, targets)?;
                    let bm = branch.density_matrix();
                    acc = Some(match acc {
                        None => QuantumState::density(branch.space.clone(), bm)?,
                        Some(prev) => {
                            QuantumState::density(prev.space.clone(), prev.density_matrix() + bm)?
                        }
                    });
                }
                Ok(acc.expect("nonempty Kraus list"))
            }
            ChannelRepr::Stinespring { isometry, projector, trace_out } => {
                let mut st = state.apply(isometry, targets)?;
                if let Some(p) = projector {
                    let plabels: Vec<&str> = p.input.labels();
                    st = st.apply(p, &plabels)?;
                }
                let tlabels: Vec<&str> = trace_out.iter().map(|s| s.as_str()).collect();
                if tlabels.is_empty() {
                    Ok(st)
                } else {
                    st.partial_trace(&tlabels)
                }
            }
        }
    }

    /// Channel reconstructed from a Choi matrix sum_ij E(e_ij) (x) e_ij.
    /// Eigenvalues slightly below zero (within `tol`) are clamped.
    pub fn from_choi(
        input: RegisterSpace,
        output: RegisterSpace,
        choi: &CMatrix,
        tol: f64,
    ) -> Result<Self> {
        let din = input.total_dim();
        let dout = output.total_dim();
        if choi.nrows() != din * dout {
            return Err(Error::DimensionMismatch("Choi matrix shape".into()));
        }
        let herm = (choi + choi.adjoint()) * super::Cx::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        let mut ops = Vec::new();
        for (idx, &w) in eig.eigenvalues.iter().enumerate() {
            if w < -tol {
                return Err(Error::Numerical(format!("Choi eigenvalue {w} below -{tol}")));
            }
            if w <= tol {
                continue;
            }
            let v = eig.eigenvectors.column(idx);
            let mut k = CMatrix::zeros(dout, din);
            for o in 0..dout {
                for i in 0..din {
                    k[(o, i)] = v[o * din + i] * super::Cx::new(w.sqrt(), 0.0);
                }
            }
            ops.push(k);
        }
        if ops.is_empty() {
            ops.push(CMatrix::zeros(dout, din));
        }
        Channel::kraus(input, output, ops)
    }

    /// Dense superoperator matrix (column-major vectorization), for small
    /// dimensions; used to compare channels exactly.
    pub fn superoperator_matrix(&self) -> Result<CMatrix> {
        let din = self.input.total_dim();
        let dout = self.output.total_dim();
        let ops = self.kraus_ops()?;
        let mut s = CMatrix::zeros(dout * dout, din * din);
        for a in &ops {
            let ac = a.map(|c| c.conj());
            s += ac.kronecker(a);
        }
        Ok(s)
    }
}

/// Embeds an endomorphism acting on a subset of registers into the identity
/// on the full space, as a dense matrix.
pub fn embed_on(space: &RegisterSpace, map: &LinearMap, targets: &[&str]) -> Result<CMatrix> {
    let d = space.total_dim();
    let mut positions = Vec::new();
    for t in targets {
        positions.push(space.position(t)?);
    }
    let dims = space.dims();
    let mut out = CMatrix::zeros(d, d);
    let dt: usize = positions.iter().map(|&p| dims[p]).product();
    // column by column through the pure kernel
    for col in 0..d {
        let mut v = super::CVector::zeros(d);
        v[col] = super::Cx::new(1.0, 0.0);
        let w = super::apply::apply_pure(&map.matrix, &v, &dims, &positions, &map.output.dims());
        out.set_column(col, &w);
    }
    let _ = dt;
    Ok(out)
}
