use crate::qlinalg::norms::max_abs_entry;
use super::apply::{apply_block_diag_pure, apply_density, apply_perm_pure, apply_pure, permute_axes};
use super::linmap::{basis_vector, LinearMap, EXACT_TOL};
use super::{CMatrix, CVector, Cx, RegisterSpace};
use crate::error::{Error, Result};

/// Pure vector or density operator over a register space.
///
/// States may be subnormalized: the weight (squared norm, or trace) is the
/// acceptance probability accumulated by trace-non-increasing operations.
/// Conditioning (renormalizing) is always an explicit, separate step.
#[derive(Debug, Clone)]
pub struct QuantumState {
    pub space: RegisterSpace,
    data: StateData,
}

#[derive(Debug, Clone)]
pub enum StateData {
    Pure(CVector),
    Density(CMatrix),
}

impl QuantumState {
    pub fn pure(space: RegisterSpace, vector: CVector) -> Result<Self> {
        if vector.len() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries, space dimension is {}",
                vector.len(),
                space.total_dim()
            )));
        }
        Ok(QuantumState { space, data: StateData::Pure(vector) })
    }

    pub fn density(space: RegisterSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.total_dim() || matrix.ncols() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "density is {}x{}, space dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                space.total_dim()
            )));
        }
        Ok(QuantumState { space, data: StateData::Density(matrix) })
    }

    /// Computational basis state |i0 i1 ...>.
    pub fn basis(space: RegisterSpace, indices: &[usize]) -> Self {
        let flat = space.pack(indices);
        let v = basis_vector(space.total_dim(), flat);
        QuantumState { space, data: StateData::Pure(v) }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn vector(&self) -> Option<&CVector> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            _ => None,
        }
    }

    pub fn density_matrix(&self) -> CMatrix {
        match &self.data {
            StateData::Pure(v) => v * v.adjoint(),
            StateData::Density(m) => m.clone(),
        }
    }

    /// Squared norm for pure states, trace for density operators.
    pub fn weight(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.norm_squared(),
            StateData::Density(m) => m.diagonal().iter().map(|c| c.re).sum(),
        }
    }

    pub fn scale_weight(&self, factor: f64) -> QuantumState {
        match &self.data {
            StateData::Pure(v) => QuantumState {
                space: self.space.clone(),
                data: StateData::Pure(v * Cx::new(factor.sqrt(), 0.0)),
            },
            StateData::Density(m) => QuantumState {
                space: self.space.clone(),
                data: StateData::Density(m * Cx::new(factor, 0.0)),
            },
        }
    }

    /// Renormalizes to weight 1 (conditioning on acceptance).
    pub fn conditioned(&self) -> Result<QuantumState> {
        let w = self.weight();
        if w <= 0.0 {
            return Err(Error::Numerical("conditioning a weight-0 state".into()));
        }
        Ok(self.scale_weight(1.0 / w))
    }

    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let space = self.space.tensor(&other.space)?;
        let data = match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => StateData::Pure(a.kronecker(b)),
            _ => StateData::Density(self.density_matrix().kronecker(&other.density_matrix())),
        };
        Ok(QuantumState { space, data })
    }

    /// Checks the representation invariants at the given tolerance.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let w = self.weight();
        if w > 1.0 + tol {
            return Err(Error::Numerical(format!("weight {w} exceeds 1")));
        }
        if let StateData::Density(m) = &self.data {
            if max_abs_entry(&(m.adjoint() - m)) > tol {
                return Err(Error::Numerical("density operator is not Hermitian".into()));
            }
            let herm = (m + m.adjoint()) * Cx::new(0.5, 0.0);
            let eig = nalgebra::SymmetricEigen::new(herm);
            if eig.eigenvalues.iter().any(|&e| e < -tol) {
                return Err(Error::Numerical("density operator has negative eigenvalues".into()));
            }
        }
        Ok(())
    }

    /// Applies a linear map to the named target registers (identity on the
    /// rest). Output registers are spliced where the first target sat.
    pub fn apply(&self, map: &LinearMap, targets: &[&str]) -> Result<QuantumState> {
        if targets.len() != map.input.len() {
            return Err(Error::DimensionMismatch(format!(
                "map expects {} registers, got {} targets",
                map.input.len(),
                targets.len()
            )));
        }
        let mut positions = Vec::with_capacity(targets.len());
        for (i, t) in targets.iter().enumerate() {
            let p = self.space.position(t)?;
            if positions.contains(&p) {
                return Err(Error::InvalidArgument(format!("duplicate target {t}")));
            }
            let want = map.input.registers()[i].dim;
            let have = self.space.registers()[p].dim;
            if want != have {
                return Err(Error::DimensionMismatch(format!(
                    "target {t} has dimension {have}, map expects {want}"
                )));
            }
            positions.push(p);
        }
        // Final register list: outputs spliced at the first target position.
        // Shape-preserving maps keep the target labels; space-changing maps
        // (isometries, filters) bring their own output registers.
        let endomorphic = map.input.dims() == map.output.dims();
        let first = *positions.iter().min().unwrap_or(&0);
        let mut regs: Vec<(String, usize)> = Vec::new();
        for (p, r) in self.space.registers().iter().enumerate() {
            if positions.contains(&p) {
                if p == first {
                    if endomorphic {
                        for &tp in &positions {
                            let tr = &self.space.registers()[tp];
                            regs.push((tr.label.clone(), tr.dim));
                        }
                    } else {
                        for o in map.output.registers() {
                            regs.push((o.label.clone(), o.dim));
                        }
                    }
                }
            } else {
                regs.push((r.label.clone(), r.dim));
            }
        }
        if self.space.is_empty() {
            for o in map.output.registers() {
                regs.push((o.label.clone(), o.dim));
            }
        }
        let new_space = RegisterSpace::new(regs)?;
        let dims = self.space.dims();
        let out_dims = map.output.dims();
        let data = match &self.data {
            StateData::Pure(v) => {
                StateData::Pure(apply_pure(&map.matrix, v, &dims, &positions, &out_dims))
            }
            StateData::Density(m) => {
                StateData::Density(apply_density(&map.matrix, m, &dims, &positions, &out_dims))
            }
        };
        Ok(QuantumState { space: new_space, data })
    }

    /// Applies a (phased) permutation of the joint index of the target
    /// registers; layout follows the same splice rule as `apply`.
    pub fn apply_perm(
        &self,
        targets: &[&str],
        perm: &[usize],
        phases: Option<&[Cx]>,
    ) -> Result<QuantumState> {
        let mut positions = Vec::with_capacity(targets.len());
        for t in targets {
            positions.push(self.space.position(t)?);
        }
        let dt: usize = positions.iter().map(|&p| self.space.dims()[p]).product();
        if perm.len() != dt {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let dims = self.space.dims();
        // same-dims splice keeps labels; compute spliced space like `apply`
        let first = *positions.iter().min().unwrap_or(&0);
        let mut regs: Vec<(String, usize)> = Vec::new();
        for (p, r) in self.space.registers().iter().enumerate() {
            if positions.contains(&p) {
                if p == first {
                    for &tp in &positions {
                        let tr = &self.space.registers()[tp];
                        regs.push((tr.label.clone(), tr.dim));
                    }
                }
            } else {
                regs.push((r.label.clone(), r.dim));
            }
        }
        let new_space = RegisterSpace::new(regs)?;
        let data = match &self.data {
            StateData::Pure(v) => {
                StateData::Pure(apply_perm_pure(perm, phases, v, &dims, &positions))
            }
            StateData::Density(m) => {
                let cols: Vec<CVector> = m
                    .column_iter()
                    .map(|c| apply_perm_pure(perm, phases, &c.into_owned(), &dims, &positions))
                    .collect();
                let m1 = CMatrix::from_columns(&cols);
                let rows: Vec<CVector> = m1
                    .row_iter()
                    .map(|r| {
                        apply_perm_pure(
                            perm,
                            None,
                            &r.transpose().map(|c| c.conj()),
                            &dims,
                            &positions,
                        )
                        .map(|c| c.conj())
                    })
                    .collect();
                StateData::Density(CMatrix::from_columns(&rows).transpose())
            }
        };
        Ok(QuantumState { space: new_space, data })
    }

    /// Applies sum_y |y><y| (x) B_y with y ranging over the control
    /// registers' joint computational index and square blocks B_y on the
    /// side registers. Register layout is unchanged.
    pub fn apply_block_diag(
        &self,
        control: &[&str],
        side: &[&str],
        blocks: &[CMatrix],
    ) -> Result<QuantumState> {
        let mut cpos = Vec::with_capacity(control.len());
        for c in control {
            cpos.push(self.space.position(c)?);
        }
        let mut spos = Vec::with_capacity(side.len());
        for s in side {
            spos.push(self.space.position(s)?);
        }
        let dims = self.space.dims();
        let d_ctrl: usize = cpos.iter().map(|&p| dims[p]).product();
        let d_side: usize = spos.iter().map(|&p| dims[p]).product();
        if blocks.len() != d_ctrl {
            return Err(Error::DimensionMismatch("one block per control index".into()));
        }
        for b in blocks {
            if b.nrows() != d_side || b.ncols() != d_side {
                return Err(Error::DimensionMismatch("square side blocks".into()));
            }
        }
        let data = match &self.data {
            StateData::Pure(v) => {
                StateData::Pure(apply_block_diag_pure(blocks, v, &dims, &cpos, &spos))
            }
            StateData::Density(m) => {
                let cols: Vec<CVector> = m
                    .column_iter()
                    .map(|c| apply_block_diag_pure(blocks, &c.into_owned(), &dims, &cpos, &spos))
                    .collect();
                let m1 = CMatrix::from_columns(&cols);
                let rows: Vec<CVector> = m1
                    .row_iter()
                    .map(|r| {
                        apply_block_diag_pure(
                            blocks,
                            &r.transpose().map(|c| c.conj()),
                            &dims,
                            &cpos,
                            &spos,
                        )
                        .map(|c| c.conj())
                    })
                    .collect();
                StateData::Density(CMatrix::from_columns(&rows).transpose())
            }
        };
        Ok(QuantumState { space: self.space.clone(), data })
    }

    /// Traces out the named registers. The result is a density operator on
    /// the remaining registers (or a 0-register scalar state).
    pub fn partial_trace(&self, discard: &[&str]) -> Result<QuantumState> {
        let mut positions = Vec::with_capacity(discard.len());
        for d in discard {
            positions.push(self.space.position(d)?);
        }
        let keep_space = self.space.without(discard)?;
        let dims = self.space.dims();
        let d_disc: usize = positions.iter().map(|&p| dims[p]).product();
        let d_keep = keep_space.total_dim();
        // axis order: [discard..., keep...]
        let mut perm = positions.clone();
        for p in 0..dims.len() {
            if !positions.contains(&p) {
                perm.push(p);
            }
        }
        let mut out = CMatrix::zeros(d_keep, d_keep);
        match &self.data {
            StateData::Pure(v) => {
                let vp = permute_axes(v, &dims, &perm);
                // rho_keep[r, r'] = sum_d vp[(d,r)] conj(vp[(d,r')])
                for d in 0..d_disc {
                    let block = vp.rows(d * d_keep, d_keep);
                    out.gerc(Cx::new(1.0, 0.0), &block.clone_owned(), &block.clone_owned(), Cx::new(1.0, 0.0));
                }
            }
            StateData::Density(m) => {
                // permute rows and columns, then sum diagonal discard blocks
                let cols: Vec<CVector> =
                    m.column_iter().map(|c| permute_axes(&c.into_owned(), &dims, &perm)).collect();
                let mp = CMatrix::from_columns(&cols);
                let rows: Vec<CVector> = mp
                    .row_iter()
                    .map(|r| permute_axes(&r.transpose(), &dims, &perm))
                    .collect();
                let mpp = CMatrix::from_columns(&rows).transpose(); // rows permuted too
                for d in 0..d_disc {
                    let block = mpp.view((d * d_keep, d * d_keep), (d_keep, d_keep));
                    out += block;
                }
            }
        }
        Ok(QuantumState { space: keep_space, data: StateData::Density(out) })
    }

    /// Reorders registers into the given label order (explicit permutation).
    pub fn permuted(&self, order: &[&str]) -> Result<QuantumState> {
        if order.len() != self.space.len() {
            return Err(Error::InvalidArgument("permutation must list every register".into()));
        }
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            perm.push(self.space.position(l)?);
        }
        let new_space = self.space.subspace(order)?;
        let dims = self.space.dims();
        let data = match &self.data {
            StateData::Pure(v) => StateData::Pure(permute_axes(v, &dims, &perm)),
            StateData::Density(m) => {
                let cols: Vec<CVector> =
                    m.column_iter().map(|c| permute_axes(&c.into_owned(), &dims, &perm)).collect();
                let mp = CMatrix::from_columns(&cols);
                let rows: Vec<CVector> = mp
                    .row_iter()
                    .map(|r| permute_axes(&r.transpose(), &dims, &perm))
                    .collect();
                StateData::Density(CMatrix::from_columns(&rows).transpose())
            }
        };
        Ok(QuantumState { space: new_space, data })
    }

    /// Aligns register order with another state's space (same label set).
    pub fn aligned_with(&self, other: &QuantumState) -> Result<QuantumState> {
        let order = other.space.labels();
        self.permuted(&order)
    }

    /// Renames one register in place.
    pub fn renamed(&self, from: &str, to: &str) -> Result<QuantumState> {
        Ok(QuantumState { space: self.space.renamed(from, to)?, data: self.data.clone() })
    }

    /// Fully dephases the target registers in the given orthonormal basis.
    /// The basis is a unitary on the target subspace; trace is preserved.
    pub fn measure_in_basis(&self, targets: &[&str], basis: &LinearMap) -> Result<QuantumState> {
        if !basis.is_unitary(EXACT_TOL) {
            return Err(Error::NotUnitary("measurement basis".into()));
        }
        let dt = basis.input.total_dim();
        let sub = self.space.subspace(targets)?;
        if sub.total_dim() != dt {
            return Err(Error::DimensionMismatch(format!(
                "basis dimension {dt} vs target dimension {}",
                sub.total_dim()
            )));
        }
        let mut acc: Option<QuantumState> = None;
        for i in 0..dt {
            let col = basis.matrix.column(i).into_owned();
            let proj = LinearMap::new(sub.clone(), sub.clone(), &col * col.adjoint())?;
            let branch = self.apply(&proj, targets)?;
            let bm = branch.density_matrix();
            acc = Some(match acc {
                None => QuantumState::density(branch.space.clone(), bm)?,
                Some(a) => QuantumState::density(a.space.clone(), a.density_matrix() + bm)?,
            });
        }
        Ok(acc.expect("dt >= 1"))
    }

    /// Nested-array dump with separate real and imaginary parts.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.data {
            StateData::Pure(v) => serde_json::json!({
                "registers": self.space.labels(),
                "kind": "pure",
                "re": v.iter().map(|c| c.re).collect::<Vec<_>>(),
                "im": v.iter().map(|c| c.im).collect::<Vec<_>>(),
            }),
            StateData::Density(m) => serde_json::json!({
                "registers": self.space.labels(),
                "kind": "density",
                "re": (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i,j)].re).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "im": (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i,j)].im).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        }
    }
}
