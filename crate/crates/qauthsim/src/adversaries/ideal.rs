//! Constructions of the ideal adversaries the security proofs compare
//! against: basis-respecting simulators, oblivious side-information maps, and
//! the key-leaked oblivious family for the two-basis scheme.

use super::{StinespringAttack, StructuredOp};
use crate::error::{Error, Result};
use crate::qlinalg::{
    basis_vector, CMatrix, CVector, Cx, LinearMap, QuantumState, RegisterSpace,
};

/// An adversary that may read the authenticated registers in one fixed basis
/// and act on side information conditioned on the outcome, but cannot change
/// the authenticated content. Stored in block form: one side-space operator
/// per basis vector.
#[derive(Debug, Clone)]
pub struct IdealBasisRespecting {
    pub name: String,
    pub y_space: RegisterSpace,
    /// rotation whose columns are the measurement basis; None = computational
    pub basis: Option<LinearMap>,
    /// the side registers of the input state the blocks act on
    pub side_space: RegisterSpace,
    /// ancilla groups inherited from the underlying attack
    pub ancillas: Vec<(RegisterSpace, CVector)>,
    /// V_y on side_space (x) ancillas, indexed by the basis vector
    pub blocks: Vec<CMatrix>,
    pub projector: Option<(CMatrix, Vec<String>)>,
    pub trace_out: Vec<String>,
}

impl IdealBasisRespecting {
    /// Applies the ideal adversary to a state holding the authenticated and
    /// side registers (extra registers ride along untouched).
    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        let mut st = state.clone();
        for (space, init) in &self.ancillas {
            st = st.tensor(&QuantumState::pure(space.clone(), init.clone())?)?;
        }
        let ylabels = self.y_space.labels();
        if let Some(b) = &self.basis {
            st = st.apply(&b.adjoint(), &ylabels)?;
        }
        let mut side_labels: Vec<String> =
            self.side_space.labels().iter().map(|s| s.to_string()).collect();
        for (space, _) in &self.ancillas {
            side_labels.extend(space.labels().iter().map(|s| s.to_string()));
        }
        let side_refs: Vec<&str> = side_labels.iter().map(|s| s.as_str()).collect();
        st = st.apply_block_diag(&ylabels, &side_refs, &self.blocks)?;
        if let Some(b) = &self.basis {
            st = st.apply(b, &ylabels)?;
        }
        if let Some((proj, targets)) = &self.projector {
            let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
            let sub = st.space.subspace(&t)?;
            st = st.apply(&LinearMap::endo(sub, proj.clone())?, &t)?;
        }
        if self.trace_out.is_empty() {
            Ok(st)
        } else {
            let t: Vec<&str> = self.trace_out.iter().map(|s| s.as_str()).collect();
            st.partial_trace(&t)
        }
    }

    /// Compiles the ideal adversary to a channel on (Y, side) for dense
    /// comparisons at small dimensions.
    pub fn to_channel(&self) -> Result<crate::qlinalg::Channel> {
        let base = self.y_space.tensor(&self.side_space)?;
        let mut layout = base.clone();
        for (space, _) in &self.ancillas {
            layout = layout.tensor(space)?;
        }
        let d = base.total_dim();
        let mut cols = Vec::with_capacity(d);
        for i in 0..d {
            let mut st = QuantumState::basis(base.clone(), &base.unpack(i));
            for (space, init) in &self.ancillas {
                st = st.tensor(&QuantumState::pure(space.clone(), init.clone())?)?;
            }
            let ylabels = self.y_space.labels();
            if let Some(b) = &self.basis {
                st = st.apply(&b.adjoint(), &ylabels)?;
            }
            let mut side_labels: Vec<String> =
                self.side_space.labels().iter().map(|s| s.to_string()).collect();
            for (space, _) in &self.ancillas {
                side_labels.extend(space.labels().iter().map(|s| s.to_string()));
            }
            let side_refs: Vec<&str> = side_labels.iter().map(|s| s.as_str()).collect();
            st = st.apply_block_diag(&ylabels, &side_refs, &self.blocks)?;
            if let Some(b) = &self.basis {
                st = st.apply(b, &ylabels)?;
            }
            let st = st.permuted(&layout.labels())?;
            cols.push(st.vector().expect("block pipeline keeps purity").clone());
        }
        let iso = LinearMap::new(base, layout.clone(), CMatrix::from_columns(&cols))?;
        let projector = match &self.projector {
            Some((proj, targets)) => {
                let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
                Some(LinearMap::endo(layout.subspace(&t)?, proj.clone())?)
            }
            None => None,
        };
        crate::qlinalg::Channel::from_dilation(iso, projector, self.trace_out.clone())
    }
}

/// An adversary acting on its own side registers only, identity on the
/// authenticated space.
#[derive(Debug, Clone)]
pub struct IdealOblivious {
    pub name: String,
    pub z_channel: crate::qlinalg::Channel,
}

impl IdealOblivious {
    pub fn identity(z_space: RegisterSpace) -> Self {
        IdealOblivious {
            name: "oblivious-identity".into(),
            z_channel: crate::qlinalg::Channel::identity(z_space),
        }
    }

    pub fn from_channel(name: impl Into<String>, z_channel: crate::qlinalg::Channel) -> Self {
        IdealOblivious { name: name.into(), z_channel }
    }

    /// Replaces the side register content with the maximally mixed state.
    pub fn randomize(z_space: RegisterSpace) -> Self {
        let d = z_space.total_dim();
        let scale = Cx::new(1.0 / (d as f64).sqrt(), 0.0);
        let mut ops = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut k = CMatrix::zeros(d, d);
                k[(i, j)] = scale;
                ops.push(k);
            }
        }
        IdealOblivious {
            name: "oblivious-randomize".into(),
            z_channel: crate::qlinalg::Channel::kraus(z_space.clone(), z_space, ops)
                .expect("depolarizing Kraus set"),
        }
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        let labels = self.z_channel.input.labels();
        self.z_channel.apply_on(state, &labels)
    }
}

/// The accept-branch side map of an attack unitary: the authenticated-space
/// partial trace of V, scaled by 1/dim(Y). Not unitary in general, but a
/// contraction, so it is a valid single-Kraus channel on the side space.
pub fn oblivious_side_map(v: &LinearMap, y_labels: &[&str]) -> Result<CMatrix> {
    let space = &v.input;
    if !v.is_unitary(1e-7) {
        return Err(Error::NotUnitary("side map needs a unitary attack".into()));
    }
    let mut ypos = Vec::new();
    for l in y_labels {
        ypos.push(space.position(l)?);
    }
    let dims = space.dims();
    let d = space.total_dim();
    let n: usize = ypos.iter().map(|&p| dims[p]).product();
    let dz = d / n;
    // flat -> (y, z) split indices
    let mut ysplit = vec![0usize; d];
    let mut zsplit = vec![0usize; d];
    for flat in 0..d {
        let idx = space.unpack(flat);
        let mut y = 0usize;
        let mut z = 0usize;
        for (pos, reg) in space.registers().iter().enumerate() {
            if ypos.contains(&pos) {
                y = y * reg.dim + idx[pos];
            } else {
                z = z * reg.dim + idx[pos];
            }
        }
        ysplit[flat] = y;
        zsplit[flat] = z;
    }
    let mut gamma = CMatrix::zeros(dz, dz);
    for r in 0..d {
        for c in 0..d {
            if ysplit[r] == ysplit[c] {
                gamma[(zsplit[r], zsplit[c])] += v.matrix[(r, c)];
            }
        }
    }
    gamma /= Cx::new(n as f64, 0.0);
    Ok(gamma)
}

/// Ideal oblivious adversary for a unitary attack on (Y, Z): applies the
/// accept-branch side map to Z and nothing to Y.
pub fn construct_ideal_oblivious_gamma(
    v: &LinearMap,
    y_labels: &[&str],
) -> Result<IdealOblivious> {
    let gamma = oblivious_side_map(v, y_labels)?;
    let z_space = v.input.without(y_labels)?;
    let ch = crate::qlinalg::Channel::kraus(z_space.clone(), z_space, vec![gamma])?;
    Ok(IdealOblivious { name: "oblivious-side-map".into(), z_channel: ch })
}

/// The constructive realization of the side map: a maximally entangled
/// ancilla pair stands in for the authenticated register, the attack unitary
/// hits one half, and projecting the pair back onto its initial state leaves
/// exactly the side map acting on Z.
pub fn gamma_constructive_attack(v: &LinearMap, y_labels: &[&str]) -> Result<StinespringAttack> {
    let space = &v.input;
    let y_space = space.subspace(y_labels)?;
    let n = y_space.total_dim();
    // mirror registers A (stands in for Y) and A2 (reference half)
    let mut mirror_regs: Vec<(String, usize)> = Vec::new();
    for r in y_space.registers() {
        mirror_regs.push((format!("{}'", r.label), r.dim));
    }
    mirror_regs.push(("Aref".into(), n));
    let anc_space = RegisterSpace::new(mirror_regs.clone())?;
    let mut init = CVector::zeros(n * n);
    let amp = Cx::new(1.0 / (n as f64).sqrt(), 0.0);
    for j in 0..n {
        init[j * n + j] = amp;
    }
    // attack retargeted to the mirror registers
    let mut targets: Vec<String> = Vec::new();
    for r in space.registers() {
        if y_labels.contains(&r.label.as_str()) {
            targets.push(format!("{}'", r.label));
        } else {
            targets.push(r.label.clone());
        }
    }
    let proj = &init * init.adjoint();
    let proj_targets: Vec<String> = anc_space.labels().iter().map(|s| s.to_string()).collect();
    Ok(StinespringAttack {
        name: "oblivious-side-map-constructive".into(),
        ancillas: vec![(anc_space, init)],
        ops: vec![StructuredOp::Gate { map: v.clone(), targets }],
        projector: Some((proj, proj_targets.clone())),
        trace_out: proj_targets,
        descriptor: serde_json::json!({"name": "oblivious-side-map-constructive"}),
    })
}

/// Builds the basis-respecting simulator of an arbitrary attack in block
/// form: the effective action keeps the authenticated register's basis
/// content and hits the side registers with the matching diagonal block of
/// the attack unitary.
pub fn construct_ideal_basis_respecting(
    attack: &StinespringAttack,
    y_space: &RegisterSpace,
    side_space: &RegisterSpace,
    basis: Option<LinearMap>,
) -> Result<IdealBasisRespecting> {
    if let Some(b) = &basis {
        if !b.is_unitary(1e-9) || b.input.total_dim() != y_space.total_dim() {
            return Err(Error::NotUnitary("measurement basis".into()));
        }
    }
    let mut layout = y_space.tensor(side_space)?;
    for (space, _) in &attack.ancillas {
        layout = layout.tensor(space)?;
    }
    let n = y_space.total_dim();
    let side_full: usize = layout.total_dim() / n;
    let ylabels = y_space.labels();

    let mut blocks = Vec::with_capacity(n);
    for y in 0..n {
        let mut block = CMatrix::zeros(side_full, side_full);
        for s in 0..side_full {
            // |psi_y> (x) |s> on the full layout
            let yvec = match &basis {
                Some(b) => b.matrix.column(y).into_owned(),
                None => basis_vector(n, y),
            };
            let sv = basis_vector(side_full, s);
            let full = yvec.kronecker(&sv);
            let mut st = QuantumState::pure(layout.clone(), full)?;
            for op in &attack.ops {
                st = op.apply(&st)?;
            }
            if let Some(b) = &basis {
                st = st.apply(&b.adjoint(), &ylabels)?;
            }
            let st = st.permuted(&layout.labels())?;
            let v = st.vector().expect("unitary pipeline keeps purity");
            for sp in 0..side_full {
                block[(sp, s)] = v[y * side_full + sp];
            }
        }
        blocks.push(block);
    }
    Ok(IdealBasisRespecting {
        name: format!("basis-respecting({})", attack.name),
        y_space: y_space.clone(),
        basis,
        side_space: side_space.clone(),
        ancillas: attack.ancillas.clone(),
        blocks,
        projector: attack.projector.clone(),
        trace_out: attack.trace_out.clone(),
    })
}

/// The explicit simulator circuit behind `construct_ideal_basis_respecting`:
/// copy the authenticated register in the basis, run the original attack on
/// the copy, compare copy against original, and accept only on agreement.
pub fn five_step_simulator(
    attack: &StinespringAttack,
    y_space: &RegisterSpace,
    basis: Option<LinearMap>,
) -> Result<StinespringAttack> {
    let n = y_space.total_dim();
    // mirror registers for the copy
    let mut mirror_regs: Vec<(String, usize)> = Vec::new();
    for r in y_space.registers() {
        mirror_regs.push((format!("{}'", r.label), r.dim));
    }
    let mirror_space = RegisterSpace::new(mirror_regs)?;
    let flag_space = RegisterSpace::single("Flag", 2);
    let ylabels: Vec<String> = y_space.labels().iter().map(|s| s.to_string()).collect();
    let mlabels: Vec<String> = mirror_space.labels().iter().map(|s| s.to_string()).collect();

    let mut ops: Vec<StructuredOp> = Vec::new();
    let rot = |target_labels: &[String], b: &LinearMap| -> StructuredOp {
        StructuredOp::Gate {
            map: LinearMap::new(b.input.clone(), b.output.clone(), b.matrix.clone())
                .expect("same dims"),
            targets: target_labels.to_vec(),
        }
    };
    if let Some(b) = &basis {
        ops.push(rot(&ylabels, &b.adjoint()));
    }
    // copy joint Y index into the mirror registers
    let mut copy_perm = vec![0usize; n * n];
    for y in 0..n {
        for c in 0..n {
            copy_perm[y * n + c] = y * n + ((c + y) % n);
        }
    }
    let mut copy_targets = ylabels.clone();
    copy_targets.extend(mlabels.iter().cloned());
    ops.push(StructuredOp::Perm { targets: copy_targets.clone(), perm: copy_perm, phases: None });
    if let Some(b) = &basis {
        ops.push(rot(&ylabels, b));
        ops.push(rot(&mlabels, b));
    }
    // the original attack, retargeted onto the copy
    for op in &attack.ops {
        let retarget = |ts: &Vec<String>| -> Vec<String> {
            ts.iter()
                .map(|t| {
                    if ylabels.contains(t) {
                        format!("{t}'")
                    } else {
                        t.clone()
                    }
                })
                .collect()
        };
        ops.push(match op {
            StructuredOp::Gate { map, targets } => {
                StructuredOp::Gate { map: map.clone(), targets: retarget(targets) }
            }
            StructuredOp::Perm { targets, perm, phases } => StructuredOp::Perm {
                targets: retarget(targets),
                perm: perm.clone(),
                phases: phases.clone(),
            },
        });
    }
    // compare in the basis: rotate both, compare computationally
    if let Some(b) = &basis {
        ops.push(rot(&ylabels, &b.adjoint()));
        ops.push(rot(&mlabels, &b.adjoint()));
    }
    // (y, y', f) comparator: equal -> zero the copy and keep f=0, else f=1
    let mut cmp_perm = vec![0usize; n * n * 2];
    for y in 0..n {
        for yp in 0..n {
            for f in 0..2usize {
                let src = (y * n + yp) * 2 + f;
                let dst = if f == 0 {
                    if yp == y {
                        (y * n) * 2 // (y, 0, 0)
                    } else {
                        (y * n + yp) * 2 + 1 // (y, y', 1)
                    }
                } else if yp == y {
                    (y * n + y) * 2 + 1 // (y, y, 1): unused by f=0 branch
                } else {
                    let g = (yp + n - y) % n; // nonzero
                    (y * n + g) * 2 // (y, g, 0), g != 0
                };
                cmp_perm[src] = dst;
            }
        }
    }
    let mut cmp_targets = ylabels.clone();
    cmp_targets.extend(mlabels.iter().cloned());
    cmp_targets.push("Flag".into());
    ops.push(StructuredOp::Perm { targets: cmp_targets, perm: cmp_perm, phases: None });
    if let Some(b) = &basis {
        ops.push(rot(&ylabels, b));
    }

    // projector: attack's projector (if any) and the agreement flag
    let flag0 = {
        let mut p = CMatrix::zeros(2, 2);
        p[(0, 0)] = Cx::new(1.0, 0.0);
        p
    };
    let projector = match &attack.projector {
        Some((p, targets)) => {
            let mut t = targets.clone();
            t.push("Flag".into());
            Some((p.kronecker(&flag0), t))
        }
        None => Some((flag0, vec!["Flag".into()])),
    };
    let mut ancillas = attack.ancillas.clone();
    ancillas.push((mirror_space, basis_vector(n, 0)));
    ancillas.push((flag_space, basis_vector(2, 0)));
    let mut trace_out = attack.trace_out.clone();
    trace_out.extend(mlabels);
    trace_out.push("Flag".into());

    Ok(StinespringAttack {
        name: format!("five-step({})", attack.name),
        ancillas,
        ops,
        projector,
        trace_out,
        descriptor: serde_json::json!({"name": "five-step-simulator"}),
    })
}

/// A basis-respecting witness with one independent Haar unitary per basis
/// vector of the authenticated space, acting on the side space.
pub fn random_basis_respecting_witness<R: rand::Rng + ?Sized>(
    y_space: &RegisterSpace,
    side_space: &RegisterSpace,
    rng: &mut R,
) -> Result<IdealBasisRespecting> {
    let n = y_space.total_dim();
    let dz = side_space.total_dim();
    let blocks = (0..n)
        .map(|_| crate::qlinalg::haar_random_unitary(dz, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealBasisRespecting {
        name: "random-basis-respecting".into(),
        y_space: y_space.clone(),
        basis: None,
        side_space: side_space.clone(),
        ancillas: vec![],
        blocks,
        projector: None,
        trace_out: vec![],
    })
}

/// Key-leaked oblivious adversary for the two-basis scheme: given the
/// basis-respecting witness on the outer authenticated space and the outer
/// tag of every inner index, the side map averages the matching witness
/// blocks over the inner output space.
pub fn construct_ideal_keyleak_qft(
    witness: &IdealBasisRespecting,
    tag_space_dim: usize,
    outer_tags: &[u64],
) -> Result<IdealOblivious> {
    if !witness.ancillas.is_empty() || witness.projector.is_some() {
        return Err(Error::InvalidArgument(
            "key-leak construction expects an ancilla-free witness".into(),
        ));
    }
    let n = outer_tags.len();
    if witness.blocks.len() != n * tag_space_dim {
        return Err(Error::DimensionMismatch(format!(
            "witness has {} blocks, expected {} x {}",
            witness.blocks.len(),
            n,
            tag_space_dim
        )));
    }
    let dz = witness.side_space.total_dim();
    let mut k = CMatrix::zeros(dz, dz);
    for (x, &tag) in outer_tags.iter().enumerate() {
        k += &witness.blocks[x * tag_space_dim + tag as usize];
    }
    k /= Cx::new(n as f64, 0.0);
    let ch = crate::qlinalg::Channel::kraus(
        witness.side_space.clone(),
        witness.side_space.clone(),
        vec![k],
    )?;
    Ok(IdealOblivious { name: "oblivious-keyleak".into(), z_channel: ch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::builtin::*;
    use crate::qlinalg::norms::max_abs_entry;
    use crate::qlinalg::{plus_state, Channel, QuantumState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn attack_channel(
        attack: &StinespringAttack,
        base: &RegisterSpace,
    ) -> Channel {
        let layout = attack.full_layout(base).unwrap();
        let d = base.total_dim();
        let mut cols = Vec::with_capacity(d);
        for i in 0..d {
            let mut st = QuantumState::basis(base.clone(), &base.unpack(i));
            for (space, init) in &attack.ancillas {
                st = st.tensor(&QuantumState::pure(space.clone(), init.clone()).unwrap()).unwrap();
            }
            for op in &attack.ops {
                st = op.apply(&st).unwrap();
            }
            let st = st.permuted(&layout.labels()).unwrap();
            cols.push(st.vector().unwrap().clone());
        }
        let iso = LinearMap::new(base.clone(), layout.clone(), CMatrix::from_columns(&cols)).unwrap();
        let projector = attack.projector.as_ref().map(|(p, targets)| {
            let t: Vec<&str> = targets.iter().map(|s| s.as_str()).collect();
            LinearMap::endo(layout.subspace(&t).unwrap(), p.clone()).unwrap()
        });
        Channel::stinespring(iso, projector, attack.trace_out.clone()).unwrap()
    }

    #[test]
    fn ideal_of_identity_attack_is_identity() {
        let y = RegisterSpace::new(vec![("M", 2), ("T", 2)]).unwrap();
        let z = RegisterSpace::single("Z", 2);
        let ideal =
            construct_ideal_basis_respecting(&identity_attack(), &y, &z, None).unwrap();
        let ch = ideal.to_channel().unwrap();
        let id = Channel::identity(y.tensor(&z).unwrap());
        let diff = max_abs_entry(
            &(ch.superoperator_matrix().unwrap() - id.superoperator_matrix().unwrap()),
        );
        assert!(diff < 1e-10, "diff = {diff}");
    }

    #[test]
    fn ideal_of_measure_attack_equals_the_attack() {
        let y = RegisterSpace::single("Y", 2);
        let z = RegisterSpace::single("Z", 2);
        let attack = measure_in_basis_attack(&y, None).unwrap();
        let ideal = construct_ideal_basis_respecting(&attack, &y, &z, None).unwrap();
        let base = y.tensor(&z).unwrap();
        let a = attack_channel(&attack, &base).superoperator_matrix().unwrap();
        let b = ideal.to_channel().unwrap().superoperator_matrix().unwrap();
        assert!(max_abs_entry(&(a - b)) < 1e-10);
    }

    #[test]
    fn five_step_simulator_matches_block_form() {
        let y = RegisterSpace::new(vec![("M", 2), ("T", 2)]).unwrap();
        let z = RegisterSpace::single("Z", 2);
        let base = y.tensor(&z).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for (i, attack) in [
            random_unitary_attack(base.clone(), 3).unwrap(),
            tag_substitution("T", 2, 1).unwrap(),
            controlled_replace("Z", &y, basis_vector(4, 2)).unwrap(),
        ]
        .into_iter()
        .enumerate()
        {
            let ideal = construct_ideal_basis_respecting(&attack, &y, &z, None).unwrap();
            let five = five_step_simulator(&attack, &y, None).unwrap();
            let a = ideal.to_channel().unwrap().superoperator_matrix().unwrap();
            let b = attack_channel(&five, &base).superoperator_matrix().unwrap();
            let diff = max_abs_entry(&(a - b));
            assert!(diff < 1e-9, "attack {i}: diff = {diff}");
        }
        // and in a rotated basis
        let u = crate::qlinalg::haar_random_unitary(4, &mut rng).unwrap();
        let basis = LinearMap::endo(y.clone(), u).unwrap();
        let attack = random_unitary_attack(base.clone(), 8).unwrap();
        let ideal =
            construct_ideal_basis_respecting(&attack, &y, &z, Some(basis.clone())).unwrap();
        let five = five_step_simulator(&attack, &y, Some(basis)).unwrap();
        let a = ideal.to_channel().unwrap().superoperator_matrix().unwrap();
        let b = attack_channel(&five, &base).superoperator_matrix().unwrap();
        assert!(max_abs_entry(&(a - b)) < 1e-9);
    }

    /// The ideal adversary commutes with dephasing in its own basis.
    #[test]
    fn ideal_commutes_with_basis_measurement() {
        let y = RegisterSpace::new(vec![("M", 2), ("T", 2)]).unwrap();
        let z = RegisterSpace::single("Z", 2);
        let base = y.tensor(&z).unwrap();
        let attack = random_unitary_attack(base.clone(), 11).unwrap();
        let ideal = construct_ideal_basis_respecting(&attack, &y, &z, None).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for _ in 0..5 {
            let v = crate::qlinalg::haar_random_unitary(8, &mut rng).unwrap();
            let st = QuantumState::pure(base.clone(), v.column(0).into_owned()).unwrap();
            let meas_first = ideal
                .apply(&st.measure_in_basis(&["M", "T"], &LinearMap::identity(y.clone())).unwrap())
                .unwrap();
            let meas_last = ideal
                .apply(&st)
                .unwrap()
                .measure_in_basis(&["M", "T"], &LinearMap::identity(y.clone()))
                .unwrap();
            let diff = max_abs_entry(
                &(meas_first.density_matrix() - meas_last.aligned_with(&meas_first).unwrap().density_matrix()),
            );
            assert!(diff < 1e-9, "diff = {diff}");
        }
    }

    #[test]
    fn side_map_special_cases() {
        let y = RegisterSpace::single("Y", 4);
        let z = RegisterSpace::single("Z", 2);
        let base = y.tensor(&z).unwrap();
        // V = I -> side map = I_Z
        let id = LinearMap::identity(base.clone());
        let g = oblivious_side_map(&id, &["Y"]).unwrap();
        assert!(max_abs_entry(&(g.clone() - CMatrix::identity(2, 2))) < 1e-12);
        // V = W (x) X -> side map = (tr W / N) X
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let w = crate::qlinalg::haar_random_unitary(4, &mut rng).unwrap();
        let x = crate::qlinalg::haar_random_unitary(2, &mut rng).unwrap();
        let v = LinearMap::endo(base.clone(), w.kronecker(&x)).unwrap();
        let g = oblivious_side_map(&v, &["Y"]).unwrap();
        let trw: Cx = w.diagonal().iter().sum();
        let expect = x * (trw / Cx::new(4.0, 0.0));
        assert!(max_abs_entry(&(g - expect)) < 1e-12);
    }

    /// Index-sum oracle: tracing one side of SWAP gives the identity, so the
    /// side map of SWAP is I/N.
    #[test]
    fn side_map_of_swap_is_scaled_identity() {
        let n = 3usize;
        let base = RegisterSpace::new(vec![("Y", n), ("Z", n)]).unwrap();
        let swap = crate::qlinalg::swap_map(("Y", n), ("Z", n)).unwrap();
        // oracle: direct index summation of <a,i|SWAP|a,j>
        let mut oracle = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Cx::new(0.0, 0.0);
                for a in 0..n {
                    s += swap.matrix[(a * n + i, a * n + j)];
                }
                oracle[(i, j)] = s;
            }
        }
        assert!(max_abs_entry(&(oracle.clone() - CMatrix::identity(n, n))) < 1e-12);
        let v = LinearMap::new(base.clone(), base.clone(), swap.matrix.clone()).unwrap();
        let g = oblivious_side_map(&v, &["Y"]).unwrap();
        assert!(max_abs_entry(&(g - oracle / Cx::new(n as f64, 0.0))) < 1e-12);
    }

    /// The entangled-ancilla construction realizes exactly the direct side
    /// map on random inputs.
    #[test]
    fn constructive_side_map_matches_direct_multiplication() {
        let y = RegisterSpace::new(vec![("M", 2), ("T", 2)]).unwrap();
        let z = RegisterSpace::single("Z", 2);
        let base = y.tensor(&z).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let u = crate::qlinalg::haar_random_unitary(8, &mut rng).unwrap();
        let v = LinearMap::endo(base.clone(), u).unwrap();
        let gamma = oblivious_side_map(&v, &["M", "T"]).unwrap();
        let constructive = gamma_constructive_attack(&v, &["M", "T"]).unwrap();
        for trial in 0..3 {
            let rnd = crate::qlinalg::haar_random_unitary(8, &mut rng).unwrap();
            let st = QuantumState::pure(base.clone(), rnd.column(0).into_owned()).unwrap();
            let direct = st
                .apply(&LinearMap::endo(z.clone(), gamma.clone()).unwrap(), &["Z"])
                .unwrap();
            let built = constructive.apply(&st).unwrap();
            let diff = max_abs_entry(
                &(direct.density_matrix()
                    - built.aligned_with(&direct).unwrap().density_matrix()),
            );
            assert!(diff < 1e-9, "trial {trial}: diff = {diff}");
        }
    }

    /// With the identity witness the key-leaked side map is the identity, so
    /// the ideal output is the input state itself.
    #[test]
    fn keyleak_identity_witness_reproduces_input() {
        let y2 = RegisterSpace::new(vec![("X", 4), ("S", 2)]).unwrap();
        let z = RegisterSpace::single("Z", 2);
        let witness = IdealBasisRespecting {
            name: "id-witness".into(),
            y_space: y2,
            basis: None,
            side_space: z.clone(),
            ancillas: vec![],
            blocks: vec![CMatrix::identity(2, 2); 8],
            projector: None,
            trace_out: vec![],
        };
        let ideal = construct_ideal_keyleak_qft(&witness, 2, &[0, 1, 1, 0]).unwrap();
        let st = plus_state("M", 2)
            .tensor(&QuantumState::basis(z, &[1]))
            .unwrap();
        let out = ideal.apply(&st).unwrap();
        assert!(max_abs_entry(&(out.density_matrix() - st.density_matrix())) < 1e-12);
    }
}
