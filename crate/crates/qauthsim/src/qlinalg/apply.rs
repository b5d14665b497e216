//! Dense tensor-contraction kernels used by every register-aware operation.
//!
//! States are flat vectors (or matrices) over a mixed-radix index; applying a
//! map to a subset of registers permutes the target axes to the front, hits
//! the leading block with the map's matrix, and permutes back into the spliced
//! register layout. No full-space operator is ever materialized.

use super::{CMatrix, CVector, Cx};

/// Reorders tensor axes of a flat vector. `perm[i]` is the old axis that ends
/// up at new position `i`.
pub fn permute_axes(v: &CVector, dims: &[usize], perm: &[usize]) -> CVector {
    debug_assert_eq!(dims.len(), perm.len());
    let n = dims.len();
    if n <= 1 || perm.iter().enumerate().all(|(i, &p)| i == p) {
        return v.clone();
    }
    // strides of old layout
    let mut old_strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        old_strides[i] = old_strides[i + 1] * dims[i + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let mut out = CVector::zeros(total);
    let mut idx = vec![0usize; n];
    let mut old_flat = 0usize;
    for new_flat in 0..total {
        out[new_flat] = v[old_flat];
        // increment mixed-radix counter over new axes, tracking old_flat
        for ax in (0..n).rev() {
            idx[ax] += 1;
            old_flat += old_strides[perm[ax]];
            if idx[ax] < new_dims[ax] {
                break;
            }
            old_flat -= idx[ax] * old_strides[perm[ax]];
            idx[ax] = 0;
        }
    }
    out
}

/// Applies `m` (out_block × in_block) to the leading axes of `v`, where `v`
/// has length in_block × rest.
pub fn apply_leading_block(m: &CMatrix, v: &CVector, rest: usize) -> CVector {
    let in_block = m.ncols();
    let out_block = m.nrows();
    debug_assert_eq!(v.len(), in_block * rest);
    let mut out = CVector::zeros(out_block * rest);
    // out[(a, r)] = sum_b m[a,b] v[(b, r)]
    for a in 0..out_block {
        for b in 0..in_block {
            let coef = m[(a, b)];
            if coef == Cx::new(0.0, 0.0) {
                continue;
            }
            let src = b * rest;
            let dst = a * rest;
            for r in 0..rest {
                out[dst + r] += coef * v[src + r];
            }
        }
    }
    out
}

/// Plan for applying a map to `targets` inside a larger register list.
pub struct ApplyPlan {
    /// permutation bringing targets to the front
    pub to_front: Vec<usize>,
    /// permutation from [outs..., rest...] to the spliced final layout
    pub from_blocks: Vec<usize>,
    pub in_block: usize,
    pub rest: usize,
}

/// `target_positions` index into `dims`; `out_dims` are the dims of the map's
/// output registers. The outputs are spliced where the first target was.
pub fn plan_apply(dims: &[usize], target_positions: &[usize], out_dims: &[usize]) -> ApplyPlan {
    let n = dims.len();
    let rest_positions: Vec<usize> =
        (0..n).filter(|p| !target_positions.contains(p)).collect();
    let mut to_front = target_positions.to_vec();
    to_front.extend(rest_positions.iter().copied());

    // Final layout: original order with outputs spliced at the first target.
    let first = *target_positions.iter().min().unwrap_or(&0);
    // intermediate axes: 0..out_dims.len() are outputs, then rest in order
    let mut final_axes: Vec<usize> = Vec::with_capacity(out_dims.len() + rest_positions.len());
    let mut placed_outs = false;
    for p in 0..n {
        if target_positions.contains(&p) {
            if p == first {
                final_axes.extend(0..out_dims.len());
                placed_outs = true;
            }
        } else {
            let ri = rest_positions.iter().position(|&q| q == p).unwrap();
            final_axes.push(out_dims.len() + ri);
        }
    }
    if !placed_outs {
        final_axes.extend(0..out_dims.len());
    }
    let in_block: usize = target_positions.iter().map(|&p| dims[p]).product();
    let rest: usize = rest_positions.iter().map(|&p| dims[p]).product();
    ApplyPlan { to_front, from_blocks: final_axes, in_block, rest }
}

/// Full pure-state application. Returns the new flat vector in the spliced
/// register layout.
pub fn apply_pure(
    m: &CMatrix,
    v: &CVector,
    dims: &[usize],
    target_positions: &[usize],
    out_dims: &[usize],
) -> CVector {
    let plan = plan_apply(dims, target_positions, out_dims);
    debug_assert_eq!(plan.in_block, m.ncols());
    debug_assert_eq!(out_dims.iter().product::<usize>(), m.nrows());
    let fronted = permute_axes(v, dims, &plan.to_front);
    let hit = apply_leading_block(m, &fronted, plan.rest);
    let mut block_dims: Vec<usize> = out_dims.to_vec();
    for (i, &p) in plan.to_front.iter().enumerate() {
        if i >= target_positions.len() {
            block_dims.push(dims[p]);
        }
    }
    permute_axes(&hit, &block_dims, &plan.from_blocks)
}

/// Permutation (with optional phases) of the joint target index: O(D), no
/// matrix is built. `perm[t]` is where old block index `t` is sent.
pub fn apply_perm_pure(
    perm: &[usize],
    phases: Option<&[Cx]>,
    v: &CVector,
    dims: &[usize],
    target_positions: &[usize],
) -> CVector {
    let t_dims: Vec<usize> = target_positions.iter().map(|&p| dims[p]).collect();
    let plan = plan_apply(dims, target_positions, &t_dims);
    let fronted = permute_axes(v, dims, &plan.to_front);
    let rest = plan.rest;
    let mut out = CVector::zeros(fronted.len());
    for t in 0..plan.in_block {
        let ph = phases.map(|p| p[t]).unwrap_or(Cx::new(1.0, 0.0));
        let src = t * rest;
        let dst = perm[t] * rest;
        for r in 0..rest {
            out[dst + r] = ph * fronted[src + r];
        }
    }
    let mut block_dims = t_dims;
    for (i, &p) in plan.to_front.iter().enumerate() {
        if i >= target_positions.len() {
            block_dims.push(dims[p]);
        }
    }
    permute_axes(&out, &block_dims, &plan.from_blocks)
}

/// Block-diagonal application sum_y |y><y| (x) B_y over a control block and a
/// side block, identity on the rest. All blocks must be square and equal in
/// size; register layout is unchanged.
pub fn apply_block_diag_pure(
    blocks: &[CMatrix],
    v: &CVector,
    dims: &[usize],
    control_positions: &[usize],
    side_positions: &[usize],
) -> CVector {
    let n = dims.len();
    let mut to_front: Vec<usize> = control_positions.to_vec();
    to_front.extend(side_positions.iter().copied());
    for p in 0..n {
        if !to_front.contains(&p) {
            to_front.push(p);
        }
    }
    let fronted = permute_axes(v, dims, &to_front);
    let d_ctrl: usize = control_positions.iter().map(|&p| dims[p]).product();
    let d_side: usize = side_positions.iter().map(|&p| dims[p]).product();
    let rest = v.len() / (d_ctrl * d_side);
    debug_assert_eq!(blocks.len(), d_ctrl);
    let mut hit = CVector::zeros(v.len());
    for y in 0..d_ctrl {
        let slice = fronted.rows(y * d_side * rest, d_side * rest).into_owned();
        let res = apply_leading_block(&blocks[y], &slice, rest);
        hit.rows_mut(y * d_side * rest, d_side * rest).copy_from(&res);
    }
    // invert the axis permutation
    let mut inverse = vec![0usize; n];
    for (newpos, &old) in to_front.iter().enumerate() {
        inverse[old] = newpos;
    }
    let fronted_dims: Vec<usize> = to_front.iter().map(|&p| dims[p]).collect();
    permute_axes(&hit, &fronted_dims, &inverse)
}

/// Density-matrix application: rho' = E rho E^dagger with E the embedded map.
pub fn apply_density(
    m: &CMatrix,
    rho: &CMatrix,
    dims: &[usize],
    target_positions: &[usize],
    out_dims: &[usize],
) -> CMatrix {
    let apply_cols = |mat: &CMatrix| -> CMatrix {
        let cols: Vec<CVector> = mat
            .column_iter()
            .map(|c| apply_pure(m, &c.into_owned(), dims, target_positions, out_dims))
            .collect();
        CMatrix::from_columns(&cols)
    };
    let r1 = apply_cols(rho); // E rho
    let r2 = apply_cols(&r1.adjoint()); // E rho^H E^H ... careful: E (E rho)^H = E rho^H E^H
    r2.adjoint() // (E rho^H E^H)^H = E rho E^H
}
