//! Small named gates and operator constructors.

use super::linmap::LinearMap;
use super::{CMatrix, CVector, Cx, RegisterSpace};
use crate::error::{Error, Result};

fn c(re: f64) -> Cx {
    Cx::new(re, 0.0)
}

pub fn pauli_x_map(label: &str) -> LinearMap {
    let sp = RegisterSpace::single(label, 2);
    LinearMap::endo(sp, CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).unwrap()
}

pub fn pauli_z_map(label: &str) -> LinearMap {
    let sp = RegisterSpace::single(label, 2);
    LinearMap::endo(sp, CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])).unwrap()
}

pub fn hadamard_map(label: &str) -> LinearMap {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sp = RegisterSpace::single(label, 2);
    LinearMap::endo(sp, CMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])).unwrap()
}

/// Hadamard on every qubit of a 2^n-dimensional register.
pub fn hadamard_all(space: RegisterSpace) -> Result<LinearMap> {
    let d = space.total_dim();
    if !d.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {d} is not a power of two")));
    }
    let n = d.trailing_zeros() as usize;
    let scale = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |x, y| {
        let dot = (x & y).count_ones() as u32;
        c(if dot % 2 == 0 { scale } else { -scale })
    });
    let _ = n;
    LinearMap::endo(space, m)
}

/// The operator X^p Z^q on an n-qubit register: |x> -> (-1)^(q.x) |x xor p>.
pub fn pauli_operator(space: RegisterSpace, p: u64, q: u64) -> Result<LinearMap> {
    let d = space.total_dim();
    if !d.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {d} is not a power of two")));
    }
    let n = d.trailing_zeros() as u64;
    if (n < 64 && (p >> n != 0 || q >> n != 0)) || space.total_dim() == 0 {
        return Err(Error::InvalidArgument(format!(
            "pauli bitstrings p={p:#b} q={q:#b} do not fit {n} qubits"
        )));
    }
    let mut m = CMatrix::zeros(d, d);
    for x in 0..d as u64 {
        let phase = if ((q & x).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        m[((x ^ p) as usize, x as usize)] = c(phase);
    }
    LinearMap::endo(space, m)
}

/// (1/sqrt(dim)) sum_y |yy> on two fresh registers.
pub fn maximally_entangled(dim: usize, labels: (&str, &str)) -> Result<super::QuantumState> {
    let space = RegisterSpace::new(vec![(labels.0, dim), (labels.1, dim)])?;
    let amp = c(1.0 / (dim as f64).sqrt());
    let mut v = CVector::zeros(dim * dim);
    for y in 0..dim {
        v[y * dim + y] = amp;
    }
    super::QuantumState::pure(space, v)
}

/// Uniform superposition over one register.
pub fn plus_state(label: &str, dim: usize) -> super::QuantumState {
    let space = RegisterSpace::single(label, dim);
    let amp = c(1.0 / (dim as f64).sqrt());
    let v = CVector::from_element(dim, amp);
    super::QuantumState::pure(space, v).expect("dims agree")
}

/// Permutation unitary on a space: |x> -> phases[x] |perm[x]>.
pub fn permutation_map(
    space: RegisterSpace,
    perm: &[usize],
    phases: Option<&[Cx]>,
) -> Result<LinearMap> {
    let d = space.total_dim();
    if perm.len() != d {
        return Err(Error::DimensionMismatch("permutation length".into()));
    }
    let mut seen = vec![false; d];
    let mut m = CMatrix::zeros(d, d);
    for x in 0..d {
        if perm[x] >= d || seen[perm[x]] {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        seen[perm[x]] = true;
        m[(perm[x], x)] = phases.map(|p| p[x]).unwrap_or(c(1.0));
    }
    LinearMap::endo(space, m)
}

/// SWAP between two equal-dimension registers.
pub fn swap_map(a: (&str, usize), b: (&str, usize)) -> Result<LinearMap> {
    if a.1 != b.1 {
        return Err(Error::DimensionMismatch("swap needs equal dimensions".into()));
    }
    let d = a.1;
    let space = RegisterSpace::new(vec![(a.0, d), (b.0, d)])?;
    let mut perm = vec![0usize; d * d];
    for x in 0..d {
        for y in 0..d {
            perm[x * d + y] = y * d + x;
        }
    }
    permutation_map(space, &perm, None)
}

/// Group-add copy: |x, c> -> |x, c + x mod d> (XOR for qubit registers).
pub fn copy_map(src: (&str, usize), dst: (&str, usize)) -> Result<LinearMap> {
    if src.1 != dst.1 {
        return Err(Error::DimensionMismatch("copy needs equal dimensions".into()));
    }
    let d = src.1;
    let space = RegisterSpace::new(vec![(src.0, d), (dst.0, d)])?;
    let mut perm = vec![0usize; d * d];
    for x in 0..d {
        for cdx in 0..d {
            let tgt = if d.is_power_of_two() { cdx ^ x } else { (cdx + x) % d };
            perm[x * d + cdx] = x * d + tgt;
        }
    }
    permutation_map(space, &perm, None)
}

#[cfg(test)]
mod tests {
    use crate::qlinalg::norms::max_abs_entry;
    use super::*;
    use crate::qlinalg::QuantumState;

    #[test]
    fn pauli_action_on_basis_states() {
        let sp = RegisterSpace::single("M", 2);
        // p=q=0 -> identity
        let id = pauli_operator(sp.clone(), 0, 0).unwrap();
        assert!(max_abs_entry(&(id.matrix.clone() - CMatrix::identity(2, 2))) < 1e-15);
        // X on |0> -> |1>
        let x = pauli_operator(sp.clone(), 1, 0).unwrap();
        let st = QuantumState::basis(sp.clone(), &[0]).apply(&x, &["M"]).unwrap();
        assert_eq!(st.vector().unwrap()[1], Cx::new(1.0, 0.0));
        // Z on |1> -> -|1>
        let z = pauli_operator(sp.clone(), 0, 1).unwrap();
        let st = QuantumState::basis(sp.clone(), &[1]).apply(&z, &["M"]).unwrap();
        assert_eq!(st.vector().unwrap()[1], Cx::new(-1.0, 0.0));
        // length mismatch
        assert!(pauli_operator(sp, 2, 0).is_err());
    }

    #[test]
    fn bell_state_amplitudes() {
        let bell = maximally_entangled(2, ("A", "B")).unwrap();
        let v = bell.vector().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].re - r).abs() < 1e-15);
        assert!(v[1].norm() < 1e-15);
        assert!(v[2].norm() < 1e-15);
        assert!((v[3].re - r).abs() < 1e-15);
        // overlap with itself
        assert!((v.dot(&v.map(|x| x.conj())).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_and_copy_are_unitary() {
        let s = swap_map(("A", 3), ("B", 3)).unwrap();
        assert!(s.is_unitary(1e-12));
        let cp = copy_map(("A", 4), ("C", 4)).unwrap();
        assert!(cp.is_unitary(1e-12));
        // copy on |x,0> duplicates x
        let sp = RegisterSpace::new(vec![("A", 4), ("C", 4)]).unwrap();
        let st = QuantumState::basis(sp, &[3, 0]).apply(&cp, &["A", "C"]).unwrap();
        assert_eq!(st.vector().unwrap()[3 * 4 + 3], Cx::new(1.0, 0.0));
    }

    #[test]
    fn hadamard_all_matches_single_qubit_tensor() {
        let sp = RegisterSpace::single("Y", 4);
        let h2 = hadamard_all(sp).unwrap();
        let ha = hadamard_map("a");
        let hb = hadamard_map("b");
        let t = ha.tensor(&hb).unwrap();
        assert!(max_abs_entry(&(h2.matrix - t.matrix)) < 1e-12);
    }
}
