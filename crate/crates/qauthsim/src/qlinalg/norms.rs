use super::{CMatrix, QuantumState};
use crate::error::Result;

/// Largest entry magnitude; entrywise infinity norm.
pub fn max_abs_entry(x: &CMatrix) -> f64 {
    x.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Sum of singular values, Tr sqrt(X^dagger X).
pub fn trace_norm(x: &CMatrix) -> f64 {
    let svd = x.clone().svd(false, false);
    svd.singular_values.iter().sum()
}

/// Largest singular value.
pub fn operator_norm(x: &CMatrix) -> f64 {
    let svd = x.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Root-sum-square of entries.
pub fn frobenius_norm(x: &CMatrix) -> f64 {
    x.norm()
}

/// Eigenvalues of a (numerically) Hermitian matrix, descending.
pub fn hermitian_eigenvalues(x: &CMatrix) -> Vec<f64> {
    let h = (x + x.adjoint()) * super::Cx::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut v: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Trace distance between two states on the same registers (the second is
/// reordered to match the first if needed).
pub fn trace_distance(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    let b = if a.space == b.space { b.clone() } else { b.aligned_with(a)? };
    let d = a.density_matrix() - b.density_matrix();
    Ok(trace_norm(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{gates, CVector, Cx, QuantumState, RegisterSpace};

    #[test]
    fn orthogonal_pure_states_have_distance_two() {
        let sp = RegisterSpace::single("M", 2);
        let a = QuantumState::basis(sp.clone(), &[0]);
        let b = QuantumState::basis(sp, &[1]);
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_trace_density_has_trace_norm_one() {
        let bell = gates::maximally_entangled(2, ("A", "B")).unwrap();
        let rho = bell.partial_trace(&["B"]).unwrap();
        assert!((trace_norm(&rho.density_matrix()) - 1.0).abs() < 1e-12);
    }

    /// Oracle: eigen-decomposition of |+><+| - |0><0| gives eigenvalues
    /// +-1/sqrt(2), so the trace norm is sqrt(2).
    #[test]
    fn plus_vs_zero_distance_is_sqrt_two() {
        let sp = RegisterSpace::single("M", 2);
        let plus = gates::plus_state("M", 2);
        let zero = QuantumState::basis(sp, &[0]);
        let diff = plus.density_matrix() - zero.density_matrix();
        let eigs = hermitian_eigenvalues(&diff);
        let oracle: f64 = eigs.iter().map(|e| e.abs()).sum();
        assert!((oracle - 2f64.sqrt()).abs() < 1e-12);
        assert!((trace_distance(&plus, &zero).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn operator_and_frobenius_norms() {
        let d = 5;
        let id = CMatrix::identity(d, d);
        assert!((operator_norm(&id) - 1.0).abs() < 1e-12);
        assert!((frobenius_norm(&id) - (d as f64).sqrt()).abs() < 1e-12);
        let m = CMatrix::from_row_slice(2, 2, &[
            Cx::new(3.0, 0.0), Cx::new(0.0, 0.0),
            Cx::new(0.0, 0.0), Cx::new(-4.0, 0.0),
        ]);
        assert!((operator_norm(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn frobenius_matches_entry_sum_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let m = CMatrix::from_fn(4, 4, |_, _| Cx::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let sum: f64 = m.iter().map(|c| c.norm_sqr()).sum();
        assert!((frobenius_norm(&m).powi(2) - sum).abs() < 1e-12);
        let _ = CVector::zeros(1);
    }
}
