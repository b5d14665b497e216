use crate::qlinalg::norms::max_abs_entry;
use super::{CMatrix, CVector, Cx, RegisterSpace};
use crate::error::{Error, Result};
use serde_json::json;

pub const EXACT_TOL: f64 = 1e-9;

/// A dense linear map between two register spaces.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub input: RegisterSpace,
    pub output: RegisterSpace,
    pub matrix: CMatrix,
}

impl LinearMap {
    pub fn new(input: RegisterSpace, output: RegisterSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.ncols() != input.total_dim() || matrix.nrows() != output.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, spaces are {} -> {}",
                matrix.nrows(),
                matrix.ncols(),
                input.total_dim(),
                output.total_dim()
            )));
        }
        Ok(LinearMap { input, output, matrix })
    }

    /// Endomorphism on a space (input = output registers).
    pub fn endo(space: RegisterSpace, matrix: CMatrix) -> Result<Self> {
        LinearMap::new(space.clone(), space, matrix)
    }

    pub fn identity(space: RegisterSpace) -> Self {
        let d = space.total_dim();
        LinearMap { input: space.clone(), output: space, matrix: CMatrix::identity(d, d) }
    }

    pub fn adjoint(&self) -> LinearMap {
        LinearMap {
            input: self.output.clone(),
            output: self.input.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// self ∘ other (apply `other` first). Register labels must agree.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if other.output.dims() != self.input.dims() {
            return Err(Error::DimensionMismatch(format!(
                "compose: {:?} vs {:?}",
                other.output.dims(),
                self.input.dims()
            )));
        }
        Ok(LinearMap {
            input: other.input.clone(),
            output: self.output.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn tensor(&self, other: &LinearMap) -> Result<LinearMap> {
        Ok(LinearMap {
            input: self.input.tensor(&other.input)?,
            output: self.output.tensor(&other.output)?,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn is_isometry(&self, tol: f64) -> bool {
        let d = self.input.total_dim();
        max_abs_entry(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(d, d))) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.matrix.is_square() && self.is_isometry(tol)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        if !self.matrix.is_square() {
            return false;
        }
        let p = &self.matrix;
        max_abs_entry(&((p * p) - p)) <= tol && max_abs_entry(&(p.adjoint() - p)) <= tol
    }

    /// Nested-array dump with separate real and imaginary parts.
    pub fn to_json(&self) -> serde_json::Value {
        let re: Vec<Vec<f64>> = (0..self.matrix.nrows())
            .map(|i| (0..self.matrix.ncols()).map(|j| self.matrix[(i, j)].re).collect())
            .collect();
        let im: Vec<Vec<f64>> = (0..self.matrix.nrows())
            .map(|i| (0..self.matrix.ncols()).map(|j| self.matrix[(i, j)].im).collect())
            .collect();
        json!({
            "input": self.input.labels(),
            "output": self.output.labels(),
            "re": re,
            "im": im,
        })
    }
}

/// Column vector |index> on a space.
pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = Cx::new(1.0, 0.0);
    v
}

/// Projector |v><v| / <v|v> is NOT normalized here; callers pass unit vectors.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary_projector() {
        let sp = RegisterSpace::single("M", 3);
        let id = LinearMap::identity(sp);
        assert!(id.is_unitary(1e-12));
        assert!(id.is_projector(1e-12));
    }

    #[test]
    fn tensor_of_maps_is_kron() {
        let x = LinearMap::endo(
            RegisterSpace::single("A", 2),
            CMatrix::from_row_slice(2, 2, &[
                Cx::new(0.0, 0.0), Cx::new(1.0, 0.0),
                Cx::new(1.0, 0.0), Cx::new(0.0, 0.0),
            ]),
        )
        .unwrap();
        let id = LinearMap::identity(RegisterSpace::single("B", 2));
        let t = id.tensor(&x).unwrap();
        // I (x) X maps |00> -> |01>
        let v = basis_vector(4, 0);
        let w = &t.matrix * v;
        assert_eq!(w[1], Cx::new(1.0, 0.0));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let sp = RegisterSpace::single("M", 3);
        assert!(LinearMap::endo(sp, CMatrix::identity(2, 2)).is_err());
    }
}
