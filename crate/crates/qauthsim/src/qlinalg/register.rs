use crate::error::{Error, Result};

/// One named tensor factor of a Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub label: String,
    pub dim: usize,
}

/// An ordered list of named tensor factors.
///
/// The flat index of a basis vector is mixed-radix with register 0 most
/// significant, matching the ordinary Kronecker-product convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterSpace {
    regs: Vec<Register>,
}

impl RegisterSpace {
    pub fn new<S: Into<String>>(regs: Vec<(S, usize)>) -> Result<Self> {
        let regs: Vec<Register> = regs
            .into_iter()
            .map(|(label, dim)| Register { label: label.into(), dim })
            .collect();
        for r in &regs {
            if r.dim == 0 {
                return Err(Error::InvalidArgument(format!(
                    "register {} has dimension 0",
                    r.label
                )));
            }
        }
        for (i, r) in regs.iter().enumerate() {
            if regs[i + 1..].iter().any(|s| s.label == r.label) {
                return Err(Error::LabelCollision(r.label.clone()));
            }
        }
        Ok(RegisterSpace { regs })
    }

    /// Space with no registers; total dimension 1 (a scalar slot).
    pub fn empty() -> Self {
        RegisterSpace { regs: vec![] }
    }

    /// Single register shorthand.
    pub fn single(label: &str, dim: usize) -> Self {
        RegisterSpace::new(vec![(label, dim)]).expect("single register")
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    pub fn len(&self) -> usize {
        self.regs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regs.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.regs.iter().map(|r| r.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.regs.iter().map(|r| r.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.regs.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.regs
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.regs.iter().any(|r| r.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.regs[self.position(label)?].dim)
    }

    /// Concatenation; labels must stay unique.
    pub fn tensor(&self, other: &RegisterSpace) -> Result<RegisterSpace> {
        for r in &other.regs {
            if self.contains(&r.label) {
                return Err(Error::LabelCollision(r.label.clone()));
            }
        }
        let mut regs = self.regs.clone();
        regs.extend(other.regs.iter().cloned());
        Ok(RegisterSpace { regs })
    }

    /// Sub-space consisting of the named registers, in the order given.
    pub fn subspace(&self, labels: &[&str]) -> Result<RegisterSpace> {
        let mut regs = Vec::with_capacity(labels.len());
        for l in labels {
            regs.push(self.regs[self.position(l)?].clone());
        }
        RegisterSpace::new(regs.into_iter().map(|r| (r.label, r.dim)).collect())
    }

    /// Everything except the named registers, original order preserved.
    pub fn without(&self, labels: &[&str]) -> Result<RegisterSpace> {
        for l in labels {
            self.position(l)?;
        }
        Ok(RegisterSpace {
            regs: self
                .regs
                .iter()
                .filter(|r| !labels.contains(&r.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Flat index of a joint basis state given one index per register.
    pub fn pack(&self, indices: &[usize]) -> usize {
        assert_eq!(indices.len(), self.regs.len());
        let mut idx = 0;
        for (i, r) in self.regs.iter().enumerate() {
            debug_assert!(indices[i] < r.dim);
            idx = idx * r.dim + indices[i];
        }
        idx
    }

    /// Inverse of `pack`.
    pub fn unpack(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.regs.len()];
        for (i, r) in self.regs.iter().enumerate().rev() {
            out[i] = flat % r.dim;
            flat /= r.dim;
        }
        out
    }

    /// Renames a register, keeping its position and dimension.
    pub fn renamed(&self, from: &str, to: &str) -> Result<RegisterSpace> {
        let pos = self.position(from)?;
        if from != to && self.contains(to) {
            return Err(Error::LabelCollision(to.to_string()));
        }
        let mut regs = self.regs.clone();
        regs[pos].label = to.to_string();
        Ok(RegisterSpace { regs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_unpack_roundtrip() {
        let sp = RegisterSpace::new(vec![("M", 2), ("T", 3), ("Z", 4)]).unwrap();
        assert_eq!(sp.total_dim(), 24);
        for flat in 0..24 {
            assert_eq!(sp.pack(&sp.unpack(flat)), flat);
        }
        assert_eq!(sp.pack(&[1, 2, 3]), 23);
    }

    #[test]
    fn label_collision_rejected() {
        assert!(RegisterSpace::new(vec![("M", 2), ("M", 2)]).is_err());
        let a = RegisterSpace::single("M", 2);
        assert!(a.tensor(&RegisterSpace::single("M", 3)).is_err());
    }

    #[test]
    fn zero_dim_rejected() {
        assert!(RegisterSpace::new(vec![("M", 0)]).is_err());
    }

    #[test]
    fn subspace_and_without() {
        let sp = RegisterSpace::new(vec![("M", 2), ("T", 3), ("Z", 4)]).unwrap();
        let sub = sp.subspace(&["Z", "M"]).unwrap();
        assert_eq!(sub.labels(), vec!["Z", "M"]);
        let rest = sp.without(&["T"]).unwrap();
        assert_eq!(rest.labels(), vec!["M", "Z"]);
        assert!(sp.subspace(&["Q"]).is_err());
    }
}
