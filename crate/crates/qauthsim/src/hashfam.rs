//! 3-universal (and pairwise) hash families over GF(2^w) bitstring domains.
//!
//! The family is the minimal standard one: degree-<=2 polynomials
//! h_{a,b,c}(m) = a m^2 + b m + c evaluated in GF(2^w), with the tag
//! optionally truncated to its low-order bits. Reduction polynomials are
//! fixed per width for bit-exact reproducibility.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Published irreducible reduction polynomial for each supported width,
/// including the x^w term, as a bitmask.
pub fn default_reduction_poly(w: u32) -> Result<u64> {
    let p = match w {
        1 => 0b10,                // x ("+ 0"): GF(2) needs no reduction; kept for uniformity
        2 => 0b111,               // x^2 + x + 1
        3 => 0b1011,              // x^3 + x + 1
        4 => 0b10011,             // x^4 + x + 1
        5 => 0b100101,            // x^5 + x^2 + 1
        6 => 0b1000011,           // x^6 + x + 1
        7 => 0b10000011,          // x^7 + x + 1
        8 => 0b100011011,         // x^8 + x^4 + x^3 + x + 1
        _ => return Err(Error::InvalidArgument(format!("unsupported field width {w}"))),
    };
    Ok(p)
}

/// Binary extension field GF(2^w) with carryless arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GF2wField {
    pub w: u32,
    /// degree-w reduction polynomial bitmask, including the x^w term
    pub reduction_poly: u64,
}

impl GF2wField {
    pub fn new(w: u32) -> Result<Self> {
        Ok(GF2wField { w, reduction_poly: default_reduction_poly(w)? })
    }

    /// Field with a caller-supplied reduction polynomial. Irreducibility is
    /// not checked here; `verify_inverses` exposes the failure.
    pub fn with_poly(w: u32, reduction_poly: u64) -> Result<Self> {
        if w == 0 || w > 16 {
            return Err(Error::InvalidArgument(format!("unsupported field width {w}")));
        }
        if reduction_poly >> w != 1 {
            return Err(Error::InvalidArgument("reduction polynomial must have degree w".into()));
        }
        Ok(GF2wField { w, reduction_poly })
    }

    pub fn order(&self) -> u64 {
        1u64 << self.w
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        x ^ y
    }

    /// Carryless multiply with modular reduction.
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        debug_assert!(x < self.order() && y < self.order());
        let mut acc: u64 = 0;
        let mut a = x;
        let mut b = y;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.w == 1 {
                a ^= self.reduction_poly;
            }
        }
        acc
    }

    pub fn pow(&self, mut x: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via x^(2^w - 2); 0 has none.
    pub fn inv(&self, x: u64) -> Result<u64> {
        if x == 0 {
            return Err(Error::InvalidArgument("0 has no inverse".into()));
        }
        Ok(self.pow(x, self.order() - 2))
    }

    /// Exhaustively checks that every nonzero element has an inverse. Fails
    /// for non-irreducible reduction polynomials.
    pub fn verify_inverses(&self) -> Result<()> {
        for x in 1..self.order() {
            let inv = self.pow(x, self.order() - 2);
            if self.mul(x, inv) != 1 {
                return Err(Error::InvalidArgument(format!(
                    "element {x:#x} has no inverse under poly {:#x}",
                    self.reduction_poly
                )));
            }
        }
        Ok(())
    }
}

/// Hash family degree: full 3-wise uniform quadratics, or the pairwise-only
/// linear family kept around for experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashDegree {
    Quadratic,
    Linear,
}

/// The keyed polynomial hash family over one field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyHashFamily {
    pub field: GF2wField,
    pub degree: HashDegree,
    /// low-order bits kept of the evaluated tag
    pub tag_bits: u32,
}

/// Key (a, b, c) for h(m) = a m^2 + b m + c; `a` is forced to 0 for the
/// linear family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyHashKey {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl PolyHashFamily {
    pub fn new(field: GF2wField, tag_bits: u32) -> Result<Self> {
        if tag_bits == 0 || tag_bits > field.w {
            return Err(Error::InvalidArgument(format!(
                "tag width {tag_bits} outside 1..={}",
                field.w
            )));
        }
        Ok(PolyHashFamily { field, degree: HashDegree::Quadratic, tag_bits })
    }

    pub fn linear(field: GF2wField, tag_bits: u32) -> Result<Self> {
        let mut f = Self::new(field, tag_bits)?;
        f.degree = HashDegree::Linear;
        Ok(f)
    }

    pub fn key_count(&self) -> u64 {
        match self.degree {
            HashDegree::Quadratic => 1u64 << (3 * self.field.w),
            HashDegree::Linear => 1u64 << (2 * self.field.w),
        }
    }

    /// Key from a dense index, big-endian coefficient order a||b||c.
    pub fn key_from_index(&self, index: u64) -> PolyHashKey {
        debug_assert!(index < self.key_count());
        let mask = self.field.order() - 1;
        let w = self.field.w;
        match self.degree {
            HashDegree::Quadratic => PolyHashKey {
                a: (index >> (2 * w)) & mask,
                b: (index >> w) & mask,
                c: index & mask,
            },
            HashDegree::Linear => {
                PolyHashKey { a: 0, b: (index >> w) & mask, c: index & mask }
            }
        }
    }

    pub fn key_index(&self, key: &PolyHashKey) -> u64 {
        let w = self.field.w;
        match self.degree {
            HashDegree::Quadratic => (key.a << (2 * w)) | (key.b << w) | key.c,
            HashDegree::Linear => (key.b << w) | key.c,
        }
    }

    pub fn enumerate_keys(&self) -> impl Iterator<Item = PolyHashKey> + '_ {
        (0..self.key_count()).map(move |i| self.key_from_index(i))
    }

    pub fn sample_key<R: Rng + ?Sized>(&self, rng: &mut R) -> PolyHashKey {
        self.key_from_index(rng.gen_range(0..self.key_count()))
    }

    /// a m^2 + b m + c in GF(2^w), truncated to the tag width.
    pub fn hash_eval(&self, key: &PolyHashKey, m: u64) -> Result<u64> {
        let f = &self.field;
        if m >= f.order() {
            return Err(Error::InvalidArgument(format!(
                "message {m} wider than {} bits",
                f.w
            )));
        }
        let m2 = f.mul(m, m);
        let v = f.add(f.add(f.mul(key.a, m2), f.mul(key.b, m)), key.c);
        Ok(v & ((1u64 << self.tag_bits) - 1))
    }

    pub fn tag_space(&self) -> u64 {
        1u64 << self.tag_bits
    }
}

/// Outcome of exhaustive t-wise uniformity verification.
#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub uniform: bool,
    pub expected_count: u64,
    pub min_count: u64,
    pub max_count: u64,
    pub tuple_cells: usize,
}

/// Exhaustively checks that the tag tuple at `points` is uniform over keys.
pub fn verify_t_wise_uniform(
    family: &PolyHashFamily,
    t: usize,
    points: &[u64],
) -> Result<UniformityReport> {
    if t > 3 {
        return Err(Error::InvalidArgument("t-wise verification supports t <= 3".into()));
    }
    if points.len() != t {
        return Err(Error::InvalidArgument(format!("need exactly {t} points")));
    }
    for (i, p) in points.iter().enumerate() {
        if points[i + 1..].contains(p) {
            return Err(Error::InvalidArgument("points must be distinct".into()));
        }
    }
    let tspace = family.tag_space();
    let cells = tspace.pow(t as u32);
    let mut counts = vec![0u64; cells as usize];
    for key in family.enumerate_keys() {
        let mut cell = 0u64;
        for p in points {
            cell = cell * tspace + family.hash_eval(&key, *p)?;
        }
        counts[cell as usize] += 1;
    }
    let expected = family.key_count() / cells;
    let min = *counts.iter().min().unwrap();
    let max = *counts.iter().max().unwrap();
    Ok(UniformityReport {
        uniform: min == expected && max == expected,
        expected_count: expected,
        min_count: min,
        max_count: max,
        tuple_cells: cells as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    /// Independent multiplication-table oracle for GF(4) with x^2 + x + 1.
    /// Elements: 0, 1, alpha = 0b10, alpha+1 = 0b11.
    fn gf4_mul_table(x: u64, y: u64) -> u64 {
        const TABLE: [[u64; 4]; 4] = [
            [0, 0, 0, 0],
            [0, 1, 2, 3],
            [0, 2, 3, 1], // alpha * alpha = alpha + 1, alpha * (alpha+1) = 1
            [0, 3, 1, 2],
        ];
        TABLE[x as usize][y as usize]
    }

    #[test]
    fn gf4_matches_table_oracle() {
        let f = GF2wField::new(2).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(f.mul(x, y), gf4_mul_table(x, y), "{x} * {y}");
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_w() {
        for w in 1..=4u32 {
            let f = GF2wField::new(w).unwrap();
            let n = f.order();
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    for z in 0..n {
                        assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverses_exist_up_to_w8() {
        for w in 1..=8u32 {
            GF2wField::new(w).unwrap().verify_inverses().unwrap();
        }
    }

    #[test]
    fn reducible_polynomial_fails_inverse_scan() {
        // x^2 + 1 = (x + 1)^2 over GF(2)
        let f = GF2wField::with_poly(2, 0b101).unwrap();
        assert!(f.verify_inverses().is_err());
    }

    #[test]
    fn hash_eval_special_keys() {
        let f = GF2wField::new(2).unwrap();
        let fam = PolyHashFamily::new(f, 2).unwrap();
        // a=b=0: constant c
        for m in 0..4 {
            assert_eq!(fam.hash_eval(&PolyHashKey { a: 0, b: 0, c: 3 }, m).unwrap(), 3);
        }
        // key (1,0,0): m -> m^2; alpha^2 = alpha + 1 per the table oracle
        let alpha = 0b10;
        assert_eq!(
            fam.hash_eval(&PolyHashKey { a: 1, b: 0, c: 0 }, alpha).unwrap(),
            gf4_mul_table(alpha, alpha)
        );
        assert_eq!(fam.hash_eval(&PolyHashKey { a: 1, b: 0, c: 0 }, alpha).unwrap(), 0b11);
        // key (0,1,0): identity
        for m in 0..4 {
            assert_eq!(fam.hash_eval(&PolyHashKey { a: 0, b: 1, c: 0 }, m).unwrap(), m);
        }
        // overwide message
        assert!(fam.hash_eval(&PolyHashKey { a: 0, b: 1, c: 0 }, 4).is_err());
    }

    #[test]
    fn key_enumeration_counts() {
        let f1 = PolyHashFamily::new(GF2wField::new(1).unwrap(), 1).unwrap();
        assert_eq!(f1.key_count(), 8);
        assert_eq!(f1.enumerate_keys().count(), 8);
        let f2 = PolyHashFamily::new(GF2wField::new(2).unwrap(), 2).unwrap();
        assert_eq!(f2.key_count(), 64);
        // round trip
        for i in 0..64 {
            assert_eq!(f2.key_index(&f2.key_from_index(i)), i);
        }
    }

    #[test]
    fn three_wise_uniform_at_w2() {
        let fam = PolyHashFamily::new(GF2wField::new(2).unwrap(), 2).unwrap();
        let rep = verify_t_wise_uniform(&fam, 3, &[0, 1, 0b10]).unwrap();
        assert!(rep.uniform);
        assert_eq!(rep.expected_count, 1); // 64 keys / 4^3 cells
    }

    #[test]
    fn one_wise_uniform_single_point() {
        let fam = PolyHashFamily::new(GF2wField::new(2).unwrap(), 2).unwrap();
        let rep = verify_t_wise_uniform(&fam, 1, &[3]).unwrap();
        assert!(rep.uniform);
        assert_eq!(rep.expected_count, 16); // 2^{3w}/2^w
    }

    #[test]
    fn linear_family_fails_three_wise() {
        let fam = PolyHashFamily::linear(GF2wField::new(2).unwrap(), 2).unwrap();
        let rep = verify_t_wise_uniform(&fam, 3, &[0, 1, 0b10]).unwrap();
        assert!(!rep.uniform);
        // but it is pairwise uniform
        let rep2 = verify_t_wise_uniform(&fam, 2, &[0, 1]).unwrap();
        assert!(rep2.uniform);
    }

    #[test]
    fn distinct_points_required() {
        let fam = PolyHashFamily::new(GF2wField::new(2).unwrap(), 2).unwrap();
        assert!(verify_t_wise_uniform(&fam, 3, &[0, 1, 1]).is_err());
    }

    #[test]
    fn sampled_keys_are_uniform_chi_square() {
        let fam = PolyHashFamily::new(GF2wField::new(2).unwrap(), 2).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        let n = 100_000usize;
        let k = fam.key_count() as usize;
        let mut counts = vec![0u64; k];
        for _ in 0..n {
            counts[fam.key_index(&fam.sample_key(&mut rng)) as usize] += 1;
        }
        let expect = n as f64 / k as f64;
        let chi2: f64 =
            counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        // dof = 63; mean 63, sd sqrt(126) ~ 11.2; 3 sigma band
        assert!(chi2 < 63.0 + 3.0 * (2.0 * 63.0f64).sqrt(), "chi2 = {chi2}");
    }
}
