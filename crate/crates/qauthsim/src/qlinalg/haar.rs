//! Haar-measure sampling on the unitary group and its low moments.

use super::{CMatrix, Cx};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Samples from the Haar measure on U(dim).
///
/// A complex-Gaussian (Ginibre) matrix is orthonormalized by QR; multiplying
/// by the phases of the R diagonal removes the QR gauge so the distribution
/// is exactly Haar, not merely approximately.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("haar_random_unitary: dim = 0".into()));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Cx::new(
            rng.sample::<f64, _>(StandardNormal) * scale,
            rng.sample::<f64, _>(StandardNormal) * scale,
        )
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..dim {
        let d = r[(i, i)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Cx::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, i)] *= phase;
        }
    }
    Ok(q)
}

/// Closed-form Haar average < U_ab U_ij U*_a'b' U*_i'j' > on U(d).
#[allow(clippy::too_many_arguments)]
pub fn haar_fourth_moment(
    a: usize,
    b: usize,
    i: usize,
    j: usize,
    a2: usize,
    b2: usize,
    i2: usize,
    j2: usize,
    d: usize,
) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("haar_fourth_moment is singular at d = 1".into()));
    }
    for &ix in &[a, b, i, j, a2, b2, i2, j2] {
        if ix >= d {
            return Err(Error::InvalidArgument(format!("index {ix} out of range for d = {d}")));
        }
    }
    let dl = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    let df = d as f64;
    let direct = dl(a, a2) * dl(b, b2) * dl(i, i2) * dl(j, j2)
        + dl(a, i2) * dl(b, j2) * dl(i, a2) * dl(j, b2);
    let crossed = dl(a, a2) * dl(b, j2) * dl(i, i2) * dl(j, b2)
        + dl(a, i2) * dl(b, b2) * dl(i, a2) * dl(j, j2);
    Ok(direct / (df * df - 1.0) - crossed / (df * (df * df - 1.0)))
}

/// Second Haar moment < U_ab U*_a'b' > = delta_aa' delta_bb' / d.
pub fn haar_second_moment(a: usize, b: usize, a2: usize, b2: usize, d: usize) -> f64 {
    if a == a2 && b == b2 {
        1.0 / d as f64
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use crate::qlinalg::norms::max_abs_entry;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn samples_are_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for dim in [1usize, 2, 3, 5, 8] {
            let u = haar_random_unitary(dim, &mut rng).unwrap();
            let err = max_abs_entry(&(u.adjoint() * &u - CMatrix::identity(dim, dim)));
            assert!(err < 1e-9, "dim {dim}: err {err}");
        }
        assert!(haar_random_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn fourth_moment_zero_when_no_pairing_matches() {
        // all indices distinct across pairings -> every delta pattern is 0
        let v = haar_fourth_moment(0, 1, 2, 3, 1, 2, 3, 0, 4).unwrap();
        assert_eq!(v, 0.0);
        assert!(haar_fourth_moment(0, 0, 0, 0, 0, 0, 0, 0, 1).is_err());
    }

    /// Monte-Carlo oracle for E|U_00|^4 and E|U_00|^2 |U_11|^2 at d = 2.
    /// Both evaluate to 1/3 in the closed form.
    #[test]
    fn fourth_moment_matches_monte_carlo_oracle() {
        let d = 2;
        let n = 40_000;
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let (mut m_abs4, mut m_cross) = (0.0f64, 0.0f64);
        let (mut s_abs4, mut s_cross) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let u = haar_random_unitary(d, &mut rng).unwrap();
            let x = u[(0, 0)].norm_sqr().powi(2);
            let y = u[(0, 0)].norm_sqr() * u[(1, 1)].norm_sqr();
            m_abs4 += x;
            m_cross += y;
            s_abs4 += x * x;
            s_cross += y * y;
        }
        let nf = n as f64;
        let mean4 = m_abs4 / nf;
        let meanc = m_cross / nf;
        let se4 = ((s_abs4 / nf - mean4 * mean4) / nf).sqrt();
        let sec = ((s_cross / nf - meanc * meanc) / nf).sqrt();
        // closed forms: E|U00|^4 from (a,b,i,j)=(0,0,0,0) all primes equal
        let cf4 = haar_fourth_moment(0, 0, 0, 0, 0, 0, 0, 0, d).unwrap();
        let cfc = haar_fourth_moment(0, 0, 1, 1, 0, 0, 1, 1, d).unwrap();
        assert!((cf4 - 1.0 / 3.0).abs() < 1e-12);
        assert!((cfc - 1.0 / 3.0).abs() < 1e-12);
        assert!((mean4 - cf4).abs() < 3.0 * se4, "mean4={mean4} cf={cf4} se={se4}");
        assert!((meanc - cfc).abs() < 3.0 * sec, "meanc={meanc} cf={cfc} se={sec}");
    }

    /// First-moment oracle: unitary invariance forces E|U_00|^2 = 1/d.
    #[test]
    fn second_moment_matches_monte_carlo() {
        let n = 30_000;
        for d in [2usize, 3] {
            let mut rng = ChaCha12Rng::seed_from_u64(7 + d as u64);
            let mut m = 0.0f64;
            let mut s = 0.0f64;
            for _ in 0..n {
                let u = haar_random_unitary(d, &mut rng).unwrap();
                let x = u[(0, 0)].norm_sqr();
                m += x;
                s += x * x;
            }
            let mean = m / n as f64;
            let se = ((s / n as f64 - mean * mean) / n as f64).sqrt();
            let expect = haar_second_moment(0, 0, 0, 0, d);
            assert!((mean - expect).abs() < 3.0 * se, "d={d} mean={mean} expect={expect}");
        }
    }
}
