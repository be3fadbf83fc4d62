//! Exact rational arithmetic backing for the brute-force oracles.
//!
//! The structure constants appearing in this crate are small integers or
//! rationals, so axiom checks and polynomial residuals can be evaluated
//! without rounding. The test suites use this module to certify that the
//! floating-point checkers agree with exact computation.

use num_rational::Rational64;
use num_traits::Zero;

/// Dense rank-3 rational array, mirroring [`crate::Tensor3`].
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTensor3 {
    dim: usize,
    data: Vec<Rational64>,
}

impl RationalTensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Rational64::zero(); dim * dim * dim],
        }
    }

    pub fn from_triples(dim: usize, entries: &[(usize, usize, usize, Rational64)]) -> Self {
        let mut t = Self::zeros(dim);
        for &(i, j, k, v) in entries {
            t.data[(i * dim + j) * dim + k] = v;
        }
        t
    }

    /// Conversion from a floating tensor; fails if some entry is not exactly
    /// a small rational `p/q` with `q <= max_den`.
    pub fn from_f64(t: &crate::Tensor3, max_den: i64) -> Option<Self> {
        let dim = t.dim();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    out.data[(i * dim + j) * dim + k] = rationalize(t.get(i, j, k), max_den)?;
                }
            }
        }
        Some(out)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Rational64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn pair(&self, i: usize, j: usize) -> &[Rational64] {
        let base = (i * self.dim + j) * self.dim;
        &self.data[base..base + self.dim]
    }

    pub fn contract(&self, x: &[Rational64], y: &[Rational64]) -> Vec<Rational64> {
        let mut out = vec![Rational64::zero(); self.dim];
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c * self.get(i, j, k);
                }
            }
        }
        out
    }

    fn basis(&self, k: usize) -> Vec<Rational64> {
        let mut v = vec![Rational64::zero(); self.dim];
        v[k] = Rational64::new(1, 1);
        v
    }

    /// Exact associator `(e_i, e_j, e_k)`.
    pub fn associator(&self, i: usize, j: usize, k: usize) -> Vec<Rational64> {
        let xy_z = self.contract(self.pair(i, j), &self.basis(k));
        let x_yz = self.contract(&self.basis(i), self.pair(j, k));
        xy_z.iter().zip(&x_yz).map(|(a, b)| a - b).collect()
    }

    /// Exact associativity over all basis triples.
    pub fn is_associative(&self) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.associator(i, j, k).iter().any(|v| !v.is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Exact left-symmetry against a rational bracket tensor.
    pub fn is_left_symmetric(&self, bracket: &RationalTensor3) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.associator(i, j, k);
                    let b = self.associator(j, i, k);
                    if a.iter().zip(&b).any(|(x, y)| x != y) {
                        return false;
                    }
                }
                for k in 0..n {
                    let t = self.get(i, j, k) - self.get(j, i, k) - bracket.get(i, j, k);
                    if !t.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Exact evaluation of the four variety polynomials at a rational point
/// `(alpha, beta, gamma, delta, epsilon, lambda)`.
pub fn variety_residual_exact(p: [Rational64; 6]) -> [Rational64; 4] {
    let [a, b, g, d, e, l] = p;
    [
        b * e - g * d + g,
        a * d - b * g + b * l - d * d,
        a * e - g * g + g * l - d * e - e - e,
        b * e - g * d - l,
    ]
}

fn rationalize(x: f64, max_den: i64) -> Option<Rational64> {
    for den in 1..=max_den {
        let num = x * den as f64;
        if (num - num.round()).abs() < 1e-9 && num.abs() < 9.0e15 {
            return Some(Rational64::new(num.round() as i64, den));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::aff_rn_product;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn aff_rn_associativity_exact_up_to_n4() {
        for n in 1..=4 {
            let (alg, p) = aff_rn_product(n);
            let pq = RationalTensor3::from_f64(p.coefficients(), 4).unwrap();
            let cq = RationalTensor3::from_f64(alg.constants(), 4).unwrap();
            assert!(pq.is_associative(), "n = {n}");
            assert!(pq.is_left_symmetric(&cq), "n = {n}");
        }
    }

    #[test]
    fn variety_polynomials_vanish_exactly_on_components() {
        // component 1
        let z = r(0, 1);
        assert_eq!(
            variety_residual_exact([r(7, 3), r(-9, 2), z, z, z, z]),
            [z; 4]
        );
        // component 2: delta = alpha
        assert_eq!(
            variety_residual_exact([r(-5, 2), r(11, 4), z, r(-5, 2), z, z]),
            [z; 4]
        );
        // component 3 from (gamma, epsilon) = (3/2, -2)
        let g = r(3, 2);
        let e = r(-2, 1);
        let a = r(2, 1) + g * g / e;
        let b = -(g * g * g + g * e) / (e * e);
        let d = -(g * g) / e;
        let l = -g;
        assert_eq!(variety_residual_exact([a, b, g, d, e, l]), [z; 4]);
        // and a point off the variety
        let one = r(1, 1);
        assert_eq!(
            variety_residual_exact([one; 6]),
            [one, z, r(-2, 1), r(-1, 1)]
        );
    }
}
