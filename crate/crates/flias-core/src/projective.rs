//! Flat left-invariant projective criteria: the algebraic étale condition
//! `theta(g)(w) + R w = R^{n+1}`, the block representation of `sl(2, R)`,
//! and trace-zero subalgebras of associative products.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{basis, BilinearProduct, LieAlgebra};
use crate::error::{Error, Result};
use crate::tol;

/// A linear representation given by the images of the basis vectors.
#[derive(Debug, Clone)]
pub struct LinearRep {
    pub source_dim: usize,
    pub target_dim: usize,
    pub matrices: Vec<DMatrix<f64>>,
}

impl LinearRep {
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let source_dim = matrices.len();
        let target_dim = matrices
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::InvalidParameter("empty representation".into()))?;
        for m in &matrices {
            if m.nrows() != target_dim || m.ncols() != target_dim {
                return Err(Error::DimensionMismatch {
                    expected: target_dim,
                    got: m.nrows().max(m.ncols()),
                });
            }
        }
        Ok(Self {
            source_dim,
            target_dim,
            matrices,
        })
    }

    /// `max || theta([e_i, e_j]) - [theta(e_i), theta(e_j)] ||` over pairs.
    pub fn bracket_residual(&self, alg: &LieAlgebra) -> Result<f64> {
        crate::algebra::check_dim(self.source_dim, alg.dim())?;
        let n = self.source_dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let br = alg.bracket_basis(i, j);
                let mut lhs = DMatrix::zeros(self.target_dim, self.target_dim);
                for (k, &c) in br.iter().enumerate() {
                    lhs += &self.matrices[k] * c;
                }
                let rhs =
                    &self.matrices[i] * &self.matrices[j] - &self.matrices[j] * &self.matrices[i];
                worst = worst.max((lhs - rhs).abs().max());
            }
        }
        Ok(worst)
    }

    pub fn traceless_residual(&self) -> f64 {
        self.matrices
            .iter()
            .fold(0.0f64, |m, mat| m.max(mat.trace().abs()))
    }
}

/// Outcome of the spanning test for the projective étale criterion.
#[derive(Debug, Clone, Serialize)]
pub struct EtaleSpanCheck {
    pub determinant: f64,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub spans: bool,
    /// `max |tr theta(e_i)|`; the criterion expects values in `sl(n+1)`.
    pub traceless_residual: f64,
}

/// Criterion for a flat left-invariant projective structure: the matrix with
/// columns `theta(e_1) w, ..., theta(e_n) w, w` has full rank `n + 1`.
///
/// Rank is decided from singular values (deficient iff the smallest is below
/// `1e-10` times the largest), which scales better than a raw determinant
/// threshold.
pub fn projective_etale_check(rep: &LinearRep, w: &[f64]) -> Result<EtaleSpanCheck> {
    if rep.target_dim != rep.source_dim + 1 {
        return Err(Error::DimensionMismatch {
            expected: rep.source_dim + 1,
            got: rep.target_dim,
        });
    }
    crate::algebra::check_dim(rep.target_dim, w.len())?;
    let n = rep.source_dim;
    let wv = DVector::from_column_slice(w);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        m.set_column(i, &(&rep.matrices[i] * &wv));
    }
    m.set_column(n, &wv);
    let determinant = m.determinant();
    let svd = m.svd(false, false);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|s| **s > 1e-10 * smax.max(1e-300))
        .count();
    Ok(EtaleSpanCheck {
        determinant,
        singular_values,
        rank,
        spans: smax > 0.0 && rank == n + 1,
        traceless_residual: rep.traceless_residual(),
    })
}

/// `sl(2, R)` with basis `(H, E+, E-)`:
/// `[H, E+] = 2 E+`, `[H, E-] = -2 E-`, `[E+, E-] = H`.
pub fn sl2_algebra() -> LieAlgebra {
    LieAlgebra::from_brackets(3, &[(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)])
        .expect("sl(2) table")
}

fn block_diag(upper: [[f64; 2]; 2], lower: [[f64; 2]; 2]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = upper[r][c];
            m[(2 + r, 2 + c)] = lower[r][c];
        }
    }
    m
}

const SL2_BASIS: [[[f64; 2]; 2]; 3] = [
    [[1.0, 0.0], [0.0, -1.0]], // H
    [[0.0, 1.0], [0.0, 0.0]],  // E+
    [[0.0, 0.0], [1.0, 0.0]],  // E-
];

/// The affine-shifted block map `u' -> diag(u', E)` with `E = diag(0, 1)`
/// evaluated on the `sl(2)` basis. The constant lower block makes this an
/// affine rather than linear map of `u'`: it is neither traceless nor
/// bracket-exact, and the residual report quantifies the gap.
pub fn sl2_block_rep_offset() -> (LieAlgebra, LinearRep) {
    let e_block = [[0.0, 0.0], [0.0, 1.0]];
    let mats = SL2_BASIS.iter().map(|u| block_diag(*u, e_block)).collect();
    (sl2_algebra(), LinearRep::new(mats).unwrap())
}

/// The honest differential of `u -> diag(u, I)`: `u' -> diag(u', 0)`.
/// Linear, traceless and bracket-exact, but every image kills the lower
/// block, so no vector satisfies the spanning criterion.
pub fn sl2_block_rep_linear() -> (LieAlgebra, LinearRep) {
    let zero = [[0.0, 0.0], [0.0, 0.0]];
    let mats = SL2_BASIS.iter().map(|u| block_diag(*u, zero)).collect();
    (sl2_algebra(), LinearRep::new(mats).unwrap())
}

/// Basis and closure report of `{a : tr L_a = 0}` for an associative product.
#[derive(Debug, Clone)]
pub struct TraceZeroSubalgebra {
    pub basis: Vec<DVector<f64>>,
    pub dim: usize,
    /// `max |tr L_[u,v]|` over kernel basis pairs; bracket closure holds for
    /// associative products and is verified, not assumed.
    pub bracket_closure_residual: f64,
}

pub fn trace_zero_subalgebra(prod: &BilinearProduct) -> Result<TraceZeroSubalgebra> {
    let assoc = prod.is_associative(tol::NUMERIC);
    if !assoc.passed() {
        return Err(Error::Precondition(format!(
            "product is not associative (residual {:.3e})",
            assoc.max_associator
        )));
    }
    let n = prod.dim();
    let mut functional = DMatrix::zeros(1, n);
    for a in 0..n {
        functional[(0, a)] = prod.left_mult(&basis(n, a))?.matrix.trace();
    }
    let kernel = crate::atlas::null_space(&functional, 1e-10);
    let mut closure: f64 = 0.0;
    for u in &kernel {
        for v in &kernel {
            let uv = prod.apply(u.as_slice(), v.as_slice())?;
            let vu = prod.apply(v.as_slice(), u.as_slice())?;
            let comm: Vec<f64> = uv.iter().zip(&vu).map(|(x, y)| x - y).collect();
            let tr = prod.left_mult(&comm)?.matrix.trace();
            closure = closure.max(tr.abs());
        }
    }
    Ok(TraceZeroSubalgebra {
        dim: kernel.len(),
        basis: kernel,
        bracket_closure_residual: closure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{aff_rn_product, gl_gl_product, GlGlSecondSlot};

    #[test]
    fn sl2_brackets() {
        assert!(sl2_algebra().jacobi_residual() < 1e-15);
        let (alg, linear) = sl2_block_rep_linear();
        assert_eq!(linear.bracket_residual(&alg).unwrap(), 0.0);
        assert_eq!(linear.traceless_residual(), 0.0);

        // the shifted variant picks up the E block: theta(2 E+) carries 2E
        // while [theta(H), theta(E+)] has zero lower block, so the worst
        // bracket residual is 2
        let (alg, offset) = sl2_block_rep_offset();
        assert_eq!(offset.bracket_residual(&alg).unwrap(), 2.0);
        assert_eq!(offset.traceless_residual(), 1.0);
    }

    #[test]
    fn etale_span_verdicts() {
        let (_, offset) = sl2_block_rep_offset();
        // e3 = (0,0,1,0) is killed by every image: the check fails
        let chk = projective_etale_check(&offset, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(!chk.spans);
        // vectors meeting both blocks span
        let chk = projective_etale_check(&offset, &[1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(chk.spans, "{chk:?}");
        assert!(chk.determinant.abs() > 0.5);
        // the zero vector never spans
        let chk = projective_etale_check(&offset, &[0.0; 4]).unwrap();
        assert!(!chk.spans);
        // the linear variant kills the lower block for every w
        let (_, linear) = sl2_block_rep_linear();
        for w in [[1.0, 0.0, 1.0, 1.0], [0.3, -2.0, 1.0, 0.7]] {
            assert!(!projective_etale_check(&linear, &w).unwrap().spans);
        }
    }

    #[test]
    fn etale_span_is_scale_invariant() {
        let (_, offset) = sl2_block_rep_offset();
        let w = [1.0, 0.0, 1.0, 1.0];
        for c in [2.0, -0.5, 1e3] {
            let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
            assert_eq!(
                projective_etale_check(&offset, &scaled).unwrap().spans,
                projective_etale_check(&offset, &w).unwrap().spans
            );
        }
    }

    #[test]
    fn trace_zero_dimensions() {
        // gl + gl with the associative slot: dim 2 n^2 - 1
        for n in [1usize, 2, 3] {
            let (_, p) = gl_gl_product(n, GlGlSecondSlot::S1S2);
            let sub = trace_zero_subalgebra(&p).unwrap();
            assert_eq!(sub.dim, 2 * n * n - 1, "n = {n}");
            assert!(sub.bracket_closure_residual < 1e-9);
        }
        // matrix algebra: aff(R^1) trace functional has kernel of codim 1
        let (_, p) = aff_rn_product(2);
        let sub = trace_zero_subalgebra(&p).unwrap();
        assert_eq!(sub.dim, 2 + 4 - 1);

        // one-dimensional e.e = e: tr L_e = 1, kernel trivial
        let p = BilinearProduct::from_table(1, &[(0, 0, 0, 1.0)]);
        let sub = trace_zero_subalgebra(&p).unwrap();
        assert_eq!(sub.dim, 0);

        // non-associative input is rejected
        assert!(trace_zero_subalgebra(&crate::atlas::Family::R1.product()).is_err());
    }
}
