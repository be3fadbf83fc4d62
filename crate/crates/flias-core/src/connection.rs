//! Curvature and torsion of left-invariant connections, the Levi-Civita
//! construction, projective equivalence, and the special-structure detectors
//! (Hessian, symplectic, Kähler) together with the cotangent pseudo-Kähler
//! extension.
//!
//! A bilinear product on the Lie algebra is a left-invariant connection in
//! the invariant frame; all checks below are finite computations over basis
//! tuples.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{basis, check_dim, BilinearProduct, LeftSymmetryCheck, LieAlgebra};
use crate::error::{Error, Result};
use crate::tensor::{Tensor3, Tensor4};
use crate::tol;

/// Symmetric bilinear form `g[i][j] = <e_i, e_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    m: DMatrix<f64>,
}

impl MetricTensor {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let sym = (&m - m.transpose()).abs().max();
        if sym > tol::EXACT {
            return Err(Error::Precondition(format!(
                "metric not symmetric (residual {sym:.3e})"
            )));
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn pairing(&self, x: &[f64], y: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let yv = DVector::from_column_slice(y);
        (xv.transpose() * &self.m * yv)[(0, 0)]
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    pub fn is_nondegenerate(&self, tolerance: f64) -> bool {
        self.determinant().abs() > tolerance
    }
}

/// Antisymmetric bilinear form `omega[i][j] = omega(e_i, e_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    m: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let anti = (&m + m.transpose()).abs().max();
        if anti > tol::EXACT {
            return Err(Error::Precondition(format!(
                "form not antisymmetric (residual {anti:.3e})"
            )));
        }
        Ok(Self { m })
    }

    /// The standard form on `aff(R)`: `omega(e_1, e_2) = 1`.
    pub fn standard_aff_r() -> Self {
        Self::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn pairing(&self, x: &[f64], y: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let yv = DVector::from_column_slice(y);
        (xv.transpose() * &self.m * yv)[(0, 0)]
    }

    pub fn is_nondegenerate(&self, tolerance: f64) -> bool {
        self.m.determinant().abs() > tolerance
    }

    /// Chevalley-Eilenberg 2-cocycle residual
    /// `omega([x,y],z) + omega([y,z],x) + omega([z,x],y)` over basis triples.
    pub fn cocycle_residual(&self, alg: &LieAlgebra) -> Result<f64> {
        check_dim(self.dim(), alg.dim())?;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.pairing(alg.bracket_basis(i, j), &basis(n, k));
                    let b = self.pairing(alg.bracket_basis(j, k), &basis(n, i));
                    let c = self.pairing(alg.bracket_basis(k, i), &basis(n, j));
                    worst = worst.max((a + b + c).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Candidate complex structure: a real matrix `j` with `j^2 = -I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    j: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn new(j: DMatrix<f64>) -> Self {
        Self { j }
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn square_residual(&self) -> f64 {
        let n = self.dim();
        (&self.j * &self.j + DMatrix::<f64>::identity(n, n))
            .abs()
            .max()
    }

    /// Nijenhuis tensor residual on basis pairs, with constant `j` on the
    /// invariant frame:
    /// `N(x,y) = [jx, jy] - [x,y] - j[jx, y] - j[x, jy]`.
    pub fn nijenhuis_residual(&self, alg: &LieAlgebra) -> Result<f64> {
        check_dim(self.dim(), alg.dim())?;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for jdx in 0..n {
                let x = basis(n, i);
                let y = basis(n, jdx);
                let jx: Vec<f64> = (&self.j * DVector::from_column_slice(&x))
                    .iter()
                    .copied()
                    .collect();
                let jy: Vec<f64> = (&self.j * DVector::from_column_slice(&y))
                    .iter()
                    .copied()
                    .collect();
                let t1 = alg.bracket(&jx, &jy)?;
                let t2 = alg.bracket(&x, &y)?;
                let t3 = &self.j * DVector::from_column_slice(&alg.bracket(&jx, &y)?);
                let t4 = &self.j * DVector::from_column_slice(&alg.bracket(&x, &jy)?);
                for k in 0..n {
                    worst = worst.max((t1[k] - t2[k] - t3[k] - t4[k]).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Torsion `T[i][j][.] = e_i.e_j - e_j.e_i - [e_i, e_j]`.
pub fn torsion(prod: &BilinearProduct, alg: &LieAlgebra) -> Result<Tensor3> {
    check_dim(alg.dim(), prod.dim())?;
    let n = prod.dim();
    let mut t = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                *t.get_mut(i, j, k) =
                    prod.coeff(i, j, k) - prod.coeff(j, i, k) - alg.constants().get(i, j, k);
            }
        }
    }
    Ok(t)
}

/// Curvature `R(e_i, e_j) e_k = L_i L_j e_k - L_j L_i e_k - L_[e_i,e_j] e_k`,
/// returned as `R[i][j][k][l]` = coefficient of `e_l`.
pub fn curvature(prod: &BilinearProduct, alg: &LieAlgebra) -> Result<Tensor4> {
    check_dim(alg.dim(), prod.dim())?;
    let n = prod.dim();
    let mut r = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let bij = alg.bracket_basis(i, j).to_vec();
            for k in 0..n {
                let ek = basis(n, k);
                let ljk = prod.apply(&basis(n, j), &ek)?;
                let lilj = prod.apply(&basis(n, i), &ljk)?;
                let lik = prod.apply(&basis(n, i), &ek)?;
                let ljli = prod.apply(&basis(n, j), &lik)?;
                let lbr = prod.apply(&bij, &ek)?;
                for l in 0..n {
                    *r.get_mut(i, j, k, l) = lilj[l] - ljli[l] - lbr[l];
                }
            }
        }
    }
    Ok(r)
}

/// The unique torsion-free metric connection, via the Koszul formula on
/// left-invariant fields (inner products of invariant fields are constant):
/// `2<x.y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>`.
pub fn levi_civita(metric: &MetricTensor, alg: &LieAlgebra) -> Result<BilinearProduct> {
    check_dim(alg.dim(), metric.dim())?;
    let n = alg.dim();
    let det = metric.determinant();
    if det.abs() <= 1e-12 {
        return Err(Error::Singular {
            context: "Levi-Civita metric",
            det,
        });
    }
    let g_inv = metric
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(Error::Singular {
            context: "Levi-Civita metric",
            det,
        })?;
    let mut gamma = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut rhs = DVector::zeros(n);
            for k in 0..n {
                let t1 = metric.pairing(alg.bracket_basis(i, j), &basis(n, k));
                let t2 = metric.pairing(alg.bracket_basis(j, k), &basis(n, i));
                let t3 = metric.pairing(alg.bracket_basis(k, i), &basis(n, j));
                rhs[k] = 0.5 * (t1 - t2 + t3);
            }
            let prod = &g_inv * rhs;
            for k in 0..n {
                *gamma.get_mut(i, j, k) = prod[k];
            }
        }
    }
    Ok(BilinearProduct::new(gamma))
}

/// Outcome of the projective-equivalence least-squares solve.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectiveEquivalence {
    /// Constant 1-form `phi` realizing `p1 - p2 = phi(x) y + phi(y) x`, if any.
    pub phi: Option<Vec<f64>>,
    pub residual: f64,
    pub tolerance: f64,
}

impl ProjectiveEquivalence {
    pub fn equivalent(&self) -> bool {
        self.phi.is_some()
    }
}

/// Least-squares solve for a constant covector `phi` with
/// `p1(x,y) - p2(x,y) = phi(x) y + phi(y) x` on the invariant frame.
pub fn projectively_equivalent(
    p1: &BilinearProduct,
    p2: &BilinearProduct,
    tolerance: f64,
) -> Result<ProjectiveEquivalence> {
    check_dim(p1.dim(), p2.dim())?;
    let n = p1.dim();
    let rows = n * n * n;
    let mut a = DMatrix::zeros(rows, n);
    let mut d = DVector::zeros(rows);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let row = (i * n + j) * n + k;
                // coefficient of phi_m in (phi(e_i) e_j + phi(e_j) e_i)_k
                a[(row, i)] += if j == k { 1.0 } else { 0.0 };
                a[(row, j)] += if i == k { 1.0 } else { 0.0 };
                d[row] = p1.coeff(i, j, k) - p2.coeff(i, j, k);
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let phi = svd.solve(&d, 1e-12).map_err(|_| Error::Singular {
        context: "projective equivalence solve",
        det: 0.0,
    })?;
    let residual = (&a * &phi - &d).abs().max();
    Ok(ProjectiveEquivalence {
        phi: (residual <= tolerance).then(|| phi.iter().copied().collect()),
        residual,
        tolerance,
    })
}

/// Hessian identity residual:
/// `<x.y, z> - <x, y.z> - <y.x, z> + <y, x.z>` over basis triples.
pub fn hessian_residual(prod: &BilinearProduct, metric: &MetricTensor) -> Result<f64> {
    check_dim(prod.dim(), metric.dim())?;
    let n = prod.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z = basis(n, k);
                let lhs = metric.pairing(prod.basis_product(i, j), &z)
                    - metric.pairing(&basis(n, i), prod.basis_product(j, k));
                let rhs = metric.pairing(prod.basis_product(j, i), &z)
                    - metric.pairing(&basis(n, j), prod.basis_product(i, k));
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

pub fn hessian_check(
    prod: &BilinearProduct,
    metric: &MetricTensor,
    tolerance: f64,
) -> Result<bool> {
    if !metric.is_nondegenerate(1e-12) {
        return Err(Error::Singular {
            context: "Hessian metric",
            det: metric.determinant(),
        });
    }
    Ok(hessian_residual(prod, metric)? <= tolerance)
}

/// Symplectic-connection identity `omega(x.y, z) + omega(y, x.z) = 0`.
pub fn symplectic_connection_residual(
    prod: &BilinearProduct,
    omega: &SymplecticForm,
) -> Result<f64> {
    check_dim(prod.dim(), omega.dim())?;
    let n = prod.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = omega.pairing(prod.basis_product(i, j), &basis(n, k))
                    + omega.pairing(&basis(n, j), prod.basis_product(i, k));
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

pub fn symplectic_connection_check(
    prod: &BilinearProduct,
    omega: &SymplecticForm,
    tolerance: f64,
) -> Result<bool> {
    if !omega.is_nondegenerate(1e-12) {
        return Err(Error::Singular {
            context: "symplectic form",
            det: omega.matrix().determinant(),
        });
    }
    Ok(symplectic_connection_residual(prod, omega)? <= tolerance)
}

/// The left-symmetric product determined by a symplectic 2-cocycle:
/// `omega(a.b, c) = -omega(b, [a, c])`.
pub fn lsa_from_symplectic(omega: &SymplecticForm, alg: &LieAlgebra) -> Result<BilinearProduct> {
    check_dim(alg.dim(), omega.dim())?;
    let n = alg.dim();
    if !omega.is_nondegenerate(1e-12) {
        return Err(Error::Singular {
            context: "symplectic form",
            det: omega.matrix().determinant(),
        });
    }
    let coc = omega.cocycle_residual(alg)?;
    if coc > tol::NUMERIC {
        return Err(Error::Precondition(format!(
            "form is not a 2-cocycle (residual {coc:.3e})"
        )));
    }
    // omega(u, e_k) = r_k  <=>  (Omega^T u)_k = r_k
    let omega_t = omega.matrix().transpose();
    let lu = omega_t.lu();
    let mut gamma = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut rhs = DVector::zeros(n);
            for k in 0..n {
                rhs[k] = -omega.pairing(&basis(n, j), alg.bracket_basis(i, k));
            }
            let u = lu.solve(&rhs).ok_or(Error::Singular {
                context: "symplectic product solve",
                det: omega.matrix().determinant(),
            })?;
            for k in 0..n {
                *gamma.get_mut(i, j, k) = u[k];
            }
        }
    }
    Ok(BilinearProduct::new(gamma))
}

/// Report of a Kähler-structure verification.
#[derive(Debug, Clone, Serialize)]
pub struct KahlerCheck {
    pub j_square_residual: f64,
    pub nijenhuis_residual: f64,
    pub metric_symmetry_residual: f64,
    pub metric_determinant: f64,
    /// Induced metric `g(a, b) = omega(j(a), b)` as a dense row-major matrix.
    pub metric: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl KahlerCheck {
    pub fn passed(&self) -> bool {
        self.j_square_residual <= self.tolerance
            && self.nijenhuis_residual <= self.tolerance
            && self.metric_symmetry_residual <= self.tolerance
            && self.metric_determinant.abs() > self.tolerance
    }
}

/// Verifies that `(omega, j)` induces a pseudo-Riemannian metric: `j^2 = -I`,
/// Nijenhuis vanishing, and symmetry plus nondegeneracy of
/// `g(a, b) = omega(j(a), b)`.
///
/// The argument order in `g` is fixed by the canonical example on `aff(R)`
/// (`omega(e1,e2) = 1`, `j(e1) = -e2`, `j(e2) = e1` gives the identity
/// metric); the opposite order flips the sign of `g`.
pub fn kahler_check(
    alg: &LieAlgebra,
    omega: &SymplecticForm,
    j: &ComplexStructure,
    tolerance: f64,
) -> Result<KahlerCheck> {
    check_dim(alg.dim(), omega.dim())?;
    check_dim(alg.dim(), j.dim())?;
    let n = alg.dim();
    let g = j.matrix().transpose() * omega.matrix();
    let metric: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|k| g[(i, k)]).collect())
        .collect();
    Ok(KahlerCheck {
        j_square_residual: j.square_residual(),
        nijenhuis_residual: j.nijenhuis_residual(alg)?,
        metric_symmetry_residual: (&g - g.transpose()).abs().max(),
        metric_determinant: g.determinant(),
        metric,
        tolerance,
    })
}

/// The cotangent extension of a pseudo-Hessian structure, with its full
/// verification report. Basis order: the `n` dual vectors `e_i^*`, then the
/// `n` primal vectors `e_i`.
#[derive(Debug, Clone)]
pub struct CotangentStructure {
    pub algebra: LieAlgebra,
    pub product: BilinearProduct,
    pub omega: SymplecticForm,
    pub complex: ComplexStructure,
    pub metric: MetricTensor,
    pub report: CotangentReport,
}

/// The verification is the deliverable: every structural identity of the
/// extension, evaluated numerically.
#[derive(Debug, Clone, Serialize)]
pub struct CotangentReport {
    pub jacobi_residual: f64,
    pub left_symmetry: LeftSymmetryCheck,
    pub cocycle_residual: f64,
    pub j_square_residual: f64,
    pub nijenhuis_residual: f64,
    pub metric_symmetry_residual: f64,
    pub metric_determinant: f64,
    pub tolerance: f64,
}

impl CotangentReport {
    pub fn passed(&self) -> bool {
        self.jacobi_residual <= self.tolerance
            && self.left_symmetry.passed()
            && self.cocycle_residual <= self.tolerance
            && self.j_square_residual <= self.tolerance
            && self.nijenhuis_residual <= self.tolerance
            && self.metric_symmetry_residual <= self.tolerance
            && self.metric_determinant.abs() > self.tolerance
    }
}

/// Builds the cotangent algebra `g^* x g` of a Hessian pair `(prod, metric)`:
///
/// * bracket `[(a1,b1),(a2,b2)]` via the dual representation `a -> -L_a^T`,
/// * product `(a1,b1).(a2,b2) = (b1 |> a2 + a1 <| b2, b1.b2)` with the dual
///   bimodule actions `b |> a = -a o ad_b` and `a <| b = a o R_b`,
/// * `omega((a,s),(b,t)) = a(t) - b(s)`,
/// * `j` interchanging the factors through the metric,
/// * induced metric `<X, Y> = omega(X, j Y)`.
///
/// Requires `hessian_check(prod, metric)`; the report re-verifies every
/// claimed identity (the Nijenhuis residual is the one that detects a
/// non-Hessian input).
pub fn cotangent_pseudo_kahler(
    prod: &BilinearProduct,
    metric: &MetricTensor,
    alg: &LieAlgebra,
    tolerance: f64,
) -> Result<CotangentStructure> {
    check_dim(alg.dim(), prod.dim())?;
    check_dim(alg.dim(), metric.dim())?;
    if !hessian_check(prod, metric, tol::NUMERIC)? {
        return Err(Error::Precondition(format!(
            "(product, metric) is not Hessian (residual {:.3e})",
            hessian_residual(prod, metric)?
        )));
    }
    let n = alg.dim();
    let big = 2 * n;

    let left = |i: usize| {
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(k, j)] = prod.coeff(i, j, k);
            }
        }
        m
    };
    let right = |i: usize| {
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(k, j)] = prod.coeff(j, i, k);
            }
        }
        m
    };

    // bracket table
    let mut c = Tensor3::zeros(big);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                *c.get_mut(n + i, n + j, n + k) = alg.constants().get(i, j, k);
            }
        }
        let lt = left(i).transpose();
        for j in 0..n {
            // [(0, e_i), (e_j^*, 0)] = (-L_{e_i}^T e_j^*, 0)
            for k in 0..n {
                *c.get_mut(n + i, j, k) = -lt[(k, j)];
                *c.get_mut(j, n + i, k) = lt[(k, j)];
            }
        }
    }
    let algebra = LieAlgebra::new_unchecked(c);

    // product table
    let mut g = Tensor3::zeros(big);
    for i in 0..n {
        let ad_t = (left(i) - right(i)).transpose();
        let r_t = right(i).transpose();
        for j in 0..n {
            for k in 0..n {
                *g.get_mut(n + i, n + j, n + k) = prod.coeff(i, j, k);
                // (0, e_i).(e_j^*, 0) = (e_i |> e_j^*, 0) = (-ad_{e_i}^T e_j^*, 0)
                *g.get_mut(n + i, j, k) = -ad_t[(k, j)];
                // (e_j^*, 0).(0, e_i) = (e_j^* o R_{e_i}, 0) = (R_{e_i}^T e_j^*, 0)
                *g.get_mut(j, n + i, k) = r_t[(k, j)];
            }
        }
    }
    let product = BilinearProduct::new(g);

    let mut om = DMatrix::zeros(big, big);
    for i in 0..n {
        om[(i, n + i)] = 1.0;
        om[(n + i, i)] = -1.0;
    }
    let omega = SymplecticForm::new(om)?;

    let g_inv = metric
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(Error::Singular {
            context: "cotangent metric",
            det: metric.determinant(),
        })?;
    let mut jm = DMatrix::zeros(big, big);
    // j(0, x) = (-g(x, .), 0); j(a, 0) = (0, g^{-1} a)
    for i in 0..n {
        for k in 0..n {
            jm[(k, n + i)] = -metric.matrix()[(k, i)];
            jm[(n + k, i)] = g_inv[(k, i)];
        }
    }
    let complex = ComplexStructure::new(jm.clone());

    let induced = jm.transpose() * omega.matrix();
    let induced_sym = (&induced - induced.transpose()).abs().max();
    let induced_det = induced.determinant();

    let report = CotangentReport {
        jacobi_residual: algebra.jacobi_residual(),
        left_symmetry: product.is_left_symmetric(&algebra, tolerance)?,
        cocycle_residual: omega.cocycle_residual(&algebra)?,
        j_square_residual: complex.square_residual(),
        nijenhuis_residual: complex.nijenhuis_residual(&algebra)?,
        metric_symmetry_residual: induced_sym,
        metric_determinant: induced_det,
        tolerance,
    };
    let sym_fix = 0.5 * (&induced + induced.transpose());
    Ok(CotangentStructure {
        algebra,
        product,
        omega,
        complex,
        metric: MetricTensor::new(sym_fix)?,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{Family, VarietyPoint};

    fn aff() -> LieAlgebra {
        LieAlgebra::aff_r()
    }

    fn metric2(rows: [[f64; 2]; 2]) -> MetricTensor {
        MetricTensor::from_rows(&[&rows[0], &rows[1]]).unwrap()
    }

    #[test]
    fn torsion_vanishes_on_variety_families() {
        for p in [
            VarietyPoint::new(1.5, -0.5, 0.0, 0.0, 0.0, 0.0),
            VarietyPoint::new(2.0, 1.0, 0.0, 2.0, 0.0, 0.0),
            VarietyPoint::from_component3(0.5, -1.5),
        ] {
            let t = torsion(&p.product(), &aff()).unwrap();
            assert!(t.max_abs() < 1e-12);
        }
        // zero product on aff(R): T[0][1] = -[e1,e2] = -e2
        let t = torsion(&BilinearProduct::zero(2), &aff()).unwrap();
        assert_eq!(t.get(0, 1, 1), -1.0);
        // symmetric product on an abelian algebra
        let sym = BilinearProduct::from_table(2, &[(0, 1, 0, 2.0), (1, 0, 0, 2.0)]);
        let t = torsion(&sym, &LieAlgebra::abelian(2)).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn curvature_vanishes_for_left_symmetric_products() {
        let r = curvature(&Family::F2(3.0).product(), &aff()).unwrap();
        assert!(r.max_abs() < 1e-12);
        let r = curvature(&BilinearProduct::zero(2), &LieAlgebra::abelian(2)).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn curvature_of_half_bracket_connection() {
        // x.y = [x,y]/2 on aff(R)
        let p = BilinearProduct::from_table(2, &[(0, 1, 1, 0.5), (1, 0, 1, -0.5)]);
        let r = curvature(&p, &aff()).unwrap();
        // R(e1,e2)e1 = e1.(e2.e1) - e2.(e1.e1) - (e2.e1) = 1/4 e2
        assert!((r.get(0, 1, 0, 1) - 0.25).abs() < 1e-15);
        assert_eq!(r.get(0, 1, 1, 0), 0.0);
        assert_eq!(r.get(0, 1, 1, 1), 0.0);
        assert!(r.max_abs() > 0.1);
    }

    #[test]
    fn levi_civita_of_lorentzian_metric() {
        let m = metric2([[1.0, -1.0], [-1.0, 0.0]]);
        let lc = levi_civita(&m, &aff()).unwrap();
        let expected = Family::F1(-1.0).product(); // F_I(-1,-1)
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!((lc.coeff(i, j, k) - expected.coeff(i, j, k)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn levi_civita_properties_on_random_metrics() {
        let mut rng = crate::verify::seeded_rng(5);
        for _ in 0..20 {
            let a = crate::verify::uniform(&mut rng, -2.0, 2.0);
            let b = crate::verify::uniform(&mut rng, -2.0, 2.0);
            let c = crate::verify::uniform(&mut rng, -2.0, 2.0);
            let m = metric2([[a, b], [b, c]]);
            if !m.is_nondegenerate(1e-3) {
                continue;
            }
            let lc = levi_civita(&m, &aff()).unwrap();
            assert!(torsion(&lc, &aff()).unwrap().max_abs() < 1e-10);
            // metric parallelism: <x.y, z> + <y, x.z> = 0 on invariant fields
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let z = basis(2, k);
                        let r = m.pairing(lc.basis_product(i, j), &z)
                            + m.pairing(&basis(2, j), lc.basis_product(i, k));
                        assert!(r.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn euclidean_metric_on_abelian_algebra_gives_zero_product() {
        let m = metric2([[1.0, 0.0], [0.0, 1.0]]);
        let lc = levi_civita(&m, &LieAlgebra::abelian(2)).unwrap();
        assert_eq!(lc.coefficients().max_abs(), 0.0);
    }

    #[test]
    fn projective_equivalence_cases() {
        let p = Family::F1(0.0).product();
        let same = projectively_equivalent(&p, &p, tol::NUMERIC).unwrap();
        assert!(same.equivalent());
        assert!(same.phi.unwrap().iter().all(|v| v.abs() < 1e-12));

        // shift by phi = e1^*
        let mut shifted = Tensor3::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut v = p.coeff(i, j, k);
                    if i == 0 && j == k {
                        v += 1.0;
                    }
                    if j == 0 && i == k {
                        v += 1.0;
                    }
                    *shifted.get_mut(i, j, k) = v;
                }
            }
        }
        let eq = projectively_equivalent(&BilinearProduct::new(shifted), &p, tol::NUMERIC).unwrap();
        assert!(eq.equivalent());
        let phi = eq.phi.unwrap();
        assert!((phi[0] - 1.0).abs() < 1e-12 && phi[1].abs() < 1e-12);

        let no = projectively_equivalent(
            &Family::F1(0.0).product(),
            &Family::A1.product(),
            tol::NUMERIC,
        )
        .unwrap();
        assert!(!no.equivalent());
        assert!(no.residual > 1e-3);
    }

    #[test]
    fn projective_equivalence_is_symmetric_with_negated_phi() {
        let p1 = Family::A1.product();
        // p2 = p1 shifted by phi = (0.5, -1.5)
        let phi = [0.5, -1.5];
        let mut t = Tensor3::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut v = p1.coeff(i, j, k);
                    if j == k {
                        v += phi[i];
                    }
                    if i == k {
                        v += phi[j];
                    }
                    *t.get_mut(i, j, k) = v;
                }
            }
        }
        let p2 = BilinearProduct::new(t);
        let fwd = projectively_equivalent(&p2, &p1, tol::NUMERIC).unwrap();
        let bwd = projectively_equivalent(&p1, &p2, tol::NUMERIC).unwrap();
        let f = fwd.phi.unwrap();
        let b = bwd.phi.unwrap();
        for k in 0..2 {
            assert!((f[k] + b[k]).abs() < 1e-12);
            assert!((f[k] - phi[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn hessian_pairs() {
        let a1 = metric2([[0.0, 1.0], [1.0, 0.0]]);
        assert!(hessian_check(&Family::F1(-1.0).product(), &a1, tol::EXACT).unwrap());
        let a3 = metric2([[2.0, 0.0], [0.0, 1.0]]);
        assert!(hessian_check(&Family::R1.product(), &a3, tol::EXACT).unwrap());
        let id = metric2([[1.0, 0.0], [0.0, 1.0]]);
        assert!(!hessian_check(&Family::F1(0.0).product(), &id, tol::EXACT).unwrap());
    }

    #[test]
    fn symplectic_connection_pairs() {
        let om = SymplecticForm::standard_aff_r();
        assert!(symplectic_connection_check(&Family::F1(-1.0).product(), &om, tol::EXACT).unwrap());
        assert!(symplectic_connection_check(&Family::F2(-0.5).product(), &om, tol::EXACT).unwrap());
        let r = symplectic_connection_residual(&Family::A1.product(), &om).unwrap();
        assert!((r - 2.0).abs() < 1e-15);
    }

    #[test]
    fn symplectic_form_induces_the_bi_invariant_product() {
        let om = SymplecticForm::standard_aff_r();
        let p = lsa_from_symplectic(&om, &aff()).unwrap();
        let a2 = Family::A2.product();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!((p.coeff(i, j, k) - a2.coeff(i, j, k)).abs() < 1e-12);
                }
            }
        }
        // homogeneous in omega
        let scaled = SymplecticForm::new(om.matrix() * 3.5).unwrap();
        let q = lsa_from_symplectic(&scaled, &aff()).unwrap();
        assert!((0..2).all(|i| (0..2)
            .all(|j| { (0..2).all(|k| (p.coeff(i, j, k) - q.coeff(i, j, k)).abs() < 1e-12) })));
        // abelian algebra: right side vanishes
        let z = lsa_from_symplectic(&om, &LieAlgebra::abelian(2)).unwrap();
        assert_eq!(z.coefficients().max_abs(), 0.0);
    }

    #[test]
    fn random_forms_give_left_symmetric_products() {
        let mut rng = crate::verify::seeded_rng(17);
        for _ in 0..20 {
            let w = crate::verify::uniform(&mut rng, 0.2, 3.0);
            let om =
                SymplecticForm::new(DMatrix::from_row_slice(2, 2, &[0.0, w, -w, 0.0])).unwrap();
            let p = lsa_from_symplectic(&om, &aff()).unwrap();
            assert!(p.is_left_symmetric(&aff(), 1e-10).unwrap().passed());
        }
    }

    #[test]
    fn kahler_canonical_pair() {
        let om = SymplecticForm::standard_aff_r();
        let j = ComplexStructure::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        // j(e1) = -e2, j(e2) = e1 as columns
        let chk = kahler_check(&aff(), &om, &j, tol::EXACT).unwrap();
        assert!(chk.passed());
        assert_eq!(chk.metric, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let jneg = ComplexStructure::new(-j.matrix().clone());
        let chk2 = kahler_check(&aff(), &om, &jneg, tol::EXACT).unwrap();
        assert!(chk2.passed());
        assert_eq!(chk2.metric, vec![vec![-1.0, 0.0], vec![0.0, -1.0]]);

        let bad = ComplexStructure::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(!kahler_check(&aff(), &om, &bad, tol::EXACT)
            .unwrap()
            .passed());
    }

    #[test]
    fn cotangent_construction_passes_for_hessian_inputs() {
        let pairs = [
            (Family::F1(-1.0), metric2([[0.0, 1.0], [1.0, 0.0]])),
            (Family::F2(-2.0), metric2([[1.0, -0.25], [-0.25, 0.125]])),
            (Family::R1, metric2([[2.0, 0.0], [0.0, 1.0]])),
            (Family::R2, metric2([[2.0, 0.0], [0.0, -1.0]])),
        ];
        for (fam, m) in pairs {
            let cot = cotangent_pseudo_kahler(&fam.product(), &m, &aff(), tol::EXACT).unwrap();
            assert!(cot.report.passed(), "{:?}: {:?}", fam, cot.report);
            // omega restricted to (dual, primal) pairs is the Kronecker pairing
            for i in 0..2 {
                for j in 0..2 {
                    let v = cot.omega.matrix()[(i, 2 + j)];
                    assert_eq!(v, if i == j { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn cotangent_rejects_non_hessian_input() {
        let id = metric2([[1.0, 0.0], [0.0, 1.0]]);
        let err = cotangent_pseudo_kahler(&Family::F1(0.0).product(), &id, &aff(), tol::EXACT);
        assert!(err.is_err());
    }
}
