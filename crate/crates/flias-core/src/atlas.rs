//! The classification engine for flat left-invariant affine structures on
//! `Aff(R)`: the polynomial variety of compatible left-symmetric products,
//! its three components, canonical families, special structures, and
//! isomorphism testing.
//!
//! A torsion-compatible bilinear product on `aff(R)` is parameterized by six
//! reals through the table
//! `e1.e1 = alpha e1 + beta e2`, `e1.e2 = gamma e1 + (delta+1) e2`,
//! `e2.e1 = gamma e1 + delta e2`, `e2.e2 = epsilon e1 + lambda e2`;
//! left-symmetry cuts out a variety with three two-dimensional components.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::Serialize;

use crate::algebra::{basis, BilinearProduct};
use crate::error::{Error, Result};
use crate::tol;

/// Parameters `(alpha, beta, gamma, delta, epsilon, lambda)` of a
/// torsion-compatible product on `aff(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarietyPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub lambda: f64,
}

impl VarietyPoint {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, epsilon: f64, lambda: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            lambda,
        }
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != 6 {
            return Err(Error::DimensionMismatch {
                expected: 6,
                got: v.len(),
            });
        }
        Ok(Self::new(v[0], v[1], v[2], v[3], v[4], v[5]))
    }

    /// Component-1 point `(alpha, beta)`.
    pub fn from_component1(alpha: f64, beta: f64) -> Self {
        Self::new(alpha, beta, 0.0, 0.0, 0.0, 0.0)
    }

    /// Component-2 point `(alpha, beta)` (requires `alpha != 0` to be
    /// disjoint from component 1).
    pub fn from_component2(alpha: f64, beta: f64) -> Self {
        Self::new(alpha, beta, 0.0, alpha, 0.0, 0.0)
    }

    /// Component-3 point from the free parameters `(gamma, epsilon != 0)`.
    pub fn from_component3(gamma: f64, epsilon: f64) -> Self {
        let g2 = gamma * gamma;
        Self::new(
            2.0 + g2 / epsilon,
            -(gamma * g2 + gamma * epsilon) / (epsilon * epsilon),
            gamma,
            -g2 / epsilon,
            epsilon,
            -gamma,
        )
    }

    /// The product table attached to the parameters.
    pub fn product(&self) -> BilinearProduct {
        BilinearProduct::from_table(
            2,
            &[
                (0, 0, 0, self.alpha),
                (0, 0, 1, self.beta),
                (0, 1, 0, self.gamma),
                (0, 1, 1, self.delta + 1.0),
                (1, 0, 0, self.gamma),
                (1, 0, 1, self.delta),
                (1, 1, 0, self.epsilon),
                (1, 1, 1, self.lambda),
            ],
        )
    }

    /// The four polynomials whose common zero set is the variety.
    pub fn residual(&self) -> [f64; 4] {
        let Self {
            alpha: a,
            beta: b,
            gamma: g,
            delta: d,
            epsilon: e,
            lambda: l,
        } = *self;
        [
            b * e - g * d + g,
            a * d - b * g + b * l - d * d,
            a * e - g * g + g * l - d * e - 2.0 * e,
            b * e - g * d - l,
        ]
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.alpha,
            self.beta,
            self.gamma,
            self.delta,
            self.epsilon,
            self.lambda,
        ]
    }
}

/// The three irreducible components of the variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    I,
    II,
    III,
}

/// Canonical isomorphism-class representatives.
///
/// `F1(alpha)` and `F2(alpha)` are one-parameter families; `A1` and `A2` are
/// the two associative (bi-invariant) products; `R1` and `R2` are the two
/// classes of the third component, distinguished by the sign of `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    F1(f64),
    F2(f64),
    A1,
    A2,
    R1,
    R2,
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::F1(a) => format!("F1({a})"),
            Family::F2(a) => format!("F2({a})"),
            Family::A1 => "A1".into(),
            Family::A2 => "A2".into(),
            Family::R1 => "R1".into(),
            Family::R2 => "R2".into(),
        }
    }

    pub fn component(&self) -> Component {
        match self {
            Family::F1(_) | Family::A1 => Component::I,
            Family::F2(_) | Family::A2 => Component::II,
            Family::R1 | Family::R2 => Component::III,
        }
    }

    /// Variety coordinates of the representative.
    pub fn variety_point(&self) -> VarietyPoint {
        match *self {
            Family::F1(a) => VarietyPoint::from_component1(a, a),
            Family::F2(a) => VarietyPoint::from_component2(a, -a),
            Family::A1 => VarietyPoint::from_component1(1.0, 0.0),
            Family::A2 => VarietyPoint::from_component2(-1.0, 0.0),
            Family::R1 => VarietyPoint::from_component3(0.0, 1.0),
            Family::R2 => VarietyPoint::from_component3(0.0, -1.0),
        }
    }

    /// The canonical product table.
    ///
    /// `A1` and `A2` are the two associative tables (`e1.e1 = e1` /
    /// `e1.e1 = -e1, e2.e1 = -e2`), which sit at the component points
    /// `(1, 0)` and `(-1, 0)` respectively.
    pub fn product(&self) -> BilinearProduct {
        self.variety_point().product()
    }

    /// Valid parameter range: `F2(0)` duplicates `F1(0, beta)` points and is
    /// excluded.
    pub fn is_valid(&self) -> bool {
        !matches!(self, Family::F2(a) if *a == 0.0)
    }
}

/// Special geometric structures attached to particular variety points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Special {
    Complete,
    BiInvariant,
    Hessian,
    Lorentzian,
    SymplecticConnection,
    CoadjointSymplectic,
}

/// Classification outcome for an on-variety point.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyTag {
    pub component: Component,
    pub family: Family,
    pub special: Vec<Special>,
}

#[derive(Debug, Clone, Serialize)]
pub enum Classification {
    OnVariety(FamilyTag),
    OffVariety { residual: [f64; 4] },
}

/// Component membership plus special-structure tags.
///
/// At the intersection line of components I and II (`alpha = delta = 0`)
/// the tie is broken in favor of component I.
pub fn classify(p: &VarietyPoint, tolerance: f64) -> Classification {
    if p.residual_norm() > tolerance {
        return Classification::OffVariety {
            residual: p.residual(),
        };
    }
    let near = |x: f64, y: f64| (x - y).abs() <= tolerance;
    let zero = |x: f64| x.abs() <= tolerance;

    if zero(p.gamma) && zero(p.delta) && zero(p.epsilon) && zero(p.lambda) {
        let mut special = Vec::new();
        if zero(p.alpha) {
            special.push(Special::Complete);
        }
        if near(p.alpha, 1.0) && zero(p.beta) {
            special.push(Special::BiInvariant);
        }
        if near(p.alpha, -1.0) && near(p.beta, -1.0) {
            special.push(Special::Hessian);
            special.push(Special::Lorentzian);
            special.push(Special::SymplecticConnection);
        }
        let family = component1_representative(p.alpha, p.beta, tolerance);
        return Classification::OnVariety(FamilyTag {
            component: Component::I,
            family,
            special,
        });
    }
    if zero(p.gamma) && zero(p.epsilon) && zero(p.lambda) && near(p.delta, p.alpha) {
        let mut special = Vec::new();
        if near(p.alpha, -2.0) && near(p.beta, 2.0) {
            special.push(Special::Hessian);
        }
        if near(p.alpha, -0.5) && near(p.beta, 0.5) {
            special.push(Special::SymplecticConnection);
        }
        if near(p.alpha, -1.0) && zero(p.beta) {
            special.push(Special::BiInvariant);
            special.push(Special::CoadjointSymplectic);
        }
        let family = component2_representative(p.alpha, p.beta, tolerance);
        return Classification::OnVariety(FamilyTag {
            component: Component::II,
            family,
            special,
        });
    }
    if !zero(p.epsilon) {
        let expected = VarietyPoint::from_component3(p.gamma, p.epsilon);
        let dev = p
            .as_array()
            .iter()
            .zip(expected.as_array().iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if dev <= tolerance.max(1e-9) {
            return Classification::OnVariety(FamilyTag {
                component: Component::III,
                family: if p.epsilon > 0.0 {
                    Family::R1
                } else {
                    Family::R2
                },
                special: vec![Special::Hessian],
            });
        }
    }
    Classification::OffVariety {
        residual: p.residual(),
    }
}

fn component1_representative(alpha: f64, beta: f64, tolerance: f64) -> Family {
    // each vertical line is one class, except alpha = 1 where the point
    // (1, 0) is the extra associative class
    if (alpha - 1.0).abs() <= tolerance && beta.abs() <= tolerance {
        Family::A1
    } else {
        Family::F1(alpha)
    }
}

fn component2_representative(alpha: f64, beta: f64, tolerance: f64) -> Family {
    if (alpha + 1.0).abs() <= tolerance && beta.abs() <= tolerance {
        Family::A2
    } else {
        Family::F2(alpha)
    }
}

/// Canonical representative of the isomorphism class of an on-variety point.
pub fn canonical_representative(p: &VarietyPoint, tolerance: f64) -> Result<Family> {
    match classify(p, tolerance) {
        Classification::OnVariety(tag) => Ok(tag.family),
        Classification::OffVariety { residual } => Err(Error::Precondition(format!(
            "point is off the variety (residual {:?})",
            residual
        ))),
    }
}

/// Outcome of the bounded isomorphism search.
#[derive(Debug, Clone)]
pub enum IsomorphismVerdict {
    /// Invertible `P` with `P(x .1 y) = P(x) .2 P(y)`, verified to 1e-10.
    Witness(Matrix2<f64>),
    /// No witness found. When `invariant_mismatch` is set, the verdict is
    /// certified by a discrete isomorphism invariant; otherwise it is only
    /// the outcome of the bounded search.
    NoWitness { invariant_mismatch: Option<String> },
}

impl IsomorphismVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsomorphismVerdict::Witness(_))
    }
}

/// Searches for a 2x2 change of basis intertwining two products:
/// Gauss-Newton from 81 grid starts in `[-3,3]^4`, with exact verification of
/// candidates at 1e-10. "No" answers are backed, where possible, by discrete
/// invariants (translation-subspace dimension, associativity, completeness,
/// signature of `tr(R_a R_b)`), which are isomorphism-invariant.
pub fn lsa_isomorphic(p1: &BilinearProduct, p2: &BilinearProduct) -> Result<IsomorphismVerdict> {
    crate::algebra::check_dim(2, p1.dim())?;
    crate::algebra::check_dim(2, p2.dim())?;

    if let Some(reason) = invariant_mismatch(p1, p2) {
        return Ok(IsomorphismVerdict::NoWitness {
            invariant_mismatch: Some(reason),
        });
    }

    let grid = [-3.0, 0.0, 3.0];
    for a in grid {
        for b in grid {
            for c in grid {
                for d in grid {
                    if let Some(p) = gauss_newton(p1, p2, [a, b, c, d]) {
                        return Ok(IsomorphismVerdict::Witness(p));
                    }
                }
            }
        }
    }
    // identity and the triangular normalizations are natural extra starts
    for start in [
        [1.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 1.0, 1.0],
        [-1.0, 0.0, 0.0, 1.0],
        [1.0, 1.0, 0.0, -1.0],
    ] {
        if let Some(p) = gauss_newton(p1, p2, start) {
            return Ok(IsomorphismVerdict::Witness(p));
        }
    }
    Ok(IsomorphismVerdict::NoWitness {
        invariant_mismatch: None,
    })
}

fn invariant_mismatch(p1: &BilinearProduct, p2: &BilinearProduct) -> Option<String> {
    let d1 = translation_subspace(p1).len();
    let d2 = translation_subspace(p2).len();
    if d1 != d2 {
        return Some(format!("dim N(g): {d1} vs {d2}"));
    }
    let a1 = p1.is_associative(tol::NUMERIC).passed();
    let a2 = p2.is_associative(tol::NUMERIC).passed();
    if a1 != a2 {
        return Some(format!("associativity: {a1} vs {a2}"));
    }
    let c1 = p1.is_complete(tol::NUMERIC);
    let c2 = p2.is_complete(tol::NUMERIC);
    if c1 != c2 {
        return Some(format!("completeness: {c1} vs {c2}"));
    }
    let s1 = right_trace_form_signature(p1);
    let s2 = right_trace_form_signature(p2);
    if s1 != s2 {
        return Some(format!("signature of tr(R_a R_b): {s1:?} vs {s2:?}"));
    }
    None
}

/// Signature `(n_+, n_-, n_0)` of the symmetric form `B(a,b) = tr(R_a R_b)`.
fn right_trace_form_signature(p: &BilinearProduct) -> (usize, usize, usize) {
    let n = p.dim();
    let r: Vec<DMatrix<f64>> = (0..n)
        .map(|i| p.right_mult(&basis(n, i)).unwrap().matrix)
        .collect();
    let b = DMatrix::from_fn(n, n, |i, j| (&r[i] * &r[j]).trace());
    let eig = b.symmetric_eigenvalues();
    let mut sig = (0, 0, 0);
    for v in eig.iter() {
        if *v > 1e-9 {
            sig.0 += 1;
        } else if *v < -1e-9 {
            sig.1 += 1;
        } else {
            sig.2 += 1;
        }
    }
    sig
}

fn iso_residual(p1: &BilinearProduct, p2: &BilinearProduct, p: &Matrix2<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let lhs = p * DVector::from_column_slice(p1.basis_product(i, j));
            let pi: Vec<f64> = p.column(i).iter().copied().collect();
            let pj: Vec<f64> = p.column(j).iter().copied().collect();
            let rhs = p2.apply(&pi, &pj).unwrap();
            for k in 0..2 {
                worst = worst.max((lhs[k] - rhs[k]).abs());
            }
        }
    }
    worst
}

fn gauss_newton(
    p1: &BilinearProduct,
    p2: &BilinearProduct,
    start: [f64; 4],
) -> Option<Matrix2<f64>> {
    // unknowns (p11, p12, p21, p22); residuals F over 4 basis pairs x 2 dims
    let mut x = DVector::from_column_slice(&start);
    for _ in 0..60 {
        let p = Matrix2::new(x[0], x[1], x[2], x[3]);
        let mut f = DVector::zeros(8);
        for i in 0..2 {
            for j in 0..2 {
                let lhs = p * DVector::from_column_slice(p1.basis_product(i, j));
                let pi: Vec<f64> = p.column(i).iter().copied().collect();
                let pj: Vec<f64> = p.column(j).iter().copied().collect();
                let rhs = p2.apply(&pi, &pj).unwrap();
                for k in 0..2 {
                    f[(i * 2 + j) * 2 + k] = lhs[k] - rhs[k];
                }
            }
        }
        if f.abs().max() < 1e-13 {
            break;
        }
        // analytic Jacobian: d/dP of P.v is linear; P -> p2(P ei, P ej) is bilinear
        let mut jac = DMatrix::zeros(8, 4);
        for m in 0..4 {
            let (r, c) = (m / 2, m % 2);
            let mut dp = Matrix2::zeros();
            dp[(r, c)] = 1.0;
            for i in 0..2 {
                for j in 0..2 {
                    let dl = dp * DVector::from_column_slice(p1.basis_product(i, j));
                    let pi: Vec<f64> = p.column(i).iter().copied().collect();
                    let pj: Vec<f64> = p.column(j).iter().copied().collect();
                    let dpi: Vec<f64> = dp.column(i).iter().copied().collect();
                    let dpj: Vec<f64> = dp.column(j).iter().copied().collect();
                    let dr1 = p2.apply(&dpi, &pj).unwrap();
                    let dr2 = p2.apply(&pi, &dpj).unwrap();
                    for k in 0..2 {
                        jac[((i * 2 + j) * 2 + k, m)] = dl[k] - dr1[k] - dr2[k];
                    }
                }
            }
        }
        let step = jac.svd(true, true).solve(&f, 1e-12).ok()?;
        x -= step;
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    let p = Matrix2::new(x[0], x[1], x[2], x[3]);
    if p.determinant().abs() > 1e-6 && iso_residual(p1, p2, &p) <= 1e-10 {
        Some(p)
    } else {
        None
    }
}

/// Basis of `N(g) = {x : L_x = 0}`, the translation subspace.
pub fn translation_subspace(prod: &BilinearProduct) -> Vec<DVector<f64>> {
    let n = prod.dim();
    // columns: vec(L_{e_a})
    let mut m = DMatrix::zeros(n * n, n);
    for a in 0..n {
        let l = prod.left_mult(&basis(n, a)).unwrap().matrix;
        for r in 0..n {
            for c in 0..n {
                m[(r * n + c, a)] = l[(r, c)];
            }
        }
    }
    null_space(&m, 1e-10)
}

pub(crate) fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    // pad wide matrices with zero rows so the thin SVD carries the full V
    let work = if m.nrows() < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(true, true);
    let v_t = svd.v_t.expect("svd with v");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let thresh = rel_tol * smax.max(1.0);
    let rank = svd.singular_values.iter().filter(|s| **s > thresh).count();
    (rank..cols).map(|r| v_t.row(r).transpose()).collect()
}

/// One row of the machine-readable atlas: a canonical family with its
/// variety coordinates, geometry tags, representation and transformation
/// group data.
#[derive(Debug, Clone, Serialize)]
pub struct AtlasEntry {
    pub family: String,
    pub component: Component,
    pub parameter: Option<f64>,
    pub variety_point: [f64; 6],
    pub special: Vec<Special>,
    pub complete: bool,
    pub associative: bool,
    pub representation: String,
    pub aff_case: u8,
    pub aff_dim: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Transformation-group dimensions per case, `(case, dim)`.
pub fn aff_case_dims() -> [(u8, u8); 6] {
    [(1, 4), (2, 4), (3, 4), (4, 4), (5, 6), (6, 2)]
}

/// The full classification narrative as data: the six canonical families.
/// Parameterized families are listed once with `parameter: None` (their
/// `alpha` is free); the per-`alpha` data (`aff_case` for the exceptional
/// values) is documented in [`crate::transform::case_of_family`].
pub fn atlas_entries() -> Vec<AtlasEntry> {
    let families = [
        Family::F1(f64::NAN),
        Family::F2(f64::NAN),
        Family::A1,
        Family::A2,
        Family::R1,
        Family::R2,
    ];
    families
        .iter()
        .map(|f| {
            let generic = match f {
                Family::F1(_) => Family::F1(2.0),
                Family::F2(_) => Family::F2(2.0),
                other => *other,
            };
            let p = generic.product();
            let tag = match classify(&generic.variety_point(), tol::EXACT) {
                Classification::OnVariety(tag) => tag,
                Classification::OffVariety { .. } => unreachable!("canonical points lie on V"),
            };
            let (case, dim) = crate::transform::case_of_family(&generic);
            let notes = match f {
                Family::F1(_) => Some(
                    "complete exactly at alpha = 0 (case 5, dim 6); case 3 at alpha = 1".into(),
                ),
                Family::F2(_) => Some("alpha != 0; case 3 at alpha = -1".into()),
                _ => None,
            };
            AtlasEntry {
                family: match f {
                    Family::F1(_) => "F1(alpha)".into(),
                    Family::F2(_) => "F2(alpha)".into(),
                    other => other.label(),
                },
                component: f.component(),
                parameter: None,
                variety_point: generic.variety_point().as_array(),
                special: tag.special,
                complete: p.is_complete(tol::EXACT),
                associative: p.is_associative(tol::EXACT).passed(),
                representation: crate::reps::RepFormula::for_family(&generic)
                    .map(|r| r.label())
                    .unwrap_or_default(),
                aff_case: case,
                aff_dim: dim,
                notes,
            }
        })
        .collect()
}
