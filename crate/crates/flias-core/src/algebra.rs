//! Lie algebras and bilinear products as structure constants, the
//! left-symmetric / associative axiom checkers, multiplication operators,
//! and the explicit products on `aff(R^n)` and `gl(n) + gl(n)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{max_abs_diff, Tensor3};
use crate::tol;

/// A finite-dimensional real Lie algebra given by structure constants
/// `c[i][j][k]` = coefficient of `e_k` in `[e_i, e_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    c: Tensor3,
}

impl LieAlgebra {
    /// Validates antisymmetry and the Jacobi identity at [`tol::EXACT`].
    pub fn new(c: Tensor3) -> Result<Self> {
        let alg = Self::new_unchecked(c);
        let anti = alg.antisymmetry_residual();
        if anti > tol::EXACT {
            return Err(Error::Precondition(format!(
                "bracket not antisymmetric (residual {anti:.3e})"
            )));
        }
        let jac = alg.jacobi_residual();
        if jac > tol::EXACT {
            return Err(Error::Precondition(format!(
                "Jacobi identity fails (residual {jac:.3e})"
            )));
        }
        Ok(alg)
    }

    /// No validation; used for candidate tables whose defects are the point.
    pub fn new_unchecked(c: Tensor3) -> Self {
        Self { c }
    }

    /// Build from the nonzero brackets `[e_i, e_j] = sum v e_k` with `i < j`;
    /// the antisymmetric counterparts are filled in.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = Tensor3::zeros(dim);
        for &(i, j, k, v) in brackets {
            *c.get_mut(i, j, k) += v;
            *c.get_mut(j, i, k) -= v;
        }
        Self::new(c)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new_unchecked(Tensor3::zeros(dim))
    }

    /// `aff(R)`: `[e_1, e_2] = e_2`.
    pub fn aff_r() -> Self {
        Self::from_brackets(2, &[(0, 1, 1, 1.0)]).expect("aff(R) table")
    }

    /// `aff(R^n) = R^n x| gl(n)`, basis: `n` translations then the matrix
    /// units `E_{rc}` in row-major order.
    pub fn aff_rn(n: usize) -> Self {
        let dim = n + n * n;
        let e = |r: usize, c: usize| n + r * n + c;
        let mut t = Tensor3::zeros(dim);
        // [f, g] = fg - gf on the gl(n) block
        for r1 in 0..n {
            for c1 in 0..n {
                for r2 in 0..n {
                    for c2 in 0..n {
                        if c1 == r2 {
                            *t.get_mut(e(r1, c1), e(r2, c2), e(r1, c2)) += 1.0;
                        }
                        if c2 == r1 {
                            *t.get_mut(e(r1, c1), e(r2, c2), e(r2, c1)) -= 1.0;
                        }
                    }
                }
            }
        }
        // [f, x] = f(x) for a translation x
        for r in 0..n {
            for c in 0..n {
                *t.get_mut(e(r, c), c, r) += 1.0;
                *t.get_mut(c, e(r, c), r) -= 1.0;
            }
        }
        Self::new(t).expect("aff(R^n) table")
    }

    /// `gl(n) +_ad gl(n)`: elements `(t, s)` with
    /// `[(t1,s1),(t2,s2)] = ([t1,t2] + [s1,t2] - [s2,t1], [s1,s2])`.
    /// Basis: the `t`-block matrix units then the `s`-block ones.
    pub fn gl_gl(n: usize) -> Self {
        let n2 = n * n;
        let dim = 2 * n2;
        let ti = |r: usize, c: usize| r * n + c;
        let si = |r: usize, c: usize| n2 + r * n + c;
        let mut t = Tensor3::zeros(dim);
        let mut add_comm = |i: usize,
                            j: usize,
                            out: &dyn Fn(usize, usize) -> usize,
                            r1: usize,
                            c1: usize,
                            r2: usize,
                            c2: usize,
                            sign: f64| {
            // contribution of [E_{r1c1}, E_{r2c2}] to the bracket of basis i, j
            if c1 == r2 {
                *t.get_mut(i, j, out(r1, c2)) += sign;
            }
            if c2 == r1 {
                *t.get_mut(i, j, out(r2, c1)) -= sign;
            }
        };
        for r1 in 0..n {
            for c1 in 0..n {
                for r2 in 0..n {
                    for c2 in 0..n {
                        // t-t: [t1, t2] lands in t
                        add_comm(ti(r1, c1), ti(r2, c2), &ti, r1, c1, r2, c2, 1.0);
                        // s-s: [s1, s2] lands in s
                        add_comm(si(r1, c1), si(r2, c2), &si, r1, c1, r2, c2, 1.0);
                        // s-t: ad action, [s, t'] lands in t
                        add_comm(si(r1, c1), ti(r2, c2), &ti, r1, c1, r2, c2, 1.0);
                        add_comm(ti(r2, c2), si(r1, c1), &ti, r1, c1, r2, c2, -1.0);
                    }
                }
            }
        }
        Self::new(t).expect("gl+gl table")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn constants(&self) -> &Tensor3 {
        &self.c
    }

    /// `[x, y]` for coefficient vectors of length `dim`.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.c.contract(x, y))
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[f64] {
        self.c.pair(i, j)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.c.get(i, j, k) + self.c.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.c.contract(self.c.pair(i, j), &basis(n, k));
                    let b = self.c.contract(self.c.pair(j, k), &basis(n, i));
                    let c = self.c.contract(self.c.pair(k, i), &basis(n, j));
                    for l in 0..n {
                        worst = worst.max((a[l] + b[l] + c[l]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Structure constants in the basis whose columns are given by `p`.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<Self> {
        Ok(Self::new_unchecked(change_basis_tensor(&self.c, p)?))
    }
}

/// A candidate left-symmetric product: `gamma[i][j][k]` = coefficient of
/// `e_k` in `e_i . e_j`. Doubles as a left-invariant connection in the
/// invariant frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearProduct {
    gamma: Tensor3,
}

impl BilinearProduct {
    pub fn new(gamma: Tensor3) -> Self {
        Self { gamma }
    }

    pub fn from_table(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Self {
        Self::new(Tensor3::from_triples(dim, entries))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(Tensor3::zeros(dim))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn coefficients(&self) -> &Tensor3 {
        &self.gamma
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma.get(i, j, k)
    }

    /// `x . y` for coefficient vectors.
    pub fn apply(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.gamma.contract(x, y))
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &[f64] {
        self.gamma.pair(i, j)
    }

    /// `(x, y, z) = (x.y).z - x.(y.z)` on basis indices.
    pub fn associator(&self, i: usize, j: usize, k: usize) -> Vec<f64> {
        let n = self.dim();
        let xy_z = self.gamma.contract(self.gamma.pair(i, j), &basis(n, k));
        let x_yz = self.gamma.contract(&basis(n, i), self.gamma.pair(j, k));
        xy_z.iter().zip(&x_yz).map(|(a, b)| a - b).collect()
    }

    /// Left multiplication `L_a(b) = a . b`.
    pub fn left_mult(&self, a: &[f64]) -> Result<OperatorMatrix> {
        self.mult_operator(a, OperatorKind::Left)
    }

    /// Right multiplication `R_a(b) = b . a`.
    pub fn right_mult(&self, a: &[f64]) -> Result<OperatorMatrix> {
        self.mult_operator(a, OperatorKind::Right)
    }

    fn mult_operator(&self, a: &[f64], kind: OperatorKind) -> Result<OperatorMatrix> {
        let n = self.dim();
        check_dim(n, a.len())?;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let col = match kind {
                OperatorKind::Left => self.gamma.contract(a, &basis(n, j)),
                OperatorKind::Right => self.gamma.contract(&basis(n, j), a),
            };
            for k in 0..n {
                m[(k, j)] = col[k];
            }
        }
        Ok(OperatorMatrix {
            kind,
            vector: DVector::from_column_slice(a),
            matrix: m,
        })
    }

    /// The Lie algebra whose bracket is the commutator `x.y - y.x`.
    ///
    /// Unchecked: the commutator is always antisymmetric, but satisfies
    /// Jacobi only when the product is left-symmetric.
    pub fn commutator_algebra(&self) -> LieAlgebra {
        let n = self.dim();
        let mut c = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    *c.get_mut(i, j, k) = self.gamma.get(i, j, k) - self.gamma.get(j, i, k);
                }
            }
        }
        LieAlgebra::new_unchecked(c)
    }

    /// Checks the two left-symmetry axioms against `alg`:
    /// associator symmetry `(x,y,z) = (y,x,z)` and torsion compatibility
    /// `x.y - y.x = [x,y]`, both over all basis tuples.
    pub fn is_left_symmetric(&self, alg: &LieAlgebra, tolerance: f64) -> Result<LeftSymmetryCheck> {
        check_dim(alg.dim(), self.dim())?;
        let n = self.dim();
        let mut assoc: f64 = 0.0;
        let mut assoc_worst = (0, 0, 0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = max_abs_diff(&self.associator(i, j, k), &self.associator(j, i, k));
                    if d > assoc {
                        assoc = d;
                        assoc_worst = (i, j, k);
                    }
                }
            }
        }
        let mut torsion: f64 = 0.0;
        let mut torsion_worst = (0, 0);
        for i in 0..n {
            for j in 0..n {
                let mut d: f64 = 0.0;
                for k in 0..n {
                    let r = self.gamma.get(i, j, k)
                        - self.gamma.get(j, i, k)
                        - alg.constants().get(i, j, k);
                    d = d.max(r.abs());
                }
                if d > torsion {
                    torsion = d;
                    torsion_worst = (i, j);
                }
            }
        }
        Ok(LeftSymmetryCheck {
            associator_symmetry: assoc,
            associator_worst: assoc_worst,
            torsion,
            torsion_worst,
            tolerance,
        })
    }

    /// Maximum associator magnitude over basis triples.
    pub fn is_associative(&self, tolerance: f64) -> AssociativityCheck {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        let mut at = (0, 0, 0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = self
                        .associator(i, j, k)
                        .iter()
                        .fold(0.0f64, |m, v| m.max(v.abs()));
                    if d > worst {
                        worst = d;
                        at = (i, j, k);
                    }
                }
            }
        }
        AssociativityCheck {
            max_associator: worst,
            worst: at,
            tolerance,
        }
    }

    /// Geodesic completeness criterion: `tr R_b = 0` for all `b`, which by
    /// trace linearity reduces to the basis vectors.
    pub fn is_complete(&self, tolerance: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            let r = self.right_mult(&basis(n, i)).expect("basis length");
            r.matrix.trace().abs() <= tolerance
        })
    }

    /// Product coefficients in the basis whose columns are given by `p`.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<Self> {
        Ok(Self::new(change_basis_tensor(&self.gamma, p)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    Left,
    Right,
}

/// Matrix of `L_a` or `R_a` in the given basis, with the defining vector.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub vector: DVector<f64>,
    pub matrix: DMatrix<f64>,
}

/// Report of the two left-symmetry axioms.
#[derive(Debug, Clone, Serialize)]
pub struct LeftSymmetryCheck {
    /// max over basis triples of |(x,y,z) - (y,x,z)|
    pub associator_symmetry: f64,
    pub associator_worst: (usize, usize, usize),
    /// max over basis pairs of |x.y - y.x - [x,y]|
    pub torsion: f64,
    pub torsion_worst: (usize, usize),
    pub tolerance: f64,
}

impl LeftSymmetryCheck {
    pub fn passed(&self) -> bool {
        self.associator_symmetry <= self.tolerance && self.torsion <= self.tolerance
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AssociativityCheck {
    pub max_associator: f64,
    pub worst: (usize, usize, usize),
    pub tolerance: f64,
}

impl AssociativityCheck {
    pub fn passed(&self) -> bool {
        self.max_associator <= self.tolerance
    }
}

/// The associative product `(a,f).(b,g) = (f(b), f o g)` on
/// `aff(R^n) = R^n x| gl(n)`, paired with its Lie algebra.
pub fn aff_rn_product(n: usize) -> (LieAlgebra, BilinearProduct) {
    let dim = n + n * n;
    let e = |r: usize, c: usize| n + r * n + c;
    let mut g = Tensor3::zeros(dim);
    // (0,f).(b,0) = (f(b), 0)
    for r in 0..n {
        for c in 0..n {
            *g.get_mut(e(r, c), c, r) = 1.0;
        }
    }
    // (0,f).(0,g) = (0, f o g)
    for r1 in 0..n {
        for c1 in 0..n {
            for c2 in 0..n {
                *g.get_mut(e(r1, c1), e(c1, c2), e(r1, c2)) = 1.0;
            }
        }
    }
    (LieAlgebra::aff_rn(n), BilinearProduct::new(g))
}

/// Which formula fills the second slot of the product on `gl(n) + gl(n)`.
///
/// The first slot is `t1 t2 + t1 s2 + s1 t2` in both variants. `S1T1`
/// (`s1 o t1`, depending only on the first factor) fails associativity;
/// `S1S2` (`s1 o s2`) is associative, unital with unit `(0, I)`, and
/// compatible with the `gl +_ad gl` bracket. Both are provided so the
/// verdict can be established by brute force rather than assumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GlGlSecondSlot {
    S1T1,
    S1S2,
}

/// Product on `gl(n) + gl(n)`:
/// `(t1,s1).(t2,s2) = (t1 t2 + t1 s2 + s1 t2, <second slot>)`.
pub fn gl_gl_product(n: usize, slot: GlGlSecondSlot) -> (LieAlgebra, BilinearProduct) {
    let n2 = n * n;
    let dim = 2 * n2;
    let ti = |r: usize, c: usize| r * n + c;
    let si = |r: usize, c: usize| n2 + r * n + c;
    let mut g = Tensor3::zeros(dim);
    // compositions E_{r1 c1} o E_{r2 c2} = delta_{c1 r2} E_{r1 c2}
    for r1 in 0..n {
        for c1 in 0..n {
            for c2 in 0..n {
                let tgt = |r: usize, c: usize| (r, c);
                let (rr, cc) = tgt(r1, c2);
                // t1 t2
                *g.get_mut(ti(r1, c1), ti(c1, c2), ti(rr, cc)) += 1.0;
                // t1 s2
                *g.get_mut(ti(r1, c1), si(c1, c2), ti(rr, cc)) += 1.0;
                // s1 t2
                *g.get_mut(si(r1, c1), ti(c1, c2), ti(rr, cc)) += 1.0;
                match slot {
                    GlGlSecondSlot::S1S2 => {
                        *g.get_mut(si(r1, c1), si(c1, c2), si(rr, cc)) += 1.0;
                    }
                    GlGlSecondSlot::S1T1 => {
                        *g.get_mut(si(r1, c1), ti(c1, c2), si(rr, cc)) += 1.0;
                    }
                }
            }
        }
    }
    (LieAlgebra::gl_gl(n), BilinearProduct::new(g))
}

/// Semidirect left-symmetric product on `n + h`:
/// `(n1,h1).(n2,h2) = (n1 . n2 + action(h1)(n2), h1 * h2)`.
///
/// `action[i]` is the matrix of the `i`-th `h`-basis vector acting on `n`.
/// Basis order of the result: the `n` block first, then the `h` block.
/// The caller verifies the result with [`BilinearProduct::is_left_symmetric`]
/// against the intended bracket.
pub fn semidirect_lsa(
    n_prod: &BilinearProduct,
    h_prod: &BilinearProduct,
    action: &[DMatrix<f64>],
) -> Result<BilinearProduct> {
    let nd = n_prod.dim();
    let hd = h_prod.dim();
    if action.len() != hd {
        return Err(Error::DimensionMismatch {
            expected: hd,
            got: action.len(),
        });
    }
    for m in action {
        if m.nrows() != nd || m.ncols() != nd {
            return Err(Error::DimensionMismatch {
                expected: nd,
                got: m.nrows().max(m.ncols()),
            });
        }
    }
    let dim = nd + hd;
    let mut g = Tensor3::zeros(dim);
    for i in 0..nd {
        for j in 0..nd {
            for k in 0..nd {
                *g.get_mut(i, j, k) = n_prod.coeff(i, j, k);
            }
        }
    }
    for i in 0..hd {
        for j in 0..hd {
            for k in 0..hd {
                *g.get_mut(nd + i, nd + j, nd + k) = h_prod.coeff(i, j, k);
            }
        }
    }
    // (0,h).(n,0) = (action(h)(n), 0)
    for (i, act) in action.iter().enumerate() {
        for j in 0..nd {
            for k in 0..nd {
                *g.get_mut(nd + i, j, k) = act[(k, j)];
            }
        }
    }
    Ok(BilinearProduct::new(g))
}

pub(crate) fn basis(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

fn change_basis_tensor(t: &Tensor3, p: &DMatrix<f64>) -> Result<Tensor3> {
    let n = t.dim();
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.nrows().max(p.ncols()),
        });
    }
    let p_inv = p.clone().try_inverse().ok_or(Error::Singular {
        context: "basis change",
        det: 0.0,
    })?;
    let mut out = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let ui: Vec<f64> = p.column(i).iter().copied().collect();
            let uj: Vec<f64> = p.column(j).iter().copied().collect();
            let prod = t.contract(&ui, &uj);
            let back = &p_inv * DVector::from_column_slice(&prod);
            for k in 0..n {
                *out.get_mut(i, j, k) = back[k];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{Family, VarietyPoint};

    #[test]
    fn bracket_on_aff_r() {
        let alg = LieAlgebra::aff_r();
        let e1 = basis(2, 0);
        let e2 = basis(2, 1);
        assert_eq!(alg.bracket(&e1, &e2).unwrap(), vec![0.0, 1.0]);
        assert_eq!(alg.bracket(&e2, &e1).unwrap(), vec![0.0, -1.0]);
        let x = vec![0.3, -1.7];
        assert_eq!(alg.bracket(&x, &x).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let alg = LieAlgebra::aff_r();
        assert!(alg.bracket(&[1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn left_symmetry_of_component_one_family() {
        let alg = LieAlgebra::aff_r();
        let p = VarietyPoint::new(2.0, 3.0, 0.0, 0.0, 0.0, 0.0).product();
        assert!(p.is_left_symmetric(&alg, tol::EXACT).unwrap().passed());

        let zero = BilinearProduct::zero(2);
        assert!(zero
            .is_left_symmetric(&LieAlgebra::abelian(2), tol::EXACT)
            .unwrap()
            .passed());
    }

    #[test]
    fn torsion_failure_is_reported() {
        // e2.e2 = e1 and nothing else: commutator is zero, bracket is not.
        let p = BilinearProduct::from_table(2, &[(1, 1, 0, 1.0)]);
        let chk = p
            .is_left_symmetric(&LieAlgebra::aff_r(), tol::EXACT)
            .unwrap();
        assert!(!chk.passed());
        assert!((chk.torsion - 1.0).abs() < 1e-15);
        assert_eq!(chk.torsion_worst, (0, 1));
    }

    #[test]
    fn associativity_checks() {
        let (_, p) = aff_rn_product(2);
        assert!(p.is_associative(tol::EXACT).passed());

        assert!(Family::A1.product().is_associative(tol::EXACT).passed());

        // F1(1) has associator (e1,e1,e1) = -e2
        let f11 = Family::F1(1.0).product();
        let chk = f11.is_associative(tol::EXACT);
        assert!(!chk.passed());
        assert_eq!(f11.associator(0, 0, 0), vec![0.0, -1.0]);
    }

    #[test]
    fn multiplication_operators() {
        let a1 = Family::A1.product();
        let r = a1.right_mult(&basis(2, 0)).unwrap();
        assert!((r.matrix.trace() - 1.0).abs() < 1e-15);
        assert_eq!(r.matrix[(0, 0)], 1.0); // e1.e1 = e1
        assert_eq!(r.matrix[(1, 1)], 0.0); // e2.e1 = 0

        let f00 = Family::F1(0.0).product();
        for i in 0..2 {
            let r = f00.right_mult(&basis(2, i)).unwrap();
            assert_eq!(r.matrix.trace(), 0.0);
        }

        let l = a1.left_mult(&[0.0, 0.0]).unwrap();
        assert_eq!(l.matrix, DMatrix::zeros(2, 2));
    }

    #[test]
    fn completeness_criterion() {
        assert!(Family::F1(0.0).product().is_complete(tol::EXACT));
        assert!(!Family::A1.product().is_complete(tol::EXACT));
        // whole vertical line alpha = 0 is complete
        let p = VarietyPoint::new(0.0, 7.0, 0.0, 0.0, 0.0, 0.0).product();
        assert!(p.is_complete(tol::EXACT));
    }

    #[test]
    fn trace_linearity_of_right_operators() {
        let p = Family::R1.product();
        let a = [0.4, -1.1];
        let b = [2.2, 0.6];
        let ab = [a[0] + b[0], a[1] + b[1]];
        let t = |v: &[f64]| p.right_mult(v).unwrap().matrix.trace();
        assert!((t(&ab) - t(&a) - t(&b)).abs() < 1e-12);
    }

    #[test]
    fn aff_rn_small_table() {
        let (alg, p) = aff_rn_product(1);
        // basis: e1 = translation, e2 = gl(1)
        assert_eq!(p.basis_product(1, 0), &[1.0, 0.0]);
        assert_eq!(p.basis_product(1, 1), &[0.0, 1.0]);
        assert_eq!(p.basis_product(0, 0), &[0.0, 0.0]);
        assert_eq!(p.basis_product(0, 1), &[0.0, 0.0]);
        assert!(p.is_left_symmetric(&alg, tol::EXACT).unwrap().passed());
    }

    #[test]
    fn aff_rn_translations_are_a_two_sided_ideal() {
        let n = 2;
        let (_, p) = aff_rn_product(n);
        let dim = n + n * n;
        // (x,0).(b,g) = 0 and (a,f).(x,0) stays in the translation block
        for tr in 0..n {
            for j in 0..dim {
                assert_eq!(p.basis_product(tr, j), vec![0.0; dim].as_slice());
                let img = p.basis_product(j, tr);
                assert!(img[n..].iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn aff_rn_associative_up_to_n3() {
        for n in 1..=3 {
            let (alg, p) = aff_rn_product(n);
            assert!(p.is_associative(tol::EXACT).passed());
            assert!(p.is_left_symmetric(&alg, tol::EXACT).unwrap().passed());
        }
    }

    #[test]
    fn gl_gl_variants() {
        // corrected slot: unital with unit (0, I)
        let (alg, p) = gl_gl_product(1, GlGlSecondSlot::S1S2);
        assert!(p.is_associative(tol::EXACT).passed());
        assert!(p.is_left_symmetric(&alg, tol::EXACT).unwrap().passed());
        let unit = [0.0, 1.0];
        assert_eq!(p.apply(&unit, &[2.0, 3.0]).unwrap(), vec![2.0, 3.0]);
        assert_eq!(p.apply(&[2.0, 3.0], &unit).unwrap(), vec![2.0, 3.0]);

        // the s1*t1 slot fails associativity already for n = 1
        let (_, q) = gl_gl_product(1, GlGlSecondSlot::S1T1);
        assert!(!q.is_associative(tol::EXACT).passed());
    }

    #[test]
    fn gl_gl_n2_axioms() {
        let (alg, p) = gl_gl_product(2, GlGlSecondSlot::S1S2);
        assert!(p.is_associative(tol::EXACT).passed());
        assert!(p.is_left_symmetric(&alg, tol::EXACT).unwrap().passed());
    }

    #[test]
    fn semidirect_zero_case() {
        let n_prod = BilinearProduct::zero(2);
        let h_prod = BilinearProduct::zero(2);
        let action = vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)];
        let p = semidirect_lsa(&n_prod, &h_prod, &action).unwrap();
        assert!(p
            .is_left_symmetric(&LieAlgebra::abelian(4), tol::EXACT)
            .unwrap()
            .passed());
    }

    #[test]
    fn associative_implies_left_symmetric_for_commutator() {
        // random basis changes of known associative products stay associative
        let mut rng = crate::verify::seeded_rng(11);
        for _ in 0..10 {
            let (_, p) = aff_rn_product(1);
            let m = DMatrix::from_fn(2, 2, |_, _| crate::verify::uniform(&mut rng, -2.0, 2.0));
            if m.determinant().abs() < 0.1 {
                continue;
            }
            let q = p.change_basis(&m).unwrap();
            assert!(q.is_associative(1e-9).passed());
            let alg = q.commutator_algebra();
            assert!(alg.jacobi_residual() < 1e-9);
            assert!(q.is_left_symmetric(&alg, 1e-9).unwrap().passed());
        }
    }
}
