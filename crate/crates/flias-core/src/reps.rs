//! Étale affine representations of `Aff(R)_0`, the exponential map, the
//! infinitesimal representation `theta(x) = (x, L_x)`, developing maps, and
//! their verification contracts.
//!
//! Each flat structure in the atlas has a closed-form homomorphism
//! `rho: Aff(R)_0 -> Aff(R^2)` written as a homogeneous 3x3 matrix with last
//! row `(0, 0, 1)`. The translation column is the developing map; its
//! differential at the identity is invertible (étale), and
//! `d/dt rho(exp(t e_i))` at `t = 0` recovers `theta(e_i)`.

use nalgebra::{Matrix2, Matrix3, Vector2};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{basis, BilinearProduct};
use crate::atlas::Family;
use crate::error::{Error, Result};

/// Element of the identity component `Aff(R)_0 = {(x, y) : x > 0}` with
/// multiplication `(a,b)(c,d) = (ac, ad + b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupElement {
    pub x: f64,
    pub y: f64,
}

impl GroupElement {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "group element needs x > 0, got {x}"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn identity() -> Self {
        Self { x: 1.0, y: 0.0 }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        Self {
            x: self.x * other.x,
            y: self.x * other.y + self.y,
        }
    }

    pub fn inverse(self) -> Self {
        Self {
            x: 1.0 / self.x,
            y: -self.y / self.x,
        }
    }
}

/// Group exponential of `aff(R)`:
/// `exp(a, b) = (e^a, b (e^a - 1) / a)` for `a != 0`, `(1, b)` for `a = 0`.
pub fn group_exp(a: f64, b: f64) -> GroupElement {
    if a == 0.0 {
        GroupElement { x: 1.0, y: b }
    } else {
        let ea = a.exp();
        GroupElement {
            x: ea,
            y: b / a * (ea - 1.0),
        }
    }
}

/// The closed-form affine representations, one per atlas family (with the
/// exceptional parameter values split off into their own formulas).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RepFormula {
    /// Family `F1(alpha)`, `alpha` outside {0, 1}.
    F1 {
        alpha: f64,
    },
    F1AlphaOne,
    F1AlphaZero,
    /// Family `F2(alpha)`, `alpha` outside {0, -1}.
    F2 {
        alpha: f64,
    },
    F2AlphaMinusOne,
    A1,
    A2,
    // TODO: exhibit the affine map intertwining R1 and R2; the two are
    // equivalent as affine representations although the products are not
    // isomorphic.
    R1,
    R2,
}

impl RepFormula {
    /// The representation paired with a canonical family, routing the
    /// exceptional parameters to their dedicated formulas.
    pub fn for_family(family: &Family) -> Result<Self> {
        Ok(match *family {
            Family::F1(0.0) => RepFormula::F1AlphaZero,
            Family::F1(1.0) => RepFormula::F1AlphaOne,
            Family::F1(a) => RepFormula::F1 { alpha: a },
            Family::F2(0.0) => return Err(Error::InvalidParameter("F2(0) is excluded".into())),
            Family::F2(-1.0) => RepFormula::F2AlphaMinusOne,
            Family::F2(a) => RepFormula::F2 { alpha: a },
            Family::A1 => RepFormula::A1,
            Family::A2 => RepFormula::A2,
            Family::R1 => RepFormula::R1,
            Family::R2 => RepFormula::R2,
        })
    }

    /// The family whose left-symmetric product this representation
    /// differentiates to.
    pub fn paired_family(&self) -> Family {
        match *self {
            RepFormula::F1 { alpha } => Family::F1(alpha),
            RepFormula::F1AlphaOne => Family::F1(1.0),
            RepFormula::F1AlphaZero => Family::F1(0.0),
            RepFormula::F2 { alpha } => Family::F2(alpha),
            RepFormula::F2AlphaMinusOne => Family::F2(-1.0),
            RepFormula::A1 => Family::A1,
            RepFormula::A2 => Family::A2,
            RepFormula::R1 => Family::R1,
            RepFormula::R2 => Family::R2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            RepFormula::F1 { alpha } => format!("rho1({alpha})"),
            RepFormula::F1AlphaOne => "rho1(1)".into(),
            RepFormula::F1AlphaZero => "rho1(0)".into(),
            RepFormula::F2 { alpha } => format!("rho2({alpha})"),
            RepFormula::F2AlphaMinusOne => "rho2(-1)".into(),
            RepFormula::A1 => "rho1[A1]".into(),
            RepFormula::A2 => "rho2[A2]".into(),
            RepFormula::R1 => "rho3".into(),
            RepFormula::R2 => "rho4".into(),
        }
    }

    /// Evaluate the homogeneous affine matrix at a group element.
    pub fn eval(&self, g: GroupElement) -> Matrix3<f64> {
        let (x, y) = (g.x, g.y);
        match *self {
            RepFormula::F1 { alpha: al } => {
                let xa = x.powf(al);
                Matrix3::new(
                    xa,
                    0.0,
                    (xa - 1.0) / al,
                    al / (al - 1.0) * (xa - x),
                    x,
                    y + (xa - al * x) / (al - 1.0) + 1.0,
                    0.0,
                    0.0,
                    1.0,
                )
            }
            RepFormula::F1AlphaOne => Matrix3::new(
                x,
                0.0,
                x - 1.0,
                x * x.ln(),
                x,
                1.0 + y + x * (x.ln() - 1.0),
                0.0,
                0.0,
                1.0,
            ),
            RepFormula::F1AlphaZero => Matrix3::new(1.0, 0.0, x.ln(), 0.0, x, y, 0.0, 0.0, 1.0),
            RepFormula::F2 { alpha: al } => {
                let xa = x.powf(al);
                let xa1 = x.powf(al + 1.0);
                Matrix3::new(
                    xa,
                    0.0,
                    (xa - 1.0) / al,
                    al * xa * (y - x + 1.0),
                    xa1,
                    xa * (y + 1.0) - (al * xa1 + 1.0) / (al + 1.0),
                    0.0,
                    0.0,
                    1.0,
                )
            }
            RepFormula::F2AlphaMinusOne => Matrix3::new(
                1.0 / x,
                0.0,
                1.0 - 1.0 / x,
                1.0 - y / x - 1.0 / x,
                1.0,
                1.0 / x + y / x - 1.0 + x.ln(),
                0.0,
                0.0,
                1.0,
            ),
            RepFormula::A1 => Matrix3::new(x, 0.0, x - 1.0, 0.0, x, y, 0.0, 0.0, 1.0),
            RepFormula::A2 => Matrix3::new(
                1.0 / x,
                0.0,
                1.0 - 1.0 / x,
                -y / x,
                1.0,
                y / x,
                0.0,
                0.0,
                1.0,
            ),
            RepFormula::R1 => Matrix3::new(
                x * x,
                x * y,
                0.5 * (x * x + y * y - 1.0),
                0.0,
                x,
                y,
                0.0,
                0.0,
                1.0,
            ),
            RepFormula::R2 => Matrix3::new(
                x * x,
                -x * y,
                0.5 * (x * x - y * y - 1.0),
                0.0,
                x,
                y,
                0.0,
                0.0,
                1.0,
            ),
        }
    }

    /// The developing map `Q`: the translation column of the matrix.
    pub fn developing(&self, g: GroupElement) -> Vector2<f64> {
        let m = self.eval(g);
        Vector2::new(m[(0, 2)], m[(1, 2)])
    }

    /// All formula shapes, with the parameterized ones instantiated at the
    /// given sample values (invalid values skipped).
    pub fn catalog(alphas: &[f64]) -> Vec<RepFormula> {
        let mut out = vec![
            RepFormula::F1AlphaZero,
            RepFormula::F1AlphaOne,
            RepFormula::F2AlphaMinusOne,
            RepFormula::A1,
            RepFormula::A2,
            RepFormula::R1,
            RepFormula::R2,
        ];
        for &a in alphas {
            if a != 0.0 && a != 1.0 {
                out.push(RepFormula::F1 { alpha: a });
            }
            if a != 0.0 && a != -1.0 {
                out.push(RepFormula::F2 { alpha: a });
            }
        }
        out
    }
}

/// Result of the randomized homomorphism test.
#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismCheck {
    pub samples: usize,
    pub max_residual: f64,
    pub worst_pair: ((f64, f64), (f64, f64)),
    pub tolerance: f64,
}

impl HomomorphismCheck {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

/// `max || rep(g1 g2) - rep(g1) rep(g2) || / max(1, || rep(g1 g2) ||)` over
/// random pairs, with `x` sampled as `exp(U(-2, 2))` and `y` as `U(-3, 3)`.
///
/// The residual is scaled: entries grow like `x^(alpha+1)` (over 1e6 at the
/// sampling extremes for `alpha = 3`), where an absolute comparison would
/// only measure double-precision rounding.
pub fn verify_homomorphism<F>(
    rep: F,
    samples: usize,
    tolerance: f64,
    rng: &mut impl Rng,
) -> HomomorphismCheck
where
    F: Fn(GroupElement) -> Matrix3<f64>,
{
    let mut worst = 0.0f64;
    let mut worst_pair = ((1.0, 0.0), (1.0, 0.0));
    for _ in 0..samples {
        let g1 = GroupElement {
            x: rng.gen_range(-2.0..2.0f64).exp(),
            y: rng.gen_range(-3.0..3.0),
        };
        let g2 = GroupElement {
            x: rng.gen_range(-2.0..2.0f64).exp(),
            y: rng.gen_range(-3.0..3.0),
        };
        let lhs = rep(g1.mul(g2));
        let rhs = rep(g1) * rep(g2);
        let r = (lhs - rhs).abs().max() / lhs.abs().max().max(1.0);
        if r > worst {
            worst = r;
            worst_pair = ((g1.x, g1.y), (g2.x, g2.y));
        }
    }
    HomomorphismCheck {
        samples,
        max_residual: worst,
        worst_pair,
        tolerance,
    }
}

/// The affine embedding of `theta(a) = (a, L_a)` as a homogeneous matrix:
/// linear block `L_a`, translation column `a`, last row zero.
pub fn theta(prod: &BilinearProduct, a: &[f64]) -> Result<Matrix3<f64>> {
    crate::algebra::check_dim(2, prod.dim())?;
    crate::algebra::check_dim(2, a.len())?;
    let l = prod.left_mult(a)?.matrix;
    Ok(Matrix3::new(
        l[(0, 0)],
        l[(0, 1)],
        a[0],
        l[(1, 0)],
        l[(1, 1)],
        a[1],
        0.0,
        0.0,
        0.0,
    ))
}

/// Richardson-extrapolated central difference of a matrix curve at 0.
fn matrix_derivative<F: Fn(f64) -> Matrix3<f64>>(f: F, h: f64) -> Matrix3<f64> {
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    (d(h / 2.0) * 4.0 - d(h)) / 3.0
}

/// Checks `d/dt rep(exp(t e_i)) |_{t=0} = theta(e_i)` for both basis
/// directions; central differences with step `1e-6`, Richardson once.
pub fn verify_derivative<F>(rep: F, prod: &BilinearProduct, tolerance: f64) -> Result<bool>
where
    F: Fn(GroupElement) -> Matrix3<f64>,
{
    let h = 1e-6;
    for i in 0..2 {
        let e = basis(2, i);
        let fd = matrix_derivative(|t| rep(group_exp(t * e[0], t * e[1])), h);
        let expected = theta(prod, &e)?;
        if (fd - expected).abs().max() > tolerance {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Jacobian of the developing map at the identity, by central differences.
pub fn developing_jacobian<F>(developing: F) -> Matrix2<f64>
where
    F: Fn(GroupElement) -> Vector2<f64>,
{
    let h = 1e-6;
    let d = |s: f64| {
        let dx = (developing(GroupElement { x: 1.0 + s, y: 0.0 })
            - developing(GroupElement { x: 1.0 - s, y: 0.0 }))
            / (2.0 * s);
        let dy = (developing(GroupElement { x: 1.0, y: s })
            - developing(GroupElement { x: 1.0, y: -s }))
            / (2.0 * s);
        Matrix2::new(dx[0], dy[0], dx[1], dy[1])
    };
    (d(h / 2.0) * 4.0 - d(h)) / 3.0
}

/// Étale criterion: the developing map has invertible differential at the
/// identity.
pub fn etale_check<F>(developing: F, tolerance: f64) -> bool
where
    F: Fn(GroupElement) -> Vector2<f64>,
{
    developing_jacobian(developing).determinant().abs() > tolerance
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn group_operations() {
        let e = group_exp(0.0, 3.0);
        assert_eq!((e.x, e.y), (1.0, 3.0));
        let e = group_exp(2.0f64.ln(), 0.0);
        assert!((e.x - 2.0).abs() < 1e-15 && e.y.abs() < 1e-15);
        let g = GroupElement::new(2.0, 1.0)
            .unwrap()
            .mul(GroupElement::new(3.0, 4.0).unwrap());
        assert_eq!((g.x, g.y), (6.0, 9.0));
        let g = GroupElement::new(2.0, 1.0).unwrap();
        let id = g.mul(g.inverse());
        assert!((id.x - 1.0).abs() < 1e-15 && id.y.abs() < 1e-15);
        assert!(GroupElement::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn rep_values() {
        let e = std::f64::consts::E;
        let m = RepFormula::F1AlphaZero.eval(GroupElement::new(e, 0.0).unwrap());
        let expected = Matrix3::new(1.0, 0.0, 1.0, 0.0, e, 0.0, 0.0, 0.0, 1.0);
        assert!((m - expected).abs().max() < 1e-14);

        let m = RepFormula::R1.eval(GroupElement::identity());
        assert!((m - Matrix3::identity()).abs().max() == 0.0);

        let m = RepFormula::R1.eval(GroupElement::new(1.0, 2.0).unwrap());
        let expected = Matrix3::new(1.0, 2.0, 2.0, 0.0, 1.0, 2.0, 0.0, 0.0, 1.0);
        assert!((m - expected).abs().max() < 1e-14);
    }

    #[test]
    fn identity_maps_to_identity_for_every_formula() {
        for rep in RepFormula::catalog(&[-3.0, -2.0, -0.5, 0.5, 2.0, 3.0]) {
            let m = rep.eval(GroupElement::identity());
            assert!(
                (m - Matrix3::identity()).abs().max() < 1e-14,
                "{}",
                rep.label()
            );
        }
    }

    #[test]
    fn homomorphism_property() {
        let mut rng = crate::verify::seeded_rng(1);
        let chk = verify_homomorphism(
            |g| RepFormula::F1AlphaZero.eval(g),
            100,
            tol::NUMERIC,
            &mut rng,
        );
        assert!(chk.passed(), "residual {}", chk.max_residual);

        // spot instance: rho((2,1)(3,4)) = rho(2,1) rho(3,4)
        let g1 = GroupElement::new(2.0, 1.0).unwrap();
        let g2 = GroupElement::new(3.0, 4.0).unwrap();
        let lhs = RepFormula::F1AlphaZero.eval(g1.mul(g2));
        let expected = Matrix3::new(1.0, 0.0, 6.0f64.ln(), 0.0, 6.0, 9.0, 0.0, 0.0, 1.0);
        assert!((lhs - expected).abs().max() < 1e-14);

        let chk = verify_homomorphism(|g| RepFormula::R1.eval(g), 100, tol::NUMERIC, &mut rng);
        assert!(chk.passed());

        // corrupted formula: ln x replaced by x
        let corrupted = |g: GroupElement| Matrix3::new(1.0, 0.0, g.x, 0.0, g.x, g.y, 0.0, 0.0, 1.0);
        let chk = verify_homomorphism(corrupted, 100, tol::NUMERIC, &mut rng);
        assert!(!chk.passed());
    }

    #[test]
    fn derivative_pairing() {
        let ok = verify_derivative(
            |g| RepFormula::F1AlphaZero.eval(g),
            &Family::F1(0.0).product(),
            tol::DERIVATIVE,
        )
        .unwrap();
        assert!(ok);

        // theta(e2) for R1 has L_{e2} with column e2.e2 = e1
        let th = theta(&Family::R1.product(), &[0.0, 1.0]).unwrap();
        let expected = Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        assert!((th - expected).abs().max() == 0.0);
        assert!(verify_derivative(
            |g| RepFormula::R1.eval(g),
            &Family::R1.product(),
            tol::DERIVATIVE
        )
        .unwrap());

        // mismatched pairing fails
        assert!(!verify_derivative(
            |g| RepFormula::F1AlphaZero.eval(g),
            &Family::A1.product(),
            tol::DERIVATIVE
        )
        .unwrap());
    }

    #[test]
    fn developing_and_etale() {
        let q = RepFormula::F1AlphaZero.developing(GroupElement::new(2.0, 5.0).unwrap());
        assert!((q[0] - 2.0f64.ln()).abs() < 1e-14 && (q[1] - 5.0).abs() < 1e-14);

        let jac = developing_jacobian(|g| RepFormula::F1AlphaZero.developing(g));
        assert!((jac - Matrix2::identity()).abs().max() < 1e-9);

        // rho4: Q = ((x^2 - y^2 - 1)/2, y), Jacobian identity at the unit
        let jac = developing_jacobian(|g| RepFormula::R2.developing(g));
        assert!((jac - Matrix2::identity()).abs().max() < 1e-9);

        for rep in RepFormula::catalog(&[-3.0, -2.0, -0.5, 0.5, 2.0, 3.0]) {
            assert!(
                etale_check(|g| rep.developing(g), tol::DERIVATIVE),
                "{}",
                rep.label()
            );
        }

        assert!(!etale_check(|_| Vector2::new(1.0, 2.0), tol::DERIVATIVE));
    }
}
