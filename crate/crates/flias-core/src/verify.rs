//! The full verification suite: every invariant of the atlas bundled into
//! deterministic, seeded sections with machine-readable reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{aff_rn_product, gl_gl_product, GlGlSecondSlot, LieAlgebra};
use crate::atlas::{classify, Classification, Component, Family, VarietyPoint};
use crate::connection::{
    cotangent_pseudo_kahler, hessian_check, kahler_check, levi_civita, lsa_from_symplectic,
    symplectic_connection_check, ComplexStructure, MetricTensor, SymplecticForm,
};
use crate::geodesics::{
    completeness_probe, default_velocity_grid, integrate_grid, verify_closed_form, Formulation,
    IntegrationOpts,
};
use crate::projective::{
    projective_etale_check, sl2_block_rep_linear, sl2_block_rep_offset, trace_zero_subalgebra,
};
use crate::reps::{etale_check, verify_derivative, verify_homomorphism, RepFormula};
use crate::transform::{
    algebra_table, closure_check, symplectic_cocycle_search, verify_affinity, AffTransform,
};
use crate::{tol, Result};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Tolerances used by the suite, embedded in every report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub exact: f64,
    pub numeric: f64,
    pub derivative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: tol::EXACT,
            numeric: tol::NUMERIC,
            derivative: tol::DERIVATIVE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<CheckLine>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub sections: Vec<SectionReport>,
    pub passed: bool,
}

pub const SECTION_NAMES: [&str; 10] = [
    "algebra",
    "variety",
    "representations",
    "geodesics",
    "development",
    "completeness",
    "structures",
    "cotangent",
    "projective",
    "transform",
];

struct Section {
    name: &'static str,
    checks: Vec<CheckLine>,
}

impl Section {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, residual: Option<f64>) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed,
            residual,
            detail: None,
        });
    }

    fn push_detail(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        residual: Option<f64>,
        detail: impl Into<String>,
    ) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed,
            residual,
            detail: Some(detail.into()),
        });
    }

    fn finish(self) -> SectionReport {
        SectionReport {
            passed: self.checks.iter().all(|c| c.passed),
            name: self.name,
            checks: self.checks,
        }
    }
}

/// Runs the suite. `only` restricts to a single section by name;
/// `inject_fault` perturbs one product table to demonstrate that the suite
/// actually fails on wrong inputs.
pub fn run_all(seed: u64, only: Option<&str>, inject_fault: bool) -> Result<SuiteReport> {
    if let Some(name) = only {
        if !SECTION_NAMES.contains(&name) {
            return Err(crate::Error::InvalidParameter(format!(
                "unknown section '{name}'; expected one of {SECTION_NAMES:?}"
            )));
        }
    }
    let mut sections = Vec::new();
    let want = |name: &str| only.is_none_or(|o| o == name);

    if want("algebra") {
        sections.push(section_algebra(inject_fault)?);
    }
    if want("variety") {
        sections.push(section_variety(seed)?);
    }
    if want("representations") {
        sections.push(section_representations(seed)?);
    }
    if want("geodesics") {
        sections.push(section_geodesics()?);
    }
    if want("development") {
        sections.push(section_development()?);
    }
    if want("completeness") {
        sections.push(section_completeness()?);
    }
    if want("structures") {
        sections.push(section_structures()?);
    }
    if want("cotangent") {
        sections.push(section_cotangent()?);
    }
    if want("projective") {
        sections.push(section_projective()?);
    }
    if want("transform") {
        sections.push(section_transform(seed)?);
    }

    Ok(SuiteReport {
        seed,
        tolerances: Tolerances::default(),
        passed: sections.iter().all(|s| s.passed),
        sections,
    })
}

pub fn alpha_samples() -> Vec<f64> {
    vec![-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0]
}

fn canonical_families() -> Vec<Family> {
    let mut fams = vec![Family::A1, Family::A2, Family::R1, Family::R2];
    for a in alpha_samples() {
        fams.push(Family::F1(a));
        if a != 0.0 {
            fams.push(Family::F2(a));
        }
    }
    fams
}

fn section_algebra(inject_fault: bool) -> Result<SectionReport> {
    let mut s = Section::new("algebra");
    let aff = LieAlgebra::aff_r();
    for fam in canonical_families() {
        let mut p = fam.product();
        if inject_fault && fam == Family::F1(2.0) {
            let mut t = p.coefficients().clone();
            *t.get_mut(0, 1, 0) += 1e-3;
            p = crate::algebra::BilinearProduct::new(t);
        }
        let chk = p.is_left_symmetric(&aff, tol::EXACT)?;
        s.push(
            format!("left-symmetric {}", fam.label()),
            chk.passed(),
            Some(chk.associator_symmetry.max(chk.torsion)),
        );
    }
    for n in 1..=3 {
        let (alg, p) = aff_rn_product(n);
        let a = p.is_associative(tol::EXACT);
        let l = p.is_left_symmetric(&alg, tol::EXACT)?;
        s.push(
            format!("aff(R^{n}) associative"),
            a.passed() && l.passed(),
            Some(a.max_associator),
        );
    }
    let (alg, good) = gl_gl_product(2, GlGlSecondSlot::S1S2);
    let a = good.is_associative(tol::EXACT);
    let l = good.is_left_symmetric(&alg, tol::EXACT)?;
    s.push(
        "gl+gl second slot s1*s2: associative and compatible",
        a.passed() && l.passed(),
        Some(a.max_associator),
    );
    let (_, bad) = gl_gl_product(2, GlGlSecondSlot::S1T1);
    let a = bad.is_associative(tol::EXACT);
    s.push_detail(
        "gl+gl second slot s1*t1: associativity verdict",
        !a.passed(),
        Some(a.max_associator),
        "the s1*t1 slot fails associativity; s1*s2 is the consistent reading",
    );
    Ok(s.finish())
}

fn section_variety(seed: u64) -> Result<SectionReport> {
    let mut s = Section::new("variety");
    let mut rng = seeded_rng(seed ^ 0x7661_7269);
    let n = 1000;

    let mut worst = [0.0f64; 3];
    let mut misclassified = 0usize;
    for _ in 0..n {
        let a = uniform(&mut rng, -3.0, 3.0);
        let b = uniform(&mut rng, -3.0, 3.0);
        let g = uniform(&mut rng, -2.0, 2.0);
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let anz = sign * uniform(&mut rng, 0.2, 3.0);
        let enz = sign * uniform(&mut rng, 0.5, 2.0);
        let pts = [
            (VarietyPoint::from_component1(a, b), Component::I),
            (VarietyPoint::from_component2(anz, b), Component::II),
            (VarietyPoint::from_component3(g, enz), Component::III),
        ];
        for (idx, (p, expect)) in pts.iter().enumerate() {
            worst[idx] = worst[idx].max(p.residual_norm());
            match classify(p, tol::NUMERIC) {
                Classification::OnVariety(tag) if tag.component == *expect => {}
                _ => misclassified += 1,
            }
        }
    }
    for (idx, name) in ["component I", "component II", "component III"]
        .iter()
        .enumerate()
    {
        s.push(
            format!("{name} parameterization residual ({n} samples)"),
            worst[idx] <= tol::EXACT,
            Some(worst[idx]),
        );
    }
    s.push(
        format!("classification agrees on {} samples", 3 * n),
        misclassified == 0,
        Some(misclassified as f64),
    );

    let mut accepted = 0usize;
    for _ in 0..n {
        let mut v = [0.0; 6];
        for x in v.iter_mut() {
            *x = uniform(&mut rng, -3.0, 3.0);
        }
        if let Classification::OnVariety(_) = classify(&VarietyPoint::from_slice(&v)?, tol::NUMERIC)
        {
            accepted += 1;
        }
    }
    s.push(
        format!("{n} random points rejected"),
        accepted == 0,
        Some(accepted as f64),
    );
    Ok(s.finish())
}

fn section_representations(seed: u64) -> Result<SectionReport> {
    let mut s = Section::new("representations");
    let mut rng = seeded_rng(seed ^ 0x7265_7073);
    for rep in RepFormula::catalog(&[-3.0, -2.0, -0.5, 0.5, 2.0, 3.0]) {
        let hom = verify_homomorphism(|g| rep.eval(g), 100, tol::NUMERIC, &mut rng);
        let family = rep.paired_family();
        let deriv = verify_derivative(|g| rep.eval(g), &family.product(), tol::DERIVATIVE)?;
        let etale = etale_check(|g| rep.developing(g), tol::DERIVATIVE);
        s.push(
            format!("{} homomorphism (100 pairs)", rep.label()),
            hom.passed(),
            Some(hom.max_residual),
        );
        s.push(
            format!(
                "{} derivative matches theta of {}",
                rep.label(),
                family.label()
            ),
            deriv,
            None,
        );
        s.push(
            format!("{} etale at the identity", rep.label()),
            etale,
            None,
        );
    }
    Ok(s.finish())
}

fn section_geodesics() -> Result<SectionReport> {
    let mut s = Section::new("geodesics");
    for (family, velocities) in crate::geodesics::geodesic_test_matrix_families() {
        let mut worst_res: f64 = 0.0;
        let mut worst_sup: f64 = 0.0;
        let mut all = true;
        for (a, b) in &velocities {
            let chk = verify_closed_form(family, *a, *b, tol::DERIVATIVE, 2.0)?;
            all &= chk.passed() && chk.matched == Formulation::ConstantCoefficients;
            worst_res = worst_res.max(chk.residual_constant);
            worst_sup = worst_sup.max(chk.sup_distance);
        }
        s.push_detail(
            format!(
                "closed forms for {} ({} velocities)",
                family.label(),
                velocities.len()
            ),
            all,
            Some(worst_res.max(worst_sup)),
            "solves the constant-coefficient system",
        );
    }
    Ok(s.finish())
}

fn section_development() -> Result<SectionReport> {
    let mut s = Section::new("development");
    let opts = IntegrationOpts::default();
    for rep in RepFormula::catalog(&alpha_samples()) {
        let family = rep.paired_family();
        let prod = family.product();
        let mut worst: f64 = 0.0;
        for (a, b) in [(0.6, -0.8), (-0.5, 0.9)] {
            let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.35 / 40.0).collect();
            let traj = integrate_grid(
                &prod,
                Formulation::InvariantFrame,
                [1.0, 0.0, a, b],
                &times,
                &opts,
            )?;
            if !traj.reached_all() {
                worst = f64::INFINITY;
                continue;
            }
            let dev: Vec<_> = traj
                .states
                .iter()
                .map(|st| rep.developing(crate::reps::GroupElement { x: st[0], y: st[1] }))
                .collect();
            for w in dev.windows(3) {
                let d2 = w[2] - 2.0 * w[1] + w[0];
                worst = worst.max(d2.abs().max());
            }
        }
        s.push(
            format!("developing map straightens {} geodesics", family.label()),
            worst <= tol::DERIVATIVE,
            Some(worst),
        );
    }
    Ok(s.finish())
}

fn section_completeness() -> Result<SectionReport> {
    let mut s = Section::new("completeness");
    let grid = default_velocity_grid();
    for family in canonical_families() {
        let probe = completeness_probe(&family.product(), &grid, 50.0)?;
        let expect_complete = matches!(family, Family::F1(a) if a == 0.0);
        s.push(
            format!(
                "completeness probe {} (complete = {})",
                family.label(),
                probe.numeric_complete
            ),
            probe.consistent() && (probe.numeric_complete == expect_complete),
            Some(probe.escapes.len() as f64),
        );
    }
    Ok(s.finish())
}

pub fn hessian_metrics() -> Vec<(Family, MetricTensor)> {
    let m = |rows: [[f64; 2]; 2]| MetricTensor::from_rows(&[&rows[0], &rows[1]]).unwrap();
    vec![
        (Family::F1(-1.0), m([[0.0, 1.0], [1.0, 0.0]])),
        (Family::F2(-2.0), m([[1.0, -0.25], [-0.25, 0.125]])),
        (Family::R1, m([[2.0, 0.0], [0.0, 1.0]])),
        (Family::R2, m([[2.0, 0.0], [0.0, -1.0]])),
    ]
}

fn section_structures() -> Result<SectionReport> {
    let mut s = Section::new("structures");
    let aff = LieAlgebra::aff_r();
    let pairs = hessian_metrics();
    for (i, (fam_i, _)) in pairs.iter().enumerate() {
        for (j, (_, metric_j)) in pairs.iter().enumerate() {
            let verdict = hessian_check(&fam_i.product(), metric_j, tol::EXACT)?;
            if i == j {
                s.push(
                    format!("Hessian: {} with its metric", fam_i.label()),
                    verdict,
                    None,
                );
            } else if verdict {
                s.push(
                    format!(
                        "Hessian: unexpected pass {} with metric #{j}",
                        fam_i.label()
                    ),
                    false,
                    None,
                );
            }
        }
    }

    let omega = SymplecticForm::standard_aff_r();
    for family in canonical_families() {
        let verdict = symplectic_connection_check(&family.product(), &omega, tol::EXACT)?;
        let expected = matches!(family, Family::F1(a) if a == -1.0)
            || matches!(family, Family::F2(a) if a == -0.5);
        s.push(
            format!("symplectic connection {}", family.label()),
            verdict == expected,
            None,
        );
    }

    let lorentz = MetricTensor::from_rows(&[&[1.0, -1.0], &[-1.0, 0.0]])?;
    let lc = levi_civita(&lorentz, &aff)?;
    let expected = Family::F1(-1.0).product();
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                dev = dev.max((lc.coeff(i, j, k) - expected.coeff(i, j, k)).abs());
            }
        }
    }
    s.push(
        "Levi-Civita of the Lorentzian metric is F1(-1)",
        dev <= tol::EXACT,
        Some(dev),
    );

    let j = ComplexStructure::new(nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[0.0, 1.0, -1.0, 0.0],
    ));
    let kahler = kahler_check(&aff, &omega, &j, tol::EXACT)?;
    let identity_metric = kahler.metric == vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    s.push(
        "Kahler pair (omega, j) with identity metric",
        kahler.passed() && identity_metric,
        Some(kahler.nijenhuis_residual),
    );

    let induced = lsa_from_symplectic(&omega, &aff)?;
    let a2 = Family::A2.product();
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                dev = dev.max((induced.coeff(i, j, k) - a2.coeff(i, j, k)).abs());
            }
        }
    }
    s.push(
        "coadjoint symplectic form induces the A2 table",
        dev <= tol::EXACT,
        Some(dev),
    );
    Ok(s.finish())
}

fn section_cotangent() -> Result<SectionReport> {
    let mut s = Section::new("cotangent");
    let aff = LieAlgebra::aff_r();
    for (family, metric) in hessian_metrics() {
        let cot = cotangent_pseudo_kahler(&family.product(), &metric, &aff, tol::EXACT)?;
        let r = &cot.report;
        let worst = r
            .jacobi_residual
            .max(r.cocycle_residual)
            .max(r.j_square_residual)
            .max(r.nijenhuis_residual)
            .max(r.metric_symmetry_residual);
        s.push(
            format!("cotangent extension of {} is pseudo-Kahler", family.label()),
            r.passed(),
            Some(worst),
        );
    }
    Ok(s.finish())
}

fn section_projective() -> Result<SectionReport> {
    let mut s = Section::new("projective");
    for n in 1..=3usize {
        let (_, p) = gl_gl_product(n, GlGlSecondSlot::S1S2);
        let sub = trace_zero_subalgebra(&p)?;
        s.push(
            format!(
                "trace-zero subalgebra of gl({n})+gl({n}) has dim {}",
                2 * n * n - 1
            ),
            sub.dim == 2 * n * n - 1 && sub.bracket_closure_residual < tol::NUMERIC,
            Some(sub.bracket_closure_residual),
        );
    }
    let (_, bad) = gl_gl_product(2, GlGlSecondSlot::S1T1);
    let verdict = bad.is_associative(tol::EXACT);
    s.push_detail(
        "gl+gl s1*t1 variant associativity verdict recorded",
        !verdict.passed(),
        Some(verdict.max_associator),
        "not associative",
    );

    let (alg, offset) = sl2_block_rep_offset();
    let e3 = projective_etale_check(&offset, &[0.0, 0.0, 1.0, 0.0])?;
    s.push_detail(
        "sl(2) block map: spanning verdict at w = e3",
        !e3.spans,
        Some(e3.determinant),
        "every image matrix kills e3, so e3 + R e3 cannot span; see w = (1,0,1,1)",
    );
    let witness = projective_etale_check(&offset, &[1.0, 0.0, 1.0, 1.0])?;
    s.push_detail(
        "sl(2) block map: etale witness w = (1,0,1,1)",
        witness.spans,
        Some(witness.determinant),
        format!(
            "bracket residual {:.3e}, trace residual {:.3e} (affine-shifted map)",
            offset.bracket_residual(&alg)?,
            offset.traceless_residual()
        ),
    );
    let (alg2, linear) = sl2_block_rep_linear();
    s.push(
        "sl(2) zero-block differential is bracket-exact and traceless",
        linear.bracket_residual(&alg2)? < tol::EXACT && linear.traceless_residual() < tol::EXACT,
        Some(linear.bracket_residual(&alg2)?),
    );
    Ok(s.finish())
}

fn section_transform(seed: u64) -> Result<SectionReport> {
    let mut s = Section::new("transform");
    let mut rng = seeded_rng(seed ^ 0x7472_616e);

    let pairings: Vec<(u8, Option<f64>, Family)> = vec![
        (1, Some(2.0), Family::F1(2.0)),
        (1, Some(-0.5), Family::F1(-0.5)),
        (2, Some(2.0), Family::F2(2.0)),
        (2, Some(-2.0), Family::F2(-2.0)),
        (3, None, Family::F1(1.0)),
        (3, None, Family::F2(-1.0)),
        (4, None, Family::A1),
        (4, None, Family::A2),
        (6, None, Family::R1),
        (6, None, Family::R2),
    ];
    for (case, alpha, family) in &pairings {
        let mut worst: f64 = 0.0;
        let mut all = true;
        for _ in 0..20 {
            let params = random_family_params(*case, &mut rng);
            let phi = AffTransform::new(*case, *alpha, &params)?;
            let chk = verify_affinity(&phi, &family.product(), 3, tol::DERIVATIVE, &mut rng)?;
            all &= chk.passed();
            worst = worst.max(chk.max_distance);
        }
        s.push(
            format!(
                "affinity: case {case} preserves {} geodesics (20 draws)",
                family.label()
            ),
            all,
            Some(worst),
        );
    }

    for (case, alpha) in [
        (1, Some(2.0)),
        (2, Some(-2.0)),
        (3, None),
        (4, None),
        (6, None),
    ] {
        let mut all = true;
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let phi1 = AffTransform::new(case, alpha, &random_family_params(case, &mut rng))?;
            let phi2 = AffTransform::new(case, alpha, &random_family_params(case, &mut rng))?;
            let chk = closure_check(&phi1, &phi2, 1e-8)?;
            all &= chk.passed();
            worst = worst.max(chk.max_deviation);
        }
        s.push(
            format!("closure: case {case} composition stays in the family"),
            all,
            Some(worst),
        );
    }

    for case in [1u8, 2, 3, 4] {
        let table = algebra_table(case)?;
        let search = symplectic_cocycle_search(&table.algebra, &mut rng);
        let ok = table.jacobi_residual < tol::EXACT
            && search
                .form
                .as_ref()
                .map(|f| f.cocycle_residual(&table.algebra).unwrap_or(f64::INFINITY) < tol::NUMERIC)
                .unwrap_or(false);
        s.push(
            format!(
                "case {case}: Jacobi + nondegenerate symplectic cocycle (space dim {})",
                search.space_dim
            ),
            ok,
            Some(search.best_det),
        );
    }
    let aff_r2 = LieAlgebra::aff_rn(2);
    let search = symplectic_cocycle_search(&aff_r2, &mut rng);
    s.push(
        "case 5 record: aff(R^2) admits a nondegenerate symplectic cocycle",
        search.form.is_some(),
        Some(search.best_det),
    );
    Ok(s.finish())
}

pub fn random_family_params(case: u8, rng: &mut impl Rng) -> Vec<f64> {
    let a = uniform(rng, -1.0, 1.0f64).exp();
    if case == 6 {
        vec![a, uniform(rng, -2.0, 2.0)]
    } else {
        let c_mag = uniform(rng, -1.0, 1.0f64).exp();
        let c = if rng.gen::<bool>() { c_mag } else { -c_mag };
        vec![a, uniform(rng, -2.0, 2.0), c, uniform(rng, -2.0, 2.0)]
    }
}
