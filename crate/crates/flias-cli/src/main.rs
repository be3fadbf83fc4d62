//! `flias` — classify, verify and explore the flat left-invariant affine
//! structures on the affine group of the line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use flias_core::atlas::{atlas_entries, classify, Classification, Family, VarietyPoint};
use flias_core::geodesics::{closed_form, integrate_grid, Formulation, IntegrationOpts};
use flias_core::io::{AlgebraFile, LinearRepFile};
use flias_core::projective::{projective_etale_check, sl2_block_rep_offset};
use flias_core::reps::{GroupElement, RepFormula};
use flias_core::transform::{
    algebra_table, closure_check, families_of_case, param_count, symplectic_cocycle_search,
    verify_affinity, verify_case_lsa, AffTransform,
};
use flias_core::verify::{random_family_params, run_all, seeded_rng};

#[derive(Parser)]
#[command(name = "flias", version, about)]
struct Cli {
    /// Seed for all randomized checks (fixed seed => identical reports).
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Tolerance override for classification thresholds.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a variety point or a product table.
    Classify {
        /// Six comma-separated parameters alpha,beta,gamma,delta,epsilon,lambda.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        /// JSON file with a product table (see README for the schema).
        #[arg(long)]
        product: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify {
        /// Restrict to one section.
        #[arg(long)]
        only: Option<String>,
        /// Perturb one table to demonstrate failure detection.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Emit the atlas of canonical families.
    Atlas,
    /// Evaluate and check a geodesic, writing a CSV trajectory.
    Geodesic {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(id = "horizon", long = "T", allow_hyphen_values = true)]
        horizon: f64,
    },
    /// Print a representation matrix or verify the whole catalog.
    Rep {
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Evaluation point x,y.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
        /// Run the full representation suite.
        #[arg(long)]
        verify: bool,
    },
    /// Verify a transformation-group case.
    Afftrans {
        #[arg(long)]
        case: u8,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        verify: bool,
        /// Evaluate the map with these parameters at --at.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
    },
    /// Projective étale criterion for a representation file or the built-in
    /// sl(2) block example.
    Projective {
        /// JSON file with the representation matrices.
        #[arg(long)]
        rep: Option<PathBuf>,
        /// Use the built-in sl(2) block representation.
        #[arg(long)]
        sl2: bool,
        /// The candidate vector w.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli_out: &Option<PathBuf>, text: String) -> Result<()> {
    match cli_out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path:?}"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_family(name: &str, alpha: Option<f64>) -> Result<Family> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "f1" => Family::F1(alpha.ok_or_else(|| anyhow!("--family f1 needs --alpha"))?),
        "f2" => Family::F2(alpha.ok_or_else(|| anyhow!("--family f2 needs --alpha"))?),
        "a1" => Family::A1,
        "a2" => Family::A2,
        "r1" => Family::R1,
        "r2" => Family::R2,
        other => bail!("unknown family '{other}' (expected f1,f2,a1,a2,r1,r2)"),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let tol = cli.tol.unwrap_or(flias_core::tol::NUMERIC);
    match &cli.command {
        Command::Classify { point, product } => {
            let p = match (point, product) {
                (Some(values), None) => VarietyPoint::from_slice(values)?,
                (None, Some(path)) => {
                    let file: AlgebraFile = serde_json::from_str(&fs::read_to_string(path)?)
                        .context("parsing product file")?;
                    let prod = file
                        .product()?
                        .ok_or_else(|| anyhow!("file has no \"product\" entry"))?;
                    if prod.dim() != 2 {
                        bail!("classification needs a 2-dimensional product");
                    }
                    // read the six parameters off the table
                    VarietyPoint::new(
                        prod.coeff(0, 0, 0),
                        prod.coeff(0, 0, 1),
                        prod.coeff(0, 1, 0),
                        prod.coeff(1, 0, 1),
                        prod.coeff(1, 1, 0),
                        prod.coeff(1, 1, 1),
                    )
                }
                _ => bail!("pass exactly one of --point or --product"),
            };
            let classification = classify(&p, tol);
            let json = serde_json::to_string_pretty(&classification)?;
            match &classification {
                Classification::OnVariety(tag) => {
                    if cli.format == Format::Json {
                        emit(&cli.out, json)?;
                    } else {
                        emit(
                            &cli.out,
                            format!(
                                "component {:?}, canonical family {}, special {:?}\n\
                                 (components I and II overlap along alpha = delta = 0; the tie \
                                 goes to component I)",
                                tag.component,
                                tag.family.label(),
                                tag.special
                            ),
                        )?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Classification::OffVariety { residual } => {
                    if cli.format == Format::Json {
                        emit(&cli.out, json)?;
                    } else {
                        emit(&cli.out, format!("off the variety; residual {residual:?}"))?;
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::Verify { only, inject_fault } => {
            let report = run_all(cli.seed, only.as_deref(), *inject_fault)?;
            let text = if cli.format == Format::Json {
                serde_json::to_string_pretty(&report)?
            } else {
                let mut out = String::new();
                for section in &report.sections {
                    out.push_str(&format!(
                        "[{}] {}\n",
                        if section.passed { "PASS" } else { "FAIL" },
                        section.name
                    ));
                    for c in &section.checks {
                        out.push_str(&format!(
                            "  [{}] {}{}\n",
                            if c.passed { "pass" } else { "FAIL" },
                            c.name,
                            c.residual
                                .map(|r| format!(" (residual {r:.3e})"))
                                .unwrap_or_default()
                        ));
                    }
                }
                out.push_str(&format!(
                    "suite: {}\n",
                    if report.passed { "PASS" } else { "FAIL" }
                ));
                out
            };
            emit(&cli.out, text)?;
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Atlas => {
            let entries = atlas_entries();
            let text = if cli.format == Format::Json {
                let doc = serde_json::json!({
                    "families": entries,
                    "aff_case_dims": flias_core::atlas::aff_case_dims(),
                });
                serde_json::to_string_pretty(&doc)?
            } else {
                let mut out = String::from(
                    "family      component  aff-case  aff-dim  complete  associative  special\n",
                );
                for e in &entries {
                    out.push_str(&format!(
                        "{:<11} {:<10?} {:<9} {:<8} {:<9} {:<12} {:?}\n",
                        e.family,
                        e.component,
                        e.aff_case,
                        e.aff_dim,
                        e.complete,
                        e.associative,
                        e.special
                    ));
                    if let Some(n) = &e.notes {
                        out.push_str(&format!("            note: {n}\n"));
                    }
                }
                out.push_str(&format!(
                    "transformation-group dimensions per case: {:?}\n",
                    flias_core::atlas::aff_case_dims()
                ));
                out
            };
            emit(&cli.out, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Geodesic {
            family,
            alpha,
            a,
            b,
            horizon,
        } => {
            let fam = parse_family(family, *alpha)?;
            let cf = closed_form(fam, *a, *b)?;
            let n = 101usize;
            let lo = cf.domain.0.max(-horizon.abs());
            let hi = cf.domain.1.min(horizon.abs());
            let width = hi - lo;
            let (lo, hi) = (lo + 0.02 * width, hi - 0.02 * width);
            let times: Vec<f64> = (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect();
            let traj = integrate_grid(
                &fam.product(),
                Formulation::ConstantCoefficients,
                [1.0, 0.0, *a, *b],
                &times,
                &IntegrationOpts::default(),
            )?;
            let mut csv = String::from("t,x,y,v1,v2,x_closed,y_closed,residual\n");
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let (xc, yc) = cf.eval(*t);
                let res = (s[0] - xc).abs().max((s[1] - yc).abs());
                csv.push_str(&format!(
                    "{t},{},{},{},{},{xc},{yc},{res:e}\n",
                    s[0], s[1], s[2], s[3]
                ));
            }
            match &cli.out {
                Some(path) => fs::write(path, csv)?,
                None => {
                    let mut stdout = std::io::stdout();
                    stdout.write_all(csv.as_bytes())?;
                }
            }
            if !traj.escapes.is_empty() {
                eprintln!("note: escape before the horizon: {:?}", traj.escapes);
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Rep {
            family,
            alpha,
            at,
            verify,
        } => {
            if *verify {
                let report = run_all(cli.seed, Some("representations"), false)?;
                emit(&cli.out, serde_json::to_string_pretty(&report)?)?;
                return Ok(if report.passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                });
            }
            let fam = parse_family(
                family
                    .as_deref()
                    .ok_or_else(|| anyhow!("--family required"))?,
                *alpha,
            )?;
            let rep = RepFormula::for_family(&fam)?;
            let at = at.clone().unwrap_or(vec![1.0, 0.0]);
            if at.len() != 2 {
                bail!("--at needs exactly two coordinates x,y");
            }
            let g = GroupElement::new(at[0], at[1])?;
            let m = rep.eval(g);
            let rows: Vec<Vec<f64>> = (0..3)
                .map(|i| (0..3).map(|j| m[(i, j)]).collect())
                .collect();
            let text = if cli.format == Format::Json {
                serde_json::to_string_pretty(&rows)?
            } else {
                let body = rows
                    .iter()
                    .map(|r| format!("  [{:>12.6} {:>12.6} {:>12.6}]", r[0], r[1], r[2]))
                    .collect::<Vec<_>>()
                    .join("\n");
                format!("{} at ({}, {}):\n{}", rep.label(), g.x, g.y, body)
            };
            emit(&cli.out, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Afftrans {
            case,
            alpha,
            verify,
            params,
            at,
        } => {
            if let (Some(params), Some(at)) = (params, at) {
                if at.len() != 2 {
                    bail!("--at needs exactly two coordinates x,y");
                }
                let phi = AffTransform::new(*case, *alpha, params)?;
                let (x, y) = phi.eval(at[0], at[1]);
                emit(&cli.out, format!("({x}, {y})"))?;
                return Ok(ExitCode::SUCCESS);
            }
            if !verify {
                bail!("pass --verify, or --params with --at");
            }
            let mut rng = seeded_rng(cli.seed);
            let mut lines = Vec::new();
            let mut all = true;
            if *case == 5 {
                let table = flias_core::algebra::LieAlgebra::aff_rn(2);
                let found = symplectic_cocycle_search(&table, &mut rng);
                let ok = found.form.is_some();
                all &= ok;
                lines.push(format!(
                    "case 5: the complete structure; its transformation group is \
                     six-dimensional (the full affine group of the plane); \
                     nondegenerate symplectic cocycle on aff(R^2): {ok}"
                ));
            } else {
                for fam in families_of_case(*case, *alpha)? {
                    let mut worst: f64 = 0.0;
                    let mut ok = true;
                    for _ in 0..20 {
                        let phi = AffTransform::new(
                            *case,
                            *alpha,
                            &random_family_params(*case, &mut rng),
                        )?;
                        let chk = verify_affinity(&phi, &fam.product(), 3, 1e-6, &mut rng)?;
                        ok &= chk.passed();
                        worst = worst.max(chk.max_distance);
                    }
                    all &= ok;
                    lines.push(format!(
                        "affinity vs {}: {} (max distance {worst:.3e})",
                        fam.label(),
                        if ok { "pass" } else { "FAIL" }
                    ));
                }
                let phi1 =
                    AffTransform::new(*case, *alpha, &random_family_params(*case, &mut rng))?;
                let phi2 =
                    AffTransform::new(*case, *alpha, &random_family_params(*case, &mut rng))?;
                let chk = closure_check(&phi1, &phi2, 1e-8)?;
                all &= chk.passed();
                lines.push(format!(
                    "closure (dim {} family): {} (deviation {:.3e})",
                    param_count(*case)?,
                    if chk.passed() { "pass" } else { "FAIL" },
                    chk.max_deviation
                ));
                if *case <= 4 {
                    let table = algebra_table(*case)?;
                    if let Some(note) = &table.note {
                        lines.push(format!("note: {note}"));
                    }
                    let rep = verify_case_lsa(*case)?;
                    all &= rep.n_is_ideal && rep.h_is_subalgebra && !rep.passing.is_empty();
                    lines.push(format!(
                        "bracket table: jacobi residual {:.1e}; n ideal: {}; h subalgebra: {}",
                        rep.jacobi_residual, rep.n_is_ideal, rep.h_is_subalgebra
                    ));
                    lines.push(format!(
                        "semidirect left-symmetric products: {} passing (n, h) pairs, e.g. {:?}",
                        rep.passing.len(),
                        rep.passing.first()
                    ));
                    let found = symplectic_cocycle_search(&table.algebra, &mut rng);
                    all &= found.form.is_some();
                    lines.push(format!(
                        "nondegenerate symplectic cocycle: {} (space dim {})",
                        found.form.is_some(),
                        found.space_dim
                    ));
                }
            }
            emit(&cli.out, lines.join("\n"))?;
            Ok(if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Projective { rep, sl2, w } => {
            let rep = if *sl2 {
                sl2_block_rep_offset().1
            } else {
                let path = rep
                    .as_ref()
                    .ok_or_else(|| anyhow!("pass --rep FILE or --sl2"))?;
                let file: LinearRepFile = serde_json::from_str(&fs::read_to_string(path)?)?;
                file.to_rep()?
            };
            let chk = projective_etale_check(&rep, w)?;
            let text = if cli.format == Format::Json {
                serde_json::to_string_pretty(&chk)?
            } else {
                format!(
                    "spans: {}\nrank: {}\ndeterminant: {:.6e}\nsingular values: {:?}\n\
                     trace residual: {:.3e}",
                    chk.spans,
                    chk.rank,
                    chk.determinant,
                    chk.singular_values,
                    chk.traceless_residual
                )
            };
            emit(&cli.out, text)?;
            Ok(if chk.spans {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
