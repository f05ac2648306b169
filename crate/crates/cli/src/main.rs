use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qgtile::characteristic::{assemble, check_equivalence, closed_form, determinant, matrix_json};
use qgtile::dispersion::{dispersion_form, dispersion_root_set};
use qgtile::eigenfunction::{build_eigenfunction, EigenKind, EigenOptions};
use qgtile::interval::IntervalSolver;
use qgtile::oracles::{
    first_eigenfunction, run_verify, Suite, ThetaGrid, VerifyOptions, EQUIVALENCE_TOL,
};
use qgtile::potential::Potential;
use qgtile::spectrum::{
    bands_general, bands_zero_potential, point_spectrum, DiscriminantProfile, ScanOptions,
};
use qgtile::tiling::{build_tiling, validate_tiling, QuasiMomentum, TilingName};

#[derive(Parser)]
#[command(
    name = "qgtile",
    version,
    about = "Band spectra of quantum graphs on Archimedean tilings"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Edge length. Defaults to 1, or to the last abscissa of a potential table.
    #[arg(long)]
    a: Option<f64>,
    /// zero | graphene | file:PATH
    #[arg(long, default_value = "zero")]
    q: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Absolutely continuous bands below --lambda-max.
    Bands {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Flat-band eigenvalues below --lambda-max.
    Points {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate p(S', theta), or with --check compare the determinant with the closed form.
    Disprel {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true)]
        theta: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sprime: Option<f64>,
        #[arg(long)]
        check: bool,
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Real roots of p(., theta) in [-1.5, 1.5].
    Roots {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true)]
        theta: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Dispersion surface: lambda roots on a grid x grid Brillouin-zone sample.
    Sweep {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = qgtile::oracles::DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attachment table and consistency report of a tiling.
    Tiling {
        #[arg(long)]
        tiling: TilingName,
        #[command(flatten)]
        common: Common,
    },
    /// The characteristic matrix at one (lambda, theta), as JSON.
    Matrix {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true)]
        theta: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a compactly supported eigenfunction.
    Eigen {
        #[arg(long)]
        tiling: TilingName,
        #[arg(long, default_value = "polygon_dirichlet")]
        kind: EigenKind,
        /// Defaults to the first admissible level below --lambda-max.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 60.0)]
        lambda_max: f64,
        #[command(flatten)]
        common: Common,
    },
    /// C, S, C', S' at x = a for one lambda.
    Basis {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        common: Common,
    },
    /// C, S, C', S' on a uniform lambda grid.
    Scan {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda_min: f64,
        #[arg(long, default_value_t = 100.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn f(x: f64) -> String {
    format!("{x:.14e}")
}

fn potential(c: &Common) -> Result<Potential> {
    let q = match c.q.as_str() {
        "zero" => Potential::zero(c.a.unwrap_or(1.0))?,
        "graphene" => Potential::graphene(c.a.unwrap_or(1.0))?,
        s => match s.strip_prefix("file:") {
            Some(path) => Potential::from_csv_path(path, c.a)
                .with_context(|| format!("reading potential {path}"))?,
            None => bail!("unknown potential `{s}` (expected zero, graphene or file:PATH)"),
        },
    };
    Ok(q)
}

fn theta(v: &[f64]) -> Result<QuasiMomentum> {
    match v {
        [t1, t2] => Ok(QuasiMomentum::new(*t1, *t2)),
        [] => bail!("--theta T1 T2 is required"),
        _ => bail!("--theta takes exactly two values"),
    }
}

fn lambda_of(rho: Option<f64>, lambda: Option<f64>) -> Result<f64> {
    match (rho, lambda) {
        (Some(r), None) => Ok(r * r.abs()),
        (None, Some(l)) => Ok(l),
        (None, None) => bail!("one of --rho or --lambda is required"),
        (Some(_), Some(_)) => bail!("--rho and --lambda are mutually exclusive"),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// CSV with a header row; shorter rows are padded with empty fields.
fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let width = rows
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
        .max(header.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let pad = |r: &[String]| {
        let mut r = r.to_vec();
        r.resize(width, String::new());
        r
    };
    w.write_record(pad(header))?;
    for r in rows {
        w.write_record(pad(r))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn table(
    c: &Common,
    header: &[&str],
    rows: Vec<Vec<String>>,
    json: serde_json::Value,
) -> Result<()> {
    let text = match c.format {
        Format::Csv => csv_text(
            &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            &rows,
        )?,
        Format::Json => serde_json::to_string_pretty(&json)? + "\n",
    };
    emit(&c.out, &text)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Bands {
            tiling,
            lambda_max,
            common,
        } => {
            let q = potential(&common)?;
            let bands = if q.is_zero() {
                let k_max = (lambda_max.max(0.0).sqrt() * q.a / (2.0 * std::f64::consts::PI)).ceil()
                    as usize
                    + 1;
                let mut b = bands_zero_potential(tiling, q.a, k_max)?;
                b.retain(|b| b.lambda_lo < lambda_max);
                b
            } else {
                bands_general(tiling, &q, lambda_max)?
            };
            let rows = bands
                .iter()
                .map(|b| vec![b.band_index.to_string(), f(b.lambda_lo), f(b.lambda_hi)])
                .collect();
            table(
                &common,
                &["band_index", "lambda_lo", "lambda_hi"],
                rows,
                serde_json::to_value(&bands)?,
            )?;
        }
        Cmd::Points {
            tiling,
            lambda_max,
            common,
        } => {
            let q = potential(&common)?;
            let ps = point_spectrum(tiling, &q, lambda_max)?;
            let rows = ps
                .iter()
                .flat_map(|p| {
                    p.lambdas
                        .iter()
                        .map(move |&l| vec![p.generator.as_str().to_string(), f(l)])
                })
                .collect();
            table(
                &common,
                &["generator", "lambda"],
                rows,
                serde_json::to_value(&ps)?,
            )?;
        }
        Cmd::Disprel {
            tiling,
            theta: t,
            sprime,
            check,
            rho,
            lambda,
            common,
        } => {
            let k = theta(&t)?;
            if check {
                let q = potential(&common)?;
                let l = lambda_of(rho, lambda)?;
                let spec = build_tiling(tiling);
                let b = IntervalSolver::new(&q).basis(l)?;
                let det = determinant(&assemble(&spec, &b, &k)?)?;
                let cf = closed_form(tiling, &b, &k)?;
                let r = check_equivalence(&spec, &b, &k)?;
                let header = [
                    "tiling",
                    "lambda",
                    "theta1",
                    "theta2",
                    "det_re",
                    "det_im",
                    "closed_re",
                    "closed_im",
                    "residual",
                ];
                let row = vec![
                    tiling.to_string(),
                    f(l),
                    f(k.theta1),
                    f(k.theta2),
                    f(det.re),
                    f(det.im),
                    f(cf.re),
                    f(cf.im),
                    f(r),
                ];
                let json = serde_json::json!({
                    "tiling": tiling, "lambda": l, "theta": [k.theta1, k.theta2],
                    "determinant": [det.re, det.im], "closed_form": [cf.re, cf.im], "residual": r,
                });
                table(&common, &header, vec![row], json)?;
                if r.is_nan() || r > EQUIVALENCE_TOL {
                    eprintln!("residual {r:e} exceeds {EQUIVALENCE_TOL:e}");
                    return Ok(ExitCode::from(1));
                }
            } else {
                let x = sprime.context("--sprime is required unless --check is given")?;
                let p = dispersion_form(tiling).evaluate(x, &k);
                let json = serde_json::json!({"tiling": tiling, "sprime": x, "theta": [k.theta1, k.theta2], "p": p});
                let row = vec![tiling.to_string(), f(x), f(k.theta1), f(k.theta2), f(p)];
                table(
                    &common,
                    &["tiling", "sprime", "theta1", "theta2", "p"],
                    vec![row],
                    json,
                )?;
            }
        }
        Cmd::Roots {
            tiling,
            theta: t,
            common,
        } => {
            let k = theta(&t)?;
            let r = dispersion_root_set(&dispersion_form(tiling), &k);
            let rows = r
                .iter()
                .enumerate()
                .map(|(i, &x)| vec![i.to_string(), f(x)])
                .collect();
            table(
                &common,
                &["index", "sprime"],
                rows,
                serde_json::to_value(&r)?,
            )?;
        }
        Cmd::Sweep {
            tiling,
            lambda_max,
            grid,
            common,
        } => {
            if grid < 2 {
                bail!("--grid must be at least 2");
            }
            let q = potential(&common)?;
            let profile = DiscriminantProfile::build(&q, lambda_max, &ScanOptions::default())?;
            let form = dispersion_form(tiling);
            let pts = ThetaGrid::periodic(grid).points();
            let lambdas: Vec<Vec<f64>> = pts
                .iter()
                .map(|k| {
                    let mut ls: Vec<f64> = dispersion_root_set(&form, k)
                        .into_iter()
                        .flat_map(|x| profile.level_crossings(x))
                        .collect();
                    ls.sort_by(f64::total_cmp);
                    ls
                })
                .collect();
            let width = lambdas.iter().map(Vec::len).max().unwrap_or(0);
            let mut header = vec!["theta1".to_string(), "theta2".to_string()];
            header.extend((1..=width).map(|i| format!("root_{i}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = pts
                .iter()
                .zip(&lambdas)
                .map(|(k, ls)| {
                    [f(k.theta1), f(k.theta2)]
                        .into_iter()
                        .chain(ls.iter().map(|&l| f(l)))
                        .collect()
                })
                .collect();
            let json: Vec<_> = pts
                .iter()
                .zip(&lambdas)
                .map(|(k, ls)| serde_json::json!({"theta": [k.theta1, k.theta2], "lambdas": ls}))
                .collect();
            table(&common, &header, rows, serde_json::Value::Array(json))?;
        }
        Cmd::Verify { suite, grid, out } => {
            let suite: Suite = suite.parse()?;
            let report = run_verify(
                suite,
                &VerifyOptions {
                    grid,
                    ..Default::default()
                },
            )?;
            for s in &report.suites {
                eprintln!("{}: {}", s.suite, if s.pass { "pass" } else { "FAIL" });
            }
            emit(&out, &(report.to_json()? + "\n"))?;
            if !report.pass {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Tiling { tiling, common } => {
            let spec = build_tiling(tiling);
            let report = validate_tiling(&spec);
            let rows = spec
                .vertices
                .iter()
                .flat_map(|v| {
                    v.attachments.iter().map(move |at| {
                        vec![
                            v.id.to_string(),
                            at.edge.to_string(),
                            serde_json::to_value(at.end)
                                .map(|e| e.as_str().unwrap_or("").to_string())
                                .unwrap_or_default(),
                            at.phase.0.to_string(),
                            at.phase.1.to_string(),
                            at.kirchhoff_sign.to_string(),
                        ]
                    })
                })
                .collect();
            let json = serde_json::json!({"tiling": spec, "report": report});
            table(
                &common,
                &[
                    "vertex",
                    "edge",
                    "end",
                    "phase1",
                    "phase2",
                    "kirchhoff_sign",
                ],
                rows,
                json,
            )?;
            if !report.is_clean() {
                for d in &report.diagnostics {
                    eprintln!("{d}");
                }
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Matrix {
            tiling,
            theta: t,
            rho,
            lambda,
            common,
        } => {
            let k = theta(&t)?;
            let q = potential(&common)?;
            let b = IntervalSolver::new(&q).basis(lambda_of(rho, lambda)?)?;
            let sys = assemble(&build_tiling(tiling), &b, &k)?;
            emit(&common.out, &(matrix_json(&sys, &b, &k)? + "\n"))?;
        }
        Cmd::Eigen {
            tiling,
            kind,
            lambda,
            lambda_max,
            common,
        } => {
            let q = potential(&common)?;
            let ef = match lambda {
                Some(l) => build_eigenfunction(tiling, kind, &q, l, &EigenOptions::default())?,
                None => first_eigenfunction(tiling, kind, &q, lambda_max)?,
            };
            let r = ef.residuals()?;
            eprintln!(
                "lambda {} support {} edges, continuity {:e}, kirchhoff {:e}",
                f(ef.lambda),
                ef.edges.len(),
                r.continuity,
                r.kirchhoff
            );
            let rows = ef
                .edges
                .iter()
                .flat_map(|e| {
                    ef.x.iter().zip(&e.values).map(move |(&x, &v)| {
                        vec![
                            e.edge.edge.to_string(),
                            e.edge.cell.0.to_string(),
                            e.edge.cell.1.to_string(),
                            f(x),
                            f(v),
                        ]
                    })
                })
                .collect();
            let mut json = serde_json::to_value(&ef)?;
            json["residuals"] = serde_json::to_value(r)?;
            table(
                &common,
                &["edge", "cell1", "cell2", "x", "value"],
                rows,
                json,
            )?;
        }
        Cmd::Basis { lambda, common } => {
            let q = potential(&common)?;
            let b = IntervalSolver::new(&q).basis(lambda)?;
            let row = vec![
                f(b.lambda),
                f(b.c),
                f(b.s),
                f(b.cp),
                f(b.sp),
                f(b.lagrange_residual()),
                f(b.symmetry_residual()),
            ];
            let header = [
                "lambda",
                "C",
                "S",
                "Cp",
                "Sp",
                "lagrange_residual",
                "symmetry_residual",
            ];
            table(&common, &header, vec![row], serde_json::to_value(b)?)?;
        }
        Cmd::Scan {
            lambda_min,
            lambda_max,
            grid,
            common,
        } => {
            if grid < 2 || lambda_max.is_nan() || lambda_min.is_nan() || lambda_max <= lambda_min {
                bail!("need --grid >= 2 and --lambda-max > --lambda-min");
            }
            let q = potential(&common)?;
            let ls: Vec<f64> = (0..grid)
                .map(|i| lambda_min + (lambda_max - lambda_min) * i as f64 / (grid - 1) as f64)
                .collect();
            let bs = qgtile::interval::discriminant_scan(&q, &ls)?;
            let rows = bs
                .iter()
                .map(|b| vec![f(b.lambda), f(b.c), f(b.s), f(b.cp), f(b.sp)])
                .collect();
            table(
                &common,
                &["lambda", "C", "S", "Cp", "Sp"],
                rows,
                serde_json::to_value(&bs)?,
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(n) = std::env::var("QGTILE_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: QGTILE_THREADS must be a positive integer, got `{n}`");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
