//! Command-line driver: ingest field/germ descriptions, run the analysis and
//! cycle pipeline, and emit JSON reports, certificates, and plot CSVs.
//!
//! Exit codes: 0 success (and, for `cycles`, both certificates positive);
//! 1 configuration or parse failure; 2 mathematical rejection of the input
//! (degenerate field, real ratio, non-invariant infinity line, ...);
//! 3 pipeline ran but a certificate verdict is negative.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use holocycle::certify::{certify_integrals, cycle_integral};
use holocycle::error::Error as CoreError;
use holocycle::forge::{
    build_family, certify_disjoint_family, select_subsequence_logs, BetaLift, FamilyOptions,
};
use holocycle::io::{
    from_json_str, to_json_precise, AffineSingularityJson, AnalyzeJson, CertificateJson,
    CyclesJson, FieldJson, HolonomyJson, InfinitySingularityJson, LineJson, PathJson, TangencyJson,
};
use holocycle::model::{
    is_complex_hyperbolic, singular_points, CrossSection, LocalLinearModel, NumericConfig,
    SearchBox,
};
use holocycle::projective::{count_tangencies, infinity_singularities, AffineLine};
use holocycle::transport::{holonomy_germ, lift_path, BaseCoord, Foliation, GermMap};
use holocycle::{cplx, C64};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "holocycle",
    version,
    about = "Complex limit cycle construction and certification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a polynomial field: singular points, infinity points, tangencies.
    Analyze(AnalyzeArgs),
    /// Lift a base path through the leaves and report the holonomy.
    Holonomy(HolonomyArgs),
    /// Run the cycle pipeline and emit cycles.json + certificate.json.
    Cycles(CyclesArgs),
    /// Re-run an independence certificate over an existing cycles.json.
    Certify(CertifyArgs),
    /// Export per-cycle CSV tables from a cycles.json.
    Plotdata(PlotdataArgs),
}

#[derive(Args)]
struct CommonOut {
    /// Output directory for reports.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Field description JSON ({"p": [...], "q": [...]}).
    #[arg(long)]
    field: PathBuf,
    /// Affine line `a_re,a_im,b_re,b_im` to count tangencies against (repeatable).
    #[arg(long = "line")]
    lines: Vec<String>,
    /// Half-width of the singular-point search box.
    #[arg(long, default_value_t = 5.0)]
    search_box: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct HolonomyArgs {
    /// Field description JSON; mutually exclusive with --lambda.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Eigenvalue ratio `re,im` of the linear model.
    #[arg(long)]
    lambda: Option<String>,
    /// Base path JSON (circle shorthand or [t, [re,im]] control points).
    #[arg(long)]
    path: PathBuf,
    /// Start value `re,im` of the fiber coordinate.
    #[arg(long, default_value = "0.1,0")]
    start: String,
    /// Base coordinate of the path.
    #[arg(long, default_value = "z")]
    base: String,
    #[arg(long = "tol-ode")]
    tol_ode: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct CyclesArgs {
    /// Eigenvalue ratio `re,im` of the linearization chart.
    #[arg(long)]
    lambda: Option<String>,
    /// Built-in germ preset: `demo`, `affine:a_re,a_im,b_re,b_im`,
    /// `moebius:a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im`, `linear:nu_re,nu_im`.
    #[arg(long)]
    germ: Option<String>,
    /// Field JSON in linearizing coordinates (singularity at the origin).
    #[arg(long)]
    field: Option<PathBuf>,
    /// Entry path JSON lifted to build the holonomy germ (with --field).
    #[arg(long)]
    beta: Option<PathBuf>,
    /// Number of consecutive cycles to construct.
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Initial section radius before the shrinking search.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    #[arg(long = "tol-ode")]
    tol_ode: Option<f64>,
    #[arg(long = "tol-fixed")]
    tol_fixed: Option<f64>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct CertifyArgs {
    /// Existing cycles.json to re-certify.
    #[arg(long)]
    cycles: PathBuf,
    /// Criterion to apply.
    #[arg(long, default_value = "multiplier")]
    method: String,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct PlotdataArgs {
    /// Existing cycles.json to export.
    #[arg(long)]
    cycles: PathBuf,
    #[command(flatten)]
    out: CommonOut,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Holonomy(args) => cmd_holonomy(args),
        Command::Cycles(args) => cmd_cycles(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Plotdata(args) => cmd_plotdata(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CoreError>()
                .map(exit_code_for)
                .unwrap_or(ExitCode::from(1));
            code
        }
    }
}

/// Mathematical rejections exit 2, everything else 1.
fn exit_code_for(err: &CoreError) -> ExitCode {
    match err {
        CoreError::DegenerateField(..)
        | CoreError::NotInvariantLine
        | CoreError::InvariantLine
        | CoreError::NotComplexHyperbolic { .. }
        | CoreError::SingularEncounter { .. }
        | CoreError::ContractionViolated(_)
        | CoreError::GermVanishes { .. }
        | CoreError::OnSeparatrix { .. }
        | CoreError::NoAdmissibleDirection { .. }
        | CoreError::NoConvergence { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn read_to_string(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_report(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn parse_complex(text: &str, what: &str) -> anyhow::Result<C64> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(anyhow!("{what} must be 're,im', got '{text}'"));
    }
    let re: f64 = parts[0]
        .trim()
        .parse()
        .with_context(|| format!("parsing {what}"))?;
    let im: f64 = parts[1]
        .trim()
        .parse()
        .with_context(|| format!("parsing {what}"))?;
    Ok(cplx(re, im))
}

fn parse_floats(text: &str, expect: usize, what: &str) -> anyhow::Result<Vec<f64>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("parsing {what}"))?;
    if vals.len() != expect {
        return Err(anyhow!("{what} needs {expect} comma-separated numbers"));
    }
    Ok(vals)
}

fn parse_germ_preset(spec: &str) -> anyhow::Result<GermMap<f64>> {
    if spec == "demo" {
        return Ok(GermMap::affine(cplx(0.5, 0.0), cplx(0.2, 0.0)));
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("germ preset must be 'demo' or 'kind:params', got '{spec}'"))?;
    match kind {
        "affine" => {
            let v = parse_floats(rest, 4, "affine germ parameters")?;
            Ok(GermMap::affine(cplx(v[0], v[1]), cplx(v[2], v[3])))
        }
        "moebius" => {
            let v = parse_floats(rest, 8, "moebius germ parameters")?;
            Ok(GermMap::moebius(
                cplx(v[0], v[1]),
                cplx(v[2], v[3]),
                cplx(v[4], v[5]),
                cplx(v[6], v[7]),
            )?)
        }
        "linear" => {
            let v = parse_floats(rest, 2, "linear germ parameter")?;
            Ok(GermMap::exact_linear(cplx(v[0], v[1])))
        }
        other => Err(anyhow!("unknown germ preset kind '{other}'")),
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    let text = read_to_string(&args.field)?;
    let wire: FieldJson = from_json_str(&text, &args.field.display().to_string())?;
    let field = wire.to_field()?;

    let affine = singular_points(&field, &SearchBox::centered(args.search_box))?;
    let infinity = infinity_singularities(&field)?;

    let mut tangencies = Vec::new();
    for line_spec in &args.lines {
        let v = parse_floats(line_spec, 4, "line")?;
        let line = AffineLine {
            slope: cplx(v[0], v[1]),
            offset: cplx(v[2], v[3]),
        };
        let t = count_tangencies(&field, &line)?;
        tangencies.push(TangencyJson {
            line: LineJson {
                a: [v[0], v[1]],
                b: [v[2], v[3]],
            },
            count: t.affine_count,
            points: t
                .points
                .iter()
                .map(|(z, w)| [[z.re, z.im], [w.re, w.im]])
                .collect(),
            implied_class_degree: t.implied_class_degree,
        });
    }

    let report = AnalyzeJson {
        degree: field.degree(),
        affine_singularities: affine
            .iter()
            .map(|s| AffineSingularityJson {
                point: [[s.point.0.re, s.point.0.im], [s.point.1.re, s.point.1.im]],
                jacobian: [
                    [
                        [s.jacobian[0][0].re, s.jacobian[0][0].im],
                        [s.jacobian[0][1].re, s.jacobian[0][1].im],
                    ],
                    [
                        [s.jacobian[1][0].re, s.jacobian[1][0].im],
                        [s.jacobian[1][1].re, s.jacobian[1][1].im],
                    ],
                ],
                eigenvalues: [
                    [s.eigenvalues.0.re, s.eigenvalues.0.im],
                    [s.eigenvalues.1.re, s.eigenvalues.1.im],
                ],
                lambda: s.lambda.map(|l| [l.re, l.im]),
                complex_hyperbolic: s.complex_hyperbolic,
                residual: s.residual,
            })
            .collect(),
        infinity_singularities: infinity
            .iter()
            .map(|s| InfinitySingularityJson {
                direction: [
                    [s.direction[0].re, s.direction[0].im],
                    [s.direction[1].re, s.direction[1].im],
                ],
                lambda_j: s.lambda_j.map(|l| [l.re, l.im]),
                multiplicity: s.multiplicity,
                hyperbolic: s.hyperbolic,
            })
            .collect(),
        tangencies,
    };

    match args.format {
        ReportFormat::Json => {
            write_report(&args.out.out, "analyze.json", &to_json_precise(&report)?)?;
        }
        ReportFormat::Csv => {
            let mut csv = String::from("kind,re_z,im_z,re_w,im_w,hyperbolic\n");
            for s in &report.affine_singularities {
                csv.push_str(&format!(
                    "affine,{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                    s.point[0][0],
                    s.point[0][1],
                    s.point[1][0],
                    s.point[1][1],
                    s.complex_hyperbolic
                ));
            }
            for s in &report.infinity_singularities {
                csv.push_str(&format!(
                    "infinity,{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                    s.direction[0][0],
                    s.direction[0][1],
                    s.direction[1][0],
                    s.direction[1][1],
                    s.hyperbolic
                ));
            }
            write_report(&args.out.out, "analyze.csv", &csv)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// holonomy
// ---------------------------------------------------------------------------

fn cmd_holonomy(args: HolonomyArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = NumericConfig::<f64>::default();
    if let Some(tol) = args.tol_ode {
        cfg.ode_rel_tol = tol;
        cfg.ode_abs_tol = tol * 1e-2;
    }
    cfg.validate()?;

    let foliation = match (&args.field, &args.lambda) {
        (Some(path), None) => {
            let text = read_to_string(path)?;
            let wire: FieldJson = from_json_str(&text, &path.display().to_string())?;
            Foliation::Polynomial(wire.to_field()?)
        }
        (None, Some(lambda)) => {
            let lambda = parse_complex(lambda, "lambda")?;
            let (model, _) = LocalLinearModel::from_ratio(lambda)?;
            Foliation::LinearModel(model)
        }
        _ => return Err(anyhow!("provide exactly one of --field or --lambda")),
    };

    let base = match args.base.as_str() {
        "z" => BaseCoord::Z,
        "w" => BaseCoord::W,
        other => return Err(anyhow!("--base must be 'z' or 'w', got '{other}'")),
    };
    let path_text = read_to_string(&args.path)?;
    let wire: PathJson = from_json_str(&path_text, &args.path.display().to_string())?;
    let base_path = wire.to_base_path()?;
    let start = parse_complex(&args.start, "start")?;

    let lift = lift_path(&foliation, base, &base_path, start, &cfg)?;
    let report = HolonomyJson {
        endpoint: [lift.endpoint.re, lift.endpoint.im],
        derivative: [lift.derivative.re, lift.derivative.im],
        estimated_error: lift.estimated_error,
        trace: lift
            .trace
            .samples()
            .iter()
            .map(|s| [s.t, s.z.re, s.z.im, s.w.re, s.w.im])
            .collect(),
    };
    write_report(&args.out.out, "holonomy.json", &to_json_precise(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// cycles
// ---------------------------------------------------------------------------

fn cmd_cycles(args: CyclesArgs) -> anyhow::Result<ExitCode> {
    if args.count == 0 {
        return Err(anyhow!("--count must be at least 1"));
    }
    let mut cfg = NumericConfig::<f64>::default();
    if let Some(tol) = args.tol_ode {
        cfg.ode_rel_tol = tol;
        cfg.ode_abs_tol = tol * 1e-2;
    }
    if let Some(tol) = args.tol_fixed {
        cfg.fixed_point_tol = tol;
    }
    cfg.validate()?;
    if args.radius <= 0.0 {
        return Err(anyhow!("--radius must be positive"));
    }

    // germ route: closed-form preset over a linear model; field route: lift
    // the supplied entry path through the field (given in linearizing
    // coordinates) to build the holonomy germ
    let (model, germ, beta): (LocalLinearModel<f64>, GermMap<f64>, BetaLift<f64>) =
        match (&args.germ, &args.field) {
            (Some(spec), None) => {
                let lambda_text = args
                    .lambda
                    .as_deref()
                    .ok_or_else(|| anyhow!("--germ requires --lambda"))?;
                let lambda = parse_complex(lambda_text, "lambda")?;
                let model = LocalLinearModel::new_normalized(lambda).map_err(|_| {
                    anyhow::Error::new(CoreError::NotComplexHyperbolic {
                        re: lambda.re,
                        im: lambda.im,
                    })
                })?;
                (model, parse_germ_preset(spec)?, BetaLift::synthetic())
            }
            (None, Some(field_path)) => {
                let text = read_to_string(field_path)?;
                let wire: FieldJson = from_json_str(&text, &field_path.display().to_string())?;
                let field = wire.to_field()?;
                let lambda = match &args.lambda {
                    Some(text) => parse_complex(text, "lambda")?,
                    None => {
                        let jac = field.jacobian(cplx(0.0, 0.0), cplx(0.0, 0.0));
                        is_complex_hyperbolic(&jac).ok_or_else(|| {
                            anyhow::Error::new(CoreError::NotComplexHyperbolic {
                                re: jac[0][0].re,
                                im: 0.0,
                            })
                        })?
                    }
                };
                let model = LocalLinearModel::new_normalized(lambda)?;
                let beta_path = args
                    .beta
                    .as_ref()
                    .ok_or_else(|| anyhow!("--field requires --beta"))?;
                let beta_text = read_to_string(beta_path)?;
                let beta_wire: PathJson =
                    from_json_str(&beta_text, &beta_path.display().to_string())?;
                let base_path = beta_wire.to_base_path()?;
                let section = CrossSection::standard(args.radius)?;
                let foliation = Foliation::Polynomial(field);
                let germ = holonomy_germ(
                    foliation.clone(),
                    BaseCoord::Z,
                    base_path.clone(),
                    section,
                    cfg.clone(),
                )?;
                (
                    model,
                    germ,
                    BetaLift::Traced {
                        foliation,
                        base: BaseCoord::Z,
                        path: base_path,
                    },
                )
            }
            _ => return Err(anyhow!("provide exactly one of --germ or --field")),
        };

    let options = FamilyOptions {
        count: args.count,
        initial_radius: args.radius,
        start_index: 1,
    };
    let family = build_family(&model, germ, beta, &options, &cfg)?;
    let disjoint = certify_disjoint_family(&family, &cfg)?;

    let logs: Vec<f64> = family.cycles.iter().map(|c| c.log_multiplier_abs).collect();
    let selected = select_subsequence_logs(&logs);
    let selected_logs: Vec<f64> = selected.iter().map(|&i| logs[i]).collect();
    let mut independence = holocycle::certify::certify_multiplier_logs(&selected_logs);
    independence = independence.with_caveat(format!(
        "selected cycle indices: {:?}",
        selected
            .iter()
            .map(|&i| family.cycles[i].index)
            .collect::<Vec<_>>()
    ));
    if !disjoint.verdict {
        independence.certified = false;
        independence = independence.with_caveat("disjointness certificate failed".to_string());
    }

    let cycles_json = CyclesJson::from_family(&family, &disjoint);
    write_report(
        &args.out.out,
        "cycles.json",
        &to_json_precise(&cycles_json)?,
    )?;
    let cert_json = CertificateJson::from_certificate(&independence);
    write_report(
        &args.out.out,
        "certificate.json",
        &to_json_precise(&cert_json)?,
    )?;

    for clause in &disjoint.clauses {
        println!(
            "[{}] {}: {}",
            if clause.passed { "PASS" } else { "FAIL" },
            clause.name,
            clause.detail
        );
    }
    println!(
        "[{}] multiplier-cascade: min log-margin {:.3e}",
        if independence.certified {
            "PASS"
        } else {
            "FAIL"
        },
        independence.min_margin()
    );

    if disjoint.verdict && independence.certified {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

fn cmd_certify(args: CertifyArgs) -> anyhow::Result<ExitCode> {
    let text = read_to_string(&args.cycles)?;
    let cycles: CyclesJson = from_json_str(&text, &args.cycles.display().to_string())?;
    let cfg = NumericConfig::<f64>::default();

    let certificate = match args.method.as_str() {
        "multiplier" => {
            // certify the greedily selected subsequence, as the pipeline does
            let logs: Vec<f64> = cycles.cycles.iter().map(|c| c.log_mu_abs).collect();
            let selected = select_subsequence_logs(&logs);
            let selected_logs: Vec<f64> = selected.iter().map(|&i| logs[i]).collect();
            holocycle::certify::certify_multiplier_logs(&selected_logs).with_caveat(format!(
                "selected cycle indices: {:?}",
                selected
                    .iter()
                    .map(|&i| cycles.cycles[i].n)
                    .collect::<Vec<_>>()
            ))
        }
        "integral" => {
            let mut values = Vec::new();
            for c in &cycles.cycles {
                // map chart samples back to ambient coordinates first
                let (sz, sw) = (cycles.chart_scale[0], cycles.chart_scale[1]);
                let curve: Vec<(C64, C64)> = c
                    .curve
                    .iter()
                    .map(|s| (cplx(s[0] * sz, s[1] * sz), cplx(s[2] * sw, s[3] * sw)))
                    .collect();
                values.push(cycle_integral(&curve, &cfg)?);
            }
            certify_integrals(&values)
        }
        other => {
            return Err(anyhow!(
                "--method must be 'multiplier' or 'integral', got '{other}'"
            ))
        }
    };

    let verdict = certificate.certified;
    let wire = CertificateJson::from_certificate(&certificate);
    write_report(&args.out.out, "certificate.json", &to_json_precise(&wire)?)?;
    println!(
        "[{}] {} criterion over {} cycles",
        if verdict { "PASS" } else { "FAIL" },
        wire.method,
        cycles.cycles.len()
    );
    Ok(if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

// ---------------------------------------------------------------------------
// plotdata
// ---------------------------------------------------------------------------

fn cmd_plotdata(args: PlotdataArgs) -> anyhow::Result<ExitCode> {
    let text = read_to_string(&args.cycles)?;
    let cycles: CyclesJson = from_json_str(&text, &args.cycles.display().to_string())?;
    std::fs::create_dir_all(&args.out.out)?;
    for c in &cycles.cycles {
        let mut csv = String::from("t,re_z,im_z,re_w,im_w\n");
        let denom = (c.curve.len().saturating_sub(1)).max(1) as f64;
        for (k, s) in c.curve.iter().enumerate() {
            let t = k as f64 / denom;
            csv.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                t, s[0], s[1], s[2], s[3]
            ));
        }
        let name = format!("cycle_{:04}.csv", c.n);
        write_report(&args.out.out, &name, &csv)?;
    }
    println!("exported {} cycles", cycles.cycles.len());
    Ok(ExitCode::SUCCESS)
}
