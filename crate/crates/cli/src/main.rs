//! `hc3` — spectral constants, disc eigenvalues and the third critical
//! field, with machine-readable output for reproduction scripts.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0) guards reject NaN

mod output;
mod sweep;

use clap::{Parser, Subcommand};
use hc3_core::boundary_gauge::{BoundaryParametrization, GaugeNormalForm};
use hc3_core::critical_field::{CriticalFieldSolver, FieldError};
use hc3_core::disc_spectrum::{DiscError, DiscSolver, RadialGridPolicy};
use hc3_core::grid::HalfLineGrid;
use hc3_core::model_operator::{ModelError, ModelOperator};
use hc3_core::perturbation::{
    build_trial_state, compute_constants, CutoffPolicy, PerturbationError,
};
use hc3_core::DeGennesConstants;
use hc3_series::{bernoff_sternberg, invert_critical_field, ExpansionInputs};
use output::{sig12, Csv, Json, OutputFormat};
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "hc3", version, about = "Surface-superconductivity spectral toolbox")]
struct Cli {
    /// Output format for results on standard output.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Half-line grid length for the model operator.
    #[arg(long, global = true, default_value_t = HalfLineGrid::DEFAULT_LENGTH)]
    grid_l: f64,
    /// Half-line grid point count for the model operator.
    #[arg(long, global = true, default_value_t = HalfLineGrid::DEFAULT_POINTS)]
    grid_n: usize,
    /// Minimum radial cell count for the disc solver.
    #[arg(long, global = true)]
    radial_n: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Universal spectral constants of the half-line operator.
    Constants,
    /// Band function value mu(zeta).
    Mu {
        #[arg(long, allow_hyphen_values = true)]
        zeta: f64,
    },
    /// Disc eigenvalue lambda1(B) with detuning and derivative data.
    DiscLambda {
        #[arg(long)]
        b: f64,
    },
    /// Sweep lambda1 over a B range (parallel; HC3_THREADS caps workers).
    Sweep {
        #[arg(long)]
        b_min: f64,
        #[arg(long)]
        b_max: f64,
        #[arg(long)]
        b_step: f64,
    },
    /// Critical field H_C3(kappa) by monotone inversion.
    Hc3 {
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        kappa_min: Option<f64>,
        #[arg(long)]
        kappa_max: Option<f64>,
        #[arg(long)]
        kappa_step: Option<f64>,
    },
    /// Formal critical-field series by truncated Puiseux inversion.
    Series {
        /// Number of ladder coefficients eta_0..eta_M to solve for.
        #[arg(long)]
        order: usize,
        #[arg(long)]
        k_max: f64,
        #[arg(long)]
        k2: f64,
        /// CSV file of tail coefficients: rows `j,zeta_j`.
        #[arg(long)]
        zeta: Option<std::path::PathBuf>,
    },
    /// Disc gauge normal-form verification table.
    GaugeCheck,
    /// Trial-state residual and norm checks at (delta, B).
    TrialCheck {
        #[arg(long)]
        b: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        delta: f64,
    },
}

enum CliError {
    Validation(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Grid(_) => CliError::Validation(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<PerturbationError> for CliError {
    fn from(e: PerturbationError) -> Self {
        match e {
            PerturbationError::Model(m) => m.into(),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<DiscError> for CliError {
    fn from(e: DiscError) -> Self {
        match e {
            DiscError::UnderResolvedLayer { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::KappaTooSmall { .. } => CliError::Validation(e.to_string()),
            FieldError::Disc(d) => d.into(),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hc3: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn model_grid(cli: &Cli) -> Result<HalfLineGrid, CliError> {
    HalfLineGrid::new(cli.grid_l, cli.grid_n).map_err(|e| CliError::Validation(e.to_string()))
}

fn constants_for(cli: &Cli) -> Result<DeGennesConstants, CliError> {
    Ok(compute_constants(model_grid(cli)?)?)
}

fn disc_solver(cli: &Cli) -> Result<DiscSolver, CliError> {
    let mut policy = RadialGridPolicy::default();
    if let Some(n) = cli.radial_n {
        if n < 64 {
            return Err(CliError::Validation(format!(
                "radial cell count {n} too small (need >= 64)"
            )));
        }
        policy.min_cells = n;
    }
    Ok(DiscSolver::with_policy(constants_for(cli)?, policy))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {v}")))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Constants => cmd_constants(cli),
        Command::Mu { zeta } => cmd_mu(cli, *zeta),
        Command::DiscLambda { b } => cmd_disc_lambda(cli, *b),
        Command::Sweep {
            b_min,
            b_max,
            b_step,
        } => cmd_sweep(cli, *b_min, *b_max, *b_step),
        Command::Hc3 {
            kappa,
            kappa_min,
            kappa_max,
            kappa_step,
        } => cmd_hc3(cli, *kappa, *kappa_min, *kappa_max, *kappa_step),
        Command::Series {
            order,
            k_max,
            k2,
            zeta,
        } => cmd_series(cli, *order, *k_max, *k2, zeta.as_deref()),
        Command::GaugeCheck => cmd_gauge_check(cli),
        Command::TrialCheck { b, delta } => cmd_trial_check(cli, *b, *delta),
    }
}

fn grid_json(g: &HalfLineGrid) -> Json {
    Json::Obj(vec![
        ("length", Json::Num(g.length())),
        ("points", Json::Int(g.points() as i64)),
    ])
}

fn cmd_constants(cli: &Cli) -> Result<(), CliError> {
    let c = constants_for(cli)?;
    match cli.format {
        OutputFormat::Json => Json::schema_obj(vec![
            ("xi0", Json::Num(c.xi0)),
            ("theta0", Json::Num(c.theta0)),
            ("C1", Json::Num(c.c1)),
            ("I2", Json::Num(c.i2)),
            ("delta0", Json::Num(c.delta0)),
            ("C0", Json::Num(c.c0)),
            (
                "lambda2",
                Json::Obj(vec![
                    ("a2", Json::Num(c.lambda2.a2)),
                    ("a1", Json::Num(c.lambda2.a1)),
                    ("a0", Json::Num(c.lambda2.a0)),
                ]),
            ),
            ("grid", grid_json(&c.grid)),
        ])
        .print(),
        OutputFormat::Csv => Csv {
            header: &[
                "xi0", "theta0", "C1", "I2", "delta0", "C0", "a2", "a1", "a0", "grid_l", "grid_n",
            ],
            rows: vec![vec![
                sig12(c.xi0),
                sig12(c.theta0),
                sig12(c.c1),
                sig12(c.i2),
                sig12(c.delta0),
                sig12(c.c0),
                sig12(c.lambda2.a2),
                sig12(c.lambda2.a1),
                sig12(c.lambda2.a0),
                sig12(c.grid.length()),
                c.grid.points().to_string(),
            ]],
        }
        .print(),
    }
    Ok(())
}

fn cmd_mu(cli: &Cli, zeta: f64) -> Result<(), CliError> {
    let grid = model_grid(cli)?;
    let mu = ModelOperator::new(grid).mu(zeta)?;
    match cli.format {
        OutputFormat::Json => Json::schema_obj(vec![
            ("zeta", Json::Num(zeta)),
            ("mu", Json::Num(mu)),
            ("grid", grid_json(&grid)),
        ])
        .print(),
        OutputFormat::Csv => Csv {
            header: &["zeta", "mu"],
            rows: vec![vec![sig12(zeta), sig12(mu)]],
        }
        .print(),
    }
    Ok(())
}

struct DiscRow {
    b: f64,
    m_star: i64,
    lambda1: f64,
    delta_m: f64,
    delta_b: f64,
    residual: f64,
    right_derivative: f64,
}

fn disc_row(solver: &DiscSolver, b: f64) -> Result<DiscRow, CliError> {
    let d = solver.lambda1(b)?;
    let rd = solver.right_derivative(b, 1e-3 * b.sqrt())?;
    Ok(DiscRow {
        b,
        m_star: d.m_star,
        lambda1: d.lambda1,
        delta_m: d.delta_m,
        delta_b: d.delta_b,
        residual: d.expansion_residual(solver.constants()),
        right_derivative: rd.right(),
    })
}

const DISC_HEADER: &[&str] = &[
    "B",
    "m_star",
    "lambda1",
    "delta_m",
    "Delta_B",
    "residual",
    "right_derivative",
];

fn disc_csv_row(r: &DiscRow) -> Vec<String> {
    vec![
        sig12(r.b),
        r.m_star.to_string(),
        sig12(r.lambda1),
        sig12(r.delta_m),
        sig12(r.delta_b),
        sig12(r.residual),
        sig12(r.right_derivative),
    ]
}

fn disc_json_row(r: &DiscRow) -> Json {
    Json::Obj(vec![
        ("B", Json::Num(r.b)),
        ("m_star", Json::Int(r.m_star)),
        ("lambda1", Json::Num(r.lambda1)),
        ("delta_m", Json::Num(r.delta_m)),
        ("Delta_B", Json::Num(r.delta_b)),
        ("residual", Json::Num(r.residual)),
        ("right_derivative", Json::Num(r.right_derivative)),
    ])
}

fn cmd_disc_lambda(cli: &Cli, b: f64) -> Result<(), CliError> {
    positive("--b", b)?;
    if b < 25.0 {
        return Err(CliError::Validation(format!(
            "disc eigenvalue scan needs B >= 25, got {b}"
        )));
    }
    let solver = disc_solver(cli)?;
    let row = disc_row(&solver, b)?;
    match cli.format {
        OutputFormat::Json => {
            Json::schema_obj(match disc_json_row(&row) {
                Json::Obj(fields) => fields,
                _ => unreachable!(),
            })
            .print();
        }
        OutputFormat::Csv => Csv {
            header: DISC_HEADER,
            rows: vec![disc_csv_row(&row)],
        }
        .print(),
    }
    Ok(())
}

fn range_points(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) {
        return Err(CliError::Validation(format!("step must be positive, got {step}")));
    }
    if max < min {
        return Err(CliError::Validation(format!("empty range [{min}, {max}]")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

fn cmd_sweep(cli: &Cli, b_min: f64, b_max: f64, b_step: f64) -> Result<(), CliError> {
    positive("--b-min", b_min)?;
    if b_min < 25.0 {
        return Err(CliError::Validation(format!(
            "disc eigenvalue scan needs B >= 25, got {b_min}"
        )));
    }
    let bs = range_points(b_min, b_max, b_step)?;
    let solver = disc_solver(cli)?;
    let rows = sweep::ordered_map(&bs, "sweep", |&b| disc_row(&solver, b));
    let rows: Result<Vec<DiscRow>, CliError> = rows.into_iter().collect();
    let rows = rows?;
    match cli.format {
        OutputFormat::Json => {
            Json::schema_obj(vec![(
                "rows",
                Json::Arr(rows.iter().map(disc_json_row).collect()),
            )])
            .print();
        }
        OutputFormat::Csv => Csv {
            header: DISC_HEADER,
            rows: rows.iter().map(disc_csv_row).collect(),
        }
        .print(),
    }
    Ok(())
}

fn cmd_hc3(
    cli: &Cli,
    kappa: Option<f64>,
    kappa_min: Option<f64>,
    kappa_max: Option<f64>,
    kappa_step: Option<f64>,
) -> Result<(), CliError> {
    let kappas = match (kappa, kappa_min, kappa_max, kappa_step) {
        (Some(k), None, None, None) => vec![positive("--kappa", k)?],
        (None, Some(lo), Some(hi), Some(st)) => range_points(positive("--kappa-min", lo)?, hi, st)?,
        _ => {
            return Err(CliError::Validation(
                "give either --kappa or all of --kappa-min/--kappa-max/--kappa-step".into(),
            ))
        }
    };
    let solver = CriticalFieldSolver::new(disc_solver(cli)?);
    let c = solver.disc().constants().clone();
    let results = sweep::ordered_map(&kappas, "hc3", |&k| solver.hc3_local(k));
    let results: Result<Vec<_>, FieldError> = results.into_iter().collect();
    let results = results.map_err(CliError::from)?;
    match cli.format {
        OutputFormat::Json => {
            let rows: Vec<Json> = results
                .iter()
                .map(|r| {
                    Json::Obj(vec![
                        ("kappa", Json::Num(r.kappa)),
                        ("H", Json::Num(r.h)),
                        ("residual", Json::Num(r.residual)),
                        ("lower_local", Json::Num(r.lower_local)),
                        ("upper_local", Json::Num(r.upper_local)),
                        (
                            "asymptotic_gap",
                            Json::Num(r.asymptotic_gap(c.theta0, c.c1)),
                        ),
                    ])
                })
                .collect();
            Json::schema_obj(vec![("rows", Json::Arr(rows))]).print();
        }
        OutputFormat::Csv => Csv {
            header: &[
                "kappa",
                "H",
                "residual",
                "lower_local",
                "upper_local",
                "asymptotic_gap",
            ],
            rows: results
                .iter()
                .map(|r| {
                    vec![
                        sig12(r.kappa),
                        sig12(r.h),
                        sig12(r.residual),
                        sig12(r.lower_local),
                        sig12(r.upper_local),
                        sig12(r.asymptotic_gap(c.theta0, c.c1)),
                    ]
                })
                .collect(),
        }
        .print(),
    }
    Ok(())
}

fn read_zeta_csv(path: &std::path::Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut zeta: Vec<f64> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (a, b) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
        match (a.trim().parse::<usize>(), b.trim().parse::<f64>()) {
            (Ok(j), Ok(v)) => {
                if zeta.len() <= j {
                    zeta.resize(j + 1, 0.0);
                }
                zeta[j] = v;
            }
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(CliError::Validation(format!(
                    "{}:{}: expected `j,zeta_j`",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(zeta)
}

fn cmd_series(
    cli: &Cli,
    order: usize,
    k_max: f64,
    k2: f64,
    zeta_path: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if order > 40 {
        return Err(CliError::Validation(format!("order {order} too large (max 40)")));
    }
    let zeta = match zeta_path {
        Some(p) => read_zeta_csv(p)?,
        None => Vec::new(),
    };
    let c = constants_for(cli)?;
    let inputs = ExpansionInputs::new(c.theta0, c.c1, k_max, k2, zeta)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let inv = invert_critical_field(&inputs, order).map_err(|e| CliError::Solver(e.to_string()))?;
    let bs = bernoff_sternberg(&inputs);
    match cli.format {
        OutputFormat::Json => {
            let h_terms: Vec<Json> = inv
                .h
                .terms()
                .map(|(e, coef)| {
                    Json::Obj(vec![
                        ("exponent", Json::Num(-(e as f64) / 8.0)),
                        ("coefficient", Json::Num(coef)),
                    ])
                })
                .collect();
            let bs_terms: Vec<Json> = bs
                .terms()
                .map(|(e, coef)| {
                    Json::Obj(vec![
                        ("exponent", Json::Num(-(e as f64) / 8.0)),
                        ("coefficient", Json::Num(coef)),
                    ])
                })
                .collect();
            Json::schema_obj(vec![
                ("order", Json::Int(order as i64)),
                ("eta", Json::Arr(inv.eta.iter().map(|&x| Json::Num(x)).collect())),
                ("H_terms", Json::Arr(h_terms)),
                ("bernoff_sternberg_terms", Json::Arr(bs_terms)),
            ])
            .print();
        }
        OutputFormat::Csv => {
            let mut rows: Vec<Vec<String>> = inv
                .eta
                .iter()
                .enumerate()
                .map(|(j, &v)| vec!["eta".into(), j.to_string(), sig12(v)])
                .collect();
            rows.extend(
                inv.h
                    .terms()
                    .map(|(e, c)| vec!["h_term".into(), sig12(-(e as f64) / 8.0), sig12(c)]),
            );
            Csv {
                header: &["kind", "key", "value"],
                rows,
            }
            .print();
        }
    }
    Ok(())
}

fn cmd_gauge_check(cli: &Cli) -> Result<(), CliError> {
    let disc = BoundaryParametrization::unit_disc(0.5)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let nf = GaugeNormalForm::unit_field(&disc);
    let mut rows = Vec::new();
    for i in 0..4 {
        let s = disc.perimeter() * i as f64 / 4.0;
        for t in [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
            let a1 = nf.a1(s, t).map_err(|e| CliError::Solver(e.to_string()))?;
            let exact = 0.5 - t + 0.5 * t * t;
            rows.push((s, t, a1, exact, (a1 - exact).abs()));
        }
    }
    match cli.format {
        OutputFormat::Json => {
            let json_rows: Vec<Json> = rows
                .iter()
                .map(|&(s, t, a1, exact, diff)| {
                    Json::Obj(vec![
                        ("s", Json::Num(s)),
                        ("t", Json::Num(t)),
                        ("A1", Json::Num(a1)),
                        ("exact", Json::Num(exact)),
                        ("abs_diff", Json::Num(diff)),
                    ])
                })
                .collect();
            Json::schema_obj(vec![
                ("gamma0", Json::Num(nf.gamma0)),
                ("rows", Json::Arr(json_rows)),
            ])
            .print();
        }
        OutputFormat::Csv => Csv {
            header: &["s", "t", "A1", "exact", "abs_diff"],
            rows: rows
                .iter()
                .map(|&(s, t, a1, exact, diff)| {
                    vec![sig12(s), sig12(t), sig12(a1), sig12(exact), sig12(diff)]
                })
                .collect(),
        }
        .print(),
    }
    Ok(())
}

fn cmd_trial_check(cli: &Cli, b: f64, delta: f64) -> Result<(), CliError> {
    if !(b >= 16.0) {
        return Err(CliError::Validation(format!("trial state needs B >= 16, got {b}")));
    }
    if !(delta.abs() <= 10.0) {
        return Err(CliError::Validation(format!("|delta| <= 10 required, got {delta}")));
    }
    let grid = model_grid(cli)?;
    let op = ModelOperator::new(grid);
    let (xi0, _) = op.minimize_band(1e-9)?;
    let u0 = op.ground_state(xi0)?;
    let trial = build_trial_state(delta, b, &op, &u0, CutoffPolicy::default())?;
    let residual = trial.residual();
    let norm = trial.weighted_norm();
    let e = if b >= 25.0 {
        Some(disc_solver(cli)?.e_delta_b(delta, b)?.eigenvalue)
    } else {
        None
    };
    match cli.format {
        OutputFormat::Json => {
            let mut fields = vec![
                ("B", Json::Num(b)),
                ("delta", Json::Num(delta)),
                ("norm", Json::Num(norm)),
                ("predicted_eigenvalue", Json::Num(trial.predicted_eigenvalue)),
                ("residual", Json::Num(residual)),
                ("residual_scaled", Json::Num(residual * b.powf(1.5))),
            ];
            if let Some(e) = e {
                fields.push(("e_delta_B", Json::Num(e)));
                fields.push(("prediction_gap", Json::Num(e - trial.predicted_eigenvalue)));
            }
            Json::schema_obj(fields).print();
        }
        OutputFormat::Csv => Csv {
            header: &[
                "B",
                "delta",
                "norm",
                "predicted_eigenvalue",
                "residual",
                "residual_scaled",
                "e_delta_B",
            ],
            rows: vec![vec![
                sig12(b),
                sig12(delta),
                sig12(norm),
                sig12(trial.predicted_eigenvalue),
                sig12(residual),
                sig12(residual * b.powf(1.5)),
                e.map(sig12).unwrap_or_default(),
            ]],
        }
        .print(),
    }
    Ok(())
}
