//! Command-line driver.
//!
//! One binary, subcommand per operation. Checking subcommands print a
//! text summary by default, the full JSON report with `--json`, and can
//! mirror the JSON report to a file with `--out`. Exit codes: 0 when all
//! checks pass, 1 on any failure or runtime error, 2 on usage errors.
//!
//! Phases and angles are written as fractions of a full turn: `1/3`
//! means `exp(2 pi i / 3)`, and `0.25` means `exp(pi i / 2)`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use faer::c64;
use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::freepoint::{self, SelectStrategy};
use crate::induced;
use crate::rep::{unit_from_turn, RepModel};
use crate::report::{CheckRecord, ConfigEcho, Report};
use crate::rewrite::TwistedActionTable;
use crate::twisted::{self, coeff, AxiomKind, GroupAlgElem, L1Elem};
use crate::words::{FGen, KElem};

#[derive(Parser)]
#[command(
    name = "modrep",
    version,
    about = "Twisted-action and induced-representation computations over Z2 * Z3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct ModelArgs {
    /// Block dimension of the unitary model
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Seed for the model draw
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Diagonal angles for V2 as fractions of a turn, comma separated
    /// (e.g. `0,1/4,3/8`); drawn from the seed when omitted
    #[arg(long, value_delimiter = ',')]
    angles: Option<Vec<String>>,
}

#[derive(Args, Clone, Debug)]
struct OutputArgs {
    /// Print the full JSON report on stdout instead of the text summary
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
struct TolArgs {
    /// Spectral comparison tolerance
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Angular margin (radians) for phase selection
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the twisted-action table (generator images and cocycle) as JSON
    Table {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the twisted-action axioms exactly in the free group
    VerifyAxioms {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a seeded unitary model and print its summary as JSON
    MakeRep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify covariance, homomorphism and irreducibility of the induced
    /// representation at one phase
    CheckInduced {
        #[command(flatten)]
        model: ModelArgs,
        /// Phase for the second generator, as a fraction of a turn;
        /// selected automatically when omitted
        #[arg(long)]
        lambda: Option<String>,
        #[command(flatten)]
        tols: TolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate forbidden sets and select free phases
    SelectLambda {
        #[command(flatten)]
        model: ModelArgs,
        /// How many phases to select inductively
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        tols: TolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certify that two phases induce inequivalent representations
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        /// First phase, as a fraction of a turn
        #[arg(long)]
        lambda: String,
        /// Second phase, as a fraction of a turn
        #[arg(long)]
        lambda2: String,
        #[command(flatten)]
        tols: TolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full pipeline: exact axioms, two free phases, irreducibility of
    /// both induced representations and their inequivalence
    #[command(name = "theorem2")]
    Theorem2 {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        tols: TolArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Entry point used by `main`; returns the process exit code.
pub fn run_from_env() -> i32 {
    run(std::env::args())
}

/// Parses and executes; suitable for in-process testing.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors, 0 for --help/--version
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };

    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Table { output } => cmd_table(&output),
        Command::VerifyAxioms { output } => cmd_verify_axioms(&output),
        Command::MakeRep { model, output } => cmd_make_rep(&model, &output),
        Command::CheckInduced {
            model,
            lambda,
            tols,
            output,
        } => cmd_check_induced(&model, lambda.as_deref(), &tols, &output),
        Command::SelectLambda {
            model,
            count,
            tols,
            output,
        } => cmd_select_lambda(&model, count, &tols, &output),
        Command::Compare {
            model,
            lambda,
            lambda2,
            tols,
            output,
        } => cmd_compare(&model, &lambda, &lambda2, &tols, &output),
        Command::Theorem2 {
            model,
            tols,
            output,
        } => cmd_theorem2(&model, &tols, &output),
    }
}

/// Parses a phase given as a fraction of a turn: `p/q` exactly or a
/// decimal.
fn parse_turn(s: &str) -> Result<(c64, Option<Ratio<i64>>), String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p
            .trim()
            .parse()
            .map_err(|_| format!("bad turn numerator in `{s}`"))?;
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|_| format!("bad turn denominator in `{s}`"))?;
        if q == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        let r = Ratio::new(p, q);
        let t = (*r.numer() as f64) / (*r.denom() as f64);
        Ok((unit_from_turn(t), Some(r)))
    } else {
        let t: f64 = s.parse().map_err(|_| format!("bad turn `{s}`"))?;
        Ok((unit_from_turn(t), None))
    }
}

fn parse_angles(angles: &[String]) -> Result<Vec<f64>, String> {
    angles
        .iter()
        .map(|s| {
            let s = s.trim();
            if let Some((p, q)) = s.split_once('/') {
                let p: f64 = p.trim().parse().map_err(|_| format!("bad angle `{s}`"))?;
                let q: f64 = q.trim().parse().map_err(|_| format!("bad angle `{s}`"))?;
                if q == 0.0 {
                    return Err(format!("zero denominator in `{s}`"));
                }
                Ok(p / q)
            } else {
                s.parse().map_err(|_| format!("bad angle `{s}`"))
            }
        })
        .collect()
}

fn build_model(args: &ModelArgs) -> Result<RepModel, String> {
    let angles = match &args.angles {
        Some(a) => Some(parse_angles(a)?),
        None => None,
    };
    RepModel::make(args.dim, args.seed, angles.as_deref()).map_err(|e| e.to_string())
}

fn turn_string(z: c64, exact: Option<Ratio<i64>>) -> String {
    match exact {
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => format!("{}", z.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU),
    }
}

fn unit_json(z: c64, exact: Option<Ratio<i64>>) -> serde_json::Value {
    let mut v = json!({
        "re": z.re,
        "im": z.im,
        "turn": z.arg().rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU,
    });
    if let Some(r) = exact {
        v["turn_exact"] = json!(format!("{}/{}", r.numer(), r.denom()));
    }
    v
}

fn emit(report: &Report, output: &OutputArgs) -> Result<i32, String> {
    if output.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(path) = &output.out {
        std::fs::write(path, report.to_json())
            .map_err(|e| format!("writing {}: {e}", path.display()))?;
    }
    Ok(report.exit_code())
}

fn emit_payload(payload: &serde_json::Value, output: &OutputArgs) -> Result<i32, String> {
    let mut text = serde_json::to_string_pretty(payload).expect("payload serialization");
    text.push('\n');
    print!("{text}");
    if let Some(path) = &output.out {
        std::fs::write(path, &text).map_err(|e| format!("writing {}: {e}", path.display()))?;
    }
    Ok(0)
}

fn cmd_table(output: &OutputArgs) -> Result<i32, String> {
    let table = TwistedActionTable::build();
    let mut alpha = BTreeMap::new();
    for k in KElem::ALL {
        alpha.insert(
            k.to_string(),
            json!({
                "x1": table.alpha_image(k, FGen::X1).to_string(),
                "x2": table.alpha_image(k, FGen::X2).to_string(),
            }),
        );
    }
    let mut u = BTreeMap::new();
    for k in KElem::ALL {
        for l in KElem::ALL {
            u.insert(format!("{k};{l}"), table.cocycle(k, l).to_string());
        }
    }
    emit_payload(
        &json!({
            "schema": "modrep.table/1",
            "alpha": alpha,
            "u": u,
        }),
        output,
    )
}

fn cmd_verify_axioms(output: &OutputArgs) -> Result<i32, String> {
    let table = TwistedActionTable::build();
    let axioms = twisted::verify_twisted_axioms(&table);
    let mut report = Report::new(ConfigEcho {
        subcommand: "verify-axioms".into(),
        ..ConfigEcho::default()
    });
    for kind in [
        AxiomKind::AdTwist,
        AxiomKind::CocycleIdentity,
        AxiomKind::Normalization,
    ] {
        let (passed, total) = axioms.count(kind);
        let failures: Vec<String> = axioms
            .failures()
            .filter(|i| i.kind == kind)
            .map(|i| i.label.clone())
            .collect();
        let mut record = CheckRecord::new(kind.name(), total, passed, passed == total);
        if !failures.is_empty() {
            record = record.with_info(json!({ "failures": failures }));
        }
        report.push(record);
    }
    emit(&report, output)
}

fn cmd_make_rep(model_args: &ModelArgs, output: &OutputArgs) -> Result<i32, String> {
    let model = build_model(model_args)?;
    let eigenvalues: Vec<serde_json::Value> = model
        .v2_diag()
        .iter()
        .map(|&z| unit_json(z, None))
        .collect();
    emit_payload(
        &json!({
            "schema": "modrep.rep/1",
            "dim": model.dim(),
            "seed": model_args.seed,
            "lambda": unit_json(model.lambda(), None),
            "v2_eigenvalues": eigenvalues,
            "v1_checksum": model.v1_checksum(),
        }),
        output,
    )
}

/// Deterministic sparse elements for the homomorphism spot checks.
fn seeded_l1_elements(seed: u64, count: usize) -> Vec<L1Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_word = |rng: &mut ChaCha8Rng| {
        use crate::words::{FLetter, FWord};
        let len = rng.gen_range(0..=4usize);
        FWord::from_letters((0..len).map(|_| match rng.gen_range(0..4u8) {
            0 => FLetter::X1,
            1 => FLetter::X1Inv,
            2 => FLetter::X2,
            _ => FLetter::X2Inv,
        }))
    };
    (0..count)
        .map(|_| {
            let mut f = L1Elem::zero();
            for k in KElem::ALL {
                let mut a = GroupAlgElem::zero();
                for _ in 0..2 {
                    a.add_term(
                        random_word(&mut rng),
                        coeff(rng.gen_range(-3..=3), rng.gen_range(-3..=3)),
                    );
                }
                f.set_component(k, a);
            }
            f
        })
        .collect()
}

const COVARIANCE_TOL: f64 = 1e-9;
const HOMOMORPHISM_TOL: f64 = 1e-9;

fn commutant_info(space: &induced::IntertwinerSpace) -> serde_json::Value {
    let tail: Vec<f64> = space.singular_values.iter().take(4).copied().collect();
    json!({
        "dimension": space.dimension,
        "sigma_max": space.sigma_max,
        "smallest_sigmas": tail,
        "residual": space.residual,
        "threshold": space.threshold,
    })
}

fn cmd_check_induced(
    model_args: &ModelArgs,
    lambda: Option<&str>,
    tols: &TolArgs,
    output: &OutputArgs,
) -> Result<i32, String> {
    let table = TwistedActionTable::build();
    let model = build_model(model_args)?;

    let (lambda_value, lambda_exact) = match lambda {
        Some(s) => parse_turn(s)?,
        None => {
            let pick = freepoint::select_lambda(
                &model,
                &[],
                SelectStrategy::Deterministic,
                tols.margin,
                tols.tol,
            )
            .map_err(|e| e.to_string())?;
            (pick.value, pick.turn)
        }
    };
    let lambda_str = turn_string(lambda_value, lambda_exact);

    let mut report = Report::new(ConfigEcho {
        subcommand: "check-induced".into(),
        dim: Some(model_args.dim),
        seed: Some(model_args.seed),
        lambda: Some(lambda_str.clone()),
        angles: model_args.angles.clone(),
        tol: Some(tols.tol),
        margin: Some(tols.margin),
        ..ConfigEcho::default()
    });

    let free = freepoint::verify_free_point(&model, &table, lambda_value, tols.tol)
        .map_err(|e| e.to_string())?;
    let witness_hits = free.witnesses.iter().filter(|w| w.inequivalent).count();
    report.push(
        CheckRecord::new("free_point", free.witnesses.len(), witness_hits, free.free).with_info(
            json!({
                "lambda": lambda_str,
                "stabilizer": free.stabilizer.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            }),
        ),
    );

    let m = model.with_lambda(lambda_value).map_err(|e| e.to_string())?;

    let extra: Vec<GroupAlgElem> = seeded_l1_elements(model_args.seed ^ 0x5eed, 3)
        .into_iter()
        .map(|f| f.component(KElem::UNIT).clone())
        .collect();
    let cov = induced::check_covariance(&m, &table, &extra);
    report.push(
        CheckRecord::new(
            "covariance_conjugation",
            cov.conjugation.len(),
            cov.conjugation
                .iter()
                .filter(|r| r.defect <= COVARIANCE_TOL)
                .count(),
            cov.max_conjugation_defect() <= COVARIANCE_TOL,
        )
        .with_defect(cov.max_conjugation_defect()),
    );
    report.push(
        CheckRecord::new(
            "covariance_multiplication",
            cov.multiplication.len(),
            cov.multiplication
                .iter()
                .filter(|r| r.defect <= COVARIANCE_TOL)
                .count(),
            cov.max_multiplication_defect() <= COVARIANCE_TOL,
        )
        .with_defect(cov.max_multiplication_defect()),
    );

    let elements = seeded_l1_elements(model_args.seed.wrapping_add(17), 10);
    let mut product_defect: f64 = 0.0;
    let mut involution_defect: f64 = 0.0;
    for pair in elements.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let (f, g) = (&pair[0], &pair[1]);
        let lhs = induced::induce(&m, &table, &f.multiply(g, &table));
        let rhs = induced::induce(&m, &table, f).multiply(&induced::induce(&m, &table, g));
        product_defect = product_defect.max(lhs.sub(&rhs).op_norm());
        let lhs = induced::induce(&m, &table, &f.involution(&table));
        let rhs = induced::induce(&m, &table, f).adjoint();
        involution_defect = involution_defect.max(lhs.sub(&rhs).op_norm());
    }
    report.push(
        CheckRecord::new(
            "induce_product",
            elements.len() / 2,
            if product_defect <= HOMOMORPHISM_TOL {
                elements.len() / 2
            } else {
                0
            },
            product_defect <= HOMOMORPHISM_TOL,
        )
        .with_defect(product_defect),
    );
    report.push(
        CheckRecord::new(
            "induce_involution",
            elements.len() / 2,
            if involution_defect <= HOMOMORPHISM_TOL {
                elements.len() / 2
            } else {
                0
            },
            involution_defect <= HOMOMORPHISM_TOL,
        )
        .with_defect(involution_defect),
    );

    let space = induced::intertwiners(&m, &m, &table).map_err(|e| e.to_string())?;
    report.push(
        CheckRecord::new(
            "commutant_dimension",
            1,
            usize::from(space.dimension == 1),
            space.dimension == 1,
        )
        .with_info(commutant_info(&space)),
    );

    emit(&report, output)
}

fn cmd_select_lambda(
    model_args: &ModelArgs,
    count: usize,
    tols: &TolArgs,
    output: &OutputArgs,
) -> Result<i32, String> {
    let table = TwistedActionTable::build();
    let model = build_model(model_args)?;

    let picks = freepoint::build_family(
        &model,
        count,
        SelectStrategy::Deterministic,
        tols.margin,
        tols.tol,
    )
    .map_err(|e| e.to_string())?;
    let values: Vec<c64> = picks.iter().map(|p| p.value).collect();
    let omegas =
        freepoint::compute_omegas(&model, &values, tols.tol).map_err(|e| e.to_string())?;

    let mut report = Report::new(ConfigEcho {
        subcommand: "select-lambda".into(),
        dim: Some(model_args.dim),
        seed: Some(model_args.seed),
        angles: model_args.angles.clone(),
        tol: Some(tols.tol),
        margin: Some(tols.margin),
        count: Some(count),
        ..ConfigEcho::default()
    });

    let set_json = |set: &[c64]| -> serde_json::Value {
        json!(set.iter().map(|&z| unit_json(z, None)).collect::<Vec<_>>())
    };
    let mut omega_lambda = BTreeMap::new();
    for (prev, set) in &omegas.omega_lambda {
        omega_lambda.insert(
            format!("{:.12}", prev.arg().rem_euclid(std::f64::consts::TAU)),
            set_json(set),
        );
    }

    let mut all_free = true;
    let mut lambdas = Vec::new();
    let mut stabilizers = Vec::new();
    for pick in &picks {
        let fp = freepoint::verify_free_point(&model, &table, pick.value, tols.tol)
            .map_err(|e| e.to_string())?;
        all_free &= fp.free;
        lambdas.push(unit_json(pick.value, pick.turn));
        stabilizers.push(json!({
            "lambda": turn_string(pick.value, pick.turn),
            "free": fp.free,
            "stabilizer": fp.stabilizer.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        }));
    }

    report.push(
        CheckRecord::new("free_points", picks.len(), picks.len(), all_free).with_info(json!({
            "omegas": {
                "omega1": set_json(&omegas.omega1),
                "omega2": set_json(&omegas.omega2),
                "omega3": set_json(&omegas.omega3),
                "omega_lambda": omega_lambda,
            },
            "lambdas": lambdas,
            "reports": stabilizers,
        })),
    );

    emit(&report, output)
}

fn cmd_compare(
    model_args: &ModelArgs,
    lambda: &str,
    lambda2: &str,
    tols: &TolArgs,
    output: &OutputArgs,
) -> Result<i32, String> {
    let table = TwistedActionTable::build();
    let model = build_model(model_args)?;
    let (l1, l1_exact) = parse_turn(lambda)?;
    let (l2, l2_exact) = parse_turn(lambda2)?;

    let mut report = Report::new(ConfigEcho {
        subcommand: "compare".into(),
        dim: Some(model_args.dim),
        seed: Some(model_args.seed),
        lambda: Some(turn_string(l1, l1_exact)),
        lambda2: Some(turn_string(l2, l2_exact)),
        angles: model_args.angles.clone(),
        tol: Some(tols.tol),
        margin: Some(tols.margin),
        ..ConfigEcho::default()
    });

    let conditions = freepoint::pairwise_conditions_hold(&model, l1, l2, tols.tol)
        .map_err(|e| e.to_string())?;
    report.push(CheckRecord::new(
        "pairwise_spectral_conditions",
        6,
        if conditions { 6 } else { 0 },
        conditions,
    ));

    let ma = model.with_lambda(l1).map_err(|e| e.to_string())?;
    let mb = model.with_lambda(l2).map_err(|e| e.to_string())?;
    let space = induced::intertwiners(&ma, &mb, &table).map_err(|e| e.to_string())?;
    report.push(
        CheckRecord::new(
            "intertwiner_dimension",
            1,
            usize::from(space.dimension == 0),
            space.dimension == 0,
        )
        .with_info(commutant_info(&space)),
    );

    emit(&report, output)
}

fn cmd_theorem2(
    model_args: &ModelArgs,
    tols: &TolArgs,
    output: &OutputArgs,
) -> Result<i32, String> {
    let table = TwistedActionTable::build();
    let model = build_model(model_args)?;

    let mut report = Report::new(ConfigEcho {
        subcommand: "theorem2".into(),
        dim: Some(model_args.dim),
        seed: Some(model_args.seed),
        angles: model_args.angles.clone(),
        tol: Some(tols.tol),
        margin: Some(tols.margin),
        ..ConfigEcho::default()
    });

    // exact layer first: the twisted-action axioms
    let axioms = twisted::verify_twisted_axioms(&table);
    report.push(CheckRecord::new(
        "twisted_axioms",
        axioms.instances.len(),
        axioms.instances.iter().filter(|i| i.pass).count(),
        axioms.all_pass(),
    ));

    // two inductively selected phases
    let picks = freepoint::build_family(
        &model,
        2,
        SelectStrategy::Deterministic,
        tols.margin,
        tols.tol,
    )
    .map_err(|e| e.to_string())?;
    let (p1, p2) = (&picks[0], &picks[1]);
    report.config.lambda = Some(turn_string(p1.value, p1.turn));
    report.config.lambda2 = Some(turn_string(p2.value, p2.turn));

    for (name, pick) in [("free_point_lambda", p1), ("free_point_lambda2", p2)] {
        let fp = freepoint::verify_free_point(&model, &table, pick.value, tols.tol)
            .map_err(|e| e.to_string())?;
        let hits = fp.witnesses.iter().filter(|w| w.inequivalent).count();
        report.push(
            CheckRecord::new(name, fp.witnesses.len(), hits, fp.free).with_info(json!({
                "lambda": turn_string(pick.value, pick.turn),
            })),
        );
    }

    let ma = model.with_lambda(p1.value).map_err(|e| e.to_string())?;
    let mb = model.with_lambda(p2.value).map_err(|e| e.to_string())?;

    for (name, m) in [("commutant_lambda", &ma), ("commutant_lambda2", &mb)] {
        let space = induced::intertwiners(m, m, &table).map_err(|e| e.to_string())?;
        report.push(
            CheckRecord::new(name, 1, usize::from(space.dimension == 1), space.dimension == 1)
                .with_info(commutant_info(&space)),
        );
    }

    let cross = induced::intertwiners(&ma, &mb, &table).map_err(|e| e.to_string())?;
    report.push(
        CheckRecord::new(
            "intertwiners_cross",
            1,
            usize::from(cross.dimension == 0),
            cross.dimension == 0,
        )
        .with_info(commutant_info(&cross)),
    );

    emit(&report, output)
}
