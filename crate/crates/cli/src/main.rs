//! `fourfold`: catalog queries, Wu decisions, Spin^C enumeration, surgery
//! transforms, rule-engine evaluation and kernel self-tests.
//!
//! Exit codes: 0 success, 2 domain errors (syntax, unknown manifolds,
//! invariant violations) with a one-line diagnostic on stderr, 1 internal
//! faults and kernel tolerance failures. With `--machine` every command
//! emits a single JSON document with lowercase snake keys.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fourfold_core::lattice::CohomologyClass;
use fourfold_core::manifold::{parse, Catalog, ManifoldModel};
use fourfold_core::rules;
use fourfold_core::selftest;
use fourfold_core::surgery::{self, CanonicalExtension, SumDecomposition};
use fourfold_core::swarith::SpinCStructure;

#[derive(Parser)]
#[command(
    name = "fourfold",
    version,
    about = "Exact Seiberg-Witten arithmetic for closed oriented 4-manifolds",
    after_help = "Class vectors are comma-separated integers in the model's basis order; \
                  for parsed sums the basis is ordered left-to-right by summand. \
                  Expressions follow the grammar  expr := term ('#' term)*, \
                  term := INT '*' atom | atom, atom := IDENT | '~' atom | '(' expr ')'."
)]
struct Cli {
    /// JSON manifest extending the built-in catalog (read-only)
    #[arg(long, global = true, env = "FOURFOLD_MANIFEST", value_name = "path.json")]
    manifest: Option<PathBuf>,
    /// Emit a single JSON document instead of human-readable text
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Topological profile: Betti numbers, signature, kappa, flags
    Info { expr: String },
    /// Wu-theorem decision for almost complex structures
    Wu {
        expr: String,
        /// Sup-norm bound for the witness search
        #[arg(long = "box", default_value_t = 10, value_name = "N")]
        bound: i64,
    },
    /// Spin^C structure operations
    #[command(subcommand)]
    Spinc(SpincCommand),
    /// Index report for a Spin^C structure: Dirac, half-de-Rham, v.dim
    Vdim {
        expr: String,
        #[command(flatten)]
        class: ClassArg,
    },
    /// Transport a Spin^C structure across one blow-up
    Blowup {
        expr: String,
        #[command(flatten)]
        class: ClassArg,
    },
    /// Extend a Spin^C structure to a canonical class on X # d CP2bar
    Extend {
        expr: String,
        #[command(flatten)]
        class: ClassArg,
    },
    /// Run the invariant rule engine
    Rules {
        expr: String,
        /// Hand the outermost connected-sum decomposition to the engine
        #[arg(long)]
        decomposed: bool,
    },
    /// Filter basic-class candidates by the Taubes constraints
    Taubes {
        expr: String,
        /// JSON file holding an array of class vectors
        #[arg(long, value_name = "file")]
        candidates: PathBuf,
    },
    /// Expected dimension of the pseudoholomorphic moduli space
    Gromov {
        expr: String,
        /// Poincare-dual class, comma-separated integers
        #[arg(long, value_name = "a,b,...", allow_hyphen_values = true)]
        mu: String,
    },
    /// Numeric kernel checks
    #[command(subcommand)]
    Kernel(KernelCommand),
}

#[derive(Subcommand)]
enum SpincCommand {
    /// Enumerate characteristic classes in a box
    Enumerate {
        expr: String,
        #[arg(long = "box", value_name = "N")]
        bound: i64,
        /// Restrict to classes with this square
        #[arg(long, allow_hyphen_values = true)]
        square: Option<i64>,
        /// Restrict to classes with this virtual dimension
        #[arg(long, allow_hyphen_values = true)]
        vdim: Option<i64>,
    },
}

#[derive(Subcommand)]
enum KernelCommand {
    /// Run the seeded spinor/twistor identity suite
    Selftest {
        #[arg(long, default_value_t = 1, value_name = "S")]
        seed: u64,
        #[arg(long, default_value_t = 100, value_name = "N")]
        trials: u32,
    },
}

#[derive(Args)]
struct ClassArg {
    /// Class vector, comma-separated integers in basis order
    #[arg(long = "class", value_name = "a,b,...", allow_hyphen_values = true)]
    class: String,
}

enum CliError {
    /// User-facing: bad input, unknown names, violated invariants.
    Domain(String),
    /// Internal faults and kernel tolerance failures.
    Internal(String),
}

impl CliError {
    fn domain(e: impl std::fmt::Display) -> Self {
        Self::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let machine = cli.machine;
    match run(cli) {
        Ok(output) => {
            if machine {
                println!("{}", output.document);
            } else {
                print!("{}", output.human);
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Domain(message)) => {
            eprintln!("fourfold: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("fourfold: internal: {message}");
            ExitCode::from(1)
        }
    }
}

/// The machine document plus a pre-rendered human form.
struct Output {
    document: Value,
    human: String,
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let catalog = load_catalog(cli.manifest.as_deref())?;
    match cli.command {
        Command::Info { expr } => info(&expr, &catalog),
        Command::Wu { expr, bound } => wu(&expr, bound, &catalog),
        Command::Spinc(SpincCommand::Enumerate { expr, bound, square, vdim }) => {
            spinc_enumerate(&expr, bound, square, vdim, &catalog)
        }
        Command::Vdim { expr, class } => vdim_report(&expr, &class.class, &catalog),
        Command::Blowup { expr, class } => blowup(&expr, &class.class, &catalog),
        Command::Extend { expr, class } => extend(&expr, &class.class, &catalog),
        Command::Rules { expr, decomposed } => run_rules(&expr, decomposed, &catalog),
        Command::Taubes { expr, candidates } => taubes(&expr, &candidates, &catalog),
        Command::Gromov { expr, mu } => gromov(&expr, &mu, &catalog),
        Command::Kernel(KernelCommand::Selftest { seed, trials }) => kernel_selftest(seed, trials),
    }
}

fn load_catalog(path: Option<&std::path::Path>) -> Result<Catalog, CliError> {
    match path {
        None => Ok(Catalog::builtin()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Domain(format!("cannot read manifest {path:?}: {e}")))?;
            Catalog::load(&text).map_err(CliError::domain)
        }
    }
}

fn build_model(expr: &str, catalog: &Catalog) -> Result<ManifoldModel, CliError> {
    fourfold_core::manifold::parse_expression(expr, catalog).map_err(CliError::domain)
}

fn build_with_split(
    expr: &str,
    catalog: &Catalog,
) -> Result<(ManifoldModel, Option<SumDecomposition>), CliError> {
    let parsed = parse(expr).map_err(CliError::domain)?;
    parsed.build_with_decomposition(catalog).map_err(CliError::domain)
}

fn parse_class(text: &str, rank: usize) -> Result<CohomologyClass, CliError> {
    let trimmed = text.trim();
    let coords: Vec<i64> = if trimmed.is_empty() {
        vec![]
    } else {
        trimmed
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::Domain(format!("bad class coordinate `{part}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if coords.len() != rank {
        return Err(CliError::Domain(format!(
            "class has {} coordinates, form rank is {rank}",
            coords.len()
        )));
    }
    Ok(CohomologyClass::new(coords))
}

fn class_json(c: &CohomologyClass) -> Value {
    json!(c.coords())
}

fn info(expr: &str, catalog: &Catalog) -> Result<Output, CliError> {
    let model = build_model(expr, catalog)?;
    let sig = model.signature_data();
    let flags = model.flags();
    let mut flag_names = Vec::new();
    for (set, name) in [
        (flags.simply_connected, "simply_connected"),
        (flags.spin, "spin"),
        (flags.kahler, "kahler"),
        (flags.symplectic, "symplectic"),
        (flags.psc, "psc"),
    ] {
        if set {
            flag_names.push(name);
        }
    }
    let document = json!({
        "command": "info",
        "expr": expr,
        "name": model.name(),
        "b1": model.b1(),
        "b2": model.b2(),
        "b2_plus": sig.b2_plus,
        "b2_minus": sig.b2_minus,
        "chi": model.euler_characteristic(),
        "sigma": sig.sigma,
        "kappa": model.kappa(),
        "flags": flag_names,
    });
    let human = format!(
        "name: {}\nb1 = {}, b2 = {} (b2+ = {}, b2- = {})\nchi = {}, sigma = {}, kappa = {}\nflags: {}\n",
        model.name(),
        model.b1(),
        model.b2(),
        sig.b2_plus,
        sig.b2_minus,
        model.euler_characteristic(),
        sig.sigma,
        model.kappa(),
        if flag_names.is_empty() { "none".to_string() } else { flag_names.join(" ") },
    );
    Ok(Output { document, human })
}

fn wu(expr: &str, bound: i64, catalog: &Catalog) -> Result<Output, CliError> {
    if bound < 1 {
        return Err(CliError::Domain("--box must be at least 1".into()));
    }
    let model = build_model(expr, catalog)?;
    let verdict = model.admits_almost_complex(bound).map_err(CliError::domain)?;
    let (verdict_json, human) = match &verdict {
        fourfold_core::manifold::WuVerdict::Yes { witnesses } => (
            json!({
                "status": "yes",
                "witnesses": witnesses.iter().map(class_json).collect::<Vec<_>>(),
            }),
            format!(
                "Yes: witnesses {}\n",
                witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
            ),
        ),
        fourfold_core::manifold::WuVerdict::No { reason } => (
            json!({"status": "no", "reason": reason.to_string()}),
            format!("No: {reason}\n"),
        ),
        fourfold_core::manifold::WuVerdict::Indeterminate { box_searched } => (
            json!({"status": "indeterminate", "box_searched": box_searched}),
            format!("Indeterminate: no witness in box {box_searched}\n"),
        ),
    };
    let document = json!({
        "command": "wu",
        "expr": expr,
        "name": model.name(),
        "kappa": model.kappa(),
        "box": bound,
        "verdict": verdict_json,
    });
    Ok(Output { document, human })
}

fn spinc_enumerate(
    expr: &str,
    bound: i64,
    square: Option<i64>,
    vdim: Option<i64>,
    catalog: &Catalog,
) -> Result<Output, CliError> {
    if bound < 0 {
        return Err(CliError::Domain("--box must be nonnegative".into()));
    }
    if square.is_some() && vdim.is_some() {
        return Err(CliError::Domain("--square and --vdim are mutually exclusive".into()));
    }
    let model = build_model(expr, catalog)?;
    // v.dim = (c^2 - kappa)/4 translates a vdim constraint to a square
    let effective_square = match (square, vdim) {
        (Some(s), None) => Some(s),
        (None, Some(d)) => Some(4 * d + model.kappa()),
        _ => None,
    };
    let classes = model
        .form()
        .enumerate_characteristic(bound, effective_square)
        .map_err(CliError::domain)?;
    let document = json!({
        "command": "spinc_enumerate",
        "expr": expr,
        "name": model.name(),
        "box": bound,
        "square": square,
        "vdim": vdim,
        "classes": classes.iter().map(class_json).collect::<Vec<_>>(),
    });
    let mut human = format!("{} characteristic classes in box {bound}", classes.len());
    if let Some(s) = effective_square {
        human.push_str(&format!(" with square {s}"));
    }
    human.push('\n');
    for c in &classes {
        human.push_str(&format!("{c}\n"));
    }
    Ok(Output { document, human })
}

fn vdim_report(expr: &str, class_text: &str, catalog: &Catalog) -> Result<Output, CliError> {
    let model = build_model(expr, catalog)?;
    let class = parse_class(class_text, model.form().rank())?;
    let spinc = SpinCStructure::new(&model, class.clone()).map_err(CliError::domain)?;
    let report = spinc.index_report().map_err(CliError::domain)?;
    let symmetry = match report.symmetry {
        fourfold_core::swarith::SymmetryExponent::Integral(k) => json!(k),
        fourfold_core::swarith::SymmetryExponent::NonIntegral => Value::Null,
    };
    let document = json!({
        "command": "vdim",
        "expr": expr,
        "name": model.name(),
        "class": class_json(&class),
        "square": spinc.square().map_err(CliError::domain)?,
        "dirac_index": report.dirac_index,
        "half_derham_index": report.half_derham_index,
        "vdim": report.vdim,
        "c2_wplus": report.c2_wplus,
        "c2_wminus": report.c2_wminus,
        "symmetry_exponent": symmetry,
    });
    let symmetry_text = match report.symmetry {
        fourfold_core::swarith::SymmetryExponent::Integral(k) => k.to_string(),
        fourfold_core::swarith::SymmetryExponent::NonIntegral => "non-integral".to_string(),
    };
    let human = format!(
        "class {class} on {}\nv.dim = {} = dirac {} + half-de-Rham {}\nc2(W+) = {}, c2(W-) = {}\nsymmetry exponent k = {symmetry_text}\n",
        model.name(),
        report.vdim,
        report.dirac_index,
        report.half_derham_index,
        report.c2_wplus,
        report.c2_wminus,
    );
    Ok(Output { document, human })
}

fn blowup(expr: &str, class_text: &str, catalog: &Catalog) -> Result<Output, CliError> {
    let model = build_model(expr, catalog)?;
    let class = parse_class(class_text, model.form().rank())?;
    let spinc = SpinCStructure::new(&model, class.clone()).map_err(CliError::domain)?;
    let blown = surgery::blow_up_class(&spinc).map_err(CliError::domain)?;
    let lifted =
        SpinCStructure::new(&blown.model, blown.class.clone()).map_err(CliError::domain)?;
    let vdim = lifted.virtual_dimension().map_err(CliError::domain)?;
    let document = json!({
        "command": "blowup",
        "expr": expr,
        "class": class_json(&class),
        "blown_name": blown.model.name(),
        "blown_class": class_json(&blown.class),
        "vdim": vdim,
    });
    let human = format!(
        "blow-up of {}: {}\nclass {} -> {}\nv.dim preserved: {}\n",
        model.name(),
        blown.model.name(),
        class,
        blown.class,
        vdim,
    );
    Ok(Output { document, human })
}

fn extend(expr: &str, class_text: &str, catalog: &Catalog) -> Result<Output, CliError> {
    let model = build_model(expr, catalog)?;
    let class = parse_class(class_text, model.form().rank())?;
    let spinc = SpinCStructure::new(&model, class.clone()).map_err(CliError::domain)?;
    let extension = surgery::canonical_extension(&spinc).map_err(CliError::domain)?;
    let (result_json, human) = match &extension {
        CanonicalExtension::Extended { model: y, class: k_c, copies } => {
            let square = y.form().square(k_c).map_err(CliError::domain)?;
            (
                json!({
                    "status": "extended",
                    "copies": copies,
                    "model": y.name(),
                    "canonical_class": class_json(k_c),
                    "square": square,
                    "kappa": y.kappa(),
                }),
                format!(
                    "extended over {} CP2bar summand(s): K_c = {k_c} on {}\nK_c^2 = {square} = kappa = {}\n",
                    copies,
                    y.name(),
                    y.kappa(),
                ),
            )
        }
        CanonicalExtension::NotExtendable { reason } => (
            json!({"status": "not_extendable", "reason": reason}),
            format!("not extendable: {reason}\n"),
        ),
    };
    let document = json!({
        "command": "extend",
        "expr": expr,
        "class": class_json(&class),
        "result": result_json,
    });
    Ok(Output { document, human })
}

fn run_rules(expr: &str, decomposed: bool, catalog: &Catalog) -> Result<Output, CliError> {
    let (model, split) = build_with_split(expr, catalog)?;
    let split = if decomposed {
        if split.is_none() {
            return Err(CliError::Domain(
                "--decomposed requires a connected-sum expression".into(),
            ));
        }
        split
    } else {
        None
    };
    let evaluation = rules::evaluate(&model, split.as_ref());
    let (body, human) = match &evaluation {
        rules::Evaluation::Verdict(v) => {
            let assertions: Vec<Value> = v
                .assertions
                .iter()
                .map(|(c, s)| {
                    json!({
                        "class": class_json(c),
                        "status": match s {
                            rules::ClassStatus::NonzeroPlusMinusOne => "nonzero_plus_minus_one",
                            rules::ClassStatus::Zero => "zero",
                        },
                    })
                })
                .collect();
            let derivations: Vec<Value> = v
                .derivations
                .iter()
                .map(|d| {
                    json!({"rule": d.rule, "premises": d.premises, "conclusion": d.conclusion})
                })
                .collect();
            let mut human = String::new();
            if v.all_trivial {
                human.push_str("all invariants vanish\n");
            }
            for (c, s) in &v.assertions {
                let status = match s {
                    rules::ClassStatus::NonzeroPlusMinusOne => "+-1 (nonzero)",
                    rules::ClassStatus::Zero => "0",
                };
                human.push_str(&format!("N({c}) = {status}\n"));
            }
            if v.assertions.is_empty() && !v.all_trivial {
                human.push_str("no facts derived\n");
            }
            human.push_str("derivations:\n");
            for d in &v.derivations {
                human.push_str(&format!("  {d}\n"));
            }
            (
                json!({
                    "outcome": "verdict",
                    "all_trivial": v.all_trivial,
                    "assertions": assertions,
                    "derivations": derivations,
                }),
                human,
            )
        }
        rules::Evaluation::Contradiction(c) => (
            json!({
                "outcome": "contradiction",
                "class": c.class.as_ref().map(class_json),
                "conclusion": c.conclusion,
                "first": {
                    "rule": c.first.rule,
                    "premises": c.first.premises,
                    "conclusion": c.first.conclusion,
                },
                "second": {
                    "rule": c.second.rule,
                    "premises": c.second.premises,
                    "conclusion": c.second.conclusion,
                },
            }),
            format!("{c}\n"),
        ),
    };
    let mut document = json!({
        "command": "rules",
        "expr": expr,
        "name": model.name(),
        "decomposed": decomposed,
    });
    merge(&mut document, body);
    Ok(Output { document, human })
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        for (k, v) in e {
            t.insert(k, v);
        }
    }
}

fn taubes(
    expr: &str,
    candidates_path: &std::path::Path,
    catalog: &Catalog,
) -> Result<Output, CliError> {
    let model = build_model(expr, catalog)?;
    let text = std::fs::read_to_string(candidates_path).map_err(|e| {
        CliError::Domain(format!("cannot read candidates {candidates_path:?}: {e}"))
    })?;
    let raw: Vec<Vec<i64>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("candidates file: {e}")))?;
    let rank = model.form().rank();
    let candidates: Vec<CohomologyClass> = raw
        .into_iter()
        .map(|coords| {
            if coords.len() != rank {
                Err(CliError::Domain(format!(
                    "candidate has {} coordinates, form rank is {rank}",
                    coords.len()
                )))
            } else {
                Ok(CohomologyClass::new(coords))
            }
        })
        .collect::<Result<_, _>>()?;
    let decisions = rules::taubes_filter(&model, &candidates).map_err(CliError::domain)?;
    let constant = rules::taubes_constant(&model).map_err(CliError::domain)?;
    let document = json!({
        "command": "taubes",
        "expr": expr,
        "name": model.name(),
        "constant_pi_coefficient": constant.0,
        "decisions": decisions.iter().map(|d| json!({
            "class": class_json(&d.class),
            "kept": d.kept,
            "reason": d.reason,
        })).collect::<Vec<_>>(),
    });
    let mut human = format!("Taubes constant C = {constant}\n");
    for d in &decisions {
        human.push_str(&format!(
            "{} {}: {}\n",
            if d.kept { "keep" } else { "reject" },
            d.class,
            d.reason
        ));
    }
    Ok(Output { document, human })
}

fn gromov(expr: &str, mu_text: &str, catalog: &Catalog) -> Result<Output, CliError> {
    let model = build_model(expr, catalog)?;
    let mu = parse_class(mu_text, model.form().rank())?;
    let dimension = rules::gromov_dimension(&model, &mu).map_err(CliError::domain)?;
    let document = json!({
        "command": "gromov",
        "expr": expr,
        "name": model.name(),
        "mu": class_json(&mu),
        "dimension": dimension,
    });
    let human = format!("Gromov moduli dimension mu(mu - K) = {dimension}\n");
    Ok(Output { document, human })
}

fn kernel_selftest(seed: u64, trials: u32) -> Result<Output, CliError> {
    if trials < 1 {
        return Err(CliError::Domain("--trials must be at least 1".into()));
    }
    let report = selftest::kernel_selftest(seed, trials);
    let identities: Vec<Value> = report
        .identities
        .iter()
        .map(|i| {
            json!({
                "name": i.name,
                "max_residual": i.max_residual,
                "tolerance": i.tolerance,
                "passed": i.passed(),
            })
        })
        .collect();
    let document = json!({
        "command": "kernel_selftest",
        "seed": report.seed,
        "trials": report.trials,
        "passed": report.passed(),
        "identities": identities,
    });
    let mut human = format!("kernel selftest: seed {seed}, {trials} trials\n");
    for i in &report.identities {
        human.push_str(&format!(
            "{:<36} max residual {:>12.3e}  tolerance {:>8.0e}  {}\n",
            i.name,
            i.max_residual,
            i.tolerance,
            if i.passed() { "PASS" } else { "FAIL" }
        ));
    }
    if !report.passed() {
        let failures = report
            .failures()
            .iter()
            .map(|f| f.name.clone())
            .collect::<Vec<_>>()
            .join(", ");
        eprint!("{human}");
        return Err(CliError::Internal(format!("tolerance exceeded: {failures}")));
    }
    Ok(Output { document, human })
}
