//! Command-line dispatch: JSON inputs in, machine- or human-readable
//! reports out.
//!
//! Exit codes: 0 for an affirmative result, 1 for a well-formed
//! negative verdict (not liftable, no ladder, inconsistent groups),
//! 2 for input errors. `--json` emits exactly one JSON document on
//! standard output.

use crate::algebra::{
    default_coefficient_set, k_theory, total_k, DirectSumAlgebra, DEFAULT_COEFFICIENT_BOUND,
};
use crate::intertwine::{ladder_search, system_report, SearchBounds, SearchOutcome};
use crate::kk::{canonicalize, compose, kk_group, uct_crosscheck};
use crate::lift::{is_unit_preserving, try_certificate, unital_lift_exists};
use crate::spectral::{decompose, omega_bounds, spv};
use crate::wire;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_traits::Signed;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "kkcalc",
    about = "Exact K-theory and KK-class calculus for dimension drop interval algebras",
    version
)]
struct Cli {
    /// Emit a single JSON document on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K-theory of an algebra: K0, K1 order, unit coefficient, scale.
    Kt { algebra: PathBuf },
    /// Total K-theory group orders over a coefficient set.
    Totalk {
        algebra: PathBuf,
        /// Comma-separated coefficients (default: divisors of the
        /// bound, KKCALC_COEFF_BOUND or 24).
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<u64>>,
    },
    /// The KK-group presentation of a pair of algebras, with the
    /// graded-hom crosscheck.
    Kk { a: PathBuf, b: PathBuf },
    /// Canonical form of a diagram class.
    Canon {
        a: PathBuf,
        b: PathBuf,
        diagram: PathBuf,
    },
    /// Kasparov product of two diagram classes.
    Compose {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        d1: PathBuf,
        d2: PathBuf,
    },
    /// Liftability of a diagram class, with certificate.
    Lift {
        a: PathBuf,
        b: PathBuf,
        diagram: PathBuf,
        /// Require the subunital lift (unit image below the target
        /// unit).
        #[arg(long)]
        unital: bool,
    },
    /// Spectral variation of homomorphism data.
    Spv {
        a: PathBuf,
        b: PathBuf,
        homdata: PathBuf,
        /// Extra uniform sample count (the exact value already includes
        /// every breakpoint and crossing).
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Weak-variation bounds of a profile family under the data.
    Omega {
        a: PathBuf,
        b: PathBuf,
        homdata: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
    },
    /// Corner/finite decomposition of homomorphism data.
    Decomp {
        a: PathBuf,
        b: PathBuf,
        homdata: PathBuf,
        /// Snap tolerance as a rational `p/q`.
        #[arg(long)]
        tol: String,
        /// Required domination multiple in ordered K0.
        #[arg(long = "L")]
        l: u64,
    },
    /// Inductive-system operations.
    System {
        #[command(subcommand)]
        command: SystemCommand,
    },
    /// Alternating ladder search between two systems.
    Intertwine(IntertwineArgs),
}

#[derive(Subcommand, Debug)]
enum SystemCommand {
    /// Validate a system and report the staged spectral diagnostics.
    Check { system: PathBuf },
}

#[derive(Args, Debug)]
struct IntertwineArgs {
    sys_a: PathBuf,
    sys_b: PathBuf,
    seed: PathBuf,
    #[arg(long, default_value_t = 8)]
    max_stage: usize,
    #[arg(long, default_value_t = 10)]
    coeff_bound: i64,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

struct Outcome {
    code: i32,
    json: Value,
    human: String,
}

fn input_error(message: impl ToString) -> Outcome {
    let message = message.to_string();
    Outcome {
        code: EXIT_INPUT,
        json: json!({"error": message}),
        human: format!("error: {message}"),
    }
}

fn load_json(path: &Path) -> Result<Value, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| input_error(format!("cannot parse {}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<DirectSumAlgebra, Outcome> {
    let v = load_json(path)?;
    wire::parse_algebra(&v).map_err(input_error)
}

fn factors_json(factors: &[num_bigint::BigInt]) -> (usize, Vec<Value>) {
    let free = factors.iter().filter(|f| f.is_zero()).count();
    let torsion = factors
        .iter()
        .filter(|f| !f.is_zero())
        .map(wire::emit_bigint)
        .collect();
    (free, torsion)
}

use num_traits::Zero;

fn cmd_kt(algebra: &Path) -> Result<Outcome, Outcome> {
    let a = load_algebra(algebra)?;
    let kt = k_theory(&a);
    let summands: Vec<Value> = kt
        .blocks
        .iter()
        .map(|b| {
            json!({
                "K0": "Z",
                "K1_order": b.k1_order,
                "unit": b.unit_coefficient,
                "K0_generator_endpoint_ranks": [
                    b.k0_generator_endpoint_ranks.0,
                    b.k0_generator_endpoint_ranks.1
                ],
                "scale": [0, b.unit_coefficient],
                "positive_cone": b.positive_cone.description(),
            })
        })
        .collect();
    let mut human = String::new();
    for (i, b) in kt.blocks.iter().enumerate() {
        human.push_str(&format!(
            "summand {}: K0 = Z (generator endpoint ranks ({}, {})), [1] = {} * generator, \
             K1 = Z_{}, scale [0, {}]\n",
            i,
            b.k0_generator_endpoint_ranks.0,
            b.k0_generator_endpoint_ranks.1,
            b.unit_coefficient,
            b.k1_order,
            b.unit_coefficient
        ));
    }
    Ok(Outcome {
        code: EXIT_OK,
        json: json!({"summands": summands}),
        human,
    })
}

fn coefficient_bound_from_env() -> u64 {
    std::env::var("KKCALC_COEFF_BOUND")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_COEFFICIENT_BOUND)
}

fn cmd_totalk(algebra: &Path, coeffs: Option<Vec<u64>>) -> Result<Outcome, Outcome> {
    let a = load_algebra(algebra)?;
    let set = coeffs.unwrap_or_else(|| default_coefficient_set(coefficient_bound_from_env()));
    let tk = total_k(&a, &set);
    let summands: Vec<Value> = tk
        .blocks
        .iter()
        .map(|b| {
            json!({
                "K1_order": b.block.k1_order(),
                "coefficients": b
                    .coefficients
                    .iter()
                    .map(|c| {
                        let (f0, t0) = factors_json(&c.k0n.invariant_factors());
                        let (f1, t1) = factors_json(&c.k1n.invariant_factors());
                        json!({
                            "n": c.n,
                            "K0_free_rank": f0,
                            "K0_invariant_factors": t0,
                            "K1_free_rank": f1,
                            "K1_invariant_factors": t1,
                        })
                    })
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut human = String::new();
    for (i, b) in tk.blocks.iter().enumerate() {
        human.push_str(&format!("summand {i}:\n"));
        for c in &b.coefficients {
            human.push_str(&format!(
                "  n = {}: K0(.;Z_n) factors {:?}, K1(.;Z_n) factors {:?}\n",
                c.n,
                c.k0n
                    .invariant_factors()
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>(),
                c.k1n
                    .invariant_factors()
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>(),
            ));
        }
    }
    Ok(Outcome {
        code: EXIT_OK,
        json: json!({"coefficients": set, "summands": summands}),
        human,
    })
}

fn cmd_kk(a: &Path, b: &Path) -> Result<Outcome, Outcome> {
    let alg_a = load_algebra(a)?;
    let alg_b = load_algebra(b)?;
    let group = kk_group(&alg_a, &alg_b);
    let report = uct_crosscheck(&alg_a, &alg_b);
    let (free, torsion) = factors_json(&group.invariant_factors());
    let presentations: Vec<Vec<Value>> = group
        .pairs
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    json!({
                        "lattice_basis": wire::emit_matrix(&p.lattice_basis),
                        "relations": wire::emit_matrix(p.group.relations()),
                    })
                })
                .collect()
        })
        .collect();
    let json_doc = json!({
        "free_rank": free,
        "invariant_factors": torsion,
        "presentation": presentations,
        "uct": {
            "free_rank": report.free_rank,
            "torsion_order": wire::emit_bigint(&report.torsion_order),
            "hom_lambda_free_rank": report.hom_lambda.free_rank(),
            "hom_lambda_torsion_order": wire::emit_bigint(&report.hom_lambda.torsion_order()),
            "consistent": report.gamma_consistent,
        }
    });
    let human = format!(
        "KK group: free rank {free}, torsion invariant factors {:?}\n\
         crosscheck: predicted torsion order {}, graded-hom torsion order {}, consistent: {}\n",
        group
            .invariant_factors()
            .iter()
            .filter(|f| !f.is_zero())
            .map(|f| f.to_string())
            .collect::<Vec<_>>(),
        report.torsion_order,
        report.hom_lambda.torsion_order(),
        report.gamma_consistent
    );
    Ok(Outcome {
        code: if report.gamma_consistent {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
        json: json_doc,
        human,
    })
}

fn cmd_canon(a: &Path, b: &Path, diagram: &Path) -> Result<Outcome, Outcome> {
    let alg_a = load_algebra(a)?;
    let alg_b = load_algebra(b)?;
    let v = load_json(diagram)?;
    let d = wire::parse_diagram(&v, &alg_a, &alg_b).map_err(input_error)?;
    let class = canonicalize(&d);
    Ok(Outcome {
        code: EXIT_OK,
        json: wire::emit_class(&class),
        human: format!(
            "canonical coordinates: {}\n",
            serde_json::to_string(&wire::emit_class(&class)["canonical"]).unwrap()
        ),
    })
}

fn cmd_compose(
    a: &Path,
    b: &Path,
    c: &Path,
    d1: &Path,
    d2: &Path,
) -> Result<Outcome, Outcome> {
    let alg_a = load_algebra(a)?;
    let alg_b = load_algebra(b)?;
    let alg_c = load_algebra(c)?;
    let x = wire::parse_diagram(&load_json(d1)?, &alg_a, &alg_b).map_err(input_error)?;
    let y = wire::parse_diagram(&load_json(d2)?, &alg_b, &alg_c).map_err(input_error)?;
    let product = compose(&canonicalize(&x), &canonicalize(&y)).map_err(input_error)?;
    Ok(Outcome {
        code: EXIT_OK,
        json: wire::emit_class(&product),
        human: format!(
            "product class: {}\n",
            serde_json::to_string(&wire::emit_class(&product)["canonical"]).unwrap()
        ),
    })
}

fn cmd_lift(a: &Path, b: &Path, diagram: &Path, unital: bool) -> Result<Outcome, Outcome> {
    let alg_a = load_algebra(a)?;
    let alg_b = load_algebra(b)?;
    let v = load_json(diagram)?;
    let d = wire::parse_diagram(&v, &alg_a, &alg_b).map_err(input_error)?;
    let class = canonicalize(&d);
    let (result, reason) = if unital {
        match unital_lift_exists(&class) {
            Some(cert) => (Some(cert), String::new()),
            None => match try_certificate(&class) {
                Ok(_) => (None, "unit image exceeds the target unit".to_string()),
                Err(o) => (None, o.reason),
            },
        }
    } else {
        match try_certificate(&class) {
            Ok(cert) => (Some(cert), String::new()),
            Err(o) => (None, o.reason),
        }
    };
    match result {
        Some(cert) => {
            let unital_flag = cert.unital;
            Ok(Outcome {
                code: EXIT_OK,
                json: json!({
                    "liftable": true,
                    "unital": unital_flag,
                    "certificate": wire::emit_certificate(&cert),
                }),
                human: format!(
                    "liftable: yes (unital: {unital_flag})\nshifted representative: {}\n",
                    serde_json::to_string(&wire::emit_diagram(&cert.shifted_representative))
                        .unwrap()
                ),
            })
        }
        None => Ok(Outcome {
            code: EXIT_NEGATIVE,
            json: json!({
                "liftable": false,
                "unital": is_unit_preserving(class.representative()),
                "reason": reason,
            }),
            human: format!("liftable: no ({reason})\n"),
        }),
    }
}

fn load_hom_data(
    a: &Path,
    b: &Path,
    homdata: &Path,
) -> Result<crate::spectral::HomomorphismData, Outcome> {
    let alg_a = load_algebra(a)?;
    let alg_b = load_algebra(b)?;
    let v = load_json(homdata)?;
    wire::parse_hom_data(&v, &alg_a, &alg_b).map_err(input_error)
}

fn cmd_spv(a: &Path, b: &Path, homdata: &Path, grid: usize) -> Result<Outcome, Outcome> {
    let h = load_hom_data(a, b, homdata)?;
    let value = spv(&h, grid);
    Ok(Outcome {
        code: EXIT_OK,
        json: json!({"spv": wire::emit_rational(&value)}),
        human: format!("spv = {value}\n"),
    })
}

fn cmd_omega(a: &Path, b: &Path, homdata: &Path, profiles: &Path) -> Result<Outcome, Outcome> {
    let h = load_hom_data(a, b, homdata)?;
    let p = wire::parse_profiles(&load_json(profiles)?).map_err(input_error)?;
    let (lower, upper) = omega_bounds(&p, &h);
    Ok(Outcome {
        code: EXIT_OK,
        json: json!({
            "lower": wire::emit_rational(&lower),
            "upper": wire::emit_rational(&upper),
        }),
        human: format!("omega bounds: lower = {lower}, upper = {upper}\n"),
    })
}

fn cmd_decomp(
    a: &Path,
    b: &Path,
    homdata: &Path,
    tol: &str,
    l: u64,
) -> Result<Outcome, Outcome> {
    let h = load_hom_data(a, b, homdata)?;
    let tol = wire::parse_rational(&json!(tol), "tol").map_err(input_error)?;
    if tol.is_negative() {
        return Err(input_error("tolerance must be nonnegative"));
    }
    match decompose(&h, &tol, l) {
        Some(d) => Ok(Outcome {
            code: EXIT_OK,
            json: json!({
                "success": true,
                "corner": wire::emit_hom_data(&d.corner),
                "finite_part": wire::emit_hom_data(&d.finite_part),
                "snap_displacement": wire::emit_rational(&d.snap_displacement),
            }),
            human: format!(
                "decomposition found: corner fiber ranks {:?}, finite fiber ranks {:?}, \
                 snap displacement {}\n",
                d.corner
                    .fiber_ranks()
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>(),
                d.finite_part
                    .fiber_ranks()
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>(),
                d.snap_displacement
            ),
        }),
        None => Ok(Outcome {
            code: EXIT_NEGATIVE,
            json: json!({"success": false, "reason": "finite part does not dominate the corner"}),
            human: "no decomposition: finite part does not dominate the corner\n".to_string(),
        }),
    }
}

fn cmd_system_check(system: &Path) -> Result<Outcome, Outcome> {
    let v = load_json(system)?;
    let sys = wire::parse_system(&v).map_err(input_error)?;
    let horizon = sys.len() - 1;
    let report = if horizon > 0 {
        Some(system_report(&sys, 0, horizon).map_err(input_error)?)
    } else {
        None
    };
    let rows: Vec<Value> = report
        .as_ref()
        .map(|r| {
            r.rows
                .iter()
                .map(|row| {
                    json!({
                        "stage": row.stage,
                        "spv": wire::emit_rational(&row.spv),
                        "omega_upper": wire::emit_rational(&row.omega_upper),
                        "finite_spectrum_proximity":
                            wire::emit_rational(&row.finite_spectrum_proximity),
                    })
                })
                .collect()
        })
        .unwrap_or_default();
    let mut human = format!("system valid: {} stages\n", sys.len());
    for row in &rows {
        human.push_str(&format!(
            "  to stage {}: spv = {}, proximity = {}\n",
            row["stage"], row["spv"], row["finite_spectrum_proximity"]
        ));
    }
    if let Some(r) = &report {
        human.push_str(&format!(
            "spv monotone decreasing: {}\n",
            r.spv_monotone_decreasing
        ));
    }
    Ok(Outcome {
        code: EXIT_OK,
        json: json!({
            "valid": true,
            "stages": sys.len(),
            "report": rows,
            "spv_monotone_decreasing": report.as_ref().map(|r| r.spv_monotone_decreasing),
        }),
        human,
    })
}

fn cmd_intertwine(args: &IntertwineArgs) -> Result<Outcome, Outcome> {
    let sys_a = wire::parse_system(&load_json(&args.sys_a)?).map_err(input_error)?;
    let sys_b = wire::parse_system(&load_json(&args.sys_b)?).map_err(input_error)?;
    let seed =
        wire::parse_seed(&load_json(&args.seed)?, &sys_a, &sys_b).map_err(input_error)?;
    let bounds = SearchBounds::new(args.max_stage, args.coeff_bound);
    match ladder_search(&sys_a, &sys_b, &seed, &bounds) {
        Ok(SearchOutcome::Found(ladder)) => {
            let json_doc = json!({
                "found": true,
                "source_stages": ladder.source_stages,
                "target_stages": ladder.target_stages,
                "down": ladder
                    .down
                    .iter()
                    .map(|c| wire::emit_diagram(c.representative()))
                    .collect::<Vec<_>>(),
                "up": ladder
                    .up
                    .iter()
                    .map(|c| wire::emit_diagram(c.representative()))
                    .collect::<Vec<_>>(),
                "down_certificates": ladder
                    .down_certificates
                    .iter()
                    .map(wire::emit_certificate)
                    .collect::<Vec<_>>(),
                "up_certificates": ladder
                    .up_certificates
                    .iter()
                    .map(wire::emit_certificate)
                    .collect::<Vec<_>>(),
            });
            Ok(Outcome {
                code: EXIT_OK,
                json: json_doc,
                human: format!(
                    "ladder found: source stages {:?}, target stages {:?}\n",
                    ladder.source_stages, ladder.target_stages
                ),
            })
        }
        Ok(SearchOutcome::NoLadder { rung, reason }) => Ok(Outcome {
            code: EXIT_NEGATIVE,
            json: json!({"found": false, "rung": rung, "reason": reason}),
            human: format!("no ladder: rung {rung} failed ({reason})\n"),
        }),
        Err(e) => Err(input_error(e)),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Outcome> {
    match &cli.command {
        Command::Kt { algebra } => cmd_kt(algebra),
        Command::Totalk { algebra, coeffs } => cmd_totalk(algebra, coeffs.clone()),
        Command::Kk { a, b } => cmd_kk(a, b),
        Command::Canon { a, b, diagram } => cmd_canon(a, b, diagram),
        Command::Compose { a, b, c, d1, d2 } => cmd_compose(a, b, c, d1, d2),
        Command::Lift {
            a,
            b,
            diagram,
            unital,
        } => cmd_lift(a, b, diagram, *unital),
        Command::Spv {
            a,
            b,
            homdata,
            grid,
        } => cmd_spv(a, b, homdata, *grid),
        Command::Omega {
            a,
            b,
            homdata,
            profiles,
        } => cmd_omega(a, b, homdata, profiles),
        Command::Decomp {
            a,
            b,
            homdata,
            tol,
            l,
        } => cmd_decomp(a, b, homdata, tol, *l),
        Command::System { command } => match command {
            SystemCommand::Check { system } => cmd_system_check(system),
        },
        Command::Intertwine(args) => cmd_intertwine(args),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(o) => o,
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&outcome.json).unwrap());
    } else {
        print!("{}", outcome.human);
        if outcome.human.is_empty() {
            println!("{}", serde_json::to_string_pretty(&outcome.json).unwrap());
        }
    }
    outcome.code
}
