//! Subcommand dispatch. [`run`] never exits the process, so it can be
//! driven from tests with in-memory output streams.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use liedim::dimsub::{
    counterexample_auxiliary, counterexample_element, counterexample_presentation,
    delta4_centrality_check, delta4_solution_set, delta_lattice, deltan_divisibility_check,
    dimension_quotient, fox_intersection, gamma_preimage, lie_series_term, sandwich_check,
    sjogren_equality_check, DimError, DimQuery,
};
use liedim::fplie::{bracket_lattices, preabelianize};
use liedim::random::random_element;
use liedim::{AbelianInvariants, AssocContext, FpLieError, Lattice, LieVec, Presentation};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::parse::{parse_file, ParseError};
use crate::report::{
    formatted, hall_labels, sha256_hex, strings, to_value, InvariantsJson, LatticeJson, Report,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "liedim",
    version,
    about = "Dimension subrings of finitely presented Lie rings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Class cap c; the computation takes place in L / gamma_(c+1)(L).
    /// Overrides `class:` in the file.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: Option<u64>,
    /// Truncation degree of the enveloping algebra for `dimquot`.
    #[arg(long = "cap-assoc", global = true)]
    pub cap_assoc: Option<usize>,
    /// Write the JSON report to this path, or to standard output for `-`.
    #[arg(long, global = true, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "LIEDIM_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Additive invariants of L / gamma_(c+1)(L) and of each graded piece.
    Nilquot { file: PathBuf },
    /// delta_n(L) / gamma_n(L) with coset witnesses.
    Dimquot {
        file: PathBuf,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Divisors e_i and the relators e_i x_i + xi_i after a change of generators.
    Preabelian { file: PathBuf },
    /// Built-in four-generator ring with delta_4 != gamma_4.
    VerifyCounterexample,
    /// F ∩ varpi^n r for the relators as elements of the free Lie ring.
    Fox {
        file: PathBuf,
        #[arg(short = 'n')]
        n: usize,
    },
    /// F ∩ (varpi^(n+1) + r(n-1)) = gamma_(n+1)(F) + R(n-1); exit 1 if not.
    Sjogren {
        file: PathBuf,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Structural invariants of the presentation plus seeded random identities.
    Check { file: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Dim(#[from] DimError),
    #[error("{0}")]
    FpLie(#[from] FpLieError),
    #[error("{0}")]
    Usage(String),
}

/// Parses `args` (program name first), runs the command, writes the
/// summary or JSON to `out` and diagnostics to `err`, and returns the exit
/// code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut report = Report::new(args.into_iter().skip(1).collect());
    let start = Instant::now();
    match execute(&cli, &mut report, err) {
        Ok(summary) => {
            report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
            if let Err(e) = emit(&cli.opts, &report, &summary, out) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(err, "check failed: {}: {}", c.name, c.detail);
            }
            exit_code(&report)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn exit_code(report: &Report) -> i32 {
    if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn emit(
    opts: &GlobalOpts,
    report: &Report,
    summary: &str,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
    match &opts.json {
        Some(path) if path.as_os_str() == "-" => {
            let text = serde_json::to_string_pretty(report).expect("report serializes");
            writeln!(out, "{text}").map_err(io(Path::new("<stdout>")))
        }
        Some(path) => {
            let text = serde_json::to_string_pretty(report).expect("report serializes");
            std::fs::write(path, text + "\n").map_err(io(path))?;
            write!(out, "{summary}").map_err(io(Path::new("<stdout>")))
        }
        None => write!(out, "{summary}").map_err(io(Path::new("<stdout>"))),
    }
}

/// Reads and builds a presentation. The class cap is `--cap`, else the
/// file's `class:`, else `default_class`; the free Lie ring is truncated
/// at no less than `min_lie_cap`.
fn load(
    path: &Path,
    opts: &GlobalOpts,
    default_class: usize,
    min_lie_cap: usize,
    report: &mut Report,
    err: &mut dyn Write,
) -> Result<Presentation, CliError> {
    let name = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: name.clone(),
        source,
    })?;
    report.input_sha256 = Some(sha256_hex(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Usage(format!("{name}: input is not valid UTF-8")))?;
    let mut file = parse_file(&text).map_err(|source| CliError::Parse {
        path: name.clone(),
        source,
    })?;
    if let Some(c) = opts.cap {
        file.class =
            Some(usize::try_from(c).map_err(|_| CliError::Usage("--cap is too large".into()))?);
    }
    let (pres, warnings) = file
        .build(Some(default_class), min_lie_cap)
        .map_err(|source| CliError::Parse {
            path: name.clone(),
            source,
        })?;
    for w in warnings {
        let _ = writeln!(err, "{name}:{w}");
    }
    report.presentation = Some((&pres).into());
    Ok(pres)
}

fn execute(cli: &Cli, report: &mut Report, err: &mut dyn Write) -> Result<String, CliError> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Nilquot { file } => {
            let pres = load(file, opts, crate::parse::DEFAULT_CLASS, 1, report, err)?;
            nilquot(&pres, report)
        }
        Command::Dimquot { file, n } => {
            if *n == 0 {
                return Err(CliError::Usage("-n must be at least 1".into()));
            }
            let pres = load(file, opts, *n, 1, report, err)?;
            dimquot(&pres, *n, opts.cap_assoc, report)
        }
        Command::Preabelian { file } => {
            let pres = load(file, opts, crate::parse::DEFAULT_CLASS, 1, report, err)?;
            preabelian(&pres, report)
        }
        Command::VerifyCounterexample => verify_counterexample(report),
        Command::Fox { file, n } => {
            let pres = load(file, opts, crate::parse::DEFAULT_CLASS, n + 1, report, err)?;
            fox(&pres, *n, report)
        }
        Command::Sjogren { file, n } => {
            if *n == 0 {
                return Err(CliError::Usage("-n must be at least 1".into()));
            }
            let pres = load(file, opts, n + 1, n + 1, report, err)?;
            sjogren(&pres, *n, report)
        }
        Command::Check { file } => {
            let pres = load(file, opts, crate::parse::DEFAULT_CLASS, 1, report, err)?;
            let seed = opts.seed.unwrap_or(DEFAULT_SEED);
            report.seed = Some(seed);
            check(&pres, seed, report)
        }
    }
}

fn nilquot(pres: &Presentation, report: &mut Report) -> Result<String, CliError> {
    let nq = pres.nilpotent_quotient()?;
    let graded = nq.graded_invariants()?;
    let ctx = pres.ctx();
    report.results = json!({
        "invariants": to_value(&InvariantsJson::from(nq.invariants())),
        "graded_invariants": graded.iter().map(|g| to_value(&InvariantsJson::from(g))).collect::<Vec<_>>(),
        "generators": formatted(ctx, &nq.generators()),
        "orders": strings(nq.orders()),
        "hall_basis": hall_labels(ctx),
        "relator_ideal": to_value(&LatticeJson::from(nq.rel_lattice())),
    });
    let mut s = format!(
        "L/gamma_{}(L) = {}\n",
        pres.class_cap() + 1,
        nq.invariants()
    );
    for (d, g) in graded.iter().enumerate() {
        s.push_str(&format!("  degree {}: {}\n", d + 1, g));
    }
    Ok(s)
}

fn dimquot(
    pres: &Presentation,
    n: usize,
    cap_a: Option<usize>,
    report: &mut Report,
) -> Result<String, CliError> {
    let q = match cap_a {
        Some(a) => DimQuery::with_cap_a(pres.clone(), n, a)?,
        None => DimQuery::new(pres.clone(), n)?,
    };
    let r = dimension_quotient(&q)?;
    let ctx = pres.ctx();
    report.results = json!({
        "n": n,
        "cap_assoc": r.cap_a,
        "quotient": to_value(&InvariantsJson::from(&r.quotient)),
        "witnesses": formatted(ctx, &r.witnesses),
        "witness_orders": strings(&r.witness_orders),
        "hall_basis": hall_labels(ctx),
        "delta": to_value(&LatticeJson::from(&r.delta_lattice)),
        "gamma": to_value(&LatticeJson::from(&r.gamma_lattice)),
    });
    let mut s = format!("delta_{n}/gamma_{n} = {}\n", r.quotient);
    for (w, o) in r.witnesses.iter().zip(&r.witness_orders) {
        let order = if o == &BigInt::from(0) {
            "infinite".to_string()
        } else {
            o.to_string()
        };
        s.push_str(&format!("  order {order}: {}\n", ctx.format(w)));
    }
    Ok(s)
}

fn preabelian(pres: &Presentation, report: &mut Report) -> Result<String, CliError> {
    let pd = preabelianize(pres)?;
    let before = pres.nilpotent_quotient()?;
    let after = pd.presentation.nilpotent_quotient()?;
    let same = before.invariants() == after.invariants();
    report.check(
        "invariants preserved",
        same,
        format!("{} vs {}", before.invariants(), after.invariants()),
    );
    let new = &pd.presentation;
    let matrix = |k: &liedim::IntMat| -> Vec<Vec<String>> {
        (0..k.rows())
            .map(|i| (0..k.cols()).map(|j| k.get(i, j).to_string()).collect())
            .collect()
    };
    report.results = json!({
        "divisors": strings(&pd.divisors),
        "relators": formatted(new.ctx(), new.relators()),
        "xi": formatted(new.ctx(), &pd.xi),
        "trailing": formatted(new.ctx(), &pd.trailing),
        "generator_change": matrix(&pd.generator_change),
        "generator_change_inverse": matrix(&pd.generator_change_inv),
        "source": new.to_source(),
    });
    let mut s = format!("divisors: {}\n", strings(&pd.divisors).join(" "));
    s.push_str(&new.to_source());
    Ok(s)
}

fn verify_counterexample(report: &mut Report) -> Result<String, CliError> {
    let aux = counterexample_auxiliary();
    let nq = aux.nilpotent_quotient()?;
    let torsion: Vec<BigInt> = [2, 4, 8, 16, 16, 256, 256, 256]
        .iter()
        .map(|&d| BigInt::from(d))
        .collect();
    let expected = AbelianInvariants::from_divisors(torsion.iter(), 1);
    let a_aux = counterexample_element(aux.ctx());
    report.check(
        "auxiliary invariants",
        *nq.invariants() == expected,
        format!("{} (expected {})", nq.invariants(), expected),
    );
    report.check(
        "a nonzero in auxiliary quotient",
        !nq.is_zero(&a_aux),
        nq.invariants().to_string(),
    );

    let pres = counterexample_presentation(4);
    let ctx = pres.ctx();
    let a = counterexample_element(ctx);
    let r = dimension_quotient(&DimQuery::new(pres.clone(), 4)?)?;
    let av = a.to_sparse();
    report.check(
        "a in delta_4",
        r.delta_lattice.contains(&av),
        ctx.format(&a),
    );
    report.check(
        "a not in gamma_4",
        !r.gamma_lattice.contains(&av),
        ctx.format(&a),
    );
    report.check(
        "2a in gamma_4",
        r.gamma_lattice.contains(&av.scale(&BigInt::from(2))),
        ctx.format(&a),
    );
    report.presentation = Some((&pres).into());
    report.results = json!({
        "auxiliary_invariants": to_value(&InvariantsJson::from(nq.invariants())),
        "auxiliary_coordinates_of_a": strings(&nq.coordinates(&a_aux)),
        "element": ctx.format(&a),
        "quotient": to_value(&InvariantsJson::from(&r.quotient)),
        "witnesses": formatted(ctx, &r.witnesses),
        "hall_basis": hall_labels(ctx),
        "delta": to_value(&LatticeJson::from(&r.delta_lattice)),
        "gamma": to_value(&LatticeJson::from(&r.gamma_lattice)),
    });
    let mut s = format!("auxiliary class-3 quotient: {}\n", nq.invariants());
    s.push_str(&format!("a = {}\n", ctx.format(&a)));
    s.push_str(&format!("delta_4/gamma_4 = {}\n", r.quotient));
    s.push_str(&check_lines(report));
    Ok(s)
}

fn fox(pres: &Presentation, n: usize, report: &mut Report) -> Result<String, CliError> {
    let ctx = pres.ctx();
    let fox = fox_intersection(ctx, pres.relators(), n)?;
    let r = lie_series_term(ctx, pres.relators(), 0);
    let quotient = liedim::intlat::quotient_invariants(&r, &fox).ok();
    let mut results = json!({
        "n": n,
        "hall_basis": hall_labels(ctx),
        "fox": to_value(&LatticeJson::from(&fox)),
        "relator_ideal": to_value(&LatticeJson::from(&r)),
    });
    let mut s = format!("F ∩ varpi^{n} r: rank {}\n", fox.rank());
    if let Some(q) = &quotient {
        results["relator_ideal_mod_fox"] = to_value(&InvariantsJson::from(q));
        s.push_str(&format!("R / (F ∩ varpi^{n} r) = {q}\n"));
    }
    if n == 1 {
        let sw = sandwich_check(ctx, pres.relators())?;
        let names = ["[R,R] <= fox", "fox <= sqrt[R,R]", "sqrt[R,R] <= R"];
        for (name, ok) in names.iter().zip(sw.inclusions) {
            report.check(*name, ok, String::new());
        }
        results["commutator"] = to_value(&LatticeJson::from(&sw.rr));
        results["root"] = to_value(&LatticeJson::from(&sw.root));
        s.push_str(&check_lines(report));
    }
    report.results = results;
    Ok(s)
}

fn sjogren(pres: &Presentation, n: usize, report: &mut Report) -> Result<String, CliError> {
    let ctx = pres.ctx();
    let rep = sjogren_equality_check(ctx, pres.relators(), n)?;
    report.check(
        "sides equal",
        rep.equal,
        format!("lhs rank {}, rhs rank {}", rep.lhs.rank(), rep.rhs.rank()),
    );
    report.results = json!({
        "n": n,
        "hall_basis": hall_labels(ctx),
        "lhs": to_value(&LatticeJson::from(&rep.lhs)),
        "rhs": to_value(&LatticeJson::from(&rep.rhs)),
        "equal": rep.equal,
    });
    Ok(format!(
        "F ∩ (varpi^{} + r({})) {} gamma_{}(F) + R({})\n",
        n + 1,
        n - 1,
        if rep.equal { "=" } else { "!=" },
        n + 1,
        n - 1
    ))
}

/// Number of random pairs and triples per identity in `check`.
const RANDOM_SAMPLES: usize = 64;

fn check(pres: &Presentation, seed: u64, report: &mut Report) -> Result<String, CliError> {
    let ctx = pres.ctx();
    let c = pres.class_cap();

    report.check(
        "relator lattice is an ideal",
        pres.is_ideal_closed(),
        String::new(),
    );

    let gamma: Vec<Lattice> = (1..=c + 1)
        .map(|n| pres.gamma_lattice(n))
        .collect::<Result<_, _>>()?;
    let chain = gamma.windows(2).position(|w| !w[1].is_subset_of(&w[0]));
    report.check(
        "gamma chain decreasing",
        chain.is_none(),
        chain
            .map(|k| format!("at n = {}", k + 1))
            .unwrap_or_default(),
    );

    let mut graded = None;
    'outer: for i in 1..=c {
        for j in i..=(c + 1 - i) {
            if !bracket_lattices(ctx, &gamma[i - 1], &gamma[j - 1]).is_subset_of(&gamma[i + j - 1])
            {
                graded = Some(format!("[gamma_{i}, gamma_{j}] not in gamma_{}", i + j));
                break 'outer;
            }
        }
    }
    report.check(
        "[gamma_i, gamma_j] <= gamma_(i+j)",
        graded.is_none(),
        graded.unwrap_or_default(),
    );

    let pd = preabelianize(pres)?;
    let before = pres.nilpotent_quotient()?;
    let after = pd.presentation.nilpotent_quotient()?;
    report.check(
        "preabelianize preserves invariants",
        before.invariants() == after.invariants(),
        format!("{} vs {}", before.invariants(), after.invariants()),
    );

    let top = (c + 1).min(5);
    let delta: Vec<Lattice> = (1..=top)
        .map(|n| delta_lattice(&DimQuery::new(pres.clone(), n)?))
        .collect::<Result<_, DimError>>()?;
    for n in 1..=top {
        let g = gamma_preimage(pres, n)?;
        report.check(
            format!("gamma_{n} <= delta_{n}"),
            g.is_subset_of(&delta[n - 1]),
            String::new(),
        );
        if n <= 3 {
            report.check(
                format!("delta_{n} = gamma_{n}"),
                g == delta[n - 1],
                String::new(),
            );
        }
    }
    for n in 1..top {
        let ok = bracket_lattices(ctx, &delta[n - 1], &delta[n - 1])
            .is_subset_of(&gamma_preimage(pres, n + 1)?);
        report.check(
            format!("[delta_{n}, delta_{n}] <= gamma_{}", n + 1),
            ok,
            String::new(),
        );
    }

    let sol = delta4_solution_set(&pd)?;
    let image = sol.image(&pd.presentation)?;
    let d4 = delta_lattice(&DimQuery::new(pd.presentation.clone(), 4)?)?;
    report.check(
        "delta_4 = solution image + gamma_4 + R",
        image == d4,
        String::new(),
    );
    let g4 = gamma_preimage(&pd.presentation, 4)?;
    let doubling = d4
        .basis()
        .iter()
        .all(|v| g4.contains(&v.scale(&BigInt::from(2))));
    report.check("2 delta_4 <= gamma_4", doubling, String::new());
    report.check(
        "[delta_4, L] <= gamma_5 + L''",
        delta4_centrality_check(&pd.presentation)?,
        String::new(),
    );

    for n in 2..=top.min(4) {
        let dc = deltan_divisibility_check(&pd, n)?;
        let detail = dc
            .counterexample
            .map(|v| pd.presentation.ctx().format(&v))
            .unwrap_or_default();
        report.check(format!("delta_{n} divisibility form"), dc.passed, detail);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assoc = AssocContext::new(ctx.num_generators(), ctx.cap());
    let br = |u: &LieVec, v: &LieVec| ctx.bracket(u, v).expect("same context");
    let mut jacobi = true;
    let mut iota = true;
    for _ in 0..RANDOM_SAMPLES {
        let x = random_element(&mut rng, ctx, 3, 5);
        let y = random_element(&mut rng, ctx, 3, 5);
        let z = random_element(&mut rng, ctx, 3, 5);
        jacobi &= br(&br(&x, &y), &z)
            .add(&br(&br(&y, &z), &x))
            .add(&br(&br(&z, &x), &y))
            .is_zero();
        let ix = assoc
            .iota(&x, ctx)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let iy = assoc
            .iota(&y, ctx)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let lhs = assoc
            .iota(&br(&x, &y), ctx)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        iota &= lhs == assoc.mul(&ix, &iy).sub(&assoc.mul(&iy, &ix));
    }
    report.check(
        "Jacobi identity",
        jacobi,
        format!("{RANDOM_SAMPLES} random triples"),
    );
    report.check(
        "iota([x,y]) = iota(x)iota(y) - iota(y)iota(x)",
        iota,
        format!("{RANDOM_SAMPLES} random pairs"),
    );

    report.results = json!({
        "class_cap": c,
        "hall_basis": hall_labels(ctx),
        "gamma": gamma.iter().map(|g| to_value(&LatticeJson::from(g))).collect::<Vec<_>>(),
        "delta": delta.iter().map(|d| to_value(&LatticeJson::from(d))).collect::<Vec<_>>(),
        "divisors": strings(&pd.divisors),
        "delta4_solutions": sol.lattice.basis().iter().map(|v| strings(&v.to_dense(sol.pairs.len()))).collect::<Vec<_>>(),
    });
    Ok(check_lines(report))
}

fn check_lines(report: &Report) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        if c.detail.is_empty() {
            s.push_str(&format!("{mark} {}\n", c.name));
        } else {
            s.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
        }
    }
    s.push_str(if report.passed {
        "all checks passed\n"
    } else {
        "some checks failed\n"
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_check_maps_to_exit_one() {
        let mut r = Report::new(vec![]);
        r.check("a", true, "");
        assert_eq!(exit_code(&r), EXIT_OK);
        r.check("b", false, "");
        r.check("c", true, "");
        assert_eq!(exit_code(&r), EXIT_CHECK_FAILED);
        assert!(check_lines(&r).contains("FAIL b"));
    }
}
