//! Command-line frontend: every library capability as a reproducible,
//! scriptable command with text or JSON output.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 exceeded time or size
//! budget, 3 a verification or reproduction mismatch.

use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::chproof;
use crate::groebner::{
    ideal_membership, radical_membership, section5_report, Limits, MembershipVerdict,
    Section5Options, Verdict,
};
use crate::jacobian::{
    char_ideal, jacobian_ideal, nil2_ideal, theorem_membership_check, IdealSpec,
};
use crate::polyring::{parse_polynomial, MonomialOrder, VarSet};
use crate::trees::{build_fern, fern_mu, formal_inverse_tree_sum, z_fern, FernLabeling};
use crate::{Error, Result};

/// Parse the `r;(..);..;(..)` labeling grammar: a root label, then n-1
/// tuples of arity d-1, then one tuple of arity d, all labels in [1,n].
pub fn parse_fern_labeling(s: &str, n: usize, d: usize) -> Result<FernLabeling> {
    FernLabeling::parse(s, n, d)
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliConfig {
    pub order: MonomialOrder,
    pub timeout_secs: u64,
    pub output: OutputFormat,
    pub include_slow: bool,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            order: MonomialOrder::DegRevLex,
            timeout_secs: 300,
            output: OutputFormat::Text,
            include_slow: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Lex,
    Degrevlex,
}

impl OrderArg {
    fn to_order(self) -> MonomialOrder {
        match self {
            OrderArg::Lex => MonomialOrder::Lex,
            OrderArg::Degrevlex => MonomialOrder::DegRevLex,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IdealArg {
    #[value(name = "J")]
    J,
    #[value(name = "J+nil2")]
    JNil2,
    #[value(name = "J+char")]
    JChar,
}

impl IdealArg {
    fn build(self, n: usize, d: usize, vars: &VarSet) -> IdealSpec {
        let base = jacobian_ideal(n, d, vars);
        match self {
            IdealArg::J => base,
            IdealArg::JNil2 => base.union(&nil2_ideal(vars)),
            IdealArg::JChar => base.union(&char_ideal(vars)),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fernjac",
    version,
    about = "Exact computations around degree-linear maps: formal inverses, \
             Jacobian ideals, fern z-values, ideal membership, and \
             combinatorial Cayley-Hamilton certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Monomial order for Groebner computations.
    #[arg(long, global = true, value_enum, default_value = "degrevlex")]
    order: OrderArg,

    /// Per-computation time budget in seconds.
    #[arg(long = "timeout-secs", global = true, default_value_t = 300)]
    timeout_secs: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    output: OutputFormat,

    /// Also run the slow reproduction rows.
    #[arg(long = "include-slow", global = true)]
    include_slow: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print components of the truncated formal inverse (tree-sum form).
    #[command(name = "inverse")]
    Inverse {
        /// Dimension n.
        #[arg(long)]
        n: usize,
        /// Degree d of the linear form's power (d >= 2).
        #[arg(long)]
        d: usize,
        /// Truncation bound: keep x-degrees up to this value.
        #[arg(long = "max-degree")]
        max_degree: u32,
        /// Component index in [1,n]; all components when omitted.
        #[arg(long)]
        component: Option<usize>,
    },
    /// Print the generators of the Jacobian ideal J(d,n).
    #[command(name = "jac-ideal")]
    JacIdeal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Evaluate z(fern) for a root-leaf labeling of the fern tree.
    #[command(name = "zfern")]
    Zfern {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Labeling in the `r;(..);..;(..)` grammar.
        #[arg(long, conflicts_with_all = ["i", "j", "l"])]
        labeling: Option<String>,
        /// Root label of the mu(i,j,l) labeling (requires --j and --l).
        #[arg(long, requires_all = ["j", "l"])]
        i: Option<usize>,
        /// Deep-leaf label of mu(i,j,l).
        #[arg(long, requires_all = ["i", "l"])]
        j: Option<usize>,
        /// Side-leaf label of mu(i,j,l).
        #[arg(long, requires_all = ["i", "j"])]
        l: Option<usize>,
    },
    /// Decide membership of a target polynomial in an ideal.
    #[command(name = "member")]
    Member {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Target polynomial, e.g. "a[1,2]*a[2,1] + 3*a[1,1]^2".
        #[arg(long)]
        target: String,
        /// Ideal to test against.
        #[arg(long, value_enum, default_value = "J")]
        ideal: IdealArg,
    },
    /// Decide membership of a target polynomial in the radical of an ideal.
    #[command(name = "radical-member")]
    RadicalMember {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value = "J")]
        ideal: IdealArg,
    },
    /// Verify the characteristic-coefficient identities and the membership
    /// identity for fern z-values.
    #[command(name = "theorem")]
    Theorem {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Check a single triple (requires --j and --l); all triples when
        /// omitted.
        #[arg(long, requires_all = ["j", "l"])]
        i: Option<usize>,
        #[arg(long, requires_all = ["i", "l"])]
        j: Option<usize>,
        #[arg(long, requires_all = ["i", "j"])]
        l: Option<usize>,
    },
    /// Exhaustively certify the combinatorial Cayley-Hamilton identities.
    #[command(name = "ch-verify")]
    ChVerify {
        #[arg(long)]
        n: usize,
    },
    /// Reproduce the membership verdict table and compare against the
    /// expected verdicts.
    #[command(name = "section5")]
    Section5,
}

/// Run the command line given by `argv` (including the program name) and
/// return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let config = CliConfig {
        order: cli.order.to_order(),
        timeout_secs: cli.timeout_secs,
        output: cli.output,
        include_slow: cli.include_slow,
    };
    match dispatch(cli.command, &config) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Timeout(_) | Error::Limit(_) => 2,
                _ => 1,
            }
        }
    }
}

fn limits(config: &CliConfig) -> Limits {
    Limits { max_seconds: config.timeout_secs, ..Limits::default() }
}

fn dispatch(command: Command, config: &CliConfig) -> Result<i32> {
    match command {
        Command::Inverse { n, d, max_degree, component } => {
            cmd_inverse(n, d, max_degree, component, config)
        }
        Command::JacIdeal { n, d } => cmd_jac_ideal(n, d, config),
        Command::Zfern { n, d, labeling, i, j, l } => cmd_zfern(n, d, labeling, i, j, l, config),
        Command::Member { n, d, target, ideal } => {
            cmd_membership(n, d, &target, ideal, false, config)
        }
        Command::RadicalMember { n, d, target, ideal } => {
            cmd_membership(n, d, &target, ideal, true, config)
        }
        Command::Theorem { n, d, i, j, l } => cmd_theorem(n, d, i, j, l, config),
        Command::ChVerify { n } => cmd_ch_verify(n, config),
        Command::Section5 => cmd_section5(config),
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension n must be at least 1".into()));
    }
    Ok(())
}

fn cmd_inverse(
    n: usize,
    d: usize,
    max_degree: u32,
    component: Option<usize>,
    config: &CliConfig,
) -> Result<i32> {
    check_dimension(n)?;
    if max_degree == 0 {
        return Err(Error::InvalidInput("max-degree must be at least 1".into()));
    }
    let vars = VarSet::new(n);
    let components: Vec<usize> = match component {
        Some(c) => vec![c],
        None => (1..=n).collect(),
    };
    let mut rows = Vec::with_capacity(components.len());
    for &c in &components {
        let g = formal_inverse_tree_sum(n, d, c, max_degree, &vars)?;
        rows.push((c, g.display(&vars)));
    }
    match config.output {
        OutputFormat::Text => {
            if component.is_some() {
                println!("{}", rows[0].1);
            } else {
                for (c, s) in &rows {
                    println!("g[{c}] = {s}");
                }
            }
        }
        OutputFormat::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(c, s)| json!({"component": c, "polynomial": s}))
                .collect();
            print_json(&json!({"n": n, "d": d, "max_degree": max_degree, "components": items}))?;
        }
    }
    Ok(0)
}

fn cmd_jac_ideal(n: usize, d: usize, config: &CliConfig) -> Result<i32> {
    check_dimension(n)?;
    if d == 0 {
        return Err(Error::InvalidInput("degree d must be at least 1".into()));
    }
    let vars = VarSet::new(n);
    let ideal = jacobian_ideal(n, d, &vars);
    match config.output {
        OutputFormat::Text => {
            for g in &ideal.generators {
                println!("{}", g.display(&vars));
            }
        }
        OutputFormat::Json => {
            let gens: Vec<String> = ideal.generators.iter().map(|g| g.display(&vars)).collect();
            print_json(&json!({"name": ideal.name, "generators": gens}))?;
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_zfern(
    n: usize,
    d: usize,
    labeling: Option<String>,
    i: Option<usize>,
    j: Option<usize>,
    l: Option<usize>,
    config: &CliConfig,
) -> Result<i32> {
    check_dimension(n)?;
    if d == 0 {
        return Err(Error::InvalidInput("degree d must be at least 1".into()));
    }
    let fern = build_fern(d, n);
    let mu = match (labeling, i, j, l) {
        (Some(s), None, None, None) => parse_fern_labeling(&s, n, d)?,
        (None, Some(i), Some(j), Some(l)) => {
            for (name, v) in [("i", i), ("j", j), ("l", l)] {
                if !(1..=n).contains(&v) {
                    return Err(Error::InvalidInput(format!("{name}={v} out of range [1,{n}]")));
                }
            }
            fern_mu(&fern, i, j, l)
        }
        _ => {
            return Err(Error::InvalidInput(
                "provide either --labeling or all of --i, --j, --l".into(),
            ))
        }
    };
    let vars = VarSet::new(n);
    let z = z_fern(&fern, &mu, n, &vars);
    match config.output {
        OutputFormat::Text => println!("{}", z.display(&vars)),
        OutputFormat::Json => {
            print_json(&json!({
                "n": n,
                "d": d,
                "labeling": mu.display(),
                "z": z.display(&vars),
            }))?;
        }
    }
    Ok(0)
}

fn print_verdict(v: &MembershipVerdict, vars: &VarSet, config: &CliConfig) -> Result<()> {
    let witness = v.witness.as_ref().map(|w| {
        if w.num_terms() <= 24 {
            w.display(vars)
        } else {
            format!("polynomial with {} terms", w.num_terms())
        }
    });
    match config.output {
        OutputFormat::Text => {
            println!("target: {}", v.target);
            println!("ideal: {}", v.ideal);
            println!("verdict: {}", v.verdict.label());
            if let Some(w) = &witness {
                if v.verdict == Verdict::NonMember {
                    println!("normal_form: {w}");
                }
            }
            println!("elapsed_ms: {}", v.elapsed_ms);
        }
        OutputFormat::Json => {
            print_json(&json!({
                "target": v.target,
                "ideal": v.ideal,
                "verdict": v.verdict.label(),
                "normal_form": witness,
                "elapsed_ms": v.elapsed_ms,
            }))?;
        }
    }
    Ok(())
}

fn cmd_membership(
    n: usize,
    d: usize,
    target: &str,
    ideal: IdealArg,
    radical: bool,
    config: &CliConfig,
) -> Result<i32> {
    check_dimension(n)?;
    if d == 0 {
        return Err(Error::InvalidInput("degree d must be at least 1".into()));
    }
    let vars = VarSet::new(n);
    let p = parse_polynomial(target, &vars)?;
    let spec = ideal.build(n, d, &vars);
    let lim = limits(config);
    let verdict = if radical {
        radical_membership(&p, &spec, config.order, &lim, &vars)
    } else {
        ideal_membership(&p, &spec, config.order, &lim, &vars)
    };
    print_verdict(&verdict, &vars, config)?;
    Ok(if verdict.verdict == Verdict::Timeout { 2 } else { 0 })
}

fn cmd_theorem(
    n: usize,
    d: usize,
    i: Option<usize>,
    j: Option<usize>,
    l: Option<usize>,
    config: &CliConfig,
) -> Result<i32> {
    check_dimension(n)?;
    if d == 0 {
        return Err(Error::InvalidInput("degree d must be at least 1".into()));
    }
    let vars = VarSet::new(n);
    let triples: Vec<(usize, usize, usize)> = match (i, j, l) {
        (Some(i), Some(j), Some(l)) => vec![(i, j, l)],
        (None, None, None) => {
            let mut v = Vec::with_capacity(n * n * n);
            for i in 1..=n {
                for j in 1..=n {
                    for l in 1..=n {
                        v.push((i, j, l));
                    }
                }
            }
            v
        }
        _ => {
            return Err(Error::InvalidInput(
                "provide all of --i, --j, --l or none of them".into(),
            ))
        }
    };
    let mut reports = Vec::with_capacity(triples.len());
    for &(i, j, l) in &triples {
        reports.push(theorem_membership_check(n, d, i, j, l, &vars)?);
    }
    let all_ok = reports.iter().all(|r| r.all_ok());
    match config.output {
        OutputFormat::Text => {
            for r in &reports {
                let status = if r.all_ok() { "ok" } else { "MISMATCH" };
                println!(
                    "({},{},{}): {} (a-variant agrees: {}, {} ms)",
                    r.i, r.j, r.l, status, r.a_variant_equal, r.elapsed_ms
                );
            }
            println!(
                "checked {} triples at n={n}, d={d}: {}",
                reports.len(),
                if all_ok { "all ok" } else { "MISMATCH" }
            );
        }
        OutputFormat::Json => {
            print_json(&json!({"n": n, "d": d, "reports": reports, "all_ok": all_ok}))?;
        }
    }
    Ok(if all_ok { 0 } else { 3 })
}

fn cmd_ch_verify(n: usize, config: &CliConfig) -> Result<i32> {
    let report = chproof::verify_ch(n)?;
    match config.output {
        OutputFormat::Text => {
            for case in &report.cases {
                println!("{}", serde_json::to_string(case)?);
            }
            println!("literal_rule_defects: {}", report.literal_rule_defects);
            for f in &report.findings {
                println!("finding: {f}");
            }
            println!("all_ok: {}", report.all_ok);
        }
        OutputFormat::Json => print_json(&serde_json::to_value(&report)?)?,
    }
    Ok(if report.all_ok { 0 } else { 3 })
}

fn cmd_section5(config: &CliConfig) -> Result<i32> {
    let opts = Section5Options {
        include_slow: config.include_slow,
        order: config.order,
        limits: limits(config),
    };
    let report = section5_report(&opts);
    match config.output {
        OutputFormat::Text => {
            for row in &report.rows {
                println!(
                    "{:8} {:32} ideal={} expected={} computed={} ({} ms)",
                    row.status,
                    row.claim_id,
                    row.ideal,
                    row.expected.as_deref().unwrap_or("-"),
                    row.computed,
                    row.elapsed_ms
                );
            }
            for note in &report.notes {
                println!("note: {note}");
            }
            println!("all_match: {}", report.all_match);
        }
        OutputFormat::Json => print_json(&serde_json::to_value(&report)?)?,
    }
    if report.rows.iter().any(|r| r.status == "mismatch") {
        return Ok(3);
    }
    if report.rows.iter().any(|r| r.status == "timeout") {
        return Ok(2);
    }
    Ok(0)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(rest: &[&str]) -> Vec<String> {
        std::iter::once("fernjac").chain(rest.iter().copied()).map(String::from).collect()
    }

    #[test]
    fn defaults_match_contract() {
        let config = CliConfig::default();
        assert_eq!(config.order, MonomialOrder::DegRevLex);
        assert_eq!(config.timeout_secs, 300);
        assert_eq!(config.output, OutputFormat::Text);
        assert!(!config.include_slow);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(args(&["no-such-command"])), 1);
        assert_eq!(run(args(&["inverse"])), 1); // missing required flags
        assert_eq!(run(args(&["member", "--n", "2", "--d", "2"])), 1); // no target
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(args(&["--help"])), 0);
    }

    #[test]
    fn invalid_input_exits_one() {
        // d = 1 has no degree-by-degree formal inverse.
        assert_eq!(
            run(args(&["inverse", "--n", "1", "--d", "1", "--max-degree", "3"])),
            1
        );
        // Arity mismatch in the labeling grammar.
        assert_eq!(
            run(args(&["zfern", "--n", "3", "--d", "2", "--labeling", "1;(2);(1,1)"])),
            1
        );
        // Inconsistent mu flags.
        assert_eq!(run(args(&["zfern", "--n", "2", "--d", "2", "--i", "1"])), 1);
    }

    #[test]
    fn fast_commands_exit_zero() {
        assert_eq!(
            run(args(&["inverse", "--n", "1", "--d", "2", "--max-degree", "3", "--component", "1"])),
            0
        );
        assert_eq!(run(args(&["jac-ideal", "--n", "2", "--d", "2"])), 0);
        assert_eq!(
            run(args(&["zfern", "--n", "2", "--d", "2", "--i", "1", "--j", "2", "--l", "1"])),
            0
        );
        assert_eq!(run(args(&["theorem", "--n", "2", "--d", "2"])), 0);
        assert_eq!(run(args(&["ch-verify", "--n", "2"])), 0);
        assert_eq!(run(args(&["ch-verify", "--n", "2", "--output", "json"])), 0);
    }

    #[test]
    fn member_commands_run() {
        // a[1,1]*a[1,2] is a generator of J(2,2) up to scale.
        assert_eq!(
            run(args(&["member", "--n", "2", "--d", "2", "--target", "a[1,1]*a[1,2]"])),
            0
        );
        assert_eq!(
            run(args(&[
                "radical-member",
                "--n",
                "2",
                "--d",
                "2",
                "--target",
                "a[1,1]*a[1,2]",
                "--ideal",
                "J+nil2",
            ])),
            0
        );
    }

    #[test]
    fn parse_fern_labeling_grammar() {
        assert!(parse_fern_labeling("1;(2);(3);(1,1)", 3, 2).is_ok());
        assert!(parse_fern_labeling("1;(2,2);(3,3);(1,1,1)", 3, 3).is_ok());
        // Missing tuple: arity error.
        assert!(parse_fern_labeling("1;(2);(1,1)", 3, 2).is_err());
        // Label out of range.
        assert!(parse_fern_labeling("1;(2);(4);(1,1)", 3, 2).is_err());
    }
}
