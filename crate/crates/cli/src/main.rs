use std::collections::BTreeMap;
use std::process::ExitCode;

use a2lab::bilaurent::Unit;
use a2lab::falsetheta::{self, F0Form};
use a2lab::identities::{self, pair_json, IdentityReport, Verdict};
use a2lab::numeric::{self, Law, ModularMatrix, SamplePoint, Transform, TransformationResidual};
use a2lab::rational::{parse_exp, render_exp, render_rational};
use a2lab::series::eta_series;
use a2lab::thetas::{self, LPath};
use a2lab::{BiLaurentSeries, Error, Exp, PuiseuxSeries, Region};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

const THREADS_VAR: &str = "A2LAB_THREADS";

#[derive(Parser)]
#[command(name = "a2lab", version, about = "Exact q-series and Jacobi form laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the expansion of a named series.
    Expand {
        #[arg(value_enum)]
        series: SeriesName,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: SeriesParams,
    },
    /// Compare both sides of a registered identity, or of all of them.
    Verify {
        /// Identity id, `all`, or `A|B|...`.
        id: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: SeriesParams,
        /// Extra case filter, `key=value` with a JSON or bare string value.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        extra: Vec<String>,
    },
    /// Evaluate one transformation law numerically.
    Check {
        /// THETA_MOD, THETA_ELL, F_MOD, F_ELL, T_MOD, T_ELL, J_MOD or J_ELL.
        law: String,
        #[command(flatten)]
        numeric: NumericArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the identity registry and every registered numeric grid.
    Suite {
        /// Identity selection, `all` or `A|B|...`.
        #[arg(long, default_value = "all")]
        filter: String,
        /// Override every selected identity's order.
        #[arg(long, value_parser = parse_order)]
        order: Option<Exp>,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Skip the numeric transformation grids.
        #[arg(long)]
        no_numeric: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_parser = parse_order)]
    order: Option<Exp>,
    #[arg(long, default_value_t = 6)]
    window: i64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Default)]
struct SeriesParams {
    #[arg(long)]
    p: Option<i64>,
    /// Shift `a,b` (rationals).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Index `a,b` (rationals), or one integer for `rankone`.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long)]
    region: Option<String>,
    /// z1, z2 or z12.
    #[arg(long)]
    unit: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<i64>,
}

#[derive(Args)]
struct NumericArgs {
    /// `a,b,c,d` with `ad - bc = 1`.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Lattice shift `m1[,m2]`.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Integer shift `l1[,l2]`.
    #[arg(long, allow_hyphen_values = true)]
    l: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "0.1+1.2i")]
    tau: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0.21+0.3i,0.11+0.4i")]
    z: String,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Run the registered grid for the law instead of a single point.
    #[arg(long)]
    grid: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesName {
    #[value(name = "eta")]
    Eta,
    #[value(name = "theta")]
    Theta,
    #[value(name = "theta01")]
    Theta01,
    #[value(name = "thetaA2")]
    ThetaA2,
    #[value(name = "calT")]
    CalT,
    #[value(name = "f")]
    F,
    #[value(name = "J")]
    J,
    #[value(name = "kwN3")]
    KwN3,
    #[value(name = "Gfrak")]
    Gfrak,
    #[value(name = "Ghyper")]
    Ghyper,
    #[value(name = "Hfrak")]
    Hfrak,
    #[value(name = "F0")]
    F0,
    #[value(name = "coeffF")]
    CoeffF,
    #[value(name = "rankone")]
    RankOne,
    #[value(name = "rogers")]
    Rogers,
    #[value(name = "Fconst")]
    Fconst,
    #[value(name = "partialThetaA2")]
    PartialThetaA2,
}

/// Failure with its exit code: 1 for a mathematical discrepancy, 2 for usage.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MultiplierValidation(_) => 1,
            _ => 2,
        };
        Failure(code, e.to_string())
    }
}

/// Prints a line to stdout; a closed pipe ends the process quietly.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(0);
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn parse_order(s: &str) -> Result<Exp, String> {
    let e = parse_exp(s).map_err(|e| e.to_string())?;
    if e <= Exp::from_integer(0) {
        return Err(format!("order must be positive, got {s}"));
    }
    Ok(e)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| usage(format!("bad {what} `{s}`"))))
        .collect()
}

fn parse_pair(s: &str, what: &str) -> Result<(Exp, Exp), Failure> {
    let v: Vec<Exp> = s.split(',').map(|x| parse_exp(x.trim())).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok((a, b)),
        _ => Err(usage(format!("{what} needs two comma separated rationals, got `{s}`"))),
    }
}

fn int_pair(p: (Exp, Exp), what: &str) -> Result<(i64, i64), Failure> {
    if p.0.is_integer() && p.1.is_integer() {
        Ok((p.0.to_integer(), p.1.to_integer()))
    } else {
        Err(usage(format!("{what} must be integral")))
    }
}

fn parse_unit(s: Option<&str>) -> Result<Unit, Failure> {
    match s.unwrap_or("z1") {
        "z1" => Ok(Unit::Z1),
        "z2" => Ok(Unit::Z2),
        "z12" => Ok(Unit::Z12),
        other => Err(usage(format!("unknown unit `{other}`, expected z1, z2 or z12"))),
    }
}

fn parse_region(s: Option<&str>) -> Result<Region, Failure> {
    Ok(s.map(str::parse).transpose()?.unwrap_or(Region::Inner))
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(e.to_string()))
}

// ---------------------------------------------------------------- expand

enum Expansion {
    Uni(PuiseuxSeries),
    Bi(BiLaurentSeries),
}

fn expansion(name: SeriesName, order: Exp, window: i64, p: &SeriesParams) -> Result<Expansion, Failure> {
    use Expansion::{Bi, Uni};
    let region = parse_region(p.region.as_deref())?;
    let win = Some(window);
    let pp = p.p.unwrap_or(2);
    let lambda = || p.lambda.as_deref().map(|s| parse_pair(s, "--lambda")).transpose().map(|v| v.unwrap_or_default());
    let r = || p.r.as_deref().map(|s| parse_pair(s, "--r")).transpose().map(|v| v.unwrap_or_default());
    let k = p.k.unwrap_or(1);
    Ok(match name {
        SeriesName::Eta => Uni(eta_series(k, order)?),
        SeriesName::Theta => Bi(thetas::theta_hat(parse_unit(p.unit.as_deref())?, k, order, region, win)?),
        SeriesName::Theta01 => Bi(thetas::theta01(parse_unit(p.unit.as_deref())?, k, order, region, win)?),
        SeriesName::ThetaA2 => Bi(thetas::theta_a2(order, region, win)),
        SeriesName::CalT => Bi(thetas::cal_t(order, region, win)),
        SeriesName::F => Bi(thetas::f_series(order, region, LPath::Geometric, win)?),
        SeriesName::J => Bi(thetas::j_series(order, win)?),
        SeriesName::KwN3 => Bi(thetas::kw_character_n3(order, win)?),
        SeriesName::Gfrak => Uni(falsetheta::g_frak(lambda()?, pp, order)?),
        SeriesName::PartialThetaA2 => Uni(falsetheta::partial_theta_a2(lambda()?, pp, order)?),
        SeriesName::Ghyper => Uni(falsetheta::g_hyper(int_pair(r()?, "--r")?, order)),
        SeriesName::Hfrak => {
            let (r1, r2) = r()?;
            Uni(falsetheta::h_frak(r1, r2, order)?)
        }
        SeriesName::F0 => Uni(falsetheta::f0_series(pp, order, F0Form::General)?),
        SeriesName::CoeffF => Uni(falsetheta::coeff_f(int_pair(r()?, "--r")?, pp, order)?),
        SeriesName::RankOne => {
            let v: Vec<i64> = p.r.as_deref().map(|s| parse_list(s, "--r")).transpose()?.unwrap_or(vec![0]);
            if v.len() != 1 {
                return Err(usage("rankone takes a single integer --r"));
            }
            Uni(falsetheta::rank_one_coeff(pp, v[0], order)?)
        }
        SeriesName::Rogers => Uni(falsetheta::rogers_false_theta(order)),
        SeriesName::Fconst => Uni(falsetheta::f_constant_term(pp, order)?),
    })
}

fn uni_table(s: &PuiseuxSeries) -> String {
    let mut out = format!("exponent\tcoefficient\t(order {})\n", render_exp(s.order()));
    for (e, c) in s.terms() {
        out.push_str(&format!("{}\t{}\n", render_exp(e), render_rational(c)));
    }
    out
}

fn cmd_expand(name: SeriesName, common: &Common, params: &SeriesParams) -> Result<u8, Failure> {
    if common.window < 0 {
        return Err(usage("--window must be nonnegative"));
    }
    let order = common.order.unwrap_or(Exp::from_integer(20));
    let e = expansion(name, order, common.window, params)?;
    let text = match (common.format, &e) {
        (Format::Json, Expansion::Uni(s)) => serde_json::to_string_pretty(s).expect("series json"),
        (Format::Json, Expansion::Bi(s)) => serde_json::to_string_pretty(s).expect("series json"),
        (Format::Text, Expansion::Uni(s)) => uni_table(s),
        (Format::Text, Expansion::Bi(s)) => s.to_string(),
    };
    emit(text.trim_end());
    Ok(0)
}

// ---------------------------------------------------------------- verify

fn filter_json(params: &SeriesParams, extra: &[String]) -> Result<Value, Failure> {
    let mut m = serde_json::Map::new();
    if let Some(p) = params.p {
        m.insert("p".into(), json!(p));
    }
    if let Some(s) = &params.lambda {
        let (a, b) = parse_pair(s, "--lambda")?;
        m.insert("lambda".into(), pair_json(a, b));
    }
    if let Some(s) = &params.r {
        let (a, b) = parse_pair(s, "--r")?;
        m.insert("r".into(), pair_json(a, b));
    }
    if let Some(s) = &params.region {
        m.insert("region".into(), json!(s.to_ascii_uppercase()));
    }
    if let Some(s) = &params.unit {
        m.insert("unit".into(), json!(s));
    }
    if let Some(k) = params.k {
        m.insert("k".into(), json!(k));
    }
    for kv in extra {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--param needs KEY=VALUE, got `{kv}`")))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| json!(v));
        m.insert(k.to_string(), v);
    }
    Ok(Value::Object(m))
}

fn report_line(r: &IdentityReport) -> String {
    let head = format!("{:<5} {:<8} order {:<5} {:>6} ms", r.id, format!("{:?}", r.verdict).to_lowercase(), render_exp(r.order), r.ms);
    match &r.discrepancy {
        None => head,
        Some(d) => format!("{head}  first difference at {}: {} vs {}", d.key, render_rational(&d.lhs), render_rational(&d.rhs)),
    }
}

fn emit_reports(reports: &[IdentityReport], format: Format) {
    match format {
        Format::Json if reports.len() == 1 => emit(&serde_json::to_string_pretty(&reports[0]).expect("json")),
        Format::Json => emit(&serde_json::to_string_pretty(reports).expect("json")),
        Format::Text => reports.iter().for_each(|r| emit(&report_line(r))),
    }
}

fn cmd_verify(id: &str, common: &Common, params: &SeriesParams, extra: &[String]) -> Result<u8, Failure> {
    let filter = filter_json(params, extra)?;
    let reports = if id == "all" || id == "*" || id.contains('|') {
        let ids = identities::select(id);
        if ids.is_empty() {
            return Err(usage(format!("no identity matches `{id}`")));
        }
        if let Some(bad) = id.split('|').map(str::trim).find(|s| !s.is_empty() && *s != "all" && *s != "*" && !ids.contains(s)) {
            return Err(Error::UnknownIdentity(bad.to_string()).into());
        }
        if filter.as_object().is_some_and(|m| !m.is_empty()) {
            return Err(usage("parameter filters apply to a single identity"));
        }
        let overrides: BTreeMap<String, Exp> = match common.order {
            Some(o) => ids.iter().map(|i| (i.to_string(), o)).collect(),
            None => BTreeMap::new(),
        };
        identities::run_suite(id, &overrides)?
    } else {
        vec![identities::verify_identity(id, &filter, common.order)?]
    };
    emit_reports(&reports, common.format);
    Ok(if reports.iter().all(|r| r.verdict == Verdict::Equal) { 0 } else { 1 })
}

// ---------------------------------------------------------------- check

fn parse_point(tau: &str, z: &str) -> Result<SamplePoint, Failure> {
    let tau = numeric::parse_complex(tau)?;
    let zs: Vec<Complex64> = z.split(',').map(numeric::parse_complex).collect::<Result<_, _>>()?;
    let z = match zs[..] {
        [a] => (a, Complex64::new(0.0, 0.0)),
        [a, b] => (a, b),
        _ => return Err(usage(format!("--z takes one or two complex numbers, got `{z}`"))),
    };
    Ok(SamplePoint { tau, z })
}

fn parse_shift(s: Option<&str>, what: &str) -> Result<(i64, i64), Failure> {
    let v: Vec<i64> = s.map(|s| parse_list(s, what)).transpose()?.unwrap_or(vec![0]);
    match v[..] {
        [a] => Ok((a, 0)),
        [a, b] => Ok((a, b)),
        _ => Err(usage(format!("{what} takes one or two integers"))),
    }
}

fn parse_transform(law: Law, a: &NumericArgs) -> Result<Transform, Failure> {
    if law.is_modular() {
        let g = a.gamma.as_deref().ok_or_else(|| usage(format!("{law} needs --gamma a,b,c,d")))?;
        let v: Vec<i64> = parse_list(g, "--gamma")?;
        let [ga, gb, gc, gd] = v[..] else {
            return Err(usage("--gamma takes four integers"));
        };
        Ok(Transform::Modular(ModularMatrix::new(ga, gb, gc, gd)?))
    } else {
        if a.m.is_none() {
            return Err(usage(format!("{law} needs --m")));
        }
        Ok(Transform::Elliptic { m: parse_shift(a.m.as_deref(), "--m")?, l: parse_shift(a.l.as_deref(), "--l")? })
    }
}

fn residual_line(r: &TransformationResidual) -> String {
    format!(
        "{:<9} {:<4} residual {:.3e} (tolerance {:.0e})  {}",
        r.law.name(),
        format!("{:?}", r.verdict).to_lowercase(),
        r.residual,
        r.tolerance,
        r.params
    )
}

fn emit_residuals(rs: &[TransformationResidual], format: Format) {
    match format {
        Format::Json if rs.len() == 1 => emit(&serde_json::to_string_pretty(&rs[0]).expect("json")),
        Format::Json => emit(&serde_json::to_string_pretty(rs).expect("json")),
        Format::Text => rs.iter().for_each(|r| emit(&residual_line(r))),
    }
}

fn grid_residuals(law: Law, tolerance: f64) -> Result<Vec<TransformationResidual>, Failure> {
    numeric::law_grid(law)
        .iter()
        .map(|(t, p)| numeric::check_transformation(law, t, p, tolerance).map_err(Failure::from))
        .collect()
}

fn cmd_check(law: &str, a: &NumericArgs, format: Format) -> Result<u8, Failure> {
    let law: Law = law.parse()?;
    let rs = if a.grid {
        grid_residuals(law, a.tolerance)?
    } else {
        let t = parse_transform(law, a)?;
        vec![numeric::check_transformation(law, &t, &parse_point(&a.tau, &a.z)?, a.tolerance)?]
    };
    emit_residuals(&rs, format);
    Ok(if rs.iter().all(|r| r.verdict == numeric::Verdict::Pass) { 0 } else { 1 })
}

// ---------------------------------------------------------------- suite

fn cmd_suite(filter: &str, order: Option<Exp>, tolerance: f64, no_numeric: bool, format: Format) -> Result<u8, Failure> {
    let ids = identities::select(filter);
    if ids.is_empty() {
        return Err(usage(format!("no identity matches `{filter}`")));
    }
    let overrides: BTreeMap<String, Exp> = match order {
        Some(o) => ids.iter().map(|i| (i.to_string(), o)).collect(),
        None => BTreeMap::new(),
    };
    let reports = identities::run_suite(filter, &overrides)?;
    let mut residuals = Vec::new();
    if !no_numeric {
        numeric::validate_multiplier()?;
        for law in Law::ALL {
            residuals.extend(grid_residuals(law, tolerance)?);
        }
    }
    let equal = reports.iter().filter(|r| r.verdict == Verdict::Equal).count();
    let passed = residuals.iter().filter(|r| r.verdict == numeric::Verdict::Pass).count();
    match format {
        Format::Json => emit(
            &serde_json::to_string_pretty(&json!({"identities": reports, "transformations": residuals})).expect("json"),
        ),
        Format::Text => {
            reports.iter().for_each(|r| emit(&report_line(r)));
            for law in Law::ALL {
                let of_law: Vec<_> = residuals.iter().filter(|r| r.law == law).collect();
                if of_law.is_empty() {
                    continue;
                }
                let worst = of_law.iter().map(|r| r.residual).fold(0.0, f64::max);
                let ok = of_law.iter().filter(|r| r.verdict == numeric::Verdict::Pass).count();
                emit(&format!(
                    "{:<9} {}/{} points within {:.0e}, worst residual {:.3e}",
                    law.name(),
                    ok,
                    of_law.len(),
                    tolerance,
                    worst
                ));
            }
            emit(&format!(
                "identities {equal}/{} equal; transformations {passed}/{} within tolerance",
                reports.len(),
                residuals.len()
            ));
        }
    }
    Ok(if equal == reports.len() && passed == residuals.len() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    init_threads()?;
    match &cli.command {
        Command::Expand { series, common, params } => cmd_expand(*series, common, params),
        Command::Verify { id, common, params, extra } => cmd_verify(id, common, params, extra),
        Command::Check { law, numeric, format } => cmd_check(law, numeric, *format),
        Command::Suite { filter, order, tolerance, no_numeric, format } => {
            cmd_suite(filter, *order, *tolerance, *no_numeric, *format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
