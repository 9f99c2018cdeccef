use std::fs;
use std::io::Write;
use std::path::Path;

use udn_cache::combinatorics::binomial;
use udn_cache::geometry::{region_census, Grid};
use udn_cache::mn::{place, signal_records, to_json_lines};
use udn_cache::report::{closed_form_report, to_csv, to_json};
use udn_cache::scheme_a::run_scheme_a_with;
use udn_cache::scheme_b::{
    computable_min, h_bruteforce, h_formula, run_scheme_b_with, Delivery, SchemeBOptions, ORACLE_LIMIT,
};
use udn_cache::{DemandMap, Error, GridConfig, LoadReport, Regime, Scheme, UserType};

use crate::{CensusArgs, DemandArgs, Format, OracleArgs, OutputArgs, RunArgs, SweepArgs, SweepAxis, SystemArgs, VerifyArgs};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Verification(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DecodeFailure { .. }
            | Error::MissingPackets { .. }
            | Error::CountingViolation { .. }
            | Error::MdsViolation(_)
            | Error::SingularSystem(_)
            | Error::InsufficientSideInformation { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn build_config(s: &SystemArgs) -> Result<GridConfig, Failure> {
    let mut config = GridConfig::new(s.k1, s.k2, s.regime, s.t)?
        .with_packet_bytes(s.packet_bytes)?
        .with_seed(s.seed);
    if let Some(n) = s.n_files {
        config = config.with_files(n)?;
    }
    Ok(config.validated()?)
}

/// Refuses instances whose per-sub-type signal count would make a full
/// simulation impractical.
fn check_size(config: &GridConfig) -> Outcome {
    config.check_simulable()?;
    let k = config.nodes();
    let signals = if config.t >= k { 0 } else { binomial(k, config.t + 1) };
    if signals > ORACLE_LIMIT {
        return Err(usage(format!(
            "C({k}, {}) = {signals} signals per sub-type is above the simulation limit of {ORACLE_LIMIT}; \
             use a smaller grid or t, or pass --closed-form",
            config.t + 1
        )));
    }
    Ok(())
}

fn load_demands(config: &GridConfig, d: &DemandArgs) -> Result<DemandMap, Failure> {
    if let Some(path) = &d.demands {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        return Ok(DemandMap::from_json(config, &text)?);
    }
    if d.random_demands {
        return Ok(DemandMap::random(config, config.seed)?);
    }
    DemandMap::worst_case(config).map_err(|e| {
        usage(format!(
            "{e}; distinct demands need --n-files >= {} (the user count), or use --random-demands",
            config.user_count()
        ))
    })
}

fn emit(text: &str, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| usage(format!("cannot write output: {e}")))
        }
    }
}

fn emit_reports(reports: &[LoadReport], out: &OutputArgs) -> Outcome {
    let text = match out.format {
        Format::Csv => to_csv(reports),
        Format::Json => to_json(reports),
    };
    emit(&text, out.output.as_deref())
}

fn dedup(schemes: &[Scheme]) -> Vec<Scheme> {
    let mut seen = Vec::new();
    for &s in schemes {
        if !seen.contains(&s) {
            seen.push(s);
        }
    }
    seen
}

pub fn run(a: RunArgs) -> Outcome {
    let config = build_config(&a.system)?;
    let schemes = dedup(&a.schemes);
    let simulate = !a.closed_form && schemes.iter().any(|s| matches!(s, Scheme::A | Scheme::B));
    let prepared = if simulate {
        check_size(&config)?;
        Some((place(&config)?, load_demands(&config, &a.demand)?))
    } else {
        None
    };
    let grid = config.grid();
    let (k1, k2, t) = (config.k1, config.k2, config.t);
    let mut reports = Vec::new();
    let mut digests = String::new();
    for scheme in schemes {
        let mut report = closed_form_report(scheme, config.regime(), k1, k2, t)?;
        if let Some((placement, demands)) = &prepared {
            let simulated = match scheme {
                Scheme::A => {
                    let tr = run_scheme_a_with(&config, placement, demands)?;
                    for (_, signals) in &tr.deliveries {
                        digests.push_str(&to_json_lines(&signal_records(&grid, signals)));
                    }
                    eprintln!("scheme A: {} signals, {} users decoded", tr.total_signals, config.user_count());
                    Some(tr.load())
                }
                Scheme::B => {
                    let tr = run_scheme_b_with(&config, placement, demands, SchemeBOptions::default())?;
                    for (_, delivery) in &tr.deliveries {
                        match delivery {
                            Delivery::Plain(signals) => digests.push_str(&to_json_lines(&signal_records(&grid, signals))),
                            Delivery::Coded(block) => digests.push_str(&to_json_lines(&[block.record()])),
                        }
                    }
                    eprintln!("scheme B: {} symbols, {} users decoded", tr.total_symbols, config.user_count());
                    Some(tr.load())
                }
                _ => None,
            };
            if let Some(load) = simulated {
                if load != report.load {
                    return Err(Failure::Verification(format!(
                        "scheme {scheme}: simulated load {load} differs from the closed form {}",
                        report.load
                    )));
                }
                report.load = load;
            }
        }
        reports.push(report);
    }
    emit_reports(&reports, &a.out)?;
    if let Some(path) = &a.digests {
        if prepared.is_none() {
            return Err(usage("--digests needs a simulated scheme (a or b) and no --closed-form"));
        }
        emit(&digests, Some(path))?;
    }
    Ok(())
}

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn user_types(regime: Regime) -> Vec<UserType> {
    let mut types: Vec<UserType> = regime.classes().iter().map(|c| c.user_type()).collect();
    types.dedup();
    types
}

pub fn verify(a: VerifyArgs) -> Outcome {
    let config = build_config(&a.system)?;
    check_size(&config)?;
    if let Some(c) = a.corrupt_symbol {
        if !config.regime().classes().contains(&c) {
            return Err(usage(format!("sub-type {c} does not occur in the {} regime", config.regime())));
        }
    }
    let placement = place(&config)?;
    let demands = load_demands(&config, &a.demand)?;
    let regime = config.regime();
    let (k, t) = (config.nodes() as u64, config.t as u64);
    let users = config.user_count();
    let mut checks = Vec::new();

    match run_scheme_a_with(&config, &placement, &demands) {
        Ok(tr) => {
            checks.push(Check::new("scheme A decode", true, format!("{users} users recover their files")));
            let want = closed_form_report(Scheme::A, regime, config.k1, config.k2, config.t)?.load;
            checks.push(Check::new("scheme A load", tr.load() == want, format!("simulated {} vs closed form {want}", tr.load())));
        }
        Err(e) => checks.push(Check::new("scheme A decode", false, e.to_string())),
    }

    let options = SchemeBOptions {
        corrupt: a.corrupt_symbol.map(|c| (c, 0)),
    };
    match run_scheme_b_with(&config, &placement, &demands, options) {
        Ok(tr) => {
            checks.push(Check::new("scheme B decode", true, format!("{users} users recover their files")));
            let want = closed_form_report(Scheme::B, regime, config.k1, config.k2, config.t)?.load;
            checks.push(Check::new("scheme B load", tr.load() == want, format!("simulated {} vs closed form {want}", tr.load())));
        }
        Err(e) => checks.push(Check::new("scheme B decode", false, e.to_string())),
    }

    let grid = config.grid();
    for u in user_types(regime) {
        let formula = h_formula(u, k, t)?.total_usize()?;
        let counted = h_bruteforce(u, &grid, config.t)?;
        checks.push(Check::new(
            format!("type {u:?} redundancy"),
            counted == formula,
            format!("counted {counted}, closed form {formula}"),
        ));
    }

    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

/// Parses `p/q`, an integer or a decimal into a reduced-free `(p, q)`.
fn parse_ratio(s: &str) -> Result<(u64, u64), Failure> {
    let bad = || usage(format!("memory ratio {s:?} is not of the form p/q or a decimal in [0, 1]"));
    let (p, q) = if let Some((p, q)) = s.split_once('/') {
        (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?)
    } else if let Some((whole, frac)) = s.split_once('.') {
        let q = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let w: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let f: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        (w * q + f, q)
    } else {
        (s.trim().parse().map_err(|_| bad())?, 1)
    };
    if q == 0 || p > q {
        return Err(bad());
    }
    Ok((p, q))
}

pub fn sweep(a: SweepArgs) -> Outcome {
    let schemes = dedup(&a.schemes);
    let regimes: Vec<Regime> = Regime::ALL.into_iter().filter(|r| a.regime.contains(r)).collect();
    // (k1, k2, t) points, shared by every regime
    let mut points = Vec::new();
    match a.over {
        SweepAxis::T => {
            Grid::new(a.k1, a.k2)?;
            let k = a.k1 * a.k2;
            let (from, to) = (a.from.unwrap_or(0), a.to.unwrap_or(k));
            if from > to || to > k {
                return Err(usage(format!("t range {from}..={to} is empty or leaves [0, {k}]")));
            }
            points.extend((from..=to).map(|t| (a.k1, a.k2, t)));
        }
        SweepAxis::K => {
            let (p, q) = parse_ratio(&a.memory_ratio)?;
            let (from, to) = (a.from.unwrap_or(3), a.to.unwrap_or(12));
            if from < 3 || from > to {
                return Err(usage(format!("grid side range {from}..={to} is empty or starts below 3")));
            }
            for side in from..=to {
                let k = (side * side) as u64;
                if !(k * p).is_multiple_of(q) {
                    eprintln!("warning: skipping {side}x{side}: t = {k}*{p}/{q} is not an integer");
                    continue;
                }
                points.push((side, side, (k * p / q) as usize));
            }
            if points.is_empty() {
                return Err(usage(format!("no grid side in {from}..={to} gives an integer t at M/N = {p}/{q}")));
            }
        }
    }
    let mut reports = Vec::new();
    for &regime in &regimes {
        for &(k1, k2, t) in &points {
            for &scheme in &schemes {
                reports.push(closed_form_report(scheme, regime, k1, k2, t)?);
            }
        }
    }
    emit_reports(&reports, &a.out)
}

pub fn oracle(a: OracleArgs) -> Outcome {
    let grid = Grid::new(a.k1, a.k2)?;
    let k = grid.len();
    if a.t > k {
        return Err(usage(format!("t = {} exceeds K1 K2 = {k}", a.t)));
    }
    let mut failed = 0;
    for u in user_types(a.regime) {
        let formula = h_formula(u, k as u64, a.t as u64)?;
        let counted = h_bruteforce(u, &grid, a.t).map_err(|e| match e {
            Error::OracleRefused(m) => usage(m),
            other => other.into(),
        })?;
        let rebuildable = computable_min(u, &grid, a.t)?;
        let parts: Vec<String> = formula.parts.iter().map(|p| p.to_string()).collect();
        let total = formula.total_usize()?;
        let ok = counted == total && rebuildable >= counted;
        failed += usize::from(!ok);
        println!(
            "{} type {u:?}: closed form {total} ({}), counted family {counted}, rebuildable from cache {rebuildable}",
            if ok { "PASS" } else { "FAIL" },
            if parts.is_empty() { "none".to_string() } else { parts.join(" + ") },
        );
    }
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} user type(s) disagree with the closed form")));
    }
    Ok(())
}

pub fn census(a: CensusArgs) -> Outcome {
    let report = region_census(a.radius, a.samples, a.seed)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("census serializes") + "\n",
        Format::Csv => {
            let mut s = String::from("shape,class,count,area_fraction\n");
            for row in &report.shapes {
                let shape: Vec<String> = row.shape.iter().map(|(a, b)| format!("{a}:{b}")).collect();
                let class = row.class.map_or("unknown".to_string(), |c| c.to_string());
                s.push_str(&format!("{},{class},{},{}\n", shape.join(" "), row.count, row.area_fraction));
            }
            s
        }
    };
    emit(&text, None)?;
    if report.uncovered > 0 {
        eprintln!("{} of {} samples reached no node", report.uncovered, report.samples);
    }
    if report.has_unknown_shape() {
        return Err(Failure::Verification("a sampled access set matches none of the eight families".into()));
    }
    Ok(())
}
