//! Execution of parsed commands into output bytes.

use std::path::{Path, PathBuf};

use entbound::bounds::{area_law_lower, gap_s, mutual_info_correlator_bound, PackingConfig};
use entbound::cft::{
    chiral_bound_xi, chiral_far_asymptote, concentric_bound, cross_ratios, free_scalar_log_character, free_scalar_spectrum_4d,
    general_bound_3p1, tau_theta, ChiralIntervals, ChiralSpectrum, DiamondConfig, Operator, SpectrumTable,
};
use entbound::gaussian::{build_state, decay_sweep, Boundary, LatticeGeometry};
use entbound::integrable::{
    circle_spectrum, circle_trace_table, dirac_halfline_bound, dirac_halfline_bound_tabulated, sinh_gordon, vacuum_bound, SMatrix,
};
use entbound::measures::{
    bell_correlation, log_dominance_upper, modular_nuclearity_upper, mutual_information, ordering_audit,
    relative_entanglement_entropy_upper, AuditOptions, BellOptions, Certificate, DecompositionStrategy, ErOptions, MeasureKind,
};
use entbound::sectors::{
    charged_delta_bounds, minimal_model_dim, minimal_model_sectors, mu_index, young_dim, young_sector, SectorList, YoungDiagram,
};
use entbound::DensityMatrix;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::CliError;
use crate::table::{Cell, RowResult, Table};

/// Bytes to write plus whether every sweep row failed.
#[derive(Debug)]
pub struct Output {
    pub bytes: Vec<u8>,
    pub all_failed: bool,
}

impl Output {
    fn json(v: &impl Serialize) -> Result<Self, CliError> {
        let mut bytes = serde_json::to_vec_pretty(v)?;
        bytes.push(b'\n');
        Ok(Self { bytes, all_failed: false })
    }

    fn table(t: &Table) -> Result<Self, CliError> {
        Ok(Self { bytes: t.to_csv()?, all_failed: t.all_failed() })
    }
}

/// Input files read by a command, in a stable order.
pub fn input_files(c: &Command) -> Vec<PathBuf> {
    let cft = |a: &CftArgs| {
        let mut v: Vec<PathBuf> = Vec::new();
        if let Some(s) = &a.spectrum {
            if s != FREE_SCALAR {
                v.push(PathBuf::from(s));
            }
        }
        v.extend(a.diamonds.iter().cloned());
        v.extend(a.chiral.iter().cloned());
        v
    };
    match c {
        Command::Measures(a) => vec![a.state.clone()],
        Command::Lower(a) => a.state.iter().cloned().collect(),
        Command::Cft(a) | Command::Sweep(SweepArgs { domain: Some(SweepDomain::Cft(a)), .. }) => cft(a),
        _ => Vec::new(),
    }
}

pub fn execute(global: &GlobalArgs, command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Measures(a) => measures(global, a),
        Command::Gaussian(a) => Output::table(&gaussian(global, a)?),
        Command::Integrable(a) => Output::table(&integrable(a)?),
        Command::Dirac(a) => Output::table(&dirac(a)?),
        Command::Cft(a) => cft_report(a),
        Command::Sectors(a) => sectors(a),
        Command::Lower(a) => lower(global, a),
        Command::Sweep(SweepArgs { domain: Some(d), .. }) => Output::table(&match d {
            SweepDomain::Gaussian(a) => gaussian(global, a)?,
            SweepDomain::Integrable(a) => integrable(a)?,
            SweepDomain::Dirac(a) => dirac(a)?,
            SweepDomain::Cft(a) => cft_sweep(a)?,
        }),
        Command::Sweep(_) => Err(CliError::Usage("sweep needs a domain subcommand or --manifest".into())),
    }
}

// ---------------------------------------------------------------------------

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_state(path: &Path, global: &GlobalArgs) -> Result<DensityMatrix, CliError> {
    DensityMatrix::from_json(&read_text(path)?, &global.tol_profile.tolerances())
        .map_err(|e| CliError::Input { path: path.to_owned(), message: e.to_string() })
}

/// Row-parallel map with output in input order. `ENTBOUND_THREADS` caps
/// the worker count.
fn par_rows<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Result<Vec<R>, CliError> {
    let threads = match std::env::var("ENTBOUND_THREADS") {
        Ok(s) => s.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("ENTBOUND_THREADS={s:?} is not a count")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

// ---------------------------------------------------------------------------
// measures

#[derive(Serialize)]
struct MeasureRecord {
    measure: &'static str,
    value: f64,
    kind: MeasureKind,
    iterations: usize,
    stagnated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Certificate>,
    seed: u64,
}

fn measures(global: &GlobalArgs, a: &MeasuresArgs) -> Result<Output, CliError> {
    let rho = load_state(&a.state, global)?;
    let er = ErOptions {
        components: a.components,
        restarts: a.restarts,
        max_iterations: a.max_iterations,
        seed: global.seed,
        ..ErOptions::default()
    };
    let bell = BellOptions { iterations: a.bell_iterations, restarts: a.bell_restarts, seed: global.seed };
    let mut results = Vec::new();
    for &m in &a.measures {
        let r = match m {
            MeasureName::Ei => mutual_information(&rho)?,
            MeasureName::Er => relative_entanglement_entropy_upper(&rho, &er)?,
            MeasureName::En => log_dominance_upper(&rho, DecompositionStrategy::MatrixUnit)?,
            MeasureName::Em => modular_nuclearity_upper(&rho)?,
            MeasureName::Eb => bell_correlation(&rho, &bell)?,
        };
        results.push(MeasureRecord {
            measure: m.label(),
            value: r.value,
            kind: r.kind,
            iterations: r.iterations,
            stagnated: r.stagnated,
            certificate: r.certificate,
            seed: global.seed,
        });
    }
    let mut report = Map::new();
    report.insert("results".into(), serde_json::to_value(&results)?);
    let chain = [MeasureName::Ei, MeasureName::Er, MeasureName::En, MeasureName::Em];
    if chain.iter().all(|m| a.measures.contains(m)) {
        let audit = ordering_audit(&rho, &AuditOptions { relative_entropy: er, bell })?;
        report.insert("audit".into(), serde_json::to_value(&audit)?);
    }
    Output::json(&report)
}

// ---------------------------------------------------------------------------
// sweeps

fn err_text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn gaussian(global: &GlobalArgs, a: &GaussianArgs) -> Result<Table, CliError> {
    let boundary = match a.boundary {
        BoundaryArg::Dirichlet => Boundary::Dirichlet,
        BoundaryArg::Periodic => Boundary::Periodic,
    };
    let geom = LatticeGeometry::new(a.sites, a.spacing, a.mass, boundary)?;
    let state = build_state(&geom)?;
    let gaps = a.gap.integers()?;
    let rows = par_rows(&gaps, |&gap| {
        let p = decay_sweep(&state, a.region_a.start..a.region_a.end, [gap], a.trials, global.seed).remove(0);
        let result: RowResult = match (p.upper_bound, p.lower_bound) {
            (Ok(u), Ok(l)) => Ok(vec![Cell::from(p.r), u.into(), l.into()]),
            (Err(e), _) | (_, Err(e)) => Err(err_text(e)),
        };
        (vec![Cell::from(gap)], result)
    })?;
    Ok(Table { keys: vec!["gap_sites"], values: vec!["r", "upper_bound", "lower_bound"], rows })
}

fn smatrix(a: &IntegrableArgs) -> Result<SMatrix, CliError> {
    Ok(match a.model {
        ModelArg::SinhGordon => sinh_gordon(a.g.ok_or_else(|| CliError::Usage("--model sinh-gordon needs --g".into()))?)?,
        ModelArg::Poles => SMatrix::new(a.poles.clone())?,
    })
}

fn integrable(a: &IntegrableArgs) -> Result<Table, CliError> {
    let s = smatrix(a)?;
    let points = a.m_r.values(false)?;
    let rows = par_rows(&points, |&mr| {
        let result = vacuum_bound(&s, a.mass, mr / a.mass, a.kappa, a.delta).map_err(err_text).and_then(|v| match v.log_bound {
            Some(lb) => Ok(vec![lb.into(), v.asymptotic.into(), v.ratio.into(), v.terms.into(), v.strip_norm.into()]),
            None => Err(format!("series diverges: term ratio {:.6} ≥ 1", v.ratio)),
        });
        (vec![Cell::from(mr)], result)
    })?;
    Ok(Table { keys: vec!["mR"], values: vec!["log_bound", "asymptotic", "term_ratio", "terms", "strip_norm"], rows })
}

fn dirac(a: &DiracArgs) -> Result<Table, CliError> {
    let eps = a.eps.values(true)?;
    let table = match (a.circle_radius, eps.iter().copied().reduce(f64::min), eps.iter().copied().reduce(f64::max)) {
        (Some(r), Some(lo), Some(hi)) if lo > 0.0 && r > 0.0 && a.m > 0.0 => Some(circle_trace_table(a.m, lo, hi, r, a.delta)?),
        _ => None,
    };
    let rows = par_rows(&eps, |&e| {
        let result = (|| {
            let b = match (a.circle_radius, &table) {
                (Some(r), Some(t)) => dirac_halfline_bound_tabulated(a.m, e, &circle_spectrum(r, e, a.delta)?, t)?,
                _ => dirac_halfline_bound(a.m, e, &[])?,
            };
            let area = if a.circle_radius.is_some() { Cell::from(b.value * e / (a.m * e).ln().abs()) } else { Cell::Empty };
            Ok::<_, entbound::Error>(vec![Cell::from(b.modes), b.value.into(), b.log_coefficient.into(), area])
        })()
        .map_err(err_text);
        (vec![Cell::from(e)], result)
    })?;
    Ok(Table { keys: vec!["epsilon"], values: vec!["modes", "value", "log_coefficient", "area_coefficient"], rows })
}

// ---------------------------------------------------------------------------
// cft

const FREE_SCALAR: &str = "free-scalar-4d";

enum Spectrum {
    FreeScalar,
    Table(SpectrumTable),
}

impl Spectrum {
    fn load(name: &str) -> Result<Self, CliError> {
        if name == FREE_SCALAR {
            return Ok(Self::FreeScalar);
        }
        let path = Path::new(name);
        let rows = csv_rows(path, 4)?
            .into_iter()
            .map(|r| {
                let mult = r[3];
                if mult.fract() != 0.0 || mult < 1.0 {
                    return Err(CliError::Input {
                        path: path.to_owned(),
                        message: format!("multiplicity {mult} is not a positive integer"),
                    });
                }
                Ok(Operator { delta: r[0], spin_left: r[1], spin_right: r[2], multiplicity: mult as u64 })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::Table(SpectrumTable::new(rows, None).map_err(|e| CliError::Input { path: path.to_owned(), message: e.to_string() })?))
    }

    /// Value and method at `(τ, θ)`; the free scalar uses its product formula.
    fn bound(&self, tau: f64, theta: f64) -> Result<(f64, f64, &'static str), entbound::Error> {
        match self {
            // All free-scalar operators counted here are scalars, so θ drops out.
            Self::FreeScalar => {
                if !(tau > theta.abs()) {
                    return Err(entbound::Error::Precondition(format!("need τ > |θ|, got τ = {tau}, θ = {theta}")));
                }
                Ok((free_scalar_log_character((-tau).exp())?, 0.0, "product"))
            }
            Self::Table(t) => general_bound_3p1(t, tau, theta).map(|b| (b.value, b.tail_estimate, "table")),
        }
    }
}

/// Numeric CSV rows with `width` fields; a non-numeric first line is a header.
fn csv_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input { path: path.to_owned(), message: e.to_string() })?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.len() == width => out.push(v),
            Err(_) if i == 0 => continue,
            _ => {
                return Err(CliError::Input { path: path.to_owned(), message: format!("line {}: expected {width} numeric fields", i + 1) })
            }
        }
    }
    Ok(out)
}

fn chiral_spectrum(path: &Path) -> Result<ChiralSpectrum, CliError> {
    let levels = csv_rows(path, 2)?
        .into_iter()
        .map(|r| {
            if r[0].fract() != 0.0 || r[0] < 0.0 {
                return Err(CliError::Input {
                    path: path.to_owned(), message: format!("L₀ level {} is not a non-negative integer", r[0])
                });
            }
            Ok((r[0] as u64, r[1]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ChiralSpectrum::new(levels).map_err(|e| CliError::Input { path: path.to_owned(), message: e.to_string() })
}

fn chiral_xi(a: &CftArgs) -> Result<Option<Vec<f64>>, CliError> {
    match (&a.xi, a.intervals.as_slice()) {
        (Some(x), []) => Ok(Some(x.values(true)?)),
        (None, [a1, a2, b2, b1]) => Ok(Some(vec![ChiralIntervals::new(*a1, *a2, *b2, *b1)?.xi()])),
        (None, []) => Ok(None),
        _ => Err(CliError::Usage("give either --xi or --intervals a1,a2,b2,b1".into())),
    }
}

fn cft_report(a: &CftArgs) -> Result<Output, CliError> {
    let spectrum = a.spectrum.as_deref().map(Spectrum::load).transpose()?;
    let mut report = Map::new();
    if let Some(path) = &a.diamonds {
        let cfg: DiamondConfig =
            serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Input { path: path.clone(), message: e.to_string() })?;
        let cfg = DiamondConfig::new(cfg.a_plus, cfg.a_minus, cfg.b_plus, cfg.b_minus)?;
        let (u, v) = cross_ratios(&cfg)?;
        let (tau, theta) = tau_theta(u, v)?;
        let mut d = json!({ "u": u, "v": v, "tau": tau, "theta": theta });
        if let Some(s) = &spectrum {
            let (value, tail, method) = s.bound(tau, theta)?;
            d["bound"] = json!({ "value": value, "tail_estimate": tail, "method": method });
        }
        report.insert("diamonds".into(), d);
    }
    if let Some(s) = &spectrum {
        if let Some(r) = &a.ratio {
            let mut rows = Vec::new();
            for ratio in r.values(false)? {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(entbound::Error::Domain { function: "concentric ratio", value: ratio }.into());
                }
                let (value, tail, method) = match s {
                    Spectrum::Table(t) => concentric_bound(t, ratio).map(|b| (b.value, b.tail_estimate, "table"))?,
                    Spectrum::FreeScalar => s.bound(-ratio.ln(), 0.0)?,
                };
                rows.push(json!({ "ratio": ratio, "value": value, "tail_estimate": tail, "method": method }));
            }
            report.insert("concentric".into(), Value::Array(rows));
        }
        if let Some(tau) = a.tau {
            let (value, tail, method) = s.bound(tau, a.theta)?;
            report
                .insert("general".into(), json!({ "tau": tau, "theta": a.theta, "value": value, "tail_estimate": tail, "method": method }));
        }
        if a.ratio.is_none() && a.tau.is_none() && a.diamonds.is_none() {
            if let Spectrum::FreeScalar = s {
                let table = free_scalar_spectrum_4d(a.max_level)?;
                let rows: Vec<Value> = table.rows().iter().map(|r| json!({ "delta": r.delta, "mult": r.multiplicity })).collect();
                report.insert("spectrum".into(), Value::Array(rows));
            }
        }
    }
    if let Some(path) = &a.chiral {
        let cs = chiral_spectrum(path)?;
        let xis = chiral_xi(a)?.ok_or_else(|| CliError::Usage("--chiral needs --xi or --intervals".into()))?;
        let rows = xis
            .iter()
            .map(|&xi| Ok(json!({ "xi": xi, "value": chiral_bound_xi(&cs, xi)?, "far_asymptote": chiral_far_asymptote(&cs, xi) })))
            .collect::<Result<Vec<_>, CliError>>()?;
        report.insert("chiral".into(), Value::Array(rows));
    }
    if report.is_empty() {
        return Err(CliError::Usage("cft needs --spectrum with --ratio/--tau, --diamonds, or --chiral with --xi".into()));
    }
    Output::json(&report)
}

fn cft_sweep(a: &CftArgs) -> Result<Table, CliError> {
    if let Some(path) = &a.chiral {
        let cs = chiral_spectrum(path)?;
        let xis = chiral_xi(a)?.ok_or_else(|| CliError::Usage("chiral sweep needs --xi".into()))?;
        let rows = par_rows(&xis, |&xi| {
            let r = chiral_bound_xi(&cs, xi).map(|v| vec![v.into(), chiral_far_asymptote(&cs, xi).into()]).map_err(err_text);
            (vec![Cell::from(xi)], r)
        })?;
        return Ok(Table { keys: vec!["xi"], values: vec!["value", "far_asymptote"], rows });
    }
    let s = Spectrum::load(a.spectrum.as_deref().ok_or_else(|| CliError::Usage("cft sweep needs --spectrum or --chiral".into()))?)?;
    let ratios = a.ratio.as_ref().ok_or_else(|| CliError::Usage("cft sweep needs --ratio".into()))?.values(false)?;
    let rows = par_rows(&ratios, |&ratio| {
        let r = if ratio > 0.0 && ratio < 1.0 {
            s.bound(-ratio.ln(), 0.0).map(|(v, t, _)| vec![v.into(), t.into()]).map_err(err_text)
        } else {
            Err(format!("ratio {ratio} outside (0, 1)"))
        };
        (vec![Cell::from(ratio)], r)
    })?;
    Ok(Table { keys: vec!["ratio"], values: vec!["value", "tail_estimate"], rows })
}

// ---------------------------------------------------------------------------
// sectors and lower bounds

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',').map(|p| p.trim().parse::<T>().map_err(|_| CliError::Usage(format!("bad {what} entry {p:?}")))).collect()
}

fn sectors(a: &SectorsArgs) -> Result<Output, CliError> {
    let mut report = Map::new();
    if let Some(y) = &a.young {
        let n = a.n.ok_or_else(|| CliError::Usage("--young needs --N".into()))?;
        let diagram: YoungDiagram = y.parse()?;
        let exact = young_dim(&diagram, n)?;
        let sector = young_sector(&diagram, n, a.count)?;
        let delta = charged_delta_bounds(&SectorList::new(vec![sector.clone()])?);
        report.insert(
            "young".into(),
            json!({
                "rows": diagram.rows(),
                "N": n,
                "dim": exact.to_string(),
                "count": a.count,
                "relative_entropy_delta": delta.relative_entropy,
                "modular_delta": delta.modular,
            }),
        );
    }
    if let Some(mm) = &a.minimal_model {
        let v: Vec<u32> = parse_list(mm, "minimal-model")?;
        let [p, m, n] = v[..] else { return Err(CliError::Usage("--minimal-model takes p,m,n".into())) };
        report.insert("minimal_model".into(), json!({ "p": p, "m": m, "n": n, "dim": minimal_model_dim(p, m, n)? }));
    }
    if let Some(p) = a.mu {
        let list = minimal_model_sectors(p)?;
        report.insert("mu_index".into(), json!({ "p": p, "sectors": list.entries(), "mu": mu_index(&list) }));
    }
    if report.is_empty() {
        return Err(CliError::Usage("sectors needs --young with --N, --minimal-model or --mu".into()));
    }
    Output::json(&report)
}

fn lower(global: &GlobalArgs, a: &LowerArgs) -> Result<Output, CliError> {
    let mut report = Map::new();
    if let Some(x) = a.s_of {
        report.insert("gap".into(), json!({ "x": x, "s": gap_s(x)? }));
    }
    if let Some(area) = &a.area {
        let d = area
            .strip_prefix("d=")
            .and_then(|d| d.parse::<u32>().ok())
            .ok_or_else(|| CliError::Usage(format!("--area expects d=<dimension>, got {area:?}")))?;
        let [la, lb] = a.lengths[..] else { return Err(CliError::Usage("--lengths takes |A|,|B|".into())) };
        let cfg = PackingConfig { epsilon: a.eps, dimension: d, boundary: a.boundary, lengths: (la, lb), distillable: a.d2 };
        report.insert("area_law".into(), json!({ "config": cfg, "bound": area_law_lower(&cfg)? }));
    }
    if let Some(path) = &a.state {
        let rho = load_state(path, global)?;
        let ei = mutual_information(&rho)?.value;
        let lb = mutual_info_correlator_bound(&rho, a.trials, global.seed)?;
        report.insert("correlator".into(), json!({ "mutual_information": ei, "lower_bound": lb }));
    }
    if report.is_empty() {
        return Err(CliError::Usage("lower needs --s-of, --area or --state".into()));
    }
    Output::json(&report)
}
