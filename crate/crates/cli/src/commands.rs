//! One function per subcommand. Each resolves its parameters, rejects unknown
//! config keys, computes a [`ResultTable`] and reports the `--assert` check.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use zerocorr::connected::{connected_table, exact_k_evaluator, fit_slope};
use zerocorr::{
    decay_bound, empirical_pair_correlation, finite_correlation_cp1, limit_correlation, moebius_reconstruct,
    pair_correlation_closed, poisson_baseline, scaled_kernel_residual, CorrelationRequest, Method,
    PointConfiguration, Provenance,
};

use crate::error::{CliError, CliResult};
use crate::params::Params;
use crate::points::parse_configurations;
use crate::table::{Cell, ResultTable, Source};

const WICK: Source = Source::Computed(Provenance::Wick);
const MC: Source = Source::Computed(Provenance::MonteCarlo);
const ANALYTIC: Source = Source::Computed(Provenance::Analytic);

/// A computed table and, when `--assert` applies, the first failed check.
pub struct Outcome {
    pub table: ResultTable,
    pub failure: Option<String>,
}

fn nonempty<T>(key: &str, v: Vec<T>) -> CliResult<Vec<T>> {
    if v.is_empty() {
        return Err(CliError::Usage(format!("{key}: empty grid")));
    }
    Ok(v)
}

fn positive(key: &str, v: &[f64]) -> CliResult<()> {
    match v.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        Some(x) => Err(CliError::Usage(format!("{key}: values must be positive and finite, found {x}"))),
        None => Ok(()),
    }
}

fn read_points(path: &PathBuf) -> CliResult<Vec<PointConfiguration>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    parse_configurations(&text)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[s.len() / 2]
}

pub struct PairCurveArgs {
    pub m: Option<usize>,
    pub r: Option<String>,
}

pub fn pair_curve(p: &mut Params, a: PairCurveArgs) -> CliResult<Outcome> {
    const TOL: f64 = 1e-9;
    let m = p.get("m", a.m, 1)?;
    let rs: Vec<f64> = nonempty("r", p.list("r", a.r, "0.3,0.5,1,2,4")?)?;
    p.finish()?;
    positive("r", &rs)?;
    if m == 0 {
        return Err(CliError::Usage("m must be at least 1".into()));
    }
    let mut t = ResultTable::new(&[
        ("r", Source::Input),
        ("t", Source::Derived),
        ("k_closed", ANALYTIC),
        ("k_wick", WICK),
        ("abs_diff", Source::Derived),
    ]);
    let mut worst: f64 = 0.0;
    for &r in &rs {
        let closed = pair_correlation_closed(r * r / 2.0, m)?;
        let req = CorrelationRequest::new(1, PointConfiguration::pair(r, m)?, Method::ExactWick);
        let wick = limit_correlation(&req)?.normalized;
        let diff = (wick - closed).abs();
        worst = worst.max(diff);
        t.push(vec![r.into(), (r * r / 2.0).into(), closed.into(), wick.into(), diff.into()]);
    }
    t.meta("method", "closed+wick");
    let failure = (!(worst <= TOL)).then(|| format!("max abs_diff {worst:.3e} exceeds {TOL:e}"));
    Ok(Outcome { table: t, failure })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrMethod {
    Wick,
    Mc,
    Both,
}

impl std::str::FromStr for CorrMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wick" => Ok(CorrMethod::Wick),
            "mc" => Ok(CorrMethod::Mc),
            "both" => Ok(CorrMethod::Both),
            other => Err(format!("unknown method {other:?} (expected wick, mc or both)")),
        }
    }
}

impl std::fmt::Display for CorrMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CorrMethod::Wick => "wick",
            CorrMethod::Mc => "mc",
            CorrMethod::Both => "both",
        })
    }
}

/// Points as `re,im` coordinates, one point per `;`-separated group.
fn describe(z: &PointConfiguration) -> String {
    z.points()
        .iter()
        .map(|p| p.iter().map(|c| format!("{},{}", c.re, c.im)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

pub struct LimitCorrArgs {
    pub points: Option<PathBuf>,
    pub k: Option<usize>,
    pub method: Option<CorrMethod>,
    pub samples: Option<usize>,
}

pub fn limit_corr(p: &mut Params, a: LimitCorrArgs, seed: u64) -> CliResult<Outcome> {
    const Z_MAX: f64 = 4.0;
    let path = p
        .get_opt("points", a.points.map(|x| x.display().to_string()))?
        .ok_or_else(|| CliError::Usage("limit-corr needs --points".into()))?;
    let k = p.get("k", a.k, 1)?;
    let method = p.get("method", a.method, CorrMethod::Wick)?;
    let samples = p.get("samples", a.samples, 20_000)?;
    p.finish()?;
    let configs = read_points(&PathBuf::from(path))?;
    let mut cols = vec![
        ("config", Source::Input),
        ("points", Source::Input),
        ("n", Source::Input),
        ("m", Source::Input),
        ("k", Source::Input),
    ];
    if method != CorrMethod::Mc {
        cols.push(("k_wick", WICK));
    }
    if method != CorrMethod::Wick {
        cols.push(("k_mc", MC));
        cols.push(("k_mc_std_error", MC));
    }
    if method == CorrMethod::Both {
        cols.push(("z", Source::Derived));
    }
    let mut t = ResultTable::new(&cols);
    let mut worst: f64 = 0.0;
    for (i, z) in configs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![i.into(), Cell::Text(describe(z)), z.n().into(), z.m().into(), k.into()];
        let mut wick = None;
        if method != CorrMethod::Mc {
            let v = limit_correlation(&CorrelationRequest::new(k, z.clone(), Method::ExactWick))?.normalized;
            row.push(v.into());
            wick = Some(v);
        }
        if method != CorrMethod::Wick {
            let req = CorrelationRequest::new(k, z.clone(), Method::MonteCarlo { samples, seed });
            let v = limit_correlation(&req)?;
            let se = v.normalized_std_error().unwrap_or(f64::NAN);
            row.push(v.normalized.into());
            row.push(se.into());
            if let Some(w) = wick {
                let zscore = if se > 0.0 { (v.normalized - w) / se } else if v.normalized == w { 0.0 } else { f64::INFINITY };
                worst = worst.max(zscore.abs());
                row.push(zscore.into());
            }
        }
        t.push(row);
    }
    t.meta("method", method);
    let failure = (method == CorrMethod::Both && !(worst <= Z_MAX))
        .then(|| format!("wick and mc differ by {worst:.2} standard errors (limit {Z_MAX})"));
    Ok(Outcome { table: t, failure })
}

pub struct FiniteNArgs {
    pub r: Option<f64>,
    pub levels: Option<String>,
}

pub fn finite_n(p: &mut Params, a: FiniteNArgs) -> CliResult<Outcome> {
    const SLOPE_MAX: f64 = -0.45;
    let r = p.get("r", a.r, 1.0)?;
    let levels: Vec<u64> = nonempty("levels", p.list("levels", a.levels, "64,256,1024")?)?;
    p.finish()?;
    positive("r", &[r])?;
    if levels.contains(&0) {
        return Err(CliError::Usage("levels must be positive".into()));
    }
    let config = PointConfiguration::pair(r, 1)?;
    let limit = limit_correlation(&CorrelationRequest::new(1, config.clone(), Method::ExactWick))?.normalized;
    let mut t = ResultTable::new(&[("N", Source::Input), ("finite", WICK), ("limit", WICK), ("abs_err", Source::Derived)]);
    for &n in &levels {
        let finite = finite_correlation_cp1(n, &config)?.normalized;
        t.push(vec![n.into(), finite.into(), limit.into(), (finite - limit).abs().into()]);
    }
    let x: Vec<f64> = levels.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = t.floats("abs_err").iter().map(|e| e.ln()).collect();
    let slope = if levels.len() >= 2 { fit_slope(&x, &y) } else { f64::NAN };
    t.meta("method", "wick");
    t.meta("loglog-slope", format!("{slope:.6}"));
    let failure = (!(slope <= SLOPE_MAX)).then(|| format!("log-log slope {slope:.4} exceeds {SLOPE_MAX}"));
    Ok(Outcome { table: t, failure })
}

pub struct ConnectedArgs {
    pub points: Option<PathBuf>,
    pub pairs: Option<String>,
    pub m: Option<usize>,
    pub k: Option<usize>,
}

pub fn connected(p: &mut Params, a: ConnectedArgs) -> CliResult<Outcome> {
    const ROUND_TRIP: f64 = 1e-10;
    let path = p.get_opt("points", a.points.map(|x| x.display().to_string()))?;
    let pairs = p.get_opt("pairs", a.pairs)?;
    let m = p.get("m", a.m, 1)?;
    let k = p.get("k", a.k, 1)?;
    p.finish()?;
    let configs = match (path, pairs) {
        (Some(path), None) => read_points(&PathBuf::from(path))?,
        (None, Some(list)) => {
            let rs: Vec<f64> = nonempty("pairs", crate::params::parse_list("pairs", &list)?)?;
            positive("pairs", &rs)?;
            rs.iter().map(|&r| PointConfiguration::pair(r, m)).collect::<zerocorr::Result<_>>()?
        }
        _ => return Err(CliError::Usage("connected needs exactly one of --points and --pairs".into())),
    };
    let mut t = ResultTable::new(&[
        ("config", Source::Input),
        ("n", Source::Input),
        ("max_distance", Source::Derived),
        ("connected", WICK),
        ("bound", ANALYTIC),
        ("ratio", Source::Derived),
        ("roundtrip", Source::Derived),
    ]);
    let mut worst: f64 = 0.0;
    for (i, z) in configs.iter().enumerate() {
        let table: HashMap<Vec<usize>, f64> = connected_table(z, exact_k_evaluator(z, k))?;
        let full: Vec<usize> = (0..z.n()).collect();
        let tn = table[&full];
        let direct = exact_k_evaluator(z, k)(&full)?;
        let rebuilt = moebius_reconstruct(z, |idx: &[usize]| Ok(table[idx]))?;
        let roundtrip = (rebuilt - direct).abs();
        worst = worst.max(roundtrip);
        let (bound, ratio) = if z.n() >= 2 {
            let d = decay_bound(z)?;
            (d, tn.abs() / d)
        } else {
            (f64::NAN, f64::NAN)
        };
        t.push(vec![i.into(), z.n().into(), z.max_distance().into(), tn.into(), bound.into(), ratio.into(), roundtrip.into()]);
    }
    t.meta("method", "wick");
    let failure = (!(worst <= ROUND_TRIP)).then(|| format!("round trip error {worst:.3e} exceeds {ROUND_TRIP:e}"));
    Ok(Outcome { table: t, failure })
}

pub struct McPairArgs {
    pub level: Option<usize>,
    pub samples: Option<usize>,
    pub u_max: Option<f64>,
    pub u_min: Option<f64>,
    pub bins: Option<usize>,
    pub baseline: bool,
}

pub fn mc_pair(p: &mut Params, a: McPairArgs, seed: u64) -> CliResult<Outcome> {
    const Z_MAX: f64 = 3.0;
    const FRACTION: f64 = 0.95;
    let level = p.get("level", a.level, 200)?;
    let samples = p.get("samples", a.samples, 2000)?;
    let u_max = p.get("u-max", a.u_max, 3.0)?;
    let u_min = p.get("u-min", a.u_min, 0.3)?;
    let bins = p.get("bins", a.bins, 30)?;
    let baseline = p.switch("baseline", a.baseline)?;
    p.finish()?;
    let (hist, curve) = empirical_pair_correlation(level, samples, u_max, bins, seed)?;
    let base = if baseline { Some(poisson_baseline(level, samples, u_max, bins, seed ^ 0x5eed)?.1) } else { None };
    let mut cols = vec![
        ("u", Source::Input),
        ("count", MC),
        ("k_mc", MC),
        ("k_mc_std_error", MC),
        ("k_closed", ANALYTIC),
        ("z", Source::Derived),
        ("tested", Source::Derived),
    ];
    if baseline {
        cols.extend([("baseline", MC), ("baseline_std_error", MC), ("baseline_z", Source::Derived)]);
    }
    let mut t = ResultTable::new(&cols);
    let flat = 1.0 - 1.0 / level as f64;
    let (mut inside, mut tested, mut base_bad) = (0usize, 0usize, 0usize);
    for (b, pt) in curve.points.iter().enumerate() {
        let reference = hist.reference(b)?;
        let se = pt.std_error.unwrap_or(f64::NAN);
        let z = (pt.value - reference) / se;
        let (u0, u1) = hist.bin_edges(b);
        let in_range = u0 >= u_min - 1e-12 && u1 <= u_max + 1e-12 && !pt.flagged;
        if in_range {
            tested += 1;
            if z.abs() <= Z_MAX {
                inside += 1;
            }
        }
        let mut row: Vec<Cell> =
            vec![pt.u.into(), hist.counts[b].into(), pt.value.into(), se.into(), reference.into(), z.into(), in_range.into()];
        if let Some(base) = &base {
            let q = &base.points[b];
            let bse = q.std_error.unwrap_or(f64::NAN);
            let bz = (q.value - flat) / bse;
            if in_range && !(bz.abs() <= Z_MAX) {
                base_bad += 1;
            }
            row.extend([q.value.into(), bse.into(), bz.into()]);
        }
        t.push(row);
    }
    t.meta("method", "mc");
    t.meta("ensemble", "su2");
    if baseline {
        t.meta("baseline-seed", seed ^ 0x5eed);
    }
    t.meta("bins-tested", tested);
    t.meta("bins-within-3se", inside);
    let frac = if tested > 0 { inside as f64 / tested as f64 } else { 0.0 };
    let failure = if tested == 0 {
        Some("no bins inside [u-min, u-max]".to_string())
    } else if frac < FRACTION {
        Some(format!("{inside}/{tested} bins within {Z_MAX} standard errors (need {:.0}%)", FRACTION * 100.0))
    } else if base_bad > 0 {
        Some(format!("{base_bad} baseline bins deviate from 1 - 1/N by more than {Z_MAX} standard errors"))
    } else {
        None
    };
    Ok(Outcome { table: t, failure })
}

pub struct KernelCheckArgs {
    pub m: Option<usize>,
    pub levels: Option<String>,
    pub u: Option<String>,
    pub v: Option<String>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
}

pub fn kernel_check(p: &mut Params, a: KernelCheckArgs) -> CliResult<Outcome> {
    const RATIO: f64 = 2.0;
    const DIAG_TOL: f64 = 1e-12;
    let m = p.get("m", a.m, 1)?;
    let levels: Vec<u64> = nonempty("levels", p.list("levels", a.levels, "16,32,64,128,256,512,1024")?)?;
    let us: Vec<f64> = nonempty("u", p.list("u", a.u, "-2,-1,0,1,2")?)?;
    let vs: Vec<f64> = nonempty("v", p.list("v", a.v, "-2,-1,0,1,2")?)?;
    let theta = p.get("theta", a.theta, 0.0)?;
    let phi = p.get("phi", a.phi, 0.0)?;
    p.finish()?;
    if m == 0 || levels.contains(&0) {
        return Err(CliError::Usage("m and levels must be positive".into()));
    }
    let mut t = ResultTable::new(&[
        ("N", Source::Input),
        ("u", Source::Input),
        ("v", Source::Input),
        ("residual", ANALYTIC),
        ("scaled", Source::Derived),
    ]);
    let (mut worst, mut diag): (f64, f64) = (0.0, 0.0);
    for &u in &us {
        for &v in &vs {
            let uu: Vec<Complex64> = (0..m).map(|q| Complex64::new(if q == 0 { u } else { 0.0 }, 0.0)).collect();
            let vv: Vec<Complex64> = (0..m).map(|q| Complex64::new(if q == 0 { v } else { 0.0 }, 0.0)).collect();
            let mut series = Vec::with_capacity(levels.len());
            for &n in &levels {
                let res = scaled_kernel_residual(n, m, &uu, &vv, theta, phi)?;
                let scaled = res * (n as f64).sqrt();
                series.push(scaled);
                if m == 1 && u == 0.0 && v == 0.0 && theta == phi {
                    diag = diag.max((res - 1.0 / (PI * n as f64)).abs());
                }
                t.push(vec![n.into(), u.into(), v.into(), res.into(), scaled.into()]);
            }
            let med = median(&series);
            let max = series.iter().copied().fold(0.0, f64::max);
            worst = worst.max(if med > 0.0 { max / med } else if max > 0.0 { f64::INFINITY } else { 1.0 });
        }
    }
    t.meta("method", "analytic");
    t.meta("worst-max-over-median", format!("{worst:.6}"));
    t.meta("diagonal-error", format!("{diag:.3e}"));
    let failure = if !(worst <= RATIO) {
        Some(format!("max/median of residual*sqrt(N) is {worst:.3} (limit {RATIO})"))
    } else if !(diag <= DIAG_TOL) {
        Some(format!("diagonal residual differs from 1/(pi N) by {diag:.3e}"))
    } else {
        None
    };
    Ok(Outcome { table: t, failure })
}
