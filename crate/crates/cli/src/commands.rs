use crate::manifest::{object, seed_or_default, to_value, CliError, Output};
pub use crate::manifest::resolve;
use clap::{Args, ValueEnum};
use png_det::airy::{tw1, tw2, FddSpec};
use png_det::circle::{cue_check, cylinder_kernel, CircleWalkParams};
use png_det::lattice::{lpp_table, point_to_line, sample_weight_field, GeomParams, ScalingConstants, WeightField};
use png_det::montecarlo::{
    g_point_vs_tw2, gpl_vs_tw1, run_ensemble, tail_stability, transversal_histogram, two_time_vs_airy, ExperimentConfig,
    Observable,
};
use png_det::toeplitz::{multi_time_gap, scaled_gap, PngKernelParams, SeriesKernel};
use png_det::verify::{self, Mode};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;

type Res = Result<(Value, Output), CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::from(png_det::Error::InvalidParams(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableArg {
    Point,
    Gpl,
    TwoTime,
    Transversal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefArg {
    Tw1,
    Tw2,
    Airy,
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Corner size N [default: 128]
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Geometric parameter q [default: 0.25]
    #[arg(long)]
    pub q: Option<f64>,
    /// Number of replicas [default: 20000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed [default: $PNG_DET_SEED or 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Observable [default: point]
    #[arg(long, value_enum)]
    pub observable: Option<ObservableArg>,
    /// Reference law: tw2 (point), tw1 (gpl), airy (two-time)
    #[arg(long = "ref", value_enum)]
    #[serde(rename = "ref")]
    pub reference: Option<RefArg>,
    /// Two-time: rescaled time of the second point [default: 1]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Two-time: threshold at time 0 [default: 0]
    #[arg(long)]
    pub xi1: Option<f64>,
    /// Two-time: threshold at time τ [default: 0]
    #[arg(long)]
    pub xi2: Option<f64>,
    /// Also write the CDF table (point, gpl) here as CSV
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

pub fn simulate(a: SimulateArgs, workers: usize) -> Res {
    let obs = a.observable.unwrap_or(ObservableArg::Point);
    let default_ref = match obs {
        ObservableArg::Point => Some(RefArg::Tw2),
        ObservableArg::Gpl => Some(RefArg::Tw1),
        ObservableArg::TwoTime => Some(RefArg::Airy),
        ObservableArg::Transversal => None,
    };
    let reference = a.reference.or(default_ref);
    let allowed = match obs {
        ObservableArg::Point | ObservableArg::Gpl => matches!(reference, Some(RefArg::Tw1 | RefArg::Tw2)),
        ObservableArg::TwoTime => reference == Some(RefArg::Airy),
        ObservableArg::Transversal => reference.is_none(),
    };
    if !allowed {
        return Err(bad(format!("reference {reference:?} does not apply to {obs:?}")));
    }
    let observable = match obs {
        ObservableArg::Point => Observable::Point,
        ObservableArg::Gpl => Observable::PointToLine,
        ObservableArg::TwoTime => {
            Observable::TwoTime { tau: a.tau.unwrap_or(1.0), xi1: a.xi1.unwrap_or(0.0), xi2: a.xi2.unwrap_or(0.0) }
        }
        ObservableArg::Transversal => Observable::Transversal,
    };
    let mut cfg = ExperimentConfig::new(
        a.big_n.unwrap_or(128),
        a.q.unwrap_or(0.25),
        a.samples.unwrap_or(20_000),
        seed_or_default(a.seed)?,
        observable,
    );
    cfg.workers = workers;
    let ens = run_ensemble(&cfg)?;
    let resolved = json!({ "experiment": to_value(&cfg)?, "ref": reference, "csv": a.csv });
    let result = match obs {
        ObservableArg::Point | ObservableArg::Gpl => {
            let report = if obs == ObservableArg::Point { g_point_vs_tw2(&ens)? } else { gpl_vs_tw1(&ens)? };
            let natural = if obs == ObservableArg::Point { RefArg::Tw2 } else { RefArg::Tw1 };
            let ks_ref = if reference == Some(natural) { report.ks } else { report.ks_other };
            if let Some(p) = &a.csv {
                std::fs::write(p, report.to_csv()).map_err(|e| CliError::io(p, e))?;
            }
            json!({ "ref": reference, "ks": ks_ref, "report": to_value(&report)? })
        }
        ObservableArg::TwoTime => to_value(&two_time_vs_airy(&ens)?)?,
        ObservableArg::Transversal => to_value(&transversal_histogram(&ens)?)?,
    };
    Ok((resolved, Output::Json(result)))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LppArgs {
    /// Corner size N; the sampled field is (2N−1)×(2N−1) [default: 8]
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Geometric parameter q [default: 0.25]
    #[arg(long)]
    pub q: Option<f64>,
    /// Master seed [default: $PNG_DET_SEED or 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read the weight field from this CSV instead of sampling
    #[arg(long, value_name = "PATH")]
    pub field: Option<PathBuf>,
}

pub fn lpp(a: LppArgs) -> Res {
    let q = a.q.unwrap_or(0.25);
    let seed = seed_or_default(a.seed)?;
    let field = match &a.field {
        Some(p) => WeightField::from_csv(&std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => {
            let n = a.big_n.unwrap_or(8);
            if n == 0 {
                return Err(bad("N must be positive"));
            }
            sample_weight_field(&GeomParams::homogeneous(q)?, 2 * n - 1, 2 * n - 1, seed)?
        }
    };
    let n = match a.big_n {
        Some(n) => n,
        None if a.field.is_some() => (field.width().min(field.height()) + 1) / 2,
        None => 8,
    };
    if n == 0 || field.width() < n || field.height() < n {
        return Err(bad(format!("field {}x{} is too small for N = {n}", field.width(), field.height())));
    }
    let table = lpp_table(&field);
    let g = table.g(n, n);
    let line = point_to_line(&table, n).ok();
    let sc = ScalingConstants::new(q).ok();
    let resolved = json!({ "N": n, "q": q, "seed": seed, "field": a.field });
    let result = json!({
        "G": g,
        "G_rescaled": sc.map(|s| s.rescale(g as f64, n)),
        "G_pl": line,
        "G_pl_rescaled": sc.zip(line).map(|(s, l)| s.rescale(l as f64, n)),
        "field": field.rows(),
    });
    Ok((resolved, Output::Json(result)))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelArgs {
    /// N [default: 16]
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Geometric parameter q = α² [default: 0.25]
    #[arg(long)]
    pub q: Option<f64>,
    /// Time index of the first argument (time 2u) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<i64>,
    /// Time index of the second argument [default: u]
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<i64>,
    /// First x [default: ⌊aN⌋ − 5]
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<i64>,
    /// Last x [default: ⌊aN⌋ + 5]
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<i64>,
    /// First y [default: x-min]
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<i64>,
    /// Last y [default: x-max]
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: Option<i64>,
}

pub fn kernel_eval(a: KernelArgs) -> Res {
    let n = a.big_n.unwrap_or(16);
    let q = a.q.unwrap_or(0.25);
    if !(q > 0.0 && q < 1.0) {
        return Err(bad(format!("q must lie in (0, 1), got {q}")));
    }
    let p = PngKernelParams::new(q.sqrt(), n)?;
    let centre = (p.scaling.a * n as f64).floor() as i64;
    let u = a.u.unwrap_or(0);
    let v = a.v.unwrap_or(u);
    let xs = (a.x_min.unwrap_or(centre - 5), a.x_max.unwrap_or(centre + 5));
    let ys = (a.y_min.unwrap_or(xs.0), a.y_max.unwrap_or(xs.1));
    if (xs.1 - xs.0 + 1) * (ys.1 - ys.0 + 1) > 1_000_000 {
        return Err(bad("kernel window larger than 10^6 entries"));
    }
    let k = SeriesKernel::new(&p, u, v, xs, ys)?;
    let resolved = json!({ "N": n, "q": q, "u": u, "v": v, "x": [xs.0, xs.1], "y": [ys.0, ys.1] });
    Ok((resolved, Output::Csv(k.to_csv())))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FredholmArgs {
    /// N [default: 16]
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Geometric parameter q [default: 0.25]
    #[arg(long)]
    pub q: Option<f64>,
    /// Time indices u_i, comma separated [default: 0]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<i64>>,
    /// Height levels, one per time [default: ⌊aN⌋]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub level: Option<Vec<i64>>,
    /// Sites per block above each level [default: ⌈14 d N^{1/3}⌉ + 20]
    #[arg(long)]
    pub width: Option<usize>,
}

pub fn fredholm(a: FredholmArgs) -> Res {
    let n = a.big_n.unwrap_or(16);
    let q = a.q.unwrap_or(0.25);
    if !(q > 0.0 && q < 1.0) {
        return Err(bad(format!("q must lie in (0, 1), got {q}")));
    }
    let p = PngKernelParams::new(q.sqrt(), n)?;
    let us = a.u.unwrap_or_else(|| vec![0]);
    let centre = (p.scaling.a * n as f64).floor() as i64;
    let levels = a.level.unwrap_or_else(|| vec![centre; us.len()]);
    if levels.len() != us.len() || us.is_empty() {
        return Err(bad("need one level per time"));
    }
    let width = a.width.unwrap_or((14.0 * p.scaling.d * (n as f64).cbrt()).ceil() as usize + 20);
    let sites: Vec<(i64, i64)> = us.iter().copied().zip(levels.iter().copied()).collect();
    let prob = multi_time_gap(&p, &sites, width)?;
    let resolved = json!({ "N": n, "q": q, "u": us, "level": levels, "width": width });
    Ok((resolved, Output::Json(json!({ "prob": prob }))))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwArgs {
    /// [default: -5]
    #[arg(long, allow_hyphen_values = true)]
    pub xi_min: Option<f64>,
    /// [default: 2]
    #[arg(long, allow_hyphen_values = true)]
    pub xi_max: Option<f64>,
    /// [default: 0.1]
    #[arg(long)]
    pub step: Option<f64>,
}

pub fn tw_dist(a: TwArgs) -> Res {
    let (lo, hi, step) = (a.xi_min.unwrap_or(-5.0), a.xi_max.unwrap_or(2.0), a.step.unwrap_or(0.1));
    if !(step > 0.0) || !(hi >= lo) || ((hi - lo) / step) > 1e6 {
        return Err(bad("need xi-min ≤ xi-max and a positive step (≤ 10^6 rows)"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let mut s = String::from("xi,F1,F2\n");
    for i in 0..count {
        let xi = lo + i as f64 * step;
        s += &format!("{xi},{},{}\n", tw1(xi)?, tw2(xi)?);
    }
    Ok((json!({ "xi_min": lo, "xi_max": hi, "step": step }), Output::Csv(s)))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FddArgs {
    /// Times, comma separated [default: 0]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub taus: Option<Vec<f64>>,
    /// Thresholds, one per time [default: 0]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xis: Option<Vec<f64>>,
    /// Gauss–Legendre nodes per slice [default: 48]
    #[arg(long)]
    pub mq: Option<usize>,
    /// Truncation length per slice [default: 12]
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Recompute at doubled nodes and fail on a change above 1e−6
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub check_stability: Option<bool>,
}

pub fn airy_fdd(a: FddArgs) -> Res {
    let defaults = FddSpec::default();
    let spec = FddSpec {
        mq: a.mq.unwrap_or(defaults.mq),
        l: a.l.unwrap_or(defaults.l),
        check_stability: a.check_stability.unwrap_or(false),
    };
    let taus = a.taus.unwrap_or_else(|| vec![0.0]);
    let xis = a.xis.unwrap_or_else(|| vec![0.0; taus.len()]);
    let r = png_det::airy::airy_fdd(&taus, &xis, &spec)?;
    let resolved = json!({ "taus": taus, "xis": xis, "mq": spec.mq, "L": spec.l, "check_stability": spec.check_stability });
    Ok((resolved, Output::Json(to_value(&r)?)))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleArgs {
    /// Sites on the circle [default: 5]
    #[arg(long)]
    pub n_sites: Option<usize>,
    /// Walkers, odd [default: 3]
    #[arg(long)]
    pub n: Option<usize>,
    /// Step probability [default: 0.3]
    #[arg(long)]
    pub p_step: Option<f64>,
    /// Half time span M [default: 2]
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<usize>,
    /// Times to tabulate, comma separated [default: 0]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Option<Vec<i64>>,
}

pub fn circle_walk(a: CircleArgs) -> Res {
    let params = CircleWalkParams::new(a.n_sites.unwrap_or(5), a.n.unwrap_or(3), a.p_step.unwrap_or(0.3), a.m.unwrap_or(2))?;
    let times = a.times.unwrap_or_else(|| vec![0]);
    let n = params.n_sites as i64;
    let mut s = String::from("kind,r,x,s,y,re,im\n");
    for &r in &times {
        for &t in &times {
            for x in 0..n {
                for y in 0..n {
                    let k = cylinder_kernel(&params, r, x, t, y);
                    s += &format!("kernel,{r},{x},{t},{y},{},{}\n", k.re, k.im);
                }
            }
        }
    }
    let cue = cue_check(&params)?;
    s += &format!("cue_residual,,,,,{},\n", cue.residual);
    s += &format!("cue_total,,,,,{},\n", cue.total);
    let resolved = json!({
        "n_sites": params.n_sites, "n": params.n, "p_step": params.p_step, "M": params.m, "times": times,
    });
    Ok((resolved, Output::Csv(s)))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransversalArgs {
    /// Corner size N [default: 64]
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Second N for the tail-stability comparison
    #[arg(long = "compare-N")]
    #[serde(rename = "compare_N")]
    pub compare_n: Option<usize>,
    /// Geometric parameter q [default: 0.25]
    #[arg(long)]
    pub q: Option<f64>,
    /// [default: 20000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Master seed [default: $PNG_DET_SEED or 7]
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn transversal(a: TransversalArgs, workers: usize) -> Res {
    let q = a.q.unwrap_or(0.25);
    let samples = a.samples.unwrap_or(20_000);
    let seed = seed_or_default(a.seed)?;
    let n = a.big_n.unwrap_or(64);
    let report = |n: usize| -> Result<_, CliError> {
        let mut cfg = ExperimentConfig::new(n, q, samples, seed, Observable::Transversal);
        cfg.workers = workers;
        Ok(transversal_histogram(&run_ensemble(&cfg)?)?)
    };
    let first = report(n)?;
    let mut result = vec![("report", to_value(&first)?)];
    if let Some(m) = a.compare_n {
        let second = report(m)?;
        let cmp = tail_stability(&first, &second);
        result.push(("within_3_sigma", json!(cmp.within(3.0))));
        result.push(("comparison", to_value(&cmp)?));
        result.push(("other", to_value(&second)?));
    }
    let resolved = json!({ "N": n, "compare_N": a.compare_n, "q": q, "samples": samples, "seed": seed });
    Ok((resolved, Output::Json(object(result))))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceArgs {
    /// Values of N, comma separated [default: 25,100,400]
    #[arg(long = "Ns", value_delimiter = ',')]
    #[serde(rename = "Ns")]
    pub ns: Option<Vec<usize>>,
    /// Geometric parameter q [default: 0.25]
    #[arg(long)]
    pub q: Option<f64>,
    /// Rescaled time [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Rescaled level [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Window height in scale units [default: 14]
    #[arg(long)]
    pub sd: Option<f64>,
}

pub fn convergence(a: ConvergenceArgs) -> Res {
    let ns = a.ns.unwrap_or_else(|| vec![25, 100, 400]);
    let q = a.q.unwrap_or(0.25);
    let (tau, xi, sd) = (a.tau.unwrap_or(0.0), a.xi.unwrap_or(0.0), a.sd.unwrap_or(14.0));
    if !(q > 0.0 && q < 1.0) {
        return Err(bad(format!("q must lie in (0, 1), got {q}")));
    }
    // The limit is stationary in τ.
    let limit = tw2(xi)?;
    let mut by_n = serde_json::Map::new();
    for &n in &ns {
        let g = scaled_gap(&PngKernelParams::new(q.sqrt(), n)?, tau, xi, sd)?;
        by_n.insert(n.to_string(), json!({ "gap": to_value(&g)?, "F2": limit, "error": (g.prob - limit).abs() }));
    }
    let resolved = json!({ "Ns": ns, "q": q, "tau": tau, "xi": xi, "sd": sd });
    Ok((resolved, Output::Json(Value::Object(by_n))))
}

#[derive(Args, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Smaller instance counts and sample budgets
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub quick: Option<bool>,
    /// Include the Monte Carlo criteria (minutes at full size)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub all: Option<bool>,
    /// Run only these criteria, comma separated
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u32>>,
}

pub fn verify(a: VerifyArgs) -> Result<(Value, Output, bool), CliError> {
    let quick = a.quick.unwrap_or(false);
    let all = a.all.unwrap_or(false);
    let ids: Vec<u32> = match &a.only {
        Some(ids) => ids.clone(),
        None if all => (1..=12).collect(),
        None => verify::DETERMINISTIC.to_vec(),
    };
    if let Some(bad_id) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
        return Err(bad(format!("no criterion {bad_id}")));
    }
    let mode = if quick { Mode::Quick } else { Mode::Full };
    let outcomes: Vec<_> = ids.iter().map(|&id| verify::run(id, mode)).collect();
    let ok = outcomes.iter().all(|o| !o.unexpected());
    let mut lines: Vec<String> = outcomes.iter().map(|o| o.line()).collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    lines.push(format!("{passed} of {} checks passed", outcomes.len()));
    let known: Vec<u32> = outcomes.iter().filter(|o| !o.passed && !o.unexpected()).map(|o| o.id).collect();
    if !known.is_empty() {
        lines.push(format!("known failures (documented, not fatal): {known:?}"));
    }
    let resolved = json!({ "quick": quick, "all": all, "only": ids });
    Ok((resolved, Output::Lines(lines, to_value(&outcomes)?), ok))
}
