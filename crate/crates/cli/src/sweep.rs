//! Evaluation of a [`SweepSpec`] into a table and its CSV form.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use ssbc_core::analytic::*;
use ssbc_core::montecarlo::*;
use ssbc_core::specfun::{build_e1_expsum, default_expsum, DEFAULT_TERM_COUNT};
use ssbc_core::{E1ExpSum, Estimate, McConfig, ModulationSpec, SystemParams};

use crate::specfile::{Metric, MetricArgs, Mode, ResolvedSeries, SpecError, SweepSpec, SweepVar};

/// One grid point of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub series: String,
    pub x: f64,
    pub exact: Option<f64>,
    pub approx: Option<f64>,
    pub asymptotic: Option<f64>,
    pub montecarlo: Option<Estimate>,
}

impl Row {
    pub fn value(&self, mode: Mode) -> Option<f64> {
        match mode {
            Mode::Exact => self.exact,
            Mode::Approx => self.approx,
            Mode::Asymptotic => self.asymptotic,
            Mode::MonteCarlo => self.montecarlo.map(|e| e.mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub metric: Metric,
    pub sweep: SweepVar,
    pub modes: Vec<Mode>,
    pub rows: Vec<Row>,
}

impl SweepTable {
    /// CSV with a `series` column, the sweep value, one column per requested
    /// mode in canonical order and `montecarlo_se` after `montecarlo`.
    /// Numbers carry 17 significant digits; lines end in `\n`.
    pub fn to_csv(&self) -> String {
        let modes: Vec<Mode> = Mode::ALL.iter().copied().filter(|m| self.modes.contains(m)).collect();
        let mut out = format!("series,{}", self.sweep);
        for m in &modes {
            let _ = write!(out, ",{m}");
            if *m == Mode::MonteCarlo {
                out.push_str(",montecarlo_se");
            }
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{:.16e}", row.series, row.x);
            for m in &modes {
                let v = row.value(*m).expect("requested modes are filled");
                let _ = write!(out, ",{v:.16e}");
                if *m == Mode::MonteCarlo {
                    let _ = write!(out, ",{:.16e}", row.montecarlo.unwrap().std_error);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// A numerical failure at a specific grid point.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct EvalError {
    pub series: String,
    pub sweep: SweepVar,
    pub x: f64,
    pub operation: String,
    pub source: ssbc_core::Error,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "series `{}`, {} = {}: {} failed: {}",
            self.series, self.sweep, self.x, self.operation, self.source
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evaluates every requested mode at every grid point of every series.
pub fn evaluate(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    evaluate_with(spec, |p| *p)
}

/// As [`evaluate`], but the analytic modes see `analytic_params(p)` instead
/// of `p`. Monte Carlo always sees `p`.
pub fn evaluate_with<F>(spec: &SweepSpec, analytic_params: F) -> Result<SweepTable, SweepError>
where
    F: Fn(&SystemParams) -> SystemParams + Sync,
{
    let series = spec.resolve()?;
    let built;
    let sum: &E1ExpSum = if spec.expsum_terms == DEFAULT_TERM_COUNT {
        default_expsum()
    } else {
        built = build_e1_expsum(spec.expsum_terms).map_err(|e| SpecError {
            line: None,
            field: Some("expsum_terms".into()),
            message: e.to_string(),
        })?;
        &built
    };
    let grid = spec.grid.values();
    let cfg = spec.mc.config();
    let want = |m: Mode| spec.modes.contains(&m);

    // the CDF over a gamma grid is one Monte Carlo pass per series
    let batched_mc: Vec<Option<Vec<Estimate>>> = if spec.metric == Metric::Cdf
        && spec.sweep == SweepVar::Gamma
        && want(Mode::MonteCarlo)
    {
        series
            .iter()
            .map(|s| {
                mc_cdf(&s.params, &grid, &cfg).map(Some).map_err(|e| EvalError {
                    series: s.label.clone(),
                    sweep: spec.sweep,
                    x: grid[0],
                    operation: "Monte Carlo CDF".into(),
                    source: e,
                })
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![None; series.len()]
    };

    let jobs: Vec<(usize, usize)> = (0..series.len())
        .flat_map(|s| (0..grid.len()).map(move |i| (s, i)))
        .collect();
    let rows: Vec<Result<Row, EvalError>> = jobs
        .par_iter()
        .map(|&(si, gi)| {
            let s = &series[si];
            let x = grid[gi];
            let batched = batched_mc[si].as_ref().map(|v| v[gi]);
            evaluate_point(spec, s, x, sum, &cfg, batched, &analytic_params)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(SweepTable {
        metric: spec.metric,
        sweep: spec.sweep,
        modes: spec.modes.clone(),
        rows,
    })
}

fn evaluate_point<F>(
    spec: &SweepSpec,
    series: &ResolvedSeries,
    x: f64,
    sum: &E1ExpSum,
    cfg: &McConfig,
    batched_mc: Option<Estimate>,
    analytic_params: &F,
) -> Result<Row, EvalError>
where
    F: Fn(&SystemParams) -> SystemParams,
{
    let fail = |operation: &str, source: ssbc_core::Error| EvalError {
        series: series.label.clone(),
        sweep: spec.sweep,
        x,
        operation: operation.into(),
        source,
    };
    let (params, args) = series
        .at(spec.sweep, x)
        .map_err(|m| fail("parameter update", ssbc_core::Error::InvalidParameter { field: "sweep", detail: m }))?;
    let ap = analytic_params(&params);
    let want = |m: Mode| spec.modes.contains(&m);
    let mut row = Row {
        series: series.label.clone(),
        x,
        exact: None,
        approx: None,
        asymptotic: None,
        montecarlo: None,
    };
    let name = spec.metric.as_str();
    let run = |mode: Mode, f: &dyn Fn() -> ssbc_core::Result<f64>| -> Result<Option<f64>, EvalError> {
        if !want(mode) {
            return Ok(None);
        }
        f().map(Some).map_err(|e| fail(&format!("{name} ({mode})"), e))
    };
    let mc = |f: &dyn Fn() -> ssbc_core::Result<Estimate>| -> Result<Option<Estimate>, EvalError> {
        if !want(Mode::MonteCarlo) {
            return Ok(None);
        }
        f().map(Some).map_err(|e| fail(&format!("{name} (montecarlo)"), e))
    };
    let MetricArgs {
        rate,
        epsilon,
        a,
        modulation,
        order,
        s,
        gamma,
    } = args;

    match spec.metric {
        Metric::Cdf => {
            row.exact = run(Mode::Exact, &|| snr_cdf_exact(&ap, gamma))?;
            row.approx = run(Mode::Approx, &|| snr_cdf_approx(&ap, gamma, sum))?;
            row.montecarlo = match batched_mc {
                Some(e) => Some(e),
                None => mc(&|| Ok(mc_cdf(&params, &[gamma], cfg)?[0]))?,
            };
        }
        Metric::OutageProb => {
            let threshold = rate.exp2() - 1.0;
            row.exact = run(Mode::Exact, &|| outage_probability(&ap, rate))?;
            row.approx = run(Mode::Approx, &|| snr_cdf_approx(&ap, threshold, sum))?;
            row.montecarlo = mc(&|| Ok(mc_cdf(&params, &[threshold], cfg)?[0]))?;
        }
        Metric::OutageCapacity => {
            row.exact = run(Mode::Exact, &|| outage_capacity(&ap, epsilon))?;
            row.montecarlo = mc(&|| mc_outage_capacity(&params, epsilon, cfg))?;
        }
        Metric::Ergodic => {
            row.exact = run(Mode::Exact, &|| ergodic_capacity_quadrature(&ap))?;
            row.approx = run(Mode::Approx, &|| ergodic_capacity_approx(&ap, sum))?;
            row.asymptotic = run(Mode::Asymptotic, &|| Ok(ergodic_capacity_asymptotic(&ap)))?;
            row.montecarlo = mc(&|| Ok(mc_ergodic_capacity(&params, cfg)))?;
        }
        Metric::Effective => {
            row.exact = run(Mode::Exact, &|| effective_capacity_quadrature(&ap, a))?;
            row.approx = run(Mode::Approx, &|| effective_capacity_approx(&ap, a, sum))?;
            row.asymptotic = run(Mode::Asymptotic, &|| effective_capacity_asymptotic(&ap, a))?;
            row.montecarlo = mc(&|| mc_effective_capacity(&params, a, cfg))?;
        }
        Metric::Ber => {
            let m = ModulationSpec::Binary(modulation.expect("resolved for ber"));
            row.approx = run(Mode::Approx, &|| average_ber_approx(&ap, m, sum))?;
            row.asymptotic = run(Mode::Asymptotic, &|| average_ber_asymptotic(&ap, m))?;
            row.montecarlo = mc(&|| mc_average_ber(&params, m, cfg))?;
        }
        Metric::Ser => {
            row.approx = run(Mode::Approx, &|| mpsk_ser(&ap, order, sum))?;
            row.montecarlo = mc(&|| mc_mpsk_ser(&params, order, cfg))?;
        }
        Metric::Mgf => {
            row.approx = run(Mode::Approx, &|| snr_mgf_approx(&ap, s, sum))?;
            row.montecarlo = mc(&|| Ok(mc_mgf(&params, &[s], cfg)[0]))?;
        }
    }
    Ok(row)
}
