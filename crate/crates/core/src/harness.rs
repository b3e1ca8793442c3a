//! Exponent algebra for the three rate regimes, δ sweeps against synthesized
//! sources, and log–log slope fitting.

use crate::error::{LabError, Result};
use crate::regulariser::{self, RegulariserSpec};
use crate::solver::{self, SolveOptions};
use crate::source::{self, OperatorKind};
use rayon::prelude::*;
use serde::Serialize;

/// Which convergence-rate regime a sweep instantiates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// 0 < ν ≤ 1/2, plain convexity.
    Basic,
    /// 0 < ν ≤ 1/2 with a p-convex regulariser.
    PConvex { p: f64 },
    /// 1/2 ≤ ν ≤ 1 with a q-coconvex regulariser (dual certificates).
    QCoconvex { q: f64 },
}

/// Error measures recorded per sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMeasure {
    /// D_{ξ†}(u_α^δ, u†).
    Bregman,
    /// ⟨ξ_α^δ − ξ†, u_α^δ − u†⟩ with ξ_α^δ the solver's dual certificate.
    SymBregman,
    /// ‖u_α^δ − u†‖.
    Norm,
    /// ‖Fu_α^δ − v^δ‖.
    Residual,
}

/// Parameter choice rule α ∼ δ^θ and the predicted decay error ≲ δ^r in the
/// regime's natural measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    pub theta_alpha: f64,
    pub rate: f64,
    pub measure: ErrorMeasure,
}

/// The regime's (θ, r) with its admissibility checks. All three regimes
/// satisfy θ + r = 2 identically.
pub fn theoretical_exponents(regime: &Regime, nu: f64) -> Result<ExponentPair> {
    if !nu.is_finite() {
        return Err(LabError::InadmissibleNu(format!("nu = {nu}")));
    }
    match *regime {
        Regime::Basic => {
            if !(nu > 0.0 && nu <= 0.5) {
                return Err(LabError::InadmissibleNu(format!(
                    "Basic regime needs nu in (0, 1/2], got {nu}"
                )));
            }
            Ok(ExponentPair {
                theta_alpha: 2.0 - 2.0 * nu,
                rate: 2.0 * nu,
                measure: ErrorMeasure::Bregman,
            })
        }
        Regime::PConvex { p } => {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(LabError::InadmissibleNu(format!(
                    "PConvex regime needs p >= 1, got {p}"
                )));
            }
            if !(nu > 0.0 && nu <= 0.5) {
                return Err(LabError::InadmissibleNu(format!(
                    "PConvex regime needs nu in (0, 1/2], got {nu}"
                )));
            }
            let den = p - 1.0 + 2.0 * nu;
            Ok(ExponentPair {
                theta_alpha: (2.0 * p - 2.0 - 2.0 * p * nu + 4.0 * nu) / den,
                rate: 2.0 * nu * p / den,
                measure: ErrorMeasure::Bregman,
            })
        }
        Regime::QCoconvex { q } => {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(LabError::InadmissibleNu(format!(
                    "QCoconvex regime needs q >= 1, got {q}"
                )));
            }
            if !(0.5..=1.0).contains(&nu) {
                return Err(LabError::InadmissibleNu(format!(
                    "QCoconvex regime needs nu in [1/2, 1], got {nu}"
                )));
            }
            let den = 1.0 + 2.0 * nu * q - 2.0 * nu;
            let theta = (2.0 + 2.0 * nu * q - 4.0 * nu) / den;
            if theta <= 0.0 {
                // q = 1, ν = 1 gives θ = 0: no parameter choice rule.
                return Err(LabError::InadmissibleNu(format!(
                    "QCoconvex q = {q}, nu = {nu} degenerates to theta = 0"
                )));
            }
            Ok(ExponentPair {
                theta_alpha: theta,
                rate: 2.0 * nu * q / den,
                measure: ErrorMeasure::SymBregman,
            })
        }
    }
}

/// Norm-error rate implied by a (sym-)Bregman rate for a p-convex regulariser:
/// rate / p_convex.
pub fn norm_rate_from(pair: &ExponentPair, p_convex: f64) -> f64 {
    debug_assert!(p_convex >= 1.0);
    pair.rate / p_convex
}

/// How ω† is chosen for the synthesized source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaChoice {
    /// Deterministic alternating-sign k^{−1/2} unit vector.
    Default,
    /// Seeded random unit vector.
    Random { seed: u64 },
}

/// Log-spaced noise grid from `max` down to `min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaGrid {
    pub count: usize,
    pub max: f64,
    pub min: f64,
}

impl Default for DeltaGrid {
    fn default() -> Self {
        Self {
            count: 10,
            max: 1e-2,
            min: 1e-5,
        }
    }
}

impl DeltaGrid {
    /// The strictly decreasing grid values.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                self.max * (self.min / self.max).powf(t)
            })
            .collect()
    }
}

/// A full sweep description. `fit_window` is half-open `[start, end)` in grid
/// indices; the default drops the first and last grid point.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub operator: OperatorKind,
    pub spec: RegulariserSpec,
    pub nu: f64,
    pub regime: Regime,
    pub grid: DeltaGrid,
    /// c in the rule α = c·δ^θ.
    pub alpha_const: f64,
    /// Master noise seed; point i uses seed ⊕ i.
    pub seed: u64,
    pub omega: OmegaChoice,
    pub fit_window: (usize, usize),
    /// Measures recorded at every point.
    pub measures: Vec<ErrorMeasure>,
    /// Measures whose fitted slope is checked against theory; empty means the
    /// regime's own measure.
    pub checked_measures: Vec<ErrorMeasure>,
    pub solve_options: SolveOptions,
    /// Slope tolerance for verdicts.
    pub slope_tolerance: f64,
    /// Two-sided check (|slope − theory| ≤ tol) instead of slope ≥ theory − tol.
    pub two_sided: bool,
}

impl ExperimentConfig {
    /// A config with the standard defaults for the given instance.
    pub fn new(operator: OperatorKind, spec: RegulariserSpec, nu: f64, regime: Regime) -> Self {
        let grid = DeltaGrid::default();
        Self {
            operator,
            spec,
            nu,
            regime,
            grid,
            alpha_const: 1.0,
            seed: 424242,
            omega: OmegaChoice::Default,
            fit_window: (1, grid.count - 1),
            measures: vec![
                ErrorMeasure::Bregman,
                ErrorMeasure::SymBregman,
                ErrorMeasure::Norm,
                ErrorMeasure::Residual,
            ],
            checked_measures: Vec::new(),
            solve_options: SolveOptions::default(),
            slope_tolerance: 0.15,
            two_sided: false,
        }
    }

    /// Checks all config invariants (grid shape, window, admissible ν, spec
    /// and solver options).
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidConfig(msg));
        if self.grid.count < 4 {
            return bad(format!("delta grid needs >= 4 points, got {}", self.grid.count));
        }
        if !(self.grid.min > 0.0 && self.grid.max > self.grid.min && self.grid.max.is_finite()) {
            return bad(format!(
                "delta grid needs max > min > 0, got max = {}, min = {}",
                self.grid.max, self.grid.min
            ));
        }
        if !(self.alpha_const > 0.0 && self.alpha_const.is_finite()) {
            return bad(format!("alpha_const must be > 0, got {}", self.alpha_const));
        }
        let (start, end) = self.fit_window;
        if start >= end || end > self.grid.count {
            return bad(format!(
                "fit window [{start}, {end}) out of range for {} grid points",
                self.grid.count
            ));
        }
        if end - start < 3 {
            return bad(format!("fit window [{start}, {end}) needs >= 3 points"));
        }
        if self.measures.is_empty() {
            return bad("at least one error measure must be recorded".into());
        }
        for m in &self.checked_measures {
            if !self.measures.contains(m) {
                return bad(format!("checked measure {m:?} is not recorded"));
            }
        }
        if !(self.slope_tolerance > 0.0 && self.slope_tolerance.is_finite()) {
            return bad(format!(
                "slope_tolerance must be > 0, got {}",
                self.slope_tolerance
            ));
        }
        self.spec.validate()?;
        self.solve_options.validate()?;
        theoretical_exponents(&self.regime, self.nu)?;
        Ok(())
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct RatePoint {
    pub delta: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub converged: bool,
    pub bregman: Option<f64>,
    pub sym_bregman: Option<f64>,
    pub norm_err: Option<f64>,
    pub residual: Option<f64>,
    /// T_α(u_α^δ, v^δ) at the returned iterate.
    pub objective: f64,
    /// R(u_α^δ).
    pub reg_value: f64,
}

/// Ordinary least squares on (log δ, log error).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// A fitted measure within a report.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureFit {
    pub measure: ErrorMeasure,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Window points that survived the exclusion rules.
    pub points_used: usize,
}

/// Pass/fail of one checked measure against its theoretical target.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub measure: ErrorMeasure,
    pub slope: Option<f64>,
    pub target: f64,
    pub deviation: Option<f64>,
    pub two_sided: bool,
    pub tolerance: f64,
    pub pass: bool,
}

/// Everything a sweep produces.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub nu: f64,
    pub theory: ExponentPair,
    /// Norm-rate target when the regulariser's p-convexity exponent is known.
    pub norm_target: Option<f64>,
    pub points: Vec<RatePoint>,
    pub fitted: Vec<MeasureFit>,
    pub verdicts: Vec<Verdict>,
    /// R(u†), for the value-bound checks.
    pub reg_value_truth: f64,
    pub notes: Vec<String>,
}

impl RateReport {
    /// True when every checked measure produced a passing verdict.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Least-squares slope of log(error) against log(δ) over `window` (half-open
/// index range into `points`).
pub fn fit_slope(points: &[(f64, f64)], window: (usize, usize)) -> Result<FitResult> {
    let (start, end) = window;
    if start >= end || end > points.len() || end - start < 3 {
        return Err(LabError::InvalidConfig(format!(
            "fit window [{start}, {end}) invalid for {} points",
            points.len()
        )));
    }
    let sel = &points[start..end];
    for &(_, e) in sel {
        if !(e > 0.0) {
            return Err(LabError::NonPositiveError(e));
        }
    }
    let n = sel.len() as f64;
    let xs: Vec<f64> = sel.iter().map(|&(d, _)| d.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|&(_, e)| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot <= 1e-30 {
        if ss_res <= 1e-30 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

fn point_value(p: &RatePoint, m: ErrorMeasure) -> Option<f64> {
    match m {
        ErrorMeasure::Bregman => p.bregman,
        ErrorMeasure::SymBregman => p.sym_bregman,
        ErrorMeasure::Norm => p.norm_err,
        ErrorMeasure::Residual => p.residual,
    }
}

/// Runs the full sweep: synthesize the source, solve every grid point
/// (independently, in parallel, with per-point derived seeds so parallel and
/// serial runs are bit-identical), record the requested measures, fit slopes
/// on the window and compare against theory.
pub fn run_sweep(config: &ExperimentConfig) -> Result<RateReport> {
    config.validate()?;
    let op = source::preset_operator(&config.operator)?;
    let pair = theoretical_exponents(&config.regime, config.nu)?;
    let omega = match config.omega {
        OmegaChoice::Default => source::default_omega(op.ncols()),
        OmegaChoice::Random { seed } => source::random_omega(op.ncols(), seed),
    };
    let inst = source::synthesize(&op, &config.spec, config.nu, omega)?;
    let reg_value_truth = config.spec.value(&inst.u_dagger);

    let deltas = config.grid.values();
    let want = |m: ErrorMeasure| config.measures.contains(&m);
    let quadratic = config.spec == RegulariserSpec::Quadratic;

    let points: Vec<RatePoint> = deltas
        .par_iter()
        .enumerate()
        .map(|(i, &delta)| -> Result<RatePoint> {
            let noisy = source::add_noise(&inst.v_dagger, delta, config.seed ^ i as u64)?;
            let alpha = config.alpha_const * delta.powf(pair.theta_alpha);
            let (u, xi, iterations, converged, objective) = if quadratic {
                // Closed form; certificate computed directly.
                let u = solver::direct_quadratic_solve(&op, &noisy.v_delta, alpha)?;
                let (_, xi) = solver::dual_certificate(&op, &noisy.v_delta, alpha, &u)?;
                let obj = solver::objective(&op, &noisy.v_delta, alpha, &config.spec, &u)?;
                (u, xi, 0, true, obj)
            } else {
                let r = solver::solve(&op, &noisy.v_delta, alpha, &config.spec, &config.solve_options)?;
                (r.u, r.xi, r.iterations, r.converged, r.objective)
            };

            let diff = &u - &inst.u_dagger;
            let res = op.apply(&u)? - &noisy.v_delta;
            let bregman = want(ErrorMeasure::Bregman)
                .then(|| config.spec.bregman(&u, &inst.u_dagger, &inst.xi_dagger))
                .transpose()?;
            let sym_bregman = want(ErrorMeasure::SymBregman)
                .then(|| regulariser::sym_bregman(&inst.xi_dagger, &xi, &inst.u_dagger, &u))
                .transpose()?;
            let norm_err = want(ErrorMeasure::Norm).then(|| diff.dot(&diff).sqrt());
            let residual = want(ErrorMeasure::Residual).then(|| res.dot(&res).sqrt());
            let reg_value = config.spec.value(&u);
            Ok(RatePoint {
                delta,
                alpha,
                iterations,
                converged,
                bregman,
                sym_bregman,
                norm_err,
                residual,
                objective,
                reg_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut notes = Vec::new();
    if let Regime::PConvex { .. } = config.regime {
        notes.push(
            "alpha exponent uses denominator (p - 1 + 2nu): balancing delta^2/alpha \
             against the alpha power forces it; printed forms of this rate sometimes \
             carry the non-balancing (p - 1 + nu)"
                .to_string(),
        );
    }
    for (i, p) in points.iter().enumerate() {
        if !p.converged {
            notes.push(format!(
                "point {i} (delta = {:.3e}) hit the iteration limit and is excluded from fits",
                p.delta
            ));
        }
    }

    let profile = config.spec.convexity_profile();
    let norm_target = profile.p_convex.map(|p| norm_rate_from(&pair, p));

    let mut fitted = Vec::new();
    for &m in &config.measures {
        let series: Vec<(f64, f64)> = points[config.fit_window.0..config.fit_window.1]
            .iter()
            .filter(|p| p.converged)
            .filter_map(|p| point_value(p, m).map(|e| (p.delta, e)))
            .filter(|&(_, e)| e > 0.0 && e.is_finite())
            .collect();
        if series.len() < 3 {
            notes.push(format!(
                "measure {m:?}: only {} usable window points, no fit",
                series.len()
            ));
            continue;
        }
        let fit = fit_slope(&series, (0, series.len()))?;
        fitted.push(MeasureFit {
            measure: m,
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            points_used: series.len(),
        });
    }

    let checked: Vec<ErrorMeasure> = if config.checked_measures.is_empty() {
        vec![pair.measure]
    } else {
        config.checked_measures.clone()
    };
    let mut verdicts = Vec::new();
    for m in checked {
        let target = if m == ErrorMeasure::Norm {
            match norm_target {
                Some(t) => t,
                None => {
                    notes.push(
                        "norm measure checked but the regulariser has no p-convexity \
                         exponent; verdict fails"
                            .to_string(),
                    );
                    verdicts.push(Verdict {
                        measure: m,
                        slope: None,
                        target: f64::NAN,
                        deviation: None,
                        two_sided: config.two_sided,
                        tolerance: config.slope_tolerance,
                        pass: false,
                    });
                    continue;
                }
            }
        } else {
            pair.rate
        };
        let fit = fitted.iter().find(|f| f.measure == m);
        match fit {
            Some(f) => {
                let dev = f.slope - target;
                let pass = if config.two_sided {
                    dev.abs() <= config.slope_tolerance
                } else {
                    dev >= -config.slope_tolerance
                };
                verdicts.push(Verdict {
                    measure: m,
                    slope: Some(f.slope),
                    target,
                    deviation: Some(dev),
                    two_sided: config.two_sided,
                    tolerance: config.slope_tolerance,
                    pass,
                });
            }
            None => verdicts.push(Verdict {
                measure: m,
                slope: None,
                target,
                deviation: None,
                two_sided: config.two_sided,
                tolerance: config.slope_tolerance,
                pass: false,
            }),
        }
    }

    Ok(RateReport {
        nu: config.nu,
        theory: pair,
        norm_target,
        points,
        fitted,
        verdicts,
        reg_value_truth,
        notes,
    })
}
