//! Strict JSON sweep configuration: mirrors `ExperimentConfig` field for
//! field, adds output paths, and rejects unknown keys before any computation.
//! Tagged-enum front ends don't compose with `deny_unknown_fields`, so each
//! nested block is a plain struct with a `kind` string validated by hand.

use bregman_rates::harness::{
    DeltaGrid, ErrorMeasure, ExperimentConfig, OmegaChoice, Regime,
};
use bregman_rates::{OperatorKind, RegulariserSpec, SolveOptions};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub operator: OperatorBlock,
    pub regulariser: RegulariserBlock,
    pub nu: f64,
    pub regime: RegimeBlock,
    #[serde(default)]
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub alpha_const: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub omega: Option<OmegaBlock>,
    /// Half-open [start, end) window in grid indices.
    #[serde(default)]
    pub fit_window: Option<(usize, usize)>,
    #[serde(default)]
    pub measures: Option<Vec<String>>,
    #[serde(default)]
    pub checked_measures: Option<Vec<String>>,
    #[serde(default)]
    pub solve: Option<SolveBlock>,
    #[serde(default)]
    pub slope_tolerance: Option<f64>,
    #[serde(default)]
    pub two_sided: Option<bool>,
    #[serde(default)]
    pub output: Option<OutputBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorBlock {
    pub kind: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulariserBlock {
    pub kind: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub weight: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeBlock {
    pub kind: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub min: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaBlock {
    pub kind: String,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveBlock {
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub kkt_tolerance: Option<f64>,
    #[serde(default)]
    pub step_scale: Option<f64>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
}

fn require<T: Copy>(v: Option<T>, what: &str, kind: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("operator/regulariser block '{kind}' needs field '{what}'"))
}

pub fn parse_measure(name: &str) -> Result<ErrorMeasure, String> {
    match name {
        "bregman" => Ok(ErrorMeasure::Bregman),
        "sym_bregman" => Ok(ErrorMeasure::SymBregman),
        "norm" => Ok(ErrorMeasure::Norm),
        "residual" => Ok(ErrorMeasure::Residual),
        other => Err(format!(
            "unknown measure '{other}' (expected bregman, sym_bregman, norm, residual)"
        )),
    }
}

impl OperatorBlock {
    pub fn to_kind(&self) -> Result<OperatorKind, String> {
        match self.kind.as_str() {
            "diagonal_decay" => Ok(OperatorKind::DiagonalDecay {
                n: require(self.n, "n", "diagonal_decay")?,
                a: require(self.a, "a", "diagonal_decay")?,
            }),
            "integration" => Ok(OperatorKind::Integration {
                n: require(self.n, "n", "integration")?,
            }),
            "random_gaussian" => Ok(OperatorKind::RandomGaussian {
                m: require(self.m, "m", "random_gaussian")?,
                n: require(self.n, "n", "random_gaussian")?,
                seed: self.seed.unwrap_or(0),
            }),
            other => Err(format!(
                "unknown operator kind '{other}' (expected diagonal_decay, integration, random_gaussian)"
            )),
        }
    }
}

impl RegulariserBlock {
    /// `n` is the operator's column count; power_sum_high defaults its weight
    /// to the quadrature-style 1/n when omitted.
    pub fn to_spec(&self, n: usize) -> Result<RegulariserSpec, String> {
        match self.kind.as_str() {
            "quadratic" => Ok(RegulariserSpec::Quadratic),
            "power_sum" => Ok(RegulariserSpec::PowerSum {
                p: require(self.p, "p", "power_sum")?,
                weight: self.weight.unwrap_or(1.0),
            }),
            "power_sum_high" => Ok(RegulariserSpec::PowerSumHigh {
                p: require(self.p, "p", "power_sum_high")?,
                weight: self.weight.unwrap_or(1.0 / n as f64),
            }),
            "total_variation_1d" => Ok(RegulariserSpec::TotalVariation1D),
            "huber" => Ok(RegulariserSpec::Huber {
                gamma: require(self.gamma, "gamma", "huber")?,
            }),
            other => Err(format!(
                "unknown regulariser kind '{other}' (expected quadratic, power_sum, power_sum_high, total_variation_1d, huber)"
            )),
        }
    }
}

impl RegimeBlock {
    pub fn to_regime(&self) -> Result<Regime, String> {
        match self.kind.as_str() {
            "basic" => Ok(Regime::Basic),
            "pconvex" => Ok(Regime::PConvex {
                p: require(self.p, "p", "pconvex")?,
            }),
            "qco" => Ok(Regime::QCoconvex {
                q: require(self.q, "q", "qco")?,
            }),
            other => Err(format!(
                "unknown regime kind '{other}' (expected basic, pconvex, qco)"
            )),
        }
    }
}

impl RunConfigFile {
    /// Builds a validated `ExperimentConfig`; `seed_override` is the resolved
    /// command-line/environment seed, which wins over the config value.
    pub fn to_experiment(&self, seed_override: Option<u64>) -> Result<ExperimentConfig, String> {
        let operator = self.operator.to_kind()?;
        let ncols = match operator {
            OperatorKind::DiagonalDecay { n, .. } => n,
            OperatorKind::Integration { n } => n,
            OperatorKind::RandomGaussian { n, .. } => n,
        };
        let spec = self.regulariser.to_spec(ncols)?;
        let regime = self.regime.to_regime()?;
        let mut config = ExperimentConfig::new(operator, spec, self.nu, regime);
        if let Some(g) = &self.grid {
            let d = DeltaGrid::default();
            config.grid = DeltaGrid {
                count: g.count.unwrap_or(d.count),
                max: g.max.unwrap_or(d.max),
                min: g.min.unwrap_or(d.min),
            };
            // Keep the default drop-first-and-last window consistent with a
            // resized grid unless the file pins one explicitly.
            if self.fit_window.is_none() && config.grid.count >= 4 {
                config.fit_window = (1, config.grid.count - 1);
            }
        }
        if let Some(c) = self.alpha_const {
            config.alpha_const = c;
        }
        if let Some(s) = seed_override.or(self.seed) {
            config.seed = s;
        }
        if let Some(o) = &self.omega {
            config.omega = match o.kind.as_str() {
                "default" => OmegaChoice::Default,
                "random" => OmegaChoice::Random {
                    seed: require(o.seed, "seed", "omega random")?,
                },
                other => return Err(format!("unknown omega kind '{other}'")),
            };
        }
        if let Some(w) = self.fit_window {
            config.fit_window = w;
        }
        if let Some(ms) = &self.measures {
            config.measures = ms
                .iter()
                .map(|s| parse_measure(s))
                .collect::<Result<Vec<_>, _>>()?;
        }
        if let Some(ms) = &self.checked_measures {
            config.checked_measures = ms
                .iter()
                .map(|s| parse_measure(s))
                .collect::<Result<Vec<_>, _>>()?;
        }
        if let Some(s) = &self.solve {
            let d = SolveOptions::default();
            config.solve_options = SolveOptions {
                max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
                kkt_tolerance: s.kkt_tolerance.unwrap_or(d.kkt_tolerance),
                step_scale: s.step_scale.unwrap_or(d.step_scale),
            };
        }
        if let Some(t) = self.slope_tolerance {
            config.slope_tolerance = t;
        }
        if let Some(t) = self.two_sided {
            config.two_sided = t;
        }
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}
