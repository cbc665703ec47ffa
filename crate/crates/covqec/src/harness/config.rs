use std::path::PathBuf;
use std::str::FromStr;

use crate::codes::{five_qubit_code, trivial_code, CodeSpec};
use crate::protocol::{SweepModel, WeakDistribution};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Weak,
    Strong,
}

impl FromStr for ModelKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "weak" => Ok(Self::Weak),
            "strong" => Ok(Self::Strong),
            _ => Err(HarnessError::Usage(format!("model must be weak or strong, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    CsvSvg,
}

impl FromStr for Format {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "csv+svg" => Ok(Self::CsvSvg),
            _ => Err(HarnessError::Usage(format!("format must be csv or csv+svg, got {s:?}"))),
        }
    }
}

/// Everything a subcommand may need. Built from defaults, then a key=value
/// file, then command-line flags, later sources winning.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub d: usize,
    pub model: Option<ModelKind>,
    pub ne: Option<u32>,
    pub pe: Option<f64>,
    pub np: Option<usize>,
    pub nr: Option<u64>,
    pub n: Option<u64>,
    pub n_grid: Option<Vec<u64>>,
    pub alpha: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub quad_order: Option<usize>,
    pub mc_samples: usize,
    pub format: Format,
    pub threads: usize,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 2,
            model: None,
            ne: None,
            pe: None,
            np: None,
            nr: None,
            n: None,
            n_grid: None,
            alpha: crate::protocol::STRONG_ALPHA,
            seed: 0,
            out: None,
            quad_order: None,
            mc_samples: 10_000,
            format: Format::Csv,
            threads: 1,
            timing: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value.trim().parse().map_err(|_| HarnessError::Usage(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    /// Sets one field by its flag name (without dashes; `_` and `-` both accepted).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "d" => self.d = parse(&key, v)?,
            "model" => self.model = Some(v.parse()?),
            "ne" => self.ne = Some(parse(&key, v)?),
            "pe" => self.pe = Some(parse(&key, v)?),
            "np" => self.np = Some(parse(&key, v)?),
            "nr" => self.nr = Some(parse(&key, v)?),
            "n" => self.n = Some(parse(&key, v)?),
            "n-grid" => {
                let grid = v.split(',').map(|x| parse(&key, x)).collect::<Result<Vec<u64>, _>>()?;
                self.n_grid = Some(grid);
            }
            "alpha" => self.alpha = parse(&key, v)?,
            "seed" => self.seed = parse(&key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "quad-order" => self.quad_order = Some(parse(&key, v)?),
            "mc-samples" => self.mc_samples = parse(&key, v)?,
            "format" => self.format = v.parse()?,
            "threads" => self.threads = parse(&key, v)?,
            "timing" => self.timing = parse(&key, v)?,
            _ => return Err(HarnessError::Usage(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    /// Applies a key=value file; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Defaults, then the optional config file text, then flag overrides.
    pub fn resolve(file: Option<&str>, overrides: &[(&str, String)]) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        if let Some(text) = file {
            cfg.apply_file(text)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn require_model(&self) -> Result<ModelKind, HarnessError> {
        self.model.ok_or_else(|| HarnessError::Usage("--model {weak,strong} is required".into()))
    }

    pub fn require_ne(&self) -> Result<u32, HarnessError> {
        self.ne.ok_or_else(|| HarnessError::Usage("--ne is required for the weak model".into()))
    }

    pub fn require_pe(&self) -> Result<f64, HarnessError> {
        self.pe.ok_or_else(|| HarnessError::Usage("--pe is required for the strong model".into()))
    }

    /// Physical qudit count, defaulting to the five-qubit code for the weak
    /// model and the bare qubit for the strong one.
    pub fn physical(&self, model: ModelKind) -> usize {
        self.np.unwrap_or(match model {
            ModelKind::Weak => 5,
            ModelKind::Strong => 1,
        })
    }

    pub fn code(&self, model: ModelKind) -> Result<CodeSpec, HarnessError> {
        if self.d != 2 {
            return Err(HarnessError::Usage(format!("simulation supports --d 2 only, got {}", self.d)));
        }
        match self.physical(model) {
            1 => Ok(trivial_code(2)),
            5 => Ok(five_qubit_code()?),
            other => Err(HarnessError::Usage(format!("--np must be 1 (bare qubit) or 5 (five-qubit code), got {other}"))),
        }
    }

    pub fn sweep_model(&self) -> Result<SweepModel, HarnessError> {
        let model = self.require_model()?;
        let code = self.code(model)?;
        Ok(match model {
            ModelKind::Weak => SweepModel::Weak { code, n_e: self.require_ne()?, distribution: WeakDistribution::UniformUpTo },
            ModelKind::Strong => SweepModel::Strong { code, p_e: self.require_pe()? },
        })
    }
}
