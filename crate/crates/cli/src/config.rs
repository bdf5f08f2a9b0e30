use clap::{Args, ValueEnum};
use serde::Serialize;

use padic_dyn::dynamics::{ExactValue, FieldRecipe, MapContext};
use padic_dyn::padic::{parse_literal, parse_radius, parse_rational};
use padic_dyn::{FieldDescriptor, NormValue, PadicNumber};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

fn parse_seed(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("bad seed {text:?}: {e}"))
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    /// Map parameter a: a rational ("-1", "3/4") or a digit-object JSON literal.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Relative precision in p-adic digits.
    #[arg(long, default_value_t = 64)]
    pub precision: u32,
    /// Random seed, decimal or 0x-hex. PADIC_SEED, when set, takes precedence.
    #[arg(long, default_value = "0xA", value_parser = parse_seed)]
    pub seed: u64,
    /// Monte Carlo samples per sphere or ball.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Iterations per orbit.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Orbit depth for exclusion-set membership.
    #[arg(long, default_value_t = 32)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<std::path::PathBuf>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Working field: "base", "poles" (adjoin sqrt(-a)), "cycle" (adjoin
    /// sqrt(-2a)) or a rational radicand d for Q_p(sqrt d).
    #[arg(long, allow_hyphen_values = true)]
    pub ext: Option<String>,
}

impl ExperimentConfig {
    /// Apply the `PADIC_SEED` override and validate.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if let Ok(text) = std::env::var("PADIC_SEED") {
            self.seed = parse_seed(&text).map_err(CliError::Invalid)?;
        }
        FieldDescriptor::base(self.p)?;
        if self.precision == 0 || self.samples == 0 || self.steps == 0 || self.depth == 0 {
            return Err(CliError::Invalid("precision, samples, steps and depth must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Invalid("--jobs must be positive".into()));
        }
        Ok(self)
    }

    pub fn base_field(&self) -> FieldDescriptor {
        FieldDescriptor::base(self.p).expect("validated prime")
    }

    fn exact(&self, text: &str) -> Result<ExactValue, CliError> {
        if let Ok((m, n)) = parse_rational(text) {
            return Ok(ExactValue::ratio(m, n)?);
        }
        let x = parse_literal(text, &self.base_field(), self.precision)?;
        let qp = x.as_qp().ok_or_else(|| CliError::Invalid(format!("{text:?} is not a base-field value")))?;
        Ok(ExactValue::Digits(qp.clone()))
    }

    pub fn a_value(&self) -> Result<ExactValue, CliError> {
        let text = self.a.as_deref().ok_or_else(|| CliError::Invalid("--a is required".into()))?;
        self.exact(text)
    }

    pub fn recipe(&self) -> Result<FieldRecipe, CliError> {
        let a = self.a_value()?;
        Ok(match self.ext.as_deref().map(str::trim) {
            None | Some("base") => FieldRecipe::Base,
            Some("poles") => FieldRecipe::AdjoinSqrt(a.times(-1)),
            Some("cycle") => FieldRecipe::AdjoinSqrt(a.times(-2)),
            Some(d) => FieldRecipe::AdjoinSqrt(self.exact(d)?),
        })
    }

    pub fn context(&self) -> Result<MapContext, CliError> {
        Ok(MapContext::new(self.p, self.a_value()?, self.recipe()?, self.precision)?)
    }

    pub fn radius(&self, text: &str) -> Result<NormValue, CliError> {
        Ok(parse_radius(text, self.p)?)
    }

    pub fn literal(&self, ctx: &MapContext, text: &str) -> Result<PadicNumber, CliError> {
        Ok(parse_literal(text, ctx.field(), ctx.cap())?)
    }
}
