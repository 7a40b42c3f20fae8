//! Verification configuration: flat `key = value` files with dotted keys,
//! mirrored one-to-one by CLI flags.
//!
//! ```text
//! chart.n = 2
//! chart.c = -1.0
//! family.kind = power-plus-constant   # constant | power-plus-constant | inverse-sqrt
//! family.m = 2.0
//! family.B = 1.0
//! A = 1.0
//! points = 50
//! t_max = 1.0
//! seed = 1
//! # h = 1e-4
//! # directions = 100
//! # include-eq28-literal = false
//! # tol.almost-complex = 1e-10
//! ```

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::LambdaFamily;
use crate::spaceform::SpaceFormChart;
use crate::structure::StructureField;

/// Serializable family description (the library-level closure variant is
/// not expressible in config files).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FamilySpec {
    pub kind: String,
    pub m: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl FamilySpec {
    pub fn build(&self, a: f64, c: f64) -> Result<LambdaFamily> {
        match self.kind.as_str() {
            "constant" => LambdaFamily::constant(a, self.b),
            "power-plus-constant" => LambdaFamily::power_plus_constant(a, self.m, self.b),
            "inverse-sqrt" => LambdaFamily::inverse_sqrt(a, c, self.b),
            other => Err(Error::InvalidConfig(format!(
                "unknown family kind '{other}' (expected constant, power-plus-constant or inverse-sqrt)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ChartSpec {
    pub n: usize,
    pub c: f64,
}

/// Full configuration of a verification run. Field order here fixes the
/// key order of the JSON config echo.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationConfig {
    pub chart: ChartSpec,
    pub family: FamilySpec,
    #[serde(rename = "A")]
    pub a: f64,
    pub points: usize,
    pub t_max: f64,
    pub seed: u64,
    /// Override of the finite-difference step factor.
    pub h: Option<f64>,
    pub directions: usize,
    /// Include the printed-Q comparison in the overall verdict.
    pub include_eq28_literal: bool,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl VerificationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points < 1 {
            return Err(Error::InvalidConfig("points must be at least 1".into()));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidConfig("t_max must be positive".into()));
        }
        if self.directions < 2 {
            return Err(Error::InvalidConfig("directions must be at least 2".into()));
        }
        Ok(())
    }

    pub fn chart(&self) -> Result<SpaceFormChart> {
        SpaceFormChart::new(self.chart.n, self.chart.c)
    }

    pub fn family(&self) -> Result<LambdaFamily> {
        self.family.build(self.a, self.chart.c)
    }

    pub fn structure_field(&self) -> Result<StructureField> {
        Ok(StructureField::new(self.chart()?, self.family()?))
    }
}

struct Builder {
    chart_n: Option<usize>,
    chart_c: Option<f64>,
    family_kind: Option<String>,
    family_m: f64,
    family_b: f64,
    a: f64,
    points: usize,
    t_max: f64,
    seed: u64,
    h: Option<f64>,
    directions: usize,
    include_eq28_literal: bool,
    tolerances: BTreeMap<String, f64>,
}

impl Default for Builder {
    fn default() -> Self {
        Self {
            chart_n: None,
            chart_c: None,
            family_kind: None,
            family_m: 2.0,
            family_b: 1.0,
            a: 1.0,
            points: 50,
            t_max: 1.0,
            seed: 1,
            h: None,
            directions: 100,
            include_eq28_literal: false,
            tolerances: BTreeMap::new(),
        }
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    value.parse().map_err(|_| {
        Error::InvalidConfig(format!("key '{key}': expected a number, got '{value}'"))
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidConfig(format!(
            "key '{key}': expected a boolean, got '{value}'"
        ))),
    }
}

/// Parses the flat key = value syntax. `#` starts a comment, blank lines
/// are skipped, unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<VerificationConfig> {
    let mut builder = Builder::default();
    for (line_no, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("line {}: expected key = value", line_no + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut builder, key, value)?;
    }
    finish(builder)
}

fn apply_key(builder: &mut Builder, key: &str, value: &str) -> Result<()> {
    match key {
        "chart.n" => {
            let n = parse_number(key, value)?;
            if n.fract() != 0.0 || n < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "chart.n must be a nonnegative integer, got '{value}'"
                )));
            }
            builder.chart_n = Some(n as usize);
        }
        "chart.c" => builder.chart_c = Some(parse_number(key, value)?),
        "family.kind" => builder.family_kind = Some(value.to_string()),
        "family.m" => builder.family_m = parse_number(key, value)?,
        "family.B" => builder.family_b = parse_number(key, value)?,
        "A" => builder.a = parse_number(key, value)?,
        "points" => builder.points = parse_number(key, value)? as usize,
        "t_max" => builder.t_max = parse_number(key, value)?,
        "seed" => builder.seed = parse_number(key, value)? as u64,
        "h" => builder.h = Some(parse_number(key, value)?),
        "directions" => builder.directions = parse_number(key, value)? as usize,
        "include-eq28-literal" => builder.include_eq28_literal = parse_bool(key, value)?,
        _ => {
            if let Some(check) = key.strip_prefix("tol.") {
                builder
                    .tolerances
                    .insert(check.to_string(), parse_number(key, value)?);
            } else {
                return Err(Error::InvalidConfig(format!("unknown key '{key}'")));
            }
        }
    }
    Ok(())
}

fn finish(builder: Builder) -> Result<VerificationConfig> {
    let chart_n = builder
        .chart_n
        .ok_or_else(|| Error::InvalidConfig("missing required key 'chart.n'".into()))?;
    let chart_c = builder
        .chart_c
        .ok_or_else(|| Error::InvalidConfig("missing required key 'chart.c'".into()))?;
    let family_kind = builder
        .family_kind
        .ok_or_else(|| Error::InvalidConfig("missing required key 'family.kind'".into()))?;

    let config = VerificationConfig {
        chart: ChartSpec {
            n: chart_n,
            c: chart_c,
        },
        family: FamilySpec {
            kind: family_kind,
            m: builder.family_m,
            b: builder.family_b,
        },
        a: builder.a,
        points: builder.points,
        t_max: builder.t_max,
        seed: builder.seed,
        h: builder.h,
        directions: builder.directions,
        include_eq28_literal: builder.include_eq28_literal,
        tolerances: builder.tolerances,
    };
    config.validate()?;
    // Fail fast on inconsistent chart/family data.
    config.chart()?;
    config.family()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# flat baseline
chart.n = 2
chart.c = 0.0
family.kind = constant
family.B = 1.0
A = 1.0
points = 10
t_max = 1.0
seed = 7
tol.almost-complex = 1e-9
";

    #[test]
    fn parses_example_config() {
        let config = parse_config(EXAMPLE).unwrap();
        assert_eq!(config.chart.n, 2);
        assert_eq!(config.chart.c, 0.0);
        assert_eq!(config.family.kind, "constant");
        assert_eq!(config.points, 10);
        assert_eq!(config.seed, 7);
        assert_eq!(config.tolerances["almost-complex"], 1e-9);
        assert!(config.structure_field().is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_config("chart.n = 2\nchart.c = 0\nfamily.kind = constant\nbogus = 1\n")
            .unwrap_err();
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn rejects_missing_required_keys() {
        let err = parse_config("chart.n = 2\n").unwrap_err();
        assert!(err.to_string().contains("chart.c"));
    }

    #[test]
    fn rejects_unknown_family_kind() {
        let err =
            parse_config("chart.n = 2\nchart.c = 0\nfamily.kind = mystery\n").unwrap_err();
        assert!(err.to_string().contains("unknown family kind"));
    }
}
