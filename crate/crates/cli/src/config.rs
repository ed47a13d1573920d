//! Experiment configuration: a TOML file with one table per concern, every
//! key overridable from the command line as `--table.key=value`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tensor_radon::interp::Stencil;
use toml::{Table, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 2,
            samples: 64,
            half_width: 5.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Quadrature,
    Fourier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Frame,
    Pair,
}

/// `"all"` or an explicit list of degree signatures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Signatures {
    All(String),
    List(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    pub m: usize,
    pub signatures: Signatures,
    pub form: Form,
    pub route: Route,
    pub stencil: Stencil,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            m: 0,
            signatures: Signatures::All("all".into()),
            form: Form::Frame,
            route: Route::Quadrature,
            stencil: Stencil::Quintic,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectionConfig {
    /// Directions on the circle or the sphere, closed under `ω → -ω`;
    /// 180 for `n = 2` and 500 for `n = 3` when absent.
    pub count: Option<usize>,
    /// Tangent directions per `ω` for pair-form data on `S²`; 32 when absent.
    pub u_count: Option<usize>,
}

impl DirectionConfig {
    pub fn count_for(&self, n: usize) -> usize {
        self.count.unwrap_or(if n == 2 { 180 } else { 500 })
    }

    pub fn u_count_for(&self, n: usize) -> usize {
        // The circle has only ±ω_1.
        if n == 2 {
            2
        } else {
            self.u_count.unwrap_or(32)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomConfig {
    /// JSON phantom specification; a random phantom is drawn when absent.
    pub spec: Option<PathBuf>,
    /// The zero field of order `transform.m`.
    pub zero: bool,
    pub min_terms: usize,
    pub max_terms: usize,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        PhantomConfig {
            spec: None,
            zero: false,
            min_terms: 1,
            max_terms: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    /// A field (`.tfld`), a sinogram (`.sino`) or a directory of sinograms.
    pub input: Option<PathBuf>,
    /// Field to compare a reconstruction against.
    pub reference: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for IoConfig {
    fn default() -> Self {
        IoConfig {
            input: None,
            reference: None,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InversionConfig {
    /// Padding factor of the `δ^i d^i` solves.
    pub pad: usize,
    /// A priori support radius of the field.
    pub support_radius: Option<f64>,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            pad: 4,
            support_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Reconstruction error against `io.reference`.
    pub inversion: f64,
    pub imag: f64,
    pub range: f64,
    pub k_max: usize,
    pub slice: f64,
    pub reshetnyak: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            inversion: 5e-2,
            imag: 1e-3,
            range: 1e-3,
            k_max: 4,
            slice: 1e-3,
            reshetnyak: 3e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReshetnyakConfig {
    pub s: f64,
    pub t: f64,
}

impl Default for ReshetnyakConfig {
    fn default() -> Self {
        ReshetnyakConfig { s: 0.0, t: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UcpConfig {
    pub m: usize,
    pub i: usize,
    /// Outer radius of the odd-dimensional shell.
    pub outer: f64,
    /// Grid and direction counts; each defaults to the experiment's own.
    pub directions: Option<usize>,
    pub samples: Option<usize>,
    pub half_width: Option<f64>,
    /// Seeds of the even-dimensional corpus.
    pub seeds: Vec<u64>,
}

impl Default for UcpConfig {
    fn default() -> Self {
        UcpConfig {
            m: 0,
            i: 0,
            outer: 2.5,
            directions: None,
            samples: None,
            half_width: None,
            seeds: (0..10).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestConfig {
    /// Criterion ids to run; empty runs all.
    pub criteria: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub grid: GridConfig,
    pub transform: TransformConfig,
    pub directions: DirectionConfig,
    pub phantom: PhantomConfig,
    pub io: IoConfig,
    pub inversion: InversionConfig,
    pub tolerances: ToleranceConfig,
    pub reshetnyak: ReshetnyakConfig,
    pub ucp: UcpConfig,
    pub selftest: SelftestConfig,
}

/// Parses the right-hand side of an override as a TOML value, falling back
/// to a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Applies `table.key=value` to a TOML table.
pub fn apply_override(root: &mut Table, spec: &str) -> Result<(), String> {
    let spec = spec.trim_start_matches("--");
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| format!("override `{spec}` is not of the form key=value"))?;
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(format!("override `{spec}` has an empty key"));
    }
    let (last, parents) = keys.split_last().expect("split yields one key");
    let mut table = root;
    for k in parents {
        let entry = table
            .entry(k.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| format!("`{k}` in `{path}` is not a table"))?;
    }
    table.insert(last.to_string(), parse_value(raw));
    Ok(())
}

/// Reads the optional config file and applies the overrides in order.
pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<ExperimentConfig, String> {
    let mut root = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            text.parse::<Table>().map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => Table::new(),
    };
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    ExperimentConfig::deserialize(Value::Table(root)).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_are_typed() {
        let c = load(None, &["--grid.N=32".into(), "transform.signatures=[[1,0]]".into(), "io.out=runs/a".into()]).unwrap();
        assert_eq!(c.grid.samples, 32);
        assert_eq!(c.transform.signatures, Signatures::List(vec![vec![1, 0]]));
        assert_eq!(c.io.out, PathBuf::from("runs/a"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(load(None, &["grid.M=3".into()]).is_err());
        assert!(load(None, &["grid".into()]).is_err());
    }
}
