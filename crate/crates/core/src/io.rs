//! File formats: function and error specs (JSON), conjugate tables and
//! sampled functions (CSV or JSON), subdifferential queries, operator samples
//! and suite reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::errorfn::{product_error, ErrorFunction};
use crate::extreal::ExtReal;
use crate::funcmodel::{ClosedForm, Function, Grid, GridSummary, SampledFunction};
use crate::subdiff::OperatorSample;
use crate::transform::{Algorithm, ConjugateTable};
use crate::verify::{PropertyRecord, SuiteReport};

/// Function spec, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FunctionSpec {
    #[serde(rename = "sampled")]
    Sampled { grid: Vec<f64>, values: Vec<ExtReal> },
    #[serde(rename = "closed-form")]
    ClosedForm {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl FunctionSpec {
    pub fn to_function(&self) -> Result<Function> {
        match self {
            FunctionSpec::Sampled { grid, values } => {
                Ok(Function::Sampled(SampledFunction::new(Grid::new(grid.clone())?, values.clone())?))
            }
            FunctionSpec::ClosedForm { name, params } => Ok(Function::ClosedForm(ClosedForm::from_name(name, params)?)),
        }
    }

    pub fn from_function(f: &Function) -> Self {
        match f {
            Function::Sampled(s) => FunctionSpec::from_sampled(s),
            Function::ClosedForm(c) => FunctionSpec::ClosedForm {
                name: c.name().to_string(),
                params: c.params(),
            },
        }
    }

    pub fn from_sampled(s: &SampledFunction) -> Self {
        FunctionSpec::Sampled {
            grid: s.grid().points().to_vec(),
            values: s.values().to_vec(),
        }
    }
}

/// Error-function spec, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorSpec {
    Quadratic { scale: f64 },
    ScaledDistance {
        #[serde(rename = "L")]
        lipschitz: f64,
    },
    ExpKernel,
    Zero,
    Product { f: FunctionSpec, g: FunctionSpec },
    SampledMatrix { grid: Vec<f64>, values: Vec<Vec<ExtReal>> },
}

impl ErrorSpec {
    /// Builds the kernel. Product kernels validate their factors on `grid`,
    /// or on the grid of a sampled factor when no grid is given.
    pub fn to_error(&self, grid: Option<&Grid>) -> Result<ErrorFunction> {
        match self {
            ErrorSpec::Quadratic { scale } => ErrorFunction::quadratic(*scale),
            ErrorSpec::ScaledDistance { lipschitz } => ErrorFunction::scaled_distance(*lipschitz),
            ErrorSpec::ExpKernel => Ok(ErrorFunction::ExpKernel),
            ErrorSpec::Zero => Ok(ErrorFunction::Zero),
            ErrorSpec::Product { f, g } => {
                let (f, g) = (f.to_function()?, g.to_function()?);
                let grid = grid
                    .or(f.grid())
                    .or(g.grid())
                    .cloned()
                    .ok_or_else(|| Error::InvalidGrid("product kernel of closed forms needs a grid".into()))?;
                product_error(&f, &g, &grid)
            }
            ErrorSpec::SampledMatrix { grid, values } => {
                ErrorFunction::sampled_matrix(Grid::new(grid.clone())?, values.clone())
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_function_spec(path: &Path) -> Result<FunctionSpec> {
    parse_json(path, &read(path)?)
}

pub fn read_error_spec(path: &Path) -> Result<ErrorSpec> {
    parse_json(path, &read(path)?)
}

pub fn write_function_spec(path: &Path, f: &SampledFunction) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&FunctionSpec::from_sampled(f))?)?;
    Ok(())
}

/// CSV with header `slope,value`.
pub fn table_csv(t: &ConjugateTable) -> String {
    let mut out = String::from("slope,value\n");
    for (s, v) in t.dual_grid.points().iter().zip(&t.values) {
        writeln!(out, "{s},{v}").unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub algorithm: Algorithm,
    pub anchor_y: f64,
    pub primal_grid: GridSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableJson {
    pub provenance: Provenance,
    pub slopes: Vec<f64>,
    pub values: Vec<ExtReal>,
}

pub fn table_json(t: &ConjugateTable) -> String {
    let doc = TableJson {
        provenance: Provenance {
            algorithm: t.algorithm,
            anchor_y: t.anchor_y,
            primal_grid: t.primal_grid.clone(),
        },
        slopes: t.dual_grid.points().to_vec(),
        values: t.values.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Parses `slope,value` CSV back into `(slopes, values)`.
pub fn parse_table_csv(text: &str) -> Result<(Vec<f64>, Vec<ExtReal>)> {
    let rows = parse_pairs(text, "slope,value")?;
    Ok(rows.into_iter().unzip())
}

/// CSV with header `x,value`.
pub fn function_csv(f: &SampledFunction) -> String {
    let mut out = String::from("x,value\n");
    for (x, v) in f.grid().points().iter().zip(f.values()) {
        writeln!(out, "{x},{v}").unwrap();
    }
    out
}

pub fn function_json(f: &SampledFunction) -> String {
    serde_json::to_string_pretty(&FunctionSpec::from_sampled(f)).expect("serializable")
}

fn parse_pairs(text: &str, header: &str) -> Result<Vec<(f64, ExtReal)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => return Err(Error::Parse(format!("line 1: expected header `{header}`, found `{h}`"))),
        None => return Err(Error::Parse("empty input".into())),
    }
    lines
        .map(|(n, line)| {
            let mut cols = line.split(',').map(str::trim);
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse(format!("line {}: expected two columns", n + 1)));
            };
            let a: f64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number `{a}`", n + 1)))?;
            let b: ExtReal = b
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad value `{b}`", n + 1)))?;
            Ok((a, b))
        })
        .collect()
}

/// Operator samples from CSV with header `x,xstar`.
pub fn parse_operator_csv(text: &str) -> Result<OperatorSample> {
    let rows = parse_pairs(text, "x,xstar")?;
    let entries = rows
        .into_iter()
        .map(|(x, v)| {
            v.finite()
                .map(|v| (x, v))
                .ok_or_else(|| Error::Parse(format!("non-finite dual value at x = {x}")))
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorSample::new(entries)
}

pub fn read_operator_csv(path: &Path) -> Result<OperatorSample> {
    parse_operator_csv(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct SeededRecord<'a> {
    seed: u64,
    #[serde(flatten)]
    record: &'a PropertyRecord,
}

/// Suite output: a JSON array of property records, each carrying the seed.
pub fn suite_json(r: &SuiteReport) -> String {
    let rows: Vec<SeededRecord> = r.records.iter().map(|record| SeededRecord { seed: r.seed, record }).collect();
    serde_json::to_string_pretty(&rows).expect("serializable")
}
