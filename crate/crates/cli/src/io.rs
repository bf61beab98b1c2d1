//! JSON instance and result files. Rationals travel as strings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use chorefair::fairness::{FairnessReport, Witness};
use chorefair::rational::{format_rational, int, parse_rational};
use chorefair::{Allocation, ChoreSet, CostOracle, Criterion, Error, Instance, Rational};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub m: usize,
    pub n: usize,
    pub agents: Vec<OracleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleFile {
    Additive { costs: Vec<String> },
    CappedAdditive { costs: Vec<String>, cap: String },
    MaxOfAdditive { rows: Vec<Vec<String>> },
    Table { values: BTreeMap<String, String> },
}

fn q(s: &str) -> Result<Rational, Error> {
    parse_rational(s)
}

fn qs(v: &[String]) -> Result<Vec<Rational>, Error> {
    v.iter().map(|s| q(s)).collect()
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

/// "1,3,4" for {c1,c3,c4}; "" for the empty set.
pub fn subset_key(s: ChoreSet) -> String {
    s.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn parse_subset_key(key: &str, m: usize) -> Result<ChoreSet, Error> {
    let bad = || Error::InvalidInput(format!("table key {key:?} is not a sorted 1-based chore list"));
    if key.is_empty() {
        return Ok(ChoreSet::EMPTY);
    }
    let mut s = ChoreSet::EMPTY;
    let mut last = 0;
    for part in key.split(',') {
        if part.is_empty() || part.starts_with('0') || !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let c: usize = part.parse().map_err(|_| bad())?;
        if c <= last || c > m {
            return Err(bad());
        }
        last = c;
        s.insert(c - 1);
    }
    Ok(s)
}

impl OracleFile {
    pub fn from_oracle(o: &CostOracle) -> Self {
        match o {
            CostOracle::Additive(c) => OracleFile::Additive { costs: strs(c) },
            CostOracle::CappedAdditive { costs, cap } => OracleFile::CappedAdditive { costs: strs(costs), cap: format_rational(cap) },
            CostOracle::MaxOfAdditive(rows) => OracleFile::MaxOfAdditive { rows: rows.iter().map(|r| strs(r)).collect() },
            CostOracle::TabulatedMonotone { values, .. } => OracleFile::Table {
                values: (0..values.len()).map(|mask| (subset_key(ChoreSet::from_bits(mask as u64)), format_rational(&values[mask]))).collect(),
            },
        }
    }

    pub fn to_oracle(&self, m: usize) -> Result<CostOracle, Error> {
        match self {
            OracleFile::Additive { costs } => CostOracle::additive(qs(costs)?),
            OracleFile::CappedAdditive { costs, cap } => CostOracle::capped_additive(qs(costs)?, q(cap)?),
            OracleFile::MaxOfAdditive { rows } => CostOracle::max_of_additive(rows.iter().map(|r| qs(r)).collect::<Result<_, _>>()?),
            OracleFile::Table { values } => {
                if m > chorefair::oracles::MAX_TABLE_CHORES {
                    return Err(Error::InvalidInput(format!("table oracles support at most {} chores", chorefair::oracles::MAX_TABLE_CHORES)));
                }
                let mut out: Vec<Option<Rational>> = vec![None; 1 << m];
                for (k, v) in values {
                    let s = parse_subset_key(k, m)?;
                    out[s.bits() as usize] = Some(q(v)?);
                }
                if let Some(mask) = out.iter().position(Option::is_none) {
                    return Err(Error::MissingTableEntry(subset_key(ChoreSet::from_bits(mask as u64))));
                }
                CostOracle::tabulated(m, out.into_iter().map(Option::unwrap).collect())
            }
        }
    }
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            m: inst.m(),
            n: inst.n(),
            agents: inst.oracles().iter().map(OracleFile::from_oracle).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, Error> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.agents.len() != self.n {
            return Err(Error::DimensionMismatch(format!("n = {} but {} agents listed", self.n, self.agents.len())));
        }
        let oracles = self.agents.iter().map(|a| a.to_oracle(self.m)).collect::<Result<_, _>>()?;
        Instance::new(self.m, oracles)
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessFile {
    pub i: usize,
    pub j: usize,
    pub c: usize,
    pub lhs: String,
    pub rhs: String,
}

impl From<&Witness> for WitnessFile {
    fn from(w: &Witness) -> Self {
        WitnessFile { i: w.i + 1, j: w.j + 1, c: w.c + 1, lhs: format_rational(&w.lhs), rhs: format_rational(&w.rhs) }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportFile {
    pub criterion: String,
    pub verdict: bool,
    pub witnesses: Vec<WitnessFile>,
}

impl From<&FairnessReport> for ReportFile {
    fn from(r: &FairnessReport) -> Self {
        ReportFile { criterion: r.criterion.to_string(), verdict: r.verdict, witnesses: r.witnesses.iter().map(Into::into).collect() }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ResultFile {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `null` when no allocation was found.
    pub allocation: Option<Vec<Vec<usize>>>,
    pub pool: Vec<usize>,
    pub criterion: String,
    pub verdict: bool,
    pub witnesses: Vec<WitnessFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    /// Wall-clock milliseconds per phase; only with --timings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

/// "efx", "tefx", "alpha_efx(p/q)" or "alpha_efx" with a separate α.
pub fn parse_criterion(name: &str, alpha: Option<&str>) -> Result<Criterion, Error> {
    let bad = || Error::InvalidInput(format!("unknown criterion {name:?} (efx, alpha_efx, tefx)"));
    let c = match name {
        "efx" => Criterion::efx(),
        "tefx" => Criterion::Tefx,
        "alpha_efx" => Criterion::AlphaEfx(q(alpha.ok_or_else(|| Error::InvalidInput("alpha_efx needs --alpha".into()))?)?),
        _ => {
            let inner = name.strip_prefix("alpha_efx(").and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
            Criterion::AlphaEfx(q(inner)?)
        }
    };
    if let Criterion::AlphaEfx(a) = &c {
        if a < &int(1) {
            return Err(Error::InvalidInput(format!("alpha must be at least 1, got {}", format_rational(a))));
        }
    }
    Ok(c)
}

/// An allocation file is either a result file or a bare list of bundles.
pub fn parse_allocation(text: &str, m: usize) -> Result<Allocation, Error> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("allocation JSON: {e}")))?;
    let lists = match &v {
        serde_json::Value::Object(o) => o.get("allocation").cloned().unwrap_or(serde_json::Value::Null),
        other => other.clone(),
    };
    let lists: Vec<Vec<usize>> =
        serde_json::from_value(lists).map_err(|e| Error::InvalidInput(format!("allocation must be a list of 1-based chore lists: {e}")))?;
    Allocation::from_one_based(m, &lists)
}

pub fn read_instance(path: &Path) -> Result<Instance, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    file.to_instance()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
