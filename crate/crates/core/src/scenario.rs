//! Scenario files and the propagation + correlation pipeline behind the
//! command-line tool.
//!
//! A scenario is a TOML document. Rates are in units of the reference decay
//! rate, times in its inverse and distances in transition wavelengths:
//!
//! ```toml
//! t_final = 10.0
//! samples = 200
//!
//! [initial]
//! kind = "alpha_state"
//! alpha = 0.5
//! phi = 0.0
//!
//! [params]
//! V = 2.03
//! gamma = 0.91
//!
//! [scan]            # optional
//! axis = "alpha"
//! start = 0.0
//! stop = 1.0
//! steps = 21
//! ```
//!
//! Instead of `params.V` and `params.gamma` a `[geometry]` table may be
//! given, from which the couplings (and spontaneous rates) are derived.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::correlations::{trajectory_records, CorrelationRecord};
use crate::couplings::{self, EmitterGeometry};
use crate::dynamics::{
    build_bell_diagonal, propagate_with, AlphaState, PropagateOptions, SystemParams,
};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Default separation range of a distance scan, in wavelengths.
pub const DEFAULT_DISTANCE_RANGE: (f64, f64) = (0.1, 0.4);

/// Column names of a trajectory table.
pub const RECORD_COLUMNS: [&str; 8] = ["t", "MI", "CC", "QD", "C", "EoF", "theta_m", "phi_m"];

/// Keys of `[params]` that a `[geometry]` table determines.
const GEOMETRY_OWNED_KEYS: [&str; 4] = ["V", "gamma", "Gamma1", "Gamma2"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum InitialState {
    AlphaState {
        alpha: f64,
        #[serde(default)]
        phi: f64,
    },
    // braces so that stray keys are rejected like in the other variants
    DoublyExcited {},
    Ground {},
    BellDiagonal {
        h1: f64,
        h2: f64,
        h3: f64,
    },
    Matrix {
        re: [[f64; 4]; 4],
        #[serde(default)]
        im: [[f64; 4]; 4],
    },
}

impl InitialState {
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        match *self {
            InitialState::AlphaState { alpha, phi } => {
                Ok(AlphaState::new(alpha, phi)?.density_matrix())
            }
            InitialState::DoublyExcited {} => Ok(DensityMatrix::doubly_excited()),
            InitialState::Ground {} => Ok(DensityMatrix::ground()),
            InitialState::BellDiagonal { h1, h2, h3 } => build_bell_diagonal(h1, h2, h3),
            InitialState::Matrix { re, im } => DensityMatrix::from_parts(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    Alpha,
    Distance,
    LaserAmplitude,
}

impl ScanAxis {
    pub fn column(&self) -> &'static str {
        match self {
            ScanAxis::Alpha => "alpha",
            ScanAxis::Distance => "r12_over_lambda0",
            ScanAxis::LaserAmplitude => "ell",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    axis: ScanAxis,
    start: Option<f64>,
    stop: Option<f64>,
    steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    pub axis: ScanAxis,
    pub start: f64,
    pub stop: f64,
    /// Number of scan points, both ends included.
    pub steps: usize,
}

impl Scan {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    t_final: f64,
    samples: usize,
    initial: InitialState,
    #[serde(default)]
    params: Option<toml::Table>,
    #[serde(default)]
    geometry: Option<EmitterGeometry>,
    #[serde(default)]
    scan: Option<RawScan>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub initial: InitialState,
    /// Detunings and drive; couplings too unless `geometry` is set.
    pub params: SystemParams,
    pub geometry: Option<EmitterGeometry>,
    pub t_final: f64,
    pub samples: usize,
    pub scan: Option<Scan>,
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        let table = raw.params.unwrap_or_default();
        if raw.geometry.is_some() {
            if let Some(key) = GEOMETRY_OWNED_KEYS.iter().find(|k| table.contains_key(**k)) {
                return Err(Error::Scenario(format!(
                    "params.{key} conflicts with [geometry], which determines it"
                )));
            }
        }
        let params: SystemParams = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Scenario(format!("[params]: {e}")))?;
        let scan = raw.scan.map(resolve_scan).transpose()?;
        let scenario = Scenario {
            initial: raw.initial,
            params,
            geometry: raw.geometry,
            t_final: raw.t_final,
            samples: raw.samples,
            scan,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

fn resolve_scan(raw: RawScan) -> Result<Scan> {
    let (default_start, default_stop) = match raw.axis {
        ScanAxis::Distance => (
            Some(DEFAULT_DISTANCE_RANGE.0),
            Some(DEFAULT_DISTANCE_RANGE.1),
        ),
        _ => (None, None),
    };
    let start = raw.start.or(default_start);
    let stop = raw.stop.or(default_stop);
    match (start, stop) {
        (Some(start), Some(stop)) => Ok(Scan {
            axis: raw.axis,
            start,
            stop,
            steps: raw.steps,
        }),
        _ => Err(Error::Scenario(format!(
            "scan over {} needs both start and stop",
            raw.axis.column()
        ))),
    }
}

impl Scenario {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.density_matrix()?;
        self.resolved_params()?;
        crate::dynamics::sample_times(self.t_final, self.samples)?;
        if let Some(scan) = &self.scan {
            if scan.steps == 0 {
                return Err(Error::Scenario("scan needs at least one step".into()));
            }
            if !(scan.start.is_finite() && scan.stop.is_finite()) || scan.start > scan.stop {
                return Err(Error::Scenario(format!(
                    "scan range must be ordered (start {} > stop {})",
                    scan.start, scan.stop
                )));
            }
            if scan.steps > 1 && scan.start == scan.stop {
                return Err(Error::Scenario("scan range is empty".into()));
            }
            match scan.axis {
                ScanAxis::Alpha if !matches!(self.initial, InitialState::AlphaState { .. }) => {
                    return Err(Error::Scenario(
                        "an alpha scan needs an alpha_state initial state".into(),
                    ));
                }
                ScanAxis::Distance if self.geometry.is_none() => {
                    return Err(Error::Scenario(
                        "a distance scan needs a [geometry] table".into(),
                    ));
                }
                _ => {}
            }
            for x in scan.points() {
                self.at_scan_point(scan.axis, x)?.validate()?;
            }
        }
        Ok(())
    }

    /// The parameters actually used: couplings taken from the geometry when
    /// one is present.
    pub fn resolved_params(&self) -> Result<SystemParams> {
        let p = match &self.geometry {
            Some(g) => self.params.with_geometry(g)?,
            None => self.params,
        };
        p.validate()?;
        Ok(p)
    }

    /// Copy of the scenario (without a scan) at one value of the scan axis.
    pub fn at_scan_point(&self, axis: ScanAxis, x: f64) -> Result<Scenario> {
        let mut s = Scenario {
            scan: None,
            ..self.clone()
        };
        match axis {
            ScanAxis::Alpha => match &mut s.initial {
                InitialState::AlphaState { alpha, .. } => *alpha = x,
                _ => {
                    return Err(Error::Scenario(
                        "an alpha scan needs an alpha_state initial state".into(),
                    ))
                }
            },
            ScanAxis::Distance => match &mut s.geometry {
                Some(g) => g.r12_over_lambda0 = x,
                None => {
                    return Err(Error::Scenario(
                        "a distance scan needs a [geometry] table".into(),
                    ))
                }
            },
            ScanAxis::LaserAmplitude => {
                s.params.ell1 = x;
                s.params.ell2 = x;
            }
        }
        Ok(s)
    }
}

/// A rectangular table of numbers with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl OutputTable {
    pub fn new(header: Vec<String>) -> Self {
        OutputTable {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Comma-separated, LF-terminated, 15 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                // normalize -0 so equal values print identically
                let x = if *x == 0.0 { 0.0 } else { *x };
                line.push_str(&format!("{x:.14e}"));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }
}

fn record_row(r: &CorrelationRecord) -> Vec<f64> {
    vec![
        r.t,
        r.mutual_information,
        r.classical,
        r.discord,
        r.concurrence,
        r.eof,
        r.argmax_basis.theta(),
        r.argmax_basis.phi(),
    ]
}

/// Propagates the scenario (ignoring any scan) and evaluates every sample.
pub fn run_trajectory(s: &Scenario, options: PropagateOptions) -> Result<Vec<CorrelationRecord>> {
    let p = s.resolved_params()?;
    let rho0 = s.initial.density_matrix()?;
    let evolution = propagate_with(&rho0, &p, s.t_final, s.samples, options)?;
    trajectory_records(&evolution)
}

/// Runs the scenario. With a scan, rows are ordered by scan point, then by
/// time, and carry the scan value in a leading column.
pub fn run_scenario(s: &Scenario, options: PropagateOptions) -> Result<OutputTable> {
    let columns = RECORD_COLUMNS.iter().map(|c| c.to_string());
    match &s.scan {
        None => {
            let mut table = OutputTable::new(columns.collect());
            for r in run_trajectory(s, options)? {
                table.push(record_row(&r));
            }
            Ok(table)
        }
        Some(scan) => {
            let points = scan.points();
            let blocks = points
                .par_iter()
                .map(|&x| run_trajectory(&s.at_scan_point(scan.axis, x)?, options))
                .collect::<Result<Vec<_>>>()?;
            let mut header = vec![scan.axis.column().to_string()];
            header.extend(columns);
            let mut table = OutputTable::new(header);
            for (x, records) in points.iter().zip(blocks) {
                for r in records {
                    let mut row = vec![*x];
                    row.extend(record_row(&r));
                    table.push(row);
                }
            }
            Ok(table)
        }
    }
}

/// Couplings of a geometry, in units of the reference decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingReport {
    pub v: f64,
    pub gamma: f64,
    pub z: f64,
}

impl CouplingReport {
    pub fn new(g: &EmitterGeometry) -> Result<Self> {
        let c = couplings::couplings(g)?;
        Ok(CouplingReport {
            v: c.v,
            gamma: c.gamma,
            z: g.z(),
        })
    }
}

impl fmt::Display for CouplingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `+ 0.0` turns a negative zero into a positive one
        writeln!(f, "V/Gamma = {:.6}", self.v + 0.0)?;
        writeln!(f, "gamma/Gamma = {:.6}", self.gamma + 0.0)?;
        write!(f, "z = {:.6}", self.z)
    }
}

/// Reads a geometry from TOML, either at top level or under `[geometry]`.
pub fn parse_geometry(text: &str) -> Result<EmitterGeometry> {
    let mut table: toml::Table =
        toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
    let value = match table.remove("geometry") {
        Some(inner) => inner,
        None => toml::Value::Table(table),
    };
    let g: EmitterGeometry = value
        .try_into()
        .map_err(|e: toml::de::Error| Error::Scenario(format!("geometry: {e}")))?;
    g.validate()?;
    Ok(g)
}
