//! In-memory run results and their on-disk form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const SEISMOGRAM_HEADER: [&str; 8] =
    ["t", "slip_rate_dip", "slip_rate_strike", "V", "T_m", "T_l", "T_n", "S"];

pub const ENERGY_HEADER: [&str; 10] = [
    "t",
    "E",
    "dE_dt",
    "IT_s",
    "F_luc_minus",
    "F_luc_plus",
    "residual",
    "exterior",
    "prestress_work",
    "E_total",
];

/// Fault time series at one receiver, one row per step (columns as in
/// [`SEISMOGRAM_HEADER`], tractions total, slip rates in m/s).
#[derive(Debug, Clone, PartialEq)]
pub struct Seismogram {
    pub name: String,
    pub node: usize,
    pub along_dip: f64,
    pub along_strike: f64,
    pub samples: Vec<[f64; 8]>,
}

impl Seismogram {
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[c]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyRecord {
    pub t: f64,
    pub energy: f64,
    pub rate: f64,
    pub interface: f64,
    pub fluctuation_minus: f64,
    pub fluctuation_plus: f64,
    pub residual: f64,
    pub exterior: f64,
    pub prestress_work: f64,
    pub total_energy: f64,
}

impl EnergyRecord {
    fn row(&self) -> [f64; 10] {
        [
            self.t,
            self.energy,
            self.rate,
            self.interface,
            self.fluctuation_minus,
            self.fluctuation_plus,
            self.residual,
            self.exterior,
            self.prestress_work,
            self.total_energy,
        ]
    }
}

pub const SNAPSHOT_FIELDS: [&str; 6] = ["V", "slip", "T_m", "T_l", "T_n", "psi"];

/// Fault-plane fields at one instant, each row-major over (dip, strike).
#[derive(Debug, Clone, PartialEq)]
pub struct FaultSnapshot {
    pub step: usize,
    pub time: f64,
    pub dims: [usize; 2],
    pub fields: [Vec<f64>; 6],
}

impl FaultSnapshot {
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dims {} {}", self.dims[0], self.dims[1])?;
        writeln!(out, "fields {}", SNAPSHOT_FIELDS.join(" "))?;
        writeln!(out, "time {:.17e}", self.time)?;
        writeln!(out, "end_header")?;
        for f in &self.fields {
            for v in f {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Summary {
    pub name: String,
    pub steps: usize,
    pub dt: f64,
    pub end_time: f64,
    /// m/s
    pub max_slip_rate: f64,
    pub max_slip_rate_time: f64,
    /// m
    pub final_slip_max: f64,
    pub final_slip_mean: f64,
    pub clamped_evaluations: usize,
    pub max_energy_residual: f64,
    /// Not written to disk, so that output files stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub seismograms: Vec<Seismogram>,
    pub snapshots: Vec<FaultSnapshot>,
    pub energy: Vec<EnergyRecord>,
    pub summary: Summary,
    /// Fault-plane coordinates `(along_dip, along_strike)` per fault node.
    pub fault_coords: Vec<[f64; 2]>,
    /// Surface quadrature weights per fault node.
    pub fault_weights: Vec<f64>,
    pub final_slip: Vec<f64>,
    pub peak_slip_rate: Vec<f64>,
    pub files: Vec<PathBuf>,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub(crate) fn write_rows<'a, const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: impl Iterator<Item = &'a [f64; N]>,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

impl RunOutput {
    /// Write seismograms, the energy log, snapshots and the summary into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for s in &self.seismograms {
            let path = dir.join(format!("seismogram_{}.csv", s.name));
            write_rows(&path, SEISMOGRAM_HEADER, s.samples.iter())?;
            files.push(path);
        }
        if !self.energy.is_empty() {
            let path = dir.join("energy.csv");
            let rows: Vec<[f64; 10]> = self.energy.iter().map(EnergyRecord::row).collect();
            write_rows(&path, ENERGY_HEADER, rows.iter())?;
            files.push(path);
        }
        if !self.snapshots.is_empty() {
            let snap_dir = dir.join("snapshots");
            std::fs::create_dir_all(&snap_dir)?;
            for s in &self.snapshots {
                let path = snap_dir.join(format!("fault_{:06}.bin", s.step));
                let mut f = BufWriter::new(File::create(&path)?);
                s.write(&mut f)?;
                f.flush()?;
                files.push(path);
            }
        }
        let path = dir.join("summary.toml");
        std::fs::write(&path, toml::to_string(&self.summary).map_err(|e| Error::Config(e.to_string()))?)?;
        files.push(path);
        self.files = files;
        Ok(())
    }
}
