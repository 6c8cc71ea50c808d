//! Bundled reference datasets and their loaders.
//!
//! Every dataset is compiled into the library; setting `SCISSORTRUSS_DATA`
//! to a directory makes the loaders read the same file names from disk
//! instead.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{AntennaFrequency, FrequencyReference, ReferenceSet};
use crate::error::{Error, Result};
use crate::kinematics::DeploymentTimeReference;
use crate::materials::MaterialRecord;

pub const DATA_ENV: &str = "SCISSORTRUSS_DATA";

pub const MATERIALS_CSV: &str = "materials.csv";
pub const FREQUENCY_REFERENCE_CSV: &str = "frequency_reference.csv";
pub const ANTENNA_FREQUENCIES_CSV: &str = "antenna_frequencies.csv";
pub const DEPLOYMENT_TIMES_CSV: &str = "deployment_times.csv";
pub const DESIGN_TABLES_CSV: &str = "design_tables.csv";
pub const UNIT_COUNT_TABLE_CSV: &str = "unit_count_table.csv";
pub const OPTIMIZATION_REFERENCE_JSON: &str = "optimization_reference.json";

const BUNDLED: [(&str, &str); 7] = [
    (MATERIALS_CSV, include_str!("../data/materials.csv")),
    (FREQUENCY_REFERENCE_CSV, include_str!("../data/frequency_reference.csv")),
    (ANTENNA_FREQUENCIES_CSV, include_str!("../data/antenna_frequencies.csv")),
    (DEPLOYMENT_TIMES_CSV, include_str!("../data/deployment_times.csv")),
    (DESIGN_TABLES_CSV, include_str!("../data/design_tables.csv")),
    (UNIT_COUNT_TABLE_CSV, include_str!("../data/unit_count_table.csv")),
    (
        OPTIMIZATION_REFERENCE_JSON,
        include_str!("../data/optimization_reference.json"),
    ),
];

/// Where datasets are read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Bundled,
    Dir(PathBuf),
}

impl DataSource {
    /// `SCISSORTRUSS_DATA` when set, the bundled copies otherwise.
    pub fn from_env() -> Self {
        match std::env::var_os(DATA_ENV) {
            Some(dir) if !dir.is_empty() => DataSource::Dir(PathBuf::from(dir)),
            _ => DataSource::Bundled,
        }
    }

    pub fn read(&self, name: &str) -> Result<String> {
        match self {
            DataSource::Bundled => BUNDLED
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, body)| (*body).to_string())
                .ok_or_else(|| {
                    Error::io(
                        name,
                        std::io::Error::new(std::io::ErrorKind::NotFound, "no bundled dataset"),
                    )
                }),
            DataSource::Dir(dir) => {
                let path = dir.join(name);
                std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
            }
        }
    }

    pub fn materials(&self) -> Result<Vec<MaterialRecord>> {
        parse_csv(&self.read(MATERIALS_CSV)?)
    }

    pub fn reference_set(&self) -> Result<ReferenceSet> {
        let rows: Vec<FrequencyRow> = parse_csv(&self.read(FREQUENCY_REFERENCE_CSV)?)?;
        let antennas: Vec<AntennaFrequency> = parse_csv(&self.read(ANTENNA_FREQUENCIES_CSV)?)?;
        Ok(ReferenceSet {
            apertures: rows.into_iter().map(FrequencyRow::into_reference).collect(),
            antennas,
        })
    }

    pub fn deployment_times(&self) -> Result<Vec<DeploymentTimeReference>> {
        parse_csv(&self.read(DEPLOYMENT_TIMES_CSV)?)
    }

    pub fn design_tables(&self) -> Result<Vec<DesignTableRow>> {
        parse_csv(&self.read(DESIGN_TABLES_CSV)?)
    }

    pub fn unit_count_table(&self) -> Result<Vec<UnitCountRow>> {
        parse_csv(&self.read(UNIT_COUNT_TABLE_CSV)?)
    }

    pub fn optimization_reference(&self) -> Result<OptimizationReference> {
        Ok(serde_json::from_str(&self.read(OPTIMIZATION_REFERENCE_JSON)?)?)
    }
}

fn parse_csv<T: for<'de> Deserialize<'de>>(body: &str) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Load a material table from an arbitrary CSV file.
pub fn load_materials(path: impl AsRef<Path>) -> Result<Vec<MaterialRecord>> {
    let body = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
    parse_csv(&body)
}

pub fn bundled_materials() -> Result<Vec<MaterialRecord>> {
    DataSource::Bundled.materials()
}

#[derive(Debug, Deserialize)]
struct FrequencyRow {
    aperture_m: String,
    natural_hz: String,
    sim_with_links_hz: Option<f64>,
    sim_without_links_hz: Option<f64>,
}

impl FrequencyRow {
    fn into_reference(self) -> FrequencyReference {
        FrequencyReference {
            aperture_m: self.aperture_m.trim().parse().ok(),
            aperture_label: self.aperture_m,
            natural_hz_text: self.natural_hz,
            sim_with_links_hz: self.sim_with_links_hz,
            sim_without_links_hz: self.sim_without_links_hz,
        }
    }
}

/// A tabulated design-metrics row (with or without links).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignTableRow {
    pub with_links: bool,
    pub aperture_m: f64,
    pub stretched_length: f64,
    pub deployed_height: f64,
    pub stowed_height: f64,
    pub deployed_diameter: f64,
    pub stowed_diameter: f64,
    pub deployed_volume: f64,
    pub stowed_volume: f64,
    pub sr_diameter: f64,
    pub sr_height: f64,
    pub sr_volume: f64,
}

/// A tabulated row of the 25 m aperture built from different unit counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitCountRow {
    pub units: u32,
    pub stretched_length: f64,
    pub deployed_height: f64,
    pub stowed_height: f64,
    pub deployed_diameter: f64,
    pub stowed_diameter: f64,
    pub deployed_volume: f64,
    pub stowed_volume: f64,
    pub sr_diameter: f64,
    pub sr_height: f64,
    pub sr_volume: f64,
}

/// Published geometry-optimization outcome, kept for comparison only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReference {
    pub original_diameter_m: f64,
    pub optimized_diameter_m: f64,
    pub optimized_radius_m: f64,
    pub optimized_frequency_hz: f64,
    pub simulated_frequency_hz: f64,
    pub original_lengths_m: Vec<f64>,
    pub optimized_lengths_m: Vec<f64>,
}
