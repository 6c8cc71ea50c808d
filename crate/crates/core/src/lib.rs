//! Design and analysis of triple-scissor deployable ring truss antennas.
//!
//! * [`geometry`]: unit link synthesis and ring-level storage metrics
//! * [`kinematics`]: mobility count and the planar deployment kinematics
//! * [`dynamics`]: energy-method natural frequency and free oscillation
//! * [`materials`]: thermal screening, classification and scoring
//! * [`optimize`]: GA + SQP engine, curve surrogates, geometry optimization
//! * [`cli`]: subcommand runners behind the `scissortruss` binary

pub mod cli;
pub mod data;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod materials;
pub mod optimize;
pub mod plot;
pub mod report;

pub use error::{Error, Result};
pub use geometry::{design_metrics, stretched_length, synthesize_unit, AntennaDesign, DesignMetrics, UnitGeometry};
pub use kinematics::{check_mobility, deployment_profile, gruebler_mobility, solve_positions, LinkageCount};
pub use dynamics::{natural_frequency, simulate_oscillation, DynamicParams};
pub use materials::{select_material, MaterialRecord};
