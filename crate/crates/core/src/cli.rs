//! Subcommand runners behind the `scissortruss` binary.
//!
//! Each runner reads an optional JSON config, writes its artifacts into the
//! output directory and returns a [`ReportBundle`]. Configs reject unknown
//! keys so typos surface as configuration errors.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::data::{DataSource, OptimizationReference};
use crate::dynamics::{
    compare_references, energy_components, natural_frequency, relative_difference, simulate_oscillation,
    ComparisonRow, DynamicParams, NaturalFrequency, OscillationState, STANDARD_GRAVITY,
};
use crate::error::{Error, Result};
use crate::geometry::{
    design_metrics, AntennaDesign, DesignMetrics, BASELINE_APERTURE_M, BASELINE_UNIT_COUNT, DEPLOYED_ANGLE_DEG,
    STOWED_ANGLE_DEG, TABLE_APERTURES_M,
};
use crate::kinematics::{
    check_mobility, deployment_profile, Direction, MobilityCheck, DEFAULT_SLIDER_SPEED, POINT_LABELS,
    TSDTM_CLAIMED_MOBILITY, TSDTM_COUNTS,
};
use crate::materials::{select_material, ClassifierReport, ScoreWeights, SelectionReport, ThermalRequirement};
use crate::optimize::geometry::{optimize_geometry, GeometryOutcome, GeometryProblem};
use crate::optimize::surrogate::{fit_kinematics_surrogate, CurveDataset, SurrogateConfig, SurrogateFit};
use crate::optimize::{compare_frequencies, FrequencyComparison};
use crate::plot::LineChart;
use crate::report::{text_table, write_json, write_text, Cell, Table};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Design,
    Analyze,
    Material,
    Optimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBundle {
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
    pub warnings: Vec<String>,
}

impl ReportBundle {
    fn csv(&mut self, out: &Path, name: &str, table: &Table) -> Result<()> {
        let path = out.join(name);
        table.write_csv(&path)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, out: &Path, name: &str, value: &T) -> Result<()> {
        let path = out.join(name);
        write_json(&path, value)?;
        self.artifacts.push(path);
        Ok(())
    }

    fn svg(&mut self, out: &Path, name: &str, chart: &LineChart) -> Result<()> {
        let path = out.join(name);
        write_text(&path, &chart.to_svg())?;
        self.artifacts.push(path);
        Ok(())
    }
}

/// Parse a JSON config, or fall back to `T::default()` when no path is given.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn run(cfg: &RunConfig) -> Result<ReportBundle> {
    let path = cfg.config.as_deref();
    match cfg.subcommand {
        Subcommand::Design => cmd_design(&load_config(path)?, &cfg.out),
        Subcommand::Analyze => cmd_analyze(&load_config(path)?, &cfg.out),
        Subcommand::Material => cmd_material(&load_config(path)?, &cfg.out),
        Subcommand::Optimize => {
            let mut oc: OptimizeConfig = load_config(path)?;
            if cfg.seed.is_some() || oc.seed.is_none() {
                oc.seed = Some(cfg.seed());
            }
            cmd_optimize(&oc, &cfg.out)
        }
    }
}

// ---------------------------------------------------------------------------
// design

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub apertures: Vec<f64>,
    #[serde(default = "default_unit_count")]
    pub unit_count: u32,
    /// Variants to emit; `true` means with horizontal links.
    #[serde(default = "both_variants")]
    pub with_links: Vec<bool>,
    #[serde(default = "default_deployed")]
    pub deployed_angle_deg: f64,
    #[serde(default = "default_stowed")]
    pub stowed_angle_deg: f64,
}

fn default_unit_count() -> u32 {
    BASELINE_UNIT_COUNT
}

fn both_variants() -> Vec<bool> {
    vec![true, false]
}

fn default_deployed() -> f64 {
    DEPLOYED_ANGLE_DEG
}

fn default_stowed() -> f64 {
    STOWED_ANGLE_DEG
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            apertures: TABLE_APERTURES_M.to_vec(),
            unit_count: default_unit_count(),
            with_links: both_variants(),
            deployed_angle_deg: DEPLOYED_ANGLE_DEG,
            stowed_angle_deg: STOWED_ANGLE_DEG,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct DesignReport {
    config: DesignConfig,
    designs: Vec<AntennaDesign>,
    metrics: Vec<DesignMetrics>,
    warnings: Vec<String>,
}

pub fn cmd_design(cfg: &DesignConfig, out: &Path) -> Result<ReportBundle> {
    if cfg.apertures.is_empty() {
        return Err(Error::Config("`apertures` must list at least one aperture".into()));
    }
    let mut designs = Vec::new();
    let mut metrics = Vec::new();
    let mut warnings = Vec::new();
    for &links in &cfg.with_links {
        for &d in &cfg.apertures {
            designs.push(AntennaDesign::new(d, cfg.unit_count, links, cfg.deployed_angle_deg, cfg.stowed_angle_deg)?);
            let m = design_metrics(d, cfg.unit_count, links)?;
            if m.extrapolated_unit_count {
                warnings.push(format!(
                    "{d} m with {} units: metrics extrapolated from the {BASELINE_UNIT_COUNT}-unit baseline",
                    cfg.unit_count
                ));
            }
            metrics.push(m);
        }
    }

    let mut units = Table::new(
        ["aperture_m", "unit_count", "with_links", "deployed_height", "stretched_length"]
            .into_iter()
            .map(String::from)
            .chain((1..=14).map(|i| format!("L{i}"))),
    );
    for d in &designs {
        let mut row: Vec<Cell> = vec![
            d.aperture.into(),
            d.unit_count.into(),
            d.with_links.into(),
            d.unit.deployed_height.into(),
            d.unit.stretched_length.into(),
        ];
        row.extend(d.unit.lengths.iter().map(|&l| Cell::from(l)));
        units.push(row)?;
    }
    let table = metrics_table(&metrics)?;

    prepare_out(out)?;
    let mut bundle = ReportBundle::default();
    bundle.csv(out, "design_units.csv", &units)?;
    bundle.csv(out, "design_metrics.csv", &table)?;
    let report = DesignReport { config: cfg.clone(), designs, metrics, warnings: warnings.clone() };
    bundle.json(out, "design.json", &report)?;
    bundle.summary = text_table(&table);
    bundle.warnings = warnings;
    Ok(bundle)
}

fn metrics_table(metrics: &[DesignMetrics]) -> Result<Table> {
    let mut t = Table::new([
        "aperture_m",
        "unit_count",
        "with_links",
        "stretched_length",
        "deployed_height",
        "stowed_height",
        "deployed_diameter",
        "stowed_diameter",
        "deployed_volume",
        "stowed_volume",
        "sr_diameter",
        "sr_height",
        "sr_volume",
    ]);
    for m in metrics {
        t.push(vec![
            m.aperture.into(),
            m.unit_count.into(),
            m.with_links.into(),
            m.stretched_length.into(),
            m.deployed_height.into(),
            m.stowed_height.into(),
            m.deployed_diameter.into(),
            m.stowed_diameter.into(),
            m.deployed_volume.into(),
            m.stowed_volume.into(),
            m.sr_diameter.into(),
            m.sr_height.into(),
            m.sr_volume.into(),
        ])?;
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub mass: f64,
    pub stiffness: f64,
    pub gravity: f64,
    /// Overrides D/2.
    pub ring_radius: Option<f64>,
    /// Overrides the unit chord.
    pub unit_length: Option<f64>,
    /// Free-oscillation run length in natural periods; 0 skips it.
    pub simulate_periods: f64,
    pub steps_per_period: usize,
    pub initial_angle: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection {
            mass: 1.0,
            stiffness: 1.0,
            gravity: STANDARD_GRAVITY,
            ring_radius: None,
            unit_length: None,
            simulate_periods: 10.0,
            steps_per_period: 200,
            initial_angle: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub aperture: f64,
    pub unit_count: u32,
    pub with_links: bool,
    pub deployed_angle_deg: f64,
    pub stowed_angle_deg: f64,
    pub slider_speed: f64,
    pub direction: Direction,
    pub samples: usize,
    pub point: String,
    pub dynamics: DynamicsSection,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            aperture: BASELINE_APERTURE_M,
            unit_count: BASELINE_UNIT_COUNT,
            with_links: true,
            deployed_angle_deg: DEPLOYED_ANGLE_DEG,
            stowed_angle_deg: STOWED_ANGLE_DEG,
            slider_speed: DEFAULT_SLIDER_SPEED,
            direction: Direction::Deploy,
            samples: 201,
            point: "F".into(),
            dynamics: DynamicsSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct DeploymentTimeRow {
    mechanism: String,
    aperture_m: f64,
    units: u32,
    deployed_s: Option<f64>,
    full_cycle_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct OscillationSummary {
    duration: f64,
    dt: f64,
    steps: usize,
    initial_energy: f64,
    max_relative_energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct AnalyzeReport {
    config: AnalyzeConfig,
    design: AntennaDesign,
    mobility: MobilityCheck,
    dynamics: DynamicParams,
    natural_frequency: NaturalFrequency,
    equilibrium_angle: Option<f64>,
    deploy_duration_s: f64,
    full_cycle_duration_s: f64,
    profile_samples: usize,
    deployment_times: Vec<DeploymentTimeRow>,
    frequency_comparison: Vec<ComparisonRow>,
    oscillation: Option<OscillationSummary>,
    warnings: Vec<String>,
}

pub fn cmd_analyze(cfg: &AnalyzeConfig, out: &Path) -> Result<ReportBundle> {
    if !POINT_LABELS.contains(&cfg.point.as_str()) {
        return Err(Error::Config(format!(
            "`point` must be one of {POINT_LABELS:?}, got `{}`",
            cfg.point
        )));
    }
    let design = AntennaDesign::new(
        cfg.aperture,
        cfg.unit_count,
        cfg.with_links,
        cfg.deployed_angle_deg,
        cfg.stowed_angle_deg,
    )?;
    let mut warnings = Vec::new();
    let mobility = check_mobility(TSDTM_COUNTS, Some(TSDTM_CLAIMED_MOBILITY));
    warnings.extend(mobility.warning.clone());

    let ds = &cfg.dynamics;
    let base = DynamicParams {
        mass: ds.mass,
        stiffness: ds.stiffness,
        gravity: ds.gravity,
        unit_count: cfg.unit_count,
        ..DynamicParams::default()
    };
    let mut params = base.for_aperture(cfg.aperture)?;
    if let Some(r) = ds.ring_radius {
        params.ring_radius = r;
    }
    if let Some(l) = ds.unit_length {
        params.unit_length = l;
    }
    let nf = natural_frequency(&params)?;

    let profile = deployment_profile(&design.unit, cfg.slider_speed, cfg.direction, cfg.samples)?;
    let leg = deployment_profile(&design.unit, cfg.slider_speed, Direction::Deploy, 0)?.total_duration;
    let curves = profile.curves(&cfg.point)?;

    let source = DataSource::from_env();
    let refs = source.reference_set()?;
    let comparison = compare_references(&base, &refs)?;
    let mut deployment_times: Vec<DeploymentTimeRow> = source
        .deployment_times()?
        .into_iter()
        .map(|r| DeploymentTimeRow {
            mechanism: r.mechanism,
            aperture_m: r.aperture_m,
            units: r.units,
            deployed_s: r.deployed_s,
            full_cycle_s: r.full_cycle_s,
        })
        .collect();
    deployment_times.push(DeploymentTimeRow {
        mechanism: "model".into(),
        aperture_m: cfg.aperture,
        units: cfg.unit_count,
        deployed_s: Some(leg),
        full_cycle_s: Some(2.0 * leg),
    });

    let mut osc_table = Table::new(["t", "theta", "theta_dot", "kinetic", "elastic", "gravitational", "total"]);
    let oscillation = if ds.simulate_periods > 0.0 && nf.omega_n > 0.0 {
        if ds.steps_per_period == 0 {
            return Err(Error::Config("`steps_per_period` must be positive".into()));
        }
        let period = 1.0 / nf.f_n;
        let dt = period / ds.steps_per_period as f64;
        let s0 = OscillationState { theta: ds.initial_angle, theta_dot: 0.0, t: 0.0 };
        let traj = simulate_oscillation(&params, s0, dt, ds.simulate_periods * period)?;
        let e0 = energy_components(&traj[0], &params).total();
        let mut drift = 0.0f64;
        for s in &traj {
            let e = energy_components(s, &params);
            drift = drift.max(relative_difference(e.total(), e0));
            osc_table.push(vec![
                s.t.into(),
                s.theta.into(),
                s.theta_dot.into(),
                e.kinetic.into(),
                e.elastic.into(),
                e.gravitational.into(),
                e.total().into(),
            ])?;
        }
        Some(OscillationSummary {
            duration: traj.last().map_or(0.0, |s| s.t),
            dt,
            steps: traj.len() - 1,
            initial_energy: e0,
            max_relative_energy_drift: drift,
        })
    } else {
        None
    };

    let mut prof = Table::new([
        "t",
        "slider",
        "theta",
        "theta_dot",
        "theta_ddot",
        "linear_velocity",
        "angular_velocity",
        "linear_acceleration",
        "angular_acceleration",
    ]);
    for (i, s) in profile.samples.iter().enumerate() {
        prof.push(vec![
            s.t.into(),
            s.state.slider.into(),
            s.state.theta.into(),
            s.state.theta_dot.into(),
            s.state.theta_ddot.into(),
            curves.linear_velocity[i].into(),
            curves.angular_velocity[i].into(),
            curves.linear_acceleration[i].into(),
            curves.angular_acceleration[i].into(),
        ])?;
    }
    let mut cmp = Table::new([
        "label",
        "analytic_hz",
        "reported_hz",
        "sim_with_links_hz",
        "sim_without_links_hz",
        "rel_diff_with_links",
        "rel_diff_without_links",
        "flagged",
    ]);
    for r in &comparison {
        cmp.push(vec![
            r.label.clone().into(),
            r.analytic_hz.into(),
            r.reported_hz.into(),
            r.sim_with_links_hz.into(),
            r.sim_without_links_hz.into(),
            r.rel_diff_with_links.into(),
            r.rel_diff_without_links.into(),
            r.flagged.into(),
        ])?;
    }
    let mut times = Table::new(["mechanism", "aperture_m", "units", "deployed_s", "full_cycle_s"]);
    for r in &deployment_times {
        times.push(vec![
            r.mechanism.clone().into(),
            r.aperture_m.into(),
            r.units.into(),
            r.deployed_s.into(),
            r.full_cycle_s.into(),
        ])?;
    }

    prepare_out(out)?;
    let mut bundle = ReportBundle::default();
    bundle.csv(out, "profile.csv", &prof)?;
    bundle.csv(out, "frequency_comparison.csv", &cmp)?;
    bundle.csv(out, "deployment_times.csv", &times)?;
    if oscillation.is_some() {
        bundle.csv(out, "oscillation.csv", &osc_table)?;
    }
    let charts = [
        ("linear_velocity.svg", "Linear velocity", "m/s", &curves.linear_velocity),
        ("angular_velocity.svg", "Angular velocity", "rad/s", &curves.angular_velocity),
        ("linear_acceleration.svg", "Linear acceleration", "m/s^2", &curves.linear_acceleration),
        ("angular_acceleration.svg", "Angular acceleration", "rad/s^2", &curves.angular_acceleration),
    ];
    for (name, title, unit, y) in charts {
        let chart = LineChart::new(&format!("{title} of point {}", cfg.point), "t (s)", unit).with_series(
            &cfg.point,
            curves.t.clone(),
            y.clone(),
        );
        bundle.svg(out, name, &chart)?;
    }

    let report = AnalyzeReport {
        config: cfg.clone(),
        design,
        mobility: mobility.clone(),
        dynamics: params,
        natural_frequency: nf,
        equilibrium_angle: params.equilibrium_angle(),
        deploy_duration_s: leg,
        full_cycle_duration_s: 2.0 * leg,
        profile_samples: profile.samples.len(),
        deployment_times,
        frequency_comparison: comparison,
        oscillation,
        warnings: warnings.clone(),
    };
    bundle.json(out, "analyze.json", &report)?;
    bundle.summary = format!(
        "mobility (Gruebler): {}\nomega_n = {:.4} rad/s\nf_n = {:.4} Hz\ndeployment time: {:.2} s (full cycle {:.2} s)\n",
        mobility.mobility,
        nf.omega_n,
        nf.f_n,
        leg,
        2.0 * leg
    );
    bundle.warnings = warnings;
    Ok(bundle)
}

// ---------------------------------------------------------------------------
// material

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialConfig {
    /// Material CSV; the bundled table when absent.
    pub database: Option<PathBuf>,
    pub t_max_req: f64,
    pub t_min_req: f64,
    pub weights: ScoreWeights,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        let req = ThermalRequirement::default();
        MaterialConfig {
            database: None,
            t_max_req: req.t_max_req,
            t_min_req: req.t_min_req,
            weights: ScoreWeights::default(),
        }
    }
}

pub fn cmd_material(cfg: &MaterialConfig, out: &Path) -> Result<ReportBundle> {
    let db = match &cfg.database {
        Some(p) => crate::data::load_materials(p)?,
        None => DataSource::from_env().materials()?,
    };
    let report: SelectionReport = select_material(
        &db,
        ThermalRequirement { t_max_req: cfg.t_max_req, t_min_req: cfg.t_min_req },
        cfg.weights,
    )?;
    let mut warnings: Vec<String> = report
        .flags
        .iter()
        .filter(|f| f.passed && f.min_temp_unverified)
        .map(|f| format!("{}: minimum service temperature not tabulated", f.name))
        .collect();
    if let ClassifierReport::Failed { reason } = &report.classifier {
        warnings.push(format!("classifier not trained: {reason}"));
    }

    let mut scores = Table::new(["rank", "name", "score", "tensile", "modulus", "density"]);
    for (i, s) in report.ranked.iter().enumerate() {
        scores.push(vec![
            (i + 1).into(),
            s.name.clone().into(),
            s.score.into(),
            s.tensile_contribution.into(),
            s.modulus_contribution.into(),
            s.density_contribution.into(),
        ])?;
    }
    let mut screen = Table::new(["name", "passed", "min_temp_unverified", "reason"]);
    for f in &report.flags {
        screen.push(vec![
            f.name.clone().into(),
            f.passed.into(),
            f.min_temp_unverified.into(),
            f.reason.clone().map_or(Cell::Empty, Cell::from),
        ])?;
    }

    prepare_out(out)?;
    let mut bundle = ReportBundle::default();
    bundle.json(out, "selection.json", &report)?;
    bundle.csv(out, "material_scores.csv", &scores)?;
    bundle.csv(out, "thermal_screen.csv", &screen)?;
    bundle.summary = format!("selected material: {}\n{}", report.winner.name, text_table(&scores));
    bundle.warnings = warnings;
    Ok(bundle)
}

// ---------------------------------------------------------------------------
// optimize

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateTask {
    pub aperture: f64,
    pub with_links: bool,
    pub slider_speed: f64,
    pub samples: usize,
    pub point: String,
    pub fit: SurrogateConfig,
}

impl Default for SurrogateTask {
    fn default() -> Self {
        SurrogateTask {
            aperture: BASELINE_APERTURE_M,
            with_links: true,
            slider_speed: DEFAULT_SLIDER_SPEED,
            samples: 101,
            point: "F".into(),
            fit: SurrogateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub seed: Option<u64>,
    pub surrogate: Option<SurrogateTask>,
    pub geometry: Option<GeometryProblem>,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            seed: None,
            surrogate: Some(SurrogateTask::default()),
            geometry: Some(GeometryProblem::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SurrogateReport {
    curve_scales: [f64; 4],
    time_scale: f64,
    fit: SurrogateFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct GeometryReport {
    outcome: GeometryOutcome,
    reference: OptimizationReference,
    reference_comparison: FrequencyComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct OptimizeReport {
    config: OptimizeConfig,
    surrogate: Option<SurrogateReport>,
    geometry: Option<GeometryReport>,
}

pub fn cmd_optimize(cfg: &OptimizeConfig, out: &Path) -> Result<ReportBundle> {
    let mut warnings = Vec::new();
    let mut summary = String::new();
    let reference = DataSource::from_env().optimization_reference()?;

    let geometry = match &cfg.geometry {
        Some(problem) => {
            let outcome = optimize_geometry(problem)?;
            warnings.extend(outcome.warnings.iter().cloned());
            let cmp = compare_frequencies(reference.optimized_frequency_hz, reference.simulated_frequency_hz)?;
            summary += &format!(
                "geometry: R = {:.4} m, link scale = {:.4}, f_n = {:.6} Hz ({:?})\n\
                 reference: {} Hz predicted vs {} Hz simulated, relative difference {:.2}%\n",
                outcome.radius,
                outcome.link_scale,
                outcome.frequency_hz,
                outcome.stop,
                cmp.predicted_hz,
                cmp.simulated_hz,
                cmp.percent
            );
            Some(GeometryReport { outcome, reference: reference.clone(), reference_comparison: cmp })
        }
        None => None,
    };

    let surrogate = match &cfg.surrogate {
        Some(task) => {
            if !POINT_LABELS.contains(&task.point.as_str()) {
                return Err(Error::Config(format!("unknown point `{}`", task.point)));
            }
            let design = AntennaDesign::new(
                task.aperture,
                BASELINE_UNIT_COUNT,
                task.with_links,
                DEPLOYED_ANGLE_DEG,
                STOWED_ANGLE_DEG,
            )?;
            let profile = deployment_profile(&design.unit, task.slider_speed, Direction::Deploy, task.samples)?;
            let ds = CurveDataset::from_profile(&profile, &task.point)?;
            let mut fit_cfg = task.fit.clone();
            if let Some(seed) = cfg.seed {
                fit_cfg.ga.seed = seed;
            }
            let fit = fit_kinematics_surrogate(&ds, &fit_cfg)?;
            warnings.extend(fit.warnings.iter().cloned());
            summary += &format!(
                "surrogate MSE (LV, AV, LA, AA): {:.3e} {:.3e} {:.3e} {:.3e} (best of {} runs)\n",
                fit.block_fitness[0],
                fit.block_fitness[1],
                fit.block_fitness[2],
                fit.block_fitness[3],
                fit.runs.len()
            );
            Some(SurrogateReport { curve_scales: ds.scales, time_scale: ds.time_scale, fit })
        }
        None => None,
    };

    prepare_out(out)?;
    let mut bundle = ReportBundle::default();
    if let Some(s) = &surrogate {
        let mut trace = Table::new(["phase", "step", "fitness"]);
        for (g, f) in s.fit.ga_trace.iter().enumerate() {
            trace.push(vec!["ga".into(), g.into(), (*f).into()])?;
        }
        for (name, tr) in crate::optimize::nn::BLOCK_NAMES.iter().zip(&s.fit.refine_traces) {
            for (k, f) in tr.iter().enumerate() {
                trace.push(vec![format!("sqp_{name}").into(), k.into(), (*f).into()])?;
            }
        }
        bundle.csv(out, "fitness_trace.csv", &trace)?;
        let mut runs = Table::new(["run", "seed", "ga_fitness", "fitness", "lv", "av", "la", "aa", "generations", "function_evals"]);
        for r in &s.fit.runs {
            runs.push(vec![
                r.run.into(),
                Cell::Text(r.seed.to_string()),
                r.ga_fitness.into(),
                r.fitness.into(),
                r.block_fitness[0].into(),
                r.block_fitness[1].into(),
                r.block_fitness[2].into(),
                r.block_fitness[3].into(),
                r.generations.into(),
                (r.ga_evaluations + r.refine_evaluations).into(),
            ])?;
        }
        bundle.csv(out, "surrogate_runs.csv", &runs)?;
    }
    if let Some(g) = &geometry {
        let mut trace = Table::new(["iteration", "f_n_hz"]);
        for (k, f) in g.outcome.trace.iter().enumerate() {
            trace.push(vec![k.into(), (*f).into()])?;
        }
        bundle.csv(out, "geometry_trace.csv", &trace)?;
        let mut cons = Table::new(["constraint", "slack", "satisfied"]);
        for c in &g.outcome.constraints {
            cons.push(vec![c.name.clone().into(), c.slack.into(), c.satisfied.into()])?;
        }
        bundle.csv(out, "constraints.csv", &cons)?;
    }
    let report = OptimizeReport { config: cfg.clone(), surrogate, geometry };
    bundle.json(out, "optimize.json", &report)?;
    bundle.summary = summary;
    bundle.warnings = warnings;
    Ok(bundle)
}
