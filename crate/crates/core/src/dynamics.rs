//! Energy-method model of the ring's deployment coordinate.
//!
//! Every unit contributes kinetic energy `m (R0^2 + L^2) theta_dot^2 / 2`,
//! elastic energy `k (R0 theta)^2 / 2` and gravitational energy `m g L theta`.
//! Setting `d(T + V)/dt = 0` gives the linear equation of motion
//!
//! ```text
//! theta'' + k R0^2 / (m (R0^2 + L^2)) theta + g L / (R0^2 + L^2) = 0
//! ```

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::stretched_length;

pub const STANDARD_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicParams {
    /// Mass of one unit (kg).
    pub mass: f64,
    /// Effective stiffness per unit (N/m).
    pub stiffness: f64,
    /// Ring radius (m).
    pub ring_radius: f64,
    /// Unit length parameter (m).
    pub unit_length: f64,
    /// Gravitational acceleration (m/s^2).
    pub gravity: f64,
    pub unit_count: u32,
}

impl Default for DynamicParams {
    /// Unit mass and stiffness on the 25 m, 12-unit ring.
    fn default() -> Self {
        DynamicParams {
            mass: 1.0,
            stiffness: 1.0,
            ring_radius: 12.5,
            unit_length: 6.47,
            gravity: STANDARD_GRAVITY,
            unit_count: 12,
        }
    }
}

impl DynamicParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mass > 0.0
            && self.stiffness >= 0.0
            && self.ring_radius > 0.0
            && self.unit_length >= 0.0
            && self.gravity >= 0.0
            && self.unit_count > 0;
        let finite = [
            self.mass,
            self.stiffness,
            self.ring_radius,
            self.unit_length,
            self.gravity,
        ]
        .iter()
        .all(|v| v.is_finite());
        if ok && finite {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid dynamic parameters {self:?}")))
        }
    }

    /// Parameters of a ring with diameter `aperture`: radius D/2, unit length
    /// equal to the unit chord.
    pub fn for_aperture(&self, aperture: f64) -> Result<Self> {
        Ok(DynamicParams {
            ring_radius: aperture / 2.0,
            unit_length: stretched_length(aperture, self.unit_count.max(2))?,
            ..*self
        })
    }

    fn inertia_radius_sq(&self) -> f64 {
        self.ring_radius * self.ring_radius + self.unit_length * self.unit_length
    }

    /// `omega_n^2` of the equation of motion.
    pub fn omega_sq(&self) -> f64 {
        self.stiffness * self.ring_radius * self.ring_radius / (self.mass * self.inertia_radius_sq())
    }

    /// Constant forcing term `g L / (R0^2 + L^2)`.
    pub fn gravity_term(&self) -> f64 {
        self.gravity * self.unit_length / self.inertia_radius_sq()
    }

    /// Static offset where elastic and gravitational torques balance.
    pub fn equilibrium_angle(&self) -> Option<f64> {
        if self.stiffness > 0.0 {
            Some(-self.mass * self.gravity * self.unit_length / (self.stiffness * self.ring_radius.powi(2)))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationState {
    pub theta: f64,
    pub theta_dot: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub kinetic: f64,
    pub elastic: f64,
    pub gravitational: f64,
}

impl Energy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.elastic + self.gravitational
    }
}

pub fn energy_components(s: &OscillationState, p: &DynamicParams) -> Energy {
    let n = p.unit_count as f64;
    Energy {
        kinetic: n / 2.0 * p.mass * p.inertia_radius_sq() * s.theta_dot * s.theta_dot,
        elastic: n / 2.0 * p.stiffness * p.ring_radius * p.ring_radius * s.theta * s.theta,
        gravitational: n * p.mass * p.gravity * p.unit_length * s.theta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalFrequency {
    pub omega_n: f64,
    pub f_n: f64,
    /// Zero stiffness: no restoring force, frequency reported as zero.
    pub degenerate: bool,
}

/// Undamped natural frequency of the deployment coordinate, gravity excluded.
pub fn natural_frequency(p: &DynamicParams) -> Result<NaturalFrequency> {
    p.validate()?;
    let omega_n = p.omega_sq().sqrt();
    Ok(NaturalFrequency {
        omega_n,
        f_n: omega_n / (2.0 * PI),
        degenerate: p.stiffness == 0.0,
    })
}

/// Affine one-step map `y -> P y + q` of the two-stage Gauss-Legendre method
/// applied to `y' = A y + b`.
struct GaussLegendreStep {
    p: Matrix2<f64>,
    q: Vector2<f64>,
}

impl GaussLegendreStep {
    fn new(a: Matrix2<f64>, b: Vector2<f64>, h: f64) -> Result<Self> {
        let r3 = 3f64.sqrt();
        let coef = [[0.25, 0.25 - r3 / 6.0], [0.25 + r3 / 6.0, 0.25]];
        let mut m = Matrix4::<f64>::identity();
        for i in 0..2 {
            for j in 0..2 {
                let block = -h * coef[i][j] * a;
                let mut view = m.fixed_view_mut::<2, 2>(2 * i, 2 * j);
                view += block;
            }
        }
        let lu = m.lu();
        // stages K = M^-1 (Ahat y + bhat)
        let mut ahat = nalgebra::Matrix4x2::<f64>::zeros();
        ahat.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
        ahat.fixed_view_mut::<2, 2>(2, 0).copy_from(&a);
        let bhat = Vector4::new(b.x, b.y, b.x, b.y);
        let k_y = lu
            .solve(&ahat)
            .ok_or_else(|| Error::Singular("Gauss-Legendre stage matrix".into()))?;
        let k_b = lu
            .solve(&bhat)
            .ok_or_else(|| Error::Singular("Gauss-Legendre stage matrix".into()))?;
        let sum_y = k_y.fixed_view::<2, 2>(0, 0) + k_y.fixed_view::<2, 2>(2, 0);
        let sum_b = k_b.fixed_view::<2, 1>(0, 0) + k_b.fixed_view::<2, 1>(2, 0);
        Ok(GaussLegendreStep {
            p: Matrix2::identity() + h / 2.0 * sum_y,
            q: h / 2.0 * sum_b,
        })
    }

    fn apply(&self, y: Vector2<f64>) -> Vector2<f64> {
        self.p * y + self.q
    }
}

/// Integrate the equation of motion (gravity included) with a fixed-step
/// fourth-order Gauss-Legendre scheme, sampling every `dt` up to `t_end`.
/// The scheme conserves the quadratic energy of this linear system exactly
/// up to round-off.
pub fn simulate_oscillation(
    p: &DynamicParams,
    s0: OscillationState,
    dt: f64,
    t_end: f64,
) -> Result<Vec<OscillationState>> {
    p.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    if !(t_end > dt) || !t_end.is_finite() {
        return Err(Error::Domain(format!(
            "end time {t_end} must exceed the time step {dt}"
        )));
    }
    let a = Matrix2::new(0.0, 1.0, -p.omega_sq(), 0.0);
    let b = Vector2::new(0.0, -p.gravity_term());
    let step = GaussLegendreStep::new(a, b, dt)?;
    let n = ((t_end - s0.t) / dt + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut y = Vector2::new(s0.theta, s0.theta_dot);
    out.push(OscillationState { t: s0.t, ..s0 });
    for i in 1..=n {
        y = step.apply(y);
        out.push(OscillationState {
            theta: y.x,
            theta_dot: y.y,
            t: s0.t + i as f64 * dt,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reference frequencies

/// One aperture row of the measured/simulated frequency table. The reported
/// natural frequency is kept verbatim since some entries are ranges or carry
/// unit-count annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReference {
    pub aperture_label: String,
    pub aperture_m: Option<f64>,
    pub natural_hz_text: String,
    pub sim_with_links_hz: Option<f64>,
    pub sim_without_links_hz: Option<f64>,
}

impl FrequencyReference {
    /// Reported natural frequency when it is a single plain number.
    pub fn natural_hz(&self) -> Option<f64> {
        self.natural_hz_text.trim().parse().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaFrequency {
    pub antenna_name: String,
    pub natural_hz: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub apertures: Vec<FrequencyReference>,
    pub antennas: Vec<AntennaFrequency>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub analytic_hz: Option<f64>,
    pub reported_hz: Option<f64>,
    pub sim_with_links_hz: Option<f64>,
    pub sim_without_links_hz: Option<f64>,
    pub rel_diff_with_links: Option<f64>,
    pub rel_diff_without_links: Option<f64>,
    /// Analytic and simulated values differ by more than `FLAG_THRESHOLD`.
    pub flagged: bool,
}

pub const FLAG_THRESHOLD: f64 = 0.5;

/// `|value - reference| / |reference|`.
pub fn relative_difference(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

/// Compare the analytic frequency of each tabulated aperture against the
/// simulated references. Antenna rows have no analytic counterpart and are
/// passed through.
pub fn compare_references(p: &DynamicParams, refs: &ReferenceSet) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::with_capacity(refs.apertures.len() + refs.antennas.len());
    for r in &refs.apertures {
        let analytic = match r.aperture_m {
            Some(d) => Some(natural_frequency(&p.for_aperture(d)?)?.f_n),
            None => None,
        };
        let diff = |sim: Option<f64>| match (analytic, sim) {
            (Some(a), Some(s)) if s > 0.0 => Some(relative_difference(a, s)),
            _ => None,
        };
        let with = diff(r.sim_with_links_hz);
        let without = diff(r.sim_without_links_hz);
        let flagged = [with, without]
            .iter()
            .flatten()
            .any(|d| *d > FLAG_THRESHOLD);
        rows.push(ComparisonRow {
            label: r.aperture_label.clone(),
            analytic_hz: analytic,
            reported_hz: r.natural_hz(),
            sim_with_links_hz: r.sim_with_links_hz,
            sim_without_links_hz: r.sim_without_links_hz,
            rel_diff_with_links: with,
            rel_diff_without_links: without,
            flagged,
        });
    }
    for a in &refs.antennas {
        rows.push(ComparisonRow {
            label: a.antenna_name.clone(),
            analytic_hz: None,
            reported_hz: Some(a.natural_hz),
            sim_with_links_hz: None,
            sim_without_links_hz: None,
            rel_diff_with_links: None,
            rel_diff_without_links: None,
            flagged: false,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference_params() -> DynamicParams {
        DynamicParams::default()
    }

    #[test]
    fn energies_at_rest_vanish() {
        let e = energy_components(&OscillationState { theta: 0.0, theta_dot: 0.0, t: 0.0 }, &reference_params());
        assert_eq!((e.kinetic, e.elastic, e.gravitational), (0.0, 0.0, 0.0));
    }

    #[test]
    fn energy_hand_values() {
        let p = DynamicParams { unit_length: 6.47, ..reference_params() };
        let e = energy_components(&OscillationState { theta: 0.1, theta_dot: 0.0, t: 0.0 }, &p);
        assert_relative_eq!(e.elastic, 9.375, max_relative = 1e-12);
        let e = energy_components(&OscillationState { theta: 0.0, theta_dot: 1.0, t: 0.0 }, &p);
        assert_relative_eq!(e.kinetic, 6.0 * (156.25 + 41.8609), max_relative = 1e-12);
        let e = energy_components(&OscillationState { theta: 0.2, theta_dot: 0.0, t: 0.0 }, &p);
        assert_relative_eq!(e.gravitational, 12.0 * 9.81 * 6.47 * 0.2, max_relative = 1e-12);
    }

    #[test]
    fn headline_frequency() {
        let f = natural_frequency(&reference_params()).unwrap();
        assert!((f.omega_n - 0.888).abs() < 1e-3);
        assert!((f.f_n - 0.1414).abs() < 2e-4);
        assert!(!f.degenerate);
    }

    #[test]
    fn frequency_limits() {
        let p = DynamicParams { unit_length: 0.0, stiffness: 4.0, mass: 2.0, ..reference_params() };
        assert_relative_eq!(natural_frequency(&p).unwrap().omega_n, 2f64.sqrt(), max_relative = 1e-12);
        let base = natural_frequency(&reference_params()).unwrap().omega_n;
        for c in [0.1, 3.0, 77.0] {
            let p = DynamicParams { ring_radius: 12.5 * c, unit_length: 6.47 * c, ..reference_params() };
            assert_relative_eq!(natural_frequency(&p).unwrap().omega_n, base, max_relative = 1e-12);
        }
        let zero = natural_frequency(&DynamicParams { stiffness: 0.0, ..reference_params() }).unwrap();
        assert!(zero.degenerate);
        assert_eq!(zero.omega_n, 0.0);
        assert!(natural_frequency(&DynamicParams { mass: 0.0, ..reference_params() }).is_err());
    }

    #[test]
    fn frequency_monotonicity() {
        let p = reference_params();
        let w = |q: DynamicParams| natural_frequency(&q).unwrap().omega_n;
        assert!(w(DynamicParams { stiffness: 2.0, ..p }) > w(p));
        assert!(w(DynamicParams { mass: 2.0, ..p }) < w(p));
    }

    #[test]
    fn free_oscillation_matches_cosine() {
        let p = DynamicParams { gravity: 0.0, ..reference_params() };
        let w = natural_frequency(&p).unwrap().omega_n;
        assert!((2.0 * PI / w - 7.075).abs() < 1e-3);
        let s0 = OscillationState { theta: 0.1, theta_dot: 0.0, t: 0.0 };
        let traj = simulate_oscillation(&p, s0, 0.01, 30.0).unwrap();
        assert_eq!(traj.len(), 3001);
        for s in &traj {
            assert!((s.theta - 0.1 * (w * s.t).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let p = reference_params();
        let eq = p.equilibrium_angle().unwrap();
        let traj = simulate_oscillation(&p, OscillationState { theta: eq, theta_dot: 0.0, t: 0.0 }, 0.05, 50.0).unwrap();
        for s in &traj {
            assert!((s.theta - eq).abs() < 1e-12);
            assert!(s.theta_dot.abs() < 1e-12);
        }
    }

    #[test]
    fn simulation_preconditions() {
        let s0 = OscillationState { theta: 0.1, theta_dot: 0.0, t: 0.0 };
        assert!(simulate_oscillation(&reference_params(), s0, 0.0, 1.0).is_err());
        assert!(simulate_oscillation(&reference_params(), s0, 0.1, 0.05).is_err());
    }

    #[test]
    fn unit_count_generalizes_prefactors() {
        let p = DynamicParams { unit_count: 24, ..reference_params() };
        let s = OscillationState { theta: 0.1, theta_dot: 0.3, t: 0.0 };
        let e24 = energy_components(&s, &p);
        let e12 = energy_components(&s, &reference_params());
        assert_relative_eq!(e24.total(), 2.0 * e12.total(), max_relative = 1e-12);
    }

    #[test]
    fn comparison_rows() {
        let refs = ReferenceSet {
            apertures: vec![FrequencyReference {
                aperture_label: "25".into(),
                aperture_m: Some(25.0),
                natural_hz_text: "0.0652".into(),
                sim_with_links_hz: Some(0.1182),
                sim_without_links_hz: Some(0.1774),
            }],
            antennas: vec![AntennaFrequency { antenna_name: "AstroMesh".into(), natural_hz: 0.012 }],
        };
        let rows = compare_references(&reference_params(), &refs).unwrap();
        let r = &rows[0];
        assert!((r.analytic_hz.unwrap() - 0.1414).abs() < 2e-4);
        assert!((r.rel_diff_with_links.unwrap() - 0.196).abs() < 1e-3);
        assert!(!r.flagged);
        assert_eq!(rows[1].analytic_hz, None);
        assert_eq!(rows[1].reported_hz, Some(0.012));
        assert!(compare_references(&reference_params(), &ReferenceSet::default()).unwrap().is_empty());
    }
}
