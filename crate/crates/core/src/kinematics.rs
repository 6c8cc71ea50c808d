//! Mobility counting and planar kinematics of a single modular unit.
//!
//! Planar model (x along the chord, y vertical, origin at the fixed base
//! point `O`): the central scissor L1/L2 stands on two folding bottom links
//! L5/L6 hinged at `O`, and carries two folding top links L3/L4 joined at the
//! top midpoint. The horizontal links lie flat only when the scissor reaches
//! its deployed angle; while stowed they fold outward, which is why the stowed
//! envelope with links is taller than the bare scissor.
//!
//! The unit is driven by the slider travel `h`: the height of the scissor
//! feet above `O`. `h` falls from its stowed value to zero during deployment.
//!
//! Point chain (each point is reached from its parent through one rigid link):
//!
//! | label | point                  | parent | link                |
//! |-------|------------------------|--------|---------------------|
//! | O     | fixed base midpoint    | -      | -                   |
//! | A     | right scissor foot     | O      | bottom link L6      |
//! | B     | left scissor foot      | O      | bottom link L5      |
//! | C     | central scissor pivot  | A      | lower half of L2    |
//! | D     | left scissor head      | C      | upper half of L2    |
//! | E     | right scissor head     | C      | upper half of L1    |
//! | F     | top midpoint           | D      | top link L3         |
//!
//! The halved scissor generations (L7..L14) follow the same opening angle
//! and add no independent coordinate, so they are not tracked as points.


use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::UnitGeometry;

pub type Vec2 = Vector2<f64>;

/// Default slider speed during deployment.
pub const DEFAULT_SLIDER_SPEED: f64 = 0.1;

// ---------------------------------------------------------------------------
// Mobility

/// Link and joint counts of a planar mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageCount {
    pub n: u32,
    pub jp: u32,
    pub jh: u32,
}

impl LinkageCount {
    pub fn new(n: u32, jp: u32, jh: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "a linkage needs at least 2 links, got {n}"
            )));
        }
        Ok(LinkageCount { n, jp, jh })
    }
}

/// Link/joint counts quoted for the full truss.
pub const TSDTM_COUNTS: LinkageCount = LinkageCount {
    n: 18,
    jp: 26,
    jh: 0,
};
/// Degree of freedom claimed for the full truss alongside those counts.
pub const TSDTM_CLAIMED_MOBILITY: i64 = 1;

/// Planar mobility `3(n - 1) - 2 jp - jh`. Zero or negative means a
/// structure or an overconstrained linkage.
pub fn gruebler_mobility(c: LinkageCount) -> i64 {
    3 * (c.n as i64 - 1) - 2 * c.jp as i64 - c.jh as i64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityCheck {
    pub counts: LinkageCount,
    pub mobility: i64,
    pub claimed: Option<i64>,
    pub warning: Option<String>,
}

/// Evaluate the mobility formula and compare it against a claimed value.
pub fn check_mobility(counts: LinkageCount, claimed: Option<i64>) -> MobilityCheck {
    let mobility = gruebler_mobility(counts);
    let warning = match claimed {
        Some(c) if c != mobility => Some(format!(
            "claimed mobility {c} does not follow from n = {}, jp = {}, jh = {}: \
             3({} - 1) - 2({}) - {} = {mobility}",
            counts.n, counts.jp, counts.jh, counts.n, counts.jp, counts.jh
        )),
        _ => None,
    };
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    MobilityCheck {
        counts,
        mobility,
        claimed,
        warning,
    }
}

// ---------------------------------------------------------------------------
// Point model

pub const POINT_LABELS: [&str; 7] = ["O", "A", "B", "C", "D", "E", "F"];
const PARENTS: [Option<usize>; 7] = [None, Some(0), Some(0), Some(1), Some(3), Some(3), Some(4)];

/// Which generalized angle a link of the chain rotates with.
#[derive(Clone, Copy)]
enum LinkAngle {
    /// Bottom/top link at fold angle `phi`.
    Fold,
    /// Mirror of `Fold`: angle `pi - phi`.
    FoldMirror,
    /// Link L2: angle `pi/2 + theta/2`.
    OpeningLeft,
    /// Link L1: angle `pi/2 - theta/2`.
    OpeningRight,
}

const LINKS: [Option<LinkAngle>; 7] = [
    None,
    Some(LinkAngle::Fold),
    Some(LinkAngle::FoldMirror),
    Some(LinkAngle::OpeningLeft),
    Some(LinkAngle::OpeningLeft),
    Some(LinkAngle::OpeningRight),
    Some(LinkAngle::Fold),
];

/// Direction of travel of the slider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Deploy,
    Stow,
    FullCycle,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deploy" => Ok(Direction::Deploy),
            "stow" => Ok(Direction::Stow),
            "full-cycle" => Ok(Direction::FullCycle),
            other => Err(Error::Config(format!(
                "unknown direction `{other}` (expected deploy, stow or full-cycle)"
            ))),
        }
    }
}

/// Generalized coordinates of the unit and their first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveState {
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    pub phi: f64,
    pub phi_dot: f64,
    pub phi_ddot: f64,
}

impl DriveState {
    fn link(&self, which: LinkAngle) -> (f64, f64) {
        match which {
            LinkAngle::Fold => (self.phi_dot, self.phi_ddot),
            LinkAngle::FoldMirror => (-self.phi_dot, -self.phi_ddot),
            LinkAngle::OpeningLeft => (self.theta_dot / 2.0, self.theta_ddot / 2.0),
            LinkAngle::OpeningRight => (-self.theta_dot / 2.0, -self.theta_ddot / 2.0),
        }
    }
}

/// Unit dimensions needed by the planar model.
#[derive(Debug, Clone, Copy)]
struct Dims {
    main: f64,
    horizontal: f64,
}

impl Dims {
    fn of(unit: &UnitGeometry) -> Self {
        Dims {
            main: unit.main_link(),
            horizontal: unit.horizontal_link(),
        }
    }

    /// Half spread of the scissor feet at opening angle `theta`.
    fn half_spread(&self, theta: f64) -> f64 {
        self.main * (theta / 2.0).sin() / 2.0
    }
}

fn positions_from(d: Dims, x: f64, h: f64) -> Vec<Vec2> {
    let rise = 2.0 * (d.main / 2.0 * (d.main / 2.0) - x * x).max(0.0).sqrt();
    let a = Vec2::new(x, h);
    let b = Vec2::new(-x, h);
    let c = Vec2::new(0.0, h + rise / 2.0);
    let dd = Vec2::new(-x, h + rise);
    let e = Vec2::new(x, h + rise);
    let f = Vec2::new(0.0, 2.0 * h + rise);
    vec![Vec2::zeros(), a, b, c, dd, e, f]
}

/// Slider travel at opening angle `theta` (non-negative branch).
pub fn slider_at_angle(unit: &UnitGeometry, theta: f64) -> f64 {
    let d = Dims::of(unit);
    let x = d.half_spread(theta);
    (d.horizontal * d.horizontal - x * x).max(0.0).sqrt()
}

fn check_angle(unit: &UnitGeometry, theta: f64) -> Result<()> {
    let lo = unit.stowed_angle_rad();
    let hi = unit.deployed_angle_rad();
    let slack = 1e-12 * hi;
    if theta < lo - slack {
        return Err(Error::Range(format!(
            "angle {:.6} deg is below the stowed angle {:.6} deg",
            theta.to_degrees(),
            unit.stowed_angle_deg
        )));
    }
    if theta > hi + slack {
        return Err(Error::Range(format!(
            "angle {:.6} deg exceeds the deployed angle {:.6} deg",
            theta.to_degrees(),
            unit.deployed_angle_deg
        )));
    }
    Ok(())
}

/// Planar coordinates of points O..F at scissor opening angle `theta` (radians).
pub fn solve_positions(unit: &UnitGeometry, theta: f64) -> Result<Vec<Vec2>> {
    check_angle(unit, theta)?;
    let d = Dims::of(unit);
    let x = d.half_spread(theta.min(unit.deployed_angle_rad()));
    let h = slider_at_angle(unit, theta);
    Ok(positions_from(d, x, h))
}

/// Planar coordinates at slider travel `h`. Negative `h` folds the
/// horizontal links the other way; `|h|` may not exceed the link length.
pub fn positions_at_slider(unit: &UnitGeometry, h: f64) -> Result<Vec<Vec2>> {
    let d = Dims::of(unit);
    if h.abs() > d.horizontal {
        return Err(Error::Range(format!(
            "slider travel {h} exceeds horizontal link length {}",
            d.horizontal
        )));
    }
    let x = (d.horizontal * d.horizontal - h * h).sqrt();
    Ok(positions_from(d, x, h))
}

/// Height of the bare scissor at opening angle `theta`.
pub fn scissor_height(unit: &UnitGeometry, theta: f64) -> f64 {
    2.0 * unit.half_link() * (theta / 2.0).cos()
}

/// Drive coordinates and rates at slider travel `h` moving with velocity
/// `h_dot` (constant, so `h_ddot = 0`).
pub fn drive_at_slider(unit: &UnitGeometry, h: f64, h_dot: f64) -> Result<DriveState> {
    let d = Dims::of(unit);
    let l3 = d.horizontal;
    if h.abs() > l3 {
        return Err(Error::Range(format!(
            "slider travel {h} exceeds horizontal link length {l3}"
        )));
    }
    let x = (l3 * l3 - h * h).sqrt();
    if x <= 0.0 {
        return Err(Error::Singular(
            "scissor feet coincide; opening rate is undefined".into(),
        ));
    }
    let sin_half = (2.0 * x / d.main).min(1.0);
    let theta = 2.0 * sin_half.asin();
    let cos_half = (theta / 2.0).cos();
    let x_dot = -h * h_dot / x;
    let x_ddot = -h_dot * h_dot * l3 * l3 / (x * x * x);
    let theta_dot = 4.0 * x_dot / (d.main * cos_half);
    let theta_ddot = (4.0 * x_ddot / d.main + sin_half / 2.0 * theta_dot * theta_dot) / cos_half;
    Ok(DriveState {
        theta,
        theta_dot,
        theta_ddot,
        phi: h.atan2(x),
        phi_dot: h_dot / x,
        phi_ddot: -h_dot * x_dot / (x * x),
    })
}

// ---------------------------------------------------------------------------
// Kinematic state

/// Speed of a point rotating at `omega` on radius `r`.
pub fn tip_speed(r: f64, omega: f64) -> f64 {
    r * omega.abs()
}

/// Centripetal acceleration `v^2 / r` of a point moving at speed `v` on radius `r`.
pub fn normal_acceleration(v: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::Singular(
            "zero radius for a rotating point".into(),
        ));
    }
    Ok(v * v / r.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointState {
    pub label: String,
    pub position: [f64; 2],
    pub velocity: Option<[f64; 2]>,
    pub normal_acceleration: Option<[f64; 2]>,
    pub tangential_acceleration: Option<[f64; 2]>,
}

impl PointState {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.position[0], self.position[1])
    }

    pub fn velocity(&self) -> Option<Vec2> {
        self.velocity.map(|v| Vec2::new(v[0], v[1]))
    }

    /// Total acceleration, the sum of normal and tangential parts.
    pub fn acceleration(&self) -> Option<Vec2> {
        match (self.normal_acceleration, self.tangential_acceleration) {
            (Some(n), Some(t)) => Some(Vec2::new(n[0] + t[0], n[1] + t[1])),
            _ => None,
        }
    }
}

fn arr(v: Vec2) -> [f64; 2] {
    [v.x, v.y]
}

/// Kinematic snapshot of the unit: positions, and once propagated, velocities
/// and accelerations of every chain point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    /// Signed slider velocity; negative while deploying.
    pub slider_velocity: f64,
    pub slider: f64,
    pub points: Vec<PointState>,
    drive: Option<DriveState>,
}

impl KinematicState {
    /// Solve positions at opening angle `theta` with the slider moving at
    /// `slider_velocity`.
    pub fn at_angle(unit: &UnitGeometry, theta: f64, slider_velocity: f64) -> Result<Self> {
        let positions = solve_positions(unit, theta)?;
        let slider = slider_at_angle(unit, theta);
        Ok(Self::from_positions(theta, slider, slider_velocity, &positions))
    }

    /// Solve positions at slider travel `h`.
    pub fn at_slider(unit: &UnitGeometry, h: f64, slider_velocity: f64) -> Result<Self> {
        let positions = positions_at_slider(unit, h)?;
        let theta = 2.0 * (positions[1].x / unit.main_link() * 2.0).min(1.0).asin();
        Ok(Self::from_positions(theta, h, slider_velocity, &positions))
    }

    /// State with no solved positions.
    pub fn unsolved(theta: f64, slider_velocity: f64) -> Self {
        KinematicState {
            theta,
            theta_dot: 0.0,
            theta_ddot: 0.0,
            slider_velocity,
            slider: f64::NAN,
            points: Vec::new(),
            drive: None,
        }
    }

    fn from_positions(theta: f64, slider: f64, slider_velocity: f64, positions: &[Vec2]) -> Self {
        let points = POINT_LABELS
            .iter()
            .zip(positions)
            .map(|(l, p)| PointState {
                label: (*l).to_string(),
                position: arr(*p),
                velocity: None,
                normal_acceleration: None,
                tangential_acceleration: None,
            })
            .collect();
        KinematicState {
            theta,
            theta_dot: 0.0,
            theta_ddot: 0.0,
            slider_velocity,
            slider,
            points,
            drive: None,
        }
    }

    pub fn point(&self, label: &str) -> Option<&PointState> {
        self.points.iter().find(|p| p.label == label)
    }

    fn index_of(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::State(format!("no point labelled `{label}`")))
    }

    fn relative_velocity(&self, drive: &DriveState, i: usize) -> Vec2 {
        let parent = PARENTS[i].expect("non-root point");
        let r = self.points[i].position() - self.points[parent].position();
        let (omega, _) = drive.link(LINKS[i].expect("non-root point"));
        Vec2::new(-omega * r.y, omega * r.x)
    }

    /// Velocity of `label` summed directly from `O` along its chain of relative terms.
    pub fn velocity_from_root(&self, label: &str) -> Result<Vec2> {
        let drive = self
            .drive
            .ok_or_else(|| Error::State("velocities have not been propagated".into()))?;
        let mut i = self.index_of(label)?;
        let mut v = Vec2::zeros();
        while PARENTS[i].is_some() {
            v += self.relative_velocity(&drive, i);
            i = PARENTS[i].unwrap();
        }
        Ok(v)
    }
}

/// Propagate velocities from the fixed point outward: each point's velocity is
/// its parent's plus `omega x r` of the connecting link.
pub fn chain_velocities(unit: &UnitGeometry, mut state: KinematicState) -> Result<KinematicState> {
    if state.points.len() != POINT_LABELS.len() {
        return Err(Error::State("positions have not been solved".into()));
    }
    if !state.slider_velocity.is_finite() {
        return Err(Error::State("slider velocity is not set".into()));
    }
    let drive = drive_at_slider(unit, state.slider, state.slider_velocity)?;
    state.theta_dot = drive.theta_dot;
    state.theta_ddot = drive.theta_ddot;
    state.drive = Some(drive);
    state.points[0].velocity = Some([0.0, 0.0]);
    for i in 1..state.points.len() {
        let parent = PARENTS[i].unwrap();
        let base = state.points[parent].velocity().expect("parents precede children");
        let v = base + state.relative_velocity(&drive, i);
        state.points[i].velocity = Some(arr(v));
    }
    Ok(state)
}

/// Propagate accelerations: each point's acceleration is its parent's plus the
/// centripetal (`V_rel^2 / r`, toward the parent) and tangential (`alpha x r`)
/// parts of the connecting link's rotation.
pub fn chain_accelerations(mut state: KinematicState) -> Result<KinematicState> {
    let drive = state
        .drive
        .ok_or_else(|| Error::State("velocities have not been propagated".into()))?;
    state.points[0].normal_acceleration = Some([0.0, 0.0]);
    state.points[0].tangential_acceleration = Some([0.0, 0.0]);
    for i in 1..state.points.len() {
        let parent = PARENTS[i].unwrap();
        let r = state.points[i].position() - state.points[parent].position();
        let (omega, alpha) = drive.link(LINKS[i].unwrap());
        let radius = r.norm();
        let rel_speed = tip_speed(radius, omega);
        let an_mag = normal_acceleration(rel_speed, radius)?;
        let rel_normal = -r / radius * an_mag;
        let rel_tangential = Vec2::new(-alpha * r.y, alpha * r.x);
        let p = &state.points[parent];
        let n = Vec2::new(p.normal_acceleration.unwrap()[0], p.normal_acceleration.unwrap()[1]);
        let t = Vec2::new(
            p.tangential_acceleration.unwrap()[0],
            p.tangential_acceleration.unwrap()[1],
        );
        state.points[i].normal_acceleration = Some(arr(n + rel_normal));
        state.points[i].tangential_acceleration = Some(arr(t + rel_tangential));
    }
    Ok(state)
}

/// Positions, velocities and accelerations at slider travel `h`.
pub fn full_state_at_slider(
    unit: &UnitGeometry,
    h: f64,
    slider_velocity: f64,
) -> Result<KinematicState> {
    let s = KinematicState::at_slider(unit, h, slider_velocity)?;
    chain_accelerations(chain_velocities(unit, s)?)
}

// ---------------------------------------------------------------------------
// Deployment profile

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub state: KinematicState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentProfile {
    pub direction: Direction,
    pub slider_speed: f64,
    pub total_duration: f64,
    pub samples: Vec<ProfileSample>,
}

/// The four curves the surrogate network is fitted to: speed of the top
/// midpoint, opening rate of the main links, and their accelerations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicCurves {
    pub t: Vec<f64>,
    pub linear_velocity: Vec<f64>,
    pub angular_velocity: Vec<f64>,
    pub linear_acceleration: Vec<f64>,
    pub angular_acceleration: Vec<f64>,
}

impl DeploymentProfile {
    pub fn curves(&self, label: &str) -> Result<KinematicCurves> {
        let mut c = KinematicCurves {
            t: Vec::with_capacity(self.samples.len()),
            linear_velocity: Vec::new(),
            angular_velocity: Vec::new(),
            linear_acceleration: Vec::new(),
            angular_acceleration: Vec::new(),
        };
        for s in &self.samples {
            let p = s
                .state
                .point(label)
                .ok_or_else(|| Error::State(format!("no point labelled `{label}`")))?;
            c.t.push(s.t);
            c.linear_velocity.push(p.velocity().map_or(0.0, |v| v.norm()));
            c.angular_velocity.push(s.state.theta_dot.abs() / 2.0);
            c.linear_acceleration
                .push(p.acceleration().map_or(0.0, |a| a.norm()));
            c.angular_acceleration.push(s.state.theta_ddot.abs() / 2.0);
        }
        Ok(c)
    }
}

/// Sweep the unit between its stowed and deployed angles at constant slider
/// speed. `samples` points are spread uniformly in time over the whole motion.
pub fn deployment_profile(
    unit: &UnitGeometry,
    slider_speed: f64,
    direction: Direction,
    samples: usize,
) -> Result<DeploymentProfile> {
    if !(slider_speed > 0.0) || !slider_speed.is_finite() {
        return Err(Error::Domain(format!(
            "slider speed must be positive, got {slider_speed}"
        )));
    }
    let travel = slider_at_angle(unit, unit.stowed_angle_rad());
    let leg = travel / slider_speed;
    let total = match direction {
        Direction::FullCycle => 2.0 * leg,
        _ => leg,
    };
    // (h, h_dot) at time t
    let slider = |t: f64| -> (f64, f64) {
        match direction {
            Direction::Deploy => ((travel - slider_speed * t).max(0.0), -slider_speed),
            Direction::Stow => ((slider_speed * t).min(travel), slider_speed),
            Direction::FullCycle if t <= leg => {
                ((travel - slider_speed * t).max(0.0), -slider_speed)
            }
            Direction::FullCycle => ((slider_speed * (t - leg)).min(travel), slider_speed),
        }
    };
    let times: Vec<f64> = match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| total * i as f64 / (n - 1) as f64).collect(),
    };
    let samples = times
        .into_iter()
        .map(|t| {
            let (h, h_dot) = slider(t);
            full_state_at_slider(unit, h, h_dot).map(|state| ProfileSample { t, state })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeploymentProfile {
        direction,
        slider_speed,
        total_duration: total,
        samples,
    })
}

/// Reference deployment-time row for an existing or proposed mechanism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentTimeReference {
    pub mechanism: String,
    pub aperture_m: f64,
    pub units: u32,
    pub intermediate_s: Option<f64>,
    pub deployed_s: Option<f64>,
    pub full_cycle_s: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{synthesize_unit, AntennaDesign};
    use approx::assert_relative_eq;

    fn table_unit() -> UnitGeometry {
        AntennaDesign::baseline(true).unit
    }

    #[test]
    fn mobility_textbook_cases() {
        assert_eq!(gruebler_mobility(LinkageCount::new(4, 4, 0).unwrap()), 1);
        assert_eq!(gruebler_mobility(LinkageCount::new(3, 3, 0).unwrap()), 0);
        assert_eq!(gruebler_mobility(TSDTM_COUNTS), -1);
        assert!(LinkageCount::new(1, 0, 0).is_err());
    }

    #[test]
    fn mobility_claim_mismatch_warns() {
        let c = check_mobility(TSDTM_COUNTS, Some(TSDTM_CLAIMED_MOBILITY));
        assert_eq!(c.mobility, -1);
        assert!(c.warning.unwrap().contains("= -1"));
        let ok = check_mobility(LinkageCount::new(4, 4, 0).unwrap(), Some(1));
        assert!(ok.warning.is_none());
    }

    #[test]
    fn height_at_deployed_angle() {
        let u = table_unit();
        let p = solve_positions(&u, 80f64.to_radians()).unwrap();
        let height = p[4].y - p[1].y;
        assert!((height - 5.091).abs() < 1e-3);
        assert_relative_eq!(
            height,
            crate::geometry::scissor_span(u.half_link(), 80.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn height_ratio_between_limits() {
        let u = table_unit();
        let hi = scissor_height(&u, u.stowed_angle_rad());
        let lo = scissor_height(&u, u.deployed_angle_rad());
        let expected = (12.54f64.to_radians() / 2.0).cos() / (40f64.to_radians()).cos();
        assert_relative_eq!(hi / lo, expected, max_relative = 1e-12);
        assert!((hi / lo - 1.2976).abs() < 1e-4);
    }

    #[test]
    fn positions_are_mirror_symmetric() {
        let u = table_unit();
        for deg in [12.54, 30.0, 46.0, 71.3, 80.0] {
            let p = solve_positions(&u, f64::to_radians(deg)).unwrap();
            for q in &p {
                let mirrored = Vec2::new(-q.x, q.y);
                assert!(p.iter().any(|r| (r - mirrored).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn scissor_pivot_is_midpoint() {
        let u = table_unit();
        for i in 0..=50 {
            let th = u.stowed_angle_rad()
                + (u.deployed_angle_rad() - u.stowed_angle_rad()) * i as f64 / 50.0;
            let p = solve_positions(&u, th).unwrap();
            let (a, b, c, d, e) = (p[1], p[2], p[3], p[4], p[5]);
            assert!(((a + d) / 2.0 - c).norm() < 1e-12);
            assert!(((b + e) / 2.0 - c).norm() < 1e-12);
            assert!(((d - a).norm() - u.main_link()).abs() < 1e-12);
            assert!(((e - b).norm() - u.main_link()).abs() < 1e-12);
            assert!((a.norm() - u.horizontal_link()).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_outside_limits_is_rejected() {
        let u = table_unit();
        assert!(matches!(
            solve_positions(&u, 85f64.to_radians()),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            solve_positions(&u, 5f64.to_radians()),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn static_state_has_no_motion() {
        let u = table_unit();
        let s = KinematicState::at_angle(&u, 46f64.to_radians(), 0.0).unwrap();
        let s = chain_accelerations(chain_velocities(&u, s).unwrap()).unwrap();
        for p in &s.points {
            assert_eq!(p.velocity().unwrap().norm(), 0.0);
            assert_eq!(p.acceleration().unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn fixed_point_stays_at_rest() {
        let u = table_unit();
        let s = full_state_at_slider(&u, 1.0, -0.1).unwrap();
        let o = s.point("O").unwrap();
        assert_eq!(o.velocity.unwrap(), [0.0, 0.0]);
        assert_eq!(o.acceleration().unwrap().norm(), 0.0);
    }

    #[test]
    fn rotating_point_relations() {
        assert_relative_eq!(tip_speed(1.0, 0.1), 0.1);
        assert_relative_eq!(normal_acceleration(0.1, 1.0).unwrap(), 0.01, max_relative = 1e-12);
        assert!(matches!(normal_acceleration(0.1, 0.0), Err(Error::Singular(_))));
    }

    #[test]
    fn first_point_speed_is_radius_times_rate() {
        let u = table_unit();
        let s = full_state_at_slider(&u, 0.8, -0.1).unwrap();
        let d = s.drive.unwrap();
        let va = s.point("A").unwrap().velocity().unwrap().norm();
        assert_relative_eq!(va, tip_speed(u.horizontal_link(), d.phi_dot), max_relative = 1e-12);
    }

    #[test]
    fn unsolved_state_is_an_error() {
        let u = table_unit();
        let s = KinematicState::unsolved(1.0, -0.1);
        assert!(matches!(chain_velocities(&u, s.clone()), Err(Error::State(_))));
        assert!(matches!(chain_accelerations(s), Err(Error::State(_))));
    }

    #[test]
    fn velocity_composition_is_associative() {
        let u = table_unit();
        let s = full_state_at_slider(&u, 1.3, -0.1).unwrap();
        for label in POINT_LABELS {
            let direct = s.velocity_from_root(label).unwrap();
            let composed = s.point(label).unwrap().velocity().unwrap();
            assert!((direct - composed).norm() < 1e-12);
        }
    }

    #[test]
    fn profile_duration_scales_with_speed() {
        let u = table_unit();
        let slow = deployment_profile(&u, 0.1, Direction::Deploy, 11).unwrap();
        let fast = deployment_profile(&u, 0.2, Direction::Deploy, 11).unwrap();
        assert_relative_eq!(slow.total_duration, 2.0 * fast.total_duration, max_relative = 1e-15);
        let cycle = deployment_profile(&u, 0.1, Direction::FullCycle, 11).unwrap();
        assert_relative_eq!(cycle.total_duration, 2.0 * slow.total_duration, max_relative = 1e-15);
        assert!(deployment_profile(&u, 0.0, Direction::Deploy, 3).is_err());
        assert!(deployment_profile(&u, -1.0, Direction::Deploy, 3).is_err());
    }

    #[test]
    fn deploy_profile_is_monotone_and_ends_deployed() {
        let u = table_unit();
        let p = deployment_profile(&u, 0.1, Direction::Deploy, 200).unwrap();
        for w in p.samples.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].state.theta > w[0].state.theta);
        }
        let first = &p.samples[0].state;
        let last = &p.samples.last().unwrap().state;
        assert!((first.theta - u.stowed_angle_rad()).abs() < 1e-9);
        assert!((last.theta - u.deployed_angle_rad()).abs() < 1e-6);
        // the closed-form travel length fixes the duration
        let travel = slider_at_angle(&u, u.stowed_angle_rad());
        assert_relative_eq!(p.total_duration, travel / 0.1, max_relative = 1e-15);
    }

    #[test]
    fn stow_profile_is_decreasing() {
        let u = table_unit();
        let p = deployment_profile(&u, 0.1, Direction::Stow, 50).unwrap();
        for w in p.samples.windows(2) {
            assert!(w[1].state.theta < w[0].state.theta);
        }
    }

    #[test]
    fn empty_profile() {
        let u = table_unit();
        let p = deployment_profile(&u, 0.1, Direction::Deploy, 0).unwrap();
        assert!(p.samples.is_empty());
        assert!(p.total_duration > 0.0);
    }

    #[test]
    fn other_units_solve_too() {
        let u = synthesize_unit(1.0, 60.0, 5.0).unwrap();
        let p = deployment_profile(&u, 0.05, Direction::FullCycle, 21).unwrap();
        assert_eq!(p.samples.len(), 21);
        let mid = &p.samples[10].state;
        assert!((mid.theta - u.deployed_angle_rad()).abs() < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn adding_a_link_adds_three(n in 2u32..200, jp in 0u32..300, jh in 0u32..50) {
                let a = gruebler_mobility(LinkageCount::new(n, jp, jh).unwrap());
                let b = gruebler_mobility(LinkageCount::new(n + 1, jp, jh).unwrap());
                prop_assert_eq!(b - a, 3);
            }
        }
    }
}
