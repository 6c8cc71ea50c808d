//! C ABI over the scissortruss library.
//!
//! Every fallible call returns an [`StStatus`] and writes results through
//! out-pointers. The message of the most recent failure on the calling
//! thread is available from [`st_last_error`]. Designs and deployment
//! profiles are opaque handles released with their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use scissortruss::error::Error;
use scissortruss::geometry::{self, AntennaDesign, LINK_COUNT};
use scissortruss::kinematics::{self, DeploymentProfile, Direction, LinkageCount};
use scissortruss::{dynamics, materials, data};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Range = 3,
    Config = 4,
    Io = 5,
    Infeasible = 6,
    NoCandidate = 7,
    BufferTooSmall = 8,
    Other = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StDirection {
    Deploy = 0,
    Stow = 1,
    FullCycle = 2,
}

/// Ring-level design metrics.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StMetrics {
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
    /// Nonzero when the unit count differs from the 12-unit baseline.
    pub extrapolated: c_int,
}

/// One sample of a deployment profile, curves taken at the top point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StSample {
    pub t: f64,
    pub slider: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ddot: f64,
    pub linear_velocity: f64,
    pub angular_velocity: f64,
    pub linear_acceleration: f64,
    pub angular_acceleration: f64,
}

/// Opaque antenna design.
pub struct StDesign(AntennaDesign);

/// Opaque deployment profile.
pub struct StProfile {
    samples: Vec<StSample>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> StStatus {
    match e {
        Error::Domain(_) | Error::Shape { .. } | Error::Singular(_) | Error::DegenerateRange(_) => StStatus::Domain,
        Error::Range(_) => StStatus::Range,
        Error::Config(_) | Error::Json(_) => StStatus::Config,
        Error::Io { .. } | Error::Csv(_) => StStatus::Io,
        Error::Infeasible(_) => StStatus::Infeasible,
        Error::NoCandidate => StStatus::NoCandidate,
        _ => StStatus::Other,
    }
}

fn guard<F: FnOnce() -> Result<(), StStatus>>(f: F) -> StStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            StStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            StStatus::Panic
        }
    }
}

fn fail(e: Error) -> StStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(name: &str) -> StStatus {
    set_error(format!("`{name}` is null"));
    StStatus::NullPointer
}

/// Copy `s` as a NUL-terminated string into `buf` of `len` bytes.
unsafe fn copy_str(s: &str, buf: *mut c_char, len: usize) -> Result<(), StStatus> {
    if buf.is_null() {
        return Err(null("buf"));
    }
    let bytes = s.as_bytes();
    if bytes.len() + 1 > len {
        set_error(format!("buffer of {len} bytes cannot hold {} bytes", bytes.len() + 1));
        return Err(StStatus::BufferTooSmall);
    }
    std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

/// Message of the last failed call on this thread, NUL-terminated.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn st_last_error(buf: *mut c_char, len: usize) -> StStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_str(&msg, buf, len) {
        Ok(()) => StStatus::Ok,
        Err(s) => s,
    }
}

/// Chord length of one unit on a ring of diameter `aperture`.
///
/// # Safety
/// `out` must be a valid pointer to an `f64`.
#[no_mangle]
pub unsafe extern "C" fn st_stretched_length(aperture: f64, unit_count: u32, out: *mut f64) -> StStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = geometry::stretched_length(aperture, unit_count).map_err(fail)?;
        Ok(())
    })
}

/// Span of a scissor pair of link length `link` opened to `angle_deg`.
#[no_mangle]
pub extern "C" fn st_scissor_span(link: f64, angle_deg: f64) -> f64 {
    geometry::scissor_span(link, angle_deg)
}

/// Planar Gruebler mobility `3(n - 1) - 2 jp - jh`.
///
/// # Safety
/// `out` must be a valid pointer to an `i64`.
#[no_mangle]
pub unsafe extern "C" fn st_gruebler_mobility(n: u32, jp: u32, jh: u32, out: *mut i64) -> StStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = LinkageCount::new(n, jp, jh).map_err(fail)?;
        *out = kinematics::gruebler_mobility(c);
        Ok(())
    })
}

/// Undamped natural frequency for unit mass `mass`, stiffness, ring radius
/// and unit length, gravity excluded.
///
/// # Safety
/// `omega_n` and `f_n` must be valid pointers to `f64`.
#[no_mangle]
pub unsafe extern "C" fn st_natural_frequency(
    mass: f64,
    stiffness: f64,
    ring_radius: f64,
    unit_length: f64,
    omega_n: *mut f64,
    f_n: *mut f64,
) -> StStatus {
    guard(|| {
        if omega_n.is_null() || f_n.is_null() {
            return Err(null("omega_n/f_n"));
        }
        let p = dynamics::DynamicParams {
            mass,
            stiffness,
            ring_radius,
            unit_length,
            ..Default::default()
        };
        let nf = dynamics::natural_frequency(&p).map_err(fail)?;
        *omega_n = nf.omega_n;
        *f_n = nf.f_n;
        Ok(())
    })
}

/// Create a design; release it with [`st_design_free`].
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn st_design_new(
    aperture: f64,
    unit_count: u32,
    with_links: c_int,
    deployed_angle_deg: f64,
    stowed_angle_deg: f64,
    out: *mut *mut StDesign,
) -> StStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = AntennaDesign::new(aperture, unit_count, with_links != 0, deployed_angle_deg, stowed_angle_deg)
            .map_err(fail)?;
        *out = Box::into_raw(Box::new(StDesign(d)));
        Ok(())
    })
}

/// # Safety
/// `design` must come from [`st_design_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn st_design_free(design: *mut StDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// Number of links per unit.
#[no_mangle]
pub extern "C" fn st_link_count() -> usize {
    LINK_COUNT
}

/// Copy L1..L14 into `out`, which holds `len` values.
///
/// # Safety
/// `design` must be a live handle and `out` must point to `len` writable `f64`.
#[no_mangle]
pub unsafe extern "C" fn st_design_link_lengths(design: *const StDesign, out: *mut f64, len: usize) -> StStatus {
    guard(|| {
        let Some(d) = design.as_ref() else {
            return Err(null("design"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        if len < LINK_COUNT {
            set_error(format!("need {LINK_COUNT} slots, got {len}"));
            return Err(StStatus::BufferTooSmall);
        }
        std::ptr::copy_nonoverlapping(d.0.unit.lengths.as_ptr(), out, LINK_COUNT);
        Ok(())
    })
}

/// Ring-level metrics of a design.
///
/// # Safety
/// `design` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_design_metrics(design: *const StDesign, out: *mut StMetrics) -> StStatus {
    guard(|| {
        let Some(d) = design.as_ref() else {
            return Err(null("design"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let m = geometry::design_metrics(d.0.aperture, d.0.unit_count, d.0.with_links).map_err(fail)?;
        *out = StMetrics {
            stretched_length: m.stretched_length,
            deployed_height: m.deployed_height,
            stowed_height: m.stowed_height,
            deployed_diameter: m.deployed_diameter,
            stowed_diameter: m.stowed_diameter,
            deployed_volume: m.deployed_volume,
            stowed_volume: m.stowed_volume,
            sr_diameter: m.sr_diameter,
            sr_height: m.sr_height,
            sr_volume: m.sr_volume,
            extrapolated: m.extrapolated_unit_count as c_int,
        };
        Ok(())
    })
}

/// Sample a deployment of `design` at constant slider speed; release with
/// [`st_profile_free`].
///
/// # Safety
/// `design` must be a live handle and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn st_profile_new(
    design: *const StDesign,
    slider_speed: f64,
    direction: StDirection,
    samples: usize,
    out: *mut *mut StProfile,
) -> StStatus {
    guard(|| {
        let Some(d) = design.as_ref() else {
            return Err(null("design"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let dir = match direction {
            StDirection::Deploy => Direction::Deploy,
            StDirection::Stow => Direction::Stow,
            StDirection::FullCycle => Direction::FullCycle,
        };
        let p: DeploymentProfile =
            kinematics::deployment_profile(&d.0.unit, slider_speed, dir, samples).map_err(fail)?;
        let c = p.curves("F").map_err(fail)?;
        let samples = p
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| StSample {
                t: s.t,
                slider: s.state.slider,
                theta: s.state.theta,
                theta_dot: s.state.theta_dot,
                theta_ddot: s.state.theta_ddot,
                linear_velocity: c.linear_velocity[i],
                angular_velocity: c.angular_velocity[i],
                linear_acceleration: c.linear_acceleration[i],
                angular_acceleration: c.angular_acceleration[i],
            })
            .collect();
        *out = Box::into_raw(Box::new(StProfile { samples }));
        Ok(())
    })
}

/// Number of samples in a profile; 0 for a null handle.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn st_profile_len(profile: *const StProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.samples.len())
}

/// # Safety
/// `profile` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_profile_sample(profile: *const StProfile, index: usize, out: *mut StSample) -> StStatus {
    guard(|| {
        let Some(p) = profile.as_ref() else {
            return Err(null("profile"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let Some(s) = p.samples.get(index) else {
            set_error(format!("sample {index} out of {}", p.samples.len()));
            return Err(StStatus::Range);
        };
        *out = *s;
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`st_profile_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn st_profile_free(profile: *mut StProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Run material selection on the bundled table and write the winner's name.
///
/// # Safety
/// `name` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn st_select_material(
    t_max_req: f64,
    t_min_req: f64,
    name: *mut c_char,
    len: usize,
) -> StStatus {
    guard(|| {
        let db = data::bundled_materials().map_err(fail)?;
        let req = materials::ThermalRequirement { t_max_req, t_min_req };
        let report = materials::select_material(&db, req, materials::ScoreWeights::default()).map_err(fail)?;
        copy_str(&report.winner.name, name, len)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::Range("x".into())), StStatus::Range);
        assert_eq!(status_of(&Error::NoCandidate), StStatus::NoCandidate);
        assert_eq!(status_of(&Error::Config("x".into())), StStatus::Config);
    }

    #[test]
    fn small_buffer_is_reported() {
        let mut buf = [0 as c_char; 4];
        let s = unsafe { copy_str("hello", buf.as_mut_ptr(), buf.len()) };
        assert_eq!(s, Err(StStatus::BufferTooSmall));
    }
}
