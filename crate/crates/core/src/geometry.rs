//! Triple-scissor unit synthesis and ring-level design metrics.
//!
//! The modular unit is a central scissor (links L1, L2) with horizontal
//! top/bottom links L3..L6 and two further scissor generations whose links are
//! halved twice (L7..L10 = L1/2, L11..L14 = L7/2). Ring-level metrics are
//! produced by similarity scaling of the 25 m, 12-unit baseline.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aperture of the baseline design the metric tables are scaled from.
pub const BASELINE_APERTURE_M: f64 = 25.0;
pub const BASELINE_UNIT_COUNT: u32 = 12;
/// Deployed unit height used by the link-length chain.
pub const EQ_CHAIN_DEPLOYED_HEIGHT_M: f64 = 5.09;
/// Deployed unit height quoted by the metric tables at the baseline.
pub const TABLE_DEPLOYED_HEIGHT_M: f64 = 5.122;
pub const TABLE_STOWED_HEIGHT_WITH_LINKS_M: f64 = 11.010;
pub const TABLE_STOWED_HEIGHT_WITHOUT_LINKS_M: f64 = 6.697;
pub const TABLE_STOWED_DIAMETER_M: f64 = 3.246;
/// Scissor angle of the fully deployed unit.
pub const DEPLOYED_ANGLE_DEG: f64 = 80.0;
/// Scissor angle of the fully stowed unit.
pub const STOWED_ANGLE_DEG: f64 = 12.54;

/// Number of links in one modular unit.
pub const LINK_COUNT: usize = 14;

/// Link lengths and fold angles of one modular unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitGeometry {
    /// L1..L14 in meters.
    pub lengths: [f64; LINK_COUNT],
    pub deployed_angle_deg: f64,
    pub stowed_angle_deg: f64,
    pub deployed_height: f64,
    pub stretched_length: f64,
}

impl UnitGeometry {
    /// Length of the main diagonal links L1 = L2.
    pub fn main_link(&self) -> f64 {
        self.lengths[0]
    }

    /// Length of the horizontal links L3..L6.
    pub fn horizontal_link(&self) -> f64 {
        self.lengths[2]
    }

    /// Length of the first halved scissor links L7..L10.
    pub fn half_link(&self) -> f64 {
        self.lengths[6]
    }

    /// Length of the quarter scissor links L11..L14.
    pub fn quarter_link(&self) -> f64 {
        self.lengths[10]
    }

    pub fn total_link_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn deployed_angle_rad(&self) -> f64 {
        self.deployed_angle_deg.to_radians()
    }

    pub fn stowed_angle_rad(&self) -> f64 {
        self.stowed_angle_deg.to_radians()
    }

    /// Uniformly rescale every length of the unit.
    pub fn scaled(&self, factor: f64) -> UnitGeometry {
        let mut out = self.clone();
        for l in out.lengths.iter_mut() {
            *l *= factor;
        }
        out.deployed_height *= factor;
        out.stretched_length *= factor;
        out
    }
}

/// A full ring antenna assembled from identical modular units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaDesign {
    pub aperture: f64,
    pub unit_count: u32,
    pub with_links: bool,
    pub unit: UnitGeometry,
}

impl AntennaDesign {
    /// Build a ring of `unit_count` units spanning `aperture`. The unit is
    /// synthesized from the baseline deployed height scaled with the chord.
    pub fn new(
        aperture: f64,
        unit_count: u32,
        with_links: bool,
        deployed_angle_deg: f64,
        stowed_angle_deg: f64,
    ) -> Result<Self> {
        if unit_count < 3 {
            return Err(Error::Domain(format!(
                "a ring needs at least 3 units, got {unit_count}"
            )));
        }
        let chord = stretched_length(aperture, unit_count)?;
        let height = EQ_CHAIN_DEPLOYED_HEIGHT_M * chord / baseline_stretched_length();
        let mut unit = synthesize_unit(height, deployed_angle_deg, stowed_angle_deg)?;
        unit.stretched_length = chord;
        Ok(AntennaDesign {
            aperture,
            unit_count,
            with_links,
            unit,
        })
    }

    /// The 25 m, 12-unit design with the default fold angles.
    pub fn baseline(with_links: bool) -> Self {
        AntennaDesign::new(
            BASELINE_APERTURE_M,
            BASELINE_UNIT_COUNT,
            with_links,
            DEPLOYED_ANGLE_DEG,
            STOWED_ANGLE_DEG,
        )
        .expect("baseline design is valid")
    }

    pub fn radius(&self) -> f64 {
        self.aperture / 2.0
    }
}

/// Ring-level deployed/stowed dimensions and storage ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMetrics {
    pub aperture: f64,
    pub unit_count: u32,
    pub with_links: bool,
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
    /// Set when the unit count differs from the 12-unit baseline the stow
    /// coefficients were measured on.
    pub extrapolated_unit_count: bool,
}

/// Chord spanned by one unit on a ring of diameter `aperture`.
pub fn stretched_length(aperture: f64, unit_count: u32) -> Result<f64> {
    if !(aperture > 0.0) || !aperture.is_finite() {
        return Err(Error::Domain(format!(
            "aperture must be positive, got {aperture}"
        )));
    }
    if unit_count < 2 {
        return Err(Error::Domain(format!(
            "unit count must be at least 2, got {unit_count}"
        )));
    }
    Ok(aperture * (PI / unit_count as f64).sin())
}

pub fn baseline_stretched_length() -> f64 {
    BASELINE_APERTURE_M * (PI / BASELINE_UNIT_COUNT as f64).sin()
}

fn check_fold_angles(deployed_deg: f64, stowed_deg: f64) -> Result<()> {
    if !(deployed_deg < 180.0) {
        return Err(Error::Domain(format!(
            "deployed angle {deployed_deg} deg must be below 180 deg (tangent is singular)"
        )));
    }
    if !(stowed_deg > 0.0) {
        return Err(Error::Domain(format!(
            "stowed angle {stowed_deg} deg must be positive"
        )));
    }
    if !(stowed_deg < deployed_deg) {
        return Err(Error::Domain(format!(
            "stowed angle {stowed_deg} deg must be below deployed angle {deployed_deg} deg"
        )));
    }
    Ok(())
}

/// Link lengths of a unit with deployed height `height` and the given fold angles.
pub fn synthesize_unit(height: f64, deployed_deg: f64, stowed_deg: f64) -> Result<UnitGeometry> {
    if !(height > 0.0) || !height.is_finite() {
        return Err(Error::Domain(format!(
            "deployed height must be positive, got {height}"
        )));
    }
    check_fold_angles(deployed_deg, stowed_deg)?;
    let half = (deployed_deg / 2.0).to_radians();
    let horizontal = height / 2.0 * half.tan();
    let main = height / half.cos();
    let halved = main / 2.0;
    let quarter = halved / 2.0;
    let mut lengths = [0.0; LINK_COUNT];
    lengths[0..2].fill(main);
    lengths[2..6].fill(horizontal);
    lengths[6..10].fill(halved);
    lengths[10..14].fill(quarter);
    Ok(UnitGeometry {
        lengths,
        deployed_angle_deg: deployed_deg,
        stowed_angle_deg: stowed_deg,
        deployed_height: height,
        stretched_length: height * baseline_stretched_length() / EQ_CHAIN_DEPLOYED_HEIGHT_M,
    })
}

/// Span of a scissor pair with links of length `link` crossed at `angle_deg`.
pub fn scissor_span(link: f64, angle_deg: f64) -> f64 {
    let c = angle_deg.to_radians().cos();
    // 2(1 + cos) can dip a hair below zero at 180 deg
    link * (2.0 * (1.0 + c)).max(0.0).sqrt()
}

/// Area of a regular polygon with `sides` sides and circumradius `radius`.
pub fn regular_polygon_area(sides: u32, radius: f64) -> f64 {
    let n = sides as f64;
    0.5 * n * radius * radius * (2.0 * PI / n).sin()
}

/// Deployed and stowed metrics of a ring by similarity scaling of the baseline.
pub fn design_metrics(aperture: f64, unit_count: u32, with_links: bool) -> Result<DesignMetrics> {
    if unit_count < 3 {
        return Err(Error::Domain(format!(
            "a ring needs at least 3 units, got {unit_count}"
        )));
    }
    let stretched = stretched_length(aperture, unit_count)?;
    let scale = stretched / baseline_stretched_length();
    let extrapolated = unit_count != BASELINE_UNIT_COUNT;
    if extrapolated {
        log::warn!(
            "unit count {unit_count} reuses the {BASELINE_UNIT_COUNT}-unit stow coefficients"
        );
    }

    let deployed_height = TABLE_DEPLOYED_HEIGHT_M * scale;
    let stowed_height = scale
        * if with_links {
            TABLE_STOWED_HEIGHT_WITH_LINKS_M
        } else {
            TABLE_STOWED_HEIGHT_WITHOUT_LINKS_M
        };
    let stowed_diameter = TABLE_STOWED_DIAMETER_M * scale;
    // Prism cross-sections use the baseline polygon; for 12 units the
    // deployed circumradius reduces to aperture / 2.
    let deployed_radius = BASELINE_APERTURE_M / 2.0 * scale;
    let deployed_volume =
        regular_polygon_area(BASELINE_UNIT_COUNT, deployed_radius) * deployed_height;
    let stowed_volume =
        regular_polygon_area(BASELINE_UNIT_COUNT, stowed_diameter / 2.0) * stowed_height;

    Ok(DesignMetrics {
        aperture,
        unit_count,
        with_links,
        stretched_length: stretched,
        deployed_height,
        stowed_height,
        deployed_diameter: aperture,
        stowed_diameter,
        deployed_volume,
        stowed_volume,
        sr_diameter: aperture / stowed_diameter,
        sr_height: deployed_height / stowed_height,
        sr_volume: deployed_volume / stowed_volume,
        extrapolated_unit_count: extrapolated,
    })
}

/// One metrics row per aperture, in input order.
pub fn table_row_set(
    apertures: &[f64],
    unit_count: u32,
    with_links: bool,
) -> Result<Vec<DesignMetrics>> {
    apertures
        .iter()
        .map(|&d| design_metrics(d, unit_count, with_links))
        .collect()
}

/// Apertures tabulated for the with/without-links comparison.
pub const TABLE_APERTURES_M: [f64; 6] = [6.0, 13.0, 15.0, 25.0, 28.0, 30.0];
