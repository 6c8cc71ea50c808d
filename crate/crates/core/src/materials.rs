//! Material screening for low-orbit service: thermal filtering, a linear
//! max-margin suitability classifier, and a strength/stiffness/density score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureMode {
    Ductile,
    Brittle,
}

/// One row of the material property table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialRecord {
    pub name: String,
    /// GPa
    pub youngs_modulus: f64,
    /// g/cm^3
    pub density: f64,
    pub poissons_ratio: f64,
    /// um/(m C)
    pub cte: f64,
    /// MPa
    pub yield_strength: f64,
    pub tensile_strength: f64,
    pub ultimate_strength: f64,
    pub elastic_limit: f64,
    pub breaking_strength: f64,
    pub failure_mode: FailureMode,
    /// Maximum service temperature, C.
    pub max_temperature: f64,
    /// Minimum service temperature, C. Missing for most tabulated materials.
    pub min_temperature: Option<f64>,
}

impl MaterialRecord {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("youngs_modulus", self.youngs_modulus),
            ("density", self.density),
            ("poissons_ratio", self.poissons_ratio),
            ("cte", self.cte),
            ("yield_strength", self.yield_strength),
            ("tensile_strength", self.tensile_strength),
            ("ultimate_strength", self.ultimate_strength),
            ("elastic_limit", self.elastic_limit),
            ("breaking_strength", self.breaking_strength),
            ("max_temperature", self.max_temperature),
        ];
        for (field, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "{}: {field} must be positive, got {v}",
                    self.name
                )));
            }
        }
        if !(self.yield_strength <= self.tensile_strength
            && self.tensile_strength <= self.ultimate_strength)
        {
            return Err(Error::Domain(format!(
                "{}: expected yield <= tensile <= ultimate strength",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalRequirement {
    /// Materials must survive at least this temperature (C).
    pub t_max_req: f64,
    /// Materials must survive down to this temperature (C).
    pub t_min_req: f64,
}

impl Default for ThermalRequirement {
    fn default() -> Self {
        ThermalRequirement {
            t_max_req: 150.0,
            t_min_req: -100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterFlag {
    pub name: String,
    pub passed: bool,
    /// Passed without minimum-temperature data.
    pub min_temp_unverified: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalScreen {
    pub suitable: Vec<MaterialRecord>,
    pub flags: Vec<FilterFlag>,
}

/// Keep materials whose service window covers the requirement. Materials
/// without minimum-temperature data pass that half of the test, flagged.
pub fn thermal_filter(db: &[MaterialRecord], req: ThermalRequirement) -> ThermalScreen {
    let mut suitable = Vec::new();
    let mut flags = Vec::with_capacity(db.len());
    for m in db {
        let hot_ok = m.max_temperature >= req.t_max_req;
        let cold_ok = m.min_temperature.map_or(true, |t| t <= req.t_min_req);
        let passed = hot_ok && cold_ok;
        let reason = if !hot_ok {
            Some(format!(
                "max temperature {} C below required {} C",
                m.max_temperature, req.t_max_req
            ))
        } else if !cold_ok {
            Some(format!(
                "min temperature {} C above required {} C",
                m.min_temperature.unwrap(),
                req.t_min_req
            ))
        } else {
            None
        };
        flags.push(FilterFlag {
            name: m.name.clone(),
            passed,
            min_temp_unverified: passed && m.min_temperature.is_none(),
            reason,
        });
        if passed {
            suitable.push(m.clone());
        }
    }
    ThermalScreen { suitable, flags }
}

pub const FEATURE_NAMES: [&str; 3] = ["tensile_strength", "youngs_modulus", "density"];

/// Min-max normalized (tensile strength, modulus, density) per material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub rows: Vec<[f64; 3]>,
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl FeatureMatrix {
    pub fn row(&self, name: &str) -> Option<[f64; 3]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.rows[i])
    }
}

fn raw_features(m: &MaterialRecord) -> [f64; 3] {
    [m.tensile_strength, m.youngs_modulus, m.density]
}

pub fn normalize_features(db: &[MaterialRecord]) -> Result<FeatureMatrix> {
    if db.len() < 2 {
        return Err(Error::Domain(format!(
            "normalization needs at least 2 materials, got {}",
            db.len()
        )));
    }
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for m in db {
        for (k, v) in raw_features(m).into_iter().enumerate() {
            min[k] = min[k].min(v);
            max[k] = max[k].max(v);
        }
    }
    for k in 0..3 {
        if !(max[k] > min[k]) {
            return Err(Error::DegenerateRange(FEATURE_NAMES[k].into()));
        }
    }
    let rows = db
        .iter()
        .map(|m| {
            let f = raw_features(m);
            [0, 1, 2].map(|k| (f[k] - min[k]) / (max[k] - min[k]))
        })
        .collect();
    Ok(FeatureMatrix {
        names: db.iter().map(|m| m.name.clone()).collect(),
        rows,
        min,
        max,
    })
}

// ---------------------------------------------------------------------------
// Linear SVM

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Box constraint; large values approach the hard-margin machine.
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1e6,
            tolerance: 1e-10,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub training_accuracy: f64,
    /// Distance from the separating hyperplane to the margin, `1 / |w|`.
    pub margin: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ClassifierModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) >= 0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Train a linear soft-margin SVM by sequential minimal optimization with
/// maximal-violating-pair working set selection.
pub fn train_classifier(
    features: &[Vec<f64>],
    labels: &[bool],
    cfg: SvmConfig,
) -> Result<ClassifierModel> {
    let n = features.len();
    if labels.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: labels.len(),
        });
    }
    if !labels.iter().any(|&l| l) || !labels.iter().any(|&l| !l) {
        return Err(Error::Training(
            "both suitable and unsuitable examples are required".into(),
        ));
    }
    let dim = features[0].len();
    if let Some(bad) = features.iter().find(|f| f.len() != dim) {
        return Err(Error::Shape {
            expected: dim,
            got: bad.len(),
        });
    }
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let q = |i: usize, j: usize| y[i] * y[j] * dot(&features[i], &features[j]);
    let c = cfg.c;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        let mut i = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < cfg.tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let (ai_old, aj_old) = (alpha[i], alpha[j]);
        let qii = q(i, i);
        let qjj = q(j, j);
        let qij = q(i, j);
        if y[i] != y[j] {
            let quad = (qii + qjj + 2.0 * qij).max(1e-12);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(1e-12);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }
        let (di, dj) = (alpha[i] - ai_old, alpha[j] - aj_old);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += q(i, k) * di + q(j, k) * dj;
        }
    }

    // bias from free support vectors, else midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_count) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_count += 1;
            free_sum += yg;
        }
    }
    let rho = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        (ub + lb) / 2.0
    };
    let mut weights = vec![0.0; dim];
    for t in 0..n {
        for (w, x) in weights.iter_mut().zip(&features[t]) {
            *w += alpha[t] * y[t] * x;
        }
    }
    let norm = dot(&weights, &weights).sqrt();
    let mut model = ClassifierModel {
        weights,
        bias: -rho,
        training_accuracy: 0.0,
        margin: if norm > 0.0 { 1.0 / norm } else { f64::INFINITY },
        iterations,
        converged,
    };
    let correct = features
        .iter()
        .zip(labels)
        .filter(|(x, &l)| model.predict(x) == l)
        .count();
    model.training_accuracy = correct as f64 / n as f64;
    Ok(model)
}

// ---------------------------------------------------------------------------
// Scoring and selection

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub tensile: f64,
    pub modulus: f64,
    pub density: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            tensile: 1.0,
            modulus: 1.0,
            density: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialScore {
    pub name: String,
    pub score: f64,
    pub tensile_contribution: f64,
    pub modulus_contribution: f64,
    pub density_contribution: f64,
}

/// `w_t * tensile + w_m * modulus - w_d * density` on normalized features.
pub fn score_material(name: &str, features: &FeatureMatrix, w: ScoreWeights) -> Result<MaterialScore> {
    let row = features
        .row(name)
        .ok_or_else(|| Error::Lookup(name.to_string()))?;
    Ok(score_row(name, row, w))
}

fn score_row(name: &str, row: [f64; 3], w: ScoreWeights) -> MaterialScore {
    let t = w.tensile * row[0];
    let m = w.modulus * row[1];
    let d = -w.density * row[2];
    MaterialScore {
        name: name.to_string(),
        score: t + m + d,
        tensile_contribution: t,
        modulus_contribution: m,
        density_contribution: d,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassifierReport {
    Trained {
        model: ClassifierModel,
        /// (material, thermal label, predicted label)
        predictions: Vec<(String, bool, bool)>,
    },
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub winner: MaterialRecord,
    /// Suitable materials, best first.
    pub ranked: Vec<MaterialScore>,
    pub flags: Vec<FilterFlag>,
    pub classifier: ClassifierReport,
}

/// Filter, normalize, train the advisory classifier, score the suitable
/// materials and pick the best. Ties go to the lexicographically first name.
pub fn select_material(
    db: &[MaterialRecord],
    req: ThermalRequirement,
    weights: ScoreWeights,
) -> Result<SelectionReport> {
    if db.is_empty() {
        return Err(Error::NoCandidate);
    }
    for m in db {
        m.validate()?;
    }
    let screen = thermal_filter(db, req);
    if screen.suitable.is_empty() {
        return Err(Error::NoCandidate);
    }

    let ranked_rows: Vec<(String, [f64; 3])>;
    let classifier;
    match normalize_features(db) {
        Ok(features) => {
            let labels: Vec<bool> = screen.flags.iter().map(|f| f.passed).collect();
            let x: Vec<Vec<f64>> = features.rows.iter().map(|r| r.to_vec()).collect();
            classifier = match train_classifier(&x, &labels, SvmConfig::default()) {
                Ok(model) => {
                    let predictions = features
                        .names
                        .iter()
                        .zip(&x)
                        .zip(&labels)
                        .map(|((n, xi), &l)| (n.clone(), l, model.predict(xi)))
                        .collect();
                    ClassifierReport::Trained { model, predictions }
                }
                Err(e) => ClassifierReport::Failed {
                    reason: e.to_string(),
                },
            };
            ranked_rows = screen
                .suitable
                .iter()
                .map(|m| (m.name.clone(), features.row(&m.name).expect("suitable rows are in db")))
                .collect();
        }
        Err(e) if screen.suitable.len() == 1 => {
            classifier = ClassifierReport::Failed {
                reason: e.to_string(),
            };
            ranked_rows = vec![(screen.suitable[0].name.clone(), [0.0; 3])];
        }
        Err(e) => return Err(e),
    }

    let mut ranked: Vec<MaterialScore> = ranked_rows
        .iter()
        .map(|(n, r)| score_row(n, *r, weights))
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.name.cmp(&b.name)));
    let winner = screen
        .suitable
        .iter()
        .find(|m| m.name == ranked[0].name)
        .cloned()
        .expect("winner is a suitable material");
    Ok(SelectionReport {
        winner,
        ranked,
        flags: screen.flags,
        classifier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::bundled_materials;

    fn db() -> Vec<MaterialRecord> {
        bundled_materials().unwrap()
    }

    #[test]
    fn thermal_filter_examples() {
        let s = thermal_filter(&db(), ThermalRequirement::default());
        let names: Vec<&str> = s.suitable.iter().map(|m| m.name.as_str()).collect();
        assert!(!names.contains(&"T1100G"));
        assert!(!names.contains(&"Al-7075-T7351"));
        assert!(names.contains(&"Ti-6Al-4V"));
        assert_eq!(names.len(), 5);
        assert!(s.flags.iter().filter(|f| f.passed).all(|f| f.min_temp_unverified));
        assert!(thermal_filter(&[], ThermalRequirement::default()).suitable.is_empty());
    }

    #[test]
    fn min_temperature_is_checked_when_present() {
        let mut m = db()[1].clone();
        m.min_temperature = Some(-50.0);
        let s = thermal_filter(&[m.clone()], ThermalRequirement::default());
        assert!(s.suitable.is_empty());
        m.min_temperature = Some(-150.0);
        let s = thermal_filter(&[m], ThermalRequirement::default());
        assert_eq!(s.suitable.len(), 1);
        assert!(!s.flags[0].min_temp_unverified);
    }

    #[test]
    fn filter_is_idempotent_subset() {
        let d = db();
        let once = thermal_filter(&d, ThermalRequirement::default()).suitable;
        let twice = thermal_filter(&once, ThermalRequirement::default()).suitable;
        assert_eq!(once, twice);
        assert!(once.iter().all(|m| d.contains(m)));
    }

    #[test]
    fn normalization_endpoints() {
        let f = normalize_features(&db()).unwrap();
        assert_eq!(f.row("T1100G").unwrap()[0], 1.0);
        assert_eq!(f.row("FeNi36 Alloy").unwrap()[2], 1.0);
        assert_eq!(f.row("Cyanate Ester").unwrap()[2], 0.0);
        assert_eq!(f.row("Al-7075-T7351").unwrap()[1], 0.0);
        assert!(f.rows.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn normalization_errors() {
        let d = db();
        assert!(normalize_features(&d[..1]).is_err());
        let mut same = vec![d[0].clone(), d[1].clone()];
        same[1].density = same[0].density;
        assert!(matches!(normalize_features(&same), Err(Error::DegenerateRange(c)) if c == "density"));
    }

    #[test]
    fn toy_svm_separates() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let m = train_classifier(&x, &[false, true], SvmConfig::default()).unwrap();
        assert_eq!(m.training_accuracy, 1.0);
        assert!((m.margin - 0.5f64.sqrt()).abs() < 1e-9);
        assert!((m.weights[0] - 1.0).abs() < 1e-9 && (m.bias + 1.0).abs() < 1e-9);
    }

    #[test]
    fn svm_conflicting_duplicates() {
        let x = vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.0, 0.0], vec![1.0, 1.0]];
        let m = train_classifier(&x, &[true, false, false, true], SvmConfig { c: 10.0, ..Default::default() }).unwrap();
        assert!(m.training_accuracy < 1.0);
        assert!(m.weights.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn svm_needs_two_classes() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train_classifier(&x, &[true, true], SvmConfig::default()),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn scoring_extremes() {
        let f = FeatureMatrix {
            names: vec!["best".into(), "worst".into()],
            rows: vec![[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            min: [0.0; 3],
            max: [1.0; 3],
        };
        let w = ScoreWeights::default();
        assert_eq!(score_material("best", &f, w).unwrap().score, 2.0);
        let worst = score_material("worst", &f, w).unwrap();
        assert_eq!(worst.score, -1.0);
        assert_eq!(
            worst.tensile_contribution + worst.modulus_contribution + worst.density_contribution,
            worst.score
        );
        assert!(matches!(score_material("nope", &f, w), Err(Error::Lookup(_))));
    }

    #[test]
    fn single_suitable_material_wins() {
        let mut d = db();
        d.retain(|m| m.name == "Ti-6Al-4V" || m.name == "T1100G");
        let r = select_material(&d, ThermalRequirement::default(), ScoreWeights::default()).unwrap();
        assert_eq!(r.winner.name, "Ti-6Al-4V");
        let alone: Vec<_> = d.into_iter().filter(|m| m.name == "Ti-6Al-4V").collect();
        let r = select_material(&alone, ThermalRequirement::default(), ScoreWeights::default()).unwrap();
        assert_eq!(r.winner.name, "Ti-6Al-4V");
    }

    #[test]
    fn no_candidate_at_high_requirement() {
        let req = ThermalRequirement { t_max_req: 500.0, ..Default::default() };
        assert!(matches!(
            select_material(&db(), req, ScoreWeights::default()),
            Err(Error::NoCandidate)
        ));
    }

    #[test]
    fn low_temperature_aluminium_never_wins() {
        for w in [
            ScoreWeights { tensile: 0.0, modulus: 0.0, density: 1.0 },
            ScoreWeights { tensile: 0.0, modulus: -5.0, density: 0.0 },
            ScoreWeights { tensile: -1.0, modulus: -1.0, density: -1.0 },
        ] {
            let r = select_material(&db(), ThermalRequirement::default(), w).unwrap();
            assert_ne!(r.winner.name, "Al-7075-T7351");
        }
    }

    #[test]
    fn ties_break_by_name() {
        let d = db();
        let w = ScoreWeights { tensile: 0.0, modulus: 0.0, density: 0.0 };
        let r = select_material(&d, ThermalRequirement::default(), w).unwrap();
        assert_eq!(r.winner.name, "Be-S-65 Grade");
    }
}
