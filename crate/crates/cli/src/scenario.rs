//! Scenario file schema: versioned JSON with the punctures, basepoint,
//! structure group, flux coefficients, and optional lattice and screen
//! parameters. Unknown fields are rejected.

use holobundle::geometry::{Point2, Puncture};
use holobundle::holonomy::FluxScenario;
use holobundle::liegroups::{AlgebraElement, GroupTag};
use holobundle::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub rank: u32,
    pub group: String,
    pub basepoint: [f64; 2],
    pub punctures: Vec<[f64; 2]>,
    pub fluxes: Vec<CoeffList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenParams>,
}

/// Real coefficient lists for the unitary groups, `[re, im]` pairs for
/// SL(2, C).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffList {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub spacing: f64,
    pub steps: u32,
    pub samples: u64,
    #[serde(default = "default_word_cap")]
    pub word_cap: usize,
}

fn default_word_cap() -> usize {
    holobundle::propagator::DEFAULT_WORD_CAP
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenParams {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub points: usize,
}

impl ScreenParams {
    /// Detector points and their arc-length coordinates along the screen.
    pub fn detectors(&self) -> Result<(Vec<Point2>, Vec<f64>), String> {
        if self.points < 4 {
            return Err("screen needs at least 4 points".into());
        }
        let from = Point2::new(self.from[0], self.from[1]);
        let to = Point2::new(self.to[0], self.to[1]);
        let length = from.distance(&to);
        if !(length > 0.0) {
            return Err("screen endpoints coincide".into());
        }
        let mut pts = Vec::with_capacity(self.points);
        let mut coords = Vec::with_capacity(self.points);
        for i in 0..self.points {
            let t = i as f64 / (self.points - 1) as f64;
            pts.push(Point2::new(
                from.x + t * (to.x - from.x),
                from.y + t * (to.y - from.y),
            ));
            coords.push(t * length);
        }
        Ok((pts, coords))
    }
}

impl ScenarioFile {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| format!("bad scenario JSON: {e}"))?;
        if file.version != 1 {
            return Err(format!("unsupported scenario version {}", file.version));
        }
        Ok(file)
    }

    pub fn to_scenario(&self) -> Result<FluxScenario, String> {
        let group = GroupTag::parse(&self.group).map_err(|e| e.to_string())?;
        if self.punctures.len() != self.rank as usize {
            return Err(format!(
                "rank {} disagrees with {} punctures",
                self.rank,
                self.punctures.len()
            ));
        }
        if self.fluxes.len() != self.rank as usize {
            return Err(format!(
                "rank {} disagrees with {} fluxes",
                self.rank,
                self.fluxes.len()
            ));
        }
        let punctures: Vec<Puncture> = self
            .punctures
            .iter()
            .enumerate()
            .map(|(i, &[x, y])| Puncture::new(Point2::new(x, y), (i + 1) as u32))
            .collect();
        let fluxes = self
            .fluxes
            .iter()
            .map(|coeffs| {
                let complex: Vec<Complex64> = match coeffs {
                    CoeffList::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                    CoeffList::Complex(v) => {
                        v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
                    }
                };
                AlgebraElement::from_coefficients(group, &complex).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, String>>()?;
        FluxScenario::new(
            punctures,
            Point2::new(self.basepoint[0], self.basepoint[1]),
            group,
            fluxes,
        )
        .map_err(|e| e.to_string())
    }
}

/// Reads a path from CSV with one `x,y` vertex per line.
pub fn load_path_csv(path: &std::path::Path) -> Result<Vec<Point2>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut vertices = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split(',');
        let parse = |s: Option<&str>| {
            s.and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| format!("line {}: expected 'x,y'", lineno + 1))
        };
        let x = parse(parts.next())?;
        let y = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(format!("line {}: expected exactly two fields", lineno + 1));
        }
        vertices.push(Point2::new(x, y));
    }
    if vertices.len() < 2 {
        return Err("path CSV needs at least two vertices".into());
    }
    Ok(vertices)
}
