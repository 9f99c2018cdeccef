use serde::Serialize;
use udn_cache::analysis::to_f64;
use udn_cache::geometry::classify_point;
use udn_cache::report::closed_form;
use udn_cache::{NodeId, Regime, Scheme, UserClass};

/// Region-map value for a point whose access set fits no family.
pub const UNKNOWN: u8 = 254;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classified {
    pub anchor: [usize; 2],
    pub nodes: Vec<[usize; 2]>,
    pub family: Option<String>,
    pub regime: String,
}

fn wrap(v: f64, k: usize) -> (usize, f64) {
    let nearest = v.round();
    let node = (nearest as i64).rem_euclid(k as i64) as usize;
    (node, v - nearest)
}

/// Classifies the user at `(x, y)` against its nearest node. Every point is
/// within `sqrt(2)/2` of a node, so any admissible radius reaches one.
pub fn classify(k1: usize, k2: usize, r: f64, x: f64, y: f64) -> Result<Classified, String> {
    if !x.is_finite() || !y.is_finite() {
        return Err("point coordinates must be finite".into());
    }
    let regime = Regime::from_radius(r).map_err(|e| e.to_string())?;
    let (a1, dx) = wrap(x, k1.max(1));
    let (a2, dy) = wrap(y, k2.max(1));
    let anchor = NodeId::from((a1, a2));
    let set = classify_point(anchor, dx, dy, r, k1, k2).map_err(|e| e.to_string())?;
    Ok(Classified {
        anchor: [a1, a2],
        nodes: set.nodes.iter().map(|n| [n.k1, n.k2]).collect(),
        family: set.family.map(|(c, _)| c.to_string()),
        regime: regime.to_string(),
    })
}

pub fn class_names() -> Vec<&'static str> {
    UserClass::ALL.iter().map(|c| c.as_str()).collect()
}

/// Samples pixel centres; pixel `(i, j)` sits at `x = i / px - 1/2`,
/// `y = j / px - 1/2` so node `(0, 0)` is centred in the first cell.
pub fn region_map(k1: usize, k2: usize, r: f64, px: usize) -> Result<Vec<u8>, String> {
    if px == 0 || px > 256 {
        return Err("pixels per cell must be in 1..=256".into());
    }
    let (w, h) = (k1 * px, k2 * px);
    let mut out = Vec::with_capacity(w * h);
    for j in 0..h {
        for i in 0..w {
            let x = (i as f64 + 0.5) / px as f64 - 0.5;
            let y = (j as f64 + 0.5) / px as f64 - 0.5;
            let c = classify(k1, k2, r, x, y)?;
            let idx = c
                .family
                .and_then(|f| UserClass::ALL.iter().position(|k| k.as_str() == f))
                .map_or(UNKNOWN, |p| p as u8);
            out.push(idx);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoadCurves {
    pub regime: String,
    pub t: Vec<usize>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub uncoded: Vec<f64>,
    pub benchmark_d: Vec<f64>,
}

pub fn load_curves(k1: usize, k2: usize, regime: &str) -> Result<LoadCurves, String> {
    let regime: Regime = regime.parse().map_err(|e: udn_cache::Error| e.to_string())?;
    if k1 < 3 || k2 < 3 || k1 * k2 > 400 {
        return Err(format!("grid {k1}x{k2} outside 3x3 ..= 20x20"));
    }
    let k = (k1 * k2) as u64;
    let curve = |s: Scheme| -> Result<Vec<f64>, String> {
        (0..=k)
            .map(|t| closed_form(s, regime, k, t).map(|l| to_f64(&l)).map_err(|e| e.to_string()))
            .collect()
    };
    Ok(LoadCurves {
        regime: regime.to_string(),
        t: (0..=k as usize).collect(),
        a: curve(Scheme::A)?,
        b: curve(Scheme::B)?,
        uncoded: curve(Scheme::Uncoded)?,
        benchmark_d: curve(Scheme::BenchmarkD)?,
    })
}
