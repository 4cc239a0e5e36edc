//! JSON exchange formats and canonical serialization.
//!
//! Bodies, measures, and problem statements cross the CLI boundary as
//! JSON. Output is canonical: object keys sorted, two-space indentation,
//! shortest round-trip float literals, one trailing newline, so byte
//! comparison of outputs is meaningful.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::discrete::SolveOptions;
use crate::geometry::{
    wulff_shape_2d, wulff_shape_3d, AnyBody, Ball, Direction, HBody, SymBox,
};
use crate::measure::MeasureVector;
use crate::smooth::{DensityProfile, SmoothOptions};
use crate::{Error, Result};

/// A body description. `kind` selects the interpretation:
///
/// - `"box"`: `half_widths`;
/// - `"ball"`: `radius` and `dim`;
/// - `"hbody"`: `directions` and `support`; constraints that do not touch
///   the body are pruned;
/// - `"polytope"`: like `hbody`, but every constraint must contribute a
///   facet.
///
/// Input directions are normalized, so integer vectors like `[1, 1, 0]`
/// are accepted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BodySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

fn require<T>(field: Option<T>, kind: &str, name: &str) -> Result<T> {
    field.ok_or_else(|| {
        Error::InvalidInput(format!("body kind '{kind}' requires the field '{name}'"))
    })
}

fn spec_to_hbody(spec: &BodySpec) -> Result<HBody> {
    let dirs = require(spec.directions.as_ref(), &spec.kind, "directions")?;
    let support = require(spec.support.as_ref(), &spec.kind, "support")?;
    let directions = dirs
        .iter()
        .map(|v| Direction::normalized(v.clone()))
        .collect::<Result<Vec<_>>>()?;
    let hb = HBody::new(directions, support.clone())?;
    if let Some(d) = spec.dim {
        if d != hb.dim() {
            return Err(Error::InvalidInput(format!(
                "field 'dim' is {d} but the directions have dimension {}",
                hb.dim()
            )));
        }
    }
    Ok(hb)
}

pub fn body_from_spec(spec: &BodySpec) -> Result<AnyBody> {
    match spec.kind.as_str() {
        "box" => {
            let hw = require(spec.half_widths.clone(), "box", "half_widths")?;
            Ok(AnyBody::Box(SymBox::new(hw)?))
        }
        "ball" => {
            let radius = require(spec.radius, "ball", "radius")?;
            let dim = require(spec.dim, "ball", "dim")?;
            Ok(AnyBody::Ball(Ball::new(radius, dim)?))
        }
        "hbody" | "polytope" => {
            let hb = spec_to_hbody(spec)?;
            let strict = spec.kind == "polytope";
            match hb.dim() {
                2 => {
                    let w = wulff_shape_2d(&hb)?;
                    if strict {
                        if let Some(&i) = w.vanished.first() {
                            return Err(Error::InvalidInput(format!(
                                "constraint {i} of the polytope does not contribute a facet"
                            )));
                        }
                    }
                    Ok(AnyBody::Polygon(w.polytope))
                }
                _ => {
                    let w = wulff_shape_3d(&hb)?;
                    if strict {
                        if let Some(&i) = w.vanished.first() {
                            return Err(Error::InvalidInput(format!(
                                "constraint {i} of the polytope does not contribute a facet"
                            )));
                        }
                    }
                    Ok(AnyBody::Solid(w.polytope))
                }
            }
        }
        other => Err(Error::InvalidInput(format!(
            "unknown body kind '{other}' (expected box, ball, hbody, or polytope)"
        ))),
    }
}

pub fn body_to_spec(body: &AnyBody) -> Result<BodySpec> {
    let empty = BodySpec {
        kind: String::new(),
        dim: None,
        directions: None,
        support: None,
        half_widths: None,
        radius: None,
    };
    match body {
        AnyBody::Box(b) => Ok(BodySpec {
            kind: "box".into(),
            dim: Some(b.dim()),
            half_widths: Some(b.half_widths().to_vec()),
            ..empty
        }),
        AnyBody::Ball(b) => Ok(BodySpec {
            kind: "ball".into(),
            dim: Some(b.dim),
            radius: Some(b.radius),
            ..empty
        }),
        AnyBody::Polygon(p) => Ok(hbody_to_spec(&p.to_hbody()?)),
        AnyBody::Solid(p) => Ok(hbody_to_spec(&p.to_hbody()?)),
    }
}

pub fn hbody_to_spec(hb: &HBody) -> BodySpec {
    BodySpec {
        kind: "hbody".into(),
        dim: Some(hb.dim()),
        directions: Some(hb.directions().iter().map(|d| d.as_slice().to_vec()).collect()),
        support: Some(hb.support().to_vec()),
        half_widths: None,
        radius: None,
    }
}

/// One atom of an even measure: the pair-representative direction and the
/// weight carried by each member of the pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureAtom {
    pub v: Vec<f64>,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub dim: usize,
    pub atoms: Vec<MeasureAtom>,
    /// Sum over both members of every pair; informational on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
}

pub fn measure_from_spec(spec: &MeasureSpec) -> Result<MeasureVector> {
    let mut dirs = Vec::with_capacity(spec.atoms.len());
    let mut weights = Vec::with_capacity(spec.atoms.len());
    for atom in &spec.atoms {
        dirs.push(Direction::normalized(atom.v.clone())?);
        weights.push(atom.c);
    }
    MeasureVector::new(spec.dim, dirs, weights)
}

pub fn measure_to_spec(mv: &MeasureVector) -> MeasureSpec {
    MeasureSpec {
        dim: mv.dim,
        atoms: mv
            .directions
            .iter()
            .zip(&mv.weights)
            .map(|(d, c)| MeasureAtom { v: d.as_slice().to_vec(), c: *c })
            .collect(),
        total: Some(mv.total()),
    }
}

/// Optional overrides of [`SolveOptions`] fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveOptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_newton_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_support: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_small: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_mass: Option<bool>,
}

impl SolveOptionsSpec {
    pub fn apply(&self, mut base: SolveOptions) -> SolveOptions {
        if let Some(v) = self.residual_tol {
            base.residual_tol = v;
        }
        if let Some(v) = self.max_newton_iters {
            base.max_newton_iters = v;
        }
        if let Some(v) = self.continuation_steps {
            base.continuation_steps = v;
        }
        if let Some(v) = self.initial_support {
            base.initial_support = v;
        }
        if let Some(v) = self.start_small {
            base.start_small = v;
        }
        if let Some(v) = self.force_mass {
            base.force_mass = v;
        }
        base
    }
}

/// A discrete problem statement: the measure fields inline, plus `mode`
/// ("plain" or "normalized", defaulting to "plain"), `alpha` for the
/// normalized mode, and optional solver overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(flatten)]
    pub measure: MeasureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<SolveOptionsSpec>,
}

impl ProblemSpec {
    pub fn mode(&self) -> Result<&str> {
        match self.mode.as_deref() {
            None => Ok("plain"),
            Some(m @ ("plain" | "normalized")) => Ok(m),
            Some(other) => Err(Error::InvalidInput(format!(
                "field 'mode' must be \"plain\" or \"normalized\", got \"{other}\""
            ))),
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        self.options
            .as_ref()
            .map(|o| o.apply(SolveOptions::default()))
            .unwrap_or_default()
    }
}

/// A smooth problem statement: `N` density samples on the uniform
/// half-period grid, plus optional solver controls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothProblemSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopy_steps: Option<usize>,
}

impl SmoothProblemSpec {
    pub fn density(&self) -> Result<DensityProfile> {
        if self.n != self.f.len() {
            return Err(Error::InvalidInput(format!(
                "field 'N' is {} but 'f' carries {} samples",
                self.n,
                self.f.len()
            )));
        }
        Ok(DensityProfile { values: self.f.clone() })
    }

    pub fn options(&self) -> SmoothOptions {
        let mut o = SmoothOptions::default();
        if let Some(v) = self.residual_tol {
            o.residual_tol = v;
        }
        if let Some(v) = self.homotopy_steps {
            o.homotopy_steps = v;
        }
        o
    }
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = serde_json::Map::new();
            for (k, val) in entries {
                out.insert(k, sort_keys(val));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Canonical JSON text: sorted keys, pretty printed, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    let mut s = serde_json::to_string_pretty(&sort_keys(v))
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("could not parse {what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_and_ball_specs_round_trip() {
        let spec: BodySpec =
            parse_json(r#"{"kind": "box", "half_widths": [1.0, 2.0]}"#, "body").unwrap();
        let body = body_from_spec(&spec).unwrap();
        assert!(matches!(&body, AnyBody::Box(b) if b.half_widths() == [1.0, 2.0]));
        let back = body_to_spec(&body).unwrap();
        assert_eq!(back.kind, "box");
        assert_eq!(back.half_widths.unwrap(), vec![1.0, 2.0]);

        let spec: BodySpec =
            parse_json(r#"{"kind": "ball", "radius": 1.5, "dim": 3}"#, "body").unwrap();
        let body = body_from_spec(&spec).unwrap();
        assert!(matches!(&body, AnyBody::Ball(b) if b.radius == 1.5 && b.dim == 3));
    }

    #[test]
    fn hbody_spec_normalizes_and_prunes() {
        let text = r#"{
            "kind": "hbody",
            "directions": [[1, 0], [0, 3], [1, 1]],
            "support": [1.0, 1.0, 2.0]
        }"#;
        let spec: BodySpec = parse_json(text, "body").unwrap();
        let body = body_from_spec(&spec).unwrap();
        match &body {
            AnyBody::Polygon(p) => assert_eq!(p.len(), 4),
            other => panic!("expected polygon, got {other:?}"),
        }
        // The same input under the strict kind names the vanished index.
        let strict: BodySpec =
            parse_json(&text.replace("hbody", "polytope"), "body").unwrap();
        match body_from_spec(&strict) {
            Err(Error::InvalidInput(msg)) => assert!(msg.contains("constraint 2"), "{msg}"),
            other => panic!("expected named constraint error, got {other:?}"),
        }
    }

    #[test]
    fn missing_fields_are_named() {
        let spec: BodySpec = parse_json(r#"{"kind": "box"}"#, "body").unwrap();
        match body_from_spec(&spec) {
            Err(Error::InvalidInput(msg)) => assert!(msg.contains("half_widths"), "{msg}"),
            other => panic!("expected missing-field error, got {other:?}"),
        }
        let spec: BodySpec = parse_json(r#"{"kind": "gem"}"#, "body").unwrap();
        assert!(matches!(body_from_spec(&spec), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn measure_specs_round_trip() {
        let text = r#"{
            "dim": 2,
            "atoms": [{"v": [1, 0], "c": 0.05}, {"v": [0, 1], "c": 0.07}]
        }"#;
        let spec: MeasureSpec = parse_json(text, "measure").unwrap();
        let mv = measure_from_spec(&spec).unwrap();
        assert_eq!(mv.len(), 2);
        assert!((mv.total() - 0.24).abs() < 1e-15);
        let back = measure_to_spec(&mv);
        assert_eq!(back.atoms.len(), 2);
        assert_eq!(back.total, Some(mv.total()));
    }

    #[test]
    fn problem_options_apply_over_defaults() {
        let text = r#"{
            "dim": 2,
            "atoms": [{"v": [1, 0], "c": 0.05}],
            "options": {"continuation_steps": 40, "start_small": true}
        }"#;
        let spec: ProblemSpec = parse_json(text, "problem").unwrap();
        assert_eq!(spec.mode().unwrap(), "plain");
        assert_eq!(spec.measure.atoms.len(), 1);
        let opts = spec.solve_options();
        assert_eq!(opts.continuation_steps, 40);
        assert!(opts.start_small);
        assert_eq!(opts.residual_tol, 1e-10);

        let spec: ProblemSpec = parse_json(
            r#"{"dim": 2, "atoms": [], "mode": "normalized", "alpha": 0.3}"#,
            "problem",
        )
        .unwrap();
        assert_eq!(spec.mode().unwrap(), "normalized");
        assert_eq!(spec.alpha, Some(0.3));
        let bad: ProblemSpec =
            parse_json(r#"{"dim": 2, "atoms": [], "mode": "dual"}"#, "problem").unwrap();
        assert!(bad.mode().is_err());
    }

    #[test]
    fn smooth_problem_checks_its_grid_size() {
        let spec: SmoothProblemSpec =
            parse_json(r#"{"N": 3, "f": [0.1, 0.1, 0.1]}"#, "smooth problem").unwrap();
        assert_eq!(spec.density().unwrap().values.len(), 3);
        let bad: SmoothProblemSpec =
            parse_json(r#"{"N": 4, "f": [0.1, 0.1, 0.1]}"#, "smooth problem").unwrap();
        match bad.density() {
            Err(Error::InvalidInput(msg)) => assert!(msg.contains("'N'"), "{msg}"),
            other => panic!("expected size mismatch error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_json_is_sorted_and_stable() {
        #[derive(Serialize)]
        struct Sample {
            zeta: f64,
            alpha: f64,
        }
        let s = to_canonical_json(&Sample { zeta: 0.5, alpha: 1.0 }).unwrap();
        assert_eq!(s, "{\n  \"alpha\": 1.0,\n  \"zeta\": 0.5\n}\n");
        // Shortest round-trip float text survives.
        let v = to_canonical_json(&vec![0.1, 0.4660649426743923]).unwrap();
        assert!(v.contains("0.4660649426743923"));
    }

    #[test]
    fn specs_reject_garbage() {
        assert!(parse_json::<BodySpec>("{", "body").is_err());
        let spec: BodySpec =
            parse_json(r#"{"kind": "hbody", "directions": [[0, 0]], "support": [1]}"#, "body")
                .unwrap();
        assert!(body_from_spec(&spec).is_err());
    }

    #[test]
    fn solid_spec_round_trip_preserves_geometry() {
        let spec: BodySpec = parse_json(
            r#"{"kind": "hbody",
                "directions": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]],
                "support": [1.0, 1.0, 1.0, 1.6]}"#,
            "body",
        )
        .unwrap();
        let body = body_from_spec(&spec).unwrap();
        let back = body_from_spec(&body_to_spec(&body).unwrap()).unwrap();
        let grid = crate::geometry::sphere_grid(162);
        for u in &grid {
            let a = crate::geometry::support_value(&body, u).unwrap();
            let b = crate::geometry::support_value(&back, u).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }
}
