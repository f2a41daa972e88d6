//! Text serialization of objects, scenes and multimodal prompts.
//!
//! Every object becomes a block in front-view coordinates, printed with
//! three decimals:
//!
//! ```text
//! object_3:
//!   shape: block
//!   texture: red
//!   size: [0.100, 0.100]
//!   position:
//!     view: front
//!     center: [0.500, 0.500]
//! ```
//!
//! Constraint lines are a single row:
//! `line_7: endpoints: [[0.300, 0.100], [0.700, 0.100]]`.

use std::fmt::Write;

use crate::planner::{unmap_point, Affine2};
use crate::tasks::{MultimodalPrompt, PromptSegment};
use crate::world::{ObjectKind, Point, Scene, SceneObject};

pub const SCENE_HEADER: &str = "scene (front view):";

pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

pub(crate) fn pair(p: Point) -> String {
    format!("[{}, {}]", num(p.x), num(p.y))
}

pub fn describe_object(obj: &SceneObject, cal: &Affine2) -> String {
    if let (ObjectKind::Line, Some([a, b])) = (obj.kind, obj.endpoints) {
        return format!(
            "line_{}: endpoints: [{}, {}]",
            obj.id,
            pair(unmap_point(cal, a)),
            pair(unmap_point(cal, b))
        );
    }
    let mut out = String::new();
    let _ = write!(
        out,
        "object_{}:\n  shape: {}\n  texture: {}\n  size: [{}, {}]\n  position:\n    view: front\n    center: {}",
        obj.id,
        obj.shape,
        obj.texture,
        num(obj.size.0),
        num(obj.size.1),
        pair(unmap_point(cal, obj.position)),
    );
    out
}

/// Header line followed by one block per object in ascending id order.
pub fn describe_scene(scene: &Scene) -> String {
    let mut objects: Vec<&SceneObject> = scene.objects.iter().collect();
    objects.sort_by_key(|o| o.id);
    let mut out = String::from(SCENE_HEADER);
    for o in objects {
        out.push('\n');
        out.push_str(&describe_object(o, &scene.calibration));
    }
    out
}

pub fn render_prompt(prompt: &MultimodalPrompt, cal: &Affine2) -> String {
    prompt
        .segments
        .iter()
        .map(|seg| match seg {
            PromptSegment::Text(t) => t.clone(),
            PromptSegment::Object(o) => describe_object(o, cal),
            PromptSegment::Scene(s) => describe_scene(s),
        })
        .collect::<Vec<_>>()
        .join("\n")
}
