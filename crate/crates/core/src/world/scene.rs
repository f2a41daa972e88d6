use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::geometry::{rotated_rect_contains, Point};
use super::WorldError;
use crate::planner::Affine2;

/// Scene-unique object identifier.
pub type ObjectId = u32;

/// Minimum center separation between item objects in a freshly generated
/// scene.
pub const MIN_ITEM_SEPARATION: f64 = 0.12;
/// Upper bound on either half-extent of an object footprint.
pub const MAX_HALF_EXTENT: f64 = 0.25;

macro_rules! vocabulary {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

vocabulary! {
    Shape {
        Block => "block",
        Bowl => "bowl",
        Ring => "ring",
        Star => "star",
        Cross => "cross",
        Triangle => "triangle",
        LetterL => "letter-L",
        LetterT => "letter-T",
        Pan => "pan",
        Pallet => "pallet",
    }
}

vocabulary! {
    Texture {
        Red => "red",
        Blue => "blue",
        Green => "green",
        Yellow => "yellow",
        Purple => "purple",
        Orange => "orange",
        PolkaDot => "polka-dot",
        Striped => "striped",
        Wooden => "wooden",
        Granite => "granite",
    }
}

vocabulary! {
    ObjectKind {
        Item => "item",
        Container => "container",
        Zone => "zone",
        Line => "line",
    }
}

impl Shape {
    pub const CONTAINERS: &'static [Shape] = &[Shape::Bowl, Shape::Pan, Shape::Pallet];

    pub fn is_container_shape(self) -> bool {
        Self::CONTAINERS.contains(&self)
    }

    /// Shapes used for ordinary graspable items.
    pub fn item_shapes() -> impl Iterator<Item = Shape> {
        Self::ALL.iter().copied().filter(|s| !s.is_container_shape())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: ObjectId,
    pub kind: ObjectKind,
    pub shape: Shape,
    pub texture: Texture,
    /// Half-extents `(w, h)` in workspace fractions.
    pub size: (f64, f64),
    pub position: Point,
    pub rotation_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<[Point; 2]>,
}

impl SceneObject {
    pub fn item(id: ObjectId, shape: Shape, texture: Texture, size: (f64, f64), position: Point) -> Self {
        Self {
            id,
            kind: ObjectKind::Item,
            shape,
            texture,
            size,
            position,
            rotation_deg: 0.0,
            endpoints: None,
        }
    }

    pub fn container(id: ObjectId, shape: Shape, texture: Texture, size: (f64, f64), position: Point) -> Self {
        Self {
            kind: ObjectKind::Container,
            ..Self::item(id, shape, texture, size, position)
        }
    }

    pub fn zone(id: ObjectId, texture: Texture, size: (f64, f64), position: Point) -> Self {
        Self {
            kind: ObjectKind::Zone,
            ..Self::item(id, Shape::Pallet, texture, size, position)
        }
    }

    /// A constraint line between two endpoints; its position is the midpoint.
    pub fn line(id: ObjectId, texture: Texture, a: Point, b: Point) -> Self {
        let mid = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        Self {
            id,
            kind: ObjectKind::Line,
            shape: Shape::Block,
            texture,
            size: (0.005, 0.005),
            position: mid,
            rotation_deg: 0.0,
            endpoints: Some([a, b]),
        }
    }

    pub fn with_rotation(mut self, rotation_deg: f64) -> Self {
        self.rotation_deg = super::normalize_deg(rotation_deg);
        self
    }

    /// Whether `p` falls inside the object's rotated rectangular footprint.
    pub fn footprint_contains(&self, p: Point) -> Result<bool, WorldError> {
        if self.kind == ObjectKind::Line {
            return Err(WorldError::NoFootprint(self.id));
        }
        Ok(rotated_rect_contains(self.position, self.size, self.rotation_deg, p))
    }

    /// Radius of the circle enclosing the footprint.
    pub fn circumradius(&self) -> f64 {
        self.size.0.hypot(self.size.1)
    }
}

/// Symbolic top-view world state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub seed: u64,
    pub calibration: Affine2,
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub fn new(seed: u64, calibration: Affine2) -> Self {
        Self {
            seed,
            calibration,
            objects: Vec::new(),
        }
    }

    pub fn get(&self, id: ObjectId) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub(crate) fn get_mut(&mut self, id: ObjectId) -> Option<&mut SceneObject> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    pub fn items(&self) -> impl Iterator<Item = &SceneObject> {
        self.objects.iter().filter(|o| o.kind == ObjectKind::Item)
    }

    pub fn lines(&self) -> impl Iterator<Item = &SceneObject> {
        self.objects.iter().filter(|o| o.kind == ObjectKind::Line)
    }

    pub fn ids(&self) -> BTreeSet<ObjectId> {
        self.objects.iter().map(|o| o.id).collect()
    }

    pub fn next_id(&self) -> ObjectId {
        self.objects.iter().map(|o| o.id + 1).max().unwrap_or(1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scene serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Scene, WorldError> {
        let scene: Scene = serde_json::from_str(s).map_err(|e| WorldError::InvalidScene(e.to_string()))?;
        scene.validate_objects()?;
        Ok(scene)
    }

    /// Per-object invariants that hold in every reachable state.
    pub fn validate_objects(&self) -> Result<(), WorldError> {
        let mut seen = BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o.id) {
                return Err(WorldError::InvalidScene(format!("duplicate object id {}", o.id)));
            }
            let (w, h) = o.size;
            if !(w > 0.0 && w <= MAX_HALF_EXTENT && h > 0.0 && h <= MAX_HALF_EXTENT) {
                return Err(WorldError::InvalidScene(format!(
                    "object {} has size out of range",
                    o.id
                )));
            }
            if !(0.0..360.0).contains(&o.rotation_deg) {
                return Err(WorldError::InvalidScene(format!(
                    "object {} rotation not normalized",
                    o.id
                )));
            }
            if !o.position.is_finite() || !o.position.in_unit_square() {
                return Err(WorldError::InvalidScene(format!(
                    "object {} center outside workspace",
                    o.id
                )));
            }
            if (o.kind == ObjectKind::Line) != o.endpoints.is_some() {
                return Err(WorldError::InvalidScene(format!(
                    "object {}: endpoints must be present exactly for lines",
                    o.id
                )));
            }
        }
        Ok(())
    }

    /// Invariants of a freshly created scene: per-object checks plus the
    /// minimum separation between items.
    pub fn validate_initial(&self) -> Result<(), WorldError> {
        self.validate_objects()?;
        let items: Vec<&SceneObject> = self.items().collect();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                if a.position.distance(b.position) < MIN_ITEM_SEPARATION - 1e-12 {
                    return Err(WorldError::InvalidScene(format!(
                        "items {} and {} closer than {MIN_ITEM_SEPARATION}",
                        a.id, b.id
                    )));
                }
            }
        }
        Ok(())
    }
}
