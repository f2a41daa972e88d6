use serde::{Deserialize, Serialize};

use super::geometry::{normalize_deg, point_segment_distance, rotated_bounds, segments_intersect, Point};
use super::scene::{ObjectId, ObjectKind, Scene};
use super::WorldError;
use crate::planner::{ActionType, TopViewPlan};

pub const DEFAULT_SWEEP_WIDTH: f64 = 0.08;
pub const DEFAULT_MAX_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub max_steps: usize,
    pub sweep_width: f64,
    /// Snap each step's `from` to the center of its named target object.
    pub strict_ids: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        Self {
            max_steps: DEFAULT_MAX_STEPS,
            sweep_width: DEFAULT_SWEEP_WIDTH,
            strict_ids: false,
        }
    }
}

/// A moved object's straight path crossed a constraint line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub object: ObjectId,
    pub line: ObjectId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    Picked {
        object: ObjectId,
        clamped: bool,
    },
    /// Nothing pickable under `from`; the scene is unchanged.
    EmptyPick,
    Swept {
        moved: Vec<ObjectId>,
        crossings: Vec<Crossing>,
        clamped: Vec<ObjectId>,
    },
    /// The plan exceeded the step limit; `dropped` steps were not executed.
    Truncated {
        dropped: usize,
    },
}

impl EventKind {
    pub fn moved(&self) -> Vec<ObjectId> {
        match self {
            EventKind::Picked { object, .. } => vec![*object],
            EventKind::Swept { moved, .. } => moved.clone(),
            EventKind::EmptyPick | EventKind::Truncated { .. } => Vec::new(),
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        match self {
            EventKind::Swept { crossings, .. } => crossings,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionEvent {
    pub step: usize,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Every state visited while executing a plan, plus what happened at each
/// step. `states[0]` is the initial scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<Scene>,
    pub events: Vec<ExecutionEvent>,
}

impl Trajectory {
    pub fn initial(scene: Scene) -> Self {
        Self {
            states: vec![scene],
            events: Vec::new(),
        }
    }

    pub fn first(&self) -> &Scene {
        &self.states[0]
    }

    pub fn last(&self) -> &Scene {
        self.states.last().expect("trajectory is never empty")
    }

    /// Number of executed actions.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn truncated(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e.kind, EventKind::Truncated { .. }))
    }

    pub fn crossings(&self) -> impl Iterator<Item = (usize, &Crossing)> {
        self.events
            .iter()
            .flat_map(|e| e.kind.crossings().iter().map(move |c| (e.step, c)))
    }
}

/// Resolves which item a pick at `p` addresses: the item whose footprint
/// contains `p` with the nearest center, lowest id on ties.
pub fn object_at(scene: &Scene, p: Point) -> Option<ObjectId> {
    scene
        .items()
        .filter(|o| o.footprint_contains(p).unwrap_or(false))
        .map(|o| (o.position.distance(p), o.id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}

fn check_in_workspace(p: Point) -> Result<(), WorldError> {
    if p.is_finite() && p.in_unit_square() {
        Ok(())
    } else {
        Err(WorldError::OutOfWorkspace(p))
    }
}

pub fn apply_pick_and_place(
    scene: &Scene,
    from: Point,
    to: Point,
    rotation_delta_deg: f64,
) -> Result<(Scene, EventKind), WorldError> {
    check_in_workspace(from)?;
    check_in_workspace(to)?;
    let Some(id) = object_at(scene, from) else {
        return Ok((scene.clone(), EventKind::EmptyPick));
    };
    let mut next = scene.clone();
    let obj = next.get_mut(id).expect("resolved id exists");
    let rotation = if rotation_delta_deg.is_finite() {
        normalize_deg(obj.rotation_deg + rotation_delta_deg)
    } else {
        obj.rotation_deg
    };
    let (ex, ey) = rotated_bounds(obj.size, rotation);
    let placed = Point::new(to.x.clamp(ex, 1.0 - ex), to.y.clamp(ey, 1.0 - ey));
    obj.position = placed;
    obj.rotation_deg = rotation;
    Ok((
        next,
        EventKind::Picked {
            object: id,
            clamped: placed != to,
        },
    ))
}

pub fn apply_sweep(scene: &Scene, from: Point, to: Point, width: f64) -> Result<(Scene, EventKind), WorldError> {
    if width.is_nan() || width <= 0.0 || width.is_infinite() {
        return Err(WorldError::InvalidSweepWidth(width));
    }
    check_in_workspace(from)?;
    check_in_workspace(to)?;
    let (dx, dy) = (to.x - from.x, to.y - from.y);
    let lines: Vec<(ObjectId, [Point; 2])> = scene.lines().filter_map(|l| l.endpoints.map(|e| (l.id, e))).collect();

    let mut next = scene.clone();
    let mut moved = Vec::new();
    let mut crossings = Vec::new();
    let mut clamped = Vec::new();
    for obj in next.objects.iter_mut().filter(|o| o.kind == ObjectKind::Item) {
        if point_segment_distance(obj.position, from, to) > width / 2.0 {
            continue;
        }
        let start = obj.position;
        let raw = start.offset(dx, dy);
        let end = raw.clamp_unit();
        obj.position = end;
        moved.push(obj.id);
        if end != raw {
            clamped.push(obj.id);
        }
        for (line, [a, b]) in &lines {
            if segments_intersect(start, end, *a, *b) {
                crossings.push(Crossing {
                    object: obj.id,
                    line: *line,
                });
            }
        }
    }
    Ok((
        next,
        EventKind::Swept {
            moved,
            crossings,
            clamped,
        },
    ))
}

/// Runs a top-view plan step by step, recording one state per executed
/// step. Steps beyond `config.max_steps` are dropped with a `Truncated`
/// event.
pub fn execute_plan(scene: &Scene, plan: &TopViewPlan, config: &ExecConfig) -> Trajectory {
    let mut traj = Trajectory::initial(scene.clone());
    for (i, step) in plan.steps().iter().enumerate() {
        if i >= config.max_steps {
            traj.events.push(ExecutionEvent {
                step: i,
                kind: EventKind::Truncated {
                    dropped: plan.steps().len() - i,
                },
            });
            break;
        }
        let current = traj.last();
        let mut from = step.from;
        if config.strict_ids {
            if let Some(target) = current.get(step.target_object) {
                from = target.position;
            }
        }
        // mapped plans are clamped into the workspace, so these cannot fail
        let applied = match step.action_type {
            ActionType::PickAndPlace => apply_pick_and_place(current, from, step.to, step.rotation),
            ActionType::Sweep => apply_sweep(current, from, step.to, config.sweep_width),
        };
        let (next, kind) = applied.unwrap_or_else(|_| (current.clone(), EventKind::EmptyPick));
        traj.states.push(next);
        traj.events.push(ExecutionEvent { step: i, kind });
    }
    traj
}
