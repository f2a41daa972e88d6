//! Trajectory-level success predicates.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{angular_distance, ObjectId, ObjectKind, Point, Trajectory};

pub const NEAR_POSE_TOL: f64 = 0.05;
pub const ROTATION_TOL_DEG: f64 = 15.0;
pub const STACK_RADIUS: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Clause {
    /// The object's center lies inside the zone's footprint.
    InZone {
        object: ObjectId,
        zone: ObjectId,
    },
    NearPose {
        object: ObjectId,
        pose: Point,
        tol: f64,
    },
    RotationEquals {
        object: ObjectId,
        deg: f64,
        tol: f64,
    },
    /// `object` sits on `base` and was placed after it.
    StackedOn {
        object: ObjectId,
        base: ObjectId,
    },
}

impl Clause {
    pub fn near_pose(object: ObjectId, pose: Point) -> Self {
        Clause::NearPose {
            object,
            pose,
            tol: NEAR_POSE_TOL,
        }
    }

    pub fn rotation_equals(object: ObjectId, deg: f64) -> Self {
        Clause::RotationEquals {
            object,
            deg,
            tol: ROTATION_TOL_DEG,
        }
    }

    /// The object this clause constrains.
    pub fn subject(&self) -> ObjectId {
        match *self {
            Clause::InZone { object, .. }
            | Clause::NearPose { object, .. }
            | Clause::RotationEquals { object, .. }
            | Clause::StackedOn { object, .. } => object,
        }
    }

    /// Whether the clause holds at `traj.states[k]`.
    pub fn holds(&self, traj: &Trajectory, k: usize) -> bool {
        let state = &traj.states[k];
        let Some(obj) = state.get(self.subject()) else {
            return false;
        };
        match *self {
            Clause::InZone { zone, .. } => state
                .get(zone)
                .and_then(|z| z.footprint_contains(obj.position).ok())
                .unwrap_or(false),
            Clause::NearPose { pose, tol, .. } => obj.position.distance(pose) <= tol,
            Clause::RotationEquals { deg, tol, .. } => angular_distance(obj.rotation_deg, deg) <= tol,
            Clause::StackedOn { object, base } => {
                let Some(b) = state.get(base) else { return false };
                obj.position.distance(b.position) <= STACK_RADIUS
                    && last_placed(traj, object, k) > last_placed(traj, base, k)
            }
        }
    }

    fn referenced(&self) -> Vec<(ObjectId, bool)> {
        match *self {
            Clause::InZone { object, zone } => vec![(object, false), (zone, true)],
            Clause::NearPose { object, .. } | Clause::RotationEquals { object, .. } => vec![(object, false)],
            Clause::StackedOn { object, base } => vec![(object, false), (base, false)],
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::InZone { object, zone } => write!(f, "InZone({object}, {zone})"),
            Clause::NearPose { object, pose, tol } => {
                write!(f, "NearPose({object}, [{:.3}, {:.3}], {tol})", pose.x, pose.y)
            }
            Clause::RotationEquals { object, deg, tol } => write!(f, "RotationEquals({object}, {deg}, {tol})"),
            Clause::StackedOn { object, base } => write!(f, "StackedOn({object}, {base})"),
        }
    }
}

/// State index at which `id` was last moved, up to and including `k`;
/// zero when it never moved.
fn last_placed(traj: &Trajectory, id: ObjectId, k: usize) -> usize {
    traj.events
        .iter()
        .filter(|e| e.step < k && e.kind.moved().contains(&id))
        .map(|e| e.step + 1)
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Forbidden {
    /// No moved object's path may cross this line.
    NoCrossing {
        line: ObjectId,
    },
    NeverInZone {
        object: ObjectId,
        zone: ObjectId,
    },
}

impl fmt::Display for Forbidden {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forbidden::NoCrossing { line } => write!(f, "NoCrossing({line})"),
            Forbidden::NeverInZone { object, zone } => write!(f, "NeverInZone({object}, {zone})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Goal {
    /// Conjunctions that must hold, in order, at strictly increasing states.
    pub checkpoints: Vec<Vec<Clause>>,
    /// Conjunction that must hold at the last state.
    #[serde(rename = "final")]
    pub final_state: Vec<Clause>,
    pub forbidden: Vec<Forbidden>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("goal-scene mismatch: object {0} is not in the scene")]
    SceneMismatch(ObjectId),
    #[error("goal-scene mismatch: object {0} cannot act as a zone")]
    NotAZone(ObjectId),
    #[error("goal-scene mismatch: object {0} is not a line")]
    NotALine(ObjectId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Unmet {
    Checkpoint { index: usize, clause: String },
    Final { clause: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: String,
    /// State index where the violation was observed.
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub success: bool,
    /// First unsatisfied checkpoint or final clause.
    pub unmet: Option<Unmet>,
    /// First forbidden clause violated anywhere along the trajectory.
    pub violation: Option<Violation>,
}

impl Evaluation {
    pub fn diagnostics(&self) -> String {
        match (&self.violation, &self.unmet) {
            (Some(v), _) => format!("forbidden {} violated at state {}", v.clause, v.state),
            (None, Some(Unmet::Checkpoint { index, clause })) => {
                format!("checkpoint {index} never reached: {clause}")
            }
            (None, Some(Unmet::Final { clause })) => format!("final state fails {clause}"),
            (None, None) => "goal satisfied".to_string(),
        }
    }
}

impl Goal {
    fn check_references(&self, traj: &Trajectory) -> Result<(), GoalError> {
        let scene = traj.first();
        let clauses = self.checkpoints.iter().flatten().chain(&self.final_state);
        for clause in clauses {
            for (id, as_zone) in clause.referenced() {
                let obj = scene.get(id).ok_or(GoalError::SceneMismatch(id))?;
                if as_zone && obj.kind == ObjectKind::Line {
                    return Err(GoalError::NotAZone(id));
                }
            }
        }
        for f in &self.forbidden {
            match *f {
                Forbidden::NoCrossing { line } => {
                    let obj = scene.get(line).ok_or(GoalError::SceneMismatch(line))?;
                    if obj.kind != ObjectKind::Line {
                        return Err(GoalError::NotALine(line));
                    }
                }
                Forbidden::NeverInZone { object, zone } => {
                    scene.get(object).ok_or(GoalError::SceneMismatch(object))?;
                    let z = scene.get(zone).ok_or(GoalError::SceneMismatch(zone))?;
                    if z.kind == ObjectKind::Line {
                        return Err(GoalError::NotAZone(zone));
                    }
                }
            }
        }
        Ok(())
    }

    fn first_violation(&self, traj: &Trajectory) -> Option<Violation> {
        self.forbidden.iter().find_map(|f| match *f {
            Forbidden::NoCrossing { line } => {
                traj.crossings()
                    .find(|(_, c)| c.line == line)
                    .map(|(step, _)| Violation {
                        clause: f.to_string(),
                        state: step + 1,
                    })
            }
            Forbidden::NeverInZone { object, zone } => {
                let clause = Clause::InZone { object, zone };
                (0..traj.states.len())
                    .find(|&k| clause.holds(traj, k))
                    .map(|state| Violation {
                        clause: f.to_string(),
                        state,
                    })
            }
        })
    }

    fn first_unmet(&self, traj: &Trajectory) -> Option<Unmet> {
        let n = traj.states.len();
        let mut next = 0;
        for (index, checkpoint) in self.checkpoints.iter().enumerate() {
            // earliest match is optimal for the ordered-subsequence search
            match (next..n).find(|&k| checkpoint.iter().all(|c| c.holds(traj, k))) {
                Some(k) => next = k + 1,
                None => {
                    let clause = checkpoint
                        .iter()
                        .find(|c| !(next..n).any(|k| c.holds(traj, k)))
                        .or(checkpoint.first())
                        .map(ToString::to_string)
                        .unwrap_or_default();
                    return Some(Unmet::Checkpoint { index, clause });
                }
            }
        }
        self.final_state
            .iter()
            .find(|c| !c.holds(traj, n - 1))
            .map(|c| Unmet::Final { clause: c.to_string() })
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty() && self.final_state.is_empty() && self.forbidden.is_empty()
    }
}

/// Scores a trajectory against a goal.
pub fn evaluate(goal: &Goal, traj: &Trajectory) -> Result<Evaluation, GoalError> {
    goal.check_references(traj)?;
    let violation = goal.first_violation(traj);
    let unmet = goal.first_unmet(traj);
    Ok(Evaluation {
        success: violation.is_none() && unmet.is_none(),
        unmet,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{ActionStep, Affine2, TopViewPlan};
    use crate::world::{execute_plan, ExecConfig, Scene, SceneObject, Shape, Texture};

    fn scene() -> Scene {
        Scene {
            seed: 0,
            calibration: Affine2::IDENTITY,
            objects: vec![
                SceneObject::item(1, Shape::Block, Texture::Red, (0.03, 0.03), Point::new(0.2, 0.2)),
                SceneObject::item(2, Shape::Star, Texture::Blue, (0.03, 0.03), Point::new(0.2, 0.6)),
                SceneObject::container(3, Shape::Bowl, Texture::Green, (0.08, 0.08), Point::new(0.7, 0.7)),
                SceneObject::line(4, Texture::Red, Point::new(0.5, 0.0), Point::new(0.5, 0.5)),
            ],
        }
    }

    fn pick(from: (f64, f64), to: (f64, f64)) -> ActionStep {
        ActionStep::pick_and_place(0, 0.0, Point::new(from.0, from.1), Point::new(to.0, to.1))
    }

    fn run(steps: Vec<ActionStep>) -> Trajectory {
        execute_plan(&scene(), &TopViewPlan::from_steps(steps), &ExecConfig::default())
    }

    #[test]
    fn empty_trajectory_fails_a_move_goal() {
        let goal = Goal {
            final_state: vec![Clause::near_pose(1, Point::new(0.5, 0.8))],
            ..Default::default()
        };
        let eval = evaluate(&goal, &run(vec![])).unwrap();
        assert!(!eval.success);
        assert!(matches!(eval.unmet, Some(Unmet::Final { .. })));
    }

    #[test]
    fn exact_final_pose_succeeds() {
        let goal = Goal {
            final_state: vec![
                Clause::near_pose(1, Point::new(0.5, 0.8)),
                Clause::InZone { object: 2, zone: 3 },
            ],
            ..Default::default()
        };
        let traj = run(vec![pick((0.2, 0.2), (0.5, 0.8)), pick((0.2, 0.6), (0.7, 0.7))]);
        let eval = evaluate(&goal, &traj).unwrap();
        assert!(eval.success, "{}", eval.diagnostics());
    }

    #[test]
    fn checkpoints_respect_order() {
        let a = Point::new(0.4, 0.9);
        let home = Point::new(0.2, 0.2);
        let goal = Goal {
            checkpoints: vec![vec![Clause::near_pose(1, a)]],
            final_state: vec![Clause::near_pose(1, home)],
            ..Default::default()
        };
        // reaches `a` at state 1 and comes back
        let forward = run(vec![pick((0.2, 0.2), (0.4, 0.9)), pick((0.4, 0.9), (0.2, 0.2))]);
        assert!(evaluate(&goal, &forward).unwrap().success);
        // the two configurations in the opposite order: home again at
        // state 2, `a` only at the end
        let reversed = run(vec![
            pick((0.2, 0.2), (0.6, 0.5)),
            pick((0.6, 0.5), (0.2, 0.2)),
            pick((0.2, 0.2), (0.4, 0.9)),
        ]);
        let eval = evaluate(&goal, &reversed).unwrap();
        assert!(!eval.success);
        assert!(matches!(eval.unmet, Some(Unmet::Final { .. })));
    }

    #[test]
    fn two_checkpoints_need_distinct_states() {
        let p = Point::new(0.4, 0.9);
        let goal = Goal {
            checkpoints: vec![vec![Clause::near_pose(1, p)], vec![Clause::near_pose(1, p)]],
            ..Default::default()
        };
        assert!(
            !evaluate(&goal, &run(vec![pick((0.2, 0.2), (0.4, 0.9))]))
                .unwrap()
                .success
        );
        let twice = run(vec![pick((0.2, 0.2), (0.4, 0.9)), pick((0.4, 0.9), (0.4, 0.9))]);
        assert!(evaluate(&goal, &twice).unwrap().success);
    }

    #[test]
    fn stacking_needs_order() {
        let goal = Goal {
            final_state: vec![Clause::StackedOn { object: 1, base: 2 }],
            ..Default::default()
        };
        let on_top = run(vec![pick((0.2, 0.2), (0.2, 0.6))]);
        assert!(evaluate(&goal, &on_top).unwrap().success);
        // 2 placed onto 1 afterwards: 1 is underneath
        let under = run(vec![pick((0.2, 0.2), (0.5, 0.8)), pick((0.2, 0.6), (0.5, 0.8))]);
        assert_eq!(under.last().get(2).unwrap().position, Point::new(0.5, 0.8));
        assert!(!evaluate(&goal, &under).unwrap().success);
    }

    #[test]
    fn crossing_violates_no_crossing() {
        let goal = Goal {
            final_state: vec![Clause::near_pose(1, Point::new(0.8, 0.2))],
            forbidden: vec![Forbidden::NoCrossing { line: 4 }],
            ..Default::default()
        };
        let sweep = ActionStep::sweep(1, Point::new(0.2, 0.2), Point::new(0.8, 0.2));
        let eval = evaluate(&goal, &run(vec![sweep])).unwrap();
        assert!(!eval.success);
        assert_eq!(eval.violation.as_ref().unwrap().state, 1);
        assert!(eval.unmet.is_none());
        // lifting over the line is not a crossing
        let eval = evaluate(&goal, &run(vec![pick((0.2, 0.2), (0.8, 0.2))])).unwrap();
        assert!(eval.success);
    }

    #[test]
    fn never_in_zone() {
        let goal = Goal {
            forbidden: vec![Forbidden::NeverInZone { object: 2, zone: 3 }],
            ..Default::default()
        };
        assert!(evaluate(&goal, &run(vec![])).unwrap().success);
        let eval = evaluate(
            &goal,
            &run(vec![pick((0.2, 0.6), (0.7, 0.7)), pick((0.7, 0.7), (0.2, 0.6))]),
        )
        .unwrap();
        assert_eq!(eval.violation.unwrap().state, 1);
    }

    #[test]
    fn dangling_ids_are_errors() {
        let goal = Goal {
            final_state: vec![Clause::InZone { object: 1, zone: 99 }],
            ..Default::default()
        };
        assert_eq!(evaluate(&goal, &run(vec![])), Err(GoalError::SceneMismatch(99)));
        let goal = Goal {
            forbidden: vec![Forbidden::NoCrossing { line: 3 }],
            ..Default::default()
        };
        assert_eq!(evaluate(&goal, &run(vec![])), Err(GoalError::NotALine(3)));
    }
}
