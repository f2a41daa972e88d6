//! Symbolic 2D tabletop state and the semantics of the two low-level
//! actions, pick-and-place and sweep.

mod exec;
mod geometry;
mod scene;

use thiserror::Error;

pub use exec::{
    apply_pick_and_place, apply_sweep, execute_plan, object_at, Crossing, EventKind, ExecConfig, ExecutionEvent,
    Trajectory, DEFAULT_MAX_STEPS, DEFAULT_SWEEP_WIDTH,
};
pub use geometry::{
    angular_distance, normalize_deg, point_segment_distance, rotated_bounds, rotated_rect_contains, segments_intersect,
    Point,
};
pub use scene::{ObjectId, ObjectKind, Scene, SceneObject, Shape, Texture, MAX_HALF_EXTENT, MIN_ITEM_SEPARATION};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("no-footprint: object {0} is a line")]
    NoFootprint(ObjectId),
    #[error("invalid-sweep-width: {0}")]
    InvalidSweepWidth(f64),
    #[error("point ({}, {}) outside the workspace", .0.x, .0.y)]
    OutOfWorkspace(Point),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{ActionStep, Affine2, TopViewPlan};

    fn block(id: ObjectId, x: f64, y: f64, half: f64) -> SceneObject {
        SceneObject::item(id, Shape::Block, Texture::Red, (half, half), Point::new(x, y))
    }

    fn scene(objects: Vec<SceneObject>) -> Scene {
        Scene {
            seed: 0,
            calibration: Affine2::IDENTITY,
            objects,
        }
    }

    #[test]
    fn footprint_center_and_outside() {
        let o = block(1, 0.5, 0.5, 0.1);
        assert!(o.footprint_contains(Point::new(0.5, 0.5)).unwrap());
        assert!(!o.footprint_contains(Point::new(0.65, 0.5)).unwrap());
    }

    #[test]
    fn footprint_rotated_ninety() {
        let o = SceneObject::item(1, Shape::Block, Texture::Red, (0.2, 0.05), Point::new(0.5, 0.5)).with_rotation(90.0);
        assert!(o.footprint_contains(Point::new(0.5, 0.65)).unwrap());
    }

    #[test]
    fn lines_have_no_footprint() {
        let l = SceneObject::line(4, Texture::Red, Point::new(0.1, 0.1), Point::new(0.9, 0.1));
        assert_eq!(
            l.footprint_contains(Point::new(0.5, 0.1)),
            Err(WorldError::NoFootprint(4))
        );
    }

    #[test]
    fn object_at_cases() {
        assert_eq!(object_at(&scene(vec![]), Point::new(0.4, 0.4)), None);
        let s = scene(vec![block(1, 0.3, 0.3, 0.1)]);
        assert_eq!(object_at(&s, Point::new(0.3, 0.3)), Some(1));
        let s = scene(vec![block(7, 0.56, 0.5, 0.1), block(2, 0.5, 0.5, 0.1)]);
        assert_eq!(object_at(&s, Point::new(0.52, 0.5)), Some(2));
        // equal distances resolve to the lower id
        let s = scene(vec![block(7, 0.54, 0.5, 0.1), block(2, 0.5, 0.5, 0.1)]);
        assert_eq!(object_at(&s, Point::new(0.52, 0.5)), Some(2));
    }

    #[test]
    fn containers_are_not_pickable() {
        let bowl = SceneObject::container(1, Shape::Bowl, Texture::Blue, (0.1, 0.1), Point::new(0.5, 0.5));
        assert_eq!(object_at(&scene(vec![bowl]), Point::new(0.5, 0.5)), None);
    }

    #[test]
    fn pick_and_place_moves_and_rotates() {
        let s = scene(vec![
            block(1, 0.2, 0.2, 0.05).with_rotation(30.0),
            block(2, 0.6, 0.2, 0.05),
        ]);
        let (next, ev) = apply_pick_and_place(&s, Point::new(0.2, 0.2), Point::new(0.8, 0.8), 60.0).unwrap();
        assert_eq!(
            ev,
            EventKind::Picked {
                object: 1,
                clamped: false
            }
        );
        assert_eq!(next.get(1).unwrap().position, Point::new(0.8, 0.8));
        assert_eq!(next.get(1).unwrap().rotation_deg, 90.0);
        assert_eq!(next.get(2), s.get(2));
    }

    #[test]
    fn empty_pick_is_noop() {
        let s = scene(vec![block(1, 0.2, 0.2, 0.05)]);
        let (next, ev) = apply_pick_and_place(&s, Point::new(0.7, 0.7), Point::new(0.1, 0.1), 0.0).unwrap();
        assert_eq!(ev, EventKind::EmptyPick);
        assert_eq!(next, s);
    }

    #[test]
    fn placement_keeps_footprint_inside() {
        let s = scene(vec![block(1, 0.5, 0.5, 0.05)]);
        let (next, ev) = apply_pick_and_place(&s, Point::new(0.5, 0.5), Point::new(1.0, 0.0), 0.0).unwrap();
        assert_eq!(
            ev,
            EventKind::Picked {
                object: 1,
                clamped: true
            }
        );
        assert_eq!(next.get(1).unwrap().position, Point::new(0.95, 0.05));
    }

    #[test]
    fn sweep_translates_band_and_records_crossing() {
        let line = SceneObject::line(9, Texture::Red, Point::new(0.5, 0.0), Point::new(0.5, 1.0));
        let s = scene(vec![block(1, 0.4, 0.5, 0.03), block(2, 0.4, 0.7, 0.03), line]);
        let (next, ev) = apply_sweep(&s, Point::new(0.3, 0.5), Point::new(0.7, 0.5), 0.08).unwrap();
        let p = next.get(1).unwrap().position;
        assert!((p.x - 0.8).abs() < 1e-12 && p.y == 0.5);
        assert_eq!(next.get(2), s.get(2));
        assert_eq!(
            ev,
            EventKind::Swept {
                moved: vec![1],
                crossings: vec![Crossing { object: 1, line: 9 }],
                clamped: vec![],
            }
        );
    }

    #[test]
    fn sweep_picks_up_object_at_start() {
        let s = scene(vec![block(1, 0.3, 0.3, 0.03)]);
        let (next, _) = apply_sweep(&s, Point::new(0.3, 0.3), Point::new(0.3, 0.6), 0.08).unwrap();
        assert_eq!(next.get(1).unwrap().position, Point::new(0.3, 0.6));
    }

    #[test]
    fn sweep_rejects_bad_width() {
        let s = scene(vec![]);
        let p = Point::new(0.5, 0.5);
        assert_eq!(apply_sweep(&s, p, p, 0.0), Err(WorldError::InvalidSweepWidth(0.0)));
        assert!(apply_sweep(&s, p, p, -1.0).is_err());
    }

    fn pick(from: (f64, f64), to: (f64, f64)) -> ActionStep {
        ActionStep::pick_and_place(0, 0.0, Point::new(from.0, from.1), Point::new(to.0, to.1))
    }

    #[test]
    fn execute_plan_lengths_and_truncation() {
        let s = scene(vec![block(1, 0.2, 0.2, 0.03)]);
        let cfg = ExecConfig::default();
        let t = execute_plan(&s, &TopViewPlan::from_steps(vec![]), &cfg);
        assert_eq!(t.states, vec![s.clone()]);

        let two = TopViewPlan::from_steps(vec![pick((0.2, 0.2), (0.5, 0.5)), pick((0.5, 0.5), (0.2, 0.8))]);
        assert_eq!(execute_plan(&s, &two, &cfg).states.len(), 3);

        let ten = TopViewPlan::from_steps((0..10).map(|_| pick((0.2, 0.2), (0.2, 0.2))).collect());
        let t = execute_plan(&s, &ten, &cfg);
        assert_eq!(t.states.len(), 9);
        assert!(t.truncated());
        assert_eq!(
            t.events.last().unwrap(),
            &ExecutionEvent {
                step: 8,
                kind: EventKind::Truncated { dropped: 2 }
            }
        );
    }

    #[test]
    fn strict_ids_snap_from_to_named_object() {
        let s = scene(vec![block(3, 0.2, 0.2, 0.03)]);
        let plan = TopViewPlan::from_steps(vec![ActionStep::pick_and_place(
            3,
            0.0,
            Point::new(0.6, 0.6),
            Point::new(0.8, 0.8),
        )]);
        let loose = execute_plan(&s, &plan, &ExecConfig::default());
        assert_eq!(loose.last(), &s);
        let strict = execute_plan(
            &s,
            &plan,
            &ExecConfig {
                strict_ids: true,
                ..Default::default()
            },
        );
        assert_eq!(strict.last().get(3).unwrap().position, Point::new(0.8, 0.8));
    }

    #[test]
    fn scene_json_field_order() {
        let s = Scene {
            seed: 7,
            calibration: Affine2::IDENTITY,
            objects: vec![
                block(1, 0.25, 0.5, 0.05),
                SceneObject::line(2, Texture::Red, Point::new(0.1, 0.1), Point::new(0.9, 0.1)),
            ],
        };
        let json = s.to_json();
        assert!(json.starts_with(r#"{"seed":7,"calibration":[1.0,0.0,1.0,0.0],"objects":[{"id":1,"kind":"item","shape":"block","texture":"red","size":[0.05,0.05],"position":[0.25,0.5],"rotation_deg":0.0}"#));
        assert!(json.contains(r#""endpoints":[[0.1,0.1],[0.9,0.1]]"#));
        assert_eq!(Scene::from_json(&json).unwrap(), s);
    }

    #[test]
    fn validation_catches_crowded_items() {
        let s = scene(vec![block(1, 0.5, 0.5, 0.03), block(2, 0.55, 0.5, 0.03)]);
        assert!(s.validate_objects().is_ok());
        assert!(s.validate_initial().is_err());
        let dup = scene(vec![block(1, 0.2, 0.2, 0.03), block(1, 0.8, 0.8, 0.03)]);
        assert!(dup.validate_objects().is_err());
    }
}
