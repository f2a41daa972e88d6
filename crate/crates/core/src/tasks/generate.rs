//! Seeded episode generators, one per task.
//!
//! Objects are placed by rejection sampling: a candidate center is accepted
//! when its enclosing circle clears every other body by at least
//! [`MIN_ITEM_SEPARATION`] center-to-center (and never overlaps). After
//! [`MAX_ATTEMPTS`] rejected draws the generator scans a fixed 0.01 grid
//! over the allowed region and takes the first valid cell.
//!
//! Objects shown in the prompt are prototypes: copies of the scene object
//! with a prompt-local id (from [`PROMPT_ID_BASE`]) centered in the
//! workspace, the way a cropped single-object image carries no location.

use std::collections::BTreeSet;

use super::goal::{Clause, Forbidden, Goal};
use super::rng::EpisodeRng;
use super::{EpisodeSetup, MultimodalPrompt, PromptSegment, TaskSpec};
use crate::planner::Affine2;
use crate::world::{
    point_segment_distance, ObjectId, ObjectKind, Point, Scene, SceneObject, Shape, Texture, MIN_ITEM_SEPARATION,
};

/// First id used for prompt-only objects.
pub const PROMPT_ID_BASE: ObjectId = 100;
const MAX_ATTEMPTS: usize = 100;
const GRID_STEP: f64 = 0.01;
/// Distractors keep this far from any planned sweep path.
const CORRIDOR_CLEARANCE: f64 = 0.1;

const NOVEL_ADJECTIVES: [&str; 4] = ["daxer", "blicker", "modier", "kobar"];
const NOVEL_NOUNS: [&str; 6] = ["dax", "blicket", "wug", "zup", "fep", "toma"];

pub(super) mod layout {
    //! Fixed geometry shared by the sweep generators and the oracle.
    pub const T12_ZONE_Y: f64 = 0.24;
    pub const T12_ZONE_HALF: (f64, f64) = (0.16, 0.07);
    pub const T12_LINE_Y: f64 = 0.12;
    pub const T12_COLUMN_OFFSET: f64 = 0.08;

    pub const T13_ZONE_Y: f64 = 0.22;
    pub const T13_ZONE_HALF: (f64, f64) = (0.2, 0.08);
    pub const T13_BARRIER_Y: f64 = 0.45;
    pub const T13_BARRIER_HALF: f64 = 0.08;
    /// Horizontal offset of the detour columns from the zone center.
    pub const T13_COLUMN_OFFSET: f64 = 0.14;
}

#[derive(Debug, Clone, Copy)]
struct Region {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Region {
    const WORKSPACE: Region = Region {
        x0: 0.08,
        x1: 0.92,
        y0: 0.08,
        y1: 0.92,
    };

    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// Shrinks the region so a body of radius `r` stays inside the square.
    fn inset(self, r: f64) -> Self {
        Self {
            x0: self.x0.max(r),
            x1: self.x1.min(1.0 - r),
            y0: self.y0.max(r),
            y1: self.y1.min(1.0 - r),
        }
    }
}

fn text(s: impl Into<String>) -> PromptSegment {
    PromptSegment::Text(s.into())
}

struct Builder {
    rng: EpisodeRng,
    scene: Scene,
    id_pool: Vec<ObjectId>,
    item_looks: BTreeSet<(Shape, Texture)>,
    next_prompt_id: ObjectId,
    /// Bodies that are not in the scene but must be kept clear (goal poses,
    /// waypoints), as center and radius.
    reserved: Vec<(Point, f64)>,
}

impl Builder {
    fn new(task_num: u32, seed: u64, calibration: Affine2) -> Self {
        let mut rng = EpisodeRng::for_episode(task_num, seed);
        let mut id_pool: Vec<ObjectId> = (1..=16).collect();
        rng.shuffle(&mut id_pool);
        Self {
            rng,
            scene: Scene::new(seed, calibration),
            id_pool,
            item_looks: BTreeSet::new(),
            next_prompt_id: PROMPT_ID_BASE,
            reserved: Vec::new(),
        }
    }

    fn take_id(&mut self) -> ObjectId {
        self.id_pool.pop().expect("id pool exhausted")
    }

    fn obj(&self, id: ObjectId) -> &SceneObject {
        self.scene.get(id).expect("builder object exists")
    }

    fn pos(&self, id: ObjectId) -> Point {
        self.obj(id).position
    }

    fn clearance_ok(&self, p: Point, r: f64) -> bool {
        let bodies = self
            .scene
            .objects
            .iter()
            .filter(|o| o.kind != ObjectKind::Line)
            .map(|o| (o.position, o.circumradius()))
            .chain(self.reserved.iter().copied());
        for (c, rc) in bodies {
            if p.distance(c) < MIN_ITEM_SEPARATION.max(r + rc) {
                return false;
            }
        }
        true
    }

    fn sample_point(&mut self, r: f64, region: Region, extra: &dyn Fn(Point) -> bool) -> Point {
        let region = region.inset(r);
        let ok = |b: &Builder, p: Point| b.clearance_ok(p, r) && extra(p);
        for _ in 0..MAX_ATTEMPTS {
            let p = Point::new(
                self.rng.uniform(region.x0, region.x1),
                self.rng.uniform(region.y0, region.y1),
            );
            if ok(self, p) {
                return p;
            }
        }
        let nx = ((region.x1 - region.x0) / GRID_STEP).floor().max(0.0) as usize;
        let ny = ((region.y1 - region.y0) / GRID_STEP).floor().max(0.0) as usize;
        let grid = (0..=ny).flat_map(|j| {
            (0..=nx).map(move |i| Point::new(region.x0 + i as f64 * GRID_STEP, region.y0 + j as f64 * GRID_STEP))
        });
        let mut best: Option<(f64, Point)> = None;
        for p in grid {
            if ok(self, p) {
                return p;
            }
            if extra(p) {
                let slack = self.min_slack(p, r);
                if best.is_none_or(|(s, _)| slack > s) {
                    best = Some((slack, p));
                }
            }
        }
        let p = best.map(|(_, p)| p).unwrap_or(Point::new(region.x0, region.y0));
        log::warn!("placement fell back to best-effort point ({:.3}, {:.3})", p.x, p.y);
        p
    }

    fn min_slack(&self, p: Point, r: f64) -> f64 {
        self.scene
            .objects
            .iter()
            .filter(|o| o.kind != ObjectKind::Line)
            .map(|o| (o.position, o.circumradius()))
            .chain(self.reserved.iter().copied())
            .map(|(c, rc)| p.distance(c) - MIN_ITEM_SEPARATION.max(r + rc))
            .fold(f64::INFINITY, f64::min)
    }

    fn item_size(&mut self) -> (f64, f64) {
        (self.rng.uniform(0.03, 0.045), self.rng.uniform(0.03, 0.045))
    }

    fn container_size(&mut self) -> (f64, f64) {
        (self.rng.uniform(0.07, 0.09), self.rng.uniform(0.07, 0.09))
    }

    /// A (shape, texture) pair not yet used by any item.
    fn fresh_look(&mut self, shapes: &[Shape], textures: &[Texture]) -> (Shape, Texture) {
        for _ in 0..MAX_ATTEMPTS {
            let look = (self.rng.pick(shapes), self.rng.pick(textures));
            if !self.item_looks.contains(&look) {
                return look;
            }
        }
        shapes
            .iter()
            .flat_map(|&s| textures.iter().map(move |&t| (s, t)))
            .find(|l| !self.item_looks.contains(l))
            .expect("look vocabulary exhausted")
    }

    fn add_item(
        &mut self,
        look: (Shape, Texture),
        size: (f64, f64),
        region: Region,
        extra: &dyn Fn(Point) -> bool,
    ) -> ObjectId {
        let r = size.0.hypot(size.1);
        let p = self.sample_point(r, region, extra);
        let rotation = self.rng.uniform(0.0, 360.0);
        self.add_item_at(look, size, p, rotation)
    }

    fn add_item_at(&mut self, look: (Shape, Texture), size: (f64, f64), p: Point, rotation: f64) -> ObjectId {
        let id = self.take_id();
        self.item_looks.insert(look);
        self.scene
            .objects
            .push(SceneObject::item(id, look.0, look.1, size, p).with_rotation(rotation));
        id
    }

    fn random_item(
        &mut self,
        shapes: &[Shape],
        textures: &[Texture],
        region: Region,
        extra: &dyn Fn(Point) -> bool,
    ) -> ObjectId {
        let look = self.fresh_look(shapes, textures);
        let size = self.item_size();
        self.add_item(look, size, region, extra)
    }

    fn distractors(
        &mut self,
        count: usize,
        shapes: &[Shape],
        textures: &[Texture],
        extra: &dyn Fn(Point) -> bool,
    ) -> Vec<ObjectId> {
        (0..count)
            .map(|_| self.random_item(shapes, textures, Region::WORKSPACE, extra))
            .collect()
    }

    fn add_container(&mut self, shape: Shape, texture: Texture) -> ObjectId {
        let size = self.container_size();
        let p = self.sample_point(size.0.hypot(size.1), Region::WORKSPACE, &|_| true);
        let id = self.take_id();
        self.scene
            .objects
            .push(SceneObject::container(id, shape, texture, size, p));
        id
    }

    fn container_textures(&self) -> BTreeSet<Texture> {
        self.scene
            .objects
            .iter()
            .filter(|o| o.kind == ObjectKind::Container)
            .map(|o| o.texture)
            .collect()
    }

    /// A container whose texture differs from every other container.
    fn random_container(&mut self) -> ObjectId {
        let used = self.container_textures();
        let textures: Vec<Texture> = Texture::ALL.iter().copied().filter(|t| !used.contains(t)).collect();
        let shape = self.rng.pick(Shape::CONTAINERS);
        let texture = self.rng.pick(&textures);
        self.add_container(shape, texture)
    }

    fn item_count(&mut self) -> usize {
        self.rng.int(3, 6) as usize
    }

    fn proto_of(&mut self, obj: &SceneObject) -> SceneObject {
        let mut p = obj.clone();
        p.id = self.next_prompt_id;
        self.next_prompt_id += 1;
        if p.kind != ObjectKind::Line {
            p.position = Point::new(0.5, 0.5);
            p.rotation_deg = 0.0;
        }
        p
    }

    fn proto(&mut self, id: ObjectId) -> PromptSegment {
        let obj = self.obj(id).clone();
        PromptSegment::Object(self.proto_of(&obj))
    }

    fn snapshot(&self) -> Scene {
        self.scene.clone()
    }

    fn snapshot_with(&self, moves: &[(ObjectId, Point)]) -> Scene {
        let mut s = self.scene.clone();
        for o in &mut s.objects {
            if let Some((_, p)) = moves.iter().find(|(id, _)| *id == o.id) {
                o.position = *p;
            }
        }
        s
    }

    /// A free pose for `id` that stays clear of everything, reserved so
    /// later samples avoid it too.
    fn reserve_pose(&mut self, id: ObjectId) -> Point {
        let r = self.obj(id).circumradius();
        let p = self.sample_point(r, Region::WORKSPACE, &|_| true);
        self.reserved.push((p, r));
        p
    }
}

pub fn generate_episode(task: &TaskSpec, seed: u64) -> EpisodeSetup {
    generate_episode_with(task, seed, Affine2::IDENTITY)
}

/// Generates the episode for `(task, seed)` with a specific front/top view
/// calibration. Identical inputs give bit-identical episodes.
///
/// Panics when `task` is not in the catalog.
pub fn generate_episode_with(task: &TaskSpec, seed: u64, calibration: Affine2) -> EpisodeSetup {
    let mut b = Builder::new(task.task_num, seed, calibration);
    let (segments, goal) = match task.task_num {
        1 => visual_manipulation(&mut b),
        2 => scene_understanding(&mut b),
        3 => rotate(&mut b),
        4 => rearrange(&mut b, false),
        5 => rearrange(&mut b, true),
        6 => novel_adj(&mut b),
        7 => novel_noun(&mut b),
        10 => follow_motion(&mut b),
        11 => follow_order(&mut b),
        12 => sweep_without_exceeding(&mut b),
        13 => sweep_without_touching(&mut b),
        14 => same_texture(&mut b),
        15 => same_shape(&mut b),
        16 => manipulate_old_neighbor(&mut b),
        17 => pick_in_order_then_restore(&mut b),
        other => panic!("task {other} is not in the catalog"),
    };
    EpisodeSetup {
        task: task.clone(),
        seed,
        scene: b.scene,
        prompt: MultimodalPrompt::new(segments),
        goal,
    }
}

fn item_shapes() -> Vec<Shape> {
    Shape::item_shapes().collect()
}

fn in_zone_goal(objects: &[ObjectId], zone: ObjectId) -> Goal {
    Goal {
        final_state: objects.iter().map(|&object| Clause::InZone { object, zone }).collect(),
        ..Default::default()
    }
}

fn visual_manipulation(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let container = b.random_container();
    if b.rng.chance(0.5) {
        b.random_container();
    }
    let shapes = item_shapes();
    let target = b.random_item(&shapes, Texture::ALL, Region::WORKSPACE, &|_| true);
    b.distractors(n - 1, &shapes, Texture::ALL, &|_| true);
    let segments = vec![
        text("Put the"),
        b.proto(target),
        text("into the"),
        b.proto(container),
        text("."),
    ];
    (segments, in_zone_goal(&[target], container))
}

fn scene_understanding(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let container = b.random_container();
    if b.rng.chance(0.5) {
        b.random_container();
    }
    let shapes = item_shapes();
    // every texture on the table is unique, so a texture names one object
    let mut free: Vec<Texture> = Texture::ALL
        .iter()
        .copied()
        .filter(|t| !b.container_textures().contains(t))
        .collect();
    b.rng.shuffle(&mut free);
    let mut items = Vec::new();
    for &texture in free.iter().take(n) {
        let shape = b.rng.pick(&shapes);
        let size = b.item_size();
        items.push(b.add_item((shape, texture), size, Region::WORKSPACE, &|_| true));
    }
    let target = items[0];
    let segments = vec![
        text(format!("Put the {} object in", b.obj(target).texture)),
        PromptSegment::Scene(b.snapshot()),
        text(format!("into the {} object.", b.obj(container).texture)),
    ];
    (segments, in_zone_goal(&[target], container))
}

fn rotate(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let shapes = item_shapes();
    let target = b.random_item(&shapes, Texture::ALL, Region::WORKSPACE, &|_| true);
    b.distractors(n - 1, &shapes, Texture::ALL, &|_| true);
    let angle = 30.0 * b.rng.int(1, 5) as f64;
    let goal_deg = crate::world::normalize_deg(b.obj(target).rotation_deg + angle);
    let segments = vec![text("Rotate the"), b.proto(target), text(format!("{angle} degrees."))];
    let goal = Goal {
        final_state: vec![Clause::rotation_equals(target, goal_deg)],
        ..Default::default()
    };
    (segments, goal)
}

fn rearrange(b: &mut Builder, restore: bool) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let shapes = item_shapes();
    let items = b.distractors(n, &shapes, Texture::ALL, &|_| true);
    let k = b.rng.int(1, 2) as usize;
    let mut order = items.clone();
    b.rng.shuffle(&mut order);
    let moves: Vec<(ObjectId, Point)> = order[..k].iter().map(|&id| (id, b.reserve_pose(id))).collect();
    let goal_scene = b.snapshot_with(&moves);
    let target_poses: Vec<Clause> = items
        .iter()
        .map(|&id| Clause::near_pose(id, goal_scene.get(id).expect("snapshot has item").position))
        .collect();
    let initial_poses: Vec<Clause> = items.iter().map(|&id| Clause::near_pose(id, b.pos(id))).collect();
    if restore {
        let segments = vec![
            text("Rearrange objects to this setup"),
            PromptSegment::Scene(goal_scene),
            text("and then restore."),
        ];
        let goal = Goal {
            checkpoints: vec![target_poses],
            final_state: initial_poses,
            ..Default::default()
        };
        (segments, goal)
    } else {
        let segments = vec![text("Rearrange to this"), PromptSegment::Scene(goal_scene)];
        let goal = Goal {
            final_state: target_poses,
            ..Default::default()
        };
        (segments, goal)
    }
}

fn novel_adj(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let adjective = b.rng.pick(&NOVEL_ADJECTIVES);
    let means_bigger = b.rng.chance(0.5);
    let shapes = item_shapes();

    let mut segments = Vec::new();
    for _ in 0..2 {
        let big = b.rng.uniform(0.06, 0.075);
        let small = big - b.rng.uniform(0.03, 0.04);
        let demo_big = SceneObject::item(
            0,
            b.rng.pick(&shapes),
            b.rng.pick(Texture::ALL),
            (big, big),
            Point::new(0.5, 0.5),
        );
        let demo_small = SceneObject::item(
            0,
            b.rng.pick(&shapes),
            b.rng.pick(Texture::ALL),
            (small, small),
            Point::new(0.5, 0.5),
        );
        let (first, second) = if means_bigger {
            (demo_big, demo_small)
        } else {
            (demo_small, demo_big)
        };
        segments.push(PromptSegment::Object(b.proto_of(&first)));
        segments.push(text(format!("is {adjective} than")));
        segments.push(PromptSegment::Object(b.proto_of(&second)));
        segments.push(text("."));
    }

    let n = b.item_count();
    let container = b.random_container();
    let look = b.fresh_look(&shapes, Texture::ALL);
    let small = b.rng.uniform(0.028, 0.034);
    let large = small + b.rng.uniform(0.02, 0.03);
    let small_id = b.add_item(look, (small, small), Region::WORKSPACE, &|_| true);
    let large_id = b.add_item(look, (large, large), Region::WORKSPACE, &|_| true);
    b.distractors(n.saturating_sub(2).max(1), &shapes, Texture::ALL, &|_| true);
    let target = if means_bigger { large_id } else { small_id };

    let mid = (small + large) / 2.0;
    let query = SceneObject::item(0, look.0, look.1, (mid, mid), Point::new(0.5, 0.5));
    segments.push(text(format!("Put the {adjective}")));
    segments.push(PromptSegment::Object(b.proto_of(&query)));
    segments.push(text("into the"));
    segments.push(b.proto(container));
    segments.push(text("."));
    (segments, in_zone_goal(&[target], container))
}

fn novel_noun(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let mut nouns = NOVEL_NOUNS.to_vec();
    b.rng.shuffle(&mut nouns);
    let (item_noun, container_noun) = (nouns[0], nouns[1]);
    let n = b.item_count();
    let container = b.random_container();
    b.random_container();
    let shapes = item_shapes();
    let target = b.random_item(&shapes, Texture::ALL, Region::WORKSPACE, &|_| true);
    b.distractors(n - 1, &shapes, Texture::ALL, &|_| true);
    let segments = vec![
        text(format!("This is a {item_noun}")),
        b.proto(target),
        text(format!("This is a {container_noun}")),
        b.proto(container),
        text(format!("Put a {item_noun} into a {container_noun}.")),
    ];
    (segments, in_zone_goal(&[target], container))
}

fn follow_motion(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let shapes = item_shapes();
    let target = b.random_item(&shapes, Texture::ALL, Region::WORKSPACE, &|_| true);
    b.distractors(n - 1, &shapes, Texture::ALL, &|_| true);
    let waypoints: Vec<Point> = (0..3).map(|_| b.reserve_pose(target)).collect();
    let mut segments = vec![text("Follow this motion for"), b.proto(target), text(":")];
    for &p in &waypoints {
        segments.push(PromptSegment::Scene(b.snapshot_with(&[(target, p)])));
    }
    let goal = Goal {
        checkpoints: waypoints.iter().map(|&p| vec![Clause::near_pose(target, p)]).collect(),
        final_state: vec![Clause::near_pose(target, waypoints[2])],
        ..Default::default()
    };
    (segments, goal)
}

fn follow_order(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let shapes = item_shapes();
    let stack_height = b.rng.int(2, 3) as usize;
    let stack = b.distractors(stack_height + 1, &shapes, Texture::ALL, &|_| true);
    b.distractors(n.saturating_sub(stack.len()), &shapes, Texture::ALL, &|_| true);
    let base = b.pos(stack[0]);
    let mut segments = vec![text("Stack objects in this order:")];
    let mut clauses = Vec::new();
    for j in 1..stack.len() {
        let moves: Vec<(ObjectId, Point)> = stack[1..=j].iter().map(|&id| (id, base)).collect();
        segments.push(PromptSegment::Scene(b.snapshot_with(&moves)));
        clauses.push(Clause::StackedOn {
            object: stack[j],
            base: stack[j - 1],
        });
    }
    let goal = Goal {
        final_state: clauses,
        ..Default::default()
    };
    (segments, goal)
}

fn sweep_target_count(b: &mut Builder) -> usize {
    b.rng.int(1, 2) as usize
}

fn sweep_without_exceeding(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    use layout::*;
    let n = b.item_count();
    let zx = b.rng.uniform(0.35, 0.65);
    let zone_texture = b.rng.pick(Texture::ALL);
    let zone = b.take_id();
    b.scene.objects.push(SceneObject::zone(
        zone,
        zone_texture,
        T12_ZONE_HALF,
        Point::new(zx, T12_ZONE_Y),
    ));
    let line = b.take_id();
    let line_texture = b.rng.pick(Texture::ALL);
    b.scene.objects.push(SceneObject::line(
        line,
        line_texture,
        Point::new(zx - 0.2, T12_LINE_Y),
        Point::new(zx + 0.2, T12_LINE_Y),
    ));

    let k = sweep_target_count(b);
    let columns: Vec<f64> = if k == 1 {
        vec![zx + b.rng.uniform(-0.06, 0.06)]
    } else {
        vec![zx - T12_COLUMN_OFFSET, zx + T12_COLUMN_OFFSET]
    };
    let shapes = item_shapes();
    let look = b.fresh_look(&shapes, Texture::ALL);
    let size = b.item_size();
    let targets: Vec<ObjectId> = columns
        .iter()
        .map(|&cx| b.add_item(look, size, Region::new(cx, cx, 0.5, 0.85), &|_| true))
        .collect();
    let corridors: Vec<(Point, Point)> = targets
        .iter()
        .map(|&t| {
            let p = b.pos(t);
            (p, Point::new(p.x, T12_ZONE_Y))
        })
        .collect();
    let clear = |p: Point| {
        corridors
            .iter()
            .all(|&(a, c)| point_segment_distance(p, a, c) > CORRIDOR_CLEARANCE)
    };
    let distractor_shapes: Vec<Shape> = shapes.iter().copied().filter(|&s| s != look.0).collect();
    b.distractors(n.saturating_sub(k).max(1), &distractor_shapes, Texture::ALL, &clear);

    let segments = vec![
        text(format!("Sweep {k}")),
        b.proto(targets[0]),
        text("into"),
        b.proto(zone),
        text("without exceeding"),
        b.proto(line),
        text("."),
    ];
    let mut goal = in_zone_goal(&targets, zone);
    goal.forbidden = vec![Forbidden::NoCrossing { line }];
    (segments, goal)
}

fn sweep_without_touching(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    use layout::*;
    let n = b.item_count();
    let zx = b.rng.uniform(0.35, 0.65);
    let zone_texture = b.rng.pick(Texture::ALL);
    let zone = b.take_id();
    b.scene.objects.push(SceneObject::zone(
        zone,
        zone_texture,
        T13_ZONE_HALF,
        Point::new(zx, T13_ZONE_Y),
    ));
    let line = b.take_id();
    let line_texture = b.rng.pick(Texture::ALL);
    b.scene.objects.push(SceneObject::line(
        line,
        line_texture,
        Point::new(zx - T13_BARRIER_HALF, T13_BARRIER_Y),
        Point::new(zx + T13_BARRIER_HALF, T13_BARRIER_Y),
    ));

    let k = sweep_target_count(b);
    // -1: detour left of the barrier, +1: detour right
    let sides: Vec<f64> = if k == 2 {
        vec![-1.0, 1.0]
    } else if b.rng.chance(0.5) {
        vec![-1.0]
    } else {
        vec![1.0]
    };
    let shapes = item_shapes();
    let look = b.fresh_look(&shapes, Texture::ALL);
    let size = b.item_size();
    let reach = T13_BARRIER_HALF - 0.01;
    let targets: Vec<ObjectId> = sides
        .iter()
        .map(|&side| {
            let (x0, x1) = if side < 0.0 {
                (zx - reach, zx - 0.005)
            } else {
                (zx + 0.005, zx + reach)
            };
            b.add_item(look, size, Region::new(x0, x1, 0.6, 0.85), &|_| true)
        })
        .collect();
    let mut corridors = Vec::new();
    for (&t, &side) in targets.iter().zip(&sides) {
        let p = b.pos(t);
        let column = zx + side * T13_COLUMN_OFFSET;
        corridors.push((p, Point::new(column, p.y)));
        corridors.push((Point::new(column, p.y), Point::new(column, T13_ZONE_Y)));
    }
    let clear = |p: Point| {
        corridors
            .iter()
            .all(|&(a, c)| point_segment_distance(p, a, c) > CORRIDOR_CLEARANCE)
    };
    let distractor_shapes: Vec<Shape> = shapes.iter().copied().filter(|&s| s != look.0).collect();
    b.distractors(n.saturating_sub(k).max(1), &distractor_shapes, Texture::ALL, &clear);

    let segments = vec![
        text(format!("Sweep {k}")),
        b.proto(targets[0]),
        text("into"),
        b.proto(zone),
        text("without touching"),
        b.proto(line),
        text("."),
    ];
    let mut goal = in_zone_goal(&targets, zone);
    goal.forbidden = vec![Forbidden::NoCrossing { line }];
    (segments, goal)
}

fn same_texture(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let anchor = b.random_container();
    if b.rng.chance(0.5) {
        b.random_container();
    }
    let texture = b.obj(anchor).texture;
    let shapes = item_shapes();
    let matches = b.rng.int(2, 3) as usize;
    let matching: Vec<ObjectId> = (0..matches)
        .map(|_| b.random_item(&shapes, &[texture], Region::WORKSPACE, &|_| true))
        .collect();
    let others: Vec<Texture> = Texture::ALL.iter().copied().filter(|&t| t != texture).collect();
    b.distractors(n.saturating_sub(matches).max(1), &shapes, &others, &|_| true);
    let segments = vec![
        text("Put all objects with the same texture as"),
        b.proto(anchor),
        text("into it."),
    ];
    (segments, in_zone_goal(&matching, anchor))
}

fn same_shape(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let anchor = b.random_container();
    let shape = b.obj(anchor).shape;
    let other_shapes: Vec<Shape> = Shape::CONTAINERS.iter().copied().filter(|&s| s != shape).collect();
    if b.rng.chance(0.5) {
        let used = b.container_textures();
        let textures: Vec<Texture> = Texture::ALL.iter().copied().filter(|t| !used.contains(t)).collect();
        let s = b.rng.pick(&other_shapes);
        let t = b.rng.pick(&textures);
        b.add_container(s, t);
    }
    let matches = b.rng.int(2, 3) as usize;
    let anchor_texture = b.obj(anchor).texture;
    let textures: Vec<Texture> = Texture::ALL.iter().copied().filter(|&t| t != anchor_texture).collect();
    let matching: Vec<ObjectId> = (0..matches)
        .map(|_| b.random_item(&[shape], &textures, Region::WORKSPACE, &|_| true))
        .collect();
    b.distractors(n.saturating_sub(matches).max(1), &item_shapes(), Texture::ALL, &|_| {
        true
    });
    let segments = vec![
        text("Put all objects with the same profile as"),
        b.proto(anchor),
        text("into it."),
    ];
    (segments, in_zone_goal(&matching, anchor))
}

fn manipulate_old_neighbor(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let container = b.random_container();
    let shapes = item_shapes();
    let target = b.random_item(&shapes, Texture::ALL, Region::WORKSPACE, &|_| true);
    let anchor = b.pos(target);
    let neighbor = b.random_item(&shapes, Texture::ALL, Region::WORKSPACE, &|p| {
        (0.13..=0.2).contains(&p.distance(anchor))
    });
    let near = b.pos(neighbor).distance(anchor);
    // everyone else is clearly farther away than the neighbor
    b.distractors(n - 2, &shapes, Texture::ALL, &|p| p.distance(anchor) >= near + 0.05);
    let segments = vec![
        text("First put"),
        b.proto(target),
        text("into"),
        b.proto(container),
        text("then put the object that was previously closest to it into the same"),
        b.proto(container),
        text("."),
    ];
    let goal = Goal {
        checkpoints: vec![vec![Clause::InZone {
            object: target,
            zone: container,
        }]],
        final_state: vec![
            Clause::InZone {
                object: target,
                zone: container,
            },
            Clause::InZone {
                object: neighbor,
                zone: container,
            },
        ],
        ..Default::default()
    };
    (segments, goal)
}

fn pick_in_order_then_restore(b: &mut Builder) -> (Vec<PromptSegment>, Goal) {
    let n = b.item_count();
    let original = b.random_container();
    let first = b.random_container();
    let second = b.random_container();
    let shapes = item_shapes();
    let look = b.fresh_look(&shapes, Texture::ALL);
    let size = b.item_size();
    let rotation = b.rng.uniform(0.0, 360.0);
    let start = b.pos(original);
    let target = b.add_item_at(look, size, start, rotation);
    b.distractors(n - 1, &shapes, Texture::ALL, &|_| true);
    let segments = vec![
        text("Put"),
        b.proto(target),
        text("into"),
        b.proto(first),
        text("Then put it into"),
        b.proto(second),
        text("Finally restore it into its original container."),
    ];
    let goal = Goal {
        checkpoints: vec![
            vec![Clause::InZone {
                object: target,
                zone: first,
            }],
            vec![Clause::InZone {
                object: target,
                zone: second,
            }],
        ],
        final_state: vec![Clause::InZone {
            object: target,
            zone: original,
        }],
        ..Default::default()
    };
    (segments, goal)
}
