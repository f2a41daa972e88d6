//! The action output format and its parser.
//!
//! A planner answers with an `inference` string and an `action_plan` array:
//!
//! ```json
//! {"inference": "...",
//!  "action_plan": [{"action_type": "pick_and_place", "target_object": 3,
//!                   "rotation": 0, "from": [0.2, 0.2], "to": [0.8, 0.8]}]}
//! ```
//!
//! Coordinates are in the front view; [`map_plan`] converts them to the top
//! view before execution.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::mapping::{map_point, Affine2};
use crate::world::{ObjectId, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionType {
    PickAndPlace,
    Sweep,
}

impl ActionType {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionType::PickAndPlace => "pick_and_place",
            ActionType::Sweep => "sweep",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "pick_and_place" => Some(ActionType::PickAndPlace),
            "sweep" => Some(ActionType::Sweep),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionStep {
    pub action_type: ActionType,
    /// Informational; execution resolves objects by `from`.
    pub target_object: ObjectId,
    /// Rotation delta in degrees, ignored for sweeps.
    pub rotation: f64,
    pub from: Point,
    pub to: Point,
}

impl ActionStep {
    pub fn pick_and_place(target_object: ObjectId, rotation: f64, from: Point, to: Point) -> Self {
        Self {
            action_type: ActionType::PickAndPlace,
            target_object,
            rotation,
            from,
            to,
        }
    }

    pub fn sweep(target_object: ObjectId, from: Point, to: Point) -> Self {
        Self {
            action_type: ActionType::Sweep,
            target_object,
            rotation: 0.0,
            from,
            to,
        }
    }
}

/// A complete plan. All steps are produced up front; there is no
/// observation between steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionPlan {
    pub inference: String,
    #[serde(rename = "action_plan")]
    pub steps: Vec<ActionStep>,
}

impl ActionPlan {
    pub fn new(inference: impl Into<String>, steps: Vec<ActionStep>) -> Self {
        Self {
            inference: inference.into(),
            steps,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serialization is infallible")
    }

    /// Multi-line form with one step per line.
    pub fn to_json_pretty(&self) -> String {
        let inference = serde_json::to_string(&self.inference).expect("string serializes");
        if self.steps.is_empty() {
            return format!("{{\n  \"inference\": {inference},\n  \"action_plan\": []\n}}");
        }
        let steps: Vec<String> = self
            .steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("step serializes"))
            .collect();
        format!(
            "{{\n  \"inference\": {inference},\n  \"action_plan\": [\n    {}\n  ]\n}}",
            steps.join(",\n    ")
        )
    }
}

/// A plan whose coordinates are in the top view and inside the workspace.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TopViewPlan {
    steps: Vec<ActionStep>,
}

impl TopViewPlan {
    /// Wraps steps already expressed in top-view coordinates, clamping
    /// them into the workspace.
    pub fn from_steps(steps: Vec<ActionStep>) -> Self {
        let steps = steps
            .into_iter()
            .map(|s| ActionStep {
                from: s.from.clamp_unit(),
                to: s.to.clamp_unit(),
                ..s
            })
            .collect();
        Self { steps }
    }

    pub fn steps(&self) -> &[ActionStep] {
        &self.steps
    }
}

/// Result of converting a front-view plan; `clamped_steps` lists the steps
/// with at least one coordinate pulled back into the workspace.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedPlan {
    pub plan: TopViewPlan,
    pub clamped_steps: Vec<usize>,
}

pub fn map_plan(cal: &Affine2, plan: &ActionPlan) -> MappedPlan {
    let mut clamped_steps = Vec::new();
    let steps = plan
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let from = map_point(cal, s.from);
            let to = map_point(cal, s.to);
            if from.clamped || to.clamped {
                clamped_steps.push(i);
            }
            ActionStep {
                from: from.point,
                to: to.point,
                ..s.clone()
            }
        })
        .collect();
    MappedPlan {
        plan: TopViewPlan { steps },
        clamped_steps,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no-json-found")]
    NoJsonFound,
    #[error("schema(missing key {key}{})", step.map(|i| format!(" at step {i}")).unwrap_or_default())]
    MissingKey { key: &'static str, step: Option<usize> },
    #[error("schema({0})")]
    Schema(String),
    #[error("bad-action-type({0})")]
    BadActionType(String),
    #[error("bad-coordinate(step {step})")]
    BadCoordinate { step: usize },
}

/// How much surrounding text the parser tolerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseMode {
    /// Take the first JSON object anywhere in the text.
    #[default]
    Lenient,
    /// The whole response must be one JSON object, optionally fenced.
    Strict,
}

pub fn parse_action_output(text: &str) -> Result<ActionPlan, ParseError> {
    parse_action_output_with(text, ParseMode::Lenient)
}

pub fn parse_action_output_with(text: &str, mode: ParseMode) -> Result<ActionPlan, ParseError> {
    let value = match mode {
        ParseMode::Lenient => first_json_object(text),
        ParseMode::Strict => strict_json_object(text),
    }
    .ok_or(ParseError::NoJsonFound)?;
    plan_from_value(&value)
}

fn first_json_object(text: &str) -> Option<Map<String, Value>> {
    text.match_indices('{').find_map(|(i, _)| {
        let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Object(map))) => Some(map),
            _ => None,
        }
    })
}

fn strict_json_object(text: &str) -> Option<Map<String, Value>> {
    let mut body = text.trim();
    if let Some(rest) = body.strip_prefix("```") {
        // drop the info string, e.g. ```json
        let rest = rest.split_once('\n').map(|(_, r)| r)?;
        body = rest.trim_end().strip_suffix("```")?.trim();
    }
    match serde_json::from_str(body) {
        Ok(Value::Object(map)) => Some(map),
        _ => None,
    }
}

fn plan_from_value(root: &Map<String, Value>) -> Result<ActionPlan, ParseError> {
    let inference = match root.get("inference") {
        None => {
            return Err(ParseError::MissingKey {
                key: "inference",
                step: None,
            })
        }
        Some(Value::String(s)) => s.clone(),
        Some(other) => return Err(ParseError::Schema(format!("inference must be a string, got {other}"))),
    };
    let raw_steps = match root.get("action_plan") {
        None => {
            return Err(ParseError::MissingKey {
                key: "action_plan",
                step: None,
            })
        }
        Some(Value::Array(a)) => a,
        Some(_) => return Err(ParseError::Schema("action_plan must be an array".into())),
    };
    let steps = raw_steps
        .iter()
        .enumerate()
        .map(|(i, v)| step_from_value(i, v))
        .collect::<Result<_, _>>()?;
    Ok(ActionPlan { inference, steps })
}

fn step_from_value(i: usize, value: &Value) -> Result<ActionStep, ParseError> {
    let obj = value
        .as_object()
        .ok_or_else(|| ParseError::Schema(format!("step {i} is not an object")))?;
    let field = |key: &'static str| obj.get(key).ok_or(ParseError::MissingKey { key, step: Some(i) });

    let action_type = match field("action_type")? {
        Value::String(s) => ActionType::parse(s).ok_or_else(|| ParseError::BadActionType(s.clone()))?,
        other => return Err(ParseError::BadActionType(other.to_string())),
    };
    let target_object = object_id(field("target_object")?)
        .ok_or_else(|| ParseError::Schema(format!("target_object at step {i} is not an object id")))?;
    let rotation = match field("rotation")? {
        Value::Null => 0.0,
        v => v
            .as_f64()
            .ok_or_else(|| ParseError::Schema(format!("rotation at step {i} is not a number")))?,
    };
    let from = coordinate(field("from")?).ok_or(ParseError::BadCoordinate { step: i })?;
    let to = coordinate(field("to")?).ok_or(ParseError::BadCoordinate { step: i })?;
    Ok(ActionStep {
        action_type,
        target_object,
        rotation,
        from,
        to,
    })
}

fn object_id(v: &Value) -> Option<ObjectId> {
    match v {
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                return ObjectId::try_from(u).ok();
            }
            let f = n.as_f64()?;
            (f >= 0.0 && f.fract() == 0.0 && f <= ObjectId::MAX as f64).then_some(f as ObjectId)
        }
        // models sometimes echo the description header
        Value::String(s) => s.trim().trim_start_matches("object_").parse().ok(),
        _ => None,
    }
}

fn coordinate(v: &Value) -> Option<Point> {
    match v.as_array()?.as_slice() {
        [x, y] => {
            let p = Point::new(x.as_f64()?, y.as_f64()?);
            p.is_finite().then_some(p)
        }
        _ => None,
    }
}
