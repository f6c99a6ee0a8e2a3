//! Scripted reference agents: a golden policy that solves every built-in
//! task, and fault-injected variants that fail in one known way each.
//!
//! Faults change what the policy does, never what gets logged, so a fault
//! is only visible to attribution through the environment's own logs.

use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::{find_item, ActionCommand, CartState, Control, ElementManifest};
use crate::runner::{Agent, AgentError, AgentIdentity, AgentSession, Clock, Observation, DEFAULT_STEP_MS};
use crate::tasks::{order_address, TaskRef, ADD_TO_CART_ITEM, ORDER_ITEM};

pub const GOLDEN: &str = "golden";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgentNameError {
    #[error("unknown builtin agent {0:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultSpec {
    /// Clicks the card around a link instead of the link.
    NoLinkClick,
    /// Fills only the first field of a form, then submits.
    FormAbandon,
    /// Filters on the default column instead of choosing one.
    WrongFilterColumn,
    NoDrag,
    NoHover,
    /// Stops after issuing this many commands.
    EarlyStop(u32),
}

impl FaultSpec {
    pub fn name(self) -> String {
        match self {
            FaultSpec::NoLinkClick => "nolink".into(),
            FaultSpec::FormAbandon => "formabandon".into(),
            FaultSpec::WrongFilterColumn => "wrongfilter".into(),
            FaultSpec::NoDrag => "nodrag".into(),
            FaultSpec::NoHover => "nohover".into(),
            FaultSpec::EarlyStop(k) => format!("earlystop:{k}"),
        }
    }
}

/// One plan step. Elements are found by label and control kind in the
/// manifest; ids are never hard-coded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Click(String),
    Type {
        label: String,
        text: String,
    },
    Select {
        label: String,
        option: String,
    },
    /// A select whose only purpose is picking the filter column.
    ChooseFilterColumn {
        label: String,
        option: String,
    },
    Drag {
        label: String,
        value: i64,
    },
    Hover(String),
    /// Extracts group 1 of the regex from the page into `{answer}`.
    Read(String),
    Form {
        fields: Vec<Step>,
        submit: String,
    },
}

fn click(label: &str) -> Step {
    Step::Click(label.into())
}

fn type_in(label: &str, text: &str) -> Step {
    Step::Type {
        label: label.into(),
        text: text.into(),
    }
}

fn select(label: &str, option: &str) -> Step {
    Step::Select {
        label: label.into(),
        option: option.into(),
    }
}

fn drag(label: &str, value: i64) -> Step {
    Step::Drag {
        label: label.into(),
        value,
    }
}

fn answer(read: &str, reveal: Option<Step>) -> Vec<Step> {
    reveal
        .into_iter()
        .chain([Step::Read(read.into()), type_in("Answer", "{answer}"), click("Submit")])
        .collect()
}

fn search_and_open(item_id: &str) -> Vec<Step> {
    let name = &find_item(item_id).expect("catalog item").name;
    vec![type_in("Search", name), click("Search"), click(name)]
}

/// The golden plan for a built-in task, or `None` for unknown ids.
pub fn golden_plan(task_id: &str) -> Option<Vec<Step>> {
    let plan = match task_id {
        "ind/click/accordion" => vec![click("Shipping details")],
        "ind/click/button" => vec![click("Submit")],
        "ind/click/dialogbutton" => vec![click("Delete file"), click("Confirm")],
        "ind/click/dropdownmenu" => vec![click("Options"), click("Duplicate")],
        "ind/click/iconbutton" => vec![click("Settings")],
        "ind/click/link" => vec![click("About us")],
        "ind/click/slider-louder" => vec![drag("Volume", 80)],
        "ind/click/slider-max" => vec![drag("Volume", 100)],
        "ind/click/slider-mute" => vec![drag("Volume", 0)],
        "ind/click/slider-brightness" => vec![drag("Brightness", 30)],
        "ind/click/snackbar" => vec![click("Save draft"), click("Undo")],
        "ind/click/switch-on" => vec![click("Do not disturb")],
        "ind/click/switch-off" => vec![],
        "ind/type/date" => vec![type_in("Birth date", "1990-05-17")],
        "ind/type/phone" => vec![type_in("Phone number", "617-555-0123")],
        "ind/type/text" => vec![type_in("Name", "John Doe")],
        "ind/select/checkbox" => vec![click("I agree to the terms")],
        "ind/select/datagridrow" => vec![click("Order #1042")],
        "ind/select/multicheck" => vec![click("Email"), click("SMS")],
        "ind/select/select" => vec![select("Country", "Canada")],
        "ind/navigatemenu/basicmenu" => vec![click("Menu"), click("Settings")],
        "ind/navigatemenu/nestedmenu" => vec![click("Menu"), click("Account"), click("Privacy")],
        "ind/find/accordion" => answer(r"returned within (\d+ days)", Some(click("Returns"))),
        "ind/find/dialogbutton" => answer(r"Warranty period: (\d+ years)", Some(click("View warranty"))),
        "ind/find/paragraphs" => answer(r"founded in (\d{4})", None),
        "ind/find/tooltip" => answer(r"Includes (\d+ GB)", Some(Step::Hover("Storage info".into()))),
        "ind/filter/filterdatagrid" => vec![
            Step::ChooseFilterColumn {
                label: "Column".into(),
                option: "Country".into(),
            },
            type_in("Value", "USA"),
        ],
        "ind/filter/sortdatagrid" => vec![click("Sort by Total"), click("Sort by Total")],
        "ind/fill/basicform" => vec![Step::Form {
            fields: vec![type_in("Name", "Jane Smith"), type_in("Email", "jane@example.com")],
            submit: "Submit".into(),
        }],
        "ind/fill/complexform" => vec![Step::Form {
            fields: vec![
                type_in("Name", "Alex Kim"),
                type_in("Phone", "617-555-0199"),
                type_in("Birth date", "1985-03-02"),
                select("Country", "Canada"),
                click("Subscribe to newsletter"),
            ],
            submit: "Submit".into(),
        }],
        "e2e/order" => {
            let address = order_address();
            let fields = crate::environment::ShippingAddress::FIELDS
                .iter()
                .zip(address.fields())
                .map(|(label, value)| type_in(label, value))
                .collect();
            let mut plan = search_and_open(ORDER_ITEM);
            plan.push(click("Add to cart"));
            plan.push(Step::Form {
                fields,
                submit: "Place order".into(),
            });
            plan
        }
        "e2e/add-to-cart" => {
            let item = find_item(ADD_TO_CART_ITEM).expect("catalog item");
            let top = CartState::highest_tier(item);
            let mut plan = search_and_open(ADD_TO_CART_ITEM);
            plan.extend(item.customization_groups.iter().map(|g| click(&top.options[&g.name])));
            plan.push(click("Add to cart"));
            plan
        }
        _ => return None,
    };
    Some(plan)
}

/// Flattens forms and applies the plan-level faults.
fn expand(plan: Vec<Step>, fault: Option<FaultSpec>) -> Vec<Step> {
    let mut out = Vec::new();
    for step in plan {
        match (step, fault) {
            (Step::Form { mut fields, submit }, f) => {
                if f == Some(FaultSpec::FormAbandon) {
                    fields.truncate(1);
                }
                out.extend(fields);
                out.push(Step::Click(submit));
            }
            (Step::ChooseFilterColumn { .. }, Some(FaultSpec::WrongFilterColumn)) => {}
            (Step::Drag { .. }, Some(FaultSpec::NoDrag)) => {}
            (Step::Hover(_), Some(FaultSpec::NoHover)) => {}
            (step, _) => out.push(step),
        }
    }
    out
}

/// Golden policy, optionally with one injected fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScriptedPolicy {
    pub fault: Option<FaultSpec>,
}

pub fn golden_policy() -> ScriptedPolicy {
    ScriptedPolicy { fault: None }
}

pub fn inject(mut policy: ScriptedPolicy, fault: FaultSpec) -> ScriptedPolicy {
    policy.fault = Some(fault);
    policy
}

impl ScriptedPolicy {
    pub fn name(&self) -> String {
        self.fault.map_or_else(|| GOLDEN.to_string(), FaultSpec::name)
    }
}

impl fmt::Display for ScriptedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ScriptedPolicy {
    type Err = AgentNameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fault = match s {
            GOLDEN => return Ok(golden_policy()),
            "nolink" => FaultSpec::NoLinkClick,
            "formabandon" => FaultSpec::FormAbandon,
            "wrongfilter" => FaultSpec::WrongFilterColumn,
            "nodrag" => FaultSpec::NoDrag,
            "nohover" => FaultSpec::NoHover,
            other => match other.strip_prefix("earlystop:").map(str::parse) {
                Some(Ok(k)) => FaultSpec::EarlyStop(k),
                _ => return Err(AgentNameError::Unknown(s.to_string())),
            },
        };
        Ok(inject(golden_policy(), fault))
    }
}

/// Names accepted by [`ScriptedPolicy::from_str`]; `earlystop` takes `:k`.
pub const BUILTIN_AGENTS: [&str; 7] = [
    GOLDEN,
    "nolink",
    "formabandon",
    "wrongfilter",
    "nodrag",
    "nohover",
    "earlystop:k",
];

impl Agent for ScriptedPolicy {
    fn identity(&self) -> AgentIdentity {
        AgentIdentity {
            name: self.name(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    fn clock(&self) -> Clock {
        Clock::Virtual {
            step_ms: DEFAULT_STEP_MS,
        }
    }

    fn start(&self, task: TaskRef<'_>, _seed: u64) -> Box<dyn AgentSession + '_> {
        let steps = golden_plan(task.id())
            .map(|p| expand(p, self.fault))
            .unwrap_or_default();
        Box::new(ScriptedSession {
            fault: self.fault,
            steps,
            next: 0,
            issued: 0,
            answer: None,
            halted: false,
        })
    }
}

struct ScriptedSession {
    fault: Option<FaultSpec>,
    steps: Vec<Step>,
    next: usize,
    issued: u32,
    answer: Option<String>,
    halted: bool,
}

fn accepts(control: Control, step: &Step) -> bool {
    match step {
        Step::Click(_) => matches!(
            control,
            Control::Button | Control::Link | Control::Checkbox | Control::Switch
        ),
        Step::Type { .. } => control == Control::TextInput,
        Step::Select { .. } | Step::ChooseFilterColumn { .. } => control == Control::Select,
        Step::Drag { .. } => control == Control::Slider,
        Step::Hover(_) => control == Control::HoverTarget,
        Step::Read(_) | Step::Form { .. } => false,
    }
}

fn locate<'a>(obs: &'a Observation, label: &str, step: &Step) -> Option<&'a ElementManifest> {
    obs.elements
        .iter()
        .find(|e| e.label == label && accepts(e.control, step))
}

/// Id of the closest element with an id that opens before `element_id`.
fn enclosing_id(body_html: &str, element_id: &str) -> Option<String> {
    let at = body_html.find(&format!(r#"id="{element_id}""#))?;
    let start = body_html[..at].rfind(r#" id=""#)? + r#" id=""#.len();
    let end = body_html[start..].find('"')? + start;
    Some(body_html[start..end].to_string())
}

impl ScriptedSession {
    fn command(&mut self, obs: &Observation) -> Option<ActionCommand> {
        while let Some(step) = self.steps.get(self.next).cloned() {
            self.next += 1;
            let (label, step) = match &step {
                Step::Read(pattern) => {
                    let re = Regex::new(pattern).expect("plan regexes are valid");
                    self.answer = Some(re.captures(&obs.body_html)?.get(1)?.as_str().to_string());
                    continue;
                }
                Step::Click(l) | Step::Hover(l) => (l.clone(), step),
                Step::Type { label, .. }
                | Step::Select { label, .. }
                | Step::ChooseFilterColumn { label, .. }
                | Step::Drag { label, .. } => (label.clone(), step),
                Step::Form { .. } => unreachable!("forms are expanded"),
            };
            let el = locate(obs, &label, &step)?;
            let id = el.element_id.as_str();
            return Some(match step {
                Step::Click(_) if el.control == Control::Link && self.fault == Some(FaultSpec::NoLinkClick) => {
                    self.halted = true;
                    ActionCommand::click(&enclosing_id(&obs.body_html, id)?)
                }
                Step::Click(_) => ActionCommand::click(id),
                Step::Type { text, .. } => {
                    let text = text.replace("{answer}", self.answer.as_deref().unwrap_or_default());
                    ActionCommand::type_text(id, &text)
                }
                Step::Select { option, .. } | Step::ChooseFilterColumn { option, .. } => {
                    ActionCommand::select(id, &option)
                }
                Step::Drag { value, .. } => ActionCommand::drag(id, value),
                Step::Hover(_) => ActionCommand::hover(id),
                Step::Read(_) | Step::Form { .. } => unreachable!(),
            });
        }
        None
    }
}

impl AgentSession for ScriptedSession {
    fn step(&mut self, obs: &Observation) -> Result<ActionCommand, AgentError> {
        let limit_hit = matches!(self.fault, Some(FaultSpec::EarlyStop(k)) if self.issued >= k);
        if self.halted || limit_hit {
            return Ok(ActionCommand::stop());
        }
        let cmd = self.command(obs).unwrap_or_else(ActionCommand::stop);
        self.issued += 1;
        Ok(cmd)
    }
}
