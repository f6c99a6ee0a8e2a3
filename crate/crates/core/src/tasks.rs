//! Built-in task suite: individual single-interaction tasks and the two
//! checkpointed end-to-end shopping tasks, with their success criteria.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::environment::{
    decode_cart, decode_component, decode_shipping, find_item, search_catalog, CartState, FinalState, ShippingAddress,
};
use crate::logmodel::{debounce_type_entries, LogEntry, LogStream, DEFAULT_DEBOUNCE};
use crate::taxonomy::refs::*;
use crate::taxonomy::{InteractionRef, LogRef};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaskError {
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("task {task:?} has no checkpoint {checkpoint:?}")]
    UnknownCheckpoint { task: String, checkpoint: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Constraints {
    pub time_limit_s: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_logs: Option<usize>,
}

pub const SHORT_LIMIT_S: u64 = 90;
pub const LONG_LIMIT_S: u64 = 300;

impl Constraints {
    pub const fn short(max_logs: Option<usize>) -> Self {
        Constraints {
            time_limit_s: SHORT_LIMIT_S,
            max_logs,
        }
    }

    pub const fn long() -> Self {
        Constraints {
            time_limit_s: LONG_LIMIT_S,
            max_logs: None,
        }
    }
}

/// How a golden entry's payload is matched. All comparisons trim both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayloadPattern {
    Exact {
        value: String,
    },
    Any,
    /// `label=N` with integer `N > threshold`.
    NumberAbove {
        label: String,
        threshold: i64,
    },
    /// `label=query` where searching `query` lists `item_id`.
    SearchQueryFor {
        label: String,
        item_id: String,
    },
}

impl PayloadPattern {
    pub fn exact(value: impl Into<String>) -> Self {
        PayloadPattern::Exact { value: value.into() }
    }

    pub fn matches(&self, payload: &str) -> bool {
        let payload = payload.trim();
        let labelled = |label: &str| {
            payload
                .split_once('=')
                .filter(|(l, _)| l.trim() == label)
                .map(|(_, v)| v.trim().to_string())
        };
        match self {
            PayloadPattern::Exact { value } => payload == value.trim(),
            PayloadPattern::Any => true,
            PayloadPattern::NumberAbove { label, threshold } => labelled(label)
                .and_then(|v| v.parse::<i64>().ok())
                .is_some_and(|n| n > *threshold),
            PayloadPattern::SearchQueryFor { label, item_id } => {
                labelled(label).is_some_and(|q| query_finds(&q, item_id))
            }
        }
    }
}

fn query_finds(query: &str, item_id: &str) -> bool {
    !query.trim().is_empty() && search_catalog(query.trim()).iter().any(|i| i.id == item_id)
}

/// One expected log entry. A single physical event may be scored under
/// several refs; the log line itself carries the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenEntry {
    pub refs: Vec<InteractionRef>,
    pub payload: PayloadPattern,
}

impl GoldenEntry {
    pub fn new(target: InteractionRef, payload: PayloadPattern) -> Self {
        GoldenEntry {
            refs: vec![target],
            payload,
        }
    }

    pub fn exact(target: InteractionRef, payload: &str) -> Self {
        Self::new(target, PayloadPattern::exact(payload))
    }

    pub fn matches(&self, entry: &LogEntry) -> bool {
        match entry.target {
            LogRef::Interaction(r) => self.refs.contains(&r) && self.payload.matches(&entry.payload),
            LogRef::Navigation => false,
        }
    }
}

/// Maximum bipartite matching of goldens to entries; each side is used at
/// most once. Returns the matched entry index per golden.
pub fn match_goldens(goldens: &[GoldenEntry], entries: &[&LogEntry]) -> Vec<Option<usize>> {
    let edges: Vec<Vec<usize>> = goldens
        .iter()
        .map(|g| (0..entries.len()).filter(|&j| g.matches(entries[j])).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; entries.len()];

    fn augment(g: usize, edges: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &e in &edges[g] {
            if seen[e] {
                continue;
            }
            seen[e] = true;
            if owner[e].is_none_or(|other| augment(other, edges, seen, owner)) {
                owner[e] = Some(g);
                return true;
            }
        }
        false
    }

    for g in 0..goldens.len() {
        let mut seen = vec![false; entries.len()];
        augment(g, &edges, &mut seen, &mut owner);
    }
    let mut result = vec![None; goldens.len()];
    for (e, g) in owner.iter().enumerate() {
        if let Some(g) = g {
            result[*g] = Some(e);
        }
    }
    result
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuccessCriterion {
    LogMatch { expected: Vec<GoldenEntry> },
    SubmittedMaterial { expected: BTreeMap<String, String> },
    NoAction,
    StateEquals { expected: Vec<(String, String)> },
}

impl SuccessCriterion {
    pub fn kind(&self) -> &'static str {
        match self {
            SuccessCriterion::LogMatch { .. } => "log_match",
            SuccessCriterion::SubmittedMaterial { .. } => "submitted_material",
            SuccessCriterion::NoAction => "no_action",
            SuccessCriterion::StateEquals { .. } => "state_equals",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndividualTask {
    pub id: String,
    pub start_path: String,
    pub goal: String,
    pub interaction: InteractionRef,
    pub constraints: Constraints,
    pub success: SuccessCriterion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamMatcher {
    Exact { value: String },
    SearchQueryFor { item_id: String },
    Cart { cart: CartState },
    Shipping { address: ShippingAddress },
    Any,
}

impl ParamMatcher {
    /// `raw` is the still-encoded query value.
    fn matches(&self, raw: &str) -> bool {
        match self {
            ParamMatcher::Exact { value } => decode_component(raw).as_deref() == Some(value.as_str()),
            ParamMatcher::SearchQueryFor { item_id } => decode_component(raw).is_some_and(|q| query_finds(&q, item_id)),
            ParamMatcher::Cart { cart } => decode_cart(raw).is_ok_and(|c| c == *cart),
            ParamMatcher::Shipping { address } => decode_shipping(raw).is_ok_and(|a| a == *address),
            ParamMatcher::Any => true,
        }
    }
}

/// A literal path plus typed query parameters; extra parameters are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathPattern {
    pub path: String,
    pub params: Vec<(String, ParamMatcher)>,
}

impl PathPattern {
    pub fn new(path: &str) -> Self {
        PathPattern {
            path: path.to_string(),
            params: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, m: ParamMatcher) -> Self {
        self.params.push((key.to_string(), m));
        self
    }

    /// Matches a nav payload such as `/thanks?cart=...&shipping=...`.
    pub fn matches(&self, location: &str) -> bool {
        let (path, query) = location.split_once('?').unwrap_or((location, ""));
        if path != self.path {
            return false;
        }
        let raw: Vec<(&str, &str)> = query
            .split('&')
            .filter(|p| !p.is_empty())
            .map(|p| p.split_once('=').unwrap_or((p, "")))
            .collect();
        self.params.iter().all(|(key, m)| {
            let mut values = raw
                .iter()
                .filter(|(k, _)| decode_component(k).as_deref() == Some(key.as_str()));
            match (values.next(), values.next()) {
                (Some((_, v)), None) => m.matches(v),
                _ => false,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckpointSpec {
    pub id: String,
    pub path_pattern: PathPattern,
    pub goldens: Vec<GoldenEntry>,
    #[serde(rename = "override", skip_serializing_if = "Option::is_none")]
    pub override_ref: Option<InteractionRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct E2ETask {
    pub id: String,
    pub goal: String,
    pub start_path: String,
    pub checkpoints: Vec<CheckpointSpec>,
    pub verifier: PathPattern,
    pub constraints: Constraints,
}

impl E2ETask {
    pub fn checkpoint(&self, id: &str) -> Option<&CheckpointSpec> {
        self.checkpoints.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TaskRef<'a> {
    Individual(&'a IndividualTask),
    E2E(&'a E2ETask),
}

impl<'a> TaskRef<'a> {
    pub fn id(&self) -> &'a str {
        match self {
            TaskRef::Individual(t) => &t.id,
            TaskRef::E2E(t) => &t.id,
        }
    }

    pub fn start_path(&self) -> &'a str {
        match self {
            TaskRef::Individual(t) => &t.start_path,
            TaskRef::E2E(t) => &t.start_path,
        }
    }

    pub fn goal(&self) -> &'a str {
        match self {
            TaskRef::Individual(t) => &t.goal,
            TaskRef::E2E(t) => &t.goal,
        }
    }

    pub fn constraints(&self) -> Constraints {
        match self {
            TaskRef::Individual(t) => t.constraints,
            TaskRef::E2E(t) => t.constraints,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteSelection {
    Individual,
    E2e,
    All,
}

impl std::str::FromStr for SuiteSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "individual" => Ok(SuiteSelection::Individual),
            "e2e" => Ok(SuiteSelection::E2e),
            "all" => Ok(SuiteSelection::All),
            other => Err(format!("unknown suite {other:?}; expected individual, e2e or all")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suite {
    pub individual: Vec<IndividualTask>,
    pub e2e: Vec<E2ETask>,
}

impl Suite {
    pub fn task(&self, id: &str) -> Option<TaskRef<'_>> {
        self.individual
            .iter()
            .find(|t| t.id == id)
            .map(TaskRef::Individual)
            .or_else(|| self.e2e.iter().find(|t| t.id == id).map(TaskRef::E2E))
    }

    /// Individual tasks first, then E2E, each in declaration order.
    pub fn tasks(&self) -> impl Iterator<Item = TaskRef<'_>> {
        self.individual
            .iter()
            .map(TaskRef::Individual)
            .chain(self.e2e.iter().map(TaskRef::E2E))
    }

    pub fn select(&self, which: SuiteSelection) -> Suite {
        Suite {
            individual: if which == SuiteSelection::E2e {
                Vec::new()
            } else {
                self.individual.clone()
            },
            e2e: if which == SuiteSelection::Individual {
                Vec::new()
            } else {
                self.e2e.clone()
            },
        }
    }

    /// Keeps only the listed task ids.
    pub fn only(&self, ids: &[&str]) -> Suite {
        Suite {
            individual: self
                .individual
                .iter()
                .filter(|t| ids.contains(&t.id.as_str()))
                .cloned()
                .collect(),
            e2e: self
                .e2e
                .iter()
                .filter(|t| ids.contains(&t.id.as_str()))
                .cloned()
                .collect(),
        }
    }

    /// One record per task with its start path, goal, interaction,
    /// constraints and criterion kind; E2E tasks list checkpoint golden refs.
    pub fn manifest(&self) -> serde_json::Value {
        use serde_json::json;
        let individual: Vec<_> = self
            .individual
            .iter()
            .map(|t| {
                json!({
                    "id": t.id,
                    "start_path": t.start_path,
                    "goal": t.goal,
                    "interaction": t.interaction,
                    "constraints": t.constraints,
                    "criterion": t.success.kind(),
                })
            })
            .collect();
        let e2e: Vec<_> = self
            .e2e
            .iter()
            .map(|t| {
                let checkpoints: Vec<_> = t
                    .checkpoints
                    .iter()
                    .map(|c| {
                        let refs: Vec<_> = c
                            .goldens
                            .iter()
                            .flat_map(|g| g.refs.iter().map(|r| r.to_string()))
                            .collect();
                        json!({
                            "id": c.id,
                            "path": c.path_pattern.path,
                            "golden_refs": refs,
                            "override": c.override_ref,
                        })
                    })
                    .collect();
                json!({
                    "id": t.id,
                    "start_path": t.start_path,
                    "goal": t.goal,
                    "constraints": t.constraints,
                    "checkpoints": checkpoints,
                    "verifier": t.verifier.path,
                })
            })
            .collect();
        json!({ "individual": individual, "e2e": e2e })
    }
}

pub const ORDER_ITEM: &str = "mbp-m3";
pub const ADD_TO_CART_ITEM: &str = "mbp-m3-pro";

pub fn order_address() -> ShippingAddress {
    ShippingAddress::new("John Doe", "123 Main Street", "Cambridge", "MA", "02138")
}

fn ind(
    action: &str,
    variant: &str,
    test: &str,
    goal: &str,
    interaction: InteractionRef,
    constraints: Constraints,
    success: SuccessCriterion,
) -> IndividualTask {
    let page = match action {
        "navigatemenu" => "menu",
        other => other,
    };
    IndividualTask {
        id: format!("ind/{action}/{variant}"),
        start_path: format!("/ind/{page}?test={test}"),
        goal: goal.to_string(),
        interaction,
        constraints,
        success,
    }
}

fn log_match(entries: &[(InteractionRef, &str)]) -> SuccessCriterion {
    SuccessCriterion::LogMatch {
        expected: entries.iter().map(|(r, p)| GoldenEntry::exact(*r, p)).collect(),
    }
}

fn state(pairs: &[(&str, &str)]) -> SuccessCriterion {
    SuccessCriterion::StateEquals {
        expected: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    }
}

fn submitted(pairs: &[(&str, &str)]) -> SuccessCriterion {
    SuccessCriterion::SubmittedMaterial {
        expected: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    }
}

fn individual_tasks() -> Vec<IndividualTask> {
    let short = Constraints::short(Some(2));
    vec![
        ind(
            "click",
            "accordion",
            "accordion",
            "Expand the Shipping details section.",
            CLICK_ACCORDION,
            short,
            log_match(&[(CLICK_ACCORDION, "Shipping details")]),
        ),
        ind(
            "click",
            "button",
            "button",
            "Click the Submit button.",
            CLICK_BUTTON,
            short,
            log_match(&[(CLICK_BUTTON, "Submit")]),
        ),
        ind(
            "click",
            "dialogbutton",
            "dialogbutton",
            "Delete the file and confirm the deletion in the dialog.",
            CLICK_DIALOG_BUTTON,
            short,
            log_match(&[(CLICK_DIALOG_BUTTON, "Confirm")]),
        ),
        ind(
            "click",
            "dropdownmenu",
            "dropdownmenu",
            "Duplicate the project using the Options menu.",
            CLICK_DROPDOWN_MENU,
            short,
            log_match(&[(CLICK_DROPDOWN_MENU, "Duplicate")]),
        ),
        ind(
            "click",
            "iconbutton",
            "iconbutton",
            "Open the settings.",
            CLICK_ICON_BUTTON,
            short,
            log_match(&[(CLICK_ICON_BUTTON, "Settings")]),
        ),
        ind(
            "click",
            "link",
            "link",
            "Go to the About us page.",
            CLICK_LINK,
            short,
            log_match(&[(CLICK_LINK, "About us")]),
        ),
        ind(
            "click",
            "slider-louder",
            "slider",
            "Make the volume louder.",
            CLICK_SLIDER,
            short,
            SuccessCriterion::LogMatch {
                expected: vec![GoldenEntry::new(
                    CLICK_SLIDER,
                    PayloadPattern::NumberAbove {
                        label: "volume".into(),
                        threshold: 50,
                    },
                )],
            },
        ),
        ind(
            "click",
            "slider-max",
            "slider",
            "Turn the volume all the way up.",
            CLICK_SLIDER,
            short,
            state(&[("slider-volume", "100")]),
        ),
        ind(
            "click",
            "slider-mute",
            "slider",
            "Turn the volume all the way down.",
            CLICK_SLIDER,
            short,
            state(&[("slider-volume", "0")]),
        ),
        ind(
            "click",
            "slider-brightness",
            "slider-brightness",
            "Set the brightness to 30.",
            CLICK_SLIDER,
            short,
            state(&[("slider-brightness", "30")]),
        ),
        ind(
            "click",
            "snackbar",
            "snackbar",
            "Save the draft, then undo the save from the notification.",
            CLICK_SNACKBAR,
            short,
            log_match(&[(CLICK_SNACKBAR, "Undo")]),
        ),
        ind(
            "click",
            "switch-on",
            "switch",
            "Turn on do not disturb.",
            CLICK_SWITCH,
            short,
            state(&[("switch-dnd", "on")]),
        ),
        ind(
            "click",
            "switch-off",
            "switch",
            "Make sure do not disturb is turned off.",
            CLICK_SWITCH,
            short,
            SuccessCriterion::NoAction,
        ),
        ind(
            "type",
            "date",
            "date",
            "Enter the birth date 1990-05-17.",
            TYPE_DATE,
            short,
            log_match(&[(TYPE_DATE, "Birth date=1990-05-17")]),
        ),
        ind(
            "type",
            "phone",
            "phone",
            "Enter the phone number 617-555-0123.",
            TYPE_PHONE,
            short,
            log_match(&[(TYPE_PHONE, "Phone number=617-555-0123")]),
        ),
        ind(
            "type",
            "text",
            "text",
            "Enter the name John Doe.",
            TYPE_TEXT,
            short,
            log_match(&[(TYPE_TEXT, "Name=John Doe")]),
        ),
        ind(
            "select",
            "checkbox",
            "checkbox",
            "Agree to the terms.",
            SELECT_CHECKBOX,
            short,
            state(&[("chk-terms", "checked")]),
        ),
        ind(
            "select",
            "datagridrow",
            "datagridrow",
            "Select the row for order #1042.",
            SELECT_DATAGRID_ROW,
            short,
            state(&[
                ("row-1041", "unchecked"),
                ("row-1042", "checked"),
                ("row-1043", "unchecked"),
            ]),
        ),
        ind(
            "select",
            "multicheck",
            "multicheck",
            "Get notifications by Email and SMS only.",
            SELECT_MULTICHECK,
            short,
            state(&[
                ("chk-email", "checked"),
                ("chk-sms", "checked"),
                ("chk-push", "unchecked"),
            ]),
        ),
        ind(
            "select",
            "select",
            "select",
            "Set the country to Canada.",
            SELECT_SELECT,
            short,
            state(&[("sel-country", "Canada")]),
        ),
        ind(
            "navigatemenu",
            "basicmenu",
            "basic",
            "Use the menu to go to Settings.",
            MENU_BASIC,
            short,
            log_match(&[(MENU_BASIC, "Settings")]),
        ),
        ind(
            "navigatemenu",
            "nestedmenu",
            "nested",
            "Use the menu to open the Privacy page under Account.",
            MENU_NESTED,
            Constraints::short(Some(3)),
            log_match(&[(MENU_NESTED, "Account > Privacy")]),
        ),
        ind(
            "find",
            "accordion",
            "accordion",
            "How long do you have to return an item? Submit the answer.",
            FIND_ACCORDION,
            Constraints::long(),
            submitted(&[("Answer", "30 days")]),
        ),
        ind(
            "find",
            "dialogbutton",
            "dialogbutton",
            "How long is the warranty? Submit the answer.",
            FIND_DIALOG_BUTTON,
            Constraints::long(),
            submitted(&[("Answer", "2 years")]),
        ),
        ind(
            "find",
            "paragraphs",
            "paragraphs",
            "In what year was the company founded? Submit the answer.",
            FIND_PARAGRAPHS,
            Constraints::long(),
            submitted(&[("Answer", "1998")]),
        ),
        ind(
            "find",
            "tooltip",
            "tooltip",
            "How much cloud storage does the Basic plan include? Submit the answer.",
            FIND_TOOLTIP,
            Constraints::long(),
            submitted(&[("Answer", "50 GB")]),
        ),
        ind(
            "filter",
            "filterdatagrid",
            "filterdatagrid",
            "Show only suppliers located in the USA.",
            FILTER_DATAGRID,
            Constraints::long(),
            state(&[("filter-column", "Country"), ("filter-value", "USA")]),
        ),
        ind(
            "filter",
            "sortdatagrid",
            "sortdatagrid",
            "Sort the sales by total, highest first.",
            SORT_DATAGRID,
            Constraints::long(),
            state(&[("sort-total", "descending")]),
        ),
        ind(
            "fill",
            "basicform",
            "basicform",
            "Sign up with the name Jane Smith and the email jane@example.com.",
            FILL_BASIC_FORM,
            Constraints::long(),
            submitted(&[("Name", "Jane Smith"), ("Email", "jane@example.com")]),
        ),
        ind(
            "fill",
            "complexform",
            "complexform",
            "Register Alex Kim, phone 617-555-0199, born 1985-03-02, living in Canada, subscribed to the newsletter.",
            FILL_COMPLEX_FORM,
            Constraints::long(),
            submitted(&[
                ("Name", "Alex Kim"),
                ("Phone", "617-555-0199"),
                ("Birth date", "1985-03-02"),
                ("Country", "Canada"),
                ("Subscribe to newsletter", "checked"),
            ]),
        ),
    ]
}

fn search_checkpoint(item_id: &str) -> CheckpointSpec {
    CheckpointSpec {
        id: "search".into(),
        path_pattern: PathPattern::new("/"),
        goldens: vec![
            GoldenEntry::new(
                TYPE_TEXT,
                PayloadPattern::SearchQueryFor {
                    label: "Search".into(),
                    item_id: item_id.into(),
                },
            ),
            GoldenEntry::exact(CLICK_ICON_BUTTON, "Search"),
        ],
        override_ref: None,
    }
}

fn click_item_checkpoint(item_id: &str) -> CheckpointSpec {
    let name = &find_item(item_id).expect("fixture item").name;
    CheckpointSpec {
        id: "click item".into(),
        path_pattern: PathPattern::new("/search").param(
            "query",
            ParamMatcher::SearchQueryFor {
                item_id: item_id.into(),
            },
        ),
        goldens: vec![GoldenEntry {
            refs: vec![CLICK_LINK, SEARCH_SELECT_RESULT],
            payload: PayloadPattern::exact(name.as_str()),
        }],
        override_ref: None,
    }
}

fn item_page(item_id: &str) -> PathPattern {
    PathPattern::new("/item").param("id", ParamMatcher::Exact { value: item_id.into() })
}

fn e2e_tasks() -> Vec<E2ETask> {
    let m3 = find_item(ORDER_ITEM).expect("fixture item");
    let order_cart = CartState::with_defaults(m3);
    let address = order_address();
    let mut fill_goldens: Vec<GoldenEntry> = ShippingAddress::FIELDS
        .iter()
        .zip(address.fields())
        .map(|(label, value)| GoldenEntry::exact(TYPE_TEXT, &format!("{label}={value}")))
        .collect();
    fill_goldens.push(GoldenEntry::exact(CLICK_BUTTON, "Place order"));
    let order = E2ETask {
        id: "e2e/order".into(),
        goal: "Order a MacBook Pro M3 with no extra customizations and ship it to John Doe, \
               123 Main Street, Cambridge, MA 02138."
            .into(),
        start_path: "/".into(),
        checkpoints: vec![
            search_checkpoint(ORDER_ITEM),
            click_item_checkpoint(ORDER_ITEM),
            CheckpointSpec {
                id: "add to cart".into(),
                path_pattern: item_page(ORDER_ITEM),
                goldens: vec![GoldenEntry::exact(CLICK_BUTTON, "Add to cart")],
                override_ref: None,
            },
            CheckpointSpec {
                id: "fill shipping".into(),
                path_pattern: PathPattern::new("/checkout").param(
                    "cart",
                    ParamMatcher::Cart {
                        cart: order_cart.clone(),
                    },
                ),
                goldens: fill_goldens,
                override_ref: Some(FILL_COMPLEX_FORM),
            },
        ],
        verifier: PathPattern::new("/thanks")
            .param("cart", ParamMatcher::Cart { cart: order_cart })
            .param("shipping", ParamMatcher::Shipping { address }),
        constraints: Constraints::long(),
    };

    let pro = find_item(ADD_TO_CART_ITEM).expect("fixture item");
    let top = CartState::highest_tier(pro);
    let mut customize: Vec<GoldenEntry> = pro
        .customization_groups
        .iter()
        .map(|g| GoldenEntry::exact(CLICK_BUTTON, &format!("{}={}", g.name, top.options[&g.name])))
        .collect();
    customize.push(GoldenEntry::exact(CLICK_BUTTON, "Add to cart"));
    let add = E2ETask {
        id: "e2e/add-to-cart".into(),
        goal: "Add a MacBook Pro M3 Pro to the cart with the highest-tier memory and storage.".into(),
        start_path: "/".into(),
        checkpoints: vec![
            search_checkpoint(ADD_TO_CART_ITEM),
            click_item_checkpoint(ADD_TO_CART_ITEM),
            CheckpointSpec {
                id: "customize".into(),
                path_pattern: item_page(ADD_TO_CART_ITEM),
                goldens: customize,
                override_ref: Some(FILL_BASIC_FORM),
            },
        ],
        verifier: PathPattern::new("/cart").param("cart", ParamMatcher::Cart { cart: top }),
        constraints: Constraints::long(),
    };
    vec![order, add]
}

pub fn builtin_suite() -> Suite {
    Suite {
        individual: individual_tasks(),
        e2e: e2e_tasks(),
    }
}

pub fn golden_logs_for<'a>(task: &'a E2ETask, checkpoint_id: &str) -> Result<&'a [GoldenEntry], TaskError> {
    task.checkpoint(checkpoint_id)
        .map(|c| c.goldens.as_slice())
        .ok_or_else(|| TaskError::UnknownCheckpoint {
            task: task.id.clone(),
            checkpoint: checkpoint_id.to_string(),
        })
}

/// Evaluates an individual task's criterion on a finished trial.
pub fn check_individual(task: &IndividualTask, stream: &LogStream, state: &FinalState) -> bool {
    let stream = debounce_type_entries(stream, DEFAULT_DEBOUNCE);
    match &task.success {
        SuccessCriterion::LogMatch { expected } => {
            let entries: Vec<&LogEntry> = stream.non_nav().collect();
            match_goldens(expected, &entries).iter().all(Option::is_some)
        }
        SuccessCriterion::SubmittedMaterial { expected } => state.submitted.as_ref().is_some_and(|got| {
            got.len() == expected.len()
                && expected
                    .iter()
                    .all(|(k, v)| got.get(k).is_some_and(|g| g.trim() == v.trim()))
        }),
        SuccessCriterion::NoAction => stream.non_nav().next().is_none(),
        SuccessCriterion::StateEquals { expected } => expected
            .iter()
            .all(|(id, want)| state.element_states.get(id).is_some_and(|s| s == want)),
    }
}

/// True iff some nav entry lands on the verifier's page with matching state.
pub fn verify_e2e(task: &E2ETask, stream: &LogStream) -> bool {
    stream.navs().any(|e| task.verifier.matches(&e.payload))
}
