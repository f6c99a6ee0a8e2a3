//! The three-level category → action → interaction registry.
//!
//! Every log line, task and statistic in the harness is keyed by an
//! [`InteractionRef`]. References are written on the wire in a compact
//! lowercase `action/interaction` form (`click/iconbutton`, `fill/basicform`);
//! navigation events use the `nav` pseudo-node, which sits outside the three
//! categories.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("malformed interaction reference {0:?}")]
    MalformedRef(String),
    #[error("unknown interaction {0:?}")]
    UnknownInteraction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Operational,
    Navigational,
    Informational,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Operational, Category::Navigational, Category::Informational];

    pub fn actions(self) -> impl Iterator<Item = Action> {
        Action::ALL.into_iter().filter(move |a| a.category() == self)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Click,
    Type,
    Select,
    NavigateUrl,
    NavigateMenu,
    NavigateHistory,
    Find,
    Filter,
    Search,
    Fill,
    Review,
}

impl Action {
    pub const ALL: [Action; 11] = [
        Action::Click,
        Action::Type,
        Action::Select,
        Action::NavigateUrl,
        Action::NavigateMenu,
        Action::NavigateHistory,
        Action::Find,
        Action::Filter,
        Action::Search,
        Action::Fill,
        Action::Review,
    ];

    pub const fn category(self) -> Category {
        match self {
            Action::Click | Action::Type | Action::Select => Category::Operational,
            Action::NavigateUrl | Action::NavigateMenu | Action::NavigateHistory => Category::Navigational,
            Action::Find | Action::Filter | Action::Search | Action::Fill | Action::Review => Category::Informational,
        }
    }

    pub const fn wire_name(self) -> &'static str {
        match self {
            Action::Click => "click",
            Action::Type => "type",
            Action::Select => "select",
            Action::NavigateUrl => "navigateurl",
            Action::NavigateMenu => "navigatemenu",
            Action::NavigateHistory => "navigatehistory",
            Action::Find => "find",
            Action::Filter => "filter",
            Action::Search => "search",
            Action::Fill => "fill",
            Action::Review => "review",
        }
    }

    /// Short name used in report tables.
    pub const fn display_name(self) -> &'static str {
        match self {
            Action::Click => "Click",
            Action::Type => "Type",
            Action::Select => "Select",
            Action::NavigateUrl => "Navigate to URL",
            Action::NavigateMenu => "Menu",
            Action::NavigateHistory => "Forward/back",
            Action::Find => "Find",
            Action::Filter => "Filter",
            Action::Search => "Search",
            Action::Fill => "Fill",
            Action::Review => "Review",
        }
    }

    fn from_wire(s: &str) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.wire_name() == s)
    }

    /// Interactions under this action in table order, with their implemented flag.
    pub const fn children(self) -> &'static [(Interaction, bool)] {
        use Interaction::*;
        match self {
            Action::Click => &[
                (Accordion, true),
                (Button, true),
                (DialogButton, true),
                (DropdownMenu, true),
                (IconButton, true),
                (Link, true),
                (Slider, true),
                (Snackbar, true),
                (Switch, true),
                (Drawer, false),
                (Tab, false),
                (FloatingActionButton, false),
            ],
            Action::Type => &[(Date, true), (Phone, true), (Text, true)],
            Action::Select => &[
                (Checkbox, true),
                (DatagridRow, true),
                (Multicheck, true),
                (Select, true),
                (Radio, false),
                (Chips, false),
            ],
            Action::NavigateUrl => &[(ArbitraryPage, false)],
            Action::NavigateMenu => &[(BasicMenu, true), (NestedMenu, true)],
            Action::NavigateHistory => &[(ArbitraryPages, false)],
            Action::Find => &[
                (Accordion, true),
                (DialogButton, true),
                (Paragraphs, true),
                (Tooltip, true),
                (Table, false),
            ],
            Action::Filter => &[
                (FilterDatagrid, true),
                (SortDatagrid, true),
                (FilterSearchResults, false),
                (SortSearchResults, false),
                (FilterSpreadsheet, false),
                (SortSpreadsheet, false),
            ],
            Action::Search => &[(WriteQuery, false), (SelectResult, false)],
            Action::Fill => &[(BasicForm, true), (ComplexForm, true)],
            Action::Review => &[(ConfirmForm, false), (ChangeIncorrect, false)],
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Interaction {
    Accordion,
    Button,
    DialogButton,
    DropdownMenu,
    IconButton,
    Link,
    Slider,
    Snackbar,
    Switch,
    Drawer,
    Tab,
    FloatingActionButton,
    Date,
    Phone,
    Text,
    Checkbox,
    DatagridRow,
    Multicheck,
    Select,
    Radio,
    Chips,
    ArbitraryPage,
    BasicMenu,
    NestedMenu,
    ArbitraryPages,
    Paragraphs,
    Tooltip,
    Table,
    FilterDatagrid,
    SortDatagrid,
    FilterSearchResults,
    SortSearchResults,
    FilterSpreadsheet,
    SortSpreadsheet,
    WriteQuery,
    SelectResult,
    BasicForm,
    ComplexForm,
    ConfirmForm,
    ChangeIncorrect,
}

impl Interaction {
    pub const fn wire_name(self) -> &'static str {
        use Interaction::*;
        match self {
            Accordion => "accordion",
            Button => "button",
            DialogButton => "dialogbutton",
            DropdownMenu => "dropdownmenu",
            IconButton => "iconbutton",
            Link => "link",
            Slider => "slider",
            Snackbar => "snackbar",
            Switch => "switch",
            Drawer => "drawer",
            Tab => "tab",
            FloatingActionButton => "floatingactionbutton",
            Date => "date",
            Phone => "phone",
            Text => "text",
            Checkbox => "checkbox",
            DatagridRow => "datagridrow",
            Multicheck => "multicheck",
            Select => "select",
            Radio => "radio",
            Chips => "chips",
            ArbitraryPage => "arbitrarypage",
            BasicMenu => "basicmenu",
            NestedMenu => "nestedmenu",
            ArbitraryPages => "arbitrarypages",
            Paragraphs => "paragraphs",
            Tooltip => "tooltip",
            Table => "table",
            FilterDatagrid => "filterdatagrid",
            SortDatagrid => "sortdatagrid",
            FilterSearchResults => "filtersearchresults",
            SortSearchResults => "sortsearchresults",
            FilterSpreadsheet => "filterspreadsheet",
            SortSpreadsheet => "sortspreadsheet",
            WriteQuery => "writequery",
            SelectResult => "selectresult",
            BasicForm => "basicform",
            ComplexForm => "complexform",
            ConfirmForm => "confirmform",
            ChangeIncorrect => "changeincorrect",
        }
    }

    pub const fn display_name(self) -> &'static str {
        use Interaction::*;
        match self {
            Accordion => "Accordion",
            Button => "Button",
            DialogButton => "Dialog button",
            DropdownMenu => "Dropdown menu",
            IconButton => "Icon button",
            Link => "Link",
            Slider => "Slider",
            Snackbar => "Snackbar",
            Switch => "Switch",
            Drawer => "Drawer",
            Tab => "Tab",
            FloatingActionButton => "Floating action button",
            Date => "Date",
            Phone => "Phone",
            Text => "Text field",
            Checkbox => "Checkbox",
            DatagridRow => "Datagrid row",
            Multicheck => "Multicheck",
            Select => "Select",
            Radio => "Radio",
            Chips => "Chips",
            ArbitraryPage => "Arbitrary page",
            BasicMenu => "Basic menu",
            NestedMenu => "Nested menu",
            ArbitraryPages => "Across pages",
            Paragraphs => "Paragraphs",
            Tooltip => "Tooltip",
            Table => "Table",
            FilterDatagrid => "Filter datagrid",
            SortDatagrid => "Sort datagrid",
            FilterSearchResults => "Filter search results",
            SortSearchResults => "Sort search results",
            FilterSpreadsheet => "Filter spreadsheet",
            SortSpreadsheet => "Sort spreadsheet",
            WriteQuery => "Write query",
            SelectResult => "Select result",
            BasicForm => "Basic form",
            ComplexForm => "Complex form",
            ConfirmForm => "Confirm form",
            ChangeIncorrect => "Change incorrect",
        }
    }
}

/// A leaf of the taxonomy: an (action, interaction) pair known to the registry.
///
/// Construction is checked, so holding an `InteractionRef` means the pair
/// resolves to exactly one registry node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InteractionRef {
    action: Action,
    interaction: Interaction,
}

impl InteractionRef {
    pub const fn new(action: Action, interaction: Interaction) -> Option<Self> {
        let children = action.children();
        let mut i = 0;
        while i < children.len() {
            if children[i].0 as u8 == interaction as u8 {
                return Some(InteractionRef { action, interaction });
            }
            i += 1;
        }
        None
    }

    /// Compile-time checked constructor for the constants in [`refs`].
    pub const fn known(action: Action, interaction: Interaction) -> Self {
        match Self::new(action, interaction) {
            Some(r) => r,
            None => panic!("interaction is not registered under this action"),
        }
    }

    pub const fn action(self) -> Action {
        self.action
    }

    pub const fn interaction(self) -> Interaction {
        self.interaction
    }

    pub const fn category(self) -> Category {
        self.action.category()
    }

    pub fn implemented(self) -> bool {
        self.action
            .children()
            .iter()
            .any(|(i, done)| *i == self.interaction && *done)
    }

    pub fn path(self) -> String {
        format!("{}/{}", self.action.wire_name(), self.interaction.wire_name())
    }
}

impl fmt::Display for InteractionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.action.wire_name(), self.interaction.wire_name())
    }
}

impl FromStr for InteractionRef {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match parse_ref(s)? {
            LogRef::Interaction(r) => Ok(r),
            LogRef::Navigation => Err(TaxonomyError::UnknownInteraction(s.to_string())),
        }
    }
}

impl Serialize for InteractionRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InteractionRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// What a log line refers to: a registry node or the navigation pseudo-node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogRef {
    Interaction(InteractionRef),
    Navigation,
}

impl LogRef {
    pub fn is_nav(self) -> bool {
        matches!(self, LogRef::Navigation)
    }

    pub fn interaction(self) -> Option<InteractionRef> {
        match self {
            LogRef::Interaction(r) => Some(r),
            LogRef::Navigation => None,
        }
    }
}

impl From<InteractionRef> for LogRef {
    fn from(r: InteractionRef) -> Self {
        LogRef::Interaction(r)
    }
}

impl fmt::Display for LogRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogRef::Interaction(r) => r.fmt(f),
            LogRef::Navigation => f.write_str(NAV),
        }
    }
}

impl Serialize for LogRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LogRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_ref(&s).map_err(serde::de::Error::custom)
    }
}

const NAV: &str = "nav";

/// Parses `action/interaction` (or the literal `nav`).
pub fn parse_ref(text: &str) -> Result<LogRef, TaxonomyError> {
    if text == NAV {
        return Ok(LogRef::Navigation);
    }
    let malformed = || TaxonomyError::MalformedRef(text.to_string());
    let (action, interaction) = text.split_once('/').ok_or_else(malformed)?;
    let well_formed = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase());
    if !well_formed(action) || !well_formed(interaction) {
        return Err(malformed());
    }
    let unknown = || TaxonomyError::UnknownInteraction(text.to_string());
    let action = Action::from_wire(action).ok_or_else(unknown)?;
    action
        .children()
        .iter()
        .find(|(i, _)| i.wire_name() == interaction)
        .map(|(i, _)| LogRef::Interaction(InteractionRef::known(action, *i)))
        .ok_or_else(unknown)
}

pub fn format_ref(r: LogRef) -> String {
    r.to_string()
}

/// One exported registry record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyNode {
    pub category: Category,
    pub action: Action,
    pub interaction: Interaction,
    #[serde(rename = "ref")]
    pub reference: InteractionRef,
    pub label: String,
    pub implemented: bool,
}

#[derive(Debug, Clone)]
pub struct Taxonomy {
    nodes: Vec<TaxonomyNode>,
}

impl Taxonomy {
    pub fn nodes(&self) -> &[TaxonomyNode] {
        &self.nodes
    }

    pub fn children(&self, action: Action) -> impl Iterator<Item = &TaxonomyNode> {
        self.nodes.iter().filter(move |n| n.action == action)
    }

    pub fn refs(&self) -> impl Iterator<Item = InteractionRef> + '_ {
        self.nodes.iter().map(|n| n.reference)
    }

    pub fn implemented(&self) -> impl Iterator<Item = InteractionRef> + '_ {
        self.nodes.iter().filter(|n| n.implemented).map(|n| n.reference)
    }

    pub fn export_json(&self) -> String {
        serde_json::to_string_pretty(&self.nodes).expect("registry serializes")
    }
}

/// The canonical registry, ordered by category then table order.
pub fn canonical_registry() -> &'static Taxonomy {
    static REGISTRY: OnceLock<Taxonomy> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let nodes = Category::ALL
            .into_iter()
            .flat_map(Category::actions)
            .flat_map(|action| {
                action
                    .children()
                    .iter()
                    .map(move |&(interaction, implemented)| TaxonomyNode {
                        category: action.category(),
                        action,
                        interaction,
                        reference: InteractionRef::known(action, interaction),
                        label: interaction.display_name().to_string(),
                        implemented,
                    })
            })
            .collect();
        Taxonomy { nodes }
    })
}

/// Registry constants used across the harness.
pub mod refs {
    use super::{Action as A, Interaction as I, InteractionRef as R};

    pub const CLICK_ACCORDION: R = R::known(A::Click, I::Accordion);
    pub const CLICK_BUTTON: R = R::known(A::Click, I::Button);
    pub const CLICK_DIALOG_BUTTON: R = R::known(A::Click, I::DialogButton);
    pub const CLICK_DROPDOWN_MENU: R = R::known(A::Click, I::DropdownMenu);
    pub const CLICK_ICON_BUTTON: R = R::known(A::Click, I::IconButton);
    pub const CLICK_LINK: R = R::known(A::Click, I::Link);
    pub const CLICK_SLIDER: R = R::known(A::Click, I::Slider);
    pub const CLICK_SNACKBAR: R = R::known(A::Click, I::Snackbar);
    pub const CLICK_SWITCH: R = R::known(A::Click, I::Switch);
    pub const TYPE_DATE: R = R::known(A::Type, I::Date);
    pub const TYPE_PHONE: R = R::known(A::Type, I::Phone);
    pub const TYPE_TEXT: R = R::known(A::Type, I::Text);
    pub const SELECT_CHECKBOX: R = R::known(A::Select, I::Checkbox);
    pub const SELECT_DATAGRID_ROW: R = R::known(A::Select, I::DatagridRow);
    pub const SELECT_MULTICHECK: R = R::known(A::Select, I::Multicheck);
    pub const SELECT_SELECT: R = R::known(A::Select, I::Select);
    pub const NAVIGATE_URL: R = R::known(A::NavigateUrl, I::ArbitraryPage);
    pub const MENU_BASIC: R = R::known(A::NavigateMenu, I::BasicMenu);
    pub const MENU_NESTED: R = R::known(A::NavigateMenu, I::NestedMenu);
    pub const FIND_ACCORDION: R = R::known(A::Find, I::Accordion);
    pub const FIND_DIALOG_BUTTON: R = R::known(A::Find, I::DialogButton);
    pub const FIND_PARAGRAPHS: R = R::known(A::Find, I::Paragraphs);
    pub const FIND_TOOLTIP: R = R::known(A::Find, I::Tooltip);
    pub const FILTER_DATAGRID: R = R::known(A::Filter, I::FilterDatagrid);
    pub const SORT_DATAGRID: R = R::known(A::Filter, I::SortDatagrid);
    pub const SEARCH_SELECT_RESULT: R = R::known(A::Search, I::SelectResult);
    pub const SEARCH_WRITE_QUERY: R = R::known(A::Search, I::WriteQuery);
    pub const FILL_BASIC_FORM: R = R::known(A::Fill, I::BasicForm);
    pub const FILL_COMPLEX_FORM: R = R::known(A::Fill, I::ComplexForm);
}
