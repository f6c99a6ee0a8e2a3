//! Single-interaction task pages, one per `(path, test)` pair.

use super::forms::{self, Field};
use super::page::PageBuilder;
use super::{ElementManifest, EnvError, Location, Op, Page, Transition};
use crate::taxonomy::refs::*;
use crate::taxonomy::InteractionRef;

type RenderFn = fn(&Location) -> PageBuilder;
type ActFn = fn(&Location, &ElementManifest, &Op) -> Transition;

struct Ind {
    render: RenderFn,
    act: ActFn,
}

impl Page for Ind {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        Ok((self.render)(loc))
    }

    fn act(&self, loc: &Location, el: &ElementManifest, op: &Op) -> Result<Transition, EnvError> {
        Ok((self.act)(loc, el, op))
    }
}

/// Every `(path, test)` pair with a page.
#[cfg(test)]
pub(crate) const PAGES: &[(&str, &str)] = &[
    ("/ind/click", "accordion"),
    ("/ind/click", "button"),
    ("/ind/click", "dialogbutton"),
    ("/ind/click", "dropdownmenu"),
    ("/ind/click", "iconbutton"),
    ("/ind/click", "link"),
    ("/ind/click", "slider"),
    ("/ind/click", "slider-brightness"),
    ("/ind/click", "snackbar"),
    ("/ind/click", "switch"),
    ("/ind/type", "date"),
    ("/ind/type", "phone"),
    ("/ind/type", "text"),
    ("/ind/select", "checkbox"),
    ("/ind/select", "datagridrow"),
    ("/ind/select", "multicheck"),
    ("/ind/select", "select"),
    ("/ind/menu", "basic"),
    ("/ind/menu", "nested"),
    ("/ind/find", "accordion"),
    ("/ind/find", "dialogbutton"),
    ("/ind/find", "paragraphs"),
    ("/ind/find", "tooltip"),
    ("/ind/filter", "filterdatagrid"),
    ("/ind/filter", "sortdatagrid"),
    ("/ind/fill", "basicform"),
    ("/ind/fill", "complexform"),
];

pub(super) fn page(path: &str, test: &str) -> Option<Box<dyn Page>> {
    let (render, act): (RenderFn, ActFn) = match (path, test) {
        ("/ind/click", "accordion") => (accordion, accordion_act),
        ("/ind/click", "button") => (button, button_act),
        ("/ind/click", "dialogbutton") => (dialog, dialog_act),
        ("/ind/click", "dropdownmenu") => (dropdown, dropdown_act),
        ("/ind/click", "iconbutton") => (icons, icons_act),
        ("/ind/click", "link") => (links, links_act),
        ("/ind/click", "slider") => (|l| slider(l, &VOLUME), |l, e, o| slider_act(l, e, o, &VOLUME)),
        ("/ind/click", "slider-brightness") => (|l| slider(l, &BRIGHTNESS), |l, e, o| slider_act(l, e, o, &BRIGHTNESS)),
        ("/ind/click", "snackbar") => (snackbar, snackbar_act),
        ("/ind/click", "switch") => (switch, switch_act),
        ("/ind/type", "date") => (
            |l| single(l, "Profile", &TYPE_DATE_FIELD),
            |l, e, o| single_act(l, e, o, &TYPE_DATE_FIELD),
        ),
        ("/ind/type", "phone") => (
            |l| single(l, "Contact", &TYPE_PHONE_FIELD),
            |l, e, o| single_act(l, e, o, &TYPE_PHONE_FIELD),
        ),
        ("/ind/type", "text") => (
            |l| single(l, "Profile", &TYPE_TEXT_FIELD),
            |l, e, o| single_act(l, e, o, &TYPE_TEXT_FIELD),
        ),
        ("/ind/select", "checkbox") => (
            |l| single(l, "Terms of service", &TERMS_FIELD),
            |l, e, o| single_act(l, e, o, &TERMS_FIELD),
        ),
        ("/ind/select", "datagridrow") => (datagrid_rows, datagrid_rows_act),
        ("/ind/select", "multicheck") => (multicheck, multicheck_act),
        ("/ind/select", "select") => (
            |l| single(l, "Shipping region", &COUNTRY_FIELD),
            |l, e, o| single_act(l, e, o, &COUNTRY_FIELD),
        ),
        ("/ind/menu", "basic") => (basic_menu, basic_menu_act),
        ("/ind/menu", "nested") => (nested_menu, nested_menu_act),
        ("/ind/find", "accordion") => (find_accordion, find_accordion_act),
        ("/ind/find", "dialogbutton") => (find_dialog, find_dialog_act),
        ("/ind/find", "paragraphs") => (find_paragraphs, find_paragraphs_act),
        ("/ind/find", "tooltip") => (find_tooltip, find_tooltip_act),
        ("/ind/filter", "filterdatagrid") => (filter_grid, filter_grid_act),
        ("/ind/filter", "sortdatagrid") => (sort_grid, sort_grid_act),
        ("/ind/fill", "basicform") => (basic_form, basic_form_act),
        ("/ind/fill", "complexform") => (complex_form, complex_form_act),
        _ => return None,
    };
    Some(Box::new(Ind { render, act }))
}

fn stay(loc: &Location) -> Transition {
    Transition::stay(loc.clone())
}

fn toggle(loc: &Location, key: &str) -> Location {
    forms::set_flag(loc, key, !loc.flag(key))
}

// click/accordion

const SECTIONS: [(&str, &str, &str, &str); 2] = [
    (
        "shipping",
        "acc-shipping",
        "Shipping details",
        "Ships in 2 business days from our Boston warehouse.",
    ),
    (
        "payment",
        "acc-payment",
        "Payment options",
        "We accept all major credit cards.",
    ),
];

fn accordion(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Order summary");
    for (key, id, label, body) in SECTIONS {
        let open = loc.flag(key);
        p.button(id, CLICK_ACCORDION, label, if open { "expanded" } else { "collapsed" });
        if open {
            p.text("p", body);
        }
    }
    p
}

fn accordion_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    match SECTIONS.iter().find(|s| s.1 == el.element_id) {
        Some((key, ..)) => Transition::stay(toggle(loc, key)).log_label(el),
        None => stay(loc),
    }
}

// click/button

fn button(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Feedback");
    p.text("p", "Thanks for trying the beta. Send your feedback when ready.");
    p.button("btn-submit", CLICK_BUTTON, "Submit", "");
    p.button("btn-cancel", CLICK_BUTTON, "Cancel", "");
    if let Some(last) = loc.get("clicked") {
        p.text("p", &format!("Last pressed: {last}"));
    }
    p
}

fn button_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    Transition::stay(loc.clone().with("clicked", el.label.as_str())).log_label(el)
}

// click/dialogbutton

fn dialog(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Files");
    if loc.flag("deleted") {
        p.text("p", "report.pdf was deleted.");
    } else {
        p.text("p", "report.pdf (2.4 MB)");
        p.button("btn-delete", CLICK_BUTTON, "Delete file", "");
    }
    if loc.flag("dialog") {
        p.open("div", r#"role="dialog""#);
        p.text("p", "Delete report.pdf permanently?");
        p.button("dialog-confirm", CLICK_DIALOG_BUTTON, "Confirm", "");
        p.button("dialog-cancel", CLICK_DIALOG_BUTTON, "Cancel", "");
        p.close("div");
    }
    p
}

fn dialog_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    let next = match el.element_id.as_str() {
        "btn-delete" => loc.clone().with("dialog", "1"),
        "dialog-confirm" => loc.clone().without("dialog").with("deleted", "1"),
        "dialog-cancel" => loc.clone().without("dialog"),
        _ => return stay(loc),
    };
    Transition::stay(next).log_label(el)
}

// click/dropdownmenu

const MENU_ITEMS: [(&str, &str); 3] = [
    ("menu-rename", "Rename"),
    ("menu-duplicate", "Duplicate"),
    ("menu-archive", "Archive"),
];

fn dropdown(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Project Apollo");
    p.button(
        "btn-options",
        CLICK_BUTTON,
        "Options",
        if loc.flag("menu") { "open" } else { "closed" },
    );
    if loc.flag("menu") {
        p.open("ul", r#"role="menu""#);
        for (id, label) in MENU_ITEMS {
            p.button(id, CLICK_DROPDOWN_MENU, label, "");
        }
        p.close("ul");
    }
    if let Some(done) = loc.get("done") {
        p.text("p", &format!("Last action: {done}"));
    }
    p
}

fn dropdown_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    if el.element_id == "btn-options" {
        return Transition::stay(toggle(loc, "menu")).log_label(el);
    }
    if MENU_ITEMS.iter().any(|(id, _)| *id == el.element_id) {
        let next = loc.clone().without("menu").with("done", el.label.as_str());
        return Transition::stay(next).log_label(el);
    }
    stay(loc)
}

// click/iconbutton

fn icons(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Dashboard");
    p.icon_button("icon-search", CLICK_ICON_BUTTON, "Search", "\u{1F50D}");
    p.icon_button("icon-settings", CLICK_ICON_BUTTON, "Settings", "\u{2699}");
    p.icon_button("icon-delete", CLICK_ICON_BUTTON, "Delete", "\u{1F5D1}");
    if let Some(open) = loc.get("open") {
        p.text("p", &format!("{open} panel"));
    }
    p
}

fn icons_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    Transition::stay(loc.clone().with("open", el.label.as_str())).log_label(el)
}

// click/link

const LINKS: [(&str, &str, &str); 3] = [
    ("home", "Home", "Welcome to Northwind."),
    ("about", "About us", "Northwind has made outdoor gear since 1998."),
    ("contact", "Contact", "Write to hello@northwind.example."),
];

fn links(loc: &Location) -> PageBuilder {
    let current = loc.get("page").unwrap_or("home");
    let (_, title, body) = LINKS.iter().find(|l| l.0 == current).unwrap_or(&LINKS[0]);
    let mut p = PageBuilder::new(title);
    p.text("p", body);
    for (slug, label, _) in LINKS {
        p.open("div", &format!(r#"id="card-{slug}" class="card""#));
        let href = loc.clone().with("page", slug).to_string();
        p.link(&format!("link-{slug}"), CLICK_LINK, label, &href);
        p.close("div");
    }
    p
}

fn links_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    match LINKS.iter().find(|l| format!("link-{}", l.0) == el.element_id) {
        Some((slug, ..)) => Transition::go(loc.clone().with("page", *slug)).log_label(el),
        None => stay(loc),
    }
}

// click/slider

struct SliderSpec {
    key: &'static str,
    id: &'static str,
    label: &'static str,
    initial: i64,
}

const VOLUME: SliderSpec = SliderSpec {
    key: "volume",
    id: "slider-volume",
    label: "Volume",
    initial: 50,
};
const BRIGHTNESS: SliderSpec = SliderSpec {
    key: "brightness",
    id: "slider-brightness",
    label: "Brightness",
    initial: 70,
};

fn slider_value(loc: &Location, spec: &SliderSpec) -> i64 {
    loc.get(spec.key).and_then(|v| v.parse().ok()).unwrap_or(spec.initial)
}

fn slider(loc: &Location, spec: &SliderSpec) -> PageBuilder {
    let mut p = PageBuilder::new("Display and sound");
    p.slider(spec.id, CLICK_SLIDER, spec.label, (0, 100), slider_value(loc, spec));
    p
}

fn slider_act(loc: &Location, el: &ElementManifest, op: &Op, spec: &SliderSpec) -> Transition {
    match op {
        Op::Drag(v) if el.element_id == spec.id => {
            let v = (*v).clamp(0, 100);
            Transition::stay(loc.clone().with(spec.key, v.to_string())).log(el, format!("{}={v}", spec.key))
        }
        _ => stay(loc),
    }
}

// click/snackbar

fn snackbar(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Draft");
    p.text("p", "Dear team, the quarterly numbers are in.");
    p.button("btn-save", CLICK_BUTTON, "Save draft", "");
    if let Some(status) = loc.get("status") {
        p.text("p", status);
    }
    if loc.flag("snackbar") {
        p.open("div", r#"role="status""#);
        p.text("span", "Draft saved");
        p.button("snack-undo", CLICK_SNACKBAR, "Undo", "");
        p.button("snack-dismiss", CLICK_SNACKBAR, "Dismiss", "");
        p.close("div");
    }
    p
}

fn snackbar_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    let next = match el.element_id.as_str() {
        "btn-save" => loc.clone().with("snackbar", "1").with("status", "Saved"),
        "snack-undo" => loc.clone().without("snackbar").with("status", "Save undone"),
        "snack-dismiss" => loc.clone().without("snackbar"),
        _ => return stay(loc),
    };
    Transition::stay(next).log_label(el)
}

// click/switch

fn switch(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Notifications");
    p.switch("switch-dnd", CLICK_SWITCH, "Do not disturb", loc.flag("dnd"));
    p
}

fn switch_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    if el.element_id != "switch-dnd" {
        return stay(loc);
    }
    let on = !loc.flag("dnd");
    Transition::stay(forms::set_flag(loc, "dnd", on)).log(el, format!("{}={}", el.label, if on { "on" } else { "off" }))
}

// type/* and single-field select/*

const TYPE_DATE_FIELD: Field = Field::text("birth", "input-birth-date", "Birth date", TYPE_DATE);
const TYPE_PHONE_FIELD: Field = Field::text("phone", "input-phone", "Phone number", TYPE_PHONE);
const TYPE_TEXT_FIELD: Field = Field::text("name", "input-name", "Name", TYPE_TEXT);
const TERMS_FIELD: Field = Field::check("agree", "chk-terms", "I agree to the terms", SELECT_CHECKBOX);
pub(crate) const COUNTRIES: &[&str] = &["United States", "Canada", "Mexico"];
const COUNTRY_FIELD: Field = Field::choice("country", "sel-country", "Country", COUNTRIES, SELECT_SELECT);

fn single(loc: &Location, title: &str, field: &Field) -> PageBuilder {
    let mut p = PageBuilder::new(title);
    field.render(&mut p, loc);
    p
}

fn single_act(loc: &Location, el: &ElementManifest, op: &Op, field: &Field) -> Transition {
    field.act(loc, el, op).unwrap_or_else(|| stay(loc))
}

// select/datagridrow

const ORDER_ROWS: [(Field, &str, &str); 3] = [
    (
        Field::check("r1041", "row-1041", "Order #1041", SELECT_DATAGRID_ROW),
        "Ana Lima",
        "$120.00",
    ),
    (
        Field::check("r1042", "row-1042", "Order #1042", SELECT_DATAGRID_ROW),
        "Ben Okafor",
        "$75.50",
    ),
    (
        Field::check("r1043", "row-1043", "Order #1043", SELECT_DATAGRID_ROW),
        "Chen Wei",
        "$310.00",
    ),
];

fn datagrid_rows(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Recent orders");
    p.open("table", "");
    p.markup("<tr><th></th><th>Order</th><th>Customer</th><th>Total</th></tr>");
    for (field, customer, total) in &ORDER_ROWS {
        p.open("tr", "");
        p.open("td", "");
        field.render(&mut p, loc);
        p.close("td");
        p.text("td", field.label);
        p.text("td", customer);
        p.text("td", total);
        p.close("tr");
    }
    p.close("table");
    p
}

fn datagrid_rows_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    ORDER_ROWS
        .iter()
        .find_map(|(f, ..)| f.act(loc, el, op))
        .unwrap_or_else(|| stay(loc))
}

// select/multicheck

const CHANNELS: [Field; 3] = [
    Field::check("email", "chk-email", "Email", SELECT_MULTICHECK),
    Field::check("sms", "chk-sms", "SMS", SELECT_MULTICHECK),
    Field::check("push", "chk-push", "Push", SELECT_MULTICHECK),
];

fn multicheck(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Notification channels");
    forms::render_all(&mut p, loc, &CHANNELS);
    p
}

fn multicheck_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    forms::act_any(&CHANNELS, loc, el, op).unwrap_or_else(|| stay(loc))
}

// navigatemenu/*

const BASIC_ITEMS: [(&str, &str); 3] = [("home", "Home"), ("profile", "Profile"), ("settings", "Settings")];
const TOP_ITEMS: [(&str, &str); 2] = [("home", "Home"), ("help", "Help")];
const ACCOUNT_ITEMS: [(&str, &str); 3] = [("profile", "Profile"), ("privacy", "Privacy"), ("billing", "Billing")];

fn page_heading(loc: &Location, items: &[(&str, &str)]) -> String {
    let current = loc.get("page").unwrap_or("home");
    items
        .iter()
        .find(|(slug, _)| *slug == current)
        .map(|(_, label)| label.to_string())
        .unwrap_or_else(|| "Home".to_string())
}

fn basic_menu(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new(&page_heading(loc, &BASIC_ITEMS));
    let open = loc.flag("menu");
    p.button("btn-menu", MENU_BASIC, "Menu", if open { "open" } else { "closed" });
    if open {
        p.open("ul", r#"role="menu""#);
        for (slug, label) in BASIC_ITEMS {
            p.button(&format!("menu-{slug}"), MENU_BASIC, label, "");
        }
        p.close("ul");
    }
    p
}

fn basic_menu_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    if el.element_id == "btn-menu" {
        return Transition::stay(toggle(loc, "menu")).log_label(el);
    }
    match BASIC_ITEMS
        .iter()
        .find(|(slug, _)| format!("menu-{slug}") == el.element_id)
    {
        Some((slug, _)) => Transition::go(loc.clone().without("menu").with("page", *slug)).log_label(el),
        None => stay(loc),
    }
}

fn nested_menu(loc: &Location) -> PageBuilder {
    let all: Vec<_> = TOP_ITEMS.iter().chain(ACCOUNT_ITEMS.iter()).copied().collect();
    let mut p = PageBuilder::new(&page_heading(loc, &all));
    let open = loc.flag("menu");
    p.button("btn-menu", MENU_NESTED, "Menu", if open { "open" } else { "closed" });
    if open {
        let sub = loc.flag("sub");
        p.open("ul", r#"role="menu""#);
        p.button("menu-home", MENU_NESTED, "Home", "");
        p.button(
            "menu-account",
            MENU_NESTED,
            "Account",
            if sub { "open" } else { "closed" },
        );
        if sub {
            p.open("ul", r#"role="menu""#);
            for (slug, label) in ACCOUNT_ITEMS {
                p.button(&format!("menu-account-{slug}"), MENU_NESTED, label, "");
            }
            p.close("ul");
        }
        p.button("menu-help", MENU_NESTED, "Help", "");
        p.close("ul");
    }
    p
}

fn nested_menu_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    let closed = || loc.clone().without("menu").without("sub");
    match el.element_id.as_str() {
        "btn-menu" => {
            let next = if loc.flag("menu") {
                closed()
            } else {
                loc.clone().with("menu", "1")
            };
            Transition::stay(next).log_label(el)
        }
        "menu-account" => Transition::stay(toggle(loc, "sub")).log_label(el),
        "menu-home" => Transition::go(closed().with("page", "home")).log_label(el),
        "menu-help" => Transition::go(closed().with("page", "help")).log_label(el),
        id => match ACCOUNT_ITEMS
            .iter()
            .find(|(slug, _)| format!("menu-account-{slug}") == id)
        {
            Some((slug, label)) => Transition::go(closed().with("page", *slug)).log(el, format!("Account > {label}")),
            None => stay(loc),
        },
    }
}

// find/*

const ANSWER: Field = Field::text("answer", "input-answer", "Answer", TYPE_TEXT);

fn answer_form(p: &mut PageBuilder, loc: &Location) {
    if loc.flag("submitted") {
        p.text("p", "Answer received.");
    }
    ANSWER.render(p, loc);
    p.button("btn-answer", CLICK_BUTTON, "Submit", "");
}

/// Handles the answer field and its submit button.
fn answer_act(loc: &Location, el: &ElementManifest, op: &Op, target: InteractionRef) -> Option<Transition> {
    if let Some(t) = ANSWER.act(loc, el, op) {
        return Some(t);
    }
    if el.element_id != "btn-answer" {
        return None;
    }
    let answer = ANSWER.value(loc);
    if answer.trim().is_empty() {
        return Some(stay(loc).log_label(el));
    }
    let submitted = forms::values(&[ANSWER], loc);
    Some(
        Transition::stay(loc.clone().with("submitted", "1"))
            .log_label(el)
            .composite(target, answer.trim())
            .submit(submitted),
    )
}

const POLICIES: [(&str, &str, &str, &str); 2] = [
    (
        "returns",
        "acc-returns",
        "Returns",
        "Items can be returned within 30 days of delivery.",
    ),
    (
        "warranty",
        "acc-warranty",
        "Warranty",
        "Repairs are handled by the manufacturer.",
    ),
];

fn find_accordion(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Store policies");
    for (key, id, label, body) in POLICIES {
        let open = loc.flag(key);
        p.button(id, CLICK_ACCORDION, label, if open { "expanded" } else { "collapsed" });
        if open {
            p.text("p", body);
        }
    }
    answer_form(&mut p, loc);
    p
}

fn find_accordion_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    if let Some((key, ..)) = POLICIES.iter().find(|s| s.1 == el.element_id) {
        return Transition::stay(toggle(loc, key)).log_label(el);
    }
    answer_act(loc, el, op, FIND_ACCORDION).unwrap_or_else(|| stay(loc))
}

fn find_dialog(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Espresso machine");
    p.text("p", "A compact machine for two cups at once.");
    p.button("btn-warranty", CLICK_BUTTON, "View warranty", "");
    if loc.flag("dialog") {
        p.open("div", r#"role="dialog""#);
        p.text("p", "Warranty period: 2 years");
        p.button("dialog-close", CLICK_DIALOG_BUTTON, "Close", "");
        p.close("div");
    }
    answer_form(&mut p, loc);
    p
}

fn find_dialog_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    match el.element_id.as_str() {
        "btn-warranty" => Transition::stay(loc.clone().with("dialog", "1")).log_label(el),
        "dialog-close" => Transition::stay(loc.clone().without("dialog")).log_label(el),
        _ => answer_act(loc, el, op, FIND_DIALOG_BUTTON).unwrap_or_else(|| stay(loc)),
    }
}

fn find_paragraphs(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Our story");
    p.text("p", "Northwind started as a two-person workshop making canvas bags.");
    p.text(
        "p",
        "The company was founded in 1998 by two climbing partners in Vermont.",
    );
    p.text("p", "Today the team ships to over forty countries.");
    answer_form(&mut p, loc);
    p
}

fn find_paragraphs_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    answer_act(loc, el, op, FIND_PARAGRAPHS).unwrap_or_else(|| stay(loc))
}

fn find_tooltip(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Plans");
    p.text("p", "Basic plan: $4 per month.");
    let shown = loc.flag("tip");
    p.hover_target(
        "tip-storage",
        CLICK_ICON_BUTTON,
        "Storage info",
        if shown { "shown" } else { "hidden" },
    );
    if shown {
        p.open("div", r#"role="tooltip""#);
        p.text("span", "Includes 50 GB of cloud storage");
        p.close("div");
    }
    answer_form(&mut p, loc);
    p
}

fn find_tooltip_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    if el.element_id == "tip-storage" {
        // hovering reveals content without logging
        return match op {
            Op::Hover => Transition::stay(loc.clone().with("tip", "1")),
            _ => stay(loc),
        };
    }
    answer_act(loc, el, op, FIND_TOOLTIP).unwrap_or_else(|| stay(loc))
}

// filter/filterdatagrid

pub(crate) const SUPPLIERS: [(&str, &str); 6] = [
    ("Acme Corp", "USA"),
    ("USA Outfitters", "Canada"),
    ("Maple Goods", "Canada"),
    ("Liberty Supply", "USA"),
    ("Pampas Trading", "Argentina"),
    ("Northwind Traders", "USA"),
];

const FILTER_FIELDS: [Field; 2] = [
    Field::choice("col", "filter-column", "Column", &["Name", "Country"], SELECT_SELECT),
    Field::text("q", "filter-value", "Value", TYPE_TEXT),
];

fn filter_state(loc: &Location) -> (String, String) {
    (FILTER_FIELDS[0].value(loc), FILTER_FIELDS[1].value(loc))
}

fn filter_grid(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Suppliers");
    forms::render_all(&mut p, loc, &FILTER_FIELDS);
    let (col, value) = filter_state(loc);
    let needle = value.trim().to_lowercase();
    p.open("table", "");
    p.markup("<tr><th>Name</th><th>Country</th></tr>");
    for (name, country) in SUPPLIERS {
        let cell = if col == "Country" { country } else { name };
        if cell.to_lowercase().contains(&needle) {
            p.open("tr", "");
            p.text("td", name);
            p.text("td", country);
            p.close("tr");
        }
    }
    p.close("table");
    p
}

fn filter_grid_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    let Some(t) = forms::act_any(&FILTER_FIELDS, loc, el, op) else {
        return stay(loc);
    };
    let before = filter_state(loc);
    let after = filter_state(&t.next);
    if before == after || after.1.trim().is_empty() {
        return t;
    }
    t.composite(FILTER_DATAGRID, format!("{} contains {}", after.0, after.1.trim()))
}

// filter/sortdatagrid

const SALES: [(&str, &str, u32); 4] = [
    ("#2001", "Ana Lima", 120),
    ("#2002", "Ben Okafor", 75),
    ("#2003", "Chen Wei", 310),
    ("#2004", "Dee Park", 45),
];

fn sort_state(loc: &Location) -> &str {
    match loc.get("sort") {
        Some(s @ ("ascending" | "descending")) => s,
        _ => "none",
    }
}

fn sort_grid(loc: &Location) -> PageBuilder {
    let mut p = PageBuilder::new("Sales");
    let sort = sort_state(loc);
    let mut rows = SALES.to_vec();
    match sort {
        "ascending" => rows.sort_by_key(|r| r.2),
        "descending" => rows.sort_by_key(|r| std::cmp::Reverse(r.2)),
        _ => {}
    }
    p.open("table", "");
    p.markup("<tr><th>Order</th><th>Customer</th>");
    p.open("th", "");
    p.button("sort-total", CLICK_BUTTON, "Sort by Total", sort);
    p.close("th");
    p.markup("</tr>");
    for (order, customer, total) in rows {
        p.open("tr", "");
        p.text("td", order);
        p.text("td", customer);
        p.text("td", &format!("${total}.00"));
        p.close("tr");
    }
    p.close("table");
    p
}

fn sort_grid_act(loc: &Location, el: &ElementManifest, _op: &Op) -> Transition {
    if el.element_id != "sort-total" {
        return stay(loc);
    }
    let next = if sort_state(loc) == "ascending" {
        "descending"
    } else {
        "ascending"
    };
    Transition::stay(loc.clone().with("sort", next))
        .log_label(el)
        .composite(SORT_DATAGRID, format!("Total {next}"))
}

// fill/*

const BASIC_FIELDS: [Field; 2] = [
    Field::text("name", "field-name", "Name", TYPE_TEXT),
    Field::text("email", "field-email", "Email", TYPE_TEXT),
];

const COMPLEX_FIELDS: [Field; 5] = [
    Field::text("name", "field-name", "Name", TYPE_TEXT),
    Field::text("phone", "field-phone", "Phone", TYPE_PHONE),
    Field::text("birth", "field-birth-date", "Birth date", TYPE_DATE),
    Field::choice("country", "field-country", "Country", COUNTRIES, SELECT_SELECT),
    Field::check("news", "field-newsletter", "Subscribe to newsletter", SELECT_CHECKBOX),
];

fn form(loc: &Location, title: &str, fields: &[Field]) -> PageBuilder {
    let mut p = PageBuilder::new(title);
    if loc.flag("submitted") {
        p.text("p", "Thanks, your details were saved.");
    } else if loc.flag("error") {
        p.text("p", "Please complete all fields.");
    }
    p.open("form", "");
    forms::render_all(&mut p, loc, fields);
    p.button("btn-submit", CLICK_BUTTON, "Submit", "");
    p.close("form");
    p
}

fn form_act(loc: &Location, el: &ElementManifest, op: &Op, fields: &[Field], target: InteractionRef) -> Transition {
    if let Some(t) = forms::act_any(fields, loc, el, op) {
        return t;
    }
    if el.element_id != "btn-submit" {
        return stay(loc);
    }
    if !forms::complete(fields, loc) {
        return Transition::stay(loc.clone().with("error", "1")).log_label(el);
    }
    Transition::stay(loc.clone().without("error").with("submitted", "1"))
        .log_label(el)
        .composite(target, forms::summary(fields, loc))
        .submit(forms::values(fields, loc))
}

fn basic_form(loc: &Location) -> PageBuilder {
    form(loc, "Newsletter sign-up", &BASIC_FIELDS)
}

fn basic_form_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    form_act(loc, el, op, &BASIC_FIELDS, FILL_BASIC_FORM)
}

fn complex_form(loc: &Location) -> PageBuilder {
    form(loc, "Member registration", &COMPLEX_FIELDS)
}

fn complex_form_act(loc: &Location, el: &ElementManifest, op: &Op) -> Transition {
    form_act(loc, el, op, &COMPLEX_FIELDS, FILL_COMPLEX_FORM)
}
