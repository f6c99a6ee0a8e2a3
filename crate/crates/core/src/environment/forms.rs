//! Shared form-field machinery: each field keeps its value in one query
//! parameter, renders as one manifest element, and logs `Label=value`.

use super::page::PageBuilder;
use super::{ElementManifest, FieldMap, Location, Op, Transition};
use crate::taxonomy::InteractionRef;

#[derive(Debug, Clone, Copy)]
pub(crate) enum FieldKind {
    Text,
    /// First option is the default.
    Choice(&'static [&'static str]),
    Check,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Field {
    pub key: &'static str,
    pub id: &'static str,
    pub label: &'static str,
    pub kind: FieldKind,
    pub target: InteractionRef,
}

impl Field {
    pub const fn text(key: &'static str, id: &'static str, label: &'static str, target: InteractionRef) -> Self {
        Field {
            key,
            id,
            label,
            kind: FieldKind::Text,
            target,
        }
    }

    pub const fn choice(
        key: &'static str,
        id: &'static str,
        label: &'static str,
        options: &'static [&'static str],
        target: InteractionRef,
    ) -> Self {
        Field {
            key,
            id,
            label,
            kind: FieldKind::Choice(options),
            target,
        }
    }

    pub const fn check(key: &'static str, id: &'static str, label: &'static str, target: InteractionRef) -> Self {
        Field {
            key,
            id,
            label,
            kind: FieldKind::Check,
            target,
        }
    }

    pub fn value(&self, loc: &Location) -> String {
        match self.kind {
            FieldKind::Text => loc.get(self.key).unwrap_or_default().to_string(),
            FieldKind::Choice(options) => loc
                .get(self.key)
                .filter(|v| options.contains(v))
                .unwrap_or(options[0])
                .to_string(),
            FieldKind::Check => check_state(loc.flag(self.key)).to_string(),
        }
    }

    pub fn render(&self, p: &mut PageBuilder, loc: &Location) {
        match self.kind {
            FieldKind::Text => p.text_input(self.id, self.target, self.label, &self.value(loc)),
            FieldKind::Choice(options) => p.select(self.id, self.target, self.label, options, &self.value(loc)),
            FieldKind::Check => p.checkbox(self.id, self.target, self.label, loc.flag(self.key)),
        };
    }

    /// Applies `op` when `el` is this field's element.
    pub fn act(&self, loc: &Location, el: &ElementManifest, op: &Op) -> Option<Transition> {
        if el.element_id != self.id {
            return None;
        }
        let (next, value) = match (self.kind, op) {
            (FieldKind::Text, Op::Type(v)) => {
                let next = if v.is_empty() {
                    loc.clone().without(self.key)
                } else {
                    loc.clone().with(self.key, v.as_str())
                };
                (next, v.clone())
            }
            (FieldKind::Choice(_), Op::Select(v)) => (loc.clone().with(self.key, v.as_str()), v.clone()),
            (FieldKind::Check, Op::Click) => {
                let on = !loc.flag(self.key);
                (set_flag(loc, self.key, on), check_state(on).to_string())
            }
            _ => return Some(Transition::stay(loc.clone())),
        };
        Some(Transition::stay(next).log(el, format!("{}={}", self.label, value)))
    }
}

pub(crate) fn check_state(on: bool) -> &'static str {
    if on {
        "checked"
    } else {
        "unchecked"
    }
}

pub(crate) fn set_flag(loc: &Location, key: &str, on: bool) -> Location {
    if on {
        loc.clone().with(key, "1")
    } else {
        loc.clone().without(key)
    }
}

pub(crate) fn render_all(p: &mut PageBuilder, loc: &Location, fields: &[Field]) {
    for f in fields {
        f.render(p, loc);
    }
}

pub(crate) fn act_any(fields: &[Field], loc: &Location, el: &ElementManifest, op: &Op) -> Option<Transition> {
    fields.iter().find_map(|f| f.act(loc, el, op))
}

pub(crate) fn values(fields: &[Field], loc: &Location) -> FieldMap {
    fields.iter().map(|f| (f.label.to_string(), f.value(loc))).collect()
}

/// Every text field has a non-blank value.
pub(crate) fn complete(fields: &[Field], loc: &Location) -> bool {
    fields
        .iter()
        .filter(|f| matches!(f.kind, FieldKind::Text))
        .all(|f| !f.value(loc).trim().is_empty())
}

/// `Label=value; Label=value` in field order.
pub(crate) fn summary(fields: &[Field], loc: &Location) -> String {
    fields
        .iter()
        .map(|f| format!("{}={}", f.label, f.value(loc)))
        .collect::<Vec<_>>()
        .join("; ")
}
