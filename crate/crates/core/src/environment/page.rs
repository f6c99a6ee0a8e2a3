use serde::{Deserialize, Serialize};

use crate::taxonomy::InteractionRef;

/// How an element is operated; decides which verbs it accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Control {
    Button,
    Link,
    TextInput,
    Select,
    Slider,
    Checkbox,
    Switch,
    HoverTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementManifest {
    pub element_id: String,
    pub kind: InteractionRef,
    pub label: String,
    pub state: String,
    pub control: Control,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<String>,
}

/// Server-rendered observation of one page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDoc {
    pub path: String,
    pub title: String,
    pub body_html: String,
    pub elements: Vec<ElementManifest>,
}

impl PageDoc {
    pub fn element(&self, id: &str) -> Option<&ElementManifest> {
        self.elements.iter().find(|e| e.element_id == id)
    }

    pub fn element_state(&self, id: &str) -> Option<&str> {
        self.element(id).map(|e| e.state.as_str())
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Builds body HTML and the element manifest together so the two cannot
/// drift apart: every interactive element is written exactly once with a
/// `data-eid` attribute.
pub(crate) struct PageBuilder {
    title: String,
    html: String,
    elements: Vec<ElementManifest>,
}

impl PageBuilder {
    pub fn new(title: &str) -> Self {
        let mut html = String::new();
        html.push_str(&format!("<h1>{}</h1>\n", escape(title)));
        PageBuilder {
            title: title.to_string(),
            html,
            elements: Vec::new(),
        }
    }

    /// Trusted static markup.
    pub fn markup(&mut self, html: &str) -> &mut Self {
        self.html.push_str(html);
        self.html.push('\n');
        self
    }

    pub fn text(&mut self, tag: &str, text: &str) -> &mut Self {
        self.html.push_str(&format!("<{tag}>{}</{tag}>\n", escape(text)));
        self
    }

    pub fn open(&mut self, tag: &str, attrs: &str) -> &mut Self {
        if attrs.is_empty() {
            self.html.push_str(&format!("<{tag}>\n"));
        } else {
            self.html.push_str(&format!("<{tag} {attrs}>\n"));
        }
        self
    }

    pub fn close(&mut self, tag: &str) -> &mut Self {
        self.html.push_str(&format!("</{tag}>\n"));
        self
    }

    fn push(
        &mut self,
        id: &str,
        kind: InteractionRef,
        label: &str,
        state: &str,
        control: Control,
        options: Vec<String>,
        html: String,
    ) -> &mut Self {
        debug_assert!(self.elements.iter().all(|e| e.element_id != id));
        self.html.push_str(&html);
        self.html.push('\n');
        self.elements.push(ElementManifest {
            element_id: id.to_string(),
            kind,
            label: label.to_string(),
            state: state.to_string(),
            control,
            options,
        });
        self
    }

    pub fn button(&mut self, id: &str, kind: InteractionRef, label: &str, state: &str) -> &mut Self {
        let html = format!(
            r#"<button data-eid="{}" type="button">{}</button>"#,
            escape(id),
            escape(label)
        );
        self.push(id, kind, label, state, Control::Button, vec![], html)
    }

    /// Icon-only button; the label is carried by `aria-label`.
    pub fn icon_button(&mut self, id: &str, kind: InteractionRef, label: &str, glyph: &str) -> &mut Self {
        let html = format!(
            r#"<button data-eid="{}" type="button" aria-label="{}">{}</button>"#,
            escape(id),
            escape(label),
            escape(glyph)
        );
        self.push(id, kind, label, "", Control::Button, vec![], html)
    }

    pub fn link(&mut self, id: &str, kind: InteractionRef, label: &str, href: &str) -> &mut Self {
        let html = format!(
            r#"<a data-eid="{}" href="{}">{}</a>"#,
            escape(id),
            escape(href),
            escape(label)
        );
        self.push(id, kind, label, "", Control::Link, vec![], html)
    }

    pub fn text_input(&mut self, id: &str, kind: InteractionRef, label: &str, value: &str) -> &mut Self {
        let html = format!(
            r#"<label>{} <input data-eid="{}" type="text" aria-label="{}" value="{}"></label>"#,
            escape(label),
            escape(id),
            escape(label),
            escape(value)
        );
        self.push(id, kind, label, value, Control::TextInput, vec![], html)
    }

    pub fn select(
        &mut self,
        id: &str,
        kind: InteractionRef,
        label: &str,
        options: &[&str],
        selected: &str,
    ) -> &mut Self {
        let mut html = format!(
            r#"<label>{} <select data-eid="{}" aria-label="{}">"#,
            escape(label),
            escape(id),
            escape(label)
        );
        for o in options {
            let sel = if *o == selected { " selected" } else { "" };
            html.push_str(&format!("<option{sel}>{}</option>", escape(o)));
        }
        html.push_str("</select></label>");
        let options = options.iter().map(|o| o.to_string()).collect();
        self.push(id, kind, label, selected, Control::Select, options, html)
    }

    pub fn slider(&mut self, id: &str, kind: InteractionRef, label: &str, range: (i64, i64), value: i64) -> &mut Self {
        let html = format!(
            r#"<label>{} <input data-eid="{}" type="range" aria-label="{}" min="{}" max="{}" value="{}"></label>"#,
            escape(label),
            escape(id),
            escape(label),
            range.0,
            range.1,
            value
        );
        let v = value.to_string();
        self.push(id, kind, label, &v, Control::Slider, vec![], html)
    }

    pub fn checkbox(&mut self, id: &str, kind: InteractionRef, label: &str, checked: bool) -> &mut Self {
        let html = format!(
            r#"<label><input data-eid="{}" type="checkbox" aria-label="{}"{}> {}</label>"#,
            escape(id),
            escape(label),
            if checked { " checked" } else { "" },
            escape(label)
        );
        let state = if checked { "checked" } else { "unchecked" };
        self.push(id, kind, label, state, Control::Checkbox, vec![], html)
    }

    pub fn switch(&mut self, id: &str, kind: InteractionRef, label: &str, on: bool) -> &mut Self {
        let html = format!(
            r#"<label><input data-eid="{}" type="checkbox" role="switch" aria-label="{}"{}> {}</label>"#,
            escape(id),
            escape(label),
            if on { " checked" } else { "" },
            escape(label)
        );
        let state = if on { "on" } else { "off" };
        self.push(id, kind, label, state, Control::Switch, vec![], html)
    }

    pub fn hover_target(&mut self, id: &str, kind: InteractionRef, label: &str, state: &str) -> &mut Self {
        let html = format!(
            r#"<span data-eid="{}" role="img" aria-label="{}">&#9432;</span>"#,
            escape(id),
            escape(label)
        );
        self.push(id, kind, label, state, Control::HoverTarget, vec![], html)
    }

    pub fn finish(self, path: String) -> PageDoc {
        PageDoc {
            path,
            title: self.title,
            body_html: self.html,
            elements: self.elements,
        }
    }
}
