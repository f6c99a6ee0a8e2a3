//! Shopping playground: home, search results, item, checkout, and the two
//! terminal pages. Every page after search carries its prior state in the
//! query string.

use super::catalog::{decode_cart, decode_shipping, encode_cart, encode_shipping, find_item, search_catalog};
use super::forms::{self, Field};
use super::page::PageBuilder;
use super::{CartState, CatalogItem, ElementManifest, EnvError, Location, Op, Page, ShippingAddress, Transition};
use crate::taxonomy::refs::*;

pub(super) fn page(path: &str, final_path: &str) -> Option<Box<dyn Page>> {
    let cart_is_final = final_path == "/cart";
    let page: Box<dyn Page> = match path {
        "/" => Box::new(Home),
        "/search" => Box::new(Results),
        "/item" => Box::new(Item { cart_is_final }),
        "/checkout" if !cart_is_final => Box::new(Checkout),
        "/thanks" if !cart_is_final => Box::new(Thanks),
        "/cart" if cart_is_final => Box::new(Cart),
        _ => return None,
    };
    Some(page)
}

fn price(cents: u64) -> String {
    format!("${}.{:02}", cents / 100, cents % 100)
}

fn item_param(loc: &Location) -> Result<&'static CatalogItem, EnvError> {
    loc.get("id")
        .and_then(find_item)
        .ok_or_else(|| EnvError::NotFound(loc.to_string()))
}

fn cart_param(loc: &Location) -> Result<CartState, EnvError> {
    decode_cart(&super::encode_component(
        loc.get("cart").ok_or(EnvError::MalformedCart)?,
    ))
}

fn cart_summary(p: &mut PageBuilder, cart: &CartState) {
    let item = cart.item().expect("decoded carts name catalog items");
    p.text("h2", &item.name);
    p.open("ul", "");
    for (group, option) in &cart.options {
        p.text("li", &format!("{group}: {option}"));
    }
    p.close("ul");
    p.text("p", &format!("Total: {}", price(item.price(cart))));
}

struct Home;

const SEARCH_FIELD: Field = Field::text("q", "search-input", "Search", TYPE_TEXT);

impl Page for Home {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        let mut p = PageBuilder::new("Laptop Shop");
        p.open("form", r#"role="search""#);
        SEARCH_FIELD.render(&mut p, loc);
        p.icon_button("search-button", CLICK_ICON_BUTTON, "Search", "\u{1F50D}");
        p.close("form");
        p.text("p", "Free shipping on every laptop.");
        Ok(p)
    }

    fn act(&self, loc: &Location, el: &ElementManifest, op: &Op) -> Result<Transition, EnvError> {
        if let Some(t) = SEARCH_FIELD.act(loc, el, op) {
            return Ok(t);
        }
        if el.element_id != "search-button" {
            return Ok(Transition::stay(loc.clone()));
        }
        let query = SEARCH_FIELD.value(loc);
        if query.trim().is_empty() {
            return Ok(Transition::stay(loc.clone()).log_label(el));
        }
        let next = Location::new("/search").with("query", query.trim());
        Ok(Transition::go(next).log_label(el))
    }
}

struct Results;

impl Page for Results {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        let query = loc.get("query").ok_or_else(|| EnvError::NotFound(loc.to_string()))?;
        let mut p = PageBuilder::new(&format!("Results for \"{query}\""));
        let hits = search_catalog(query);
        if hits.is_empty() {
            p.text("p", "No results.");
        }
        for item in hits {
            p.open("div", &format!(r#"id="card-{}" class="card""#, item.id));
            let href = Location::new("/item").with("id", item.id.as_str()).to_string();
            p.link(&format!("result-{}", item.id), CLICK_LINK, &item.name, &href);
            p.text("p", &format!("{} chip, from {}", item.chip, price(item.base_price)));
            p.close("div");
        }
        Ok(p)
    }

    fn act(&self, loc: &Location, el: &ElementManifest, _op: &Op) -> Result<Transition, EnvError> {
        match el.element_id.strip_prefix("result-").and_then(find_item) {
            Some(item) => Ok(Transition::go(Location::new("/item").with("id", item.id.as_str())).log_label(el)),
            None => Ok(Transition::stay(loc.clone())),
        }
    }
}

struct Item {
    cart_is_final: bool,
}

fn option_id(group: &str, option: &str) -> String {
    format!("opt-{}-{}", group.to_ascii_lowercase(), option.to_ascii_lowercase())
}

/// Explicitly chosen options only; defaults are filled in by the cart.
fn chosen(loc: &Location, item: &CatalogItem) -> Vec<Option<String>> {
    item.customization_groups
        .iter()
        .map(|g| {
            loc.get(&g.key())
                .filter(|v| g.options.iter().any(|o| o == v))
                .map(str::to_string)
        })
        .collect()
}

fn cart_for(loc: &Location, item: &CatalogItem) -> CartState {
    let mut cart = CartState::with_defaults(item);
    for (g, choice) in item.customization_groups.iter().zip(chosen(loc, item)) {
        if let Some(v) = choice {
            cart.options.insert(g.name.clone(), v);
        }
    }
    cart
}

impl Page for Item {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        let item = item_param(loc)?;
        let cart = cart_for(loc, item);
        let mut p = PageBuilder::new(&item.name);
        p.text("p", &format!("{} chip", item.chip));
        for g in &item.customization_groups {
            p.open("fieldset", "");
            p.text("legend", &g.name);
            for o in &g.options {
                let state = if cart.options.get(&g.name) == Some(o) {
                    "selected"
                } else {
                    ""
                };
                p.button(&option_id(&g.name, o), CLICK_BUTTON, o, state);
            }
            p.close("fieldset");
        }
        p.text("p", &format!("Price: {}", price(item.price(&cart))));
        p.button("add-to-cart", CLICK_BUTTON, "Add to cart", "");
        Ok(p)
    }

    fn act(&self, loc: &Location, el: &ElementManifest, _op: &Op) -> Result<Transition, EnvError> {
        let item = item_param(loc)?;
        if el.element_id == "add-to-cart" {
            let cart = cart_for(loc, item);
            let path = if self.cart_is_final { "/cart" } else { "/checkout" };
            let next = Location::new(path).with("cart", super::cart_json(&cart));
            debug_assert_eq!(next.get("cart").map(super::encode_component), Some(encode_cart(&cart)));
            return Ok(Transition::go(next).log_label(el));
        }
        for g in &item.customization_groups {
            let Some(option) = g.options.iter().find(|o| option_id(&g.name, o) == el.element_id) else {
                continue;
            };
            let before = chosen(loc, item);
            let next = loc.clone().with(&g.key(), option.as_str());
            let after = chosen(&next, item);
            let mut t = Transition::stay(next).log(el, format!("{}={option}", g.name));
            if before != after && after.iter().all(Option::is_some) {
                let summary = item
                    .customization_groups
                    .iter()
                    .zip(&after)
                    .map(|(g, v)| format!("{}={}", g.name, v.as_deref().unwrap_or_default()))
                    .collect::<Vec<_>>()
                    .join("; ");
                t = t.composite(FILL_BASIC_FORM, summary);
            }
            return Ok(t);
        }
        Ok(Transition::stay(loc.clone()))
    }
}

struct Checkout;

const SHIPPING_FIELDS: [Field; 5] = [
    Field::text("name", "ship-name", "Name", TYPE_TEXT),
    Field::text("street", "ship-street", "Street", TYPE_TEXT),
    Field::text("city", "ship-city", "City", TYPE_TEXT),
    Field::text("state", "ship-state", "State", TYPE_TEXT),
    Field::text("zip", "ship-zip", "ZIP", TYPE_TEXT),
];

impl Page for Checkout {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        let cart = cart_param(loc)?;
        let mut p = PageBuilder::new("Checkout");
        cart_summary(&mut p, &cart);
        if loc.flag("error") {
            p.text("p", "Please complete all fields.");
        }
        p.open("form", "");
        forms::render_all(&mut p, loc, &SHIPPING_FIELDS);
        p.button("place-order", CLICK_BUTTON, "Place order", "");
        p.close("form");
        Ok(p)
    }

    fn act(&self, loc: &Location, el: &ElementManifest, op: &Op) -> Result<Transition, EnvError> {
        let cart = cart_param(loc)?;
        if let Some(t) = forms::act_any(&SHIPPING_FIELDS, loc, el, op) {
            return Ok(t);
        }
        if el.element_id != "place-order" {
            return Ok(Transition::stay(loc.clone()));
        }
        if !forms::complete(&SHIPPING_FIELDS, loc) {
            return Ok(Transition::stay(loc.clone().with("error", "1")).log_label(el));
        }
        let v: Vec<String> = SHIPPING_FIELDS
            .iter()
            .map(|f| f.value(loc).trim().to_string())
            .collect();
        let address = ShippingAddress::new(&v[0], &v[1], &v[2], &v[3], &v[4]);
        let next = Location::new("/thanks")
            .with("cart", super::cart_json(&cart))
            .with("shipping", address.canonical());
        debug_assert_eq!(
            next.get("shipping").map(super::encode_component),
            Some(encode_shipping(&address))
        );
        Ok(Transition::go(next)
            .log_label(el)
            .composite(FILL_COMPLEX_FORM, forms::summary(&SHIPPING_FIELDS, loc)))
    }
}

struct Thanks;

impl Page for Thanks {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        let cart = cart_param(loc)?;
        let shipping = loc
            .get("shipping")
            .map(super::encode_component)
            .ok_or(EnvError::MalformedShipping)
            .and_then(|s| decode_shipping(&s))?;
        let mut p = PageBuilder::new("Thank you for your order");
        cart_summary(&mut p, &cart);
        p.text(
            "p",
            &format!(
                "Shipping to {}, {}, {}, {} {}",
                shipping.name, shipping.street, shipping.city, shipping.state, shipping.zip
            ),
        );
        Ok(p)
    }

    fn act(&self, loc: &Location, _el: &ElementManifest, _op: &Op) -> Result<Transition, EnvError> {
        Ok(Transition::stay(loc.clone()))
    }
}

struct Cart;

impl Page for Cart {
    fn render(&self, loc: &Location) -> Result<PageBuilder, EnvError> {
        let cart = cart_param(loc)?;
        let mut p = PageBuilder::new("Your cart");
        cart_summary(&mut p, &cart);
        Ok(p)
    }

    fn act(&self, loc: &Location, _el: &ElementManifest, _op: &Op) -> Result<Transition, EnvError> {
        Ok(Transition::stay(loc.clone()))
    }
}
