//! Fixture catalog for the shopping playground, plus the canonical cart and
//! shipping encodings carried in checkpoint URLs.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::query::{decode_component, encode_component};
use super::EnvError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CustomizationGroup {
    pub name: String,
    /// Ascending tier order.
    pub options: Vec<String>,
    pub default: usize,
}

impl CustomizationGroup {
    /// Query parameter / element-id key for the group.
    pub fn key(&self) -> String {
        self.name.to_ascii_lowercase()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogItem {
    pub id: String,
    pub name: String,
    pub chip: String,
    pub base_price: u64,
    pub customization_groups: Vec<CustomizationGroup>,
}

impl CatalogItem {
    pub fn group(&self, name: &str) -> Option<&CustomizationGroup> {
        self.customization_groups.iter().find(|g| g.name == name)
    }

    /// Price in cents of a configuration: base plus $200 per tier step.
    pub fn price(&self, cart: &CartState) -> u64 {
        let steps: u64 = self
            .customization_groups
            .iter()
            .filter_map(|g| {
                let chosen = cart.options.get(&g.name)?;
                g.options.iter().position(|o| o == chosen).map(|i| i as u64)
            })
            .sum();
        self.base_price + steps * 20_000
    }
}

fn standard_groups() -> Vec<CustomizationGroup> {
    vec![
        CustomizationGroup {
            name: "Memory".into(),
            options: vec!["16GB".into(), "32GB".into(), "64GB".into()],
            default: 0,
        },
        CustomizationGroup {
            name: "Storage".into(),
            options: vec!["512GB".into(), "1TB".into(), "2TB".into()],
            default: 0,
        },
    ]
}

pub fn catalog() -> &'static [CatalogItem] {
    static CATALOG: OnceLock<Vec<CatalogItem>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        [
            ("mbp-m3", "MacBook Pro M3", "M3", 159_900),
            ("mbp-m3-pro", "MacBook Pro M3 Pro", "M3 Pro", 199_900),
            ("mbp-m3-max", "MacBook Pro M3 Max", "M3 Max", 319_900),
            ("zenith-14", "Zenith Book 14", "Z2", 109_900),
            ("aero-15", "Aero Laptop 15", "A7", 129_900),
            ("nimbus-16", "Nimbus Pro 16", "N5", 189_900),
        ]
        .into_iter()
        .map(|(id, name, chip, price)| CatalogItem {
            id: id.into(),
            name: name.into(),
            chip: chip.into(),
            base_price: price,
            customization_groups: standard_groups(),
        })
        .collect()
    })
}

pub fn find_item(id: &str) -> Option<&'static CatalogItem> {
    catalog().iter().find(|i| i.id == id)
}

/// Case-insensitive substring match on item names, in catalog order.
pub fn search_catalog(query: &str) -> Vec<&'static CatalogItem> {
    let needle = query.to_lowercase();
    catalog()
        .iter()
        .filter(|i| i.name.to_lowercase().contains(&needle))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartState {
    #[serde(rename = "item")]
    pub item_id: String,
    pub options: BTreeMap<String, String>,
}

impl CartState {
    pub fn with_defaults(item: &CatalogItem) -> Self {
        CartState {
            item_id: item.id.clone(),
            options: item
                .customization_groups
                .iter()
                .map(|g| (g.name.clone(), g.options[g.default].clone()))
                .collect(),
        }
    }

    /// Last (highest) option of every group.
    pub fn highest_tier(item: &CatalogItem) -> Self {
        CartState {
            item_id: item.id.clone(),
            options: item
                .customization_groups
                .iter()
                .map(|g| (g.name.clone(), g.options.last().unwrap().clone()))
                .collect(),
        }
    }

    pub fn item(&self) -> Option<&'static CatalogItem> {
        find_item(&self.item_id)
    }

    fn validate(&self) -> bool {
        let Some(item) = self.item() else {
            return false;
        };
        self.options.len() == item.customization_groups.len()
            && item.customization_groups.iter().all(|g| {
                self.options
                    .get(&g.name)
                    .is_some_and(|chosen| g.options.contains(chosen))
            })
    }
}

/// Canonical JSON: sorted keys, no whitespace.
pub fn cart_json(cart: &CartState) -> String {
    serde_json::to_string(cart).expect("cart serializes")
}

pub fn encode_cart(cart: &CartState) -> String {
    encode_component(&cart_json(cart))
}

/// Strict inverse of [`encode_cart`]; anything that would not re-encode to
/// exactly `s` is rejected.
pub fn decode_cart(s: &str) -> Result<CartState, EnvError> {
    let json = decode_component(s).ok_or(EnvError::MalformedCart)?;
    cart_from_json(&json)
        .filter(|c| encode_cart(c) == s)
        .ok_or(EnvError::MalformedCart)
}

pub(crate) fn cart_from_json(json: &str) -> Option<CartState> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Wire {
        item: String,
        options: BTreeMap<String, String>,
    }
    let wire: Wire = serde_json::from_str(json).ok()?;
    let cart = CartState {
        item_id: wire.item,
        options: wire.options,
    };
    (cart.validate() && cart_json(&cart) == json).then_some(cart)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShippingAddress {
    pub name: String,
    pub street: String,
    pub city: String,
    pub state: String,
    pub zip: String,
}

impl ShippingAddress {
    pub const FIELDS: [&'static str; 5] = ["Name", "Street", "City", "State", "ZIP"];

    pub fn new(name: &str, street: &str, city: &str, state: &str, zip: &str) -> Self {
        ShippingAddress {
            name: name.into(),
            street: street.into(),
            city: city.into(),
            state: state.into(),
            zip: zip.into(),
        }
    }

    pub fn fields(&self) -> [&str; 5] {
        [&self.name, &self.street, &self.city, &self.state, &self.zip]
    }

    /// `name|street|city|state|zip`, before percent-encoding.
    pub fn canonical(&self) -> String {
        self.fields().join("|")
    }
}

pub fn encode_shipping(addr: &ShippingAddress) -> String {
    encode_component(&addr.canonical())
}

pub(crate) fn shipping_from_canonical(s: &str) -> Option<ShippingAddress> {
    let parts: Vec<&str> = s.split('|').collect();
    match parts.as_slice() {
        [name, street, city, state, zip] => Some(ShippingAddress::new(name, street, city, state, zip)),
        _ => None,
    }
}

pub fn decode_shipping(s: &str) -> Result<ShippingAddress, EnvError> {
    let text = decode_component(s).ok_or(EnvError::MalformedShipping)?;
    shipping_from_canonical(&text)
        .filter(|a| encode_shipping(a) == s)
        .ok_or(EnvError::MalformedShipping)
}
