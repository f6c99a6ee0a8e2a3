use std::fmt;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

/// Everything except RFC 3986 unreserved characters is escaped.
pub const COMPONENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

pub fn encode_component(s: &str) -> String {
    utf8_percent_encode(s, COMPONENT).to_string()
}

pub fn decode_component(s: &str) -> Option<String> {
    percent_decode_str(s).decode_utf8().ok().map(|c| c.into_owned())
}

/// A path plus ordered query parameters, stored decoded.
///
/// `Display` re-encodes every value with [`COMPONENT`], so two locations
/// that compare equal always print identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Location {
    path: String,
    params: Vec<(String, String)>,
}

impl Location {
    pub fn new(path: impl Into<String>) -> Self {
        Location {
            path: path.into(),
            params: Vec::new(),
        }
    }

    pub fn parse(s: &str) -> Option<Location> {
        let (path, query) = match s.split_once('?') {
            Some((p, q)) => (p, Some(q)),
            None => (s, None),
        };
        if !path.starts_with('/') || path.contains(['#', ' ']) {
            return None;
        }
        let mut loc = Location::new(path);
        for pair in query.unwrap_or("").split('&').filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').unwrap_or((pair, ""));
            let k = decode_component(k)?;
            let v = decode_component(v)?;
            if k.is_empty() || loc.get(&k).is_some() {
                return None;
            }
            loc.params.push((k, v));
        }
        Some(loc)
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn flag(&self, key: &str) -> bool {
        self.get(key) == Some("1")
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.params.iter_mut().find(|(k, _)| k == key) {
            Some((_, v)) => *v = value,
            None => self.params.push((key.to_string(), value)),
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.params.retain(|(k, _)| k != key);
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.set(key, value);
        self
    }

    pub fn without(mut self, key: &str) -> Self {
        self.remove(key);
        self
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.path)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            let sep = if i == 0 { '?' } else { '&' };
            write!(f, "{sep}{}={}", encode_component(k), encode_component(v))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let loc = Location::parse("/search?query=macbook%20pro").unwrap();
        assert_eq!(loc.path(), "/search");
        assert_eq!(loc.get("query"), Some("macbook pro"));
        assert_eq!(loc.to_string(), "/search?query=macbook%20pro");
        assert_eq!(Location::parse("/").unwrap().to_string(), "/");
        assert_eq!(Location::parse("/x?").unwrap().to_string(), "/x");
    }

    #[test]
    fn rejects_bad_locations() {
        assert!(Location::parse("search").is_none());
        assert!(Location::parse("/a?x=1&x=2").is_none());
        assert!(Location::parse("/a?=1").is_none());
        assert!(Location::parse("/a b").is_none());
    }

    #[test]
    fn set_keeps_position() {
        let loc = Location::new("/p").with("a", "1").with("b", "2").with("a", "3");
        assert_eq!(loc.to_string(), "/p?a=3&b=2");
        assert_eq!(loc.without("a").to_string(), "/p?b=2");
    }
}
