//! Ordered key/value reports with a text rendering and a JSON mirror.

use serde::ser::{Serialize, SerializeMap, Serializer};

pub const HEADER: &str = "polywell-report v1";

#[derive(Clone, Debug)]
pub enum Field {
    Text(String),
    Int(u64),
    Bool(bool),
    List(Vec<String>),
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Text(t) => s.serialize_str(t),
            Field::Int(i) => s.serialize_u64(*i),
            Field::Bool(b) => s.serialize_bool(*b),
            Field::List(l) => l.serialize(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    entries: Vec<(String, Field)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report { entries: Vec::new() };
        r.text("command", command);
        r
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.to_string(), Field::Text(value.into())));
        self
    }

    pub fn int(&mut self, key: &str, value: usize) -> &mut Self {
        self.entries.push((key.to_string(), Field::Int(value as u64)));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.entries.push((key.to_string(), Field::Bool(value)));
        self
    }

    pub fn list(&mut self, key: &str, items: Vec<String>) -> &mut Self {
        self.entries.push((key.to_string(), Field::List(items)));
        self
    }

    pub fn render(&self) -> String {
        let mut out = format!("{HEADER}\n");
        for (k, v) in &self.entries {
            match v {
                Field::Text(t) => out.push_str(&format!("{k}: {t}\n")),
                Field::Int(i) => out.push_str(&format!("{k}: {i}\n")),
                Field::Bool(b) => out.push_str(&format!("{k}: {b}\n")),
                Field::List(items) => {
                    out.push_str(&format!("{k}: {} item(s)\n", items.len()));
                    for it in items {
                        out.push_str(&format!("  - {it}\n"));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len() + 1))?;
        map.serialize_entry("format", HEADER)?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_in_insertion_order() {
        let mut r = Report::new("check");
        r.text("status", "ill-posed").int("rank", 1).list("points", vec!["(1)".into()]);
        assert_eq!(
            r.render(),
            "polywell-report v1\ncommand: check\nstatus: ill-posed\nrank: 1\npoints: 1 item(s)\n  - (1)\n"
        );
        let json = r.to_json();
        assert!(json.find("\"status\"").unwrap() < json.find("\"rank\"").unwrap());
    }
}
