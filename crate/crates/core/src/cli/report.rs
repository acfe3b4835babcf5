//! Command reports, as aligned text or JSON.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::curve::TropicalCurve;
use crate::realize::parity;
use crate::valuegroup::MulValue;

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    /// Key, structured value and an optional text rendering.
    pub fields: Vec<(String, Value, Option<String>)>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn field(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("serializable report field");
        self.fields.push((key.to_string(), v, None));
        self
    }

    /// A field shown as `text` in text output and as `value` in JSON.
    pub fn field_text(&mut self, key: &str, value: impl Serialize, text: impl Into<String>) -> &mut Self {
        let v = serde_json::to_value(value).expect("serializable report field");
        self.fields.push((key.to_string(), v, Some(text.into())));
        self
    }

    pub fn value(&mut self, key: &str, v: &MulValue) -> &mut Self {
        self.field_text(key, v, v.to_string())
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }

    /// genus, δ, vertex weights and parity.
    pub fn invariants(&mut self, curve: &TropicalCurve) -> &mut Self {
        let weights: Map<String, Value> = (0..curve.vertices.len())
            .map(|v| {
                let w = curve.vertex_weight(v).map(Value::from).unwrap_or(Value::Null);
                (curve.vertices[v].id.clone(), w)
            })
            .collect();
        self.field("genus", curve.genus());
        self.field("delta", curve.delta());
        self.field("vertex_weights", weights);
        self.field("parity", parity(curve));
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut results = Map::new();
            for (k, v, _) in &self.fields {
                results.insert(k.clone(), v.clone());
            }
            let mut top = Map::new();
            top.insert("command".into(), Value::from(self.command.clone()));
            top.insert("results".into(), Value::Object(results));
            top.insert("warnings".into(), Value::from(self.warnings.clone()));
            return serde_json::to_string_pretty(&Value::Object(top)).expect("json") + "\n";
        }
        let width = self.fields.iter().map(|(k, _, _)| k.len()).max().unwrap_or(0).max("command".len());
        let mut out = format!("{:width$}  {}\n", "command", self.command);
        for (k, v, t) in &self.fields {
            let text = match (t, v) {
                (Some(t), _) => t.clone(),
                (None, Value::String(s)) => s.clone(),
                (None, other) => other.to_string(),
            };
            out.push_str(&format!("{k:width$}  {text}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn text_and_json() {
        let mut r = Report::new("analyze");
        r.invariants(&catalog::theta()).field("note", "x").warn("careful");
        let text = r.render(false);
        assert!(text.contains("genus           2\n"), "{text}");
        assert!(text.ends_with("warning: careful\n"));
        let v: Value = serde_json::from_str(&r.render(true)).unwrap();
        assert_eq!(v["results"]["delta"], 1);
        assert_eq!(v["results"]["vertex_weights"]["u"], 1);
    }
}
