//! Report assembly: human-readable text by default, a structured JSON
//! mirror behind `--json`. Output is byte-stable across runs for
//! identical inputs and settings; wall-clock timing is opt-in and
//! excluded from that guarantee.

use serde_json::{json, Map, Value};

pub struct Report {
    pub command: String,
    lines: Vec<String>,
    data: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            lines: Vec::new(),
            data: Map::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.lines.push(s.into());
        self
    }

    pub fn block(&mut self, s: &str) -> &mut Self {
        for l in s.lines() {
            self.lines.push(l.to_string());
        }
        self
    }

    pub fn field(&mut self, key: &str, value: Value) -> &mut Self {
        self.data.insert(key.to_string(), value);
        self
    }

    pub fn render_text(&self, timing: Option<u128>) -> String {
        let mut out = format!("$ {}\n", self.command);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        if let Some(ms) = timing {
            out.push_str(&format!("time: {ms} ms\n"));
        }
        out
    }

    pub fn render_json(&self, timing: Option<u128>) -> String {
        let mut root = Map::new();
        root.insert("command".into(), json!(self.command));
        root.insert("status".into(), json!("ok"));
        root.insert("report".into(), Value::Object(self.data.clone()));
        root.insert("text".into(), json!(self.lines));
        if let Some(ms) = timing {
            root.insert("time_ms".into(), json!(ms as u64));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("serializable");
        s.push('\n');
        s
    }
}
