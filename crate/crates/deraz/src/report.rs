//! Deterministic task reports.
//!
//! A report is an ordered list of key/value lines plus an optional
//! witness block. The text rendering is byte-stable: no timestamps, no
//! pointer values, no hash-ordered collections. Timing goes to stderr in
//! main, never in here. The JSON rendering carries the same data under
//! sorted keys with `"schema": "deraz-report/1"`.

use serde_json::{json, Map, Value as Json};

#[derive(Debug, Clone)]
pub enum Val {
    S(String),
    I(i64),
    B(bool),
    /// (degree, dimension) pairs, rendered `[(d, n), ...]`.
    Dims(Vec<(i64, usize)>),
    LS(Vec<String>),
}

impl Val {
    fn text(&self) -> String {
        match self {
            Val::S(s) => s.clone(),
            Val::I(n) => n.to_string(),
            Val::B(true) => "yes".into(),
            Val::B(false) => "no".into(),
            Val::Dims(d) => {
                let parts: Vec<String> = d.iter().map(|(n, r)| format!("({n}, {r})")).collect();
                format!("[{}]", parts.join(", "))
            }
            Val::LS(items) => format!("[{}]", items.join(", ")),
        }
    }

    fn json(&self) -> Json {
        match self {
            Val::S(s) => json!(s),
            Val::I(n) => json!(n),
            Val::B(b) => json!(b),
            Val::Dims(d) => Json::Array(d.iter().map(|(n, r)| json!([n, r])).collect()),
            Val::LS(items) => json!(items),
        }
    }
}

/// One entry of a witness block. The text form round-trips through the
/// job-file parser, so a failing run's witness can be pasted into a
/// `witness NAME { ... }` object and re-checked with verify-certificate.
#[derive(Debug, Clone)]
pub enum WVal {
    S(String),
    I(i64),
    L(Vec<WVal>),
}

impl WVal {
    fn text(&self) -> String {
        match self {
            WVal::S(s) => format!("{s:?}"),
            WVal::I(n) => n.to_string(),
            WVal::L(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.text()).collect();
                format!("[{}]", parts.join(", "))
            }
        }
    }

    fn json(&self) -> Json {
        match self {
            WVal::S(s) => json!(s),
            WVal::I(n) => json!(n),
            WVal::L(items) => Json::Array(items.iter().map(|v| v.json()).collect()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Witness {
    pub entries: Vec<(String, WVal)>,
}

impl Witness {
    pub fn new(kind: &str) -> Witness {
        Witness { entries: vec![("kind".into(), WVal::S(kind.into()))] }
    }

    pub fn push(mut self, key: &str, v: WVal) -> Witness {
        self.entries.push((key.into(), v));
        self
    }

    pub fn s(self, key: &str, v: impl Into<String>) -> Witness {
        self.push(key, WVal::S(v.into()))
    }

    pub fn i(self, key: &str, v: i64) -> Witness {
        self.push(key, WVal::I(v))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    fields: Vec<(String, Val)>,
    witness: Option<Witness>,
}

impl Report {
    pub fn new(task: &str) -> Report {
        let mut r = Report::default();
        r.set("task", Val::S(task.into()));
        r
    }

    pub fn set(&mut self, key: &str, v: Val) {
        self.fields.push((key.into(), v));
    }

    pub fn s(&mut self, key: &str, v: impl Into<String>) {
        self.set(key, Val::S(v.into()));
    }

    pub fn i(&mut self, key: &str, v: i64) {
        self.set(key, Val::I(v));
    }

    pub fn b(&mut self, key: &str, v: bool) {
        self.set(key, Val::B(v));
    }

    pub fn dims(&mut self, key: &str, v: Vec<(i64, usize)>) {
        self.set(key, Val::Dims(v));
    }

    pub fn set_witness(&mut self, w: Witness) {
        self.witness = Some(w);
    }

    pub fn verdict(&mut self, v: &str) {
        self.s("verdict", v);
    }

    pub fn text(&self) -> String {
        let mut out = String::from("deraz-report/1\n");
        for (k, v) in &self.fields {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v.text());
            out.push('\n');
        }
        if let Some(w) = &self.witness {
            out.push_str("witness {\n");
            for (k, v) in &w.entries {
                out.push_str("  ");
                out.push_str(k);
                out.push_str(" = ");
                out.push_str(&v.text());
                out.push_str(";\n");
            }
            out.push_str("}\n");
        }
        out
    }

    pub fn json(&self) -> String {
        let mut map = Map::new();
        map.insert("schema".into(), json!("deraz-report/1"));
        for (k, v) in &self.fields {
            map.insert(k.clone(), v.json());
        }
        if let Some(w) = &self.witness {
            let mut wm = Map::new();
            for (k, v) in &w.entries {
                wm.insert(k.clone(), v.json());
            }
            map.insert("witness".into(), Json::Object(wm));
        }
        // serde_json maps are BTree-backed: keys come out sorted, which
        // is what the byte-stability contract wants.
        let mut s = serde_json::to_string_pretty(&Json::Object(map)).expect("report serialization");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering_is_stable_and_witnesses_parse_back() {
        let mut r = Report::new("check-azumaya");
        r.s("object", "B");
        r.b("az1", true);
        r.dims("cone", vec![(-1, 2), (0, 2)]);
        r.set_witness(Witness::new("cone-homology").s("dgalgebra", "B").i("degree", -1));
        r.verdict("not-azumaya");
        let t = r.text();
        assert!(t.starts_with("deraz-report/1\n"));
        assert!(t.contains("cone: [(-1, 2), (0, 2)]"));
        assert!(t.contains("witness {"));
        // the witness block is legal job-file syntax
        let wrapped = {
            let start = t.find("witness {").unwrap();
            format!("witness W {}\ntask verify-certificate {{ witness = \"W\"; }}", &t[start + 8..])
        };
        let parsed = crate::job::parse(&wrapped).unwrap();
        assert_eq!(parsed.objects[0].req_str("kind").unwrap(), "cone-homology");
        assert_eq!(parsed.objects[0].int_entry("degree").unwrap(), Some(-1));
    }

    #[test]
    fn json_has_schema_and_sorted_keys() {
        let mut r = Report::new("support");
        r.s("zeta", "z");
        r.s("alpha", "a");
        let j = r.json();
        let alpha = j.find("\"alpha\"").unwrap();
        let zeta = j.find("\"zeta\"").unwrap();
        assert!(alpha < zeta);
        assert!(j.contains("\"schema\": \"deraz-report/1\""));
        assert!(j.ends_with('\n'));
    }
}
