//! Report bundle assembly and the three output formats.
//!
//! JSON output is deterministic: object keys are sorted (serde_json's
//! default map), exact rationals are strings, and every floating-point
//! number is rounded to 12 significant digits before serialization.

use serde_json::{json, Map, Value};

use conifold_core::round_sig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (use table|json|csv)")),
        }
    }
}

/// One job's results, keyed by section name.
pub struct Bundle {
    map: Map<String, Value>,
}

impl Bundle {
    pub fn new(m: u32) -> Self {
        let mut map = Map::new();
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("m".into(), json!(m));
        Bundle { map }
    }

    pub fn insert<T: serde::Serialize>(&mut self, section: &str, value: &T) {
        let v = serde_json::to_value(value).expect("report types serialize");
        self.map.insert(section.to_string(), v);
    }

    pub fn value(&self) -> Value {
        let mut v = Value::Object(self.map.clone());
        round_floats(&mut v);
        v
    }

    pub fn emit(&self, format: Format) -> String {
        let v = self.value();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("valid JSON");
                s.push('\n');
                s
            }
            Format::Table => emit_table(&v),
            Format::Csv => emit_csv(&v),
        }
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = round_sig(n.as_f64().unwrap());
                if let Some(r) = serde_json::Number::from_f64(x) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn emit_table(v: &Value) -> String {
    let mut out = String::new();
    let obj = v.as_object().expect("bundle is an object");
    out.push_str(&format!("m = {}\n", obj.get("m").unwrap_or(&Value::Null)));
    if let Some(ends) = obj.get("ends").and_then(Value::as_array) {
        out.push_str("\nends\n");
        out.push_str(&format!(
            "  {:<5} {:<5} {:<12} {:<8}\n",
            "end", "kind", "rate", "sym_dim"
        ));
        for e in ends {
            out.push_str(&format!(
                "  {:<5} {:<5} {:<12} {:<8}\n",
                scalar_text(&e["index"]),
                scalar_text(&e["kind"]),
                scalar_text(&e["rate"]),
                scalar_text(&e["sym_dim"]),
            ));
        }
    }
    if let Some(spectra) = obj.get("spectrum").and_then(Value::as_array) {
        out.push_str("\nspectrum\n");
        out.push_str(&format!(
            "  {:<5} {:<5} {:<18} {:<6}\n",
            "end", "dim", "eigenvalue", "mult"
        ));
        for (i, s) in spectra.iter().enumerate() {
            for entry in s["entries"].as_array().unwrap_or(&Vec::new()) {
                out.push_str(&format!(
                    "  {:<5} {:<5} {:<18} {:<6}\n",
                    i,
                    scalar_text(&s["dim_link"]),
                    scalar_text(&entry[0]),
                    scalar_text(&entry[1]),
                ));
            }
        }
    }
    if let Some(w) = obj.get("weights") {
        out.push_str(&format!(
            "\nexceptional weights in [{}, {}]\n",
            scalar_text(&w["interval"][0]),
            scalar_text(&w["interval"][1])
        ));
        out.push_str(&format!(
            "  {:<5} {:<26} {:<16} {:<6}\n",
            "end", "gamma", "decimal", "mult"
        ));
        if let Some(per_end) = w["per_end"].as_array() {
            for (i, list) in per_end.iter().enumerate() {
                for entry in list.as_array().unwrap_or(&Vec::new()) {
                    let decimal = entry
                        .get("gamma_decimal")
                        .map(scalar_text)
                        .unwrap_or_else(|| scalar_text(&entry["gamma"]));
                    out.push_str(&format!(
                        "  {:<5} {:<26} {:<16} {:<6}\n",
                        i,
                        scalar_text(&entry["gamma"]),
                        decimal,
                        scalar_text(&entry["mult"]),
                    ));
                }
            }
        }
    }
    if let Some(f) = obj.get("fredholm") {
        out.push_str("\nfredholm report\n");
        for key in ["fredholm", "ker_dim", "coker_dim", "index", "approximate"] {
            out.push_str(&format!(
                "  {:<12} {}\n",
                key,
                scalar_text(f.get(key).unwrap_or(&Value::Null))
            ));
        }
        if let Some(c) = f.get("caveat") {
            out.push_str(&format!("  caveat       {}\n", scalar_text(c)));
        }
        push_trail(&mut out, f.get("formula_trail"));
    }
    if let Some(list) = obj.get("stability").and_then(Value::as_array) {
        out.push_str("\nstability\n");
        for report in list {
            let end = scalar_text(&report["end_index"]);
            for k in 0..3u8 {
                let key = format!("gamma{k}");
                out.push_str(&format!(
                    "  end {end}: gamma={k}: expected {:<4} observed {:<4}\n",
                    scalar_text(&report["expected"][&key]),
                    scalar_text(&report["observed"][&key]),
                ));
            }
            let extras = report["extra_exceptional"].as_array().map(Vec::len).unwrap_or(0);
            out.push_str(&format!(
                "  end {end}: extra exceptional in (0,2): {extras}; stable = {}\n",
                scalar_text(&report["stable"])
            ));
        }
    }
    if let Some(d) = obj.get("dim") {
        out.push_str("\nmoduli dimension\n");
        for key in ["case", "window", "dim_i", "dim_o", "moduli_dim"] {
            out.push_str(&format!(
                "  {:<12} {}\n",
                key,
                scalar_text(d.get(key).unwrap_or(&Value::Null))
            ));
        }
        for key in ["dim_o_caveat", "caveat"] {
            if let Some(c) = d.get(key) {
                out.push_str(&format!("  {:<12} {}\n", key, scalar_text(c)));
            }
        }
        push_trail(&mut out, d.get("formula_trail"));
    }
    if let Some(t) = obj.get("topology") {
        out.push_str("\ntopology\n");
        for key in [
            "b1",
            "b1_c",
            "b1_c_bullet",
            "e",
            "s",
            "l",
            "rank_restriction_to_cs_links",
        ] {
            out.push_str(&format!(
                "  {:<28} {}\n",
                key,
                scalar_text(t.get(key).unwrap_or(&Value::Null))
            ));
        }
    }
    out
}

fn push_trail(out: &mut String, trail: Option<&Value>) {
    if let Some(lines) = trail.and_then(Value::as_array) {
        out.push_str("  trail:\n");
        for line in lines {
            out.push_str(&format!("    - {}\n", scalar_text(line)));
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit_csv(v: &Value) -> String {
    let obj = v.as_object().expect("bundle is an object");
    let mut rows: Vec<Vec<String>> = vec![vec![
        "section".into(),
        "end".into(),
        "key".into(),
        "value".into(),
        "mult".into(),
    ]];
    if let Some(spectra) = obj.get("spectrum").and_then(Value::as_array) {
        for (i, s) in spectra.iter().enumerate() {
            for entry in s["entries"].as_array().unwrap_or(&Vec::new()) {
                rows.push(vec![
                    "spectrum".into(),
                    i.to_string(),
                    "eigenvalue".into(),
                    scalar_text(&entry[0]),
                    scalar_text(&entry[1]),
                ]);
            }
        }
    }
    if let Some(w) = obj.get("weights") {
        if let Some(per_end) = w["per_end"].as_array() {
            for (i, list) in per_end.iter().enumerate() {
                for entry in list.as_array().unwrap_or(&Vec::new()) {
                    rows.push(vec![
                        "weights".into(),
                        i.to_string(),
                        "gamma".into(),
                        scalar_text(&entry["gamma"]),
                        scalar_text(&entry["mult"]),
                    ]);
                }
            }
        }
    }
    if let Some(f) = obj.get("fredholm") {
        for key in ["ker_dim", "coker_dim", "index"] {
            rows.push(vec![
                "fredholm".into(),
                String::new(),
                key.into(),
                scalar_text(f.get(key).unwrap_or(&Value::Null)),
                String::new(),
            ]);
        }
    }
    if let Some(list) = obj.get("stability").and_then(Value::as_array) {
        for report in list {
            let end = scalar_text(&report["end_index"]);
            rows.push(vec![
                "stability".into(),
                end,
                "stable".into(),
                scalar_text(&report["stable"]),
                String::new(),
            ]);
        }
    }
    if let Some(d) = obj.get("dim") {
        rows.push(vec![
            "dim".into(),
            String::new(),
            format!(
                "{} {}",
                scalar_text(&d["case"]),
                scalar_text(&d["window"])
            ),
            scalar_text(d.get("moduli_dim").unwrap_or(&Value::Null)),
            String::new(),
        ]);
    }
    if let Some(t) = obj.get("topology").and_then(Value::as_object) {
        for (key, value) in t {
            rows.push(vec![
                "topology".into(),
                String::new(),
                key.clone(),
                scalar_text(value),
                String::new(),
            ]);
        }
    }
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| csv_escape(c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
