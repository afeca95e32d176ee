use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ComplexError, FilteredComplex, PerversitySpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    pub level: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerversityEntry {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientationEntry {
    pub simplex: Vec<String>,
    pub sign: i64,
}

/// On-disk form of a filtered complex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub name: String,
    pub dimension: usize,
    pub vertices: Vec<VertexEntry>,
    pub simplices: Vec<Vec<String>>,
    #[serde(default)]
    pub perversities: Vec<PerversityEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Vec<OrientationEntry>>,
}

fn entry_to_spec(kind: &str, data: &Value, named: &BTreeMap<String, PerversitySpec>, field: &str) -> Result<PerversitySpec, ComplexError> {
    let bad = |what: &str| ComplexError::Json(format!("{field}: {what}"));
    Ok(match kind {
        "zero" => PerversitySpec::Zero,
        "top" => PerversitySpec::Top,
        "constant" => PerversitySpec::Constant(data.as_i64().ok_or_else(|| bad("constant needs an integer"))?),
        "gm" => PerversitySpec::Gm(
            data.as_array()
                .ok_or_else(|| bad("gm needs a list"))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("gm values must be integers")))
                .collect::<Result<_, _>>()?,
        ),
        "explicit" => {
            let obj = data.as_object().ok_or_else(|| bad("explicit needs an object"))?;
            let mut m = BTreeMap::new();
            for (k, v) in obj {
                m.insert(k.clone(), v.as_i64().ok_or_else(|| bad("explicit values must be integers"))?);
            }
            PerversitySpec::Explicit(m)
        }
        "dual" => {
            let inner = match data {
                Value::String(s) => match named.get(s) {
                    Some(p) => p.clone(),
                    None => s.parse().map_err(|_| bad("dual refers to an unknown perversity"))?,
                },
                Value::Object(o) => {
                    let k = o.get("kind").and_then(Value::as_str).ok_or_else(|| bad("dual needs a kind"))?;
                    entry_to_spec(k, o.get("data").unwrap_or(&Value::Null), named, field)?
                }
                _ => return Err(bad("dual needs a perversity name or object")),
            };
            PerversitySpec::Dual(Box::new(inner))
        }
        other => return Err(bad(&format!("unknown kind `{other}`"))),
    })
}

fn spec_to_entry(name: &str, spec: &PerversitySpec) -> PerversityEntry {
    let (kind, data) = spec_parts(spec);
    PerversityEntry { name: name.to_string(), kind, data }
}

fn spec_parts(spec: &PerversitySpec) -> (String, Value) {
    match spec {
        PerversitySpec::Zero => ("zero".into(), Value::Null),
        PerversitySpec::Top => ("top".into(), Value::Null),
        PerversitySpec::Constant(c) => ("constant".into(), Value::from(*c)),
        PerversitySpec::Gm(v) => ("gm".into(), Value::from(v.clone())),
        PerversitySpec::Explicit(m) => ("explicit".into(), Value::Object(m.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect())),
        PerversitySpec::Dual(p) => {
            let (k, d) = spec_parts(p);
            let mut o = serde_json::Map::new();
            o.insert("kind".into(), Value::from(k));
            if !d.is_null() {
                o.insert("data".into(), d);
            }
            ("dual".into(), Value::Object(o))
        }
    }
}

impl ComplexFile {
    pub fn from_json(text: &str) -> Result<ComplexFile, ComplexError> {
        serde_json::from_str(text).map_err(|e| ComplexError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Builds the complex and checks every perversity against its strata.
    pub fn build(&self) -> Result<(FilteredComplex, Vec<(String, PerversitySpec)>), ComplexError> {
        let fc = FilteredComplex::new(
            self.name.clone(),
            self.dimension,
            self.vertices.iter().map(|v| (v.id.clone(), v.level)).collect(),
            self.simplices.clone(),
        )?;
        let mut named = BTreeMap::new();
        let mut out = Vec::new();
        for (i, p) in self.perversities.iter().enumerate() {
            let spec = entry_to_spec(&p.kind, &p.data, &named, &format!("perversities[{i}] `{}`", p.name))?;
            fc.make_perversity(&spec)?;
            named.insert(p.name.clone(), spec.clone());
            out.push((p.name.clone(), spec));
        }
        if let Some(or) = &self.orientation {
            for (i, o) in or.iter().enumerate() {
                if o.sign != 1 && o.sign != -1 {
                    return Err(ComplexError::Json(format!("orientation[{i}]: sign must be 1 or -1")));
                }
                let ids: Vec<&str> = o.simplex.iter().map(String::as_str).collect();
                let mut s = fc.vertices_by_id(&ids)?;
                s.sort_unstable();
                if s.len() != fc.dim() + 1 || !fc.contains(&s) {
                    return Err(ComplexError::Json(format!("orientation[{i}]: not a top simplex")));
                }
            }
        }
        Ok((fc, out))
    }
}

impl FilteredComplex {
    pub fn to_file(&self, perversities: &[(String, PerversitySpec)]) -> ComplexFile {
        ComplexFile {
            name: self.name.clone(),
            dimension: self.dim,
            vertices: self.ids.iter().zip(&self.levels).map(|(id, l)| VertexEntry { id: id.clone(), level: *l as i64 }).collect(),
            simplices: self.facets.iter().map(|f| self.simplex_ids(f)).collect(),
            perversities: perversities.iter().map(|(n, p)| spec_to_entry(n, p)).collect(),
            orientation: None,
        }
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<(FilteredComplex, Vec<(String, PerversitySpec)>), ComplexError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| ComplexError::Json(e.to_string()))?;
        ComplexFile::from_json(&text)?.build()
    }

    pub fn save_json(&self, path: impl AsRef<Path>, perversities: &[(String, PerversitySpec)]) -> Result<(), ComplexError> {
        std::fs::write(path.as_ref(), self.to_file(perversities).to_json()).map_err(|e| ComplexError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::cone_two_points;
    use super::*;

    #[test]
    fn roundtrip() {
        let c = cone_two_points();
        let ps = vec![
            ("one".to_string(), PerversitySpec::Constant(1)),
            ("d".to_string(), PerversitySpec::Dual(Box::new(PerversitySpec::Gm(vec![0, 1])))),
            ("e".to_string(), "explicit:0:v=2".parse().unwrap()),
        ];
        let text = c.to_file(&ps).to_json();
        let (back, ps2) = ComplexFile::from_json(&text).unwrap().build().unwrap();
        assert_eq!(back, c);
        assert_eq!(ps2, ps);
    }

    #[test]
    fn malformed_inputs() {
        let bad_level = r#"{"name":"x","dimension":1,"vertices":[{"id":"a","level":"one"}],"simplices":[]}"#;
        let e = ComplexFile::from_json(bad_level).unwrap_err();
        assert!(e.to_string().contains("line"));
        let unknown = r#"{"name":"x","dimension":1,"vertices":[{"id":"a","level":1},{"id":"v","level":0}],
            "simplices":[["a","v"]],"perversities":[{"name":"p","kind":"explicit","data":{"nope":1}}]}"#;
        assert!(ComplexFile::from_json(unknown).unwrap().build().is_err());
    }
}
