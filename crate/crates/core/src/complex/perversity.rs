use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ComplexError, FilteredComplex};

/// A perversity description independent of any particular triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum PerversitySpec {
    Zero,
    Top,
    /// Values on strata of codimension 2, 3, ...; the last value repeats.
    /// Codimension-one strata get 0.
    Gm(Vec<i64>),
    Constant(i64),
    /// Keys are stratum ids (`level:vertex`) or vertex ids.
    Explicit(BTreeMap<String, i64>),
    Dual(Box<PerversitySpec>),
}

impl PerversitySpec {
    pub fn dual(self) -> PerversitySpec {
        match self {
            PerversitySpec::Dual(p) => *p,
            p => PerversitySpec::Dual(Box::new(p)),
        }
    }
}

impl fmt::Display for PerversitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerversitySpec::Zero => write!(f, "0"),
            PerversitySpec::Top => write!(f, "t"),
            PerversitySpec::Constant(c) => write!(f, "const:{c}"),
            PerversitySpec::Gm(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "gm:{}", s.join(","))
            }
            PerversitySpec::Explicit(m) => {
                let s: Vec<String> = m.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "explicit:{}", s.join(","))
            }
            PerversitySpec::Dual(p) => write!(f, "D({p})"),
        }
    }
}

impl FromStr for PerversitySpec {
    type Err = ComplexError;

    /// Accepts `0`, `t`, an integer (constant), `const:c`, `gm:a,b,..`,
    /// `explicit:key=v,..` and `D(spec)` / `dual:spec`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ComplexError::Perversity(format!("cannot parse perversity `{s}`"));
        match s {
            "0" | "zero" => return Ok(PerversitySpec::Zero),
            "t" | "top" => return Ok(PerversitySpec::Top),
            _ => {}
        }
        if let Ok(c) = s.parse::<i64>() {
            return Ok(PerversitySpec::Constant(c));
        }
        if let Some(inner) = s.strip_prefix("D(").and_then(|r| r.strip_suffix(')')) {
            return Ok(PerversitySpec::Dual(Box::new(inner.parse()?)));
        }
        if let Some(inner) = s.strip_prefix("dual:") {
            return Ok(PerversitySpec::Dual(Box::new(inner.parse()?)));
        }
        if let Some(c) = s.strip_prefix("const:") {
            return c.trim().parse().map(PerversitySpec::Constant).map_err(|_| bad());
        }
        if let Some(list) = s.strip_prefix("gm:") {
            let v = list.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
            return Ok(PerversitySpec::Gm(v));
        }
        if let Some(list) = s.strip_prefix("explicit:") {
            let mut m = BTreeMap::new();
            for item in list.split(',').filter(|x| !x.trim().is_empty()) {
                let (k, v) = item.rsplit_once('=').ok_or_else(bad)?;
                m.insert(k.trim().to_string(), v.trim().parse().map_err(|_| bad())?);
            }
            return Ok(PerversitySpec::Explicit(m));
        }
        Err(bad())
    }
}

/// A perversity resolved on the strata of a complex, aligned with
/// [`FilteredComplex::strata`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Perversity {
    pub name: String,
    pub values: Vec<i64>,
}

/// Id of the original vertex a derived vertex comes from (`v#3` is a copy of `v`).
pub fn base_id(id: &str) -> &str {
    id.split('#').next().unwrap_or(id)
}

/// True when `id` is `vid` or a product copy of it (`vid#..`).
fn derives_from(id: &str, vid: &str) -> bool {
    id.strip_prefix(vid).is_some_and(|rest| rest.is_empty() || rest.starts_with('#'))
}

impl Perversity {
    pub fn value(&self, stratum: usize) -> i64 {
        self.values[stratum]
    }

    /// Stratumwise sum.
    pub fn add(&self, other: &Perversity) -> Perversity {
        Perversity {
            name: format!("{}+{}", self.name, other.name),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    /// Stratumwise `self ≤ other`.
    pub fn le(&self, other: &Perversity) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn as_map(&self, fc: &FilteredComplex) -> BTreeMap<String, i64> {
        fc.strata().iter().zip(&self.values).map(|(s, v)| (s.id.clone(), *v)).collect()
    }
}

impl FilteredComplex {
    pub fn make_perversity(&self, spec: &PerversitySpec) -> Result<Perversity, ComplexError> {
        let values = self.perversity_values(spec)?;
        Ok(Perversity { name: spec.to_string(), values })
    }

    fn perversity_values(&self, spec: &PerversitySpec) -> Result<Vec<i64>, ComplexError> {
        let strata = self.strata();
        let by_codim =
            |f: &dyn Fn(usize) -> i64| -> Vec<i64> { strata.iter().map(|s| if s.codim == 0 { 0 } else { f(s.codim) }).collect() };
        Ok(match spec {
            PerversitySpec::Zero => vec![0; strata.len()],
            PerversitySpec::Top => by_codim(&|c| c as i64 - 2),
            PerversitySpec::Constant(k) => by_codim(&|_| *k),
            PerversitySpec::Gm(list) => by_codim(&|c| {
                if c < 2 || list.is_empty() {
                    0
                } else {
                    list[(c - 2).min(list.len() - 1)]
                }
            }),
            PerversitySpec::Dual(p) => {
                let inner = self.perversity_values(p)?;
                let top = by_codim(&|c| c as i64 - 2);
                strata.iter().enumerate().map(|(i, s)| if s.codim == 0 { 0 } else { top[i] - inner[i] }).collect()
            }
            PerversitySpec::Explicit(map) => {
                let mut values: Vec<Option<i64>> = vec![None; strata.len()];
                for (key, &val) in map {
                    let vid = match key.split_once(':') {
                        Some((lvl, rest)) if lvl.parse::<usize>().is_ok() => rest,
                        _ => key.as_str(),
                    };
                    let hits: std::collections::BTreeSet<usize> = (0..self.num_vertices() as u32)
                        .filter(|&v| derives_from(self.vertex_id(v), vid))
                        .map(|v| self.stratum_of_vertex(v))
                        .collect();
                    if hits.is_empty() {
                        return Err(ComplexError::Perversity(format!("unknown stratum `{key}`")));
                    }
                    for s in hits {
                        if strata[s].codim == 0 && val != 0 {
                            return Err(ComplexError::Perversity(format!("nonzero value {val} on regular stratum `{}`", strata[s].id)));
                        }
                        match values[s] {
                            Some(old) if old != val => {
                                return Err(ComplexError::Perversity(format!("conflicting values on stratum `{}`", strata[s].id)))
                            }
                            _ => values[s] = Some(val),
                        }
                    }
                }
                values.into_iter().map(|v| v.unwrap_or(0)).collect()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::cone_two_points;
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "t", "const:1", "gm:0,1", "explicit:v=2", "D(const:1)"] {
            let p: PerversitySpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!("1".parse::<PerversitySpec>().unwrap(), PerversitySpec::Constant(1));
    }

    #[test]
    fn values_on_cone_of_two_points() {
        let c = cone_two_points();
        let t = c.make_perversity(&PerversitySpec::Top).unwrap();
        assert_eq!(t.values, vec![-1, 0, 0]);
        let dz = c.make_perversity(&PerversitySpec::Zero.dual()).unwrap();
        assert_eq!(dz.values, t.values);
        let e = c.make_perversity(&"explicit:0:v=3".parse().unwrap()).unwrap();
        assert_eq!(e.values, vec![3, 0, 0]);
        assert!(c.make_perversity(&"explicit:a=1".parse().unwrap()).is_err());
        assert!(c.make_perversity(&"explicit:zz=1".parse().unwrap()).is_err());
        let dd = c.make_perversity(&PerversitySpec::Constant(2).dual().dual()).unwrap();
        assert_eq!(dd.values, vec![2, 0, 0]);
    }
}
