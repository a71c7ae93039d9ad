//! JSON scenario documents.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "variables": ["x", "y"],
//!   "cap": 32,
//!   "maps": { "F": ["x", "y^2"] },
//!   "fields": { "v": ["y", "0"] },
//!   "varieties": { "X": ["y - x"], "Y": ["y"] },
//!   "queries": { "table": { "command": "mu-seq", "word": "F^n", "range": "0..4", "pull": "Y", "against": "X" } }
//! }
//! ```
//!
//! Coefficients are exact rationals written inside the polynomial strings
//! (`1/2 y`). Object keys keep document order, and repeated keys are errors.

use std::collections::HashSet;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use germlab_core::germs::{FormalMap, FormalVectorField, Generators};
use germlab_core::multiplicity::{IdealPresentation, DEFAULT_CAP};
use germlab_core::ring::{default_names, parse_polynomial};
use germlab_core::Jet;
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::error::CliError;

/// Object entries in document order, duplicates kept so they can be reported.
#[derive(Debug, Clone)]
struct Named<T>(Vec<(String, T)>);

impl<T> Default for Named<T> {
    fn default() -> Self {
        Named(Vec::new())
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Named<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object from names to definitions")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = map.next_entry::<String, T>()? {
                    out.push(entry);
                }
                Ok(Named(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

/// A list of names given either as one comma-separated string or as an array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NameList {
    Joined(String),
    List(Vec<String>),
}

impl NameList {
    pub fn joined(&self, sep: &str) -> String {
        match self {
            NameList::Joined(s) => s.clone(),
            NameList::List(v) => v.join(sep),
        }
    }
}

/// Stored flag values for a command; see the `--query` flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub command: Option<String>,
    pub word: Option<String>,
    pub range: Option<String>,
    pub pull: Option<String>,
    pub against: Option<NameList>,
    pub ideal: Option<NameList>,
    pub cap: Option<u32>,
    pub format: Option<String>,
    pub time: Option<String>,
    pub order: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    dimension: usize,
    variables: Option<Vec<String>>,
    cap: Option<u32>,
    #[serde(default)]
    maps: Named<Vec<String>>,
    #[serde(default)]
    fields: Named<Vec<String>>,
    #[serde(default)]
    varieties: Named<Vec<String>>,
    #[serde(default)]
    queries: Named<Query>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub variables: Vec<String>,
    pub cap: u32,
    pub generators: Generators,
    pub varieties: Vec<IdealPresentation>,
    pub queries: Vec<(String, Query)>,
    /// Largest degree among map and field components, at least 1.
    pub natural_order: u32,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn variety(&self, name: &str) -> Result<&IdealPresentation, CliError> {
        self.varieties
            .iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| CliError::Input(format!("unknown variety \"{name}\"")))
    }

    pub fn query(&self, name: &str) -> Result<&Query, CliError> {
        self.queries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, q)| q)
            .ok_or_else(|| CliError::Input(format!("unknown query \"{name}\"")))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_components(
    kind: &str,
    name: &str,
    parts: &[String],
    vars: &[String],
    cap: u32,
) -> Result<Vec<Jet>, CliError> {
    if parts.len() != vars.len() {
        return Err(CliError::Input(format!(
            "{kind} {name} has {} components, dimension is {}",
            parts.len(),
            vars.len()
        )));
    }
    let mut out = Vec::with_capacity(parts.len());
    for (i, text) in parts.iter().enumerate() {
        let jet = parse_polynomial(text, vars, cap)
            .map_err(|e| CliError::core(format!("{kind} {name} component {}", i + 1), e))?;
        if jet.valuation() == Some(0) {
            return Err(CliError::Input(format!(
                "{kind} {name} component {} has constant term",
                i + 1
            )));
        }
        out.push(jet);
    }
    Ok(out)
}

fn max_degree(jets: &[Jet]) -> u32 {
    jets.iter()
        .flat_map(|j| j.terms().map(|(k, _)| k.degree()))
        .max()
        .unwrap_or(0)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let raw: RawScenario = serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "scenario line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let d = raw.dimension;
    if d == 0 {
        return Err(CliError::Input(
            "scenario dimension must be positive".into(),
        ));
    }
    let variables = raw.variables.unwrap_or_else(|| default_names(d));
    if variables.len() != d {
        return Err(CliError::Input(format!(
            "scenario declares dimension {d} but {} variables",
            variables.len()
        )));
    }
    let mut seen = HashSet::new();
    for v in &variables {
        if !is_identifier(v) {
            return Err(CliError::Input(format!(
                "variable \"{v}\" is not an identifier"
            )));
        }
        if !seen.insert(v.clone()) {
            return Err(CliError::Input(format!("duplicate variable \"{v}\"")));
        }
    }
    let cap = raw.cap.unwrap_or(DEFAULT_CAP);
    if cap == 0 {
        return Err(CliError::Input("cap must be positive".into()));
    }

    let mut names = HashSet::new();
    let mut claim = |kind: &str, name: &str| -> Result<(), CliError> {
        if !is_identifier(name) {
            return Err(CliError::Input(format!(
                "{kind} name \"{name}\" is not an identifier"
            )));
        }
        if name == "n" || name == "exp" {
            return Err(CliError::Input(format!(
                "{kind} name \"{name}\" is reserved"
            )));
        }
        if !names.insert(name.to_string()) {
            return Err(CliError::Input(format!("duplicate {kind} name \"{name}\"")));
        }
        Ok(())
    };

    let mut maps = Vec::new();
    for (name, parts) in &raw.maps.0 {
        claim("map", name)?;
        maps.push((
            name.clone(),
            parse_components("map", name, parts, &variables, cap)?,
        ));
    }
    let mut fields = Vec::new();
    for (name, parts) in &raw.fields.0 {
        claim("field", name)?;
        fields.push((
            name.clone(),
            parse_components("field", name, parts, &variables, cap)?,
        ));
    }
    let natural_order = maps
        .iter()
        .chain(&fields)
        .map(|(_, c)| max_degree(c))
        .max()
        .unwrap_or(1)
        .max(1);

    let mut generators = Generators::new();
    for (name, comps) in maps {
        let comps = comps.iter().map(|c| c.with_order(natural_order)).collect();
        let map = FormalMap::new(comps).map_err(|e| CliError::core(format!("map {name}"), e))?;
        generators
            .add_map(&name, map)
            .map_err(|e| CliError::core(format!("map {name}"), e))?;
    }
    for (name, comps) in fields {
        let comps = comps.iter().map(|c| c.with_order(natural_order)).collect();
        let field = FormalVectorField::new(comps)
            .map_err(|e| CliError::core(format!("field {name}"), e))?;
        generators
            .add_field(&name, field)
            .map_err(|e| CliError::core(format!("field {name}"), e))?;
    }

    let mut varieties = Vec::new();
    for (name, gens) in &raw.varieties.0 {
        claim("variety", name)?;
        if gens.is_empty() {
            return Err(CliError::Input(format!("variety {name} has no generators")));
        }
        let jets = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                parse_polynomial(g, &variables, cap)
                    .map_err(|e| CliError::core(format!("variety {name} generator {}", i + 1), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let top = max_degree(&jets);
        let jets = jets.iter().map(|j| j.with_order(top)).collect();
        varieties.push(
            IdealPresentation::new(name.clone(), jets)
                .map_err(|e| CliError::core(format!("variety {name}"), e))?,
        );
    }

    let mut queries: Vec<(String, Query)> = Vec::new();
    for (name, q) in raw.queries.0 {
        if queries.iter().any(|(n, _)| *n == name) {
            return Err(CliError::Input(format!("duplicate query name \"{name}\"")));
        }
        queries.push((name, q));
    }

    Ok(Scenario {
        variables,
        cap,
        generators,
        varieties,
        queries,
        natural_order,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}
