//! Text and JSON encodings of structures and chains.
//!
//! Text format, one item per line, `#` starts a comment:
//!
//! ```text
//! sig E:2
//! size 3
//! props E symmetric irreflexive
//! sorts 0 0 1
//! rel E 0 1
//! rel E 1 0
//! ```
//!
//! `props` and `sorts` lines are optional. Tuples are written in
//! lexicographic order, so equal structures have byte-identical text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::builder::{ClassName, StructureChain};
use crate::error::{Error, Result};
use crate::structure::{FinStructure, RelationSymbol, Signature, Tables, TUPLE_SPACE_LIMIT};

fn total_tuples(s: &FinStructure) -> Result<usize> {
    let total: usize = (0..s.signature().len()).map(|r| s.relation_len(r)).sum();
    if total > TUPLE_SPACE_LIMIT {
        return Err(Error::Resource(format!("{total} tuples are too many to serialize")));
    }
    Ok(total)
}

pub fn to_text(s: &FinStructure) -> Result<String> {
    total_tuples(s)?;
    let mut out = String::from("sig");
    for r in s.signature().relations() {
        write!(out, " {}:{}", r.name, r.arity).unwrap();
    }
    writeln!(out, "\nsize {}", s.size()).unwrap();
    for r in s.signature().relations() {
        if r.symmetric || r.irreflexive {
            out.push_str("props ");
            out.push_str(&r.name);
            if r.symmetric {
                out.push_str(" symmetric");
            }
            if r.irreflexive {
                out.push_str(" irreflexive");
            }
            out.push('\n');
        }
    }
    if let Some(sorts) = s.sorts() {
        out.push_str("sorts");
        for l in sorts {
            write!(out, " {l}").unwrap();
        }
        out.push('\n');
    }
    for (i, r) in s.signature().relations().iter().enumerate() {
        for t in s.tuples(i) {
            out.push_str("rel ");
            out.push_str(&r.name);
            for x in t {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn from_text(text: &str) -> Result<FinStructure> {
    let mut relations: Vec<RelationSymbol> = Vec::new();
    let mut have_sig = false;
    let mut size: Option<usize> = None;
    let mut sorts: Option<Vec<u32>> = None;
    let mut tables = Tables::new();
    let num = |line: usize, x: &str| {
        x.parse::<usize>().map_err(|_| Error::Parse {
            line,
            message: format!("`{x}` is not a natural number"),
        })
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let head = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        let parse_err = |message: String| Error::Parse { line, message };
        match head {
            "sig" => {
                if have_sig {
                    return Err(parse_err("repeated `sig` line".into()));
                }
                have_sig = true;
                for w in rest {
                    let (name, arity) = w
                        .split_once(':')
                        .ok_or_else(|| parse_err(format!("`{w}` is not name:arity")))?;
                    relations.push(RelationSymbol::new(name, num(line, arity)?));
                }
            }
            "size" => {
                if rest.len() != 1 {
                    return Err(parse_err("`size` takes one number".into()));
                }
                size = Some(num(line, rest[0])?);
            }
            "props" => {
                let (name, flags) = rest
                    .split_first()
                    .ok_or_else(|| parse_err("`props` needs a relation name".into()))?;
                let r = relations
                    .iter_mut()
                    .find(|r| r.name == *name)
                    .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
                for f in flags {
                    match *f {
                        "symmetric" => r.symmetric = true,
                        "irreflexive" => r.irreflexive = true,
                        other => return Err(parse_err(format!("unknown property `{other}`"))),
                    }
                }
            }
            "sorts" => {
                sorts = Some(
                    rest.iter()
                        .map(|x| num(line, x).map(|v| v as u32))
                        .collect::<Result<_>>()?,
                );
            }
            "rel" => {
                let (name, tuple) = rest
                    .split_first()
                    .ok_or_else(|| parse_err("`rel` needs a relation name".into()))?;
                let t = tuple.iter().map(|x| num(line, x)).collect::<Result<Vec<_>>>()?;
                tables.entry(name.to_string()).or_default().push(t);
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }
    if !have_sig {
        return Err(Error::Parse {
            line: 0,
            message: "missing `sig` line".into(),
        });
    }
    let size = size.ok_or(Error::Parse {
        line: 0,
        message: "missing `size` line".into(),
    })?;
    FinStructure::with_sorts(Signature::new(relations)?, size, tables, sorts)
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub signature: Vec<RelationSymbol>,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sorts: Option<Vec<u32>>,
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
}

impl StructureJson {
    pub fn from_structure(s: &FinStructure) -> Result<Self> {
        total_tuples(s)?;
        Ok(StructureJson {
            signature: s.signature().relations().to_vec(),
            size: s.size(),
            sorts: s.sorts().map(<[u32]>::to_vec),
            relations: s.tables(),
        })
    }

    pub fn into_structure(self) -> Result<FinStructure> {
        FinStructure::with_sorts(Signature::new(self.signature)?, self.size, self.relations, self.sorts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub class: ClassName,
    #[serde(default)]
    pub seed: Option<u64>,
    pub saturation: Vec<usize>,
    pub levels: Vec<StructureJson>,
}

impl ChainJson {
    pub fn from_chain(c: &StructureChain) -> Result<Self> {
        Ok(ChainJson {
            class: c.class(),
            seed: c.seed(),
            saturation: c.saturation().to_vec(),
            levels: c
                .levels()
                .iter()
                .map(StructureJson::from_structure)
                .collect::<Result<_>>()?,
        })
    }

    pub fn into_chain(self) -> Result<StructureChain> {
        let levels = self
            .levels
            .into_iter()
            .map(StructureJson::into_structure)
            .collect::<Result<_>>()?;
        StructureChain::new(self.class, levels, self.saturation, self.seed)
    }
}

pub fn structure_to_json(s: &FinStructure) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StructureJson::from_structure(s)?)?)
}

pub fn structure_from_json(text: &str) -> Result<FinStructure> {
    serde_json::from_str::<StructureJson>(text)?.into_structure()
}

pub fn chain_to_json(c: &StructureChain) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ChainJson::from_chain(c)?)?)
}

pub fn chain_from_json(text: &str) -> Result<StructureChain> {
    serde_json::from_str::<ChainJson>(text)?.into_chain()
}

/// Reads a chain, a single JSON structure, or a text structure, returning
/// the list of levels (a single structure is one level).
pub fn load_levels(text: &str) -> Result<Vec<FinStructure>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("levels").is_some() {
            let chain: ChainJson = serde_json::from_value(value)?;
            return chain
                .levels
                .into_iter()
                .map(StructureJson::into_structure)
                .collect();
        }
        let s: StructureJson = serde_json::from_value(value)?;
        return Ok(vec![s.into_structure()?]);
    }
    Ok(vec![from_text(text)?])
}
