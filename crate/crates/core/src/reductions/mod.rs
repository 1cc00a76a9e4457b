//! Compilers from counter machines to bimodal formulas, and the syntactic
//! translations between frame classes.

mod gadgets;
pub mod names;
mod targets;
mod translate;

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formula::{conj, parse, print, Formula};
use crate::machines::{print_machine, Machine};

pub use gadgets::{
    compile_counter_layer, compile_grid, compile_interval, compile_op_gadget, dec, fix, inc, GridVariant, Variant,
};
pub use targets::{compile_machine, phi_m_fw, Target};
pub use translate::{bullet_translate, dagger, diff_to_linear, product_to_decreasing, relativize, DomainKind};

/// Encoding variables and what they stand for, in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarDictionary {
    entries: Vec<(String, String)>,
}

impl VarDictionary {
    pub fn insert(&mut self, name: &str, meaning: &str) {
        if !self.contains(name) {
            self.entries.push((name.to_string(), meaning.to_string()));
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    pub fn meaning(&self, name: &str) -> Option<&str> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, m)| m.as_str())
    }

    /// The variable standing for `meaning`, if any.
    pub fn name_of(&self, meaning: &str) -> Option<&str> {
        self.entries.iter().find(|(_, m)| m == meaning).map(|(n, _)| n.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn merge(&mut self, other: &VarDictionary) {
        for (n, m) in &other.entries {
            self.insert(n, m);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledEncoding {
    pub target: String,
    pub formula: Formula,
    pub dict: VarDictionary,
    pub conjuncts: Vec<(String, Formula)>,
    /// SHA-256 of the canonical machine text, when compiled from a machine.
    pub machine_hash: Option<String>,
}

impl CompiledEncoding {
    pub fn new(target: String, conjuncts: Vec<(String, Formula)>, dict: VarDictionary) -> Self {
        let formula = conj(conjuncts.iter().map(|(_, f)| f.clone()));
        let enc = CompiledEncoding { target, formula, dict, conjuncts, machine_hash: None };
        debug_assert!(enc.labels_unique(), "duplicate conjunct labels in {}", enc.target);
        enc
    }

    pub fn labels(&self) -> Vec<&str> {
        self.conjuncts.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn conjunct(&self, label: &str) -> Option<&Formula> {
        self.conjuncts.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }

    fn labels_unique(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.conjuncts.iter().all(|(l, _)| seen.insert(l))
    }

    /// Appends the conjuncts and dictionary of `other`.
    pub fn extend(&mut self, other: CompiledEncoding) {
        self.dict.merge(&other.dict);
        self.conjuncts.extend(other.conjuncts);
        self.formula = conj(self.conjuncts.iter().map(|(_, f)| f.clone()));
    }

    /// Looks up the variable for a meaning such as `S_q0` or `C1+`.
    pub fn var(&self, meaning: &str) -> Option<&str> {
        self.dict.name_of(meaning)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# bimodal encoding\n");
        out.push_str(&format!("target: {}\n", self.target));
        out.push_str(&format!("machine-sha256: {}\n", self.machine_hash.as_deref().unwrap_or("-")));
        for (n, m) in &self.dict.entries {
            out.push_str(&format!("var {n} = {m}\n"));
        }
        for (l, f) in &self.conjuncts {
            out.push_str(&format!("conjunct {l}\n  {}\n", print(f)));
        }
        out
    }

    pub fn from_text(src: &str) -> Result<Self, EncodingError> {
        let mut target = None;
        let mut hash = None;
        let mut dict = VarDictionary::default();
        let mut conjuncts = Vec::new();
        let mut pending: Option<(usize, String)> = None;
        for (k, raw) in src.lines().enumerate() {
            let line = k + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if let Some((_, label)) = pending.take() {
                let f = parse(text).map_err(|e| EncodingError::Formula { line, label: label.clone(), source: e })?;
                conjuncts.push((label, f));
                continue;
            }
            if let Some(t) = text.strip_prefix("target:") {
                target = Some(t.trim().to_string());
            } else if let Some(h) = text.strip_prefix("machine-sha256:") {
                let h = h.trim();
                hash = if h == "-" { None } else { Some(h.to_string()) };
            } else if let Some(rest) = text.strip_prefix("var ") {
                let (n, m) = rest.split_once('=').ok_or(EncodingError::Syntax { line, msg: "expected `var name = meaning`".into() })?;
                dict.insert(n.trim(), m.trim());
            } else if let Some(label) = text.strip_prefix("conjunct ") {
                pending = Some((line, label.trim().to_string()));
            } else {
                return Err(EncodingError::Syntax { line, msg: format!("unexpected `{text}`") });
            }
        }
        if let Some((line, label)) = pending {
            return Err(EncodingError::Syntax { line, msg: format!("conjunct `{label}` has no formula") });
        }
        let target = target.ok_or(EncodingError::Syntax { line: 0, msg: "missing `target:`".into() })?;
        let mut enc = CompiledEncoding::new(target, conjuncts, dict);
        if !enc.labels_unique() {
            return Err(EncodingError::Syntax { line: 0, msg: "duplicate conjunct labels".into() });
        }
        enc.machine_hash = hash;
        Ok(enc)
    }
}

impl fmt::Display for CompiledEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn machine_hash(m: &Machine) -> String {
    hex::encode(Sha256::digest(print_machine(m).as_bytes()))
}

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: conjunct `{label}`: {source}")]
    Formula {
        line: usize,
        label: String,
        #[source]
        source: crate::formula::ParseError,
    },
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
}

/// Map from meaning to variable name, for callers that build valuations.
pub fn meaning_map(dict: &VarDictionary) -> BTreeMap<String, String> {
    dict.entries().iter().map(|(n, m)| (m.clone(), n.clone())).collect()
}
