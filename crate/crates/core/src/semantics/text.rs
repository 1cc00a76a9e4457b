//! Plain-text model files.
//!
//! ```text
//! worlds: a b c
//! r0: a b
//! r1: b c
//! val P: a c
//! root: a
//! grid: product
//! coord a = (0, 0)
//! ```
//!
//! `#` starts a comment. `coord` lines are optional; when present every
//! world needs one and the model gets a grid layout.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::Model;
use crate::frames::{Frame, GridLayout, GridTag, Relation, TwoFrame};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ModelParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ModelParseError {
    ModelParseError { line, msg: msg.into() }
}

pub fn parse_model(src: &str) -> Result<Model, ModelParseError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut r0 = Vec::new();
    let mut r1 = Vec::new();
    let mut vals: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut root = None;
    let mut tag = GridTag::Free;
    let mut coords: Vec<(usize, String, usize, usize)> = Vec::new();

    let lookup = |index: &HashMap<String, usize>, line: usize, w: &str| {
        index.get(w).copied().ok_or_else(|| err(line, format!("unknown world `{w}`")))
    };

    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.split('#').next().unwrap().trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("coord ") {
            let (name, pos) = rest.split_once('=').ok_or_else(|| err(line, "expected `coord id = (h, v)`"))?;
            let pos = pos.trim().trim_start_matches('(').trim_end_matches(')');
            let (h, v) = pos.split_once(',').ok_or_else(|| err(line, "expected `(h, v)`"))?;
            let h: usize = h.trim().parse().map_err(|_| err(line, "bad horizontal index"))?;
            let v: usize = v.trim().parse().map_err(|_| err(line, "bad vertical index"))?;
            coords.push((line, name.trim().to_string(), h, v));
            continue;
        }
        let (key, rest) = text.split_once(':').ok_or_else(|| err(line, "expected `key: ...`"))?;
        let items: Vec<&str> = rest.split_whitespace().collect();
        let key = key.trim();
        match key {
            "worlds" => {
                for w in items {
                    if index.insert(w.to_string(), labels.len()).is_some() {
                        return Err(err(line, format!("duplicate world `{w}`")));
                    }
                    labels.push(w.to_string());
                }
            }
            "r0" | "r1" => {
                if items.len() != 2 {
                    return Err(err(line, format!("`{key}` expects two worlds")));
                }
                let pair = (lookup(&index, line, items[0])?, lookup(&index, line, items[1])?);
                if key == "r0" { r0.push(pair) } else { r1.push(pair) }
            }
            "root" => {
                if items.len() != 1 {
                    return Err(err(line, "`root` expects one world"));
                }
                root = Some(lookup(&index, line, items[0])?);
            }
            "grid" => {
                tag = match items.as_slice() {
                    ["product"] => GridTag::Product,
                    ["expanding"] => GridTag::Expanding,
                    ["decreasing"] => GridTag::Decreasing,
                    ["free"] => GridTag::Free,
                    _ => return Err(err(line, "unknown grid tag")),
                };
            }
            k if k.starts_with("val ") => {
                let name = k[4..].trim().to_string();
                let ws = items
                    .iter()
                    .map(|w| lookup(&index, line, w))
                    .collect::<Result<Vec<_>, _>>()?;
                vals.entry(name).or_default().extend(ws);
            }
            other => return Err(err(line, format!("unknown key `{other}`"))),
        }
    }
    if labels.is_empty() {
        return Err(err(0, "no worlds declared"));
    }
    let n = labels.len();
    let frame = TwoFrame { r0: Relation::from_pairs(n, r0), r1: Relation::from_pairs(n, r1), labels };
    let mut model = Model::new(frame);
    for (p, ws) in vals {
        model.declare(&p);
        for w in ws {
            model.set(&p, w);
        }
    }
    model.root = root;
    if !coords.is_empty() {
        let mut at = vec![None; n];
        for (line, name, h, v) in coords {
            at[lookup(&index, line, &name)?] = Some((h, v));
        }
        let coords: Vec<(usize, usize)> = at
            .into_iter()
            .enumerate()
            .map(|(w, c)| c.ok_or_else(|| err(0, format!("world `{}` has no coord", model.frame.labels[w]))))
            .collect::<Result<_, _>>()?;
        model.layout = Some(infer_layout(&model.frame, coords, tag));
    }
    Ok(model)
}

/// Projects the two relations onto the coordinate axes.
fn infer_layout(frame: &TwoFrame, coords: Vec<(usize, usize)>, tag: GridTag) -> GridLayout {
    let hn = coords.iter().map(|c| c.0).max().unwrap() + 1;
    let vn = coords.iter().map(|c| c.1).max().unwrap() + 1;
    let mut hr = Relation::empty(hn);
    let mut vr = Relation::empty(vn);
    for (a, b) in frame.r0.pairs() {
        hr.insert(coords[a].0, coords[b].0);
    }
    for (a, b) in frame.r1.pairs() {
        vr.insert(coords[a].1, coords[b].1);
    }
    GridLayout::new(tag, Frame::new(hr), Frame::new(vr), coords)
}

pub fn print_model(m: &Model) -> String {
    let mut out = String::new();
    out.push_str("worlds:");
    for l in &m.frame.labels {
        out.push(' ');
        out.push_str(l);
    }
    out.push('\n');
    let name = |w: usize| &m.frame.labels[w];
    for (a, b) in m.frame.r0.pairs() {
        out.push_str(&format!("r0: {} {}\n", name(a), name(b)));
    }
    for (a, b) in m.frame.r1.pairs() {
        out.push_str(&format!("r1: {} {}\n", name(a), name(b)));
    }
    for (p, s) in &m.val {
        out.push_str(&format!("val {p}:"));
        for w in s.ones() {
            out.push(' ');
            out.push_str(name(w));
        }
        out.push('\n');
    }
    if let Some(r) = m.root {
        out.push_str(&format!("root: {}\n", name(r)));
    }
    if let Some(l) = &m.layout {
        out.push_str(&format!("grid: {}\n", l.tag));
        for (w, (h, v)) in l.coords.iter().enumerate() {
            out.push_str(&format!("coord {} = ({h}, {v})\n", name(w)));
        }
    }
    out
}
