//! Line-oriented structure files.
//!
//! ```text
//! # comment
//! signature
//!   rel edge 2
//! end
//! structure P2 size 3
//!   edge 0 1
//!   edge 1 2
//! end
//! supported M support 2
//!   edge 0 1
//! end
//! ```
//!
//! The signature block is optional (pure equality when absent) and must
//! precede every structure block.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{Domain, Signature, Structure};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct StructureFile {
    pub signature: Arc<Signature>,
    pub structures: Vec<Structure>,
}

impl StructureFile {
    pub fn get(&self, id: &str) -> Option<&Structure> {
        self.structures.iter().find(|s| s.id() == id)
    }
}

enum Block {
    Top,
    Signature(Vec<(String, usize)>),
    Structure {
        id: String,
        domain: Domain,
        facts: Vec<Vec<Vec<usize>>>,
        start: usize,
    },
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn number(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a natural number, found `{tok}`")))
}

pub fn parse_structures(text: &str) -> Result<StructureFile> {
    let mut signature: Option<Arc<Signature>> = None;
    let mut structures: Vec<Structure> = Vec::new();
    let mut block = Block::Top;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        block = match block {
            Block::Top => match toks.as_slice() {
                ["signature"] => {
                    if signature.is_some() || !structures.is_empty() {
                        return Err(parse_err(
                            line,
                            "signature block must come first and only once",
                        ));
                    }
                    Block::Signature(Vec::new())
                }
                ["structure", id, "size", n] => {
                    let sig = signature.get_or_insert_with(|| Arc::new(Signature::empty()));
                    Block::Structure {
                        id: id.to_string(),
                        domain: Domain::Finite(number(n, line)?),
                        facts: vec![Vec::new(); sig.relations().len()],
                        start: line,
                    }
                }
                ["supported", id, "support", s] => {
                    let sig = signature.get_or_insert_with(|| Arc::new(Signature::empty()));
                    Block::Structure {
                        id: id.to_string(),
                        domain: Domain::Supported(number(s, line)?),
                        facts: vec![Vec::new(); sig.relations().len()],
                        start: line,
                    }
                }
                _ => return Err(parse_err(line, format!("unexpected `{content}`"))),
            },
            Block::Signature(mut rels) => match toks.as_slice() {
                ["end"] => {
                    let sig = Signature::new(rels).map_err(|e| match e {
                        Error::Schema { msg, .. } => Error::Schema { line, msg },
                        other => other,
                    })?;
                    signature = Some(Arc::new(sig));
                    Block::Top
                }
                ["rel", name, arity] => {
                    rels.push((name.to_string(), number(arity, line)?));
                    Block::Signature(rels)
                }
                _ => return Err(parse_err(line, format!("expected `rel <name> <arity>`, found `{content}`"))),
            },
            Block::Structure {
                id,
                domain,
                mut facts,
                start,
            } => {
                let sig = signature.clone().expect("set when the block opened");
                if toks == ["end"] {
                    if structures.iter().any(|s| s.id() == id) {
                        return Err(Error::Schema {
                            line: start,
                            msg: format!("structure `{id}` defined twice"),
                        });
                    }
                    let s = Structure::new(id, sig, domain, facts).map_err(|e| Error::Schema {
                        line: start,
                        msg: e.to_string(),
                    })?;
                    structures.push(s);
                    Block::Top
                } else {
                    let rel = sig.index_of(toks[0]).ok_or_else(|| Error::Schema {
                        line,
                        msg: format!("unknown relation `{}`", toks[0]),
                    })?;
                    let arity = sig.relations()[rel].arity;
                    if toks.len() - 1 != arity {
                        return Err(Error::Schema {
                            line,
                            msg: format!(
                                "relation `{}` has arity {arity}, fact has {} arguments",
                                toks[0],
                                toks.len() - 1
                            ),
                        });
                    }
                    let args = toks[1..]
                        .iter()
                        .map(|t| number(t, line))
                        .collect::<Result<Vec<_>>>()?;
                    let bound = domain.bound();
                    if let Some(&e) = args.iter().find(|&&e| e >= bound) {
                        return Err(Error::Range {
                            line,
                            element: e,
                            size: bound,
                        });
                    }
                    facts[rel].push(args);
                    Block::Structure {
                        id,
                        domain,
                        facts,
                        start,
                    }
                }
            }
        };
    }
    match block {
        Block::Top => Ok(StructureFile {
            signature: signature.unwrap_or_else(|| Arc::new(Signature::empty())),
            structures,
        }),
        _ => Err(parse_err(text.lines().count(), "unterminated block (missing `end`)")),
    }
}

/// Normalized text form: facts sorted lexicographically per relation, in
/// signature order.
pub fn serialize_structures(signature: &Signature, structures: &[Structure]) -> String {
    let mut out = String::new();
    out.push_str("signature\n");
    for r in signature.relations() {
        let _ = writeln!(out, "  rel {} {}", r.name, r.arity);
    }
    out.push_str("end\n");
    for s in structures {
        match s.domain() {
            Domain::Finite(n) => {
                let _ = writeln!(out, "structure {} size {n}", s.id());
            }
            Domain::Supported(n) => {
                let _ = writeln!(out, "supported {} support {n}", s.id());
            }
        }
        for (r, rel) in signature.relations().iter().enumerate() {
            for t in s.facts(r) {
                out.push_str("  ");
                out.push_str(&rel.name);
                for e in t {
                    let _ = write!(out, " {e}");
                }
                out.push('\n');
            }
        }
        out.push_str("end\n");
    }
    out
}
