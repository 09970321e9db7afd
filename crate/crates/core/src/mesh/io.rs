//! Neutral mesh file format.
//!
//! ```text
//! # comment (anything after `#` is ignored)
//! NODES
//! <id> <x> <y> <z>
//! ELEMENTS
//! <id> HEX20|TET10 <node id> ... (20 or 10 ids, one line)
//! DISPLACEMENTS
//! <node id> <ux> <uy> <uz>
//! ```
//!
//! Tokens are whitespace separated and section names are case-insensitive.
//! Node ordering inside an element follows [`crate::mesh::reference_nodes`]
//! (corners first, then mid-edge nodes). Nodes without a displacement line
//! get a zero displacement; a displacement line for an unknown node is an
//! error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use thiserror::Error;

use super::{Element, ElementId, Mesh, MeshError, Node, NodeId};

#[derive(Debug, Error)]
pub enum MeshReadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn syntax(line: usize, message: impl Into<String>) -> MeshReadError {
    MeshReadError::Syntax { line, message: message.into() }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Nodes,
    Elements,
    Displacements,
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, MeshReadError> {
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_mesh(text: &str) -> Result<Mesh, MeshReadError> {
    let mut section = Section::None;
    let mut nodes = Vec::new();
    let mut elements = Vec::new();
    let mut displacements: HashMap<NodeId, (usize, Vector3<f64>)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() == 1 {
            let next = match toks[0].to_ascii_uppercase().as_str() {
                "NODES" => Some(Section::Nodes),
                "ELEMENTS" => Some(Section::Elements),
                "DISPLACEMENTS" => Some(Section::Displacements),
                _ => None,
            };
            if let Some(s) = next {
                section = s;
                continue;
            }
        }
        match section {
            Section::None => return Err(syntax(line, "data before any section header")),
            Section::Nodes => {
                if toks.len() != 4 {
                    return Err(syntax(line, format!("node line needs 4 fields, found {}", toks.len())));
                }
                let id = NodeId(parse_num(toks[0], line, "node id")?);
                let c: Vec<f64> =
                    toks[1..].iter().map(|t| parse_num(t, line, "coordinate")).collect::<Result<_, _>>()?;
                nodes.push(Node { id, coords: Vector3::new(c[0], c[1], c[2]), displacement: Vector3::zeros() });
            }
            Section::Elements => {
                if toks.len() < 2 {
                    return Err(syntax(line, "element line needs an id and a kind"));
                }
                let id = ElementId(parse_num(toks[0], line, "element id")?);
                let kind = toks[1].parse().map_err(|e: String| syntax(line, e))?;
                let node_ids =
                    toks[2..].iter().map(|t| parse_num(t, line, "node id").map(NodeId)).collect::<Result<_, _>>()?;
                elements.push(Element { id, kind, node_ids });
            }
            Section::Displacements => {
                if toks.len() != 4 {
                    return Err(syntax(line, format!("displacement line needs 4 fields, found {}", toks.len())));
                }
                let id = NodeId(parse_num(toks[0], line, "node id")?);
                let u: Vec<f64> =
                    toks[1..].iter().map(|t| parse_num(t, line, "displacement")).collect::<Result<_, _>>()?;
                if displacements.insert(id, (line, Vector3::new(u[0], u[1], u[2]))).is_some() {
                    return Err(syntax(line, format!("duplicate displacement for node {id}")));
                }
            }
        }
    }
    let known: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
    let mut pending: Vec<_> = displacements.into_iter().collect();
    pending.sort_by_key(|(_, (line, _))| *line);
    for (id, (line, u)) in pending {
        match known.get(&id) {
            Some(&i) => nodes[i].displacement = u,
            None => return Err(syntax(line, format!("displacement for unknown node {id}"))),
        }
    }
    Ok(Mesh::new(nodes, elements)?)
}

pub fn read_mesh(path: &Path) -> Result<Mesh, MeshReadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| MeshReadError::Io { path: path.display().to_string(), source })?;
    parse_mesh(&text)
}

/// Serialize in the neutral format. Floats use the shortest representation
/// that parses back to the same value.
pub fn format_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("# lcfpost neutral mesh\nNODES\n");
    for n in mesh.nodes() {
        let _ = writeln!(out, "{} {:?} {:?} {:?}", n.id, n.coords.x, n.coords.y, n.coords.z);
    }
    out.push_str("ELEMENTS\n");
    for e in mesh.elements() {
        let _ = write!(out, "{} {}", e.id, e.kind.tag());
        for n in &e.node_ids {
            let _ = write!(out, " {n}");
        }
        out.push('\n');
    }
    out.push_str("DISPLACEMENTS\n");
    for n in mesh.nodes() {
        let u = n.displacement;
        let _ = writeln!(out, "{} {:?} {:?} {:?}", n.id, u.x, u.y, u.z);
    }
    out
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, format_mesh(mesh))
}
