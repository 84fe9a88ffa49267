//! Molecular graph ingestion: a self-contained SMILES subset, a plain JSON
//! graph schema, per-atom subatomic composition, and structural annotation.
//!
//! The SMILES subset covers organic-subset atoms (B, C, N, O, P, S, F, Cl,
//! Br, I and aromatic b, c, n, o, p, s), bracket atoms with isotope and
//! charge, bond symbols `- = # :`, branches, and ring closures (digits and
//! `%nn`). No stereochemistry, no explicit hydrogen atoms, no `.` separator.
//! Implicit hydrogens are never materialized.

use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Default element table shipped with the crate: symbol, atomic number,
/// most-abundant mass number.
const DEFAULT_ELEMENTS: &str = include_str!("../data/elements.txt");

#[derive(Debug, Error, PartialEq)]
pub enum MolError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("duplicate bond between atoms {a} and {b}")]
    DuplicateBond { a: usize, b: usize },
    #[error("unknown element '{0}'")]
    UnknownElement(String),
    #[error("isotope {isotope} below atomic number of {symbol}")]
    InvalidIsotope { symbol: String, isotope: u32 },
    #[error("charge {charge} leaves element {symbol} with negative electron count")]
    InvalidCharge { symbol: String, charge: i32 },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

fn syntax(position: usize, message: impl Into<String>) -> MolError {
    MolError::Syntax {
        position,
        message: message.into(),
    }
}

/// Table mapping element symbols to atomic number and most-abundant mass
/// number. Extendable by loading a file with one `symbol Z A` row per line.
#[derive(Debug, Clone)]
pub struct ElementTable {
    entries: BTreeMap<String, (u32, u32)>,
}

impl ElementTable {
    pub fn from_str(text: &str) -> Result<Self, MolError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str, what: &str| {
                s.parse::<u32>().map_err(|_| MolError::Schema {
                    path: format!("elements line {}", lineno + 1),
                    message: format!("bad {what} '{s}'"),
                })
            };
            if fields.len() != 3 {
                return Err(MolError::Schema {
                    path: format!("elements line {}", lineno + 1),
                    message: "expected 'symbol Z A'".into(),
                });
            }
            let z = parse(fields[1], "atomic number")?;
            let a = parse(fields[2], "mass number")?;
            entries.insert(fields[0].to_string(), (z, a));
        }
        Ok(ElementTable { entries })
    }

    pub fn lookup(&self, symbol: &str) -> Option<(u32, u32)> {
        self.entries.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.entries.contains_key(symbol)
    }
}

impl Default for ElementTable {
    fn default() -> Self {
        ElementTable::from_str(DEFAULT_ELEMENTS).expect("builtin element table is well formed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn one_hot(self) -> [f64; 4] {
        let mut v = [0.0; 4];
        v[self as usize] = 1.0;
        v
    }
}

impl fmt::Display for BondOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BondOrder::Single => "single",
            BondOrder::Double => "double",
            BondOrder::Triple => "triple",
            BondOrder::Aromatic => "aromatic",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub index: usize,
    pub element: String,
    pub formal_charge: i32,
    pub isotope: Option<u32>,
    pub aromatic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    /// Endpoint atom indices, stored with `a < b`.
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if atom == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolecularGraph {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
}

impl MolecularGraph {
    /// Build a graph, enforcing simplicity and index validity.
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self, MolError> {
        let n = atoms.len();
        let mut seen = BTreeSet::new();
        for bond in &bonds {
            if bond.a == bond.b {
                return Err(MolError::Schema {
                    path: "bonds".into(),
                    message: format!("self-loop on atom {}", bond.a),
                });
            }
            if bond.a >= n || bond.b >= n {
                return Err(MolError::Schema {
                    path: "bonds".into(),
                    message: format!("bond ({}, {}) references missing atom", bond.a, bond.b),
                });
            }
            if !seen.insert((bond.a.min(bond.b), bond.a.max(bond.b))) {
                return Err(MolError::DuplicateBond {
                    a: bond.a.min(bond.b),
                    b: bond.a.max(bond.b),
                });
            }
        }
        Ok(MolecularGraph { atoms, bonds })
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.atoms.len()];
        for bond in &self.bonds {
            deg[bond.a] += 1;
            deg[bond.b] += 1;
        }
        deg
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for bond in &self.bonds {
            adj[bond.a].push(bond.b);
            adj[bond.b].push(bond.a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn n_components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.atoms.len()];
        let mut components = 0;
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }

    /// Relabel atoms so that `perm[new_index] = old_index`. Bonds are
    /// remapped and sorted by endpoints.
    pub fn relabel(&self, perm: &[usize]) -> MolecularGraph {
        assert_eq!(perm.len(), self.atoms.len());
        let mut new_of_old = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            new_of_old[old] = new;
        }
        let atoms = perm
            .iter()
            .enumerate()
            .map(|(new, &old)| {
                let mut atom = self.atoms[old].clone();
                atom.index = new;
                atom
            })
            .collect();
        let mut bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|bond| {
                let (a, b) = (new_of_old[bond.a], new_of_old[bond.b]);
                Bond {
                    a: a.min(b),
                    b: a.max(b),
                    order: bond.order,
                }
            })
            .collect();
        bonds.sort_unstable_by_key(|bond| (bond.a, bond.b));
        MolecularGraph {
            atoms,
            bonds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomComposition {
    pub protons: u32,
    pub neutrons: u32,
    pub electrons: u32,
}

/// Subatomic composition of one atom: `(Z, A - Z, Z - charge)` with `A` the
/// bracket isotope when present, else the table's most-abundant mass number.
pub fn element_composition(
    table: &ElementTable,
    element: &str,
    formal_charge: i32,
    isotope: Option<u32>,
) -> Result<AtomComposition, MolError> {
    let (z, a_default) = table
        .lookup(element)
        .ok_or_else(|| MolError::UnknownElement(element.to_string()))?;
    let a = isotope.unwrap_or(a_default);
    if a < z {
        return Err(MolError::InvalidIsotope {
            symbol: element.to_string(),
            isotope: a,
        });
    }
    let electrons = z as i64 - formal_charge as i64;
    if electrons < 0 {
        return Err(MolError::InvalidCharge {
            symbol: element.to_string(),
            charge: formal_charge,
        });
    }
    Ok(AtomComposition {
        protons: z,
        neutrons: a - z,
        electrons: electrons as u32,
    })
}

// ---------------------------------------------------------------------------
// SMILES parsing

struct SmilesParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    table: &'a ElementTable,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    bond_pairs: BTreeSet<(usize, usize)>,
    prev: Option<usize>,
    branch_stack: Vec<Option<usize>>,
    pending_bond: Option<(BondOrder, usize)>,
    // closure digit -> (atom, explicit order, opening position)
    open_rings: BTreeMap<u32, (usize, Option<BondOrder>, usize)>,
}

impl<'a> SmilesParser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn add_bond(&mut self, a: usize, b: usize, order: BondOrder, pos: usize) -> Result<(), MolError> {
        if a == b {
            return Err(syntax(pos, "ring closure forms a self-loop"));
        }
        let key = (a.min(b), a.max(b));
        if !self.bond_pairs.insert(key) {
            return Err(MolError::DuplicateBond { a: key.0, b: key.1 });
        }
        self.bonds.push(Bond {
            a: key.0,
            b: key.1,
            order,
        });
        Ok(())
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn finish_atom(&mut self, atom: Atom) -> Result<(), MolError> {
        let idx = atom.index;
        self.atoms.push(atom);
        if let Some(prev) = self.prev {
            let order = match self.pending_bond.take() {
                Some((order, _)) => order,
                None => self.default_order(prev, idx),
            };
            self.add_bond(prev, idx, order, self.pos)?;
        } else if let Some((_, pos)) = self.pending_bond.take() {
            return Err(syntax(pos, "bond symbol with no preceding atom"));
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, digit: u32, pos: usize) -> Result<(), MolError> {
        let here = match self.prev {
            Some(atom) => atom,
            None => return Err(syntax(pos, "ring closure before any atom")),
        };
        let explicit = self.pending_bond.take().map(|(order, _)| order);
        match self.open_rings.remove(&digit) {
            Some((there, open_order, open_pos)) => {
                let order = match (open_order, explicit) {
                    (Some(x), Some(y)) if x != y => {
                        return Err(syntax(pos, format!("conflicting ring bond orders for closure {digit}")));
                    }
                    (Some(x), _) | (None, Some(x)) => x,
                    (None, None) => self.default_order(there, here),
                };
                let _ = open_pos;
                self.add_bond(there, here, order, pos)
            }
            None => {
                self.open_rings.insert(digit, (here, explicit, pos));
                Ok(())
            }
        }
    }

    fn parse_bracket_atom(&mut self) -> Result<Atom, MolError> {
        let open_pos = self.pos;
        self.pos += 1; // consume '['
        let mut isotope: Option<u32> = None;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let mut value: u32 = 0;
            while let Some(c) = self.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                value = value * 10 + (c - b'0') as u32;
                self.pos += 1;
            }
            isotope = Some(value);
        }
        let sym_pos = self.pos;
        let (element, aromatic) = self.parse_element_symbol(true)?;
        if element == "H" {
            return Err(syntax(sym_pos, "explicit hydrogen atoms are not supported"));
        }
        // Optional hydrogen count, accepted and discarded (hydrogens stay implicit).
        if self.peek() == Some(b'H') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let mut magnitude: i32 = 0;
                while let Some(c) = self.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    magnitude = magnitude * 10 + (c - b'0') as i32;
                    self.pos += 1;
                }
                charge = unit * magnitude;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    charge += unit;
                    self.pos += 1;
                }
            }
        }
        if self.peek() != Some(b']') {
            return Err(syntax(self.pos, "malformed bracket atom, expected ']'"));
        }
        self.pos += 1;
        if let Some(a) = isotope {
            let (z, _) = self
                .table
                .lookup(&element)
                .ok_or_else(|| MolError::UnknownElement(element.clone()))?;
            if a < z {
                return Err(MolError::InvalidIsotope {
                    symbol: element,
                    isotope: a,
                });
            }
        }
        let _ = open_pos;
        Ok(Atom {
            index: self.atoms.len(),
            element,
            formal_charge: charge,
            isotope,
            aromatic,
        })
    }

    /// Parse an element symbol at the cursor. `in_bracket` allows any table
    /// element; outside brackets only the organic subset is legal.
    fn parse_element_symbol(&mut self, in_bracket: bool) -> Result<(String, bool), MolError> {
        let pos = self.pos;
        let c = self.peek().ok_or_else(|| syntax(pos, "expected element symbol"))?;
        // Two-letter symbols first.
        if c.is_ascii_uppercase() {
            if let Some(next) = self.bytes.get(self.pos + 1).copied() {
                if next.is_ascii_lowercase() {
                    let two = String::from_utf8_lossy(&self.bytes[self.pos..self.pos + 2]).to_string();
                    if self.table.contains(&two) {
                        self.pos += 2;
                        return Ok((two, false));
                    }
                }
            }
            let one = (c as char).to_string();
            if self.table.contains(&one) && (in_bracket || "BCNOPSFI".contains(c as char)) {
                self.pos += 1;
                return Ok((one, false));
            }
            return Err(MolError::UnknownElement(
                String::from_utf8_lossy(&self.bytes[pos..(pos + 2).min(self.bytes.len())]).to_string(),
            ));
        }
        if c.is_ascii_lowercase() && b"bcnops".contains(&c) {
            self.pos += 1;
            return Ok(((c as char).to_uppercase().to_string(), true));
        }
        Err(syntax(pos, format!("unexpected character '{}'", c as char)))
    }

    fn run(mut self) -> Result<MolecularGraph, MolError> {
        while let Some(c) = self.peek() {
            let pos = self.pos;
            match c {
                b'(' => {
                    if self.prev.is_none() {
                        return Err(syntax(pos, "branch before any atom"));
                    }
                    self.branch_stack.push(self.prev);
                    self.pos += 1;
                }
                b')' => {
                    if let Some((_, bond_pos)) = self.pending_bond.take() {
                        return Err(syntax(bond_pos, "dangling bond symbol before ')'"));
                    }
                    match self.branch_stack.pop() {
                        Some(prev) => self.prev = prev,
                        None => return Err(syntax(pos, "unbalanced ')'")),
                    }
                    self.pos += 1;
                }
                b'-' => {
                    self.pending_bond = Some((BondOrder::Single, pos));
                    self.pos += 1;
                }
                b'=' => {
                    self.pending_bond = Some((BondOrder::Double, pos));
                    self.pos += 1;
                }
                b'#' => {
                    self.pending_bond = Some((BondOrder::Triple, pos));
                    self.pos += 1;
                }
                b':' => {
                    self.pending_bond = Some((BondOrder::Aromatic, pos));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure((c - b'0') as u32, pos)?;
                }
                b'%' => {
                    let d1 = self.bytes.get(self.pos + 1).copied();
                    let d2 = self.bytes.get(self.pos + 2).copied();
                    match (d1, d2) {
                        (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                            self.pos += 3;
                            let digit = (x - b'0') as u32 * 10 + (y - b'0') as u32;
                            self.ring_closure(digit, pos)?;
                        }
                        _ => return Err(syntax(pos, "'%' must be followed by two digits")),
                    }
                }
                b'[' => {
                    let atom = self.parse_bracket_atom()?;
                    self.finish_atom(atom)?;
                }
                _ => {
                    let (element, aromatic) = self.parse_element_symbol(false)?;
                    let atom = Atom {
                        index: self.atoms.len(),
                        element,
                        formal_charge: 0,
                        isotope: None,
                        aromatic,
                    };
                    self.finish_atom(atom)?;
                }
            }
        }
        if let Some((_, pos)) = self.pending_bond {
            return Err(syntax(pos, "dangling bond symbol at end of input"));
        }
        if !self.branch_stack.is_empty() {
            return Err(syntax(self.bytes.len(), "unbalanced '(': branch never closed"));
        }
        if let Some((&digit, &(_, _, pos))) = self.open_rings.iter().next() {
            return Err(syntax(pos, format!("unmatched ring closure {digit}")));
        }
        MolecularGraph::new(self.atoms, self.bonds)
    }
}

/// Parse a SMILES string (subset grammar) into a heavy-atom molecular graph.
pub fn parse_smiles(text: &str) -> Result<MolecularGraph, MolError> {
    parse_smiles_with(text, &ElementTable::default())
}

pub fn parse_smiles_with(text: &str, table: &ElementTable) -> Result<MolecularGraph, MolError> {
    if text.is_empty() {
        return Err(syntax(0, "empty input"));
    }
    if !text.is_ascii() {
        return Err(syntax(0, "input must be ASCII"));
    }
    SmilesParser {
        bytes: text.as_bytes(),
        pos: 0,
        table,
        atoms: Vec::new(),
        bonds: Vec::new(),
        bond_pairs: BTreeSet::new(),
        prev: None,
        branch_stack: Vec::new(),
        pending_bond: None,
        open_rings: BTreeMap::new(),
    }
    .run()
}

// ---------------------------------------------------------------------------
// Plain graph schema (JSON)

#[derive(Deserialize)]
struct GraphFileAtom {
    element: String,
    #[serde(default)]
    charge: i32,
    #[serde(default)]
    isotope: Option<u32>,
    #[serde(default)]
    aromatic: bool,
}

#[derive(Deserialize)]
struct GraphFileBond {
    a: usize,
    b: usize,
    #[serde(default = "default_order")]
    order: String,
}

fn default_order() -> String {
    "single".into()
}

#[derive(Deserialize)]
struct GraphFile {
    atoms: Vec<GraphFileAtom>,
    bonds: Vec<GraphFileBond>,
}

/// Parse the plain JSON graph schema:
/// `{"atoms":[{"element","charge","isotope","aromatic"}],"bonds":[{"a","b","order"}]}`.
pub fn parse_graph_file(text: &str) -> Result<MolecularGraph, MolError> {
    parse_graph_file_with(text, &ElementTable::default())
}

pub fn parse_graph_file_with(text: &str, table: &ElementTable) -> Result<MolecularGraph, MolError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| MolError::Schema {
        path: "$".into(),
        message: e.to_string(),
    })?;
    let n = file.atoms.len();
    let mut atoms = Vec::with_capacity(n);
    for (i, atom) in file.atoms.into_iter().enumerate() {
        if !table.contains(&atom.element) {
            return Err(MolError::Schema {
                path: format!("atoms[{i}].element"),
                message: format!("unknown element '{}'", atom.element),
            });
        }
        if let Some(a) = atom.isotope {
            let (z, _) = table.lookup(&atom.element).unwrap();
            if a < z {
                return Err(MolError::Schema {
                    path: format!("atoms[{i}].isotope"),
                    message: format!("isotope {a} below atomic number {z}"),
                });
            }
        }
        atoms.push(Atom {
            index: i,
            element: atom.element,
            formal_charge: atom.charge,
            isotope: atom.isotope,
            aromatic: atom.aromatic,
        });
    }
    let mut bonds = Vec::with_capacity(file.bonds.len());
    for (i, bond) in file.bonds.into_iter().enumerate() {
        let order = match bond.order.as_str() {
            "single" => BondOrder::Single,
            "double" => BondOrder::Double,
            "triple" => BondOrder::Triple,
            "aromatic" => BondOrder::Aromatic,
            other => {
                return Err(MolError::Schema {
                    path: format!("bonds[{i}].order"),
                    message: format!("unknown bond order '{other}'"),
                })
            }
        };
        if bond.a >= n || bond.b >= n {
            return Err(MolError::Schema {
                path: format!("bonds[{i}]"),
                message: format!("endpoint out of range for {n} atoms"),
            });
        }
        if bond.a == bond.b {
            return Err(MolError::Schema {
                path: format!("bonds[{i}]"),
                message: "self-loop".into(),
            });
        }
        bonds.push(Bond {
            a: bond.a.min(bond.b),
            b: bond.a.max(bond.b),
            order,
        });
    }
    MolecularGraph::new(atoms, bonds)
}

// ---------------------------------------------------------------------------
// Annotation

#[derive(Debug, Clone, PartialEq)]
pub struct AtomFeatures {
    pub degree: usize,
    pub aromatic: bool,
    pub formal_charge: i32,
    pub in_ring: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BondFeatures {
    pub order_one_hot: [f64; 4],
    pub rotatable: bool,
    pub in_ring: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedGraph {
    pub graph: MolecularGraph,
    pub atom_features: Vec<AtomFeatures>,
    pub bond_features: Vec<BondFeatures>,
}

/// Bridge detection by DFS low-link. Returns, per bond, whether it is a
/// bridge (i.e. lies on no cycle).
fn bridges(g: &MolecularGraph) -> Vec<bool> {
    let n = g.n_atoms();
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, bond idx)
    for (bi, bond) in g.bonds.iter().enumerate() {
        incident[bond.a].push((bond.b, bi));
        incident[bond.b].push((bond.a, bi));
    }
    let mut is_bridge = vec![false; g.n_bonds()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: (vertex, parent bond, next incident edge slot)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&(v, pbond, slot)) = stack.last() {
            if slot < incident[v].len() {
                stack.last_mut().unwrap().2 += 1;
                let (w, bi) = incident[v][slot];
                if bi == pbond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, bi, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[pbond] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Compute structural annotations: degree, ring membership (an edge is in a
/// ring iff it is not a bridge), rotatable-bond flags, and bond-order one-hots.
pub fn annotate(g: &MolecularGraph) -> AnnotatedGraph {
    let degrees = g.degrees();
    let is_bridge = bridges(g);
    let mut atom_in_ring = vec![false; g.n_atoms()];
    let bond_features: Vec<BondFeatures> = g
        .bonds
        .iter()
        .enumerate()
        .map(|(bi, bond)| {
            let in_ring = !is_bridge[bi];
            if in_ring {
                atom_in_ring[bond.a] = true;
                atom_in_ring[bond.b] = true;
            }
            let rotatable = bond.order == BondOrder::Single
                && !in_ring
                && degrees[bond.a] >= 2
                && degrees[bond.b] >= 2;
            BondFeatures {
                order_one_hot: bond.order.one_hot(),
                rotatable,
                in_ring,
            }
        })
        .collect();
    let atom_features = g
        .atoms
        .iter()
        .map(|atom| AtomFeatures {
            degree: degrees[atom.index],
            aromatic: atom.aromatic,
            formal_charge: atom.formal_charge,
            in_ring: atom_in_ring[atom.index],
        })
        .collect();
    AnnotatedGraph {
        graph: g.clone(),
        atom_features,
        bond_features,
    }
}

// ---------------------------------------------------------------------------
// Canonical atom ordering

type AtomKey = (String, i32, Option<u32>, bool, usize);

fn atom_keys(g: &MolecularGraph) -> Vec<AtomKey> {
    let degrees = g.degrees();
    g.atoms
        .iter()
        .map(|a| {
            (
                a.element.clone(),
                a.formal_charge,
                a.isotope,
                a.aromatic,
                degrees[a.index],
            )
        })
        .collect()
}

/// Iterated color refinement over (current color, sorted neighbor colors with
/// bond orders) until the partition stabilizes.
fn refine(colors: &mut Vec<u64>, incident: &[Vec<(usize, BondOrder)>]) {
    loop {
        let mut signatures: Vec<(u64, Vec<(u64, u8)>)> = colors
            .iter()
            .enumerate()
            .map(|(v, &c)| {
                let mut nb: Vec<(u64, u8)> = incident[v]
                    .iter()
                    .map(|&(w, order)| (colors[w], order as u8))
                    .collect();
                nb.sort_unstable();
                (c, nb)
            })
            .collect();
        let mut sorted = signatures.clone();
        sorted.sort();
        sorted.dedup();
        let rank = |sig: &(u64, Vec<(u64, u8)>)| sorted.binary_search(sig).unwrap() as u64;
        let new: Vec<u64> = signatures.drain(..).map(|s| rank(&s)).collect();
        if new == *colors {
            return;
        }
        *colors = new;
    }
}

type Certificate = (Vec<AtomKey>, Vec<(usize, usize, u8)>);

fn certificate(g: &MolecularGraph, keys: &[AtomKey], perm: &[usize]) -> Certificate {
    let mut new_of_old = vec![0usize; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        new_of_old[old] = new;
    }
    let ordered_keys = perm.iter().map(|&old| keys[old].clone()).collect();
    let mut edges: Vec<(usize, usize, u8)> = g
        .bonds
        .iter()
        .map(|b| {
            let (x, y) = (new_of_old[b.a], new_of_old[b.b]);
            (x.min(y), x.max(y), b.order as u8)
        })
        .collect();
    edges.sort_unstable();
    (ordered_keys, edges)
}

/// Canonical atom ordering: returns `perm` with `perm[new_index] = old_index`
/// such that relabeling any isomorphic copy of the graph yields an identical
/// labeled graph. Color refinement with individualization on ties; the search
/// is exponential only on highly symmetric ties, which stay tiny at molecule
/// scale.
pub fn canonical_order(g: &MolecularGraph) -> Vec<usize> {
    let n = g.n_atoms();
    if n == 0 {
        return Vec::new();
    }
    let keys = atom_keys(g);
    let mut sorted_keys: Vec<&AtomKey> = keys.iter().collect();
    sorted_keys.sort();
    sorted_keys.dedup();
    let mut colors: Vec<u64> = keys
        .iter()
        .map(|k| sorted_keys.binary_search(&k).unwrap() as u64)
        .collect();
    let mut incident: Vec<Vec<(usize, BondOrder)>> = vec![Vec::new(); n];
    for bond in &g.bonds {
        incident[bond.a].push((bond.b, bond.order));
        incident[bond.b].push((bond.a, bond.order));
    }
    refine(&mut colors, &incident);

    let mut best: Option<(Certificate, Vec<usize>)> = None;
    let mut stack: Vec<Vec<u64>> = vec![colors];
    while let Some(current) = stack.pop() {
        // Find the smallest color owning more than one atom.
        let mut class: Option<(u64, Vec<usize>)> = None;
        for color in 0..n as u64 {
            let members: Vec<usize> = (0..n).filter(|&v| current[v] == color).collect();
            if members.len() > 1 {
                class = Some((color, members));
                break;
            }
        }
        match class {
            None => {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.sort_unstable_by_key(|&v| current[v]);
                let cert = certificate(g, &keys, &perm);
                match &best {
                    Some((b, _)) if *b <= cert => {}
                    _ => best = Some((cert, perm)),
                }
            }
            Some((_, members)) => {
                for v in members {
                    let mut next: Vec<u64> = current.iter().map(|&c| c * 2 + 1).collect();
                    next[v] -= 1;
                    refine(&mut next, &incident);
                    stack.push(next);
                }
            }
        }
    }
    best.expect("at least one discrete coloring").1
}
