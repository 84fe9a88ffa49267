//! Lifting a molecular graph to a cell complex over dimensions 0..3.
//!
//! Construction, per atom `a`: three 0-cells (proton, neutron, electron
//! base-points) joined by three oriented 1-cells forming a triangle
//! p -> n -> e -> p, filled by one atom-disk 2-cell. Per bond `(a, b)`: two
//! parallel 1-cells `u`, `v` from the electron point of `a` to the electron
//! point of `b`, capped by two 2-cells `F` (boundary `u - v`) and `F'`
//! (boundary `v - u`) whose sum is a 2-sphere. Ring and k-hop 3-cells attach
//! along sums of those spheres, so the boundary-of-boundary of every cell
//! vanishes exactly over the integers.

use crate::molio::{element_composition, AtomComposition, ElementTable, MolecularGraph, MolError};
use crate::spectral::BoundaryMatrix;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LiftError {
    #[error("dimension {0} out of range for this complex")]
    DimensionOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    ParticlePoint,
    AtomShellEdge,
    BondLinkEdge,
    AtomDisk,
    BondFace,
    RingVolume,
    KhopVolume,
}

impl CellKind {
    pub fn dim(self) -> usize {
        match self {
            CellKind::ParticlePoint => 0,
            CellKind::AtomShellEdge | CellKind::BondLinkEdge => 1,
            CellKind::AtomDisk | CellKind::BondFace => 2,
            CellKind::RingVolume | CellKind::KhopVolume => 3,
        }
    }
}

/// One cell, with the atom/bond indices it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: usize,
    pub dim: usize,
    pub kind: CellKind,
    pub atoms: Vec<usize>,
    pub bonds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellComplex {
    pub cells: [Vec<Cell>; 4],
    /// `boundaries[k][i]` lists `(face id in dimension k-1, coefficient)` for
    /// cell `i` of dimension `k`; `boundaries[0]` holds empty lists.
    pub boundaries: [Vec<Vec<(usize, i32)>>; 4],
    /// Subatomic composition attached to each atom's particle points.
    pub composition: Vec<AtomComposition>,
    pub n_atoms: usize,
    pub n_bonds: usize,
}

impl CellComplex {
    pub fn counts(&self) -> [usize; 4] {
        [
            self.cells[0].len(),
            self.cells[1].len(),
            self.cells[2].len(),
            self.cells[3].len(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftConfig {
    pub include_rings: bool,
    /// Graph distance for k-hop 3-cells; 0 disables (values below 2 produce
    /// no cells, since distance-1 pairs are bonds).
    pub khop: usize,
    pub ring_size_max: usize,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig {
            include_rings: true,
            khop: 0,
            ring_size_max: 8,
        }
    }
}

/// A cycle recorded as its atom sequence and bond indices.
#[derive(Debug, Clone)]
pub struct Ring {
    pub atoms: Vec<usize>,
    pub bonds: Vec<usize>,
}

/// Rings used for 3-cells: the fundamental cycle basis of a BFS spanning
/// forest, together with all chordless cycles of length <= `size_max`,
/// de-duplicated by bond set. Output is sorted by bond set for determinism.
pub fn enumerate_rings(g: &MolecularGraph, size_max: usize) -> Vec<Ring> {
    let n = g.n_atoms();
    let adj = g.adjacency();
    let mut bond_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, bond) in g.bonds.iter().enumerate() {
        bond_index.insert((bond.a, bond.b), i);
    }
    let edge = |a: usize, b: usize| bond_index.get(&(a.min(b), a.max(b))).copied();

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut rings: Vec<Ring> = Vec::new();
    let mut push = |atoms: Vec<usize>| {
        let mut bonds: Vec<usize> = atoms
            .iter()
            .zip(atoms.iter().cycle().skip(1))
            .map(|(&a, &b)| edge(a, b).expect("cycle edge exists"))
            .collect();
        bonds.sort_unstable();
        if seen.insert(bonds.clone()) {
            rings.push(Ring { atoms, bonds });
        }
    };

    // Fundamental cycles of a BFS forest.
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut tree_bonds = vec![false; g.n_bonds()];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    tree_bonds[edge(v, w).unwrap()] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    for (bi, bond) in g.bonds.iter().enumerate() {
        if tree_bonds[bi] {
            continue;
        }
        let (mut x, mut y) = (bond.a, bond.b);
        let mut left = vec![x];
        let mut right = vec![y];
        while depth[x] > depth[y] {
            x = parent[x];
            left.push(x);
        }
        while depth[y] > depth[x] {
            y = parent[y];
            right.push(y);
        }
        while x != y {
            x = parent[x];
            y = parent[y];
            left.push(x);
            right.push(y);
        }
        right.pop(); // shared ancestor kept once
        right.reverse();
        left.extend(right);
        if left.len() <= size_max {
            push(left);
        }
    }

    // Chordless cycles up to size_max: grow paths whose interior vertices all
    // exceed the start, closing back to the start.
    let adjacent = |a: usize, b: usize| edge(a, b).is_some();
    for start in 0..n {
        let mut stack: Vec<Vec<usize>> = adj[start]
            .iter()
            .filter(|&&v| v > start)
            .map(|&v| vec![start, v])
            .collect();
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            for &next in &adj[last] {
                if next == start {
                    let interior_clear = path
                        .iter()
                        .skip(2)
                        .take(path.len().saturating_sub(3))
                        .all(|&v| !adjacent(v, start));
                    if path.len() >= 3 && path[1] < last && interior_clear {
                        push(path.clone());
                    }
                    continue;
                }
                if next <= start || path.contains(&next) || path.len() >= size_max {
                    continue;
                }
                // Chordless: the new vertex may touch only its predecessor
                // (and possibly the start, which closes the cycle later).
                if path[..path.len() - 1]
                    .iter()
                    .skip(1)
                    .any(|&v| adjacent(v, next))
                {
                    continue;
                }
                let mut extended = path.clone();
                extended.push(next);
                stack.push(extended);
            }
        }
    }

    rings.sort_by(|a, b| a.bonds.cmp(&b.bonds));
    rings
}

/// BFS distances from `src` with lowest-index tie-breaking; `usize::MAX` for
/// unreachable vertices.
fn bfs(adj: &[Vec<usize>], src: usize) -> (Vec<usize>, Vec<usize>) {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

/// Apply the lifting transformation to a molecular graph.
pub fn lift(g: &MolecularGraph, cfg: &LiftConfig) -> Result<CellComplex, MolError> {
    lift_with(g, cfg, &ElementTable::default())
}

pub fn lift_with(
    g: &MolecularGraph,
    cfg: &LiftConfig,
    table: &ElementTable,
) -> Result<CellComplex, MolError> {
    let n = g.n_atoms();
    let m = g.n_bonds();
    let mut composition = Vec::with_capacity(n);
    for atom in &g.atoms {
        composition.push(element_composition(
            table,
            &atom.element,
            atom.formal_charge,
            atom.isotope,
        )?);
    }

    let mut cells: [Vec<Cell>; 4] = Default::default();
    let mut boundaries: [Vec<Vec<(usize, i32)>>; 4] = Default::default();

    // 0-cells: p_a = 3a, n_a = 3a+1, e_a = 3a+2.
    for a in 0..n {
        for role in 0..3 {
            cells[0].push(Cell {
                id: 3 * a + role,
                dim: 0,
                kind: CellKind::ParticlePoint,
                atoms: vec![a],
                bonds: vec![],
            });
            boundaries[0].push(Vec::new());
        }
    }

    // 1-cells: per-atom triangle p -> n -> e -> p, then per-bond u, v from
    // e_a to e_b. An oriented edge x -> y has boundary (+y, -x).
    let electron = |a: usize| 3 * a + 2;
    for a in 0..n {
        let (p, q, e) = (3 * a, 3 * a + 1, 3 * a + 2);
        for (src, dst) in [(p, q), (q, e), (e, p)] {
            cells[1].push(Cell {
                id: cells[1].len(),
                dim: 1,
                kind: CellKind::AtomShellEdge,
                atoms: vec![a],
                bonds: vec![],
            });
            boundaries[1].push(vec![(dst, 1), (src, -1)]);
        }
    }
    let link = |j: usize, copy: usize| 3 * n + 2 * j + copy;
    for (j, bond) in g.bonds.iter().enumerate() {
        for _copy in 0..2 {
            cells[1].push(Cell {
                id: cells[1].len(),
                dim: 1,
                kind: CellKind::BondLinkEdge,
                atoms: vec![bond.a, bond.b],
                bonds: vec![j],
            });
            boundaries[1].push(vec![(electron(bond.b), 1), (electron(bond.a), -1)]);
        }
    }

    // 2-cells: atom disks (boundary = triangle sum), then bond faces F, F'.
    for a in 0..n {
        cells[2].push(Cell {
            id: a,
            dim: 2,
            kind: CellKind::AtomDisk,
            atoms: vec![a],
            bonds: vec![],
        });
        boundaries[2].push(vec![(3 * a, 1), (3 * a + 1, 1), (3 * a + 2, 1)]);
    }
    let face = |j: usize, copy: usize| n + 2 * j + copy;
    for (j, bond) in g.bonds.iter().enumerate() {
        let (u, v) = (link(j, 0), link(j, 1));
        for (copy, (plus, minus)) in [(u, v), (v, u)].into_iter().enumerate() {
            cells[2].push(Cell {
                id: n + 2 * j + copy,
                dim: 2,
                kind: CellKind::BondFace,
                atoms: vec![bond.a, bond.b],
                bonds: vec![j],
            });
            boundaries[2].push(vec![(plus, 1), (minus, -1)]);
        }
    }

    // 3-cells: rings, then k-hop pairs. Boundary = sum of the doubled bond
    // faces along the cycle / path, a sum of 2-spheres.
    let sphere_sum = |bonds: &[usize]| -> Vec<(usize, i32)> {
        bonds
            .iter()
            .flat_map(|&j| [(face(j, 0), 1), (face(j, 1), 1)])
            .collect()
    };
    if cfg.include_rings {
        for ring in enumerate_rings(g, cfg.ring_size_max) {
            cells[3].push(Cell {
                id: cells[3].len(),
                dim: 3,
                kind: CellKind::RingVolume,
                atoms: ring.atoms.clone(),
                bonds: ring.bonds.clone(),
            });
            boundaries[3].push(sphere_sum(&ring.bonds));
        }
    }
    if cfg.khop >= 2 {
        let adj = g.adjacency();
        let mut bond_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, bond) in g.bonds.iter().enumerate() {
            bond_index.insert((bond.a, bond.b), i);
        }
        for a in 0..n {
            let (dist, parent) = bfs(&adj, a);
            for b in (a + 1)..n {
                if dist[b] != cfg.khop {
                    continue;
                }
                let mut path_bonds = Vec::with_capacity(cfg.khop);
                let mut atoms = vec![b];
                let mut cur = b;
                while cur != a {
                    let prev = parent[cur];
                    path_bonds.push(bond_index[&(prev.min(cur), prev.max(cur))]);
                    cur = prev;
                    atoms.push(cur);
                }
                atoms.reverse();
                path_bonds.reverse();
                cells[3].push(Cell {
                    id: cells[3].len(),
                    dim: 3,
                    kind: CellKind::KhopVolume,
                    atoms,
                    bonds: path_bonds.clone(),
                });
                boundaries[3].push(sphere_sum(&path_bonds));
            }
        }
    }

    Ok(CellComplex {
        cells,
        boundaries,
        composition,
        n_atoms: n,
        n_bonds: m,
    })
}

/// Signed incidence matrix of dimension `k` (rows: (k-1)-cells, columns:
/// k-cells).
pub fn boundary_matrix(x: &CellComplex, k: usize) -> Result<BoundaryMatrix, LiftError> {
    if k == 0 || k > 3 {
        return Err(LiftError::DimensionOutOfRange(k));
    }
    let rows = x.cells[k - 1].len();
    let cols = x.cells[k].len();
    let mut entries = Vec::new();
    for (col, faces) in x.boundaries[k].iter().enumerate() {
        for &(row, coeff) in faces {
            entries.push((row, col, coeff as i64));
        }
    }
    Ok(BoundaryMatrix {
        rows,
        cols,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub dim: usize,
    pub cell: usize,
    pub message: String,
}

/// Check the chain-complex axioms: kind/dimension consistency, coefficients
/// in {-1, +1}, face ids in range, and boundary-of-boundary zero for every
/// 2- and 3-cell. Returns the first violation found instead of panicking.
pub fn validate(x: &CellComplex) -> Result<(), Violation> {
    for k in 0..4 {
        for cell in &x.cells[k] {
            if cell.dim != k || cell.kind.dim() != k {
                return Err(Violation {
                    dim: k,
                    cell: cell.id,
                    message: format!("cell kind {:?} inconsistent with dimension {k}", cell.kind),
                });
            }
        }
        for (i, faces) in x.boundaries[k].iter().enumerate() {
            for &(face, coeff) in faces {
                if coeff != 1 && coeff != -1 {
                    return Err(Violation {
                        dim: k,
                        cell: i,
                        message: format!("coefficient {coeff} outside {{-1, +1}}"),
                    });
                }
                if k == 0 || face >= x.cells[k - 1].len() {
                    return Err(Violation {
                        dim: k,
                        cell: i,
                        message: format!("face id {face} out of range"),
                    });
                }
            }
        }
    }
    for k in 2..4usize {
        for (i, faces) in x.boundaries[k].iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(face, coeff) in faces {
                for &(subface, c2) in &x.boundaries[k - 1][face] {
                    *acc.entry(subface).or_insert(0) += coeff as i64 * c2 as i64;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return Err(Violation {
                    dim: k,
                    cell: i,
                    message: format!("boundary of boundary nonzero for {k}-cell {i}"),
                });
            }
        }
    }
    Ok(())
}
