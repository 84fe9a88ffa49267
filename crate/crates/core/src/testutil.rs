//! Seeded random molecular graphs shared by unit, property, and acceptance
//! tests. Not part of the public contract.

use crate::molio::{Atom, Bond, BondOrder, MolecularGraph};
use crate::rng::SplitMix64;

const ELEMENTS: [&str; 6] = ["C", "N", "O", "S", "F", "Cl"];
const ORDERS: [BondOrder; 4] = [
    BondOrder::Single,
    BondOrder::Double,
    BondOrder::Triple,
    BondOrder::Aromatic,
];

/// Random simple graph with 1..=max_atoms atoms and random edges.
pub fn random_graph(rng: &mut SplitMix64, max_atoms: usize) -> MolecularGraph {
    let n = 1 + rng.next_index(max_atoms);
    let atoms = (0..n)
        .map(|i| Atom {
            index: i,
            element: ELEMENTS[rng.next_index(ELEMENTS.len())].to_string(),
            formal_charge: rng.next_index(3) as i32 - 1,
            isotope: None,
            aromatic: false,
        })
        .collect();
    let mut bonds = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            // Sparse: favors tree-like molecules with occasional cycles.
            if rng.next_index(100) < 28 {
                bonds.push(Bond {
                    a,
                    b,
                    order: ORDERS[rng.next_index(ORDERS.len())],
                });
            }
        }
    }
    MolecularGraph::new(atoms, bonds).expect("construction is simple by loop structure")
}

/// Random connected graph (spanning tree plus random extra edges).
pub fn random_connected_graph(rng: &mut SplitMix64, max_atoms: usize) -> MolecularGraph {
    let n = 1 + rng.next_index(max_atoms);
    let atoms = (0..n)
        .map(|i| Atom {
            index: i,
            element: ELEMENTS[rng.next_index(ELEMENTS.len())].to_string(),
            formal_charge: 0,
            isotope: None,
            aromatic: false,
        })
        .collect();
    let mut bonds = Vec::new();
    let mut present = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.next_index(v);
        present.insert((u, v));
        bonds.push(Bond {
            a: u,
            b: v,
            order: BondOrder::Single,
        });
    }
    let extra = rng.next_index(n.max(2));
    for _ in 0..extra {
        let a = rng.next_index(n);
        let b = rng.next_index(n);
        let key = (a.min(b), a.max(b));
        if a != b && present.insert(key) {
            bonds.push(Bond {
                a: key.0,
                b: key.1,
                order: BondOrder::Single,
            });
        }
    }
    MolecularGraph::new(atoms, bonds).expect("deduplicated by construction")
}
