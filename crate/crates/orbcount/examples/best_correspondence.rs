//! The circuit/orb correspondence made concrete: walk a circuit out of every
//! orb, map it back, and check the factorial counting identity on a graph
//! whose multiplicity factor is larger than one.

use orbcount::counting::{
    brute_force_circuits, circuit_from_orb, circuit_multiplicity, circuit_to_orb, count_orbs,
    for_each_orb, Budget, Orb,
};
use orbcount::{Multigraph, Orientation};

fn main() {
    let bowtie = Multigraph::parse(
        "p euler 5 6\ne 1 2\ne 2 5\ne 1 5\ne 3 4\ne 4 5\ne 3 5\n",
    )
    .unwrap();
    let root = 4; // the shared center

    let mut orbs = Vec::new();
    for_each_orb(&bowtie, root, &Budget::unlimited(), &mut |o, tree| {
        orbs.push(Orb {
            orientation: Orientation::new(o.bits().collect()),
            tree_arcs: tree.to_vec(),
            root,
        });
        Ok(())
    })
    .unwrap();
    println!("bowtie orbs rooted at the center: {}", orbs.len());

    let d = |orb: &Orb| bowtie.orient(&orb.orientation).unwrap();
    for orb in &orbs {
        // one admissible exit ordering per vertex: ascending non-tree arcs
        let digraph = d(orb);
        let orderings: Vec<Vec<usize>> = (0..bowtie.vertex_count())
            .map(|v| {
                digraph
                    .arcs()
                    .iter()
                    .enumerate()
                    .filter(|&(id, &(t, _))| {
                        t == v && (v == root || !orb.tree_arcs.contains(&id))
                    })
                    .map(|(id, _)| id)
                    .collect()
            })
            .collect();
        let circuit = circuit_from_orb(&bowtie, orb, &orderings).unwrap();
        let back = circuit_to_orb(&bowtie, &circuit, root).unwrap();
        assert_eq!(&back, orb, "round trip must reproduce the orb");
        println!("orb tree {:?} -> circuit {:?}", orb.tree_arcs, circuit.steps());
    }

    // six parallel edges: every vertex has half-degree 3, so each orb stands
    // for (3-1)! * (3-1)! = 4 circuits
    let hexadigon = Multigraph::parse(
        "p euler 2 6\ne 1 2\ne 1 2\ne 1 2\ne 1 2\ne 1 2\ne 1 2\n",
    )
    .unwrap();
    let orbs = count_orbs(&hexadigon, 0).unwrap();
    let mult = circuit_multiplicity(&hexadigon).unwrap();
    let circuits = brute_force_circuits(&hexadigon).unwrap();
    println!("hexadigon: {orbs} orbs x multiplicity {mult} = {circuits} circuits");
    assert_eq!(orbs * mult, circuits);
}
