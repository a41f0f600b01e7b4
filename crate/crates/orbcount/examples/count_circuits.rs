//! Count Eulerian circuits, orientations and orbs of a small multigraph
//! with both the determinant-based engine and the brute-force oracle.

use orbcount::counting::{
    brute_force_circuits, circuit_multiplicity, count_circuits_undirected,
    count_eulerian_orientations, count_orbs,
};
use orbcount::Multigraph;

fn main() {
    // two triangles sharing their center vertex
    let bowtie = Multigraph::parse(
        "p euler 5 6\ne 1 2\ne 2 5\ne 1 5\ne 3 4\ne 4 5\ne 3 5\n",
    )
    .unwrap();

    println!("bowtie: {} vertices, {} edges", bowtie.vertex_count(), bowtie.edge_count());
    println!("eulerian orientations: {}", count_eulerian_orientations(&bowtie));

    for root in bowtie.support() {
        println!(
            "orbs rooted at {}: {}",
            root + 1,
            count_orbs(&bowtie, root).unwrap()
        );
    }

    let center = 4; // vertex 5 in file numbering
    let via_orbs = count_circuits_undirected(&bowtie, center).unwrap();
    let via_trails = brute_force_circuits(&bowtie).unwrap();
    println!("circuits via orbs:   {via_orbs}");
    println!("circuits via trails: {via_trails}");
    println!("circuit multiplicity: {}", circuit_multiplicity(&bowtie).unwrap());
    assert_eq!(via_orbs, via_trails);
}
