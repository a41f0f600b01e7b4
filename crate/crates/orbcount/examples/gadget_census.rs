//! Build the p-fold replication gadget of a base graph, partition its orbs
//! by type, and watch the congruence emerge: special classes add up to
//! 2^n * N while every other class has size divisible by p.

use num_bigint::BigUint;
use orbcount::counting::{count_eulerian_orientations, SearchOpts};
use orbcount::reduction::{build_gp, type_census};
use orbcount::Multigraph;

fn main() {
    let digon = Multigraph::parse("p euler 2 2\ne 1 2\ne 1 2\n").unwrap();
    let p = 3u64;

    let gadget = build_gp(&digon, p).unwrap();
    println!("G_{p} of the digon, root vertex {}:", gadget.root() + 1);
    print!("{}", gadget.serialize());

    let census = type_census(&digon, p, &SearchOpts::default()).unwrap();
    println!("\norb classes by type (copies toward larger endpoint, tree flag):");
    for (ty, size) in &census.classes {
        let marker = if ty.is_special(p) { "  special" } else { "" };
        println!("  {ty}  ->  {size}{marker}");
    }

    let n = digon.vertex_count();
    let orientations = count_eulerian_orientations(&digon);
    println!("special total: {}", census.special_total());
    println!(
        "2^n * N      : {}",
        (BigUint::from(1u32) << n) * &orientations
    );
    println!("all non-special classes divisible by {p}: {}", census.non_special_divisible());
    println!("orb total: {} == {} mod {p}", census.total(), census.total() % BigUint::from(p));
}
