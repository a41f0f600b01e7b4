//! From satisfiability to Eulerian orientations: build the gadget for a
//! not-all-equal 3-SAT instance and verify that its orientation count is
//! congruent to the number of satisfying assignments modulo p, with the
//! unanimous-bundle orientations matching the assignment count exactly.

use orbcount::counting::SearchOpts;
use orbcount::reduction::{
    build_nae_gadget, count_nae_assignments, count_special_nae_orientations, verify_nae_congruence,
    CnfInstance,
};

fn main() {
    let cnf = CnfInstance::parse("p cnf 3 2\n1 2 3 0\n-1 2 3 0\n").unwrap();
    println!(
        "instance: {} variables, {} clauses, nae-count {}",
        cnf.variables(),
        cnf.clauses().len(),
        count_nae_assignments(&cnf)
    );

    let opts = SearchOpts::default();
    let gadget = build_nae_gadget(&cnf, None).unwrap();
    println!(
        "gadget: p = {}, {} vertices, {} edges",
        gadget.p(),
        gadget.graph().vertex_count(),
        gadget.graph().edge_count()
    );

    let report = verify_nae_congruence(&cnf, None, &opts).unwrap();
    println!(
        "eulerian orientations of the gadget: {} == {} (mod {})",
        report.eo_count, report.eo_mod_p, report.p
    );
    println!(
        "nae assignments: {} == {} (mod {})",
        report.nae_count, report.nae_mod_p, report.p
    );
    println!("congruence holds: {}", report.holds);

    let special = count_special_nae_orientations(&gadget, &opts).unwrap();
    println!("orientations with unanimous mate bundles: {special}");
    assert_eq!(special, report.nae_count);
}
