//! The prime-product bound that powers the recovery sweep: for n >= 4, the
//! product of the primes strictly between n and n^2 reaches n! * 2^n, so
//! there are always enough odd prime moduli to pin down a count of
//! orientations by their residues.

use orbcount::numtheory::{lemma1_holds, primes_strictly_between};

fn main() {
    for n in [4u64, 8, 16, 64, 150] {
        let report = lemma1_holds(n).unwrap();
        let primes = primes_strictly_between(n, n * n);
        println!(
            "n = {n:>3}: {:>4} primes in ({n}, {}), product has {:>5} digits, bound n!*2^n has {:>4} -> holds: {}",
            primes.len(),
            n * n,
            report.product.to_str_radix(10).len(),
            report.bound.to_str_radix(10).len(),
            report.holds
        );
    }

    let all = (4..=150).all(|n| lemma1_holds(n).unwrap().holds);
    println!("holds for every n in [4, 150]: {all}");
}
