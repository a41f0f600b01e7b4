//! The two oracle reductions made executable: the p-fold gadget that turns
//! an orb counter into an Eulerian-orientation counter (with the type census
//! backing its congruence), and the not-all-equal 3-SAT gadget that turns an
//! orientation counter into a satisfying-assignment counter.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::counting::{
    count_orientations_bundled_restricted, for_each_orb, Budget, Count, CountError, SearchOpts,
};
use crate::graph::{Multigraph, Orientation};
use crate::numtheory::{crt_reconstruct, is_prime, mod_inverse, odd_primes, NtError, ResidueSystem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("{0} is not an odd prime")]
    EvenOrNonPrime(u64),
    #[error("base graph has no edges")]
    EmptyGraph,
    #[error("enumeration budget exceeded; instance infeasible at this size")]
    InfeasibleSize,
    #[error("prime {p} is not larger than the maximum literal appearance count {max_appearances}")]
    PrimeTooSmall { p: u64, max_appearances: usize },
    #[error("clause {0} does not have three distinct variables")]
    MalformedClause(usize),
    #[error("oracle failed: {0}")]
    OracleFailure(String),
    #[error("recovered count is inconsistent with the held-out prime {prime}: expected residue {expected}, oracle gave {got}")]
    ResidueInconsistency { prime: u64, expected: u64, got: u64 },
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Nt(#[from] NtError),
}

fn lift_budget(e: CountError) -> ReduceError {
    match e {
        CountError::BudgetExceeded => ReduceError::InfeasibleSize,
        other => ReduceError::Count(other),
    }
}

// ---------------------------------------------------------------------------
// The G_p gadget
// ---------------------------------------------------------------------------

/// Where a gadget edge came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetEdge {
    /// Copy `copy` (0-based) of base edge `base_edge`.
    BundleCopy { base_edge: usize, copy: usize },
    /// One of the two root attachments of base vertex `vertex`.
    Attachment { vertex: usize, index: u8 },
}

/// The p-fold replication gadget: every base edge becomes `p` parallel
/// copies and a fresh root vertex is joined to every base vertex by two
/// parallel edges. The root is appended after the base vertices (index `n`)
/// and therefore serializes as `n + 1`.
#[derive(Debug, Clone)]
pub struct GpGadget {
    base: Multigraph,
    p: u64,
    graph: Multigraph,
    provenance: Vec<GadgetEdge>,
}

impl GpGadget {
    pub fn base(&self) -> &Multigraph {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn provenance(&self) -> &[GadgetEdge] {
        &self.provenance
    }

    /// Root of all orbs of the gadget.
    pub fn root(&self) -> usize {
        self.base.vertex_count()
    }

    /// Edge-list serialization with comment lines recording the provenance
    /// of every gadget edge.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "p euler {} {}",
            self.graph.vertex_count(),
            self.graph.edge_count()
        )
        .unwrap();
        for (id, prov) in self.provenance.iter().enumerate() {
            match prov {
                GadgetEdge::BundleCopy { base_edge, copy } => {
                    writeln!(out, "c bundle {id} {base_edge} {copy}").unwrap()
                }
                GadgetEdge::Attachment { vertex, index } => {
                    writeln!(out, "c attach {id} {} {index}", vertex + 1).unwrap()
                }
            }
        }
        for &(a, b) in self.graph.edges() {
            writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

/// Build the gadget for an odd prime `p`: all bundles in base-edge order,
/// then the two root attachments per base vertex in vertex order.
pub fn build_gp(g: &Multigraph, p: u64) -> Result<GpGadget, ReduceError> {
    if p == 2 || !is_prime(p) {
        return Err(ReduceError::EvenOrNonPrime(p));
    }
    if g.edge_count() == 0 {
        return Err(ReduceError::EmptyGraph);
    }
    let n = g.vertex_count();
    let root = n;
    let mut edges = Vec::with_capacity(p as usize * g.edge_count() + 2 * n);
    let mut provenance = Vec::with_capacity(edges.capacity());
    for (id, &(a, b)) in g.edges().iter().enumerate() {
        for copy in 0..p as usize {
            edges.push((a, b));
            provenance.push(GadgetEdge::BundleCopy {
                base_edge: id,
                copy,
            });
        }
    }
    for v in 0..n {
        for index in 0..2u8 {
            edges.push((v, root));
            provenance.push(GadgetEdge::Attachment { vertex: v, index });
        }
    }
    let graph = Multigraph::new(n + 1, edges).expect("gadget construction is loop-free");
    Ok(GpGadget {
        base: g.clone(),
        p,
        graph,
        provenance,
    })
}

/// The type of a gadget orb: per base edge, how many of its `p` copies are
/// oriented from the smaller- to the larger-indexed endpoint, and whether
/// any copy carries a tree arc.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbType {
    entries: Vec<(usize, bool)>,
}

impl OrbType {
    pub fn entries(&self) -> &[(usize, bool)] {
        &self.entries
    }

    /// Special: every base edge is unanimous with no tree arc in its bundle.
    pub fn is_special(&self, p: u64) -> bool {
        self.entries
            .iter()
            .all(|&(k, tree)| !tree && (k == 0 || k == p as usize))
    }
}

impl std::fmt::Display for OrbType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|&(k, t)| format!("({k},{})", if t { "T" } else { "F" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Classify an orb of the gadget graph by its type. Attachment edges do not
/// contribute.
pub fn orb_type(
    gadget: &GpGadget,
    orientation: &Orientation,
    tree_arcs: &[usize],
) -> Result<OrbType, ReduceError> {
    if orientation.len() != gadget.graph.edge_count() {
        return Err(ReduceError::Count(CountError::InvalidOrb(
            "orientation length does not match the gadget".into(),
        )));
    }
    let m = gadget.base.edge_count();
    let mut entries = vec![(0usize, false); m];
    for (id, prov) in gadget.provenance.iter().enumerate() {
        if let GadgetEdge::BundleCopy { base_edge, .. } = prov {
            let (a, b) = gadget.graph.edges()[id];
            let toward_larger = if a < b {
                orientation.bit(id)
            } else {
                !orientation.bit(id)
            };
            if toward_larger {
                entries[*base_edge].0 += 1;
            }
        }
    }
    for &e in tree_arcs {
        if let GadgetEdge::BundleCopy { base_edge, .. } = gadget.provenance[e] {
            entries[base_edge].1 = true;
        }
    }
    Ok(OrbType { entries })
}

/// Exhaustive partition of the gadget's orbs by type.
#[derive(Debug, Clone)]
pub struct TypeCensus {
    pub p: u64,
    pub classes: BTreeMap<OrbType, Count>,
}

impl TypeCensus {
    pub fn total(&self) -> Count {
        self.classes.values().fold(BigUint::zero(), |a, c| a + c)
    }

    pub fn special_total(&self) -> Count {
        self.classes
            .iter()
            .filter(|(t, _)| t.is_special(self.p))
            .fold(BigUint::zero(), |a, (_, c)| a + c)
    }

    /// Every non-special class size is a multiple of `p`.
    pub fn non_special_divisible(&self) -> bool {
        let p = BigUint::from(self.p);
        self.classes
            .iter()
            .filter(|(t, _)| !t.is_special(self.p))
            .all(|(_, c)| (c % &p).is_zero())
    }
}

/// Enumerate every orb of `G_p` rooted at the fresh vertex and tally class
/// sizes per type.
pub fn type_census(g: &Multigraph, p: u64, opts: &SearchOpts) -> Result<TypeCensus, ReduceError> {
    let gadget = build_gp(g, p)?;
    let budget = match opts.node_budget {
        Some(n) => Budget::limited(n),
        None => Budget::unlimited(),
    };
    let mut classes: BTreeMap<OrbType, Count> = BTreeMap::new();
    let mut failure: Option<ReduceError> = None;
    for_each_orb(&gadget.graph, gadget.root(), &budget, &mut |o, tree| {
        match orb_type(&gadget, o, tree) {
            Ok(t) => {
                *classes.entry(t).or_default() += 1u32;
                Ok(())
            }
            Err(e) => {
                failure = Some(e);
                Err(CountError::BudgetExceeded) // abort the walk
            }
        }
    })
    .map_err(|e| failure.take().unwrap_or_else(|| lift_budget(e)))?;
    Ok(TypeCensus { p, classes })
}

// ---------------------------------------------------------------------------
// Orientation-count recovery through an orb oracle
// ---------------------------------------------------------------------------

/// How the prime sweep picks its moduli.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimePolicy {
    /// Smallest odd primes 3, 5, 7, ... until the product exceeds `2^m`.
    SmallPrimes,
    /// Odd primes in `[m, 2m]` first, extended past `2m` if their product
    /// does not reach the bound.
    PaperRange,
}

/// An orb-counting oracle: given a gadget graph and its root, produce the
/// exact orb count.
pub type OrbOracle<'a> = dyn Fn(&Multigraph, usize) -> Result<Count, CountError> + 'a;

#[derive(Debug, Clone)]
pub struct RecoveryReport {
    /// Residues of the recovered count, in prime order.
    pub residues: Vec<(u64, u64)>,
    pub count: Count,
}

fn select_primes(m: usize, policy: PrimePolicy) -> Vec<u64> {
    let bound = BigUint::from(1u32) << m;
    let mut primes = Vec::new();
    let mut product = BigUint::from(1u32);
    match policy {
        PrimePolicy::SmallPrimes => {
            for p in odd_primes() {
                if product > bound {
                    break;
                }
                product *= BigUint::from(p);
                primes.push(p);
            }
        }
        PrimePolicy::PaperRange => {
            // every odd prime in [m, 2m], then extend past 2m if their
            // product does not reach the bound (it may not for small m)
            for p in (m.max(3) as u64..=2 * m as u64).filter(|&k| k % 2 == 1 && is_prime(k)) {
                product *= BigUint::from(p);
                primes.push(p);
            }
            let mut next = (2 * m as u64 + 1).max(3);
            while product <= bound {
                if next % 2 == 1 && is_prime(next) {
                    product *= BigUint::from(next);
                    primes.push(next);
                }
                next += 1;
            }
        }
    }
    primes
}

/// Recover the number of Eulerian orientations of `g` from an orb oracle:
/// for each selected odd prime `p`, the gadget's orb count times the inverse
/// of `2^n` gives the count modulo `p`; enough residues pin the count by CRT
/// (the count is at most `2^m`).
pub fn recover_orientation_count(
    g: &Multigraph,
    oracle: &OrbOracle,
    policy: PrimePolicy,
) -> Result<RecoveryReport, ReduceError> {
    recover_orientation_count_checked(g, oracle, policy, false)
}

/// Same, optionally re-checking the recovered count against one held-out
/// prime (an extra oracle call that catches an inconsistent oracle).
pub fn recover_orientation_count_checked(
    g: &Multigraph,
    oracle: &OrbOracle,
    policy: PrimePolicy,
    holdout_check: bool,
) -> Result<RecoveryReport, ReduceError> {
    if !g.is_eulerian() {
        return Ok(RecoveryReport {
            residues: Vec::new(),
            count: BigUint::zero(),
        });
    }
    let n = g.vertex_count();
    let m = g.edge_count();
    let primes = select_primes(m, policy);
    let residue_for = |p: u64| -> Result<u64, ReduceError> {
        let gadget = build_gp(g, p)?;
        let orbs = oracle(&gadget.graph, gadget.root()).map_err(|e| match e {
            CountError::BudgetExceeded => ReduceError::InfeasibleSize,
            other => ReduceError::OracleFailure(other.to_string()),
        })?;
        let orbs_mod_p = biguint_mod(&orbs, p);
        let two_pow_n = mod_pow(2, n as u64, p);
        let inv = mod_inverse(two_pow_n, p)?;
        Ok(orbs_mod_p * inv % p)
    };
    let mut residues = Vec::with_capacity(primes.len());
    for &p in &primes {
        residues.push((p, residue_for(p)?));
    }
    let count = crt_reconstruct(&ResidueSystem::new(residues.clone())?)?;
    if holdout_check {
        let check_prime = (primes.last().copied().unwrap_or(2) + 1..)
            .find(|&k| k % 2 == 1 && is_prime(k))
            .unwrap();
        let got = residue_for(check_prime)?;
        let expected = biguint_mod(&count, check_prime);
        if got != expected {
            return Err(ReduceError::ResidueInconsistency {
                prime: check_prime,
                expected,
                got,
            });
        }
    }
    Ok(RecoveryReport { residues, count })
}

fn biguint_mod(x: &BigUint, p: u64) -> u64 {
    (x % BigUint::from(p))
        .to_u64_digits()
        .first()
        .copied()
        .unwrap_or(0)
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// Not-all-equal 3-SAT
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfParseError {
    #[error("line {line}: malformed header (expected `p cnf <vars> <clauses>`)")]
    MalformedHeader { line: usize },
    #[error("line {line}: bad token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range for {vars} variables")]
    LiteralOutOfRange { line: usize, lit: i64, vars: usize },
    #[error("clause {0} does not have exactly three literals")]
    ClauseNotThree(usize),
    #[error("clause {0} repeats a variable")]
    DuplicateVariable(usize),
    #[error("clause count mismatch: header declares {declared}, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("unterminated clause at end of input")]
    UnterminatedClause,
}

/// A 3-CNF instance; each clause has three literals over distinct variables.
/// Literals are signed 1-based variable indices, as in DIMACS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    variables: usize,
    clauses: Vec<[i64; 3]>,
}

impl CnfInstance {
    pub fn new(variables: usize, clauses: Vec<[i64; 3]>) -> Result<Self, CnfParseError> {
        for (idx, clause) in clauses.iter().enumerate() {
            let mut vars: Vec<u64> = clause.iter().map(|l| l.unsigned_abs()).collect();
            if vars.iter().any(|&v| v == 0 || v as usize > variables) {
                return Err(CnfParseError::LiteralOutOfRange {
                    line: 0,
                    lit: *clause.iter().find(|l| {
                        let v = l.unsigned_abs();
                        v == 0 || v as usize > variables
                    }).unwrap(),
                    vars: variables,
                });
            }
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != 3 {
                return Err(CnfParseError::DuplicateVariable(idx + 1));
            }
        }
        Ok(CnfInstance { variables, clauses })
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[[i64; 3]] {
        &self.clauses
    }

    /// Parse DIMACS CNF: `p cnf <vars> <clauses>`, clauses as signed
    /// integers terminated by `0`; `c` lines are comments.
    pub fn parse(text: &str) -> Result<Self, CnfParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses: Vec<[i64; 3]> = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let (vars, declared) = match header {
                Some(h) => h,
                None => {
                    let mut parts = trimmed.split_whitespace();
                    let ok = parts.next() == Some("p") && parts.next() == Some("cnf");
                    let v = parts.next().and_then(|t| t.parse::<usize>().ok());
                    let c = parts.next().and_then(|t| t.parse::<usize>().ok());
                    match (ok, v, c, parts.next()) {
                        (true, Some(v), Some(c), None) => {
                            header = Some((v, c));
                            continue;
                        }
                        _ => return Err(CnfParseError::MalformedHeader { line }),
                    }
                }
            };
            for token in trimmed.split_whitespace() {
                let lit: i64 = token
                    .parse()
                    .map_err(|_| CnfParseError::BadToken {
                        line,
                        token: token.to_string(),
                    })?;
                if lit == 0 {
                    if current.len() != 3 {
                        return Err(CnfParseError::ClauseNotThree(clauses.len() + 1));
                    }
                    let clause = [current[0], current[1], current[2]];
                    let mut vs: Vec<u64> = clause.iter().map(|l| l.unsigned_abs()).collect();
                    vs.sort_unstable();
                    vs.dedup();
                    if vs.len() != 3 {
                        return Err(CnfParseError::DuplicateVariable(clauses.len() + 1));
                    }
                    clauses.push(clause);
                    current.clear();
                } else {
                    if lit.unsigned_abs() as usize > vars {
                        return Err(CnfParseError::LiteralOutOfRange { line, lit, vars });
                    }
                    current.push(lit);
                    if current.len() > 3 {
                        return Err(CnfParseError::ClauseNotThree(clauses.len() + 1));
                    }
                }
            }
            let _ = declared;
        }
        let (vars, declared) =
            header.ok_or(CnfParseError::MalformedHeader { line: 1 })?;
        if !current.is_empty() {
            return Err(CnfParseError::UnterminatedClause);
        }
        if clauses.len() != declared {
            return Err(CnfParseError::ClauseCountMismatch {
                declared,
                found: clauses.len(),
            });
        }
        let _ = vars;
        Ok(CnfInstance {
            variables: vars,
            clauses,
        })
    }

    /// 0-based literal index: positive literal of variable `i` (1-based) is
    /// `2(i-1)`, negative is `2(i-1)+1`.
    fn literal_index(lit: i64) -> usize {
        let var = lit.unsigned_abs() as usize - 1;
        2 * var + usize::from(lit < 0)
    }

    /// Appearance count per literal index.
    fn appearances(&self) -> Vec<usize> {
        let mut counts = vec![0usize; 2 * self.variables];
        for clause in &self.clauses {
            for &lit in clause {
                counts[Self::literal_index(lit)] += 1;
            }
        }
        counts
    }
}

/// Role of an edge in the satisfiability gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaeEdgeRole {
    /// One of the `p` parallel edges between a literal and its mate.
    Mate { variable: usize },
    /// Single edge from a clause vertex to one of its literals.
    ClauseLiteral { clause: usize, literal: usize },
    /// Single edge from a clause vertex to the spare vertex.
    ClauseSpare { clause: usize },
    /// One of the `p - a` edges from a literal to the spare vertex.
    LiteralSpare { literal: usize },
}

/// The satisfiability gadget: one vertex per literal, one per clause, plus a
/// spare vertex. Literal vertices come first (positive then negative, per
/// variable), then clause vertices, then the spare vertex last.
#[derive(Debug, Clone)]
pub struct NaeGadget {
    cnf: CnfInstance,
    p: u64,
    graph: Multigraph,
    roles: Vec<NaeEdgeRole>,
}

impl NaeGadget {
    pub fn cnf(&self) -> &CnfInstance {
        &self.cnf
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn roles(&self) -> &[NaeEdgeRole] {
        &self.roles
    }

    pub fn literal_vertex(&self, lit: i64) -> usize {
        CnfInstance::literal_index(lit)
    }

    pub fn clause_vertex(&self, clause: usize) -> usize {
        2 * self.cnf.variables + clause
    }

    pub fn spare_vertex(&self) -> usize {
        2 * self.cnf.variables + self.cnf.clauses.len()
    }

    /// Edge-list serialization with role comments per gadget edge.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "p euler {} {}",
            self.graph.vertex_count(),
            self.graph.edge_count()
        )
        .unwrap();
        for (id, role) in self.roles.iter().enumerate() {
            match role {
                NaeEdgeRole::Mate { variable } => {
                    writeln!(out, "c mate {id} {}", variable + 1).unwrap()
                }
                NaeEdgeRole::ClauseLiteral { clause, literal } => {
                    writeln!(out, "c clause-literal {id} {} {literal}", clause + 1).unwrap()
                }
                NaeEdgeRole::ClauseSpare { clause } => {
                    writeln!(out, "c clause-spare {id} {}", clause + 1).unwrap()
                }
                NaeEdgeRole::LiteralSpare { literal } => {
                    writeln!(out, "c literal-spare {id} {literal}").unwrap()
                }
            }
        }
        for &(a, b) in self.graph.edges() {
            writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

/// Build the satisfiability gadget. `p` must be an odd prime strictly larger
/// than every literal's appearance count; `None` selects the least such.
pub fn build_nae_gadget(cnf: &CnfInstance, p: Option<u64>) -> Result<NaeGadget, ReduceError> {
    let appearances = cnf.appearances();
    let max_app = appearances.iter().copied().max().unwrap_or(0);
    let p = match p {
        Some(p) => {
            if p == 2 || !is_prime(p) {
                return Err(ReduceError::EvenOrNonPrime(p));
            }
            if p as usize <= max_app {
                return Err(ReduceError::PrimeTooSmall {
                    p,
                    max_appearances: max_app,
                });
            }
            p
        }
        None => odd_primes()
            .find(|&q| q as usize > max_app)
            .expect("odd primes are unbounded"),
    };
    let v = cnf.variables;
    let c = cnf.clauses.len();
    let spare = 2 * v + c;
    let mut edges = Vec::new();
    let mut roles = Vec::new();
    for variable in 0..v {
        for _ in 0..p {
            edges.push((2 * variable, 2 * variable + 1));
            roles.push(NaeEdgeRole::Mate { variable });
        }
    }
    for (clause, lits) in cnf.clauses.iter().enumerate() {
        for &lit in lits {
            let literal = CnfInstance::literal_index(lit);
            edges.push((2 * v + clause, literal));
            roles.push(NaeEdgeRole::ClauseLiteral { clause, literal });
        }
        edges.push((2 * v + clause, spare));
        roles.push(NaeEdgeRole::ClauseSpare { clause });
    }
    for literal in 0..2 * v {
        for _ in 0..(p as usize - appearances[literal]) {
            edges.push((literal, spare));
            roles.push(NaeEdgeRole::LiteralSpare { literal });
        }
    }
    let graph = Multigraph::new(spare + 1, edges).expect("gadget construction is loop-free");
    Ok(NaeGadget {
        cnf: cnf.clone(),
        p,
        graph,
        roles,
    })
}

/// Brute-force count of not-all-equal satisfying assignments: every clause
/// must contain at least one true and at least one false literal.
pub fn count_nae_assignments(cnf: &CnfInstance) -> Count {
    let v = cnf.variables;
    assert!(v < 64, "assignment sweep is only meant for desk-scale instances");
    let mut count = BigUint::zero();
    for mask in 0u64..(1 << v) {
        let ok = cnf.clauses.iter().all(|clause| {
            let truths: Vec<bool> = clause
                .iter()
                .map(|&lit| {
                    let val = mask >> (lit.unsigned_abs() - 1) & 1 == 1;
                    if lit > 0 {
                        val
                    } else {
                        !val
                    }
                })
                .collect();
            truths.iter().any(|&t| t) && truths.iter().any(|&t| !t)
        });
        if ok {
            count += 1u32;
        }
    }
    count
}

/// Count the Eulerian orientations of the gadget whose mate bundles are all
/// unanimous. The reduction puts these in exact bijection with satisfying
/// assignments.
pub fn count_special_nae_orientations(
    gadget: &NaeGadget,
    opts: &SearchOpts,
) -> Result<Count, ReduceError> {
    let v = gadget.cnf.variables;
    let is_mate_pair = move |u: usize, w: usize| u + 1 == w && w < 2 * v && u % 2 == 0;
    count_orientations_bundled_restricted(
        gadget.graph(),
        &move |b, k| !is_mate_pair(b.u, b.v) || k == 0 || k == b.size(),
        opts,
    )
    .map_err(lift_budget)
}

/// Result of checking the gadget congruence against the brute-force
/// assignment count.
#[derive(Debug, Clone)]
pub struct NaeReport {
    pub p: u64,
    pub eo_count: Count,
    pub nae_count: Count,
    pub eo_mod_p: u64,
    pub nae_mod_p: u64,
    pub holds: bool,
}

/// Verify that the gadget's Eulerian orientation count is congruent to the
/// instance's satisfying-assignment count modulo `p`, using the
/// bundle-aggregated orientation counter.
pub fn verify_nae_congruence(
    cnf: &CnfInstance,
    p: Option<u64>,
    opts: &SearchOpts,
) -> Result<NaeReport, ReduceError> {
    let gadget = build_nae_gadget(cnf, p)?;
    let eo_count =
        crate::counting::count_eulerian_orientations_bundled(gadget.graph(), opts)
            .map_err(lift_budget)?;
    let nae_count = count_nae_assignments(cnf);
    let eo_mod_p = biguint_mod(&eo_count, gadget.p());
    let nae_mod_p = biguint_mod(&nae_count, gadget.p());
    Ok(NaeReport {
        p: gadget.p(),
        holds: eo_mod_p == nae_mod_p,
        eo_count,
        nae_count,
        eo_mod_p,
        nae_mod_p,
    })
}
