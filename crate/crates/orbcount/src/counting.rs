//! Exact counting engines: Eulerian orientations, arborescences, orbs and
//! Eulerian circuits.
//!
//! Two independent routes exist for circuit counting. The orb route sums
//! arborescence determinants over Eulerian orientations and converts to
//! circuits through the factorial correspondence; `brute_force_circuits`
//! exhaustively walks closed trails and never touches the orb machinery, so
//! the two can check each other.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{DirectedMultigraph, Multigraph, Orientation};
use crate::linalg::{det_exact, out_laplacian_minor, out_laplacian_minor_unit};

/// Exact nonnegative count; all results can exceed 64 bits.
pub type Count = BigUint;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("enumeration budget exceeded")]
    BudgetExceeded,
    #[error("non-exact division: {numerator} by {divisor} (internal invariant violated)")]
    NonExactDivision { numerator: Count, divisor: Count },
    #[error("root {0} out of range (vertex count {1})")]
    RootOutOfRange(usize, usize),
    #[error("invalid orb: {0}")]
    InvalidOrb(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid exit ordering: {0}")]
    InvalidOrdering(String),
}

/// Node budget shared by the enumeration engines. Counts search-tree nodes;
/// the total charged for a given input is independent of the worker count.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    spent: AtomicU64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            limit: u64::MAX,
            spent: AtomicU64::new(0),
        }
    }

    pub fn limited(limit: u64) -> Self {
        Budget {
            limit,
            spent: AtomicU64::new(0),
        }
    }

    pub fn spent(&self) -> u64 {
        self.spent.load(Ordering::Relaxed)
    }

    fn charge(&self, n: u64) -> Result<(), CountError> {
        let prev = self.spent.fetch_add(n, Ordering::Relaxed);
        if prev.saturating_add(n) > self.limit {
            return Err(CountError::BudgetExceeded);
        }
        Ok(())
    }
}

/// Execution knobs for the counting engines. Results are bit-identical for
/// every `threads` value; the budget is a global node cap.
#[derive(Debug, Clone)]
pub struct SearchOpts {
    pub threads: usize,
    pub node_budget: Option<u64>,
}

impl Default for SearchOpts {
    fn default() -> Self {
        SearchOpts {
            threads: 1,
            node_budget: None,
        }
    }
}

impl SearchOpts {
    fn budget(&self) -> Budget {
        match self.node_budget {
            Some(n) => Budget::limited(n),
            None => Budget::unlimited(),
        }
    }
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn exact_div(numerator: BigUint, divisor: &BigUint) -> Result<BigUint, CountError> {
    let (q, r) = numerator.div_rem(divisor);
    if !r.is_zero() {
        return Err(CountError::NonExactDivision {
            numerator: &q * divisor + r,
            divisor: divisor.clone(),
        });
    }
    Ok(q)
}

/// Product of `(d_v - 1)!` over the support vertices.
pub fn circuit_multiplicity(g: &Multigraph) -> Result<BigUint, CountError> {
    let deg = g.degrees();
    let mut acc = BigUint::one();
    for d in deg.into_iter().filter(|&d| d > 0) {
        acc *= factorial(d / 2 - 1);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Eulerian orientation enumeration (naive engine)
// ---------------------------------------------------------------------------

struct OrientSearch<'a> {
    edges: &'a [(usize, usize)],
    half: Vec<usize>,
    out: Vec<usize>,
    rem: Vec<usize>,
    bits: Vec<bool>,
}

impl<'a> OrientSearch<'a> {
    fn new(g: &'a Multigraph) -> Option<Self> {
        let deg = g.degrees();
        if deg.iter().any(|d| d % 2 != 0) {
            return None;
        }
        Some(OrientSearch {
            edges: g.edges(),
            half: deg.iter().map(|d| d / 2).collect(),
            rem: deg,
            out: vec![0; g.vertex_count()],
            bits: Vec::with_capacity(g.edge_count()),
        })
    }

    /// Seed the state with an already-chosen prefix of edge directions.
    fn with_prefix(g: &'a Multigraph, prefix: &[bool]) -> Option<Self> {
        let mut s = Self::new(g)?;
        for (e, &dir) in prefix.iter().enumerate() {
            let (a, b) = s.edges[e];
            let tail = if dir { a } else { b };
            s.out[tail] += 1;
            s.rem[a] -= 1;
            s.rem[b] -= 1;
            s.bits.push(dir);
        }
        Some(s)
    }

    fn feasible(&self, v: usize) -> bool {
        self.out[v] <= self.half[v] && self.out[v] + self.rem[v] >= self.half[v]
    }

    /// Depth-first over edges in id order, direction `false` before `true`,
    /// pruning on per-vertex balance. Calls `visit` at depth `limit`.
    fn run(
        &mut self,
        limit: usize,
        budget: &Budget,
        visit: &mut dyn FnMut(&[bool]) -> Result<(), CountError>,
    ) -> Result<(), CountError> {
        if self.bits.len() == limit {
            return visit(&self.bits);
        }
        let e = self.bits.len();
        let (a, b) = self.edges[e];
        for dir in [false, true] {
            budget.charge(1)?;
            let tail = if dir { a } else { b };
            self.out[tail] += 1;
            self.rem[a] -= 1;
            self.rem[b] -= 1;
            self.bits.push(dir);
            if self.feasible(a) && self.feasible(b) {
                self.run(limit, budget, visit)?;
            }
            self.bits.pop();
            self.out[tail] -= 1;
            self.rem[a] += 1;
            self.rem[b] += 1;
        }
        Ok(())
    }
}

/// Visit every Eulerian orientation of `g` exactly once, in a fixed order.
pub fn for_each_eulerian_orientation(
    g: &Multigraph,
    budget: &Budget,
    f: &mut dyn FnMut(&Orientation) -> Result<(), CountError>,
) -> Result<(), CountError> {
    if g.edge_count() == 0 {
        return Ok(());
    }
    let Some(mut search) = OrientSearch::new(g) else {
        return Ok(());
    };
    let m = g.edge_count();
    search.run(m, budget, &mut |bits| {
        f(&Orientation::new(bits.to_vec()))
    })
}

/// All Eulerian orientations, in the engine's deterministic order.
pub fn enumerate_eulerian_orientations(g: &Multigraph) -> Vec<Orientation> {
    let mut out = Vec::new();
    for_each_eulerian_orientation(g, &Budget::unlimited(), &mut |o| {
        out.push(o.clone());
        Ok(())
    })
    .expect("unlimited budget cannot be exceeded");
    out
}

/// Sum `term` over all Eulerian orientations, optionally fanning the search
/// out over a fixed prefix partition so worker counts cannot change the
/// result.
fn sum_over_eulerian_orientations(
    g: &Multigraph,
    opts: &SearchOpts,
    budget: &Budget,
    term: &(dyn Fn(&Orientation) -> BigUint + Sync),
) -> Result<BigUint, CountError> {
    if g.edge_count() == 0 {
        return Ok(BigUint::zero());
    }
    if OrientSearch::new(g).is_none() {
        return Ok(BigUint::zero());
    }
    let m = g.edge_count();
    if opts.threads <= 1 {
        let mut acc = BigUint::zero();
        let mut search = OrientSearch::new(g).unwrap();
        search.run(m, budget, &mut |bits| {
            acc += term(&Orientation::new(bits.to_vec()));
            Ok(())
        })?;
        return Ok(acc);
    }
    // partition the search space on the first few edges
    let mut depth = 0usize;
    while depth < m && (1usize << depth) < 4 * opts.threads && depth < 12 {
        depth += 1;
    }
    let mut prefixes: Vec<Vec<bool>> = Vec::new();
    let mut search = OrientSearch::new(g).unwrap();
    search.run(depth, budget, &mut |bits| {
        prefixes.push(bits.to_vec());
        Ok(())
    })?;
    let partials: Vec<Result<BigUint, CountError>> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut acc = BigUint::zero();
            let mut search = OrientSearch::with_prefix(g, prefix).unwrap();
            search.run(m, budget, &mut |bits| {
                acc += term(&Orientation::new(bits.to_vec()));
                Ok(())
            })?;
            Ok(acc)
        })
        .collect();
    let mut acc = BigUint::zero();
    for p in partials {
        acc += p?;
    }
    Ok(acc)
}

/// Number of Eulerian orientations of `g`; 0 when a degree is odd or `m = 0`.
pub fn count_eulerian_orientations(g: &Multigraph) -> Count {
    count_eulerian_orientations_opt(g, &SearchOpts::default()).expect("unlimited budget")
}

pub fn count_eulerian_orientations_opt(
    g: &Multigraph,
    opts: &SearchOpts,
) -> Result<Count, CountError> {
    let budget = opts.budget();
    sum_over_eulerian_orientations(g, opts, &budget, &|_| BigUint::one())
}

// ---------------------------------------------------------------------------
// Arborescences and directed circuits
// ---------------------------------------------------------------------------

fn det_to_count(det: BigInt) -> Count {
    debug_assert!(!det.is_negative(), "arborescence determinant went negative");
    det.to_biguint().unwrap_or_default()
}

/// Number of arborescences of `d` oriented toward `root`, parallel arcs
/// distinguished, via the Matrix-Tree determinant.
pub fn count_arborescences(d: &DirectedMultigraph, root: usize) -> Result<Count, CountError> {
    if root >= d.vertex_count() {
        return Err(CountError::RootOutOfRange(root, d.vertex_count()));
    }
    if d.arc_count() == 0 || !d.support().contains(&root) {
        return Ok(BigUint::zero());
    }
    let minor = out_laplacian_minor_unit(d, root).expect("root checked");
    Ok(det_to_count(det_exact(&minor)))
}

/// Directed Eulerian circuits of `d` as cyclic arc sequences, through the
/// arborescence determinant and the factorial correspondence. 0 unless `d`
/// is balanced with connected support.
pub fn count_circuits_directed_best(d: &DirectedMultigraph) -> Result<Count, CountError> {
    if d.arc_count() == 0 || !d.is_balanced() || !d.support_connected() {
        return Ok(BigUint::zero());
    }
    let support = d.support();
    let root = support[0];
    let arbs = count_arborescences(d, root)?;
    let out = d.out_degrees();
    let mut acc = arbs;
    for &v in &support {
        acc *= factorial(out[v] - 1);
    }
    Ok(acc)
}

/// Independent oracle for directed circuit counting: exhaustively walk
/// closed arc trails from the least support vertex and divide by its
/// out-degree. Never uses determinants.
pub fn brute_force_circuits_directed(d: &DirectedMultigraph) -> Result<Count, CountError> {
    brute_force_circuits_directed_budgeted(d, &Budget::unlimited())
}

pub fn brute_force_circuits_directed_budgeted(
    d: &DirectedMultigraph,
    budget: &Budget,
) -> Result<Count, CountError> {
    if d.arc_count() == 0 || !d.is_balanced() || !d.support_connected() {
        return Ok(BigUint::zero());
    }
    let root = d.support()[0];
    let mut out_arcs = vec![Vec::new(); d.vertex_count()];
    for (id, &(t, h)) in d.arcs().iter().enumerate() {
        out_arcs[t].push((id, h));
    }
    let m = d.arc_count();
    let mut used = vec![false; m];
    let mut trails: u128 = 0;
    fn dfs(
        cur: usize,
        placed: usize,
        m: usize,
        root: usize,
        out_arcs: &[Vec<(usize, usize)>],
        used: &mut [bool],
        trails: &mut u128,
        budget: &Budget,
    ) -> Result<(), CountError> {
        if placed == m {
            if cur == root {
                *trails += 1;
            }
            return Ok(());
        }
        for &(id, h) in &out_arcs[cur] {
            if used[id] {
                continue;
            }
            budget.charge(1)?;
            used[id] = true;
            dfs(h, placed + 1, m, root, out_arcs, used, trails, budget)?;
            used[id] = false;
        }
        Ok(())
    }
    dfs(root, 0, m, root, &out_arcs, &mut used, &mut trails, budget)?;
    let d_r = d.out_degrees()[root];
    exact_div(BigUint::from(trails), &BigUint::from(d_r))
}

// ---------------------------------------------------------------------------
// Orbs
// ---------------------------------------------------------------------------

/// An Eulerian orientation together with an arborescence (for that
/// orientation) toward `root`. Tree arcs are edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orb {
    pub orientation: Orientation,
    pub tree_arcs: Vec<usize>,
    pub root: usize,
}

impl Orb {
    pub fn validate(&self, g: &Multigraph) -> Result<(), CountError> {
        let d = g
            .orient(&self.orientation)
            .map_err(|e| CountError::InvalidOrb(e.to_string()))?;
        if !d.is_balanced() {
            return Err(CountError::InvalidOrb("orientation is not Eulerian".into()));
        }
        if self.root >= g.vertex_count() {
            return Err(CountError::InvalidOrb("root out of range".into()));
        }
        let support = g.support();
        if !support.contains(&self.root) {
            return Err(CountError::InvalidOrb("root outside support".into()));
        }
        // one outgoing tree arc per non-root support vertex, none at the root
        let mut parent = vec![usize::MAX; g.vertex_count()];
        for &e in &self.tree_arcs {
            if e >= g.edge_count() {
                return Err(CountError::InvalidOrb(format!("tree arc {e} out of range")));
            }
            let (t, h) = d.arcs()[e];
            if t == self.root {
                return Err(CountError::InvalidOrb("tree arc exits the root".into()));
            }
            if parent[t] != usize::MAX {
                return Err(CountError::InvalidOrb(format!(
                    "vertex {t} has two outgoing tree arcs"
                )));
            }
            parent[t] = h;
        }
        for &v in &support {
            if v != self.root && parent[v] == usize::MAX {
                return Err(CountError::InvalidOrb(format!(
                    "vertex {v} has no outgoing tree arc"
                )));
            }
        }
        // every support vertex must reach the root through the tree
        for &v in &support {
            let mut cur = v;
            let mut steps = 0;
            while cur != self.root {
                cur = parent[cur];
                steps += 1;
                if steps > g.vertex_count() {
                    return Err(CountError::InvalidOrb("tree arcs contain a cycle".into()));
                }
            }
        }
        Ok(())
    }
}

/// True iff following `parent` pointers reaches `root` from every vertex
/// that has one.
fn tree_reaches_root(parent: &[usize], root: usize) -> bool {
    // 0 = unvisited, 1 = on current chain, 2 = known good
    let mut state = vec![0u8; parent.len()];
    state[root] = 2;
    for start in 0..parent.len() {
        if parent[start] == usize::MAX {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = start;
        loop {
            if state[cur] == 2 {
                break;
            }
            if state[cur] == 1 {
                return false; // cycle
            }
            state[cur] = 1;
            chain.push(cur);
            if parent[cur] == usize::MAX {
                return false; // dead end off the support
            }
            cur = parent[cur];
        }
        for v in chain {
            state[v] = 2;
        }
    }
    true
}

/// Visit every orb of `g` rooted at `root`: every Eulerian orientation paired
/// with every arborescence toward the root. The callback receives the
/// orientation and the tree's edge ids (ascending).
pub fn for_each_orb(
    g: &Multigraph,
    root: usize,
    budget: &Budget,
    f: &mut dyn FnMut(&Orientation, &[usize]) -> Result<(), CountError>,
) -> Result<(), CountError> {
    if root >= g.vertex_count() {
        return Err(CountError::RootOutOfRange(root, g.vertex_count()));
    }
    if !g.is_eulerian() || !g.support().contains(&root) {
        return Ok(());
    }
    let support = g.support();
    let choosers: Vec<usize> = support.iter().copied().filter(|&v| v != root).collect();
    for_each_eulerian_orientation(g, budget, &mut |o| {
        let d = g.orient(o).expect("orientation length matches");
        let mut out_arcs = vec![Vec::new(); g.vertex_count()];
        for (id, &(t, h)) in d.arcs().iter().enumerate() {
            out_arcs[t].push((id, h));
        }
        // choose one outgoing arc per non-root support vertex
        let mut chosen = vec![usize::MAX; choosers.len()];
        let mut parent = vec![usize::MAX; g.vertex_count()];
        fn rec(
            i: usize,
            choosers: &[usize],
            out_arcs: &[Vec<(usize, usize)>],
            chosen: &mut [usize],
            parent: &mut [usize],
            root: usize,
            budget: &Budget,
            f: &mut dyn FnMut(&[usize]) -> Result<(), CountError>,
        ) -> Result<(), CountError> {
            if i == choosers.len() {
                if tree_reaches_root(parent, root) {
                    let mut tree: Vec<usize> = chosen.to_vec();
                    tree.sort_unstable();
                    return f(&tree);
                }
                return Ok(());
            }
            let v = choosers[i];
            for &(id, h) in &out_arcs[v] {
                budget.charge(1)?;
                chosen[i] = id;
                parent[v] = h;
                rec(i + 1, choosers, out_arcs, chosen, parent, root, budget, f)?;
                parent[v] = usize::MAX;
            }
            Ok(())
        }
        rec(
            0,
            &choosers,
            &out_arcs,
            &mut chosen,
            &mut parent,
            root,
            budget,
            &mut |tree| f(o, tree),
        )
    })
}

/// Orb count as a sum of arborescence determinants over Eulerian
/// orientations. 0 when `g` is not Eulerian or the root is off-support.
pub fn count_orbs(g: &Multigraph, root: usize) -> Result<Count, CountError> {
    count_orbs_opt(g, root, &SearchOpts::default())
}

pub fn count_orbs_opt(
    g: &Multigraph,
    root: usize,
    opts: &SearchOpts,
) -> Result<Count, CountError> {
    if root >= g.vertex_count() {
        return Err(CountError::RootOutOfRange(root, g.vertex_count()));
    }
    if !g.is_eulerian() || !g.support().contains(&root) {
        return Ok(BigUint::zero());
    }
    let budget = opts.budget();
    sum_over_eulerian_orientations(g, opts, &budget, &|o| {
        let d = g.orient(o).expect("orientation length matches");
        let minor = out_laplacian_minor_unit(&d, root).expect("root checked");
        det_to_count(det_exact(&minor))
    })
}

/// Undirected Eulerian circuit count through the factorial correspondence:
/// each orb is constructed from `prod_v (d_v - 1)!` distinct circuits, so
/// circuits = orbs * multiplicity.
pub fn count_circuits_undirected(g: &Multigraph, root: usize) -> Result<Count, CountError> {
    count_circuits_undirected_opt(g, root, &SearchOpts::default())
}

pub fn count_circuits_undirected_opt(
    g: &Multigraph,
    root: usize,
    opts: &SearchOpts,
) -> Result<Count, CountError> {
    let orbs = count_orbs_opt(g, root, opts)?;
    if orbs.is_zero() {
        return Ok(orbs);
    }
    Ok(orbs * circuit_multiplicity(g)?)
}

/// Independent circuit oracle: exhaustively walk closed trails from the
/// least support vertex and divide by its half-degree. Never uses the orb
/// machinery.
pub fn brute_force_circuits(g: &Multigraph) -> Result<Count, CountError> {
    brute_force_circuits_budgeted(g, &Budget::unlimited())
}

pub fn brute_force_circuits_budgeted(
    g: &Multigraph,
    budget: &Budget,
) -> Result<Count, CountError> {
    if !g.is_eulerian() {
        return Ok(BigUint::zero());
    }
    let root = g.support()[0];
    let mut incident = vec![Vec::new(); g.vertex_count()];
    for (id, &(a, b)) in g.edges().iter().enumerate() {
        incident[a].push((id, b));
        incident[b].push((id, a));
    }
    let m = g.edge_count();
    let mut used = vec![false; m];
    let mut trails: u128 = 0;
    fn dfs(
        cur: usize,
        placed: usize,
        m: usize,
        root: usize,
        incident: &[Vec<(usize, usize)>],
        used: &mut [bool],
        trails: &mut u128,
        budget: &Budget,
    ) -> Result<(), CountError> {
        if placed == m {
            if cur == root {
                *trails += 1;
            }
            return Ok(());
        }
        for &(id, other) in &incident[cur] {
            if used[id] {
                continue;
            }
            budget.charge(1)?;
            used[id] = true;
            dfs(other, placed + 1, m, root, incident, used, trails, budget)?;
            used[id] = false;
        }
        Ok(())
    }
    dfs(root, 0, m, root, &incident, &mut used, &mut trails, budget)?;
    let d_r = g.degrees()[root] / 2;
    exact_div(BigUint::from(trails), &BigUint::from(d_r))
}

// ---------------------------------------------------------------------------
// Circuits as sequences; the orb <-> circuit correspondence
// ---------------------------------------------------------------------------

/// A cyclic edge-traversal sequence in canonical form (the lexicographically
/// least rotation of its `(edge id, forward?)` steps).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircuitSequence {
    steps: Vec<(usize, bool)>,
}

impl CircuitSequence {
    /// Canonicalize a traversal sequence by rotation.
    pub fn new(steps: Vec<(usize, bool)>) -> Self {
        if steps.is_empty() {
            return CircuitSequence { steps };
        }
        let n = steps.len();
        let mut best = 0;
        for start in 1..n {
            for i in 0..n {
                let a = steps[(start + i) % n];
                let b = steps[(best + i) % n];
                match a.cmp(&b) {
                    std::cmp::Ordering::Less => {
                        best = start;
                        break;
                    }
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        let rotated = (0..n).map(|i| steps[(best + i) % n]).collect();
        CircuitSequence { steps: rotated }
    }

    pub fn steps(&self) -> &[(usize, bool)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn step_endpoints(g: &Multigraph, step: (usize, bool)) -> (usize, usize) {
    let (a, b) = g.edges()[step.0];
    if step.1 {
        (a, b)
    } else {
        (b, a)
    }
}

/// Walk a circuit out of an orb: follow unused outgoing arcs per the given
/// orderings, saving each vertex's tree arc for last. `orderings[v]` is a
/// permutation of the non-tree outgoing edge ids at `v` (all outgoing ids at
/// the root).
pub fn circuit_from_orb(
    g: &Multigraph,
    orb: &Orb,
    orderings: &[Vec<usize>],
) -> Result<CircuitSequence, CountError> {
    orb.validate(g)?;
    let d = g.orient(&orb.orientation).expect("validated");
    if orderings.len() != g.vertex_count() {
        return Err(CountError::InvalidOrdering(format!(
            "expected {} per-vertex orderings, got {}",
            g.vertex_count(),
            orderings.len()
        )));
    }
    let in_tree: std::collections::HashSet<usize> = orb.tree_arcs.iter().copied().collect();
    // check each ordering is a permutation of the expected arc set
    for v in g.support() {
        let mut expected: Vec<usize> = d
            .arcs()
            .iter()
            .enumerate()
            .filter(|&(id, &(t, _))| t == v && (v == orb.root || !in_tree.contains(&id)))
            .map(|(id, _)| id)
            .collect();
        let mut given = orderings[v].clone();
        expected.sort_unstable();
        given.sort_unstable();
        if expected != given {
            return Err(CountError::InvalidOrdering(format!(
                "ordering at vertex {v} is not a permutation of its arcs"
            )));
        }
    }
    let mut next_choice = vec![0usize; g.vertex_count()];
    let mut tree_at = vec![usize::MAX; g.vertex_count()];
    for &e in &orb.tree_arcs {
        tree_at[d.arcs()[e].0] = e;
    }
    let mut used = vec![false; g.edge_count()];
    let mut steps = Vec::with_capacity(g.edge_count());
    let mut cur = orb.root;
    loop {
        let arc = if next_choice[cur] < orderings[cur].len() {
            let a = orderings[cur][next_choice[cur]];
            next_choice[cur] += 1;
            a
        } else if cur != orb.root && tree_at[cur] != usize::MAX && !used[tree_at[cur]] {
            tree_at[cur]
        } else {
            break;
        };
        used[arc] = true;
        steps.push((arc, orb.orientation.bit(arc)));
        cur = d.arcs()[arc].1;
    }
    if steps.len() != g.edge_count() || cur != orb.root {
        // cannot happen for a validated orb
        return Err(CountError::InvalidOrb(
            "walk did not traverse every edge".into(),
        ));
    }
    Ok(CircuitSequence::new(steps))
}

/// Recover the orb induced by a circuit: the traversal orientation plus the
/// exit-edge arborescence (the last edge leaving each non-root vertex before
/// the circuit's final return to the root, reading the canonical sequence
/// from its first departure out of the root).
pub fn circuit_to_orb(
    g: &Multigraph,
    c: &CircuitSequence,
    root: usize,
) -> Result<Orb, CountError> {
    if c.is_empty() || c.len() != g.edge_count() {
        return Err(CountError::InvalidCircuit(format!(
            "circuit has {} steps, graph has {} edges",
            c.len(),
            g.edge_count()
        )));
    }
    let mut seen = vec![false; g.edge_count()];
    for &(e, _) in c.steps() {
        if e >= g.edge_count() || seen[e] {
            return Err(CountError::InvalidCircuit(format!(
                "edge {e} repeated or out of range"
            )));
        }
        seen[e] = true;
    }
    let n = c.len();
    for i in 0..n {
        let (_, head) = step_endpoints(g, c.steps()[i]);
        let (tail, _) = step_endpoints(g, c.steps()[(i + 1) % n]);
        if head != tail {
            return Err(CountError::InvalidCircuit(format!(
                "steps {i} and {} do not share a vertex",
                (i + 1) % n
            )));
        }
    }
    let start = (0..n)
        .find(|&i| step_endpoints(g, c.steps()[i]).0 == root)
        .ok_or_else(|| CountError::InvalidCircuit(format!("root {root} not on the circuit")))?;
    let mut bits = vec![false; g.edge_count()];
    for &(e, dir) in c.steps() {
        bits[e] = dir;
    }
    let mut exit = vec![usize::MAX; g.vertex_count()];
    for i in 0..n {
        let (e, _) = c.steps()[(start + i) % n];
        let (tail, _) = step_endpoints(g, c.steps()[(start + i) % n]);
        if tail != root {
            exit[tail] = e;
        }
    }
    let mut tree_arcs: Vec<usize> = exit.iter().copied().filter(|&e| e != usize::MAX).collect();
    tree_arcs.sort_unstable();
    let orb = Orb {
        orientation: Orientation::new(bits),
        tree_arcs,
        root,
    };
    orb.validate(g)?;
    Ok(orb)
}

// ---------------------------------------------------------------------------
// Bundle-aggregated engines
// ---------------------------------------------------------------------------

/// A maximal set of parallel edges between one vertex pair, `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub u: usize,
    pub v: usize,
    pub edge_ids: Vec<usize>,
}

impl Bundle {
    pub fn size(&self) -> usize {
        self.edge_ids.len()
    }
}

/// Parallel bundles of `g`, ordered by their first edge id.
pub fn bundles(g: &Multigraph) -> Vec<Bundle> {
    let mut index: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    let mut out: Vec<Bundle> = Vec::new();
    for (id, &(a, b)) in g.edges().iter().enumerate() {
        let key = (a.min(b), a.max(b));
        match index.get(&key) {
            Some(&i) => out[i].edge_ids.push(id),
            None => {
                index.insert(key, out.len());
                out.push(Bundle {
                    u: key.0,
                    v: key.1,
                    edge_ids: vec![id],
                });
            }
        }
    }
    out
}

struct SplitSearch<'a> {
    bundles: &'a [Bundle],
    half: Vec<usize>,
    out: Vec<usize>,
    rem: Vec<usize>,
    ks: Vec<usize>,
}

impl<'a> SplitSearch<'a> {
    fn new(g: &Multigraph, bundles: &'a [Bundle]) -> Option<Self> {
        let deg = g.degrees();
        if deg.iter().any(|d| d % 2 != 0) {
            return None;
        }
        Some(SplitSearch {
            bundles,
            half: deg.iter().map(|d| d / 2).collect(),
            rem: deg,
            out: vec![0; g.vertex_count()],
            ks: Vec::with_capacity(bundles.len()),
        })
    }

    fn with_prefix(g: &Multigraph, bundles: &'a [Bundle], prefix: &[usize]) -> Option<Self> {
        let mut s = Self::new(g, bundles)?;
        for (i, &k) in prefix.iter().enumerate() {
            let b = &s.bundles[i];
            s.out[b.u] += k;
            s.out[b.v] += b.size() - k;
            s.rem[b.u] -= b.size();
            s.rem[b.v] -= b.size();
            s.ks.push(k);
        }
        Some(s)
    }

    fn feasible(&self, v: usize) -> bool {
        self.out[v] <= self.half[v] && self.out[v] + self.rem[v] >= self.half[v]
    }

    /// Enumerate per-bundle split counts `k` (copies oriented from the
    /// smaller- to the larger-indexed endpoint) in mixed-radix order,
    /// pruning on per-vertex balance.
    fn run(
        &mut self,
        limit: usize,
        allowed: &dyn Fn(usize, usize) -> bool,
        budget: &Budget,
        visit: &mut dyn FnMut(&[usize]) -> Result<(), CountError>,
    ) -> Result<(), CountError> {
        if self.ks.len() == limit {
            return visit(&self.ks);
        }
        let i = self.ks.len();
        let b = &self.bundles[i];
        let size = b.size();
        let (u, v) = (b.u, b.v);
        for k in 0..=size {
            if !allowed(i, k) {
                continue;
            }
            budget.charge(1)?;
            self.out[u] += k;
            self.out[v] += size - k;
            self.rem[u] -= size;
            self.rem[v] -= size;
            self.ks.push(k);
            if self.feasible(u) && self.feasible(v) {
                self.run(limit, allowed, budget, visit)?;
            }
            self.ks.pop();
            self.out[u] -= k;
            self.out[v] -= size - k;
            self.rem[u] += size;
            self.rem[v] += size;
        }
        Ok(())
    }
}

fn sum_over_balanced_splits(
    g: &Multigraph,
    opts: &SearchOpts,
    budget: &Budget,
    allowed: &(dyn Fn(usize, usize) -> bool + Sync),
    term: &(dyn Fn(&[Bundle], &[usize]) -> BigUint + Sync),
) -> Result<BigUint, CountError> {
    if g.edge_count() == 0 {
        return Ok(BigUint::zero());
    }
    let bs = bundles(g);
    let Some(mut search) = SplitSearch::new(g, &bs) else {
        return Ok(BigUint::zero());
    };
    let nb = bs.len();
    if opts.threads <= 1 {
        let mut acc = BigUint::zero();
        search.run(nb, allowed, budget, &mut |ks| {
            acc += term(&bs, ks);
            Ok(())
        })?;
        return Ok(acc);
    }
    let mut depth = 0usize;
    let mut fanout = 1usize;
    while depth < nb && fanout < 4 * opts.threads {
        fanout *= bs[depth].size() + 1;
        depth += 1;
    }
    let mut prefixes: Vec<Vec<usize>> = Vec::new();
    search.run(depth, allowed, budget, &mut |ks| {
        prefixes.push(ks.to_vec());
        Ok(())
    })?;
    let partials: Vec<Result<BigUint, CountError>> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut acc = BigUint::zero();
            let mut search = SplitSearch::with_prefix(g, &bs, prefix).unwrap();
            search.run(nb, allowed, budget, &mut |ks| {
                acc += term(&bs, ks);
                Ok(())
            })?;
            Ok(acc)
        })
        .collect();
    let mut acc = BigUint::zero();
    for p in partials {
        acc += p?;
    }
    Ok(acc)
}

fn split_orientation_weight(bs: &[Bundle], ks: &[usize]) -> BigUint {
    bs.iter()
        .zip(ks)
        .fold(BigUint::one(), |acc, (b, &k)| acc * binomial(b.size(), k))
}

/// Eulerian orientation count via bundle aggregation: sums the binomial
/// weight of every balanced split vector instead of enumerating single-edge
/// orientations.
pub fn count_eulerian_orientations_bundled(
    g: &Multigraph,
    opts: &SearchOpts,
) -> Result<Count, CountError> {
    count_orientations_bundled_restricted(g, &|_, _| true, opts)
}

/// Same, but only split values `k` with `allowed(bundle, k)` participate.
/// Used by the satisfiability reduction to count unanimous-bundle
/// orientations.
pub fn count_orientations_bundled_restricted(
    g: &Multigraph,
    allowed: &(dyn Fn(&Bundle, usize) -> bool + Sync),
    opts: &SearchOpts,
) -> Result<Count, CountError> {
    let bs = bundles(g);
    let budget = opts.budget();
    sum_over_balanced_splits(
        g,
        opts,
        &budget,
        &|i, k| allowed(&bs[i], k),
        &split_orientation_weight,
    )
}

/// Orb count by bundle aggregation: per balanced split vector, the binomial
/// orientation weight times the weighted Matrix-Tree determinant, where arc
/// weights are the per-direction bundle multiplicities. Agrees exactly with
/// `count_orbs`.
pub fn count_orbs_bundled(
    g: &Multigraph,
    root: usize,
    opts: &SearchOpts,
) -> Result<Count, CountError> {
    if root >= g.vertex_count() {
        return Err(CountError::RootOutOfRange(root, g.vertex_count()));
    }
    if !g.is_eulerian() || !g.support().contains(&root) {
        return Ok(BigUint::zero());
    }
    let n = g.vertex_count();
    let budget = opts.budget();
    sum_over_balanced_splits(g, opts, &budget, &|_, _| true, &move |bs, ks| {
        let mut arcs = Vec::new();
        let mut weights = Vec::new();
        for (b, &k) in bs.iter().zip(ks) {
            if k > 0 {
                arcs.push((b.u, b.v));
                weights.push(k as u64);
            }
            if b.size() - k > 0 {
                arcs.push((b.v, b.u));
                weights.push((b.size() - k) as u64);
            }
        }
        let d = DirectedMultigraph::new(n, arcs).expect("bundle endpoints in range");
        let minor = out_laplacian_minor(&d, &weights, root).expect("root checked");
        split_orientation_weight(bs, ks) * det_to_count(det_exact(&minor))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Multigraph;
    use num_traits::ToPrimitive;

    fn parse(s: &str) -> Multigraph {
        Multigraph::parse(s).unwrap()
    }

    fn triangle() -> Multigraph {
        parse("p euler 3 3\ne 1 2\ne 2 3\ne 1 3\n")
    }

    fn digon() -> Multigraph {
        parse("p euler 2 2\ne 1 2\ne 1 2\n")
    }

    fn c4() -> Multigraph {
        parse("p euler 4 4\ne 1 2\ne 2 3\ne 3 4\ne 1 4\n")
    }

    fn bowtie() -> Multigraph {
        parse("p euler 5 6\ne 1 2\ne 2 5\ne 1 5\ne 3 4\ne 4 5\ne 3 5\n")
    }

    fn count(c: Result<Count, CountError>) -> u64 {
        c.unwrap().to_u64().unwrap()
    }

    /// Oracle: filter all 2^m direction vectors for balance.
    fn orientations_by_exhaustion(g: &Multigraph) -> Vec<Orientation> {
        let m = g.edge_count();
        let mut out = Vec::new();
        for mask in 0u64..(1 << m) {
            let bits: Vec<bool> = (0..m).map(|e| mask >> e & 1 == 1).collect();
            let o = Orientation::new(bits);
            if g.orient(&o).unwrap().is_balanced() {
                out.push(o);
            }
        }
        out
    }

    #[test]
    fn orientation_enumeration_matches_exhaustion() {
        for g in [triangle(), digon(), c4(), bowtie()] {
            let fast: std::collections::HashSet<_> =
                enumerate_eulerian_orientations(&g).into_iter().collect();
            let slow: std::collections::HashSet<_> =
                orientations_by_exhaustion(&g).into_iter().collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn orientation_counts() {
        assert_eq!(enumerate_eulerian_orientations(&triangle()).len(), 2);
        assert_eq!(enumerate_eulerian_orientations(&digon()).len(), 2);
        assert_eq!(enumerate_eulerian_orientations(&bowtie()).len(), 4);
        assert_eq!(count_eulerian_orientations(&c4()).to_u64(), Some(2));
        let path = parse("p euler 2 1\ne 1 2\n");
        assert_eq!(count_eulerian_orientations(&path).to_u64(), Some(0));
        let empty = parse("p euler 3 0\n");
        assert_eq!(count_eulerian_orientations(&empty).to_u64(), Some(0));
    }

    #[test]
    fn enumeration_order_is_stable() {
        let first = enumerate_eulerian_orientations(&bowtie());
        let second = enumerate_eulerian_orientations(&bowtie());
        assert_eq!(first, second);
    }

    #[test]
    fn arborescence_counts() {
        let cycle = DirectedMultigraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(count(count_arborescences(&cycle, 0)), 1);
        let mut arcs = Vec::new();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        let doubled = DirectedMultigraph::new(3, arcs).unwrap();
        assert_eq!(count(count_arborescences(&doubled, 0)), 3);
        let fan = DirectedMultigraph::new(3, vec![(0, 1), (0, 2)]).unwrap();
        assert_eq!(count(count_arborescences(&fan, 0)), 0);
        assert!(matches!(
            count_arborescences(&fan, 9),
            Err(CountError::RootOutOfRange(9, 3))
        ));
    }

    #[test]
    fn directed_best_counts() {
        let cycle = DirectedMultigraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(count(count_circuits_directed_best(&cycle)), 1);
        let mut arcs = Vec::new();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        let doubled = DirectedMultigraph::new(3, arcs).unwrap();
        assert_eq!(count(count_circuits_directed_best(&doubled)), 3);
        let disjoint =
            DirectedMultigraph::new(6, vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
                .unwrap();
        assert_eq!(count(count_circuits_directed_best(&disjoint)), 0);
    }

    #[test]
    fn directed_best_matches_brute_force() {
        let mut arcs = Vec::new();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        let doubled = DirectedMultigraph::new(3, arcs).unwrap();
        assert_eq!(
            count_circuits_directed_best(&doubled).unwrap(),
            brute_force_circuits_directed(&doubled).unwrap()
        );
    }

    #[test]
    fn orb_counts() {
        for root in 0..3 {
            assert_eq!(count(count_orbs(&triangle(), root)), 2);
        }
        assert_eq!(count(count_orbs(&digon(), 0)), 2);
        assert_eq!(count(count_orbs(&bowtie(), 4)), 4);
        let path = parse("p euler 2 1\ne 1 2\n");
        assert_eq!(count(count_orbs(&path, 0)), 0);
    }

    #[test]
    fn orb_count_matches_orb_enumeration() {
        for (g, root) in [(triangle(), 0), (digon(), 1), (bowtie(), 4), (c4(), 2)] {
            let mut seen = 0u64;
            for_each_orb(&g, root, &Budget::unlimited(), &mut |o, tree| {
                let orb = Orb {
                    orientation: o.clone(),
                    tree_arcs: tree.to_vec(),
                    root,
                };
                orb.validate(&g).unwrap();
                seen += 1;
                Ok(())
            })
            .unwrap();
            assert_eq!(Some(seen), count_orbs(&g, root).unwrap().to_u64());
        }
    }

    #[test]
    fn bundled_orbs_match_naive() {
        let opts = SearchOpts::default();
        for (g, root) in [(digon(), 0), (triangle(), 1), (bowtie(), 4), (c4(), 0)] {
            assert_eq!(
                count_orbs_bundled(&g, root, &opts).unwrap(),
                count_orbs(&g, root).unwrap()
            );
        }
    }

    #[test]
    fn bundled_orientations_match_naive() {
        let opts = SearchOpts::default();
        for g in [digon(), triangle(), bowtie(), c4()] {
            assert_eq!(
                count_eulerian_orientations_bundled(&g, &opts).unwrap(),
                count_eulerian_orientations(&g)
            );
        }
    }

    #[test]
    fn undirected_circuit_counts() {
        assert_eq!(count(count_circuits_undirected(&triangle(), 0)), 2);
        assert_eq!(count(count_circuits_undirected(&bowtie(), 4)), 4);
        assert_eq!(count(count_circuits_undirected(&c4(), 0)), 2);
    }

    #[test]
    fn brute_force_circuit_counts() {
        assert_eq!(count(brute_force_circuits(&triangle())), 2);
        assert_eq!(count(brute_force_circuits(&digon())), 2);
        assert_eq!(count(brute_force_circuits(&bowtie())), 4);
        let path = parse("p euler 2 1\ne 1 2\n");
        assert_eq!(count(brute_force_circuits(&path)), 0);
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let budget = Budget::limited(3);
        let res = for_each_eulerian_orientation(&bowtie(), &budget, &mut |_| Ok(()));
        assert_eq!(res, Err(CountError::BudgetExceeded));
    }

    #[test]
    fn parallel_results_match_sequential() {
        let seq = SearchOpts::default();
        let par = SearchOpts {
            threads: 4,
            node_budget: None,
        };
        for (g, root) in [(bowtie(), 4), (triangle(), 0)] {
            assert_eq!(
                count_orbs_opt(&g, root, &par).unwrap(),
                count_orbs_opt(&g, root, &seq).unwrap()
            );
            assert_eq!(
                count_orbs_bundled(&g, root, &par).unwrap(),
                count_orbs_bundled(&g, root, &seq).unwrap()
            );
        }
    }

    #[test]
    fn circuit_sequence_canonical_rotation() {
        let a = CircuitSequence::new(vec![(1, true), (2, false), (0, true)]);
        let b = CircuitSequence::new(vec![(0, true), (1, true), (2, false)]);
        assert_eq!(a, b);
        assert_eq!(a.steps()[0], (0, true));
    }

    #[test]
    fn circuit_to_orb_triangle() {
        let g = triangle();
        // 1 -> 2 -> 3 -> 1 in file labels: edges 0 fwd, 1 fwd, 2 reversed
        let c = CircuitSequence::new(vec![(0, true), (1, true), (2, false)]);
        let orb = circuit_to_orb(&g, &c, 0).unwrap();
        assert_eq!(orb.tree_arcs, vec![1, 2]);
        let rev = CircuitSequence::new(vec![(2, true), (1, false), (0, false)]);
        let orb2 = circuit_to_orb(&g, &rev, 0).unwrap();
        assert_ne!(orb.orientation, orb2.orientation);
        orb2.validate(&g).unwrap();
    }

    #[test]
    fn circuit_from_orb_triangle_forced() {
        let g = triangle();
        let orb = Orb {
            orientation: Orientation::new(vec![true, true, false]),
            tree_arcs: vec![1, 2],
            root: 0,
        };
        let orderings = vec![vec![0], vec![], vec![]];
        let c = circuit_from_orb(&g, &orb, &orderings).unwrap();
        assert_eq!(c, CircuitSequence::new(vec![(0, true), (1, true), (2, false)]));
    }

    #[test]
    fn circuit_round_trip_on_triangle() {
        let g = triangle();
        let c = CircuitSequence::new(vec![(0, true), (1, true), (2, false)]);
        let orb = circuit_to_orb(&g, &c, 0).unwrap();
        let orderings = vec![vec![0], vec![], vec![]];
        assert_eq!(circuit_from_orb(&g, &orb, &orderings).unwrap(), c);
    }

    #[test]
    fn bundles_group_parallel_edges() {
        let g = parse("p euler 3 5\ne 1 2\ne 2 3\ne 1 2\ne 1 3\ne 2 1\n");
        let bs = bundles(&g);
        assert_eq!(bs.len(), 3);
        assert_eq!(bs[0].edge_ids, vec![0, 2, 4]);
        assert_eq!((bs[0].u, bs[0].v), (0, 1));
    }
}
