//! Maximum admissible families by exhaustive branch and bound.
//!
//! Admissible families are exactly the cliques of the compatibility graph
//! whose vertices are the subsets with an allowed size and whose edges join
//! pairs with an allowed intersection. The search is a clique search with a
//! greedy-colouring bound, optionally capped by the best theorem bound that
//! applies to the problem class.
//!
//! Among maximum families the lexicographically least one (comparing vertex
//! index sequences in canonical order) is returned, independent of the
//! thread count.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, TheoremId};
use crate::error::{Error, Result};
use crate::ffpoly::{PrimeModulus, ResidueSet};
use crate::random::admissible_masks;
use crate::setfam::{binomial, Mode, SetFamily, Subset};

pub const DEFAULT_MAX_N: usize = 10;
pub const DEFAULT_MAX_VERTICES: usize = 1 << 10;
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProblem {
    pub n: usize,
    pub mode: Mode,
    pub k: ResidueSet,
    pub l: ResidueSet,
}

impl SearchProblem {
    pub fn exact(n: usize, k: ResidueSet, l: ResidueSet) -> Self {
        SearchProblem {
            n,
            mode: Mode::Exact,
            k,
            l,
        }
    }

    pub fn modular(n: usize, p: PrimeModulus, k: ResidueSet, l: ResidueSet) -> Self {
        SearchProblem {
            n,
            mode: Mode::Modular(p),
            k,
            l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_n: usize,
    pub max_vertices: usize,
    /// `None` means unlimited.
    pub time_budget: Option<Duration>,
    /// `None` uses rayon's global pool.
    pub threads: Option<usize>,
    /// Cap every node's upper bound by the best applicable theorem bound.
    pub theorem_prune: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_n: DEFAULT_MAX_N,
            max_vertices: DEFAULT_MAX_VERTICES,
            time_budget: Some(DEFAULT_TIME_BUDGET),
            threads: None,
            theorem_prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub max_size: usize,
    pub witness: SetFamily,
    pub vertices: usize,
    pub nodes_explored: u64,
    /// Smallest right-hand side among theorems whose hypotheses hold for the
    /// problem class; the vertex count when none applies.
    pub bound_used: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_source: Option<TheoremId>,
    pub proof_of_optimality: bool,
    pub timed_out: bool,
}

/// The vertex set of the compatibility graph.
pub fn admissible_vertices(problem: &SearchProblem, config: &SearchConfig) -> Result<SetFamily> {
    if problem.n > config.max_n {
        return Err(Error::SearchCapExceeded {
            required: format!("n = {}", problem.n),
            cap: config.max_n,
        });
    }
    let count: u128 = (0..=problem.n)
        .filter(|&size| problem.mode.admits(&problem.k, size))
        .map(|size| binomial(problem.n, size))
        .sum();
    if count > config.max_vertices as u128 {
        return Err(Error::SearchCapExceeded {
            required: format!("{count} vertices"),
            cap: config.max_vertices,
        });
    }
    SetFamily::from_masks(
        problem.n,
        admissible_masks(problem.n, &problem.k, problem.mode),
    )
}

/// Proven theorems whose parameter hypotheses hold for the whole problem
/// class, with their right-hand sides. Family-level hypotheses hold for
/// every admissible family by construction, so they are checked on the
/// empty one. The nonmodular support bound is tested, not proven, so it
/// never prunes.
pub fn applicable_bounds(problem: &SearchProblem) -> Vec<(TheoremId, u128)> {
    let Ok(empty) = SetFamily::empty(problem.n) else {
        return Vec::new();
    };
    let (k, l) = (&problem.k, &problem.l);
    let reports = match problem.mode {
        Mode::Exact => vec![Ok(bounds::check_abs_classic(&empty, k, l))],
        Mode::Modular(p) => vec![
            Ok(bounds::check_modular_multilevel(&empty, k, l, p)),
            bounds::check_coeff_sensitive(&empty, k, l, p, false),
            bounds::check_almost_initial(&empty, k, l, p),
            bounds::check_consecutive(&empty, k, l, p),
        ],
    };
    reports
        .into_iter()
        .filter_map(|r| r.ok())
        .filter(|r| r.hypotheses_ok)
        .map(|r| (r.theorem, r.rhs))
        .collect()
}

/// Dense adjacency as bit rows.
struct Graph {
    adj: Vec<Vec<u64>>,
}

impl Graph {
    fn new(vertices: &[Subset], problem: &SearchProblem) -> Self {
        let v = vertices.len();
        let words = v.div_ceil(64).max(1);
        let mut adj = vec![vec![0u64; words]; v];
        for i in 0..v {
            for j in i + 1..v {
                if problem
                    .mode
                    .admits(&problem.l, vertices[i].intersection_len(vertices[j]))
                {
                    adj[i][j / 64] |= 1 << (j % 64);
                    adj[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        Graph { adj }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b / 64] >> (b % 64) & 1 == 1
    }
}

fn bits(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + b)
        })
    })
}

fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

/// Number of colour classes in a greedy colouring of `cand`: an upper
/// bound on its clique number.
fn colour_bound(graph: &Graph, cand: &[u64]) -> usize {
    let mut uncoloured = cand.to_vec();
    let mut colours = 0;
    while uncoloured.iter().any(|&w| w != 0) {
        colours += 1;
        let mut open = uncoloured.clone();
        loop {
            let Some(v) = bits(&open).next() else { break };
            uncoloured[v / 64] &= !(1 << (v % 64));
            open[v / 64] &= !(1 << (v % 64));
            for (o, a) in open.iter_mut().zip(&graph.adj[v]) {
                *o &= !a;
            }
        }
    }
    colours
}

struct Shared {
    global_best: AtomicUsize,
    /// Smallest task index whose clique reached the theorem cap.
    capped_task: AtomicUsize,
    stop: AtomicBool,
    nodes: AtomicU64,
    deadline: Option<Instant>,
    cap: usize,
}

struct Task<'a> {
    graph: &'a Graph,
    shared: &'a Shared,
    index: usize,
    best: Vec<usize>,
    nodes: u64,
}

impl Task<'_> {
    fn should_stop(&mut self) -> bool {
        if self.shared.stop.load(Ordering::Relaxed) {
            return true;
        }
        if self.shared.capped_task.load(Ordering::Relaxed) < self.index {
            return true;
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(deadline) = self.shared.deadline {
                if Instant::now() >= deadline {
                    self.shared.stop.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    fn record(&mut self, clique: &[usize]) {
        if clique.len() > self.best.len() {
            self.best = clique.to_vec();
            self.shared
                .global_best
                .fetch_max(clique.len(), Ordering::Relaxed);
            if clique.len() >= self.shared.cap {
                self.shared
                    .capped_task
                    .fetch_min(self.index, Ordering::Relaxed);
            }
        }
    }

    /// Prune unless the subtree could strictly beat this task's best or at
    /// least tie the best across tasks.
    fn hopeless(&self, upper: usize) -> bool {
        let upper = upper.min(self.shared.cap);
        upper <= self.best.len() || upper < self.shared.global_best.load(Ordering::Relaxed)
    }

    fn expand(&mut self, clique: &mut Vec<usize>, cand: &[u64]) {
        self.nodes += 1;
        self.record(clique);
        if self.should_stop() || self.best.len() >= self.shared.cap {
            return;
        }
        let mut remaining = cand.to_vec();
        let order: Vec<usize> = bits(cand).collect();
        for v in order {
            if self.hopeless(clique.len() + colour_bound(self.graph, &remaining)) {
                return;
            }
            let next: Vec<u64> = remaining
                .iter()
                .zip(&self.graph.adj[v])
                .map(|(a, b)| a & b)
                .collect();
            clique.push(v);
            self.expand(clique, &next);
            clique.pop();
            if self.should_stop() || self.best.len() >= self.shared.cap {
                return;
            }
            remaining[v / 64] &= !(1 << (v % 64));
        }
    }
}

/// Lexicographically first maximal clique: keep each vertex in order if it
/// is adjacent to all kept so far.
fn greedy_clique(graph: &Graph, v: usize) -> Vec<usize> {
    let mut clique: Vec<usize> = Vec::new();
    for u in 0..v {
        if clique.iter().all(|&c| graph.adjacent(c, u)) {
            clique.push(u);
        }
    }
    clique
}

/// Maximum admissible family for `problem`.
pub fn max_family(problem: &SearchProblem, config: &SearchConfig) -> Result<SearchResult> {
    match config.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::ParamOutOfRange(format!("thread pool: {e}")))?;
            pool.install(|| max_family_in_pool(problem, config))
        }
        None => max_family_in_pool(problem, config),
    }
}

fn max_family_in_pool(problem: &SearchProblem, config: &SearchConfig) -> Result<SearchResult> {
    let start = Instant::now();
    let vertices = admissible_vertices(problem, config)?;
    let members = vertices.members();
    let v = members.len();
    let graph = Graph::new(members, problem);

    let best_bound = applicable_bounds(problem)
        .into_iter()
        .min_by_key(|&(_, rhs)| rhs);
    let (bound_used, bound_source) = match best_bound {
        Some((id, rhs)) if rhs < v as u128 => (rhs, Some(id)),
        _ => (v as u128, None),
    };
    let cap = if config.theorem_prune {
        bound_used.min(v as u128) as usize
    } else {
        v
    };

    let seed = greedy_clique(&graph, v);
    let shared = Shared {
        global_best: AtomicUsize::new(seed.len()),
        capped_task: AtomicUsize::new(if seed.len() >= cap { 0 } else { usize::MAX }),
        stop: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        deadline: config.time_budget.map(|b| start + b),
        cap,
    };
    if config.time_budget == Some(Duration::ZERO) {
        shared.stop.store(true, Ordering::Relaxed);
    }

    // Task i: cliques whose smallest vertex is i.
    let results: Vec<Vec<usize>> = (0..v)
        .into_par_iter()
        .map(|i| {
            let mut task = Task {
                graph: &graph,
                shared: &shared,
                index: i,
                best: Vec::new(),
                nodes: 0,
            };
            if task.should_stop() {
                return Vec::new();
            }
            let mut cand = graph.adj[i].clone();
            for b in 0..=i {
                cand[b / 64] &= !(1 << (b % 64));
            }
            if task.hopeless(1 + count(&cand)) {
                return Vec::new();
            }
            let mut clique = vec![i];
            task.expand(&mut clique, &cand);
            shared.nodes.fetch_add(task.nodes, Ordering::Relaxed);
            task.best
        })
        .collect();

    let timed_out = shared.stop.load(Ordering::Relaxed);
    // The seed is task 0's first leaf, so it only wins when nothing larger
    // turned up.
    let best = std::iter::once(seed)
        .chain(results)
        .fold(
            Vec::new(),
            |acc, c| if c.len() > acc.len() { c } else { acc },
        );
    let witness = SetFamily::new(problem.n, best.iter().map(|&i| members[i]).collect())?;
    Ok(SearchResult {
        max_size: best.len(),
        witness,
        vertices: v,
        nodes_explored: shared.nodes.load(Ordering::Relaxed),
        bound_used,
        bound_source,
        proof_of_optimality: !timed_out,
        timed_out,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharpnessRow {
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub attained: usize,
    pub bound: u128,
    /// The search's witness is the union of the top `r` levels below `s`.
    pub union_witness: bool,
    pub proof_of_optimality: bool,
}

/// For `L = {0..s-1}` and `K = {s-r+1..s}` the union of the levels in `K` is
/// admissible and has size `N(n, s, r)`; the search confirms nothing beats it.
pub fn sharpness_sweep(
    n_max: usize,
    s_max: usize,
    config: &SearchConfig,
) -> Result<Vec<SharpnessRow>> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for s in 1..=s_max.min(n) {
            for r in 1..=s {
                let levels: Vec<usize> = (s - r + 1..=s).collect();
                let k = ResidueSet::new(levels.iter().map(|&x| x as u64))?;
                let l = ResidueSet::initial_segment(s as u64);
                let result = max_family(&SearchProblem::exact(n, k, l), config)?;
                let union = crate::setfam::union_of_levels(n, &levels)?;
                rows.push(SharpnessRow {
                    n,
                    s,
                    r,
                    attained: result.max_size,
                    bound: bounds::abs_bound(n, s, r)?,
                    union_witness: result.witness == union,
                    proof_of_optimality: result.proof_of_optimality,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnattainabilityRow {
    pub p: u64,
    pub n: usize,
    pub s: usize,
    pub r: usize,
    pub k: Vec<u64>,
    pub max_size: usize,
    pub level_bound: u128,
    pub abs_bound: u128,
    pub proof_of_optimality: bool,
}

/// One consecutive-residue instance: `L = {0..s-1}` mod `p`, the given `K`
/// (which must avoid `L`), checked against `binom(n, s) < N(n, s, r)`.
/// A family beating `binom(n, s)` is reported as `CounterExample`.
pub fn unattainability_row(
    p: PrimeModulus,
    n: usize,
    s: usize,
    k: &ResidueSet,
    config: &SearchConfig,
) -> Result<UnattainabilityRow> {
    let l = ResidueSet::initial_segment(s as u64);
    let r = k.len();
    if !k.is_disjoint(&l) {
        return Err(Error::HypothesisViolated(vec![
            bounds::Hypothesis::KLDisjoint,
        ]));
    }
    k.validate(crate::ffpoly::Domain::Modular(p))?;
    let abs_bound = bounds::abs_bound(n, s, r)?;
    let level_bound = binomial(n, s);
    let result = max_family(&SearchProblem::modular(n, p, k.clone(), l), config)?;
    if result.max_size as u128 > level_bound {
        return Err(Error::CounterExample(format!(
            "p={p} n={n} s={s} K={k}: family of size {} exceeds binom(n,s)={level_bound}: {}",
            result.max_size, result.witness
        )));
    }
    Ok(UnattainabilityRow {
        p: p.get(),
        n,
        s,
        r,
        k: k.elements().to_vec(),
        max_size: result.max_size,
        level_bound,
        abs_bound,
        proof_of_optimality: result.proof_of_optimality,
    })
}

/// Every consecutive `L` mod `p` with `2 <= s <= p-1`, every `K ⊆ {s..p-1}`
/// containing `s` with `2 <= |K| <= s`, and every `s <= n <= n_max`.
pub fn unattainability_sweep(
    p: PrimeModulus,
    n_max: usize,
    config: &SearchConfig,
) -> Result<Vec<UnattainabilityRow>> {
    let mut rows = Vec::new();
    let pv = p.get() as usize;
    for s in 2..pv {
        let others: Vec<u64> = (s as u64 + 1..p.get()).collect();
        for mask in 0u32..(1 << others.len()) {
            let mut k = vec![s as u64];
            k.extend(
                others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x),
            );
            if !(2..=s).contains(&k.len()) {
                continue;
            }
            let k = ResidueSet::new(k)?;
            for n in s..=n_max {
                rows.push(unattainability_row(p, n, s, &k, config)?);
            }
        }
    }
    Ok(rows)
}
