use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;

use super::eo::{eo_to_td, ordering_width, EliminationOrdering};
use super::heuristic::{heuristic_order, lower_bound, Heuristic, LowerBound};
use super::pid::{Decision, Pid};
use super::td::TreeDecomposition;
use super::work::Work;
use crate::bitset::Bits;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::derive_seed;

/// Set-once cancellation flag shared between a solver and its owner.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Release);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Acquire)
    }
}

#[derive(Clone, Debug)]
pub struct ExactOptions {
    pub timeout: Option<Duration>,
    pub cancel: Option<CancelToken>,
    /// Maximum number of memoized search states.
    pub memo_cap: usize,
    /// Seed for the heuristic upper-bound runs.
    pub seed: u64,
    pub algorithm: ExactAlgorithm,
}

/// Search engine used on each irreducible core.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactAlgorithm {
    /// Bottom-up dynamic program over feasible connected sets, for
    /// increasing target widths.
    #[default]
    FeasibleSets,
    /// Depth-first branch and bound over elimination prefixes, for
    /// decreasing target widths.
    BranchAndBound,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            timeout: None,
            cancel: None,
            memo_cap: 1 << 22,
            seed: 0,
            algorithm: ExactAlgorithm::default(),
        }
    }
}

impl ExactOptions {
    pub fn with_timeout(timeout: Duration) -> Self {
        ExactOptions {
            timeout: Some(timeout),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct TreewidthSolution {
    pub width: usize,
    /// Proven lower bound; equals `width` when the run completed.
    pub lower_bound: usize,
    pub ordering: EliminationOrdering,
    pub decomposition: TreeDecomposition,
    /// The memo hit its cap and the rest of the search ran with a bounded
    /// (or no) table.
    pub memo_degraded: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub enum ExactOutcome {
    Optimal(TreewidthSolution),
    /// Search stopped early; the solution carries the best upper bound.
    Timeout(TreewidthSolution),
}

impl ExactOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, ExactOutcome::Optimal(_))
    }

    pub fn solution(&self) -> &TreewidthSolution {
        match self {
            ExactOutcome::Optimal(s) | ExactOutcome::Timeout(s) => s,
        }
    }

    pub fn into_solution(self) -> TreewidthSolution {
        match self {
            ExactOutcome::Optimal(s) | ExactOutcome::Timeout(s) => s,
        }
    }
}

struct Clock<'a> {
    deadline: Option<Instant>,
    cancel: Option<&'a CancelToken>,
}

impl Clock<'_> {
    fn expired(&self) -> bool {
        self.cancel.is_some_and(CancelToken::is_cancelled) || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Exact treewidth.
///
/// Simplicial and almost-simplicial vertices are removed up front; each
/// remaining component is then decided for target widths between the lower
/// bound and the best greedy ordering, using the engine chosen in `opts`.
/// When stopped early the result carries the best ordering found and the
/// largest width proven infeasible plus one.
pub fn treewidth_exact(g: &Graph, opts: &ExactOptions) -> Result<ExactOutcome> {
    let start = Instant::now();
    if g.n() == 0 {
        return Err(Error::Parameter("treewidth of the empty graph".into()));
    }
    let clock = Clock {
        deadline: opts.timeout.map(|t| start + t),
        cancel: opts.cancel.as_ref(),
    };

    let (global, global_w) = best_heuristic(g, opts.seed, &clock);
    let (mut order, mut low, work) = preprocess(g);
    let mut alive: Vec<usize> = (0..g.n()).filter(|&v| work.alive[v]).collect();
    let mut cores = Vec::new();
    while let Some(&s) = alive.first() {
        let mut comp = vec![s];
        let mut seen = vec![false; g.n()];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            for &u in &work.adj[comp[i]] {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        alive.retain(|v| !seen[*v]);
        cores.push(comp);
    }
    cores.sort_by_key(|c| std::cmp::Reverse(c.len()));

    let mut timed_out = false;
    let mut degraded = false;
    let mut nodes = 0;
    for (ci, core) in cores.iter().enumerate() {
        let local = work.induced(core);
        let result = solve_core(
            &local,
            low,
            global_w,
            derive_seed(opts.seed, ci as u64),
            opts,
            &clock,
            timed_out,
        );
        timed_out |= !result.finished;
        degraded |= result.degraded;
        nodes += result.nodes;
        low = low.max(result.lower);
        order.extend(result.order.into_iter().map(|v| core[v]));
    }

    let mut ordering = EliminationOrdering::new(order)?;
    let mut width = ordering_width(g, &ordering)?;
    if global_w < width {
        ordering = global;
        width = global_w;
    }
    let lower = low.min(width);
    let timed_out = timed_out || lower < width;
    let decomposition = eo_to_td(g, &ordering)?;
    let solution = TreewidthSolution {
        width,
        lower_bound: lower,
        ordering,
        decomposition,
        memo_degraded: degraded,
        nodes,
        elapsed: start.elapsed(),
    };
    Ok(if timed_out {
        ExactOutcome::Timeout(solution)
    } else {
        ExactOutcome::Optimal(solution)
    })
}

/// Removes simplicial vertices (raising the lower bound to their degree)
/// and almost-simplicial vertices of degree at most the current bound.
fn preprocess(g: &Graph) -> (Vec<usize>, usize, Work) {
    let n = g.n();
    let mut w = Work::new(g);
    let mut low = lower_bound(g, LowerBound::MinorMinWidth);
    let mut order = Vec::new();
    let mut queue: VecDeque<usize> = (0..n).collect();
    let mut queued = vec![true; n];
    let mut rejected: Vec<usize> = Vec::new();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if !w.alive[v] {
            continue;
        }
        let d = w.adj[v].len();
        let take = if w.is_simplicial(v) {
            if d > low {
                low = d;
                for u in rejected.drain(..) {
                    if !queued[u] {
                        queued[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            true
        } else {
            d <= low && w.is_almost_simplicial(v)
        };
        if take {
            let ns: Vec<usize> = w.adj[v].iter().copied().collect();
            w.eliminate(v);
            order.push(v);
            for u in ns {
                if !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        } else {
            rejected.push(v);
        }
    }
    (order, low, w)
}

struct CoreResult {
    order: Vec<usize>,
    width: usize,
    lower: usize,
    finished: bool,
    degraded: bool,
    nodes: u64,
}

/// Min-degree, then seeded min-fill runs while the clock allows.
fn best_heuristic(g: &Graph, seed: u64, clock: &Clock<'_>) -> (EliminationOrdering, usize) {
    let mut best = heuristic_order(g, Heuristic::MinDegree, seed);
    let mut best_w = ordering_width(g, &best).expect("heuristic order is valid");
    for i in 0..16 {
        if clock.expired() {
            break;
        }
        let eo = heuristic_order(g, Heuristic::MinFill, derive_seed(seed, i));
        let w = ordering_width(g, &eo).expect("heuristic order is valid");
        if w < best_w {
            best = eo;
            best_w = w;
        }
    }
    (best, best_w)
}

/// Solves one connected core. Widths at or above `limit` are never
/// decided: the caller already holds an ordering of that width.
fn solve_core(
    g: &Graph,
    floor: usize,
    limit: usize,
    seed: u64,
    opts: &ExactOptions,
    clock: &Clock<'_>,
    skip_search: bool,
) -> CoreResult {
    let n = g.n();
    let (best, best_w) = best_heuristic(g, seed, clock);
    let lower = lower_bound(g, LowerBound::MinorMinWidth);
    let floor = floor.max(lower);
    let mut result = CoreResult {
        order: best.into_vec(),
        width: best_w,
        lower,
        finished: true,
        degraded: false,
        nodes: 0,
    };
    if best_w <= floor || limit <= floor {
        result.lower = result.lower.max(floor.min(best_w));
        return result;
    }
    if skip_search || clock.expired() {
        result.finished = false;
        return result;
    }
    macro_rules! run {
        ($w:literal) => {
            match opts.algorithm {
                ExactAlgorithm::FeasibleSets => ascend::<$w>(g, &mut result, floor, limit, opts, clock),
                ExactAlgorithm::BranchAndBound => {
                    Search::<$w>::new(g, opts.memo_cap, clock).descend(&mut result, floor)
                }
            }
        };
    }
    match n {
        0..=64 => run!(1),
        65..=128 => run!(2),
        129..=256 => run!(4),
        257..=512 => run!(8),
        513..=1024 => run!(16),
        _ => result.finished = false,
    }
    result
}

fn adjacency<const W: usize>(g: &Graph) -> Vec<Bits<W>> {
    (0..g.n())
        .map(|v| Bits::from_iter(g.neighbors(v).iter().copied()))
        .collect()
}

/// Decides widths `floor, floor + 1, ...` below `min(result.width, limit)`
/// until one is feasible. Falls back to branch and bound if the table of
/// feasible sets outgrows the memo cap.
fn ascend<const W: usize>(
    g: &Graph,
    result: &mut CoreResult,
    floor: usize,
    limit: usize,
    opts: &ExactOptions,
    clock: &Clock<'_>,
) {
    let adj = adjacency::<W>(g);
    let pid = Pid::new(&adj, opts.memo_cap);
    let mut k = floor;
    result.lower = result.lower.max(floor);
    while k < result.width.min(limit) {
        match pid.decide(k, || clock.expired()) {
            Decision::Feasible(order) => {
                let eo = EliminationOrdering::new(order).expect("search emits permutations");
                let w = ordering_width(g, &eo).expect("valid ordering");
                debug_assert!(w <= k);
                result.width = w;
                result.order = eo.into_vec();
                return;
            }
            Decision::Infeasible => {
                k += 1;
                result.lower = k;
            }
            Decision::Stopped => {
                result.finished = false;
                return;
            }
            Decision::Exhausted => {
                result.degraded = true;
                Search::<W>::new(g, opts.memo_cap, clock).descend(result, k);
                result.degraded = true;
                return;
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Memo {
    /// Treewidth of the state's fill graph is at least this.
    lb: u16,
    /// ... and at most this.
    ub: u16,
    /// Branching vertex of the last successful search, plus one.
    choice: u16,
}

struct Search<'a, const W: usize> {
    adj: Vec<Bits<W>>,
    all: Bits<W>,
    memo: FxHashMap<Bits<W>, Memo>,
    cap: usize,
    degraded: bool,
    clock: &'a Clock<'a>,
    nodes: u64,
    stopped: bool,
}

impl<'a, const W: usize> Search<'a, W> {
    fn new(g: &Graph, cap: usize, clock: &'a Clock<'a>) -> Self {
        let adj = adjacency(g);
        Search {
            adj,
            all: Bits::from_iter(0..g.n()),
            memo: FxHashMap::default(),
            cap,
            degraded: false,
            clock,
            nodes: 0,
            stopped: false,
        }
    }

    /// Tightens `result` by deciding widths `result.width - 1, ...` down to
    /// `floor`.
    fn descend(mut self, result: &mut CoreResult, floor: usize) {
        let adj = self.adj.clone();
        while result.width > floor {
            let k = result.width - 1;
            let mut order = Vec::new();
            match self.feasible(self.all, &adj, k, &mut order) {
                None => {
                    result.finished = false;
                    break;
                }
                Some(false) => {
                    result.lower = result.lower.max(k + 1);
                    break;
                }
                Some(true) => {
                    debug_assert_eq!(order.len(), adj.len());
                    let g = to_graph(&adj);
                    let eo = EliminationOrdering::new(order).expect("search emits permutations");
                    let w = ordering_width(&g, &eo).expect("valid ordering");
                    debug_assert!(w <= k);
                    result.width = w;
                    result.order = eo.into_vec();
                }
            }
        }
        if result.finished && result.width <= floor {
            result.lower = result.lower.max(result.width);
        }
        result.degraded = self.degraded;
        result.nodes = self.nodes;
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if !self.stopped && self.nodes % 64 == 0 && self.clock.expired() {
            self.stopped = true;
        }
        self.stopped
    }

    fn record(&mut self, set: Bits<W>, f: impl FnOnce(&mut Memo)) {
        if let Some(m) = self.memo.get_mut(&set) {
            f(m);
        } else if self.memo.len() < self.cap {
            let mut m = Memo {
                lb: 0,
                ub: u16::MAX,
                choice: 0,
            };
            f(&mut m);
            self.memo.insert(set, m);
        } else {
            self.degraded = true;
        }
    }

    fn infeasible(&mut self, sets: &[Bits<W>], lb: usize) -> Option<bool> {
        for &s in sets {
            self.record(s, |m| m.lb = m.lb.max(lb as u16));
        }
        Some(false)
    }

    /// Can the fill graph on `r` (a connected state) be eliminated with
    /// width at most `k`? Appends the witness order on success.
    fn feasible(&mut self, r: Bits<W>, adj: &[Bits<W>], k: usize, order: &mut Vec<usize>) -> Option<bool> {
        if self.tick() {
            return None;
        }
        if r.len() <= k + 1 {
            order.extend(r.iter());
            return Some(true);
        }
        if self.memo.get(&r).is_some_and(|m| m.lb as usize > k) {
            return Some(false);
        }
        let mark = order.len();
        let mut adj = adj.to_vec();
        let mut core = r;
        if !reduce(&mut core, &mut adj, k, order) {
            order.truncate(mark);
            return self.infeasible(&[r], k + 1);
        }
        if core.len() <= k + 1 {
            order.extend(core.iter());
            return Some(true);
        }
        let comps = components(core, &adj);
        if comps.len() > 1 {
            for c in comps {
                match self.feasible(c, &adj, k, order)? {
                    true => {}
                    false => {
                        order.truncate(mark);
                        return self.infeasible(&[r], k + 1);
                    }
                }
            }
            return Some(true);
        }
        if core != r && self.memo.get(&core).is_some_and(|m| m.lb as usize > k) {
            order.truncate(mark);
            return self.infeasible(&[r], k + 1);
        }
        let lb = minor_min_width(core, &adj, k);
        if lb > k {
            order.truncate(mark);
            return self.infeasible(&[r, core], lb);
        }

        let choice = self.memo.get(&core).map_or(0, |m| m.choice as usize);
        let mut cands: Vec<(usize, usize, usize)> = core
            .iter()
            .filter_map(|v| {
                let d = adj[v].len();
                (d <= k).then(|| (usize::from(v + 1 != choice), fill_count(v, &adj), v))
            })
            .collect();
        cands.sort_unstable();
        for &(_, _, v) in &cands {
            let branch = order.len();
            let mut next = adj.clone();
            let mut rest = core;
            eliminate(v, &mut rest, &mut next);
            order.push(v);
            let mut comps = components(rest, &next);
            comps.sort_by_key(Bits::len);
            let mut ok = true;
            for c in comps {
                if !self.feasible(c, &next, k, order)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                for s in [r, core] {
                    self.record(s, |m| {
                        m.ub = m.ub.min(k as u16);
                        m.choice = (v + 1) as u16;
                    });
                }
                return Some(true);
            }
            order.truncate(branch);
        }
        order.truncate(mark);
        self.infeasible(&[r, core], k + 1)
    }
}

fn to_graph<const W: usize>(adj: &[Bits<W>]) -> Graph {
    let mut g = Graph::new(adj.len());
    for (v, ns) in adj.iter().enumerate() {
        for u in ns.iter().filter(|&u| u > v) {
            g.add_edge(v, u).expect("valid adjacency");
        }
    }
    g
}

fn eliminate<const W: usize>(v: usize, r: &mut Bits<W>, adj: &mut [Bits<W>]) {
    let ns = adj[v];
    for u in ns.iter() {
        let mut nu = adj[u].or(&ns);
        nu.remove(u);
        nu.remove(v);
        adj[u] = nu;
    }
    adj[v] = Bits::empty();
    r.remove(v);
}

fn is_clique<const W: usize>(set: &Bits<W>, adj: &[Bits<W>]) -> bool {
    set.iter().all(|u| {
        let mut rest = *set;
        rest.remove(u);
        rest.is_subset(&adj[u])
    })
}

fn fill_count<const W: usize>(v: usize, adj: &[Bits<W>]) -> usize {
    let ns = adj[v];
    let d = ns.len();
    let present: usize = ns.iter().map(|u| adj[u].and_len(&ns)).sum::<usize>() / 2;
    d * (d.saturating_sub(1)) / 2 - present
}

/// Eliminates simplicial and almost-simplicial vertices of degree at most
/// `k`. Returns false when a simplicial vertex proves width above `k`.
fn reduce<const W: usize>(r: &mut Bits<W>, adj: &mut [Bits<W>], k: usize, order: &mut Vec<usize>) -> bool {
    loop {
        let mut pick = None;
        for v in r.iter() {
            let ns = adj[v];
            let d = ns.len();
            let bad: Vec<usize> = ns
                .iter()
                .filter(|&u| {
                    let mut rest = ns;
                    rest.remove(u);
                    !rest.is_subset(&adj[u])
                })
                .collect();
            if bad.is_empty() {
                if d > k {
                    return false;
                }
                pick = Some(v);
                break;
            }
            if d <= k
                && bad.iter().any(|&x| {
                    let mut rest = ns;
                    rest.remove(x);
                    is_clique(&rest, adj)
                })
            {
                pick = Some(v);
                break;
            }
        }
        match pick {
            Some(v) => {
                eliminate(v, r, adj);
                order.push(v);
            }
            None => return true,
        }
    }
}

fn components<const W: usize>(r: Bits<W>, adj: &[Bits<W>]) -> Vec<Bits<W>> {
    let mut out = Vec::new();
    let mut left = r;
    while let Some(s) = left.first() {
        let mut comp = Bits::empty();
        comp.insert(s);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut next = Bits::empty();
            for v in frontier.iter() {
                next = next.or(&adj[v]);
            }
            frontier = next.and(&left).minus(&comp);
            comp = comp.or(&frontier);
        }
        left = left.minus(&comp);
        out.push(comp);
    }
    out
}

/// Minor-min-width on the fill graph of `r`, stopping once it exceeds `k`.
fn minor_min_width<const W: usize>(r: Bits<W>, adj: &[Bits<W>], k: usize) -> usize {
    let mut adj = adj.to_vec();
    let mut alive = r;
    let mut lb = 0;
    while alive.len() > lb + 1 {
        let mut best = (usize::MAX, 0);
        for v in alive.iter() {
            let d = adj[v].len();
            if d < best.0 {
                best = (d, v);
            }
        }
        let (d, v) = best;
        lb = lb.max(d);
        if lb > k {
            return lb;
        }
        let ns = adj[v];
        let Some(u) = ns.iter().min_by_key(|&u| adj[u].len()) else {
            alive.remove(v);
            continue;
        };
        for w in ns.iter() {
            adj[w].remove(v);
            if w != u {
                adj[w].insert(u);
            }
        }
        let mut nu = adj[u].or(&ns);
        nu.remove(u);
        adj[u] = nu;
        adj[v] = Bits::empty();
        alive.remove(v);
    }
    lb
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::validate_td;

    fn tw(g: &Graph) -> usize {
        let out = treewidth_exact(g, &ExactOptions::default()).unwrap();
        assert!(out.is_optimal());
        let s = out.solution();
        assert!(validate_td(g, &s.decomposition).is_valid());
        assert_eq!(ordering_width(g, &s.ordering).unwrap(), s.width);
        s.width
    }

    #[test]
    fn small_families() {
        assert_eq!(tw(&Graph::path(7)), 1);
        assert_eq!(tw(&Graph::cycle(8)), 2);
        assert_eq!(tw(&Graph::complete(6)), 5);
        assert_eq!(tw(&Graph::grid(3, 3)), 3);
        assert_eq!(tw(&Graph::grid(5, 5)), 5);
        assert_eq!(tw(&Graph::new(1)), 0);
        assert_eq!(tw(&Graph::new(3)), 0);
    }

    #[test]
    fn disconnected_takes_max() {
        let mut g = Graph::new(9);
        for (u, v) in Graph::complete(4).edges() {
            g.add_edge(u, v).unwrap();
        }
        for (u, v) in Graph::cycle(5).edges() {
            g.add_edge(u + 4, v + 4).unwrap();
        }
        assert_eq!(tw(&g), 3);
    }

    #[test]
    fn empty_graph_is_an_error() {
        assert!(treewidth_exact(&Graph::new(0), &ExactOptions::default()).is_err());
    }

    #[test]
    fn cancelled_run_reports_bound() {
        let g = Graph::grid(7, 7);
        let cancel = CancelToken::new();
        cancel.cancel();
        let opts = ExactOptions {
            cancel: Some(cancel),
            ..Default::default()
        };
        let out = treewidth_exact(&g, &opts).unwrap();
        assert!(!out.is_optimal());
        let s = out.solution();
        assert!(s.width >= 7);
        assert!(validate_td(&g, &s.decomposition).is_valid());
    }

    #[test]
    fn engines_agree() {
        use rand::Rng;
        let mut rng = crate::rng::seeded(11);
        for n in 5..14 {
            for _ in 0..6 {
                let mut g = Graph::new(n);
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen_bool(0.35) {
                            g.add_edge(u, v).unwrap();
                        }
                    }
                }
                let a = tw(&g);
                let opts = ExactOptions {
                    algorithm: ExactAlgorithm::BranchAndBound,
                    ..Default::default()
                };
                let b = treewidth_exact(&g, &opts).unwrap();
                assert!(b.is_optimal());
                assert_eq!(a, b.solution().width);
            }
        }
    }

    #[test]
    fn tiny_memo_still_exact() {
        let opts = ExactOptions {
            memo_cap: 4,
            ..Default::default()
        };
        let out = treewidth_exact(&Graph::grid(4, 4), &opts).unwrap();
        assert_eq!(out.solution().width, 4);
    }
}
