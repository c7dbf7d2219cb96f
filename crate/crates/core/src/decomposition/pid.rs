//! Bottom-up decision procedure over feasible connected sets.
//!
//! A connected set `C` (not containing the root) is feasible for width `k`
//! when `|N(C)| <= k` and `C` has a vertex `v` such that every component of
//! `C - v` is feasible: eliminating those components and then `v` never
//! exceeds width `k`. Feasible sets are grown from smaller ones by gluing
//! pairwise non-adjacent feasible sets around a common neighbour `v`. The
//! graph has width at most `k` iff the root glues all of `V - root`.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::bitset::Bits;

pub(super) enum Decision {
    Feasible(Vec<usize>),
    Infeasible,
    Stopped,
    /// The stored-set cap was reached.
    Exhausted,
}

struct Feasible<const W: usize> {
    set: Bits<W>,
    v: usize,
    /// Gluing record: index into `Pid::glued`, or `u32::MAX` for none.
    glue: u32,
}

struct Glued<const W: usize> {
    prev: u32,
    part: u32,
    _set: Bits<W>,
}

pub(super) struct Pid<'a, const W: usize> {
    adj: &'a [Bits<W>],
    cap: usize,
}

impl<'a, const W: usize> Pid<'a, W> {
    pub fn new(adj: &'a [Bits<W>], cap: usize) -> Self {
        Pid { adj, cap }
    }

    fn neighbourhood(&self, s: &Bits<W>) -> Bits<W> {
        let mut r = Bits::empty();
        for v in s.iter() {
            r = r.or(&self.adj[v]);
        }
        r.minus(s)
    }

    /// Decides width `k` for the connected graph `adj`. `stop` is polled
    /// regularly and ends the run early when it returns true.
    pub fn decide(&self, k: usize, mut stop: impl FnMut() -> bool) -> Decision {
        let n = self.adj.len();
        if n <= k + 1 {
            return Decision::Feasible((0..n).collect());
        }
        let Some(root) = (0..n)
            .filter(|&v| self.adj[v].len() <= k)
            .max_by_key(|&v| (self.adj[v].len(), std::cmp::Reverse(v)))
        else {
            return Decision::Infeasible;
        };
        let all = Bits::<W>::from_iter(0..n);

        let mut feasible: Vec<Feasible<W>> = Vec::new();
        let mut index: FxHashMap<Bits<W>, u32> = FxHashMap::default();
        let mut glued: Vec<Glued<W>> = Vec::new();
        // per vertex: glued unions (as sets) and their record ids
        let mut around: Vec<Vec<(Bits<W>, u32)>> = vec![vec![(Bits::empty(), u32::MAX)]; n];
        let mut seen_glue: Vec<FxHashSet<Bits<W>>> = vec![FxHashSet::default(); n];

        for x in 0..n {
            if x != root && self.adj[x].len() <= k {
                let set = Bits::from_iter([x]);
                index.insert(set, feasible.len() as u32);
                feasible.push(Feasible {
                    set,
                    v: x,
                    glue: u32::MAX,
                });
            }
        }
        // Larger sets first: positive instances reach the full set sooner,
        // and the order does not affect which unions are eventually built.
        let mut queue: BinaryHeap<(usize, Reverse<u32>)> =
            (0..feasible.len()).map(|i| (1, Reverse(i as u32))).collect();
        let mut polls = 0u32;
        while let Some((_, Reverse(d_id))) = queue.pop() {
            let d = feasible[d_id as usize].set;
            let nd = self.neighbourhood(&d);
            let closed = d.or(&nd);
            for v in nd.iter() {
                let mut fresh = Vec::new();
                for &(a, a_id) in &around[v] {
                    polls += 1;
                    if polls & 1023 == 0 && stop() {
                        return Decision::Stopped;
                    }
                    if !a.and(&closed).is_empty() {
                        continue;
                    }
                    let union = a.or(&d);
                    let mut outside = self.neighbourhood(&union);
                    outside.remove(v);
                    if outside.len() > k {
                        continue;
                    }
                    fresh.push((union, a_id));
                }
                for (union, a_id) in fresh {
                    if !seen_glue[v].insert(union) {
                        continue;
                    }
                    if glued.len() + feasible.len() >= self.cap {
                        return Decision::Exhausted;
                    }
                    let g_id = glued.len() as u32;
                    glued.push(Glued {
                        prev: a_id,
                        part: d_id,
                        _set: union,
                    });
                    around[v].push((union, g_id));
                    let mut c = union;
                    c.insert(v);
                    if self.neighbourhood(&c).len() > k {
                        continue;
                    }
                    if v == root {
                        if c == all {
                            let mut order = Vec::with_capacity(n);
                            self.emit_glue(g_id, &feasible, &glued, &mut order);
                            order.push(root);
                            return Decision::Feasible(order);
                        }
                        continue;
                    }
                    if let Entry::Vacant(e) = index.entry(c) {
                        e.insert(feasible.len() as u32);
                        queue.push((c.len(), Reverse(feasible.len() as u32)));
                        feasible.push(Feasible { set: c, v, glue: g_id });
                    }
                }
            }
        }
        Decision::Infeasible
    }

    fn emit_glue(&self, mut g: u32, feasible: &[Feasible<W>], glued: &[Glued<W>], order: &mut Vec<usize>) {
        while g != u32::MAX {
            self.emit(glued[g as usize].part, feasible, glued, order);
            g = glued[g as usize].prev;
        }
    }

    fn emit(&self, f: u32, feasible: &[Feasible<W>], glued: &[Glued<W>], order: &mut Vec<usize>) {
        let rec = &feasible[f as usize];
        self.emit_glue(rec.glue, feasible, glued, order);
        order.push(rec.v);
    }
}
