//! Box partitions, ε-fattened transition graphs and their strongly
//! connected components.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::map_model::{MapFamily, Slice};
use crate::{Error, Result};

/// Largest partition `refine` will build.
pub const MAX_BOXES: usize = 1 << 24;
pub const NO_COMPONENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxPartition {
    pub a: f64,
    pub b: f64,
    pub n_boxes: usize,
}

impl BoxPartition {
    pub fn new(a: f64, b: f64, n_boxes: usize) -> Result<Self> {
        if !n_boxes.is_power_of_two() {
            return Err(Error::InvalidArgument("n_boxes must be a power of two".into()));
        }
        if n_boxes > MAX_BOXES {
            return Err(Error::InvalidArgument(format!("n_boxes exceeds {MAX_BOXES}")));
        }
        if !(a < b) {
            return Err(Error::InvalidArgument("partition needs a < b".into()));
        }
        Ok(BoxPartition { a, b, n_boxes })
    }

    pub fn for_family(family: &MapFamily, n_boxes: usize) -> Result<Self> {
        Self::new(family.domain.0, family.domain.1, n_boxes)
    }

    #[inline]
    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n_boxes as f64
    }

    /// Index of the half-open box `[lo, hi)` containing `x`; the last box is
    /// closed. Points outside the domain clamp to the end boxes.
    #[inline]
    pub fn box_of(&self, x: f64) -> usize {
        let t = (x - self.a) / self.h();
        if !(t > 0.0) {
            0
        } else if t >= self.n_boxes as f64 {
            self.n_boxes - 1
        } else {
            t as usize
        }
    }

    #[inline]
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        let h = self.h();
        let lo = self.a + h * i as f64;
        let hi = if i + 1 == self.n_boxes { self.b } else { self.a + h * (i + 1) as f64 };
        (lo, hi)
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds(i);
        0.5 * (lo + hi)
    }

    /// Boxes meeting the closed interval `[lo, hi]`.
    pub fn range_meeting(&self, lo: f64, hi: f64) -> (usize, usize) {
        let h = self.h();
        let n = self.n_boxes as f64;
        let first = libm::ceil((lo - self.a) / h) - 1.0;
        let last = libm::floor((hi - self.a) / h);
        let first = first.clamp(0.0, n - 1.0) as usize;
        let last = last.clamp(0.0, n - 1.0) as usize;
        (first, last.max(first))
    }
}

/// Directed graph on boxes. Box `i` has the contiguous successor range
/// `succ[i]`: the boxes meeting the ε-fattened image of box `i`.
#[derive(Debug, Clone)]
pub struct TransitionGraph {
    pub partition: BoxPartition,
    pub eps: f64,
    pub succ: Vec<(u32, u32)>,
    /// Restriction mask; `None` means every box is a node.
    pub active: Option<Vec<bool>>,
}

impl TransitionGraph {
    pub fn n_boxes(&self) -> usize {
        self.partition.n_boxes
    }

    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        self.active.as_ref().is_none_or(|m| m[i])
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (lo, hi) = self.succ[i];
        (lo as usize..=hi as usize).filter(move |&j| self.is_active(j))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (lo, hi) = self.succ[i];
        self.is_active(i) && self.is_active(j) && lo as usize <= j && j <= hi as usize
    }

    pub fn has_self_loop(&self, i: usize) -> bool {
        self.has_edge(i, i)
    }
}

/// Successor range of box `i`.
pub fn box_successors(s: &Slice, p: &BoxPartition, eps: f64, i: usize) -> (u32, u32) {
    let (lo, hi) = p.bounds(i);
    let (m, big) = s.image(lo, hi);
    let (j0, j1) = p.range_meeting(m - eps, big + eps);
    (j0 as u32, j1 as u32)
}

pub fn build_graph(family: &MapFamily, lambda: f64, partition: BoxPartition, eps: f64) -> Result<TransitionGraph> {
    let s = family.slice(lambda)?;
    build_graph_slice(&s, partition, eps, None)
}

pub fn build_graph_slice(
    s: &Slice,
    partition: BoxPartition,
    eps: f64,
    active: Option<Vec<bool>>,
) -> Result<TransitionGraph> {
    if !(eps >= partition.h() * (1.0 - 1e-12)) {
        return Err(Error::InvalidArgument("eps_num must be at least the box width".into()));
    }
    let n = partition.n_boxes;
    let succ = match &active {
        None => (0..n).map(|i| box_successors(s, &partition, eps, i)).collect(),
        Some(mask) => (0..n)
            .map(|i| if mask[i] { box_successors(s, &partition, eps, i) } else { (i as u32, i as u32) })
            .collect(),
    };
    Ok(TransitionGraph { partition, eps, succ, active })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSetApprox {
    pub partition: BoxPartition,
    pub eps: f64,
    pub recurrent: Vec<bool>,
    /// Component id per box; [`NO_COMPONENT`] for non-recurrent boxes.
    /// Components are numbered by their smallest box.
    pub component: Vec<u32>,
    pub n_components: usize,
}

impl ChainSetApprox {
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.partition.h()
    }

    pub fn count(&self) -> usize {
        self.recurrent.iter().filter(|&&r| r).count()
    }

    pub fn is_recurrent(&self, i: usize) -> bool {
        self.recurrent[i]
    }

    pub fn contains_point(&self, x: f64) -> bool {
        self.recurrent[self.partition.box_of(x)]
    }

    pub fn recurrent_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.recurrent.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i)
    }

    /// Maximal runs `(start, len)` of consecutive recurrent boxes.
    pub fn runs(&self) -> Vec<(u32, u32)> {
        runs_of(&self.recurrent)
    }

    /// Every recurrent box has a recurrent successor.
    pub fn forward_invariant(&self, graph: &TransitionGraph) -> bool {
        self.recurrent_indices().all(|i| {
            let (lo, hi) = graph.succ[i];
            (lo..=hi).any(|j| self.recurrent[j as usize])
        })
    }

    /// Each recurrent box lies within one box of a recurrent box of `coarse`
    /// (after mapping to the finer partition).
    pub fn within_fattened(&self, coarse: &ChainSetApprox) -> bool {
        let ratio = self.partition.n_boxes / coarse.partition.n_boxes;
        if ratio == 0 || ratio * coarse.partition.n_boxes != self.partition.n_boxes {
            return false;
        }
        let n = coarse.partition.n_boxes;
        self.recurrent_indices().all(|i| {
            let p = i / ratio;
            (p.saturating_sub(1)..=(p + 1).min(n - 1)).any(|q| coarse.recurrent[q])
        })
    }
}

pub fn runs_of(bits: &[bool]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < bits.len() {
        if bits[i] {
            let start = i;
            while i < bits.len() && bits[i] {
                i += 1;
            }
            out.push((start as u32, (i - start) as u32));
        } else {
            i += 1;
        }
    }
    out
}

/// Tarjan's algorithm with an explicit call stack. A box is recurrent when
/// its SCC has two or more boxes or it carries a self-loop.
pub fn chain_recurrent_set(graph: &TransitionGraph) -> ChainSetApprox {
    let n = graph.n_boxes();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut scc = vec![UNSEEN; n];
    let mut scc_size: Vec<u32> = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, u32)> = Vec::new();
    let mut counter = 0u32;

    for root in 0..n {
        if index[root] != UNSEEN || !graph.is_active(root) {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        call.push((root as u32, graph.succ[root].0));
        while let Some(top) = call.last_mut() {
            let v = top.0 as usize;
            let hi = graph.succ[v].1;
            if top.1 <= hi {
                let w = top.1 as usize;
                top.1 += 1;
                if !graph.is_active(w) {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, graph.succ[w].0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let u = parent.0 as usize;
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = scc_size.len() as u32;
                    let mut size = 0;
                    loop {
                        let w = stack.pop().unwrap() as usize;
                        on_stack[w] = false;
                        scc[w] = id;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    scc_size.push(size);
                }
            }
        }
    }

    let mut recurrent = vec![false; n];
    for i in 0..n {
        if scc[i] != UNSEEN && (scc_size[scc[i] as usize] >= 2 || graph.has_self_loop(i)) {
            recurrent[i] = true;
        }
    }
    let mut renumber = vec![NO_COMPONENT; scc_size.len()];
    let mut component = vec![NO_COMPONENT; n];
    let mut n_components = 0usize;
    for i in 0..n {
        if recurrent[i] {
            let s = scc[i] as usize;
            if renumber[s] == NO_COMPONENT {
                renumber[s] = n_components as u32;
                n_components += 1;
            }
            component[i] = renumber[s];
        }
    }
    ChainSetApprox {
        partition: graph.partition,
        eps: graph.eps,
        recurrent,
        component,
        n_components,
    }
}

/// Whether a path of length ≥ 1 leads from `from` to `to`.
pub fn epsilon_chain_exists(graph: &TransitionGraph, from: usize, to: usize) -> bool {
    let n = graph.n_boxes();
    if from >= n || to >= n || !graph.is_active(from) || !graph.is_active(to) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for j in graph.successors(from) {
        if j == to {
            return true;
        }
        if !seen[j] {
            seen[j] = true;
            queue.push_back(j);
        }
    }
    while let Some(v) = queue.pop_front() {
        for j in graph.successors(v) {
            if j == to {
                return true;
            }
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    false
}

/// Covering at the full partition.
pub fn chain_set(family: &MapFamily, lambda: f64, n_boxes: usize, eps: f64) -> Result<ChainSetApprox> {
    let p = BoxPartition::for_family(family, n_boxes)?;
    Ok(chain_recurrent_set(&build_graph(family, lambda, p, eps)?))
}

/// Doubles the partition, halves ε (not below the new box width) and
/// rebuilds the graph on the children of recurrent boxes plus a one-box
/// margin.
pub fn refine(family: &MapFamily, lambda: f64, approx: &ChainSetApprox) -> Result<ChainSetApprox> {
    let s = family.slice(lambda)?;
    refine_slice(&s, approx)
}

pub fn refine_slice(s: &Slice, approx: &ChainSetApprox) -> Result<ChainSetApprox> {
    let n2 = approx.partition.n_boxes * 2;
    if n2 > MAX_BOXES {
        return Err(Error::MemoryCap(Box::new(approx.clone())));
    }
    let part = BoxPartition::new(approx.partition.a, approx.partition.b, n2)?;
    let eps = (approx.eps * 0.5).max(part.h());
    let mut active = vec![false; n2];
    for i in approx.recurrent_indices() {
        let lo = (2 * i).saturating_sub(1);
        let hi = (2 * i + 2).min(n2 - 1);
        for a in active.iter_mut().take(hi + 1).skip(lo) {
            *a = true;
        }
    }
    let g = build_graph_slice(s, part, eps, Some(active))?;
    Ok(chain_recurrent_set(&g))
}
