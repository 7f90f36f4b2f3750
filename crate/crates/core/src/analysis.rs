//! Functional state-space analyses: unrolling into a state graph, k-deep
//! trace enumeration and counting, and bounded trace-set equivalence.
//!
//! Everything here ignores timing. States are identified by their token
//! count vectors only.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::dram::DramNet;
use crate::petri::{CommandLabel, Marking, PetriNet, TransitionId};

pub const DEFAULT_STATE_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("state limit of {limit} exceeded ({explored} states discovered so far)")]
    StateLimit { limit: usize, explored: usize },
    #[error("trace limit of {limit} exceeded ({found} traces found so far)")]
    TraceLimit { limit: usize, found: usize },
    #[error("trace count overflows u128 at depth {0}")]
    CountOverflow(usize),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("label {0} is not part of both nets")]
    VocabularyMismatch(String),
    #[error("cannot start a thread pool: {0}")]
    ThreadPool(String),
}

fn pool(threads: usize) -> Result<Option<rayon::ThreadPool>, AnalysisError> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| AnalysisError::ThreadPool(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateEdge {
    pub from: u32,
    pub transition: TransitionId,
    pub to: u32,
}

/// Reachable markings (state 0 is the initial marking) and the firings
/// between them. Numbering follows breadth-first discovery with successors
/// visited in transition construction order.
#[derive(Clone, Debug)]
pub struct StateGraph {
    net: Arc<PetriNet>,
    states: Vec<Marking>,
    edges: Vec<StateEdge>,
    /// `edges[offsets[s]..offsets[s + 1]]` leave state `s`.
    offsets: Vec<usize>,
    index: HashMap<Marking, u32>,
}

impl StateGraph {
    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Marking] {
        &self.states
    }

    pub fn edges(&self) -> &[StateEdge] {
        &self.edges
    }

    pub fn successors(&self, state: u32) -> &[StateEdge] {
        let s = state as usize;
        &self.edges[self.offsets[s]..self.offsets[s + 1]]
    }

    pub fn state_of(&self, marking: &Marking) -> Option<u32> {
        self.index.get(marking).copied()
    }

    /// Length of the shortest firing sequence from state 0 to each state.
    pub fn distances(&self) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.states.len()];
        let mut queue = VecDeque::new();
        if !self.states.is_empty() {
            dist[0] = 0;
            queue.push_back(0u32);
        }
        while let Some(s) = queue.pop_front() {
            for e in self.successors(s) {
                if dist[e.to as usize] == u32::MAX {
                    dist[e.to as usize] = dist[s as usize] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        dist
    }
}

#[derive(Clone, Copy, Debug)]
pub struct UnrollOptions {
    pub state_limit: usize,
    pub threads: usize,
}

impl Default for UnrollOptions {
    fn default() -> Self {
        Self {
            state_limit: DEFAULT_STATE_LIMIT,
            threads: 1,
        }
    }
}

pub fn unroll(dnet: &DramNet) -> Result<StateGraph, AnalysisError> {
    unroll_with(dnet.shared_net(), &UnrollOptions::default())
}

/// Breadth-first unrolling, one frontier level at a time. Successor
/// markings of a level may be computed in parallel; they are merged in state
/// order, so numbering is identical for any thread count.
pub fn unroll_with(net: &Arc<PetriNet>, opts: &UnrollOptions) -> Result<StateGraph, AnalysisError> {
    let pool = pool(opts.threads)?;
    let initial = net.initial_marking();
    let mut states = vec![initial.clone()];
    let mut index = HashMap::from([(initial, 0u32)]);
    let mut edges = Vec::new();
    let mut offsets = vec![0];
    if opts.state_limit == 0 {
        return Err(AnalysisError::StateLimit {
            limit: 0,
            explored: 1,
        });
    }

    let expand = |m: &Marking| -> Vec<(TransitionId, Marking)> {
        net.transition_ids()
            .filter(|&t| net.enabled(m, t))
            .map(|t| (t, net.fire_unchecked(m, t)))
            .collect()
    };

    let mut level = 0..1usize;
    while !level.is_empty() {
        let frontier = &states[level.clone()];
        let successors: Vec<Vec<(TransitionId, Marking)>> = match &pool {
            Some(pool) => pool.install(|| frontier.par_iter().map(expand).collect()),
            None => frontier.iter().map(expand).collect(),
        };
        let next_start = states.len();
        for (offset, succ) in successors.into_iter().enumerate() {
            let from = (level.start + offset) as u32;
            for (transition, marking) in succ {
                let to = match index.get(&marking) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= opts.state_limit {
                            return Err(AnalysisError::StateLimit {
                                limit: opts.state_limit,
                                explored: states.len(),
                            });
                        }
                        let id = states.len() as u32;
                        index.insert(marking.clone(), id);
                        states.push(marking);
                        id
                    }
                };
                edges.push(StateEdge {
                    from,
                    transition,
                    to,
                });
            }
            offsets.push(edges.len());
        }
        level = next_start..states.len();
    }

    Ok(StateGraph {
        net: Arc::clone(net),
        states,
        edges,
        offsets,
        index,
    })
}

/// `(2^(B+1) + 1)^R`, the number of reachable states of the canonical net.
pub fn state_count_formula(banks: u32, ranks: u32) -> BigUint {
    let per_rank = (BigUint::from(1u32) << (banks as usize + 1)) + 1u32;
    per_rank.pow(ranks)
}

/// Largest shortest-path distance from the initial state, i.e. the depth
/// needed before every reachable state has been visited.
pub fn k_min(sg: &StateGraph) -> u32 {
    sg.distances()
        .into_iter()
        .filter(|&d| d != u32::MAX)
        .max()
        .unwrap_or(0)
}

pub type Trace = Vec<CommandLabel>;

/// `ACT (RA0BA0) ; ACT (RA0BA1) ; WR (RA0BA0)`
pub fn render_trace(trace: &[CommandLabel]) -> String {
    trace
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// All legal traces of one depth, in lexicographic transition-id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    pub depth: usize,
    traces: Vec<Trace>,
}

impl TraceSet {
    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn to_set(&self) -> BTreeSet<Trace> {
        self.traces.iter().cloned().collect()
    }

    pub fn contains(&self, trace: &[CommandLabel]) -> bool {
        self.traces.iter().any(|t| t == trace)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TraceOptions {
    pub limit: Option<usize>,
    pub threads: usize,
}

pub fn enumerate_traces(dnet: &DramNet, k: usize) -> Result<TraceSet, AnalysisError> {
    enumerate_traces_with(dnet, k, &TraceOptions::default())
}

pub fn enumerate_traces_with(
    dnet: &DramNet,
    k: usize,
    opts: &TraceOptions,
) -> Result<TraceSet, AnalysisError> {
    let mut traces = Vec::new();
    for_each_trace_with(dnet.net(), k, opts, |ids| {
        traces.push(ids.iter().map(|&t| dnet.label(t)).collect())
    })?;
    Ok(TraceSet { depth: k, traces })
}

/// Depth-first walk over every length-`k` firing sequence from the initial
/// marking, handing each to `sink` in lexicographic id order. Returns the
/// number of traces.
pub fn for_each_trace(
    net: &PetriNet,
    k: usize,
    limit: Option<usize>,
    mut sink: impl FnMut(&[TransitionId]),
) -> Result<usize, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::ZeroDepth);
    }
    let mut path = Vec::with_capacity(k);
    let mut found = 0;
    walk(
        net,
        &net.initial_marking(),
        k,
        limit,
        &mut path,
        &mut found,
        &mut sink,
    )?;
    Ok(found)
}

/// Like [`for_each_trace`], but with `threads > 1` the first-level branches
/// are explored in parallel and replayed to `sink` in order.
pub fn for_each_trace_with(
    net: &PetriNet,
    k: usize,
    opts: &TraceOptions,
    mut sink: impl FnMut(&[TransitionId]),
) -> Result<usize, AnalysisError> {
    let Some(pool) = pool(opts.threads)? else {
        return for_each_trace(net, k, opts.limit, sink);
    };
    if k == 0 {
        return Err(AnalysisError::ZeroDepth);
    }
    let initial = net.initial_marking();
    let first = net.enabled_set(&initial);
    let branches: Vec<Result<Vec<Vec<TransitionId>>, AnalysisError>> = pool.install(|| {
        first
            .par_iter()
            .map(|&t| {
                let mut out = Vec::new();
                let mut path = vec![t];
                let mut found = 0;
                let next = net.fire_unchecked(&initial, t);
                walk(
                    net,
                    &next,
                    k - 1,
                    opts.limit,
                    &mut path,
                    &mut found,
                    &mut |ids| out.push(ids.to_vec()),
                )?;
                Ok(out)
            })
            .collect()
    });
    let mut found = 0;
    for branch in branches {
        let branch = branch.map_err(|e| match e {
            AnalysisError::TraceLimit { limit, found: f } => AnalysisError::TraceLimit {
                limit,
                found: found + f,
            },
            other => other,
        })?;
        for trace in branch {
            found += 1;
            if opts.limit.is_some_and(|limit| found > limit) {
                return Err(AnalysisError::TraceLimit {
                    limit: opts.limit.unwrap_or_default(),
                    found,
                });
            }
            sink(&trace);
        }
    }
    Ok(found)
}

fn walk(
    net: &PetriNet,
    marking: &Marking,
    remaining: usize,
    limit: Option<usize>,
    path: &mut Vec<TransitionId>,
    found: &mut usize,
    sink: &mut dyn FnMut(&[TransitionId]),
) -> Result<(), AnalysisError> {
    if remaining == 0 {
        *found += 1;
        if let Some(limit) = limit {
            if *found > limit {
                return Err(AnalysisError::TraceLimit {
                    limit,
                    found: *found,
                });
            }
        }
        sink(path);
        return Ok(());
    }
    for t in net.transition_ids() {
        if !net.enabled(marking, t) {
            continue;
        }
        let next = net.fire_unchecked(marking, t);
        path.push(t);
        walk(net, &next, remaining - 1, limit, path, found, sink)?;
        path.pop();
    }
    Ok(())
}

/// Number of length-`k` traces, counted as length-`k` paths from state 0 of
/// the unrolled graph.
pub fn count_traces(dnet: &DramNet, k: usize) -> Result<u128, AnalysisError> {
    let sg = unroll(dnet)?;
    count_paths(&sg, k)
}

pub fn count_paths(sg: &StateGraph, k: usize) -> Result<u128, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::ZeroDepth);
    }
    let mut current = vec![0u128; sg.state_count()];
    current[0] = 1;
    for depth in 1..=k {
        let mut next = vec![0u128; sg.state_count()];
        for e in sg.edges() {
            let add = current[e.from as usize];
            if add == 0 {
                continue;
            }
            let slot = &mut next[e.to as usize];
            *slot = slot
                .checked_add(add)
                .ok_or(AnalysisError::CountOverflow(depth))?;
        }
        current = next;
    }
    current
        .into_iter()
        .try_fold(0u128, |acc, c| acc.checked_add(c))
        .ok_or(AnalysisError::CountOverflow(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// `witness` is legal in the net named by `only_in` and not in the other.
    Divergent {
        witness: Trace,
        only_in: Side,
    },
}

/// Bounded equivalence: equal iff both nets have exactly the same legal
/// traces of depth `k`.
pub fn equivalent(a: &DramNet, b: &DramNet, k: usize) -> Result<Equivalence, AnalysisError> {
    let labels_a: BTreeSet<_> = a.labels().into_iter().collect();
    let labels_b: BTreeSet<_> = b.labels().into_iter().collect();
    if let Some(label) = labels_a.symmetric_difference(&labels_b).next() {
        return Err(AnalysisError::VocabularyMismatch(label.to_string()));
    }
    let set_a = enumerate_traces(a, k)?.to_set();
    let set_b = enumerate_traces(b, k)?.to_set();
    if let Some(witness) = set_a.difference(&set_b).next() {
        return Ok(Equivalence::Divergent {
            witness: witness.clone(),
            only_in: Side::First,
        });
    }
    if let Some(witness) = set_b.difference(&set_a).next() {
        return Ok(Equivalence::Divergent {
            witness: witness.clone(),
            only_in: Side::Second,
        });
    }
    Ok(Equivalence::Equal)
}
