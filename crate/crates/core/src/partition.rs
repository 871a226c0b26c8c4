//! Balanced k-way partitioning of the coupling graph minimising the total
//! `|J_ij|` of couplings that cross parts.
//!
//! Pipeline per bisection: heavy-edge-matching coarsening, greedy region
//! growing on the coarsest graph (several seeded starts), then projection back
//! with Fiduccia–Mattheyses refinement at every level. `k > 2` is handled by
//! recursive bisection followed by one k-way refinement on the full graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::IsingModel;

pub const DEFAULT_EPSILON: f64 = 0.05;
/// Coarsening stops once a level has at most `max(2k, COARSEST_FLOOR)` nodes.
pub const COARSEST_FLOOR: usize = 32;
const INITIAL_TRIALS: u64 = 8;
pub const DEFAULT_PASSES: usize = 16;
const GAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub k: usize,
    /// Size slack: parts hold at most `floor((1 + epsilon) * ceil(n / k))` spins.
    pub epsilon: f64,
    /// Hard per-part cap replacing the epsilon rule (chip capacity).
    pub capacity: Option<usize>,
    pub seed: u64,
}

impl PartitionSpec {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            epsilon: DEFAULT_EPSILON,
            capacity: None,
            seed: 0,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = Some(capacity);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Largest admissible part size for an `n`-spin model.
    pub fn max_part_size(&self, n: usize) -> usize {
        match self.capacity {
            Some(c) => c,
            None => {
                let ideal = n.div_ceil(self.k.max(1));
                // The tolerance absorbs products like 1.05 * 20 = 20.999...
                ((1.0 + self.epsilon) * ideal as f64 + 1e-9).floor() as usize
            }
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::contract("k must be at least 1"));
        }
        if self.k > n {
            return Err(Error::contract(format!(
                "cannot split {n} spins into {} parts",
                self.k
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::contract(format!(
                "epsilon must be finite and nonnegative, got {}",
                self.epsilon
            )));
        }
        let bound = self.max_part_size(n);
        if bound == 0 || bound * self.k < n {
            return Err(Error::capacity(format!(
                "{} parts of at most {bound} spins cannot hold {n} spins",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub k: usize,
    /// Part id of every spin.
    pub assignment: Vec<usize>,
    pub cut_weight: f64,
    pub part_sizes: Vec<usize>,
    pub max_part_size: usize,
}

impl PartitionResult {
    fn from_assignment(model: &IsingModel, k: usize, bound: usize, assignment: Vec<usize>) -> Self {
        let mut part_sizes = vec![0; k];
        for &p in &assignment {
            part_sizes[p] += 1;
        }
        let cut_weight = cut_of(model, &assignment);
        Self {
            k,
            assignment,
            cut_weight,
            part_sizes,
            max_part_size: bound,
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.part_sizes.iter().all(|&s| s <= self.max_part_size)
    }

    /// Spins of each part, ascending.
    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.k];
        for (i, &p) in self.assignment.iter().enumerate() {
            parts[p].push(i);
        }
        parts
    }
}

fn cut_of(model: &IsingModel, assignment: &[usize]) -> f64 {
    model
        .couplings()
        .iter()
        .filter(|&&(i, j, _)| assignment[i] != assignment[j])
        .map(|&(_, _, w)| w.abs())
        .sum()
}

/// Total `|J_ij|` over couplings whose endpoints sit in different parts.
pub fn cut_weight(model: &IsingModel, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != model.n() {
        return Err(Error::contract(format!(
            "assignment covers {} spins, model has {}",
            assignment.len(),
            model.n()
        )));
    }
    Ok(cut_of(model, assignment))
}

/// Node- and edge-weighted graph the multilevel scheme operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    node_weights: Vec<u64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Unit node weights and `|J_ij|` edge weights.
    pub fn from_model(model: &IsingModel) -> Self {
        let adjacency = (0..model.n())
            .map(|i| {
                model
                    .neighbors(i)
                    .iter()
                    .map(|&(j, w)| (j, w.abs()))
                    .collect()
            })
            .collect();
        Self {
            node_weights: vec![1; model.n()],
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.node_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_weights.is_empty()
    }

    pub fn node_weights(&self) -> &[u64] {
        &self.node_weights
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn total_weight(&self) -> u64 {
        self.node_weights.iter().sum()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn cut(&self, assignment: &[usize]) -> f64 {
        let mut cut = 0.0;
        for (u, list) in self.adjacency.iter().enumerate() {
            for &(v, w) in list {
                if u < v && assignment[u] != assignment[v] {
                    cut += w;
                }
            }
        }
        cut
    }

    fn part_weights(&self, assignment: &[usize], k: usize) -> Vec<u64> {
        let mut weights = vec![0; k];
        for (v, &p) in assignment.iter().enumerate() {
            weights[p] += self.node_weights[v];
        }
        weights
    }

    /// Induced subgraph on `nodes` (relabelled `0..nodes.len()` in order).
    fn induced(&self, nodes: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.len()];
        for (l, &v) in nodes.iter().enumerate() {
            local[v] = l;
        }
        let adjacency = nodes
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter(|&&(u, _)| local[u] != usize::MAX)
                    .map(|&(u, w)| (local[u], w))
                    .collect()
            })
            .collect();
        Self {
            node_weights: nodes.iter().map(|&v| self.node_weights[v]).collect(),
            adjacency,
        }
    }
}

/// Levels from finest (the input) to coarsest; `maps[l][v]` is the node of
/// level `l + 1` that node `v` of level `l` was merged into.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    pub levels: Vec<WeightedGraph>,
    pub maps: Vec<Vec<usize>>,
}

impl Hierarchy {
    pub fn coarsest(&self) -> &WeightedGraph {
        self.levels.last().expect("hierarchy holds the input level")
    }
}

/// Coarsens a model's graph for a `k`-way split with the default floor.
pub fn coarsen(model: &IsingModel, k: usize) -> Hierarchy {
    let graph = WeightedGraph::from_model(model);
    coarsen_graph(graph, (2 * k).max(COARSEST_FLOOR), u64::MAX)
}

/// Repeated greedy heavy-edge matching: edges are visited by descending
/// weight (ties by lower endpoints) and matched when both ends are free and
/// the merged node stays within `max_node_weight`.
pub fn coarsen_graph(graph: WeightedGraph, target: usize, max_node_weight: u64) -> Hierarchy {
    let mut levels = vec![graph];
    let mut maps = Vec::new();
    loop {
        let current = levels.last().expect("nonempty");
        if current.len() <= target {
            break;
        }
        match match_level(current, max_node_weight) {
            Some((coarse, map)) => {
                levels.push(coarse);
                maps.push(map);
            }
            None => break,
        }
    }
    Hierarchy { levels, maps }
}

fn match_level(graph: &WeightedGraph, max_node_weight: u64) -> Option<(WeightedGraph, Vec<usize>)> {
    let n = graph.len();
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(graph.edge_count());
    for u in 0..n {
        for &(v, w) in graph.neighbors(u) {
            if u < v {
                edges.push((u, v, w));
            }
        }
    }
    edges.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));

    let mut mate = vec![usize::MAX; n];
    let mut merged = 0;
    for &(u, v, _) in &edges {
        if mate[u] == usize::MAX
            && mate[v] == usize::MAX
            && graph.node_weights[u] + graph.node_weights[v] <= max_node_weight
        {
            mate[u] = v;
            mate[v] = u;
            merged += 1;
        }
    }
    if merged == 0 {
        return None;
    }

    let mut map = vec![usize::MAX; n];
    let mut node_weights = Vec::with_capacity(n - merged);
    for v in 0..n {
        if map[v] != usize::MAX {
            continue;
        }
        let id = node_weights.len();
        map[v] = id;
        let mut weight = graph.node_weights[v];
        if mate[v] != usize::MAX {
            map[mate[v]] = id;
            weight += graph.node_weights[mate[v]];
        }
        node_weights.push(weight);
    }

    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); node_weights.len()];
    for u in 0..n {
        for &(v, w) in graph.neighbors(u) {
            let (cu, cv) = (map[u], map[v]);
            if cu != cv {
                adjacency[cu].push((cv, w));
            }
        }
    }
    for list in &mut adjacency {
        list.sort_by_key(|&(v, _)| v);
        let mut summed: Vec<(usize, f64)> = Vec::with_capacity(list.len());
        for &(v, w) in list.iter() {
            match summed.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => summed.push((v, w)),
            }
        }
        *list = summed;
    }

    Some((
        WeightedGraph {
            node_weights,
            adjacency,
        },
        map,
    ))
}

/// Per-part weight window `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartLimits {
    pub lower: Vec<u64>,
    pub upper: Vec<u64>,
}

impl PartLimits {
    pub fn uniform(k: usize, lower: u64, upper: u64) -> Self {
        Self {
            lower: vec![lower; k],
            upper: vec![upper; k],
        }
    }

    fn k(&self) -> usize {
        self.upper.len()
    }

    fn admits(&self, weights: &[u64]) -> bool {
        weights
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&w, (&lo, &hi))| lo <= w && w <= hi)
    }
}

/// FM refinement of a k-way assignment in place; returns the final cut.
///
/// Within a pass every node moves at most once, always the highest-gain
/// admissible move (ties: lowest node, then lowest target part). Parts may
/// temporarily exceed their upper bound by one maximal node weight, but only
/// prefixes that satisfy the limits are eligible as the pass result, and the
/// pass rolls back to the best such prefix.
pub fn fm_refine_graph(
    graph: &WeightedGraph,
    assignment: &mut [usize],
    limits: &PartLimits,
    max_passes: usize,
) -> Result<f64> {
    let n = graph.len();
    let k = limits.k();
    if assignment.len() != n {
        return Err(Error::contract(format!(
            "assignment covers {} nodes, graph has {n}",
            assignment.len()
        )));
    }
    if let Some(&p) = assignment.iter().find(|&&p| p >= k) {
        return Err(Error::contract(format!(
            "part id {p} out of range for k={k}"
        )));
    }
    let mut weights = graph.part_weights(assignment, k);
    if !limits.admits(&weights) {
        return Err(Error::contract(format!(
            "infeasible input assignment: part weights {weights:?} outside limits"
        )));
    }
    let slack = graph.node_weights.iter().copied().max().unwrap_or(0);
    let mut cut = graph.cut(assignment);
    if k < 2 {
        return Ok(cut);
    }

    let mut conn = vec![0.0f64; n * k];
    let mut locked = vec![false; n];
    let mut moves: Vec<(usize, usize)> = Vec::new();

    for _ in 0..max_passes {
        conn.iter_mut().for_each(|c| *c = 0.0);
        for v in 0..n {
            for &(u, w) in graph.neighbors(v) {
                conn[v * k + assignment[u]] += w;
            }
        }
        locked.iter_mut().for_each(|l| *l = false);
        moves.clear();

        let mut gain_sum = 0.0;
        let mut best_gain = 0.0;
        let mut best_len = 0;
        let stall_limit = 100.max(n / 4);

        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for v in 0..n {
                if locked[v] {
                    continue;
                }
                let from = assignment[v];
                let wv = graph.node_weights[v];
                if weights[from] < limits.lower[from] + wv {
                    continue;
                }
                let internal = conn[v * k + from];
                for to in 0..k {
                    if to == from || weights[to] + wv > limits.upper[to] + slack {
                        continue;
                    }
                    let gain = conn[v * k + to] - internal;
                    if best.is_none_or(|(g, _, _)| gain > g) {
                        best = Some((gain, v, to));
                    }
                }
            }
            let Some((gain, v, to)) = best else { break };

            let from = assignment[v];
            assignment[v] = to;
            weights[from] -= graph.node_weights[v];
            weights[to] += graph.node_weights[v];
            for &(u, w) in graph.neighbors(v) {
                conn[u * k + from] -= w;
                conn[u * k + to] += w;
            }
            locked[v] = true;
            moves.push((v, from));
            gain_sum += gain;

            if gain_sum > best_gain + GAIN_TOL && limits.admits(&weights) {
                best_gain = gain_sum;
                best_len = moves.len();
            } else if moves.len() - best_len > stall_limit {
                break;
            }
        }

        for &(v, from) in moves[best_len..].iter().rev() {
            let to = assignment[v];
            assignment[v] = from;
            weights[to] -= graph.node_weights[v];
            weights[from] += graph.node_weights[v];
        }
        if best_len == 0 {
            break;
        }
        let new_cut = graph.cut(assignment);
        if new_cut >= cut {
            // Accumulated gains overstated a zero-sum pass; undo it.
            for &(v, from) in moves[..best_len].iter().rev() {
                let to = assignment[v];
                assignment[v] = from;
                weights[to] -= graph.node_weights[v];
                weights[from] += graph.node_weights[v];
            }
            break;
        }
        cut = new_cut;
    }
    Ok(cut)
}

/// FM refinement of a model partition under the balance bound of `spec`.
pub fn fm_refine(
    model: &IsingModel,
    assignment: &[usize],
    spec: &PartitionSpec,
    max_passes: usize,
) -> Result<Vec<usize>> {
    spec.validate(model.n())?;
    let graph = WeightedGraph::from_model(model);
    let bound = spec.max_part_size(model.n()) as u64;
    let mut refined = assignment.to_vec();
    fm_refine_graph(
        &graph,
        &mut refined,
        &PartLimits::uniform(spec.k, 0, bound),
        max_passes,
    )?;
    Ok(refined)
}

/// Greedy region growing: part 0 grows from `seed` by repeatedly absorbing
/// the frontier node most strongly connected to it, until it reaches
/// `target` weight. Disconnected remainders restart from the heaviest free
/// node.
fn grow_bisection(graph: &WeightedGraph, seed: usize, target: u64, cap: u64) -> Vec<usize> {
    let n = graph.len();
    let mut assignment = vec![1usize; n];
    let mut attraction = vec![0.0f64; n];
    let mut on_frontier = vec![false; n];
    let mut weight = 0u64;
    let mut next = Some(seed);

    while weight < target {
        let v = match next.take() {
            Some(v) => v,
            None => {
                let frontier_best = (0..n)
                    .filter(|&v| on_frontier[v] && assignment[v] == 1)
                    .filter(|&v| weight + graph.node_weights[v] <= cap)
                    .max_by(|&a, &b| attraction[a].total_cmp(&attraction[b]).then(b.cmp(&a)));
                let fallback = || {
                    (0..n)
                        .filter(|&v| assignment[v] == 1)
                        .filter(|&v| weight + graph.node_weights[v] <= cap)
                        .max_by(|&a, &b| {
                            graph.node_weights[a]
                                .cmp(&graph.node_weights[b])
                                .then(b.cmp(&a))
                        })
                };
                match frontier_best.or_else(fallback) {
                    Some(v) => v,
                    None => break,
                }
            }
        };
        if weight + graph.node_weights[v] > cap {
            break;
        }
        assignment[v] = 0;
        weight += graph.node_weights[v];
        for &(u, w) in graph.neighbors(v) {
            if assignment[u] == 1 {
                attraction[u] += w;
                on_frontier[u] = true;
            }
        }
    }
    assignment
}

fn heaviest_node(graph: &WeightedGraph) -> usize {
    (0..graph.len())
        .max_by(|&a, &b| {
            graph.node_weights[a]
                .cmp(&graph.node_weights[b])
                .then(b.cmp(&a))
        })
        .expect("nonempty graph")
}

/// Splits `graph` into a side for `left_parts` and a side for `right_parts`
/// parts of at most `bound` weight each.
fn multilevel_bisect(
    graph: &WeightedGraph,
    left_parts: usize,
    right_parts: usize,
    bound: u64,
    seed: u64,
) -> Result<Vec<usize>> {
    let total = graph.total_weight();
    let limits = PartLimits {
        lower: vec![left_parts as u64, right_parts as u64],
        upper: vec![left_parts as u64 * bound, right_parts as u64 * bound],
    };
    let parts = left_parts + right_parts;
    let target_left = (total * left_parts as u64)
        .div_ceil(parts as u64)
        .clamp(limits.lower[0], limits.upper[0]);
    let max_node = (limits.upper[0].min(limits.upper[1]) / 4).max(1);
    let hierarchy = coarsen_graph(graph.clone(), (2 * parts).max(COARSEST_FLOOR), max_node);
    let coarsest = hierarchy.coarsest();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for trial in 0..INITIAL_TRIALS {
        let start = if trial == 0 {
            heaviest_node(coarsest)
        } else {
            rng.random_range(0..coarsest.len())
        };
        let mut assignment = grow_bisection(coarsest, start, target_left, limits.upper[0]);
        let weights = coarsest.part_weights(&assignment, 2);
        if !limits.admits(&weights) {
            continue;
        }
        let cut = fm_refine_graph(coarsest, &mut assignment, &limits, DEFAULT_PASSES)?;
        if best.as_ref().is_none_or(|(c, _)| cut < *c - GAIN_TOL) {
            best = Some((cut, assignment));
        }
    }
    let Some((_, mut assignment)) = best else {
        return Err(Error::capacity(format!(
            "no feasible bisection into {left_parts}+{right_parts} parts of at most {bound}"
        )));
    };

    for level in (0..hierarchy.maps.len()).rev() {
        let map = &hierarchy.maps[level];
        let mut fine: Vec<usize> = map.iter().map(|&c| assignment[c]).collect();
        fm_refine_graph(&hierarchy.levels[level], &mut fine, &limits, DEFAULT_PASSES)?;
        assignment = fine;
    }
    Ok(assignment)
}

fn recursive_bisect(
    graph: &WeightedGraph,
    nodes: &[usize],
    parts: usize,
    first_part: usize,
    bound: u64,
    seed: u64,
    out: &mut [usize],
) -> Result<()> {
    if parts == 1 {
        for &v in nodes {
            out[v] = first_part;
        }
        return Ok(());
    }
    let left_parts = parts / 2;
    let right_parts = parts - left_parts;
    let sub = graph.induced(nodes);
    let sides = multilevel_bisect(&sub, left_parts, right_parts, bound, seed)?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (&v, &side) in nodes.iter().zip(&sides) {
        if side == 0 {
            left.push(v);
        } else {
            right.push(v);
        }
    }
    recursive_bisect(
        graph,
        &left,
        left_parts,
        first_part,
        bound,
        seed.wrapping_add(1),
        out,
    )?;
    recursive_bisect(
        graph,
        &right,
        right_parts,
        first_part + left_parts,
        bound,
        seed.wrapping_add(2),
        out,
    )
}

/// Multilevel weighted min-cut partition; deterministic in `(model, spec)`.
pub fn partition(model: &IsingModel, spec: &PartitionSpec) -> Result<PartitionResult> {
    let n = model.n();
    spec.validate(n)?;
    let bound = spec.max_part_size(n);
    if spec.k == 1 {
        return Ok(PartitionResult::from_assignment(
            model,
            1,
            bound,
            vec![0; n],
        ));
    }
    let graph = WeightedGraph::from_model(model);
    let nodes: Vec<usize> = (0..n).collect();
    let mut assignment = vec![0; n];
    recursive_bisect(
        &graph,
        &nodes,
        spec.k,
        0,
        bound as u64,
        spec.seed,
        &mut assignment,
    )?;
    if spec.k > 2 {
        fm_refine_graph(
            &graph,
            &mut assignment,
            &PartLimits::uniform(spec.k, 1, bound as u64),
            DEFAULT_PASSES,
        )?;
    }
    Ok(PartitionResult::from_assignment(
        model, spec.k, bound, assignment,
    ))
}

/// Largest instance the exhaustive bisection oracle accepts.
pub const MAX_BRUTE_FORCE_SPINS: usize = 14;

/// Exhaustive optimum over all bisections with both sides nonempty and within
/// the balance bound. Ties go to the lexicographically smallest assignment.
pub fn brute_force_min_cut(model: &IsingModel, spec: &PartitionSpec) -> Result<PartitionResult> {
    let n = model.n();
    if spec.k != 2 || n > MAX_BRUTE_FORCE_SPINS {
        return Err(Error::capacity(format!(
            "brute force handles k=2 and n<={MAX_BRUTE_FORCE_SPINS}, got k={} n={n}",
            spec.k
        )));
    }
    spec.validate(n)?;
    let bound = spec.max_part_size(n);
    let mut best: Option<(f64, u64)> = None;
    let mut assignment = vec![0usize; n];
    // Spin 0 is the most significant bit, so ascending masks are ascending
    // assignments in lexicographic order.
    for mask in 0..1u64 << n {
        let ones = mask.count_ones() as usize;
        if ones == 0 || ones == n || ones > bound || n - ones > bound {
            continue;
        }
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = (mask >> (n - 1 - i) & 1) as usize;
        }
        let cut = cut_of(model, &assignment);
        if best.is_none_or(|(c, _)| cut < c - GAIN_TOL) {
            best = Some((cut, mask));
        }
    }
    let (_, mask) = best.ok_or_else(|| Error::capacity("no feasible bisection"))?;
    let assignment = (0..n).map(|i| (mask >> (n - 1 - i) & 1) as usize).collect();
    Ok(PartitionResult::from_assignment(
        model, 2, bound, assignment,
    ))
}
