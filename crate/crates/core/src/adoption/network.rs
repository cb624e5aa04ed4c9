//! Social network construction: geographic candidates within a radius,
//! a homophily cut on financial-index similarity, and a sprinkle of
//! uniform-random long-range links.

use std::collections::{HashMap, HashSet};

use crate::rng::Stream;

use super::population::Agent;

/// Network-formation parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkParams {
    /// Geographic candidate radius, m.
    pub phi: f64,
    /// Fraction of candidates kept, most similar first.
    pub rho: f64,
    /// Random extra links per connected neighbor.
    pub lambda: f64,
}

/// Undirected adjacency, one sorted neighbor list per agent slot.
#[derive(Clone, Debug, Default)]
pub struct Network {
    adj: Vec<Vec<u32>>,
}

impl Network {
    pub fn with_slots(n: usize) -> Self {
        Network { adj: vec![Vec::new(); n] }
    }

    pub fn ensure_slots(&mut self, n: usize) {
        if self.adj.len() < n {
            self.adj.resize(n, Vec::new());
        }
    }

    pub fn degree(&self, id: u32) -> usize {
        self.adj[id as usize].len()
    }

    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.adj[id as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Inserts undirected edges, skipping self-loops and duplicates.
    /// Returns the edges actually added.
    pub fn add_edges(&mut self, mut pairs: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs.retain(|&(a, b)| a != b && !self.has_edge(a, b));

        // Batch append then re-sort each touched list once; cheaper than
        // per-edge sorted inserts when waves add millions of edges.
        let mut touched: Vec<u32> = Vec::with_capacity(pairs.len() * 2);
        for &(a, b) in &pairs {
            self.adj[a as usize].push(b);
            self.adj[b as usize].push(a);
            touched.push(a);
            touched.push(b);
        }
        touched.sort_unstable();
        touched.dedup();
        for t in touched {
            self.adj[t as usize].sort_unstable();
        }
        pairs
    }

    /// Drops an agent and every edge incident to it; returns its former
    /// neighbors.
    pub fn remove_agent(&mut self, id: u32) -> Vec<u32> {
        let neighbors = std::mem::take(&mut self.adj[id as usize]);
        for &nb in &neighbors {
            let list = &mut self.adj[nb as usize];
            if let Ok(pos) = list.binary_search(&id) {
                list.remove(pos);
            }
        }
        neighbors
    }

    /// Canonical `(lo, hi)` edge list, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adj.iter().enumerate() {
            for &b in list {
                if (a as u32) < b {
                    edges.push((a as u32, b));
                }
            }
        }
        edges
    }
}

/// A grid cell member: position and financial index denormalized so
/// candidate scans stream a compact array instead of chasing agents.
#[derive(Clone, Copy, Debug)]
struct GridEntry {
    id: u32,
    x: f32,
    y: f32,
    financial: f32,
}

/// A located candidate with its homophily key material.
#[derive(Clone, Copy, Debug)]
pub struct Candidate {
    pub id: u32,
    pub financial: f32,
}

/// Uniform grid over agent positions with cells sized to the radius, so a
/// radius query only scans the 3×3 surrounding block.
#[derive(Clone, Debug)]
pub struct SpatialGrid {
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<GridEntry>>,
}

impl SpatialGrid {
    pub fn new(phi: f64) -> Self {
        let cell_size = if phi.is_finite() && phi > 0.0 { phi } else { f64::INFINITY };
        SpatialGrid { cell_size, cells: HashMap::new() }
    }

    fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        if !self.cell_size.is_finite() {
            return (0, 0);
        }
        ((x / self.cell_size).floor() as i64, (y / self.cell_size).floor() as i64)
    }

    pub fn insert(&mut self, agent: &Agent) {
        let key = self.cell_of(agent.x, agent.y);
        self.cells.entry(key).or_default().push(GridEntry {
            id: agent.id,
            x: agent.x as f32,
            y: agent.y as f32,
            financial: agent.financial_index as f32,
        });
    }

    pub fn remove(&mut self, id: u32, x: f64, y: f64) {
        if let Some(v) = self.cells.get_mut(&self.cell_of(x, y)) {
            v.retain(|m| m.id != id);
        }
    }

    /// Alive agents within `phi` of the ego, excluding the ego itself, in
    /// deterministic scan order.
    pub fn candidates(&self, ego: &Agent, phi: f64, out: &mut Vec<Candidate>) {
        out.clear();
        let phi_sq = (phi * phi) as f32;
        let (ex, ey) = (ego.x as f32, ego.y as f32);
        let push_from = |entries: &[GridEntry], out: &mut Vec<Candidate>| {
            for e in entries {
                if e.id == ego.id {
                    continue;
                }
                let (dx, dy) = (e.x - ex, e.y - ey);
                if dx * dx + dy * dy <= phi_sq {
                    out.push(Candidate { id: e.id, financial: e.financial });
                }
            }
        };
        if !self.cell_size.is_finite() {
            if let Some(entries) = self.cells.get(&(0, 0)) {
                push_from(entries, out);
            }
            return;
        }
        let (cx, cy) = self.cell_of(ego.x, ego.y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(entries) = self.cells.get(&(cx + dx, cy + dy)) {
                    push_from(entries, out);
                }
            }
        }
    }
}

/// Homophily cut: the `ceil(rho × n)` candidates most similar to the ego
/// by financial index, ties broken by id.
fn homophily_select(ego: &Agent, candidates: &mut Vec<Candidate>, rho: f64) {
    if candidates.is_empty() {
        return;
    }
    let keep = ((rho * candidates.len() as f64).ceil() as usize).clamp(1, candidates.len());
    if keep == candidates.len() {
        return;
    }
    let ego_f = ego.financial_index as f32;
    let key = |c: &Candidate| ((c.financial - ego_f).abs(), c.id);
    candidates.select_nth_unstable_by(keep - 1, |a, b| key(a).partial_cmp(&key(b)).unwrap());
    candidates.truncate(keep);
}

fn lambda_extras(
    ego: u32,
    degree: usize,
    lambda: f64,
    pool: &[u32],
    network: &Network,
    stream: &mut Stream,
    out: &mut Vec<(u32, u32)>,
) {
    let want = (lambda * degree as f64).floor() as usize;
    if want == 0 || pool.len() < 2 {
        return;
    }
    let mut found = 0;
    let mut attempts = 0;
    let mut s = stream.derive(u64::from(ego) ^ 0x6c61_6d62_6461);
    while found < want && attempts < want * 8 {
        attempts += 1;
        let other = pool[s.index(pool.len())];
        if other == ego || network.has_edge(ego, other) {
            continue;
        }
        out.push((ego, other));
        found += 1;
    }
}

/// Builds the full network for the current population.
///
/// Three steps per ego: geographic candidates within `phi`, the top-`rho`
/// homophily cut, then `floor(lambda × degree)` uniform-random extra links
/// drawn from the entire pool.
pub fn build_network(
    agents: &[Agent],
    params: &NetworkParams,
    stream: &Stream,
) -> (Network, SpatialGrid) {
    let mut grid = SpatialGrid::new(params.phi);
    let mut pool = Vec::new();
    for a in agents.iter().filter(|a| a.alive) {
        grid.insert(a);
        pool.push(a.id);
    }

    let mut network = Network::with_slots(agents.len());
    let mut candidates = Vec::new();
    let mut edges = Vec::new();
    for a in agents.iter().filter(|a| a.alive) {
        grid.candidates(a, params.phi, &mut candidates);
        homophily_select(a, &mut candidates, params.rho);
        edges.extend(candidates.iter().map(|c| (a.id, c.id)));
    }
    network.add_edges(edges);

    let mut extras = Vec::new();
    let mut s = stream.clone();
    for &id in &pool {
        lambda_extras(id, network.degree(id), params.lambda, &pool, &network, &mut s, &mut extras);
    }
    network.add_edges(extras);
    (network, grid)
}

/// Wires freshly created agents into an existing network using the same
/// candidate / homophily / random-link rules, locally. Returns the edges
/// that were added.
pub fn wire_new_agents(
    network: &mut Network,
    grid: &mut SpatialGrid,
    agents: &[Agent],
    new_ids: &[u32],
    params: &NetworkParams,
    stream: &Stream,
) -> Vec<(u32, u32)> {
    network.ensure_slots(agents.len());
    for &id in new_ids {
        grid.insert(&agents[id as usize]);
    }
    let pool: Vec<u32> = agents.iter().filter(|a| a.alive).map(|a| a.id).collect();

    let mut candidates = Vec::new();
    let mut edges = Vec::new();
    for &id in new_ids {
        let a = &agents[id as usize];
        grid.candidates(a, params.phi, &mut candidates);
        homophily_select(a, &mut candidates, params.rho);
        edges.extend(candidates.iter().map(|c| (id, c.id)));
    }
    let mut added = network.add_edges(edges);

    let mut extras = Vec::new();
    let mut s = stream.clone();
    for &id in new_ids {
        lambda_extras(id, network.degree(id), params.lambda, &pool, network, &mut s, &mut extras);
    }
    added.extend(network.add_edges(extras));
    added
}

/// Average local clustering coefficient over alive agents; nodes with
/// degree below 2 contribute zero.
pub fn average_clustering(network: &Network, alive: &[u32]) -> f64 {
    if alive.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &u in alive {
        let nu = network.neighbors(u);
        let deg = nu.len();
        if deg < 2 {
            continue;
        }
        let mut links = 0usize;
        for &v in nu {
            links += sorted_intersection_count(nu, network.neighbors(v));
        }
        // Each neighbor-neighbor link is seen twice in the sum above.
        total += links as f64 / (deg * (deg - 1)) as f64;
    }
    total / alive.len() as f64
}

fn sorted_intersection_count(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Degree-preserving randomization by double-edge swaps; the standard
/// null model for clustering comparisons.
pub fn rewire_preserving_degrees(network: &Network, seed: u64, passes: usize) -> Network {
    let mut edges = network.edges();
    if edges.len() < 2 {
        return network.clone();
    }
    let mut present: HashSet<(u32, u32)> = edges.iter().copied().collect();
    let mut stream = Stream::new(seed, "rewire");
    let canonical = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };

    let attempts = passes * edges.len();
    for _ in 0..attempts {
        let i = stream.index(edges.len());
        let j = stream.index(edges.len());
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        // Swap to (a, d) and (c, b).
        if a == d || c == b || a == c || b == d {
            continue;
        }
        let e1 = canonical(a, d);
        let e2 = canonical(c, b);
        if present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
    }

    let mut rewired = Network::with_slots(network.adj.len());
    rewired.add_edges(edges);
    rewired
}
