//! Single origin/destination traffic assignment over a directed multigraph.
//!
//! Flows live on a fixed set of simple o→d paths; with affine edge costs
//! `c_e(w) = a_e·w + b_e` the total cost `C(x) = Σ_e w_e c_e(w_e)` is a
//! convex quadratic in the path flows and its gradient is the path sum of
//! marginal edge costs `c_e(w) + w·c_e'(w) = 2a_e w + b_e`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::mirror::softmax_into;

/// Default noise volatility per edge.
pub const DEFAULT_EDGE_SIGMA: f64 = 0.25;
/// Default cap on enumerated paths.
pub const DEFAULT_PATH_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("no path from origin to destination")]
    NoPath,
    #[error("flow is not feasible: {0}")]
    Infeasible(String),
    #[error("network file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
}

impl Edge {
    pub fn cost(&self, w: f64) -> f64 {
        self.a * w + self.b
    }

    pub fn marginal_cost(&self, w: f64) -> f64 {
        2.0 * self.a * w + self.b
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub node_count: usize,
    pub edges: Vec<Edge>,
    pub origin: usize,
    pub destination: usize,
    pub demand: f64,
}

impl Network {
    pub fn new(
        node_count: usize,
        edges: Vec<Edge>,
        origin: usize,
        destination: usize,
        demand: f64,
    ) -> Result<Self, TrafficError> {
        let net = Network {
            node_count,
            edges,
            origin,
            destination,
            demand,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<(), TrafficError> {
        let bad = |m: String| Err(TrafficError::Invalid(m));
        if self.origin >= self.node_count || self.destination >= self.node_count {
            return bad("origin/destination out of range".into());
        }
        if self.origin == self.destination {
            return bad("origin equals destination".into());
        }
        if !(self.demand > 0.0 && self.demand.is_finite()) {
            return bad(format!("demand must be > 0, got {}", self.demand));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.src >= self.node_count || e.dst >= self.node_count {
                return bad(format!("edge {i} references a missing node"));
            }
            let ok = |v: f64| v.is_finite() && v >= 0.0;
            if !ok(e.a) || !ok(e.b) || !ok(e.sigma) {
                return bad(format!("edge {i} has negative or non-finite parameters"));
            }
        }
        if !self.reachable() {
            return Err(TrafficError::NoPath);
        }
        Ok(())
    }

    fn reachable(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![self.origin];
        seen[self.origin] = true;
        while let Some(u) = stack.pop() {
            for e in self.edges.iter().filter(|e| e.src == u) {
                if !seen[e.dst] {
                    seen[e.dst] = true;
                    stack.push(e.dst);
                }
            }
        }
        seen[self.destination]
    }

    pub fn edge_sigmas(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.sigma).collect()
    }

    /// Serializes to the plain-text network format.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "nodes {}  od {} {}  demand {}\n",
            self.node_count, self.origin, self.destination, self.demand
        );
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {} {} {}", e.src, e.dst, e.a, e.b, e.sigma);
        }
        s
    }

    /// Parses the network format: a header `nodes N  od o d  demand L` followed
    /// by one `src dst a b sigma` line per edge. Blank lines and `#` comments
    /// are ignored; a missing `sigma` column defaults to 0.25.
    pub fn parse(text: &str) -> Result<Self, TrafficError> {
        let mut header: Option<(usize, usize, usize, f64)> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let perr = |msg: &str| TrafficError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            if header.is_none() {
                if toks.len() != 7 || toks[0] != "nodes" || toks[2] != "od" || toks[5] != "demand" {
                    return Err(perr("expected header `nodes N  od o d  demand L`"));
                }
                let n = toks[1].parse().map_err(|_| perr("bad node count"))?;
                let o = toks[3].parse().map_err(|_| perr("bad origin"))?;
                let d = toks[4].parse().map_err(|_| perr("bad destination"))?;
                let l = toks[6].parse().map_err(|_| perr("bad demand"))?;
                header = Some((n, o, d, l));
                continue;
            }
            if toks.len() != 4 && toks.len() != 5 {
                return Err(perr("expected `src dst a b sigma`"));
            }
            let num = |t: &str| t.parse::<f64>().map_err(|_| perr("bad number"));
            edges.push(Edge {
                src: toks[0].parse().map_err(|_| perr("bad src"))?,
                dst: toks[1].parse().map_err(|_| perr("bad dst"))?,
                a: num(toks[2])?,
                b: num(toks[3])?,
                sigma: if toks.len() == 5 {
                    num(toks[4])?
                } else {
                    DEFAULT_EDGE_SIGMA
                },
            });
        }
        let (n, o, d, l) = header.ok_or(TrafficError::Parse {
            line: 0,
            msg: "empty network file".into(),
        })?;
        Network::new(n, edges, o, d, l)
    }
}

/// Simple o→d paths, each an ordered list of edge indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    pub paths: Vec<Vec<usize>>,
    pub truncated: bool,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Path × edge membership matrix.
    pub fn incidence(&self, edge_count: usize) -> Vec<Vec<bool>> {
        self.paths
            .iter()
            .map(|p| {
                let mut row = vec![false; edge_count];
                for &e in p {
                    row[e] = true;
                }
                row
            })
            .collect()
    }
}

/// Depth-first enumeration of simple o→d paths, exploring outgoing edges
/// in increasing index order, stopping after `cap` paths.
pub fn enumerate_paths(net: &Network, cap: usize) -> Result<PathSet, TrafficError> {
    if cap == 0 {
        return Err(TrafficError::Invalid("path cap must be ≥ 1".into()));
    }
    let mut out_edges = vec![Vec::new(); net.node_count];
    for (i, e) in net.edges.iter().enumerate() {
        out_edges[e.src].push(i);
    }

    struct Search<'a> {
        net: &'a Network,
        out_edges: Vec<Vec<usize>>,
        visited: Vec<bool>,
        stack: Vec<usize>,
        found: Vec<Vec<usize>>,
        limit: usize,
    }

    impl Search<'_> {
        fn dfs(&mut self, node: usize) {
            if self.found.len() >= self.limit {
                return;
            }
            if node == self.net.destination {
                self.found.push(self.stack.clone());
                return;
            }
            self.visited[node] = true;
            for k in 0..self.out_edges[node].len() {
                let e = self.out_edges[node][k];
                let next = self.net.edges[e].dst;
                if self.visited[next] {
                    continue;
                }
                self.stack.push(e);
                self.dfs(next);
                self.stack.pop();
                if self.found.len() >= self.limit {
                    break;
                }
            }
            self.visited[node] = false;
        }
    }

    let mut search = Search {
        net,
        out_edges,
        visited: vec![false; net.node_count],
        stack: Vec::new(),
        found: Vec::new(),
        // one extra path tells us whether the cap actually bit
        limit: cap.saturating_add(1),
    };
    search.dfs(net.origin);
    let mut paths = search.found;
    if paths.is_empty() {
        return Err(TrafficError::NoPath);
    }
    let truncated = paths.len() > cap;
    paths.truncate(cap);
    Ok(PathSet { paths, truncated })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostEval {
    pub loads: Vec<f64>,
    pub total: f64,
    pub marginal: Vec<f64>,
}

/// Edge loads, total cost and per-path marginal costs of a routing flow.
pub fn cost_eval(net: &Network, ps: &PathSet, x: &[f64]) -> Result<CostEval, TrafficError> {
    if x.len() != ps.len() {
        return Err(TrafficError::Infeasible(format!(
            "expected {} path flows, got {}",
            ps.len(),
            x.len()
        )));
    }
    let tol = 1e-9 * net.demand.max(1.0);
    if x.iter().any(|&v| !(v >= -tol)) || (x.iter().sum::<f64>() - net.demand).abs() > tol {
        return Err(TrafficError::Infeasible(
            "flows must be ≥ 0 and sum to the demand".into(),
        ));
    }
    let loads = edge_loads(net, ps, x);
    let total = loads.iter().zip(&net.edges).map(|(&w, e)| w * e.cost(w)).sum();
    let marginal = path_marginals(net, ps, &loads);
    Ok(CostEval { loads, total, marginal })
}

fn edge_loads(net: &Network, ps: &PathSet, x: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; net.edges.len()];
    for (p, &xp) in ps.paths.iter().zip(x) {
        for &e in p {
            w[e] += xp;
        }
    }
    w
}

fn path_marginals(net: &Network, ps: &PathSet, loads: &[f64]) -> Vec<f64> {
    ps.paths
        .iter()
        .map(|p| p.iter().map(|&e| net.edges[e].marginal_cost(loads[e])).sum())
        .collect()
}

/// Path covariance `Σ_{pq} = Σ_{e ∈ p∩q} σ_e²`, computed in factored form
/// `(B)(B)ᵀ` with `B = incidence · diag(σ)`.
pub fn path_covariance(net: &Network, ps: &PathSet, sigma_e: &[f64]) -> Result<Matrix, TrafficError> {
    if sigma_e.len() != net.edges.len() {
        return Err(TrafficError::Invalid(format!(
            "expected {} edge volatilities, got {}",
            net.edges.len(),
            sigma_e.len()
        )));
    }
    if sigma_e.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
        return Err(TrafficError::Invalid("edge volatilities must be ≥ 0".into()));
    }
    Ok(path_volatility(ps, sigma_e).gram())
}

/// `B = incidence · diag(σ)`, the paths × edges volatility matrix.
pub fn path_volatility(ps: &PathSet, sigma_e: &[f64]) -> Matrix {
    let mut b = Matrix::zeros(ps.len(), sigma_e.len());
    for (i, p) in ps.paths.iter().enumerate() {
        for &e in p {
            b[(i, e)] = sigma_e[e];
        }
    }
    b
}

/// Random connected network: a shuffled spanning path from node 0 to node
/// `nodes − 1` plus `extra_edges` random edges. Edge parameters `a_e`, `b_e`
/// are uniform on (0,1); volatilities are 0.25; demand is 1.
pub fn random_network(nodes: usize, extra_edges: usize, seed: u64) -> Result<Network, TrafficError> {
    if nodes < 2 {
        return Err(TrafficError::Invalid("random network needs ≥ 2 nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut open_unit = || loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            return v;
        }
    };
    let mut middle: Vec<usize> = (1..nodes - 1).collect();
    // Fisher–Yates with the same generator keeps everything seed-determined.
    let mut spine_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for i in (1..middle.len()).rev() {
        let j = spine_rng.random_range(0..=i);
        middle.swap(i, j);
    }
    let mut spine = vec![0];
    spine.extend(middle);
    spine.push(nodes - 1);

    let mut edges = Vec::with_capacity(nodes - 1 + extra_edges);
    for w in spine.windows(2) {
        edges.push(Edge {
            src: w[0],
            dst: w[1],
            a: open_unit(),
            b: open_unit(),
            sigma: DEFAULT_EDGE_SIGMA,
        });
    }
    for _ in 0..extra_edges {
        // no edges out of the destination or into the origin: they lie on no simple path
        let src = spine_rng.random_range(0..nodes - 1);
        let mut dst = spine_rng.random_range(1..nodes);
        while dst == src {
            dst = spine_rng.random_range(1..nodes);
        }
        edges.push(Edge {
            src,
            dst,
            a: open_unit(),
            b: open_unit(),
            sigma: DEFAULT_EDGE_SIGMA,
        });
    }
    Network::new(nodes, edges, 0, nodes - 1, 1.0)
}

/// A network together with the path set its flows are expressed on.
#[derive(Clone, Debug)]
pub struct TrafficModel {
    pub network: Network,
    pub paths: PathSet,
}

impl TrafficModel {
    pub fn new(network: Network, cap: usize) -> Result<Self, TrafficError> {
        let paths = enumerate_paths(&network, cap)?;
        Ok(TrafficModel { network, paths })
    }

    /// Total cost, writing the marginal path costs into `grad`. Unchecked.
    pub fn cost_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let loads = edge_loads(&self.network, &self.paths, x);
        for (g, p) in grad.iter_mut().zip(&self.paths.paths) {
            *g = p.iter().map(|&e| self.network.edges[e].marginal_cost(loads[e])).sum();
        }
        loads.iter().zip(&self.network.edges).map(|(&w, e)| w * e.cost(w)).sum()
    }

    pub fn path_covariance(&self) -> Matrix {
        path_volatility(&self.paths, &self.network.edge_sigmas()).gram()
    }
}

#[derive(Clone, Debug)]
pub struct SocialOptimum {
    pub flow: Vec<f64>,
    pub cost: f64,
    /// Spread of marginal costs over paths carrying at least 1e−6 of the demand.
    pub support_spread: f64,
    /// Frank–Wolfe gap `Σ_p x_p (c̃_p − min c̃)`, an upper bound on `C(x) − C*`.
    pub duality_gap: f64,
    pub iterations: usize,
    pub certified: bool,
}

/// Tolerance on marginal-cost equalization across support paths.
pub const OPTIMUM_TOL: f64 = 1e-6;

/// Socially optimal flow by deterministic entropic mirror descent, run until
/// the marginal costs of the support paths agree within [`OPTIMUM_TOL`] and
/// the Frank–Wolfe gap is below 1e−11.
pub fn social_optimum(model: &TrafficModel, max_iterations: usize) -> SocialOptimum {
    let net = &model.network;
    let ps = &model.paths;
    let n = ps.len();
    let lambda = net.demand;
    // Step from the largest Hessian row sum `max_p Σ_q Σ_{e∈p∩q} 2a_e`.
    let mut hess_bound: f64 = 0.0;
    for p in &ps.paths {
        let row: f64 = ps
            .paths
            .iter()
            .map(|q| {
                p.iter()
                    .filter(|e| q.contains(e))
                    .map(|&e| 2.0 * net.edges[e].a)
                    .sum::<f64>()
            })
            .sum();
        hess_bound = hess_bound.max(row);
    }
    let step = 1.0 / (lambda * hess_bound.max(1e-12));

    let mut z = vec![0.0; n];
    let mut x = vec![lambda / n as f64; n];
    let mut grad = vec![0.0; n];
    let mut iterations = 0;
    let mut cost;
    loop {
        cost = model.cost_into(&x, &mut grad);
        let min_g = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        let gap: f64 = x.iter().zip(&grad).map(|(xp, g)| xp * (g - min_g)).sum();
        let spread = support_spread(&x, &grad, lambda);
        if (spread <= OPTIMUM_TOL && gap <= 1e-11) || iterations >= max_iterations {
            return SocialOptimum {
                flow: x,
                cost,
                support_spread: spread,
                duality_gap: gap,
                iterations,
                certified: spread <= OPTIMUM_TOL,
            };
        }
        for (zi, g) in z.iter_mut().zip(&grad) {
            *zi -= step * g;
        }
        softmax_into(&z, lambda, &mut x);
        iterations += 1;
    }
}

fn support_spread(x: &[f64], grad: &[f64], lambda: f64) -> f64 {
    let min_all = grad.iter().cloned().fold(f64::INFINITY, f64::min);
    x.iter()
        .zip(grad)
        .filter(|(&xp, _)| xp >= 1e-6 * lambda)
        .map(|(_, &g)| g - min_all)
        .fold(0.0, f64::max)
}
