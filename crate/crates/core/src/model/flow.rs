//! Small integer max-flow used for multiset domination and coverage checks.
//!
//! Item multiplicities can be in the millions, so all checks run on the
//! type-level graph with capacities instead of expanding copies.

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: u64,
}

#[derive(Clone, Debug, Default)]
pub struct FlowNet {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNet {
    pub fn new(nodes: usize) -> Self {
        FlowNet {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: u64) {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
    }

    /// Dinic's algorithm; returns the max-flow value.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> u64 {
        let n = self.adj.len();
        let mut total = 0u64;
        loop {
            // BFS level graph
            let mut level = vec![usize::MAX; n];
            level[source] = 0;
            let mut queue = std::collections::VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for &eid in &self.adj[u] {
                    let e = &self.edges[eid];
                    if e.cap > 0 && level[e.to] == usize::MAX {
                        level[e.to] = level[u] + 1;
                        queue.push_back(e.to);
                    }
                }
            }
            if level[sink] == usize::MAX {
                return total;
            }
            let mut it = vec![0usize; n];
            loop {
                let pushed = self.dfs(source, sink, u64::MAX, &level, &mut it);
                if pushed == 0 {
                    break;
                }
                total = total.saturating_add(pushed);
            }
        }
    }

    fn dfs(&mut self, u: usize, sink: usize, limit: u64, level: &[usize], it: &mut [usize]) -> u64 {
        if u == sink {
            return limit;
        }
        while it[u] < self.adj[u].len() {
            let eid = self.adj[u][it[u]];
            let (to, cap) = {
                let e = &self.edges[eid];
                (e.to, e.cap)
            };
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.dfs(to, sink, limit.min(cap), level, it);
                if pushed > 0 {
                    self.edges[eid].cap -= pushed;
                    self.edges[eid ^ 1].cap += pushed;
                    return pushed;
                }
            }
            it[u] += 1;
        }
        0
    }
}

/// Maximum-cardinality bipartite matching (Kuhn), deterministic: left nodes
/// and adjacency are scanned in index order. Returns `match_of_left`.
pub fn bipartite_matching(left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    assert_eq!(adj.len(), left);
    let mut match_left: Vec<Option<usize>> = vec![None; left];
    let mut match_right: Vec<Option<usize>> = vec![None; right];
    for u in 0..left {
        let mut seen = vec![false; right];
        try_kuhn(u, adj, &mut seen, &mut match_left, &mut match_right);
    }
    match_left
}

fn try_kuhn(
    u: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    match_left: &mut [Option<usize>],
    match_right: &mut [Option<usize>],
) -> bool {
    for &v in &adj[u] {
        if !seen[v] {
            seen[v] = true;
            if match_right[v].is_none()
                || try_kuhn(match_right[v].unwrap(), adj, seen, match_left, match_right)
            {
                match_left[u] = Some(v);
                match_right[v] = Some(u);
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_simple_bipartite() {
        // 0 = s, 1..=2 left, 3..=4 right, 5 = t
        let mut net = FlowNet::new(6);
        net.add_edge(0, 1, 2);
        net.add_edge(0, 2, 1);
        net.add_edge(1, 3, 2);
        net.add_edge(2, 4, 1);
        net.add_edge(3, 5, 1);
        net.add_edge(4, 5, 5);
        assert_eq!(net.max_flow(0, 5), 2);
    }

    #[test]
    fn matching_perfect() {
        let adj = vec![vec![0, 1], vec![0]];
        let m = bipartite_matching(2, 2, &adj);
        assert_eq!(m.iter().filter(|x| x.is_some()).count(), 2);
    }
}
