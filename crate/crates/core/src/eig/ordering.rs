//! Fill-reducing nested dissection from breadth-first level structures.

use std::collections::VecDeque;

/// Subgraphs at or below this size are numbered directly.
const LEAF_SIZE: usize = 64;

/// Returns `order` with `order[new] = old`.
pub fn nested_dissection(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut ctx = Ctx {
        adj,
        region: vec![usize::MAX; n],
        level: vec![usize::MAX; n],
        next_region: 0,
        order: Vec::with_capacity(n),
    };
    let all: Vec<usize> = (0..n).collect();
    ctx.dissect(all);
    debug_assert_eq!(ctx.order.len(), n);
    ctx.order
}

struct Ctx<'a> {
    adj: &'a [Vec<usize>],
    region: Vec<usize>,
    level: Vec<usize>,
    next_region: usize,
    order: Vec<usize>,
}

impl Ctx<'_> {
    fn claim(&mut self, verts: &[usize]) -> usize {
        let id = self.next_region;
        self.next_region += 1;
        for &v in verts {
            self.region[v] = id;
        }
        id
    }

    /// BFS inside region `id` from `root`; returns vertices by level.
    fn levels(&mut self, id: usize, root: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let mut seen = Vec::new();
        self.level[root] = 0;
        queue.push_back(root);
        seen.push(root);
        while let Some(v) = queue.pop_front() {
            let l = self.level[v];
            if out.len() <= l {
                out.push(Vec::new());
            }
            out[l].push(v);
            for &w in &self.adj[v] {
                if self.region[w] == id && self.level[w] == usize::MAX {
                    self.level[w] = l + 1;
                    queue.push_back(w);
                    seen.push(w);
                }
            }
        }
        for v in seen {
            self.level[v] = usize::MAX;
        }
        out
    }

    fn dissect(&mut self, verts: Vec<usize>) {
        if verts.len() <= LEAF_SIZE {
            self.order.extend_from_slice(&verts);
            return;
        }
        let id = self.claim(&verts);
        let first = self.levels(id, verts[0]);
        let reached: usize = first.iter().map(Vec::len).sum();
        if reached < verts.len() {
            // Disconnected: handle each component separately.
            let mut rest = Vec::new();
            let mut comp = Vec::with_capacity(reached);
            let in_first: std::collections::HashSet<usize> = first.into_iter().flatten().collect();
            for v in verts {
                if in_first.contains(&v) {
                    comp.push(v);
                } else {
                    rest.push(v);
                }
            }
            self.dissect(comp);
            self.dissect(rest);
            return;
        }
        // Pseudo-peripheral root: restart from a vertex of the last level.
        let mut levels = first;
        for _ in 0..2 {
            let far = *levels.last().and_then(|l| l.last()).expect("nonempty");
            let next = self.levels(id, far);
            if next.len() <= levels.len() {
                break;
            }
            levels = next;
        }
        if levels.len() < 3 {
            self.order.extend_from_slice(&verts);
            return;
        }
        let half = verts.len() / 2;
        let mut acc = 0;
        let mut mid = 1;
        for (i, l) in levels.iter().enumerate() {
            acc += l.len();
            if acc >= half {
                mid = i.clamp(1, levels.len() - 2);
                break;
            }
        }
        // Separator vertices with no neighbour beyond it join the near side.
        let mut beyond = vec![];
        let mut sep = vec![];
        let mut near: Vec<usize> = levels[..mid].iter().flatten().copied().collect();
        let far_id = self.claim(&levels[mid + 1..].iter().flatten().copied().collect::<Vec<_>>());
        for &v in &levels[mid] {
            if self.adj[v].iter().any(|&w| self.region[w] == far_id) {
                sep.push(v);
            } else {
                near.push(v);
            }
        }
        beyond.extend(levels[mid + 1..].iter().flatten().copied());
        self.dissect(near);
        self.dissect(beyond);
        self.order.extend_from_slice(&sep);
    }
}
