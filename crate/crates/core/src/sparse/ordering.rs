use super::SparseSym;

const LEAF: usize = 64;

struct Graph<'a> {
    row_ptr: &'a [usize],
    col_idx: &'a [usize],
    member: Vec<u32>,
    seen: Vec<u32>,
    stamp: u32,
}

impl Graph<'_> {
    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.col_idx[self.row_ptr[v]..self.row_ptr[v + 1]]
            .iter()
            .copied()
            .filter(move |&w| w != v)
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp += 1;
        self.stamp
    }

    fn mark(&mut self, nodes: &[usize]) -> u32 {
        let s = self.next_stamp();
        for &v in nodes {
            self.member[v] = s;
        }
        s
    }

    /// Breadth-first level sets from `root`, restricted to members with stamp `set`.
    fn levels(&mut self, root: usize, set: u32) -> Vec<Vec<usize>> {
        let s = self.next_stamp();
        self.seen[root] = s;
        let mut levels = vec![vec![root]];
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for w in self.neighbours(v).collect::<Vec<_>>() {
                    if self.member[w] == set && self.seen[w] != s {
                        self.seen[w] = s;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return levels;
            }
            levels.push(next);
        }
    }

    fn components(&mut self, nodes: &[usize], set: u32) -> Vec<Vec<usize>> {
        let s = self.next_stamp();
        let mut comps = Vec::new();
        for &v0 in nodes {
            if self.seen[v0] == s {
                continue;
            }
            self.seen[v0] = s;
            let mut comp = vec![v0];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for w in self.neighbours(v).collect::<Vec<_>>() {
                    if self.member[w] == set && self.seen[w] != s {
                        self.seen[w] = s;
                        comp.push(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    fn degree_in(&self, v: usize, set: u32) -> usize {
        self.neighbours(v)
            .filter(|&w| self.member[w] == set)
            .count()
    }

    fn dissect(&mut self, nodes: Vec<usize>, out: &mut Vec<usize>) {
        if nodes.len() <= LEAF {
            out.extend(nodes);
            return;
        }
        let set = self.mark(&nodes);
        let mut levels = self.levels(nodes[0], set);
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            let comps = self.components(&nodes, set);
            for c in comps {
                self.dissect(c, out);
            }
            return;
        }
        for _ in 0..4 {
            let last = levels.last().unwrap();
            let cand = *last
                .iter()
                .min_by_key(|&&v| self.degree_in(v, set))
                .unwrap();
            let trial = self.levels(cand, set);
            if trial.len() > levels.len() {
                levels = trial;
            } else {
                break;
            }
        }
        if levels.len() < 3 {
            out.extend(nodes);
            return;
        }
        let half = nodes.len() / 2;
        let mut acc = 0;
        let mut split = 1;
        for (l, lv) in levels.iter().enumerate() {
            if acc + lv.len() > half {
                split = l;
                break;
            }
            acc += lv.len();
        }
        let split = split.clamp(1, levels.len() - 2);
        let sep = levels[split].clone();
        let a: Vec<usize> = levels[..split].concat();
        let b: Vec<usize> = levels[split + 1..].concat();
        self.dissect(a, out);
        self.dissect(b, out);
        out.extend(sep);
    }
}

/// Fill-reducing ordering by recursive level-set bisection of the matrix
/// graph. Returns `perm` with `perm[new] = old`.
pub fn nested_dissection(a: &SparseSym) -> Vec<usize> {
    let n = a.dim();
    let (row_ptr, col_idx) = a.pattern();
    let mut g = Graph {
        row_ptr,
        col_idx,
        member: vec![0; n],
        seen: vec![0; n],
        stamp: 0,
    };
    let mut out = Vec::with_capacity(n);
    g.dissect((0..n).collect(), &mut out);
    out
}
