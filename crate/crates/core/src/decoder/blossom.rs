//! Maximum-weight matching on general graphs (Edmonds' blossom algorithm with
//! dual variables, O(n³)), following the classic primal-dual formulation of
//! Galil's survey. Integer weights keep every dual update exact.

const NONE: usize = usize::MAX;

struct State<'a> {
    edges: &'a [(usize, usize, i64)],
    n: usize,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl<'a> State<'a> {
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.n {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.leaves(t, out);
            }
        }
    }

    fn leaves_of(&self, b: usize) -> Vec<usize> {
        let mut v = Vec::new();
        self.leaves(b, &mut v);
        v
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves_of(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            let m = self.mate[base];
            debug_assert!(m != NONE);
            self.assign_label(self.endpoint[m], 1, m ^ 1);
        }
    }

    /// Trace back from `v` and `w` to find a new blossom's base or an augmenting path.
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots available");
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for v in self.leaves_of(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        let mut bestedgeto = vec![NONE; 2 * self.n];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => self
                    .leaves_of(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for &k in &list {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossombestedges[b] = Some(list);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves_of(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).expect("entry child") as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 != 0 {
                j -= len as isize;
                (1, 0)
            } else {
                (-1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let q = self.endpoint[p ^ 1];
                self.label[q] = 0;
                let e = endps[wrap(j - endptrick as isize, len)];
                self.label[self.endpoint[e ^ endptrick ^ 1]] = 0;
                self.assign_label(q, 2, p);
                self.allowedge[e / 2] = true;
                j += jstep;
                p = endps[wrap(j - endptrick as isize, len)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[wrap(j, len)];
            let q = self.endpoint[p ^ 1];
            self.label[q] = 2;
            self.label[bv] = 2;
            self.labelend[q] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[wrap(j, len)] != entrychild {
                let bv = childs[wrap(j, len)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.leaves_of(bv);
                let v = leaves.iter().copied().find(|&v| self.label[v] != 0).unwrap_or(*leaves.last().expect("leaf"));
                if self.label[v] != 0 {
                    debug_assert_eq!(self.label[v], 2);
                    self.label[v] = 0;
                    let m = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[m]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = u8::MAX;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len();
        let i = self.blossomchilds[b].iter().position(|&c| c == t).expect("child");
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 != 0 {
            j -= len as isize;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            let p = self.blossomendps[b][wrap(j - endptrick as isize, len)] ^ endptrick;
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }
}

/// Maximum-weight matching of the graph with the given `(u, v, weight)` edges
/// on vertices `0..n`. With `max_cardinality`, the maximum weight is taken over
/// maximum-cardinality matchings only. Returns each vertex's mate.
pub fn max_weight_matching(n: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Vec<Option<usize>> {
    if edges.is_empty() || n == 0 {
        return vec![None; n];
    }
    let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
    let mut endpoint = Vec::with_capacity(2 * edges.len());
    let mut neighbend = vec![Vec::new(); n];
    for (k, &(i, j, _)) in edges.iter().enumerate() {
        assert!(i < n && j < n && i != j, "bad edge ({i}, {j})");
        endpoint.push(i);
        endpoint.push(j);
        neighbend[i].push(2 * k + 1);
        neighbend[j].push(2 * k);
    }
    let mut st = State {
        edges,
        n,
        endpoint,
        neighbend,
        mate: vec![NONE; n],
        label: vec![0; 2 * n],
        labelend: vec![NONE; 2 * n],
        inblossom: (0..n).collect(),
        blossomparent: vec![NONE; 2 * n],
        blossomchilds: vec![Vec::new(); 2 * n],
        blossombase: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
        blossomendps: vec![Vec::new(); 2 * n],
        bestedge: vec![NONE; 2 * n],
        blossombestedges: vec![None; 2 * n],
        unusedblossoms: (n..2 * n).rev().collect(),
        dualvar: std::iter::repeat_n(maxweight, n).chain(std::iter::repeat_n(0, n)).collect(),
        allowedge: vec![false; edges.len()],
        queue: Vec::new(),
    };

    for _ in 0..n {
        st.label.iter_mut().for_each(|l| *l = 0);
        st.bestedge.iter_mut().for_each(|e| *e = NONE);
        for b in n..2 * n {
            st.blossombestedges[b] = None;
        }
        st.allowedge.iter_mut().for_each(|a| *a = false);
        st.queue.clear();
        for v in 0..n {
            if st.mate[v] == NONE && st.label[st.inblossom[v]] == 0 {
                st.assign_label(v, 1, NONE);
            }
        }
        let mut augmented = false;
        loop {
            while let Some(v) = (!augmented).then(|| st.queue.pop()).flatten() {
                debug_assert_eq!(st.label[st.inblossom[v]], 1);
                for idx in 0..st.neighbend[v].len() {
                    let p = st.neighbend[v][idx];
                    let k = p / 2;
                    let w = st.endpoint[p];
                    if st.inblossom[v] == st.inblossom[w] {
                        continue;
                    }
                    let mut kslack = 0;
                    if !st.allowedge[k] {
                        kslack = st.slack(k);
                        if kslack <= 0 {
                            st.allowedge[k] = true;
                        }
                    }
                    if st.allowedge[k] {
                        if st.label[st.inblossom[w]] == 0 {
                            st.assign_label(w, 2, p ^ 1);
                        } else if st.label[st.inblossom[w]] == 1 {
                            let base = st.scan_blossom(v, w);
                            if base != NONE {
                                st.add_blossom(base, k);
                            } else {
                                st.augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if st.label[w] == 0 {
                            debug_assert_eq!(st.label[st.inblossom[w]], 2);
                            st.label[w] = 2;
                            st.labelend[w] = p ^ 1;
                        }
                    } else if st.label[st.inblossom[w]] == 1 {
                        let b = st.inblossom[v];
                        if st.bestedge[b] == NONE || kslack < st.slack(st.bestedge[b]) {
                            st.bestedge[b] = k;
                        }
                    } else if st.label[w] == 0
                        && (st.bestedge[w] == NONE || kslack < st.slack(st.bestedge[w]))
                    {
                        st.bestedge[w] = k;
                    }
                }
            }
            if augmented {
                break;
            }

            // Dual adjustment.
            let mut deltatype = 0u8;
            let mut delta = 0i64;
            let mut deltaedge = NONE;
            let mut deltablossom = NONE;
            if !max_cardinality {
                deltatype = 1;
                delta = st.dualvar[..n].iter().copied().min().expect("nonempty");
            }
            for v in 0..n {
                if st.label[st.inblossom[v]] == 0 && st.bestedge[v] != NONE {
                    let d = st.slack(st.bestedge[v]);
                    if deltatype == 0 || d < delta {
                        delta = d;
                        deltatype = 2;
                        deltaedge = st.bestedge[v];
                    }
                }
            }
            for b in 0..2 * n {
                if st.blossomparent[b] == NONE && st.label[b] == 1 && st.bestedge[b] != NONE {
                    let kslack = st.slack(st.bestedge[b]);
                    debug_assert_eq!(kslack % 2, 0);
                    let d = kslack / 2;
                    if deltatype == 0 || d < delta {
                        delta = d;
                        deltatype = 3;
                        deltaedge = st.bestedge[b];
                    }
                }
            }
            for b in n..2 * n {
                if st.blossombase[b] != NONE
                    && st.blossomparent[b] == NONE
                    && st.label[b] == 2
                    && (deltatype == 0 || st.dualvar[b] < delta)
                {
                    delta = st.dualvar[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if deltatype == 0 {
                debug_assert!(max_cardinality);
                deltatype = 1;
                delta = st.dualvar[..n].iter().copied().min().expect("nonempty").max(0);
            }
            for v in 0..n {
                match st.label[st.inblossom[v]] {
                    1 => st.dualvar[v] -= delta,
                    2 => st.dualvar[v] += delta,
                    _ => {}
                }
            }
            for b in n..2 * n {
                if st.blossombase[b] != NONE && st.blossomparent[b] == NONE {
                    match st.label[b] {
                        1 => st.dualvar[b] += delta,
                        2 => st.dualvar[b] -= delta,
                        _ => {}
                    }
                }
            }
            match deltatype {
                1 => break,
                2 => {
                    st.allowedge[deltaedge] = true;
                    let (mut i, j, _) = st.edges[deltaedge];
                    if st.label[st.inblossom[i]] == 0 {
                        i = j;
                    }
                    st.queue.push(i);
                }
                3 => {
                    st.allowedge[deltaedge] = true;
                    let (i, _, _) = st.edges[deltaedge];
                    st.queue.push(i);
                }
                _ => st.expand_blossom(deltablossom, false),
            }
        }
        if !augmented {
            break;
        }
        for b in n..2 * n {
            if st.blossomparent[b] == NONE && st.blossombase[b] != NONE && st.label[b] == 1 && st.dualvar[b] == 0 {
                st.expand_blossom(b, true);
            }
        }
    }
    st.mate.iter().map(|&p| (p != NONE).then(|| st.endpoint[p])).collect()
}

/// Minimum-weight perfect matching on `0..n`; `None` if no perfect matching exists.
pub fn min_weight_perfect_matching(n: usize, edges: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
    if n == 0 {
        return Some(Vec::new());
    }
    if n % 2 == 1 {
        return None;
    }
    let top = edges.iter().map(|e| e.2).max().unwrap_or(0) + 1;
    // Doubling keeps the dual variables integral.
    let flipped: Vec<(usize, usize, i64)> = edges.iter().map(|&(u, v, w)| (u, v, 2 * (top - w))).collect();
    let mates = max_weight_matching(n, &flipped, true);
    mates.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn weight(mates: &[Option<usize>], edges: &[(usize, usize, i64)]) -> i64 {
        edges
            .iter()
            .filter(|&&(u, v, _)| mates[u] == Some(v))
            .map(|e| e.2)
            .sum()
    }

    /// Exhaustive maximum-weight matching (optionally over maximum cardinality).
    fn brute(n: usize, edges: &[(usize, usize, i64)], maxcard: bool) -> (usize, i64) {
        fn rec(k: usize, used: &mut Vec<bool>, edges: &[(usize, usize, i64)], card: usize, w: i64, best: &mut Vec<(usize, i64)>) {
            if k == edges.len() {
                best.push((card, w));
                return;
            }
            rec(k + 1, used, edges, card, w, best);
            let (u, v, x) = edges[k];
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                rec(k + 1, used, edges, card + 1, w + x, best);
                used[u] = false;
                used[v] = false;
            }
        }
        let mut all = Vec::new();
        rec(0, &mut vec![false; n], edges, 0, 0, &mut all);
        if maxcard {
            all.into_iter().max().unwrap()
        } else {
            (0, all.into_iter().map(|x| x.1).max().unwrap())
        }
    }

    #[test]
    fn small_known_cases() {
        assert_eq!(max_weight_matching(2, &[(0, 1, 1)], false), vec![Some(1), Some(0)]);
        let m = max_weight_matching(4, &[(1, 2, 10), (2, 3, 11)], false);
        assert_eq!(m, vec![None, None, Some(3), Some(2)]);
        let m = max_weight_matching(4, &[(0, 1, 2), (0, 2, 2), (1, 2, 3), (1, 3, 2)], true);
        assert_eq!(m, vec![Some(2), Some(3), Some(0), Some(1)]);
    }

    #[test]
    fn blossom_with_augmentation_through_it() {
        // S-blossom (1,2,3) then augment via 3-4 and 1-6... classic case.
        let edges = [(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)];
        let m = max_weight_matching(7, &edges, false);
        assert_eq!(m, vec![None, Some(6), Some(3), Some(2), Some(5), Some(4), Some(1)]);
    }

    #[test]
    fn nested_and_expanding_blossoms() {
        let edges = [(1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50), (1, 6, 30), (3, 9, 35), (4, 8, 28), (5, 7, 26), (9, 10, 5)];
        let m = max_weight_matching(11, &edges, false);
        assert_eq!(m, vec![None, Some(6), Some(3), Some(2), Some(8), Some(7), Some(1), Some(5), Some(4), Some(10), Some(9)]);
        let edges = [(1, 2, 40), (1, 3, 40), (2, 3, 60), (2, 4, 55), (3, 5, 55), (4, 5, 50), (1, 8, 15), (5, 7, 30), (7, 6, 10), (8, 10, 10), (4, 9, 30)];
        let m = max_weight_matching(11, &edges, false);
        assert_eq!(m, vec![None, Some(2), Some(1), Some(5), Some(9), Some(3), Some(7), Some(6), Some(10), Some(4), Some(8)]);
    }

    #[test]
    fn random_graphs_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..400 {
            let n = rng.random_range(2..9);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random::<f64>() < 0.6 {
                        edges.push((u, v, rng.random_range(1..20)));
                    }
                }
            }
            if edges.is_empty() || edges.len() > 18 {
                continue;
            }
            for maxcard in [false, true] {
                let m = max_weight_matching(n, &edges, maxcard);
                for (v, &x) in m.iter().enumerate() {
                    if let Some(u) = x {
                        assert_eq!(m[u], Some(v));
                    }
                }
                let card = m.iter().flatten().count() / 2;
                let (bc, bw) = brute(n, &edges, maxcard);
                if maxcard {
                    assert_eq!(card, bc, "trial {trial}");
                }
                assert_eq!(weight(&m, &edges), bw, "trial {trial} maxcard {maxcard}");
            }
        }
    }

    #[test]
    fn min_weight_perfect_on_complete_graph() {
        let edges = [(0, 1, 5), (0, 2, 1), (0, 3, 4), (1, 2, 4), (1, 3, 1), (2, 3, 5)];
        let m = min_weight_perfect_matching(4, &edges).unwrap();
        assert_eq!(m, vec![2, 3, 0, 1]);
        assert!(min_weight_perfect_matching(3, &[(0, 1, 1)]).is_none());
        assert!(min_weight_perfect_matching(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).is_none());
    }
}
