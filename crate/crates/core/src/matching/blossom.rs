// Weighted maximum matching in general graphs.
//
// A Rust port of Joris van Rantwijk's primal-dual blossom implementation
// (http://jorisvr.nl/article/maximum-matching), itself following Galil's
// survey "Efficient Algorithms for Finding Maximum Matching in Graphs"
// (ACM Computing Surveys, 1986), with ideas from Gabow's thesis. Runs in
// O(n^3) time. Integer weights keep all dual arithmetic exact.
//
// Vertex duals are stored doubled: the slack of edge (i, j) is
// `dual[i] + dual[j] - 2 w(i, j)`, and a blossom `b` adds `2 dual[b]` to the
// slack of every edge with both ends inside it.

use alloc::vec;
use alloc::vec::Vec;

const NONE: usize = usize::MAX;

/// Matching plus the final dual solution, which certifies optimality.
#[derive(Debug, Clone)]
pub struct BlossomSolution {
    /// `mate[v]` is the partner of `v`, or `None`.
    pub mate: Vec<Option<usize>>,
    nvertex: usize,
    dual: Vec<i64>,
    parent: Vec<usize>,
}

impl BlossomSolution {
    pub fn is_perfect(&self) -> bool {
        self.mate.iter().all(Option::is_some)
    }

    /// Blossoms containing `v`, outermost first, with their doubled duals.
    fn chain(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut b = self.parent[v];
        while b != NONE {
            out.push(b);
            b = self.parent[b];
        }
        out.reverse();
        out
    }

    /// A reusable slack evaluator for arbitrary vertex pairs, including pairs
    /// that were not edges of the solved graph.
    pub fn certificate(&self) -> DualCertificate {
        let chains: Vec<Vec<usize>> = (0..self.nvertex).map(|v| self.chain(v)).collect();
        let prefix: Vec<Vec<i64>> = chains
            .iter()
            .map(|c| {
                let mut acc = 0i64;
                c.iter()
                    .map(|&b| {
                        acc += 2 * self.dual[b];
                        acc
                    })
                    .collect()
            })
            .collect();
        DualCertificate {
            vertex_dual: self.dual[..self.nvertex].to_vec(),
            chains,
            prefix,
        }
    }
}

pub struct DualCertificate {
    vertex_dual: Vec<i64>,
    chains: Vec<Vec<usize>>,
    prefix: Vec<Vec<i64>>,
}

impl DualCertificate {
    /// Reduced cost of the pair `(i, j)` with weight `w`; optimality over a
    /// larger edge set requires this to be non-negative for every pair.
    #[inline]
    pub fn slack(&self, i: usize, j: usize, w: i64) -> i64 {
        let mut s = self.vertex_dual[i] + self.vertex_dual[j] - 2 * w;
        let (ci, cj) = (&self.chains[i], &self.chains[j]);
        let common = ci.iter().zip(cj).take_while(|(a, b)| a == b).count();
        if common > 0 {
            s += self.prefix[i][common - 1];
        }
        s
    }
}

/// Maximum-weight matching of the graph on `nvertex` vertices with integer
/// `edges` `(i, j, w)`. With `max_cardinality`, only maximum-cardinality
/// matchings are considered.
pub fn max_weight_matching(nvertex: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> BlossomSolution {
    if edges.is_empty() {
        return BlossomSolution {
            mate: vec![None; nvertex],
            nvertex,
            dual: vec![0; 2 * nvertex],
            parent: vec![NONE; 2 * nvertex],
        };
    }
    let mut s = State::new(nvertex, edges, max_cardinality);
    s.solve();
    let mate = (0..nvertex)
        .map(|v| (s.mate[v] != NONE).then(|| s.endpoint[s.mate[v]]))
        .collect();
    BlossomSolution {
        mate,
        nvertex,
        dual: s.dualvar,
        parent: s.blossomparent,
    }
}

struct State<'a> {
    nvertex: usize,
    edges: &'a [(usize, usize, i64)],
    max_cardinality: bool,
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
    leaves: Vec<usize>,
}

/// Python-style indexing with negative offsets from the end.
#[inline]
fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl<'a> State<'a> {
    fn new(nvertex: usize, edges: &'a [(usize, usize, i64)], max_cardinality: bool) -> Self {
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        for &(i, j, _) in edges {
            endpoint.push(i);
            endpoint.push(j);
        }
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(core::iter::repeat(0).take(nvertex));
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(core::iter::repeat(NONE).take(nvertex));
        State {
            nvertex,
            edges,
            max_cardinality,
            endpoint,
            neighbend,
            mate: vec![NONE; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NONE; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NONE; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NONE; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).rev().collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
            leaves: Vec::new(),
        }
    }

    #[inline]
    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    /// Leaf vertices of blossom `b`, appended to `out`.
    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nvertex {
            out.push(b);
            return;
        }
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.nvertex {
                out.push(t);
            } else {
                // reversed so leaves come out in child order
                stack.extend(self.blossomchilds[t].iter().rev());
            }
        }
    }

    fn leaves_of(&mut self, b: usize) -> Vec<usize> {
        let mut out = core::mem::take(&mut self.leaves);
        out.clear();
        self.blossom_leaves(b, &mut out);
        out
    }

    fn give_back(&mut self, v: Vec<usize>) {
        self.leaves = v;
    }

    /// Labels the top-level blossom containing `w` with `t`, reached through
    /// endpoint `p`. A T-label propagates an S-label to the mate of the base.
    fn assign_label(&mut self, mut w: usize, mut t: u8, mut p: usize) {
        loop {
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
                self.queue.extend_from_slice(&leaves);
                self.give_back(leaves);
                return;
            }
            let base = self.blossombase[b];
            let m = self.mate[base];
            debug_assert!(m != NONE);
            w = self.endpoint[m];
            t = 1;
            p = m ^ 1;
        }
    }

    /// Traces back from `v` and `w` to find a new blossom's base, or `NONE`
    /// when the two paths end at distinct free vertices (augmenting path).
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
                core::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Contracts the odd cycle closed by edge `k` into a new S-blossom.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots exhausted");
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
        let leaves = self.leaves_of(b);
        for &lv in &leaves {
            if self.label[self.inblossom[lv]] == 2 {
                self.queue.push(lv);
            }
            self.inblossom[lv] = b;
        }
        self.give_back(leaves);

        // Least-slack edges from the new blossom to each neighbouring S-blossom.
        let mut bestedgeto = vec![NONE; 2 * self.nvertex];
        let mut scratch = Vec::new();
        for &sub in &path {
            let consider = |k: usize, s: &Self, bestedgeto: &mut Vec<usize>| {
                let (mut i, mut j, _) = s.edges[k];
                if s.inblossom[j] == b {
                    core::mem::swap(&mut i, &mut j);
                }
                let _ = i;
                let bj = s.inblossom[j];
                if bj != b
                    && s.label[bj] == 1
                    && (bestedgeto[bj] == NONE || s.slack(k) < s.slack(bestedgeto[bj]))
                {
                    bestedgeto[bj] = k;
                }
            };
            match self.blossombestedges[sub].take() {
                None => {
                    scratch.clear();
                    self.blossom_leaves(sub, &mut scratch);
                    for &lv in &scratch {
                        for &p in &self.neighbend[lv] {
                            consider(p / 2, self, &mut bestedgeto);
                        }
                    }
                }
                Some(list) => {
                    for &k in &list {
                        consider(k, self, &mut bestedgeto);
                    }
                }
            }
            self.bestedge[sub] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        let mut best = NONE;
        for &k in &list {
            if best == NONE || self.slack(k) < self.slack(best) {
                best = k;
            }
        }
        self.blossombestedges[b] = Some(list);
        self.bestedge[b] = best;
    }

    /// Undoes blossom `b`, relabelling its children when it was a T-blossom
    /// in the middle of a stage.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                let leaves = self.leaves_of(s);
                for &v in &leaves {
                    self.inblossom[v] = s;
                }
                self.give_back(leaves);
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).expect("entry child") as isize;
            let (jstep, endptrick): (isize, isize) = if j & 1 == 1 {
                j -= len as isize;
                (1, 0)
            } else {
                (-1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let ep = |j: isize| endps[wrap(j - endptrick, len)];
            let mut p = self.labelend[b];
            while j != 0 {
                let q = self.endpoint[p ^ 1];
                self.label[q] = 0;
                let r = self.endpoint[ep(j) ^ endptrick as usize ^ 1];
                self.label[r] = 0;
                self.assign_label(q, 2, p);
                self.allowedge[ep(j) / 2] = true;
                j += jstep;
                p = ep(j) ^ endptrick as usize;
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
                let found = leaves.iter().copied().find(|&v| self.label[v] != 0);
                self.give_back(leaves);
                if let Some(v) = found {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let m = self.endpoint[self.mate[self.blossombase[bv]]];
                    self.label[m] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        self.unusedblossoms.push(b);
    }

    /// Swaps matched and unmatched edges along the even path inside `b`
    /// from vertex `v` to the base, making `v` the new base.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len();
        let i = self.blossomchilds[b].iter().position(|&c| c == t).expect("child");
        let mut j = i as isize;
        let (jstep, endptrick): (isize, isize) = if i & 1 == 1 {
            j -= len as isize;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            let p = self.blossomendps[b][wrap(j - endptrick, len)] ^ endptrick as usize;
            if t >= self.nvertex {
                let e = self.endpoint[p];
                self.augment_blossom(t, e);
            }
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            if t >= self.nvertex {
                let e = self.endpoint[p ^ 1];
                self.augment_blossom(t, e);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    /// Flips the augmenting path through edge `k`.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.nvertex {
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
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        let n = self.nvertex;
        for _stage in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NONE);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let mut idx = 0;
                    while idx < self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        idx += 1;
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            let bw = self.inblossom[w];
                            if self.label[bw] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[bw] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[bw], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                    if augmented {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path with the current duals: pick the dual step.
                let mut deltatype = 0u8;
                let mut delta = 0i64;
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if !self.max_cardinality {
                    deltatype = 1;
                    delta = *self.dualvar[..n].iter().min().expect("non-empty");
                }
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NONE {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NONE && self.label[b] == 1 && self.bestedge[b] != NONE {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE
                        && self.blossomparent[b] == NONE
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // max-cardinality mode and no further progress possible
                    deltatype = 1;
                    delta = (*self.dualvar[..n].iter().min().expect("non-empty")).max(0);
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NONE && self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }
            if !augmented {
                break;
            }
            // End of stage: expand S-blossoms whose dual dropped to zero.
            for b in n..2 * n {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn mates(n: usize, edges: &[(usize, usize, i64)], maxcard: bool) -> Vec<Option<usize>> {
        max_weight_matching(n, edges, maxcard).mate
    }

    fn m(v: &[i64]) -> Vec<Option<usize>> {
        v.iter().map(|&x| (x >= 0).then_some(x as usize)).collect()
    }

    #[test]
    fn small_graphs() {
        assert_eq!(mates(0, &[], false), vec![]);
        assert_eq!(mates(2, &[(0, 1, 1)], false), m(&[1, 0]));
        assert_eq!(mates(4, &[(1, 2, 10), (2, 3, 11)], false), m(&[-1, -1, 3, 2]));
        assert_eq!(mates(5, &[(1, 2, 5), (2, 3, 11), (3, 4, 5)], false), m(&[-1, -1, 3, 2, -1]));
        assert_eq!(mates(5, &[(1, 2, 5), (2, 3, 11), (3, 4, 5)], true), m(&[-1, 2, 1, 4, 3]));
    }

    // Blossom creation, relabelling and expansion cases from the reference
    // implementation's test suite.
    #[test]
    fn blossom_cases() {
        let cases: &[(&[(usize, usize, i64)], &[i64])] = &[
            (&[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)], &[-1, 2, 1, 4, 3]),
            (
                &[(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)],
                &[-1, 6, 3, 2, 5, 4, 1],
            ),
            (
                &[(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)],
                &[-1, 6, 3, 2, 5, 4, 1],
            ),
            (
                &[(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)],
                &[-1, 3, 4, 1, 2, 6, 5],
            ),
            (
                &[(1, 2, 10), (1, 7, 10), (2, 3, 12), (3, 4, 20), (3, 5, 20), (4, 5, 25), (5, 6, 10), (6, 7, 10), (7, 8, 8)],
                &[-1, 2, 1, 4, 3, 6, 5, 8, 7],
            ),
            (
                &[(1, 2, 8), (1, 3, 8), (2, 3, 10), (2, 4, 12), (3, 5, 12), (4, 5, 14), (4, 6, 12), (5, 7, 12), (6, 7, 14), (7, 8, 12)],
                &[-1, 2, 1, 5, 6, 3, 4, 8, 7],
            ),
            (
                &[(1, 2, 23), (1, 5, 22), (1, 6, 15), (2, 3, 25), (3, 4, 22), (4, 5, 25), (4, 8, 14), (5, 7, 13)],
                &[-1, 6, 3, 2, 8, 7, 1, 5, 4],
            ),
            (
                &[(1, 2, 19), (1, 3, 20), (1, 8, 8), (2, 3, 25), (2, 4, 18), (3, 5, 18), (4, 5, 13), (4, 7, 7), (5, 6, 7)],
                &[-1, 8, 3, 2, 7, 6, 5, 4, 1],
            ),
            (
                &[(1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50), (1, 6, 30), (3, 9, 35), (4, 8, 35), (5, 7, 26), (9, 10, 5)],
                &[-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9],
            ),
            (
                &[(1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50), (1, 6, 30), (3, 9, 35), (4, 8, 26), (5, 7, 40), (9, 10, 5)],
                &[-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9],
            ),
            (
                &[(1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50), (1, 6, 30), (3, 9, 35), (4, 8, 28), (5, 7, 26), (9, 10, 5)],
                &[-1, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9],
            ),
            (
                &[(1, 2, 45), (1, 7, 45), (2, 3, 50), (3, 4, 45), (4, 5, 95), (4, 6, 94), (5, 6, 94), (6, 7, 50), (1, 8, 30), (3, 11, 35), (5, 9, 36), (7, 10, 26), (11, 12, 5)],
                &[-1, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11],
            ),
            (
                &[(1, 2, 40), (1, 3, 40), (2, 3, 60), (2, 4, 55), (3, 5, 55), (4, 5, 50), (1, 8, 15), (5, 7, 30), (7, 6, 10), (8, 10, 10), (4, 9, 30)],
                &[-1, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8],
            ),
        ];
        for (edges, expected) in cases {
            assert_eq!(mates(expected.len(), edges, false), m(expected), "{edges:?}");
        }
    }

    /// Exhaustive best `(cardinality, weight)` or `weight` over all matchings.
    fn brute_best(n: usize, edges: &[(usize, usize, i64)], maxcard: bool) -> (usize, i64) {
        fn rec(k: usize, edges: &[(usize, usize, i64)], used: &mut [bool], card: usize, w: i64, best: &mut Vec<(usize, i64)>) {
            if k == edges.len() {
                best.push((card, w));
                return;
            }
            rec(k + 1, edges, used, card, w, best);
            let (i, j, wt) = edges[k];
            if !used[i] && !used[j] {
                used[i] = true;
                used[j] = true;
                rec(k + 1, edges, used, card + 1, w + wt, best);
                used[i] = false;
                used[j] = false;
            }
        }
        let mut all = Vec::new();
        rec(0, edges, &mut vec![false; n], 0, 0, &mut all);
        if maxcard {
            all.into_iter().max().unwrap()
        } else {
            all.into_iter().max_by_key(|&(c, w)| (w, c)).map(|(c, w)| (c, w)).unwrap()
        }
    }

    #[test]
    fn random_graphs_match_exhaustive_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..400 {
            let n = rng.random_range(2..9);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(0.6) {
                        edges.push((i, j, rng.random_range(-3..20)));
                    }
                }
            }
            if edges.len() > 14 {
                edges.truncate(14);
            }
            let maxcard = trial % 2 == 0;
            let sol = max_weight_matching(n, &edges, maxcard);
            let mut card = 0;
            let mut w = 0;
            for &(i, j, wt) in &edges {
                if sol.mate[i] == Some(j) {
                    assert_eq!(sol.mate[j], Some(i));
                    card += 1;
                    w += wt;
                }
            }
            let best = brute_best(n, &edges, maxcard);
            if maxcard {
                assert_eq!((card, w), best, "trial {trial}: {edges:?}");
            } else {
                assert_eq!(w, best.1, "trial {trial}: {edges:?}");
            }
            if maxcard {
                let cert = sol.certificate();
                for &(i, j, wt) in &edges {
                    assert!(cert.slack(i, j, wt) >= 0);
                    if sol.mate[i] == Some(j) {
                        assert_eq!(cert.slack(i, j, wt), 0);
                    }
                }
            }
        }
    }
}
