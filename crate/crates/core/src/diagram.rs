//! Nice diagrams: axioms, ordered index set, root matrix and automorphisms.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::DiagramError;
use crate::linalg::{rat, MatF2, MatQ};

pub const MAX_AUTOMORPHISM_NODES: usize = 12;
pub const DEFAULT_GROUP_CAP: usize = 100_000;

/// Writes node `i` the way the structure strings do: `10` becomes `0`.
pub fn node_label(i: usize) -> String {
    if i == 10 {
        "0".to_string()
    } else {
        i.to_string()
    }
}

/// Compact index list such as `146` or `1237`; nodes above 10 fall back to a comma list.
pub fn node_list(nodes: &[usize]) -> String {
    if nodes.iter().any(|&i| i > 10) {
        nodes.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    } else {
        nodes.iter().map(|&i| node_label(i)).collect()
    }
}

/// `source --label--> target`, nodes 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub source: usize,
    pub label: usize,
    pub target: usize,
}

impl Arrow {
    pub fn new(source: usize, label: usize, target: usize) -> Self {
        Self { source, label, target }
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-({})->{}", self.source, self.label, self.target)
    }
}

/// A labeled digraph that may or may not satisfy the axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDiagram {
    pub n: usize,
    pub arrows: Vec<Arrow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    OutOfRange(Arrow),
    /// Two arrows with the same source and label.
    N1(Arrow, Arrow),
    /// Two arrows with the same destination and label.
    N2(Arrow, Arrow),
    /// Arrow labeled by its own source, or missing its mirror arrow.
    N3(Arrow),
    /// Four nodes for which exactly one of the three compositions exists.
    N4 {
        i: usize,
        j: usize,
        k: usize,
        v: usize,
    },
    MultipleArrows(Arrow, Arrow),
    Cycle(Vec<usize>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange(a) => write!(f, "arrow {a} uses a node out of range"),
            Violation::N1(a, b) => write!(f, "(N1) arrows {a} and {b} share source and label"),
            Violation::N2(a, b) => write!(f, "(N2) arrows {a} and {b} share destination and label"),
            Violation::N3(a) => write!(f, "(N3) arrow {a} has no valid mirror"),
            Violation::N4 { i, j, k, v } => write!(f, "(N4) nodes {i},{j},{k},{v}"),
            Violation::MultipleArrows(a, b) => write!(f, "multiple arrows {a} and {b}"),
            Violation::Cycle(c) => write!(f, "directed cycle through nodes {c:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate_nice(d: &RawDiagram) -> ValidationReport {
    let mut violations = Vec::new();
    let mut arrows: Vec<Arrow> = d.arrows.clone();
    arrows.sort();
    arrows.dedup();
    let in_range = |i: usize| (1..=d.n).contains(&i);
    for a in &arrows {
        if !in_range(a.source) || !in_range(a.label) || !in_range(a.target) {
            violations.push(Violation::OutOfRange(*a));
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    let set: HashSet<Arrow> = arrows.iter().copied().collect();
    for (x, a) in arrows.iter().enumerate() {
        for b in &arrows[x + 1..] {
            if a.source == b.source && a.label == b.label {
                violations.push(Violation::N1(*a, *b));
            }
            if a.target == b.target && a.label == b.label {
                violations.push(Violation::N2(*a, *b));
            }
            if a.source == b.source && a.target == b.target {
                violations.push(Violation::MultipleArrows(*a, *b));
            }
        }
        if a.source == a.label || !set.contains(&Arrow::new(a.label, a.source, a.target)) {
            violations.push(Violation::N3(*a));
        }
    }
    // j --k--> l and i --l--> v
    let by_source_label: HashMap<(usize, usize), usize> =
        arrows.iter().map(|a| ((a.source, a.label), a.target)).collect();
    let comp = |i: usize, j: usize, k: usize, v: usize| {
        by_source_label.get(&(j, k)).and_then(|&l| by_source_label.get(&(i, l))).is_some_and(|&t| t == v)
    };
    for i in 1..=d.n {
        for j in i + 1..=d.n {
            for k in j + 1..=d.n {
                for v in 1..=d.n {
                    if v == i || v == j || v == k {
                        continue;
                    }
                    let count = [comp(i, j, k, v), comp(j, k, i, v), comp(k, i, j, v)].iter().filter(|&&b| b).count();
                    if count == 1 {
                        violations.push(Violation::N4 { i, j, k, v });
                    }
                }
            }
        }
    }
    if let Some(cycle) = find_cycle(d.n, &arrows) {
        violations.push(Violation::Cycle(cycle));
    }
    ValidationReport { violations }
}

fn find_cycle(n: usize, arrows: &[Arrow]) -> Option<Vec<usize>> {
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n + 1];
    for a in arrows {
        succ[a.source].insert(a.target);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n + 1];
    let mut stack: Vec<usize> = Vec::new();
    fn dfs(u: usize, succ: &[BTreeSet<usize>], state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[u] = 1;
        stack.push(u);
        for &w in &succ[u] {
            if state[w] == 1 {
                let pos = stack.iter().position(|&x| x == w).unwrap();
                return Some(stack[pos..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, succ, state, stack) {
                    return Some(c);
                }
            }
        }
        stack.pop();
        state[u] = 2;
        None
    }
    (1..=n).find_map(|u| if state[u] == 0 { dfs(u, &succ, &mut state, &mut stack) } else { None })
}

/// `{{i,j},k}` with `i < j`: the bracket of `e_i, e_j` lands on `e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl IndexEntry {
    pub fn new(a: usize, b: usize, k: usize) -> Self {
        Self { i: a.min(b), j: a.max(b), k }
    }

    fn key(&self) -> (usize, usize, usize) {
        (self.k, self.i, self.j)
    }
}

impl Ord for IndexEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for IndexEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", node_list(&[self.i, self.j]), node_label(self.k))
    }
}

/// A validated nice diagram, stored through its ordered index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDiagram {
    n: usize,
    index: Vec<IndexEntry>,
    position: HashMap<IndexEntry, usize>,
}

impl NiceDiagram {
    pub fn new(raw: &RawDiagram) -> Result<Self, DiagramError> {
        let report = validate_nice(raw);
        if !report.is_valid() {
            return Err(DiagramError::NotNice(report));
        }
        let entries: BTreeSet<IndexEntry> =
            raw.arrows.iter().map(|a| IndexEntry::new(a.source, a.label, a.target)).collect();
        Ok(Self::from_sorted(raw.n, entries.into_iter().collect()))
    }

    /// Builds the diagram from index entries, adding both arrows of each pair.
    pub fn from_entries(n: usize, entries: &[IndexEntry]) -> Result<Self, DiagramError> {
        let arrows = entries.iter().flat_map(|e| [Arrow::new(e.i, e.j, e.k), Arrow::new(e.j, e.i, e.k)]).collect();
        Self::new(&RawDiagram { n, arrows })
    }

    fn from_sorted(n: usize, index: Vec<IndexEntry>) -> Self {
        let position = index.iter().enumerate().map(|(p, e)| (*e, p)).collect();
        Self { n, index, position }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of index entries (rows of the root matrix).
    pub fn m(&self) -> usize {
        self.index.len()
    }

    pub fn index_set(&self) -> &[IndexEntry] {
        &self.index
    }

    pub fn position(&self, e: &IndexEntry) -> Option<usize> {
        self.position.get(e).copied()
    }

    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out: Vec<Arrow> =
            self.index.iter().flat_map(|e| [Arrow::new(e.i, e.j, e.k), Arrow::new(e.j, e.i, e.k)]).collect();
        out.sort();
        out
    }

    pub fn raw(&self) -> RawDiagram {
        RawDiagram { n: self.n, arrows: self.arrows() }
    }

    pub fn root_matrix(&self) -> RootMatrix {
        let ints: Vec<Vec<i64>> = self
            .index
            .iter()
            .map(|e| {
                let mut row = vec![0i64; self.n];
                row[e.i - 1] = -1;
                row[e.j - 1] = -1;
                row[e.k - 1] = 1;
                row
            })
            .collect();
        let q = if ints.is_empty() {
            MatQ::zeros(0, self.n)
        } else {
            MatQ::from_rows(ints.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
        };
        let f2_rows: Vec<Vec<bool>> = ints.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect();
        let f2 = MatF2::from_rows(&f2_rows, self.n);
        RootMatrix { ints, q, f2 }
    }

    pub fn contains(&self, e: &IndexEntry) -> bool {
        self.position.contains_key(e)
    }

    pub fn is_automorphism(&self, s: &NodePermutation) -> bool {
        s.n() == self.n && self.index.iter().all(|e| self.contains(&s.apply_entry(e)))
    }

    pub fn automorphisms(&self) -> Result<Vec<NodePermutation>, DiagramError> {
        self.automorphisms_capped(DEFAULT_GROUP_CAP)
    }

    /// All label-preserving node permutations, sorted by image vector.
    pub fn automorphisms_capped(&self, cap: usize) -> Result<Vec<NodePermutation>, DiagramError> {
        if self.n > MAX_AUTOMORPHISM_NODES {
            return Err(DiagramError::TooManyNodes { n: self.n, max: MAX_AUTOMORPHISM_NODES });
        }
        let n = self.n;
        // signature: (#entries with node as target, #entries with node as source, sorted neighbour profile)
        let mut sig: Vec<(usize, usize)> = vec![(0, 0); n + 1];
        for e in &self.index {
            sig[e.k].0 += 1;
            sig[e.i].1 += 1;
            sig[e.j].1 += 1;
        }
        let mut touching: Vec<Vec<IndexEntry>> = vec![Vec::new(); n + 1];
        for e in &self.index {
            let last = e.i.max(e.j).max(e.k);
            touching[last].push(*e);
        }
        let mut image = vec![0usize; n + 1];
        let mut used = vec![false; n + 1];
        let mut out = Vec::new();
        self.extend(1, &sig, &touching, &mut image, &mut used, &mut out, cap)?;
        out.sort_by(|a: &NodePermutation, b| a.images.cmp(&b.images));
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        node: usize,
        sig: &[(usize, usize)],
        touching: &[Vec<IndexEntry>],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<NodePermutation>,
        cap: usize,
    ) -> Result<(), DiagramError> {
        if node > self.n {
            if out.len() >= cap {
                return Err(DiagramError::GroupTooLarge { cap });
            }
            out.push(NodePermutation { images: image[1..].to_vec() });
            return Ok(());
        }
        for t in 1..=self.n {
            if used[t] || sig[t] != sig[node] {
                continue;
            }
            image[node] = t;
            // every entry whose largest node is `node` is now fully mapped
            let ok = touching[node].iter().all(|e| self.contains(&IndexEntry::new(image[e.i], image[e.j], image[e.k])));
            if ok {
                used[t] = true;
                self.extend(node + 1, sig, touching, image, used, out, cap)?;
                used[t] = false;
            }
        }
        image[node] = 0;
        Ok(())
    }

    /// Automorphisms of order two, each flagged fixed-point-free or not.
    pub fn involutions(&self) -> Result<Vec<(NodePermutation, bool)>, DiagramError> {
        Ok(self
            .automorphisms()?
            .into_iter()
            .filter(|s| !s.is_identity() && s.is_involution())
            .map(|s| {
                let free = s.fixed_points().is_empty();
                (s, free)
            })
            .collect())
    }

    pub fn sigma_arrow_action(&self, s: &NodePermutation) -> Result<IndexAction, DiagramError> {
        if !self.is_automorphism(s) {
            return Err(DiagramError::NotAutomorphism(s.to_string()));
        }
        let mut perm = Vec::with_capacity(self.m());
        let mut sign = Vec::with_capacity(self.m());
        for e in &self.index {
            let (a, b) = (s.apply(e.i), s.apply(e.j));
            perm.push(self.position[&IndexEntry::new(a, b, s.apply(e.k))]);
            sign.push(if a > b { -1 } else { 1 });
        }
        Ok(IndexAction { perm, sign })
    }

    /// Nodes that appear as a bracket target, sorted.
    pub fn targets(&self) -> Vec<usize> {
        let t: BTreeSet<usize> = self.index.iter().map(|e| e.k).collect();
        t.into_iter().collect()
    }
}

/// Root matrix in three guises: integers, rationals, and mod 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMatrix {
    pub ints: Vec<Vec<i64>>,
    pub q: MatQ,
    pub f2: MatF2,
}

/// Action of a node permutation on the index set: entry `r` goes to `perm[r]` with `sign[r]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexAction {
    pub perm: Vec<usize>,
    pub sign: Vec<i8>,
}

impl IndexAction {
    /// Cycle notation on 1-based index positions, e.g. `(12)(56)`.
    pub fn cycles(&self) -> String {
        NodePermutation { images: self.perm.iter().map(|p| p + 1).collect() }.to_string()
    }
}

/// Bijection of `1..=n`; `images[i-1]` is the image of node `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePermutation {
    images: Vec<usize>,
}

impl NodePermutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, DiagramError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &x in &images {
            if x == 0 || x > n || seen[x] {
                return Err(DiagramError::BadPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    /// Parses cycle notation such as `(23)(45)`, `(13)(27)(90)` or `(1,11)`; `id` or `()` is the identity.
    pub fn parse(s: &str, n: usize) -> Result<Self, DiagramError> {
        let bad = || DiagramError::BadPermutation(s.to_string());
        let mut images: Vec<usize> = (1..=n).collect();
        let t = s.trim();
        if t.is_empty() || t == "id" || t == "()" {
            return Ok(Self { images });
        }
        let mut rest = t;
        let mut seen = vec![false; n + 1];
        while !rest.is_empty() {
            let inner_start = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = inner_start.find(')').ok_or_else(bad)?;
            let body = &inner_start[..close];
            rest = inner_start[close + 1..].trim_start();
            let nodes: Vec<usize> = if body.contains(',') || body.contains(' ') {
                body.split([',', ' '])
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?
            } else {
                body.chars()
                    .map(|c| c.to_digit(10).map(|d| if d == 0 { 10 } else { d as usize }).ok_or_else(bad))
                    .collect::<Result<_, _>>()?
            };
            for &x in &nodes {
                if x == 0 || x > n || seen[x] {
                    return Err(bad());
                }
                seen[x] = true;
            }
            for (p, &x) in nodes.iter().enumerate() {
                images[x - 1] = nodes[(p + 1) % nodes.len()];
            }
        }
        Ok(Self { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn apply_entry(&self, e: &IndexEntry) -> IndexEntry {
        IndexEntry::new(self.apply(e.i), self.apply(e.j), self.apply(e.k))
    }

    pub fn compose(&self, other: &NodePermutation) -> NodePermutation {
        // (self ∘ other)(i) = self(other(i))
        NodePermutation { images: other.images.iter().map(|&x| self.apply(x)).collect() }
    }

    pub fn inverse(&self) -> NodePermutation {
        let mut inv = vec![0; self.n()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        NodePermutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| x == i + 1)
    }

    pub fn is_involution(&self) -> bool {
        self.compose(self).is_identity()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.apply(i) == i).collect()
    }

    /// Nontrivial cycles, each starting at its smallest node, sorted by that node.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n() + 1];
        let mut out = Vec::new();
        for start in 1..=self.n() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    /// Orbits of size one or two for an involution, sorted by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n() + 1];
        let mut out = Vec::new();
        for i in 1..=self.n() {
            if seen[i] {
                continue;
            }
            let mut orbit = vec![i];
            seen[i] = true;
            let mut x = self.apply(i);
            while x != i {
                seen[x] = true;
                orbit.push(x);
                x = self.apply(x);
            }
            orbit.sort();
            out.push(orbit);
        }
        out
    }
}

impl fmt::Display for NodePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for c in cycles {
            write!(f, "({})", node_list(&c))?;
        }
        Ok(())
    }
}

impl Serialize for NodePermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Groups diagram nodes by in/out degree; used in `info` output.
pub fn degree_profile(d: &NiceDiagram) -> BTreeMap<usize, (usize, usize)> {
    let mut out: BTreeMap<usize, (usize, usize)> = (1..=d.n()).map(|i| (i, (0, 0))).collect();
    for e in d.index_set() {
        out.get_mut(&e.k).unwrap().0 += 2;
        out.get_mut(&e.i).unwrap().1 += 1;
        out.get_mut(&e.j).unwrap().1 += 1;
    }
    out
}
