//! An 8-dimensional point-region tree over curve summaries.
//!
//! Every internal node splits its region at the center in all eight
//! coordinates at once, giving up to 256 children addressed by the sign
//! pattern of `point - center` (bit `k` set when coordinate `k` is at or
//! above the center). Children are allocated only when a point lands in
//! them.

use crate::geometry::{lb_frechet, CurveSummary};

pub const DIM: usize = CurveSummary::DIM;
pub const DEFAULT_LEAF_CAPACITY: usize = 16;

/// Leaves at this depth are never split. Halving a box 128 times goes below
/// f64 resolution for any realistic coordinate extent, so points that reach
/// it are equal or adjacent floats.
const MAX_DEPTH: usize = 128;

type Key = [f64; DIM];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexConfig {
    pub leaf_capacity: usize,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            leaf_capacity: DEFAULT_LEAF_CAPACITY,
        }
    }
}

#[derive(Debug, Clone)]
struct Region {
    lo: Key,
    hi: Key,
}

impl Region {
    fn center(&self) -> Key {
        std::array::from_fn(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    fn child(&self, center: &Key, pattern: u8) -> Region {
        let mut r = self.clone();
        for (k, &c) in center.iter().enumerate() {
            if pattern & (1 << k) != 0 {
                r.lo[k] = c;
            } else {
                r.hi[k] = c;
            }
        }
        r
    }

    fn intersects(&self, lo: &Key, hi: &Key) -> bool {
        (0..DIM).all(|k| self.lo[k] <= hi[k] && lo[k] <= self.hi[k])
    }

    fn contains(&self, key: &Key) -> bool {
        (0..DIM).all(|k| self.lo[k] <= key[k] && key[k] <= self.hi[k])
    }
}

#[inline]
fn sign_pattern(key: &Key, center: &Key) -> u8 {
    let mut pattern = 0u8;
    for k in 0..DIM {
        if key[k] >= center[k] {
            pattern |= 1 << k;
        }
    }
    pattern
}

#[inline]
fn in_box(key: &Key, lo: &Key, hi: &Key) -> bool {
    (0..DIM).all(|k| lo[k] <= key[k] && key[k] <= hi[k])
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf(Vec<u32>),
    Internal {
        center: Key,
        /// `(pattern, node)` sorted by pattern.
        children: Vec<(u8, u32)>,
    },
}

#[derive(Debug, Clone)]
struct Node {
    region: Region,
    kind: NodeKind,
}

#[derive(Debug, Clone)]
struct Entry {
    key: Key,
    id: usize,
}

/// Immutable spatial index over `(summary, id)` pairs.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    config: IndexConfig,
    entries: Vec<Entry>,
    nodes: Vec<Node>,
    bounds: Option<Region>,
}

impl SpatialIndex {
    /// Builds the tree by inserting the items in order.
    pub fn build(
        items: impl IntoIterator<Item = (CurveSummary, usize)>,
        config: IndexConfig,
    ) -> Self {
        assert!(config.leaf_capacity >= 1, "leaf capacity must be positive");
        let entries: Vec<Entry> = items
            .into_iter()
            .map(|(s, id)| Entry {
                key: s.to_array(),
                id,
            })
            .collect();
        let mut index = SpatialIndex {
            config,
            entries,
            nodes: Vec::new(),
            bounds: None,
        };
        if index.entries.is_empty() {
            return index;
        }

        let mut lo = index.entries[0].key;
        let mut hi = lo;
        for e in &index.entries {
            for k in 0..DIM {
                lo[k] = lo[k].min(e.key[k]);
                hi[k] = hi[k].max(e.key[k]);
            }
        }
        index.bounds = Some(Region { lo, hi });
        let mut root = Region { lo, hi };
        for k in 0..DIM {
            let pad = (0.01 * (hi[k] - lo[k])).max(1e-9 * lo[k].abs().max(hi[k].abs()).max(1.0));
            root.lo[k] -= pad;
            root.hi[k] += pad;
        }
        index.nodes.push(Node {
            region: root,
            kind: NodeKind::Leaf(Vec::new()),
        });
        for e in 0..index.entries.len() {
            index.insert(0, e as u32, 0);
        }
        index
    }

    fn insert(&mut self, mut node: usize, entry: u32, mut depth: usize) {
        while let NodeKind::Internal { center, children } = &self.nodes[node].kind {
            let pattern = sign_pattern(&self.entries[entry as usize].key, center);
            node = match children.binary_search_by_key(&pattern, |c| c.0) {
                Ok(pos) => children[pos].1 as usize,
                Err(pos) => {
                    let region = self.nodes[node].region.child(center, pattern);
                    let child = self.nodes.len();
                    self.nodes.push(Node {
                        region,
                        kind: NodeKind::Leaf(Vec::new()),
                    });
                    if let NodeKind::Internal { children, .. } = &mut self.nodes[node].kind {
                        children.insert(pos, (pattern, child as u32));
                    }
                    child
                }
            };
            depth += 1;
        }

        let NodeKind::Leaf(items) = &mut self.nodes[node].kind else {
            unreachable!()
        };
        items.push(entry);
        if items.len() <= self.config.leaf_capacity || depth >= MAX_DEPTH {
            return;
        }
        let first = self.entries[items[0] as usize].key;
        if items.iter().all(|&e| self.entries[e as usize].key == first) {
            return;
        }

        let items = std::mem::take(items);
        let center = self.nodes[node].region.center();
        self.nodes[node].kind = NodeKind::Internal {
            center,
            children: Vec::new(),
        };
        for e in items {
            self.insert(node, e, depth);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn config(&self) -> IndexConfig {
        self.config
    }

    /// Coordinate-wise bounds of the stored summaries, as `(lo, hi)`.
    pub fn bounds(&self) -> Option<([f64; DIM], [f64; DIM])> {
        self.bounds.as_ref().map(|r| (r.lo, r.hi))
    }

    /// Ids of all points inside the closed box `[lo, hi]`, appended to `out`.
    pub fn box_query_into(&self, lo: &[f64; DIM], hi: &[f64; DIM], out: &mut Vec<usize>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            let n = &self.nodes[node];
            if !n.region.intersects(lo, hi) {
                continue;
            }
            match &n.kind {
                NodeKind::Leaf(items) => out.extend(
                    items
                        .iter()
                        .map(|&e| &self.entries[e as usize])
                        .filter(|e| in_box(&e.key, lo, hi))
                        .map(|e| e.id),
                ),
                NodeKind::Internal { children, .. } => {
                    stack.extend(children.iter().rev().map(|c| c.1 as usize))
                }
            }
        }
    }

    /// Phase one of a candidate query: every summary within `delta` of `q` in
    /// each of the eight coordinates.
    pub fn range(&self, q: &CurveSummary, delta: f64) -> Vec<usize> {
        let key = q.to_array();
        let lo = key.map(|v| v - delta);
        let hi = key.map(|v| v + delta);
        let mut out = Vec::new();
        self.box_query_into(&lo, &hi, &mut out);
        out
    }

    /// Ids whose summary has `lb_frechet(q, summary) <= delta`.
    pub fn candidates(&self, q: &CurveSummary, delta: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.candidates_into(q, delta, &mut out);
        out
    }

    pub fn candidates_into(&self, q: &CurveSummary, delta: f64, out: &mut Vec<usize>) {
        if self.nodes.is_empty() {
            return;
        }
        let key = q.to_array();
        let lo = key.map(|v| v - delta);
        let hi = key.map(|v| v + delta);
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            let n = &self.nodes[node];
            if !n.region.intersects(&lo, &hi) {
                continue;
            }
            match &n.kind {
                NodeKind::Leaf(items) => {
                    for &e in items {
                        let e = &self.entries[e as usize];
                        if in_box(&e.key, &lo, &hi)
                            && lb_frechet(q, &CurveSummary::from_array(e.key)) <= delta
                        {
                            out.push(e.id);
                        }
                    }
                }
                NodeKind::Internal { children, .. } => {
                    stack.extend(children.iter().rev().map(|c| c.1 as usize))
                }
            }
        }
    }

    /// Checks the structural invariants, returning a description of the first
    /// violation.
    pub fn validate(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return if self.entries.is_empty() {
                Ok(())
            } else {
                Err("entries without a root".into())
            };
        }
        let mut seen = vec![0usize; self.entries.len()];
        let mut stack = vec![(0usize, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            let n = &self.nodes[node];
            match &n.kind {
                NodeKind::Leaf(items) => {
                    for &e in items {
                        seen[e as usize] += 1;
                        if !n.region.contains(&self.entries[e as usize].key) {
                            return Err(format!("entry {e} outside its leaf region"));
                        }
                    }
                    if items.len() > self.config.leaf_capacity && depth < MAX_DEPTH {
                        let first = self.entries[items[0] as usize].key;
                        if items.iter().any(|&e| self.entries[e as usize].key != first) {
                            return Err(format!("overfull leaf {node} of distinct points"));
                        }
                    }
                }
                NodeKind::Internal { center, children } => {
                    for &(pattern, child) in children {
                        let c = &self.nodes[child as usize];
                        let expected = n.region.child(center, pattern);
                        if c.region.lo != expected.lo || c.region.hi != expected.hi {
                            return Err(format!("child {child} has the wrong region"));
                        }
                        if let NodeKind::Leaf(items) = &c.kind {
                            if let Some(&e) = items.iter().find(|&&e| {
                                sign_pattern(&self.entries[e as usize].key, center) != pattern
                            }) {
                                return Err(format!("entry {e} stored under the wrong pattern"));
                            }
                        }
                        stack.push((child as usize, depth + 1));
                    }
                }
            }
        }
        if let Some(e) = seen.iter().position(|&c| c != 1) {
            return Err(format!("entry {e} stored {} times", seen[e]));
        }
        Ok(())
    }
}
