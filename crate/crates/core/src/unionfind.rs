//! Disjoint sets with an optional relative-orientation bit per element.

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    // orientation of the element relative to its parent
    flip: Vec<bool>,
}

/// Two elements were merged with contradictory relative orientations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientationConflict;

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n], flip: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x` and the orientation of `x` relative to that root.
    pub fn find_oriented(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, pf) = self.find_oriented(p);
        self.parent[x] = root;
        self.flip[x] ^= pf;
        (root, self.flip[x])
    }

    pub fn find(&mut self, x: usize) -> usize {
        self.find_oriented(x).0
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        self.union_oriented(a, b, false).unwrap_or(false)
    }

    /// Merge `a` and `b`, recording that `b` has orientation `reversed`
    /// relative to `a`. Returns `Ok(true)` when two classes were joined.
    pub fn union_oriented(&mut self, a: usize, b: usize, reversed: bool) -> Result<bool, OrientationConflict> {
        let (ra, fa) = self.find_oriented(a);
        let (rb, fb) = self.find_oriented(b);
        if ra == rb {
            return if fa ^ fb == reversed { Ok(false) } else { Err(OrientationConflict) };
        }
        let rel = fa ^ fb ^ reversed;
        let (child, root) = if self.rank[ra] < self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[child] = root;
        self.flip[child] = rel;
        if self.rank[ra] == self.rank[rb] {
            self.rank[root] += 1;
        }
        Ok(true)
    }

    /// Class index (dense, in order of first appearance) for every element.
    pub fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[x] = label[r];
        }
        (out, next)
    }
}
