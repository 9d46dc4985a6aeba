//! Face-gluing descriptions of triangulated oriented 3-complexes and the
//! derived cell structure: edge classes with their cyclic order, vertex
//! classes, and normal quadrilaterals.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Vertex pairs of the six edges of a tetrahedron, in index order.
pub const EDGE_VERTICES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Edge index for an unordered vertex pair.
pub fn edge_index(v: usize, w: usize) -> usize {
    let (lo, hi) = if v < w { (v, w) } else { (w, v) };
    match (lo, hi) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("bad vertex pair ({v}, {w})"),
    }
}

/// The two edges (by index) facing each quad slot: the pair the quad's shape
/// parameter lives on.
pub const QUAD_FACING_EDGES: [[usize; 2]; 3] = [[0, 5], [1, 4], [2, 3]];

/// A permutation of the four vertex labels of a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub fn apply(&self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn inverse(&self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img as usize] = i as u8;
        }
        Perm4(inv)
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = [false; 4];
        for &v in &self.0 {
            if v > 3 || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
        }
        true
    }

    /// True for odd permutations, the orientation-compatible gluings.
    pub fn is_odd(&self) -> bool {
        let mut p = self.0;
        let mut swaps = 0;
        for i in 0..4 {
            while p[i] as usize != i {
                let j = p[i] as usize;
                p.swap(i, j);
                swaps += 1;
            }
        }
        swaps % 2 == 1
    }
}

/// One face gluing: face `f` of the owning tetrahedron maps onto face
/// `perm[f]` of tetrahedron `tet` under the vertex permutation `perm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceGluing {
    pub tet: usize,
    pub perm: Perm4,
}

#[derive(Serialize, Deserialize)]
struct TriangulationWire {
    num_tetrahedra: usize,
    gluings: Vec<[FaceGluing; 4]>,
}

/// A closed triangulation: every face of every tetrahedron glued to exactly
/// one partner face by an odd permutation, involutively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    gluings: Vec<[FaceGluing; 4]>,
}

impl Triangulation {
    /// Validate and adopt raw gluing data.
    pub fn from_gluings(gluings: Vec<[FaceGluing; 4]>) -> Result<Self> {
        let n = gluings.len();
        if n == 0 {
            return Err(Error::InvalidTriangulation("no tetrahedra".into()));
        }
        for (t, faces) in gluings.iter().enumerate() {
            for (f, g) in faces.iter().enumerate() {
                if !g.perm.is_valid() {
                    return Err(Error::InvalidTriangulation(format!(
                        "tet {t} face {f}: {:?} is not a permutation",
                        g.perm.0
                    )));
                }
                if g.tet >= n {
                    return Err(Error::InvalidTriangulation(format!(
                        "tet {t} face {f}: target tetrahedron {} out of range",
                        g.tet
                    )));
                }
                if !g.perm.is_odd() {
                    return Err(Error::InvalidTriangulation(format!(
                        "tet {t} face {f}: gluing permutation {:?} is even \
                         (violates the orientation convention)",
                        g.perm.0
                    )));
                }
                if g.tet == t && g.perm.apply(f) == f {
                    return Err(Error::InvalidTriangulation(format!(
                        "tet {t} face {f}: face glued to itself"
                    )));
                }
                let back = &gluings[g.tet][g.perm.apply(f)];
                if back.tet != t || back.perm != g.perm.inverse() {
                    return Err(Error::InvalidTriangulation(format!(
                        "gluing not involutive at tet {t} face {f}"
                    )));
                }
            }
        }
        // The complex must be connected for everything downstream (spanning
        // trees, fundamental group) to make sense.
        let mut visited = vec![false; n];
        visited[0] = true;
        let mut frontier = vec![0usize];
        while let Some(t) = frontier.pop() {
            for f in 0..4 {
                let next = gluings[t][f].tet;
                if !visited[next] {
                    visited[next] = true;
                    frontier.push(next);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            return Err(Error::InvalidTriangulation("complex is disconnected".into()));
        }
        Ok(Triangulation { gluings })
    }

    /// Parse the JSON wire form.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let wire: TriangulationWire =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if wire.gluings.len() != wire.num_tetrahedra {
            return Err(Error::Parse(format!(
                "num_tetrahedra is {} but {} gluing rows given",
                wire.num_tetrahedra,
                wire.gluings.len()
            )));
        }
        Triangulation::from_gluings(wire.gluings)
    }

    /// Canonical compact JSON, a fixed point of parse/serialize.
    pub fn to_json_string(&self) -> String {
        let wire = TriangulationWire {
            num_tetrahedra: self.gluings.len(),
            gluings: self.gluings.clone(),
        };
        serde_json::to_string(&wire).expect("triangulation serialization cannot fail")
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.gluings.len()
    }

    pub fn gluing(&self, tet: usize, face: usize) -> &FaceGluing {
        &self.gluings[tet][face]
    }

    /// Edge classes in canonical order (sorted by smallest member).
    pub fn edge_classes(&self) -> Vec<EdgeClass> {
        let n = self.num_tetrahedra();
        let mut uf = UnionFind::new(6 * n);
        for t in 0..n {
            for f in 0..4 {
                let g = self.gluing(t, f);
                for e in 0..6 {
                    let [v, w] = EDGE_VERTICES[e];
                    if v == f || w == f {
                        continue; // edge not on face f
                    }
                    let image = edge_index(g.perm.apply(v), g.perm.apply(w));
                    uf.unite(t * 6 + e, g.tet * 6 + image);
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = group_by_root(&mut uf, 6 * n);
        classes.sort_by_key(|c| c[0]);
        classes
            .into_iter()
            .enumerate()
            .map(|(index, members)| self.traverse_edge_class(index, members))
            .collect()
    }

    /// Walk around an edge class from its canonical representative,
    /// recording each tetrahedron-edge it passes through in cyclic order.
    fn traverse_edge_class(&self, index: usize, members: Vec<usize>) -> EdgeClass {
        let rep = members[0];
        let (t0, e0) = (rep / 6, rep % 6);
        let [v0, w0] = EDGE_VERTICES[e0];
        // Pivot through the smaller-labeled free face first.
        let start_face = (0..4).find(|x| *x != v0 && *x != w0).unwrap();
        let start = (t0, v0, w0, start_face);
        let mut arrows = Vec::new();
        let mut state = start;
        loop {
            let (t, v, w, pivot) = state;
            arrows.push(EdgeArrow {
                tet: t,
                edge: edge_index(v, w),
                forward: v < w,
            });
            let g = self.gluing(t, pivot);
            let (nv, nw) = (g.perm.apply(v), g.perm.apply(w));
            let entered = g.perm.apply(pivot);
            let next_pivot = (0..4)
                .find(|x| *x != nv && *x != nw && *x != entered)
                .unwrap();
            state = (g.tet, nv, nw, next_pivot);
            if state == start {
                break;
            }
            if arrows.len() > 6 * self.num_tetrahedra() {
                // Unreachable for involutive gluing data; guards against a
                // corrupted structure making this loop spin forever.
                panic!("around-edge traversal failed to close");
            }
        }
        debug_assert_eq!(arrows.len(), members.len());
        EdgeClass { index, members, arrows }
    }

    /// Vertex classes in canonical order (sorted by smallest corner).
    pub fn vertex_classes(&self) -> Vec<VertexClass> {
        let n = self.num_tetrahedra();
        let mut uf = UnionFind::new(4 * n);
        for t in 0..n {
            for f in 0..4 {
                let g = self.gluing(t, f);
                for v in 0..4 {
                    if v != f {
                        uf.unite(t * 4 + v, g.tet * 4 + g.perm.apply(v));
                    }
                }
            }
        }
        let mut classes = group_by_root(&mut uf, 4 * n);
        classes.sort_by_key(|c| c[0]);
        classes
            .into_iter()
            .enumerate()
            .map(|(index, corners)| VertexClass { index, corners })
            .collect()
    }

    /// All normal quadrilateral types, `(tet, slot)` in lexicographic order.
    pub fn normal_quads(&self) -> Vec<NormalQuad> {
        (0..self.num_tetrahedra())
            .flat_map(|tet| (0..3).map(move |slot| NormalQuad { tet, slot }))
            .collect()
    }

    /// Exponent of quad `q` in the equation of edge class `e`: how many of
    /// the two tetrahedron-edges facing `q` lie in `e` (0, 1, or 2).
    pub fn quad_incidence(&self, q: &NormalQuad, e: &EdgeClass) -> u32 {
        QUAD_FACING_EDGES[q.slot]
            .iter()
            .filter(|&&ei| e.members.binary_search(&(q.tet * 6 + ei)).is_ok())
            .count() as u32
    }

    /// Euler characteristic of each vertex link, in vertex class order.
    ///
    /// A class's link is a closed connected surface; characteristic 2 means
    /// a sphere, so `all == 2` is exactly the manifold condition.
    pub fn vertex_link_characteristics(&self) -> Vec<i64> {
        let vclasses = self.vertex_classes();
        let eclasses = self.edge_classes();
        let mut corner_class = vec![0usize; 4 * self.num_tetrahedra()];
        for vc in &vclasses {
            for &c in &vc.corners {
                corner_class[c] = vc.index;
            }
        }
        let mut ends = vec![0i64; vclasses.len()];
        for ec in &eclasses {
            let (t, e) = (ec.members[0] / 6, ec.members[0] % 6);
            let [v, w] = EDGE_VERTICES[e];
            ends[corner_class[t * 4 + v]] += 1;
            ends[corner_class[t * 4 + w]] += 1;
        }
        // Link cells per class: one triangle per corner, three half-edges
        // per triangle glued in pairs, one vertex per edge-class end.
        vclasses
            .iter()
            .map(|vc| ends[vc.index] - (vc.corners.len() as i64) / 2)
            .collect()
    }

    pub fn is_manifold(&self) -> bool {
        self.vertex_link_characteristics().iter().all(|&chi| chi == 2)
    }

    /// Faces of a spanning tree of the dual graph (tetrahedra as nodes,
    /// face gluings as arcs), marked on both glued halves. BFS from
    /// tetrahedron 0 scanning faces in index order, so the tree is
    /// deterministic.
    pub fn dual_spanning_tree(&self) -> Vec<[bool; 4]> {
        let n = self.num_tetrahedra();
        let mut tree = vec![[false; 4]; n];
        let mut visited = vec![false; n];
        visited[0] = true;
        let mut frontier = std::collections::VecDeque::from([0usize]);
        while let Some(t) = frontier.pop_front() {
            for f in 0..4 {
                let g = self.gluing(t, f);
                if !visited[g.tet] {
                    visited[g.tet] = true;
                    tree[t][f] = true;
                    tree[g.tet][g.perm.apply(f)] = true;
                    frontier.push_back(g.tet);
                }
            }
        }
        assert!(visited.iter().all(|v| *v), "disconnected complex");
        tree
    }
}

/// One pass of the around-edge walk: tetrahedron `tet`, local edge `edge`,
/// traversed along (`forward`) or against its low-to-high orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeArrow {
    pub tet: usize,
    pub edge: usize,
    pub forward: bool,
}

/// An edge of the glued complex.
#[derive(Debug, Clone)]
pub struct EdgeClass {
    pub index: usize,
    /// Sorted tetrahedron-edge ids `tet * 6 + edge`.
    pub members: Vec<usize>,
    /// The members again, in cyclic around-the-edge order with orientation.
    pub arrows: Vec<EdgeArrow>,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.arrows.len()
    }

    /// Representative tetrahedron-edge (smallest member).
    pub fn representative(&self) -> (usize, usize) {
        (self.members[0] / 6, self.members[0] % 6)
    }

    pub fn contains(&self, tet: usize, edge: usize) -> bool {
        self.members.binary_search(&(tet * 6 + edge)).is_ok()
    }
}

/// A vertex of the glued complex.
#[derive(Debug, Clone)]
pub struct VertexClass {
    pub index: usize,
    /// Sorted corner ids `tet * 4 + vertex`.
    pub corners: Vec<usize>,
}

/// A normal quadrilateral type in a tetrahedron, indexed by the slot of the
/// edge pair it faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalQuad {
    pub tet: usize,
    pub slot: usize,
}

/// Union-find with path compression and union by size.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn unite(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

fn group_by_root(uf: &mut UnionFind, n: usize) -> Vec<Vec<usize>> {
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        let r = uf.find(x);
        buckets.entry(r).or_default().push(x);
    }
    buckets.into_values().collect()
}
