//! Edge-path presentation of the fundamental group of a glued complex, and
//! representations of it into PSL(2, C).
//!
//! Vertices of the complex are the vertex classes, 1-cells the edge classes,
//! 2-cells the glued face pairs. Collapsing a spanning tree of the vertex
//! graph leaves one generator per non-tree edge class and one relator per
//! face pair (a free reduction of its triangle boundary word). Attaching the
//! 3-cells changes nothing at this level.

use crate::geometry::Mobius;
use crate::tolerances;
use crate::triangulation::{edge_index, Triangulation};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// One letter of a word: a generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inverted(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

/// A freely reduced word in the presentation's generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Append one letter, cancelling against the tail.
    pub fn push(&mut self, letter: Letter) {
        match self.0.last() {
            Some(last) if *last == letter.inverted() => {
                self.0.pop();
            }
            _ => self.0.push(letter),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    /// Parse a whitespace-separated word like `g0 g2^-1`; `1` is the
    /// identity.
    pub fn parse(text: &str, num_generators: usize) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed == "1" || trimmed.is_empty() {
            return Ok(Word::identity());
        }
        let mut word = Word::identity();
        for token in trimmed.split_whitespace() {
            let (name, inverse) = match token.strip_suffix("^-1") {
                Some(base) => (base, true),
                None => (token, false),
            };
            let index: usize = name
                .strip_prefix('g')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::UnknownGenerator(token.to_string()))?;
            if index >= num_generators {
                return Err(Error::UnknownGenerator(token.to_string()));
            }
            word.push(Letter { generator: index, inverse });
        }
        Ok(word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// How a vertex class hangs off its parent in the spanning tree.
#[derive(Debug, Clone, Copy)]
pub struct TreeStep {
    pub parent: usize,
    pub edge_class: usize,
    /// True when the edge class's canonical direction points from the
    /// parent to this class.
    pub forward_points_to_child: bool,
}

/// A finite presentation of the fundamental group.
#[derive(Debug, Clone)]
pub struct Presentation {
    num_vertex_classes: usize,
    num_edge_classes: usize,
    /// Per edge class: its generator index, or None for tree edges.
    edge_generator: Vec<Option<usize>>,
    /// Per generator: its edge class.
    generator_edges: Vec<usize>,
    /// Per vertex class: how it attaches to the tree (None for the root).
    tree_parent: Vec<Option<TreeStep>>,
    /// Per edge class: (tail, head) vertex classes in canonical direction.
    edge_ends: Vec<(usize, usize)>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn from_triangulation(tri: &Triangulation) -> Result<Presentation> {
        let vclasses = tri.vertex_classes();
        let eclasses = tri.edge_classes();
        let mut corner_class = vec![0usize; 4 * tri.num_tetrahedra()];
        for vc in &vclasses {
            for &c in &vc.corners {
                corner_class[c] = vc.index;
            }
        }

        // Canonical direction and endpoint classes of each edge class.
        let edge_ends: Vec<(usize, usize)> = eclasses
            .iter()
            .map(|ec| {
                let (t, e) = ec.representative();
                let [v, w] = crate::triangulation::EDGE_VERTICES[e];
                (corner_class[t * 4 + v], corner_class[t * 4 + w])
            })
            .collect();

        // Spanning tree of the vertex-class graph by BFS from class 0,
        // scanning edge classes in index order.
        let nv = vclasses.len();
        let mut tree_parent: Vec<Option<TreeStep>> = vec![None; nv];
        let mut visited = vec![false; nv];
        let mut in_tree = vec![false; eclasses.len()];
        visited[0] = true;
        let mut frontier = std::collections::VecDeque::from([0usize]);
        while let Some(c) = frontier.pop_front() {
            for (e, &(tail, head)) in edge_ends.iter().enumerate() {
                if in_tree[e] {
                    continue;
                }
                let next = if tail == c && !visited[head] {
                    Some((head, true))
                } else if head == c && !visited[tail] {
                    Some((tail, false))
                } else {
                    None
                };
                if let Some((child, forward_points_to_child)) = next {
                    visited[child] = true;
                    in_tree[e] = true;
                    tree_parent[child] = Some(TreeStep {
                        parent: c,
                        edge_class: e,
                        forward_points_to_child,
                    });
                    frontier.push_back(child);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            return Err(Error::InvalidTriangulation(
                "vertex-class graph is disconnected".into(),
            ));
        }

        let mut edge_generator = vec![None; eclasses.len()];
        let mut generator_edges = Vec::new();
        for (e, tree) in in_tree.iter().enumerate() {
            if !tree {
                edge_generator[e] = Some(generator_edges.len());
                generator_edges.push(e);
            }
        }

        // Letter of each tetrahedron edge: its class and whether the local
        // low-to-high direction realizes the class's canonical direction.
        let mut member_letter = vec![(0usize, true); 6 * tri.num_tetrahedra()];
        for ec in &eclasses {
            for a in &ec.arrows {
                member_letter[a.tet * 6 + a.edge] = (ec.index, a.forward);
            }
        }

        // One relator per glued face pair, walked around its triangle.
        let mut relators = Vec::new();
        for t in 0..tri.num_tetrahedra() {
            for f in 0..4 {
                let g = tri.gluing(t, f);
                if (g.tet, g.perm.apply(f)) < (t, f) {
                    continue; // counted from the other side
                }
                let verts: Vec<usize> = (0..4).filter(|v| *v != f).collect();
                let mut word = Word::identity();
                for i in 0..3 {
                    let (x, y) = (verts[i], verts[(i + 1) % 3]);
                    let (class, fwd) = member_letter[t * 6 + edge_index(x, y)];
                    if let Some(generator) = edge_generator[class] {
                        let realizes_forward = (x < y) == fwd;
                        word.push(Letter { generator, inverse: !realizes_forward });
                    }
                }
                relators.push(word);
            }
        }

        Ok(Presentation {
            num_vertex_classes: nv,
            num_edge_classes: eclasses.len(),
            edge_generator,
            generator_edges,
            tree_parent,
            edge_ends,
            relators,
        })
    }

    pub fn num_generators(&self) -> usize {
        self.generator_edges.len()
    }

    pub fn num_vertex_classes(&self) -> usize {
        self.num_vertex_classes
    }

    pub fn num_edge_classes(&self) -> usize {
        self.num_edge_classes
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Edge class carrying generator `k`.
    pub fn generator_edge(&self, k: usize) -> usize {
        self.generator_edges[k]
    }

    /// Generator carried by an edge class, if it is not a tree edge.
    pub fn edge_generator(&self, edge_class: usize) -> Option<usize> {
        self.edge_generator[edge_class]
    }

    /// (tail, head) vertex classes of an edge class.
    pub fn edge_ends(&self, edge_class: usize) -> (usize, usize) {
        self.edge_ends[edge_class]
    }

    /// The based loop of an edge class, written in the collapsed
    /// presentation where tree edges carry no letters. `None` when the edge
    /// joins two distinct vertex classes: it is not a loop and the
    /// admissibility condition is vacuous for it. Tree edges always join
    /// distinct classes, so every returned word is a single generator.
    pub fn edge_loop_word(&self, edge_class: usize) -> Option<Word> {
        let (tail, head) = self.edge_ends[edge_class];
        if tail != head {
            return None;
        }
        let generator = self.edge_generator[edge_class]
            .expect("loop edges cannot lie in the spanning tree");
        let mut w = Word::identity();
        w.push(Letter { generator, inverse: false });
        Some(w)
    }

    /// Tree path between two vertex classes as `(edge class, forward)`
    /// traversal steps.
    pub fn tree_path(&self, from: usize, to: usize) -> Vec<(usize, bool)> {
        let chain = |mut c: usize| {
            let mut path = vec![c];
            while let Some(step) = &self.tree_parent[c] {
                c = step.parent;
                path.push(c);
            }
            path
        };
        let (up_from, up_to) = (chain(from), chain(to));
        // Last common vertex of the two root chains.
        let mut lca = *up_from.last().unwrap();
        let mut i = up_from.len();
        let mut j = up_to.len();
        while i > 0 && j > 0 && up_from[i - 1] == up_to[j - 1] {
            lca = up_from[i - 1];
            i -= 1;
            j -= 1;
        }
        let mut steps = Vec::new();
        let mut c = from;
        while c != lca {
            let step = self.tree_parent[c].as_ref().unwrap();
            // Climbing child -> parent traverses against the direction that
            // points to the child.
            steps.push((step.edge_class, !step.forward_points_to_child));
            c = step.parent;
        }
        let mut down = Vec::new();
        let mut d = to;
        while d != lca {
            let step = self.tree_parent[d].as_ref().unwrap();
            down.push((step.edge_class, step.forward_points_to_child));
            d = step.parent;
        }
        down.reverse();
        steps.extend(down);
        steps
    }
}

#[derive(Serialize, Deserialize)]
struct RepresentationWire {
    generators: BTreeMap<String, [[f64; 2]; 4]>,
}

/// Images of the presentation's generators in PSL(2, C).
#[derive(Debug, Clone)]
pub struct Representation {
    images: Vec<Mobius>,
}

impl Representation {
    pub fn new(images: Vec<Mobius>) -> Representation {
        Representation { images }
    }

    pub fn trivial(num_generators: usize) -> Representation {
        Representation { images: vec![Mobius::identity(); num_generators] }
    }

    pub fn num_generators(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, k: usize) -> &Mobius {
        &self.images[k]
    }

    pub fn evaluate(&self, word: &Word) -> Mobius {
        let mut out = Mobius::identity();
        for l in word.letters() {
            let m = &self.images[l.generator];
            out = if l.inverse { out * m.inverse() } else { out * *m };
        }
        out
    }

    /// Parse `{"generators": {"g0": [[re,im],[re,im],[re,im],[re,im]], ...}}`
    /// with row-major matrix entries. Matrices are renormalized to
    /// determinant one.
    pub fn from_json_str(text: &str) -> Result<Representation> {
        let wire: RepresentationWire =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = wire.generators.len();
        let mut images = vec![None; n];
        for (name, entries) in &wire.generators {
            let index: usize = name
                .strip_prefix('g')
                .and_then(|d| d.parse().ok())
                .filter(|i| *i < n)
                .ok_or_else(|| {
                    Error::BadRepresentation(format!(
                        "generator name {name:?} (expected g0..g{})",
                        n - 1
                    ))
                })?;
            let m: Vec<Complex64> =
                entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            images[index] = Some(
                Mobius::new(m[0], m[1], m[2], m[3])
                    .map_err(|e| Error::BadRepresentation(format!("{name}: {e}")))?,
            );
        }
        let images: Vec<Mobius> = images
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::BadRepresentation("duplicate generator name".into()))?;
        Ok(Representation { images })
    }

    pub fn to_json_string(&self) -> String {
        let generators: BTreeMap<String, [[f64; 2]; 4]> = self
            .images
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let e = m.entries();
                (format!("g{k}"), [
                    [e[0].re, e[0].im],
                    [e[1].re, e[1].im],
                    [e[2].re, e[2].im],
                    [e[3].re, e[3].im],
                ])
            })
            .collect();
        serde_json::to_string(&RepresentationWire { generators })
            .expect("representation serialization cannot fail")
    }
}

/// Deviation of every relator image from the identity, plus the distance of
/// every loop edge's image from the identity (the admissibility condition:
/// spinning needs each loop edge to act nontrivially).
#[derive(Debug, Clone)]
pub struct RepresentationCheck {
    pub relator_deviations: Vec<f64>,
    pub max_deviation: f64,
    /// `(edge class, psl distance from identity)` for each loop edge.
    pub loop_edge_distances: Vec<(usize, f64)>,
    /// Infinity when the triangulation has no loop edges.
    pub min_loop_edge_distance: f64,
}

impl RepresentationCheck {
    /// Relators hold within `tol` and every loop edge acts nontrivially.
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol
            && self.min_loop_edge_distance >= tolerances::EDGE_NONTRIVIALITY
    }

    /// Loop edge classes whose image is within noise of the identity.
    pub fn failing_loop_edges(&self) -> Vec<usize> {
        self.loop_edge_distances
            .iter()
            .filter(|(_, d)| *d < tolerances::EDGE_NONTRIVIALITY)
            .map(|(e, _)| *e)
            .collect()
    }
}

pub fn check_representation(
    presentation: &Presentation,
    rep: &Representation,
) -> Result<RepresentationCheck> {
    if rep.num_generators() != presentation.num_generators() {
        return Err(Error::BadRepresentation(format!(
            "representation has {} generators, presentation needs {}",
            rep.num_generators(),
            presentation.num_generators()
        )));
    }
    let relator_deviations: Vec<f64> = presentation
        .relators()
        .iter()
        .map(|w| rep.evaluate(w).distance_from_identity())
        .collect();
    let max_deviation = relator_deviations.iter().cloned().fold(0.0, f64::max);
    let loop_edge_distances: Vec<(usize, f64)> = (0..presentation.num_edge_classes())
        .filter_map(|e| {
            presentation
                .edge_loop_word(e)
                .map(|w| (e, rep.evaluate(&w).distance_from_identity()))
        })
        .collect();
    let min_loop_edge_distance = loop_edge_distances
        .iter()
        .map(|(_, d)| *d)
        .fold(f64::INFINITY, f64::min);
    Ok(RepresentationCheck {
        relator_deviations,
        max_deviation,
        loop_edge_distances,
        min_loop_edge_distance,
    })
}

/// Default admissibility threshold for input representations.
pub fn input_tolerance() -> f64 {
    tolerances::RELATOR_INPUT
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::tests::tetrahedron_double;

    #[test]
    fn word_reduction_and_display() {
        let mut w = Word::identity();
        w.push(Letter { generator: 0, inverse: false });
        w.push(Letter { generator: 1, inverse: true });
        w.push(Letter { generator: 1, inverse: false });
        w.push(Letter { generator: 0, inverse: true });
        assert!(w.is_empty());
        assert_eq!(w.to_string(), "1");

        let w = Word::parse("g0 g2^-1 g0", 3).unwrap();
        assert_eq!(w.to_string(), "g0 g2^-1 g0");
        assert_eq!(w.inverse().to_string(), "g0^-1 g2 g0^-1");
        assert_eq!(w.concat(&w.inverse()).to_string(), "1");
    }

    #[test]
    fn word_parse_rejects_unknown_names() {
        assert!(Word::parse("g3", 3).is_err());
        assert!(Word::parse("h0", 3).is_err());
        assert!(Word::parse("1", 3).unwrap().is_empty());
    }

    #[test]
    fn double_presents_the_trivial_group() {
        let tri = tetrahedron_double();
        let pres = Presentation::from_triangulation(&tri).unwrap();
        // 4 vertex classes, 6 edge classes: 3 tree edges, 3 generators.
        assert_eq!(pres.num_vertex_classes(), 4);
        assert_eq!(pres.num_generators(), 3);
        assert_eq!(pres.relators().len(), 4);
        // Three relators are single generators (killing everything), the
        // fourth is the triangle word.
        let mut single: Vec<usize> = pres
            .relators()
            .iter()
            .filter(|w| w.len() == 1)
            .map(|w| w.letters()[0].generator)
            .collect();
        single.sort_unstable();
        assert_eq!(single, vec![0, 1, 2]);
        assert_eq!(pres.relators().iter().filter(|w| w.len() == 3).count(), 1);
    }

    #[test]
    fn tree_paths_connect_and_cancel() {
        let tri = tetrahedron_double();
        let pres = Presentation::from_triangulation(&tri).unwrap();
        for from in 0..4 {
            for to in 0..4 {
                let path = pres.tree_path(from, to);
                let back = pres.tree_path(to, from);
                assert_eq!(path.len(), back.len());
                // Reversing the path flips every traversal direction.
                for (a, b) in path.iter().zip(back.iter().rev()) {
                    assert_eq!(a.0, b.0);
                    assert_eq!(a.1, !b.1);
                }
                if from == to {
                    assert!(path.is_empty());
                }
            }
        }
    }

    #[test]
    fn trivial_representation_passes_all_relators() {
        let tri = tetrahedron_double();
        let pres = Presentation::from_triangulation(&tri).unwrap();
        let rep = Representation::trivial(pres.num_generators());
        let check = check_representation(&pres, &rep).unwrap();
        assert_eq!(check.relator_deviations.len(), 4);
        assert!(check.max_deviation < 1e-15);
        assert!(check.passes(1e-8));
    }

    #[test]
    fn violating_representation_is_caught() {
        let tri = tetrahedron_double();
        let pres = Presentation::from_triangulation(&tri).unwrap();
        // A single-letter relator makes any non-identity image fail.
        let shift = Mobius::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let rep = Representation::new(vec![shift; 3]);
        let check = check_representation(&pres, &rep).unwrap();
        assert!(check.max_deviation > 1.0);
        assert!(!check.passes(1e-8));
    }

    #[test]
    fn representation_json_round_trip() {
        let m = Mobius::new(
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        )
        .unwrap();
        let rep = Representation::new(vec![Mobius::identity(), m]);
        let text = rep.to_json_string();
        let back = Representation::from_json_str(&text).unwrap();
        assert_eq!(back.num_generators(), 2);
        for k in 0..2 {
            assert!(rep.image(k).psl_distance(back.image(k)) < 1e-15);
        }
        assert_eq!(text, back.to_json_string());
    }

    #[test]
    fn representation_json_requires_contiguous_names() {
        let text = r#"{"generators":{"g0":[[1,0],[0,0],[0,0],[1,0]],
                        "g2":[[1,0],[0,0],[0,0],[1,0]]}}"#;
        assert!(Representation::from_json_str(text).is_err());
    }

    #[test]
    fn word_evaluation_respects_inverses() {
        let m = Mobius::new(
            Complex64::new(3.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let rep = Representation::new(vec![m]);
        let w = Word::parse("g0 g0^-1", 1).unwrap();
        assert!(rep.evaluate(&w).distance_from_identity() < 1e-15);
        let w2 = Word::parse("g0 g0", 1).unwrap();
        let direct = m * m;
        assert!(rep.evaluate(&w2).psl_distance(&direct) < 1e-12);
    }
}
