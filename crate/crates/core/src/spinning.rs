//! Spun solutions of the gluing equations from a representation of the
//! fundamental group.
//!
//! Develop the tetrahedra through a dual spanning tree, assign each
//! developed vertex the group element connecting it to the base corner,
//! push one randomly placed ideal point per vertex class through those
//! elements, and read off each tetrahedron's shape as a cross-ratio. Edges
//! of the developed complex telescope around every edge class, so the
//! resulting shapes satisfy the gluing equations to the accuracy with which
//! the representation satisfies the relators.

use crate::fundamental_group::{Letter, Presentation, Representation, Word};
use crate::geometry::{cross_ratio, IdealPoint, Mobius, ShapeTriple};
use crate::gluing::{GluingSystem, ShapeAssignment};
use crate::rng::SplitMix64;
use crate::tolerances;
use crate::triangulation::{edge_index, Triangulation, UnionFind};
use crate::{par, Error, Result};

/// Combinatorial data reused across seeds and representations: the
/// developed-vertex structure and the connecting word of each vertex.
pub struct SpinSetup {
    /// Corner id `4 * tet + v` to developed-vertex id.
    corner_dvert: Vec<usize>,
    /// Connecting word of each developed vertex.
    dvert_words: Vec<Word>,
    /// Corner id to vertex class.
    corner_class: Vec<usize>,
    num_vertex_classes: usize,
}

impl SpinSetup {
    pub fn new(tri: &Triangulation, pres: &Presentation) -> SpinSetup {
        let n = tri.num_tetrahedra();
        let tree = tri.dual_spanning_tree();

        // Developed vertices: corners identified across tree faces only.
        let mut uf = UnionFind::new(4 * n);
        for t in 0..n {
            for f in 0..4 {
                if !tree[t][f] {
                    continue;
                }
                let g = tri.gluing(t, f);
                for v in 0..4 {
                    if v != f {
                        uf.unite(t * 4 + v, g.tet * 4 + g.perm.apply(v));
                    }
                }
            }
        }
        let mut corner_dvert = vec![usize::MAX; 4 * n];
        let mut dvert_corners: Vec<Vec<usize>> = Vec::new();
        for c in 0..4 * n {
            let root = uf.find(c);
            if corner_dvert[root] == usize::MAX {
                corner_dvert[root] = dvert_corners.len();
                dvert_corners.push(Vec::new());
            }
            let dv = corner_dvert[root];
            corner_dvert[c] = dv;
            dvert_corners[dv].push(c);
        }

        // Letter carried by each tetrahedron edge in its low-to-high
        // direction: None for tree edges of the vertex graph.
        let mut member_letter: Vec<Option<Letter>> = vec![None; 6 * n];
        for ec in tri.edge_classes() {
            let letter = pres.edge_generator(ec.index);
            for a in &ec.arrows {
                member_letter[a.tet * 6 + a.edge] = letter.map(|generator| Letter {
                    generator,
                    inverse: !a.forward,
                });
            }
        }

        // Connecting words by BFS over developed vertices from the base
        // corner (0, 0), stepping along tetrahedron edges.
        let mut dvert_words: Vec<Option<Word>> = vec![None; dvert_corners.len()];
        let base = corner_dvert[0];
        dvert_words[base] = Some(Word::identity());
        let mut frontier = std::collections::VecDeque::from([base]);
        while let Some(dv) = frontier.pop_front() {
            let word = dvert_words[dv].clone().unwrap();
            for &c in &dvert_corners[dv] {
                let (t, v) = (c / 4, c % 4);
                for w in 0..4 {
                    if w == v {
                        continue;
                    }
                    let ndv = corner_dvert[t * 4 + w];
                    if dvert_words[ndv].is_some() {
                        continue;
                    }
                    let mut next = word.clone();
                    if let Some(l) = member_letter[t * 6 + edge_index(v, w)] {
                        // The stored letter reads the edge low-to-high.
                        next.push(if v < w { l } else { l.inverted() });
                    }
                    dvert_words[ndv] = Some(next);
                    frontier.push_back(ndv);
                }
            }
        }
        let dvert_words: Vec<Word> = dvert_words
            .into_iter()
            .map(|w| w.expect("developed complex is connected"))
            .collect();

        let mut corner_class = vec![0usize; 4 * n];
        for vc in tri.vertex_classes() {
            for &c in &vc.corners {
                corner_class[c] = vc.index;
            }
        }
        let num_vertex_classes = corner_class.iter().max().unwrap() + 1;

        SpinSetup { corner_dvert, dvert_words, corner_class, num_vertex_classes }
    }

    pub fn num_developed_vertices(&self) -> usize {
        self.dvert_words.len()
    }

    pub fn num_vertex_classes(&self) -> usize {
        self.num_vertex_classes
    }

    pub fn corner_word(&self, tet: usize, v: usize) -> &Word {
        &self.dvert_words[self.corner_dvert[tet * 4 + v]]
    }

    pub fn corner_class(&self, tet: usize, v: usize) -> usize {
        self.corner_class[tet * 4 + v]
    }

    /// Image of every developed vertex's connecting word.
    pub fn transforms(&self, rep: &Representation) -> Vec<Mobius> {
        self.dvert_words.iter().map(|w| rep.evaluate(w)).collect()
    }
}

/// One spun solution.
#[derive(Debug, Clone)]
pub struct SpinOutcome {
    pub assignment: ShapeAssignment,
    /// The sampled ideal point of each vertex class.
    pub placement: Vec<IdealPoint>,
    /// Which placement attempt succeeded (0 for the first).
    pub attempt: u64,
    /// Largest gluing-equation residual of the solution.
    pub residual: f64,
}

/// Spinning engine for one triangulation.
pub struct Spinner<'a> {
    tri: &'a Triangulation,
    setup: SpinSetup,
    system: GluingSystem,
}

impl<'a> Spinner<'a> {
    pub fn new(tri: &'a Triangulation, pres: &Presentation) -> Spinner<'a> {
        Spinner { tri, setup: SpinSetup::new(tri, pres), system: GluingSystem::new(tri) }
    }

    pub fn setup(&self) -> &SpinSetup {
        &self.setup
    }

    pub fn system(&self) -> &GluingSystem {
        &self.system
    }

    /// Produce a spun solution for `rep`, deterministically in `seed`.
    ///
    /// Placements that degenerate (coincident corner points, shapes at 0 or
    /// 1) are rejected and redrawn, up to a fixed number of attempts.
    pub fn spin(&self, rep: &Representation, seed: u64) -> Result<SpinOutcome> {
        let transforms = self.setup.transforms(rep);
        self.spin_prepared(&transforms, seed)
    }

    /// Spin one solution per seed, in parallel when the `parallel` feature
    /// is enabled. Output order matches `seeds`.
    pub fn spin_batch(&self, rep: &Representation, seeds: &[u64]) -> Vec<Result<SpinOutcome>> {
        let transforms = self.setup.transforms(rep);
        par::map_slice(seeds, |&seed| self.spin_prepared(&transforms, seed))
    }

    /// Sequential twin of [`Spinner::spin_batch`], kept for benchmarking
    /// and verification of the parallel path.
    pub fn spin_batch_seq(
        &self,
        rep: &Representation,
        seeds: &[u64],
    ) -> Vec<Result<SpinOutcome>> {
        let transforms = self.setup.transforms(rep);
        seeds.iter().map(|&seed| self.spin_prepared(&transforms, seed)).collect()
    }

    fn spin_prepared(&self, transforms: &[Mobius], seed: u64) -> Result<SpinOutcome> {
        for attempt in 0..tolerances::PLACEMENT_ATTEMPTS {
            let mut rng = SplitMix64::for_attempt(seed, attempt);
            let placement: Vec<IdealPoint> = (0..self.setup.num_vertex_classes)
                .map(|_| random_ideal_point(&mut rng))
                .collect();
            if let Ok(assignment) = self.try_placement(transforms, &placement) {
                let residual = self.system.max_residual(&assignment);
                return Ok(SpinOutcome { assignment, placement, attempt, residual });
            }
        }
        Err(Error::Degenerate(format!(
            "no usable placement for seed {seed} after {} attempts",
            tolerances::PLACEMENT_ATTEMPTS
        )))
    }

    fn try_placement(
        &self,
        transforms: &[Mobius],
        placement: &[IdealPoint],
    ) -> Result<ShapeAssignment> {
        let n = self.tri.num_tetrahedra();
        let mut triples = Vec::with_capacity(n);
        for t in 0..n {
            let p: Vec<IdealPoint> = (0..4)
                .map(|v| {
                    let c = t * 4 + v;
                    transforms[self.setup.corner_dvert[c]]
                        .apply(&placement[self.setup.corner_class[c]])
                })
                .collect();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    if p[i].separation(&p[j]) < tolerances::PLACEMENT_SEPARATION {
                        return Err(Error::Degenerate(format!(
                            "corners {i} and {j} of tetrahedron {t} collide"
                        )));
                    }
                }
            }
            let z = cross_ratio(&p[0], &p[1], &p[2], &p[3])?;
            triples.push(ShapeTriple::from_slot0(z)?);
        }
        Ok(ShapeAssignment::from_triples(triples))
    }
}

/// Uniformly random point of the ideal boundary: a uniform point of the
/// unit sphere sent through stereographic projection, in homogeneous
/// coordinates so the pole is exact.
fn random_ideal_point(rng: &mut SplitMix64) -> IdealPoint {
    let h = 2.0 * rng.next_f64() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.next_f64();
    let r = (1.0 - h * h).max(0.0).sqrt();
    IdealPoint::from_homogeneous(
        num_complex::Complex64::new(r * phi.cos(), r * phi.sin()),
        num_complex::Complex64::new(1.0 - h, 0.0),
    )
    .expect("sphere point is never the zero vector")
}
