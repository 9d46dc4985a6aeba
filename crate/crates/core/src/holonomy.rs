//! Holonomy reconstruction: develop a solution of the gluing equations into
//! an equivariant picture on the ideal boundary and read back a
//! representation of the fundamental group, one image per generator.
//!
//! The developed tetrahedra tile a copy of the complex cut along non-tree
//! faces; crossing such a face costs a fixed transformation. Walking an
//! edge loop through the universal cover and tracking the accumulated
//! transformation recovers the holonomy of that loop.

use crate::fundamental_group::{Presentation, Representation, Word};
use crate::geometry::{cross_ratio_solve, IdealPoint, Mobius};
use crate::gluing::{GluingSystem, ShapeAssignment};
use crate::rng::SplitMix64;
use crate::tolerances;
use crate::triangulation::{edge_index, Triangulation, EDGE_VERTICES};
use crate::{Error, Result};
use num_complex::Complex64;

/// A solution developed through a dual spanning tree: ideal positions of
/// every corner, plus the crossing transformation of every face (identity
/// on tree faces).
pub struct Developed {
    corner_points: Vec<[IdealPoint; 4]>,
    face_holonomy: Vec<[Mobius; 4]>,
    tree: Vec<[bool; 4]>,
}

impl Developed {
    pub fn corner_point(&self, tet: usize, v: usize) -> &IdealPoint {
        &self.corner_points[tet][v]
    }

    pub fn face_holonomy(&self, tet: usize, f: usize) -> &Mobius {
        &self.face_holonomy[tet][f]
    }

    pub fn is_tree_face(&self, tet: usize, f: usize) -> bool {
        self.tree[tet][f]
    }
}

/// Place every tetrahedron in the ideal boundary, consistently across tree
/// faces. Tetrahedron 0 is anchored at (0, infinity, 1, solved).
pub fn develop(tri: &Triangulation, shapes: &ShapeAssignment) -> Result<Developed> {
    if shapes.len() != tri.num_tetrahedra() {
        return Err(Error::BadSolution(format!(
            "assignment has {} tetrahedra, triangulation has {}",
            shapes.len(),
            tri.num_tetrahedra()
        )));
    }
    let system = GluingSystem::new(tri);
    let residual = system.max_residual(shapes);
    if residual > tolerances::DEVELOP_PRECONDITION {
        return Err(Error::BadSolution(format!(
            "gluing residual {residual:.3e} too large to develop"
        )));
    }

    let n = tri.num_tetrahedra();
    let tree = tri.dual_spanning_tree();
    let mut corner_points: Vec<Option<[IdealPoint; 4]>> = vec![None; n];

    // Anchor tetrahedron 0.
    let z0 = shapes.triples()[0].z[0];
    let anchor = [
        Some(IdealPoint::finite(Complex64::new(0.0, 0.0))),
        Some(IdealPoint::infinity()),
        Some(IdealPoint::finite(Complex64::new(1.0, 0.0))),
        None,
    ];
    let fourth = cross_ratio_solve(anchor, z0)?;
    corner_points[0] = Some([
        anchor[0].unwrap(),
        anchor[1].unwrap(),
        anchor[2].unwrap(),
        fourth,
    ]);

    // Spread through tree faces.
    let mut frontier = std::collections::VecDeque::from([0usize]);
    while let Some(t) = frontier.pop_front() {
        let points = corner_points[t].unwrap();
        for f in 0..4 {
            if !tree[t][f] {
                continue;
            }
            let g = tri.gluing(t, f);
            if corner_points[g.tet].is_some() {
                continue;
            }
            let f2 = g.perm.apply(f);
            let mut known: [Option<IdealPoint>; 4] = [None; 4];
            for v in 0..4 {
                if v != f {
                    known[g.perm.apply(v)] = Some(points[v]);
                }
            }
            debug_assert!(known[f2].is_none());
            let solved = cross_ratio_solve(known, shapes.triples()[g.tet].z[0])?;
            let mut placed = [IdealPoint::infinity(); 4];
            for v in 0..4 {
                placed[v] = known[v].unwrap_or(solved);
            }
            corner_points[g.tet] = Some(placed);
            frontier.push_back(g.tet);
        }
    }
    let corner_points: Vec<[IdealPoint; 4]> =
        corner_points.into_iter().map(|p| p.expect("complex is connected")).collect();

    // Crossing transformation of every face: the map matching a face's
    // corners onto its glued partner's corners.
    let mut face_holonomy = vec![[Mobius::identity(); 4]; n];
    for t in 0..n {
        for f in 0..4 {
            if tree[t][f] {
                continue;
            }
            let g = tri.gluing(t, f);
            let mut source = Vec::with_capacity(3);
            let mut target = Vec::with_capacity(3);
            for v in 0..4 {
                if v != f {
                    source.push(corner_points[t][v]);
                    target.push(corner_points[g.tet][g.perm.apply(v)]);
                }
            }
            face_holonomy[t][f] = Mobius::from_correspondence(
                &[source[0], source[1], source[2]],
                &[target[0], target[1], target[2]],
            )?;
        }
    }

    Ok(Developed { corner_points, face_holonomy, tree })
}

/// A corner of the universal cover: which translate of the developed
/// complex, which tetrahedron, which vertex.
#[derive(Clone)]
struct CoverState {
    translate: Mobius,
    tet: usize,
    v: usize,
}

/// All corners around one vertex of the universal cover, found by crossing
/// faces from the seed corner. Corners are deduplicated per `(tet, v)`,
/// which is exact when every vertex link is a sphere; the returned defect
/// measures how inconsistent the deduplication was.
fn around_vertex(
    tri: &Triangulation,
    dev: &Developed,
    seed: CoverState,
) -> (Vec<CoverState>, f64) {
    let n = tri.num_tetrahedra();
    let mut found: Vec<Option<Mobius>> = vec![None; 4 * n];
    let mut order = Vec::new();
    let mut defect: f64 = 0.0;
    found[seed.tet * 4 + seed.v] = Some(seed.translate);
    order.push((seed.tet, seed.v));
    let mut frontier = std::collections::VecDeque::from([(seed.tet, seed.v)]);
    while let Some((t, v)) = frontier.pop_front() {
        let translate = found[t * 4 + v].unwrap();
        for f in 0..4 {
            if f == v {
                continue;
            }
            let g = tri.gluing(t, f);
            let next = (g.tet, g.perm.apply(v));
            let crossed = translate * dev.face_holonomy(t, f).inverse();
            match &found[next.0 * 4 + next.1] {
                Some(existing) => {
                    defect = defect.max(existing.psl_distance(&crossed));
                }
                None => {
                    found[next.0 * 4 + next.1] = Some(crossed);
                    order.push(next);
                    frontier.push_back(next);
                }
            }
        }
    }
    let states = order
        .into_iter()
        .map(|(t, v)| CoverState { translate: found[t * 4 + v].unwrap(), tet: t, v })
        .collect();
    (states, defect)
}

/// Walk in the universal cover, lifting edge traversals and reading off
/// deck transformations.
struct CoverWalker<'a> {
    tri: &'a Triangulation,
    dev: &'a Developed,
    /// Per tetrahedron edge: its class and whether low-to-high realizes the
    /// class's canonical direction.
    member_dir: Vec<(usize, bool)>,
    max_defect: f64,
}

impl<'a> CoverWalker<'a> {
    fn new(tri: &'a Triangulation, dev: &'a Developed) -> CoverWalker<'a> {
        let mut member_dir = vec![(0usize, true); 6 * tri.num_tetrahedra()];
        for ec in tri.edge_classes() {
            for a in &ec.arrows {
                member_dir[a.tet * 6 + a.edge] = (ec.index, a.forward);
            }
        }
        CoverWalker { tri, dev, member_dir, max_defect: 0.0 }
    }

    /// Lift one traversal of `edge_class` (forward or backward) from the
    /// cover vertex containing `state`; returns a corner of the endpoint.
    fn traverse(&mut self, state: CoverState, edge_class: usize, forward: bool) -> Result<CoverState> {
        let (states, defect) = around_vertex(self.tri, self.dev, state);
        self.max_defect = self.max_defect.max(defect);
        for s in &states {
            for w in 0..4 {
                if w == s.v {
                    continue;
                }
                let (class, fwd) = self.member_dir[s.tet * 6 + edge_index(s.v, w)];
                if class == edge_class && ((s.v < w) == fwd) == forward {
                    return Ok(CoverState { translate: s.translate, tet: s.tet, v: w });
                }
            }
        }
        Err(Error::BadSolution(format!(
            "edge class {edge_class} is not incident to the current vertex"
        )))
    }

    /// Deck transformation of the cover vertex containing `state`, relative
    /// to the base vertex at corner (0, 0).
    fn deck_element(&mut self, state: CoverState) -> Result<Mobius> {
        let (states, defect) = around_vertex(self.tri, self.dev, state);
        self.max_defect = self.max_defect.max(defect);
        states
            .iter()
            .find(|s| s.tet == 0 && s.v == 0)
            .map(|s| s.translate)
            .ok_or_else(|| {
                Error::BadSolution("walk did not return over the base vertex".into())
            })
    }
}

/// A representation read back from a developed solution.
pub struct RecoveredRepresentation {
    pub rep: Representation,
    pub relator_deviations: Vec<f64>,
    pub max_relator_deviation: f64,
    /// Worst inconsistency seen while walking vertex links; near zero for
    /// manifold (sphere-link) complexes.
    pub link_defect: f64,
    /// Largest distance of any shape from the real line.
    pub flatness: f64,
}

/// Recover the holonomy representation of a solution on the presentation's
/// generators: for each generator, lift its loop (tree path, edge, tree
/// path back) through the universal cover and read the deck transformation.
pub fn recover_representation(
    tri: &Triangulation,
    pres: &Presentation,
    shapes: &ShapeAssignment,
) -> Result<RecoveredRepresentation> {
    let dev = develop(tri, shapes)?;
    let mut walker = CoverWalker::new(tri, &dev);
    let base_class = 0usize;
    let mut images = Vec::with_capacity(pres.num_generators());
    for k in 0..pres.num_generators() {
        let edge = pres.generator_edge(k);
        let (tail, head) = pres.edge_ends(edge);
        let mut state = CoverState { translate: Mobius::identity(), tet: 0, v: 0 };
        for (e, fwd) in pres.tree_path(base_class, tail) {
            state = walker.traverse(state, e, fwd)?;
        }
        state = walker.traverse(state, edge, true)?;
        for (e, fwd) in pres.tree_path(head, base_class) {
            state = walker.traverse(state, e, fwd)?;
        }
        images.push(walker.deck_element(state)?);
    }
    let rep = Representation::new(images);
    let check = crate::fundamental_group::check_representation(pres, &rep)?;
    Ok(RecoveredRepresentation {
        rep,
        max_relator_deviation: check.max_deviation,
        relator_deviations: check.relator_deviations,
        link_defect: walker.max_defect,
        flatness: shapes.flatness(),
    })
}

/// How two representations compare under the trace battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyVerdict {
    /// Traces match under a consistent lift and a representation is
    /// irreducible: conjugate in PSL(2, C).
    Conjugate,
    /// Some trace differs: not conjugate.
    Distinct,
    /// Traces match but both representations look reducible, where trace
    /// data cannot separate conjugacy classes.
    ReducibleInconclusive,
}

#[derive(Debug, Clone)]
pub struct ConjugacyReport {
    pub verdict: ConjugacyVerdict,
    /// Smallest over sign lifts of the largest relative trace gap.
    pub trace_gap: f64,
    pub reducible_a: bool,
    pub reducible_b: bool,
}

/// Compare two representations by evaluating traces over a word battery:
/// the generators, all ordered products of two generators, and a seeded
/// sample of random short words. Signs are resolved by searching all
/// consistent lifts of the generators.
pub fn conjugacy_check(
    a: &Representation,
    b: &Representation,
    seed: u64,
) -> Result<ConjugacyReport> {
    let n = a.num_generators();
    if b.num_generators() != n {
        return Err(Error::BadRepresentation(format!(
            "generator counts differ: {} vs {}",
            n,
            b.num_generators()
        )));
    }
    if n == 0 {
        return Ok(ConjugacyReport {
            verdict: ConjugacyVerdict::Conjugate,
            trace_gap: 0.0,
            reducible_a: true,
            reducible_b: true,
        });
    }
    if n >= 20 {
        return Err(Error::BadRepresentation(
            "sign-lift search supports at most 19 generators".into(),
        ));
    }

    let mut battery: Vec<Word> = Vec::new();
    for i in 0..n {
        battery.push(Word::parse(&format!("g{i}"), n)?);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                battery.push(Word::parse(&format!("g{i} g{j}"), n)?);
            }
        }
    }
    let mut rng = SplitMix64::new(seed);
    for _ in 0..16 {
        let len = 4 + (rng.next_u64() % 5) as usize;
        let mut w = Word::identity();
        for _ in 0..len {
            let r = rng.next_u64();
            w.push(crate::fundamental_group::Letter {
                generator: (r % n as u64) as usize,
                inverse: (r >> 32) & 1 == 1,
            });
        }
        battery.push(w);
    }

    // Trace, sign parity per generator, per word.
    struct Row {
        tr_a: Complex64,
        tr_b: Complex64,
        parity: u32,
    }
    let rows: Vec<Row> = battery
        .iter()
        .map(|w| {
            let mut parity = 0u32;
            for l in w.letters() {
                parity ^= 1 << l.generator;
            }
            Row { tr_a: a.evaluate(w).trace(), tr_b: b.evaluate(w).trace(), parity }
        })
        .collect();

    let mut best_gap = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let mut gap: f64 = 0.0;
        for row in &rows {
            let sign = if (mask & row.parity).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            let scale = row.tr_a.norm().max(row.tr_b.norm()).max(1.0);
            gap = gap.max((row.tr_a - row.tr_b * sign).norm() / scale);
        }
        best_gap = best_gap.min(gap);
    }

    let reducible_a = looks_reducible(a);
    let reducible_b = looks_reducible(b);
    let verdict = if best_gap > tolerances::CONJUGACY {
        ConjugacyVerdict::Distinct
    } else if reducible_a && reducible_b {
        ConjugacyVerdict::ReducibleInconclusive
    } else {
        ConjugacyVerdict::Conjugate
    };
    Ok(ConjugacyReport { verdict, trace_gap: best_gap, reducible_a, reducible_b })
}

/// All pairwise commutators have trace 2: every pair of generators shares a
/// fixed point, so the representation is (numerically) reducible or close
/// to it.
fn looks_reducible(rep: &Representation) -> bool {
    let n = rep.num_generators();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (*rep.image(i), *rep.image(j));
            let comm = a * b * a.inverse() * b.inverse();
            if (comm.trace() - 2.0).norm() > tolerances::CONJUGACY {
                return false;
            }
        }
    }
    true
}

/// Around-edge product of the developed crossing transformations: walking
/// the around-edge cycle of every edge class must compose to a
/// transformation fixing the developed edge, and for a valid solution the
/// total is the identity. Returns the worst deviation.
pub fn edge_cycle_defect(tri: &Triangulation, dev: &Developed) -> f64 {
    let mut worst: f64 = 0.0;
    for ec in tri.edge_classes() {
        // Follow the same pivot rule as the around-edge traversal, composing
        // crossing maps.
        let (t0, e0) = ec.representative();
        let [v0, w0] = EDGE_VERTICES[e0];
        let start_face = (0..4).find(|x| *x != v0 && *x != w0).unwrap();
        let mut total = Mobius::identity();
        let mut state = (t0, v0, w0, start_face);
        loop {
            let (t, v, w, pivot) = state;
            total = total * dev.face_holonomy(t, pivot).inverse();
            let g = tri.gluing(t, pivot);
            let (nv, nw) = (g.perm.apply(v), g.perm.apply(w));
            let entered = g.perm.apply(pivot);
            let next_pivot =
                (0..4).find(|x| *x != nv && *x != nw && *x != entered).unwrap();
            state = (g.tet, nv, nw, next_pivot);
            if state == (t0, v0, w0, start_face) {
                break;
            }
        }
        worst = worst.max(total.distance_from_identity());
    }
    worst
}
