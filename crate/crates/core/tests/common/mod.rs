//! Oracles for the integration suite.
//!
//! Every expected value in the integration tests is either recomputed here by
//! a method independent of the code under test (quadrature instead of series,
//! naive label propagation instead of union-find arrows, an around-edge walk
//! instead of the assembled incidence matrix, Smith reduction for homology)
//! or is a frozen output of one of these oracles.

#![allow(dead_code)]

use glueq::fundamental_group::Presentation;
use glueq::gluing::ShapeAssignment;
use glueq::triangulation::{edge_index, Triangulation, EDGE_VERTICES, QUAD_FACING_EDGES};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn load_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("cannot read fixture {name}: {e}"))
}

pub fn triangulation(name: &str) -> Triangulation {
    Triangulation::from_json_str(&load_fixture(name)).expect("fixture parses")
}

pub fn representation(name: &str) -> glueq::fundamental_group::Representation {
    glueq::fundamental_group::Representation::from_json_str(&load_fixture(name))
        .expect("fixture parses")
}

// ---------------------------------------------------------------------------
// Quadrature oracle for the Lobachevsky function.

/// Adaptive Simpson with Richardson correction. `f` must be smooth on [a, b].
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        m: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, m, b, fa, fm, fb, whole, tol, 48)
}

/// Integral of ln(2 sin t) over [0, x] for x in [0, pi/2]. The endpoint log
/// singularity is split off in closed form,
///   ln(2 sin t) = ln(2t) + ln(sin(t)/t),
/// leaving a smooth integrand for the quadrature.
fn log_two_sin_integral_half(x: f64) -> f64 {
    assert!((0.0..=PI / 2.0 + 1e-12).contains(&x));
    if x == 0.0 {
        return 0.0;
    }
    let smooth = |t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() };
    x * ((2.0 * x).ln() - 1.0) + adaptive_simpson(&smooth, 0.0, x, 1e-13)
}

/// Integral of ln|2 sin t| over [0, c] for c in [0, pi]; the upper-end
/// singularity at pi is handled by reflecting t -> pi - t.
fn log_two_sin_integral(c: f64) -> f64 {
    let h = PI / 2.0;
    if c <= h {
        log_two_sin_integral_half(c)
    } else {
        2.0 * log_two_sin_integral_half(h) - log_two_sin_integral_half(PI - c)
    }
}

/// -integral of ln|2 sin t| over [0, theta], by direct quadrature. The range
/// is cut at the multiples of pi where the integrand is singular; negative
/// theta flips via the substitution t -> -t (the integrand is even).
pub fn lobachevsky_quadrature(theta: f64) -> f64 {
    let a = theta.abs();
    let pieces = (a / PI).floor();
    let rem = (a - pieces * PI).clamp(0.0, PI);
    let total = pieces * log_two_sin_integral(PI) + log_two_sin_integral(rem);
    -theta.signum() * total
}

// ---------------------------------------------------------------------------
// Identification-class oracle: naive label propagation until stable.

fn propagate(labels: &mut [usize], pairs: &[(usize, usize)]) {
    loop {
        let mut changed = false;
        for &(x, y) in pairs {
            let m = labels[x].min(labels[y]);
            if labels[x] != m || labels[y] != m {
                labels[x] = m;
                labels[y] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn partition_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (slot, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(slot);
    }
    groups.into_values().collect()
}

/// Edge identification classes as sorted sets of slots `tet * 6 + edge`,
/// rebuilt from the raw gluing maps alone.
pub fn edge_partition_oracle(tri: &Triangulation) -> Vec<Vec<usize>> {
    let n = tri.num_tetrahedra();
    let mut pairs = Vec::new();
    for t in 0..n {
        for f in 0..4 {
            let g = tri.gluing(t, f);
            for e in 0..6 {
                let [a, b] = EDGE_VERTICES[e];
                if a == f || b == f {
                    continue; // edge not on face f
                }
                let e2 = edge_index(g.perm.apply(a), g.perm.apply(b));
                pairs.push((t * 6 + e, g.tet * 6 + e2));
            }
        }
    }
    let mut labels: Vec<usize> = (0..6 * n).collect();
    propagate(&mut labels, &pairs);
    partition_from_labels(&labels)
}

/// Vertex identification classes as sorted sets of corners `tet * 4 + v`.
pub fn vertex_partition_oracle(tri: &Triangulation) -> Vec<Vec<usize>> {
    let n = tri.num_tetrahedra();
    let mut pairs = Vec::new();
    for t in 0..n {
        for f in 0..4 {
            let g = tri.gluing(t, f);
            for v in 0..4 {
                if v != f {
                    pairs.push((t * 4 + v, g.tet * 4 + g.perm.apply(v)));
                }
            }
        }
    }
    let mut labels: Vec<usize> = (0..4 * n).collect();
    propagate(&mut labels, &pairs);
    partition_from_labels(&labels)
}

// ---------------------------------------------------------------------------
// Around-edge walk oracle.

/// Ordered product of the shapes facing one edge class, recomputed by walking
/// around the edge through the face gluings. Never touches the assembled
/// equation rows.
pub fn around_edge_product(
    tri: &Triangulation,
    shapes: &ShapeAssignment,
    class_index: usize,
) -> Complex64 {
    let class = &tri.edge_classes()[class_index];
    let (t0, e0) = class.representative();
    let [a0, b0] = EDGE_VERTICES[e0];
    let exit0 = (0..4).find(|v| *v != a0 && *v != b0).unwrap();

    let (mut t, mut a, mut b, mut exit) = (t0, a0, b0, exit0);
    let mut product = Complex64::new(1.0, 0.0);
    let mut steps = 0usize;
    loop {
        let e = edge_index(a, b);
        let q = (0..3).position(|s| QUAD_FACING_EDGES[s].contains(&e)).unwrap();
        product *= shapes.triples()[t].z[q];
        steps += 1;
        assert!(steps <= 6 * tri.num_tetrahedra(), "walk failed to close");

        let g = tri.gluing(t, exit);
        let (na, nb) = (g.perm.apply(a), g.perm.apply(b));
        let entered = g.perm.apply(exit);
        let next_exit = (0..4).find(|v| *v != na && *v != nb && *v != entered).unwrap();
        (t, a, b, exit) = (g.tet, na, nb, next_exit);
        if (t, edge_index(a, b), exit) == (t0, e0, exit0) {
            break;
        }
    }
    assert_eq!(steps, class.degree(), "walk length disagrees with the class degree");
    product
}

// ---------------------------------------------------------------------------
// Homology oracle: Smith reduction of the relator exponent matrix.

/// Exponent-sum matrix of the relators, rows indexed by relator and columns
/// by generator.
pub fn relator_exponents(pres: &Presentation) -> Vec<Vec<i128>> {
    pres.relators()
        .iter()
        .map(|w| {
            let mut row = vec![0i128; pres.num_generators()];
            for l in w.letters() {
                row[l.generator] += if l.inverse { -1 } else { 1 };
            }
            row
        })
        .collect()
}

/// Diagonal of the Smith normal form of an integer matrix, length = number
/// of columns (missing pivots are zeros).
pub fn smith_diagonal(mut a: Vec<Vec<i128>>, cols: usize) -> Vec<i128> {
    let rows = a.len();
    let mut t = 0usize;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if a[r][c] != 0
                    && best.map_or(true, |(br, bc)| a[r][c].abs() < a[br][bc].abs())
                {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        a.swap(t, br);
        if bc != t {
            for row in a.iter_mut() {
                row.swap(t, bc);
            }
        }
        let mut dirty = true;
        while dirty {
            dirty = false;
            for r in t + 1..rows {
                if a[r][t] != 0 {
                    let k = a[r][t] / a[t][t];
                    for c in 0..cols {
                        a[r][c] -= k * a[t][c];
                    }
                    if a[r][t] != 0 {
                        a.swap(t, r);
                        dirty = true;
                    }
                }
            }
            for c in t + 1..cols {
                if a[t][c] != 0 {
                    let k = a[t][c] / a[t][t];
                    for row in a.iter_mut() {
                        row[c] -= k * row[t];
                    }
                    if a[t][c] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, c);
                        }
                        dirty = true;
                    }
                }
            }
        }
        // The pivot must divide every remaining entry; absorb a bad row and
        // redo this pivot if not.
        let p = a[t][t];
        let mut fixed = true;
        'scan: for r in t + 1..rows {
            for c in t + 1..cols {
                if a[r][c] % p != 0 {
                    for cc in 0..cols {
                        let add = a[r][cc];
                        a[t][cc] += add;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if a[t][t] < 0 {
            for row in a.iter_mut() {
                row[t] = -row[t];
            }
        }
        t += 1;
    }
    let mut diag = vec![0i128; cols];
    for i in 0..rows.min(cols) {
        diag[i] = a[i][i];
    }
    diag
}

/// Human-readable abelian group from a Smith diagonal: nontrivial torsion
/// factors then free rank.
pub fn group_from_diagonal(diag: &[i128]) -> String {
    let mut parts: Vec<String> = diag
        .iter()
        .filter(|&&d| d > 1)
        .map(|d| format!("Z/{d}"))
        .collect();
    parts.extend(diag.iter().filter(|&&d| d == 0).map(|_| "Z".to_string()));
    if parts.is_empty() {
        "trivial".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Sample standard deviation.
pub fn stdev(xs: &[f64]) -> f64 {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
