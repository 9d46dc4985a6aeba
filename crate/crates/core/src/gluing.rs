//! The multiplicative consistency system attached to a triangulation: one
//! equation per edge class, demanding that the shape parameters of the quads
//! around the edge multiply to one.

use crate::geometry::ShapeTriple;
use crate::tolerances;
use crate::triangulation::Triangulation;
use crate::{par, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One equation: exponent of each quad, indexed `3 * tet + slot`.
#[derive(Debug, Clone)]
pub struct EquationRow {
    pub edge_index: usize,
    pub exponents: Vec<u32>,
    pub degree: usize,
}

/// The full system for a triangulation.
#[derive(Debug, Clone)]
pub struct GluingSystem {
    num_tetrahedra: usize,
    rows: Vec<EquationRow>,
}

impl GluingSystem {
    pub fn new(tri: &Triangulation) -> Self {
        let quads = tri.normal_quads();
        let rows = tri
            .edge_classes()
            .iter()
            .map(|ec| EquationRow {
                edge_index: ec.index,
                exponents: quads.iter().map(|q| tri.quad_incidence(q, ec)).collect(),
                degree: ec.degree(),
            })
            .collect();
        GluingSystem { num_tetrahedra: tri.num_tetrahedra(), rows }
    }

    pub fn num_tetrahedra(&self) -> usize {
        self.num_tetrahedra
    }

    pub fn num_equations(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[EquationRow] {
        &self.rows
    }

    /// Left-hand side minus one for every equation.
    pub fn residuals(&self, shapes: &ShapeAssignment) -> Vec<Complex64> {
        let flat = shapes.slot_values();
        par::map_slice(&self.rows, |row| {
            let mut product = Complex64::new(1.0, 0.0);
            for (q, &c) in row.exponents.iter().enumerate() {
                if c > 0 {
                    product *= flat[q].powu(c);
                }
            }
            product - 1.0
        })
    }

    pub fn max_residual(&self, shapes: &ShapeAssignment) -> f64 {
        self.residuals(shapes).iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// Damped least-squares refinement of `start` toward a solution.
    ///
    /// Works in the variables `u_t = log z_t` (slot 0 of each tetrahedron),
    /// with residuals `exp(sum of exponent-weighted slot logs) - 1`. The
    /// linearized step is solved by SVD, so rank-deficient systems (every
    /// closed triangulation has dependent rows) are handled without fuss.
    pub fn newton_refine(
        &self,
        start: &ShapeAssignment,
        tol: f64,
        max_iterations: usize,
    ) -> Result<NewtonOutcome> {
        let n = self.num_tetrahedra;
        if start.len() != n {
            return Err(Error::BadSolution(format!(
                "assignment has {} tetrahedra, system has {n}",
                start.len()
            )));
        }
        let mut u: Vec<Complex64> = start.slot0s().iter().map(|z| z.ln()).collect();
        let mut residual = self.residual_vector(&u);
        let mut res_norm = max_abs(&residual);

        for iteration in 0..max_iterations {
            if res_norm < tol {
                return Ok(NewtonOutcome {
                    assignment: assignment_from_logs(&u)?,
                    iterations: iteration,
                    residual: res_norm,
                });
            }
            let jac = self.jacobian(&u);
            let svd = jac.svd(true, true);
            let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
            if s_max <= 0.0 {
                return Err(Error::Singular("zero linearization".into()));
            }
            let rhs = DVector::from_iterator(residual.len(), residual.iter().map(|r| -r));
            let delta = svd
                .solve(&rhs, s_max * 1e-13)
                .map_err(|e| Error::Singular(e.to_string()))?;

            // Backtracking line search on the max residual.
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let candidate: Vec<Complex64> =
                    u.iter().zip(delta.iter()).map(|(ui, di)| ui + di * scale).collect();
                if candidate.iter().all(log_in_safe_range) {
                    let cand_res = self.residual_vector(&candidate);
                    let cand_norm = max_abs(&cand_res);
                    if cand_norm < res_norm {
                        u = candidate;
                        residual = cand_res;
                        res_norm = cand_norm;
                        accepted = true;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if !accepted {
                return Err(Error::NoConvergence { iterations: iteration, residual: res_norm });
            }
        }
        if res_norm < tol {
            Ok(NewtonOutcome {
                assignment: assignment_from_logs(&u)?,
                iterations: max_iterations,
                residual: res_norm,
            })
        } else {
            Err(Error::NoConvergence { iterations: max_iterations, residual: res_norm })
        }
    }

    /// Residuals as functions of the log variables, consistent with
    /// [`GluingSystem::jacobian`].
    fn residual_vector(&self, u: &[Complex64]) -> Vec<Complex64> {
        let logs = slot_logs(u);
        par::map_slice(&self.rows, |row| {
            let sum: Complex64 = row
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(q, &c)| logs[q] * c as f64)
                .sum();
            sum.exp() - 1.0
        })
    }

    /// d residual / d u, one column per tetrahedron.
    fn jacobian(&self, u: &[Complex64]) -> DMatrix<Complex64> {
        let n = u.len();
        let logs = slot_logs(u);
        let zs: Vec<Complex64> = u.iter().map(|ui| ui.exp()).collect();
        let mut jac = DMatrix::zeros(self.rows.len(), n);
        for (r, row) in self.rows.iter().enumerate() {
            let sum: Complex64 = row
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(q, &c)| logs[q] * c as f64)
                .sum();
            let front = sum.exp();
            for t in 0..n {
                let z = zs[t];
                // d(log slot)/du for slots 0, 1, 2 at this tetrahedron.
                // The three add to zero: the slot logs sum to a constant.
                let d = [
                    Complex64::new(1.0, 0.0),
                    z / (1.0 - z),
                    1.0 / (z - 1.0),
                ];
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..3 {
                    let c = row.exponents[3 * t + s];
                    if c > 0 {
                        acc += d[s] * c as f64;
                    }
                }
                jac[(r, t)] = front * acc;
            }
        }
        jac
    }
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Principal logs of all three slots of every tetrahedron, quad order.
fn slot_logs(u: &[Complex64]) -> Vec<Complex64> {
    let mut logs = Vec::with_capacity(3 * u.len());
    for ui in u {
        let z = ui.exp();
        logs.push(*ui);
        logs.push(-(1.0 - z).ln());
        logs.push((1.0 - 1.0 / z).ln());
    }
    logs
}

fn log_in_safe_range(u: &Complex64) -> bool {
    u.re.abs() < 50.0 && u.is_finite()
}

fn assignment_from_logs(u: &[Complex64]) -> Result<ShapeAssignment> {
    ShapeAssignment::from_slot0(u.iter().map(|ui| ui.exp()).collect())
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub assignment: ShapeAssignment,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct AssignmentWire {
    shapes: Vec<[f64; 2]>,
}

/// A shape parameter for every tetrahedron.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeAssignment {
    triples: Vec<ShapeTriple>,
}

impl ShapeAssignment {
    /// Build from the slot-0 parameter of each tetrahedron; the other two
    /// slots are determined.
    pub fn from_slot0(values: Vec<Complex64>) -> Result<Self> {
        let triples = values
            .into_iter()
            .enumerate()
            .map(|(t, z)| {
                ShapeTriple::from_slot0(z).map_err(|e| {
                    Error::Degenerate(format!("tetrahedron {t}: {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ShapeAssignment { triples })
    }

    pub fn from_triples(triples: Vec<ShapeTriple>) -> Self {
        ShapeAssignment { triples }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[ShapeTriple] {
        &self.triples
    }

    pub fn slot0s(&self) -> Vec<Complex64> {
        self.triples.iter().map(|t| t.z[0]).collect()
    }

    /// All slot values in quad order `3 * tet + slot`.
    pub fn slot_values(&self) -> Vec<Complex64> {
        self.triples.iter().flat_map(|t| t.z).collect()
    }

    /// Signed volume: sum over tetrahedra of the volume determined by the
    /// shape triple.
    pub fn volume(&self) -> f64 {
        self.triples.iter().map(|t| t.volume()).sum()
    }

    /// Largest distance of any slot from the real line.
    pub fn flatness(&self) -> f64 {
        self.triples.iter().map(|t| t.flatness()).fold(0.0, f64::max)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let wire: AssignmentWire =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        ShapeAssignment::from_slot0(
            wire.shapes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        )
    }

    pub fn to_json_string(&self) -> String {
        let wire = AssignmentWire {
            shapes: self.triples.iter().map(|t| [t.z[0].re, t.z[0].im]).collect(),
        };
        serde_json::to_string(&wire).expect("assignment serialization cannot fail")
    }
}

/// True when every equation holds to within `tol`.
pub fn satisfies(system: &GluingSystem, shapes: &ShapeAssignment, tol: f64) -> bool {
    system.max_residual(shapes) <= tol
}

/// Default acceptance threshold for refined solutions.
pub fn default_tolerance() -> f64 {
    tolerances::RESIDUAL_ACCEPT
}
