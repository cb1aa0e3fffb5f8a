//! Exact polyhedral computation over rational H-representations.
//!
//! Polytopes are stored as `{x : G x ≤ h, C x = d}`. Equalities are eliminated
//! by an exact affine parametrisation ([`linalg::Reduction`]) before vertex
//! enumeration; LPs run a two-phase tableau simplex with Bland's rule.

pub mod linalg;
pub mod lp;
pub mod polygon;
pub mod vertex;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use lp::{solve_lp, LpResult, LpStatus, PreparedLp, Sense};
pub use polygon::{contains, polygon_area, Point2, Polygon2};
pub use vertex::{enumerate_vertices, Vertex};

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl ConstraintMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from equally long rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        let n = rows.len();
        Self { rows: n, cols, entries: rows.into_iter().flatten().collect() }
    }

    pub fn vstack(blocks: &[ConstraintMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        assert!(blocks.iter().all(|b| b.cols == cols), "column count mismatch in vstack");
        Self {
            rows: blocks.iter().map(|b| b.rows).sum(),
            cols,
            entries: blocks.iter().flat_map(|b| b.entries.iter().cloned()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn negated(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| -x).collect() }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows).map(|r| crate::rational::dot(self.row(r), x)).collect()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.to_rows())
    }
}

/// `{x : ineq_matrix·x ≤ ineq_rhs, eq_matrix·x = eq_rhs}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HPolytope {
    pub ineq_matrix: ConstraintMatrix,
    pub ineq_rhs: Vec<Rational>,
    pub eq_matrix: ConstraintMatrix,
    pub eq_rhs: Vec<Rational>,
}

impl HPolytope {
    pub fn new(
        ineq_matrix: ConstraintMatrix,
        ineq_rhs: Vec<Rational>,
        eq_matrix: ConstraintMatrix,
        eq_rhs: Vec<Rational>,
    ) -> Result<Self> {
        if ineq_rhs.len() != ineq_matrix.rows() {
            return Err(Error::DimensionMismatch { expected: ineq_matrix.rows(), got: ineq_rhs.len() });
        }
        if eq_rhs.len() != eq_matrix.rows() {
            return Err(Error::DimensionMismatch { expected: eq_matrix.rows(), got: eq_rhs.len() });
        }
        if eq_matrix.rows() > 0 && eq_matrix.cols() != ineq_matrix.cols() {
            return Err(Error::DimensionMismatch { expected: ineq_matrix.cols(), got: eq_matrix.cols() });
        }
        Ok(Self { ineq_matrix, ineq_rhs, eq_matrix, eq_rhs })
    }

    pub fn dim(&self) -> usize {
        self.ineq_matrix.cols()
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim()
            && self.ineq_matrix.mul_vec(x).iter().zip(&self.ineq_rhs).all(|(l, r)| l <= r)
            && self.eq_matrix.mul_vec(x).iter().zip(&self.eq_rhs).all(|(l, r)| l == r)
    }

    /// Largest violation over all rows (0 when `x` is a member).
    pub fn max_violation(&self, x: &[Rational]) -> Rational {
        let mut worst = Rational::zero();
        for (l, r) in self.ineq_matrix.mul_vec(x).iter().zip(&self.ineq_rhs) {
            let v = l - r;
            if v > worst {
                worst = v;
            }
        }
        for (l, r) in self.eq_matrix.mul_vec(x).iter().zip(&self.eq_rhs) {
            let v = (l - r).abs();
            if v > worst {
                worst = v;
            }
        }
        worst
    }
}

/// Linear map from the polytope's ambient space to the plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectionMap {
    pub matrix: ConstraintMatrix,
}

impl ProjectionMap {
    pub fn new(matrix: ConstraintMatrix) -> Result<Self> {
        if matrix.rows() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: matrix.rows() });
        }
        Ok(Self { matrix })
    }

    pub fn apply(&self, x: &[Rational]) -> Point2 {
        let v = self.matrix.mul_vec(x);
        let mut it = v.into_iter();
        Point2::new(it.next().unwrap_or_default(), it.next().unwrap_or_default())
    }

    /// Objective `d₀·row₀ + d₁·row₁`.
    pub fn directional_objective(&self, d0: &Rational, d1: &Rational) -> Vec<Rational> {
        (0..self.matrix.cols())
            .map(|k| d0 * self.matrix.get(0, k) + d1 * self.matrix.get(1, k))
            .collect()
    }
}

/// Applies `map` to every vertex and returns the exact convex hull.
pub fn project_hull(vertices: &[Vertex], map: &ProjectionMap) -> Polygon2 {
    let points: Vec<Point2> = vertices.iter().map(|v| map.apply(&v.coordinates)).collect();
    Polygon2::hull(points)
}

/// Projected polygon computed by support-function LPs alone.
///
/// Starts from lexicographic extreme points along the axes and splits every
/// hull edge along its outward normal until each edge is confirmed as a
/// supporting line.
pub fn directional_extremes(poly: &HPolytope, map: &ProjectionMap) -> Result<Polygon2> {
    let mut lp = PreparedLp::new(poly).map_err(|_| Error::EmptyPolytope)?;
    directional_extremes_with(&mut lp, map)
}

/// As [`directional_extremes`] on an already prepared LP.
pub fn directional_extremes_with(lp: &mut PreparedLp, map: &ProjectionMap) -> Result<Polygon2> {
    let ex = map.matrix.row(0).to_vec();
    let ey = map.matrix.row(1).to_vec();
    let corners = [
        [(&ex, Sense::Min), (&ey, Sense::Min)],
        [(&ey, Sense::Min), (&ex, Sense::Max)],
        [(&ex, Sense::Max), (&ey, Sense::Max)],
        [(&ey, Sense::Max), (&ex, Sense::Min)],
    ];
    let mut seeds = Vec::with_capacity(4);
    for objectives in corners {
        let objectives: Vec<(&[Rational], Sense)> =
            objectives.iter().map(|(o, s)| (o.as_slice(), *s)).collect();
        let res = lp.solve_lex(&objectives);
        let witness = res.witness.ok_or(Error::EmptyPolytope)?;
        seeds.push(map.apply(&witness));
    }
    let start = Polygon2::hull(seeds);
    let verts = start.vertices();
    if verts.len() == 1 {
        return Ok(start);
    }
    let n = verts.len();
    let mut boundary = Vec::new();
    for i in 0..n {
        let p = &verts[i];
        let q = &verts[(i + 1) % n];
        boundary.push(p.clone());
        refine_edge(lp, map, p, q, &mut boundary)?;
    }
    Ok(Polygon2::hull(boundary))
}

fn refine_edge(
    lp: &mut PreparedLp,
    map: &ProjectionMap,
    p: &Point2,
    q: &Point2,
    out: &mut Vec<Point2>,
) -> Result<()> {
    let nx = &q.y - &p.y;
    let ny = &p.x - &q.x;
    let objective = map.directional_objective(&nx, &ny);
    let res = lp.solve(&objective, Sense::Max);
    let witness = res.witness.ok_or(Error::EmptyPolytope)?;
    let r = map.apply(&witness);
    let level = &nx * &p.x + &ny * &p.y;
    if &nx * &r.x + &ny * &r.y > level {
        refine_edge(lp, map, p, &r, out)?;
        out.push(r.clone());
        refine_edge(lp, map, &r, q, out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    /// The unit square `[0,1]²` embedded with one slack-free equality.
    fn square() -> HPolytope {
        // variables (x, y, s) with s = 1 - x fixed by an equality
        let g = ConstraintMatrix::from_rows(vec![
            vec![int(-1), int(0), int(0)],
            vec![int(0), int(-1), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(-1)],
        ]);
        let h = vec![int(0), int(0), int(1), int(1), int(0)];
        let c = ConstraintMatrix::from_rows(vec![vec![int(1), int(0), int(1)]]);
        HPolytope::new(g, h, c, vec![int(1)]).unwrap()
    }

    fn xy_map(n: usize) -> ProjectionMap {
        let mut m = ConstraintMatrix::zeros(2, n);
        m.set(0, 0, int(1));
        m.set(1, 1, int(1));
        ProjectionMap::new(m).unwrap()
    }

    #[test]
    fn square_geometry_by_both_methods() {
        let poly = square();
        let verts = enumerate_vertices(&poly).unwrap();
        assert_eq!(verts.len(), 4);
        let a = project_hull(&verts, &xy_map(3));
        let b = directional_extremes(&poly, &xy_map(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(polygon_area(&a), int(1));
        assert!(contains(&a, &Point2::new(q(1, 2), q(1, 2))));
    }

    #[test]
    fn membership_and_violation() {
        let poly = square();
        assert!(poly.contains(&[q(1, 2), q(1, 3), q(1, 2)]));
        assert!(!poly.contains(&[q(1, 2), q(1, 3), q(1, 3)]));
        assert_eq!(poly.max_violation(&[int(2), int(0), int(-1)]), int(1));
    }
}
