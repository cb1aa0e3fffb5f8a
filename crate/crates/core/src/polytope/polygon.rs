//! Exact convex polygons in the plane.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `(b − a) × (c − a)`: positive for a counterclockwise turn.
fn cross(a: &Point2, b: &Point2, c: &Point2) -> Rational {
    (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)
}

/// Convex polygon with vertices in counterclockwise order, starting at the
/// lexicographically smallest one. Points and segments keep 1 or 2 vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polygon2 {
    vertices: Vec<Point2>,
}

impl Polygon2 {
    /// Convex hull of arbitrary points (monotone chain). Duplicate and
    /// collinear points are dropped.
    pub fn hull(mut points: Vec<Point2>) -> Self {
        points.sort();
        points.dedup();
        if points.len() <= 2 {
            return Self { vertices: points };
        }
        let mut lower: Vec<Point2> = Vec::new();
        for p in &points {
            while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Point2> = Vec::new();
        for p in points.iter().rev() {
            while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self { vertices: lower }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `(min x, max x)` over the vertices.
    pub fn x_extent(&self) -> Option<(Rational, Rational)> {
        extent(self.vertices.iter().map(|p| &p.x))
    }

    pub fn y_extent(&self) -> Option<(Rational, Rational)> {
        extent(self.vertices.iter().map(|p| &p.y))
    }
}

fn extent<'a>(mut it: impl Iterator<Item = &'a Rational>) -> Option<(Rational, Rational)> {
    let first = it.next()?;
    let (mut lo, mut hi) = (first.clone(), first.clone());
    for v in it {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    Some((lo, hi))
}

/// Exact shoelace area; zero for points and segments.
pub fn polygon_area(p: &Polygon2) -> Rational {
    let v = &p.vertices;
    if v.len() < 3 {
        return Rational::zero();
    }
    let mut twice = Rational::zero();
    for i in 0..v.len() {
        let a = &v[i];
        let b = &v[(i + 1) % v.len()];
        twice += &a.x * &b.y - &b.x * &a.y;
    }
    twice.abs() / rational::int(2)
}

/// Exact membership; the boundary counts as inside.
pub fn contains(p: &Polygon2, point: &Point2) -> bool {
    let v = &p.vertices;
    match v.len() {
        0 => false,
        1 => v[0] == *point,
        2 => {
            cross(&v[0], &v[1], point).is_zero()
                && rational::min(&v[0].x, &v[1].x) <= point.x
                && point.x <= rational::max(&v[0].x, &v[1].x)
                && rational::min(&v[0].y, &v[1].y) <= point.y
                && point.y <= rational::max(&v[0].y, &v[1].y)
        }
        n => (0..n).all(|i| !cross(&v[i], &v[(i + 1) % n], point).is_negative()),
    }
}
