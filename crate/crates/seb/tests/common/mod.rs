#![allow(dead_code)]

use seb::geometry::PointSet;

/// Acute triangle: every vertex supports the ball and the circumball
/// weights are interior.
pub fn acute_triangle() -> PointSet {
    PointSet::from_rows(&[vec![1.0, 0.0], vec![3.0, 0.0], vec![2.0, 2.0]]).unwrap()
}

/// Obtuse triangle: the circumball weights leave the simplex, so the ball is
/// carried by the two far vertices.
pub fn obtuse_triangle() -> PointSet {
    PointSet::from_rows(&[vec![1.0, 0.0], vec![5.0, 0.0], vec![3.0, 1.0]]).unwrap()
}

/// Four nearly cocircular points where the drop heuristic discards a true
/// support point and settles on a non-enclosing ball.
pub fn near_cocircular_quad() -> PointSet {
    PointSet::from_rows(&[
        vec![0.441234, 0.375473],
        vec![-0.405275, 0.405980],
        vec![-0.499223, 0.333663],
        vec![0.470587, -0.422787],
    ])
    .unwrap()
}

/// The standard basis of R^n: a regular simplex whose non-structural
/// contraction factors all equal 1 - 1/n.
pub fn identity_points(n: usize) -> PointSet {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    PointSet::from_rows(&rows).unwrap()
}

/// One-parameter isosceles family on the unit circle: (-1, 0) and
/// (p, +-sqrt(1-p^2)). As p -> 1 the two right points merge and the
/// iteration's contraction factor tends to 1.
pub fn isosceles_points(p: f64) -> PointSet {
    let q = (1.0 - p * p).sqrt();
    PointSet::from_rows(&[vec![-1.0, 0.0], vec![p, q], vec![p, -q]]).unwrap()
}
