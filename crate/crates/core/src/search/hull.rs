use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};

use super::SearchError;
use crate::regions::RateLeakagePoint;

/// Boundary points count as members within this slack.
pub const HULL_TOL: f64 = 1e-9;

/// The up-set of the convex hull of generator points: every point that
/// dominates some time-sharing of the generators coordinatewise.
#[derive(Debug, Clone)]
pub struct CapacityHull {
    dim: usize,
    has_delta: bool,
    /// Generators not dominated by another generator.
    vertices: Vec<Vec<f64>>,
}

impl CapacityHull {
    pub fn new(points: &[RateLeakagePoint]) -> Result<Self, SearchError> {
        let first = points.first().ok_or(SearchError::Empty("generator points"))?;
        let shape = |p: &RateLeakagePoint| (p.rates.len(), p.delta.is_some(), p.delta_a.len());
        if let Some(p) = points.iter().find(|p| shape(p) != shape(first)) {
            return Err(SearchError::DimensionMismatch(format!(
                "generator {:?} does not match {:?}",
                shape(p),
                shape(first)
            )));
        }
        let coords: Vec<Vec<f64>> = points.iter().map(RateLeakagePoint::coords).collect();
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            let dominated = coords.iter().enumerate().any(|(j, d)| {
                j != i
                    && d.iter().zip(c).all(|(a, b)| a <= b)
                    && (d != c || j < i)
            });
            if !dominated {
                vertices.push(c.clone());
            }
        }
        Ok(Self {
            dim: first.dim(),
            has_delta: first.delta.is_some(),
            vertices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Generators that survive dominance pruning.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Smallest `t` such that `point + t` dominates a convex combination of
    /// the generators. Non-positive means the point is in the up-set.
    pub fn gap(&self, point: &RateLeakagePoint) -> Result<f64, SearchError> {
        if point.dim() != self.dim || point.delta.is_some() != self.has_delta {
            return Err(SearchError::DimensionMismatch(format!(
                "point of dimension {} against hull of dimension {}",
                point.dim(),
                self.dim
            )));
        }
        let p = point.coords();
        // A single dominated generator settles it without an LP.
        let direct = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(&p).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::INFINITY, f64::min);
        if direct <= 0.0 || self.vertices.len() == 1 {
            return Ok(direct);
        }

        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let lambdas: Vec<_> = self.vertices.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
        let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        for (j, &pj) in p.iter().enumerate() {
            let mut e = LinearExpr::empty();
            for (v, &lam) in self.vertices.iter().zip(&lambdas) {
                e.add(lam, v[j]);
            }
            e.add(t, -1.0);
            lp.add_constraint(e, ComparisonOp::Le, pj);
        }
        let mut sum = LinearExpr::empty();
        for &lam in &lambdas {
            sum.add(lam, 1.0);
        }
        lp.add_constraint(sum, ComparisonOp::Eq, 1.0);
        let sol = lp.solve().map_err(|e| SearchError::Lp(e.to_string()))?;
        Ok(sol.objective().min(direct))
    }

    pub fn contains(&self, point: &RateLeakagePoint, tol: f64) -> Result<bool, SearchError> {
        Ok(self.gap(point)? <= tol)
    }
}

pub fn hull_membership(hull: &CapacityHull, point: &RateLeakagePoint, tol: f64) -> Result<bool, SearchError> {
    hull.contains(point, tol)
}
