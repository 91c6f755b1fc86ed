use serde::Serialize;

use super::{AuxDistribution, CollusionFamily, ProductChannelModel, RateLeakagePoint, RegionError, UserSet};

/// Explicit lower bounds on `R_S` (all non-empty `S`), `Delta` and each `Delta_A`.
///
/// Redundant bounds are kept; membership only needs the conjunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpaceRegion {
    pub users: usize,
    /// Keyed by non-empty subsets in increasing bitmask order.
    pub rate_bounds: Vec<(UserSet, f64)>,
    pub delta_bound: Option<f64>,
    /// In collusion-family order.
    pub delta_a_bounds: Vec<(UserSet, f64)>,
}

impl HalfSpaceRegion {
    pub fn rate_bound(&self, s: UserSet) -> Option<f64> {
        self.rate_bounds
            .iter()
            .find(|(k, _)| *k == s)
            .map(|(_, v)| *v)
    }

    /// The bound values as a point: rates are not set (all bounds are on sums).
    pub fn leakage_floor(&self) -> (Option<f64>, Vec<f64>) {
        (
            self.delta_bound,
            self.delta_a_bounds.iter().map(|(_, v)| *v).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BoundKind {
    Rate(UserSet),
    Delta,
    DeltaA(usize, UserSet),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolatedBound {
    pub kind: BoundKind,
    pub bound: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub violated: Option<ViolatedBound>,
}

/// Bounds shared by the outer and inner regions:
/// `R_S >= I(U_S; X_S | U_{S^c}) - I(U_S; U_{S^c} | X_S)`,
/// `Delta >= I(U_L; X_L | F)`, `Delta_A >= I(X_{A^c}; U_{A^c} | X_A)`.
fn region_bounds(d: &AuxDistribution, family: &CollusionFamily) -> Result<HalfSpaceRegion, RegionError> {
    let l = d.users();
    if family.users() != l {
        return Err(RegionError::DimensionMismatch(format!(
            "collusion family over {} users, distribution over {l}",
            family.users()
        )));
    }
    let full = d.full();
    let rate_bounds = UserSet::all(l)
        .skip(1)
        .map(|s| {
            let sc = s.complement(l);
            let v = d.mi(&d.u(s), &d.x(s), &d.u(sc)) - d.mi(&d.u(s), &d.u(sc), &d.x(s));
            (s, v)
        })
        .collect();
    let delta = d.mi(&d.u(full), &d.x(full), &d.f());
    let delta_a_bounds = family
        .sets()
        .iter()
        .map(|&a| {
            let ac = a.complement(l);
            (a, d.mi(&d.x(ac), &d.u(ac), &d.x(a)))
        })
        .collect();
    Ok(HalfSpaceRegion {
        users: l,
        rate_bounds,
        delta_bound: Some(delta),
        delta_a_bounds,
    })
}

/// Outer region for a user-supplied member of the outer class: requires
/// `U_S - X_S - X_L` for all `S` and `H(F | U_L) <= tol`.
pub fn outer_region(
    dist: &AuxDistribution,
    family: &CollusionFamily,
    tol: f64,
) -> Result<HalfSpaceRegion, RegionError> {
    dist.check_outer_class(tol)?;
    dist.check_decodable(tol)?;
    region_bounds(dist, family)
}

/// Inner region for a product-channel distribution with `H(F | U_L) <= tol`.
pub fn inner_region(
    model: &ProductChannelModel,
    family: &CollusionFamily,
    tol: f64,
) -> Result<HalfSpaceRegion, RegionError> {
    model.dist().check_decodable(tol)?;
    region_bounds(model.dist(), family)
}

/// Checks every stored lower bound up to `-tol`; reports the first failure.
pub fn membership(
    point: &RateLeakagePoint,
    region: &HalfSpaceRegion,
    tol: f64,
) -> Result<Membership, RegionError> {
    if point.rates.len() != region.users {
        return Err(RegionError::DimensionMismatch(format!(
            "point has {} rates, region has {} users",
            point.rates.len(),
            region.users
        )));
    }
    if point.delta_a.len() != region.delta_a_bounds.len() {
        return Err(RegionError::DimensionMismatch(format!(
            "point has {} collusion leakages, region has {}",
            point.delta_a.len(),
            region.delta_a_bounds.len()
        )));
    }
    if point.delta.is_some() != region.delta_bound.is_some() {
        return Err(RegionError::DimensionMismatch(
            "point and region disagree on the fusion-center leakage coordinate".into(),
        ));
    }
    let fail = |kind, bound, value| {
        Ok(Membership {
            member: false,
            violated: Some(ViolatedBound { kind, bound, value }),
        })
    };
    for &(s, bound) in &region.rate_bounds {
        let sum: f64 = s.iter().map(|l| point.rates[l]).sum();
        if sum < bound - tol {
            return fail(BoundKind::Rate(s), bound, sum);
        }
    }
    if let (Some(bound), Some(value)) = (region.delta_bound, point.delta) {
        if value < bound - tol {
            return fail(BoundKind::Delta, bound, value);
        }
    }
    for (k, (&(a, bound), &value)) in region.delta_a_bounds.iter().zip(&point.delta_a).enumerate() {
        if value < bound - tol {
            return fail(BoundKind::DeltaA(k, a), bound, value);
        }
    }
    Ok(Membership {
        member: true,
        violated: None,
    })
}
