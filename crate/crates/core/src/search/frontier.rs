use rayon::prelude::*;

use super::{enumerate_channels, ChannelTuple, SearchConfig, SearchError};
use crate::prob::{FunctionSpec, JointPmf, VarSet};
use crate::regions::{
    designated_generator, fusion_generator, CollusionFamily, RateLeakagePoint, PRECONDITION_TOL,
};

#[derive(Debug, Clone)]
pub struct GeneratorPoint {
    pub point: RateLeakagePoint,
    pub source: ChannelTuple,
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub points: Vec<GeneratorPoint>,
    /// Coordinate names in `RateLeakagePoint::coords` order.
    pub axes: Vec<String>,
    pub truncated: bool,
    pub examined: usize,
}

impl GeneratorSet {
    pub fn rate_leakage_points(&self) -> Vec<RateLeakagePoint> {
        self.points.iter().map(|g| g.point.clone()).collect()
    }
}

/// Names the coordinates of a point: `R<l>` per sending user, `delta` for
/// the fusion-center leakage and `delta_A<k>` per collusion set, 1-based.
pub fn axis_names(users: usize, receiver: Option<usize>, family_len: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..users)
        .filter(|&u| Some(u) != receiver)
        .map(|u| format!("R{}", u + 1))
        .collect();
    if receiver.is_none() {
        names.push("delta".into());
    }
    names.extend((1..=family_len).map(|k| format!("delta_A{k}")));
    names
}

/// Generator points for every decodable enumerated tuple, in enumeration
/// order. Evaluation runs on the current rayon pool.
pub fn generate(
    p_x: &JointPmf,
    f: &FunctionSpec,
    family: &CollusionFamily,
    cfg: &SearchConfig,
    receiver: Option<usize>,
) -> Result<GeneratorSet, SearchError> {
    let e = enumerate_channels(p_x, f, cfg, receiver)?;
    let points = e
        .tuples
        .into_par_iter()
        .map(|t| {
            let point = match receiver {
                None => fusion_generator(p_x, &t.channels, f, family, PRECONDITION_TOL)?,
                Some(r) => designated_generator(p_x, &t.channels, f, family, r, PRECONDITION_TOL)?,
            };
            Ok(GeneratorPoint { point, source: t })
        })
        .collect::<Result<Vec<_>, SearchError>>()?;
    Ok(GeneratorSet {
        points,
        axes: axis_names(p_x.arity(), receiver, family.len()),
        truncated: e.truncated,
        examined: e.examined,
    })
}

/// Minimizes `I(U; X)` over the enumerated decodable channels of one user.
/// Ties keep the first tuple in enumeration order.
pub fn minimize_single_user(
    p_x1: &JointPmf,
    f: &FunctionSpec,
    cfg: &SearchConfig,
) -> Result<(ChannelTuple, f64), SearchError> {
    if p_x1.arity() != 1 {
        return Err(SearchError::DimensionMismatch(format!(
            "expected one user, got {}",
            p_x1.arity()
        )));
    }
    let e = enumerate_channels(p_x1, f, cfg, None)?;
    let mut best: Option<(ChannelTuple, f64)> = None;
    for t in e.tuples {
        let j = p_x1.extend_with_channels(&t.channels)?;
        let v = j.mutual_info(&VarSet::single(0), &VarSet::single(1))?;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((t, v));
        }
    }
    best.ok_or(SearchError::Empty("decodable channel; the identity should always qualify"))
}

/// Pareto-minimal `(x, y)` pairs of the projected cloud, sorted by `x`.
/// Values are snapped to a 1e-12 grid so rounding noise does not split ties.
pub fn frontier_2d(
    points: &[RateLeakagePoint],
    axes: &[String],
    axis_x: &str,
    axis_y: &str,
) -> Result<Vec<(f64, f64)>, SearchError> {
    let find = |name: &str| {
        axes.iter().position(|a| a == name).ok_or_else(|| SearchError::UnknownAxis {
            axis: name.to_string(),
            known: axes.join(", "),
        })
    };
    let (ix, iy) = (find(axis_x)?, find(axis_y)?);
    let snap = |v: f64| (v * 1e12).round() / 1e12;
    let mut pairs = Vec::with_capacity(points.len());
    for p in points {
        let c = p.coords();
        if c.len() != axes.len() {
            return Err(SearchError::DimensionMismatch(format!(
                "point of dimension {} against {} axes",
                c.len(),
                axes.len()
            )));
        }
        pairs.push((snap(c[ix]), snap(c[iy])));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (x, y) in pairs {
        if out.last().is_none_or(|&(_, by)| y < by) {
            out.push((x, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Channel;
    use crate::regions::{inner_region, membership, ProductChannelModel};
    use crate::search::{CapacityHull, HULL_TOL};

    fn xor() -> FunctionSpec {
        FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap()
    }

    fn pt(v: &[f64]) -> RateLeakagePoint {
        RateLeakagePoint::new(v.to_vec(), None, vec![]).unwrap()
    }

    #[test]
    fn xor_generators_and_hull() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let fam = CollusionFamily::from_lists(2, &[vec![0]]).unwrap();
        let g = generate(&px, &xor(), &fam, &SearchConfig::default(), None).unwrap();
        assert_eq!(g.axes, ["R1", "R2", "delta", "delta_A1"]);
        assert_eq!(g.points.len(), 1);
        let h = CapacityHull::new(&g.rate_leakage_points()).unwrap();
        let p = |v: [f64; 4]| RateLeakagePoint::new(v[..2].to_vec(), Some(v[2]), vec![v[3]]).unwrap();
        assert!(h.contains(&p([1.0, 1.0, 1.0, 1.0]), HULL_TOL).unwrap());
        assert!(!h.contains(&p([1.0, 1.0, 0.9, 1.0]), HULL_TOL).unwrap());
        assert!(!h.contains(&p([0.0; 4]), HULL_TOL).unwrap());
    }

    #[test]
    fn generators_lie_in_their_inner_region() {
        let px = JointPmf::product(&[vec![0.5, 0.25, 0.25], vec![0.7, 0.3]]).unwrap();
        let f = FunctionSpec::from_fn(&[3, 2], 2, |x| usize::from(x[0] == 0 && x[1] == 1)).unwrap();
        let fam = CollusionFamily::from_lists(2, &[vec![0], vec![1]]).unwrap();
        let g = generate(&px, &f, &fam, &SearchConfig::default(), None).unwrap();
        assert!(!g.points.is_empty());
        for gp in &g.points {
            let m = ProductChannelModel::from_channels(&px, &gp.source.channels, &f, 1e-9).unwrap();
            let r = inner_region(&m, &fam, 1e-9).unwrap();
            assert!(membership(&gp.point, &r, 1e-9).unwrap().member);
        }
    }

    #[test]
    fn single_user_minimum() {
        let px = JointPmf::uniform(&[4]).unwrap();
        let cfg = SearchConfig::default();
        let parity = FunctionSpec::from_fn(&[4], 2, |x| x[0] % 2).unwrap();
        let (t, v) = minimize_single_user(&px, &parity, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(t.channels[0], Channel::deterministic(&[0, 1, 0, 1], 2).unwrap());

        let constant = FunctionSpec::from_fn(&[4], 1, |_| 0).unwrap();
        assert!(minimize_single_user(&px, &constant, &cfg).unwrap().1.abs() < 1e-12);

        let id = FunctionSpec::from_fn(&[4], 4, |x| x[0]).unwrap();
        assert!((minimize_single_user(&px, &id, &cfg).unwrap().1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frontier_basics() {
        let axes = vec!["a".to_string(), "b".to_string()];
        let one = frontier_2d(&[pt(&[1.0, 2.0])], &axes, "a", "b").unwrap();
        assert_eq!(one, vec![(1.0, 2.0)]);
        let cloud = [pt(&[1.0, 2.0]), pt(&[2.0, 3.0]), pt(&[0.5, 4.0]), pt(&[3.0, 0.0])];
        let fr = frontier_2d(&cloud, &axes, "a", "b").unwrap();
        assert_eq!(fr, vec![(0.5, 4.0), (1.0, 2.0), (3.0, 0.0)]);
        assert!(frontier_2d(&cloud, &axes, "a", "c").is_err());
    }

    #[test]
    fn designated_axis_names() {
        assert_eq!(axis_names(3, Some(1), 2), ["R1", "R3", "delta_A1", "delta_A2"]);
    }
}
