//! Extreme points of the capacity regions for independent inputs, one per
//! fixed tuple of auxiliary channels. Time-sharing between them is handled
//! by [`crate::search::CapacityHull`].

use super::{AuxDistribution, CollusionFamily, RateLeakagePoint, RegionError, UserSet};
use crate::prob::{Channel, FunctionSpec, JointPmf, VarSet};
use crate::search::{self, SearchConfig};

fn check_independent(p_x: &JointPmf, tol: f64) -> Result<(), RegionError> {
    let groups: Vec<VarSet> = (0..p_x.arity()).map(VarSet::single).collect();
    let tc = p_x.total_correlation(&groups)?;
    if tc > tol {
        return Err(RegionError::Precondition(format!(
            "inputs are not independent: total correlation {tc:.3e} bits"
        )));
    }
    Ok(())
}

fn check_family(family: &CollusionFamily, users: usize) -> Result<(), RegionError> {
    if family.users() != users {
        return Err(RegionError::DimensionMismatch(format!(
            "collusion family over {} users, inputs over {users}",
            family.users()
        )));
    }
    Ok(())
}

/// Fusion-center model: `((I(U_l; X_l))_l, I(U_L; X_L | F), (I(X_{A^c}; U_{A^c}))_A)`.
pub fn fusion_generator(
    p_x: &JointPmf,
    channels: &[Channel],
    f: &FunctionSpec,
    family: &CollusionFamily,
    tol: f64,
) -> Result<RateLeakagePoint, RegionError> {
    check_independent(p_x, tol)?;
    check_family(family, p_x.arity())?;
    let d = AuxDistribution::from_channels(p_x, channels, f)?;
    d.check_decodable(tol)?;
    let l = d.users();
    let rates = (0..l)
        .map(|u| {
            let me = UserSet::singleton(u);
            d.mi(&d.u(me), &d.x(me), &VarSet::empty())
        })
        .collect();
    let full = d.full();
    let delta = d.mi(&d.u(full), &d.x(full), &d.f());
    let delta_a = family
        .sets()
        .iter()
        .map(|a| {
            let ac = a.complement(l);
            d.mi(&d.x(ac), &d.u(ac), &VarSet::empty())
        })
        .collect();
    RateLeakagePoint::new(rates, Some(delta), delta_a)
}

/// Designated-receiver model where user `receiver` computes `F` from its
/// own input and the other users' messages.
///
/// `channels` lists the auxiliary channels of the other users in increasing
/// user order. The returned point has no `Delta` and omits the receiver's
/// rate. For `A` containing the receiver the leakage is
/// `I(X_{A^c}; U_{A^c} | F, X_A)`; otherwise `I(X_{A^c*}; U_{A^c*})` where
/// `A^c*` drops the receiver.
pub fn designated_generator(
    p_x: &JointPmf,
    channels: &[Channel],
    f: &FunctionSpec,
    family: &CollusionFamily,
    receiver: usize,
    tol: f64,
) -> Result<RateLeakagePoint, RegionError> {
    let l = p_x.arity();
    if receiver >= l {
        return Err(RegionError::InvalidUsers(format!(
            "receiver {receiver} outside 0..{l}"
        )));
    }
    if channels.len() + 1 != l {
        return Err(RegionError::DimensionMismatch(format!(
            "{} channels for {} non-receiving users",
            channels.len(),
            l - 1
        )));
    }
    check_independent(p_x, tol)?;
    check_family(family, l)?;
    // The receiver sends nothing: model its auxiliary as a constant.
    let mut full_channels = channels.to_vec();
    full_channels.insert(receiver, Channel::constant(p_x.alphabets()[receiver].size())?);
    let d = AuxDistribution::from_channels(p_x, &full_channels, f)?;

    let others = UserSet::full(l).without(receiver);
    let cond = d.u(others).union(&d.x(UserSet::singleton(receiver)));
    let h = d.joint().conditional_entropy(&d.f(), &cond)?;
    if h > tol {
        return Err(RegionError::Precondition(format!(
            "F is not a function of (U_{others}, X_{}): H = {h:.3e}",
            receiver + 1
        )));
    }

    let rates = others
        .iter()
        .map(|u| {
            let me = UserSet::singleton(u);
            d.mi(&d.u(me), &d.x(me), &VarSet::empty())
        })
        .collect();
    let delta_a = family
        .sets()
        .iter()
        .map(|&a| {
            let ac = a.complement(l);
            if a.contains(receiver) {
                d.mi(&d.x(ac), &d.u(ac), &d.f().union(&d.x(a)))
            } else {
                let acs = ac.without(receiver);
                d.mi(&d.x(acs), &d.u(acs), &VarSet::empty())
            }
        })
        .collect();
    RateLeakagePoint::new(rates, None, delta_a)
}

/// Single-user rate/leakage tradeoff: `(I(U*; X), I(U*; X) - I(X; F))` where
/// `U*` minimizes `I(U; X)` over the enumerated decodable channels.
pub fn single_user_tradeoff(
    p_x1: &JointPmf,
    f: &FunctionSpec,
    cfg: &SearchConfig,
) -> Result<(f64, f64), RegionError> {
    if p_x1.arity() != 1 {
        return Err(RegionError::DimensionMismatch(format!(
            "single-user tradeoff needs one input, got {}",
            p_x1.arity()
        )));
    }
    let (_, rate) = search::minimize_single_user(p_x1, f, cfg).map_err(Box::new)?;
    let with_f = p_x1.append_function(f)?;
    let ixf = with_f.mutual_info(&VarSet::single(0), &VarSet::single(1))?;
    Ok((rate, (rate - ixf).max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> FunctionSpec {
        FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap()
    }

    #[test]
    fn xor_fusion_point() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let id = Channel::identity(2).unwrap();
        let fam = CollusionFamily::from_lists(2, &[vec![0]]).unwrap();
        let p = fusion_generator(&px, &[id.clone(), id], &xor(), &fam, 1e-9).unwrap();
        for v in p.coords() {
            assert!((v - 1.0).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn constant_fusion_point_is_zero() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let f = FunctionSpec::from_fn(&[2, 2], 1, |_| 0).unwrap();
        let c = Channel::constant(2).unwrap();
        let fam = CollusionFamily::from_lists(2, &[vec![0], vec![1]]).unwrap();
        let p = fusion_generator(&px, &[c.clone(), c], &f, &fam, 1e-9).unwrap();
        assert!(p.coords().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn parity_of_four_symbols() {
        let px = JointPmf::uniform(&[4]).unwrap();
        let f = FunctionSpec::from_fn(&[4], 2, |x| x[0] % 2).unwrap();
        let u = Channel::deterministic(&[0, 1, 0, 1], 2).unwrap();
        let p = fusion_generator(&px, &[u], &f, &CollusionFamily::empty(1), 1e-9).unwrap();
        assert!((p.rates[0] - 1.0).abs() < 1e-12);
        assert!(p.delta.unwrap().abs() < 1e-12);
    }

    #[test]
    fn correlated_inputs_rejected() {
        let px = JointPmf::new(
            vec![crate::Alphabet::new(2).unwrap(), crate::Alphabet::new(2).unwrap()],
            vec![0.4, 0.1, 0.1, 0.4],
        )
        .unwrap();
        let id = Channel::identity(2).unwrap();
        assert!(matches!(
            fusion_generator(&px, &[id.clone(), id], &xor(), &CollusionFamily::empty(2), 1e-9),
            Err(RegionError::Precondition(_))
        ));
    }

    #[test]
    fn designated_receiver_examples() {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let id = Channel::identity(2).unwrap();
        // receiver is user 2 (index 1), family {{2}}
        let fam = CollusionFamily::from_lists(2, &[vec![1]]).unwrap();
        let p = designated_generator(&px, &[id.clone()], &xor(), &fam, 1, 1e-9).unwrap();
        assert_eq!(p.delta, None);
        assert_eq!(p.rates.len(), 1);
        assert!((p.rates[0] - 1.0).abs() < 1e-12);
        assert!(p.delta_a[0].abs() < 1e-12);

        // family {{1}} does not contain the receiver: A^c* is empty.
        let fam = CollusionFamily::from_lists(2, &[vec![0]]).unwrap();
        let p = designated_generator(&px, &[id.clone()], &xor(), &fam, 1, 1e-9).unwrap();
        assert_eq!(p.delta_a, vec![0.0]);

        // constant F with a constant auxiliary: no leakage either way.
        let f = FunctionSpec::from_fn(&[2, 2], 1, |_| 0).unwrap();
        let fam = CollusionFamily::from_lists(2, &[vec![0], vec![1]]).unwrap();
        let c = Channel::constant(2).unwrap();
        let p = designated_generator(&px, &[c], &f, &fam, 1, 1e-9).unwrap();
        assert!(p.coords().iter().all(|v| v.abs() < 1e-12));

        // U_1 constant cannot reveal X_1 xor X_2 to user 2.
        let c = Channel::constant(2).unwrap();
        assert!(designated_generator(&px, &[c], &xor(), &fam, 1, 1e-9).is_err());
    }
}
