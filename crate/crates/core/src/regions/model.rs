use itertools::Itertools;
use serde::Serialize;

use super::{RegionError, UserSet};
use crate::prob::{Channel, FunctionSpec, JointPmf, VarSet};

/// Permutation enumeration is capped at 8 users (40320 corner points).
pub const MAX_PERMUTATION_USERS: usize = 8;
/// The contrapolymatroid scan visits every pair of subsets.
pub const MAX_CONTRAPOLYMATROID_USERS: usize = 12;

/// A joint distribution of `(U_L, X_L, F)` with `F = f(X_L)`.
#[derive(Debug, Clone)]
pub struct AuxDistribution {
    joint: JointPmf,
    users: usize,
}

impl AuxDistribution {
    /// `p(x) prod_l p(u_l | x_l)` with `F` appended.
    pub fn from_channels(
        p_x: &JointPmf,
        channels: &[Channel],
        f: &FunctionSpec,
    ) -> Result<Self, RegionError> {
        let joint = p_x.extend_with_channels(channels)?.append_function(f)?;
        Ok(Self {
            joint,
            users: p_x.arity(),
        })
    }

    /// Wraps a user-supplied `p(u_L, x_L)` laid out as `(U_1..U_L, X_1..X_L)`.
    pub fn from_joint(p_ux: &JointPmf, users: usize, f: &FunctionSpec) -> Result<Self, RegionError> {
        if p_ux.arity() != 2 * users || f.arity() != users {
            return Err(RegionError::DimensionMismatch(format!(
                "joint of arity {} and function of arity {} for {users} users",
                p_ux.arity(),
                f.arity()
            )));
        }
        Ok(Self {
            joint: p_ux.append_function(f)?,
            users,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn u(&self, s: UserSet) -> VarSet {
        s.iter().collect()
    }

    pub fn x(&self, s: UserSet) -> VarSet {
        s.iter().map(|l| self.users + l).collect()
    }

    pub fn f(&self) -> VarSet {
        VarSet::single(2 * self.users)
    }

    pub fn full(&self) -> UserSet {
        UserSet::full(self.users)
    }

    /// `I(a; b | c)`; the sets are built from this layout so they are valid.
    pub fn mi(&self, a: &VarSet, b: &VarSet, c: &VarSet) -> f64 {
        self.joint
            .cond_mutual_info(a, b, c)
            .expect("variable sets built from the layout")
    }

    pub fn entropy(&self, s: &VarSet) -> f64 {
        self.joint.entropy(s).expect("variable sets built from the layout")
    }

    /// `U_l - X_l - (X_{L\l}, U_{L\l})` for every user.
    pub fn check_product_channel(&self, tol: f64) -> Result<(), RegionError> {
        let full = self.full();
        for l in 0..self.users {
            let me = UserSet::singleton(l);
            let rest = full.without(l);
            let others = self.x(rest).union(&self.u(rest));
            let v = self.mi(&self.u(me), &others, &self.x(me));
            if v > tol {
                return Err(RegionError::Precondition(format!(
                    "Markov chain U_{0} - X_{0} - (X_{1}, U_{1}) violated: I = {v:.3e}",
                    l + 1,
                    rest
                )));
            }
        }
        Ok(())
    }

    /// `U_S - X_S - X_L` for every subset `S`.
    pub fn check_outer_class(&self, tol: f64) -> Result<(), RegionError> {
        let full = self.full();
        for s in UserSet::all(self.users).skip(1) {
            let v = self.mi(&self.u(s), &self.x(s.complement(self.users)), &self.x(s));
            if v > tol {
                return Err(RegionError::Precondition(format!(
                    "Markov chain U_{s} - X_{s} - X_{full} violated: I = {v:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// `H(F | U_L) <= tol`.
    pub fn check_decodable(&self, tol: f64) -> Result<(), RegionError> {
        let h = self
            .joint
            .conditional_entropy(&self.f(), &self.u(self.full()))?;
        if h > tol {
            return Err(RegionError::Precondition(format!(
                "F is not a function of U_L: H(F|U_L) = {h:.3e}"
            )));
        }
        Ok(())
    }
}

/// An auxiliary distribution verified to have the product-channel form
/// `p(x) prod_l p(u_l | x_l)`, on which the set function
/// `g(S) = I(U_S; X_L | U_{S^c})` is a contrapolymatroid rank function.
#[derive(Debug, Clone)]
pub struct ProductChannelModel {
    dist: AuxDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrapolymatroidReport {
    pub normalized: bool,
    pub nondecreasing: bool,
    pub supermodular: bool,
    /// `|g(empty)|`.
    pub normalization_residual: f64,
    /// `max_{S subset T} g(S) - g(T)`, floored at 0.
    pub worst_monotonicity_violation: f64,
    /// `max_{S,T} g(S) + g(T) - g(S u T) - g(S n T)`, floored at 0.
    pub worst_supermodularity_violation: f64,
    pub tol: f64,
}

impl ContrapolymatroidReport {
    pub fn holds(&self) -> bool {
        self.normalized && self.nondecreasing && self.supermodular
    }
}

/// Corner points of the dominant face, one per permutation of the users.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerPointSet {
    /// `(permutation, rates indexed by user)`, permutations in lexicographic order.
    pub points: Vec<(Vec<usize>, Vec<f64>)>,
}

impl ProductChannelModel {
    pub fn new(dist: AuxDistribution, tol: f64) -> Result<Self, RegionError> {
        dist.check_product_channel(tol)?;
        Ok(Self { dist })
    }

    pub fn from_channels(
        p_x: &JointPmf,
        channels: &[Channel],
        f: &FunctionSpec,
        tol: f64,
    ) -> Result<Self, RegionError> {
        Self::new(AuxDistribution::from_channels(p_x, channels, f)?, tol)
    }

    pub fn dist(&self) -> &AuxDistribution {
        &self.dist
    }

    pub fn users(&self) -> usize {
        self.dist.users
    }

    /// `g(S) = I(U_S; X_L | U_{S^c})`, with `g(empty) = 0`.
    pub fn g(&self, s: UserSet) -> f64 {
        let d = &self.dist;
        let sc = s.complement(d.users);
        d.mi(&d.u(s), &d.x(d.full()), &d.u(sc))
    }

    /// `I(U_S; X_S | U_{S^c}) - I(U_S; U_{S^c} | X_S)`.
    pub fn gbar(&self, s: UserSet) -> f64 {
        let d = &self.dist;
        let sc = s.complement(d.users);
        d.mi(&d.u(s), &d.x(s), &d.u(sc)) - d.mi(&d.u(s), &d.u(sc), &d.x(s))
    }

    /// `g` tabulated over all subsets, indexed by bitmask.
    pub fn g_table(&self) -> Vec<f64> {
        UserSet::all(self.users()).map(|s| self.g(s)).collect()
    }

    /// `C_{pi(k)} = I(U_{pi(k)}; X_{pi(k)} | U_{pi(1..k-1)})`, returned indexed by user.
    pub fn corner_point(&self, perm: &[usize]) -> Result<Vec<f64>, RegionError> {
        let l = self.users();
        let valid = perm.len() == l
            && perm.iter().all(|&p| p < l)
            && UserSet::from_users(perm.iter().copied()) == UserSet::full(l);
        if !valid {
            return Err(RegionError::InvalidUsers(format!(
                "{perm:?} is not a permutation of 0..{l}"
            )));
        }
        let d = &self.dist;
        let mut rates = vec![0.0; l];
        let mut before = UserSet::EMPTY;
        for &p in perm {
            let me = UserSet::singleton(p);
            rates[p] = d.mi(&d.u(me), &d.x(me), &d.u(before));
            before = before.union(me);
        }
        Ok(rates)
    }

    pub fn corner_points(&self) -> Result<CornerPointSet, RegionError> {
        let l = self.users();
        if l > MAX_PERMUTATION_USERS {
            return Err(RegionError::TooManyUsers {
                op: "corner point enumeration",
                max: MAX_PERMUTATION_USERS,
                users: l,
            });
        }
        let points = (0..l)
            .permutations(l)
            .map(|perm| {
                let rates = self.corner_point(&perm)?;
                Ok((perm, rates))
            })
            .collect::<Result<Vec<_>, RegionError>>()?;
        Ok(CornerPointSet { points })
    }

    /// Brute-force check of normalization, monotonicity and supermodularity of `g`.
    pub fn check_contrapolymatroid(&self, tol: f64) -> Result<ContrapolymatroidReport, RegionError> {
        let l = self.users();
        if l > MAX_CONTRAPOLYMATROID_USERS {
            return Err(RegionError::TooManyUsers {
                op: "contrapolymatroid check",
                max: MAX_CONTRAPOLYMATROID_USERS,
                users: l,
            });
        }
        let g = self.g_table();
        let norm = g[0].abs();
        let mut mono: f64 = 0.0;
        let mut sup: f64 = 0.0;
        for t in UserSet::all(l) {
            for s in t.subsets() {
                mono = mono.max(g[s.bits() as usize] - g[t.bits() as usize]);
            }
            for s in UserSet::all(l) {
                let lhs = g[s.union(t).bits() as usize] + g[s.intersection(t).bits() as usize];
                let rhs = g[s.bits() as usize] + g[t.bits() as usize];
                sup = sup.max(rhs - lhs);
            }
        }
        Ok(ContrapolymatroidReport {
            normalized: norm <= tol,
            nondecreasing: mono <= tol,
            supermodular: sup <= tol,
            normalization_residual: norm,
            worst_monotonicity_violation: mono,
            worst_supermodularity_violation: sup,
            tol,
        })
    }

    /// `max_S |g(S) - gbar(S)|`.
    pub fn max_g_gbar_residual(&self) -> f64 {
        UserSet::all(self.users())
            .map(|s| (self.g(s) - self.gbar(s)).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_model() -> ProductChannelModel {
        let px = JointPmf::uniform(&[2, 2]).unwrap();
        let f = FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap();
        let id = Channel::identity(2).unwrap();
        ProductChannelModel::from_channels(&px, &[id.clone(), id], &f, 1e-9).unwrap()
    }

    fn correlated_model() -> ProductChannelModel {
        let px = JointPmf::new(
            vec![crate::Alphabet::new(2).unwrap(), crate::Alphabet::new(2).unwrap()],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let f = FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap();
        let id = Channel::identity(2).unwrap();
        ProductChannelModel::from_channels(&px, &[id.clone(), id], &f, 1e-9).unwrap()
    }

    #[test]
    fn g_examples() {
        let m = xor_model();
        assert_eq!(m.g(UserSet::EMPTY), 0.0);
        assert!((m.g(UserSet::singleton(0)) - 1.0).abs() < 1e-12);
        assert!((m.g(UserSet::full(2)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gbar_examples() {
        let m = xor_model();
        assert_eq!(m.gbar(UserSet::EMPTY), 0.0);
        assert!((m.gbar(UserSet::singleton(0)) - 1.0).abs() < 1e-12);

        let c = correlated_model();
        let s = UserSet::singleton(0);
        assert!(c.gbar(s).abs() < 1e-12);
        assert!(c.g(s).abs() < 1e-12);
    }

    #[test]
    fn corner_examples() {
        let m = xor_model();
        let c = m.corner_point(&[0, 1]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);

        let c = correlated_model().corner_point(&[0, 1]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12);

        let px = JointPmf::new(vec![crate::Alphabet::new(3).unwrap()], vec![0.2, 0.3, 0.5]).unwrap();
        let f = FunctionSpec::from_fn(&[3], 3, |x| x[0]).unwrap();
        let single =
            ProductChannelModel::from_channels(&px, &[Channel::identity(3).unwrap()], &f, 1e-9)
                .unwrap();
        let c = single.corner_point(&[0]).unwrap();
        let h = px.entropy(&VarSet::single(0)).unwrap();
        assert!((c[0] - h).abs() < 1e-12);

        assert!(m.corner_point(&[0, 0]).is_err());
        assert!(m.corner_point(&[0]).is_err());
        assert!(m.corner_point(&[0, 2]).is_err());
    }

    #[test]
    fn single_user_is_trivially_contrapolymatroid() {
        let px = JointPmf::uniform(&[3]).unwrap();
        let f = FunctionSpec::from_fn(&[3], 2, |x| usize::from(x[0] == 2)).unwrap();
        let m = ProductChannelModel::from_channels(
            &px,
            &[Channel::deterministic(&[0, 0, 1], 2).unwrap()],
            &f,
            1e-9,
        )
        .unwrap();
        assert!(m.check_contrapolymatroid(1e-9).unwrap().holds());
    }

    #[test]
    fn product_structure_violation_names_chain() {
        // U_1 = X_2: not generated through a channel from X_1.
        let mut probs = vec![0.0; 16];
        let sizes = [2, 2, 2, 2];
        let p = JointPmf::uniform(&sizes).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                probs[p.encode(&[x2, x2, x1, x2])] = 0.25;
            }
        }
        let joint = JointPmf::new(p.alphabets().to_vec(), probs).unwrap();
        let f = FunctionSpec::from_fn(&[2, 2], 2, |x| x[0] ^ x[1]).unwrap();
        let dist = AuxDistribution::from_joint(&joint, 2, &f).unwrap();
        let err = ProductChannelModel::new(dist.clone(), 1e-9).unwrap_err();
        match err {
            RegionError::Precondition(msg) => assert!(msg.contains("U_1 - X_1"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
        assert!(dist.check_outer_class(1e-9).is_err());
    }
}
