use std::fmt;

use super::RegionError;

/// A subset of users as a bitmask; bit `l` is user `l` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UserSet(u32);

/// Largest number of users a [`UserSet`] can address.
pub const MAX_USERS: usize = 31;

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(users: usize) -> Self {
        debug_assert!(users <= MAX_USERS);
        Self(((1u64 << users) - 1) as u32)
    }

    pub fn singleton(user: usize) -> Self {
        Self(1 << user)
    }

    pub fn from_users(users: impl IntoIterator<Item = usize>) -> Self {
        Self(users.into_iter().fold(0, |acc, u| acc | (1 << u)))
    }

    pub fn contains(self, user: usize) -> bool {
        self.0 & (1 << user) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: UserSet) -> UserSet {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: UserSet) -> UserSet {
        Self(self.0 & other.0)
    }

    pub fn without(self, user: usize) -> UserSet {
        Self(self.0 & !(1 << user))
    }

    pub fn complement(self, users: usize) -> UserSet {
        Self(!self.0 & Self::full(users).0)
    }

    pub fn is_subset(self, other: UserSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&u| self.0 & (1 << u) != 0)
    }

    /// Every subset of `{0..users}` in increasing bitmask order, empty first.
    pub fn all(users: usize) -> impl Iterator<Item = UserSet> {
        (0..(1u64 << users)).map(|b| UserSet(b as u32))
    }

    /// Every subset of `self`, empty first.
    pub fn subsets(self) -> impl Iterator<Item = UserSet> {
        let full = self.0;
        let mut cur: Option<u32> = Some(0);
        std::iter::from_fn(move || {
            let out = cur?;
            cur = if out == full {
                None
            } else {
                Some((out.wrapping_sub(full)) & full)
            };
            Some(UserSet(out))
        })
    }
}

/// Serialized in its 1-based display form.
impl serde::Serialize for UserSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for UserSet {
    /// 1-based, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, u) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u + 1)?;
        }
        write!(f, "}}")
    }
}

/// The family of colluding user sets. Each member is non-empty and a
/// proper subset of the users; members may overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollusionFamily {
    users: usize,
    sets: Vec<UserSet>,
}

impl CollusionFamily {
    pub fn new(users: usize, sets: Vec<UserSet>) -> Result<Self, RegionError> {
        if users == 0 || users > MAX_USERS {
            return Err(RegionError::InvalidFamily(format!(
                "user count {users} outside 1..={MAX_USERS}"
            )));
        }
        let full = UserSet::full(users);
        for (k, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(RegionError::InvalidFamily(format!("member {k} is empty")));
            }
            if !s.is_subset(full) {
                return Err(RegionError::InvalidFamily(format!(
                    "member {k} = {s} names a user outside 1..={users}"
                )));
            }
            if *s == full {
                return Err(RegionError::InvalidFamily(format!(
                    "member {k} = {s} contains every user; its leakage bound is vacuous"
                )));
            }
        }
        Ok(Self { users, sets })
    }

    pub fn empty(users: usize) -> Self {
        Self {
            users,
            sets: Vec::new(),
        }
    }

    /// Builds a family from 0-based user lists.
    pub fn from_lists(users: usize, lists: &[Vec<usize>]) -> Result<Self, RegionError> {
        Self::new(
            users,
            lists.iter().map(|l| UserSet::from_users(l.iter().copied())).collect(),
        )
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn sets(&self) -> &[UserSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let s = UserSet::from_users([0, 2]);
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(s.complement(4), UserSet::from_users([1, 3]));
        assert_eq!(s.len(), 2);
        assert!(UserSet::singleton(2).is_subset(s));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(UserSet::all(3).count(), 8);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(
            subs,
            vec![
                UserSet::EMPTY,
                UserSet::singleton(0),
                UserSet::singleton(2),
                s
            ]
        );
        assert_eq!(UserSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn family_validation() {
        assert!(CollusionFamily::from_lists(2, &[vec![0]]).is_ok());
        assert!(CollusionFamily::from_lists(2, &[vec![]]).is_err());
        assert!(CollusionFamily::from_lists(2, &[vec![0, 1]]).is_err());
        assert!(CollusionFamily::from_lists(2, &[vec![2]]).is_err());
        assert!(CollusionFamily::from_lists(3, &[vec![0, 1], vec![1, 2]]).is_ok());
    }
}
