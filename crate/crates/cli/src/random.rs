//! Pseudo-random product-channel instances for the property suites.

use fncomp_core::prob::Alphabet;
use fncomp_core::{Channel, CollusionFamily, FunctionSpec, JointPmf, UserSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Instance {
    pub p_x: JointPmf,
    pub channels: Vec<Channel>,
    pub f: FunctionSpec,
    pub family: CollusionFamily,
}

fn weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Rows with random supports, so some inputs are distinguishable.
fn sparse_channel(rng: &mut ChaCha8Rng, x: usize, u: usize) -> Channel {
    let rows = (0..x)
        .map(|_| {
            let mut w: Vec<f64> = (0..u)
                .map(|_| if rng.random_bool(0.6) { rng.random_range(0.05..1.0) } else { 0.0 })
                .collect();
            if w.iter().all(|&v| v == 0.0) {
                w[rng.random_range(0..u)] = 1.0;
            }
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    Channel::new(rows).expect("rows are normalized")
}

/// Smallest input in the class of inputs linked by overlapping row supports.
fn classes(c: &Channel) -> Vec<usize> {
    let x = c.input().size();
    let mut class: Vec<usize> = (0..x).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..x {
            for b in 0..x {
                let overlap = c.row(a).iter().zip(c.row(b)).any(|(p, q)| *p > 0.0 && *q > 0.0);
                let m = class[a].min(class[b]);
                if overlap && class[a] != class[b] {
                    class[a] = m;
                    class[b] = m;
                    changed = true;
                }
            }
        }
    }
    class
}

/// Independent inputs with alphabets in `1..=max_x`, channels with outputs
/// in `1..=max_u`, and `f` drawn as a function of the channel classes so
/// that `F` is decodable from `U_L`. The family holds every proper,
/// non-empty user subset.
pub fn random_instance(seed: u64, users: usize, max_x: usize, max_u: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<usize> = (0..users).map(|_| rng.random_range(1..=max_x)).collect();
    let us: Vec<usize> = (0..users).map(|_| rng.random_range(1..=max_u)).collect();
    let marginals: Vec<Vec<f64>> = xs.iter().map(|&x| weights(&mut rng, x)).collect();
    let p_x = JointPmf::product(&marginals).expect("marginals are normalized");
    let channels: Vec<Channel> = xs.iter().zip(&us).map(|(&x, &u)| sparse_channel(&mut rng, x, u)).collect();
    let cls: Vec<Vec<usize>> = channels.iter().map(classes).collect();
    let codomain = rng.random_range(1..=3);
    let values: Vec<usize> = (0..p_x.len()).map(|_| rng.random_range(0..codomain)).collect();
    let table = (0..p_x.len())
        .map(|idx| {
            let x = p_x.decode(idx);
            let key = x.iter().enumerate().fold(0, |acc, (l, &v)| acc * xs[l] + cls[l][v]);
            values[key]
        })
        .collect();
    let domain = xs.iter().map(|&s| Alphabet::new(s).expect("nonempty")).collect();
    let f = FunctionSpec::new(domain, Alphabet::new(codomain).expect("nonempty"), table).expect("table in range");
    let sets = UserSet::all(users)
        .filter(|s| !s.is_empty() && *s != UserSet::full(users))
        .collect();
    let family = CollusionFamily::new(users, sets).expect("proper subsets");
    Instance {
        p_x,
        channels,
        f,
        family,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fncomp_core::regions::PRECONDITION_TOL;
    use fncomp_core::ProductChannelModel;

    #[test]
    fn instances_are_decodable_and_reproducible() {
        for seed in 0..50 {
            let a = random_instance(seed, 3, 3, 3);
            let m = ProductChannelModel::from_channels(&a.p_x, &a.channels, &a.f, PRECONDITION_TOL).unwrap();
            m.dist().check_decodable(PRECONDITION_TOL).unwrap();
            let b = random_instance(seed, 3, 3, 3);
            assert_eq!(a.p_x.probs(), b.p_x.probs());
            assert_eq!(a.f.table(), b.f.table());
        }
    }
}
