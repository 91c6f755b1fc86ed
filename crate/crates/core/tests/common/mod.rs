#![allow(dead_code)]

use fncomp_core::prob::Alphabet;
use fncomp_core::{Channel, FunctionSpec, JointPmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub p_x: JointPmf,
    pub channels: Vec<Channel>,
    pub f: FunctionSpec,
}

fn random_pmf(rng: &mut ChaCha8Rng, size: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Random row supports, so that some inputs become distinguishable.
fn random_channel(rng: &mut ChaCha8Rng, x: usize, u: usize) -> Channel {
    let rows = (0..x)
        .map(|_| {
            let mut w: Vec<f64> = (0..u)
                .map(|_| if rng.random_bool(0.5) { rng.random_range(0.05..1.0) } else { 0.0 })
                .collect();
            if w.iter().all(|&v| v == 0.0) {
                w[rng.random_range(0..u)] = 1.0;
            }
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    Channel::new(rows).unwrap()
}

/// Classes of inputs whose rows share support, transitively.
fn confusability_classes(c: &Channel) -> Vec<usize> {
    let x = c.input().size();
    let mut class: Vec<usize> = (0..x).collect();
    loop {
        let mut changed = false;
        for a in 0..x {
            for b in 0..x {
                let overlap = c.row(a).iter().zip(c.row(b)).any(|(p, q)| *p > 0.0 && *q > 0.0);
                if overlap && class[a] != class[b] {
                    let m = class[a].min(class[b]);
                    class[a] = m;
                    class[b] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            return class;
        }
    }
}

/// Independent inputs, sparse random channels and a random `f` that only
/// depends on what the channels reveal, so `H(F | U_L) = 0`.
pub fn random_instance(seed: u64, users: usize, max_x: usize, max_u: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<usize> = (0..users).map(|_| rng.random_range(1..=max_x)).collect();
    let us: Vec<usize> = (0..users).map(|_| rng.random_range(1..=max_u)).collect();
    let marginals: Vec<Vec<f64>> = xs.iter().map(|&x| random_pmf(&mut rng, x)).collect();
    let p_x = JointPmf::product(&marginals).unwrap();
    let channels: Vec<Channel> = xs.iter().zip(&us).map(|(&x, &u)| random_channel(&mut rng, x, u)).collect();
    let classes: Vec<Vec<usize>> = channels.iter().map(confusability_classes).collect();
    let fsize = rng.random_range(1..=3);
    let class_count: usize = xs.iter().product();
    let values: Vec<usize> = (0..class_count).map(|_| rng.random_range(0..fsize)).collect();
    let table = (0..p_x.len())
        .map(|idx| {
            let x = p_x.decode(idx);
            let key = x
                .iter()
                .enumerate()
                .fold(0, |acc, (l, &v)| acc * xs[l] + classes[l][v]);
            values[key]
        })
        .collect();
    let domain = xs.iter().map(|&s| Alphabet::new(s).unwrap()).collect();
    let f = FunctionSpec::new(domain, Alphabet::new(fsize).unwrap(), table).unwrap();
    Instance { p_x, channels, f }
}

/// A random joint pmf with some zero entries.
pub fn random_joint(seed: u64, sizes: &[usize]) -> JointPmf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = sizes.iter().product();
    let mut w: Vec<f64> = (0..len)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1.0) })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    let alphabets = sizes.iter().map(|&k| Alphabet::new(k).unwrap()).collect();
    JointPmf::new(alphabets, w.into_iter().map(|v| v / s).collect()).unwrap()
}

/// A random table over the product of `sizes` with values below `fsize`.
pub fn random_function(seed: u64, sizes: &[usize], fsize: usize) -> FunctionSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let len: usize = sizes.iter().product();
    let table = (0..len).map(|_| rng.random_range(0..fsize)).collect();
    let domain = sizes.iter().map(|&s| Alphabet::new(s).unwrap()).collect();
    FunctionSpec::new(domain, Alphabet::new(fsize).unwrap(), table).unwrap()
}
