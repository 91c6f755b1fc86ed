//! Entropy of a mixture of product bin laws, `q(m) = sum_c w_c prod_l p_c(m_l)`,
//! where each factor is either sparse or uniform over all of a user's bins.
//!
//! Bins that no sparse factor touches carry identical mass, so each user's
//! bins collapse into the touched ones plus a single "rest" class.

use std::collections::BTreeMap;

use super::scheme::BinLaw;
use crate::prob::xlog2x;

/// `laws[l][k]` is the `k`-th law of user `l`; `bins[l]` is `B_l`.
pub(crate) struct LawTable<'a> {
    pub laws: &'a [Vec<BinLaw>],
    pub bins: &'a [usize],
}

/// A mixture component: weight and one law index per user.
pub(crate) type Component = (f64, Vec<usize>);

/// Entropy in bits of the mixture; `components` weights must sum to one.
pub(crate) fn mixture_entropy(components: &[Component], table: &LawTable<'_>) -> f64 {
    let users = table.bins.len();
    let mut h = 0.0;
    let mut varying = Vec::new();
    for l in 0..users {
        let first = components[0].1[l];
        if components.iter().all(|c| c.1[l] == first) {
            // Independent of the other coordinates within the mixture.
            h += table.laws[l][first].entropy();
        } else {
            varying.push(l);
        }
    }
    if varying.is_empty() {
        return h;
    }

    // Classes per varying user: touched bins in increasing order, then rest.
    let k = varying.len();
    let mut class_of: Vec<Vec<u32>> = Vec::with_capacity(k);
    let mut touched: Vec<usize> = Vec::with_capacity(k);
    let mut rest: Vec<usize> = Vec::with_capacity(k);
    let mut classes: Vec<usize> = Vec::with_capacity(k);
    for &l in &varying {
        let mut hit = vec![false; table.bins[l]];
        for c in components {
            if let BinLaw::Matched(v) = &table.laws[l][c.1[l]] {
                for &(b, _) in v {
                    hit[b] = true;
                }
            }
        }
        let t = hit.iter().filter(|&&h| h).count();
        let r = table.bins[l] - t;
        let mut next = 0u32;
        let map: Vec<u32> = hit
            .iter()
            .map(|&h| {
                if h {
                    next += 1;
                    next - 1
                } else {
                    t as u32
                }
            })
            .collect();
        class_of.push(map);
        touched.push(t);
        rest.push(r);
        classes.push(t + usize::from(r > 0));
    }
    let mut strides = vec![1usize; k];
    for j in (0..k - 1).rev() {
        strides[j] = strides[j + 1] * classes[j + 1];
    }
    let strides = &strides;
    let cells: usize = classes.iter().product();

    // Sparse parts grouped by which varying users are uniform.
    let mut grouped: BTreeMap<u32, BTreeMap<usize, f64>> = BTreeMap::new();
    for (w, ids) in components {
        if *w == 0.0 {
            continue;
        }
        let mut pattern = 0u32;
        let mut scale = *w;
        let mut factors: Vec<Vec<(usize, f64)>> = Vec::new();
        for (j, &l) in varying.iter().enumerate() {
            match &table.laws[l][ids[l]] {
                BinLaw::Uniform(b) => {
                    pattern |= 1 << j;
                    scale /= *b as f64;
                }
                BinLaw::Matched(v) => factors.push(
                    v.iter()
                        .map(|&(b, p)| (class_of[j][b] as usize * strides[j], p))
                        .collect(),
                ),
            }
        }
        let g = grouped.entry(pattern).or_default();
        let mut stack = vec![(0usize, 0usize, scale)];
        while let Some((depth, key, val)) = stack.pop() {
            if depth == factors.len() {
                *g.entry(key).or_insert(0.0) += val;
                continue;
            }
            for &(off, p) in &factors[depth] {
                stack.push((depth + 1, key + off, val * p));
            }
        }
    }

    // Spread each group over the classes of its uniform users.
    let mut q = vec![0.0f64; cells];
    for (pattern, g) in &grouped {
        let free: Vec<usize> = (0..k).filter(|j| pattern & (1 << j) != 0).collect();
        let mut offsets = vec![0usize];
        for &j in &free {
            offsets = offsets
                .iter()
                .flat_map(|&a| (0..classes[j]).map(move |c| a + c * strides[j]))
                .collect();
        }
        for (&key, &val) in g {
            for &o in &offsets {
                q[key + o] += val;
            }
        }
    }

    // Bins per class: one for touched classes, the rest count otherwise.
    let mult: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            (0..classes[j])
                .map(|c| if c < touched[j] { 1.0 } else { rest[j] as f64 })
                .collect()
        })
        .collect();
    let row = classes[k - 1];
    let mut sum = 0.0;
    for (r, chunk) in q.chunks_exact(row).enumerate() {
        let base = r * row;
        let outer: f64 = (0..k - 1)
            .map(|j| mult[j][(base / strides[j]) % classes[j]])
            .product();
        let inner: f64 = chunk
            .iter()
            .zip(&mult[k - 1])
            .map(|(&v, &m)| m * xlog2x(v))
            .sum();
        sum -= outer * inner;
    }
    h + sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_entropy(components: &[Component], table: &LawTable<'_>) -> f64 {
        let b = table.bins;
        let total: usize = b.iter().product();
        let mut h = 0.0;
        for idx in 0..total {
            let mut rem = idx;
            let mut m = vec![0; b.len()];
            for l in (0..b.len()).rev() {
                m[l] = rem % b[l];
                rem /= b[l];
            }
            let q: f64 = components
                .iter()
                .map(|(w, ids)| w * (0..b.len()).map(|l| table.laws[l][ids[l]].prob(m[l])).product::<f64>())
                .sum();
            h -= xlog2x(q);
        }
        h
    }

    #[test]
    fn matches_dense_enumeration() {
        let laws = vec![
            vec![
                BinLaw::Matched(vec![(0, 0.5), (3, 0.5)]),
                BinLaw::Uniform(6),
                BinLaw::Matched(vec![(2, 1.0)]),
            ],
            vec![
                BinLaw::Uniform(5),
                BinLaw::Matched(vec![(1, 0.25), (4, 0.75)]),
            ],
            vec![BinLaw::Matched(vec![(0, 1.0)]), BinLaw::Uniform(2)],
        ];
        let bins = [6, 5, 2];
        let t = LawTable { laws: &laws, bins: &bins };
        let cases: Vec<Vec<Component>> = vec![
            vec![(1.0, vec![0, 1, 0])],
            vec![(0.5, vec![0, 0, 0]), (0.5, vec![1, 1, 0])],
            vec![(0.2, vec![0, 0, 1]), (0.3, vec![1, 1, 0]), (0.5, vec![2, 0, 1])],
            vec![(0.25, vec![1, 0, 1]), (0.75, vec![1, 0, 1])],
            vec![(0.1, vec![0, 1, 0]), (0.2, vec![1, 0, 1]), (0.3, vec![2, 1, 1]), (0.4, vec![1, 1, 0])],
        ];
        for c in cases {
            let a = mixture_entropy(&c, &t);
            let b = dense_entropy(&c, &t);
            assert!((a - b).abs() < 1e-12, "{a} vs {b} for {c:?}");
        }
    }
}
