//! Brute-force preservation checks by direct synthesis.
//!
//! `I_S` is preserved at depth `n` when the average of `I_S(W^s)` over all
//! `2^n` sign sequences equals `I_S(W)`. These checks know nothing about
//! Fourier fingerprints and serve as ground truth for [`crate::compat`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{Mac, TwoUserView, UserSet};
use crate::error::{Error, Result};
use crate::polarize::{self, SynthesisOptions};
use crate::tolerance::Tolerances;

/// `I_1(W^-) + I_1(W^+)` against `2 I_1(W)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Depth1Check {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, nonnegative up to rounding.
    pub deficit: f64,
    pub preserved: bool,
}

pub fn depth1_check(view: &TwoUserView, tol: &Tolerances) -> Result<Depth1Check> {
    let w = view.mac();
    let first = UserSet::from_mask(1);
    let opts = SynthesisOptions::default();
    let (minus, plus) =
        rayon::join(|| polarize::minus(w, &opts), || polarize::plus(w, &opts));
    let lhs = minus.mutual_info(first)? + plus.mutual_info(first)?;
    let rhs = 2.0 * w.mutual_info(first)?;
    Ok(Depth1Check { lhs, rhs, deficit: rhs - lhs, preserved: (lhs - rhs).abs() < tol.oracle })
}

/// A quadruple breaking
/// `p^_{y1,z1} conj(p^_{y2,z2}) = p^_{y1',z1} conj(p^_{y2',z2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrupleViolation {
    pub z1: usize,
    pub z2: usize,
    pub y1: usize,
    pub y2: usize,
    pub y1p: usize,
    pub y2p: usize,
    pub xhat: usize,
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierCheck {
    pub holds: bool,
    pub violation: Option<QuadrupleViolation>,
}

/// Fourier form of [`depth1_check`]: for all `z1, z2`, `y1, y1' in Y^z1` and
/// `y2, y2' in Y^z2` with `y1 - y2 = y1' - y2'`, the products
/// `p^_{y1,z1}(xhat) conj(p^_{y2,z2}(xhat))` must not depend on the choice
/// of quadruple, at every `xhat`. Reports the first violation found.
pub fn depth1_fourier_check(view: &TwoUserView, tol: &Tolerances) -> FourierCheck {
    let sets = view.support_sets();
    let g2 = view.g2();
    let n1 = view.g1().len();
    let nz = view.output_size();
    for z1 in 0..nz {
        for z2 in 0..nz {
            // first (y1, y2) seen for each difference
            let mut first: Vec<Option<(usize, usize)>> = vec![None; g2.len()];
            for &y1 in &sets.y_of_z[z1] {
                for &y2 in &sets.y_of_z[z2] {
                    let d = g2.sub(y1, y2);
                    let Some((a1, a2)) = first[d] else {
                        first[d] = Some((y1, y2));
                        continue;
                    };
                    let (p, q) = (view.spectrum(a1, z1).unwrap(), view.spectrum(a2, z2).unwrap());
                    let (r, s) = (view.spectrum(y1, z1).unwrap(), view.spectrum(y2, z2).unwrap());
                    for xhat in 0..n1 {
                        let lhs: Complex64 = p[xhat] * q[xhat].conj();
                        let rhs: Complex64 = r[xhat] * s[xhat].conj();
                        if (lhs - rhs).norm() > tol.ratio {
                            return FourierCheck {
                                holds: false,
                                violation: Some(QuadrupleViolation {
                                    z1,
                                    z2,
                                    y1: a1,
                                    y2: a2,
                                    y1p: y1,
                                    y2p: y2,
                                    xhat,
                                    lhs: (lhs.re, lhs.im),
                                    rhs: (rhs.re, rhs.im),
                                }),
                            };
                        }
                    }
                }
            }
        }
    }
    FourierCheck { holds: true, violation: None }
}

/// Average of `I_S(W^s)` over all sign sequences of one length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationProbe {
    pub set: UserSet,
    pub depth: usize,
    /// `(s, I_S(W^s))` in lexicographic order of `s`.
    pub values: Vec<(String, f64)>,
    pub average: f64,
    pub reference: f64,
    /// `reference - average`; nonnegative up to rounding.
    pub deficit: f64,
}

pub fn average_probe(
    mac: &Mac,
    set: UserSet,
    depth: usize,
    opts: &SynthesisOptions,
) -> Result<PreservationProbe> {
    let reference = mac.mutual_info(set)?;
    let channels = polarize::synthesize_all(mac, depth, opts)?;
    let values = channels
        .par_iter()
        .map(|(s, w)| Ok((s.to_string(), w.mutual_info(set)?)))
        .collect::<Result<Vec<_>>>()?;
    let average = values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64;
    Ok(PreservationProbe { set, depth, values, average, reference, deficit: reference - average })
}

/// Preservation of `I_S` through `max_depth` levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub set: UserSet,
    pub probes: Vec<PreservationProbe>,
    pub preserved: bool,
    /// The shallowest depth with a deficit above tolerance.
    pub failing_depth: Option<usize>,
    pub max_depth: usize,
}

/// Probes depths `1..=max_depth`, stopping at the first deficit above
/// `tol.oracle`. A `preserved` verdict says nothing about deeper levels.
pub fn oracle_verdict(
    mac: &Mac,
    set: UserSet,
    max_depth: usize,
    tol: &Tolerances,
) -> Result<OracleVerdict> {
    if set.is_empty() || !set.is_subset_of(UserSet::full(mac.users())) {
        return Err(Error::InvalidSubset(format!("{set} for a {}-user channel", mac.users())));
    }
    let opts = SynthesisOptions { max_depth: max_depth.max(1), ..Default::default() };
    let mut probes = Vec::new();
    let mut failing_depth = None;
    for depth in 1..=max_depth {
        let probe = average_probe(mac, set, depth, &opts)?;
        let failed = probe.deficit.abs() >= tol.oracle;
        probes.push(probe);
        if failed {
            failing_depth = Some(depth);
            break;
        }
    }
    Ok(OracleVerdict { set, probes, preserved: failing_depth.is_none(), failing_depth, max_depth })
}

/// Seeded channel families used to validate the checker.
pub mod corpus {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::abelian::GroupSpec;
    use crate::catalog;
    use crate::channel::Mac;

    /// Base seed of the reference corpus.
    pub const CORPUS_SEED: u64 = 20_240_611;

    #[derive(Debug, Clone)]
    pub struct CorpusEntry {
        pub name: String,
        pub seed: u64,
        pub mac: Mac,
    }

    fn z(n: u64) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Ordered group pairs with `|G_1| |G_2| <= 12`.
    pub fn group_pairs() -> Vec<(GroupSpec, GroupSpec)> {
        let v4 = GroupSpec::new(vec![2, 2]).unwrap();
        vec![
            (z(2), z(2)),
            (z(2), z(3)),
            (z(3), z(2)),
            (z(3), z(3)),
            (z(2), z(4)),
            (z(4), z(2)),
            (z(2), z(5)),
            (z(5), z(2)),
            (z(2), z(6)),
            (z(6), z(2)),
            (z(3), z(4)),
            (z(4), z(3)),
            (z(2), v4.clone()),
            (v4.clone(), z(2)),
            (z(3), v4.clone()),
            (v4, z(3)),
        ]
    }

    /// `count` unconstrained random two-user channels; entry `i` uses seed
    /// `seed + i`. About one in five has a zero in every row.
    pub fn random(seed: u64, count: usize) -> Vec<CorpusEntry> {
        let pairs = group_pairs();
        (0..count as u64)
            .map(|i| {
                let s = seed.wrapping_add(i);
                let mut r = rng(s);
                let (g1, g2) = pairs.choose(&mut r).unwrap().clone();
                let nz = r.gen_range(2..=3);
                let sparse = r.gen_bool(0.2);
                let mac = catalog::random_mac(&mut r, vec![g1.clone(), g2.clone()], nz, sparse)
                    .unwrap();
                let tag = if sparse { "-sparse" } else { "" };
                CorpusEntry { name: format!("random-{g1}-{g2}-z{nz}{tag}#{s}"), seed: s, mac }
            })
            .collect()
    }

    /// Channels with known algebraic structure, mostly compatible.
    pub fn structured(seed: u64) -> Vec<CorpusEntry> {
        let mut out = Vec::new();
        let mut push = |name: String, s: u64, mac: Mac| out.push(CorpusEntry { name, seed: s, mac });
        let mut s = seed;
        for (n1, n2, cs) in [
            (2u64, 2u64, &[0u64, 1][..]),
            (3, 3, &[0, 1, 2][..]),
            (2, 4, &[0, 1][..]),
            (4, 2, &[0, 2][..]),
            (2, 6, &[0, 1][..]),
            (4, 3, &[0][..]),
        ] {
            for &c in cs {
                s += 1;
                let mac = catalog::noisy_affine(&mut rng(s), n1, n2, c, 2 + (s % 2) as usize).unwrap();
                push(format!("noisy-affine-Z{n1}-Z{n2}-c{c}#{s}"), s, mac);
            }
        }
        for (g1, g2) in [(z(2), z(3)), (z(3), z(3)), (z(4), z(2))] {
            s += 1;
            let mac = catalog::product_channel(&mut rng(s), g1.clone(), g2.clone(), 2, 2).unwrap();
            push(format!("product-{g1}-{g2}#{s}"), s, mac);
        }
        for (g1, g2, img) in [(z(2), z(2), 1usize), (z(4), z(2), 2), (z(3), z(3), 2), (z(4), z(4), 1)] {
            let mac = catalog::noiseless_sum(g1.clone(), g2.clone(), &[img]).unwrap();
            push(format!("noiseless-sum-{g1}-{g2}-phi{img}"), 0, mac);
        }
        for groups in [vec![z(2), z(2)], vec![z(2), z(3)]] {
            let mac = catalog::identity(groups.clone()).unwrap();
            push(format!("identity-{}-{}", groups[0], groups[1]), 0, mac);
        }
        push("pure-noise-Z2-Z3".into(), 0, catalog::pure_noise(vec![z(2), z(3)], 2).unwrap());
        for eps in [0.05, 0.2] {
            let mac = catalog::parity_with_erasure(eps).unwrap();
            push(format!("parity-with-erasure-eps{eps}"), 0, mac);
        }
        out
    }

    /// Random `Z_2 x Z_3` channels; every third one is a product channel.
    pub fn coprime(seed: u64, count: usize) -> Vec<CorpusEntry> {
        (0..count as u64)
            .map(|i| {
                let s = seed.wrapping_add(i);
                let mut r = rng(s);
                let (name, mac) = if i % 3 == 0 {
                    ("product", catalog::product_channel(&mut r, z(2), z(3), 2, 2).unwrap())
                } else {
                    let sparse = r.gen_bool(0.2);
                    ("random", catalog::random_mac(&mut r, vec![z(2), z(3)], 3, sparse).unwrap())
                };
                CorpusEntry { name: format!("coprime-{name}#{s}"), seed: s, mac }
            })
            .collect()
    }

    /// `Z = V(X + aY)` on `F_3 x F_3` with random `a` and kernel `V`.
    pub fn prime_field_affine(seed: u64, count: usize) -> Vec<(CorpusEntry, u64)> {
        (0..count as u64)
            .map(|i| {
                let s = seed.wrapping_add(i);
                let mut r = rng(s);
                let a = r.gen_range(0..3);
                let nz = r.gen_range(2..=4);
                let mac = catalog::noisy_affine(&mut r, 3, 3, a, nz).unwrap();
                (CorpusEntry { name: format!("f3-affine-a{a}#{s}"), seed: s, mac }, a)
            })
            .collect()
    }

    /// Unconstrained random `F_3 x F_3` channels.
    pub fn prime_field_random(seed: u64, count: usize) -> Vec<CorpusEntry> {
        (0..count as u64)
            .map(|i| {
                let s = seed.wrapping_add(i);
                let mut r = rng(s);
                let nz = r.gen_range(2..=3);
                let sparse = r.gen_bool(0.2);
                let mac = catalog::random_mac(&mut r, vec![z(3), z(3)], nz, sparse).unwrap();
                CorpusEntry { name: format!("f3-random#{s}"), seed: s, mac }
            })
            .collect()
    }
}
