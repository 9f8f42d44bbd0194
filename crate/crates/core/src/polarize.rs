//! Synthesis of the polarized channels `W^-`, `W^+` and `W^s`.
//!
//! With `U, U'` independent and uniform on `G = G_1 x ... x G_m`, the two
//! channel uses see `X = U + U'` and `X' = U'`:
//!
//! * `W^-(z1, z2 | u)` averages over `u'`;
//! * `W^+(z1, z2, u | u')` exposes `u` as part of the output.
//!
//! Output alphabets grow as `|Z|^2` and `|Z|^2 |G|` per step, so by default
//! every synthesized channel is pruned of zero-probability outputs and has
//! outputs with identical input posteriors merged.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::abelian::IndexedGroup;
use crate::channel::Mac;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

/// A sequence `s in {-,+}^n`; the empty sequence leaves a channel unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSequence(Vec<Sign>);

impl SignSequence {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&self, sign: Sign) -> Self {
        let mut v = self.0.clone();
        v.push(sign);
        Self(v)
    }

    /// All `2^n` sequences of length `n`, lexicographic with `-` before `+`.
    pub fn all(n: usize) -> Vec<SignSequence> {
        (0..1usize << n)
            .map(|bits| {
                Self(
                    (0..n)
                        .map(|i| if bits >> (n - 1 - i) & 1 == 0 { Sign::Minus } else { Sign::Plus })
                        .collect(),
                )
            })
            .collect()
    }
}

impl FromStr for SignSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '-' => Ok(Sign::Minus),
                '+' => Ok(Sign::Plus),
                _ => Err(Error::InvalidSignSequence(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub merge_outputs: bool,
    pub merge_tolerance: f64,
    pub prune_zero_outputs: bool,
    pub max_depth: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { merge_outputs: true, merge_tolerance: 1e-9, prune_zero_outputs: true, max_depth: 3 }
    }
}

impl SynthesisOptions {
    pub fn unmerged() -> Self {
        Self { merge_outputs: false, prune_zero_outputs: false, ..Self::default() }
    }
}

fn input_table(mac: &Mac) -> IndexedGroup {
    IndexedGroup::new(mac.input_group().clone())
}

fn tidy(mac: Mac, opts: &SynthesisOptions) -> Mac {
    if opts.merge_outputs {
        merge_equivalent_outputs(&mac, opts.merge_tolerance, opts.prune_zero_outputs)
    } else if opts.prune_zero_outputs {
        prune_zero_outputs(&mac)
    } else {
        mac
    }
}

/// `W^-(z1, z2 | u) = 1/|G| sum_{u'} W(z1 | u + u') W(z2 | u')`.
pub fn minus(mac: &Mac, opts: &SynthesisOptions) -> Mac {
    let g = input_table(mac);
    let (n, nz) = (g.len(), mac.output_size());
    let out = nz * nz;
    let scale = 1.0 / n as f64;
    let mut table = vec![0.0; n * out];
    for u in 0..n {
        let row = &mut table[u * out..(u + 1) * out];
        for u2 in 0..n {
            let first = mac.row(g.add(u, u2));
            let second = mac.row(u2);
            for (z1, &a) in first.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let a = a * scale;
                for (z2, &b) in second.iter().enumerate() {
                    row[z1 * nz + z2] += a * b;
                }
            }
        }
    }
    let labels = mac.labels().map(|_| {
        (0..nz)
            .flat_map(|z1| (0..nz).map(move |z2| (z1, z2)))
            .map(|(z1, z2)| format!("({},{})", mac.label(z1), mac.label(z2)))
            .collect()
    });
    let w = Mac::from_parts(mac.groups().to_vec(), mac.input_group().clone(), out, table, labels);
    tidy(w, opts)
}

/// `W^+(z1, z2, u | u') = 1/|G| W(z1 | u + u') W(z2 | u')`.
///
/// Output `(z1, z2, u)` has index `(z1 |Z| + z2) |G| + u`.
pub fn plus(mac: &Mac, opts: &SynthesisOptions) -> Mac {
    let g = input_table(mac);
    let (n, nz) = (g.len(), mac.output_size());
    let out = nz * nz * n;
    let scale = 1.0 / n as f64;
    let mut table = vec![0.0; n * out];
    for u2 in 0..n {
        let row = &mut table[u2 * out..(u2 + 1) * out];
        let second = mac.row(u2);
        for u in 0..n {
            let first = mac.row(g.add(u, u2));
            for (z1, &a) in first.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let a = a * scale;
                for (z2, &b) in second.iter().enumerate() {
                    row[(z1 * nz + z2) * n + u] = a * b;
                }
            }
        }
    }
    let labels = mac.labels().map(|_| {
        let inputs = mac.input_group();
        let mut v = Vec::with_capacity(out);
        for z1 in 0..nz {
            for z2 in 0..nz {
                for u in 0..n {
                    v.push(format!(
                        "({},{},u={})",
                        mac.label(z1),
                        mac.label(z2),
                        inputs.element_at(u)
                    ));
                }
            }
        }
        v
    });
    let w = Mac::from_parts(mac.groups().to_vec(), mac.input_group().clone(), out, table, labels);
    tidy(w, opts)
}

pub fn apply(mac: &Mac, sign: Sign, opts: &SynthesisOptions) -> Mac {
    match sign {
        Sign::Minus => minus(mac, opts),
        Sign::Plus => plus(mac, opts),
    }
}

/// `W^s`, applying the signs left to right.
pub fn synthesize(mac: &Mac, seq: &SignSequence, opts: &SynthesisOptions) -> Result<Mac> {
    if seq.len() > opts.max_depth {
        return Err(Error::DepthExceeded { depth: seq.len(), max: opts.max_depth });
    }
    let mut w = mac.clone();
    for &s in seq.signs() {
        w = apply(&w, s, opts);
    }
    Ok(w)
}

/// All `2^n` channels `W^s` with `|s| = n`, in lexicographic sequence order.
/// Shared prefixes are synthesized once and sibling branches run in parallel.
pub fn synthesize_all(
    mac: &Mac,
    n: usize,
    opts: &SynthesisOptions,
) -> Result<Vec<(SignSequence, Mac)>> {
    if n > opts.max_depth {
        return Err(Error::DepthExceeded { depth: n, max: opts.max_depth });
    }
    fn grow(seq: SignSequence, w: Mac, left: usize, opts: &SynthesisOptions) -> Vec<(SignSequence, Mac)> {
        if left == 0 {
            return vec![(seq, w)];
        }
        let (mut lo, hi) = rayon::join(
            || grow(seq.push(Sign::Minus), minus(&w, opts), left - 1, opts),
            || grow(seq.push(Sign::Plus), plus(&w, opts), left - 1, opts),
        );
        lo.extend(hi);
        lo
    }
    Ok(grow(SignSequence::empty(), mac.clone(), n, opts))
}

/// Drops outputs that never occur.
pub fn prune_zero_outputs(mac: &Mac) -> Mac {
    let nz = mac.output_size();
    let keep: Vec<usize> = (0..nz)
        .filter(|&z| (0..mac.input_count()).any(|x| mac.prob(x, z) > 0.0))
        .collect();
    if keep.len() == nz {
        return mac.clone();
    }
    let groups: Vec<Vec<usize>> = keep.into_iter().map(|z| vec![z]).collect();
    regroup(mac, &groups)
}

/// Merges outputs whose input posteriors `P(x_1..x_m | z)` agree within
/// `tol` entrywise.
///
/// Candidates are bucketed by the posterior rounded to `ceil(-log10 tol)`
/// digits; inside a bucket each output joins the first group whose
/// representative is within `tol`. Merged outputs are ordered by their first
/// member, and keep that member's label.
pub fn merge_equivalent_outputs(mac: &Mac, tol: f64, prune: bool) -> Mac {
    let n = mac.input_count();
    let nz = mac.output_size();
    let digits = (-tol.log10()).ceil().clamp(0.0, 15.0) as i32;
    let quantum = 10f64.powi(digits);

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut representatives: Vec<Vec<f64>> = Vec::new();
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for z in 0..nz {
        let total: f64 = (0..n).map(|x| mac.prob(x, z)).sum();
        if total <= 0.0 {
            if !prune {
                groups.push(vec![z]);
                representatives.push(Vec::new());
            }
            continue;
        }
        let post: Vec<f64> = (0..n).map(|x| mac.prob(x, z) / total).collect();
        let key: Vec<i64> = post.iter().map(|&p| (p * quantum).round() as i64).collect();
        let bucket = buckets.entry(key).or_default();
        let found = bucket.iter().copied().find(|&gi| {
            representatives[gi].iter().zip(&post).all(|(a, b)| (a - b).abs() <= tol)
        });
        match found {
            Some(gi) => groups[gi].push(z),
            None => {
                bucket.push(groups.len());
                groups.push(vec![z]);
                representatives.push(post);
            }
        }
    }
    if groups.len() == nz {
        return mac.clone();
    }
    regroup(mac, &groups)
}

fn regroup(mac: &Mac, groups: &[Vec<usize>]) -> Mac {
    let n = mac.input_count();
    let out = groups.len();
    let mut table = vec![0.0; n * out];
    let rows: Vec<(usize, &[f64])> = (0..n).map(|x| (x, mac.row(x))).collect();
    table.par_chunks_mut(out).zip(rows.par_iter()).for_each(|(dst, (_, row))| {
        for (slot, members) in dst.iter_mut().zip(groups) {
            *slot = members.iter().map(|&z| row[z]).sum();
        }
    });
    let labels = mac.labels().map(|l| groups.iter().map(|g| l[g[0]].clone()).collect());
    Mac::from_parts(mac.groups().to_vec(), mac.input_group().clone(), out, table, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::UserSet;
    use crate::testing::*;

    const S1: UserSet = UserSet::from_mask(1);

    #[test]
    fn parse_and_display() {
        let s: SignSequence = "-+-".parse().unwrap();
        assert_eq!(s.signs(), &[Sign::Minus, Sign::Plus, Sign::Minus]);
        assert_eq!(s.to_string(), "-+-");
        assert!("".parse::<SignSequence>().unwrap().is_empty());
        assert!("-x".parse::<SignSequence>().is_err());
        let all: Vec<String> = SignSequence::all(2).iter().map(ToString::to_string).collect();
        assert_eq!(all, ["--", "-+", "+-", "++"]);
    }

    #[test]
    fn noiseless_single_user_is_a_fixed_point() {
        let w = identity(&[2]);
        let o = SynthesisOptions::default();
        assert!((minus(&w, &o).sum_capacity() - 1.0).abs() < 1e-12);
        assert!((plus(&w, &o).sum_capacity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_noise_stays_useless() {
        let w = pure_noise(&[2, 3], 2);
        let o = SynthesisOptions::default();
        assert!(minus(&w, &o).sum_capacity().abs() < 1e-12);
        assert!(plus(&w, &o).sum_capacity().abs() < 1e-12);
    }

    #[test]
    fn bac_sum_capacity_is_conserved() {
        let w = bac();
        let o = SynthesisOptions::default();
        let total = minus(&w, &o).sum_capacity() + plus(&w, &o).sum_capacity();
        assert!((total - 3.0).abs() < 1e-9);

        let avg: f64 = synthesize_all(&w, 2, &o)
            .unwrap()
            .iter()
            .map(|(_, c)| c.sum_capacity())
            .sum::<f64>()
            / 4.0;
        assert!((avg - 1.5).abs() < 1e-6);
    }

    #[test]
    fn extremal_information_on_random_channels() {
        let o = SynthesisOptions::default();
        for seed in 0..100 {
            let w = random_mac(&[&[2], &[3]], 2 + (seed as usize % 3), seed);
            let i = w.sum_capacity();
            let lo = minus(&w, &o).sum_capacity();
            let hi = plus(&w, &o).sum_capacity();
            assert!(lo <= i + 1e-9 && i <= hi + 1e-9, "seed {seed}: {lo} {i} {hi}");
        }
    }

    #[test]
    fn subset_information_never_increases_on_average() {
        let o = SynthesisOptions::default();
        for seed in 0..30 {
            let w = random_mac(&[&[2], &[2], &[2]], 3, seed);
            let (wm, wp) = (minus(&w, &o), plus(&w, &o));
            for s in UserSet::all_proper(3) {
                let lhs = wm.mutual_info(s).unwrap() + wp.mutual_info(s).unwrap();
                assert!(lhs <= 2.0 * w.mutual_info(s).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn synthesize_follows_definition() {
        let w = random_mac(&[&[2], &[2]], 3, 5);
        let o = SynthesisOptions::default();
        let same = synthesize(&w, &SignSequence::empty(), &o).unwrap();
        assert_eq!(same, w);
        let mm = synthesize(&w, &"--".parse().unwrap(), &o).unwrap();
        assert_eq!(mm, minus(&minus(&w, &o), &o));
        let err = synthesize(&w, &"----".parse().unwrap(), &o).unwrap_err();
        assert!(matches!(err, Error::DepthExceeded { depth: 4, max: 3 }));

        let all = synthesize_all(&w, 2, &o).unwrap();
        for (s, c) in &all {
            assert_eq!(c, &synthesize(&w, s, &o).unwrap());
        }
    }

    #[test]
    fn reduction_commutes_with_synthesis() {
        let o = SynthesisOptions::default();
        for seed in 0..5 {
            let w = random_mac(&[&[2], &[2], &[2]], 2, seed);
            for s in UserSet::all_proper(3) {
                for seq in SignSequence::all(2) {
                    let a = synthesize(&w, &seq, &o).unwrap().two_user_reduction(s).unwrap();
                    let b = synthesize(&w.two_user_reduction(s).unwrap(), &seq, &o).unwrap();
                    let ia = a.mutual_info(S1).unwrap();
                    let ib = b.mutual_info(S1).unwrap();
                    assert!((ia - ib).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn merging_duplicates_and_zero_columns() {
        let z2 = crate::abelian::GroupSpec::cyclic(2).unwrap();
        // outputs 0 and 2 have equal posteriors, output 3 never occurs
        let w = Mac::new(vec![z2], 4, vec![0.2, 0.5, 0.3, 0.0, 0.4, 0.0, 0.6, 0.0]).unwrap();
        let merged = merge_equivalent_outputs(&w, 1e-9, true);
        assert_eq!(merged.output_size(), 2);
        assert_eq!(merged.row(0), &[0.5, 0.5]);
        assert!((merged.sum_capacity() - w.sum_capacity()).abs() < 1e-12);

        let kept = merge_equivalent_outputs(&w, 1e-9, false);
        assert_eq!(kept.output_size(), 3);
        assert_eq!(prune_zero_outputs(&w).output_size(), 3);
    }

    #[test]
    fn merging_preserves_information_and_is_idempotent() {
        let w = bac();
        let raw = minus(&w, &SynthesisOptions::unmerged());
        let merged = merge_equivalent_outputs(&raw, 1e-9, true);
        assert!(merged.output_size() < raw.output_size());
        for s in UserSet::all_nonempty(2) {
            let d = raw.mutual_info(s).unwrap() - merged.mutual_info(s).unwrap();
            assert!(d.abs() < 1e-9);
        }
        assert_eq!(merge_equivalent_outputs(&merged, 1e-9, true), merged);

        for seed in 0..10 {
            let w = random_mac(&[&[2], &[2]], 2, seed);
            let raw = plus(&minus(&w, &SynthesisOptions::unmerged()), &SynthesisOptions::unmerged());
            let once = merge_equivalent_outputs(&raw, 1e-9, true);
            let twice = merge_equivalent_outputs(&once, 1e-9, true);
            assert_eq!(once, twice);
            for s in UserSet::all_nonempty(2) {
                let d = raw.mutual_info(s).unwrap() - once.mutual_info(s).unwrap();
                assert!(d.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn plus_labels_record_the_first_branch() {
        let w = bac().with_labels(vec!["0".into(), "1".into(), "2".into()]).unwrap();
        let p = plus(&w, &SynthesisOptions::unmerged());
        assert_eq!(p.output_size(), 9 * 4);
        assert_eq!(p.label(0), "(0,0,u=(0,0))");
        assert_eq!(p.label(5), "(0,1,u=(0,1))");
    }
}
