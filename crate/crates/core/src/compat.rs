//! Decides whether polarization preserves `I_1` of a two-user channel.
//!
//! The test has two stages:
//!
//! 1. **Fingerprint.** For every output `z` and frequency `xhat` in `X^z`,
//!    the posterior spectra `p^_{y,z}(xhat)` over `y in Y^z` must all be
//!    nonzero, their ratios must be unimodular, and the ratio must depend only
//!    on `(xhat, y1 - y2)`. The resulting map on `XdY(W)` is the fingerprint.
//! 2. **Extension.** The fingerprint must extend to a pseudo-quadratic
//!    function: a map on a domain whose row and column sections are
//!    subgroups, multiplicative in each coordinate. The extension is the
//!    fixpoint of two closure rules,
//!    `F(x, y1 + y2) = F(x, y1) F(x, y2)` and `F(x1 + x2, y) = F(x1, y) F(x2, y)`.
//!
//! A channel passing both stages is polarization compatible and the closed
//! map is returned as the witness. For more than two users, user set `S` is
//! checked on the two-user channel `W_S`.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use num_integer::gcd;

use crate::abelian::IndexedGroup;
use crate::channel::{info, Mac, TwoUserView, UserSet};
use crate::error::{Error, Result};
use crate::polarize::{self, SynthesisOptions};
use crate::tolerance::Tolerances;

/// A partially defined map `G_1 x G_2 -> C`, dense over canonical indices.
#[derive(Debug, Clone)]
pub struct PartialFunction {
    g1: IndexedGroup,
    g2: IndexedGroup,
    values: Vec<Option<Complex64>>,
}

impl PartialFunction {
    pub fn empty(g1: IndexedGroup, g2: IndexedGroup) -> Self {
        let n = g1.len() * g2.len();
        Self { g1, g2, values: vec![None; n] }
    }

    pub fn from_entries(
        g1: IndexedGroup,
        g2: IndexedGroup,
        entries: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let mut f = Self::empty(g1, g2);
        for (x, y, v) in entries {
            f.set(x, y, v);
        }
        f
    }

    pub fn g1(&self) -> &IndexedGroup {
        &self.g1
    }

    pub fn g2(&self) -> &IndexedGroup {
        &self.g2
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<Complex64> {
        self.values[x * self.g2.len() + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: Complex64) {
        let n2 = self.g2.len();
        self.values[x * n2 + y] = Some(v);
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.get(x, y).is_some()
    }

    /// Defined entries in lexicographic `(x, y)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n2 = self.g2.len();
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(i, v)| v.map(|v| (i / n2, i % n2, v)))
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn row(&self, x: usize) -> Vec<usize> {
        (0..self.g2.len()).filter(|&y| self.contains(x, y)).collect()
    }

    fn column(&self, y: usize) -> Vec<usize> {
        (0..self.g1.len()).filter(|&x| self.contains(x, y)).collect()
    }

    /// First violation of the pseudo-quadratic laws, if any.
    pub fn pseudo_quadratic_violation(&self, tol: f64) -> Option<PseudoQuadViolation> {
        for (x, y, v) in self.entries() {
            if (v.norm() - 1.0).abs() > tol {
                return Some(PseudoQuadViolation::NotUnimodular { x, y, modulus: v.norm() });
            }
        }
        for x in 0..self.g1.len() {
            let ys = self.row(x);
            if ys.is_empty() {
                continue;
            }
            let mut mask = vec![false; self.g2.len()];
            ys.iter().for_each(|&y| mask[y] = true);
            if !self.g2.is_subgroup(&mask) {
                return Some(PseudoQuadViolation::RowNotSubgroup { x });
            }
            for &a in &ys {
                for &b in &ys {
                    let lhs = self.get(x, self.g2.add(a, b)).expect("subgroup");
                    let rhs = self.get(x, a).unwrap() * self.get(x, b).unwrap();
                    if (lhs - rhs).norm() > tol {
                        return Some(PseudoQuadViolation::RowNotHomomorphic { x, y1: a, y2: b });
                    }
                }
            }
        }
        for y in 0..self.g2.len() {
            let xs = self.column(y);
            if xs.is_empty() {
                continue;
            }
            let mut mask = vec![false; self.g1.len()];
            xs.iter().for_each(|&x| mask[x] = true);
            if !self.g1.is_subgroup(&mask) {
                return Some(PseudoQuadViolation::ColumnNotSubgroup { y });
            }
            for &a in &xs {
                for &b in &xs {
                    let lhs = self.get(self.g1.add(a, b), y).expect("subgroup");
                    let rhs = self.get(a, y).unwrap() * self.get(b, y).unwrap();
                    if (lhs - rhs).norm() > tol {
                        return Some(PseudoQuadViolation::ColumnNotHomomorphic { y, x1: a, x2: b });
                    }
                }
            }
        }
        None
    }
}

/// Why a partial map fails to be pseudo-quadratic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PseudoQuadViolation {
    NotUnimodular { x: usize, y: usize, modulus: f64 },
    RowNotSubgroup { x: usize },
    ColumnNotSubgroup { y: usize },
    RowNotHomomorphic { x: usize, y1: usize, y2: usize },
    ColumnNotHomomorphic { y: usize, x1: usize, x2: usize },
}

/// Whether `f` is pseudo-quadratic: every row section `{y : (x, y) in D}` and
/// column section `{x : (x, y) in D}` is a subgroup, values are unimodular,
/// and `f` is a homomorphism into the unit circle along every row and column.
pub fn is_pseudo_quadratic(f: &PartialFunction, tol: f64) -> bool {
    f.pseudo_quadratic_violation(tol).is_none()
}

/// A partial map known to be pseudo-quadratic.
#[derive(Debug, Clone)]
pub struct PseudoQuadFunction(PartialFunction);

impl PseudoQuadFunction {
    pub fn try_new(f: PartialFunction, tol: f64) -> std::result::Result<Self, PseudoQuadViolation> {
        match f.pseudo_quadratic_violation(tol) {
            None => Ok(Self(f)),
            Some(v) => Err(v),
        }
    }

    pub fn function(&self) -> &PartialFunction {
        &self.0
    }

    pub fn get(&self, x: usize, y: usize) -> Option<Complex64> {
        self.0.get(x, y)
    }

    /// `(xhat, y, phase)` triples, phase in turns in `[0, 1)`.
    pub fn phase_table(&self) -> Vec<(usize, usize, f64)> {
        self.0.entries().map(|(x, y, v)| (x, y, phase_turns(v))).collect()
    }
}

/// Argument of `v` as a fraction of a turn in `[0, 1)`, snapped to 12 digits.
pub fn phase_turns(v: Complex64) -> f64 {
    let t = v.arg() / std::f64::consts::TAU;
    let t = if t < 0.0 { t + 1.0 } else { t };
    let t = (t * 1e12).round() / 1e12;
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// One ratio `p^_{y1,z}(xhat) / p^_{y2,z}(xhat)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSample {
    pub z: usize,
    pub y1: usize,
    pub y2: usize,
    pub re: f64,
    pub im: f64,
}

impl RatioSample {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// The first check a fingerprint failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FingerprintFailure {
    /// `p^_{y,z}(xhat)` vanishes although `xhat in X^z`.
    Vanishing { z: usize, xhat: usize, y: usize, magnitude: f64 },
    /// A ratio within one output is off the unit circle.
    NotUnimodular { xhat: usize, ratio: RatioSample, modulus: f64 },
    /// Two ratios for the same `(xhat, y1 - y2)` disagree.
    Inconsistent { xhat: usize, diff: usize, first: RatioSample, second: RatioSample },
}

impl fmt::Display for FingerprintFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vanishing { z, xhat, y, magnitude } => write!(
                f,
                "spectrum of p_(y={y},z={z}) vanishes at xhat={xhat} (|.|={magnitude:.3e}) while xhat is in X^z"
            ),
            Self::NotUnimodular { xhat, ratio, modulus } => write!(
                f,
                "ratio p^_(y={},z={}) / p^_(y={},z={}) at xhat={xhat} has modulus {modulus:.9}",
                ratio.y1, ratio.z, ratio.y2, ratio.z
            ),
            Self::Inconsistent { xhat, diff, first, second } => write!(
                f,
                "ratios for (xhat={xhat}, dy={diff}) disagree: z={} (y1={}, y2={}) gives {:.9}{:+.9}i, z={} (y1={}, y2={}) gives {:.9}{:+.9}i",
                first.z, first.y1, first.y2, first.re, first.im,
                second.z, second.y1, second.y2, second.re, second.im
            ),
        }
    }
}

/// The map `(xhat, y1 - y2) -> p^_{y1,z}(xhat) / p^_{y2,z}(xhat)` on `XdY(W)`.
#[derive(Debug, Clone)]
pub struct Fingerprint {
    map: PartialFunction,
}

impl Fingerprint {
    pub fn map(&self) -> &PartialFunction {
        &self.map
    }

    pub fn get(&self, xhat: usize, y: usize) -> Option<Complex64> {
        self.map.get(xhat, y)
    }
}

/// Extracts the fingerprint of a two-user channel, or the first violated
/// well-definedness check.
///
/// Checks run over outputs `z` ascending, then `xhat in X^z` ascending; for
/// each, nonvanishing of every `p^_{y,z}(xhat)` is checked before the pairs
/// `(y1, y2)` in lexicographic order.
pub fn fingerprint(
    view: &TwoUserView,
    tol: &Tolerances,
) -> std::result::Result<Fingerprint, FingerprintFailure> {
    let g2 = view.g2();
    let sets = view.support_sets();
    let mut map = PartialFunction::empty(view.g1().clone(), g2.clone());
    // where each entry came from, for diagnostics
    let mut origin: Vec<Option<RatioSample>> = vec![None; view.g1().len() * g2.len()];

    for z in 0..view.output_size() {
        let ys = &sets.y_of_z[z];
        for &xhat in &sets.x_of_z[z] {
            let coeff = |y: usize| view.spectrum(y, z).expect("y in Y^z")[xhat];
            for &y in ys {
                let m = coeff(y).norm();
                if m <= tol.zero {
                    return Err(FingerprintFailure::Vanishing { z, xhat, y, magnitude: m });
                }
            }
            for &y1 in ys {
                for &y2 in ys {
                    let r = coeff(y1) / coeff(y2);
                    let sample = RatioSample { z, y1, y2, re: r.re, im: r.im };
                    if (r.norm() - 1.0).abs() > tol.ratio {
                        return Err(FingerprintFailure::NotUnimodular {
                            xhat,
                            ratio: sample,
                            modulus: r.norm(),
                        });
                    }
                    let diff = g2.sub(y1, y2);
                    let slot = xhat * g2.len() + diff;
                    match map.get(xhat, diff) {
                        None => {
                            map.set(xhat, diff, r);
                            origin[slot] = Some(sample);
                        }
                        Some(prev) if (prev - r).norm() > tol.ratio => {
                            return Err(FingerprintFailure::Inconsistent {
                                xhat,
                                diff,
                                first: origin[slot].expect("recorded with value"),
                                second: sample,
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    Ok(Fingerprint { map })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosureRule {
    /// `F(x, y1 + y2) = F(x, y1) F(x, y2)`
    SameFrequency,
    /// `F(x1 + x2, y) = F(x1, y) F(x2, y)`
    SameShift,
}

/// A closure step that contradicts an existing value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionConflict {
    pub rule: ClosureRule,
    pub round: usize,
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub target: (usize, usize),
    pub existing: (f64, f64),
    pub proposed: (f64, f64),
}

impl fmt::Display for ExtensionConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.rule {
            ClosureRule::SameFrequency => "F(x,y1+y2)=F(x,y1)F(x,y2)",
            ClosureRule::SameShift => "F(x1+x2,y)=F(x1,y)F(x2,y)",
        };
        write!(
            f,
            "round {}: {rule} with {:?} and {:?} assigns {:.9}{:+.9}i to {:?}, which already holds {:.9}{:+.9}i",
            self.round,
            self.left,
            self.right,
            self.proposed.0,
            self.proposed.1,
            self.target,
            self.existing.0,
            self.existing.1
        )
    }
}

/// Closes the fingerprint under both multiplicativity rules.
///
/// Each round applies the same-frequency rule over rows `x` ascending and
/// pairs `(y1, y2)` in lexicographic order, then the same-shift rule over
/// columns likewise. Rounds repeat until no entry is added; the domain only
/// grows, so this takes at most `|G_1| |G_2|` rounds. The first assignment
/// that contradicts an existing value by more than `tol` is reported.
pub fn extend_to_pseudo_quadratic(
    fp: &Fingerprint,
    tol: f64,
) -> std::result::Result<PseudoQuadFunction, ExtensionConflict> {
    let mut f = fp.map.clone();
    let (g1, g2) = (f.g1.clone(), f.g2.clone());
    let conflict = |rule, round, left, right, target, existing: Complex64, proposed: Complex64| {
        ExtensionConflict {
            rule,
            round,
            left,
            right,
            target,
            existing: (existing.re, existing.im),
            proposed: (proposed.re, proposed.im),
        }
    };

    let mut round = 0;
    loop {
        round += 1;
        let mut grew = false;
        for x in 0..g1.len() {
            let ys = f.row(x);
            for &a in &ys {
                for &b in &ys {
                    let target = g2.add(a, b);
                    let v = f.get(x, a).unwrap() * f.get(x, b).unwrap();
                    match f.get(x, target) {
                        None => {
                            f.set(x, target, v);
                            grew = true;
                        }
                        Some(e) if (e - v).norm() > tol => {
                            return Err(conflict(
                                ClosureRule::SameFrequency,
                                round,
                                (x, a),
                                (x, b),
                                (x, target),
                                e,
                                v,
                            ));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        for y in 0..g2.len() {
            let xs = f.column(y);
            for &a in &xs {
                for &b in &xs {
                    let target = g1.add(a, b);
                    let v = f.get(a, y).unwrap() * f.get(b, y).unwrap();
                    match f.get(target, y) {
                        None => {
                            f.set(target, y, v);
                            grew = true;
                        }
                        Some(e) if (e - v).norm() > tol => {
                            return Err(conflict(
                                ClosureRule::SameShift,
                                round,
                                (a, y),
                                (b, y),
                                (target, y),
                                e,
                                v,
                            ));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    debug_assert!(round <= g1.len() * g2.len() + 1);

    // a consistent fixpoint satisfies both laws; this only guards against
    // drift accumulated through long product chains
    PseudoQuadFunction::try_new(f, tol).map_err(|v| ExtensionConflict {
        rule: ClosureRule::SameFrequency,
        round,
        left: (0, 0),
        right: (0, 0),
        target: match v {
            PseudoQuadViolation::NotUnimodular { x, y, .. } => (x, y),
            _ => (0, 0),
        },
        existing: (0.0, 0.0),
        proposed: (0.0, 0.0),
    })
}

/// Why a channel is not polarization compatible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CompatFailure {
    FingerprintIllDefined(FingerprintFailure),
    ExtensionConflict(ExtensionConflict),
}

impl CompatFailure {
    pub fn stage(&self) -> &'static str {
        match self {
            Self::FingerprintIllDefined(_) => "fingerprint-ill-defined",
            Self::ExtensionConflict(_) => "extension-conflict",
        }
    }
}

impl fmt::Display for CompatFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FingerprintIllDefined(e) => write!(f, "{}: {e}", self.stage()),
            Self::ExtensionConflict(e) => write!(f, "{}: {e}", self.stage()),
        }
    }
}

/// Outcome of the compatibility test for one two-user channel.
#[derive(Debug, Clone)]
pub enum CompatReport {
    Compatible { witness: PseudoQuadFunction },
    Incompatible { failure: CompatFailure },
}

impl CompatReport {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Self::Compatible { .. })
    }

    pub fn witness(&self) -> Option<&PseudoQuadFunction> {
        match self {
            Self::Compatible { witness } => Some(witness),
            Self::Incompatible { .. } => None,
        }
    }

    pub fn failure(&self) -> Option<&CompatFailure> {
        match self {
            Self::Compatible { .. } => None,
            Self::Incompatible { failure } => Some(failure),
        }
    }
}

/// Decides polarization compatibility of a two-user channel with respect to
/// the first user.
pub fn check_compatibility(view: &TwoUserView, tol: &Tolerances) -> CompatReport {
    let fp = match fingerprint(view, tol) {
        Ok(fp) => fp,
        Err(e) => {
            return CompatReport::Incompatible { failure: CompatFailure::FingerprintIllDefined(e) }
        }
    };
    match extend_to_pseudo_quadratic(&fp, tol.ratio) {
        Ok(witness) => CompatReport::Compatible { witness },
        Err(e) => CompatReport::Incompatible { failure: CompatFailure::ExtensionConflict(e) },
    }
}

/// Largest violation of `p^_{y1,z}(xhat) = F(xhat, y1 - y2) p^_{y2,z}(xhat)`
/// over `(xhat, z) in XZ(W)` and `y1, y2 in Y^z`; `None` if `F` is undefined
/// somewhere it is needed.
pub fn witness_residual(view: &TwoUserView, witness: &PseudoQuadFunction) -> Option<f64> {
    let sets = view.support_sets();
    let g2 = view.g2();
    let mut worst: f64 = 0.0;
    for &(xhat, z) in &sets.xz {
        for &y1 in &sets.y_of_z[z] {
            for &y2 in &sets.y_of_z[z] {
                let f = witness.get(xhat, g2.sub(y1, y2))?;
                let a = view.spectrum(y1, z)?[xhat];
                let b = view.spectrum(y2, z)?[xhat];
                worst = worst.max((a - f * b).norm());
            }
        }
    }
    Some(worst)
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// For `G_1 = G_2 = F_q` with `q` prime: the first `a in F_q` with
/// `I(X + aY; Y | Z) < tol.zero`, or `None`.
pub fn prime_field_shortcut(view: &TwoUserView, tol: &Tolerances) -> Result<Option<u64>> {
    let (n1, n2, nz) = (view.g1().len(), view.g2().len(), view.output_size());
    if n1 != n2 || !is_prime(n1) {
        return Err(Error::Precondition(format!(
            "prime-field shortcut needs two groups of the same prime order, got {} and {}",
            view.g1().spec(),
            view.g2().spec()
        )));
    }
    let q = n1;
    // in a group of prime order the canonical index is the residue
    for a in 0..q {
        let mut joint = vec![0.0; q * q * nz];
        for x in 0..q {
            for y in 0..q {
                let t = (x + a * y) % q;
                for z in 0..nz {
                    joint[(t * q + y) * nz + z] += view.joint(x, y, z);
                }
            }
        }
        if info::cond_mutual_info(&joint, q, q, nz) < tol.zero {
            return Ok(Some(a as u64));
        }
    }
    Ok(None)
}

/// For `gcd(|G_1|, |G_2|) = 1`: whether `I(X; Y | Z) < tol.zero`.
pub fn coprime_shortcut(view: &TwoUserView, tol: &Tolerances) -> Result<bool> {
    let (n1, n2) = (view.g1().len() as u64, view.g2().len() as u64);
    if gcd(n1, n2) != 1 {
        return Err(Error::Precondition(format!(
            "co-prime shortcut needs co-prime group orders, got {n1} and {n2}"
        )));
    }
    Ok(view.cond_mutual_info_xy_given_z() < tol.zero)
}

/// Results of the special-case characterizations that apply to a channel.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ShortcutResults {
    /// `Some(found a)` when both groups have the same prime order. Omitted
    /// from JSON when the shortcut does not apply; `null` means no `a` works.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_field: Option<Option<u64>>,
    /// `Some(verdict)` when the group orders are co-prime.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coprime: Option<bool>,
}

impl ShortcutResults {
    pub fn for_view(view: &TwoUserView, tol: &Tolerances) -> Self {
        Self {
            prime_field: prime_field_shortcut(view, tol).ok(),
            coprime: coprime_shortcut(view, tol).ok(),
        }
    }

    /// Whether every applicable shortcut agrees with `compatible`.
    pub fn agree_with(&self, compatible: bool) -> bool {
        self.prime_field.is_none_or(|a| a.is_some() == compatible)
            && self.coprime.is_none_or(|c| c == compatible)
    }
}

/// Verdict for one user set of a multi-user channel.
#[derive(Debug, Clone)]
pub struct SubsetCheck {
    pub set: UserSet,
    pub report: CompatReport,
    pub shortcuts: ShortcutResults,
}

/// Verdicts for every nonempty proper user set.
#[derive(Debug, Clone)]
pub struct RegionCheck {
    pub users: usize,
    pub subsets: Vec<SubsetCheck>,
}

impl RegionCheck {
    /// The region is preserved iff every proper subset is; the full set is
    /// always preserved.
    pub fn preserved(&self) -> bool {
        self.subsets.iter().all(|s| s.report.is_compatible())
    }
}

/// Checks user set `set` through the two-user reduction `W_S`.
pub fn check_subset(mac: &Mac, set: UserSet, tol: &Tolerances) -> Result<SubsetCheck> {
    let view = TwoUserView::new(mac.two_user_reduction(set)?, tol.zero)?;
    let report = check_compatibility(&view, tol);
    let shortcuts = ShortcutResults::for_view(&view, tol);
    Ok(SubsetCheck { set, report, shortcuts })
}

pub fn check_region(mac: &Mac, tol: &Tolerances) -> Result<RegionCheck> {
    let sets: Vec<UserSet> = UserSet::all_proper(mac.users()).collect();
    let subsets = sets
        .into_par_iter()
        .map(|s| check_subset(mac, s, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionCheck { users: mac.users(), subsets })
}

/// Fingerprint of one channel along the alternating sequence.
#[derive(Debug, Clone)]
pub struct AlternatingLevel {
    pub depth: usize,
    pub output_size: usize,
    pub fingerprint: std::result::Result<Fingerprint, FingerprintFailure>,
    /// Entries of this level's fingerprint that the witness also defines
    /// but with a different value.
    pub disagreements: Vec<(usize, usize)>,
    /// Entries of this level's fingerprint outside the witness domain.
    pub outside_witness: Vec<(usize, usize)>,
}

/// Slow cross-check of the closure: synthesizes `W, W^-, W^(-,+), ...` up to
/// `depth` and compares each fingerprint against `witness`.
pub fn alternating_cross_check(
    mac: &Mac,
    witness: &PseudoQuadFunction,
    depth: usize,
    tol: &Tolerances,
) -> Result<Vec<AlternatingLevel>> {
    if mac.users() != 2 {
        return Err(Error::Precondition("alternating cross-check needs two users".into()));
    }
    let opts = SynthesisOptions { merge_outputs: false, prune_zero_outputs: true, ..Default::default() };
    let mut levels = Vec::new();
    let mut w = mac.clone();
    for n in 0..=depth {
        if n > 0 {
            w = if n % 2 == 1 { polarize::minus(&w, &opts) } else { polarize::plus(&w, &opts) };
        }
        let view = TwoUserView::new(w.clone(), tol.zero)?;
        let fp = fingerprint(&view, tol);
        let mut disagreements = Vec::new();
        let mut outside_witness = Vec::new();
        if let Ok(fp) = &fp {
            for (x, y, v) in fp.map().entries() {
                match witness.get(x, y) {
                    Some(f) if (f - v).norm() > tol.ratio => disagreements.push((x, y)),
                    Some(_) => {}
                    None => outside_witness.push((x, y)),
                }
            }
        }
        levels.push(AlternatingLevel {
            depth: n,
            output_size: w.output_size(),
            fingerprint: fp,
            disagreements,
            outside_witness,
        });
    }
    Ok(levels)
}
