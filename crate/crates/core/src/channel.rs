//! Multiple access channels with finite Abelian input groups.
//!
//! A [`Mac`] with users `1..=m` maps inputs `(x_1, ..., x_m)` to a finite
//! output alphabet `0..output_size`. Rows of the transition table are ordered
//! lexicographically over the input tuple, which is the canonical enumeration
//! of the product group `G_1 x ... x G_m`. All information quantities assume
//! independent uniform inputs.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abelian::{GroupElement, GroupSpec, IndexedGroup};
use crate::error::{Error, Result};
use crate::spectral::{FourierKernel, GroupFunction};

/// Tolerance on row sums of a transition table.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// A nonempty set of users, as a bitmask: bit `i - 1` is user `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserSet(u32);

impl UserSet {
    pub const MAX_USERS: usize = 16;

    pub const fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    /// Builds a set from 1-based user numbers.
    pub fn from_users(users: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &u in users {
            if u == 0 || u > Self::MAX_USERS {
                return Err(Error::InvalidSubset(format!("user {u} out of range")));
            }
            mask |= 1 << (u - 1);
        }
        Ok(Self(mask))
    }

    pub fn full(users: usize) -> Self {
        Self(((1u64 << users) - 1) as u32)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    /// Whether the user with 0-based position `i` is in the set.
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn complement(self, users: usize) -> Self {
        Self(!self.0 & Self::full(users).0)
    }

    pub fn is_subset_of(self, other: UserSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// 0-based positions of the members, ascending.
    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// All nonempty subsets of `{1..users}`, ascending by mask.
    pub fn all_nonempty(users: usize) -> impl Iterator<Item = UserSet> {
        (1..=Self::full(users).0).map(UserSet)
    }

    /// All nonempty proper subsets of `{1..users}`.
    pub fn all_proper(users: usize) -> impl Iterator<Item = UserSet> {
        let full = Self::full(users).0;
        (1..full).map(UserSet)
    }

    fn check(self, users: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidSubset("empty user set".into()));
        }
        if !self.is_subset_of(Self::full(users)) {
            return Err(Error::InvalidSubset(format!(
                "mask {:#b} names users beyond {users}",
                self.0
            )));
        }
        Ok(())
    }
}

impl fmt::Display for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let users: Vec<String> = self.members().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", users.join(","))
    }
}

/// One problem found while validating a transition table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ValidationIssue {
    Shape { expected: usize, found: usize },
    NoUsers,
    NoOutputs,
    EntryOutOfRange { row: usize, column: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
    LabelCount { expected: usize, found: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { expected, found } => {
                write!(f, "table has {found} entries, expected {expected}")
            }
            Self::NoUsers => write!(f, "channel has no users"),
            Self::NoOutputs => write!(f, "output alphabet is empty"),
            Self::EntryOutOfRange { row, column, value } => {
                write!(f, "row {row}, column {column}: entry {value} outside [0, 1]")
            }
            Self::RowSum { row, sum } => write!(f, "row {row} sums to {sum}, expected 1"),
            Self::LabelCount { expected, found } => {
                write!(f, "{found} output labels for {expected} outputs")
            }
        }
    }
}

/// Checks a transition table, reporting every problem found.
pub fn validate(
    groups: &[GroupSpec],
    output_size: usize,
    table: &[f64],
) -> std::result::Result<(), Vec<ValidationIssue>> {
    let mut issues = Vec::new();
    if groups.is_empty() {
        issues.push(ValidationIssue::NoUsers);
    }
    if output_size == 0 {
        issues.push(ValidationIssue::NoOutputs);
    }
    let rows: usize = groups.iter().map(GroupSpec::cardinality).product();
    let expected = rows.saturating_mul(output_size);
    if table.len() != expected {
        issues.push(ValidationIssue::Shape { expected, found: table.len() });
    }
    if issues.is_empty() {
        for (row, entries) in table.chunks(output_size).enumerate() {
            for (column, &value) in entries.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    issues.push(ValidationIssue::EntryOutOfRange { row, column, value });
                }
            }
            let sum: f64 = entries.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL || !sum.is_finite() {
                issues.push(ValidationIssue::RowSum { row, sum });
            }
        }
    }
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

/// An m-user multiple access channel `W(z | x_1, ..., x_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mac {
    groups: Vec<GroupSpec>,
    inputs: GroupSpec,
    output_size: usize,
    table: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Mac {
    pub fn new(groups: Vec<GroupSpec>, output_size: usize, table: Vec<f64>) -> Result<Self> {
        validate(&groups, output_size, &table).map_err(|issues| {
            Error::InvalidChannel(issues.iter().map(ToString::to_string).collect())
        })?;
        if groups.len() > UserSet::MAX_USERS {
            return Err(Error::InvalidChannel(vec![format!(
                "{} users exceeds the maximum of {}",
                groups.len(),
                UserSet::MAX_USERS
            )]));
        }
        let inputs = GroupSpec::product_of(&groups)?;
        Ok(Self { groups, inputs, output_size, table, labels: None })
    }

    /// Builds a channel from a table the caller knows to be stochastic up to
    /// rounding.
    pub(crate) fn from_parts(
        groups: Vec<GroupSpec>,
        inputs: GroupSpec,
        output_size: usize,
        table: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Self {
        debug_assert_eq!(table.len(), inputs.cardinality() * output_size);
        Self { groups, inputs, output_size, table, labels }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.output_size {
            return Err(Error::InvalidChannel(vec![ValidationIssue::LabelCount {
                expected: self.output_size,
                found: labels.len(),
            }
            .to_string()]));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn users(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[GroupSpec] {
        &self.groups
    }

    /// The product group of all inputs; its canonical enumeration orders rows.
    pub fn input_group(&self) -> &GroupSpec {
        &self.inputs
    }

    pub fn input_count(&self) -> usize {
        self.inputs.cardinality()
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of output `z`, falling back to its index.
    pub fn label(&self, z: usize) -> String {
        match &self.labels {
            Some(l) => l[z].clone(),
            None => z.to_string(),
        }
    }

    #[inline]
    pub fn prob(&self, input: usize, z: usize) -> f64 {
        self.table[input * self.output_size + z]
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.table[input * self.output_size..(input + 1) * self.output_size]
    }

    /// Splits a row index into per-user canonical indices.
    pub fn split_input(&self, input: usize) -> Vec<usize> {
        let mut out = vec![0; self.groups.len()];
        let mut rest = input;
        for (slot, g) in out.iter_mut().zip(&self.groups).rev() {
            *slot = rest % g.cardinality();
            rest /= g.cardinality();
        }
        out
    }

    pub fn join_input(&self, parts: &[usize]) -> usize {
        parts
            .iter()
            .zip(&self.groups)
            .fold(0, |acc, (&p, g)| acc * g.cardinality() + p)
    }

    /// For every row, the index of the sub-tuple `x_S` in `G_S`.
    fn project_rows(&self, set: UserSet) -> (Vec<usize>, usize) {
        let size: usize = set.members().map(|i| self.groups[i].cardinality()).product();
        let proj = (0..self.input_count())
            .map(|input| {
                let parts = self.split_input(input);
                set.members()
                    .fold(0, |acc, i| acc * self.groups[i].cardinality() + parts[i])
            })
            .collect();
        (proj, size)
    }

    /// `I_S(W) = I(X_S; Z, X_{S^c})` in bits.
    pub fn mutual_info(&self, set: UserSet) -> Result<f64> {
        set.check(self.users())?;
        let n = self.input_count() as f64;
        let comp = set.complement(self.users());
        let (proj, comp_size) = self.project_rows(comp);
        let set_size: usize = set.members().map(|i| self.groups[i].cardinality()).product();

        // H(X, Z) and H(X_{S^c}, Z) with P(x, z) = W(z|x) / |G|
        let h_joint = info::entropy(self.table.iter().map(|&w| w / n));
        let mut marginal = vec![0.0; comp_size * self.output_size];
        for (input, &c) in proj.iter().enumerate() {
            let row = self.row(input);
            let dst = &mut marginal[c * self.output_size..(c + 1) * self.output_size];
            for (d, &w) in dst.iter_mut().zip(row) {
                *d += w / n;
            }
        }
        let h_comp = info::entropy(marginal.iter().copied());
        let nats = (set_size as f64).ln() + h_comp - h_joint;
        Ok(nats.max(0.0) / std::f64::consts::LN_2)
    }

    /// Symmetric sum capacity `I(W) = I(X_1..X_m; Z)` in bits.
    pub fn sum_capacity(&self) -> f64 {
        self.mutual_info(UserSet::full(self.users())).expect("full set is valid")
    }

    pub fn region(&self) -> RegionReport {
        let entries = UserSet::all_nonempty(self.users())
            .map(|s| (s, self.mutual_info(s).expect("valid subset")))
            .collect();
        RegionReport { users: self.users(), entries }
    }

    /// The two-user channel `W_S : G_S x G_{S^c} -> Z`.
    pub fn two_user_reduction(&self, set: UserSet) -> Result<Mac> {
        set.check(self.users())?;
        let comp = set.complement(self.users());
        if comp.is_empty() {
            return Err(Error::InvalidSubset(format!(
                "{set} is the full user set; W_S needs a proper subset"
            )));
        }
        let gs = GroupSpec::product_of(set.members().map(|i| &self.groups[i]))?;
        let gc = GroupSpec::product_of(comp.members().map(|i| &self.groups[i]))?;
        let (ps, _) = self.project_rows(set);
        let (pc, nc) = self.project_rows(comp);
        let z = self.output_size;
        let mut table = vec![0.0; self.table.len()];
        for input in 0..self.input_count() {
            let row = ps[input] * nc + pc[input];
            table[row * z..(row + 1) * z].copy_from_slice(self.row(input));
        }
        let inputs = gs.product(&gc)?;
        Ok(Mac::from_parts(vec![gs, gc], inputs, z, table, self.labels.clone()))
    }
}

/// Information-theoretic helpers, natural log internally.
pub mod info {
    /// `-sum p ln p` with `0 ln 0 = 0`.
    pub fn entropy(probs: impl Iterator<Item = f64>) -> f64 {
        probs.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
    }

    /// `I(A; B | C)` in bits for a joint table indexed `[(a * nb + b) * nc + c]`.
    pub fn cond_mutual_info(joint: &[f64], na: usize, nb: usize, nc: usize) -> f64 {
        assert_eq!(joint.len(), na * nb * nc);
        let mut ac = vec![0.0; na * nc];
        let mut bc = vec![0.0; nb * nc];
        let mut c_marg = vec![0.0; nc];
        for a in 0..na {
            for b in 0..nb {
                for c in 0..nc {
                    let p = joint[(a * nb + b) * nc + c];
                    ac[a * nc + c] += p;
                    bc[b * nc + c] += p;
                    c_marg[c] += p;
                }
            }
        }
        let nats = entropy(ac.into_iter()) + entropy(bc.into_iter())
            - entropy(joint.iter().copied())
            - entropy(c_marg.into_iter());
        nats.max(0.0) / std::f64::consts::LN_2
    }
}

/// `I_S(W)` for every nonempty user set, in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub users: usize,
    pub entries: Vec<(UserSet, f64)>,
}

impl RegionReport {
    pub fn get(&self, set: UserSet) -> Option<f64> {
        self.entries.iter().find(|(s, _)| *s == set).map(|&(_, v)| v)
    }

    pub fn sum_capacity(&self) -> f64 {
        self.get(UserSet::full(self.users)).unwrap_or(0.0)
    }

    /// Corner points of the dominant face for two users:
    /// `(I_1, I - I_1)` and `(I - I_2, I_2)`.
    pub fn dominant_face_corners(&self) -> Option<[(f64, f64); 2]> {
        if self.users != 2 {
            return None;
        }
        let i1 = self.get(UserSet::from_mask(1))?;
        let i2 = self.get(UserSet::from_mask(2))?;
        let i = self.sum_capacity();
        Some([(i1, i - i1), (i - i2, i2)])
    }
}

/// The support sets of a two-user channel, in canonical indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSets {
    /// `(y, z)` with `P(Y = y, Z = z) > tol`.
    pub yz: BTreeSet<(usize, usize)>,
    /// `Y^z`, per output.
    pub y_of_z: Vec<Vec<usize>>,
    /// `{y1 - y2 : y1, y2 in Y^z}`, per output.
    pub dy_of_z: Vec<Vec<usize>>,
    /// `X^z`: frequencies where some posterior spectrum is nonzero, per output.
    pub x_of_z: Vec<Vec<usize>>,
    /// `{(xhat, z) : xhat in X^z}`.
    pub xz: BTreeSet<(usize, usize)>,
    /// Union over z of `X^z x dY^z`.
    pub xdy: BTreeSet<(usize, usize)>,
}

/// A two-user channel `(X, Y) -> Z` with its joint law and the posterior
/// spectra `p^_{y,z}` precomputed.
#[derive(Debug, Clone)]
pub struct TwoUserView {
    mac: Mac,
    g1: IndexedGroup,
    g2: IndexedGroup,
    kernel: FourierKernel,
    zero_tol: f64,
    /// `P(Y = y, Z = z)`, indexed `y * |Z| + z`.
    p_yz: Vec<f64>,
    /// `p_{y,z}(x)`, present for `(y, z)` in the support.
    posteriors: Vec<Option<Vec<f64>>>,
    spectra: Vec<Option<Vec<Complex64>>>,
    support: SupportSets,
}

impl TwoUserView {
    pub fn new(mac: Mac, zero_tol: f64) -> Result<Self> {
        if mac.users() != 2 {
            return Err(Error::Precondition(format!(
                "two-user view needs a 2-user channel, got {} users",
                mac.users()
            )));
        }
        let g1 = IndexedGroup::new(mac.groups()[0].clone());
        let g2 = IndexedGroup::new(mac.groups()[1].clone());
        let kernel = FourierKernel::from_indexed(g1.clone());
        let (n1, n2, nz) = (g1.len(), g2.len(), mac.output_size());
        let scale = 1.0 / (n1 * n2) as f64;

        let mut p_yz = vec![0.0; n2 * nz];
        for x in 0..n1 {
            for y in 0..n2 {
                for (z, &w) in mac.row(x * n2 + y).iter().enumerate() {
                    p_yz[y * nz + z] += w * scale;
                }
            }
        }

        let mut posteriors = vec![None; n2 * nz];
        let mut spectra = vec![None; n2 * nz];
        let mut yz = BTreeSet::new();
        let mut y_of_z = vec![Vec::new(); nz];
        for y in 0..n2 {
            for z in 0..nz {
                let mass = p_yz[y * nz + z];
                if mass > zero_tol {
                    let post: Vec<f64> =
                        (0..n1).map(|x| mac.prob(x * n2 + y, z) * scale / mass).collect();
                    spectra[y * nz + z] = Some(kernel.forward_real(&post));
                    posteriors[y * nz + z] = Some(post);
                    yz.insert((y, z));
                    y_of_z[z].push(y);
                }
            }
        }

        let mut dy_of_z = Vec::with_capacity(nz);
        let mut x_of_z = Vec::with_capacity(nz);
        let mut xz = BTreeSet::new();
        let mut xdy = BTreeSet::new();
        for z in 0..nz {
            let ys = &y_of_z[z];
            let dy: BTreeSet<usize> =
                ys.iter().flat_map(|&a| ys.iter().map(move |&b| (a, b))).map(|(a, b)| g2.sub(a, b)).collect();
            let xs: Vec<usize> = (0..n1)
                .filter(|&xhat| {
                    ys.iter().any(|&y| {
                        spectra[y * nz + z].as_ref().expect("support")[xhat].norm() > zero_tol
                    })
                })
                .collect();
            for &xhat in &xs {
                xz.insert((xhat, z));
                for &d in &dy {
                    xdy.insert((xhat, d));
                }
            }
            dy_of_z.push(dy.into_iter().collect());
            x_of_z.push(xs);
        }

        let support = SupportSets { yz, y_of_z, dy_of_z, x_of_z, xz, xdy };
        Ok(Self { mac, g1, g2, kernel, zero_tol, p_yz, posteriors, spectra, support })
    }

    pub fn mac(&self) -> &Mac {
        &self.mac
    }

    pub fn g1(&self) -> &IndexedGroup {
        &self.g1
    }

    pub fn g2(&self) -> &IndexedGroup {
        &self.g2
    }

    pub fn kernel(&self) -> &FourierKernel {
        &self.kernel
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn output_size(&self) -> usize {
        self.mac.output_size()
    }

    pub fn support_sets(&self) -> &SupportSets {
        &self.support
    }

    /// `P(X = x, Y = y, Z = z)` under uniform inputs.
    pub fn joint(&self, x: usize, y: usize, z: usize) -> f64 {
        self.mac.prob(x * self.g2.len() + y, z) / (self.g1.len() * self.g2.len()) as f64
    }

    pub fn p_yz(&self, y: usize, z: usize) -> f64 {
        self.p_yz[y * self.output_size() + z]
    }

    /// `p_{y,z}(x) = P(X = x | Y = y, Z = z)` as a function on `G_1`.
    pub fn posterior(&self, y: &GroupElement, z: usize) -> Result<GroupFunction> {
        let yi = self.g2.spec().index_of(y)?;
        let post = self.posterior_by_index(yi, z).ok_or_else(|| Error::NotInSupport {
            y: y.to_string(),
            z,
        })?;
        GroupFunction::from_real(self.g1.spec().clone(), post)
    }

    pub fn posterior_by_index(&self, y: usize, z: usize) -> Option<&[f64]> {
        if z >= self.output_size() {
            return None;
        }
        self.posteriors.get(y * self.output_size() + z)?.as_deref()
    }

    /// `p^_{y,z}`, the DFT of the posterior; `None` off the support.
    pub fn spectrum(&self, y: usize, z: usize) -> Option<&[Complex64]> {
        if z >= self.output_size() {
            return None;
        }
        self.spectra.get(y * self.output_size() + z)?.as_deref()
    }

    /// `I(X; Y | Z)` in bits.
    pub fn cond_mutual_info_xy_given_z(&self) -> f64 {
        let (n1, n2, nz) = (self.g1.len(), self.g2.len(), self.output_size());
        let mut joint = vec![0.0; n1 * n2 * nz];
        for x in 0..n1 {
            for y in 0..n2 {
                for z in 0..nz {
                    joint[(x * n2 + y) * nz + z] = self.joint(x, y, z);
                }
            }
        }
        info::cond_mutual_info(&joint, n1, n2, nz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;

    #[test]
    fn validate_examples() {
        let bac = bac();
        assert!(validate(bac.groups(), 3, bac.table()).is_ok());

        let z2 = GroupSpec::cyclic(2).unwrap();
        let issues = validate(std::slice::from_ref(&z2), 2, &[0.5, 0.4, 0.5, 0.5]).unwrap_err();
        assert_eq!(issues.len(), 1);
        assert!(matches!(issues[0], ValidationIssue::RowSum { row: 0, .. }));

        let issues = validate(std::slice::from_ref(&z2), 2, &[1.2, -0.2, 0.5, 0.5]).unwrap_err();
        assert!(issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::EntryOutOfRange { row: 0, column: 1, .. })));

        let issues = validate(&[z2], 2, &[1.0, 0.0]).unwrap_err();
        assert!(matches!(issues[0], ValidationIssue::Shape { expected: 4, found: 2 }));
    }

    #[test]
    fn bac_mutual_information() {
        let w = bac();
        let s1 = UserSet::from_mask(1);
        let s2 = UserSet::from_mask(2);
        assert!((w.mutual_info(s1).unwrap() - 1.0).abs() < 1e-12);
        assert!((w.mutual_info(s2).unwrap() - 1.0).abs() < 1e-12);
        assert!((w.sum_capacity() - 1.5).abs() < 1e-12);
        assert!(w.mutual_info(UserSet::from_mask(0)).is_err());
        assert!(w.mutual_info(UserSet::from_mask(4)).is_err());
    }

    #[test]
    fn noise_and_identity_channels() {
        let n = pure_noise(&[2, 2], 3);
        for s in UserSet::all_nonempty(2) {
            assert!(n.mutual_info(s).unwrap().abs() < 1e-12);
        }
        let id = identity(&[2, 2]);
        assert!((id.mutual_info(UserSet::from_mask(1)).unwrap() - 1.0).abs() < 1e-12);
        assert!((id.mutual_info(UserSet::from_mask(2)).unwrap() - 1.0).abs() < 1e-12);
        assert!((id.sum_capacity() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn region_examples() {
        let r = bac().region();
        assert_eq!(r.entries.len(), 3);
        assert!((r.get(UserSet::from_mask(3)).unwrap() - 1.5).abs() < 1e-12);
        let corners = r.dominant_face_corners().unwrap();
        assert!((corners[0].0 - 1.0).abs() < 1e-12 && (corners[0].1 - 0.5).abs() < 1e-12);

        let single = identity(&[3]);
        let r = single.region();
        assert_eq!(r.entries.len(), 1);
        assert!((r.sum_capacity() - 3f64.log2()).abs() < 1e-12);
        assert!(r.dominant_face_corners().is_none());
    }

    #[test]
    fn reduction_examples() {
        let w = bac();
        let same = w.two_user_reduction(UserSet::from_mask(1)).unwrap();
        assert_eq!(same.table(), w.table());

        let swapped = w.two_user_reduction(UserSet::from_mask(2)).unwrap();
        let i2 = w.mutual_info(UserSet::from_mask(2)).unwrap();
        assert!((swapped.mutual_info(UserSet::from_mask(1)).unwrap() - i2).abs() < 1e-12);

        let w3 = random_mac(&[&[2], &[2], &[2]], 3, 11);
        let s = UserSet::from_users(&[1, 3]).unwrap();
        let ws = w3.two_user_reduction(s).unwrap();
        assert_eq!(ws.groups()[0].orders(), &[2, 2]);
        assert_eq!(ws.groups()[1].orders(), &[2]);
        let before = w3.mutual_info(s).unwrap();
        let after = ws.mutual_info(UserSet::from_mask(1)).unwrap();
        assert!((before - after).abs() < 1e-9);
        assert!((w3.sum_capacity() - ws.sum_capacity()).abs() < 1e-9);

        assert!(w.two_user_reduction(UserSet::from_mask(0)).is_err());
        assert!(w.two_user_reduction(UserSet::from_mask(3)).is_err());
    }

    #[test]
    fn bac_posteriors_and_support() {
        let v = TwoUserView::new(bac(), 1e-9).unwrap();
        let g2 = v.g2().spec().clone();
        let p = v.posterior(&g2.element(&[0]).unwrap(), 1).unwrap();
        assert_eq!(p.values()[0].re, 0.0);
        assert_eq!(p.values()[1].re, 1.0);
        let p = v.posterior(&g2.element(&[1]).unwrap(), 1).unwrap();
        assert_eq!(p.values()[0].re, 1.0);
        assert!(matches!(
            v.posterior(&g2.element(&[1]).unwrap(), 0),
            Err(Error::NotInSupport { z: 0, .. })
        ));

        let s = v.support_sets();
        assert_eq!(s.y_of_z[1], vec![0, 1]);
        assert_eq!(s.dy_of_z[1], vec![0, 1]);
        assert_eq!(s.y_of_z[0], vec![0]);
        assert_eq!(s.dy_of_z[0], vec![0]);
        assert_eq!(s.x_of_z[1], vec![0, 1]);
        let sp = v.spectrum(0, 1).unwrap();
        assert!((sp[0].re - 1.0).abs() < 1e-15 && (sp[1].re + 1.0).abs() < 1e-15);
        let sp = v.spectrum(1, 1).unwrap();
        assert!((sp[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conditionally_independent_posteriors_ignore_y() {
        // Z = X: the posterior is a function of z alone
        let w = Mac::new(
            vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(3).unwrap()],
            2,
            (0..6).flat_map(|i| if i / 3 == 0 { [1.0, 0.0] } else { [0.0, 1.0] }).collect(),
        )
        .unwrap();
        let v = TwoUserView::new(w, 1e-9).unwrap();
        for z in 0..2 {
            let base = v.posterior_by_index(0, z).unwrap().to_vec();
            for y in 1..3 {
                assert_eq!(v.posterior_by_index(y, z).unwrap(), base.as_slice());
            }
        }
        assert!(v.cond_mutual_info_xy_given_z() < 1e-12);
    }

    #[test]
    fn singleton_y_sets_have_trivial_differences() {
        let v = TwoUserView::new(identity(&[2, 3]), 1e-9).unwrap();
        for dy in &v.support_sets().dy_of_z {
            assert!(dy.is_empty() || dy == &vec![0]);
        }
    }

    #[test]
    fn conditional_mutual_info_examples() {
        let v = TwoUserView::new(bac(), 1e-9).unwrap();
        assert!((v.cond_mutual_info_xy_given_z() - 0.5).abs() < 1e-12);
        let v = TwoUserView::new(identity(&[2, 2]), 1e-9).unwrap();
        assert!(v.cond_mutual_info_xy_given_z().abs() < 1e-12);
        let v = TwoUserView::new(pure_noise(&[2, 3], 1), 1e-9).unwrap();
        assert!(v.cond_mutual_info_xy_given_z().abs() < 1e-12);
    }

    #[test]
    fn zero_frequency_always_in_support() {
        for seed in 0..20 {
            let v = TwoUserView::new(random_mac(&[&[2], &[3]], 3, seed), 1e-9).unwrap();
            let s = v.support_sets();
            for z in 0..v.output_size() {
                if !s.y_of_z[z].is_empty() {
                    assert!(s.dy_of_z[z].contains(&0));
                    assert!(s.x_of_z[z].contains(&0));
                }
            }
            for &(y, z) in &s.yz {
                let sum: f64 = v.posterior_by_index(y, z).unwrap().iter().sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn region_is_monotone_and_submodular() {
        for seed in 0..10 {
            let w = random_mac(&[&[2], &[3], &[2]], 4, seed);
            let r = w.region();
            let val = |s: u32| if s == 0 { 0.0 } else { r.get(UserSet::from_mask(s)).unwrap() };
            for a in 0..8u32 {
                for b in 0..8u32 {
                    if a & !b == 0 {
                        assert!(val(a) <= val(b) + 1e-9);
                    }
                    assert!(val(a | b) + val(a & b) <= val(a) + val(b) + 1e-9);
                }
            }
            for (s, v) in &r.entries {
                let cap: f64 = s.members().map(|i| (w.groups()[i].cardinality() as f64).log2()).sum();
                assert!(*v >= 0.0 && *v <= cap + 1e-12);
            }
        }
    }

    #[test]
    fn user_set_display_and_members() {
        let s = UserSet::from_users(&[1, 3]).unwrap();
        assert_eq!(s.mask(), 0b101);
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(s.complement(3), UserSet::from_mask(0b010));
        assert_eq!(UserSet::all_proper(3).count(), 6);
        assert!(UserSet::from_users(&[0]).is_err());
    }
}
