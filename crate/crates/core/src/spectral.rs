//! Discrete Fourier transform on finite Abelian groups.
//!
//! `f^(xhat) = sum_x f(x) exp(-j 2 pi <xhat, x>)`, with the pairing taken from
//! the group's cyclic presentation. The transform is the direct O(|G|^2) sum;
//! the groups handled here are small.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::abelian::{GroupSpec, IndexedGroup};
use crate::error::{Error, Result};

/// Threshold below which a Fourier coefficient is treated as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// `exp(-j 2 pi t)` for an exact fraction of a turn `t`.
pub fn unit_root(turns: Ratio<u64>) -> Complex64 {
    let (num, den) = (*turns.numer() as i128, *turns.denom() as i128);
    // fold into (-1/2, 1/2] so the float argument is as small as possible
    let num = if 2 * num > den { num - den } else { num };
    match (num, den) {
        (0, _) => Complex64::new(1.0, 0.0),
        (n, d) if 2 * n == d => Complex64::new(-1.0, 0.0),
        (n, d) if 4 * n == d => Complex64::new(0.0, -1.0),
        (n, d) if -4 * n == d => Complex64::new(0.0, 1.0),
        (n, d) => Complex64::from_polar(1.0, -TAU * n as f64 / d as f64),
    }
}

/// Precomputed kernel `exp(-j 2 pi <xhat, x>)` for one group.
#[derive(Debug, Clone)]
pub struct FourierKernel {
    group: IndexedGroup,
    kernel: Vec<Complex64>,
}

impl FourierKernel {
    pub fn new(group: &GroupSpec) -> Self {
        Self::from_indexed(IndexedGroup::new(group.clone()))
    }

    pub fn from_indexed(group: IndexedGroup) -> Self {
        let n = group.len();
        let mut kernel = Vec::with_capacity(n * n);
        for xhat in 0..n {
            for x in 0..n {
                kernel.push(unit_root(group.pairing(xhat, x)));
            }
        }
        Self { group, kernel }
    }

    pub fn group(&self) -> &IndexedGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.group.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `exp(-j 2 pi <xhat, x>)`.
    #[inline]
    pub fn character(&self, xhat: usize, x: usize) -> Complex64 {
        self.kernel[xhat * self.len() + x]
    }

    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|xhat| {
                let row = &self.kernel[xhat * n..(xhat + 1) * n];
                row.iter().zip(values).map(|(k, v)| k * v).sum()
            })
            .collect()
    }

    /// Forward transform of a real vector, e.g. a probability distribution.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|xhat| {
                let row = &self.kernel[xhat * n..(xhat + 1) * n];
                row.iter().zip(values).map(|(k, &v)| k * v).sum()
            })
            .collect()
    }

    pub fn inverse(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let scale = 1.0 / n as f64;
        (0..n)
            .map(|x| {
                let s: Complex64 = (0..n)
                    .map(|xhat| self.kernel[xhat * n + x].conj() * values[xhat])
                    .sum();
                s * scale
            })
            .collect()
    }
}

/// A complex-valued function on a group, indexed by the canonical enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    group: GroupSpec,
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(group: GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.cardinality() {
            return Err(Error::GroupMismatch(format!(
                "{} values for a group of order {}",
                values.len(),
                group.cardinality()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { group, values })
    }

    pub fn from_real(group: GroupSpec, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    fn same_group(&self, other: &GroupFunction) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.group, other.group)));
        }
        Ok(())
    }

    pub fn dft(&self) -> GroupFunction {
        let kernel = FourierKernel::new(&self.group);
        GroupFunction { group: self.group.clone(), values: kernel.forward(&self.values) }
    }

    pub fn idft(&self) -> GroupFunction {
        let kernel = FourierKernel::new(&self.group);
        GroupFunction { group: self.group.clone(), values: kernel.inverse(&self.values) }
    }

    /// `(f * g)(x) = sum_{x'} f(x') g(x - x')`.
    pub fn convolve(&self, other: &GroupFunction) -> Result<GroupFunction> {
        self.same_group(other)?;
        let g = IndexedGroup::new(self.group.clone());
        let n = g.len();
        let values = (0..n)
            .map(|x| (0..n).map(|xp| self.values[xp] * other.values[g.sub(x, xp)]).sum())
            .collect();
        Ok(GroupFunction { group: self.group.clone(), values })
    }

    /// `x -> f(-x)`.
    pub fn reverse(&self) -> GroupFunction {
        let g = IndexedGroup::new(self.group.clone());
        let values = (0..g.len()).map(|x| self.values[g.neg(x)]).collect();
        GroupFunction { group: self.group.clone(), values }
    }

    /// `x -> f(x - a)` for the element at canonical index `a`.
    pub fn translate(&self, a: usize) -> GroupFunction {
        let g = IndexedGroup::new(self.group.clone());
        let values = (0..g.len()).map(|x| self.values[g.sub(x, a)]).collect();
        GroupFunction { group: self.group.clone(), values }
    }

    pub fn max_abs_diff(&self, other: &GroupFunction) -> Result<f64> {
        self.same_group(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
