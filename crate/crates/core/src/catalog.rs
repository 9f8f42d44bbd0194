//! Named channels and seeded random channel families.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::abelian::{GroupSpec, IndexedGroup};
use crate::channel::Mac;
use crate::error::{Error, Result};

fn z(n: u64) -> GroupSpec {
    GroupSpec::cyclic(n).expect("positive order")
}

/// Binary adder channel: `Z = X + Y` over the integers, `Z in {0, 1, 2}`.
pub fn binary_adder() -> Mac {
    let table = vec![
        1.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, //
        0.0, 0.0, 1.0,
    ];
    Mac::new(vec![z(2), z(2)], 3, table).expect("valid table")
}

/// `Z = X and Y` on `Z_2 x Z_2`.
pub fn and_channel() -> Mac {
    let table = vec![
        1.0, 0.0, //
        1.0, 0.0, //
        1.0, 0.0, //
        0.0, 1.0,
    ];
    Mac::new(vec![z(2), z(2)], 2, table).expect("valid table")
}

/// Noiseless channel: the output is the joint input index.
pub fn identity(groups: Vec<GroupSpec>) -> Result<Mac> {
    let n = GroupSpec::product_of(&groups)?.cardinality();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        table[i * n + i] = 1.0;
    }
    Mac::new(groups, n, table)
}

/// Every row uniform over `output_size` outputs.
pub fn pure_noise(groups: Vec<GroupSpec>, output_size: usize) -> Result<Mac> {
    let n = GroupSpec::product_of(&groups)?.cardinality();
    Mac::new(groups, output_size, vec![1.0 / output_size as f64; n * output_size])
}

/// `rows x cols` row-stochastic matrix with rows uniform on the simplex.
/// With `sparse`, one entry per row is zeroed before normalizing.
pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, sparse: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let mut row: Vec<f64> = (0..cols).map(|_| Exp1.sample(rng)).collect();
        if sparse && cols > 1 {
            row[rng.gen_range(0..cols)] = 0.0;
        }
        let s: f64 = row.iter().sum();
        out.extend(row.iter().map(|v| v / s));
    }
    out
}

/// Random channel over the given groups.
pub fn random_mac<R: Rng + ?Sized>(
    rng: &mut R,
    groups: Vec<GroupSpec>,
    output_size: usize,
    sparse: bool,
) -> Result<Mac> {
    let n = GroupSpec::product_of(&groups)?.cardinality();
    Mac::new(groups, output_size, random_kernel(rng, n, output_size, sparse))
}

/// Two-user channel `Z = V(X + c Y)` on `Z_n1 x Z_n2`, where `y -> c y mod n1`
/// must be a homomorphism (`n1` divides `c n2`) and `V` is a random kernel
/// from `Z_n1` to `output_size` outputs.
pub fn noisy_affine<R: Rng + ?Sized>(
    rng: &mut R,
    n1: u64,
    n2: u64,
    c: u64,
    output_size: usize,
) -> Result<Mac> {
    if !(c * n2).is_multiple_of(n1) {
        return Err(Error::Precondition(format!(
            "y -> {c}y is not a homomorphism Z_{n1} -> Z_{n1} on Z_{n2}"
        )));
    }
    let kernel = random_kernel(rng, n1 as usize, output_size, false);
    let mut table = Vec::with_capacity((n1 * n2) as usize * output_size);
    for x in 0..n1 {
        for y in 0..n2 {
            let t = ((x + c * y) % n1) as usize;
            table.extend_from_slice(&kernel[t * output_size..(t + 1) * output_size]);
        }
    }
    Mac::new(vec![z(n1), z(n2)], output_size, table)
}

/// Two-user channel `Z = (V_1(X), V_2(Y))` with independent random kernels.
pub fn product_channel<R: Rng + ?Sized>(
    rng: &mut R,
    g1: GroupSpec,
    g2: GroupSpec,
    out1: usize,
    out2: usize,
) -> Result<Mac> {
    let (n1, n2) = (g1.cardinality(), g2.cardinality());
    let v1 = random_kernel(rng, n1, out1, false);
    let v2 = random_kernel(rng, n2, out2, false);
    let mut table = Vec::with_capacity(n1 * n2 * out1 * out2);
    for x in 0..n1 {
        for y in 0..n2 {
            for a in 0..out1 {
                for b in 0..out2 {
                    table.push(v1[x * out1 + a] * v2[y * out2 + b]);
                }
            }
        }
    }
    Mac::new(vec![g1, g2], out1 * out2, table)
}

/// Two-user channel revealing `X + phi(Y)` exactly, where `phi` maps `G_2`
/// into `G_1` through `phi(e_j) = images[j]` on the cyclic generators.
pub fn noiseless_sum(g1: GroupSpec, g2: GroupSpec, images: &[usize]) -> Result<Mac> {
    let a = IndexedGroup::new(g1.clone());
    let b = IndexedGroup::new(g2.clone());
    if images.len() != g2.rank() {
        return Err(Error::DimensionMismatch { expected: g2.rank(), found: images.len() });
    }
    for (j, (&img, &ord)) in images.iter().zip(g2.orders()).enumerate() {
        if img >= a.len() || a.scale(ord, img) != 0 {
            return Err(Error::Precondition(format!(
                "generator {j} of order {ord} cannot map to element {img}"
            )));
        }
    }
    let n1 = a.len();
    let mut table = vec![0.0; n1 * b.len() * n1];
    for x in 0..n1 {
        for y in 0..b.len() {
            let e = g2.element_at(y);
            let phi = e
                .residues()
                .iter()
                .zip(images)
                .fold(0, |acc, (&r, &img)| a.add(acc, a.scale(r, img)));
            table[(x * b.len() + y) * n1 + a.add(x, phi)] = 1.0;
        }
    }
    Mac::new(vec![g1, g2], n1, table)
}

/// A `Z_2 x Z_3` channel: for `Y in {0, 1}` the output is `X + Y mod 2`
/// through a binary symmetric channel with crossover `eps`, and `Y = 2`
/// produces a separate output.
///
/// Its fingerprint is well defined with `F(1, 1) = F(1, 2) = -1`, which no
/// homomorphism on `Z_3` can extend.
pub fn parity_with_erasure(eps: f64) -> Result<Mac> {
    let v = [1.0 - eps, eps, eps, 1.0 - eps];
    let mut table = Vec::with_capacity(6 * 3);
    for x in 0..2 {
        for y in 0..3 {
            if y == 2 {
                table.extend_from_slice(&[0.0, 0.0, 1.0]);
            } else {
                let t = (x + y) % 2;
                table.extend_from_slice(&[v[2 * t], v[2 * t + 1], 0.0]);
            }
        }
    }
    Mac::new(vec![z(2), z(3)], 3, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernels_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = random_kernel(&mut rng, 5, 4, true);
        for row in k.chunks(4) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(row.contains(&0.0));
        }
    }

    #[test]
    fn affine_channel_rejects_non_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(noisy_affine(&mut rng, 4, 3, 1, 2).is_err());
        assert!(noisy_affine(&mut rng, 2, 4, 1, 2).is_ok());
        assert!(noiseless_sum(z(4), z(2), &[1]).is_err());
        assert!(noiseless_sum(z(4), z(2), &[2]).is_ok());
    }

    #[test]
    fn adder_channel_rates() {
        let w = binary_adder();
        assert!((w.sum_capacity() - 1.5).abs() < 1e-12);
    }
}
