//! kNN-based estimators for entropy, mutual information and conditional
//! mutual information.
//!
//! All estimates are in nats and use the maximum norm, so no unit-ball volume
//! correction appears anywhere. The shared machinery per point i is: find the
//! k-th-nearest-neighbour distance eps_half(i) in the joint space, then count
//! points strictly within eps_half(i) in each marginal subspace.
//!
//! The estimators are pure functions of their inputs: tie-breaking jitter is
//! a separate, explicitly seeded step ([`jitter_columns`]) applied by the
//! test layer before estimation.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::knn::SpatialIndex;
use crate::seed::{derive_seed, rng_from_seed};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Digamma function for x > 0.
///
/// Recurrence down-shift plus the asymptotic series; absolute error is below
/// 1e-10 over the range the estimators touch.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("digamma requires x > 0, got {x}")));
    }
    Ok(digamma_raw(x))
}

fn digamma_raw(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln x - 1/(2x) - sum of Bernoulli terms up to x^-14.
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
    acc + x.ln() - 0.5 * inv - series
}

/// Digamma at integer arguments 0..=max, built once per estimate. Entry 0 is
/// a placeholder (never a valid argument).
fn psi_table(max: usize) -> Vec<f64> {
    let mut t = vec![0.0; max + 1];
    if max >= 1 {
        t[1] = -EULER_GAMMA;
    }
    for m in 1..max {
        t[m + 1] = t[m] + 1.0 / m as f64;
    }
    t
}

/// Break exact ties by adding deterministic uniform noise of magnitude
/// 1e-10 x per-column standard deviation. A constant column has zero spread
/// and is returned unchanged.
pub fn jitter_columns(cols: &[&[f64]], seed: u64) -> Vec<Vec<f64>> {
    cols.iter()
        .enumerate()
        .map(|(c, col)| {
            let scale = 1e-10 * std_dev(col);
            if scale == 0.0 {
                return col.to_vec();
            }
            let mut rng = rng_from_seed(derive_seed(seed, "jitter-col", &[c as u64]));
            col.iter().map(|v| v + scale * (rng.gen::<f64>() * 2.0 - 1.0)).collect()
        })
        .collect()
}

fn std_dev(col: &[f64]) -> f64 {
    let n = col.len();
    if n < 2 {
        return 0.0;
    }
    let mean = col.iter().sum::<f64>() / n as f64;
    let ss = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (ss / (n - 1) as f64).sqrt()
}

fn check_columns(label: &str, cols: &[&[f64]], n: usize) -> Result<()> {
    for col in cols {
        if col.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{label} column of length {} against sample size {n}",
                col.len()
            )));
        }
    }
    Ok(())
}

/// Differential entropy estimate of an n x d sample in nats:
/// psi(n) - psi(k) + (d/n) * sum_i log eps(i), with eps(i) twice the
/// k-th-neighbour max-norm distance of point i.
pub fn entropy(data: &[&[f64]], k: usize) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData("entropy needs at least one column".into()));
    }
    let n = data[0].len();
    check_columns("entropy", data, n)?;
    if k == 0 || k >= n {
        return Err(Error::BadNeighborCount { k, n });
    }
    let d = data.len() as f64;
    let index = SpatialIndex::from_columns(data)?;
    let logs = (0..n)
        .into_par_iter()
        .map(|i| {
            let dist = index.kth_neighbor_distance(i, k)?;
            if dist == 0.0 {
                return Err(Error::DuplicatePoints { index: i });
            }
            Ok((2.0 * dist).ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean_log = logs.iter().sum::<f64>() / n as f64;
    Ok(digamma_raw(n as f64) - digamma_raw(k as f64) + d * mean_log)
}

/// Joint-space neighbour distances plus fixed marginal indices for one
/// (X, Z) pair. The Y side is supplied per estimate so a permutation test can
/// reuse the X/Z structures across all permutations.
pub(crate) struct CmiEngine<'a> {
    x_cols: Vec<&'a [f64]>,
    z_cols: Vec<&'a [f64]>,
    k: usize,
    n: usize,
    xz_index: SpatialIndex,
    z_index: Option<SpatialIndex>,
    psi: Vec<f64>,
}

impl<'a> CmiEngine<'a> {
    pub(crate) fn new(x: &[&'a [f64]], z: &[&'a [f64]], k: usize) -> Result<CmiEngine<'a>> {
        if x.is_empty() {
            return Err(Error::EmptyData("estimator needs at least one x column".into()));
        }
        let n = x[0].len();
        check_columns("x", x, n)?;
        check_columns("z", z, n)?;
        if k == 0 || k >= n {
            return Err(Error::BadNeighborCount { k, n });
        }
        let xz_cols: Vec<&[f64]> = x.iter().chain(z.iter()).copied().collect();
        let xz_index = SpatialIndex::from_columns(&xz_cols)?;
        let z_index = if z.is_empty() { None } else { Some(SpatialIndex::from_columns(z)?) };
        Ok(CmiEngine {
            x_cols: x.to_vec(),
            z_cols: z.to_vec(),
            k,
            n,
            xz_index,
            z_index,
            psi: psi_table(n + 1),
        })
    }

    /// Estimate I(X;Y) or I(X;Y|Z) for the given Y columns.
    pub(crate) fn estimate(&self, y: &[&[f64]]) -> Result<f64> {
        if y.is_empty() {
            return Err(Error::EmptyData("estimator needs at least one y column".into()));
        }
        check_columns("y", y, self.n)?;
        let joint_cols: Vec<&[f64]> = self
            .x_cols
            .iter()
            .copied()
            .chain(y.iter().copied())
            .chain(self.z_cols.iter().copied())
            .collect();
        let joint = SpatialIndex::from_columns(&joint_cols)?;
        let yz_cols: Vec<&[f64]> = y.iter().chain(self.z_cols.iter()).copied().collect();
        let yz_index = SpatialIndex::from_columns(&yz_cols)?;

        let terms = (0..self.n)
            .into_par_iter()
            .map(|i| {
                let eps_half = joint.kth_neighbor_distance(i, self.k)?;
                let n_xz = self.xz_index.count_within(i, eps_half);
                let n_yz = yz_index.count_within(i, eps_half);
                let mut term = self.psi[n_xz + 1] + self.psi[n_yz + 1];
                if let Some(zi) = &self.z_index {
                    term -= self.psi[zi.count_within(i, eps_half) + 1];
                }
                Ok(term)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean_term = terms.iter().sum::<f64>() / self.n as f64;
        let mut estimate = self.psi[self.k] - mean_term;
        if self.z_index.is_none() {
            estimate += self.psi[self.n];
        }
        Ok(estimate)
    }
}

/// Mutual information I(X;Y) in nats:
/// psi(k) + psi(n) - mean_i[psi(n_x(i)+1) + psi(n_y(i)+1)].
pub fn mutual_information(x: &[&[f64]], y: &[&[f64]], k: usize) -> Result<f64> {
    CmiEngine::new(x, &[], k)?.estimate(y)
}

/// Conditional mutual information I(X;Y|Z) in nats:
/// psi(k) - mean_i[psi(n_xz(i)+1) + psi(n_yz(i)+1) - psi(n_z(i)+1)].
///
/// An empty conditioning set reduces to [`mutual_information`].
pub fn conditional_mutual_information(
    x: &[&[f64]],
    y: &[&[f64]],
    z: &[&[f64]],
    k: usize,
) -> Result<f64> {
    CmiEngine::new(x, z, k)?.estimate(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};

    fn views(cols: &[Vec<f64>]) -> Vec<&[f64]> {
        cols.iter().map(|c| c.as_slice()).collect()
    }

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn uniforms(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| rng.gen::<f64>()).collect()
    }

    fn correlated_gaussians(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let z1 = normals(n, seed);
        let z2 = normals(n, seed.wrapping_add(1));
        let y = z1
            .iter()
            .zip(&z2)
            .map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b)
            .collect();
        (z1, y)
    }

    #[test]
    fn digamma_known_values() {
        // psi(1) = -gamma, psi(2) = 1 - gamma, psi(10) via the recurrence,
        // psi(1/2) = -gamma - 2 ln 2.
        assert!((digamma(1.0).unwrap() - (-0.577_215_664_901_532_9)).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - 0.422_784_335_098_467_1).abs() < 1e-12);
        assert!((digamma(10.0).unwrap() - 2.251_752_589_066_721).abs() < 1e-12);
        assert!((digamma(0.5).unwrap() - (-1.963_510_026_021_423_5)).abs() < 1e-12);
    }

    #[test]
    fn digamma_recurrence_property() {
        // psi(x+1) = psi(x) + 1/x on integers and half-integers up to 1e6.
        let mut x = 0.5;
        while x < 1_000_000.0 {
            let lhs = digamma(x + 1.0).unwrap();
            let rhs = digamma(x).unwrap() + 1.0 / x;
            assert!((lhs - rhs).abs() < 1e-10, "x={x}: {lhs} vs {rhs}");
            x = if x < 32.0 { x + 0.5 } else { x * 1.7 };
        }
    }

    #[test]
    fn digamma_rejects_nonpositive() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.0).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn psi_table_matches_digamma() {
        let t = psi_table(5000);
        for m in [1usize, 2, 3, 100, 5000] {
            assert!((t[m] - digamma(m as f64).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn entropy_of_uniform_is_zero() {
        let data = vec![uniforms(5000, 42)];
        let h = entropy(&views(&data), 3).unwrap();
        assert!(h.abs() < 0.05, "H(U(0,1)) estimate {h}");
    }

    #[test]
    fn entropy_of_standard_normal() {
        let data = vec![normals(5000, 43)];
        let h = entropy(&views(&data), 3).unwrap();
        let truth = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
        assert!((h - truth).abs() < 0.05, "H(N(0,1)) estimate {h} vs {truth}");
    }

    #[test]
    fn entropy_scaling_law() {
        let base = normals(5000, 44);
        let scaled: Vec<f64> = base.iter().map(|v| 2.0 * v).collect();
        let h1 = entropy(&[&base], 3).unwrap();
        let h2 = entropy(&[&scaled], 3).unwrap();
        assert!((h2 - h1 - 2.0f64.ln()).abs() < 0.05, "H(2X)-H(X) = {}", h2 - h1);
    }

    #[test]
    fn entropy_rejects_duplicates_and_bad_k() {
        let col = vec![1.0, 1.0, 1.0, 2.0];
        assert!(matches!(entropy(&[&col], 1), Err(Error::DuplicatePoints { .. })));
        let col = vec![1.0, 2.0];
        assert!(entropy(&[&col], 2).is_err());
    }

    #[test]
    fn mi_of_independent_uniforms_is_small() {
        let x = vec![uniforms(2000, 7)];
        let y = vec![uniforms(2000, 8)];
        let mi = mutual_information(&views(&x), &views(&y), 3).unwrap();
        assert!(mi.abs() < 0.02, "MI {mi}");
    }

    #[test]
    fn mi_of_correlated_gaussians_matches_closed_form() {
        let (x, y) = correlated_gaussians(2000, 0.9, 5);
        let mi = mutual_information(&[&x], &[&y], 3).unwrap();
        let truth = -0.5 * (1.0 - 0.81f64).ln();
        assert!((mi - truth).abs() < 0.05, "MI {mi} vs {truth}");
    }

    #[test]
    fn mi_of_identical_variables_is_large() {
        let x = uniforms(2000, 9);
        let xj = jitter_columns(&[&x, &x], 3);
        let mi = mutual_information(&[&xj[0]], &[&xj[1]], 3).unwrap();
        assert!(mi > 2.0, "MI of y = x should exceed 2 nats, got {mi}");
    }

    #[test]
    fn mi_is_symmetric_bitwise() {
        let (x, y) = correlated_gaussians(500, 0.6, 11);
        let a = mutual_information(&[&x], &[&y], 3).unwrap();
        let b = mutual_information(&[&y], &[&x], 3).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn mi_invariant_under_row_permutation() {
        let (x, y) = correlated_gaussians(600, 0.7, 13);
        let a = mutual_information(&[&x], &[&y], 3).unwrap();
        let mut order: Vec<usize> = (0..600).collect();
        let mut rng = rng_from_seed(99);
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let xp: Vec<f64> = order.iter().map(|&i| x[i]).collect();
        let yp: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let b = mutual_information(&[&xp], &[&yp], 3).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn mi_invariant_under_monotone_transform() {
        let (x, y) = correlated_gaussians(2000, 0.8, 17);
        let a = mutual_information(&[&x], &[&y], 3).unwrap();
        let cubed: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        let b = mutual_information(&[&cubed], &[&y], 3).unwrap();
        assert!((a - b).abs() <= 0.05, "{a} vs {b}");
    }

    #[test]
    fn cmi_detects_conditional_independence() {
        // x = z + noise1, y = z + noise2: independent given z.
        let z = normals(2000, 20);
        let n1 = normals(2000, 21);
        let n2 = normals(2000, 22);
        let x: Vec<f64> = z.iter().zip(&n1).map(|(a, b)| a + b).collect();
        let y: Vec<f64> = z.iter().zip(&n2).map(|(a, b)| a + b).collect();
        let cmi = conditional_mutual_information(&[&x], &[&y], &[&z], 3).unwrap();
        assert!(cmi.abs() < 0.03, "CMI {cmi}");
        // Unconditionally x and y are clearly dependent through z.
        let mi = mutual_information(&[&x], &[&y], 3).unwrap();
        assert!(mi > 0.1, "MI {mi}");
    }

    #[test]
    fn cmi_with_irrelevant_conditioner_matches_mi() {
        let (x, y) = correlated_gaussians(2000, 0.7, 30);
        let z = normals(2000, 31);
        let mi = mutual_information(&[&x], &[&y], 3).unwrap();
        let cmi = conditional_mutual_information(&[&x], &[&y], &[&z], 3).unwrap();
        assert!((mi - cmi).abs() <= 0.1, "MI {mi} vs CMI {cmi}");
    }

    #[test]
    fn cmi_with_empty_conditioner_delegates_to_mi() {
        let (x, y) = correlated_gaussians(400, 0.5, 33);
        let mi = mutual_information(&[&x], &[&y], 3).unwrap();
        let cmi = conditional_mutual_information(&[&x], &[&y], &[], 3).unwrap();
        assert_eq!(mi.to_bits(), cmi.to_bits());
    }

    #[test]
    fn estimator_dimension_checks() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            mutual_information(&[&x], &[&y], 1),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(mutual_information(&[&x], &[&x], 5).is_err());
    }

    #[test]
    fn jitter_is_deterministic_and_tiny() {
        let x = vec![1.0, 1.0, 2.0, 3.0];
        let a = jitter_columns(&[&x], 5);
        let b = jitter_columns(&[&x], 5);
        assert_eq!(a, b);
        let c = jitter_columns(&[&x], 6);
        assert_ne!(a, c);
        for (orig, new) in x.iter().zip(&a[0]) {
            assert!((orig - new).abs() < 1e-8);
        }
        // Exact duplicates become distinct.
        assert_ne!(a[0][0], a[0][1]);
        // Constant columns are left untouched.
        let flat = vec![2.0, 2.0, 2.0];
        assert_eq!(jitter_columns(&[&flat], 1)[0], flat);
    }
}
