//! Synthetic dataset and query generators.
//!
//! Raw points live in the unit cube and are quantized to `n_a` bits:
//!
//! * `INDE`: every attribute i.i.d. uniform on `[0, 1]`.
//! * `CORR`: a diagonal position `v ~ N(0.5, 0.25)` per tuple, each attribute
//!   `v + N(0, 0.05)`.
//! * `ANTI`: a plane offset `c ~ N(0.5, 0.05)` per tuple and `u_j ~ U(0, 1)`;
//!   attribute `j` is `c + u_j - mean(u)`, so the tuple lies on the
//!   hyperplane `Σx = d·c`.
//!
//! Values falling outside the cube are clamped.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};

use crate::error::{Error, Result};
use crate::rng::{rng_for, TrialRng};

use super::{Category, Dataset, DatasetMeta, UtilityFunction};

const CORR_SPREAD: f64 = 0.25;
const CORR_NOISE: f64 = 0.05;
const ANTI_OFFSET_SPREAD: f64 = 0.05;

pub fn generate_synthetic(category: Category, n: usize, dims: usize, attr_bits: u32, seed: u64) -> Result<Dataset> {
    if n == 0 || dims == 0 {
        return Err(Error::EmptyShape { n, d: dims });
    }
    if !(1..=32).contains(&attr_bits) {
        return Err(Error::AttributeWidth(attr_bits));
    }
    let mut rng = rng_for(seed, category as u64);
    let top = ((1u64 << attr_bits) - 1) as f64;
    let quantize = |x: f64| (x.clamp(0.0, 1.0) * top).round() as u32;

    let mut flat = Vec::with_capacity(n * dims);
    let mut raw = vec![0.0; dims];
    let diag = Normal::new(0.5, CORR_SPREAD).expect("valid sigma");
    let noise = Normal::new(0.0, CORR_NOISE).expect("valid sigma");
    let offset = Normal::new(0.5, ANTI_OFFSET_SPREAD).expect("valid sigma");
    for _ in 0..n {
        match category {
            Category::Inde => raw.iter_mut().for_each(|x| *x = rng.random::<f64>()),
            Category::Corr => {
                let v = diag.sample(&mut rng);
                raw.iter_mut().for_each(|x| *x = v + noise.sample(&mut rng));
            }
            Category::Anti => {
                let c = offset.sample(&mut rng);
                raw.iter_mut().for_each(|x| *x = rng.random::<f64>());
                let mean = raw.iter().sum::<f64>() / dims as f64;
                raw.iter_mut().for_each(|x| *x = c + *x - mean);
            }
        }
        flat.extend(raw.iter().map(|&x| quantize(x)));
    }
    let meta = DatasetMeta {
        name: category.to_string(),
        category: Some(category),
        seed: Some(seed),
    };
    Dataset::from_flat(flat, dims, attr_bits, meta)
}

/// Weights drawn uniformly from the probability simplex (flat Dirichlet).
pub fn random_weights(dims: usize, rng: &mut TrialRng) -> Result<Vec<f64>> {
    if dims == 0 {
        return Err(Error::EmptyShape { n: 1, d: 0 });
    }
    loop {
        let mut w: Vec<f64> = (0..dims).map(|_| Exp1.sample(rng)).collect();
        let sum: f64 = w.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            w.iter_mut().for_each(|x| *x /= sum);
            return Ok(w);
        }
    }
}

/// A random linear query, deterministic in `seed`.
pub fn random_query(dims: usize, attr_bits: u32, utility_bits: u32, seed: u64) -> Result<UtilityFunction> {
    let mut rng = rng_for(seed, u64::MAX);
    let w = random_weights(dims, &mut rng)?;
    UtilityFunction::linear(w, attr_bits, utility_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::pearson;

    fn column_corr(ds: &Dataset) -> f64 {
        let x: Vec<f64> = ds.column(0).map(f64::from).collect();
        let y: Vec<f64> = ds.column(1).map(f64::from).collect();
        pearson(&x, &y)
    }

    #[test]
    fn single_tuple() {
        let ds = generate_synthetic(Category::Inde, 1, 3, 16, 0).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.tuple(0).len(), 3);
    }

    #[test]
    fn correlation_signs() {
        let corr = generate_synthetic(Category::Corr, 10_000, 2, 16, 7).unwrap();
        assert!(column_corr(&corr) > 0.5, "{}", column_corr(&corr));
        let anti = generate_synthetic(Category::Anti, 10_000, 2, 16, 7).unwrap();
        assert!(column_corr(&anti) < -0.2, "{}", column_corr(&anti));
        let inde = generate_synthetic(Category::Inde, 10_000, 2, 16, 7).unwrap();
        assert!(column_corr(&inde).abs() < 0.05, "{}", column_corr(&inde));
    }

    #[test]
    fn reproducible() {
        for cat in Category::ALL {
            let a = generate_synthetic(cat, 500, 4, 12, 11).unwrap();
            let b = generate_synthetic(cat, 500, 4, 12, 11).unwrap();
            assert_eq!(a, b);
            let c = generate_synthetic(cat, 500, 4, 12, 12).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn zero_shapes_rejected() {
        assert!(generate_synthetic(Category::Inde, 0, 2, 16, 0).is_err());
        assert!(generate_synthetic(Category::Inde, 2, 0, 16, 0).is_err());
    }

    #[test]
    fn query_weights_on_simplex() {
        let one = random_query(1, 16, 32, 99).unwrap();
        assert_eq!(one.weights().unwrap(), &[1.0]);
        let four = random_query(4, 16, 32, 3).unwrap();
        let sum: f64 = four.weights().unwrap().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(four.weights().unwrap().iter().all(|&w| w >= 0.0));
        assert_eq!(random_query(4, 16, 32, 3).unwrap(), four);
        assert_ne!(random_query(4, 16, 32, 4).unwrap(), four);
        assert!(random_query(0, 16, 32, 3).is_err());
    }
}
