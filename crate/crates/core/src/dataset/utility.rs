use crate::error::{Error, Result};

use super::expr::Expr;

/// The shape of a utility function.
#[derive(Debug, Clone, PartialEq)]
pub enum UtilityKind {
    /// `Σ w[i]·p[i]` with non-negative weights summing to one.
    Linear { weights: Vec<f64> },
    /// Euclidean norm `sqrt(Σ p[i]^2)`.
    L2Norm,
    /// A user expression over `a0..a{d-1}`.
    Expression(Expr),
}

/// Maps a tuple to an `n_u`-bit integer utility.
///
/// The raw real-valued score is multiplied by `scale`, rounded to the nearest
/// integer and saturated into `[0, 2^n_u - 1]`. Saturation (rather than
/// wrapping) keeps `utility >= θ` comparisons monotone in the raw score.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFunction {
    kind: UtilityKind,
    dims: usize,
    utility_bits: u32,
    scale: f64,
}

/// Fixed-point scale `2^(n_u - n_a - ceil(log2 d))`.
pub fn default_scale(utility_bits: u32, attr_bits: u32, dims: usize) -> f64 {
    let exp = utility_bits as i32 - attr_bits as i32 - super::index_bits(dims) as i32;
    2f64.powi(exp)
}

fn check_bits(utility_bits: u32) -> Result<()> {
    if (1..=63).contains(&utility_bits) {
        Ok(())
    } else {
        Err(Error::UtilityWidth(utility_bits))
    }
}

impl UtilityFunction {
    pub fn linear(weights: Vec<f64>, attr_bits: u32, utility_bits: u32) -> Result<Self> {
        check_bits(utility_bits)?;
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights(format!("{weights:?} has negative or non-finite entries")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        let dims = weights.len();
        Ok(UtilityFunction {
            kind: UtilityKind::Linear { weights },
            dims,
            utility_bits,
            scale: default_scale(utility_bits, attr_bits, dims),
        })
    }

    pub fn l2norm(dims: usize, attr_bits: u32, utility_bits: u32) -> Result<Self> {
        check_bits(utility_bits)?;
        if dims == 0 {
            return Err(Error::EmptyShape { n: 0, d: 0 });
        }
        Ok(UtilityFunction {
            kind: UtilityKind::L2Norm,
            dims,
            utility_bits,
            scale: default_scale(utility_bits, attr_bits, dims),
        })
    }

    /// Parses an arithmetic expression such as `sqrt(a0*a0 + 2*a1)`.
    pub fn expression(src: &str, dims: usize, attr_bits: u32, utility_bits: u32) -> Result<Self> {
        check_bits(utility_bits)?;
        let expr = Expr::parse(src, dims)?;
        Ok(UtilityFunction {
            kind: UtilityKind::Expression(expr),
            dims,
            utility_bits,
            scale: default_scale(utility_bits, attr_bits, dims),
        })
    }

    /// Overrides the fixed-point scale.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn kind(&self) -> &UtilityKind {
        &self.kind
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn utility_bits(&self) -> u32 {
        self.utility_bits
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.kind {
            UtilityKind::Linear { weights } => Some(weights),
            _ => None,
        }
    }

    /// Largest representable utility, `2^n_u - 1`. Also the saturation point.
    pub fn max_utility(&self) -> u64 {
        (1u64 << self.utility_bits) - 1
    }

    pub fn evaluate(&self, attrs: &[u32]) -> Result<u64> {
        if attrs.len() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: attrs.len(),
            });
        }
        Ok(self.evaluate_unchecked(attrs))
    }

    /// Like [`evaluate`](Self::evaluate) without the dimension check.
    pub fn evaluate_unchecked(&self, attrs: &[u32]) -> u64 {
        let raw = match &self.kind {
            UtilityKind::Linear { weights } => weights.iter().zip(attrs).map(|(w, &a)| w * f64::from(a)).sum(),
            UtilityKind::L2Norm => attrs.iter().map(|&a| f64::from(a) * f64::from(a)).sum::<f64>().sqrt(),
            UtilityKind::Expression(e) => e.eval(attrs),
        };
        self.quantize(raw)
    }

    fn quantize(&self, raw: f64) -> u64 {
        let v = (self.scale * raw).round();
        if v.is_nan() || v <= 0.0 {
            return 0;
        }
        let max = self.max_utility();
        if v >= max as f64 {
            max
        } else {
            v as u64
        }
    }
}
