//! Tuples, datasets and utility functions.
//!
//! A [`Dataset`] is an immutable, row-ordered collection of `N` tuples with
//! `d` quantized attributes each. Row `i` is tuple identity `i` for the whole
//! lifetime of the dataset.

mod expr;
mod io;
mod synthetic;
mod utility;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use io::{load_csv, write_csv};
pub use synthetic::{generate_synthetic, random_query, random_weights};
pub use utility::{default_scale, UtilityFunction, UtilityKind};

/// Default attribute width in bits.
pub const DEFAULT_ATTR_BITS: u32 = 16;
/// Default utility width in bits.
pub const DEFAULT_UTILITY_BITS: u32 = 32;

/// An owned tuple of quantized attributes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple(Vec<u32>);

impl Tuple {
    pub fn new(attrs: Vec<u32>) -> Self {
        Tuple(attrs)
    }

    pub fn attrs(&self) -> &[u32] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<u32>> for Tuple {
    fn from(v: Vec<u32>) -> Self {
        Tuple(v)
    }
}

/// Synthetic distribution families used by the skyline literature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Anti,
    Corr,
    Inde,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Anti, Category::Corr, Category::Inde];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Anti => "ANTI",
            Category::Corr => "CORR",
            Category::Inde => "INDE",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ANTI" => Ok(Category::Anti),
            "CORR" => Ok(Category::Corr),
            "INDE" => Ok(Category::Inde),
            _ => Err(Error::UnknownCategory(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetMeta {
    pub name: String,
    pub category: Option<Category>,
    pub seed: Option<u64>,
}

impl DatasetMeta {
    pub fn named(name: impl Into<String>) -> Self {
        DatasetMeta {
            name: name.into(),
            category: None,
            seed: None,
        }
    }
}

/// Number of qubits needed to address `n` items, `ceil(log2 n)`.
pub fn index_bits(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    // row-major, `d` values per tuple
    attrs: Vec<u32>,
    len: usize,
    dims: usize,
    attr_bits: u32,
    meta: DatasetMeta,
}

impl Dataset {
    /// Builds a dataset from row-major attribute values.
    pub fn from_flat(attrs: Vec<u32>, dims: usize, attr_bits: u32, meta: DatasetMeta) -> Result<Self> {
        if !(1..=32).contains(&attr_bits) {
            return Err(Error::AttributeWidth(attr_bits));
        }
        if dims == 0 || attrs.is_empty() {
            return Err(Error::EmptyShape {
                n: attrs.len().checked_div(dims).unwrap_or(0),
                d: dims,
            });
        }
        if !attrs.len().is_multiple_of(dims) {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: attrs.len() % dims,
            });
        }
        let limit = 1u64 << attr_bits;
        if let Some(&bad) = attrs.iter().find(|&&a| u64::from(a) >= limit) {
            return Err(Error::AttributeOverflow {
                value: bad.into(),
                bits: attr_bits,
            });
        }
        Ok(Dataset {
            len: attrs.len() / dims,
            attrs,
            dims,
            attr_bits,
            meta,
        })
    }

    pub fn from_tuples(tuples: &[Tuple], attr_bits: u32, meta: DatasetMeta) -> Result<Self> {
        let dims = tuples.first().map(Tuple::dims).unwrap_or(0);
        if tuples.is_empty() || dims == 0 {
            return Err(Error::EmptyShape { n: tuples.len(), d: dims });
        }
        let mut flat = Vec::with_capacity(tuples.len() * dims);
        for t in tuples {
            if t.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    got: t.dims(),
                });
            }
            flat.extend_from_slice(t.attrs());
        }
        Self::from_flat(flat, dims, attr_bits, meta)
    }

    /// Number of tuples `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn attr_bits(&self) -> u32 {
        self.attr_bits
    }

    /// Index register width `n = ceil(log2 N)`.
    pub fn index_bits(&self) -> u32 {
        index_bits(self.len)
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    pub fn tuple(&self, i: usize) -> &[u32] {
        &self.attrs[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.attrs.chunks_exact(self.dims)
    }

    /// All attribute values of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = u32> + '_ {
        self.iter().map(move |t| t[j])
    }

    /// Utilities of every tuple under `f`.
    pub fn utilities(&self, f: &UtilityFunction) -> Result<Vec<u64>> {
        if f.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: f.dims(),
                got: self.dims,
            });
        }
        Ok(self.iter().map(|t| f.evaluate_unchecked(t)).collect())
    }
}

/// Pearson correlation of two equally long columns.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}
