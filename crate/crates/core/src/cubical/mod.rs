//! Persistent homology of 2D intensity images.
//!
//! Images are read through the cubical vertex construction: every pixel is a
//! vertex, 4-adjacent pixels span an edge, and every 2×2 block of pixels spans
//! a square. The co-filtration keeps a cube while all of its vertices are at
//! least the threshold, so classes are born at high intensity and die at low
//! intensity. Homology is taken over the two-element field in dimensions 0
//! and 1.
//!
//! Internally the image is negated and the usual lower-star filtration is
//! computed; births and deaths are negated back before they are returned.

mod betti;
mod complex;
mod reduction;
mod union_find;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use betti::{betti_curve, betti_l1, BettiCurve};

/// Row-major image of finite intensities, rows are mel bins and columns are
/// time frames.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl IntensityImage {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("image must be at least 1x1"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "image of {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("image values must be finite"));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n_cols) {
            return Err(Error::invalid("ragged image rows"));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(n_rows, n_cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                values.push(self.get(r, c));
            }
        }
        Self { rows: self.cols, cols: self.rows, values }
    }

    /// Applies `f` to every pixel. Fails if the result is not finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// One persistence interval. In the co-filtration `birth > death`; essential
/// classes use `f64::NEG_INFINITY` as their death.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn essential(birth: f64) -> Self {
        Self { birth, death: f64::NEG_INFINITY }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::NEG_INFINITY
    }

    /// Whether the class is alive at threshold `x`, i.e. `x ∈ (death, birth]`.
    pub fn contains(&self, x: f64) -> bool {
        self.death < x && x <= self.birth
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Barcode {
    pub dim0: Vec<Bar>,
    pub dim1: Vec<Bar>,
}

impl Barcode {
    pub fn dim(&self, dim: usize) -> Result<&[Bar]> {
        match dim {
            0 => Ok(&self.dim0),
            1 => Ok(&self.dim1),
            _ => Err(Error::invalid(format!("homology dimension {dim} not computed (only 0 and 1)"))),
        }
    }

    /// Copy with both dimensions sorted, for multiset comparison.
    pub fn canonical(&self) -> Self {
        let sort = |bars: &[Bar]| {
            let mut bars = bars.to_vec();
            bars.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
            bars
        };
        Self { dim0: sort(&self.dim0), dim1: sort(&self.dim1) }
    }

    pub fn essential_count(&self) -> usize {
        self.dim0.iter().filter(|b| b.is_essential()).count()
    }
}

/// Strategy used to pair cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PersistenceEngine {
    /// Union-find on vertices for dimension 0 and on the dual graph of
    /// squares for dimension 1.
    #[default]
    UnionFind,
    /// Sparse boundary-matrix reduction with clearing.
    Reduction,
}

/// Barcode of the upper-star co-filtration of `img`.
pub fn upper_star_persistence(img: &IntensityImage) -> Barcode {
    persistence_with(img, PersistenceEngine::default())
}

pub fn persistence_with(img: &IntensityImage, engine: PersistenceEngine) -> Barcode {
    let complex = complex::LowerStarComplex::from_upper_star(img);
    let pairs = match engine {
        PersistenceEngine::UnionFind => union_find::pairs(&complex),
        PersistenceEngine::Reduction => reduction::pairs(&complex),
    };
    pairs.into_barcode()
}

/// Lower-star persistence pairs, before negating back.
#[derive(Debug, Default)]
pub(crate) struct LowerPairs {
    /// `(birth, death)` with `birth < death`; `death = +inf` for essential classes.
    pub dim0: Vec<(f64, f64)>,
    pub dim1: Vec<(f64, f64)>,
}

impl LowerPairs {
    pub(crate) fn push(&mut self, dim: usize, birth: f64, death: f64) {
        // zero-length pairs carry no information
        if birth == death {
            return;
        }
        match dim {
            0 => self.dim0.push((birth, death)),
            _ => self.dim1.push((birth, death)),
        }
    }

    fn into_barcode(self) -> Barcode {
        let flip = |pairs: Vec<(f64, f64)>| {
            pairs.into_iter().map(|(b, d)| Bar::new(-b, -d)).collect::<Vec<_>>()
        };
        Barcode { dim0: flip(self.dim0), dim1: flip(self.dim1) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_image() -> IntensityImage {
        IntensityImage::from_rows(&[
            [16.0, 19.0, 20.0, 17.0, 18.0],
            [15.0, 14.0, 4.0, 13.0, 12.0],
            [11.0, 3.0, 2.0, 0.0, 10.0],
            [9.0, 8.0, 4.0, 8.0, 7.0],
        ])
        .unwrap()
    }

    #[test]
    fn sample_image_barcode() {
        for engine in [PersistenceEngine::UnionFind, PersistenceEngine::Reduction] {
            let bc = persistence_with(&sample_image(), engine).canonical();
            assert_eq!(
                bc.dim0,
                vec![Bar::new(8.0, 7.0), Bar::new(18.0, 17.0), Bar::essential(20.0)],
                "{engine:?}"
            );
            assert_eq!(bc.dim1, vec![Bar::new(4.0, 0.0)], "{engine:?}");
        }
    }

    #[test]
    fn constant_image() {
        for (r, c) in [(1, 1), (1, 7), (5, 1), (4, 6)] {
            let img = IntensityImage::new(r, c, vec![3.5; r * c]).unwrap();
            let bc = upper_star_persistence(&img);
            assert_eq!(bc.dim0, vec![Bar::essential(3.5)]);
            assert!(bc.dim1.is_empty());
        }
    }

    #[test]
    fn ring_has_one_loop() {
        let img = IntensityImage::from_rows(&[[5.0, 5.0, 5.0], [5.0, 1.0, 5.0], [5.0, 5.0, 5.0]]).unwrap();
        let bc = upper_star_persistence(&img);
        assert_eq!(bc.dim0, vec![Bar::essential(5.0)]);
        assert_eq!(bc.dim1, vec![Bar::new(5.0, 1.0)]);
    }

    #[test]
    fn single_row_has_no_loops() {
        let img = IntensityImage::from_rows(&[[1.0, 3.0, 0.0, 2.0]]).unwrap();
        let bc = upper_star_persistence(&img).canonical();
        assert_eq!(bc.dim0, vec![Bar::new(2.0, 0.0), Bar::essential(3.0)]);
        assert!(bc.dim1.is_empty());
    }

    #[test]
    fn rejects_bad_images() {
        assert!(IntensityImage::new(0, 3, vec![]).is_err());
        assert!(IntensityImage::new(1, 2, vec![1.0]).is_err());
        assert!(IntensityImage::new(1, 1, vec![f64::NAN]).is_err());
        assert!(IntensityImage::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn transpose_round_trip() {
        let img = sample_image();
        assert_eq!(img.transpose().transpose(), img);
        assert_eq!(img.transpose().get(4, 3), img.get(3, 4));
    }
}
