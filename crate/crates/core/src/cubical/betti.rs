use serde::{Deserialize, Serialize};

use super::Barcode;
use crate::error::{Error, Result};

/// Betti numbers sampled at the midpoints of `resolution` equal cells of
/// `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiCurve {
    pub lo: f64,
    pub hi: f64,
    pub samples: Vec<u32>,
}

impl BettiCurve {
    pub fn zeros(lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        check_grid(lo, hi, resolution)?;
        Ok(Self { lo, hi, samples: vec![0; resolution] })
    }

    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.samples.len() as f64
    }

    pub fn grid_point(&self, r: usize) -> f64 {
        grid_point(self.lo, self.hi, self.samples.len(), r)
    }

    pub fn same_grid(&self, other: &BettiCurve) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.samples.len() == other.samples.len()
    }
}

fn grid_point(lo: f64, hi: f64, resolution: usize, r: usize) -> f64 {
    lo + (r as f64 + 0.5) * (hi - lo) / resolution as f64
}

fn check_grid(lo: f64, hi: f64, resolution: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!("Betti curve domain [{lo}, {hi}] is empty or not finite")));
    }
    if resolution < 2 {
        return Err(Error::invalid(format!("Betti curve resolution must be at least 2, got {resolution}")));
    }
    Ok(())
}

/// Counts the bars of dimension `dim` alive at each grid point, where a bar
/// `(d, b)` is alive on `(d, b]`.
pub fn betti_curve(bc: &Barcode, dim: usize, lo: f64, hi: f64, resolution: usize) -> Result<BettiCurve> {
    check_grid(lo, hi, resolution)?;
    let bars = bc.dim(dim)?;
    let grid: Vec<f64> = (0..resolution).map(|r| grid_point(lo, hi, resolution, r)).collect();
    // difference array over grid indices
    let mut delta = vec![0i64; resolution + 1];
    for bar in bars {
        let first = grid.partition_point(|&x| x <= bar.death);
        let end = grid.partition_point(|&x| x <= bar.birth);
        if first < end {
            delta[first] += 1;
            delta[end] -= 1;
        }
    }
    let mut running = 0i64;
    let samples = delta[..resolution]
        .iter()
        .map(|d| {
            running += d;
            running as u32
        })
        .collect();
    Ok(BettiCurve { lo, hi, samples })
}

/// Riemann-sum L1 distance between two curves on the same grid.
pub fn betti_l1(a: &BettiCurve, b: &BettiCurve) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::Incompatible(format!(
            "Betti grids differ: [{}, {}]x{} vs [{}, {}]x{}",
            a.lo,
            a.hi,
            a.resolution(),
            b.lo,
            b.hi,
            b.resolution()
        )));
    }
    let total: u64 = a.samples.iter().zip(&b.samples).map(|(&x, &y)| x.abs_diff(y) as u64).sum();
    Ok(a.step() * total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubical::Bar;

    fn sample_barcode() -> Barcode {
        Barcode {
            dim0: vec![Bar::essential(20.0), Bar::new(18.0, 17.0), Bar::new(8.0, 7.0)],
            dim1: vec![Bar::new(4.0, 0.0)],
        }
    }

    #[test]
    fn sample_barcode_values() {
        let bc = sample_barcode();
        let point = |dim, x: f64| {
            // first midpoint of this grid is exactly x
            let c = betti_curve(&bc, dim, x - 0.5, x + 1.5, 2).unwrap();
            assert_eq!(c.grid_point(0), x);
            c.samples[0]
        };
        assert_eq!(point(0, 10.0), 1);
        assert_eq!(point(0, 17.5), 2);
        assert_eq!(point(1, 2.0), 1);
        assert_eq!(point(1, 5.0), 0);
        assert_eq!(point(0, -100.0), 1);
        assert_eq!(point(0, 25.0), 0);
    }

    #[test]
    fn half_open_interval() {
        let bc = Barcode { dim0: vec![Bar::new(0.75, 0.25)], dim1: vec![] };
        // midpoints 0.125 0.375 0.625 0.875
        let c = betti_curve(&bc, 0, 0.0, 1.0, 4).unwrap();
        assert_eq!(c.samples, vec![0, 1, 1, 0]);
        // midpoints 0.25 0.75: 0.25 is excluded, 0.75 included
        let c = betti_curve(&bc, 0, 0.0, 1.0, 2).unwrap();
        assert_eq!(c.samples, vec![0, 1]);
    }

    #[test]
    fn empty_barcode_is_zero() {
        let c = betti_curve(&Barcode::default(), 1, 0.0, 1.0, 16).unwrap();
        assert!(c.samples.iter().all(|&s| s == 0));
    }

    #[test]
    fn invalid_grid() {
        let bc = sample_barcode();
        assert!(betti_curve(&bc, 0, 1.0, 1.0, 8).is_err());
        assert!(betti_curve(&bc, 0, 0.0, 1.0, 1).is_err());
        assert!(betti_curve(&bc, 2, 0.0, 1.0, 8).is_err());
    }

    #[test]
    fn l1_distance() {
        let a = BettiCurve { lo: 0.0, hi: 1.0, samples: vec![1, 1, 0, 0] };
        let z = BettiCurve::zeros(0.0, 1.0, 4).unwrap();
        assert_eq!(betti_l1(&a, &z).unwrap(), 0.5);
        assert_eq!(betti_l1(&a, &a).unwrap(), 0.0);
        let other = BettiCurve::zeros(0.0, 2.0, 4).unwrap();
        assert!(matches!(betti_l1(&a, &other), Err(Error::Incompatible(_))));
    }
}
