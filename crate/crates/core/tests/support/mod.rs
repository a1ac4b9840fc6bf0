//! Independent reference implementations shared by the integration suites.
//! None of these reuse library internals; they are deliberately slow.

#![allow(dead_code)]

pub mod songs;

use topoprint::{Bar, Barcode, IntensityImage, Label};

/// Persistence of the upper-star filtration by dense GF(2) column reduction
/// over every cell of the cubical complex, vertices at pixels.
pub fn brute_force_persistence(img: &IntensityImage) -> Barcode {
    let (rows, cols) = (img.rows(), img.cols());
    // cells on the doubled grid: (2r, 2c) vertex, one odd coordinate edge,
    // both odd square
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for y in 0..2 * rows - 1 {
        for x in 0..2 * cols - 1 {
            cells.push((y, x));
        }
    }
    let dim = |&(y, x): &(usize, usize)| (y % 2) + (x % 2);
    let value = |&(y, x): &(usize, usize)| {
        let ys: Vec<usize> = if y % 2 == 0 { vec![y / 2] } else { vec![y / 2, y / 2 + 1] };
        let xs: Vec<usize> = if x % 2 == 0 { vec![x / 2] } else { vec![x / 2, x / 2 + 1] };
        let mut v = f64::INFINITY;
        for &r in &ys {
            for &c in &xs {
                v = v.min(img.get(r, c));
            }
        }
        v
    };
    // decreasing threshold; faces never come after cofaces
    cells.sort_by(|a, b| value(b).total_cmp(&value(a)).then(dim(a).cmp(&dim(b))).then(a.cmp(b)));
    let n = cells.len();
    let mut position = vec![vec![0usize; 2 * cols - 1]; 2 * rows - 1];
    for (i, &(y, x)) in cells.iter().enumerate() {
        position[y][x] = i;
    }
    let mut columns: Vec<Vec<bool>> = cells
        .iter()
        .map(|&(y, x)| {
            let mut col = vec![false; n];
            if y % 2 == 1 {
                col[position[y - 1][x]] = true;
                col[position[y + 1][x]] = true;
            }
            if x % 2 == 1 {
                col[position[y][x - 1]] = true;
                col[position[y][x + 1]] = true;
            }
            col
        })
        .collect();
    let low = |c: &[bool]| c.iter().rposition(|&b| b);
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let mut out = Barcode::default();
    for j in 0..n {
        while let Some(l) = low(&columns[j]) {
            match owner[l] {
                Some(k) => {
                    let other = columns[k].clone();
                    for (a, b) in columns[j].iter_mut().zip(other) {
                        *a ^= b;
                    }
                }
                None => break,
            }
        }
        if let Some(l) = low(&columns[j]) {
            owner[l] = Some(j);
            paired[l] = true;
            paired[j] = true;
            let (birth, death) = (value(&cells[l]), value(&cells[j]));
            if birth != death {
                push(&mut out, dim(&cells[l]), Bar::new(birth, death));
            }
        }
    }
    for i in 0..n {
        if !paired[i] && low(&columns[i]).is_none() {
            push(&mut out, dim(&cells[i]), Bar::essential(value(&cells[i])));
        }
    }
    out
}

fn push(bc: &mut Barcode, dim: usize, bar: Bar) {
    match dim {
        0 => bc.dim0.push(bar),
        1 => bc.dim1.push(bar),
        _ => panic!("2-dimensional class in a rectangle"),
    }
}

/// Optimal total cost over all matchings of size `min(rows, cols)`.
pub fn exhaustive_assignment(rows: usize, cols: usize, values: &[f64]) -> f64 {
    let at = |i: usize, j: usize| if rows <= cols { values[i * cols + j] } else { values[j * cols + i] };
    let (short, long) = (rows.min(cols), rows.max(cols));
    fn go(i: usize, short: usize, long: usize, used: &mut Vec<bool>, at: &dyn Fn(usize, usize) -> f64) -> f64 {
        if i == short {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..long {
            if !used[j] {
                used[j] = true;
                best = best.min(at(i, j) + go(i + 1, short, long, used, at));
                used[j] = false;
            }
        }
        best
    }
    go(0, short, long, &mut vec![false; long], &at)
}

/// AUC as the probability that a positive scores a strictly lower error than
/// a negative, ties counting one half.
pub fn mann_whitney_auc(scores: &[(f64, Label)]) -> f64 {
    let pos: Vec<f64> = scores.iter().filter(|s| s.1 == Label::Positive).map(|s| s.0).collect();
    let neg: Vec<f64> = scores.iter().filter(|s| s.1 == Label::Negative).map(|s| s.0).collect();
    let mut wins = 0.0;
    for &p in &pos {
        for &q in &neg {
            wins += if p < q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

fn count_alive(bars: &[Bar], x: f64) -> i64 {
    bars.iter().filter(|b| b.death < x && x <= b.birth).count() as i64
}

/// Exact `∫_lo^hi |β_a(x) − β_b(x)| dx` by sweeping the bar endpoints.
pub fn exact_betti_l1(a: &[Bar], b: &[Bar], lo: f64, hi: f64) -> f64 {
    let mut points = vec![lo, hi];
    for bar in a.iter().chain(b) {
        for x in [bar.birth, bar.death] {
            if x > lo && x < hi {
                points.push(x);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (count_alive(a, mid) - count_alive(b, mid)).abs() as f64 * (w[1] - w[0])
        })
        .sum()
}

/// Fingerprint with random Betti curves on the default grid, for matching
/// tests that do not need audio.
pub fn random_fingerprint(seed: u64, entries: usize, resolution: usize) -> topoprint::Fingerprint {
    use rand::{Rng, SeedableRng};
    use topoprint::{BettiCurve, Fingerprint, FingerprintConfig, FingerprintEntry};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let config = FingerprintConfig { betti_resolution: resolution, ..Default::default() };
    let curve = |rng: &mut rand_chacha::ChaCha8Rng| {
        let samples = (0..resolution).map(|_| rng.random_range(0..6)).collect();
        BettiCurve { lo: 0.0, hi: 1.0, samples }
    };
    let source_duration = config.window_seconds + config.stride() * entries.saturating_sub(1) as f64;
    let entries = (0..entries)
        .map(|i| FingerprintEntry { t: config.window_midpoint(i), beta0: curve(&mut rng), beta1: curve(&mut rng) })
        .collect();
    Fingerprint { entries, config, source_duration }
}
