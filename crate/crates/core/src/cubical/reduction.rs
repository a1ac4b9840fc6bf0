use super::complex::LowerStarComplex;
use super::LowerPairs;

/// Adds `src` into `dst` over the two-element field; both sorted ascending.
fn add_into(dst: &mut Vec<u32>, src: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < dst.len() && j < src.len() {
        match dst[i].cmp(&src[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(dst[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(src[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&dst[i..]);
    scratch.extend_from_slice(&src[j..]);
    std::mem::swap(dst, scratch);
}

/// Reduces `columns` (boundaries as sorted row ranks) left to right and
/// returns, for every column, the row of its final pivot.
fn reduce(columns: &mut [Vec<u32>], n_rows: usize, skip: &[bool]) -> Vec<Option<u32>> {
    let mut pivot_col: Vec<Option<u32>> = vec![None; n_rows];
    let mut lows = vec![None; columns.len()];
    let mut scratch = Vec::new();
    for j in 0..columns.len() {
        if skip[j] {
            columns[j].clear();
            continue;
        }
        while let Some(&low) = columns[j].last() {
            match pivot_col[low as usize] {
                Some(k) => {
                    let (left, right) = columns.split_at_mut(j);
                    add_into(&mut right[0], &left[k as usize], &mut scratch);
                }
                None => {
                    pivot_col[low as usize] = Some(j as u32);
                    lows[j] = Some(low);
                    break;
                }
            }
        }
    }
    lows
}

/// Standard boundary-matrix reduction, top dimension first, clearing the
/// edge columns that are already known to be pivots of square columns.
pub(super) fn pairs(cx: &LowerStarComplex) -> LowerPairs {
    let mut out = LowerPairs::default();
    let n_edges = cx.edges.len();

    let mut square_cols: Vec<Vec<u32>> = cx
        .squares
        .iter()
        .map(|s| {
            let mut col: Vec<u32> = s.boundary.iter().map(|&e| cx.edge_rank[e as usize]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let square_lows = reduce(&mut square_cols, n_edges, &vec![false; cx.squares.len()]);
    let mut edge_is_pivot = vec![false; n_edges];
    for (j, low) in square_lows.iter().enumerate() {
        if let Some(e) = low {
            edge_is_pivot[*e as usize] = true;
            out.push(1, cx.edges[*e as usize].value, cx.squares[j].value);
        }
    }

    let mut edge_cols: Vec<Vec<u32>> = cx
        .edges
        .iter()
        .map(|e| {
            let mut col: Vec<u32> = e.ends.iter().map(|&v| cx.vertex_rank[v as usize]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let edge_lows = reduce(&mut edge_cols, cx.vertex_values.len(), &edge_is_pivot);
    let mut vertex_is_pivot = vec![false; cx.vertex_values.len()];
    for (j, low) in edge_lows.iter().enumerate() {
        match low {
            Some(v) => {
                vertex_is_pivot[*v as usize] = true;
                let vid = cx.vertex_order[*v as usize] as usize;
                out.push(0, cx.vertex_values[vid], cx.edges[j].value);
            }
            // a cycle that no square kills
            None if !edge_is_pivot[j] => out.push(1, cx.edges[j].value, f64::INFINITY),
            None => {}
        }
    }
    for (rank, &vid) in cx.vertex_order.iter().enumerate() {
        if !vertex_is_pivot[rank] {
            out.push(0, cx.vertex_values[vid as usize], f64::INFINITY);
        }
    }
    out
}
