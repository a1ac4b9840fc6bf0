use super::IntensityImage;

pub(crate) const EXTERIOR: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Edge {
    pub id: u32,
    pub ends: [u32; 2],
    /// Squares on either side, `EXTERIOR` on the image border.
    pub sides: [u32; 2],
    pub value: f64,
    cell: u32,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Square {
    pub id: u32,
    /// Edge ids of the four sides.
    pub boundary: [u32; 4],
    pub value: f64,
    cell: u32,
}

/// Cubical vertex construction of an image under the lower-star filtration,
/// with every dimension sorted by `(value, row-major cell index)`.
///
/// Within a dimension this is the filtration order; across dimensions ties
/// are broken by dimension, so a cube never precedes its faces.
#[derive(Debug)]
pub(crate) struct LowerStarComplex {
    pub vertex_values: Vec<f64>,
    /// Vertex ids in filtration order.
    pub vertex_order: Vec<u32>,
    pub vertex_rank: Vec<u32>,
    /// Edges in filtration order.
    pub edges: Vec<Edge>,
    pub edge_rank: Vec<u32>,
    /// Squares in filtration order.
    pub squares: Vec<Square>,
    pub square_rank: Vec<u32>,
}

impl LowerStarComplex {
    pub fn from_upper_star(img: &IntensityImage) -> Self {
        let (rows, cols) = (img.rows(), img.cols());
        let values: Vec<f64> = img.values().iter().map(|v| -v).collect();
        let width = 2 * cols - 1;
        let cell = |y: usize, x: usize| (y * width + x) as u32;
        let vid = |r: usize, c: usize| (r * cols + c) as u32;
        let n_horizontal = rows * (cols - 1);
        let h_id = |r: usize, c: usize| (r * (cols - 1) + c) as u32;
        let v_id = |r: usize, c: usize| (n_horizontal + r * cols + c) as u32;
        let s_id = |r: usize, c: usize| (r * (cols - 1) + c) as u32;

        let mut vertex_order: Vec<u32> = (0..values.len() as u32).collect();
        // vertex cell index is monotone in vertex id
        vertex_order.sort_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]).then(a.cmp(&b)));
        let vertex_rank = invert(&vertex_order);

        let mut edges = Vec::with_capacity(n_horizontal + (rows - 1) * cols);
        for r in 0..rows {
            for c in 0..cols.saturating_sub(1) {
                let ends = [vid(r, c), vid(r, c + 1)];
                let above = if r > 0 { s_id(r - 1, c) } else { EXTERIOR };
                let below = if r + 1 < rows { s_id(r, c) } else { EXTERIOR };
                edges.push(Edge {
                    id: h_id(r, c),
                    ends,
                    sides: [above, below],
                    value: values[ends[0] as usize].max(values[ends[1] as usize]),
                    cell: cell(2 * r, 2 * c + 1),
                });
            }
        }
        for r in 0..rows.saturating_sub(1) {
            for c in 0..cols {
                let ends = [vid(r, c), vid(r + 1, c)];
                let left = if c > 0 { s_id(r, c - 1) } else { EXTERIOR };
                let right = if c + 1 < cols { s_id(r, c) } else { EXTERIOR };
                edges.push(Edge {
                    id: v_id(r, c),
                    ends,
                    sides: [left, right],
                    value: values[ends[0] as usize].max(values[ends[1] as usize]),
                    cell: cell(2 * r + 1, 2 * c),
                });
            }
        }
        edges.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.cell.cmp(&b.cell)));
        let mut edge_rank = vec![0u32; edges.len()];
        for (rank, e) in edges.iter().enumerate() {
            edge_rank[e.id as usize] = rank as u32;
        }

        let mut squares = Vec::with_capacity(rows.saturating_sub(1) * cols.saturating_sub(1));
        for r in 0..rows.saturating_sub(1) {
            for c in 0..cols.saturating_sub(1) {
                let value = [vid(r, c), vid(r, c + 1), vid(r + 1, c), vid(r + 1, c + 1)]
                    .iter()
                    .map(|&v| values[v as usize])
                    .fold(f64::NEG_INFINITY, f64::max);
                squares.push(Square {
                    id: s_id(r, c),
                    boundary: [h_id(r, c), h_id(r + 1, c), v_id(r, c), v_id(r, c + 1)],
                    value,
                    cell: cell(2 * r + 1, 2 * c + 1),
                });
            }
        }
        squares.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.cell.cmp(&b.cell)));
        let mut square_rank = vec![0u32; squares.len()];
        for (rank, s) in squares.iter().enumerate() {
            square_rank[s.id as usize] = rank as u32;
        }

        Self { vertex_values: values, vertex_order, vertex_rank, edges, edge_rank, squares, square_rank }
    }

    pub fn square_value(&self, id: u32) -> f64 {
        self.squares[self.square_rank[id as usize] as usize].value
    }
}

fn invert(order: &[u32]) -> Vec<u32> {
    let mut rank = vec![0u32; order.len()];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i as u32;
    }
    rank
}
