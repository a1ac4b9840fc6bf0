use super::complex::{LowerStarComplex, EXTERIOR};
use super::LowerPairs;

/// Disjoint sets whose roots are always the eldest member under `age`
/// (smaller is elder).
struct ElderForest {
    parent: Vec<u32>,
}

impl ElderForest {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }
}

/// Dimension 0 by union-find over vertices and edges; dimension 1 by
/// union-find over the dual graph (squares plus one exterior node, edges
/// crossing between them) processed in reverse filtration order.
pub(super) fn pairs(cx: &LowerStarComplex) -> LowerPairs {
    let mut out = LowerPairs::default();

    let n = cx.vertex_values.len();
    let mut forest = ElderForest::new(n);
    for e in &cx.edges {
        let ra = forest.find(e.ends[0]);
        let rb = forest.find(e.ends[1]);
        if ra == rb {
            continue;
        }
        let (elder, younger) =
            if cx.vertex_rank[ra as usize] < cx.vertex_rank[rb as usize] { (ra, rb) } else { (rb, ra) };
        forest.parent[younger as usize] = elder;
        out.push(0, cx.vertex_values[younger as usize], e.value);
    }
    for v in 0..n as u32 {
        if forest.find(v) == v {
            out.push(0, cx.vertex_values[v as usize], f64::INFINITY);
        }
    }

    let n_sq = cx.squares.len();
    if n_sq == 0 {
        return out;
    }
    let exterior = n_sq as u32;
    let node = |s: u32| if s == EXTERIOR { exterior } else { s };
    // reverse age: later squares are elder, the exterior is eldest
    let age = |s: u32| if s == exterior { u32::MAX } else { cx.square_rank[s as usize] };
    let mut dual = ElderForest::new(n_sq + 1);
    for e in cx.edges.iter().rev() {
        let ra = dual.find(node(e.sides[0]));
        let rb = dual.find(node(e.sides[1]));
        if ra == rb {
            continue;
        }
        let (elder, younger) = if age(ra) > age(rb) { (ra, rb) } else { (rb, ra) };
        dual.parent[younger as usize] = elder;
        out.push(1, e.value, cx.square_value(younger));
    }
    out
}
