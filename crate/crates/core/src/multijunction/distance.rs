use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};

use super::{MultiJunctionSurface, SurfacePoint};
use crate::error::{PlateauError, Result};

/// Graph over slots: mesh edges inside each sheet, plus zero-length links
/// between the slots of one vertex, so paths change sheets only where
/// sheets meet.
fn slot_graph(m: &MultiJunctionSurface) -> UnGraph<(), f64> {
    let c = m.complex();
    let mut g = UnGraph::with_capacity(c.num_slots(), 0);
    for _ in 0..c.num_slots() {
        g.add_node(());
    }
    for (&(a, b), tris) in c.edges() {
        let len = (c.vertex(a) - c.vertex(b)).norm();
        let mut seen = Vec::new();
        for &t in tris {
            let p = c.triangle_patch(t);
            if seen.contains(&p) {
                continue;
            }
            seen.push(p);
            let (sa, sb) = (c.slot_of(a, p).expect("edge slot"), c.slot_of(b, p).expect("edge slot"));
            g.add_edge(NodeIndex::new(sa), NodeIndex::new(sb), len);
        }
    }
    for v in 0..c.vertices().len() {
        let r = c.vertex_slots(v);
        for s in r.start + 1..r.end {
            g.add_edge(NodeIndex::new(r.start), NodeIndex::new(s), 0.0);
        }
    }
    g
}

/// Intrinsic distance from `from` to every slot; +∞ where no chain exists.
pub fn intrinsic_distances(m: &MultiJunctionSurface, from: SurfacePoint) -> Result<Vec<f64>> {
    let source = m.slot(from)?;
    let g = slot_graph(m);
    let reached = dijkstra(&g, NodeIndex::new(source), None, |e| *e.weight());
    let mut out = vec![f64::INFINITY; m.complex().num_slots()];
    for (node, d) in reached {
        out[node.index()] = d;
    }
    Ok(out)
}

/// Length of the shortest chain of in-sheet paths joined at Γ.
pub fn intrinsic_distance(m: &MultiJunctionSurface, x: SurfacePoint, y: SurfacePoint) -> Result<f64> {
    let to = m.slot(y)?;
    let d = intrinsic_distances(m, x)?[to];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(PlateauError::Disconnected { from: m.slot(x)?, to })
    }
}
