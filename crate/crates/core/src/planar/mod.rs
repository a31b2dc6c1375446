//! Planar tessellation as an immutable half-edge complex on a rectangular
//! window, with vertex classification and the cell-mark calculus.
//!
//! The complex lives on an extended window; estimators later restrict to an
//! inner observation window so that every object they touch has a complete
//! neighbourhood. Cells clipped by the extended window boundary are flagged
//! `synthetic` and never act as owners in statistics.

mod build;

pub use build::build_from_segments;

use crate::geom::{Point2, Polygon, Rect, Segment};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Angle tolerance (radians) for collinearity / straight-angle detection.
pub const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PlanarError {
    #[error("degenerate segment {index} (length below snap tolerance)")]
    DegenerateSegment { index: usize },
    #[error("dangling edge end at ({x}, {y}) strictly inside the window")]
    DanglingEdge { x: f64, y: f64 },
    #[error("non-convex face near ({x}, {y})")]
    NonConvexFace { x: f64, y: f64 },
    #[error("ambiguous straight angle at vertex {vertex} (two incident angles within tolerance of pi)")]
    AmbiguousAngle { vertex: usize },
    #[error("mark vector has {got} entries, tessellation has {want} cells")]
    MissingMark { got: usize, want: usize },
    #[error("nonpositive mark for cell {cell}")]
    NonpositiveMark { cell: usize },
    #[error("no objects with reference point in the observation window")]
    EmptyWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}
impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}
impl CellId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Pi,
    NonPi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarVertex {
    pub pos: Point2,
    /// Outgoing edges in counterclockwise order.
    pub incident_edges: Vec<EdgeId>,
    /// Cell in the wedge counterclockwise of `incident_edges[i]`; `None` for
    /// the outer face at window-boundary vertices.
    pub wedge_cells: Vec<Option<CellId>>,
    pub kind: VertexKind,
    pub owner_cell: Option<CellId>,
    pub on_window_boundary: bool,
}

impl PlanarVertex {
    pub fn degree(&self) -> usize {
        self.incident_edges.len()
    }

    pub fn incident_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.wedge_cells.iter().filter_map(|c| *c)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarEdge {
    pub endpoints: [VertexId; 2],
    pub length: f64,
    /// Cells left and right of the directed edge `endpoints[0] -> endpoints[1]`;
    /// `None` means the outer face (window-boundary edges only).
    pub adjacent_cells: [Option<CellId>; 2],
}

impl PlanarEdge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.endpoints[0] == v {
            self.endpoints[1]
        } else {
            self.endpoints[0]
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.adjacent_cells.iter().filter_map(|c| *c)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarCell {
    /// Full boundary cycle in counterclockwise order (corners and pi-vertices
    /// interleaved).
    pub boundary: Vec<VertexId>,
    /// Edge i connects boundary[i] to boundary[i+1].
    pub boundary_edges: Vec<EdgeId>,
    /// Parallel to `boundary`: true where the interior angle is a genuine
    /// corner (a 0-face of the cell).
    pub is_corner: Vec<bool>,
    pub area: f64,
    pub perimeter: f64,
    pub centroid: Point2,
    /// Clipped by the extended window boundary; excluded from estimators and
    /// from owning marks.
    pub synthetic: bool,
}

impl PlanarCell {
    /// Number of vertices on the cell boundary, m'_V(z) (= m'_E(z)).
    pub fn vertex_count(&self) -> usize {
        self.boundary.len()
    }

    /// Number of corners, n'_0(z).
    pub fn corner_count(&self) -> usize {
        self.is_corner.iter().filter(|c| **c).count()
    }

    pub fn corners(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.boundary
            .iter()
            .zip(&self.is_corner)
            .filter(|(_, c)| **c)
            .map(|(v, _)| *v)
    }
}

/// Result of classifying a single vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexClass {
    pub kind: VertexKind,
    pub owner_cell: Option<CellId>,
}

/// One 0-face instance of the multiset Z_0: corner vertex plus owning cell.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ZeroFaceInstance {
    pub vertex: VertexId,
    pub owner: CellId,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanarTessellation {
    pub vertices: Vec<PlanarVertex>,
    pub edges: Vec<PlanarEdge>,
    pub cells: Vec<PlanarCell>,
    /// Extended generation window.
    pub window_ext: Rect,
    /// Inner observation window.
    pub window_inner: Rect,
    /// Point snap tolerance used at construction.
    pub eps: f64,
}

impl PlanarTessellation {
    pub fn vertex(&self, id: VertexId) -> &PlanarVertex {
        &self.vertices[id.index()]
    }

    pub fn edge(&self, id: EdgeId) -> &PlanarEdge {
        &self.edges[id.index()]
    }

    pub fn cell(&self, id: CellId) -> &PlanarCell {
        &self.cells[id.index()]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len() as u32).map(CellId)
    }

    pub fn edge_segment(&self, id: EdgeId) -> Segment {
        let e = self.edge(id);
        Segment::new(self.vertex(e.endpoints[0]).pos, self.vertex(e.endpoints[1]).pos)
    }

    /// Corner polygon of a cell (pi-vertices on boundary omitted).
    pub fn cell_polygon(&self, id: CellId) -> Polygon {
        let c = self.cell(id);
        Polygon::new(
            c.boundary
                .iter()
                .zip(&c.is_corner)
                .filter(|(_, k)| **k)
                .map(|(v, _)| self.vertex(*v).pos)
                .collect(),
        )
    }

    /// Classification of a vertex: pi iff exactly one incident cell has
    /// interior angle pi there, in which case that cell is the owner.
    pub fn classify_vertex(&self, v: VertexId) -> Result<VertexClass, PlanarError> {
        let vert = self.vertex(v);
        let n = vert.incident_edges.len();
        let mut straight: Vec<Option<CellId>> = Vec::new();
        for i in 0..n {
            let a = self.direction_of(v, vert.incident_edges[i]);
            let b = self.direction_of(v, vert.incident_edges[(i + 1) % n]);
            let angle = ccw_angle(a, b);
            if (angle - std::f64::consts::PI).abs() <= ANGLE_EPS {
                straight.push(vert.wedge_cells[i]);
            }
        }
        // A straight wedge on the outer face (window boundary) is an artifact
        // of clipping, not a pi-vertex.
        straight.retain(|c| c.is_some());
        match straight.len() {
            0 => Ok(VertexClass { kind: VertexKind::NonPi, owner_cell: None }),
            1 => Ok(VertexClass { kind: VertexKind::Pi, owner_cell: straight[0] }),
            _ => Err(PlanarError::AmbiguousAngle { vertex: v.index() }),
        }
    }

    fn direction_of(&self, v: VertexId, e: EdgeId) -> Point2 {
        let edge = self.edge(e);
        let w = edge.other(v);
        self.vertex(w).pos.sub(self.vertex(v).pos)
    }

    /// Corner vertices (0-faces) of a cell.
    pub fn zero_faces(&self, z: CellId) -> Vec<VertexId> {
        self.cell(z).corners().collect()
    }

    /// The full Z_0 multiset: one instance per (cell, corner) pair, owners
    /// being non-synthetic cells only.
    pub fn zero_face_instances(&self) -> Vec<ZeroFaceInstance> {
        let mut out = Vec::new();
        for z in self.cell_ids() {
            if self.cell(z).synthetic {
                continue;
            }
            for v in self.cell(z).corners() {
                out.push(ZeroFaceInstance { vertex: v, owner: z });
            }
        }
        out
    }

    /// Pi-vertices with a non-synthetic owner.
    pub fn pi_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_ids().filter(|v| self.vertex(*v).kind == VertexKind::Pi)
    }

    /// Number of edges whose closed segment meets the closed cell. Every such
    /// edge is incident to a boundary vertex of the cell (edge interiors
    /// contain no vertices and distinct edges never overlap), so the count is
    /// the number of distinct edges incident to the boundary cycle.
    pub fn edges_intersecting_cell(&self, z: CellId) -> usize {
        let cell = self.cell(z);
        let mut seen: Vec<EdgeId> = Vec::new();
        for &v in &cell.boundary {
            for &e in &self.vertex(v).incident_edges {
                if !seen.contains(&e) {
                    seen.push(e);
                }
            }
        }
        seen.len()
    }

    /// Validate a mark vector against this tessellation.
    pub fn check_marks(&self, rho: &[f64]) -> Result<(), PlanarError> {
        if rho.len() != self.cells.len() {
            return Err(PlanarError::MissingMark { got: rho.len(), want: self.cells.len() });
        }
        for (i, r) in rho.iter().enumerate() {
            if !(*r > 0.0) {
                return Err(PlanarError::NonpositiveMark { cell: i });
            }
        }
        Ok(())
    }

    /// alpha_x for a vertex: total mark of all adjacent cells.
    pub fn mark_alpha_vertex(&self, rho: &[f64], v: VertexId) -> f64 {
        self.vertex(v).incident_cells().map(|z| rho[z.index()]).sum()
    }

    /// alpha_x for an edge: total mark of its two adjacent cells.
    pub fn mark_alpha_edge(&self, rho: &[f64], e: EdgeId) -> f64 {
        self.edge(e).cells().map(|z| rho[z.index()]).sum()
    }

    /// beta of a 0-face instance: mark of the owning cell.
    pub fn mark_beta_zero_face(&self, rho: &[f64], inst: &ZeroFaceInstance) -> f64 {
        rho[inst.owner.index()]
    }

    /// beta of a pi-vertex: mark of its owner cell.
    pub fn mark_beta_pi_vertex(&self, rho: &[f64], v: VertexId) -> Option<f64> {
        self.vertex(v).owner_cell.map(|z| rho[z.index()])
    }

    /// gamma_v = m'_Z(v) * alpha_v.
    pub fn mark_gamma_vertex(&self, rho: &[f64], v: VertexId) -> f64 {
        let m_z = self.vertex(v).incident_cells().count() as f64;
        m_z * self.mark_alpha_vertex(rho, v)
    }

    /// gamma_e = l'(e) * alpha_e.
    pub fn mark_gamma_edge(&self, rho: &[f64], e: EdgeId) -> f64 {
        self.edge(e).length * self.mark_alpha_edge(rho, e)
    }

    /// gamma_z = a'(z) * rho_z.
    pub fn mark_gamma_cell(&self, rho: &[f64], z: CellId) -> f64 {
        self.cell(z).area * rho[z.index()]
    }

    /// Exact JSON round-trip.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tessellation serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Counterclockwise angle from direction `a` to direction `b`, in `[0, 2*pi)`.
pub fn ccw_angle(a: Point2, b: Point2) -> f64 {
    let ang = b.y.atan2(b.x) - a.y.atan2(a.x);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = ang % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point2, Rect, Segment};

    fn seg(x0: f64, y0: f64, x1: f64, y1: f64) -> Segment {
        Segment::new(Point2::new(x0, y0), Point2::new(x1, y1))
    }

    /// Frame segments of a rectangle window.
    fn frame(w: Rect) -> Vec<Segment> {
        w.boundary_segments().to_vec()
    }

    /// Two full-window crossing lines inside a square window.
    fn crossing() -> PlanarTessellation {
        let w = Rect::square(0.0, 2.0);
        let mut segs = frame(w);
        segs.push(seg(1.0, 0.0, 1.0, 2.0));
        segs.push(seg(0.0, 1.0, 2.0, 1.0));
        build_from_segments(&segs, w, Rect::new(0.5, 0.5, 1.5, 1.5), 1e-9).unwrap()
    }

    /// A T inside a rectangle frame: bar along y=1, stem down from (1,1).
    fn t_junction() -> PlanarTessellation {
        let w = Rect::square(0.0, 2.0);
        let mut segs = frame(w);
        segs.push(seg(0.0, 1.0, 2.0, 1.0)); // bar
        segs.push(seg(1.0, 0.0, 1.0, 1.0)); // stem
        build_from_segments(&segs, w, Rect::new(0.5, 0.5, 1.5, 1.5), 1e-9).unwrap()
    }

    #[test]
    fn crossing_lines_make_four_cells() {
        let t = crossing();
        assert_eq!(t.cells.len(), 4);
        // One interior vertex of degree 4.
        let interior: Vec<_> =
            t.vertex_ids().filter(|v| !t.vertex(*v).on_window_boundary).collect();
        assert_eq!(interior.len(), 1);
        let v = interior[0];
        assert_eq!(t.vertex(v).degree(), 4);
        assert_eq!(t.vertex(v).kind, VertexKind::NonPi);
        assert_eq!(t.vertex(v).incident_cells().count(), 4);
        // All four cells are unit squares here.
        for z in t.cell_ids() {
            assert!((t.cell(z).area - 1.0).abs() < 1e-12);
            assert_eq!(t.cell(z).vertex_count(), 4);
        }
    }

    #[test]
    fn t_vertex_is_pi_with_owner_across_the_bar() {
        let t = t_junction();
        assert_eq!(t.cells.len(), 3);
        let interior: Vec<_> =
            t.vertex_ids().filter(|v| !t.vertex(*v).on_window_boundary).collect();
        assert_eq!(interior.len(), 1);
        let v = interior[0];
        assert_eq!(t.vertex(v).degree(), 3);
        assert_eq!(t.vertex(v).kind, VertexKind::Pi);
        let owner = t.vertex(v).owner_cell.expect("pi vertex has owner");
        // The owner is the cell above the bar (the one whose side contains v
        // in its relative interior): centroid at (1.0, 1.5).
        let c = t.cell(owner).centroid;
        assert!((c.x - 1.0).abs() < 1e-9 && (c.y - 1.5).abs() < 1e-9);
        // classify_vertex agrees with the stored classification.
        let cls = t.classify_vertex(v).unwrap();
        assert_eq!(cls.kind, VertexKind::Pi);
        assert_eq!(cls.owner_cell, Some(owner));
        // The owner cell has 4 corners but 5 boundary vertices.
        assert_eq!(t.cell(owner).vertex_count(), 5);
        assert_eq!(t.cell(owner).corner_count(), 4);
        assert!(!t.cell(owner).corners().any(|c| c == v));
    }

    #[test]
    fn marks_on_t_junction() {
        let t = t_junction();
        let rho = vec![1.0; t.cells.len()];
        t.check_marks(&rho).unwrap();
        let interior: Vec<_> =
            t.vertex_ids().filter(|v| !t.vertex(*v).on_window_boundary).collect();
        let v = interior[0];
        // Degree-3 vertex with unit marks: alpha = 3, gamma = 9.
        assert_eq!(t.mark_alpha_vertex(&rho, v), 3.0);
        assert_eq!(t.mark_gamma_vertex(&rho, v), 9.0);
        // Any interior edge has two adjacent cells: alpha_e = 2.
        for e in t.edge_ids() {
            if t.edge(e).cells().count() == 2 {
                assert_eq!(t.mark_alpha_edge(&rho, e), 2.0);
                let expect = 2.0 * t.edge(e).length;
                assert!((t.mark_gamma_edge(&rho, e) - expect).abs() < 1e-12);
            }
        }
        // gamma_z = area for unit marks.
        for z in t.cell_ids() {
            assert!((t.mark_gamma_cell(&rho, z) - t.cell(z).area).abs() < 1e-12);
        }
        // Non-uniform marks: alpha_v sums the three adjacent cells.
        let rho2: Vec<f64> = (0..t.cells.len()).map(|i| 1.0 + i as f64).collect();
        let expect: f64 =
            t.vertex(v).incident_cells().map(|z| rho2[z.index()]).sum();
        assert_eq!(t.mark_alpha_vertex(&rho2, v), expect);
        // beta of the pi-vertex is the owner's mark.
        let owner = t.vertex(v).owner_cell.unwrap();
        assert_eq!(t.mark_beta_pi_vertex(&rho2, v), Some(rho2[owner.index()]));
    }

    #[test]
    fn mark_validation_errors() {
        let t = t_junction();
        assert!(matches!(
            t.check_marks(&[1.0]),
            Err(PlanarError::MissingMark { .. })
        ));
        let mut rho = vec![1.0; t.cells.len()];
        rho[0] = 0.0;
        assert!(matches!(
            t.check_marks(&rho),
            Err(PlanarError::NonpositiveMark { cell: 0 })
        ));
    }

    #[test]
    fn grid_cell_edge_intersections() {
        // 3x3 grid of unit squares: center cell meets its 4 own edges plus 8
        // edges touching at its corners.
        let w = Rect::square(0.0, 3.0);
        let mut segs = frame(w);
        for i in 1..3 {
            let c = i as f64;
            segs.push(seg(c, 0.0, c, 3.0));
            segs.push(seg(0.0, c, 3.0, c));
        }
        let t =
            build_from_segments(&segs, w, Rect::new(1.0, 1.0, 2.0, 2.0), 1e-9).unwrap();
        assert_eq!(t.cells.len(), 9);
        let center = t
            .cell_ids()
            .find(|z| {
                let c = t.cell(*z).centroid;
                (c.x - 1.5).abs() < 1e-9 && (c.y - 1.5).abs() < 1e-9
            })
            .unwrap();
        assert_eq!(t.edges_intersecting_cell(center), 12);

        // Oracle: exhaustive closed segment / closed polygon intersection.
        let poly = t.cell_polygon(center);
        let brute = t
            .edge_ids()
            .filter(|e| poly.intersects_segment(&t.edge_segment(*e), 1e-9))
            .count();
        assert_eq!(brute, 12);

        // Every cell meets at least its own boundary edges.
        for z in t.cell_ids() {
            assert!(t.edges_intersecting_cell(z) >= t.cell(z).vertex_count());
        }
    }

    #[test]
    fn construction_error_cases() {
        let w = Rect::square(0.0, 2.0);
        // Degenerate segment.
        let mut segs = frame(w);
        segs.push(seg(1.0, 1.0, 1.0, 1.0 + 1e-12));
        assert!(matches!(
            build_from_segments(&segs, w, w, 1e-9),
            Err(PlanarError::DegenerateSegment { .. })
        ));

        // Dangling end strictly inside the window.
        let mut segs = frame(w);
        segs.push(seg(0.0, 1.0, 1.0, 1.0));
        assert!(matches!(
            build_from_segments(&segs, w, w, 1e-9),
            Err(PlanarError::DanglingEdge { .. })
        ));

        // Non-convex face: a notch poking into an otherwise rectangular cell.
        let mut segs = frame(w);
        segs.push(seg(0.0, 1.0, 1.0, 1.0));
        segs.push(seg(1.0, 1.0, 1.0, 0.0));
        // Faces: an L-shaped region (non-convex) plus a unit square.
        assert!(matches!(
            build_from_segments(&segs, w, w, 1e-9),
            Err(PlanarError::NonConvexFace { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = t_junction();
        let json = t.to_json();
        let back = PlanarTessellation::from_json(&json).unwrap();
        assert_eq!(t.vertices.len(), back.vertices.len());
        assert_eq!(t.edges.len(), back.edges.len());
        assert_eq!(t.cells.len(), back.cells.len());
        for (a, b) in t.vertices.iter().zip(&back.vertices) {
            assert_eq!(a.pos.x.to_bits(), b.pos.x.to_bits());
            assert_eq!(a.pos.y.to_bits(), b.pos.y.to_bits());
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.owner_cell, b.owner_cell);
        }
        for (a, b) in t.cells.iter().zip(&back.cells) {
            assert_eq!(a.area.to_bits(), b.area.to_bits());
            assert_eq!(a.boundary, b.boundary);
        }
        assert_eq!(json, back.to_json());
    }

    #[test]
    fn vertex_incidence_counts_match() {
        for t in [crossing(), t_junction()] {
            for v in t.vertex_ids() {
                let vert = t.vertex(v);
                if !vert.on_window_boundary {
                    assert!(vert.degree() >= 3);
                    assert_eq!(vert.degree(), vert.incident_cells().count());
                }
            }
        }
    }
}
