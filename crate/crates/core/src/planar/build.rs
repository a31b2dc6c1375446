//! Arrangement construction: from a set of segments to a validated half-edge
//! planar subdivision.
//!
//! Callers supply segments that already cover the extended window, including
//! its four boundary segments. Segments must meet transversally or at shared
//! endpoints (T-junctions, i.e. one endpoint in the interior of another
//! segment, are fine); collinear overlaps are not supported.

use super::{
    ccw_angle, CellId, EdgeId, PlanarCell, PlanarEdge, PlanarError, PlanarTessellation,
    PlanarVertex, VertexId, VertexKind, ANGLE_EPS,
};
use crate::geom::{segment_intersection, Point2, Rect, Segment};
use std::collections::{BTreeSet, HashMap, HashSet};

/// Snap-tolerant point registry over a uniform hash grid.
struct PointRegistry {
    eps: f64,
    grid: HashMap<(i64, i64), Vec<u32>>,
    points: Vec<Point2>,
}

impl PointRegistry {
    fn new(eps: f64) -> Self {
        PointRegistry { eps, grid: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.eps).floor() as i64, (p.y / self.eps).floor() as i64)
    }

    fn insert(&mut self, p: Point2) -> u32 {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    for &id in ids {
                        if self.points[id as usize].dist(p) <= self.eps {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.points.len() as u32;
        self.points.push(p);
        self.grid.entry((kx, ky)).or_default().push(id);
        id
    }
}

/// Uniform grid used to find candidate segment pairs.
struct SegGrid {
    cell: f64,
    origin: Point2,
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl SegGrid {
    fn new(window: Rect, n_segments: usize) -> Self {
        let res = (n_segments as f64).sqrt().clamp(8.0, 128.0);
        let cell = (window.width().max(window.height()) / res).max(1e-12);
        SegGrid {
            cell,
            origin: Point2::new(window.x0, window.y0),
            buckets: HashMap::new(),
        }
    }

    fn cells_of(&self, s: &Segment) -> Vec<(i64, i64)> {
        // Conservative supercover: sample along the segment at sub-cell
        // spacing and pad each hit by one ring so near-tolerance contacts
        // always share a bucket.
        let len = s.length();
        let steps = (len / (0.5 * self.cell)).ceil() as usize + 1;
        let mut out = HashSet::new();
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let p = s.a.add(s.b.sub(s.a).scale(t));
            let ix = ((p.x - self.origin.x) / self.cell).floor() as i64;
            let iy = ((p.y - self.origin.y) / self.cell).floor() as i64;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    out.insert((ix + dx, iy + dy));
                }
            }
        }
        out.into_iter().collect()
    }

    fn insert(&mut self, idx: u32, s: &Segment) {
        for c in self.cells_of(s) {
            self.buckets.entry(c).or_default().push(idx);
        }
    }

    fn candidate_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs = HashSet::new();
        for ids in self.buckets.values() {
            for i in 0..ids.len() {
                for j in (i + 1)..ids.len() {
                    let (a, b) = (ids[i].min(ids[j]), ids[i].max(ids[j]));
                    pairs.insert((a, b));
                }
            }
        }
        let mut v: Vec<_> = pairs.into_iter().collect();
        v.sort_unstable();
        v
    }
}

/// Construct a planar tessellation from segments on the extended window.
pub fn build_from_segments(
    segments: &[Segment],
    window_ext: Rect,
    window_inner: Rect,
    eps: f64,
) -> Result<PlanarTessellation, PlanarError> {
    for (i, s) in segments.iter().enumerate() {
        if s.length() < eps {
            return Err(PlanarError::DegenerateSegment { index: i });
        }
    }

    // Register endpoints and pairwise intersections, collecting cut positions
    // along each segment.
    let mut reg = PointRegistry::new(eps);
    let mut cuts: Vec<Vec<(f64, u32)>> = Vec::with_capacity(segments.len());
    for s in segments {
        let a = reg.insert(s.a);
        let b = reg.insert(s.b);
        cuts.push(vec![(0.0, a), (1.0, b)]);
    }

    let mut grid = SegGrid::new(window_ext, segments.len());
    for (i, s) in segments.iter().enumerate() {
        grid.insert(i as u32, s);
    }
    for (i, j) in grid.candidate_pairs() {
        let (si, sj) = (&segments[i as usize], &segments[j as usize]);
        if let Some(p) = segment_intersection(si, sj, eps) {
            let pid = reg.insert(p);
            let p = reg.points[pid as usize];
            cuts[i as usize].push((param_along(si, p), pid));
            cuts[j as usize].push((param_along(sj, p), pid));
        }
    }

    // Split segments at their cut points.
    let mut raw_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for cut in &mut cuts {
        cut.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prev: Option<u32> = None;
        for &(_, pid) in cut.iter() {
            if let Some(q) = prev {
                if q != pid {
                    raw_edges.insert((q.min(pid), q.max(pid)));
                }
            }
            prev = Some(pid);
        }
    }

    // Dissolve degree-2 vertices with collinear incident edges (they are not
    // tessellation vertices, just segment endpoints meeting end-to-end).
    let mut edge_list: Vec<(u32, u32)> = raw_edges.into_iter().collect();
    loop {
        let mut incident: HashMap<u32, Vec<usize>> = HashMap::new();
        for (idx, (a, b)) in edge_list.iter().enumerate() {
            incident.entry(*a).or_default().push(idx);
            incident.entry(*b).or_default().push(idx);
        }
        let mut merged = false;
        let mut keys: Vec<u32> = incident.keys().copied().collect();
        keys.sort_unstable();
        for v in keys {
            let inc = &incident[&v];
            if inc.len() != 2 {
                continue;
            }
            let (e0, e1) = (inc[0], inc[1]);
            let p = reg.points[v as usize];
            let o0 = other_end(edge_list[e0], v);
            let o1 = other_end(edge_list[e1], v);
            let d0 = reg.points[o0 as usize].sub(p);
            let d1 = reg.points[o1 as usize].sub(p);
            let sin = d0.cross(d1).abs() / (d0.norm() * d1.norm());
            if sin <= ANGLE_EPS && d0.dot(d1) < 0.0 {
                edge_list[e0] = (o0.min(o1), o0.max(o1));
                edge_list.swap_remove(e1);
                merged = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }

    // Vertex degrees and dangling-end detection.
    let mut incident: HashMap<u32, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in edge_list.iter().enumerate() {
        incident.entry(*a).or_default().push(idx);
        incident.entry(*b).or_default().push(idx);
    }
    for (&pid, inc) in incident.iter() {
        let p = reg.points[pid as usize];
        if inc.len() <= 1 && !window_ext.on_boundary(p, 2.0 * eps) {
            return Err(PlanarError::DanglingEdge { x: p.x, y: p.y });
        }
    }

    // Compact vertex ids (only points used by edges survive).
    let mut used: Vec<u32> = incident.keys().copied().collect();
    used.sort_unstable();
    let remap: HashMap<u32, u32> =
        used.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let positions: Vec<Point2> = used.iter().map(|&p| reg.points[p as usize]).collect();
    let edges: Vec<(u32, u32)> =
        edge_list.iter().map(|&(a, b)| (remap[&a], remap[&b])).collect();
    let n_vertices = positions.len();

    // Outgoing edges per vertex, sorted counterclockwise.
    let mut outgoing: Vec<Vec<(f64, u32)>> = vec![Vec::new(); n_vertices];
    for (idx, &(a, b)) in edges.iter().enumerate() {
        let dir_ab = positions[b as usize].sub(positions[a as usize]);
        let dir_ba = positions[a as usize].sub(positions[b as usize]);
        outgoing[a as usize].push((dir_ab.y.atan2(dir_ab.x), idx as u32));
        outgoing[b as usize].push((dir_ba.y.atan2(dir_ba.x), idx as u32));
    }
    for out in &mut outgoing {
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    // Face tracing over directed edges. Directed edge 2*e+0 runs a->b,
    // 2*e+1 runs b->a. next(d) turns clockwise-most at the head, which walks
    // every face counterclockwise (interior on the left).
    let origin = |d: u32| -> u32 {
        let (a, b) = edges[(d >> 1) as usize];
        if d & 1 == 0 { a } else { b }
    };
    let target = |d: u32| -> u32 {
        let (a, b) = edges[(d >> 1) as usize];
        if d & 1 == 0 { b } else { a }
    };
    let next = |d: u32| -> u32 {
        let w = target(d) as usize;
        let e = d >> 1;
        let out = &outgoing[w];
        let i = out
            .iter()
            .position(|&(_, oe)| oe == e)
            .expect("reverse edge is outgoing at head");
        let (_, ne) = out[(i + out.len() - 1) % out.len()];
        let (a, _) = edges[ne as usize];
        (ne << 1) | if a == w as u32 { 0 } else { 1 }
    };

    let n_directed = edges.len() * 2;
    let mut face_of: Vec<u32> = vec![u32::MAX; n_directed];
    let mut face_cycles: Vec<Vec<u32>> = Vec::new();
    for start in 0..n_directed as u32 {
        if face_of[start as usize] != u32::MAX {
            continue;
        }
        let fid = face_cycles.len() as u32;
        let mut cycle = Vec::new();
        let mut d = start;
        loop {
            face_of[d as usize] = fid;
            cycle.push(d);
            d = next(d);
            if d == start {
                break;
            }
        }
        face_cycles.push(cycle);
    }

    // Signed area per face; exactly one face (the outer one) is negative.
    let mut outer: Option<u32> = None;
    let mut cell_of_face: Vec<Option<CellId>> = vec![None; face_cycles.len()];
    let mut cells: Vec<PlanarCell> = Vec::new();
    for (fid, cycle) in face_cycles.iter().enumerate() {
        let pts: Vec<Point2> =
            cycle.iter().map(|&d| positions[origin(d) as usize]).collect();
        let mut area2 = 0.0;
        for i in 0..pts.len() {
            area2 += pts[i].cross(pts[(i + 1) % pts.len()]);
        }
        if area2 <= 0.0 {
            if let Some(prev) = outer {
                // Two unbounded-looking faces means a disconnected island,
                // i.e. a face with a hole: not convex.
                let _ = prev;
                return Err(PlanarError::NonConvexFace { x: pts[0].x, y: pts[0].y });
            }
            outer = Some(fid as u32);
            continue;
        }

        let n = pts.len();
        let mut is_corner = Vec::with_capacity(n);
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let here = pts[i];
            let nextp = pts[(i + 1) % n];
            let d0 = here.sub(prev);
            let d1 = nextp.sub(here);
            let sin = d0.cross(d1) / (d0.norm() * d1.norm());
            if sin < -ANGLE_EPS {
                return Err(PlanarError::NonConvexFace { x: here.x, y: here.y });
            }
            is_corner.push(sin > ANGLE_EPS);
        }

        let boundary: Vec<VertexId> =
            cycle.iter().map(|&d| VertexId(origin(d))).collect();
        let boundary_edges: Vec<EdgeId> =
            cycle.iter().map(|&d| EdgeId(d >> 1)).collect();
        let synthetic = boundary
            .iter()
            .any(|v| window_ext.on_boundary(positions[v.index()], 2.0 * eps));
        let polygon = crate::geom::Polygon::new(pts.clone());
        let cell = PlanarCell {
            boundary,
            boundary_edges,
            is_corner,
            area: 0.5 * area2,
            perimeter: polygon.perimeter(),
            centroid: polygon.centroid(),
            synthetic,
        };
        cell_of_face[fid] = Some(CellId(cells.len() as u32));
        cells.push(cell);
    }
    if outer.is_none() {
        return Err(PlanarError::DanglingEdge {
            x: window_ext.x0,
            y: window_ext.y0,
        });
    }

    // Assemble edges with left/right cells.
    let planar_edges: Vec<PlanarEdge> = edges
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            let left = cell_of_face[face_of[idx << 1] as usize];
            let right = cell_of_face[face_of[(idx << 1) | 1] as usize];
            PlanarEdge {
                endpoints: [VertexId(a), VertexId(b)],
                length: positions[a as usize].dist(positions[b as usize]),
                adjacent_cells: [left, right],
            }
        })
        .collect();

    // Assemble vertices with their counterclockwise wedge structure. The cell
    // in the wedge between outgoing edge i and i+1 is the face left of edge i
    // directed away from the vertex.
    let mut vertices: Vec<PlanarVertex> = Vec::with_capacity(n_vertices);
    for (vi, out) in outgoing.iter().enumerate() {
        let incident_edges: Vec<EdgeId> =
            out.iter().map(|&(_, e)| EdgeId(e)).collect();
        let wedge_cells: Vec<Option<CellId>> = out
            .iter()
            .map(|&(_, e)| {
                let (a, _) = edges[e as usize];
                let d = (e << 1) | if a == vi as u32 { 0 } else { 1 };
                cell_of_face[face_of[d as usize] as usize]
            })
            .collect();
        let pos = positions[vi];
        vertices.push(PlanarVertex {
            pos,
            incident_edges,
            wedge_cells,
            kind: VertexKind::NonPi,
            owner_cell: None,
            on_window_boundary: window_ext.on_boundary(pos, 2.0 * eps),
        });
    }

    let mut tess = PlanarTessellation {
        vertices,
        edges: planar_edges,
        cells,
        window_ext,
        window_inner,
        eps,
    };

    // Classify every vertex; interior vertices must have degree >= 3.
    for v in 0..tess.vertices.len() {
        let vid = VertexId(v as u32);
        if !tess.vertices[v].on_window_boundary && tess.vertices[v].degree() < 3 {
            let p = tess.vertices[v].pos;
            return Err(PlanarError::DanglingEdge { x: p.x, y: p.y });
        }
        let class = tess.classify_vertex(vid)?;
        tess.vertices[v].kind = class.kind;
        tess.vertices[v].owner_cell = class.owner_cell;
    }

    debug_assert!(wedges_consistent(&tess));
    Ok(tess)
}

fn other_end(e: (u32, u32), v: u32) -> u32 {
    if e.0 == v { e.1 } else { e.0 }
}

fn param_along(s: &Segment, p: Point2) -> f64 {
    let d = s.b.sub(s.a);
    p.sub(s.a).dot(d) / d.dot(d)
}

/// Each wedge's angular span must be positive and the wedges at an interior
/// vertex must cover 2*pi.
fn wedges_consistent(t: &PlanarTessellation) -> bool {
    for v in t.vertex_ids() {
        let vert = t.vertex(v);
        if vert.on_window_boundary {
            continue;
        }
        let n = vert.degree();
        let mut total = 0.0;
        for i in 0..n {
            let e0 = vert.incident_edges[i];
            let e1 = vert.incident_edges[(i + 1) % n];
            let a = t.vertex(t.edge(e0).other(v)).pos.sub(vert.pos);
            let b = t.vertex(t.edge(e1).other(v)).pos.sub(vert.pos);
            total += ccw_angle(a, b);
        }
        if (total - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return false;
        }
    }
    true
}
