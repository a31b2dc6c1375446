//! Seedable generators for the three reference families of stationary planar
//! tessellations: Poisson line (side-to-side, degree 4), Poisson Voronoi
//! (side-to-side, degree 3) and the running-bond brick wall (every interior
//! vertex a T-junction, phi = 1).

use crate::geom::{clip_segment_to_rect, Point2, Rect, Segment};
use crate::planar::{build_from_segments, PlanarError, PlanarTessellation};
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, HasPosition, Point2 as SpadePoint, Triangulation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("window length {length} is not commensurate with brick size {width}x{height} (offset {offset})")]
    IncommensurateWindow { length: f64, width: f64, height: f64, offset: f64 },
    #[error("degenerate cocircularity persisted after {retries} jittered retries")]
    DegenerateCocircularity { retries: u32 },
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error("site insertion failed: {0}")]
    SiteInsertion(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorFamily {
    /// Isotropic Poisson line process with the given length intensity
    /// (mean total line length per unit area).
    PoissonLine { length_intensity: f64 },
    /// Voronoi tessellation of a Poisson point sample.
    PoissonVoronoi { point_intensity: f64 },
    /// Running-bond brick layout; rows of height `height`, bricks of width
    /// `width`, successive rows shifted by `offset * width`.
    BrickWall {
        width: f64,
        height: f64,
        #[serde(default = "default_offset")]
        offset: f64,
        #[serde(default)]
        random_phase: bool,
    },
}

fn default_offset() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: GeneratorFamily,
    /// Side length L of the inner observation window [0, L]^2.
    pub window_length: f64,
    /// Margin m; generation happens on [-m, L+m]^2.
    pub margin: f64,
}

impl GeneratorSpec {
    pub fn window_ext(&self) -> Rect {
        Rect::new(
            -self.margin,
            -self.margin,
            self.window_length + self.margin,
            self.window_length + self.margin,
        )
    }

    pub fn window_inner(&self) -> Rect {
        Rect::new(0.0, 0.0, self.window_length, self.window_length)
    }

    pub fn snap_eps(&self) -> f64 {
        1e-9 * self.window_length
    }

    fn validate(&self) -> Result<(), GenError> {
        if !(self.window_length > 0.0) || !(self.margin > 0.0) {
            return Err(GenError::InvalidParameter(
                "window length and margin must be positive".into(),
            ));
        }
        match &self.family {
            GeneratorFamily::PoissonLine { length_intensity } if !(*length_intensity > 0.0) => {
                Err(GenError::InvalidParameter("line length intensity must be positive".into()))
            }
            GeneratorFamily::PoissonVoronoi { point_intensity } if !(*point_intensity > 0.0) => {
                Err(GenError::InvalidParameter("point intensity must be positive".into()))
            }
            GeneratorFamily::BrickWall { width, height, offset, .. }
                if !(*width > 0.0) || !(*height > 0.0) || !(*offset > 0.0) || !(*offset < 1.0) =>
            {
                Err(GenError::InvalidParameter(
                    "brick width/height must be positive and offset in (0,1)".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug)]
pub struct GenOutput {
    pub tess: PlanarTessellation,
    /// Count of jittered retries taken to escape near-cocircular site
    /// configurations (Poisson Voronoi only).
    pub cocircularity_retries: u32,
}

/// Generate a realization of the given family. Identical (spec, seed) pairs
/// produce bit-identical tessellations.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<GenOutput, GenError> {
    spec.validate()?;
    match spec.family {
        GeneratorFamily::PoissonLine { .. } => gen_poisson_line(spec, seed),
        GeneratorFamily::PoissonVoronoi { .. } => gen_poisson_voronoi(spec, seed),
        GeneratorFamily::BrickWall { .. } => gen_brick_wall(spec, seed),
    }
}

pub fn gen_poisson_line(spec: &GeneratorSpec, seed: u64) -> Result<GenOutput, GenError> {
    spec.validate()?;
    let length_intensity = match spec.family {
        GeneratorFamily::PoissonLine { length_intensity } => length_intensity,
        _ => return Err(GenError::InvalidParameter("spec is not poisson_line".into())),
    };
    let window = spec.window_ext();
    let eps = spec.snap_eps();
    let center = window.center();
    let radius = window.circumradius() * 1.0001;

    // Lines hitting a disc of radius R around the center form a Poisson
    // process of mean 2 * R * L_A in (angle, signed distance) coordinates.
    let mut rng = stream_rng(seed, 0x504c54);
    let mean = 2.0 * radius * length_intensity;
    let n = Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64;

    let mut segments: Vec<Segment> = window.boundary_segments().to_vec();
    for _ in 0..n {
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let p = rng.gen_range(-radius..radius);
        let normal = Point2::new(theta.cos(), theta.sin());
        let dir = Point2::new(-normal.y, normal.x);
        let foot = center.add(normal.scale(p));
        let long = Segment::new(
            foot.add(dir.scale(-2.0 * radius)),
            foot.add(dir.scale(2.0 * radius)),
        );
        if let Some(seg) = clip_segment_to_rect(&long, &window, eps) {
            segments.push(seg);
        }
    }

    let tess = build_from_segments(&segments, window, spec.window_inner(), eps)?;
    Ok(GenOutput { tess, cocircularity_retries: 0 })
}

struct Site(SpadePoint<f64>);

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> SpadePoint<f64> {
        self.0
    }
}

pub fn gen_poisson_voronoi(spec: &GeneratorSpec, seed: u64) -> Result<GenOutput, GenError> {
    spec.validate()?;
    let point_intensity = match spec.family {
        GeneratorFamily::PoissonVoronoi { point_intensity } => point_intensity,
        _ => return Err(GenError::InvalidParameter("spec is not poisson_voronoi".into())),
    };
    let window = spec.window_ext();
    let eps = spec.snap_eps();

    let mut rng = stream_rng(seed, 0x505654);
    let mean = point_intensity * window.area();
    let mut n = Poisson::new(mean).expect("positive mean").sample(&mut rng) as usize;
    while n < 3 {
        n = Poisson::new(mean).expect("positive mean").sample(&mut rng) as usize;
    }
    let base_sites: Vec<Point2> = (0..n)
        .map(|_| {
            Point2::new(
                rng.gen_range(window.x0..window.x1),
                rng.gen_range(window.y0..window.y1),
            )
        })
        .collect();

    const MAX_RETRIES: u32 = 16;
    for attempt in 0..=MAX_RETRIES {
        // Near-cocircular sites produce a shorter-than-tolerance Voronoi
        // edge; jitter the sites and retry until generic position holds.
        let sites: Vec<Point2> = if attempt == 0 {
            base_sites.clone()
        } else {
            let jitter = 10.0 * eps;
            base_sites
                .iter()
                .map(|p| {
                    Point2::new(
                        p.x + rng.gen_range(-jitter..jitter),
                        p.y + rng.gen_range(-jitter..jitter),
                    )
                })
                .collect()
        };
        match voronoi_segments(&sites, &window, eps) {
            Ok(mut segments) => {
                segments.extend(window.boundary_segments());
                let tess = build_from_segments(&segments, window, spec.window_inner(), eps)?;
                return Ok(GenOutput { tess, cocircularity_retries: attempt });
            }
            Err(VoronoiFailure::Cocircular) => continue,
            Err(VoronoiFailure::Insertion(msg)) => return Err(GenError::SiteInsertion(msg)),
        }
    }
    Err(GenError::DegenerateCocircularity { retries: MAX_RETRIES })
}

enum VoronoiFailure {
    Cocircular,
    Insertion(String),
}

/// Dualize the Delaunay triangulation of `sites` into Voronoi segments
/// clipped to `window`. Fails with `Cocircular` when a Voronoi edge falls
/// below tolerance.
fn voronoi_segments(
    sites: &[Point2],
    window: &Rect,
    eps: f64,
) -> Result<Vec<Segment>, VoronoiFailure> {
    let mut dt: DelaunayTriangulation<Site> = DelaunayTriangulation::new();
    for p in sites {
        dt.insert(Site(SpadePoint::new(p.x, p.y)))
            .map_err(|e| VoronoiFailure::Insertion(format!("{e:?}")))?;
    }

    // Circumcenters cached per inner face so the three dual edges meeting at
    // a Voronoi vertex share the exact same coordinates.
    let mut circumcenters: Vec<Option<Point2>> = vec![None; dt.num_all_faces()];
    for face in dt.inner_faces() {
        let cc = face.circumcenter();
        circumcenters[face.index()] = Some(Point2::new(cc.x, cc.y));
    }

    let far = 4.0 * window.circumradius();
    let center = window.center();
    let mut segments = Vec::new();
    for edge in dt.undirected_edges() {
        let d = edge.as_directed();
        let f1 = d.face().as_inner().map(|f| f.index());
        let f2 = d.rev().face().as_inner().map(|f| f.index());
        let raw = match (f1, f2) {
            (Some(a), Some(b)) => {
                let ca = circumcenters[a].unwrap();
                let cb = circumcenters[b].unwrap();
                if ca.dist(cb) < 10.0 * eps {
                    return Err(VoronoiFailure::Cocircular);
                }
                Segment::new(ca, cb)
            }
            (Some(inner), None) | (None, Some(inner)) => {
                let cc = circumcenters[inner].unwrap();
                let din = if d.face().as_inner().is_some() { d } else { d.rev() };
                let a = din.from().position();
                let b = din.to().position();
                let a = Point2::new(a.x, a.y);
                let b = Point2::new(b.x, b.y);
                let opp = din.opposite_vertex().expect("inner face has opposite vertex");
                let opp = Point2::new(opp.position().x, opp.position().y);
                let mid = a.midpoint(b);
                let e = b.sub(a);
                let mut perp = Point2::new(-e.y, e.x);
                if perp.dot(mid.sub(opp)) < 0.0 {
                    perp = perp.scale(-1.0);
                }
                let perp = perp.scale(1.0 / perp.norm());
                let reach = far + cc.dist(center);
                Segment::new(cc, cc.add(perp.scale(reach)))
            }
            (None, None) => continue,
        };
        if let Some(seg) = clip_segment_to_rect(&raw, window, eps) {
            segments.push(seg);
        }
    }
    Ok(segments)
}

pub fn gen_brick_wall(spec: &GeneratorSpec, seed: u64) -> Result<GenOutput, GenError> {
    spec.validate()?;
    let (width, height, offset, random_phase) = match spec.family {
        GeneratorFamily::BrickWall { width, height, offset, random_phase } => {
            (width, height, offset, random_phase)
        }
        _ => return Err(GenError::InvalidParameter("spec is not brick_wall".into())),
    };
    let length = spec.window_length;
    let near_integer = |x: f64| (x - x.round()).abs() < 1e-9;
    let cols = length / width;
    let rows = length / height;
    // Exact periodicity over the inner window: whole columns, whole rows, and
    // the row-offset cycle must close.
    if !near_integer(cols) || !near_integer(rows) || !near_integer(rows * offset) {
        return Err(GenError::IncommensurateWindow { length, width, height, offset });
    }

    let window = spec.window_ext();
    let eps = spec.snap_eps();

    // Stationary phase: uniform over the fundamental domain of the pattern's
    // translation lattice, spanned by (width, 0) and (offset*width, height).
    let (dx, dy) = if random_phase {
        let mut rng = stream_rng(seed, 0x42524b);
        let a = rng.gen_range(0.0..1.0);
        let b = rng.gen_range(0.0..1.0);
        ((a + b * offset) * width, b * height)
    } else {
        (0.0, 0.0)
    };

    let mut segments: Vec<Segment> = window.boundary_segments().to_vec();
    let k_lo = ((window.y0 - dy) / height).floor() as i64 - 1;
    let k_hi = ((window.y1 - dy) / height).ceil() as i64 + 1;
    let on_frame_y = |y: f64| (y - window.y0).abs() < eps || (y - window.y1).abs() < eps;
    let on_frame_x = |x: f64| (x - window.x0).abs() < eps || (x - window.x1).abs() < eps;

    for k in k_lo..=k_hi {
        // Row separator line.
        let y = k as f64 * height + dy;
        if y > window.y0 + eps && y < window.y1 - eps {
            segments.push(Segment::new(
                Point2::new(window.x0, y),
                Point2::new(window.x1, y),
            ));
        }
        // Vertical brick boundaries of the row [y, y + height).
        let y_top = (k + 1) as f64 * height + dy;
        let seg_lo = y.max(window.y0);
        let seg_hi = y_top.min(window.y1);
        if seg_hi - seg_lo < eps {
            continue;
        }
        let phase = (k as f64 * offset * width + dx).rem_euclid(width);
        let i_lo = ((window.x0 - phase) / width).floor() as i64;
        let i_hi = ((window.x1 - phase) / width).ceil() as i64;
        for i in i_lo..=i_hi {
            let x = i as f64 * width + phase;
            if x < window.x0 - eps || x > window.x1 + eps || on_frame_x(x) {
                continue;
            }
            segments.push(Segment::new(Point2::new(x, seg_lo), Point2::new(x, seg_hi)));
        }
        let _ = on_frame_y;
    }

    let tess = build_from_segments(&segments, window, spec.window_inner(), eps)?;
    Ok(GenOutput { tess, cocircularity_retries: 0 })
}
