//! Window estimators for planar parameters and mark means.
//!
//! Typical objects are sampled by the reference-point rule: a vertex counts
//! through its location, an edge through its midpoint, a cell through its
//! centroid, and a 0-face instance through its vertex. Reference points are
//! tested against the half-open inner window so periodic patterns are counted
//! exactly once per period.

use crate::planar::{PlanarError, PlanarTessellation};
use serde::{Deserialize, Serialize};

/// Estimated planar parameters of one realization.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlanarSummary {
    /// Vertex intensity per unit area.
    pub lambda_v: f64,
    pub lambda_e: f64,
    pub lambda_z: f64,
    /// Intensity of the 0-face multiset Z_0.
    pub lambda_z0: f64,
    /// Mean number of edges at the typical vertex.
    pub mu_ve: f64,
    /// Second moment of the vertex edge count.
    pub mu2_ve: f64,
    /// Proportion of pi-vertices.
    pub phi: f64,
    /// Mean number of edges at the typical pi-vertex (0 when phi = 0).
    pub mu_vpi_e: f64,
    /// Mean number of pi-vertex endpoints of the typical edge.
    pub mu_e_vpi: f64,
    /// Mean edge length.
    pub ell_e: f64,
    /// Mean cell area.
    pub a_z: f64,
}

impl PlanarSummary {
    pub fn slots(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("lambda'_V", self.lambda_v),
            ("lambda'_E", self.lambda_e),
            ("lambda'_Z", self.lambda_z),
            ("lambda'_Z0", self.lambda_z0),
            ("mu'_VE", self.mu_ve),
            ("mu'2_VE", self.mu2_ve),
            ("phi", self.phi),
            ("mu'_V[pi]E", self.mu_vpi_e),
            ("mu'_EV[pi]", self.mu_e_vpi),
            ("ell'_E", self.ell_e),
            ("a'_Z", self.a_z),
        ]
    }

    /// Field-wise average over replications.
    pub fn average(xs: &[PlanarSummary]) -> PlanarSummary {
        let n = xs.len() as f64;
        let mean = |f: fn(&PlanarSummary) -> f64| xs.iter().map(f).sum::<f64>() / n;
        PlanarSummary {
            lambda_v: mean(|s| s.lambda_v),
            lambda_e: mean(|s| s.lambda_e),
            lambda_z: mean(|s| s.lambda_z),
            lambda_z0: mean(|s| s.lambda_z0),
            mu_ve: mean(|s| s.mu_ve),
            mu2_ve: mean(|s| s.mu2_ve),
            phi: mean(|s| s.phi),
            mu_vpi_e: mean(|s| s.mu_vpi_e),
            mu_e_vpi: mean(|s| s.mu_e_vpi),
            ell_e: mean(|s| s.ell_e),
            a_z: mean(|s| s.a_z),
        }
    }
}

/// Estimated means of the alpha/beta/gamma marks of one realization.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MarkSummary {
    pub rho_z: f64,
    pub alpha_v: f64,
    pub alpha_e: f64,
    /// 0 when the realization has no pi-vertices.
    pub alpha_vpi: f64,
    pub beta_z0: f64,
    pub beta_vpi: f64,
    pub gamma_v: f64,
    pub gamma_e: f64,
    pub gamma_z: f64,
}

impl MarkSummary {
    pub fn slots(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("rho_Z", self.rho_z),
            ("alpha_V", self.alpha_v),
            ("alpha_E", self.alpha_e),
            ("alpha_V[pi]", self.alpha_vpi),
            ("beta_Z0", self.beta_z0),
            ("beta_V[pi]", self.beta_vpi),
            ("gamma_V", self.gamma_v),
            ("gamma_E", self.gamma_e),
            ("gamma_Z", self.gamma_z),
        ]
    }

    pub fn average(xs: &[MarkSummary]) -> MarkSummary {
        let n = xs.len() as f64;
        let mean = |f: fn(&MarkSummary) -> f64| xs.iter().map(f).sum::<f64>() / n;
        MarkSummary {
            rho_z: mean(|s| s.rho_z),
            alpha_v: mean(|s| s.alpha_v),
            alpha_e: mean(|s| s.alpha_e),
            alpha_vpi: mean(|s| s.alpha_vpi),
            beta_z0: mean(|s| s.beta_z0),
            beta_vpi: mean(|s| s.beta_vpi),
            gamma_v: mean(|s| s.gamma_v),
            gamma_e: mean(|s| s.gamma_e),
            gamma_z: mean(|s| s.gamma_z),
        }
    }

    /// The mark means implied by rho = 1 and the planar summary; used to
    /// cross-check the height-1 reductions.
    pub fn unit_marks(ps: &PlanarSummary) -> MarkSummary {
        MarkSummary {
            rho_z: 1.0,
            alpha_v: ps.mu_ve,
            alpha_e: 2.0,
            alpha_vpi: ps.mu_vpi_e,
            beta_z0: 1.0,
            beta_vpi: 1.0,
            gamma_v: ps.mu2_ve,
            gamma_e: 2.0 * ps.ell_e,
            gamma_z: ps.a_z,
        }
    }
}

/// Relative residuals of the second-order mean-value identities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub alpha_v: f64,
    pub alpha_e: f64,
    pub beta_z0: f64,
    pub beta_vpi: f64,
    pub gamma_e: f64,
    pub gamma_v: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.alpha_v,
            self.alpha_e,
            self.beta_z0,
            self.beta_vpi,
            self.gamma_e,
            self.gamma_v,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn slots(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("res alpha_V", self.alpha_v),
            ("res alpha_E", self.alpha_e),
            ("res beta_Z0", self.beta_z0),
            ("res beta_V[pi]", self.beta_vpi),
            ("res gamma_E", self.gamma_e),
            ("res gamma_V", self.gamma_v),
        ]
    }
}

/// Objects of one realization whose reference point falls in the inner
/// window, gathered once and reused by the estimators.
pub struct TypicalObjects {
    pub vertices: Vec<crate::planar::VertexId>,
    pub edges: Vec<crate::planar::EdgeId>,
    pub cells: Vec<crate::planar::CellId>,
    pub zero_faces: Vec<crate::planar::ZeroFaceInstance>,
    pub pi_vertices: Vec<crate::planar::VertexId>,
    pub window_area: f64,
}

pub fn typical_objects(t: &PlanarTessellation) -> Result<TypicalObjects, PlanarError> {
    let w = t.window_inner;
    let vertices: Vec<_> = t
        .vertex_ids()
        .filter(|v| w.contains_half_open(t.vertex(*v).pos))
        .collect();
    let edges: Vec<_> = t
        .edge_ids()
        .filter(|e| w.contains_half_open(t.edge_segment(*e).midpoint()))
        .collect();
    let cells: Vec<_> = t
        .cell_ids()
        .filter(|z| !t.cell(*z).synthetic && w.contains_half_open(t.cell(*z).centroid))
        .collect();
    if vertices.is_empty() || edges.is_empty() || cells.is_empty() {
        return Err(PlanarError::EmptyWindow);
    }
    debug_assert!(vertices.iter().all(|v| !t.vertex(*v).on_window_boundary));
    let zero_faces: Vec<_> = t
        .zero_face_instances()
        .into_iter()
        .filter(|i| w.contains_half_open(t.vertex(i.vertex).pos))
        .collect();
    let pi_vertices: Vec<_> = vertices
        .iter()
        .copied()
        .filter(|v| t.vertex(*v).kind == crate::planar::VertexKind::Pi)
        .collect();
    Ok(TypicalObjects {
        vertices,
        edges,
        cells,
        zero_faces,
        pi_vertices,
        window_area: w.area(),
    })
}

fn mean<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for x in it {
        sum += x;
        n += 1;
    }
    if n == 0 { 0.0 } else { sum / n as f64 }
}

pub fn estimate_planar(t: &PlanarTessellation) -> Result<PlanarSummary, PlanarError> {
    let obj = typical_objects(t)?;
    estimate_planar_with(t, &obj)
}

pub fn estimate_planar_with(
    t: &PlanarTessellation,
    obj: &TypicalObjects,
) -> Result<PlanarSummary, PlanarError> {
    let area = obj.window_area;
    let degree = |v: &crate::planar::VertexId| t.vertex(*v).degree() as f64;
    Ok(PlanarSummary {
        lambda_v: obj.vertices.len() as f64 / area,
        lambda_e: obj.edges.len() as f64 / area,
        lambda_z: obj.cells.len() as f64 / area,
        lambda_z0: obj.zero_faces.len() as f64 / area,
        mu_ve: mean(obj.vertices.iter().map(degree)),
        mu2_ve: mean(obj.vertices.iter().map(|v| degree(v).powi(2))),
        phi: obj.pi_vertices.len() as f64 / obj.vertices.len() as f64,
        mu_vpi_e: mean(obj.pi_vertices.iter().map(degree)),
        mu_e_vpi: mean(obj.edges.iter().map(|e| {
            t.edge(*e)
                .endpoints
                .iter()
                .filter(|v| t.vertex(**v).kind == crate::planar::VertexKind::Pi)
                .count() as f64
        })),
        ell_e: mean(obj.edges.iter().map(|e| t.edge(*e).length)),
        a_z: mean(obj.cells.iter().map(|z| t.cell(*z).area)),
    })
}

pub fn estimate_marks(
    t: &PlanarTessellation,
    rho: &[f64],
) -> Result<MarkSummary, PlanarError> {
    t.check_marks(rho)?;
    let obj = typical_objects(t)?;
    estimate_marks_with(t, rho, &obj)
}

pub fn estimate_marks_with(
    t: &PlanarTessellation,
    rho: &[f64],
    obj: &TypicalObjects,
) -> Result<MarkSummary, PlanarError> {
    t.check_marks(rho)?;
    Ok(MarkSummary {
        rho_z: mean(obj.cells.iter().map(|z| rho[z.index()])),
        alpha_v: mean(obj.vertices.iter().map(|v| t.mark_alpha_vertex(rho, *v))),
        alpha_e: mean(obj.edges.iter().map(|e| t.mark_alpha_edge(rho, *e))),
        alpha_vpi: mean(obj.pi_vertices.iter().map(|v| t.mark_alpha_vertex(rho, *v))),
        beta_z0: mean(obj.zero_faces.iter().map(|i| t.mark_beta_zero_face(rho, i))),
        beta_vpi: mean(
            obj.pi_vertices
                .iter()
                .filter_map(|v| t.mark_beta_pi_vertex(rho, *v)),
        ),
        gamma_v: mean(obj.vertices.iter().map(|v| t.mark_gamma_vertex(rho, *v))),
        gamma_e: mean(obj.edges.iter().map(|e| t.mark_gamma_edge(rho, *e))),
        gamma_z: mean(obj.cells.iter().map(|z| t.mark_gamma_cell(rho, *z))),
    })
}

/// Check the second-order mean-value identities from window estimates.
/// Each residual is |lhs - rhs| relative to the larger magnitude.
pub fn check_second_order_identities(
    t: &PlanarTessellation,
    rho: &[f64],
) -> Result<IdentityResiduals, PlanarError> {
    t.check_marks(rho)?;
    let obj = typical_objects(t)?;
    let ps = estimate_planar_with(t, &obj)?;
    let ms = estimate_marks_with(t, rho, &obj)?;

    let e_z = |f: &mut dyn FnMut(crate::planar::CellId) -> f64| -> f64 {
        mean(obj.cells.iter().map(|z| f(*z)))
    };
    let rel = |lhs: f64, rhs: f64| -> f64 {
        let denom = lhs.abs().max(rhs.abs());
        if denom < 1e-300 { 0.0 } else { (lhs - rhs).abs() / denom }
    };

    let m_v = &mut |z| t.cell(z).vertex_count() as f64 * rho[crate::planar::CellId::index(z)];
    let alpha_v = rel(ps.lambda_v * ms.alpha_v, ps.lambda_z * e_z(m_v));
    // m'_E(z) = m'_V(z): the boundary cycle alternates vertices and edges.
    let m_e = &mut |z| t.cell(z).boundary_edges.len() as f64 * rho[crate::planar::CellId::index(z)];
    let alpha_e = rel(ps.lambda_e * ms.alpha_e, ps.lambda_z * e_z(m_e));
    let n0 = &mut |z| t.cell(z).corner_count() as f64 * rho[crate::planar::CellId::index(z)];
    let beta_z0 = rel(ps.lambda_z0 * ms.beta_z0, ps.lambda_z * e_z(n0));
    let lambda_vpi = ps.lambda_v * ps.phi;
    let beta_vpi = rel(
        lambda_vpi * ms.beta_vpi,
        ps.lambda_v * ms.alpha_v - ps.lambda_z0 * ms.beta_z0,
    );
    let perim = &mut |z| t.cell(z).perimeter * rho[crate::planar::CellId::index(z)];
    let gamma_e = rel(ps.lambda_e * ms.gamma_e, ps.lambda_z * e_z(perim));
    let k_e = &mut |z| t.edges_intersecting_cell(z) as f64 * rho[crate::planar::CellId::index(z)];
    let gamma_v = rel(
        ps.lambda_v * ms.gamma_v,
        ps.lambda_z * e_z(k_e) + ps.lambda_v * ms.alpha_v,
    );

    Ok(IdentityResiduals { alpha_v, alpha_e, beta_z0, beta_vpi, gamma_e, gamma_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorFamily, GeneratorSpec};

    fn brick(length: f64, margin: f64, seed: u64) -> PlanarTessellation {
        let spec = GeneratorSpec {
            family: GeneratorFamily::BrickWall {
                width: 1.0,
                height: 1.0,
                offset: 0.5,
                random_phase: false,
            },
            window_length: length,
            margin,
        };
        generate(&spec, seed).unwrap().tess
    }

    fn voronoi(length: f64, margin: f64, seed: u64) -> PlanarTessellation {
        let spec = GeneratorSpec {
            family: GeneratorFamily::PoissonVoronoi { point_intensity: 1.0 },
            window_length: length,
            margin,
        };
        generate(&spec, seed).unwrap().tess
    }

    fn line(length: f64, margin: f64, seed: u64) -> PlanarTessellation {
        let spec = GeneratorSpec {
            family: GeneratorFamily::PoissonLine { length_intensity: 2.0 },
            window_length: length,
            margin,
        };
        generate(&spec, seed).unwrap().tess
    }

    #[test]
    fn brick_wall_summary_is_exact() {
        let t = brick(8.0, 2.0, 3);
        let s = estimate_planar(&t).unwrap();
        assert!((s.lambda_v - 2.0).abs() < 1e-12);
        assert!((s.lambda_e - 3.0).abs() < 1e-12);
        assert!((s.lambda_z - 1.0).abs() < 1e-12);
        assert!((s.lambda_z0 - 4.0).abs() < 1e-12);
        assert!((s.mu_ve - 3.0).abs() < 1e-12);
        assert!((s.mu2_ve - 9.0).abs() < 1e-12);
        assert!((s.phi - 1.0).abs() < 1e-12);
        assert!((s.mu_vpi_e - 3.0).abs() < 1e-12);
        assert!((s.mu_e_vpi - 2.0).abs() < 1e-12);
        assert!((s.ell_e - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.a_z - 1.0).abs() < 1e-12);
        // lambda'_Z0 = lambda'_V (mu'_VE - phi).
        assert!((s.lambda_z0 - s.lambda_v * (s.mu_ve - s.phi)).abs() < 1e-12);
        // mu'_EV[pi] attains its upper bound 2 - 6(1-phi)/mu'_VE at phi = 1.
        let upper = 2.0 - 6.0 * (1.0 - s.phi) / s.mu_ve;
        assert!((s.mu_e_vpi - upper).abs() < 1e-12);
    }

    #[test]
    fn degenerate_models_have_exact_summaries() {
        let t = voronoi(10.0, 2.5, 5);
        let s = estimate_planar(&t).unwrap();
        assert_eq!(s.mu_ve, 3.0);
        assert_eq!(s.mu2_ve, 9.0);
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.mu_e_vpi, 0.0);
        assert!(3.0 <= s.mu_ve && s.mu_ve <= 6.0 - 2.0 * s.phi);

        let t = line(8.0, 2.0, 5);
        let s = estimate_planar(&t).unwrap();
        assert_eq!(s.mu_ve, 4.0);
        assert_eq!(s.mu2_ve, 16.0);
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.mu_e_vpi, 0.0);
    }

    #[test]
    fn unit_marks_reduce_to_planar_parameters() {
        for t in [brick(4.0, 1.0, 1), voronoi(8.0, 2.0, 2), line(8.0, 2.0, 2)] {
            let rho = vec![1.0; t.cells.len()];
            let ps = estimate_planar(&t).unwrap();
            let ms = estimate_marks(&t, &rho).unwrap();
            assert!((ms.rho_z - 1.0).abs() < 1e-12);
            assert!((ms.alpha_v - ps.mu_ve).abs() < 1e-12);
            assert!((ms.alpha_e - 2.0).abs() < 1e-12);
            assert!((ms.beta_z0 - 1.0).abs() < 1e-12);
            assert!((ms.gamma_v - ps.mu2_ve).abs() < 1e-12);
            assert!((ms.gamma_e - 2.0 * ps.ell_e).abs() < 1e-12);
            assert!((ms.gamma_z - ps.a_z).abs() < 1e-12);
            if ps.phi > 0.0 {
                assert!((ms.alpha_vpi - ps.mu_vpi_e).abs() < 1e-12);
                assert!((ms.beta_vpi - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mark_means_scale_linearly() {
        let t = brick(4.0, 1.0, 1);
        let rho1 = vec![1.0; t.cells.len()];
        let c = 2.5;
        let rhoc = vec![c; t.cells.len()];
        let m1 = estimate_marks(&t, &rho1).unwrap();
        let mc = estimate_marks(&t, &rhoc).unwrap();
        for ((_, a), (_, b)) in m1.slots().into_iter().zip(mc.slots()) {
            assert!((b - c * a).abs() < 1e-12, "expected {} got {}", c * a, b);
        }
    }

    #[test]
    fn area_marks_on_brick_equal_unit_marks() {
        let t = brick(4.0, 1.0, 1);
        let rho: Vec<f64> = t.cells.iter().map(|z| z.area).collect();
        let ms = estimate_marks(&t, &rho).unwrap();
        assert!((ms.rho_z - 1.0).abs() < 1e-12);
        assert!((ms.alpha_e - 2.0).abs() < 1e-12);
        assert!((ms.gamma_z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn second_order_identities_exact_on_brick() {
        let t = brick(8.0, 2.0, 3);
        let rho = vec![1.0; t.cells.len()];
        let res = check_second_order_identities(&t, &rho).unwrap();
        assert!(res.max() < 1e-10, "residuals {:?}", res);

        // Scale invariance: residuals identical under rho = c.
        let rhoc = vec![3.25; t.cells.len()];
        let res_c = check_second_order_identities(&t, &rhoc).unwrap();
        assert!((res.max() - res_c.max()).abs() < 1e-10);
    }

    #[test]
    fn second_order_identities_hold_on_voronoi_window() {
        // L = 20 * gamma^(-1/2): estimator noise only at the window edge.
        let t = voronoi(20.0, 5.0, 9);
        let rho = vec![1.0; t.cells.len()];
        let res = check_second_order_identities(&t, &rho).unwrap();
        assert!(res.max() < 0.05, "residuals {:?}", res);
    }

    #[test]
    fn doubling_the_window_shrinks_standard_errors() {
        let sd = |vals: &[f64]| {
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64)
                .sqrt()
        };
        let lam = |length: f64, seed: u64| {
            estimate_planar(&voronoi(length, length / 4.0, seed))
                .unwrap()
                .lambda_v
        };
        let small: Vec<f64> = (0..12).map(|r| lam(8.0, 100 + r)).collect();
        let big: Vec<f64> = (0..12).map(|r| lam(16.0, 200 + r)).collect();
        let ratio = sd(&small) / sd(&big);
        assert!(
            ratio > 1.2 && ratio < 3.4,
            "expected roughly 2x drop, got {ratio}"
        );
    }

    #[test]
    fn empty_window_is_an_error() {
        use crate::geom::Rect;
        use crate::planar::build_from_segments;
        let w = Rect::square(0.0, 2.0);
        let segs = w.boundary_segments().to_vec();
        let t = build_from_segments(&segs, w, Rect::new(0.5, 0.5, 1.5, 1.5), 1e-9).unwrap();
        assert!(matches!(estimate_planar(&t), Err(PlanarError::EmptyWindow)));
    }
}
