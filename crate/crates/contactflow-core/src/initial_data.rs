//! Well-prepared initial phase fields from a sharp-interface snapshot, built
//! on a Lipschitz extension of the interface signed distance.

use crate::error::{CoreError, Result};
use crate::fmath;
use crate::geometry::{project_to_boundary, DomainBoundary, InterfaceCurve, Projection, SplinedCurve};
use crate::mesh::DiskMesh;
use crate::potentials::ProfileTable;
use crate::sharp_mcf::region_polygon;
use crate::vec2::Vec2;
use alloc::vec::Vec;

/// Signed distance to the interface, extended past each contact point by a
/// straight tangent segment of length `r_ext / 2`, and by the unsigned
/// distance with a region sign on the complementary components.
///
/// Positive in phase `A` (the side the interface normal points to).
pub struct ExtendedDistance {
    curve: SplinedCurve,
    tail: f64,
    domain: DomainBoundary,
    /// Closed polygon bounding phase `A` (curve plus boundary arc), used for
    /// ray-casting signs outside the extended tube.
    region: Vec<Vec2>,
}

impl ExtendedDistance {
    pub fn new(curve: &InterfaceCurve, domain: &DomainBoundary, r_ext: f64) -> Result<ExtendedDistance> {
        let spl = SplinedCurve::new(curve);
        // non-tangential contact: the end tangents must leave the boundary
        for e in [0, 1] {
            let s = if e == 0 { 0.0 } else { spl.total_arc() };
            let fr = spl.frame_at_arc(s);
            let (theta, _) = project_to_boundary(domain, fr.point)?;
            let nb = domain.frame(theta).normal;
            if fmath::abs(fr.tangent.dot(nb)) < 1e-6 {
                return Err(CoreError::DegenerateAngle {
                    dot: fr.tangent.dot(nb),
                });
            }
        }
        let region = region_polygon(curve, domain, 2048)?;
        Ok(ExtendedDistance {
            curve: spl,
            tail: 0.5 * r_ext,
            domain: *domain,
            region,
        })
    }

    /// Even-odd ray-casting containment test against the region polygon.
    ///
    /// Queries on or next to the domain boundary are nudged a hair inward
    /// first: the phase region always carries an interior collar along its
    /// boundary arc, while a point exactly on the sampled polygon would
    /// classify erratically.
    pub fn contains(&self, x: Vec2) -> bool {
        let x = match project_to_boundary(&self.domain, x) {
            Ok((theta, s_b)) if s_b < 1e-5 => {
                // past the sampled polygon's chord sag
                let f = self.domain.frame(theta);
                f.point + f.normal * 1e-5
            }
            _ => x,
        };
        let mut inside = false;
        let n = self.region.len();
        for i in 0..n {
            let a = self.region[i];
            let b = self.region[(i + 1) % n];
            if (a.y > x.y) != (b.y > x.y) {
                let t = (x.y - a.y) / (b.y - a.y);
                if x.x < a.x + t * (b.x - a.x) {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// The extension `s~(x)`: signed tube distance where the foot lies on the
    /// extended curve, otherwise `+-` unsigned distance with the region sign.
    pub fn eval(&self, x: Vec2) -> f64 {
        match self.curve.project(x) {
            Projection::Interior { dist, .. } => dist,
            Projection::Endpoint { which, .. } => {
                let l = self.curve.total_arc();
                let fr = if which == 0 {
                    self.curve.frame_at_arc(0.0)
                } else {
                    self.curve.frame_at_arc(l)
                };
                // outward direction along the tangent ray
                let out = if which == 0 { -fr.tangent } else { fr.tangent };
                let along = (x - fr.point).dot(out);
                if along <= self.tail {
                    // foot on the straight tail; frames frozen at the endpoint
                    (x - fr.point).dot(fr.normal)
                } else {
                    let end = fr.point + out * self.tail;
                    let d = self.unsigned_to_extended(x, end);
                    if self.contains(x) {
                        d
                    } else {
                        -d
                    }
                }
            }
        }
    }

    fn unsigned_to_extended(&self, x: Vec2, nearest_tail_end: Vec2) -> f64 {
        // distance to the extended set: curve, both tails
        let mut d = self.curve.distance_to_curve(x).min(x.dist(nearest_tail_end));
        for e in [0usize, 1] {
            let l = self.curve.total_arc();
            let fr = if e == 0 {
                self.curve.frame_at_arc(0.0)
            } else {
                self.curve.frame_at_arc(l)
            };
            let out = if e == 0 { -fr.tangent } else { fr.tangent };
            let along = ((x - fr.point).dot(out)).clamp(0.0, self.tail);
            d = d.min(x.dist(fr.point + out * along));
        }
        d
    }
}

/// Evaluator for the extension, choosing `r_ext` as half the given contact
/// localization radius.
pub fn extended_signed_distance(
    curve: &InterfaceCurve,
    domain: &DomainBoundary,
    r_ext: f64,
) -> Result<ExtendedDistance> {
    ExtendedDistance::new(curve, domain, r_ext)
}

/// Nodal initial phase field `u0(x) = theta0(s~(x) / eps)`.
pub fn well_prepared_field(
    mesh: &DiskMesh,
    ext: &ExtendedDistance,
    eps: f64,
    profile: &ProfileTable,
) -> Vec<f64> {
    mesh.nodes
        .iter()
        .map(|&p| profile.theta(ext.eval(p) / eps))
        .collect()
}

/// Preparedness data for one interface width.
#[derive(Debug, Clone, Copy)]
pub struct PreparednessPoint {
    pub eps: f64,
    pub n_rings: usize,
    pub rel_energy: f64,
    pub rel_energy_boundary: f64,
    pub bulk_error: f64,
}

/// Preparedness scaling report over a width sweep.
#[derive(Debug, Clone)]
pub struct PreparednessReport {
    pub points: Vec<PreparednessPoint>,
    /// Log-log slope of `E_relEn + E_bulk` against `eps`.
    pub slope_total: f64,
    /// Slope of the boundary excess alone (meaningful for general densities).
    pub slope_boundary: f64,
    /// Slope of the bulk error alone.
    pub slope_bulk: f64,
}

/// Measure how the initial relative energy and bulk error scale with the
/// interface width for profile-form initial data on a given snapshot.
///
/// Each width gets a mesh resolving it (`h_max <= eps / 4`, or the explicit
/// ring counts when provided).
pub fn verify_preparedness(
    curve: &InterfaceCurve,
    domain: &DomainBoundary,
    well: &crate::potentials::DoubleWell,
    profile: &ProfileTable,
    sigma: &crate::potentials::BoundaryDensity,
    alpha: f64,
    eps_list: &[f64],
    rings: Option<&[usize]>,
) -> Result<PreparednessReport> {
    if eps_list.len() < 3 {
        return Err(CoreError::Precondition("need at least three widths for a slope"));
    }
    let field = crate::calibration::CalibrationField::build_static(
        curve,
        domain,
        crate::calibration::CalibrationConfig::new(alpha),
    )?;
    let ext = ExtendedDistance::new(curve, domain, field.scales.r_bar)?;
    let mut points = Vec::new();
    for (idx, &eps) in eps_list.iter().enumerate() {
        let n_r = match rings {
            Some(r) => r[idx],
            None => crate::mesh::rings_resolving(domain, eps / 4.0)?,
        };
        let sys = crate::phase_field::FemSystem::new(crate::mesh::build_disk_mesh(domain, n_r)?);
        let u0 = well_prepared_field(&sys.mesh, &ext, eps, profile);
        let state = crate::phase_field::PhaseState { u: u0, time: curve.time, eps };
        let re = crate::functionals::relative_energy(&sys, well, profile, sigma, &state, &field)?;
        let be = crate::functionals::bulk_error(&sys, profile, &state, &field)?;
        points.push(PreparednessPoint {
            eps,
            n_rings: n_r,
            rel_energy: re.value,
            rel_energy_boundary: re.boundary,
            bulk_error: be.value,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.eps).collect();
    let totals: Vec<f64> = points.iter().map(|p| p.rel_energy + p.bulk_error).collect();
    let boundaries: Vec<f64> = points.iter().map(|p| p.rel_energy_boundary.max(1e-300)).collect();
    let bulks: Vec<f64> = points.iter().map(|p| p.bulk_error).collect();
    let (slope_total, _) = crate::functionals::fit_loglog(&xs, &totals);
    let (slope_boundary, _) = crate::functionals::fit_loglog(&xs, &boundaries);
    let (slope_bulk, _) = crate::functionals::fit_loglog(&xs, &bulks);
    Ok(PreparednessReport {
        points,
        slope_total,
        slope_boundary,
        slope_bulk,
    })
}
