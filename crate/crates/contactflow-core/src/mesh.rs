//! Deterministic ring-structured triangulation of the (possibly elliptic)
//! disk.
//!
//! Ring `k` of `n_r` carries `6k` nodes placed on the scaled image of the
//! boundary parametrization, so the outermost ring lies exactly on the
//! domain boundary. Annuli are triangulated by an angular two-pointer merge.

use crate::error::{CoreError, Result};
use crate::fmath;
use crate::geometry::DomainBoundary;
use crate::vec2::Vec2;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct DiskMesh {
    pub nodes: Vec<Vec2>,
    pub triangles: Vec<[u32; 3]>,
    /// Ordered boundary edge loop over the outermost ring.
    pub boundary_edges: Vec<[u32; 2]>,
    pub n_rings: usize,
    pub h_max: f64,
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
}

fn ring_offset(k: usize) -> usize {
    // center node 0, ring k starts after 1 + sum_{j<k} 6j nodes
    1 + 3 * k * (k - 1)
}

/// Build the ring triangulation with `n_r >= 4` rings.
pub fn build_disk_mesh(domain: &DomainBoundary, n_r: usize) -> Result<DiskMesh> {
    if n_r < 4 {
        return Err(CoreError::Precondition("n_r must be at least 4"));
    }
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut nodes = Vec::with_capacity(ring_offset(n_r) + 6 * n_r);
    nodes.push(Vec2::ZERO);
    for k in 1..=n_r {
        let scale = k as f64 / n_r as f64;
        let m = 6 * k;
        for j in 0..m {
            let theta = two_pi * j as f64 / m as f64;
            nodes.push(domain.position(theta) * scale);
        }
    }
    let mut triangles: Vec<[u32; 3]> = Vec::with_capacity(6 * n_r * n_r);
    // center fan
    let o1 = ring_offset(1);
    for j in 0..6usize {
        triangles.push([0, (o1 + j) as u32, (o1 + (j + 1) % 6) as u32]);
    }
    // annuli
    for k in 2..=n_r {
        let m_in = 6 * (k - 1);
        let m_out = 6 * k;
        let off_in = ring_offset(k - 1);
        let off_out = ring_offset(k);
        let (mut i, mut j) = (0usize, 0usize);
        while i < m_in || j < m_out {
            let a_next = (i + 1) as f64 / m_in as f64;
            let b_next = (j + 1) as f64 / m_out as f64;
            let take_inner = if i >= m_in {
                false
            } else if j >= m_out {
                true
            } else {
                a_next <= b_next
            };
            if take_inner {
                triangles.push([
                    (off_in + i % m_in) as u32,
                    (off_out + j % m_out) as u32,
                    (off_in + (i + 1) % m_in) as u32,
                ]);
                i += 1;
            } else {
                triangles.push([
                    (off_in + i % m_in) as u32,
                    (off_out + j % m_out) as u32,
                    (off_out + (j + 1) % m_out) as u32,
                ]);
                j += 1;
            }
        }
    }
    // orientation, size and quality
    let mut h_max: f64 = 0.0;
    let mut min_angle = f64::INFINITY;
    let mut max_angle: f64 = 0.0;
    for (ti, t) in triangles.iter().enumerate() {
        let (a, b, c) = (
            nodes[t[0] as usize],
            nodes[t[1] as usize],
            nodes[t[2] as usize],
        );
        let area2 = (b - a).cross(c - a);
        if area2 <= 2e-14 {
            return Err(CoreError::Mesh {
                triangle: ti,
                area: 0.5 * area2,
            });
        }
        for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
            let u = q - p;
            let v = r - p;
            h_max = h_max.max(u.norm());
            let ang = fmath::acos((u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0));
            min_angle = min_angle.min(ang);
            max_angle = max_angle.max(ang);
        }
    }
    let off_b = ring_offset(n_r);
    let m_b = 6 * n_r;
    let boundary_edges: Vec<[u32; 2]> = (0..m_b)
        .map(|j| [(off_b + j) as u32, (off_b + (j + 1) % m_b) as u32])
        .collect();
    Ok(DiskMesh {
        nodes,
        triangles,
        boundary_edges,
        n_rings: n_r,
        h_max,
        min_angle_deg: min_angle.to_degrees(),
        max_angle_deg: max_angle.to_degrees(),
    })
}

impl DiskMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// First node index of the boundary ring.
    pub fn boundary_start(&self) -> usize {
        ring_offset(self.n_rings)
    }

    pub fn is_boundary_node(&self, idx: usize) -> bool {
        idx >= self.boundary_start()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        let (a, b, c) = (
            self.nodes[i as usize],
            self.nodes[j as usize],
            self.nodes[k as usize],
        );
        0.5 * (b - a).cross(c - a)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges
            .iter()
            .map(|e| self.nodes[e[0] as usize].dist(self.nodes[e[1] as usize]))
            .sum()
    }

    /// Undirected edge count (for Euler-characteristic checks).
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }
}

/// Smallest ring count (rounded up to a multiple of 8) that resolves a given
/// interface width, `h_max <= width_over`.
pub fn rings_resolving(domain: &DomainBoundary, width_over: f64) -> Result<usize> {
    let mut n_r = 8usize;
    loop {
        let m = build_disk_mesh(domain, n_r)?;
        if m.h_max <= width_over {
            return Ok(n_r);
        }
        n_r += 8;
        if n_r > 1024 {
            return Err(CoreError::Precondition("mesh resolution out of range"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn euler_characteristic_of_disk() {
        let m = build_disk_mesh(&DomainBoundary::unit_disk(), 4).unwrap();
        let v = m.n_nodes() as isize;
        let e = m.edge_count() as isize;
        let f = m.triangles.len() as isize;
        assert_eq!(v - e + f, 1);
        assert_eq!(m.boundary_edges.len(), 24);
        assert_eq!(m.triangles.len(), 6 * 16);
    }

    #[test]
    fn area_converges_to_pi() {
        // inscribed-polygon comparison: ring polygon area deficit is O(h^2)
        let m = build_disk_mesh(&DomainBoundary::unit_disk(), 64).unwrap();
        assert!((m.total_area() - core::f64::consts::PI).abs() < 2e-3);
    }

    #[test]
    fn boundary_loop_closed_and_on_circle() {
        let m = build_disk_mesh(&DomainBoundary::unit_disk(), 8).unwrap();
        for e in &m.boundary_edges {
            assert!((m.nodes[e[0] as usize].norm() - 1.0).abs() < 1e-12);
        }
        // edges chain into a single loop
        let mut next = alloc::vec![u32::MAX; m.n_nodes()];
        for e in &m.boundary_edges {
            next[e[0] as usize] = e[1];
        }
        let start = m.boundary_edges[0][0];
        let mut cur = start;
        for _ in 0..m.boundary_edges.len() {
            cur = next[cur as usize];
            assert_ne!(cur, u32::MAX);
        }
        assert_eq!(cur, start);
    }

    #[test]
    fn angles_within_quality_bounds() {
        for n_r in [4, 16, 64] {
            let m = build_disk_mesh(&DomainBoundary::unit_disk(), n_r).unwrap();
            assert!(
                m.min_angle_deg >= 20.0 && m.max_angle_deg <= 130.0,
                "angles [{}, {}] out of bounds at n_r = {n_r}",
                m.min_angle_deg,
                m.max_angle_deg
            );
        }
    }

    #[test]
    fn elliptic_rings_follow_boundary() {
        let el = DomainBoundary::Ellipse { a: 1.2, b: 1.0 };
        let m = build_disk_mesh(&el, 8).unwrap();
        for e in &m.boundary_edges {
            let p = m.nodes[e[0] as usize];
            let r = (p.x / 1.2) * (p.x / 1.2) + p.y * p.y;
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
        }
    }
}
