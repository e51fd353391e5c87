//! P1 finite-element Allen-Cahn solver on a triangulated disk with a
//! nonlinear Robin boundary condition, time-stepped by minimizing movements.
//!
//! Each step minimizes `E_eps(u) + (1/(2 tau_s)) ||u - u_prev||_M^2` with a
//! projected damped Newton method. `tau_s` is the proximal (scheme) time
//! step; a step of `tau` in PDE time corresponds to `tau_s = tau / eps`
//! because the equation is the `1/eps`-accelerated gradient flow of the
//! energy. The nonlinear terms use nodal (vertex-rule) quadrature so the
//! lumped-mass gradient is the exact differential of the discrete energy and
//! truncation to `[-1, 1]` cannot increase the nodal energy terms.

use crate::error::{CoreError, Result};
use crate::fmath;
use crate::mesh::DiskMesh;
use crate::potentials::{BoundaryDensity, DoubleWell};
use crate::sparse::{dot, pcg_shifted, CooBuilder, CsrMatrix};
use alloc::vec::Vec;

/// Assembled P1 operators.
pub struct FemOperators {
    /// Consistent mass matrix.
    pub mass: CsrMatrix,
    /// Lumped mass (row sums of the consistent mass).
    pub mass_lumped: Vec<f64>,
    /// Stiffness matrix (positive semidefinite, constants in the kernel).
    pub stiffness: CsrMatrix,
    /// Consistent boundary mass over the boundary edge loop.
    pub boundary_mass: CsrMatrix,
    /// Lumped boundary mass (zero at interior nodes).
    pub boundary_mass_lumped: Vec<f64>,
}

/// Mesh plus operators; immutable once assembled.
pub struct FemSystem {
    pub mesh: DiskMesh,
    pub ops: FemOperators,
}

impl FemSystem {
    pub fn new(mesh: DiskMesh) -> FemSystem {
        let ops = assemble(&mesh);
        FemSystem { mesh, ops }
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }
}

/// Standard P1 assembly: mass (consistent and lumped), stiffness and
/// boundary edge mass.
pub fn assemble(mesh: &DiskMesh) -> FemOperators {
    let n = mesh.n_nodes();
    let mut m_coo = CooBuilder::new(n);
    let mut k_coo = CooBuilder::new(n);
    let mut m_lumped = alloc::vec![0.0; n];
    for t in &mesh.triangles {
        let (i, j, k) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (a, b, c) = (mesh.nodes[i], mesh.nodes[j], mesh.nodes[k]);
        let area = 0.5 * (b - a).cross(c - a);
        // gradients of the barycentric basis
        let g = [
            (c - b).rot_ccw() / (2.0 * area),
            (a - c).rot_ccw() / (2.0 * area),
            (b - a).rot_ccw() / (2.0 * area),
        ];
        let idx = [i, j, k];
        for p in 0..3 {
            m_lumped[idx[p]] += area / 3.0;
            for q in 0..3 {
                k_coo.add(idx[p], idx[q], area * g[p].dot(g[q]));
                let mval = if p == q { area / 6.0 } else { area / 12.0 };
                m_coo.add(idx[p], idx[q], mval);
            }
        }
    }
    let mut mb_coo = CooBuilder::new(n);
    let mut mb_lumped = alloc::vec![0.0; n];
    for e in &mesh.boundary_edges {
        let (i, j) = (e[0] as usize, e[1] as usize);
        let len = mesh.nodes[i].dist(mesh.nodes[j]);
        mb_coo.add(i, i, len / 3.0);
        mb_coo.add(j, j, len / 3.0);
        mb_coo.add(i, j, len / 6.0);
        mb_coo.add(j, i, len / 6.0);
        mb_lumped[i] += len / 2.0;
        mb_lumped[j] += len / 2.0;
    }
    FemOperators {
        mass: m_coo.build(),
        mass_lumped: m_lumped,
        stiffness: k_coo.build(),
        boundary_mass: mb_coo.build(),
        boundary_mass_lumped: mb_lumped,
    }
}

/// Nodal phase-field values with snapshot time and interface width.
#[derive(Debug, Clone)]
pub struct PhaseState {
    pub u: Vec<f64>,
    /// PDE time in seconds.
    pub time: f64,
    pub eps: f64,
}

/// Total discrete energy
/// `eps/2 u^T K u + (1/eps) sum_i m_i W(u_i) + sum_i mb_i sigma(u_i)`.
pub fn discrete_energy(
    sys: &FemSystem,
    well: &DoubleWell,
    sigma: &BoundaryDensity,
    state: &PhaseState,
) -> f64 {
    dirichlet_energy(sys, state) + nodal_energy(sys, well, sigma, state)
}

fn dirichlet_energy(sys: &FemSystem, state: &PhaseState) -> f64 {
    let n = sys.n_nodes();
    let mut ku = alloc::vec![0.0; n];
    sys.ops.stiffness.matvec(&state.u, &mut ku);
    0.5 * state.eps * dot(&state.u, &ku)
}

fn nodal_energy(sys: &FemSystem, well: &DoubleWell, sigma: &BoundaryDensity, state: &PhaseState) -> f64 {
    let mut acc = 0.0;
    for i in 0..sys.n_nodes() {
        acc += sys.ops.mass_lumped[i] / state.eps * well.eval(state.u[i]);
        let mb = sys.ops.boundary_mass_lumped[i];
        if mb > 0.0 {
            acc += mb * sigma.eval(state.u[i]);
        }
    }
    acc
}

/// Exact gradient of [`discrete_energy`]:
/// `eps K u + (1/eps) m .* W'(u) + mb .* sigma'(u)`.
pub fn energy_gradient(
    sys: &FemSystem,
    well: &DoubleWell,
    sigma: &BoundaryDensity,
    state: &PhaseState,
    out: &mut [f64],
) {
    sys.ops.stiffness.matvec(&state.u, out);
    for i in 0..sys.n_nodes() {
        out[i] *= state.eps;
        out[i] += sys.ops.mass_lumped[i] / state.eps * well.deriv(state.u[i]);
        let mb = sys.ops.boundary_mass_lumped[i];
        if mb > 0.0 {
            out[i] += mb * sigma.deriv(state.u[i]);
        }
    }
}

/// Fixed part `M / tau_s + eps K` of the Newton matrix for one run.
pub struct StepMatrix {
    a: CsrMatrix,
    pub tau_scheme: f64,
    eps: f64,
}

impl StepMatrix {
    pub fn new(sys: &FemSystem, eps: f64, tau_scheme: f64) -> StepMatrix {
        let n = sys.n_nodes();
        let mut coo = CooBuilder::new(n);
        let m = &sys.ops.mass;
        for i in 0..n {
            for k in m.row_ptr[i]..m.row_ptr[i + 1] {
                coo.add(i, m.col_idx[k] as usize, m.values[k] / tau_scheme);
            }
        }
        let s = &sys.ops.stiffness;
        for i in 0..n {
            for k in s.row_ptr[i]..s.row_ptr[i + 1] {
                coo.add(i, s.col_idx[k] as usize, s.values[k] * eps);
            }
        }
        StepMatrix {
            a: coo.build(),
            tau_scheme,
            eps,
        }
    }
}

/// Diagnostics of one minimizing-movement step.
#[derive(Debug, Clone, Default)]
pub struct StepReport {
    pub newton_iterations: usize,
    pub cg_iterations: usize,
    pub final_grad_norm: f64,
    /// Gradient norms per Newton iteration (for convergence-rate checks).
    pub grad_norms: Vec<f64>,
    /// Proximal weight `1/(2 tau_s)` actually used in the step functional.
    pub half_inv_tau_scheme: f64,
}

fn proximal_term(sys: &FemSystem, u: &[f64], u_prev: &[f64], tau_scheme: f64, scratch: &mut [f64]) -> f64 {
    let n = u.len();
    for i in 0..n {
        scratch[i] = u[i] - u_prev[i];
    }
    let mut mu = alloc::vec![0.0; n];
    sys.ops.mass.matvec(scratch, &mut mu);
    dot(scratch, &mu) / (2.0 * tau_scheme)
}

/// One minimizing-movement step: approximately minimize
/// `E_k(u) = E_eps(u) + 1/(2 tau_s) ||u - u_prev||_M^2` over `[-1, 1]^N`.
///
/// Projected damped Newton: the first Hessian uses the convex part `W1''`
/// (the concave remainder enters only through the gradient), later
/// iterations the true second derivatives with an automatic fallback if CG
/// detects indefiniteness. Iterates are truncated to `[-1, 1]` inside the
/// line search, which only ever decreases the nodal energy terms. Terminates
/// when the lumped-`M^{-1}` norm of the projected gradient drops below
/// `tol`.
pub fn minimizing_movement_step(
    sys: &FemSystem,
    well: &DoubleWell,
    sigma: &BoundaryDensity,
    mat: &StepMatrix,
    state: &PhaseState,
    tol: f64,
) -> Result<(PhaseState, StepReport)> {
    let n = sys.n_nodes();
    let tau_s = mat.tau_scheme;
    let eps = mat.eps;
    if eps != state.eps {
        return Err(CoreError::Precondition("step matrix built for another eps"));
    }
    let u_prev = &state.u;
    let mut u: Vec<f64> = u_prev.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
    let mut scratch = alloc::vec![0.0; n];
    let mut report = StepReport {
        half_inv_tau_scheme: 0.5 / tau_s,
        ..Default::default()
    };
    let energy_k = |u_vec: &Vec<f64>, scratch: &mut Vec<f64>| -> f64 {
        let st = PhaseState {
            u: u_vec.clone(),
            time: state.time,
            eps,
        };
        discrete_energy(sys, well, sigma, &st) + proximal_term(sys, u_vec, u_prev, tau_s, scratch)
    };
    let mut e_cur = energy_k(&u, &mut scratch);
    let mut grad = alloc::vec![0.0; n];
    let mut shift = alloc::vec![0.0; n];
    let mut delta = alloc::vec![0.0; n];
    let mut mdu = alloc::vec![0.0; n];
    for newton_it in 0..100 {
        // gradient of E_k
        let st = PhaseState {
            u: u.clone(),
            time: state.time,
            eps,
        };
        energy_gradient(sys, well, sigma, &st, &mut grad);
        for i in 0..n {
            scratch[i] = u[i] - u_prev[i];
        }
        sys.ops.mass.matvec(&scratch, &mut mdu);
        for i in 0..n {
            grad[i] += mdu[i] / tau_s;
        }
        // projected gradient and its lumped-M^{-1} norm
        let mut norm_sq = 0.0;
        for i in 0..n {
            let g = if (u[i] <= -1.0 && grad[i] > 0.0) || (u[i] >= 1.0 && grad[i] < 0.0) {
                0.0
            } else {
                grad[i]
            };
            scratch[i] = g;
            norm_sq += g * g / sys.ops.mass_lumped[i];
        }
        let gnorm = fmath::sqrt(norm_sq);
        report.grad_norms.push(gnorm);
        report.final_grad_norm = gnorm;
        report.newton_iterations = newton_it;
        if gnorm <= tol {
            return Ok((
                PhaseState {
                    u,
                    time: state.time,
                    eps,
                },
                report,
            ));
        }
        // Newton system (A + diag(shift)) delta = -grad
        let convex_only = newton_it == 0;
        let fill_shift = |convex: bool, u: &[f64], shift: &mut [f64]| {
            for i in 0..n {
                let w2 = if convex {
                    well.w1_second_deriv(u[i])
                } else {
                    well.second_deriv(u[i])
                };
                let mut s = sys.ops.mass_lumped[i] / eps * w2;
                let mb = sys.ops.boundary_mass_lumped[i];
                if mb > 0.0 {
                    let sd = sigma.second_deriv_clamped(u[i]);
                    s += mb * if convex { sd.max(0.0) } else { sd };
                }
                shift[i] = s;
            }
        };
        fill_shift(convex_only, &u, &mut shift);
        for i in 0..n {
            delta[i] = 0.0;
        }
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut st_cg = pcg_shifted(&mat.a, &shift, &rhs, &mut delta, 1e-10, 4 * n);
        if st_cg.indefinite {
            // retreat to the convex-splitting Hessian
            fill_shift(true, &u, &mut shift);
            for i in 0..n {
                delta[i] = 0.0;
            }
            st_cg = pcg_shifted(&mat.a, &shift, &rhs, &mut delta, 1e-10, 4 * n);
        }
        report.cg_iterations += st_cg.iterations;
        // line search with truncation, enforcing E_k decrease
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let u_trial: Vec<f64> = (0..n).map(|i| (u[i] + alpha * delta[i]).clamp(-1.0, 1.0)).collect();
            let e_trial = energy_k(&u_trial, &mut scratch);
            if e_trial <= e_cur + 1e-14 * (1.0 + fmath::abs(e_cur)) && e_trial.is_finite() {
                u = u_trial;
                e_cur = e_trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(CoreError::Step {
                halvings: 40,
                energy: e_cur,
            });
        }
    }
    Err(CoreError::Step {
        halvings: 0,
        energy: e_cur,
    })
}

/// Row of the energy log: PDE time, total energy, dissipation increment
/// `1/(2 tau_s) ||u^k - u^{k-1}||_M^2` of the step ending at this time.
#[derive(Debug, Clone, Copy)]
pub struct EnergyLogRow {
    pub time: f64,
    pub energy: f64,
    pub dissipation_increment: f64,
}

/// Result of a full run: final state, per-step energy log, snapshots taken
/// at the first step time reaching each requested time.
pub struct Trajectory {
    pub final_state: PhaseState,
    pub log: Vec<EnergyLogRow>,
    pub snapshots: Vec<PhaseState>,
}

/// Repeated minimizing movements from `u0` to PDE time `t_end` with PDE-time
/// step `tau` (proximal weight `eps / (2 tau)`).
///
/// Emits a warning flag when the mesh does not resolve the interface width
/// (`h_max > eps / 4`).
pub fn run_allen_cahn(
    sys: &FemSystem,
    well: &DoubleWell,
    sigma: &BoundaryDensity,
    u0: Vec<f64>,
    eps: f64,
    tau: f64,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<(Trajectory, bool)> {
    if u0.iter().any(|v| !(-1.0..=1.0).contains(v)) {
        return Err(CoreError::Precondition("initial data must lie in [-1, 1]"));
    }
    let under_resolved = sys.mesh.h_max > eps / 4.0;
    let mut state = PhaseState {
        u: u0,
        time: 0.0,
        eps,
    };
    let tau_s = tau / eps;
    let mat = StepMatrix::new(sys, eps, tau_s);
    let e0 = discrete_energy(sys, well, sigma, &state);
    let mut log = Vec::new();
    log.push(EnergyLogRow {
        time: 0.0,
        energy: e0,
        dissipation_increment: 0.0,
    });
    let mut snapshots: Vec<PhaseState> = Vec::new();
    let mut next_snap = 0usize;
    while next_snap < snapshot_times.len() && snapshot_times[next_snap] <= 0.0 {
        snapshots.push(state.clone());
        next_snap += 1;
    }
    let tol_base = 1e-9;
    let n = sys.n_nodes();
    let mut scratch = alloc::vec![0.0; n];
    while state.time < t_end - 1e-14 {
        let dt = tau.min(t_end - state.time);
        let partial;
        let mat_ref = if (dt - tau).abs() < 1e-15 * tau {
            &mat
        } else {
            // last partial step gets its own matrix
            partial = StepMatrix::new(sys, eps, dt / eps);
            &partial
        };
        let e_before = discrete_energy(sys, well, sigma, &state);
        let tol = tol_base * (1.0 + fmath::abs(e_before));
        let (mut next, _report) = minimizing_movement_step(sys, well, sigma, mat_ref, &state, tol)?;
        next.time = state.time + dt;
        let diss = proximal_term(sys, &next.u, &state.u, mat_ref.tau_scheme, &mut scratch);
        let e_after = discrete_energy(sys, well, sigma, &next);
        log.push(EnergyLogRow {
            time: next.time,
            energy: e_after,
            dissipation_increment: diss,
        });
        state = next;
        while next_snap < snapshot_times.len() && snapshot_times[next_snap] <= state.time + 1e-12 {
            snapshots.push(state.clone());
            next_snap += 1;
        }
    }
    Ok((
        Trajectory {
            final_state: state,
            log,
            snapshots,
        },
        under_resolved,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainBoundary;
    use crate::mesh::build_disk_mesh;
    use crate::potentials::{build_profile, make_quartic_well, make_special_sigma};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn system(n_r: usize) -> FemSystem {
        FemSystem::new(build_disk_mesh(&DomainBoundary::unit_disk(), n_r).unwrap())
    }

    #[test]
    fn operator_identities() {
        let sys = system(16);
        let n = sys.n_nodes();
        let ones = alloc::vec![1.0; n];
        let mut y = alloc::vec![0.0; n];
        sys.ops.stiffness.matvec(&ones, &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12), "K 1 = 0");
        sys.ops.mass.matvec(&ones, &mut y);
        assert_abs_diff_eq!(dot(&ones, &y), sys.mesh.total_area(), epsilon = 1e-12);
        let lumped_total: f64 = sys.ops.mass_lumped.iter().sum();
        assert_abs_diff_eq!(lumped_total, sys.mesh.total_area(), epsilon = 1e-12);
        sys.ops.boundary_mass.matvec(&ones, &mut y);
        let perim = dot(&ones, &y);
        assert_abs_diff_eq!(perim, sys.mesh.boundary_length(), epsilon = 1e-12);
        // inscribed polygon perimeter approaches 2 pi at O(h^2)
        let sys_fine = system(64);
        assert!((sys_fine.mesh.boundary_length() - 2.0 * PI).abs() < 3e-3);
    }

    #[test]
    fn energy_of_constant_states() {
        let sys = system(24);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_3, &well).unwrap();
        let n = sys.n_nodes();
        let minus = PhaseState {
            u: alloc::vec![-1.0; n],
            time: 0.0,
            eps: 0.1,
        };
        assert_abs_diff_eq!(discrete_energy(&sys, &well, &sigma, &minus), 0.0, epsilon = 1e-14);
        let plus = PhaseState {
            u: alloc::vec![1.0; n],
            time: 0.0,
            eps: 0.1,
        };
        // only the boundary term: sigma(1) * discrete perimeter
        let expected = sigma.eval(1.0) * sys.mesh.boundary_length();
        assert_abs_diff_eq!(discrete_energy(&sys, &well, &sigma, &plus), expected, epsilon = 1e-12);
    }

    #[test]
    fn profile_energy_approaches_line_tension() {
        // u = theta0(y / eps) across the disk, alpha = pi/2: energy tends to
        // c0 * (chord length) = (4/3) * 2
        let sys = system(128);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_2, &well).unwrap();
        let eps = 0.05;
        let u: Vec<f64> = sys.mesh.nodes.iter().map(|p| profile.theta(p.y / eps)).collect();
        let st = PhaseState { u, time: 0.0, eps };
        let e = discrete_energy(&sys, &well, &sigma, &st);
        let target = profile.c0() * 2.0;
        assert!((e - target).abs() < 0.05 * target, "E = {e}, target {target}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sys = system(12);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_3, &well).unwrap();
        let eps = 0.15;
        let n = sys.n_nodes();
        let mut rng = crate::rng::SplitMix64::new(11);
        let u: Vec<f64> = (0..n).map(|_| rng.uniform(-0.9, 0.9)).collect();
        let st = PhaseState { u, time: 0.0, eps };
        let mut g = alloc::vec![0.0; n];
        energy_gradient(&sys, &well, &sigma, &st, &mut g);
        for _ in 0..10 {
            let v: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let h = 1e-6;
            let eval = |s: f64| {
                let up: Vec<f64> = st.u.iter().zip(&v).map(|(ui, vi)| ui + s * vi).collect();
                discrete_energy(
                    &sys,
                    &well,
                    &sigma,
                    &PhaseState {
                        u: up,
                        time: 0.0,
                        eps,
                    },
                )
            };
            let fd = (eval(h) - eval(-h)) / (2.0 * h);
            let an = dot(&g, &v);
            assert!(
                (fd - an).abs() <= 1e-6 * (1.0 + an.abs()),
                "directional derivative mismatch: fd {fd}, analytic {an}"
            );
        }
    }

    #[test]
    fn pure_phase_is_a_fixed_point() {
        let sys = system(12);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_3, &well).unwrap();
        let eps = 0.1;
        let n = sys.n_nodes();
        let st = PhaseState {
            u: alloc::vec![-1.0; n],
            time: 0.0,
            eps,
        };
        let mat = StepMatrix::new(&sys, eps, 0.01);
        let (next, report) = minimizing_movement_step(&sys, &well, &sigma, &mat, &st, 1e-12).unwrap();
        assert_eq!(report.newton_iterations, 0);
        assert!(next.u.iter().all(|&v| v == -1.0));
    }

    #[test]
    fn steps_satisfy_proximal_inequality_and_bounds() {
        let sys = system(24);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_3, &well).unwrap();
        let eps = 0.12;
        // start from a rough two-phase split with a tilted line
        let u0: Vec<f64> = sys
            .mesh
            .nodes
            .iter()
            .map(|p| profile.theta((p.y - 0.3 * p.x) / eps))
            .collect();
        let tau = eps * sys.mesh.h_max;
        let (traj, warn) = run_allen_cahn(&sys, &well, &sigma, u0, eps, tau, 12.0 * tau, &[]).unwrap();
        assert!(warn, "coarse mesh should flag eps under-resolution");
        let tau_s = tau / eps;
        for w in traj.log.windows(2) {
            // E(u^k) + 1/(2 tau_s) ||du||_M^2 <= E(u^{k-1}), exactly as evaluated
            assert!(
                w[1].energy + w[1].dissipation_increment <= w[0].energy + 1e-11 * (1.0 + w[0].energy.abs()),
                "proximal inequality violated: {} + {} > {}",
                w[1].energy,
                w[1].dissipation_increment,
                w[0].energy
            );
            assert!(w[1].energy <= w[0].energy + 1e-11);
        }
        let _ = tau_s;
        assert!(traj.final_state.u.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn newton_converges_quadratically_on_smooth_state() {
        let sys = system(24);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_2, &well).unwrap();
        let eps = 0.15;
        let u0: Vec<f64> = sys.mesh.nodes.iter().map(|p| profile.theta(p.y / eps)).collect();
        let st = PhaseState {
            u: u0,
            time: 0.0,
            eps,
        };
        let mat = StepMatrix::new(&sys, eps, sys.mesh.h_max);
        let (_, report) = minimizing_movement_step(&sys, &well, &sigma, &mat, &st, 1e-13).unwrap();
        let g = &report.grad_norms;
        assert!(g.len() >= 3, "expected a few Newton iterations, got {g:?}");
        let last = g[g.len() - 1] / g[g.len() - 2];
        let prev = g[g.len() - 2] / g[g.len() - 3];
        assert!(
            last < 0.3 && prev < 0.3,
            "expected fast contraction, ratios {prev} {last} ({g:?})"
        );
    }

    #[test]
    fn stationary_profile_stays_put() {
        let sys = system(64);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_2, &well).unwrap();
        let eps = 0.05;
        let u0: Vec<f64> = sys.mesh.nodes.iter().map(|p| profile.theta(p.y / eps)).collect();
        let tau = eps * sys.mesh.h_max;
        let (traj, _) = run_allen_cahn(&sys, &well, &sigma, u0, eps, tau, 0.05, &[]).unwrap();
        let e0 = traj.log[0].energy;
        let et = traj.log.last().unwrap().energy;
        assert!(
            (et - e0).abs() / e0 < 2e-2,
            "stationary profile drifted: E0 {e0}, ET {et}"
        );
    }

    #[test]
    fn dissipation_identity_tightens_under_time_refinement() {
        let sys = system(32);
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let sigma = make_special_sigma(&profile, FRAC_PI_2, &well).unwrap();
        let eps = 0.1;
        let u0: Vec<f64> = sys
            .mesh
            .nodes
            .iter()
            .map(|p| profile.theta((p.y - 0.2) / eps))
            .collect();
        let t_end = 0.004;
        let residual = |tau: f64| -> f64 {
            let (traj, _) =
                run_allen_cahn(&sys, &well, &sigma, u0.clone(), eps, tau, t_end, &[]).unwrap();
            let e0 = traj.log[0].energy;
            let et = traj.log.last().unwrap().energy;
            let diss: f64 = traj.log.iter().map(|r| r.dissipation_increment).sum();
            // scheme inequality: the proximal estimate controls half the
            // sharp dissipation
            assert!(e0 - et - diss >= -1e-11, "scheme inequality violated");
            // sharp identity residual (dissipation counted twice)
            let gap = e0 - et - 2.0 * diss;
            assert!(gap >= -0.05 * (e0 - et).abs() - 1e-12);
            gap.abs()
        };
        let r1 = residual(0.002);
        let r2 = residual(0.0005);
        assert!(r2 < 0.6 * r1, "residual should shrink under refinement: {r1} -> {r2}");
    }

    #[test]
    fn spatial_self_convergence_second_order() {
        // ring meshes nest exactly (ring k of n_r sits on ring 2k of 2 n_r),
        // so successive solutions compare node-by-node; the difference must
        // shrink at second order
        let well = make_quartic_well();
        let profile = build_profile(&well, 12.0, 1e-3).unwrap();
        let eps = 0.1;
        let tau = 2.5e-4;
        let run = |n_r: usize| -> (FemSystem, Vec<f64>) {
            let sys = system(n_r);
            let sigma = make_special_sigma(&profile, FRAC_PI_2, &well).unwrap();
            let u0: Vec<f64> = sys.mesh.nodes.iter().map(|p| profile.theta(p.y / eps)).collect();
            let (traj, _) = run_allen_cahn(&sys, &well, &sigma, u0, eps, tau, 0.01, &[]).unwrap();
            (sys, traj.final_state.u)
        };
        let ring_offset = |k: usize| if k == 0 { 0 } else { 1 + 3 * k * (k - 1) };
        let diff = |coarse: &(FemSystem, Vec<f64>), fine: &(FemSystem, Vec<f64>)| -> f64 {
            let n_r = coarse.0.mesh.n_rings;
            let mut err_sq = (coarse.1[0] - fine.1[0]) * (coarse.1[0] - fine.1[0])
                * coarse.0.ops.mass_lumped[0];
            for k in 1..=n_r {
                for j in 0..6 * k {
                    let ci = ring_offset(k) + j;
                    let fi = ring_offset(2 * k) + 2 * j;
                    assert!(coarse.0.mesh.nodes[ci].dist(fine.0.mesh.nodes[fi]) < 1e-12);
                    let d = coarse.1[ci] - fine.1[fi];
                    err_sq += coarse.0.ops.mass_lumped[ci] * d * d;
                }
            }
            fmath::sqrt(err_sq)
        };
        let s32 = run(32);
        let s64 = run(64);
        let s128 = run(128);
        let e1 = diff(&s32, &s64);
        let e2 = diff(&s64, &s128);
        assert!(e1 / e2 >= 3.0, "expected ~4x reduction, got {e1} / {e2} = {}", e1 / e2);
    }
}
