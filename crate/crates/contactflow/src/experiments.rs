//! Experiment drivers: validation suites, calibration checking, phase-field
//! runs, preparedness scaling and the width-sweep convergence study.

use crate::config::{Config, InterfaceKind, SigmaKind};
use crate::io;
use contactflow_core::calibration::{
    check_calibration, CalibrationConfig, CalibrationField, SamplePlan,
};
use contactflow_core::functionals::{
    bulk_error, dissipation_diagnostics, fit_loglog, gronwall_exponent, l1_phase_error,
    relative_energy,
};
use contactflow_core::geometry::{project_to_boundary, InterfaceCurve, SplinedCurve};
use contactflow_core::initial_data::{
    extended_signed_distance, verify_preparedness, well_prepared_field, PreparednessReport,
};
use contactflow_core::mesh::{build_disk_mesh, DiskMesh};
use contactflow_core::phase_field::{run_allen_cahn, FemSystem, PhaseState};
use contactflow_core::potentials::{
    build_profile, make_bump_sigma, make_quartic_well, make_special_sigma, BoundaryDensity,
    DoubleWell, ProfileTable,
};
use contactflow_core::rng::SplitMix64;
use contactflow_core::sharp_mcf::{
    arc_chord_curve, contact_angle_error, diameter_curve, evolve, mcf_probe_step, McfParams,
};
use contactflow_core::{CoreError, Vec2};
use std::path::Path;

pub type AnyError = Box<dyn std::error::Error + Send + Sync>;

/// Shared immutable setup derived from a config.
pub struct Lab {
    pub cfg: Config,
    pub well: DoubleWell,
    pub profile: ProfileTable,
    pub sigma: BoundaryDensity,
}

impl Lab {
    pub fn new(cfg: Config) -> Result<Lab, AnyError> {
        let well = make_quartic_well();
        let profile = build_profile(&well, cfg.profile_r, cfg.profile_h)?;
        let sigma = match cfg.sigma {
            SigmaKind::Special => make_special_sigma(&profile, cfg.alpha, &well)?,
            SigmaKind::Bump { kappa } => make_bump_sigma(&profile, cfg.alpha, kappa, &well)?,
        };
        Ok(Lab {
            cfg,
            well,
            profile,
            sigma,
        })
    }

    pub fn initial_curve(&self) -> Result<InterfaceCurve, AnyError> {
        let mut curve = match self.cfg.interface {
            InterfaceKind::Diameter => diameter_curve(self.cfg.interface_nodes),
            InterfaceKind::Chord { center } => {
                arc_chord_curve(self.cfg.alpha, center, self.cfg.interface_nodes)
            }
        };
        curve.snap_endpoints(&self.cfg.domain)?;
        curve.validate(&self.cfg.domain)?;
        // settle the discrete contact angle before anything downstream
        let params = McfParams::new(self.cfg.alpha);
        let h = curve.nodes[0].dist(curve.nodes[1]);
        let dt = 0.2 * h * h;
        let mut settled = evolve(&curve, &self.cfg.domain, &params, dt, 2.0 * dt)?;
        settled.time = 0.0;
        Ok(settled)
    }

    /// Smallest multiple of 64 rings resolving `h_max <= eps / 4`, unless
    /// ring counts are pinned in the config.
    pub fn rings_for(&self, idx: usize, eps: f64) -> Result<usize, AnyError> {
        if let Some(rings) = &self.cfg.rings {
            return Ok(rings[idx.min(rings.len() - 1)]);
        }
        let mut n = 64;
        loop {
            let mesh = build_disk_mesh(&self.cfg.domain, n)?;
            if mesh.h_max <= eps / 4.0 {
                return Ok(n);
            }
            n += 64;
            if n > 2048 {
                return Err("mesh resolution out of range".into());
            }
        }
    }

    fn mcf_params(&self) -> McfParams {
        let mut p = McfParams::new(self.cfg.alpha);
        p.tol_angle = self.cfg.tol_angle;
        p
    }
}

/// One validation line: name, pass flag, detail.
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Sampled invariant suites over potentials, geometry and meshing.
pub fn cmd_validate(lab: &Lab) -> Result<Vec<CheckLine>, AnyError> {
    let mut lines = Vec::new();
    let mut push = |name: &'static str, pass: bool, detail: String| {
        lines.push(CheckLine { name, pass, detail });
    };
    // potentials
    push("well_conditions", lab.well.validate().is_ok(), String::new());
    push(
        "sigma_conditions",
        lab.sigma.validate(10_000).is_ok(),
        String::new(),
    );
    let mut equi_worst: f64 = 0.0;
    for (_, th, dth) in lab.profile.nodes() {
        equi_worst = equi_worst.max((0.5 * dth * dth - lab.well.eval(th)).abs());
    }
    push("profile_equipartition", equi_worst < 1e-8, format!("max defect {equi_worst:e}"));
    let c0 = lab.profile.c0();
    push(
        "surface_tension",
        (c0 - 4.0 / 3.0).abs() < 1e-10,
        format!("c0 = {c0}"),
    );
    // geometry invariants on the configured interface
    let curve = lab.initial_curve()?;
    let spl = SplinedCurve::new(&curve);
    let mut rng = SplitMix64::new(lab.cfg.seed);
    let mut proj_worst: f64 = 0.0;
    let mut grad_worst: f64 = 0.0;
    for _ in 0..500 {
        let s = rng.uniform(0.1 * spl.total_arc(), 0.9 * spl.total_arc());
        let off = rng.uniform(-0.05, 0.05);
        let fr = spl.frame_at_arc(s);
        let x = fr.point + fr.normal * off;
        match spl.project(x) {
            contactflow_core::geometry::Projection::Interior { dist, foot, .. } => {
                proj_worst = proj_worst.max((dist - off).abs());
                if let contactflow_core::geometry::Projection::Interior { dist: d2, .. } =
                    spl.project(foot)
                {
                    proj_worst = proj_worst.max(d2.abs());
                }
                let d = 1e-4;
                let sd = |p: Vec2| match spl.project(p) {
                    contactflow_core::geometry::Projection::Interior { dist, .. } => dist,
                    contactflow_core::geometry::Projection::Endpoint { dist, .. } => dist,
                };
                let g = (sd(x + fr.normal * d) - sd(x - fr.normal * d)) / (2.0 * d);
                grad_worst = grad_worst.max((g - 1.0).abs());
            }
            _ => proj_worst = proj_worst.max(1.0),
        }
    }
    push("projection_idempotence", proj_worst < 1e-6, format!("worst {proj_worst:e}"));
    push("signed_distance_gradient", grad_worst < 5e-3, format!("worst {grad_worst:e}"));
    for e in [0, 1] {
        let defect = contact_angle_error(&curve, &lab.cfg.domain, lab.cfg.alpha, e)?.abs();
        push(
            if e == 0 { "contact_angle_start" } else { "contact_angle_end" },
            defect <= lab.cfg.tol_angle,
            format!("defect {defect:e}"),
        );
    }
    // meshing
    let mesh = build_disk_mesh(&lab.cfg.domain, 64)?;
    let v = mesh.n_nodes() as isize;
    let e = mesh.edge_count() as isize;
    let f = mesh.triangles.len() as isize;
    push("mesh_euler", v - e + f == 1, format!("V-E+F = {}", v - e + f));
    push(
        "mesh_angles",
        mesh.min_angle_deg >= 20.0 && mesh.max_angle_deg <= 130.0,
        format!("[{:.1}, {:.1}] deg", mesh.min_angle_deg, mesh.max_angle_deg),
    );
    Ok(lines)
}

/// Build the calibration field at `time` by evolving the configured initial
/// curve; the probe snapshot sits `probe_dt` later.
pub fn field_at_time(
    lab: &Lab,
    base: &InterfaceCurve,
    time: f64,
    probe_dt: f64,
) -> Result<(InterfaceCurve, CalibrationField), AnyError> {
    let params = lab.mcf_params();
    let h = base.nodes[0].dist(base.nodes[1]);
    let dt = 0.25 * h * h;
    let at_t = if time > base.time {
        evolve(base, &lab.cfg.domain, &params, dt, time)?
    } else {
        base.clone()
    };
    let probe = mcf_probe_step(&at_t, &lab.cfg.domain, probe_dt)?;
    let mut ccfg = CalibrationConfig::new(lab.cfg.alpha);
    ccfg.tol_angle = (10.0 * lab.cfg.tol_angle).max(1e-5);
    let field = CalibrationField::build(&at_t, &probe, &lab.cfg.domain, ccfg)?;
    Ok((at_t, field))
}

pub struct CalibrateOutcome {
    pub reports: Vec<(f64, contactflow_core::calibration::CheckReport)>,
    pub pass: bool,
}

/// Run the condition checker at the requested report times.
pub fn cmd_calibrate(lab: &Lab, times: &[f64]) -> Result<CalibrateOutcome, AnyError> {
    let base = lab.initial_curve()?;
    let probe_dt = (1e-4 * lab.cfg.t_end).max(1e-9);
    let plan = SamplePlan::with_budget(lab.cfg.samples, lab.cfg.seed);
    let mut reports = Vec::new();
    let mut pass = true;
    for &t in times {
        let (_, field) = field_at_time(lab, &base, t, probe_dt)?;
        let rep = check_calibration(&field, &plan)?;
        pass &= rep.hard_failures.is_empty();
        for eq in &rep.equalities {
            pass &= eq.value <= lab.cfg.tol_equality;
        }
        for r in &rep.ratios {
            pass &= r.value.is_finite();
        }
        reports.push((t, rep));
    }
    Ok(CalibrateOutcome { reports, pass })
}

/// Functional report row written to the converge/simulate CSVs.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalRow {
    pub t: f64,
    pub e_eps: f64,
    pub e_rel: f64,
    pub e_bulk: f64,
    pub l1: f64,
    pub d1: f64,
    pub d2: f64,
    /// r0..r6 coercivity ratios.
    pub r: [f64; 7],
    /// Sharpest length-shortfall constant at this state's quadrature points.
    pub c_quad: f64,
    /// Relative gap between the relative energy and its alternative
    /// representation (an algebraic identity).
    pub identity_gap: f64,
}

impl FunctionalRow {
    pub fn csv_header() -> &'static str {
        "t,E_eps,E_relEn,E_bulk,l1,D1,D2,r0,r1,r2,r3,r4,r5,r6"
    }

    pub fn cells(&self) -> Vec<f64> {
        let mut v = vec![self.t, self.e_eps, self.e_rel, self.e_bulk, self.l1, self.d1, self.d2];
        v.extend_from_slice(&self.r);
        v
    }
}

/// Outcome of one width in the converge sweep.
pub struct EpsOutcome {
    pub eps: f64,
    pub n_rings: usize,
    pub tau: f64,
    pub under_resolved: bool,
    pub rows: Vec<FunctionalRow>,
    pub l1_final: f64,
    pub e0: f64,
    pub gronwall_c: f64,
    /// Proximal inequality residual observed over the run (min slack).
    pub min_energy_slack: f64,
}

pub struct ConvergeOutcome {
    pub per_eps: Vec<EpsOutcome>,
    pub l1_rate: f64,
    /// Rate after the pre-asymptotic exclusion rule, when it fired.
    pub l1_rate_filtered: Option<f64>,
    pub sqrt_e0_slope: f64,
    pub gronwall_spread: (f64, f64),
}

fn functional_row(
    lab: &Lab,
    sys: &FemSystem,
    state: &PhaseState,
    field: &CalibrationField,
    with_dissipation: bool,
) -> Result<FunctionalRow, AnyError> {
    let re = relative_energy(sys, &lab.well, &lab.profile, &lab.sigma, state, field)?;
    let be = bulk_error(sys, &lab.profile, state, field)?;
    let (d1, d2) = if with_dissipation {
        dissipation_diagnostics(sys, &lab.well, &lab.sigma, state, field)?
    } else {
        (0.0, 0.0)
    };
    let e_eps = contactflow_core::phase_field::discrete_energy(sys, &lab.well, &lab.sigma, state);
    let e = re.value.max(1e-300);
    Ok(FunctionalRow {
        t: state.time,
        e_eps,
        e_rel: re.value,
        e_bulk: be.value,
        l1: be.l1,
        d1,
        d2,
        r: [
            re.boundary / e,
            re.equipartition / e,
            re.tilt / e,
            re.weighted_psi / e,
            re.tilt_sq_psi / e,
            re.tilt_sq_diffuse / e,
            re.weighted_diffuse / e,
        ],
        c_quad: re.c_quad,
        identity_gap: (re.value - re.alt).abs() / (1.0 + re.value.abs()),
    })
}

/// Fine front-tracking reference shared by all widths of a sweep: curves and
/// calibration fields at the report times, and the phase indicator at the
/// final time (the declared oracle for L1 rates).
pub struct ReferenceTimeline {
    pub entries: Vec<(f64, InterfaceCurve, CalibrationField)>,
    pub ext_final: contactflow_core::initial_data::ExtendedDistance,
}

/// Evolve the fine reference (4x node count, time step 1/16 of the coarsest
/// phase-field step, capped by the explicit stability bound) through the
/// report times and build a calibration field at each.
pub fn build_reference(lab: &Lab, base: &InterfaceCurve) -> Result<ReferenceTimeline, AnyError> {
    let params = lab.mcf_params();
    let t_end = lab.cfg.t_end;
    let probe_dt = (1e-4 * t_end).max(1e-9);
    let fine_nodes = 4 * lab.cfg.interface_nodes;
    let mut cur = SplinedCurve::new(base).resample_uniform(fine_nodes);
    cur.time = base.time;
    let coarsest_eps = lab.cfg.eps.iter().cloned().fold(f64::MIN, f64::max);
    let coarse_mesh = build_disk_mesh(&lab.cfg.domain, lab.rings_for(0, coarsest_eps)?)?;
    let dt_ref = lab.cfg.tau_factor * coarsest_eps * coarse_mesh.h_max / 16.0;
    let mut times: Vec<f64> = lab.cfg.report_fractions.iter().map(|f| f * t_end).collect();
    if times.last().map(|&t| t < t_end - 1e-12).unwrap_or(true) {
        times.push(t_end);
    }
    let mut ccfg = CalibrationConfig::new(lab.cfg.alpha);
    ccfg.tol_angle = (10.0 * lab.cfg.tol_angle).max(1e-5);
    let mut entries = Vec::new();
    for &t in &times {
        if t > cur.time {
            cur = evolve(&cur, &lab.cfg.domain, &params, dt_ref, t)?;
        }
        let probe = mcf_probe_step(&cur, &lab.cfg.domain, probe_dt)?;
        let field = CalibrationField::build(&cur, &probe, &lab.cfg.domain, ccfg)?;
        entries.push((t, cur.clone(), field));
    }
    let (final_curve, r_bar) = {
        let last = entries.last().unwrap();
        (last.1.clone(), last.2.scales.r_bar)
    };
    let ext_final = extended_signed_distance(&final_curve, &lab.cfg.domain, r_bar)?;
    Ok(ReferenceTimeline { entries, ext_final })
}

/// Run one width: well-prepared data, Allen-Cahn to `t_end`, functional rows
/// at the report times against the shared front-tracking reference.
pub fn run_width(
    lab: &Lab,
    reference: &ReferenceTimeline,
    idx: usize,
    eps: f64,
    with_dissipation: bool,
) -> Result<EpsOutcome, AnyError> {
    let n_rings = lab.rings_for(idx, eps)?;
    let mesh = build_disk_mesh(&lab.cfg.domain, n_rings)?;
    let sys = FemSystem::new(mesh);
    let tau = lab.cfg.tau_factor * eps * sys.mesh.h_max;
    let t_end = lab.cfg.t_end;
    // initial data from the sharp snapshot
    let (_, curve0, field0) = &reference.entries[0];
    let ext0 = extended_signed_distance(curve0, &lab.cfg.domain, field0.scales.r_bar)?;
    let u0 = well_prepared_field(&sys.mesh, &ext0, eps, &lab.profile);
    let report_times: Vec<f64> = reference.entries.iter().map(|e| e.0).collect();
    let (traj, under_resolved) = run_allen_cahn(
        &sys,
        &lab.well,
        &lab.sigma,
        u0,
        eps,
        tau,
        t_end,
        &report_times,
    )?;
    // proximal inequality slack over the energy log
    let mut min_slack = f64::INFINITY;
    for w in traj.log.windows(2) {
        min_slack = min_slack.min(w[0].energy - w[1].energy - w[1].dissipation_increment);
    }
    // functional rows against the shared reference fields
    let mut rows = Vec::new();
    for (snap, (t, _, field_t)) in traj.snapshots.iter().zip(&reference.entries) {
        let mut state = snap.clone();
        state.time = *t;
        let row = functional_row(lab, &sys, &state, field_t, with_dissipation)?;
        rows.push(row);
    }
    let l1_final = l1_phase_error(&sys, &lab.profile, &traj.final_state, &reference.ext_final);
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let totals: Vec<f64> = rows.iter().map(|r| r.e_rel + r.e_bulk).collect();
    let gronwall_c = gronwall_exponent(&times, &totals, 1e-12);
    Ok(EpsOutcome {
        eps,
        n_rings,
        tau,
        under_resolved,
        l1_final,
        e0: totals[0],
        gronwall_c,
        rows,
        min_energy_slack: min_slack,
    })
}

/// Full width sweep with rate fits; widths run concurrently.
pub fn cmd_converge(lab: &Lab, threads: usize, with_dissipation: bool) -> Result<ConvergeOutcome, AnyError> {
    let base = lab.initial_curve()?;
    let reference = build_reference(lab, &base)?;
    let eps_list = lab.cfg.eps.clone();
    let mut outcomes: Vec<Option<EpsOutcome>> = (0..eps_list.len()).map(|_| None).collect();
    let chunk = threads.max(1);
    for group in (0..eps_list.len()).collect::<Vec<_>>().chunks(chunk) {
        std::thread::scope(|scope| -> Result<(), AnyError> {
            let mut handles = Vec::new();
            for &idx in group {
                let reference_ref = &reference;
                let lab_ref = &lab;
                let eps = eps_list[idx];
                handles.push((
                    idx,
                    scope.spawn(move || run_width(lab_ref, reference_ref, idx, eps, with_dissipation)),
                ));
            }
            for (idx, h) in handles {
                let res = h.join().map_err(|_| -> AnyError { "width worker panicked".into() })?;
                outcomes[idx] = Some(res?);
            }
            Ok(())
        })?;
    }
    let per_eps: Vec<EpsOutcome> = outcomes.into_iter().map(|o| o.unwrap()).collect();
    let xs: Vec<f64> = per_eps.iter().map(|o| o.eps).collect();
    let l1s: Vec<f64> = per_eps.iter().map(|o| o.l1_final).collect();
    let (l1_rate, intercept) = fit_loglog(&xs, &l1s);
    // pre-asymptotic guard: drop the largest width if its fit residual is
    // more than three times the fit RMS
    let mut l1_rate_filtered = None;
    if xs.len() >= 3 {
        let residuals: Vec<f64> = xs
            .iter()
            .zip(&l1s)
            .map(|(&x, &y)| (y.max(1e-300).ln() - (l1_rate * x.ln() + intercept)).abs())
            .collect();
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
        let i_max = xs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        if residuals[i_max] > 3.0 * rms && rms > 0.0 {
            let xs2: Vec<f64> = xs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != i_max)
                .map(|(_, &v)| v)
                .collect();
            let ys2: Vec<f64> = l1s
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != i_max)
                .map(|(_, &v)| v)
                .collect();
            l1_rate_filtered = Some(fit_loglog(&xs2, &ys2).0);
        }
    }
    let sqrt_e0: Vec<f64> = per_eps.iter().map(|o| o.e0.max(1e-300).sqrt()).collect();
    let (sqrt_e0_slope, _) = fit_loglog(&xs, &sqrt_e0);
    let g_lo = per_eps.iter().map(|o| o.gronwall_c).fold(f64::INFINITY, f64::min);
    let g_hi = per_eps.iter().map(|o| o.gronwall_c).fold(f64::NEG_INFINITY, f64::max);
    Ok(ConvergeOutcome {
        per_eps,
        l1_rate,
        l1_rate_filtered,
        sqrt_e0_slope,
        gronwall_spread: (g_lo, g_hi),
    })
}

pub fn cmd_prepare(lab: &Lab) -> Result<PreparednessReport, AnyError> {
    let base = lab.initial_curve()?;
    let rings: Option<Vec<usize>> = match &lab.cfg.rings {
        Some(r) => Some(r.clone()),
        None => {
            let mut v = Vec::new();
            for (i, &eps) in lab.cfg.eps.iter().enumerate() {
                v.push(lab.rings_for(i, eps)?);
            }
            Some(v)
        }
    };
    Ok(verify_preparedness(
        &base,
        &lab.cfg.domain,
        &lab.well,
        &lab.profile,
        &lab.sigma,
        lab.cfg.alpha,
        &lab.cfg.eps,
        rings.as_deref(),
    )?)
}

/// Simulate one width and export the energy log plus snapshots.
pub fn cmd_simulate(lab: &Lab, out: &Path, eps: f64, idx: usize) -> Result<(), AnyError> {
    std::fs::create_dir_all(out)?;
    let base = lab.initial_curve()?;
    let n_rings = lab.rings_for(idx, eps)?;
    let sys = FemSystem::new(build_disk_mesh(&lab.cfg.domain, n_rings)?);
    let probe_dt = (1e-4 * lab.cfg.t_end).max(1e-9);
    let (curve0, field0) = field_at_time(lab, &base, 0.0, probe_dt)?;
    let ext = extended_signed_distance(&curve0, &lab.cfg.domain, field0.scales.r_bar)?;
    let u0 = well_prepared_field(&sys.mesh, &ext, eps, &lab.profile);
    let tau = lab.cfg.tau_factor * eps * sys.mesh.h_max;
    let times: Vec<f64> = lab.cfg.report_fractions.iter().map(|f| f * lab.cfg.t_end).collect();
    let (traj, warn) = run_allen_cahn(&sys, &lab.well, &lab.sigma, u0, eps, tau, lab.cfg.t_end, &times)?;
    if warn {
        eprintln!("warning: mesh does not resolve eps = {eps} (h_max = {})", sys.mesh.h_max);
    }
    // sharp reference trajectory at the same report times
    let params = lab.mcf_params();
    let h = base.nodes[0].dist(base.nodes[1]);
    let mut sharp = Vec::new();
    let mut cur = base.clone();
    for &t in &times {
        if t > cur.time {
            cur = evolve(&cur, &lab.cfg.domain, &params, 0.25 * h * h, t)?;
        }
        sharp.push(cur.clone());
    }
    io::write_trajectory(&out.join("sharp_trajectory"), &sharp)?;
    let mut csv = io::CsvTable::new("t,E,dissipation");
    csv.meta("identity", lab.cfg.identity())
        .meta("eps", eps)
        .meta("tau", tau)
        .meta("n_rings", n_rings)
        .meta("version", env!("CARGO_PKG_VERSION"));
    for r in &traj.log {
        csv.row(&[r.time, r.energy, r.dissipation_increment]);
    }
    csv.write(&out.join(format!("energy_eps{eps}.csv")))?;
    for (k, snap) in traj.snapshots.iter().enumerate() {
        io::write_snapshot(&out.join(format!("snapshot_eps{eps}_{k:03}.txt")), &sys.mesh, snap)?;
    }
    Ok(())
}

/// Sanity wrapper used by tests: checks that the configured geometry
/// projects its quadrature points correctly (a cheap smoke test for the
/// domain/interface combination).
pub fn smoke_geometry(lab: &Lab) -> Result<(), AnyError> {
    let curve = lab.initial_curve()?;
    let spl = SplinedCurve::new(&curve);
    let (theta, s) = project_to_boundary(&lab.cfg.domain, spl.frame_at_arc(0.0).point)?;
    if s.abs() > 1e-8 {
        return Err(Box::new(CoreError::Evolution {
            what: "contact point off the boundary",
            detail: format!("theta = {theta}, s = {s:e}"),
        }));
    }
    Ok(())
}

/// Export helpers shared by the CLI and the acceptance suite.
pub fn write_converge_outputs(
    lab: &Lab,
    out: &Path,
    outcome: &ConvergeOutcome,
) -> Result<(), AnyError> {
    std::fs::create_dir_all(out)?;
    let mut rates = io::CsvTable::new("eps,n_rings,tau,l1_final,E0,gronwall_C");
    rates
        .meta("identity", lab.cfg.identity())
        .meta("t_end", lab.cfg.t_end)
        .meta("seed", lab.cfg.seed)
        .meta("version", env!("CARGO_PKG_VERSION"))
        .meta("l1_rate", outcome.l1_rate)
        .meta("sqrt_E0_slope", outcome.sqrt_e0_slope);
    if let Some(f) = outcome.l1_rate_filtered {
        rates.meta("l1_rate_filtered", f);
    }
    for o in &outcome.per_eps {
        rates.row(&[o.eps, o.n_rings as f64, o.tau, o.l1_final, o.e0, o.gronwall_c]);
    }
    rates.write(&out.join("rates.csv"))?;
    for o in &outcome.per_eps {
        let mut t = io::CsvTable::new(FunctionalRow::csv_header());
        t.meta("identity", lab.cfg.identity())
            .meta("eps", o.eps)
            .meta("tau", o.tau)
            .meta("n_rings", o.n_rings)
            .meta("version", env!("CARGO_PKG_VERSION"));
        for r in &o.rows {
            t.row(&r.cells());
        }
        t.write(&out.join(format!("functionals_eps{}.csv", o.eps)))?;
    }
    Ok(())
}

/// Mesh accessor for snapshot export in the CLI.
pub fn mesh_for(lab: &Lab, idx: usize, eps: f64) -> Result<DiskMesh, AnyError> {
    Ok(build_disk_mesh(&lab.cfg.domain, lab.rings_for(idx, eps)?)?)
}
