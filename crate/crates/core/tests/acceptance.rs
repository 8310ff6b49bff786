//! Acceptance suite: one PASS/FAIL line per criterion, sub-check details below it.

use std::f64::consts::PI;
use std::time::Instant;

use nfbif::bifurcation::{
    branch_coefficients, find_crossings, kernel_dimension, psi, psi_limit, psi_raw, BranchOptions,
    Criticality, CrossingOptions, CrossingSet, FdOracle,
};
use nfbif::commands::{cmd_bifurcations, to_json};
use nfbif::config::RunConfig;
use nfbif::connectivity::{
    four_comp_factor, fourier_mode, theta, ModeTableOptions, Potential, PotentialSpec,
};
use nfbif::field_sim::{InitSpec, PointTarget, Scheme, SimConfig, SimSpec, Simulator};
use nfbif::gain::GainFunction;
use nfbif::grid::PeriodicGrid;
use nfbif::homogeneous::{asymptotic_limits, kappa_c, solve_rho_bar_inf, ModelParams};
use nfbif::scalar::{g_eta, h_eta, ln_one_minus_g, EtaValue};

struct Criterion {
    id: usize,
    title: &'static str,
    checks: Vec<(String, bool)>,
    started: Instant,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            checks: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    fn finish(self) -> bool {
        let ok = self.checks.iter().all(|(_, ok)| *ok);
        println!(
            "{} criterion {}: {} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.started.elapsed().as_secs_f64()
        );
        for (name, ok) in &self.checks {
            println!("    [{}] {name}", if *ok { "ok" } else { "FAIL" });
        }
        ok
    }
}

fn eta(v: f64) -> EtaValue {
    EtaValue::new(v).unwrap()
}

fn ring() -> Potential {
    Potential::from_spec(&PotentialSpec::standard_tanh_ring(1.0), 1.0, 2, 128).unwrap()
}

fn smooth_params(w: &Potential) -> ModelParams {
    ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::standard_smooth(), w.w0()).unwrap()
}

fn table_1d(n: usize, coeffs: &[f64]) -> Potential {
    let g = PeriodicGrid::new(n, 1, 1.0);
    let mut x = [0.0];
    let samples = (0..g.len())
        .map(|i| {
            g.wrapped_coords(i, &mut x);
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (2.0 * PI * k as f64 * x[0]).cos())
                .sum()
        })
        .collect();
    Potential::from_samples(g, samples).unwrap()
}

fn criterion_1() -> bool {
    let mut c = Criterion::new(1, "scalar kernels");
    let g0 = g_eta(eta(0.0));
    c.check(
        format!(
            "g(0) = 1 - 2/pi, error {:.2e}",
            (g0 - (1.0 - 2.0 / PI)).abs()
        ),
        (g0 - (1.0 - 2.0 / PI)).abs() <= 1e-14,
    );
    let grid: Vec<f64> = (0..200).map(|i| 50.0 * i as f64 / 199.0).collect();
    let gs: Vec<f64> = grid.iter().map(|&e| g_eta(eta(e))).collect();
    c.check(
        "g nondecreasing on 200 points of [0, 50]",
        gs.windows(2).all(|p| p[1] >= p[0]),
    );
    c.check(
        "g strictly increasing where g < 1 in floating point",
        gs.windows(2).all(|p| p[1] > p[0] || p[0] == 1.0),
    );
    c.check("g <= 1 in floating point", gs.iter().all(|&g| g <= 1.0));
    let lg: Vec<f64> = grid.iter().map(|&e| ln_one_minus_g(eta(e))).collect();
    c.check(
        format!(
            "ln(1 - g) finite and decreasing, so g < 1 (ln(1 - g(50)) = {:.1})",
            lg[199]
        ),
        lg.iter().all(|v| v.is_finite()) && lg.windows(2).all(|p| p[1] < p[0]),
    );
    c.check("h(0) = 2/pi", (h_eta(eta(0.0)) - 2.0 / PI).abs() <= 1e-15);
    c.check(
        "h > 1/2 on the grid",
        grid.iter().all(|&e| h_eta(eta(e)) > 0.5),
    );
    c.finish()
}

fn criterion_2() -> bool {
    let mut c = Criterion::new(2, "homogeneous state");
    let w = ring();
    let params = smooth_params(&w);
    let kc = kappa_c(&params);
    let mut worst_closed = 0.0f64;
    let mut worst_identity = 0.0f64;
    for i in 0..40 {
        let kappa = 0.01 * (kc / 0.01f64).powf(i as f64 / 39.0);
        let st = solve_rho_bar_inf(&params, kappa).unwrap();
        let exact = (2.0 / (kappa * PI)).sqrt();
        worst_closed = worst_closed.max((st.rho_bar_inf - exact).abs() / exact);
    }
    c.check(
        format!("closed form below kappa_c, worst relative error {worst_closed:.2e}"),
        worst_closed <= 1e-12,
    );
    for i in 0..40 {
        let kappa = 0.1 * 1e4f64.powf(i as f64 / 39.0);
        let st = solve_rho_bar_inf(&params, kappa).unwrap();
        let rhs = (st.rho_bar_inf - st.phi0) * kappa;
        worst_identity = worst_identity.max((st.rho_inf_at_zero - rhs).abs());
    }
    c.check(
        format!("rho(0) = (rho_bar - Phi0) kappa, worst absolute error {worst_identity:.2e}"),
        worst_identity <= 1e-11,
    );
    let mut worst_fd = 0.0f64;
    for i in 0..20 {
        let kappa = if i < 10 {
            0.5 + 2.5 * i as f64
        } else {
            kc * 1.1 * (1.0 + 0.4 * (i - 10) as f64)
        };
        let h = 1e-4 * kappa;
        let up = solve_rho_bar_inf(&params, kappa + h).unwrap().rho_bar_inf;
        let dn = solve_rho_bar_inf(&params, kappa - h).unwrap().rho_bar_inf;
        let fd = (up - dn) / (2.0 * h);
        let an = solve_rho_bar_inf(&params, kappa).unwrap().d_rho_bar_d_kappa;
        worst_fd = worst_fd.max((fd - an).abs() / an.abs());
    }
    c.check(
        format!("d rho_bar/d kappa vs centred difference on 20 kappa, worst {worst_fd:.2e}"),
        worst_fd <= 1e-5,
    );
    let relu = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::Relu, w.w0()).unwrap();
    let limit = 3.0 / (1.0 + w.w0().abs());
    let at_1e6 = solve_rho_bar_inf(&relu, 1e6).unwrap().rho_bar_inf;
    let (rho_star, _) = asymptotic_limits(&relu).unwrap();
    c.check(
        format!(
            "ReLU rho_bar(1e6) = B/(L^d + |W0|), error {:.2e}",
            (at_1e6 - limit).abs()
        ),
        (at_1e6 - limit).abs() <= 1e-5,
    );
    c.check(
        "reported rho* agrees with the ReLU limit",
        (rho_star - limit).abs() <= 1e-5,
    );
    c.finish()
}

fn fig2_crossings() -> (Potential, ModelParams, CrossingSet) {
    let w = ring();
    let params = smooth_params(&w);
    let set = find_crossings(&w, &params, &CrossingOptions::new(8, 1e4)).unwrap();
    (w, params, set)
}

fn criterion_3(w: &Potential, params: &ModelParams, set: &CrossingSet) -> bool {
    let mut c = Criterion::new(3, "threshold and crossings");
    let kc = kappa_c(params);
    let mut worst = 0.0f64;
    for i in 0..60 {
        let kappa = kc * (1.0 + 1e-3 * 1.2f64.powi(i));
        let a = psi(params, kappa).unwrap();
        let b = psi_raw(params, kappa).unwrap();
        worst = worst.max((a - b).abs() / a);
    }
    c.check(
        format!("two forms of Psi agree, worst relative {worst:.2e}"),
        worst <= 1e-11,
    );
    let relu = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::Relu, w.w0()).unwrap();
    let kr = kappa_c(&relu);
    let floor = psi_limit(&relu).unwrap();
    let vals: Vec<f64> = (1..=300)
        .map(|i| psi(&relu, kr * (1.0 + 1e-4 * 1.05f64.powi(i))).unwrap())
        .collect();
    c.check(
        "Psi decreasing for ReLU (Phi'' = 0) until it reaches its limit",
        vals.windows(2).all(|p| p[1] < p[0] || p[1] == floor),
    );
    let stable = table_1d(64, &[-5.0, -3.0, -1.0, -0.5]);
    let p1 = ModelParams::new(
        1.0,
        1,
        3.0,
        10.0,
        GainFunction::standard_smooth(),
        stable.w0(),
    )
    .unwrap();
    let none = find_crossings(&stable, &p1, &CrossingOptions::new(8, 1e5)).unwrap();
    c.check("-W H-stable gives no crossing", none.crossings.is_empty());
    let classes: Vec<Vec<Vec<usize>>> = set
        .crossings
        .iter()
        .take(3)
        .map(|p| p.class.members.clone())
        .collect();
    let expected = vec![
        vec![vec![0, 4], vec![4, 0]],
        vec![vec![1, 4], vec![4, 1]],
        vec![vec![3, 3]],
    ];
    c.check(
        format!("three smallest-kappa classes {classes:?}"),
        classes == expected,
    );
    let k1 = set.crossings[0].kappa_star;
    let k3 = set.crossings[2].kappa_star;
    c.check(
        format!(
            "kappa = 55 within [0.8 kappa1*, 1.2 kappa3*] = [{:.3}, {:.3}]",
            0.8 * k1,
            1.2 * k3
        ),
        0.8 * k1 <= 55.0 && 55.0 <= 1.2 * k3,
    );
    c.finish()
}

fn relu_large_kappa() -> (Potential, ModelParams, CrossingSet) {
    let unit = table_1d(64, &[-20.0, 1.0, 1.0]);
    let params = ModelParams::new(1.0, 1, 3.0, 10.0, GainFunction::Relu, unit.w0()).unwrap();
    let r1u = fourier_mode(&unit, &[1]).unwrap() / theta(&[1]);
    let r2u = fourier_mode(&unit, &[2]).unwrap() / theta(&[2]);
    let kc = kappa_c(&params);
    let target1 = psi(&params, 2.0 * kc).unwrap();
    let target2 = psi(&params, 60.0 * kc).unwrap();
    let w = table_1d(64, &[-20.0, target1 / r1u, target2 / r2u]);
    let set = find_crossings(&w, &params, &CrossingOptions::new(8, 1e3 * kc)).unwrap();
    (w, params, set)
}

fn criterion_4(w: &Potential, params: &ModelParams, set: &CrossingSet) -> bool {
    let mut c = Criterion::new(4, "branch coefficients");
    let bound = (PI - 4.0) / (PI - 2.0);
    let oracle = FdOracle::new(params, w).unwrap();
    let validated: Vec<_> = set.crossings.iter().filter(|p| p.flags.all_ok()).collect();
    c.check(
        format!("{} validated crossings", validated.len()),
        validated.len() >= 3,
    );
    for pt in validated {
        let label = pt.class.label();
        let bc = branch_coefficients(pt, params, Some(w), BranchOptions::default()).unwrap();
        c.check(
            format!(
                "{label} at {:.4}: A3 {:.4} < 0 and <= {bound:.4}, C2 {:.4} > 0, K3 {:.4} < 0, K2 {:.3e} < 0",
                pt.kappa_star, bc.a3, bc.c2, bc.k3, bc.k2
            ),
            bc.a3 < 0.0 && bc.a3 <= bound && bc.c2 > 0.0 && bc.k3 < 0.0 && bc.k2 < 0.0,
        );
        let (_, ev) =
            kernel_dimension(params, pt.kappa_star, std::slice::from_ref(&pt.class)).unwrap();
        let d1 = oracle
            .derivative(pt.kappa_star, &pt.class.members, 1)
            .unwrap();
        let d2 = oracle
            .derivative(pt.kappa_star, &pt.class.members, 2)
            .unwrap();
        c.check(
            format!(
                "{label}: oracle order 1 {d1:.3e} vs lambda {:.3e}, order 2 {d2:.1e}",
                ev[0].lambda
            ),
            (d1 - ev[0].lambda).abs() <= 1e-6 && d2.abs() <= 1e-6,
        );
        for kappa in [0.9 * pt.kappa_star, 1.1 * pt.kappa_star] {
            let (_, ev) = kernel_dimension(params, kappa, std::slice::from_ref(&pt.class)).unwrap();
            let d1 = oracle.derivative(kappa, &pt.class.members, 1).unwrap();
            c.check(
                format!(
                    "{label} at kappa {kappa:.3}: oracle order 1 {d1:.6e} vs lambda {:.6e}",
                    ev[0].lambda
                ),
                (d1 - ev[0].lambda).abs() <= 1e-6,
            );
        }
        let agrees = bc
            .kappa_pp0_fd
            .map(|fd| (fd - bc.kappa_pp0).abs() <= 1e-3 * fd.abs())
            .unwrap_or(false);
        let warned = bc.warnings.iter().any(|s| s.contains("C2 sign ambiguity"));
        c.check(
            format!(
                "{label}: kappa''(0) {:.4e} vs oracle {:?}, agrees {agrees}, warning {warned}",
                bc.kappa_pp0, bc.kappa_pp0_fd
            ),
            agrees || warned,
        );
    }

    let (rw, rp, rset) = relu_large_kappa();
    let first = rset
        .crossings
        .first()
        .map(|p| p.kappa_star)
        .unwrap_or(f64::NAN);
    let large: Vec<_> = rset
        .crossings
        .iter()
        .filter(|p| p.kappa_star > 10.0 * first)
        .collect();
    c.check(
        format!(
            "ReLU potential has a crossing above 10 kappa1* = {:.3}",
            10.0 * first
        ),
        !large.is_empty(),
    );
    for pt in large {
        let bc = branch_coefficients(pt, &rp, Some(&rw), BranchOptions::default()).unwrap();
        c.check(
            format!(
                "ReLU {} at {:.3}: label {:?} (kappa''(0) {:.4e}), oracle assembly {:?}, reduced {:?}",
                pt.class.label(),
                pt.kappa_star,
                bc.label,
                bc.kappa_pp0,
                bc.kappa_pp0_fd,
                bc.reduced.map(|r| (r.kappa_pp0, r.label))
            ),
            bc.label == Criticality::Subcritical,
        );
    }
    c.finish()
}

fn criterion_5(w: &Potential, params: &ModelParams, one: &CrossingSet) -> bool {
    let mut c = Criterion::new(5, "four-component");
    let zero = vec![vec![0.0, 0.0]; 4];
    let mut opts = CrossingOptions::new(8, 1e4);
    opts.modes = ModeTableOptions {
        shifts: Some(zero),
        ..Default::default()
    };
    let four = find_crossings(w, params, &opts).unwrap();
    let same_count = four.crossings.len() == one.crossings.len();
    let worst = one
        .crossings
        .iter()
        .zip(&four.crossings)
        .map(|(a, b)| {
            if a.class.members == b.class.members {
                (a.kappa_star - b.kappa_star).abs() / a.kappa_star
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0f64, f64::max);
    c.check(
        format!(
            "zero shifts reproduce {} crossings, worst relative {worst:.1e}",
            one.crossings.len()
        ),
        same_count && worst <= 1e-12,
    );
    let q = 0.25;
    let shifts = vec![vec![0.0, q], vec![-q, 0.0], vec![0.0, -q], vec![q, 0.0]];
    let f = four_comp_factor(&[1, 0], &shifts, 1.0);
    c.check(
        format!("k = (1,0) under quarter shifts: factor {f} = (1 + 0 + 1 + 0)/4"),
        f == 0.5,
    );
    let f01 = four_comp_factor(&[0, 1], &shifts, 1.0);
    c.check(
        format!("k = (0,1) under quarter shifts: factor {f01}"),
        f01 == 0.5,
    );
    let f11 = four_comp_factor(&[1, 1], &shifts, 1.0);
    c.check(
        format!("k = (1,1) under quarter shifts: factor {f11}"),
        f11 == 0.0,
    );
    c.finish()
}

fn sim_config(w_spec: &PotentialSpec, spec: &SimSpec) -> SimConfig {
    let w = Potential::from_spec(w_spec, 1.0, 2, spec.nx).unwrap();
    let params = smooth_params(&w);
    SimConfig::new(&params, w, spec).unwrap()
}

fn criterion_6(kappa1: f64, first_three: &[Vec<Vec<usize>>]) -> bool {
    let mut c = Criterion::new(6, "simulator");
    let ring_spec = PotentialSpec::standard_tanh_ring(1.0);

    let mut spec = SimSpec::new(55.0, 0.0);
    spec.nx = 8;
    spec.ns = 64;
    spec.init = InitSpec::HomogeneousPlusMode {
        k: vec![0, 1],
        amplitude: 0.05,
    };
    let sim = Simulator::new(sim_config(&ring_spec, &spec)).unwrap();
    let mut st = sim.initial_state();
    let cols = st.sites() * st.components;
    let masses = |st: &nfbif::field_sim::FieldState| -> Vec<f64> {
        (0..cols)
            .map(|i| sim.column_mass_of(&st.rho[i * st.ns..(i + 1) * st.ns]))
            .collect()
    };
    let mut prev = masses(&st);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        sim.advance(&mut st, sim.config().dt).unwrap();
        let now = masses(&st);
        for (a, b) in prev.iter().zip(&now) {
            worst = worst.max((a - b).abs() / a);
        }
        prev = now;
    }
    c.check(
        format!("per-x mass drift per step over 1e4 steps, worst relative {worst:.2e}"),
        worst <= 1e-14,
    );

    for scheme in [Scheme::Explicit, Scheme::ImplicitS] {
        let mut spec = SimSpec::new(55.0, 0.0);
        spec.nx = 16;
        spec.ns = 256;
        spec.scheme = scheme;
        let sim = Simulator::new(sim_config(&ring_spec, &spec)).unwrap();
        let st = sim.discrete_steady_state();
        let next = sim.step(&st).unwrap();
        let res = st
            .rho
            .iter()
            .zip(&next.rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        c.check(
            format!("{scheme:?}: steady state is a fixed point, residual {res:.2e}"),
            res <= 1e-8,
        );
    }

    let mut spec = SimSpec::new(45.0, 200.0);
    spec.nx = 32;
    spec.ns = 128;
    spec.init = InitSpec::HomogeneousPlusMode {
        k: vec![0, 4],
        amplitude: 0.01,
    };
    spec.record_interval = Some(5.0);
    let out = Simulator::new(sim_config(&ring_spec, &spec))
        .unwrap()
        .run(&[])
        .unwrap();
    let decay = out.summary.initial_deviation / out.summary.final_deviation;
    c.check(
        format!("kappa 45 < kappa1* = {kappa1:.3}: deviation decays {decay:.1}x in 200 ms"),
        decay >= 100.0,
    );

    let mut spec = SimSpec::new(55.0, 2400.0);
    spec.nx = 64;
    spec.scheme = Scheme::ImplicitS;
    spec.dt = Some(0.5);
    spec.record_interval = Some(10.0);
    spec.init = InitSpec::HomogeneousPlusPointPerturbation {
        amplitude: 1e-13,
        site: None,
        on: PointTarget::Centre,
    };
    spec.snapshot_times = vec![1500.0, 2400.0];
    let out = Simulator::new(sim_config(&ring_spec, &spec))
        .unwrap()
        .run(&[1500.0, 2400.0])
        .unwrap();
    let s = &out.summary;
    c.check(
        format!(
            "kappa 55, 64^2: deviation {:.2e} -> max {:.2e}, growth {:.3e}x",
            s.initial_deviation, s.max_deviation, s.growth_factor
        ),
        s.growth_factor >= 1e6,
    );
    let dom = s.dominant_at_saturation.clone().unwrap_or_default();
    let in_set = first_three.iter().flatten().any(|m| *m == dom);
    c.check(
        format!(
            "dominant mode at saturation (t = {:?}) {dom:?}",
            s.saturation_time
        ),
        in_set,
    );
    let hex = |t: f64| {
        out.timeseries
            .iter()
            .find(|r| (r.t - t).abs() < 1e-9)
            .map(|r| r.hexagonality)
            .unwrap_or(f64::NAN)
    };
    let (h1500, h2400) = (hex(1500.0), hex(2400.0));
    c.check(
        format!("hexagonality {h2400:.4e} at 2400 ms exceeds {h1500:.4e} at 1500 ms"),
        h2400 > h1500,
    );
    c.finish()
}

fn criterion_7() -> bool {
    let mut c = Criterion::new(7, "determinism");
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/tanh_ring_a1.json"
    );
    let cfg = RunConfig::load(std::path::Path::new(path), &[]).unwrap();
    let a = to_json(&cmd_bifurcations(&cfg).unwrap()).unwrap();
    let b = to_json(&cmd_bifurcations(&cfg).unwrap()).unwrap();
    c.check(
        format!("two bifurcation reports, {} bytes each, identical", a.len()),
        a == b,
    );
    c.finish()
}

fn main() {
    let mut results = vec![criterion_1(), criterion_2()];
    let (w, params, set) = fig2_crossings();
    results.push(criterion_3(&w, &params, &set));
    results.push(criterion_4(&w, &params, &set));
    results.push(criterion_5(&w, &params, &set));
    let first_three: Vec<Vec<Vec<usize>>> = set
        .crossings
        .iter()
        .take(3)
        .map(|p| p.class.members.clone())
        .collect();
    results.push(criterion_6(set.crossings[0].kappa_star, &first_three));
    results.push(criterion_7());
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
