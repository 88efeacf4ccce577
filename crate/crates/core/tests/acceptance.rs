//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use antisync_core::cli::{parse_config, run_bounds, run_simulate, run_verify, Scenario};
use antisync_core::criteria::{Criteria, Mode, NormWeights};
use antisync_core::dde_sim::{simulate, MonitorParams, SimConfig, Trajectory};
use antisync_core::model::{ActivationKind, ActivationSpec, NetworkSpec};
use antisync_core::monitors::{max_component, xi_inf_norm};
use antisync_core::split_complex::{product_split, SplitComplex};

fn scenario(name: &str) -> Scenario {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            failure_persistence: None,
            ..Config::with_cases(1000)
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// Published threshold and bound values used by the criteria below.
const ETA: [f64; 2] = [5.0, 6.6];
const T1_PUBLISHED: f64 = 9.318;
const T2_PUBLISHED: f64 = 21.818;

fn criterion_1() -> Outcome {
    let s = scenario("paper_s4_controlled.toml");
    let crit = Criteria::new(&s.network, &s.weights, 0.5, Mode::Theorem1).map_err(|e| e.to_string())?;
    let report = crit.thresholds();
    for (j, t) in report.neurons.iter().enumerate() {
        check((t.eta_bar_min - ETA[j]).abs() <= 1e-12, format!("eta_bar_min[{j}] = {}", t.eta_bar_min))?;
        check((t.eta_tilde_min - ETA[j]).abs() <= 1e-12, format!("eta_tilde_min[{j}] = {}", t.eta_tilde_min))?;
    }
    Ok(format!(
        "eta_bar = ({}, {}), eta_tilde = ({}, {})",
        report.neurons[0].eta_bar_min,
        report.neurons[1].eta_bar_min,
        report.neurons[0].eta_tilde_min,
        report.neurons[1].eta_tilde_min
    ))
}

fn criterion_2() -> Outcome {
    let s = scenario("paper_s4_controlled.toml");
    let (report, _) = run_bounds(&s, None, Some(0.25), Some(0.4)).map_err(|e| e.to_string())?;
    let cert = &report.certificate.as_ref().ok_or("no certificate")?.certificate;
    // M(E1(0)) = max(4/0.4, 3.4/0.5, 3.9/0.8, 5/0.6) = 10 and T1 = ln(0.8 * 10) / 0.25 + 1
    let t1_oracle = (0.8f64 * 10.0).ln() / 0.25 + 1.0;
    check((cert.m_e1_0 - 10.0).abs() <= 1e-12, format!("M(E1(0)) = {}", cert.m_e1_0))?;
    check((cert.t1 - t1_oracle).abs() <= 1e-12, format!("T1 = {} vs {t1_oracle}", cert.t1))?;
    check((cert.t1 - T1_PUBLISHED).abs() <= 1e-3, format!("T1 = {}", cert.t1))?;
    check((cert.t2 - T2_PUBLISHED).abs() <= 1e-3, format!("T2 = {}", cert.t2))?;
    Ok(format!("M(E1(0)) = {}, T1 = {:.6}, T2 = {:.6}", cert.m_e1_0, cert.t1, cert.t2))
}

fn criterion_3() -> Outcome {
    let s = scenario("paper_s4_controlled.toml");
    let gains = s.gains.clone().ok_or("no gains")?;
    let crit = Criteria::new(&s.network, &s.weights, gains.beta, Mode::Theorem1).map_err(|e| e.to_string())?;
    let eps_ok = crit.epsilon_holds(&gains, 0.25);
    let eps_sup = crit.epsilon_sup(&gains).map_err(|e| e.to_string())?;
    let (bar, tilde) = crit.rho_bounds(&gains);
    let rho_ok = crit.rho_holds(&gains, 0.4);
    let detail = format!(
        "epsilon = 0.25 feasible: {eps_ok}; sup epsilon = {eps_sup:.6}; rho = 0.4 feasible: {rho_ok} \
         (strict bounds rho* < {bar:?}, rho_star < {tilde:?})"
    );
    check(eps_ok, detail.clone())?;
    check(eps_sup >= 0.25, detail.clone())?;
    check(rho_ok, detail.clone())?;
    Ok(detail)
}

/// Term-by-term evaluation of the mu / rho / eta thresholds with scalar
/// arithmetic only, for the example network (`lambda` from `s' <= 1/2`
/// times the mix, `gamma` from `sat' <= 1`).
struct ThresholdOracle {
    mu_bar: [f64; 2],
    mu_tilde: [f64; 2],
    rho_bar_base: [f64; 2],
    rho_tilde_base: [f64; 2],
    eta_bar: [f64; 2],
    eta_tilde: [f64; 2],
}

fn threshold_oracle(s: &Scenario, beta: f64) -> ThresholdOracle {
    let net = &s.network;
    let n = 2;
    let (xi, phi) = (s.weights.xi(), s.weights.phi());
    let d = net.d();
    let pos = |v: f64| v.max(0.0);
    // lambda[k] = (RR, RI, IR, II)
    let lam: Vec<[f64; 4]> = net
        .f()
        .iter()
        .map(|f| {
            let slope = match f.kind {
                ActivationKind::SigmoidPair => 0.5,
                ActivationKind::SaturatingLinear => 1.0,
            };
            [slope * f.mix[0], slope * f.mix[1], slope * f.mix[2], slope * f.mix[3]]
        })
        .collect();
    let gam: Vec<[f64; 4]> = net
        .g()
        .iter()
        .map(|g| {
            let slope = match g.kind {
                ActivationKind::SigmoidPair => 0.5,
                ActivationKind::SaturatingLinear => 1.0,
            };
            [slope * g.mix[0].abs(), slope * g.mix[1].abs(), slope * g.mix[2].abs(), slope * g.mix[3].abs()]
        })
        .collect();
    let a = |j: usize, k: usize| net.a().get(j, k);
    let b = |j: usize, k: usize| net.b().get(j, k);
    let q = 1.0 / (1.0 - beta);

    let mut o = ThresholdOracle {
        mu_bar: [0.0; 2],
        mu_tilde: [0.0; 2],
        rho_bar_base: [0.0; 2],
        rho_tilde_base: [0.0; 2],
        eta_bar: [0.0; 2],
        eta_tilde: [0.0; 2],
    };
    for j in 0..n {
        let ajj = a(j, j);
        let [rr, ri, ir, ii] = lam[j];

        let mut mb = -d[j] + pos(ajj.re) * rr + pos(-ajj.im) * ir + phi[j] / xi[j] * (ajj.re.abs() * ri + ajj.im.abs() * ii);
        let mut mt = -d[j] + xi[j] / phi[j] * (ajj.im.abs() * rr + ajj.re.abs() * ir) + pos(ajj.im) * ri + pos(ajj.re) * ii;
        let mut rb = -d[j] + pos(ajj.re) * rr + pos(-ajj.im) * ir
            + (xi[j] / phi[j]).powf(1.0 / (beta - 1.0)) * (ajj.re.abs() * ri + ajj.im.abs() * ii);
        let mut rt = -d[j] + pos(ajj.im) * ri + pos(ajj.re) * ii
            + (phi[j] / xi[j]).powf(1.0 / (beta - 1.0)) * (ajj.im.abs() * rr + ajj.re.abs() * ir);
        for k in 0..n {
            let [krr, kri, kir, kii] = lam[k];
            let (ar, ai) = (a(j, k).re.abs(), a(j, k).im.abs());
            if k != j {
                // bar Lambda_k = [[RR, RI], [IR, II]], tilde Lambda_k = [[IR, II], [RR, RI]]
                mb += (ar * (krr * xi[k] + kri * phi[k]) + ai * (kir * xi[k] + kii * phi[k])) / xi[j];
                mt += (ar * (kir * xi[k] + kii * phi[k]) + ai * (krr * xi[k] + kri * phi[k])) / phi[j];
                let (xq, pq) = (xi[k].powf(q), phi[k].powf(q));
                rb += xi[j].powf(1.0 / (beta - 1.0)) * (ar * (krr * xq + kri * pq) + ai * (kir * xq + kii * pq));
                rt += phi[j].powf(1.0 / (beta - 1.0)) * (ar * (kir * xq + kii * pq) + ai * (krr * xq + kri * pq));
            }
            let [grr, gri, gir, gii] = gam[k];
            let (br, bi) = (b(j, k).re.abs(), b(j, k).im.abs());
            mb += (br * (grr * xi[k] + gri * phi[k]) + bi * (gir * xi[k] + gii * phi[k])) / xi[j];
            mt += (br * (gir * xi[k] + gii * phi[k]) + bi * (grr * xi[k] + gri * phi[k])) / phi[j];
            o.eta_bar[j] += br * (grr + gri) + bi * (gir + gii);
            o.eta_tilde[j] += br * (gir + gii) + bi * (grr + gri);
        }
        o.eta_bar[j] += 2.0 * net.h()[j].re.abs();
        o.eta_tilde[j] += 2.0 * net.h()[j].im.abs();
        o.mu_bar[j] = mb;
        o.mu_tilde[j] = mt;
        o.rho_bar_base[j] = rb;
        o.rho_tilde_base[j] = rt;
    }
    o
}

fn criterion_4() -> Outcome {
    let s = scenario("paper_s4_controlled.toml");
    let (report, _) = run_verify(&s, Some(Mode::Theorem1)).map_err(|e| e.to_string())?;
    check(report.admissible, format!("gains rejected: {:?}", report.verdict))?;
    let oracle = threshold_oracle(&s, 0.5);
    for (j, t) in report.thresholds.iter().enumerate() {
        for (name, got, want) in [
            ("mu_bar_min", t.mu_bar_min, oracle.mu_bar[j]),
            ("mu_tilde_min", t.mu_tilde_min, oracle.mu_tilde[j]),
            ("rho_bar_base", t.rho_bar_base, oracle.rho_bar_base[j]),
            ("rho_tilde_base", t.rho_tilde_base, oracle.rho_tilde_base[j]),
            ("eta_bar_min", t.eta_bar_min, oracle.eta_bar[j]),
            ("eta_tilde_min", t.eta_tilde_min, oracle.eta_tilde[j]),
        ] {
            check((got - want).abs() <= 1e-10, format!("{name}[{j}] = {got}, oracle {want}"))?;
        }
    }
    let printed = ["mu_bar_min[0]", "mu_tilde_min[0]", "mu_bar_min[1]", "mu_tilde_min[1]"];
    let rows: Vec<_> = report
        .reference
        .iter()
        .filter(|r| printed.contains(&r.quantity.as_str()))
        .collect();
    check(rows.len() == 4, "published mu values missing from the report")?;
    let json = report.to_json();
    check(json.contains("\"matches\": false"), "no mismatch marker in the JSON report")?;
    Ok(rows
        .iter()
        .map(|r| {
            format!(
                "{} {:.6} vs published {} ({})",
                r.quantity,
                r.computed,
                r.published,
                if r.matches { "match" } else { "mismatch" }
            )
        })
        .collect::<Vec<_>>()
        .join("; "))
}

fn controlled_run() -> Trajectory {
    let s = scenario("paper_s4_controlled.toml");
    assert_eq!(s.sim.dt, 1e-4);
    assert_eq!(s.sim.t_end, 30.0);
    run_simulate(&s, std::io::sink()).expect("controlled run").0
}

fn criterion_5(traj: &Trajectory) -> Outcome {
    let ts = traj.settling_time.ok_or("never settled")?;
    check(ts <= T2_PUBLISHED, format!("settling time {ts}"))?;
    let late = (0..traj.len())
        .filter(|&i| traj.times[i] >= T2_PUBLISHED)
        .map(|i| traj.max_error(i))
        .fold(0.0, f64::max);
    check(late < 1e-2, format!("max |e| after T2 = {late}"))?;
    Ok(format!("settling time {ts:.4} <= {T2_PUBLISHED}; max |e| for t >= T2 = {late:.3e}"))
}

fn criterion_6(traj: &Trajectory) -> Outcome {
    let after_t1 = (0..traj.len())
        .filter(|&i| traj.times[i] >= T1_PUBLISHED)
        .map(|i| traj.max_error(i))
        .fold(0.0, f64::max);
    check(after_t1 <= 1.0 + 1e-3, format!("max |e| after T1 = {after_t1}"))?;

    let below = (0..traj.len()).find(|&i| traj.norm_e1[i] < 1.0).ok_or("norm never below 1")?;
    for i in 1..=below {
        let (prev, cur) = (traj.monitor_m[i - 1], traj.monitor_m[i]);
        check(cur <= prev * (1.0 + 1e-4), format!("M rises at t = {}: {prev} -> {cur}", traj.times[i]))?;
    }
    let settle = traj.settling_time.ok_or("never settled")?;
    let mut checked = 0;
    let mut prev: Option<f64> = None;
    for i in below..traj.len() {
        if traj.times[i] > settle {
            break;
        }
        if let Some(v) = traj.monitor_v[i] {
            if let Some(p) = prev {
                check(v <= p * (1.0 + 1e-4), format!("V rises at t = {}: {p} -> {v}", traj.times[i]))?;
                checked += 1;
            }
            prev = Some(v);
        }
    }
    Ok(format!(
        "max |e| after T1 = {after_t1:.3e}; M non-increasing over {below} samples up to t = {}; \
         V non-increasing over {checked} steps up to settling",
        traj.times[below]
    ))
}

fn criterion_7() -> Outcome {
    let s = scenario("paper_s4_uncontrolled.toml");
    check(s.gains.is_none() && s.sim.t_end == 50.0, "scenario is not the uncontrolled 50 s run")?;
    let (traj, _) = run_simulate(&s, std::io::sink()).map_err(|e| e.to_string())?;
    let last = *traj.norm_e1.last().ok_or("empty trajectory")?;
    check(last > 0.1, format!("final norm {last}"))?;
    Ok(format!("norm_e1(50) = {last:.4}"))
}

fn criterion_8() -> Outcome {
    let s = scenario("paper_s4_weak_gains.toml");
    let (report, _) = run_verify(&s, None).map_err(|e| e.to_string())?;
    check(!report.admissible, "weak gains were accepted")?;
    check(s.sim.t_end == 60.0, "t_end is not 60")?;
    let (traj, _) = run_simulate(&s, std::io::sink()).map_err(|e| e.to_string())?;
    let ts = traj.settling_time.ok_or("never settled")?;
    let last = traj.max_error(traj.len() - 1);
    check(last < 1e-2, format!("final max |e| {last}"))?;
    Ok(format!(
        "rejected ({}); settling time {ts:.4}, final max |e| {last:.3e}",
        report.verdict.map(|v| v.violations.join(", ")).unwrap_or_default()
    ))
}

fn complex(v: SplitComplex) -> Complex64 {
    Complex64::new(v.re, v.im)
}

fn prop_product_rule() -> Result<(), String> {
    runner()
        .run(&(-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64), |(a, b, c, d)| {
            let p = product_split(SplitComplex::new(a, b), SplitComplex::new(c, d));
            let want = Complex64::new(a, b) * Complex64::new(c, d);
            let scale = want.norm().max(1.0);
            prop_assert!((p.re - want.re).abs() <= 1e-12 * scale && (p.im - want.im).abs() <= 1e-12 * scale);
            Ok(())
        })
        .map_err(|e| format!("product rule: {e}"))
}

fn activation_strategy() -> impl Strategy<Value = ActivationSpec> {
    (prop::bool::ANY, prop::array::uniform4(-3.0..3.0f64)).prop_map(|(sig, mix)| {
        if sig {
            ActivationSpec::sigmoid_pair(mix)
        } else {
            ActivationSpec::saturating_linear(mix)
        }
    })
}

fn prop_oddness() -> Result<(), String> {
    runner()
        .run(&(activation_strategy(), -20.0..20.0f64, -20.0..20.0f64), |(f, re, im)| {
            let x = SplitComplex::new(re, im);
            let (p, m) = (f.eval(x), f.eval(-x));
            prop_assert!((p.re + m.re).abs() <= 1e-12 && (p.im + m.im).abs() <= 1e-12);
            Ok(())
        })
        .map_err(|e| format!("oddness: {e}"))
}

fn grid_lipschitz() -> Result<(), String> {
    let h = 1e-6;
    let mixes = [[1.0, 2.0, 2.0, 1.0], [1.0, 1.0, 1.0, 1.0], [-0.7, 1.3, 0.2, -2.5]];
    for mix in mixes {
        for f in [ActivationSpec::sigmoid_pair(mix), ActivationSpec::saturating_linear(mix)] {
            let bounds = f.analytic_bounds().bar.0;
            for i in 0..=80 {
                for k in 0..=80 {
                    let x = SplitComplex::new(-4.0 + 0.1 * i as f64, -4.0 + 0.1 * k as f64);
                    let dre = f.eval(x + SplitComplex::new(h, 0.0)) - f.eval(x - SplitComplex::new(h, 0.0));
                    let dim = f.eval(x + SplitComplex::new(0.0, h)) - f.eval(x - SplitComplex::new(0.0, h));
                    let fd = [
                        [dre.re / (2.0 * h), dim.re / (2.0 * h)],
                        [dre.im / (2.0 * h), dim.im / (2.0 * h)],
                    ];
                    for r in 0..2 {
                        for c in 0..2 {
                            if fd[r][c].abs() > bounds[r][c] + 1e-6 {
                                return Err(format!("{f:?} at {x:?}: |df| {} > {}", fd[r][c], bounds[r][c]));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn prop_rhs_equivalence(net: &NetworkSpec) -> Result<(), String> {
    let n = net.n();
    let state = prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n);
    let delayed = prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n * n);
    runner()
        .run(&(state, delayed), |(s, dl)| {
            let x: Vec<_> = s.iter().map(|&(r, i)| SplitComplex::new(r, i)).collect();
            let xd: Vec<_> = dl.iter().map(|&(r, i)| SplitComplex::new(r, i)).collect();
            let got = net.master_rhs(&x, &xd);
            for j in 0..n {
                let mut want = -net.d()[j] * complex(x[j]) + complex(net.h()[j]);
                for k in 0..n {
                    want += complex(net.a().get(j, k)) * complex(net.f()[k].eval(x[k]));
                    want += complex(net.b().get(j, k)) * complex(net.g()[k].eval(xd[j * n + k]));
                }
                let scale = want.norm().max(1.0);
                prop_assert!((got[j].re - want.re).abs() <= 1e-12 * scale);
                prop_assert!((got[j].im - want.im).abs() <= 1e-12 * scale);
            }
            Ok(())
        })
        .map_err(|e| format!("rhs equivalence: {e}"))
}

fn anti_symmetry(s: &Scenario) -> Result<f64, String> {
    let n = s.network.n();
    let phi = s.network.phi_init().to_vec();
    let psi: Vec<_> = phi.iter().map(|&v| -v).collect();
    let net = s
        .network
        .with_initial(phi, psi)
        .and_then(|net| net.with_inputs(vec![SplitComplex::ZERO; n]))
        .map_err(|e| e.to_string())?;
    let cfg = SimConfig {
        dt: 1e-3,
        t_end: 10.0,
        record_stride: 1,
        ..SimConfig::default()
    };
    let monitors = MonitorParams {
        weights: NormWeights::ones(n),
        epsilon: 0.25,
        rho: 0.4,
        beta: 0.5,
    };
    let traj = simulate(&net, None, &monitors, &cfg).map_err(|e| e.to_string())?;
    let worst = (0..traj.len()).map(|i| traj.max_error(i)).fold(0.0, f64::max);
    if worst < 1e-8 {
        Ok(worst)
    } else {
        Err(format!("anti-symmetry broken: max |e| = {worst}"))
    }
}

fn prop_unit_weights() -> Result<(), String> {
    runner()
        .run(&prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 1..8), |parts| {
            let e: Vec<_> = parts.iter().map(|&(r, i)| SplitComplex::new(r, i)).collect();
            let w = NormWeights::ones(e.len());
            prop_assert_eq!(xi_inf_norm(&w, &e), max_component(&e));
            Ok(())
        })
        .map_err(|e| format!("unit weights: {e}"))
}

fn dt_halving(s: &Scenario) -> Result<(f64, f64), String> {
    let settle = |dt: f64, stride: usize| -> Result<f64, String> {
        let mut s = s.clone();
        s.sim.dt = dt;
        s.sim.record_stride = stride;
        let (traj, _) = run_simulate(&s, std::io::sink()).map_err(|e| e.to_string())?;
        traj.settling_time.ok_or_else(|| format!("dt = {dt}: never settled"))
    };
    let coarse = settle(1e-4, 100)?;
    let fine = settle(5e-5, 200)?;
    if (coarse - fine).abs() < 0.05 * coarse {
        Ok((coarse, fine))
    } else {
        Err(format!("settling time {coarse} vs {fine} at half step"))
    }
}

fn criterion_9() -> Outcome {
    let s = scenario("paper_s4_controlled.toml");
    prop_product_rule()?;
    prop_oddness()?;
    grid_lipschitz()?;
    prop_rhs_equivalence(&s.network)?;
    let worst = anti_symmetry(&s)?;
    prop_unit_weights()?;
    let (coarse, fine) = dt_halving(&s)?;
    Ok(format!(
        "product rule, oddness, finite-difference bounds, rhs equivalence, unit weights ok; \
         anti-symmetric max |e| = {worst:.1e}; settling {coarse:.4} vs {fine:.4} at half step"
    ))
}

fn main() {
    let mut failures = 0;
    let mut report = |id: u32, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {id}. {title} [{secs:.2}s]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {id}. {title} [{secs:.2}s]: {detail}");
            }
        }
    };
    report(1, "eta thresholds", &mut criterion_1);
    report(2, "certificate with epsilon = 0.25, rho = 0.4", &mut criterion_2);
    report(3, "epsilon / rho feasibility for the example gains", &mut criterion_3);
    report(4, "gain admissibility and threshold oracle", &mut criterion_4);
    let traj = catch_unwind(controlled_run).ok();
    report(5, "controlled convergence", &mut || criterion_5(traj.as_ref().ok_or("controlled run failed")?));
    report(6, "phase-one bound and monitor monotonicity", &mut || {
        criterion_6(traj.as_ref().ok_or("controlled run failed")?)
    });
    report(7, "uncontrolled pair stays away from anti-synchrony", &mut criterion_7);
    report(8, "weak gains rejected yet settle", &mut criterion_8);
    report(9, "property suites", &mut criterion_9);
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
