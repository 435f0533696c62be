//! Acceptance criteria. Each criterion prints one PASS or FAIL line; the
//! test fails if any criterion does.

use std::time::Instant;

use hcrsn::experiment::{experiment_rows, ExperimentConfig, ExperimentId};
use hcrsn::scenario::generate_scenario;
use hcrsn_core::allocation::{run_jtpa, select_channels};
use hcrsn_core::detection::{
    detection_threshold, false_alarm_prob, fused_detection, fused_false_alarm, DetectorConfig,
};
use hcrsn_core::numerics::{kkt_residual, solve_lp, solve_min_energy_power, LpProblem, LpStatus, Optimize, RowSense};
use hcrsn_core::{Matrix, RngStream};

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn run(cfg: &ExperimentConfig) -> Self {
        let (header, rows) = experiment_rows(cfg).expect("experiment runs");
        Self { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    fn f(&self, row: &[String], name: &str) -> f64 {
        row[self.col(name)].parse().expect("numeric cell")
    }

    /// Rows grouped by sweep value, in sweep order.
    fn by_sweep(&self) -> Vec<(f64, Vec<&Vec<String>>)> {
        let mut groups: Vec<(f64, Vec<&Vec<String>>)> = Vec::new();
        for r in &self.rows {
            let v: f64 = r[1].parse().unwrap();
            match groups.iter_mut().find(|g| g.0 == v) {
                Some(g) => g.1.push(r),
                None => groups.push((v, vec![r])),
            }
        }
        groups
    }

    /// Rows grouped by (seed, sweep value), in file order.
    fn runs(&self) -> Vec<Vec<&Vec<String>>> {
        let mut out: Vec<Vec<&Vec<String>>> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some(g) if g[0][0] == r[0] && g[0][1] == r[1] => g.push(r),
                _ => out.push(vec![r]),
            }
        }
        out
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Default)]
struct Report {
    failed: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

fn ce_near_optimality(r: &mut Report) {
    let start = Instant::now();
    let t = Table::run(&ExperimentConfig::new(ExperimentId::CeVsExhaustive));
    let secs = start.elapsed().as_secs_f64();
    let mut worst: f64 = f64::INFINITY;
    let mut random_ratio = f64::NAN;
    for (k, rows) in t.by_sweep() {
        let ratios: Vec<f64> = rows
            .iter()
            .map(|row| t.f(row, "ce_daatc_s") / t.f(row, "exhaustive_daatc_s"))
            .collect();
        worst = worst.min(median(ratios));
        if k == 3.0 {
            random_ratio = median(
                rows.iter()
                    .map(|row| t.f(row, "ce_daatc_s") / t.f(row, "random_mean_daatc_s"))
                    .collect(),
            );
        }
    }
    r.check(
        "AC1a ce/exhaustive",
        worst >= 0.85,
        format!("lowest median ratio over K=2,3,4 is {worst:.4} (need >= 0.85)"),
    );
    r.check(
        "AC1b ce/random",
        random_ratio >= 2.0,
        format!("median CE / mean random DAATC at K=3 is {random_ratio:.4} (need >= 2)"),
    );
    r.check("AC1c runtime", secs < 60.0, format!("{secs:.2} s (need < 60 s)"));
}

fn ce_convergence(r: &mut Report) {
    let mut within = (0usize, 0usize);
    let mut monotone = Vec::new();
    for id in [ExperimentId::CeConvergenceEh, ExperimentId::CeConvergenceTau] {
        let t = Table::run(&ExperimentConfig::new(id));
        let mut finals: Vec<(f64, f64)> = Vec::new();
        for run in t.runs() {
            let best: Vec<f64> = run.iter().map(|row| t.f(row, "best_objective_s")).collect();
            let last = *best.last().unwrap();
            let at30 = best[best.len().min(30) - 1];
            if id == ExperimentId::CeConvergenceEh {
                within.1 += 1;
                if (last - at30).abs() <= 0.01 * last.abs() {
                    within.0 += 1;
                }
            }
            finals.push((run[0][1].parse().unwrap(), last));
        }
        let mut sweep: Vec<f64> = finals.iter().map(|f| f.0).collect();
        sweep.dedup();
        sweep.sort_by(f64::total_cmp);
        sweep.dedup();
        let medians: Vec<f64> = sweep
            .iter()
            .map(|&v| median(finals.iter().filter(|f| f.0 == v).map(|f| f.1).collect()))
            .collect();
        monotone.push((id, medians));
    }
    let share = within.0 as f64 / within.1 as f64;
    r.check(
        "AC2a ce within 1% by iteration 30",
        share >= 0.8,
        format!("{}/{} runs ({:.0}%, need >= 80%)", within.0, within.1, 100.0 * share),
    );
    for (id, medians) in monotone {
        let ok = medians.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs());
        r.check(
            &format!("AC2b {} non-decreasing", id.sweep_name()),
            ok,
            format!("median DAATC {medians:.4?}"),
        );
    }
}

fn ce_vs_greedy(r: &mut Report) {
    for id in [ExperimentId::CeVsGreedyEh, ExperimentId::CeVsGreedyM] {
        let t = Table::run(&ExperimentConfig::new(id));
        let mut bad = Vec::new();
        for (v, rows) in t.by_sweep() {
            let ce = median(rows.iter().map(|row| t.f(row, "ce_daatc_s")).collect());
            let greedy = median(rows.iter().map(|row| t.f(row, "greedy_daatc_s")).collect());
            if ce < greedy {
                bad.push(format!("{v}: {ce:.4} < {greedy:.4}"));
            }
        }
        r.check(
            &format!("AC3 ce >= greedy over {}", id.sweep_name()),
            bad.is_empty(),
            if bad.is_empty() { "median CE at least median greedy everywhere".into() } else { bad.join("; ") },
        );
    }
}

fn jtpa_vs_optimal(r: &mut Report) {
    let t = Table::run(&ExperimentConfig::new(ExperimentId::JtpaVsOptimalRandom));
    let mut ratios = Vec::new();
    let mut random_ok = true;
    let mut random_detail = Vec::new();
    for (d, rows) in t.by_sweep() {
        let ratio = median(
            rows.iter()
                .map(|row| t.f(row, "jtpa_energy_j") / t.f(row, "optimal_energy_j"))
                .collect(),
        );
        ratios.push(ratio);
        let mean = |c: &str| rows.iter().map(|row| t.f(row, c)).sum::<f64>() / rows.len() as f64;
        let (j, rnd) = (mean("jtpa_energy_j"), mean("random_mean_energy_j"));
        random_ok &= j <= rnd;
        random_detail.push(format!("D={d}: {:.3}", j / rnd));
    }
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    r.check(
        "AC4a jtpa/optimal",
        worst <= 1.2,
        format!("median ratios per demand {ratios:.4?} (need <= 1.2)"),
    );
    r.check(
        "AC4b jtpa <= random",
        random_ok,
        format!("mean JTPA / mean random energy {}", random_detail.join(", ")),
    );
}

fn jtpa_convergence(r: &mut Report) {
    let mut cfg = ExperimentConfig::new(ExperimentId::JtpaConvergence);
    cfg.seeds = (0..10).collect();
    let t = Table::run(&cfg);
    let mut worst_rise: f64 = 0.0;
    let mut early = Vec::new();
    for run in t.runs() {
        let e: Vec<f64> = run.iter().map(|row| t.f(row, "energy_j")).collect();
        for w in e.windows(2) {
            worst_rise = worst_rise.max((w[1] - w[0]) / e[0]);
        }
        let total = e[0] - e.last().unwrap();
        let by6 = e[0] - e[e.len().min(7) - 1];
        early.push(if total > 0.0 { by6 / total } else { 1.0 });
    }
    r.check(
        "AC5a jtpa non-increasing",
        worst_rise <= 1e-10,
        format!("largest rise {worst_rise:.2e} of the starting energy (need <= 1e-10)"),
    );
    let share = median(early);
    r.check(
        "AC5b jtpa early decrease",
        share >= 0.9,
        format!("median share of decrease within 6 iterations {share:.4} (need >= 0.9)"),
    );
    let mut late = Vec::new();
    for &seed in &cfg.seeds {
        for &d in &cfg.sweep {
            let mut settings = cfg.settings;
            settings.demand_bits = d;
            let rng = RngStream::new(seed).substream(1);
            let s = generate_scenario(&cfg.geometry, cfg.counts.into(), &settings, &mut rng.clone()).unwrap();
            let inst = select_channels(&s, &(0..s.num_channels).collect::<Vec<_>>()).unwrap();
            let trace = run_jtpa(&inst, cfg.jtpa.stop_epsilon, cfg.jtpa.max_iterations).unwrap();
            if !trace.converged || trace.iterations() > 15 {
                late.push(format!("seed {seed} D={d}: {} iterations", trace.iterations()));
            }
        }
    }
    r.check(
        "AC5c jtpa converged by iteration 15",
        late.is_empty(),
        if late.is_empty() { "all runs".into() } else { late.join("; ") },
    );
}

fn jtpa_vs_pmax(r: &mut Report) {
    let mut above = 0;
    let mut total = 0;
    let mut medians = Vec::new();
    for id in [ExperimentId::JtpaVsPmaxDemand, ExperimentId::JtpaVsPmaxPower] {
        let t = Table::run(&ExperimentConfig::new(id));
        for row in &t.rows {
            total += 1;
            if t.f(row, "jtpa_energy_j") > t.f(row, "pmax_energy_j") {
                above += 1;
            }
        }
        if id == ExperimentId::JtpaVsPmaxPower {
            medians = t
                .by_sweep()
                .into_iter()
                .map(|(_, rows)| median(rows.iter().map(|row| t.f(row, "jtpa_energy_j")).collect()))
                .collect();
        }
    }
    r.check(
        "AC6a jtpa <= pmax scheme",
        above == 0,
        format!("{above} of {total} instances above the p_max scheme"),
    );
    let strict = medians.windows(2).all(|w| w[1] < w[0]);
    r.check(
        "AC6b jtpa decreasing in p_max",
        strict,
        format!("median energy over p_max 1..5 mW {:?}", medians.iter().map(|m| format!("{m:.6e}")).collect::<Vec<_>>()),
    );
}

fn collision(r: &mut Report) {
    let start = Instant::now();
    let t = Table::run(&ExperimentConfig::new(ExperimentId::CollisionValidation));
    let secs = start.elapsed().as_secs_f64();
    let worst = t.rows.iter().map(|row| t.f(row, "z_score").abs()).fold(0.0, f64::max);
    r.check(
        "AC7a collision rate",
        worst <= 3.0 && t.rows.len() == 21,
        format!("{} cells, largest |z| {worst:.3} (need <= 3)", t.rows.len()),
    );
    r.check("AC7b runtime", secs < 60.0, format!("{secs:.2} s (need < 60 s)"));
}

/// Solves the square system by elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for i in 0..n {
            if i != col {
                let f = a[i][col] / a[col][col];
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Best vertex of `{A x <= b, x >= 0}` for maximizing `c x`.
fn vertex_optimum(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        rows.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    let m = rows.len();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<&(Vec<f64>, f64)> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| &rows[i]).collect();
        let Some(x) = solve_square(chosen.iter().map(|r| r.0.clone()).collect(), chosen.iter().map(|r| r.1).collect())
        else {
            continue;
        };
        let feasible = rows
            .iter()
            .all(|(r, rhs)| r.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>() <= rhs + 1e-9 * (1.0 + rhs.abs()));
        if feasible {
            let v: f64 = c.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}

/// Minimum two-channel energy by a grid over the first power, refined by
/// golden-section search; the second power is fixed by the demand.
fn grid_energy(t: [f64; 2], g: [f64; 2], demand: f64, w: f64, p_max: f64) -> Option<f64> {
    let bits = |i: usize, p: f64| t[i] * w * (g[i] * p).ln_1p() / std::f64::consts::LN_2;
    let energy = |p1: f64| -> Option<f64> {
        let rest = demand - bits(0, p1);
        let p2 = if rest <= 0.0 {
            0.0
        } else {
            ((rest * std::f64::consts::LN_2 / (t[1] * w)).exp_m1()) / g[1]
        };
        (p2 <= p_max * (1.0 + 1e-12)).then(|| t[0] * p1 + t[1] * p2)
    };
    let steps = 4000;
    let mut best: Option<(f64, usize)> = None;
    for i in 0..=steps {
        if let Some(e) = energy(p_max * i as f64 / steps as f64) {
            if best.is_none_or(|b| e < b.0) {
                best = Some((e, i));
            }
        }
    }
    let (mut e_best, i) = best?;
    let (mut lo, mut hi) = (
        p_max * i.saturating_sub(1) as f64 / steps as f64,
        p_max * (i + 1).min(steps) as f64 / steps as f64,
    );
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        let (ea, eb) = (energy(a).unwrap_or(f64::INFINITY), energy(b).unwrap_or(f64::INFINITY));
        e_best = e_best.min(ea).min(eb);
        if ea < eb {
            hi = b;
        } else {
            lo = a;
        }
    }
    Some(e_best)
}

fn solver_oracles(r: &mut Report) {
    let mut rng = RngStream::new(2024);
    let mut lp_err: f64 = 0.0;
    let mut lp_mismatch = 0;
    for _ in 0..100 {
        let n = 2 + rng.below(2) as usize;
        let m = 2 + rng.below(3) as usize;
        let c: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 2.0)).collect();
        let mut a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.uniform_in(-1.0, 2.0)).collect()).collect();
        let mut b: Vec<f64> = (0..m).map(|_| rng.uniform_in(0.5, 5.0)).collect();
        // keeps the region bounded
        a.push(vec![1.0; n]);
        b.push(10.0);
        let lp = LpProblem::new(
            Optimize::Maximize,
            c.clone(),
            Matrix::from_rows(&a).unwrap(),
            b.clone(),
            vec![RowSense::Le; m + 1],
        )
        .unwrap();
        let sol = solve_lp(&lp).unwrap();
        let want = vertex_optimum(&c, &a, &b).unwrap();
        if sol.status != LpStatus::Optimal {
            lp_mismatch += 1;
            continue;
        }
        lp_err = lp_err.max((sol.objective - want).abs() / want.abs().max(1.0));
        lp_err = lp_err.max(lp.max_violation(&sol.values));
    }
    r.check(
        "AC8a lp vs vertex enumeration",
        lp_mismatch == 0 && lp_err <= 1e-8,
        format!("{lp_mismatch} status mismatches, largest error {lp_err:.2e} (need <= 1e-8)"),
    );

    let w = 6e6;
    let p_max = 0.1;
    let mut wf_err: f64 = 0.0;
    let mut kkt: f64 = 0.0;
    let mut cases = 0;
    while cases < 100 {
        let t = [rng.uniform_in(0.005, 0.095), rng.uniform_in(0.005, 0.095)];
        let g = [10f64.powf(rng.uniform_in(1.0, 4.0)), 10f64.powf(rng.uniform_in(1.0, 4.0))];
        let cap: f64 = (0..2).map(|i| t[i] * w * (g[i] * p_max).ln_1p() / std::f64::consts::LN_2).sum();
        let demand = cap * rng.uniform_in(0.05, 0.95);
        let Some(want) = grid_energy(t, g, demand, w, p_max) else { continue };
        cases += 1;
        let sol = solve_min_energy_power(&t, &g, demand, w, p_max).unwrap();
        wf_err = wf_err.max((sol.energy - want).abs() / want);
        kkt = kkt.max(kkt_residual(&sol, &t, &g, w, p_max));
    }
    r.check(
        "AC8b water-filling vs grid",
        wf_err <= 1e-4,
        format!("largest relative error {wf_err:.2e} (need <= 1e-4)"),
    );
    r.check("AC8c kkt residual", kkt <= 1e-7, format!("largest {kkt:.2e} (need <= 1e-7)"));
}

fn detection_math(r: &mut Report) {
    let mut rng = RngStream::new(7);
    let mut err: f64 = 0.0;
    for _ in 0..100 {
        let pf = rng.uniform_in(1e-4, 0.5);
        let cfg = DetectorConfig::new(pf, 10 + rng.below(5000) as u32);
        err = err.max((false_alarm_prob(&cfg, detection_threshold(&cfg)) - pf).abs());
    }
    r.check("AC9a threshold round trip", err <= 1e-9, format!("largest error {err:.2e} (need <= 1e-9)"));

    let mut violations = 0;
    for _ in 0..1000 {
        let cfg = DetectorConfig::new(rng.uniform_in(0.01, 0.2), 50 + rng.below(500) as u32);
        let big: Vec<f64> = (0..1 + rng.below(8)).map(|_| 10f64.powf(rng.uniform_in(-3.0, 0.5))).collect();
        let small: Vec<f64> = big.iter().copied().filter(|_| rng.bernoulli(0.5)).collect();
        let (ds, db) = (
            fused_detection(&cfg, small.iter().copied()),
            fused_detection(&cfg, big.iter().copied()),
        );
        let (fs, fb) = (
            fused_false_alarm(small.len(), cfg.target_false_alarm),
            fused_false_alarm(big.len(), cfg.target_false_alarm),
        );
        if db < ds || fb < fs {
            violations += 1;
        }
    }
    r.check(
        "AC9b fusion monotone under inclusion",
        violations == 0,
        format!("{violations} of 1000 nested pairs violate"),
    );
}

#[test]
fn acceptance() {
    let mut r = Report::default();
    ce_near_optimality(&mut r);
    ce_convergence(&mut r);
    ce_vs_greedy(&mut r);
    jtpa_vs_optimal(&mut r);
    jtpa_convergence(&mut r);
    jtpa_vs_pmax(&mut r);
    collision(&mut r);
    solver_oracles(&mut r);
    detection_math(&mut r);
    assert!(r.failed.is_empty(), "failed criteria: {:?}", r.failed);
}
