//! Acceptance checks. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per check and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use adequacy::bootstrap::{bootstrap_ci, BootstrapSpec, Scheme};
use adequacy::capvalue::{efc, elcc};
use adequacy::cli::{Config, Scenario};
use adequacy::distribution::{build_copt, GenUnit};
use adequacy::ingest::{BlockKind, PairedSeries};
use adequacy::jointmodel::{loess_fit, JointModel, ModelKind, ScalingFunction};
use adequacy::risk;
use adequacy::synth;
use chrono::{Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------------------------------------------------------------------------
// independent oracles

/// Distribution of the sum of two-state units by enumerating all `2^n`
/// availability states. Capacities are rounded half-up to whole MW.
fn enumerate_copt(units: &[GenUnit]) -> BTreeMap<i64, f64> {
    let caps: Vec<i64> = units.iter().map(|u| (u.capacity_mw + 0.5).floor() as i64).collect();
    let mut out = BTreeMap::new();
    for state in 0u32..(1 << units.len()) {
        let mut cap = 0;
        let mut p = 1.0;
        for (i, u) in units.iter().enumerate() {
            if state & (1 << i) != 0 {
                cap += caps[i];
                p *= u.availability;
            } else {
                p *= 1.0 - u.availability;
            }
        }
        *out.entry(cap).or_insert(0.0) += p;
    }
    out
}

/// Cumulative table of enumerated atoms, for `Pr(X <= x)` lookups.
fn cumulative(atoms: &BTreeMap<i64, f64>) -> Vec<(f64, f64)> {
    let mut acc = 0.0;
    atoms
        .iter()
        .map(|(&c, &p)| {
            acc += p;
            (c as f64, acc)
        })
        .collect()
}

fn oracle_cdf(table: &[(f64, f64)], x: f64) -> f64 {
    let k = table.partition_point(|a| a.0 <= x + 1e-9);
    if k == 0 {
        0.0
    } else {
        table[k - 1].1
    }
}

/// Net-demand atoms `(value, weight)` of a model, written out directly.
fn oracle_atoms(kind: ModelKind, d: &[f64], y: &[f64], sf: &ScalingFunction) -> Vec<(f64, f64)> {
    match kind {
        ModelKind::Hindcast => d.iter().zip(y).map(|(dt, yt)| (dt - yt, 1.0 / d.len() as f64)).collect(),
        _ => {
            let w = 1.0 / (d.len() * y.len()) as f64;
            let mut out = Vec::new();
            for &dt in d {
                let l = if kind == ModelKind::Rescaled {
                    let dn = (dt - sf.demand_offset_mw) / sf.acs_ref_mw;
                    if dn <= sf.d1_norm {
                        sf.l1
                    } else if dn >= sf.d2_norm {
                        sf.l2
                    } else {
                        sf.l1 + (dn - sf.d1_norm) / (sf.d2_norm - sf.d1_norm) * (sf.l2 - sf.l1)
                    }
                } else {
                    1.0
                };
                for &ys in y {
                    out.push((dt - l * ys, w));
                }
            }
            out
        }
    }
}

fn random_units(rng: &mut ChaCha8Rng, n: usize, integer: bool) -> Vec<GenUnit> {
    (0..n)
        .map(|i| {
            let cap: f64 = if integer {
                rng.random_range(10..150) as f64
            } else {
                rng.random_range(1.0..400.0)
            };
            GenUnit::new(format!("g{i}"), cap, rng.random_range(0.6..0.99)).unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------------

fn copt_vs_enumeration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let units = random_units(&mut rng, n, false);
        let copt = build_copt(&units, 1.0).unwrap();
        let oracle = enumerate_copt(&units);
        let mut mine: BTreeMap<i64, f64> = BTreeMap::new();
        for (v, p) in copt.atoms() {
            mine.insert(v.round() as i64, p);
        }
        for (&v, &p) in &oracle {
            worst = worst.max((mine.get(&v).copied().unwrap_or(0.0) - p).abs());
        }
        for (&v, &p) in &mine {
            worst = worst.max((oracle.get(&v).copied().unwrap_or(0.0) - p).abs());
        }
    }
    outcome(worst <= 1e-12, format!("200 unit sets, max atom difference {worst:.2e}"))
}

fn lolp_vs_monte_carlo() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let draws = 10_000_000usize;
    let mut worst_z: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..20 {
        let n_units = rng.random_range(2..=6);
        let units = random_units(&mut rng, n_units, true);
        let total: f64 = units.iter().map(|u| u.capacity_mw).sum();
        let copt = build_copt(&units, 1.0).unwrap();
        let nd = rng.random_range(5..40);
        let ny = rng.random_range(5..40);
        let d: Vec<f64> = (0..nd).map(|_| rng.random_range(0.3..0.9) * total).collect();
        let installed = rng.random_range(0.05..0.5) * total;
        let y_nd: Vec<f64> = (0..nd).map(|_| rng.random_range(0.0..1.0) * installed).collect();
        let y_ny: Vec<f64> = (0..ny).map(|_| rng.random_range(0.0..1.0) * installed).collect();
        let acs = d.iter().copied().fold(0.0, f64::max) * 0.98;
        let sf = ScalingFunction::pessimistic(acs).unwrap();

        for kind in ModelKind::ALL {
            let y = if kind == ModelKind::Hindcast { &y_nd } else { &y_ny };
            let model = JointModel::build(kind, &d, y, Some(&sf)).unwrap();
            let p = risk::lolp(&copt, &model);
            let mut hits = 0usize;
            for _ in 0..draws {
                let t = rng.random_range(0..nd);
                let net = match kind {
                    ModelKind::Hindcast => d[t] - y[t],
                    ModelKind::Independence => d[t] - y[rng.random_range(0..ny)],
                    ModelKind::Rescaled => d[t] - sf.eval(d[t]).unwrap() * y[rng.random_range(0..ny)],
                };
                let mut x = 0.0;
                for u in &units {
                    if rng.random::<f64>() < u.availability {
                        x += u.capacity_mw;
                    }
                }
                if x <= net {
                    hits += 1;
                }
            }
            let est = hits as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let z = if se > 0.0 {
                (est - p).abs() / se
            } else if est == p {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
            checked += 1;
        }
    }
    outcome(
        worst_z <= 4.0,
        format!("{checked} systems x kinds, 1e7 draws each, worst deviation {worst_z:.2} SE"),
    )
}

/// Log-linear interpolation of grid risks, linear where either end is zero.
fn interp(grid: &[f64], v: f64) -> f64 {
    let k = v.floor() as usize;
    let th = v - k as f64;
    let (r0, r1) = (grid[k], grid[(k + 1).min(grid.len() - 1)]);
    if th == 0.0 {
        r0
    } else if r0 > 0.0 && r1 > 0.0 {
        ((1.0 - th) * r0.ln() + th * r1.ln()).exp()
    } else {
        (1.0 - th) * r0 + th * r1
    }
}

/// Scans `curve` on a 0.01 MW grid over `[0, hi]` for the set where it
/// crosses `target` and returns its midpoint. `rising` flips the direction.
fn scan_root(curve: &[f64], target: f64, hi: f64, rising: bool) -> f64 {
    let steps = (hi / 0.01).round() as usize;
    let (mut first, mut last) = (None, None);
    for i in 0..=steps {
        let v = i as f64 * 0.01;
        let r = interp(curve, v);
        let (past, before) = if rising { (r >= target, r <= target) } else { (r <= target, r >= target) };
        if past && first.is_none() {
            first = Some(v);
        }
        if before {
            last = Some(v);
        }
    }
    0.5 * (first.unwrap() + last.unwrap())
}

fn capvalue_identities_and_scan() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut notes = Vec::new();
    let mut pass = true;
    let mut worst_scan: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;

    for fixture in 0..10 {
        let n_units = rng.random_range(3..=8);
        let units = random_units(&mut rng, n_units, true);
        let total: f64 = units.iter().map(|u| u.capacity_mw).sum();
        let copt = build_copt(&units, 1.0).unwrap();
        let atoms_x = cumulative(&enumerate_copt(&units));
        let n = rng.random_range(10..40);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..0.85) * total).collect();
        let installed = rng.random_range(0.1..0.4) * total;
        let lf: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<f64> = lf.iter().map(|l| l * installed).collect();
        let kind = ModelKind::ALL[fixture % 3];
        let acs = d.iter().copied().fold(0.0, f64::max) * 0.97;
        let sf = ScalingFunction::pessimistic(acs).unwrap();
        let model = JointModel::build(kind, &d, &y, Some(&sf)).unwrap();

        // Identities, on a demand sample dense enough that every whole-MW
        // shift moves the risk (no flat stretch around the answer).
        let dense: Vec<f64> = (0..2000).map(|_| rng.random_range(0.4..0.85) * total).collect();
        let m = dense.len();
        let zero = JointModel::build(kind, &dense, &vec![0.0; m], Some(&sf)).unwrap();
        let e0 = efc(&copt, &zero, 0.1).unwrap().value_mw;
        let l0 = elcc(&copt, &zero, &zero, 0.1).unwrap().value_mw;
        worst_identity = worst_identity.max(e0.abs()).max(l0.abs());
        let c = (installed * 0.5).round();
        // rescaling shrinks wind at high demand, so constant wind is only
        // firm there when lambda is identically one
        let unit_lambda = ScalingFunction::identity(acs).unwrap();
        let firm = JointModel::build(kind, &dense, &vec![c; m], Some(&unit_lambda)).unwrap();
        let ec = efc(&copt, &firm, 0.1).unwrap().value_mw;
        let lc = elcc(&copt, &firm, &firm, 0.1).unwrap().value_mw;
        worst_identity = worst_identity.max((ec - c).abs()).max((lc - c).abs());

        // scan oracle for EFC and ELCC at 0.01 MW
        let net = oracle_atoms(kind, &d, &y, &sf);
        let target: f64 = net.iter().map(|(v, w)| w * oracle_cdf(&atoms_x, *v)).sum();
        let dmax = d.iter().copied().fold(0.0, f64::max);
        let hi = (dmax + 2.0).ceil();
        let firm_curve: Vec<f64> = (0..=hi as usize + 1)
            .map(|k| d.iter().map(|&dt| oracle_cdf(&atoms_x, dt - k as f64)).sum::<f64>() / n as f64)
            .collect();
        let tol = 0.01;
        let mine = efc(&copt, &model, tol).unwrap().value_mw;
        let scan = scan_root(&firm_curve, target, hi, false);
        worst_scan = worst_scan.max((mine - scan).abs());

        let baseline: f64 = d.iter().map(|&dt| oracle_cdf(&atoms_x, dt)).sum::<f64>() / n as f64;
        let min_net = net.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        let hi_e = (total - min_net + 2.0).ceil();
        let load_curve: Vec<f64> = (0..=hi_e as usize + 1)
            .map(|k| net.iter().map(|(v, w)| w * oracle_cdf(&atoms_x, v + k as f64)).sum())
            .collect();
        let zero_only = JointModel::hindcast(&d, &vec![0.0; n]).unwrap();
        let mine_l = elcc(&copt, &model, &zero_only, tol).unwrap().value_mw;
        let scan_l = scan_root(&load_curve, baseline, hi_e, true);
        worst_scan = worst_scan.max((mine_l - scan_l).abs());
        if (mine - scan).abs() > 0.02 || (mine_l - scan_l).abs() > 0.02 {
            notes.push(format!("fixture {fixture}: efc {mine} vs {scan}, elcc {mine_l} vs {scan_l}"));
        }
    }
    pass &= worst_identity <= 0.1 && worst_scan <= 0.02;
    outcome(
        pass,
        format!(
            "identities within {worst_identity:.3} MW (limit 0.1), scan agreement within {worst_scan:.4} MW (limit 0.02) {}",
            notes.join("; ")
        ),
    )
}

/// The synthetic GB-like scenario loaded through the file pipeline.
fn gb_scenario(dir: &Path) -> Scenario {
    let data = synth::generate(&synth::SynthParams::default()).unwrap();
    synth::write_fixture(&data, dir).unwrap();
    let cfg = Config::load(&dir.join("config.toml")).unwrap();
    Scenario::load(&cfg).unwrap()
}

fn build(s: &Scenario, kind: ModelKind, sf: &ScalingFunction, installed: f64) -> JointModel {
    let wind: Vec<f64> = s.series.load_factor().iter().map(|l| l * installed).collect();
    JointModel::build(kind, s.series.demand_mw(), &wind, Some(sf)).unwrap()
}

fn degeneracy(s: &Scenario) -> Outcome {
    let identity = ScalingFunction::identity(s.scaling.acs_ref_mw)
        .unwrap()
        .with_offset(s.scaling.demand_offset_mw)
        .unwrap();
    let mut same = true;
    for installed in [10_000.0, 30_000.0] {
        let ind = build(s, ModelKind::Independence, &identity, installed);
        let res = build(s, ModelKind::Rescaled, &identity, installed);
        let a = risk::season_indices(&s.copt, &ind, s.n_periods()).unwrap();
        let b = risk::season_indices(&s.copt, &res, s.n_periods()).unwrap();
        let ea = efc(&s.copt, &ind, 0.1).unwrap();
        let eb = efc(&s.copt, &res, 0.1).unwrap();
        same &= a.lolp.to_bits() == b.lolp.to_bits()
            && a.lole.to_bits() == b.lole.to_bits()
            && a.epu.to_bits() == b.epu.to_bits()
            && ea.value_mw.to_bits() == eb.value_mw.to_bits();
    }
    outcome(same, "lambda == 1 gives bit-identical LOLP, LOLE, EPU and EFC at 10 and 30 GW".into())
}

fn pessimistic_ordering(s: &Scenario) -> Outcome {
    let tol = 0.1;
    let mut pass = true;
    let mut rows = Vec::new();
    for installed in (0..=6).map(|k| 5000.0 * k as f64) {
        let ind = build(s, ModelKind::Independence, &s.scaling, installed);
        let res = build(s, ModelKind::Rescaled, &s.scaling, installed);
        let (li, lr) = (risk::lolp(&s.copt, &ind), risk::lolp(&s.copt, &res));
        let (ei, er) = if installed > 0.0 {
            (
                efc(&s.copt, &ind, tol).unwrap().value_mw,
                efc(&s.copt, &res, tol).unwrap().value_mw,
            )
        } else {
            (0.0, 0.0)
        };
        pass &= lr >= li && er <= ei + 2.0 * tol;
        rows.push(format!("{}GW efc {:.0}/{:.0}", installed / 1000.0, er, ei));
    }
    outcome(
        pass,
        format!("rescaled LOLE >= independence and EFC <= independence + 0.2 MW at 0..30 GW ({})", rows.join(", ")),
    )
}

/// Hourly demand with a random level per block; its marginal is normal, so
/// the true LOLP is `sum_x p(x) (1 - Phi((x - mu) / sigma))`.
fn coverage() -> Outcome {
    let units: Vec<GenUnit> = (0..10).map(|i| GenUnit::new(format!("u{i}"), 100.0, 0.9).unwrap()).collect();
    let copt = build_copt(&units, 1.0).unwrap();
    let (mu, sd_block, sd_hour): (f64, f64, f64) = (700.0, 45.0, 35.0);
    let sigma = (sd_block * sd_block + sd_hour * sd_hour).sqrt();
    let law = StatNormal::new(mu, sigma).unwrap();
    let truth: f64 = copt.atoms().map(|(x, p)| p * (1.0 - law.cdf(x))).sum();
    let n_periods = 3360.0;

    let mut kinds = vec![(BlockKind::Normal, 24); 126];
    kinds.extend(vec![(BlockKind::Christmas, 48); 7]);
    let n: usize = kinds.iter().map(|k| k.1).sum();
    let t0 = Utc.with_ymd_and_hms(2001, 11, 4, 0, 0, 0).unwrap();
    let ts: Vec<_> = (0..n).map(|i| t0 + Duration::hours(i as i64)).collect();

    let trials = 200;
    let mut covered = 0;
    let block_noise = Normal::new(0.0, sd_block).unwrap();
    let hour_noise = Normal::new(0.0, sd_hour).unwrap();
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(9_000 + trial);
        let mut demand = Vec::with_capacity(n);
        for &(_, len) in &kinds {
            let level = mu + block_noise.sample(&mut rng);
            for _ in 0..len {
                demand.push((level + hour_noise.sample(&mut rng)).max(0.0));
            }
        }
        let series =
            PairedSeries::from_blocks(ts.clone(), demand, vec![0.0; n], vec!["w".into(); n], &kinds).unwrap();
        let spec = BootstrapSpec {
            n_replicates: 1000,
            ci_level: 0.95,
            seed: trial,
            scheme: Scheme::PairedBlocks,
        };
        let res = bootstrap_ci(&series, &spec, |x| {
            let m = JointModel::hindcast(x.demand_mw, &vec![0.0; x.demand_mw.len()])?;
            Ok(risk::lolp(&copt, &m) * n_periods)
        })
        .unwrap();
        if res.ci_lo <= truth * n_periods && truth * n_periods <= res.ci_hi {
            covered += 1;
        }
    }
    let rate = covered as f64 / trials as f64;
    outcome(
        rate >= 0.9,
        format!("true LOLE {:.3} h covered in {covered}/{trials} trials ({:.1}%)", truth * n_periods, 100.0 * rate),
    )
}

fn ci_ratio(s: &Scenario, kind: ModelKind, installed: f64, replicates: usize) -> f64 {
    let spec = BootstrapSpec {
        n_replicates: replicates,
        ci_level: 0.95,
        seed: 1,
        scheme: if kind == ModelKind::Hindcast {
            Scheme::PairedBlocks
        } else {
            Scheme::IndependentBlocks
        },
    };
    let n_periods = s.n_periods() as f64;
    let res = bootstrap_ci(&s.series, &spec, |x| {
        let wind: Vec<f64> = x.load_factor.iter().map(|l| l * installed).collect();
        let m = JointModel::build(kind, x.demand_mw, &wind, Some(&s.scaling))?;
        Ok(risk::lolp(&s.copt, &m) * n_periods)
    })
    .unwrap();
    res.ci_hi / res.ci_lo
}

fn ci_ratio_contrast(s: &Scenario) -> Outcome {
    let top = 30_000.0;
    let h0 = ci_ratio(s, ModelKind::Hindcast, 0.0, 1000);
    let h1 = ci_ratio(s, ModelKind::Hindcast, top, 1000);
    // independence replicates cost N_d x N_y terms each, so fewer are drawn
    let i0 = ci_ratio(s, ModelKind::Independence, 0.0, 300);
    let i1 = ci_ratio(s, ModelKind::Independence, top, 300);
    let grow = h1 / h0;
    let change = (i1 / i0 - 1.0).abs();
    outcome(
        grow >= 2.0 && change < 0.25,
        format!(
            "hindcast CI ratio {h0:.2} -> {h1:.2} (x{grow:.2}, need >= 2), independence {i0:.2} -> {i1:.2} ({:.1}%, need < 25%)",
            100.0 * change
        ),
    )
}

fn top_n_concentration(s: &Scenario) -> Outcome {
    let caps = [0.0, 10_000.0, 20_000.0, 30_000.0];
    let n_max = 500;
    let curves: Vec<Vec<f64>> = caps
        .iter()
        .map(|&c| {
            let m = build(s, ModelKind::Hindcast, &s.scaling, c);
            risk::top_n_curve(&s.copt, &m, n_max).unwrap()
        })
        .collect();
    let total = s.series.len();
    let top = curves.last().unwrap();
    let n_half = top.iter().position(|&v| v >= 0.5).map(|i| i + 1);
    let ordered = (0..n_max).all(|n| curves.windows(2).all(|w| w[1][n] >= w[0][n]));
    let far_smaller = n_half.is_some_and(|n| n * 100 <= total);
    outcome(
        far_smaller && ordered,
        format!(
            "half of 30 GW hindcast LOLE from the top {} of {total} hours; curves ordered by capacity for n <= {n_max}: {ordered}",
            n_half.map_or("-".to_string(), |n| n.to_string())
        ),
    )
}

fn run_binary(args: &[&str]) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_adequacy")).args(args).output().unwrap();
    (out.status.success(), out.stdout)
}

fn determinism(dir: &Path) -> Outcome {
    let cfg = dir.join("config.toml");
    let cfg = cfg.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["validate", "--config", cfg],
        vec!["risk", "--config", cfg, "--model", "rescaled"],
        vec!["sweep", "--config", cfg, "--model", "hindcast", "--replicates", "50", "--seed", "7"],
        vec![
            "sweep",
            "--config",
            cfg,
            "--capacities",
            "0,20000",
            "--replicates",
            "4",
            "--seed",
            "7",
        ],
        vec!["topn", "--config", cfg, "--model", "hindcast", "--n-max", "50"],
        vec!["loess", "--config", cfg, "--span", "0.5"],
        vec![
            "bootstrap",
            "--config",
            cfg,
            "--model",
            "hindcast",
            "--capacities",
            "15000",
            "--replicates",
            "200",
            "--statistic",
            "efc",
        ],
    ];
    let mut failures = Vec::new();
    for cmd in &commands {
        let mut outputs = Vec::new();
        for threads in [None, Some("1"), Some("1"), Some("3")] {
            let mut args = cmd.clone();
            if let Some(t) = threads {
                args.extend(["--threads", t]);
            }
            let (ok, bytes) = run_binary(&args);
            if !ok {
                failures.push(format!("{} failed", cmd[0]));
            }
            outputs.push(bytes);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) || outputs[0].is_empty() {
            failures.push(format!("{} output differs", cmd[0]));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} commands, each run with default, 1, 1 and 3 threads: {}",
            commands.len(),
            if failures.is_empty() {
                "byte-identical".to_string()
            } else {
                failures.join(", ")
            }
        ),
    )
}

fn loess_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(10..300);
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-3.0..3.0));
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.85..1.1)).collect();
        let y: Vec<f64> = x.iter().map(|v| a + b * v).collect();
        let span = rng.random_range(0.2..=1.0);
        let Ok(fit) = loess_fit(&x, &y, span) else { continue };
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for k in 0..=40 {
            let g = lo + (hi - lo) * k as f64 / 40.0;
            worst = worst.max((fit.predict(g) - (a + b * g)).abs());
        }
        for &xi in &x {
            worst = worst.max((fit.predict(xi) - (a + b * xi)).abs());
        }
    }
    outcome(worst <= 1e-9, format!("50 random lines, max deviation {worst:.2e}"))
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let started = Instant::now();
    let gb = gb_scenario(dir.path());

    let checks: Vec<(&str, Check)> = vec![
        ("copt-enumeration", Box::new(copt_vs_enumeration)),
        ("lolp-monte-carlo", Box::new(lolp_vs_monte_carlo)),
        ("capvalue-identities-scan", Box::new(capvalue_identities_and_scan)),
        ("lambda-one-degeneracy", Box::new(|| degeneracy(&gb))),
        ("pessimistic-lambda-ordering", Box::new(|| pessimistic_ordering(&gb))),
        ("bootstrap-coverage", Box::new(coverage)),
        ("ci-ratio-contrast", Box::new(|| ci_ratio_contrast(&gb))),
        ("top-n-concentration", Box::new(|| top_n_concentration(&gb))),
        ("cli-determinism", Box::new(|| determinism(dir.path()))),
        ("loess-linear-exactness", Box::new(loess_exactness)),
    ];

    let mut failed = 0;
    for (name, check) in &checks {
        let t = Instant::now();
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.0}s",
        checks.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
