//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use beltsort::bench::{max_belt_speed, paper4, realize, BenchError, ControllerSpec, SpeedSearch};
use beltsort::bridge::{BridgeServer, PatternCatalog};
use beltsort::patterns::{generate, lane_count};
use beltsort::sim::oracle::exhaustive_max_picked;
use beltsort::sim::{episode_stats, reward_of, run_episode, sigmoid, EventBody};
use beltsort::strategy::{grasp_search, greedy_gt, mixed_specs, sample_patterns, GraspParams};
use beltsort::{Pattern, PatternObject, PatternSpec, Point2, Rule, RobotSpec, StrategyCombo, WorldConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// GRASP returns [SPT; FIFO] on the mixed set at 0.05 m/s when near-complete
/// picking is attainable, and [SPT; SPT] on dense grids at high belt speed.
fn grasp_regression() -> Outcome {
    let seed = 1;
    let params = GraspParams::default();
    let cfg = WorldConfig::default().with_belt_speed(0.05);
    let specs = mixed_specs(2.0, cfg.belt_width);
    let normal = grasp_search(&specs, &cfg, params, seed).map_err(|e| e.to_string())?;
    let pf = normal.report.mean_picked_fraction;
    let mut detail = format!("0.05 m/s mixed: {} (picked {:.3})", normal.best, pf);
    if pf >= 0.95 {
        check(normal.best.to_string() == "[SPT; FIFO]", format!("{detail}, expected [SPT; FIFO]"))?;
    } else {
        detail.push_str(" (below 0.95, no requirement)");
    }
    for speed in [0.15, 0.2] {
        let cfg = WorldConfig::default().with_belt_speed(speed);
        let dense = [PatternSpec::grid(0.15, 2.0, cfg.belt_width, 0)];
        let over = grasp_search(&dense, &cfg, params, seed).map_err(|e| e.to_string())?;
        detail.push_str(&format!("; {speed} m/s grid 0.15: {} (picked {:.3})", over.best, over.report.mean_picked_fraction));
        check(over.best.to_string() == "[SPT; SPT]", format!("{detail}, expected [SPT; SPT]"))?;
    }
    Ok(detail)
}

fn random_instance(rng: &mut ChaCha8Rng) -> (WorldConfig, Pattern) {
    let n_robots = rng.gen_range(1..=2);
    let n_objects = rng.gen_range(1..=6);
    let cfg = WorldConfig::with_robots(n_robots).with_belt_speed(rng.gen_range(0.1..0.3));
    let half = cfg.belt_width / 2.0;
    let objects = (0..n_objects)
        .map(|id| PatternObject {
            id,
            x: rng.gen_range(0.0..0.4),
            y: rng.gen_range(-half..=half),
            area_cm2: rng.gen_range(20.0..300.0),
            p_detection: rng.gen_range(0.7..=1.0),
            p_grasp: rng.gen_range(0.6..=1.0),
        })
        .collect();
    (
        cfg.clone(),
        Pattern {
            belt_width: cfg.belt_width,
            objects,
        },
    )
}

/// The exhaustive oracle picks at least as many objects as every rule combo,
/// strictly more than some combo somewhere.
fn oracle_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut strict_pairs, mut strict_instances, mut beats_all) = (0, 0, 0);
    let mut pairs = 0;
    for i in 0..50 {
        let (cfg, pattern) = random_instance(&mut rng);
        let best = exhaustive_max_picked(&cfg, &pattern).map_err(|e| e.to_string())?;
        let mut best_rule = 0;
        let mut strict_here = false;
        for combo in StrategyCombo::enumerate(cfg.robots.len()) {
            let s = episode_stats(&cfg, &pattern, &mut combo.clone()).map_err(|e| e.to_string())?;
            check(
                best >= s.n_picked,
                format!("instance {i}: oracle {best} < {combo} {}", s.n_picked),
            )?;
            pairs += 1;
            if best > s.n_picked {
                strict_pairs += 1;
                strict_here = true;
            }
            best_rule = best_rule.max(s.n_picked);
        }
        strict_instances += strict_here as usize;
        beats_all += (best > best_rule) as usize;
    }
    check(strict_pairs >= 1, "oracle never strictly better than any combo")?;
    Ok(format!(
        "50 instances, {pairs} (instance, combo) pairs; strict on {strict_pairs} pairs in {strict_instances} instances; \
         beats the best combo on {beats_all}"
    ))
}

/// Closed-form intercept, written independently of the simulator: the
/// smallest nonnegative root of (dx + vb t)^2 + dy^2 = (ve t)^2.
fn quadratic_tau(dx: f64, dy: f64, vb: f64, ve: f64) -> Option<f64> {
    let a = vb * vb - ve * ve;
    let b = 2.0 * dx * vb;
    let c = dx * dx + dy * dy;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let r1 = (-b + disc.sqrt()) / (2.0 * a);
    let r2 = (-b - disc.sqrt()) / (2.0 * a);
    [r1, r2].into_iter().filter(|t| *t >= 0.0).min_by(f64::total_cmp)
}

/// Simulated pick ticks agree with the closed-form intercept to one tick.
fn kinematics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let speed = rng.gen_range(0.02..0.2);
        let mut cfg = WorldConfig::with_robots(1).with_belt_speed(speed);
        let half = cfg.belt_width / 2.0;
        let base = cfg.robots[0].base;
        let rest = Point2::new(base.x + rng.gen_range(-0.1..0.1), base.y + rng.gen_range(0.0..0.1));
        cfg.robots[0] = RobotSpec { rest_point: rest, ..cfg.robots[0].clone() };
        let y = rng.gen_range(-half..=half);
        let pattern = Pattern {
            belt_width: cfg.belt_width,
            objects: vec![PatternObject {
                id: 0,
                x: 0.0,
                y,
                area_cm2: 50.0,
                p_detection: 1.0,
                p_grasp: 1.0,
            }],
        };
        // First tick at which the meeting point is reachable and on the belt.
        let r = &cfg.robots[0];
        let mut expected = None;
        for k in 0..100_000u64 {
            let t0 = k as f64 / cfg.tick_rate;
            let x0 = speed * t0;
            if x0 > cfg.belt_length {
                break;
            }
            let Some(tau) = quadratic_tau(x0 - rest.x, y - rest.y, speed, r.ee_speed) else { continue };
            let (mx, my) = (x0 + speed * tau, y);
            let in_reach = ((mx - base.x).powi(2) + (my - base.y).powi(2)).sqrt() <= r.reach;
            if in_reach && (0.0..=cfg.belt_length).contains(&mx) {
                expected = Some(t0 + tau);
                break;
            }
        }
        let ep = run_episode(&cfg, &pattern, &mut StrategyCombo::uniform(Rule::Spt, 1)).map_err(|e| e.to_string())?;
        let pick_tick = ep.log.iter().find_map(|e| matches!(e.body, EventBody::Pick { .. }).then_some(e.tick));
        match (expected, pick_tick) {
            (Some(t), Some(tick)) => {
                let lag = tick as f64 / cfg.tick_rate - t;
                worst = worst.max(lag.abs());
                check(
                    (-1e-9..=1.0 / cfg.tick_rate + 1e-9).contains(&lag),
                    format!("scenario {i}: picked at tick {tick}, closed form {t:.4} s"),
                )?;
            }
            (None, None) => {}
            (e, p) => return Err(format!("scenario {i}: closed form {e:?} vs simulated pick {p:?}")),
        }
    }
    Ok(format!("100 scenarios, max |tick time - intercept time| = {worst:.4} s"))
}

fn reward_values() -> Outcome {
    check(reward_of(0.0, 1.0, 1.0, 0.01) == Ok(0.5), "reward_of(0,1,1,0.01) != 0.5")?;
    let r = reward_of(100.0, 0.9, 0.8, 0.01).map_err(|e| e.to_string())?;
    let expected = 0.72 / (1.0 + (-1.0f64).exp());
    check((r - expected).abs() <= 1e-12, format!("reward_of(100,0.9,0.8,0.01) = {r}"))?;
    check((sigmoid(1.0) - 0.731_058_578_630_004_9).abs() < 1e-15, "sigmoid(1)")?;
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(0.0..1e6f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..1.0f64), |(a, pd, pg, k)| {
            let r = reward_of(a, pd, pg, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("0.5 exact, {r:.16} within 1e-12, 10000 property cases in [0, 1]"))
}

fn determinism_and_bridge() -> Outcome {
    let cfg = WorldConfig::default().with_belt_speed(0.05);
    let patterns = realize(&paper4(cfg.belt_width), 42).map_err(|e| e.to_string())?;
    let combo: StrategyCombo = "SPT,FIFO".parse().unwrap();
    for lp in &patterns {
        let a = run_episode(&cfg, &lp.pattern, &mut combo.clone()).map_err(|e| e.to_string())?;
        let b = run_episode(&cfg, &lp.pattern, &mut combo.clone()).map_err(|e| e.to_string())?;
        check(a.log.to_jsonl() == b.log.to_jsonl(), format!("{}: event logs differ", lp.label))?;
    }
    let server = BridgeServer::bind("127.0.0.1:0", cfg.clone(), PatternCatalog::with_presets(cfg.belt_width))
        .map_err(|e| e.to_string())?;
    let addr = server.local_addr().map_err(|e| e.to_string())?;
    server.spawn();
    let (mut stream, mut reader) = common::connect(addr);
    for lp in &patterns {
        let reset = serde_json::json!({"cmd": "reset", "pattern": lp.pattern}).to_string();
        let (_, steps) = common::play_spt(&mut stream, &mut reader, &reset);
        let remote = steps.last().and_then(|s| s.info.stats.clone()).ok_or("no final stats")?;
        let local = episode_stats(&cfg, &lp.pattern, &mut StrategyCombo::uniform(Rule::Spt, 2)).map_err(|e| e.to_string())?;
        check(remote == local, format!("{}: bridge {remote:?} != in-process {local:?}", lp.label))?;
    }
    Ok("byte-identical logs and exact SPT stats over the bridge on 4 preset patterns".into())
}

fn dominance_and_monotonicity() -> Outcome {
    let cfg = WorldConfig::default().with_belt_speed(0.05);
    let robust = ControllerSpec::robust_default(2);
    let mut patterns = realize(&paper4(cfg.belt_width), 9).map_err(|e| e.to_string())?;
    patterns.extend(sample_patterns(&mixed_specs(2.0, cfg.belt_width), 12, 9).map_err(|e| e.to_string())?);
    for lp in &patterns {
        let g = greedy_gt(&lp.pattern, &cfg).map_err(|e| e.to_string())?;
        let r = episode_stats(&cfg, &lp.pattern, &mut robust.clone()).map_err(|e| e.to_string())?;
        check(
            g.stats.picks_per_minute >= r.picks_per_minute,
            format!("{}: greedy {} < robust {}", lp.label, g.stats.picks_per_minute, r.picks_per_minute),
        )?;
    }
    let mut speeds = Vec::new();
    for lp in &patterns[..4] {
        match max_belt_speed(&ControllerSpec::RobustGt(None), &lp.pattern, &cfg, SpeedSearch::default()) {
            Ok(r) => speeds.push(format!("{} {:.3}", lp.label, r.speed)),
            Err(BenchError::NonMonotone { samples }) => {
                return Err(format!("{}: non-monotone feasibility {samples:?}", lp.label))
            }
            Err(e) => return Err(format!("{}: {e}", lp.label)),
        }
    }
    Ok(format!(
        "greedy >= robust on {} patterns; monotone over 10 speeds, max speeds: {}",
        patterns.len(),
        speeds.join(", ")
    ))
}

fn pattern_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for seed in 0..100 {
        let r = rng.gen_range(0.15..0.4);
        let p = generate(&PatternSpec::poisson(r, 2.0, 0.4, seed)).map_err(|e| e.to_string())?;
        for (i, a) in p.objects.iter().enumerate() {
            for b in &p.objects[i + 1..] {
                let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                check(d >= r, format!("poisson seed {seed}: objects {} and {} at {d} < {r}", a.id, b.id))?;
            }
        }
    }
    for seed in 0..100 {
        let s = rng.gen_range(0.1..0.4);
        let w = 0.4;
        let p = generate(&PatternSpec::grid(s, 2.0, w, seed)).map_err(|e| e.to_string())?;
        let lanes = lane_count(w, s);
        let rows = (2.0 / s + 1e-9).floor() as usize + 1;
        check(p.len() == lanes * rows, format!("grid seed {seed}: {} objects, expected {}", p.len(), lanes * rows))?;
        let center = 0.5 * (lanes as f64 - 1.0);
        for o in &p.objects {
            let row = o.x / s;
            let lane = o.y / s + center;
            let on_lattice = (row - row.round()).abs() < 1e-9 && (lane - lane.round()).abs() < 1e-9;
            check(on_lattice, format!("grid seed {seed}: object {} at ({}, {}) off lattice", o.id, o.x, o.y))?;
        }
    }
    Ok("100 Poisson seeds respect the radius, 100 grid seeds lie on the lattice".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("GRASP robustness regression", grasp_regression),
        ("oracle dominance", oracle_dominance),
        ("intercept kinematics", kinematics),
        ("reward values", reward_values),
        ("determinism and bridge transparency", determinism_and_bridge),
        ("dominance and speed monotonicity", dominance_and_monotonicity),
        ("pattern properties", pattern_properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {} PASS {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {} FAIL {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
