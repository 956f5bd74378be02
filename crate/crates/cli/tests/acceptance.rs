//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wnss_core::clustering::ClusteredFixations;
use wnss_core::value::weighted_nss_at;
use wnss_core::{
    auc_borji, auc_judd, cc, dbscan, emd, mae, nss, sauc, sim, snss, swnss, wnss, Dataset, DbscanParams,
    FixationPoint, FixationSet, SaliencyMap, ShuffleConfig,
};
use wnss_harness::stats::{average_ranks, krocc, plcc, srocc};
use wnss_harness::synthetic::{
    center_bias_scenario, find_density_blindness_scenario, fuzzify, pipeline_scenario, write_scenario, CenterBiasParams,
};
use wnss_harness::{MetricId, MosRow, MosTable, ScoreTable, GT_MODEL_ID};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---------------------------------------------------------------- 1 DBSCAN

fn dbscan_reference(points: &[(u32, u32)], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let near = |i: usize, j: usize| {
        let dx = points[i].0 as f64 - points[j].0 as f64;
        let dy = points[i].1 as f64 - points[j].1 as f64;
        dx * dx + dy * dy <= eps * eps
    };
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts).collect();
    // flood fill over core points, smallest index first
    let mut comp = vec![None; n];
    let mut next = 0;
    for s in 0..n {
        if !core[s] || comp[s].is_some() {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = Some(next);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if core[j] && comp[j].is_none() && near(i, j) {
                    comp[j] = Some(next);
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    (0..n)
        .map(|i| {
            if core[i] {
                comp[i]
            } else {
                (0..n).filter(|&j| core[j] && near(i, j)).filter_map(|j| comp[j]).min()
            }
        })
        .collect()
}

fn canonical(labels: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut seen = Vec::new();
    labels
        .iter()
        .map(|l| {
            l.map(|c| match seen.iter().position(|&s| s == c) {
                Some(k) => k,
                None => {
                    seen.push(c);
                    seen.len() - 1
                }
            })
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let n = rng.gen_range(1..=60);
        let pts: Vec<(u32, u32)> = (0..n).map(|_| (rng.gen_range(0..80), rng.gen_range(0..80))).collect();
        let eps = rng.gen_range(2.0..18.0);
        let min_pts = rng.gen_range(1..7);
        let fs = FixationSet::new("img", 80, 80, 20.0, pts.iter().map(|&(x, y)| FixationPoint::new(x, y)).collect())
            .map_err(|e| e.to_string())?;
        let got = dbscan(&fs, DbscanParams::new(eps, min_pts).unwrap()).map_err(|e| e.to_string())?;
        let want = dbscan_reference(&pts, eps, min_pts);
        ensure(canonical(&got.labels()) == canonical(&want), format!("partition differs in case {case}"))?;
        let noise: Vec<usize> = (0..n).filter(|&i| want[i].is_none()).collect();
        ensure(got.noise == noise, format!("noise differs in case {case}"))?;
    }
    Ok("200 point sets identical to the reference".into())
}

// ------------------------------------------------------------ 2 NSS / WNSS

fn random_map(rng: &mut ChaCha8Rng, w: usize, h: usize) -> SaliencyMap {
    SaliencyMap::from_fn(w, h, |_, _| rng.gen::<f64>() * 10.0).unwrap()
}

fn random_points(rng: &mut ChaCha8Rng, w: usize, h: usize, n: usize) -> Vec<FixationPoint> {
    (0..n)
        .map(|_| FixationPoint::new(rng.gen_range(0..w as u32), rng.gen_range(0..h as u32)))
        .collect()
}

fn direct_weighted_nss(map: &SaliencyMap, pts: &[FixationPoint], w: &[f64]) -> f64 {
    let v = map.values();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, &wi) in pts.iter().zip(w) {
        num += wi * (map.values()[p.y as usize * map.width() + p.x as usize] - mean) / sd;
        den += wi;
    }
    num / den
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (w, h) = (rng.gen_range(5..40), rng.gen_range(5..40));
        let map = random_map(&mut rng, w, h);
        let n = rng.gen_range(1..40);
        let pts = random_points(&mut rng, w, h, n);
        let fs = FixationSet::new("img", w, h, 10.0, pts.clone()).unwrap();
        let ones = vec![1.0; n];
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();

        let e = (nss(&map, &fs).unwrap() - direct_weighted_nss(&map, &pts, &ones)).abs();
        worst = worst.max(e);
        if weights.iter().any(|&x| x > 0.0) {
            let got = weighted_nss_at(&map, &pts, &weights).unwrap();
            worst = worst.max((got - direct_weighted_nss(&map, &pts, &weights)).abs());
        }
        // DBSCAN-derived weights through the public entry point
        let c = dbscan(&fs, DbscanParams::new(rng.gen_range(3.0..12.0), 2).unwrap()).unwrap();
        if c.total_weight() > 0 {
            let got = wnss(&map, &fs, &c).unwrap();
            worst = worst.max((got - direct_weighted_nss(&map, &pts, &c.weights_f64())).abs());
        }
        // a single cluster gives every point the same weight
        let uniform = ClusteredFixations::from_labels(&vec![Some(0); n]);
        worst = worst.max((wnss(&map, &fs, &uniform).unwrap() - nss(&map, &fs).unwrap()).abs());
        worst = worst.max((weighted_nss_at(&map, &pts, &ones).unwrap() - nss(&map, &fs).unwrap()).abs());
    }
    ensure(worst < 1e-12, format!("max deviation {worst:.3e}"))?;
    Ok(format!("50 instances, max deviation {worst:.2e}"))
}

// ------------------------------------------------------------ 3 affine

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (w, h) = (40, 30);
    let sets: Vec<FixationSet> = (0..5)
        .map(|i| {
            let mut pts = random_points(&mut rng, w, h, 12);
            // a tight group so DBSCAN finds a cluster
            pts.extend((0..5).map(|k| FixationPoint::new(10 + k, 10 + (k % 2))));
            FixationSet::new(format!("i{i}"), w, h, 4.0, pts).unwrap()
        })
        .collect();
    let ds = Dataset::new(sets).unwrap();
    let shuffle = ShuffleConfig::with_seed(3);
    let mut worst: f64 = 0.0;
    for f in ds.images() {
        let map = random_map(&mut rng, w, h);
        let scaled = map.map_values(|v| 3.7 * v + 0.2).unwrap();
        let c = dbscan(f, DbscanParams::for_geometry(f.pixels_per_degree()).unwrap()).unwrap();
        let pairs = [
            (nss(&map, f).unwrap(), nss(&scaled, f).unwrap()),
            (wnss(&map, f, &c).unwrap(), wnss(&scaled, f, &c).unwrap()),
            (snss(&map, f, &ds, &shuffle).unwrap(), snss(&scaled, f, &ds, &shuffle).unwrap()),
            (swnss(&map, f, &c, &ds, &shuffle).unwrap(), swnss(&scaled, f, &c, &ds, &shuffle).unwrap()),
        ];
        for (a, b) in pairs {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-9, format!("max change {worst:.3e}"))?;
    Ok(format!("NSS, WNSS, sNSS, sWNSS max change {worst:.2e}"))
}

// ------------------------------------------------------------ 4 center bias

fn criterion_4() -> Outcome {
    let s = center_bias_scenario(&CenterBiasParams::default()).map_err(|e| e.to_string())?;
    let shuffle = ShuffleConfig::with_seed(4);
    let mut mean = BTreeMap::new();
    for model in ["center", "gt_model"] {
        let mut acc = [0.0; 3];
        for f in s.dataset.images() {
            let map = &s.models[model][f.image_id()];
            let c = dbscan(f, DbscanParams::for_geometry(f.pixels_per_degree()).unwrap()).unwrap();
            acc[0] += nss(map, f).unwrap();
            acc[1] += snss(map, f, &s.dataset, &shuffle).unwrap();
            acc[2] += swnss(map, f, &c, &s.dataset, &shuffle).unwrap();
        }
        let n = s.dataset.len() as f64;
        mean.insert(model, acc.map(|v| v / n));
    }
    let (c, m) = (mean["center"], mean["gt_model"]);
    let detail = format!(
        "NSS {:.3} vs {:.3}, sNSS {:.3} vs {:.3}, sWNSS {:.3} vs {:.3} (center vs model)",
        c[0], m[0], c[1], m[1], c[2], m[2]
    );
    ensure(c[0] >= 0.8 * m[0], format!("center NSS not competitive: {detail}"))?;
    ensure(m[1] - c[1] > 0.3, format!("sNSS gap too small: {detail}"))?;
    ensure(m[2] - c[2] > 0.3, format!("sWNSS gap too small: {detail}"))?;
    Ok(detail)
}

// ------------------------------------------------------------ 5 density

fn criterion_5() -> Outcome {
    let shuffle = ShuffleConfig::with_seed(5);
    let (s, sc) = find_density_blindness_scenario(0, 0.1, &shuffle)
        .map_err(|e| e.to_string())?
        .ok_or("no configuration reproduces the property")?;
    ensure(sc.wnss_dense > sc.wnss_scatter, "WNSS does not prefer the dense map")?;
    ensure(sc.swnss_dense > sc.swnss_scatter, "sWNSS does not prefer the dense map")?;
    ensure(sc.nss_scatter >= sc.nss_dense - 0.1, "NSS separates the maps")?;
    Ok(format!(
        "{} dense + {} scattered fixations: NSS {:.3} vs {:.3}, WNSS {:.3} vs {:.3}, sWNSS {:.3} vs {:.3} (dense vs scatter map)",
        s.dense_count,
        s.scatter_count,
        sc.nss_dense,
        sc.nss_scatter,
        sc.wnss_dense,
        sc.wnss_scatter,
        sc.swnss_dense,
        sc.swnss_scatter
    ))
}

// ------------------------------------------------------------ 6 fuzzify

fn criterion_6() -> Outcome {
    let s = center_bias_scenario(&CenterBiasParams::default()).map_err(|e| e.to_string())?;
    let shuffle = ShuffleConfig::with_seed(6);
    let mut d = [0.0f64; 4];
    for f in s.dataset.images() {
        let gt = &s.gt_maps[f.image_id()];
        let fz = fuzzify(gt, 0.5 * f.pixels_per_degree(), 0.3).unwrap();
        d[0] += auc_borji(gt, f, f.len(), 100, 6).unwrap() - auc_borji(&fz, f, f.len(), 100, 6).unwrap();
        d[1] += auc_judd(gt, f).unwrap() - auc_judd(&fz, f).unwrap();
        d[2] += sauc(gt, f, &s.dataset, &shuffle).unwrap() - sauc(&fz, f, &s.dataset, &shuffle).unwrap();
        d[3] += nss(gt, f).unwrap() - nss(&fz, f).unwrap();
    }
    let d = d.map(|v| v / s.dataset.len() as f64);
    let detail = format!(
        "mean change AUC_Borji {:.4}, AUC_Judd {:.4}, sAUC {:.4}; NSS drop {:.3}",
        d[0], d[1], d[2], d[3]
    );
    ensure(d[..3].iter().all(|v| v.abs() < 0.05), format!("AUC moved: {detail}"))?;
    ensure(d[3] > 0.5, format!("NSS drop too small: {detail}"))?;
    Ok(detail)
}

// ------------------------------------------------------------ 7 distribution

fn lp_emd(a: &SaliencyMap, b: &SaliencyMap) -> f64 {
    let (sa, sb) = (a.sum(), b.sum());
    let n = a.len();
    let w = a.width();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut vars = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let dx = (i % w) as f64 - (j % w) as f64;
            let dy = (i / w) as f64 - (j / w) as f64;
            vars.push(problem.add_var((dx * dx + dy * dy).sqrt(), (0.0, f64::INFINITY)));
        }
    }
    for i in 0..n {
        let row: Vec<_> = (0..n).map(|j| (vars[i * n + j], 1.0)).collect();
        problem.add_constraint(&row, ComparisonOp::Eq, a.values()[i] / sa);
    }
    for j in 0..n {
        let col: Vec<_> = (0..n).map(|i| (vars[i * n + j], 1.0)).collect();
        problem.add_constraint(&col, ComparisonOp::Eq, b.values()[j] / sb);
    }
    problem.solve().unwrap().objective()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_id: f64 = 0.0;
    for _ in 0..20 {
        let (w, h) = (rng.gen_range(4..40), rng.gen_range(4..30));
        let a = random_map(&mut rng, w, h);
        worst_id = worst_id
            .max((cc(&a, &a).unwrap() - 1.0).abs())
            .max((sim(&a, &a).unwrap() - 1.0).abs())
            .max(emd(&a, &a).unwrap().abs())
            .max(mae(&a, &a).unwrap().abs());
    }
    ensure(worst_id < 1e-9, format!("identity deviation {worst_id:.3e}"))?;

    let a = SaliencyMap::new(4, 1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let b = SaliencyMap::new(4, 1, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
    let line = emd(&a, &b).unwrap();
    ensure((line - 3.0).abs() < 1e-9, format!("4x1 case gave {line}"))?;

    let mut worst_lp: f64 = 0.0;
    let mut cases = 0;
    while cases < 30 {
        let mut draw = || SaliencyMap::from_fn(4, 4, |_, _| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).unwrap();
        let (a, b) = (draw(), draw());
        if a.sum() == 0.0 || b.sum() == 0.0 {
            continue;
        }
        cases += 1;
        worst_lp = worst_lp.max((emd(&a, &b).unwrap() - lp_emd(&a, &b)).abs());
    }
    ensure(worst_lp < 1e-6, format!("LP deviation {worst_lp:.3e}"))?;
    Ok(format!(
        "identities within {worst_id:.1e}, 4x1 = {line}, 30 LP pairs within {worst_lp:.1e}"
    ))
}

// ------------------------------------------------------------ 8 correlation

fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&u| u < v).count() as f64;
            let equal = x.iter().filter(|&&u| u == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn cov_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
    let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / n).sqrt();
    cov / (sx * sy)
}

fn pair_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let (mut s, mut n1, mut n2) = (0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let a = (x[i] - x[j]).signum() as i64 * (x[i] != x[j]) as i64;
            let b = (y[i] - y[j]).signum() as i64 * (y[i] != y[j]) as i64;
            s += a * b;
            n1 += a.abs();
            n2 += b.abs();
        }
    }
    s as f64 / ((n1 * n2) as f64).sqrt()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(3..50);
        let lx = rng.gen_range(2..9);
        let ly = rng.gen_range(2..9);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..lx) as f64 * 0.25).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..ly) as f64 * 1.5).collect();
        if x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
            continue;
        }
        done += 1;
        ensure(average_ranks(&x) == brute_ranks(&x), "average ranks differ")?;
        worst = worst
            .max((srocc(&x, &y).unwrap() - cov_pearson(&brute_ranks(&x), &brute_ranks(&y))).abs())
            .max((krocc(&x, &y).unwrap() - pair_tau_b(&x, &y)).abs())
            .max((plcc(&x, &y).unwrap() - cov_pearson(&x, &y)).abs());
    }
    ensure(worst < 1e-12, format!("max deviation {worst:.3e}"))?;
    let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
    let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
    let down: Vec<f64> = x.iter().map(|v| -v).collect();
    for (got, want) in [
        (srocc(&x, &up), 1.0),
        (krocc(&x, &up), 1.0),
        (plcc(&x, &up), 1.0),
        (srocc(&x, &down), -1.0),
        (krocc(&x, &down), -1.0),
        (plcc(&x, &down), -1.0),
    ] {
        ensure(got.unwrap() == want, "perfect case is not exactly +-1")?;
    }
    Ok(format!("100 tied vectors, max deviation {worst:.2e}; +-1 cases exact"))
}

// ------------------------------------------------------------ 9, 10 CLI

fn wnss_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wnss"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("wnss {} failed: {}", args[0], String::from_utf8_lossy(&out.stderr)))
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn affine_mos(rows: &[(String, String, f64)], increasing: bool) -> MosTable {
    let (lo, hi) = rows
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), r| (a.min(r.2), b.max(r.2)));
    let mut mos = MosTable::new();
    for (m, i, v) in rows {
        let t = (v - lo) / (hi - lo);
        mos.insert(MosRow {
            model_id: m.clone(),
            image_id: i.clone(),
            mos: if increasing { 1.0 + 4.0 * t } else { 5.0 - 4.0 * t },
            n_raters: 16,
        })
        .unwrap();
    }
    mos
}

fn report_entry(dir: &Path, metric: &str) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v["non_shuffled"]
        .as_array()
        .into_iter()
        .flatten()
        .chain(v["shuffled"].as_array().into_iter().flatten())
        .find(|e| e["metric"] == metric)
        .cloned()
        .ok_or_else(|| format!("{metric} missing from report"))
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let manifest = write_scenario(&pipeline_scenario(6, 9).map_err(|e| e.to_string())?, root, true)
        .map_err(|e| e.to_string())?;
    let scores = root.join("scores.csv");
    wnss_cli(&[
        "score",
        "--manifest",
        p(&manifest),
        "--models-dir",
        p(&root.join("models")),
        "--metrics",
        "nss,wnss,emd",
        "--seed",
        "9",
        "--out",
        p(&scores),
    ])?;
    let table = ScoreTable::load_csv(&scores).map_err(|e| e.to_string())?;
    let pick = |metric: MetricId, normalized: bool| -> Vec<(String, String, f64)> {
        table
            .rows()
            .filter(|r| r.metric == metric && r.model_id != GT_MODEL_ID)
            .filter_map(|r| {
                let v = if normalized { r.normalized } else { r.raw.value() }?;
                Some((r.model_id.clone(), r.image_id.clone(), v))
            })
            .collect()
    };
    let wnss_rows = pick(MetricId::Wnss, true);
    let models: std::collections::BTreeSet<&str> = wnss_rows.iter().map(|r| r.0.as_str()).collect();
    ensure(wnss_rows.len() == 24 && models.len() == 4, format!("expected 4 x 6 WNSS rows, got {}", wnss_rows.len()))?;

    let mos_path = root.join("mos.csv");
    affine_mos(&wnss_rows, true).save_csv(&mos_path).map_err(|e| e.to_string())?;
    let out = root.join("report");
    wnss_cli(&["evaluate", "--scores", p(&scores), "--mos", p(&mos_path), "--out-dir", p(&out)])?;
    let w = report_entry(&out, "wnss")?;
    let (s, k, pl) = (w["srocc"].as_f64().unwrap(), w["krocc"].as_f64().unwrap(), w["plcc"].as_f64().unwrap());
    ensure(s == 1.0 && k == 1.0 && (pl - 1.0).abs() < 1e-12, format!("WNSS srocc {s} krocc {k} plcc {pl}"))?;

    let emd_rows = pick(MetricId::Emd, false);
    let emd_mos = root.join("mos_emd.csv");
    affine_mos(&emd_rows, false).save_csv(&emd_mos).map_err(|e| e.to_string())?;
    let out2 = root.join("report_emd");
    wnss_cli(&["evaluate", "--scores", p(&scores), "--mos", p(&emd_mos), "--out-dir", p(&out2)])?;
    let e = report_entry(&out2, "emd")?;
    let (es, ek, ep) = (e["srocc"].as_f64().unwrap(), e["krocc"].as_f64().unwrap(), e["plcc"].as_f64().unwrap());
    ensure(es > 0.0 && ek > 0.0 && ep > 0.0, format!("EMD srocc {es} krocc {ek} plcc {ep}"))?;
    Ok(format!(
        "WNSS srocc {s} krocc {k} plcc {pl:.15}; EMD with inverted MOS srocc {es:.3} krocc {ek:.3} plcc {ep:.3}"
    ))
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let manifest = write_scenario(&pipeline_scenario(4, 10).map_err(|e| e.to_string())?, root, false)
        .map_err(|e| e.to_string())?;
    let models = root.join("models");
    let run = |seed: &str, out: &Path| {
        wnss_cli(&[
            "score",
            "--manifest",
            p(&manifest),
            "--models-dir",
            p(&models),
            "--metrics",
            "nss,auc_borji,sauc,snss,swnss",
            "--seed",
            seed,
            "--out",
            p(out),
        ])
    };
    let (a, b, c) = (root.join("a.csv"), root.join("b.csv"), root.join("c.csv"));
    run("10", &a)?;
    run("10", &b)?;
    run("11", &c)?;
    let (ba, bb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ensure(ba == bb, "same seed produced different CSVs")?;
    let (ta, tc) = (ScoreTable::load_csv(&a).unwrap(), ScoreTable::load_csv(&c).unwrap());
    let mut changed = Vec::new();
    for m in [MetricId::Sauc, MetricId::Snss, MetricId::Swnss] {
        let max_diff = ta
            .rows()
            .filter(|r| r.metric == m)
            .filter_map(|r| {
                let other = tc.get(&r.model_id, &r.image_id, m)?;
                Some((r.raw.value()? - other.raw.value()?).abs())
            })
            .fold(0.0f64, f64::max);
        ensure(max_diff > 0.0, format!("{} unchanged by a new seed", m.label()))?;
        changed.push(format!("{} {max_diff:.2e}", m.label()));
    }
    Ok(format!(
        "{} bytes identical for equal seeds; max change with a new seed: {}",
        ba.len(),
        changed.join(", ")
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("DBSCAN oracle equivalence", criterion_1),
        ("NSS/WNSS exactness", criterion_2),
        ("affine invariance", criterion_3),
        ("center-bias reproduction", criterion_4),
        ("density-blindness reproduction", criterion_5),
        ("interpolation-flaw reproduction", criterion_6),
        ("distribution-metric identities", criterion_7),
        ("correlation statistics", criterion_8),
        ("pipeline consistency", criterion_9),
        ("determinism", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(reason) => {
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {reason}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
