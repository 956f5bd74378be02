use wnss_core::DatasetManifest;
use wnss_harness::scoring::{gt_maps_for_manifest, GtOptions};
use wnss_harness::synthetic::{pipeline_scenario, write_scenario};
use wnss_harness::{
    correlate_with_mos, normalize_with_gt_rows, score_dataset, CorrelationMode, DirectoryModel, MapSource, MetricId,
    MosRow, MosTable, ScoreTable, ScoringConfig,
};

fn score(dir: &std::path::Path, seed: u64, metrics: &[MetricId]) -> ScoreTable {
    let (manifest, base) = DatasetManifest::load(dir.join("manifest.json")).unwrap();
    let dataset = manifest.load_dataset(&base).unwrap();
    let gt = gt_maps_for_manifest(&manifest, &base, &dataset, &GtOptions::default()).unwrap();
    let names = ["blur_wide", "center", "gt_model", "noisy"];
    let sources: Vec<DirectoryModel> = names.iter().map(|n| DirectoryModel::new(dir.join("models").join(n))).collect();
    let models: Vec<(String, &dyn MapSource)> =
        names.iter().zip(&sources).map(|(n, s)| (n.to_string(), s as &dyn MapSource)).collect();
    score_dataset(&dataset, &gt, &models, metrics, &ScoringConfig::with_seed(seed)).unwrap()
}

#[test]
fn mos_equal_to_normalized_wnss_correlates_perfectly() {
    let tmp = tempfile::tempdir().unwrap();
    write_scenario(&pipeline_scenario(6, 3).unwrap(), tmp.path(), true).unwrap();
    let metrics = [MetricId::Wnss, MetricId::Nss, MetricId::Emd];
    let table = normalize_with_gt_rows(score(tmp.path(), 9, &metrics)).unwrap();

    let wnss: Vec<_> = table
        .rows()
        .filter(|r| r.metric == MetricId::Wnss && r.model_id != wnss_harness::GT_MODEL_ID)
        .collect();
    assert_eq!(wnss.len(), 24);
    let vals: Vec<f64> = wnss.iter().map(|r| r.normalized.unwrap()).collect();
    let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let mut mos = MosTable::new();
    for (r, v) in wnss.iter().zip(&vals) {
        mos.insert(MosRow {
            model_id: r.model_id.clone(),
            image_id: r.image_id.clone(),
            mos: 1.0 + 4.0 * (v - lo) / (hi - lo),
            n_raters: 1,
        })
        .unwrap();
    }
    let report = correlate_with_mos(&table, &mos, CorrelationMode::PerPair).unwrap();
    let c = report.get(MetricId::Wnss).unwrap();
    assert_eq!(c.n_pairs, 24);
    assert_eq!(c.srocc, 1.0);
    assert_eq!(c.krocc, 1.0);
    assert!((c.plcc - 1.0).abs() < 1e-12);
}

#[test]
fn scoring_from_disk_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    write_scenario(&pipeline_scenario(3, 5).unwrap(), tmp.path(), false).unwrap();
    let metrics = [MetricId::Snss, MetricId::Swnss, MetricId::Sauc];
    let a = score(tmp.path(), 1, &metrics).to_csv_string();
    let b = score(tmp.path(), 1, &metrics).to_csv_string();
    let c = score(tmp.path(), 2, &metrics).to_csv_string();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
