use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use wnss_core::gt::select_study_images;
use wnss_core::io::{load_saliency_map, save_saliency_map, MapFormat};
use wnss_core::{DatasetManifest, EmdGrid, GtNormalization, SampleSize};
use wnss_harness::scoring::{gt_maps_for_manifest, GtOptions};
use wnss_harness::{
    correlate_with_mos, emit_report, normalize_with_gt_rows, score_dataset, CenterModel, CorrelationMode,
    DirectoryModel, HarnessError, MapSource, MetricId, MosTable, ReportFormat, ScoreTable, ScoringConfig,
    GT_MODEL_ID,
};

#[derive(Parser)]
#[command(name = "wnss", version, about = "Saliency metric scoring, evaluation and rating study")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a ground-truth map for every manifest entry.
    BuildGt {
        #[arg(long)]
        manifest: PathBuf,
        /// Gaussian sigma in degrees of visual angle.
        #[arg(long, default_value_t = 1.0)]
        sigma_degrees: f64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Txt)]
        format: OutFormat,
        /// Scale so values sum to 1 instead of peaking at 1.
        #[arg(long)]
        unit_mass: bool,
    },
    /// Score model maps against the dataset and write a score table CSV.
    Score {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory holding <model_id>/<image_id>.<png|txt|csv>.
        #[arg(long)]
        models_dir: PathBuf,
        /// Comma-separated metric names, or "all".
        #[arg(long, default_value = "all")]
        metrics: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shuffle trials for the shuffled metrics.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Random-negative trials for AUC_Borji.
        #[arg(long, default_value_t = 100)]
        borji_trials: usize,
        /// Fixed shuffle sample size; defaults to the image's fixation count.
        #[arg(long)]
        sample_size: Option<usize>,
        /// Largest EMD grid, in cells; 0 scores at native resolution.
        #[arg(long, default_value_t = 768)]
        emd_max_cells: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma_degrees: f64,
        /// Leave out the built-in centered Gaussian model.
        #[arg(long)]
        no_center: bool,
        /// Leave out the ground-truth self rows (and normalization).
        #[arg(long)]
        no_gt_self: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlate a score table with mean opinion scores and write reports.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        mos: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::PerPair)]
        mode: Mode,
    },
    /// Pick representative images by clustering ground-truth map spread.
    SelectImages {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        per_cluster: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma_degrees: f64,
    },
    /// Run the rating study HTTP service.
    ServeStudy {
        /// JSON array of {model_id, image_id, gt_map, pred_map}.
        #[arg(long)]
        pairs: PathBuf,
        /// JSON array of five {category, gt_map, pred_map} exemplars.
        #[arg(long)]
        training: Option<PathBuf>,
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "STUDY_STORAGE_DIR", default_value = "study-data")]
        storage_dir: PathBuf,
    },
    /// Render a map as a jet-coloured PNG.
    Render {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Txt,
    Png8,
    Png16,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PerPair,
    PerModel,
}

fn gt_options(sigma_degrees: f64) -> GtOptions {
    GtOptions {
        sigma_degrees,
        ..GtOptions::default()
    }
}

fn build_gt(manifest: &Path, sigma_degrees: f64, out_dir: &Path, format: OutFormat, unit_mass: bool) -> Result<()> {
    let (manifest, base) = DatasetManifest::load(manifest)?;
    let dataset = manifest.load_dataset(&base)?;
    let options = GtOptions {
        sigma_degrees,
        normalization: if unit_mass {
            GtNormalization::UnitMass
        } else {
            GtNormalization::Peak
        },
        prefer_manifest_maps: false,
    };
    let maps = gt_maps_for_manifest(&manifest, &base, &dataset, &options)?;
    let format = match format {
        OutFormat::Txt => MapFormat::FloatGrid,
        OutFormat::Png8 => MapFormat::Png8,
        OutFormat::Png16 => MapFormat::Png16,
    };
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for (id, map) in &maps {
        save_saliency_map(map, out_dir.join(format!("{id}.{}", format.extension())), format)?;
    }
    eprintln!("wrote {} maps to {}", maps.len(), out_dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn score(
    manifest: &Path,
    models_dir: &Path,
    metrics: &str,
    config: ScoringConfig,
    sigma_degrees: f64,
    no_center: bool,
    out: &Path,
) -> Result<()> {
    let metrics = if metrics.trim() == "all" {
        MetricId::ALL.to_vec()
    } else {
        MetricId::parse_list(metrics)?
    };
    let (manifest, base) = DatasetManifest::load(manifest)?;
    let dataset = manifest.load_dataset(&base)?;
    let gt = gt_maps_for_manifest(&manifest, &base, &dataset, &gt_options(sigma_degrees))?;

    let mut sources: BTreeMap<String, Box<dyn MapSource>> = BTreeMap::new();
    let entries = std::fs::read_dir(models_dir).with_context(|| format!("reading {}", models_dir.display()))?;
    for entry in entries {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            let name = entry.file_name().to_string_lossy().into_owned();
            if name == GT_MODEL_ID {
                bail!("model directory name {GT_MODEL_ID:?} is reserved");
            }
            sources.insert(name, Box::new(DirectoryModel::new(entry.path())));
        }
    }
    if !no_center {
        sources
            .entry("center".into())
            .or_insert_with(|| Box::new(CenterModel::default()));
    }
    if sources.is_empty() {
        bail!("no models found in {}", models_dir.display());
    }
    let models: Vec<(String, &dyn MapSource)> = sources.iter().map(|(k, v)| (k.clone(), v.as_ref())).collect();
    let table = score_dataset(&dataset, &gt, &models, &metrics, &config)?;
    let table = if config.include_gt_self {
        normalize_with_gt_rows(table)?
    } else {
        table
    };
    table.save_csv(out)?;
    let errors = table.rows().filter(|r| r.raw.error().is_some()).count();
    eprintln!("wrote {} rows ({errors} error-tagged) to {}", table.len(), out.display());
    Ok(())
}

fn evaluate(scores: &Path, mos: &Path, out_dir: &Path, mode: Mode) -> Result<()> {
    let mut table = ScoreTable::load_csv(scores)?;
    if table.rows().any(|r| r.model_id == GT_MODEL_ID) {
        table = normalize_with_gt_rows(table)?;
    }
    let mos = MosTable::load_csv(mos)?;
    let mode = match mode {
        Mode::PerPair => CorrelationMode::PerPair,
        Mode::PerModel => CorrelationMode::PerModel,
    };
    let report = correlate_with_mos(&table, &mos, mode)?;
    emit_report(&report, &table, out_dir, &ReportFormat::ALL)?;
    for c in report.iter() {
        println!(
            "{:<10} srocc {:>7.4}  krocc {:>7.4}  plcc {:>7.4}  n {}",
            c.metric.label(),
            c.srocc,
            c.krocc,
            c.plcc,
            c.n_pairs
        );
    }
    Ok(())
}

fn select_images(manifest: &Path, k: usize, per_cluster: usize, seed: u64, sigma_degrees: f64) -> Result<()> {
    let (manifest, base) = DatasetManifest::load(manifest)?;
    let dataset = manifest.load_dataset(&base)?;
    let gt = gt_maps_for_manifest(&manifest, &base, &dataset, &gt_options(sigma_degrees))?;
    let maps: Vec<(String, _)> = manifest
        .entries
        .iter()
        .map(|e| (e.image_id.clone(), gt[&e.image_id].clone()))
        .collect();
    for id in select_study_images(&maps, k, per_cluster, seed)? {
        println!("{id}");
    }
    Ok(())
}

fn serve_study(pairs: &Path, training: Option<&Path>, host: &str, port: u16, storage: &Path) -> Result<()> {
    let config = Arc::new(wnss_study::StudyConfig::load(pairs, training)?);
    let study = wnss_study::Study::open(config, storage)?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .with_context(|| format!("binding {host}:{port}"))?;
        eprintln!("study service listening on http://{}", listener.local_addr()?);
        wnss_study::serve(listener, wnss_study::AppState::new(study)).await?;
        Ok(())
    })
}

fn render(map: &Path, out: &Path) -> Result<()> {
    let m = load_saliency_map(map)?;
    let png = wnss_core::colormap::render_png(&m)?;
    std::fs::write(out, png).with_context(|| format!("writing {}", out.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildGt {
            manifest,
            sigma_degrees,
            out_dir,
            format,
            unit_mass,
        } => build_gt(&manifest, sigma_degrees, &out_dir, format, unit_mass),
        Command::Score {
            manifest,
            models_dir,
            metrics,
            seed,
            trials,
            borji_trials,
            sample_size,
            emd_max_cells,
            sigma_degrees,
            no_center,
            no_gt_self,
            out,
        } => {
            let mut config = ScoringConfig::with_seed(seed);
            config.shuffle.trials = trials;
            if let Some(n) = sample_size {
                config.shuffle.sample_size = SampleSize::Fixed(n);
            }
            config.borji_trials = borji_trials;
            config.emd.grid = if emd_max_cells == 0 {
                EmdGrid::Native
            } else {
                EmdGrid::Auto {
                    max_cells: emd_max_cells,
                }
            };
            config.include_gt_self = !no_gt_self;
            score(&manifest, &models_dir, &metrics, config, sigma_degrees, no_center, &out)
        }
        Command::Evaluate {
            scores,
            mos,
            out_dir,
            mode,
        } => evaluate(&scores, &mos, &out_dir, mode),
        Command::SelectImages {
            manifest,
            k,
            per_cluster,
            seed,
            sigma_degrees,
        } => select_images(&manifest, k, per_cluster, seed, sigma_degrees),
        Command::ServeStudy {
            pairs,
            training,
            port,
            host,
            storage_dir,
        } => serve_study(&pairs, training.as_deref(), &host, port, &storage_dir),
        Command::Render { map, out } => render(&map, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match e.downcast_ref::<HarnessError>() {
                Some(HarnessError::MissingMap(missing)) => {
                    eprintln!("error: {} missing maps:", missing.len());
                    for (model, image) in missing {
                        eprintln!("  {model}/{image}");
                    }
                }
                _ => eprintln!("error: {e:#}"),
            }
            ExitCode::FAILURE
        }
    }
}
