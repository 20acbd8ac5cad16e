mod files;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use castseg::baseline::{detect_defects, BaselineParams, BASELINE_SOURCE};
use castseg::coco::{
    masks_to_coco, parse_coco, serialize_coco, split_by_names, split_dataset, validate, CocoDataset, MaskEntry,
};
use castseg::config::RunConfig;
use castseg::detections::{
    parse_detections, serialize_detections, DetectionSet, DEFAULT_NMS_IOU, DEFAULT_SCORE_THRESHOLD,
};
use castseg::metrics::{
    evaluate_dataset, find_plateau, match_instances, postprocess, sweep, write_metrics_csv, Averaging, EvalConfig,
    MetricPoint, Mode, SeriesPoint, DEFAULT_MIN_DELTA, DEFAULT_PATIENCE,
};
use castseg::raster::{binarize, load_image, Connectivity};
use castseg::render::{overlay, OverlayStyle};
use castseg::{Error, Result};
use clap::{ArgGroup, Parser, Subcommand};

use files::{file_name, image_ids, iteration_from_name, list_images, read_text, sibling, stem, write_atomic};

#[derive(Parser)]
#[command(
    name = "castseg",
    version,
    about = "Defect segmentation tooling for X-ray casting images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert ground-truth masks into a COCO annotation file
    Convert {
        /// Directory of input images (PNG or PGM)
        #[arg(long)]
        images: PathBuf,
        /// Directory of masks named like the images; pixels above 127 are defect
        #[arg(long)]
        masks: PathBuf,
        #[arg(long, default_value = "defect")]
        category: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a COCO file into train and test sets and write a trainer config
    #[command(group(ArgGroup::new("selection").required(true).args(["train_count", "train_files"])))]
    Split {
        #[arg(long)]
        coco: PathBuf,
        /// Number of images drawn at random for training
        #[arg(long)]
        train_count: Option<usize>,
        /// Explicit training file names (comma separated)
        #[arg(long, value_delimiter = ',')]
        train_files: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_train: PathBuf,
        #[arg(long)]
        out_test: PathBuf,
        /// Trainer config path [default: trainer_config.json next to --out-train]
        #[arg(long)]
        config_out: Option<PathBuf>,
    },
    /// Run the Otsu baseline detector over a directory of images
    Detect {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Smallest blob kept, in pixels
        #[arg(long, default_value_t = 3)]
        min_area: usize,
        /// COCO file supplying image ids; otherwise ids follow file-name order from 1
        #[arg(long)]
        coco: Option<PathBuf>,
        /// Detect dark defects instead of bright ones
        #[arg(long)]
        invert: bool,
        /// Pixel connectivity of blobs (4 or 8)
        #[arg(long, default_value_t = 8, value_parser = parse_connectivity)]
        connectivity: u8,
    },
    /// Pixel-level precision, recall and F1 of detections against ground truth
    Eval {
        #[arg(long)]
        coco: PathBuf,
        #[arg(long)]
        dets: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SCORE_THRESHOLD)]
        score_thresh: f64,
        #[arg(long, default_value_t = DEFAULT_NMS_IOU)]
        nms_iou: f64,
        /// Mask IoU needed for an instance-level match
        #[arg(long, default_value_t = 0.5)]
        match_iou: f64,
        /// Average per-image scores instead of pooling pixel counts
        #[arg(long = "macro")]
        macro_average: bool,
        /// Aggregate metrics CSV; the JSON report and per-image CSV go alongside
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate one detection file per training iteration and find the plateau
    Sweep {
        #[arg(long)]
        coco: PathBuf,
        /// Glob matching the per-iteration detection files
        #[arg(long)]
        dets_glob: String,
        #[arg(long, default_value_t = DEFAULT_SCORE_THRESHOLD)]
        score_thresh: f64,
        #[arg(long, default_value_t = DEFAULT_NMS_IOU)]
        nms_iou: f64,
        #[arg(long = "macro")]
        macro_average: bool,
        #[arg(long, default_value_t = DEFAULT_PATIENCE)]
        patience: usize,
        #[arg(long, default_value_t = DEFAULT_MIN_DELTA)]
        min_delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw detections over their images
    Overlay {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        dets: PathBuf,
        /// Output directory, one PNG per image
        #[arg(long)]
        out: PathBuf,
        /// COCO file supplying image ids and category names
        #[arg(long)]
        coco: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SCORE_THRESHOLD)]
        score_thresh: f64,
        #[arg(long, default_value_t = DEFAULT_NMS_IOU)]
        nms_iou: f64,
        /// Fill opacity of segmentation masks
        #[arg(long, default_value_t = 0.4)]
        opacity: f64,
        /// Label used when no COCO file names the category
        #[arg(long, default_value = "defect")]
        category: String,
    },
    /// Check a COCO file; exits non-zero when any violation is found
    Validate {
        #[arg(long)]
        coco: PathBuf,
    },
}

fn parse_connectivity(s: &str) -> std::result::Result<u8, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("expected 4 or 8, got {s}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Error::Invalid(violations)) => {
            eprintln!("error: {} violation(s)", violations.len());
            for v in violations {
                eprintln!("  {v}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Convert {
            images,
            masks,
            category,
            out,
        } => convert(&images, &masks, &category, &out),
        Command::Split {
            coco,
            train_count,
            train_files,
            seed,
            out_train,
            out_test,
            config_out,
        } => {
            let config_out = config_out.unwrap_or_else(|| out_train.with_file_name("trainer_config.json"));
            split(
                &coco,
                train_count,
                train_files,
                seed,
                &out_train,
                &out_test,
                &config_out,
            )
        }
        Command::Detect {
            images,
            out,
            min_area,
            coco,
            invert,
            connectivity,
        } => {
            let params = BaselineParams {
                min_area,
                invert,
                connectivity: Connectivity::try_from(connectivity)?,
            };
            detect(&images, &out, coco.as_deref(), &params)
        }
        Command::Eval {
            coco,
            dets,
            score_thresh,
            nms_iou,
            match_iou,
            macro_average,
            out,
        } => {
            let config = eval_config(score_thresh, nms_iou, macro_average)?;
            eval(&coco, &dets, &config, match_iou, &out)
        }
        Command::Sweep {
            coco,
            dets_glob,
            score_thresh,
            nms_iou,
            macro_average,
            patience,
            min_delta,
            out,
        } => {
            let config = eval_config(score_thresh, nms_iou, macro_average)?;
            sweep_cmd(&coco, &dets_glob, &config, patience, min_delta, &out)
        }
        Command::Overlay {
            images,
            dets,
            out,
            coco,
            score_thresh,
            nms_iou,
            opacity,
            category,
        } => {
            let style = OverlayStyle {
                fill_opacity: opacity,
                ..Default::default()
            };
            overlay_cmd(
                &images,
                &dets,
                &out,
                coco.as_deref(),
                score_thresh,
                nms_iou,
                &style,
                &category,
            )
        }
        Command::Validate { coco } => validate_cmd(&coco),
    }
}

fn eval_config(score_threshold: f64, nms_iou: f64, macro_average: bool) -> Result<EvalConfig> {
    for (name, v) in [("score threshold", score_threshold), ("NMS IoU", nms_iou)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("{name} {v} outside [0,1]")));
        }
    }
    Ok(EvalConfig {
        score_threshold,
        nms_iou,
        averaging: if macro_average {
            Averaging::Macro
        } else {
            Averaging::Micro
        },
    })
}

fn load_coco(path: &Path) -> Result<CocoDataset> {
    parse_coco(&read_text(path)?)
}

fn load_detections(path: &Path) -> Result<DetectionSet> {
    parse_detections(&read_text(path)?)
}

fn convert(images: &Path, masks: &Path, category: &str, out: &Path) -> Result<ExitCode> {
    let image_paths = list_images(images)?;
    let mask_paths = list_images(masks)?;
    let mut entries = Vec::with_capacity(image_paths.len());
    let mut unmatched = Vec::new();
    for path in &image_paths {
        // exact file name first, then any mask sharing the stem
        let mask_path = mask_paths
            .iter()
            .find(|m| file_name(m) == file_name(path))
            .or_else(|| mask_paths.iter().find(|m| stem(m) == stem(path)));
        let Some(mask_path) = mask_path else {
            unmatched.push(file_name(path));
            continue;
        };
        let image = load_image(path)?;
        let mask = load_image(mask_path)?;
        if (image.width(), image.height()) != (mask.width(), mask.height()) {
            return Err(Error::DimensionMismatch(format!(
                "{}: image is {}x{}, mask {} is {}x{}",
                file_name(path),
                image.width(),
                image.height(),
                file_name(mask_path),
                mask.width(),
                mask.height()
            )));
        }
        entries.push(MaskEntry {
            file_name: file_name(path),
            width: image.width(),
            height: image.height(),
            mask: binarize(&mask, 127),
        });
    }
    if !unmatched.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no mask for {} image(s): {}",
            unmatched.len(),
            unmatched.join(", ")
        )));
    }
    let dataset = masks_to_coco(&entries, category)?;
    write_atomic(out, serialize_coco(&dataset)?.as_bytes())?;
    println!("{} annotations", dataset.annotations.len());
    Ok(ExitCode::SUCCESS)
}

fn split(
    coco: &Path,
    train_count: Option<usize>,
    train_files: Option<Vec<String>>,
    seed: u64,
    out_train: &Path,
    out_test: &Path,
    config_out: &Path,
) -> Result<ExitCode> {
    let dataset = load_coco(coco)?;
    let (train, test) = match (train_count, train_files) {
        (Some(n), _) => split_dataset(&dataset, n, seed)?,
        (None, Some(names)) => split_by_names(&dataset, &names)?,
        (None, None) => unreachable!("clap requires one selection flag"),
    };
    write_atomic(out_train, serialize_coco(&train)?.as_bytes())?;
    write_atomic(out_test, serialize_coco(&test)?.as_bytes())?;
    write_atomic(config_out, RunConfig::with_seed(seed).to_json()?.as_bytes())?;
    println!(
        "train: {} images, test: {} images",
        train.images.len(),
        test.images.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn detect(images: &Path, out: &Path, coco: Option<&Path>, params: &BaselineParams) -> Result<ExitCode> {
    let reference = coco.map(load_coco).transpose()?;
    let paths = list_images(images)?;
    let ids = image_ids(&paths, reference.as_ref())?;
    let mut all = DetectionSet::new(BASELINE_SOURCE, Vec::new());
    for path in &paths {
        let image = load_image(path)?;
        if let Some(expected) = reference.as_ref().and_then(|r| r.image(ids[path])) {
            if (expected.width, expected.height) != (image.width(), image.height()) {
                return Err(Error::DimensionMismatch(format!(
                    "{}: file is {}x{}, COCO entry says {}x{}",
                    file_name(path),
                    image.width(),
                    image.height(),
                    expected.width,
                    expected.height
                )));
            }
        }
        all.detections
            .extend(detect_defects(&image, ids[path], params).detections);
    }
    write_atomic(out, serialize_detections(&all)?.as_bytes())?;
    println!("{} detections in {} images", all.len(), paths.len());
    Ok(ExitCode::SUCCESS)
}

fn eval(coco: &Path, dets: &Path, config: &EvalConfig, match_iou: f64, out: &Path) -> Result<ExitCode> {
    let gt = load_coco(coco)?;
    let preds = load_detections(dets)?;
    let report = evaluate_dataset(&preds, &gt, config)?;
    let kept = postprocess(&preds, config.score_threshold, config.nms_iou);
    let instances = match_instances(&kept, &gt, match_iou)?;

    let mut csv = Vec::new();
    write_metrics_csv(
        &mut csv,
        &[MetricPoint::new(preds.iteration().unwrap_or(0), report.aggregate)],
    )?;
    write_atomic(out, &csv)?;

    let mut per_image = csv::Writer::from_writer(Vec::new());
    per_image.write_record([
        "image_id",
        "file_name",
        "tp",
        "fp",
        "fn",
        "tn",
        "precision",
        "recall",
        "f1",
    ])?;
    for row in &report.per_image {
        let c = row.confusion;
        let s = row.scores;
        per_image.write_record([
            row.image_id.to_string(),
            row.file_name.clone(),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            c.tn.to_string(),
            s.precision.to_string(),
            s.recall.to_string(),
            s.f1.to_string(),
        ])?;
    }
    let per_image = per_image.into_inner().map_err(|e| Error::io(out, e.into_error()))?;
    write_atomic(&sibling(out, "_per_image", "csv"), &per_image)?;

    let json = serde_json::json!({
        "source": preds.source,
        "score_threshold": config.score_threshold,
        "nms_iou": config.nms_iou,
        "match_iou": match_iou,
        "report": report,
        "instances": instances,
    });
    let mut text = serde_json::to_string_pretty(&json).expect("report serializes");
    text.push('\n');
    write_atomic(&sibling(out, "", "json"), text.as_bytes())?;

    let a = report.aggregate;
    println!(
        "precision {:.4} recall {:.4} f1 {:.4} ({} images, instances tp {} fp {} fn {})",
        a.precision,
        a.recall,
        a.f1,
        report.per_image.len(),
        instances.tp,
        instances.fp,
        instances.fn_
    );
    Ok(ExitCode::SUCCESS)
}

fn sweep_cmd(
    coco: &Path,
    pattern: &str,
    config: &EvalConfig,
    patience: usize,
    min_delta: f64,
    out: &Path,
) -> Result<ExitCode> {
    let gt = load_coco(coco)?;
    let paths = glob::glob(pattern).map_err(|e| Error::InvalidArgument(format!("bad glob {pattern:?}: {e}")))?;
    let mut runs = Vec::new();
    for entry in paths {
        let path = entry.map_err(|e| Error::io(e.path().to_path_buf(), e.into()))?;
        let set = load_detections(&path)?;
        let iteration = set.iteration().or_else(|| iteration_from_name(&path)).ok_or_else(|| {
            Error::InvalidArgument(format!("{}: no iteration in source or file name", path.display()))
        })?;
        runs.push((iteration, set));
    }
    if runs.is_empty() {
        return Err(Error::InvalidArgument(format!("no files match {pattern:?}")));
    }
    runs.sort_by_key(|(iteration, _)| *iteration);
    let points = sweep(&runs, &gt, config)?;

    let mut csv = Vec::new();
    write_metrics_csv(&mut csv, &points)?;
    write_atomic(out, &csv)?;

    for p in &points {
        println!(
            "iter {:>6}  precision {:.4}  recall {:.4}  f1 {:.4}",
            p.iteration, p.precision, p.recall, p.f1
        );
    }
    let series: Vec<SeriesPoint> = points
        .iter()
        .map(|p| SeriesPoint {
            iteration: p.iteration,
            value: p.f1,
        })
        .collect();
    match find_plateau(&series, Mode::Maximize, patience, min_delta)? {
        Some(iteration) => println!("plateau: f1 stops improving after iteration {iteration}"),
        None => println!("plateau: none detected"),
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn overlay_cmd(
    images: &Path,
    dets: &Path,
    out: &Path,
    coco: Option<&Path>,
    score_threshold: f64,
    nms_iou: f64,
    style: &OverlayStyle,
    category: &str,
) -> Result<ExitCode> {
    let reference = coco.map(load_coco).transpose()?;
    let names: BTreeMap<u64, String> = match &reference {
        Some(r) => r.category_names(),
        None => BTreeMap::from([(1, category.to_string())]),
    };
    let preds = postprocess(&load_detections(dets)?, score_threshold, nms_iou);
    let paths = list_images(images)?;
    let ids = image_ids(&paths, reference.as_ref())?;
    for path in &paths {
        let image = load_image(path)?;
        let rendered = overlay(&image, &preds.for_image(ids[path]), &names, style)?;
        write_atomic(&out.join(format!("{}.png", stem(path))), &rendered.to_png()?)?;
    }
    println!("{} overlays written to {}", paths.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(coco: &Path) -> Result<ExitCode> {
    let dataset = CocoDataset::from_json(&read_text(coco)?)?;
    let violations = validate(&dataset);
    if violations.is_empty() {
        println!(
            "ok: {} images, {} categories, {} annotations",
            dataset.images.len(),
            dataset.categories.len(),
            dataset.annotations.len()
        );
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        println!("{v}");
    }
    eprintln!("{} violation(s)", violations.len());
    Ok(ExitCode::from(1))
}
