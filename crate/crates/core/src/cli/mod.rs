//! Command-line front end. The binary only parses arguments and calls
//! [`run`]; every subcommand is also usable as a library call.

pub mod config;
pub mod connect;
pub mod formats;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::anchors::{assign_label, AnchorSpec};
use crate::error::{Error, Result};
use crate::eval::{aggregate, match_image, DEFAULT_IOU_THRESHOLD};
use crate::geom::polygon_iou;
use crate::lossref::{check_gradients, focal_loss, smooth_l1, LossConfig};
use crate::maskgrid::ScoreGrid;
use crate::synth::{gen_case, perturb, SynthCase, SynthParams};

use config::PipelineConfig;
use formats::{AnnotationFormat, Detection, SegmentRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "curvetext", version, about = "Curved text polygons from square-anchor segment masks")]
pub struct Cli {
    /// `key=value` configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge segment masks and emit one 14-vertex polygon per text instance.
    Connect(ConnectArgs),
    /// Precision, recall and F-measure of detections against ground truth.
    Evaluate(EvaluateArgs),
    /// List the positive anchors of an annotation file.
    LabelAnchors(LabelArgs),
    /// Write seeded synthetic cases.
    Synth(SynthArgs),
    /// Check loss gradients against finite differences.
    LossCheck(LossCheckArgs),
    /// IoU matrix between the polygons of two files.
    Iou(IouArgs),
}

#[derive(Debug, Args)]
pub struct ConnectArgs {
    /// Segment-prediction dump, text or binary.
    #[arg(long)]
    pub dump: PathBuf,
    /// Detection output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-region masks as binary score grids.
    #[arg(long)]
    pub regions_dir: Option<PathBuf>,
    /// Directory for one SVG overlay per image.
    #[arg(long)]
    pub svg_out: Option<PathBuf>,
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long)]
    pub s2: Option<f64>,
    #[arg(long)]
    pub s3: Option<f64>,
    #[arg(long)]
    pub max_rois: Option<usize>,
    #[arg(long)]
    pub canvas_stride: Option<f64>,
    #[arg(long)]
    pub n_sample: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Detection file (`<image_id> <score> <coords>` lines).
    #[arg(long)]
    pub det: PathBuf,
    /// Directory of `<image_id>.txt` annotation files, or a polygon file.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value = "auto")]
    pub gt_format: AnnotationFormat,
    #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
    pub iou: f64,
    #[arg(long)]
    pub per_image: bool,
    /// Exit with status 1 when the F-measure falls below this value.
    #[arg(long)]
    pub min_f: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Annotation file, one polygon per line.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub width: u32,
    #[arg(long)]
    pub height: u32,
    #[arg(long, default_value = "auto")]
    pub format: AnnotationFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    pub cases: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Boundary flip probability applied to every mask.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub blur: bool,
    /// Write the dump in binary form (`segments.bin`).
    #[arg(long)]
    pub binary: bool,
}

#[derive(Debug, Args)]
pub struct LossCheckArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct IouArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    InvariantFailed,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::InvariantFailed) => EXIT_INVARIANT,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

/// Loads the configuration file if any, then applies `--seed`.
pub fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        cfg.apply_text(&text)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: Option<&Path>, text: &str, out: &mut dyn std::io::Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Runs a command, writing its primary output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn std::io::Write) -> Result<Status> {
    let mut cfg = load_config(cli)?;
    match &cli.command {
        Command::Connect(a) => {
            for (key, v) in [
                ("s1", a.s1.map(|v| v.to_string())),
                ("s2", a.s2.map(|v| v.to_string())),
                ("s3", a.s3.map(|v| v.to_string())),
                ("max_rois", a.max_rois.map(|v| v.to_string())),
                ("canvas_stride", a.canvas_stride.map(|v| v.to_string())),
                ("n_sample", a.n_sample.map(|v| v.to_string())),
            ] {
                if let Some(v) = v {
                    cfg.set(key, &v)?;
                }
            }
            cfg.validate()?;
            connect_cmd(a, &cfg, cli.jobs, out)
        }
        Command::Evaluate(a) => evaluate_cmd(a, out),
        Command::LabelAnchors(a) => label_cmd(a, &cfg, out),
        Command::Synth(a) => synth_cmd(a, &cfg, cli.jobs),
        Command::LossCheck(a) => loss_check_cmd(a, &cfg, out),
        Command::Iou(a) => iou_cmd(a, out),
    }
}

fn connect_cmd(a: &ConnectArgs, cfg: &PipelineConfig, jobs: usize, out: &mut dyn std::io::Write) -> Result<Status> {
    let records = formats::read_segment_dump(&a.dump)?;
    let results = connect::run_connect(records, cfg, jobs)?;
    let mut text = String::new();
    for r in &results {
        for d in &r.diagnostics {
            eprintln!("warning: {d}");
        }
        text.push_str(&formats::write_detections(&r.detections));
    }
    write_out(a.out.as_deref(), &text, out)?;
    if let Some(dir) = &a.regions_dir {
        create_dir(dir)?;
        for r in &results {
            for (k, region) in r.regions.iter().enumerate() {
                let path = dir.join(format!("{}_r{k}.sgrd", r.image_id));
                fs::write(&path, region.mask.to_score_grid().to_bytes()).map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    if let Some(dir) = &a.svg_out {
        create_dir(dir)?;
        for r in &results {
            let polys: Vec<_> = r.detections.iter().map(|d| d.polygon.clone()).collect();
            let path = dir.join(format!("{}.svg", r.image_id));
            fs::write(&path, connect::render_svg(&[(&polys, "red")])).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(Status::Ok)
}

fn evaluate_cmd(a: &EvaluateArgs, out: &mut dyn std::io::Write) -> Result<Status> {
    let det_text = fs::read_to_string(&a.det).map_err(|e| Error::io(&a.det, e))?;
    let dets = formats::parse_detections(&det_text)?;
    let gts = formats::load_annotations(&a.gt, a.gt_format)?;
    let mut by_image = formats::group_by_image(dets.into_iter().map(|d| (d.image_id.clone(), d)));

    let mut ids = Vec::new();
    let mut per_image = Vec::new();
    for rec in &gts {
        let det_polys = match by_image.iter().position(|(id, _)| *id == rec.image_id) {
            Some(i) => by_image.remove(i).1.into_iter().map(|d: Detection| d.polygon).collect(),
            None => Vec::new(),
        };
        per_image.push(match_image(&det_polys, &rec.polygons, a.iou));
        ids.push(rec.image_id.clone());
    }
    for (id, extra) in by_image {
        let polys: Vec<_> = extra.into_iter().map(|d| d.polygon).collect();
        per_image.push(match_image(&polys, &[], a.iou));
        ids.push(id);
    }

    let report = aggregate(&per_image);
    let mut text = format!(
        "{:.6} {:.6} {:.6} {} {} {}\n",
        report.precision, report.recall, report.f_measure, report.tp, report.n_det, report.n_gt
    );
    if a.per_image {
        for (id, c) in ids.iter().zip(&report.per_image) {
            let (p, r, f) = c.prf();
            text.push_str(&format!("{id} {p:.6} {r:.6} {f:.6} {} {} {}\n", c.tp, c.n_det, c.n_gt));
        }
    }
    write_out(None, &text, out)?;
    Ok(match a.min_f {
        Some(min) if report.f_measure < min => Status::InvariantFailed,
        _ => Status::Ok,
    })
}

fn label_cmd(a: &LabelArgs, cfg: &PipelineConfig, out: &mut dyn std::io::Write) -> Result<Status> {
    let text = fs::read_to_string(&a.gt).map_err(|e| Error::io(&a.gt, e))?;
    let gts = formats::parse_annotation(&text, a.format)?;
    let spec = cfg.anchor_spec()?;
    let mut lines = String::new();
    for anchor in spec.image_anchors(a.width, a.height) {
        if let Some(g) = assign_label(&anchor, &gts).matched_gt {
            lines.push_str(&format!(
                "{} {} {} {} {} {} {} {g}\n",
                anchor.level, anchor.i, anchor.j, anchor.k_index, anchor.cx, anchor.cy, anchor.side
            ));
        }
    }
    write_out(a.out.as_deref(), &lines, out)?;
    Ok(Status::Ok)
}

/// Classification score maps of a case, one per anchor level: each cell
/// holds the best prediction score among the anchors at that location.
pub fn case_score_maps(case: &SynthCase, spec: &AnchorSpec) -> Result<Vec<ScoreGrid>> {
    let (w, h) = case.image_size;
    let mut maps = Vec::with_capacity(spec.levels());
    for level in 0..spec.levels() {
        let (fw, fh) = spec.feature_size(level, w, h)?;
        let mut values = vec![0.0f32; fw * fh];
        for (a, m) in case.anchors.iter().zip(&case.masks) {
            if a.level == level && a.i < fw && a.j < fh {
                let v = &mut values[a.j * fw + a.i];
                *v = v.max(m.score);
            }
        }
        maps.push(ScoreGrid::new(fw, fh, spec.stride(level)? as f32, values)?);
    }
    Ok(maps)
}

/// Dump records for a set of cases, all predictions of each case in turn.
pub fn case_records(cases: &[SynthCase]) -> Vec<SegmentRecord> {
    cases
        .iter()
        .flat_map(|c| {
            c.predictions().into_iter().map(|p| SegmentRecord {
                image_id: c.image_id.clone(),
                prediction: p,
            })
        })
        .collect()
}

/// Generates `count` cases with seeds `seed, seed + 1, ...`.
pub fn synth_cases(seed: u64, count: usize, params: &SynthParams, noise: f64) -> Result<Vec<SynthCase>> {
    use rayon::prelude::*;
    (0..count as u64)
        .into_par_iter()
        .map(|i| gen_case(seed.wrapping_add(i), params).and_then(|c| perturb(&c, noise)))
        .collect()
}

fn synth_cmd(a: &SynthArgs, cfg: &PipelineConfig, jobs: usize) -> Result<Status> {
    let params = SynthParams {
        anchors: cfg.anchor_spec()?,
        blur: a.blur,
        ..SynthParams::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    let cases = pool.install(|| synth_cases(cfg.seed, a.cases, &params, a.noise))?;

    let gt_dir = a.out_dir.join("gt");
    let score_dir = a.out_dir.join("scores");
    create_dir(&gt_dir)?;
    create_dir(&score_dir)?;
    for c in &cases {
        let lines: String = c
            .gt_polygons
            .iter()
            .map(|p| formats::format_ctw_line(p) + "\n")
            .collect();
        let path = gt_dir.join(format!("{}.txt", c.image_id));
        fs::write(&path, lines).map_err(|e| Error::io(&path, e))?;
        for (level, map) in case_score_maps(c, &params.anchors)?.iter().enumerate() {
            let path = score_dir.join(format!("{}_L{level}.sgrd", c.image_id));
            fs::write(&path, map.to_bytes()).map_err(|e| Error::io(&path, e))?;
        }
    }
    let records = case_records(&cases);
    let (name, bytes) = if a.binary {
        ("segments.bin", formats::write_segment_dump_binary(&records)?)
    } else {
        ("segments.txt", formats::write_segment_dump_text(&records)?.into_bytes())
    };
    let path = a.out_dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    let path = a.out_dir.join("config.txt");
    fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))?;
    Ok(Status::Ok)
}

fn loss_check_cmd(a: &LossCheckArgs, cfg: &PipelineConfig, out: &mut dyn std::io::Write) -> Result<Status> {
    let report = check_gradients(a.samples, cfg.seed);
    let spot = focal_loss(0.5, true, &LossConfig::default())?;
    let spot_ok = (spot - 0.25 * 0.25 * std::f64::consts::LN_2).abs() < 1e-12
        && smooth_l1(1.0) == 0.5
        && smooth_l1(2.0) == 1.5;
    let text = format!(
        "samples {}\nfocal_max_rel_err {:e}\nsmooth_l1_max_rel_err {:e}\ncls_max_rel_err {:e}\n\
         segment_max_rel_err {:e}\nkink_value_gap {:e}\nkink_grad_gap {:e}\nspot_values {}\n",
        report.samples,
        report.focal_max_rel_err,
        report.smooth_l1_max_rel_err,
        report.cls_max_rel_err,
        report.segment_max_rel_err,
        report.kink_value_gap,
        report.kink_grad_gap,
        if spot_ok { "ok" } else { "FAIL" },
    );
    write_out(None, &text, out)?;
    Ok(if report.passed() && spot_ok {
        Status::Ok
    } else {
        Status::InvariantFailed
    })
}

fn iou_cmd(a: &IouArgs, out: &mut dyn std::io::Write) -> Result<Status> {
    let read = |p: &Path| -> Result<_> {
        let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        formats::parse_polygon_list(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))
    };
    let (xs, ys) = (read(&a.a)?, read(&a.b)?);
    let mut text = String::new();
    for x in &xs {
        let row: Vec<String> = ys.iter().map(|y| format!("{:.6}", polygon_iou(x, y))).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    write_out(None, &text, out)?;
    Ok(Status::Ok)
}
