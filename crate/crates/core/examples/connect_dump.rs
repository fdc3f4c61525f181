//! Reads a segment dump, runs the connect stage and writes detections plus
//! an SVG overlay. Without arguments a synthetic dump is used.
//!
//! cargo run --example connect_dump -- [dump] [svg]

use curvetext::cli::config::PipelineConfig;
use curvetext::cli::connect::{render_svg, run_connect};
use curvetext::cli::formats::{read_segment_dump, write_detections};
use curvetext::cli::{case_records, synth_cases};
use curvetext::synth::SynthParams;

fn main() -> curvetext::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let records = match args.first() {
        Some(path) => read_segment_dump(path.as_ref())?,
        None => case_records(&synth_cases(11, 1, &SynthParams::default(), 0.0)?),
    };
    println!("{} segment predictions", records.len());
    let outputs = run_connect(records, &PipelineConfig::default(), 0)?;
    for out in &outputs {
        print!("{}", write_detections(&out.detections));
        for d in &out.diagnostics {
            eprintln!("{d}");
        }
    }
    if let Some(svg) = args.get(1) {
        let polys: Vec<_> = outputs.iter().flat_map(|o| o.detections.iter().map(|d| d.polygon.clone())).collect();
        std::fs::write(svg, render_svg(&[(&polys, "red")])).map_err(|source| curvetext::Error::Io {
            path: svg.into(),
            source,
        })?;
    }
    Ok(())
}
