mod common;

use curvetext::cli::formats::*;
use curvetext::maskgrid::SegmentPrediction;
use curvetext::{Error, Point, Polygon};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{ctw_band, fuzz_parsers};

fn random_record(rng: &mut StdRng, id: &str) -> SegmentRecord {
    let res = rng.random_range(1..10usize);
    let scores = (0..res * res).map(|_| rng.random_range(0.0..1.0f32)).collect();
    SegmentRecord {
        image_id: id.to_string(),
        prediction: SegmentPrediction::new(
            Point::new(rng.random_range(-100.0..600.0), rng.random_range(-100.0..600.0)),
            rng.random_range(1.0..200.0),
            res,
            scores,
            rng.random_range(0.0..1.0f32),
        )
        .unwrap(),
    }
}

#[test]
fn fuzzed_inputs_never_panic() {
    let mut rng = StdRng::seed_from_u64(31);
    let report = fuzz_parsers(10_000, &mut rng);
    assert!(report.clean(), "{report:?}");
    assert!(report.rejected > 1000, "{report:?}");
}

#[test]
fn fuzzed_binary_dumps_never_panic() {
    let mut rng = StdRng::seed_from_u64(32);
    let records: Vec<_> = (0..3).map(|i| random_record(&mut rng, &format!("im{i}"))).collect();
    let clean = write_segment_dump_binary(&records).unwrap();
    for _ in 0..2000 {
        let mut bytes = clean.clone();
        match rng.random_range(0..3) {
            0 => bytes.truncate(rng.random_range(0..bytes.len())),
            1 => {
                let i = rng.random_range(0..bytes.len());
                bytes[i] = rng.random();
            }
            _ => {
                let i = rng.random_range(0..bytes.len().saturating_sub(4));
                bytes[i..i + 4].copy_from_slice(&rng.random::<u32>().to_le_bytes());
            }
        }
        let r = std::panic::catch_unwind(|| parse_segment_dump_binary(&bytes));
        assert!(r.is_ok());
    }
}

#[test]
fn ctw_round_trip() {
    let mut rng = StdRng::seed_from_u64(33);
    for _ in 0..500 {
        let x0 = rng.random_range(-100..500i64);
        let y0 = rng.random_range(-100..500i64);
        let band = ctw_band(x0, y0, x0 + rng.random_range(12..400), y0 + rng.random_range(3..80));
        let line = format_ctw_line(&band);
        assert_eq!(parse_ctw_line(&line).unwrap(), band);
        let padded = line.replace(',', " , ");
        assert_eq!(parse_ctw_line(&padded).unwrap(), band);
    }
}

#[test]
fn annotation_file_round_trip() {
    let bands: Vec<Polygon> = (0..6).map(|i| ctw_band(0, 30 * i, 100 + i, 30 * i + 20)).collect();
    let text: String = bands.iter().map(|b| format_ctw_line(b) + "\n").collect();
    assert_eq!(parse_annotation(&text, AnnotationFormat::Ctw).unwrap(), bands);
    assert_eq!(parse_annotation(&text, AnnotationFormat::Auto).unwrap(), bands);
    let tt: String = bands.iter().map(|b| format_coords(b) + "\n").collect();
    assert_eq!(parse_annotation(&tt, AnnotationFormat::TotalText).unwrap(), bands);
}

#[test]
fn errors_name_the_line() {
    let good = format_ctw_line(&ctw_band(0, 0, 60, 10));
    let text = format!("{good}\n\n{good}\n1,2,3\n");
    match parse_annotation(&text, AnnotationFormat::Ctw) {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 4);
            assert!(message.contains("expected 28 values"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn totaltext_vertex_counts() {
    let coords = |n: usize| -> String {
        let mut v = Vec::new();
        for i in 0..n {
            v.push(format!("{},0", 10 * i));
        }
        for i in (0..n).rev() {
            v.push(format!("{},10", 10 * i));
        }
        v.join(",")
    };
    assert_eq!(parse_totaltext_record(&coords(2)).unwrap().len(), 4);
    assert_eq!(parse_totaltext_record(&coords(15)).unwrap().len(), 30);
    assert!(parse_totaltext_record(&coords(16)).is_err());
    assert!(parse_totaltext_record(&coords(1)).is_err());
    assert!(parse_totaltext_record(&format!("{},5", coords(15))).is_err());
    assert!(parse_totaltext_record("0 0 10 0 10 10 0 10").is_ok());
}

#[test]
fn detections_round_trip() {
    let mut rng = StdRng::seed_from_u64(34);
    let dets: Vec<Detection> = (0..50)
        .map(|i| {
            let v = (0..14)
                .map(|k| {
                    let a = k as f64 / 14.0 * std::f64::consts::TAU;
                    Point::new(100.0 + 40.0 * a.cos() + rng.random_range(-1.0..1.0), 80.0 + 20.0 * a.sin())
                })
                .collect();
            Detection {
                image_id: format!("img{}", i % 7),
                score: rng.random_range(0.0..1.0),
                polygon: Polygon::new(v).unwrap(),
            }
        })
        .collect();
    assert_eq!(parse_detections(&write_detections(&dets)).unwrap(), dets);
}

#[test]
fn dumps_round_trip_in_both_encodings() {
    let mut rng = StdRng::seed_from_u64(35);
    let records: Vec<_> = (0..40).map(|i| random_record(&mut rng, &format!("image_{}", i % 5))).collect();
    let text = write_segment_dump_text(&records).unwrap();
    assert_eq!(parse_segment_dump_text(&text).unwrap(), records);
    let bin = write_segment_dump_binary(&records).unwrap();
    assert_eq!(parse_segment_dump_binary(&bin).unwrap(), records);
    assert!(parse_segment_dump_text("").unwrap().is_empty());
    assert!(parse_segment_dump_binary(&[]).unwrap().is_empty());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dump.bin");
    std::fs::write(&path, &bin).unwrap();
    assert_eq!(read_segment_dump(&path).unwrap(), records);
    std::fs::write(&path, &text).unwrap();
    assert_eq!(read_segment_dump(&path).unwrap(), records);
}

#[test]
fn short_mask_rows_are_rejected_with_an_offset() {
    let err = parse_segment_dump_text("SEG a 1 2 3 2 0.5\n0.1 0.2\n0.3\n").unwrap_err();
    assert!(matches!(err, Error::Format { offset: 26, .. }), "{err:?}");
}
