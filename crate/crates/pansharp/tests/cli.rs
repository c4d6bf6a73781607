use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use pansharp::pnm::{decode_any, encode_image, ImageFormat};
use pansharp::report::{Report, Value, CSV_HEADER};
use pansharp_core::raster::{quantize_image, resample_nearest};
use pansharp_core::{Band, MultiBandImage, QuantizationPolicy};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pansharp"))
}

fn write(path: &Path, img: &MultiBandImage) {
    let format = ImageFormat::binary_for(img.band_count()).unwrap();
    fs::write(path, encode_image(img, format).unwrap()).unwrap();
}

fn ms_small() -> MultiBandImage {
    MultiBandImage::new(
        (0..3)
            .map(|k| Band::from_fn(4, 3, |x, y| (20 + 30 * k + 17 * x + 11 * y) as f64).unwrap())
            .collect(),
    )
    .unwrap()
}

fn pan_textured(w: usize, h: usize) -> MultiBandImage {
    Band::from_fn(w, h, |x, y| ((x * 37 + y * 91) % 200 + 30) as f64).unwrap().into()
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["pansharp"];
    full.extend_from_slice(args);
    pansharp::cli::run(full)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn hfa_with_flat_pan_returns_the_resampled_ms() {
    let dir = tempfile::tempdir().unwrap();
    let (pan, ms, out) = (dir.path().join("pan.pgm"), dir.path().join("ms.ppm"), dir.path().join("out.ppm"));
    write(&pan, &Band::filled(12, 9, 140.0).unwrap().into());
    write(&ms, &ms_small());
    let status = bin()
        .args(["fuse", "--method", "hfa", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let fused = decode_any(&fs::read(&out).unwrap()).unwrap();
    let want = quantize_image(&resample_nearest(&ms_small(), 12, 9).unwrap(), &QuantizationPolicy::default());
    assert_eq!(fused, want);
}

#[test]
fn unknown_method_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let (pan, ms) = (dir.path().join("pan.pgm"), dir.path().join("ms.ppm"));
    write(&pan, &pan_textured(8, 6));
    write(&ms, &ms_small());
    let out = dir.path().join("out.ppm");
    let output = bin()
        .args(["fuse", "--method", "ihs", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&output.stderr).is_empty());
    assert_eq!(files_in(dir.path()), [ms, pan]);
}

#[test]
fn bad_kernel_is_rejected_before_reading_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.ppm");
    let missing = dir.path().join("missing.pgm");
    let code = run(&["fuse", "--method", "hpfa", "--kernel", "4", "--pan", p(&missing), "--ms", p(&missing), "--out", p(&out)]);
    assert_eq!(code, 2);
    assert!(files_in(dir.path()).is_empty());
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();
    let (pan, ms, out) = (dir.path().join("pan.pgm"), dir.path().join("ms.ppm"), dir.path().join("out.ppm"));
    write(&ms, &ms_small());
    // missing file
    assert_eq!(run(&["fuse", "--method", "brovey", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)]), 3);
    // malformed file
    fs::write(&pan, b"P5\n4 4\n255\n\x01").unwrap();
    assert_eq!(run(&["fuse", "--method", "brovey", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)]), 4);
    // PAN with three bands
    write(&pan, &ms_small());
    assert_eq!(run(&["fuse", "--method", "brovey", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)]), 6);
    // wavelet depth beyond what the geometry allows
    write(&pan, &pan_textured(8, 6));
    assert_eq!(
        run(&["fuse", "--method", "wavelet", "--levels", "9", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)]),
        6
    );
    assert!(!out.exists());
}

#[test]
fn brovey_band_sum_tracks_pan() {
    let dir = tempfile::tempdir().unwrap();
    let (pan, ms, out) = (dir.path().join("pan.pgm"), dir.path().join("ms.ppm"), dir.path().join("out.ppm"));
    // Keep values small enough that no band saturates after quantization.
    let pan_img: MultiBandImage = Band::from_fn(8, 6, |x, y| ((x * 7 + y * 13) % 60 + 20) as f64).unwrap().into();
    write(&pan, &pan_img);
    write(&ms, &ms_small());
    assert_eq!(run(&["fuse", "--method", "BT", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out)]), 0);
    let fused = decode_any(&fs::read(&out).unwrap()).unwrap();
    for y in 0..6 {
        for x in 0..8 {
            let sum: f64 = fused.bands().iter().map(|b| b.get(x, y)).sum();
            // each band is rounded once
            assert!((sum - pan_img.band(0).get(x, y)).abs() <= 1.5, "({x},{y}) {sum}");
        }
    }
}

#[test]
fn fuse_writes_report_against_reference() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (pan, ms, out, rep) = (d.join("pan.pgm"), d.join("ms.ppm"), d.join("out.ppm"), d.join("r.json"));
    write(&pan, &pan_textured(8, 6));
    write(&ms, &ms_small());
    let reference = resample_nearest(&ms_small(), 8, 6).unwrap();
    let ref_path = d.join("ref.ppm");
    write(&ref_path, &reference);
    let code = run(&[
        "fuse", "--method", "hfm", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out), "--reference", p(&ref_path),
        "--report", p(&rep),
    ]);
    assert_eq!(code, 0);
    let report = Report::from_json(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report.pixel_count, 48);
    assert_eq!(report.methods.keys().collect::<Vec<_>>(), ["HFM"]);
    let cc = report.row("HFM", 3).unwrap().cc.as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&cc));

    // reference without report is a usage error
    let code = run(&["fuse", "--method", "hfm", "--pan", p(&pan), "--ms", p(&ms), "--out", p(&out), "--reference", p(&ref_path)]);
    assert_eq!(code, 2);
}

#[test]
fn metrics_of_an_image_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let img = resample_nearest(&ms_small(), 8, 6).unwrap();
    let path = dir.path().join("a.ppm");
    write(&path, &img);
    let (json, csv) = (dir.path().join("m.json"), dir.path().join("m.csv"));
    assert_eq!(run(&["metrics", "--fused", p(&path), "--reference", p(&path), "--report", p(&json)]), 0);
    let report = Report::from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    for k in 1..=3 {
        let row = report.row("FUSED", k).unwrap();
        assert!((row.cc.as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(row.nrmse, Value::Number(0.0));
        assert_eq!(row.di, Value::Number(0.0));
        assert_eq!(row.snr, Value::Infinite);
    }

    assert_eq!(
        run(&["metrics", "--fused", p(&path), "--reference", p(&path), "--report", p(&csv), "--format", "csv"]),
        0
    );
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("FUSED,1,"));
    assert!(lines[1].contains(",inf,0,0,"));
}

#[test]
fn metrics_geometry_mismatch_names_both_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.ppm"), dir.path().join("b.ppm"));
    write(&a, &ms_small());
    write(&b, &resample_nearest(&ms_small(), 8, 6).unwrap());
    let out = bin()
        .args(["metrics", "--fused", p(&a), "--reference", p(&b), "--report", p(&dir.path().join("r.json"))])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(6));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("4x3x3") && msg.contains("8x6x3"), "{msg}");
}

#[test]
fn experiment_writes_ranked_report() {
    let dir = tempfile::tempdir().unwrap();
    let reference = MultiBandImage::new(
        (0..3)
            .map(|k| Band::from_fn(30, 20, |x, y| ((x * 9 + y * 4 + k * 50) % 230) as f64 + 10.0).unwrap())
            .collect(),
    )
    .unwrap();
    let (ref_path, rep) = (dir.path().join("ref.ppm"), dir.path().join("exp.json"));
    write(&ref_path, &reference);
    assert_eq!(run(&["experiment", "--reference", p(&ref_path), "--report", p(&rep)]), 0);
    let report = Report::from_json(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report.methods.len(), 8);
    assert_eq!(report.ranking.len(), 7);
    assert_eq!(run(&["experiment", "--reference", p(&ref_path), "--factor", "1", "--report", p(&rep)]), 2);
}
