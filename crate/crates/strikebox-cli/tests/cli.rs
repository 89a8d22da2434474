//! Black-box tests of the `strikebox` binary: each subcommand is run as a
//! real process against temporary files.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use strikebox::bits::{BitOrigin, BitStream};
use strikebox::metrics;
use strikebox::sbox::{SBox, SBoxFormat};
use strikebox::spn::ImageBuffer;
use strikebox::testdata::SAMPLE_SBOX_3;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strikebox"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Small deterministic LDAR capture.
fn write_ldar(path: &Path, records: usize, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut text = String::new();
    for _ in 0..records {
        text.push_str(&format!(
            "{} {} {} {} {} {} {} {}\n",
            rng.random_range(1..=28),
            rng.random_range(0..24),
            rng.random_range(0..60),
            rng.random_range(0..60),
            rng.random_range(0..1_000_000),
            rng.random_range(-100_000..100_000i64),
            rng.random_range(-100_000..100_000i64),
            rng.random_range(0..15_000)
        ));
    }
    fs::write(path, text).unwrap();
}

fn write_noise_bits(path: &Path, len: usize, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bits: Vec<u8> = (0..len).map(|_| rng.random_range(0..2u8)).collect();
    fs::write(path, BitStream::from_bits(&bits, BitOrigin::Whitened).to_ascii(64)).unwrap();
}

fn count_bits(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().chars().filter(|c| *c == '0' || *c == '1').count()
}

#[test]
fn extract_produces_expected_bit_count_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let ldar = dir.path().join("strikes.txt");
    let out = dir.path().join("bits.txt");
    write_ldar(&ldar, 51, 1);
    run_ok(&["extract", "--input", &s(&ldar), "--out", &s(&out)]);
    assert_eq!(count_bits(&out), 24 * 50);
    let report = fs::read_to_string(dir.path().join("bits.txt.report.txt")).unwrap();
    assert!(report.contains("# stage raw"));
    assert!(!report.contains("# stage whitened"));
    assert!(dir.path().join("bits.txt.manifest.json").exists());
}

#[test]
fn extract_whiten_shrinks_stream_and_reports_both_stages() {
    let dir = tempfile::tempdir().unwrap();
    let ldar = dir.path().join("strikes.txt");
    let plain = dir.path().join("raw.txt");
    let white = dir.path().join("white.txt");
    write_ldar(&ldar, 2_001, 2);
    run_ok(&["extract", "--input", &s(&ldar), "--out", &s(&plain)]);
    run_ok(&["extract", "--input", &s(&ldar), "--out", &s(&white), "--whiten"]);
    let raw_len = count_bits(&plain);
    let white_len = count_bits(&white);
    assert_eq!(raw_len, 24 * 2_000);
    assert!(white_len < raw_len / 2 + 1, "whitened {white_len} vs raw {raw_len}");
    let report = fs::read_to_string(dir.path().join("white.txt.report.txt")).unwrap();
    assert!(report.contains("# stage raw"));
    assert!(report.contains("# stage whitened"));
}

#[test]
fn extract_refuses_insufficient_records() {
    let dir = tempfile::tempdir().unwrap();
    let ldar = dir.path().join("empty.txt");
    let out = dir.path().join("bits.txt");
    fs::write(&ldar, "").unwrap();
    let result = run(&["extract", "--input", &s(&ldar), "--out", &s(&out)]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("at least 2 records"));
}

#[test]
fn extract_strict_fails_on_malformed_line_lenient_skips() {
    let dir = tempfile::tempdir().unwrap();
    let ldar = dir.path().join("mixed.txt");
    let out = dir.path().join("bits.txt");
    fs::write(&ldar, "1 2 3 4 5 6 7 8\nbroken line\n1 2 3 4 5 9 9 9\n").unwrap();
    let strict = run(&["extract", "--input", &s(&ldar), "--out", &s(&out), "--strict"]);
    assert!(!strict.status.success());
    let lenient = run(&["extract", "--input", &s(&ldar), "--out", &s(&out)]);
    assert!(lenient.status.success());
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("skipping line 2"));
    assert_eq!(count_bits(&out), 24);
}

fn gen_boxes(dir: &Path, total: usize, seed: u64) -> PathBuf {
    let bits = dir.join("bits.txt");
    write_noise_bits(&bits, 300_000, seed);
    let out_dir = dir.join(format!("boxes_{seed}"));
    run_ok(&["gen", "--bits", &s(&bits), "--total", &total.to_string(), "--out-dir", &s(&out_dir)]);
    out_dir
}

#[test]
fn gen_writes_boxes_index_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = gen_boxes(dir.path(), 3, 7);
    let index = fs::read_to_string(out_dir.join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 4); // header + 3 rows
    assert!(index.starts_with("file,digest,nonlinearity,bit_mean_nonlinearity"));

    // index nonlinearity column matches a recomputation from the files
    for line in index.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let sbox = SBox::parse(&fs::read_to_string(out_dir.join(fields[0])).unwrap()).unwrap();
        assert_eq!(sbox.digest().to_hex(), fields[1]);
        assert_eq!(metrics::nonlinearity(&sbox).to_string(), fields[2]);
        assert_eq!(metrics::bit_mean_nonlinearity(&sbox).to_string(), fields[3]);
    }

    // re-running the same inputs reproduces the files byte for byte
    let again = tempfile::tempdir().unwrap();
    let out_dir2 = gen_boxes(again.path(), 3, 7);
    for name in ["sbox_0000.txt", "sbox_0001.txt", "sbox_0002.txt", "index.csv"] {
        assert_eq!(
            fs::read(out_dir.join(name)).unwrap(),
            fs::read(out_dir2.join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn eval_reports_both_nonlinearity_readings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sample3.txt");
    let sbox = SBox::from_bytes(&SAMPLE_SBOX_3).unwrap();
    fs::write(&path, sbox.serialize(SBoxFormat::Grid16)).unwrap();
    let stdout = run_ok(&["eval", "--sbox", &s(&path)]);
    assert!(stdout.contains("bit_mean_nonlinearity 108"), "stdout: {stdout}");
    assert!(stdout.contains("nonlinearity 92"));
    assert!(stdout.contains("lp 0.140625"));

    let csv = run_ok(&["eval", "--sbox", &s(&path), "--format", "csv"]);
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn eval_identity_box_and_dp_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity.txt");
    fs::write(&path, SBox::identity().serialize(SBoxFormat::Grid16)).unwrap();
    let dp = dir.path().join("dp.csv");
    let stdout = run_ok(&["eval", "--sbox", &s(&path), "--dp-table", &s(&dp)]);
    assert!(stdout.contains("lp 0.500000"));
    let table = fs::read_to_string(&dp).unwrap();
    assert_eq!(table.lines().count(), 256);
    assert!(table.starts_with("256,0,"));
}

#[test]
fn eval_rejects_non_bijective_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.txt");
    let mut text = SBox::identity().serialize(SBoxFormat::Grid16);
    text = text.replacen("0 1 2", "0 0 2", 1);
    fs::write(&path, text).unwrap();
    let out = run(&["eval", "--sbox", &s(&path)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not bijective"));
}

#[test]
fn optimize_zero_generations_passes_filter_through() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = gen_boxes(dir.path(), 6, 9);
    let out_dir = dir.path().join("opt");
    run_ok(&[
        "optimize",
        "--in-dir",
        &s(&boxes),
        "--out-dir",
        &s(&out_dir),
        "--generations",
        "0",
        "--islands",
        "1",
        "--range",
        "0,200",
        "--seed",
        "5",
    ]);
    // with an all-pass band and no generations, the output digests are
    // exactly the (deduplicated) input digests
    let input_digests: std::collections::BTreeSet<String> = fs::read_to_string(boxes.join("index.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    let output_digests: std::collections::BTreeSet<String> = fs::read_to_string(out_dir.join("index.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().to_string())
        .collect();
    assert_eq!(input_digests, output_digests);

    let hist = fs::read_to_string(out_dir.join("histogram.csv")).unwrap();
    let total: usize = hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, output_digests.len());
    assert!(out_dir.join("gens.csv").exists());
}

#[test]
fn optimize_fixed_seed_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = gen_boxes(dir.path(), 8, 11);
    let args = |out: &Path| {
        vec![
            "optimize".to_string(),
            "--in-dir".into(),
            s(&boxes),
            "--out-dir".into(),
            s(out),
            "--generations".into(),
            "4".into(),
            "--islands".into(),
            "2".into(),
            "--pop".into(),
            "5".into(),
            "--range".into(),
            "0,200".into(),
            "--seed".into(),
            "123".into(),
        ]
    };
    let out1 = dir.path().join("opt1");
    let out2 = dir.path().join("opt2");
    for out in [&out1, &out2] {
        let argv = args(out);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        run_ok(&argv);
    }
    assert_eq!(
        fs::read(out1.join("index.csv")).unwrap(),
        fs::read(out2.join("index.csv")).unwrap()
    );
    assert_eq!(
        fs::read(out1.join("gens.csv")).unwrap(),
        fs::read(out2.join("gens.csv")).unwrap()
    );
}

fn write_test_image(path: &Path, w: usize, h: usize, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = w * h;
    let plane = |rng: &mut ChaCha20Rng| (0..n).map(|_| rng.random_range(0..=255u8)).collect();
    let img = ImageBuffer::new(w, h, plane(&mut rng), plane(&mut rng), plane(&mut rng)).unwrap();
    img.write_ppm(fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn encrypt_decrypt_round_trips_and_sensitivity_lands_in_bands() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = gen_boxes(dir.path(), 4, 13);
    let bits = dir.path().join("material_bits.txt");
    // 16 keys of 1024 bytes plus p-box seeds
    write_noise_bits(&bits, 16 * 1024 * 8 + 16 * 64 + 128, 14);
    let img = dir.path().join("plain.ppm");
    write_test_image(&img, 32, 32, 15);
    let mat = dir.path().join("material.txt");
    run_ok(&[
        "material", "--bits", &s(&bits), "--image", &s(&img), "--sbox-dir", &s(&boxes), "--out",
        &s(&mat),
    ]);
    let enc = dir.path().join("enc.ppm");
    let dec = dir.path().join("dec.ppm");
    run_ok(&["encrypt", "--image", &s(&img), "--material", &s(&mat), "--out", &s(&enc)]);
    run_ok(&["decrypt", "--image", &s(&enc), "--material", &s(&mat), "--out", &s(&dec)]);
    assert_eq!(fs::read(&img).unwrap(), fs::read(&dec).unwrap(), "file-level round trip");
    assert_ne!(fs::read(&img).unwrap(), fs::read(&enc).unwrap());

    let table = run_ok(&["sensitivity", "--image", &s(&img), "--material", &s(&mat)]);
    assert!(table.starts_with("channel,npcr,uaci"));
    for line in table.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let npcr: f64 = fields[1].parse().unwrap();
        let uaci: f64 = fields[2].parse().unwrap();
        assert!(npcr > 98.0, "npcr {npcr}");
        assert!(uaci > 25.0 && uaci < 41.0, "uaci {uaci}");
    }
    assert!(dir.path().join("enc.ppm.manifest.json").exists());
    assert!(dir.path().join("material.txt.manifest.json").exists());
}

#[test]
fn raw_rgb_with_sidecar_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = gen_boxes(dir.path(), 2, 23);
    let bits = dir.path().join("bits.txt");
    write_noise_bits(&bits, 16 * 64 * 8 + 16 * 64 + 128, 24);
    let mat = dir.path().join("mat.txt");
    run_ok(&[
        "material", "--bits", &s(&bits), "--channel-len", "64", "--sbox-dir", &s(&boxes), "--out",
        &s(&mat),
    ]);
    // 8x8 raw image: interleaved bytes plus a WIDTH HEIGHT sidecar
    let img = dir.path().join("plain.rgb");
    let mut rng = ChaCha20Rng::seed_from_u64(25);
    let data: Vec<u8> = (0..8 * 8 * 3).map(|_| rng.random_range(0..=255u8)).collect();
    fs::write(&img, &data).unwrap();
    fs::write(dir.path().join("plain.rgb.dim"), "8 8\n").unwrap();
    let enc = dir.path().join("enc.rgb");
    let dec = dir.path().join("dec.rgb");
    run_ok(&["encrypt", "--image", &s(&img), "--material", &s(&mat), "--out", &s(&enc)]);
    assert!(dir.path().join("enc.rgb.dim").exists());
    run_ok(&["decrypt", "--image", &s(&enc), "--material", &s(&mat), "--out", &s(&dec)]);
    assert_eq!(fs::read(&dec).unwrap(), data);
}

#[test]
fn mismatched_material_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let boxes = gen_boxes(dir.path(), 2, 17);
    let bits = dir.path().join("bits2.txt");
    write_noise_bits(&bits, 16 * 16 * 8 + 16 * 64 + 128, 18);
    let mat = dir.path().join("mat16.txt");
    run_ok(&[
        "material", "--bits", &s(&bits), "--channel-len", "16", "--sbox-dir", &s(&boxes), "--out",
        &s(&mat),
    ]);
    let img = dir.path().join("img8x8.ppm");
    write_test_image(&img, 8, 8, 19);
    let out = run(&["encrypt", "--image", &s(&img), "--material", &s(&mat), "--out", &s(&dir.path().join("x.ppm"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("channel length"));
}

#[test]
fn trace_emits_walk_csv() {
    let dir = tempfile::tempdir().unwrap();
    let bits = dir.path().join("bits.txt");
    write_noise_bits(&bits, 120_000, 21);
    let csv_path = dir.path().join("walk.csv");
    run_ok(&["trace", "--bits", &s(&bits), "--out", &s(&csv_path)]);
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,row,col,value,collected"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,"));
    // exactly 256 collected cells in a completed walk
    let collected = csv.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(collected, 256);
}
