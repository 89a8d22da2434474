//! Implementations of the CLI subcommands.

use crate::manifest::RunManifest;
use crate::{
    BitsFormat, DecryptArgs, EncryptArgs, EvalArgs, ExtractArgs, GenArgs, MaterialArgs,
    OptimizeArgs, ReportFormat, SensitivityArgs, TraceArgs,
};
use anyhow::{bail, Context, Result};
use serde_json::json;
use std::fs;
use std::path::Path;
use strikebox::bits::{BitOrigin, BitStream};
use strikebox::entropy::stats::{run_battery, TestParams};
use strikebox::entropy::{ldar, strike_diff_bits, von_neumann};
use strikebox::evolver::{evolve, nl_histogram, seed_population, GAConfig};
use strikebox::metrics;
use strikebox::sbox::{SBox, SBoxFormat};
use strikebox::spn::{
    self, decrypt_image, encrypt_image, image::ImageBuffer, material::RoundMaterial,
};
use strikebox::walker::{construct_sboxes, walk_trace_csv, ConstructConfig};

fn read_bits(path: &Path, format: BitsFormat, origin: BitOrigin) -> Result<BitStream> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    match format {
        BitsFormat::Ascii => {
            let text = String::from_utf8(data).context("bit file is not UTF-8 text")?;
            Ok(BitStream::from_ascii(&text, origin)?)
        }
        BitsFormat::Packed => Ok(BitStream::from_bytes_msb(&data, origin)),
    }
}

fn write_bits(path: &Path, bits: &BitStream, format: BitsFormat) -> Result<()> {
    match format {
        BitsFormat::Ascii => fs::write(path, bits.to_ascii(64)),
        BitsFormat::Packed => fs::write(path, bits.to_bytes_msb()),
    }
    .with_context(|| format!("writing {}", path.display()))
}

fn battery_report(label: &str, bits: &BitStream, out: &mut String) {
    out.push_str(&format!("# stage {label} ({} bits, origin {})\n", bits.len(), bits.origin()));
    out.push_str("stage,test,p_value,pass\n");
    let results = run_battery(bits, &TestParams::default());
    for result in &results {
        match result {
            Ok(r) => out.push_str(&format!(
                "{label},{},{:.6},{}\n",
                r.test_name,
                r.p_value,
                if r.pass { "pass" } else { "FAIL" }
            )),
            Err(e) => out.push_str(&format!("{label},{e},,skipped\n")),
        }
    }
    // the same figures as key/value lines
    for result in &results {
        if let Ok(r) = result {
            out.push_str(&format!(
                "{label}.{}.p_value {:.6}\n{label}.{}.pass {}\n",
                r.test_name, r.p_value, r.test_name, r.pass
            ));
        }
    }
}

pub fn extract(args: &ExtractArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let parsed = ldar::parse_ldar(&text, args.strict)?;
    for skipped in &parsed.skipped {
        eprintln!("skipping line {}: {}", skipped.line, skipped.reason);
    }
    let raw = strike_diff_bits(&parsed.records)?;
    let mut report = String::new();
    battery_report("raw", &raw, &mut report);
    let out_stream = if args.whiten {
        let white = von_neumann(&raw);
        battery_report("whitened", &white, &mut report);
        white
    } else {
        raw
    };
    write_bits(&args.out, &out_stream, args.format)?;
    let report_path = args.report.clone().unwrap_or_else(|| {
        let mut name = args.out.file_name().unwrap_or_default().to_os_string();
        name.push(".report.txt");
        args.out.with_file_name(name)
    });
    fs::write(&report_path, &report)
        .with_context(|| format!("writing {}", report_path.display()))?;
    println!(
        "{} records -> {} bits ({}) -> {}",
        parsed.records.len(),
        out_stream.len(),
        out_stream.origin(),
        args.out.display()
    );
    RunManifest::new("extract")
        .input(&args.input)
        .output(&args.out)
        .output(&report_path)
        .config("strict", json!(args.strict))
        .config("whiten", json!(args.whiten))
        .config("format", json!(format!("{:?}", args.format)))
        .write(&args.out)
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let bits = read_bits(&args.bits, args.bits_format, BitOrigin::Whitened)?;
    let cfg = ConstructConfig {
        grid_side: args.grid_side,
        step_budget: args.step_budget,
        cyclic_directions: !args.strict_bits,
        ..Default::default()
    };
    let built = construct_sboxes(&bits, args.total, &cfg)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut index = String::from("file,digest,nonlinearity,bit_mean_nonlinearity\n");
    for (i, sbox) in built.sboxes.iter().enumerate() {
        let name = format!("sbox_{i:04}.txt");
        fs::write(args.out_dir.join(&name), sbox.serialize(SBoxFormat::Grid16))?;
        index.push_str(&format!(
            "{name},{},{},{}\n",
            sbox.digest(),
            metrics::nonlinearity(sbox),
            metrics::bit_mean_nonlinearity(sbox)
        ));
    }
    let index_path = args.out_dir.join("index.csv");
    fs::write(&index_path, index)?;
    println!(
        "built {} boxes (grid side {}, {} failed walks) in {}",
        built.sboxes.len(),
        built.grid.side(),
        built.failures,
        args.out_dir.display()
    );
    RunManifest::new("gen")
        .input(&args.bits)
        .output(&args.out_dir)
        .config("total", json!(args.total))
        .config("grid_side", json!(args.grid_side))
        .config("step_budget", json!(args.step_budget))
        .config("strict_bits", json!(args.strict_bits))
        .write(&index_path)
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let text = fs::read_to_string(&args.sbox)
        .with_context(|| format!("reading {}", args.sbox.display()))?;
    let sbox = SBox::parse(&text)?;
    let report = metrics::evaluate(&sbox);
    let rendered = match args.format {
        ReportFormat::Text => report.to_kv_text(),
        ReportFormat::Csv => {
            format!("{}\n{}\n", metrics::MetricReport::csv_header(), report.to_csv_row())
        }
    };
    match &args.out {
        Some(path) => {
            fs::write(path, &rendered)?;
            RunManifest::new("eval")
                .input(&args.sbox)
                .output(path)
                .config("format", json!(format!("{:?}", args.format)))
                .write(path)?;
        }
        None => print!("{rendered}"),
    }
    if let Some(dp_path) = &args.dp_table {
        fs::write(dp_path, metrics::dp(&sbox).to_csv())?;
        RunManifest::new("eval").input(&args.sbox).output(dp_path).write(dp_path)?;
    }
    Ok(())
}

fn read_sbox_dir(dir: &Path) -> Result<Vec<SBox>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|e| e == "txt")
                && p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("sbox"))
        })
        .collect();
    paths.sort();
    let mut boxes = Vec::with_capacity(paths.len());
    for p in paths {
        let text = fs::read_to_string(&p)?;
        boxes.push(SBox::parse(&text).with_context(|| format!("parsing {}", p.display()))?);
    }
    if boxes.is_empty() {
        bail!("no sbox*.txt files in {}", dir.display());
    }
    Ok(boxes)
}

pub fn optimize(args: &OptimizeArgs) -> Result<()> {
    let candidates = read_sbox_dir(&args.in_dir)?;
    let cfg = GAConfig {
        islands: args.islands,
        population_per_island: args.pop,
        generations: args.generations,
        migration_interval: args.migration_interval,
        migration_count: args.migration_count,
        selection_range: args.range,
        crossover_point: args.crossover_point,
        rng_seed: args.seed,
    };
    let pop = seed_population(&candidates, &cfg)?;
    println!("seeded {} of {} candidates", pop.len(), candidates.len());
    let (pop, log) = evolve(pop, &cfg)?;
    fs::create_dir_all(&args.out_dir)?;
    let mut index = String::from("file,island,fitness,digest\n");
    let mut counter = 0usize;
    for (island_idx, island) in pop.islands().iter().enumerate() {
        for ind in island {
            let name = format!("sbox_{counter:04}.txt");
            fs::write(args.out_dir.join(&name), ind.sbox.serialize(SBoxFormat::Grid16))?;
            index.push_str(&format!("{name},{island_idx},{},{}\n", ind.fitness, ind.digest));
            counter += 1;
        }
    }
    let index_path = args.out_dir.join("index.csv");
    fs::write(&index_path, index)?;
    fs::write(args.out_dir.join("gens.csv"), log.to_csv())?;
    fs::write(args.out_dir.join("histogram.csv"), nl_histogram(&pop).to_csv())?;
    let best = pop.best().map(|b| b.fitness).unwrap_or(0);
    println!(
        "evolved {} generations; population {}, best fitness {} -> {}",
        args.generations,
        pop.len(),
        best,
        args.out_dir.display()
    );
    RunManifest::new("optimize")
        .input(&args.in_dir)
        .output(&args.out_dir)
        .config("islands", json!(args.islands))
        .config("pop", json!(args.pop))
        .config("generations", json!(args.generations))
        .config("range", json!(args.range))
        .config("migration_interval", json!(args.migration_interval))
        .config("migration_count", json!(args.migration_count))
        .config("crossover_point", json!(args.crossover_point))
        .rng_seed(args.seed)
        .write(&index_path)
}

pub fn material(args: &MaterialArgs) -> Result<()> {
    let bits = read_bits(&args.bits, args.bits_format, BitOrigin::Whitened)?;
    let channel_len = match (args.channel_len, &args.image) {
        (Some(len), _) => len,
        (None, Some(img_path)) => read_image(img_path)?.channel_len(),
        (None, None) => bail!("give either --channel-len or --image"),
    };
    let pool = match &args.sbox_dir {
        Some(dir) => read_sbox_dir(dir)?,
        None => Vec::new(),
    };
    let m = RoundMaterial::derive(&bits, channel_len, &pool)?;
    fs::write(&args.out, m.serialize())?;
    println!("material for channel length {channel_len} -> {}", args.out.display());
    RunManifest::new("material")
        .input(&args.bits)
        .output(&args.out)
        .config("channel_len", json!(channel_len))
        .config("pool", json!(pool.len()))
        .write(&args.out)
}

fn dim_sidecar(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".dim");
    path.with_file_name(name)
}

/// Reads an image: P6 pixmap by default, raw interleaved RGB with a
/// `<file>.dim` sidecar (`WIDTH HEIGHT`) for `.rgb` files.
fn read_image(path: &Path) -> Result<ImageBuffer> {
    if path.extension().is_some_and(|e| e == "rgb") {
        let sidecar = dim_sidecar(path);
        let dims = fs::read_to_string(&sidecar)
            .with_context(|| format!("reading dimension sidecar {}", sidecar.display()))?;
        let mut toks = dims.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok())
                .with_context(|| format!("sidecar {} must hold WIDTH HEIGHT", sidecar.display()))
        };
        let (w, h) = (parse(toks.next())?, parse(toks.next())?);
        let data = fs::read(path)?;
        Ok(ImageBuffer::from_interleaved(w, h, &data)?)
    } else {
        Ok(ImageBuffer::read_ppm(
            fs::File::open(path).with_context(|| format!("opening {}", path.display()))?,
        )?)
    }
}

/// Writes an image in the format implied by the extension (see
/// [`read_image`]).
fn write_image(path: &Path, img: &ImageBuffer) -> Result<()> {
    if path.extension().is_some_and(|e| e == "rgb") {
        fs::write(path, img.to_interleaved())?;
        fs::write(dim_sidecar(path), format!("{} {}\n", img.width(), img.height()))?;
        Ok(())
    } else {
        Ok(img.write_ppm(fs::File::create(path)?)?)
    }
}

fn load_image_and_material(
    image: &Path,
    material: &Path,
) -> Result<(ImageBuffer, RoundMaterial)> {
    let img = read_image(image)?;
    let mat = RoundMaterial::parse(
        &fs::read_to_string(material)
            .with_context(|| format!("reading {}", material.display()))?,
    )?;
    if mat.channel_len() != img.channel_len() {
        bail!(
            "material is bound to channel length {}, image has {}",
            mat.channel_len(),
            img.channel_len()
        );
    }
    Ok((img, mat))
}

pub fn encrypt(args: &EncryptArgs) -> Result<()> {
    let (img, mat) = load_image_and_material(&args.image, &args.material)?;
    let out = encrypt_image(&img, &mat)?;
    write_image(&args.out, &out)?;
    println!("encrypted {} -> {}", args.image.display(), args.out.display());
    RunManifest::new("encrypt")
        .input(&args.image)
        .input(&args.material)
        .output(&args.out)
        .write(&args.out)
}

pub fn decrypt(args: &DecryptArgs) -> Result<()> {
    let (img, mat) = load_image_and_material(&args.image, &args.material)?;
    let out = decrypt_image(&img, &mat)?;
    write_image(&args.out, &out)?;
    println!("decrypted {} -> {}", args.image.display(), args.out.display());
    RunManifest::new("decrypt")
        .input(&args.image)
        .input(&args.material)
        .output(&args.out)
        .write(&args.out)
}

pub fn sensitivity(args: &SensitivityArgs) -> Result<()> {
    let (img, mat) = load_image_and_material(&args.image, &args.material)?;
    let report = spn::sensitivity(&img, &mat, args.pixel)?;
    let csv = report.to_csv();
    print!("{csv}");
    if let Some(path) = &args.out {
        fs::write(path, &csv)?;
        RunManifest::new("sensitivity")
            .input(&args.image)
            .input(&args.material)
            .output(path)
            .config("pixel", json!(args.pixel))
            .write(path)?;
    }
    Ok(())
}

pub fn trace(args: &TraceArgs) -> Result<()> {
    let bits = read_bits(&args.bits, args.bits_format, BitOrigin::Whitened)?;
    let cfg = ConstructConfig { grid_side: args.grid_side, ..Default::default() };
    let built = construct_sboxes(&bits, 1, &cfg)?;
    let csv = walk_trace_csv(&built.grid, &built.traces[0]);
    fs::write(&args.out, csv)?;
    println!(
        "walk of {} steps from {:?} (grid side {}) -> {}",
        built.traces[0].steps.len(),
        built.traces[0].start,
        built.grid.side(),
        args.out.display()
    );
    RunManifest::new("trace")
        .input(&args.bits)
        .output(&args.out)
        .config("grid_side", json!(args.grid_side))
        .write(&args.out)
}
