//! Synthetic corpus: metadata, images and config for end-to-end runs.
//!
//! Each painting's red area grows linearly with the mean happiness the stub
//! backend will assign to it. Every other color gets an area drawn from an
//! RNG that never sees the happiness.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};
use paintmood_core::corpus::dedup_key;
use paintmood_core::emotion::stub_annotate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIDE: u32 = 40;
pub const COUNTRIES: [&str; 14] = [
    "FR", "DE", "IT", "ES", "PT", "BE", "NL", "CH", "AT", "PL", "US", "CN", "GB", "RU",
];

pub const GRAY: [u8; 3] = [128, 128, 128];
pub const RED: [u8; 3] = [220, 20, 20];
/// Orange, yellow, green, cyan, blue, purple, black, white.
pub const OTHERS: [[u8; 3]; 8] = [
    [230, 120, 20],
    [230, 220, 20],
    [30, 180, 30],
    [20, 200, 200],
    [20, 40, 220],
    [150, 30, 200],
    [10, 10, 10],
    [240, 240, 240],
];

pub struct Fixture {
    pub root: PathBuf,
    pub config: PathBuf,
    pub metadata: PathBuf,
    pub out: PathBuf,
}

fn date_for(i: usize, rng: &mut ChaCha8Rng) -> String {
    let year = rng.gen_range(1500..1900);
    match i % 10 {
        0 => String::new(),
        1 => format!("c. {year}"),
        2 => format!("{}-{}", year - 4, year + 4),
        3 => format!("{}-{}", year - 30, year + 30),
        _ => year.to_string(),
    }
}

/// Image whose red band height follows `happiness`; `None` for faceless
/// paintings gets an arbitrary band.
pub fn painting_image(happiness: Option<f64>, rng: &mut ChaCha8Rng) -> RgbImage {
    let red_rows = match happiness {
        Some(h) => 2 + (h * 16.0).round() as u32,
        None => rng.gen_range(2..=18),
    };
    let heights: Vec<u32> = (0..OTHERS.len()).map(|_| rng.gen_range(1..=16)).collect();
    RgbImage::from_fn(SIDE, SIDE, |x, y| {
        if y < red_rows {
            return Rgb(RED);
        }
        let strip = (x / 5) as usize;
        if y >= SIDE - heights[strip] {
            Rgb(OTHERS[strip])
        } else {
            Rgb(GRAY)
        }
    })
}

/// Writes a fixture with `n` paintings under `root`.
pub fn write_fixture(root: &Path, seed: u64, n: usize) -> Fixture {
    let img_dir = root.join("img");
    fs::create_dir_all(&img_dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f1c7);
    let mut csv = String::from("name,artist,url,date,country\n");
    for i in 0..n {
        let name = format!("Painting {i:03}");
        let artist = format!("Artist {}", i % 37);
        let url = format!("https://fixture.example/img/p{i:03}.png");
        let date = date_for(i, &mut rng);
        let country = if i % 13 == 5 {
            ""
        } else {
            COUNTRIES[rng.gen_range(0..COUNTRIES.len())]
        };
        csv.push_str(&format!("{name},{artist},{url},{date},{country}\n"));

        let faces = stub_annotate(seed, &dedup_key(&name, &artist));
        let happiness = (!faces.is_empty())
            .then(|| faces.iter().map(|f| f.emotions.happiness).sum::<f64>() / faces.len() as f64);
        painting_image(happiness, &mut rng)
            .save(img_dir.join(format!("p{i:03}.png")))
            .unwrap();
    }
    let metadata = root.join("paintings.csv");
    fs::write(&metadata, csv).unwrap();
    let config = root.join("pipeline.toml");
    fs::write(
        &config,
        format!(
            "store = \"corpus.ndjson\"\nimage_dir = \"img\"\noutput_dir = \"out\"\nmin_faces = 5\n\n[backend]\nkind = \"stub\"\nseed = {seed}\n"
        ),
    )
    .unwrap();
    Fixture {
        root: root.to_path_buf(),
        config,
        metadata,
        out: root.join("out"),
    }
}

/// Runs ingest, annotate, colors and the selected analyses in-process.
pub fn run_library(
    f: &Fixture,
    which: paintmood_cli::Analysis,
) -> paintmood_cli::pipeline::AnalyzeSummary {
    let config = paintmood_cli::PipelineConfig::load(&f.config).unwrap();
    paintmood_cli::cmd_ingest(&config, std::slice::from_ref(&f.metadata)).unwrap();
    paintmood_cli::cmd_annotate(&config, false).unwrap();
    paintmood_cli::cmd_colors(&config, false, None).unwrap();
    paintmood_cli::cmd_analyze(&config, which).unwrap()
}

/// All files under `dir`, relative path to contents, sorted.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    walkdir::WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            (
                e.path().strip_prefix(dir).unwrap().display().to_string(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}
