//! Generates the synthetic demo corpus: frames, landmark sidecars, and a
//! manifest, ready for `betadct ingest --frames <dir>/frames`.
//!
//! Usage: make_fixture <out_dir> [videos_per_class] [frames_per_video]

use std::path::PathBuf;
use std::process::exit;

use betadct::fixture::{generate_fixture, FixtureOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let out_dir = match args.next() {
        Some(dir) => PathBuf::from(dir),
        None => {
            eprintln!("usage: make_fixture <out_dir> [videos_per_class] [frames_per_video]");
            exit(2);
        }
    };
    let mut options = FixtureOptions::default();
    if let Some(n) = args.next() {
        options.videos_per_class = n.parse().expect("videos_per_class is a number");
    }
    if let Some(n) = args.next() {
        options.frames_per_video = n.parse().expect("frames_per_video is a number");
    }

    match generate_fixture(&out_dir, &options) {
        Ok(manifest) => {
            println!(
                "{} videos, {} frames each -> {}",
                manifest.entries.len(),
                options.frames_per_video,
                out_dir.display()
            );
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit(1);
        }
    }
}
