mod common;

use std::fs;
use std::path::Path;

use common::{fixture, scalar_pipeline, TOY_KERNEL};
use dslot_core::pe::PeConfig;
use dslot_core::sdnum::Dyadic;
use dslot_harness::report::{IMAGES_FILE, PIXELS_FILE, REPORT_FILE, STATS_FILE, SUMMARY_FILE};
use dslot_harness::{
    load_images, run_experiment, run_images, select_images, EngineChoice, ExperimentConfig, Image, ImageFormat, Kernel,
    RunOptions,
};

fn toy_images() -> Vec<Image> {
    load_images(&fixture("toy-images-idx3-ubyte"), ImageFormat::Idx, None).unwrap()
}

fn config(out: Option<&Path>) -> ExperimentConfig {
    ExperimentConfig {
        images: fixture("toy-images-idx3-ubyte"),
        format: ImageFormat::Idx,
        labels: None,
        kernel: fixture("toy_kernel_5x5.json"),
        engine: EngineChoice::Both,
        pe: PeConfig::default(),
        limit: None,
        per_class: Some(3),
        seed: 17,
        verify: true,
        out: out.map(Path::to_path_buf),
        dump_pixels: true,
        delays: None,
    }
}

#[test]
fn zero_kernel_gives_no_negatives() {
    let imgs = toy_images();
    let kernel = Kernel::from_raw(5, &[0; 25]).unwrap();
    let mut opts = RunOptions::new(PeConfig::default(), EngineChoice::Both);
    opts.verify = true;
    let (stats, res) = run_images(&imgs, &[0, 1, 2], &kernel, &opts).unwrap();
    assert_eq!(stats.total_pixels(), 3 * 24 * 24);
    assert_eq!(stats.pct_negative(), 0.0);
    assert_eq!(stats.pct_cycles_saved(), 0.0);
    assert!(res.iter().all(|r| r.pooled_dslot.as_ref().unwrap().iter().all(Dyadic::is_zero)));
}

#[test]
fn negative_constant_kernel_is_negative_on_nonzero_windows() {
    let imgs = toy_images();
    let kernel = Kernel::from_raw(5, &[-3; 25]).unwrap();
    let mut opts = RunOptions::new(PeConfig::default(), EngineChoice::Dslot);
    opts.verify = true;
    opts.dump_pixels = true;
    let sel: Vec<usize> = (0..10).collect();
    let (stats, _) = run_images(&imgs, &sel, &kernel, &opts).unwrap();
    let mut nonzero = 0;
    for &i in &sel {
        let (sops, _) = scalar_pipeline(28, &imgs[i].pixels, 5, &[1; 25]);
        nonzero += sops.iter().filter(|&&s| s != 0).count() as u64;
    }
    assert_eq!(stats.total_negative(), nonzero);
    for p in stats.pixels.as_ref().unwrap() {
        assert_eq!(p.negative, p.sop_raw != 0);
    }
}

#[test]
fn toy_run_matches_scalar_reference() {
    let imgs = toy_images();
    let kernel = Kernel::from_raw(5, &TOY_KERNEL).unwrap();
    let mut opts = RunOptions::new(PeConfig::default(), EngineChoice::Both);
    opts.verify = true;
    let sel: Vec<usize> = (0..100).collect();
    let (stats, results) = run_images(&imgs, &sel, &kernel, &opts).unwrap();
    let mut negative = 0u64;
    for (img, res) in imgs.iter().zip(&results) {
        let (sops, pooled) = scalar_pipeline(28, &img.pixels, 5, &TOY_KERNEL);
        let neg = sops.iter().filter(|&&s| s < 0).count() as u64;
        assert_eq!(res.stats.negative, neg);
        negative += neg;
        let want: Vec<Dyadic> = pooled.iter().map(|&v| Dyadic::new(v, 15)).collect();
        assert_eq!(res.pooled_dslot.as_ref().unwrap(), &want);
        assert_eq!(res.pooled_sip.as_ref().unwrap(), &want);
    }
    assert_eq!(stats.total_negative(), negative);
    assert!(negative > 0 && negative < stats.total_pixels());
    // labels come from the sibling label file
    let classes = stats.per_class();
    assert_eq!(classes.len(), 10);
    assert!(classes.iter().all(|c| c.images == 10 && c.pct_negative > 0.0 && c.pct_cycles_saved > 0.0));
    assert!(stats.dslot_cycles().unwrap() <= stats.dslot_budget());
    assert_eq!(stats.sip_cycles(), Some(stats.total_pixels() * 8));
}

#[test]
fn per_class_csv_is_populated() {
    let dir = tempfile::tempdir().unwrap();
    let stats = run_experiment(&config(Some(dir.path()))).unwrap();
    assert_eq!(stats.images.len(), 30);
    let csv = fs::read_to_string(dir.path().join(STATS_FILE)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "class,pct_negative,pct_cycles_saved,images");
    assert_eq!(lines.len(), 11);
    for (i, l) in lines[1..].iter().enumerate() {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[0], i.to_string());
        assert_eq!(f[3], "3");
        for v in &f[1..3] {
            let x: f64 = v.parse().unwrap();
            assert!((0.0..=100.0).contains(&x));
        }
    }
    for f in [IMAGES_FILE, PIXELS_FILE, REPORT_FILE, SUMMARY_FILE] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let report = fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
    assert!(report.contains("cycles per SOP (full),8.000,33.000"), "{report}");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&config(Some(a.path()))).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| run_experiment(&config(Some(b.path())))).unwrap();
    for f in [STATS_FILE, IMAGES_FILE, PIXELS_FILE, REPORT_FILE, SUMMARY_FILE] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let c = tempfile::tempdir().unwrap();
    let mut other = config(Some(c.path()));
    other.seed = 18;
    run_experiment(&other).unwrap();
    assert_ne!(fs::read(a.path().join(IMAGES_FILE)).unwrap(), fs::read(c.path().join(IMAGES_FILE)).unwrap());
}

#[test]
fn statistics_are_recomputable_from_the_pixel_dump() {
    let dir = tempfile::tempdir().unwrap();
    let stats = run_experiment(&config(Some(dir.path()))).unwrap();
    let pixels = fs::read_to_string(dir.path().join(PIXELS_FILE)).unwrap();
    let images = fs::read_to_string(dir.path().join(IMAGES_FILE)).unwrap();

    // image -> (pixels, negative, sum of cycles_saved / num_cycles)
    let mut acc = std::collections::BTreeMap::<usize, (u64, u64, f64)>::new();
    for line in pixels.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let e = acc.entry(f[0].parse().unwrap()).or_default();
        e.0 += 1;
        e.1 += f[5].parse::<u64>().unwrap();
        e.2 += f[7].parse::<f64>().unwrap() / f[8].parse::<f64>().unwrap();
        assert_eq!(f[5] == "1", f[4].parse::<i64>().unwrap() < 0);
    }
    assert_eq!(acc.len(), stats.images.len());
    for line in images.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (n, neg, saved) = acc[&f[0].parse::<usize>().unwrap()];
        assert_eq!(f[2].parse::<u64>().unwrap(), n);
        assert_eq!(f[3].parse::<u64>().unwrap(), neg);
        assert!((f[4].parse::<f64>().unwrap() - 100.0 * neg as f64 / n as f64).abs() < 1e-4);
        assert!((f[5].parse::<f64>().unwrap() - 100.0 * saved / n as f64).abs() < 1e-4);
    }
}

#[test]
fn selection_is_reproducible_and_balanced() {
    let imgs = load_images(&fixture("toy-images-idx3-ubyte"), ImageFormat::Idx, None).unwrap();
    assert_eq!(select_images(&imgs, Some(7), None, 3), select_images(&imgs, Some(7), None, 3));
    let labeled =
        load_images(&fixture("toy-images-idx3-ubyte"), ImageFormat::Idx, Some(&fixture("toy-labels-idx1-ubyte")))
            .unwrap();
    let sel = select_images(&labeled, None, Some(2), 5);
    assert_eq!(sel.len(), 20);
}

#[test]
fn empty_selection_writes_stub() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Some(dir.path()));
    cfg.limit = Some(0);
    let stats = run_experiment(&cfg).unwrap();
    assert!(stats.images.is_empty());
    assert_eq!(fs::read_to_string(dir.path().join(STATS_FILE)).unwrap().lines().count(), 1);
    assert!(fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap().contains("no images processed"));
}

#[test]
fn sip_only_run_marks_dslot_columns_absent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(Some(dir.path()));
    cfg.engine = EngineChoice::Sip;
    run_experiment(&cfg).unwrap();
    let report = fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
    assert!(report.contains("SOPs simulated,17280,-"), "{report}");
}
