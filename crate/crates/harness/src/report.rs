//! CSV and text output. Numbers use fixed formats so that identical runs
//! give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dslot_core::timing::{compare_report, ComparisonTable, DelayTable};

use crate::experiment::{ExperimentConfig, ExperimentError};
use crate::stats::RunStats;

pub const STATS_FILE: &str = "stats.csv";
pub const IMAGES_FILE: &str = "images.csv";
pub const PIXELS_FILE: &str = "pixels.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Marker for a column whose engine did not run.
pub const ABSENT: &str = "-";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| ABSENT.to_string(), |v| v.to_string())
}

fn label(l: Option<u8>) -> String {
    l.map_or_else(|| "none".to_string(), |l| l.to_string())
}

/// `class,pct_negative,pct_cycles_saved,images`, one row per class.
pub fn stats_csv(stats: &RunStats) -> String {
    let mut s = String::from("class,pct_negative,pct_cycles_saved,images\n");
    for c in stats.per_class() {
        let saved = if stats.has_dslot { format!("{:.4}", c.pct_cycles_saved) } else { ABSENT.into() };
        writeln!(s, "{},{:.4},{},{}", label(c.class), c.pct_negative, saved, c.images).unwrap();
    }
    s
}

pub fn images_csv(stats: &RunStats) -> String {
    let mut s = String::from("image,class,pixels,negative,pct_negative,pct_cycles_saved,dslot_cycles,sip_cycles\n");
    for i in &stats.images {
        let saved =
            if stats.has_dslot { format!("{:.4}", i.pct_cycles_saved(stats.num_cycles)) } else { ABSENT.into() };
        writeln!(
            s,
            "{},{},{},{},{:.4},{},{},{}",
            i.index,
            label(i.label),
            i.pixels,
            i.negative,
            i.pct_negative(),
            saved,
            opt(i.dslot_cycles),
            opt(i.sip_cycles)
        )
        .unwrap();
    }
    s
}

/// Verbose per-pixel dump; `sop_raw` is the exact SOP times `2^15`.
pub fn pixels_csv(stats: &RunStats) -> String {
    let mut s = String::from("image,class,row,col,sop_raw,negative,dslot_cycles,cycles_saved,num_cycles,sip_cycles\n");
    for p in stats.pixels.iter().flatten() {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            p.image,
            label(p.label),
            p.row,
            p.col,
            p.sop_raw,
            u8::from(p.negative),
            opt(p.dslot_cycles),
            opt(p.cycles_saved),
            stats.num_cycles,
            opt(p.sip_cycles)
        )
        .unwrap();
    }
    s
}

pub fn comparison(cfg: &ExperimentConfig, stats: &RunStats, delays: &DelayTable) -> ComparisonTable {
    let cycles = stats.run_cycles();
    compare_report(&cfg.pe, delays, (cycles.sops > 0).then_some(&cycles))
}

/// `metric,sip,dslot`.
pub fn report_csv(table: &ComparisonTable) -> String {
    let mut s = String::from("metric,sip,dslot\n");
    for r in &table.rows {
        writeln!(s, "{},{},{}", r.metric, opt(r.sip.as_ref()), opt(r.dslot.as_ref())).unwrap();
    }
    s
}

pub fn summary(cfg: &ExperimentConfig, stats: &RunStats, table: &ComparisonTable) -> String {
    let mut s = String::new();
    let pe = &cfg.pe;
    writeln!(s, "images: {} ({:?})", cfg.images.display(), cfg.format).unwrap();
    writeln!(s, "kernel: {}", cfg.kernel.display()).unwrap();
    writeln!(s, "engine: {}", cfg.engine).unwrap();
    writeln!(
        s,
        "block: k={} N={} n_in={} delta_mult={} delta_add={} p_out={} num_cycles={}",
        pe.k,
        pe.n_maps,
        pe.n_in,
        pe.delta_mult,
        pe.delta_add,
        pe.p_out(),
        pe.num_cycles()
    )
    .unwrap();
    writeln!(s, "seed: {}  verify: {}", cfg.seed, cfg.verify).unwrap();
    writeln!(s).unwrap();
    if stats.images.is_empty() {
        writeln!(s, "no images processed").unwrap();
    } else {
        writeln!(s, "images processed: {}", stats.images.len()).unwrap();
        writeln!(s, "output pixels: {}", stats.total_pixels()).unwrap();
        writeln!(s, "negative pixels: {} ({:.4}%)", stats.total_negative(), stats.pct_negative()).unwrap();
        if stats.has_dslot {
            writeln!(s, "cycles saved overall: {:.4}%", stats.pct_cycles_saved()).unwrap();
            writeln!(
                s,
                "cycles saved on negative pixels: {}",
                opt(stats.pct_saved_on_negative().map(|v| format!("{v:.4}%")))
            )
            .unwrap();
        }
        writeln!(
            s,
            "total cycles: dslot {} of budget {}, sip {}",
            opt(stats.dslot_cycles()),
            stats.dslot_budget(),
            opt(stats.sip_cycles())
        )
        .unwrap();
        if cfg.verify {
            writeln!(s, "verification: every output pixel matched the scalar reference").unwrap();
        }
    }
    writeln!(s).unwrap();
    write!(s, "{table}").unwrap();
    s
}

pub fn write_reports(
    out: &Path,
    cfg: &ExperimentConfig,
    stats: &RunStats,
    delays: &DelayTable,
) -> Result<(), ExperimentError> {
    let io = |source| ExperimentError::Io { path: out.to_path_buf(), source };
    fs::create_dir_all(out).map_err(io)?;
    let table = comparison(cfg, stats, delays);
    let mut files = vec![
        (STATS_FILE, stats_csv(stats)),
        (IMAGES_FILE, images_csv(stats)),
        (REPORT_FILE, report_csv(&table)),
        (SUMMARY_FILE, summary(cfg, stats, &table)),
    ];
    if stats.pixels.is_some() {
        files.push((PIXELS_FILE, pixels_csv(stats)));
    }
    for (name, body) in files {
        let path = out.join(name);
        fs::write(&path, body).map_err(|source| ExperimentError::Io { path, source })?;
    }
    Ok(())
}
