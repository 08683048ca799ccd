use std::path::{Path, PathBuf};

use clap::Args;

use crate::chart::{build_panels, render_svg, YColumn};
use crate::errors::{require_input, require_writable, runtime, CliResult};
use crate::io::ResultsTable;

/// Render SVG charts from a results CSV, one file per (rho, p) panel.
#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Results CSV produced by mc-run.
    pub results: PathBuf,
    /// Column to plot: mean_l2_scaled | mean_linf | sign_rate.
    #[arg(long, default_value = "mean_l2_scaled")]
    pub y: String,
    /// Draw dashed confidence-band curves.
    #[arg(long)]
    pub bands: bool,
    /// Output path; the panel suffix is inserted before the extension.
    #[arg(short = 'o', long = "output")]
    pub output: PathBuf,
}

fn panel_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chart".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "svg".to_string());
    base.with_file_name(format!("{stem}{suffix}.{ext}"))
}

pub fn run(args: PlotArgs) -> CliResult<()> {
    require_input(&args.results)?;
    require_writable(&args.output)?;
    let y = YColumn::parse(&args.y)?;
    let table = ResultsTable::read(&args.results)?;
    let panels = build_panels(&table, y, args.bands)?;
    for panel in &panels {
        let svg = render_svg(panel, y);
        let path = panel_path(&args.output, &panel.suffix);
        std::fs::write(&path, svg)
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}
