//! Figure data derived from a finished sweep: σ-vs-t tables per coin (with
//! the classical reference column), dense heightmaps of snapshot grids, and
//! optional standalone SVG renderings of both.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use crate::coin::CoinKind;
use crate::engine::ProbabilityGrid;
use crate::error::Result;
use crate::experiment::{density_label, write_file, RunSummary};
use crate::stats::SigmaSeries;

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

// Viridis, sampled at five stops.
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

pub fn sigma_table_name(coin: CoinKind) -> String {
    format!("sigma_table_{coin}.csv")
}

pub fn heightmap_name(coin: CoinKind, p: f64, t: usize) -> String {
    format!("heightmap_{coin}_{}_t{t}.csv", density_label(p))
}

/// Writes all figure data for `summary` into its output directory and
/// returns the paths written.
pub fn emit_plot_data(summary: &RunSummary) -> Result<Vec<PathBuf>> {
    let dir = summary.out_dir().to_path_buf();
    let emit_svg = summary.config.emit_svg;
    let classical = summary.read_classical()?;
    let mut written = Vec::new();

    for &coin in &summary.config.coins {
        let entries: Vec<_> = summary.entries.iter().filter(|e| e.coin == coin).collect();
        let mut series = Vec::with_capacity(entries.len());
        for e in &entries {
            series.push((e.density, summary.read_sigma(e)?));
        }

        let path = dir.join(sigma_table_name(coin));
        write_file(&path, |w| write_sigma_table(&series, &classical, w))?;
        written.push(path);
        if emit_svg {
            let path = dir.join(format!("sigma_{coin}.svg"));
            let svg = sigma_svg(coin, &series, &classical);
            write_file(&path, |w| w.write_all(svg.as_bytes()))?;
            written.push(path);
        }

        for e in &entries {
            for snap in &e.snapshots {
                let Some(grid) = summary.read_snapshot(e, snap.time)? else {
                    continue;
                };
                let path = dir.join(heightmap_name(coin, e.density, snap.time));
                write_file(&path, |w| write_heightmap(&grid, w))?;
                written.push(path);
                if emit_svg {
                    let path = dir.join(format!(
                        "snapshot_{coin}_{}_t{}.svg",
                        density_label(e.density),
                        snap.time
                    ));
                    let title = format!("{coin}, p = {}, t = {}", e.density, snap.time);
                    let svg = heightmap_svg(&title, &grid);
                    write_file(&path, |w| w.write_all(svg.as_bytes()))?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

/// `t,p<...>,...,classical` with one row per step.
pub fn write_sigma_table<W: Write>(
    series: &[(f64, SigmaSeries)],
    classical: &SigmaSeries,
    mut out: W,
) -> std::io::Result<()> {
    let mut header = String::from("t");
    for (p, _) in series {
        write!(header, ",{}", density_label(*p)).unwrap();
    }
    writeln!(out, "{header},classical")?;
    let steps = series.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let cell = |v: Option<f64>| v.map(crate::fmt17).unwrap_or_default();
    for t in 1..=steps {
        let mut row = t.to_string();
        for (_, s) in series {
            write!(row, ",{}", cell(s.at(t))).unwrap();
        }
        writeln!(out, "{row},{}", cell(classical.at(t)))?;
    }
    Ok(())
}

/// Dense matrix over `[-t, t]²`: header `m\n` followed by the `n` values,
/// then one row per `m`.
pub fn write_heightmap<W: Write>(grid: &ProbabilityGrid, mut out: W) -> std::io::Result<()> {
    let r = grid.time().min(grid.half_width()) as i64;
    let mut line = String::from("m\\n");
    for n in -r..=r {
        write!(line, ",{n}").unwrap();
    }
    writeln!(out, "{line}")?;
    for m in -r..=r {
        line.clear();
        write!(line, "{m}").unwrap();
        for n in -r..=r {
            write!(line, ",{}", crate::fmt17(grid.get(m, n))).unwrap();
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn ramp(x: f64) -> String {
    let x = x.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (x.floor() as usize).min(RAMP.len() - 2);
    let f = x - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn sigma_svg(coin: CoinKind, series: &[(f64, SigmaSeries)], classical: &SigmaSeries) -> String {
    let (w, h, pad) = (640.0, 480.0, 60.0);
    let steps = classical.len().max(1) as f64;
    let mut all = series.iter().map(|(_, s)| s).chain(std::iter::once(classical));
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for s in all.by_ref() {
        for v in s.values().iter().flatten().filter(|v| **v > 0.0) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        lo = 0.1;
        hi = 1.0;
    }
    let (llo, lhi) = (lo.log10().floor(), hi.log10().ceil());
    let x = |t: f64| pad + (t.log10() / steps.log10().max(1e-9)) * (w - 2.0 * pad);
    let y = |s: f64| h - pad - (s.log10() - llo) / (lhi - llo) * (h - 2.0 * pad);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    )
    .unwrap();
    writeln!(svg, r#"<text x="{}" y="30" text-anchor="middle" font-size="15">σ(t), {coin} walk</text>"#, w / 2.0).unwrap();
    writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, w / 2.0, h - 15.0).unwrap();
    writeln!(svg, r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">⟨σ⟩</text>"#, h / 2.0, h / 2.0).unwrap();
    let mut decade = 1.0;
    while decade <= steps {
        writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{decade}</text>"#, x(decade), h - pad + 16.0).unwrap();
        decade *= 10.0;
    }
    for e in llo as i32..=lhi as i32 {
        let v = 10f64.powi(e);
        writeln!(svg, r#"<text x="{}" y="{:.1}" text-anchor="end">{v}</text>"#, pad - 6.0, y(v) + 4.0).unwrap();
    }

    let polyline = |s: &SigmaSeries| {
        let mut pts = String::new();
        for t in 1..=s.len() {
            if let Some(v) = s.at(t).filter(|v| *v > 0.0) {
                write!(pts, "{:.2},{:.2} ", x(t as f64), y(v)).unwrap();
            }
        }
        pts
    };
    for (i, (p, s)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, polyline(s)).unwrap();
        let ly = pad + 16.0 + 16.0 * i as f64;
        writeln!(svg, r#"<text x="{}" y="{ly}" fill="{color}">p = {p}</text>"#, pad + 10.0).unwrap();
    }
    writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" stroke-dasharray="5,4" points="{}"/>"#,
        polyline(classical)
    )
    .unwrap();
    let ly = pad + 16.0 + 16.0 * series.len() as f64;
    writeln!(svg, r#"<text x="{}" y="{ly}">classical</text>"#, pad + 10.0).unwrap();
    svg.push_str("</svg>\n");
    svg
}

fn heightmap_svg(title: &str, grid: &ProbabilityGrid) -> String {
    let r = grid.time().min(grid.half_width()) as i64;
    let size = 600.0;
    let cell = size / (2 * r + 2) as f64;
    let max = grid.values().iter().cloned().fold(0.0, f64::max);
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{}" viewBox="0 0 {size} {}" font-family="sans-serif" font-size="13">"#,
        size + 30.0,
        size + 30.0
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{size}" height="{}" fill="{}"/>"#, size + 30.0, ramp(0.0)).unwrap();
    writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle" fill="white">{title}</text>"#, size / 2.0).unwrap();
    // Occupied sites are two lattice spacings apart; each is drawn as a 2×2 block.
    for (m, n, p) in grid.nonzero() {
        if m.abs() > r || n.abs() > r || max <= 0.0 {
            continue;
        }
        let px = (n + r) as f64 * cell;
        let py = 30.0 + (r - m) as f64 * cell;
        writeln!(
            svg,
            r#"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
            2.0 * cell,
            2.0 * cell,
            ramp(p / max)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_sweep, SweepConfig};

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
    }

    #[test]
    fn emits_tables_heightmaps_and_svg() {
        let dir = tempfile::tempdir().unwrap();
        let config = SweepConfig {
            coins: vec![CoinKind::Hadamard],
            densities: vec![0.0, 0.1],
            steps: 20,
            ensemble: 3,
            out_dir: dir.path().to_path_buf(),
            snapshot_at: vec![20],
            threads: Some(1),
            emit_svg: true,
            ..SweepConfig::reference_preset()
        };
        let summary = run_sweep(&config).unwrap();
        let files = emit_plot_data(&summary).unwrap();
        assert_eq!(files.len(), 1 + 1 + 2 * 2);

        let table = std::fs::read_to_string(dir.path().join("sigma_table_hadamard.csv")).unwrap();
        let mut lines = table.lines();
        assert_eq!(lines.next().unwrap(), "t,p0,p0.1,classical");
        let last = lines.last().unwrap();
        let classical: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
        assert!((classical - 40f64.sqrt()).abs() < 1e-10);

        let hm = std::fs::read_to_string(dir.path().join("heightmap_hadamard_p0_t20.csv")).unwrap();
        assert_eq!(hm.lines().count(), 42);
        let total: f64 = hm
            .lines()
            .skip(1)
            .flat_map(|l| l.split(',').skip(1).map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);

        let svg = std::fs::read_to_string(dir.path().join("sigma_hadamard.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(dir.path().join("snapshot_hadamard_p0.1_t20.svg").exists());
    }
}
