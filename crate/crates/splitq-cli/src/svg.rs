//! Minimal deterministic SVG renderer for smoothed learning curves.

use crate::error::{HarnessError, Result};
use crate::metrics::moving_average;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const SMOOTHING_WINDOW: usize = 20;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Renders the aggregate CSV (wide `episode,{label}_mean,{label}_stderr`
/// format) as one polyline per profile of the 20-episode moving average of
/// the mean column. Identical CSV input gives identical SVG bytes.
pub fn learning_curves_svg(aggregate_csv: &str) -> Result<String> {
    let mut lines = aggregate_csv.lines();
    let header = lines
        .next()
        .ok_or_else(|| HarnessError::Io("aggregate CSV is empty".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 3 || columns[0] != "episode" || !(columns.len() - 1).is_multiple_of(2) {
        return Err(HarnessError::Io(format!(
            "unexpected aggregate CSV header '{header}'"
        )));
    }
    let labels: Vec<String> = columns[1..]
        .chunks(2)
        .map(|pair| pair[0].trim_end_matches("_mean").to_string())
        .collect();

    let mut series: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(HarnessError::Io(format!(
                "aggregate CSV row {} has {} fields, expected {}",
                i + 2,
                fields.len(),
                columns.len()
            )));
        }
        for (k, s) in series.iter_mut().enumerate() {
            let v: f64 = fields[1 + 2 * k].parse().map_err(|_| {
                HarnessError::Io(format!("bad mean value '{}' in aggregate CSV", fields[1 + 2 * k]))
            })?;
            s.push(v);
        }
    }
    let episodes = series.first().map(Vec::len).unwrap_or(0);
    if episodes == 0 {
        return Err(HarnessError::Io("aggregate CSV holds no rows".into()));
    }

    let smoothed: Vec<Vec<f64>> = series
        .iter()
        .map(|s| moving_average(s, SMOOTHING_WINDOW))
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &smoothed {
        for &v in s {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(HarnessError::Numeric("non-finite values in learning curves".into()));
    }
    if hi - lo < 1e-9 {
        hi = lo + 1.0;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |episode: usize| -> f64 {
        if episodes == 1 {
            MARGIN_LEFT + plot_w / 2.0
        } else {
            MARGIN_LEFT + plot_w * episode as f64 / (episodes - 1) as f64
        }
    };
    let y_of = |v: f64| -> f64 { MARGIN_TOP + plot_h * (1.0 - (v - lo) / (hi - lo)) };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes
    svg.push_str(&format!(
        "<line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
        l = MARGIN_LEFT,
        r = WIDTH - MARGIN_RIGHT,
        b = HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\" stroke=\"black\"/>\n",
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = HEIGHT - MARGIN_BOTTOM
    ));
    // Tick labels: four x ticks, five y ticks.
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = y_of(v);
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"12\" text-anchor=\"end\">{v:.2}</text>\n",
            x = MARGIN_LEFT - 6.0,
            y = y + 4.0
        ));
    }
    for i in 0..=3 {
        let episode = (episodes - 1) * i / 3;
        let x = x_of(episode);
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"12\" text-anchor=\"middle\">{episode}</text>\n",
            y = HEIGHT - MARGIN_BOTTOM + 18.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"13\" text-anchor=\"middle\">episode</text>\n",
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{y:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {y:.2})\">total reward ({SMOOTHING_WINDOW}-episode mean)</text>\n",
        y = MARGIN_TOP + plot_h / 2.0
    ));

    for (k, s) in smoothed.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let points: Vec<String> = s
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x_of(i), y_of(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = MARGIN_TOP + 16.0 * k as f64 + 10.0;
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{ly:.2}\" x2=\"{x2:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            x = WIDTH - MARGIN_RIGHT + 10.0,
            x2 = WIDTH - MARGIN_RIGHT + 30.0
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"12\">{label}</text>\n",
            x = WIDTH - MARGIN_RIGHT + 36.0,
            y = ly + 4.0,
            label = labels[k]
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "episode,standard_mean,standard_stderr,PD_mean,PD_stderr\n0,0,0,1,0\n1,0.5,0.1,0.75,0\n2,1,0,0.5,0.2\n";

    #[test]
    fn renders_polylines_and_legend() {
        let svg = learning_curves_svg(SAMPLE).unwrap();
        assert!(svg.contains("<polyline"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">standard<"));
        assert!(svg.contains(">PD<"));
    }

    #[test]
    fn identical_input_identical_bytes() {
        assert_eq!(learning_curves_svg(SAMPLE).unwrap(), learning_curves_svg(SAMPLE).unwrap());
    }

    #[test]
    fn rejects_malformed_header() {
        assert!(learning_curves_svg("nope\n1,2\n").is_err());
        assert!(learning_curves_svg("").is_err());
    }
}
