use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::lossy::lossy_bound_closed_form;

use super::format_real;

/// Smallest photon number included in the slope fit when the grid reaches it.
pub const FIT_MIN_N: usize = 5;

pub fn default_ns() -> Vec<usize> {
    (1..=50).collect()
}

/// `φ = jπ/20` for `j = 1..9`.
pub fn default_phis() -> Vec<f64> {
    (1..=9).map(|j| j as f64 * PI / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub phi: f64,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure2Data {
    /// `(N, φ, (δφ)_min)` with `φ` outermost.
    pub points: Vec<(usize, f64, f64)>,
    pub fits: Vec<LineFit>,
}

/// Least-squares line through `(ln x, ln y)`; `None` for fewer than two
/// distinct abscissae.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// `(δφ)_min = √(κ/F̃)` from the closed form over the grid, plus a log-log
/// fit per `φ` over `N ≥ 5` (all `N` when the grid stays below 5).
pub fn cmd_figure2(ns: &[usize], phis: &[f64]) -> Result<Figure2Data> {
    if ns.is_empty() || phis.is_empty() {
        return Err(Error::config("figure2 needs at least one N and one phi"));
    }
    if let Some(n) = ns.iter().find(|n| **n == 0) {
        return Err(Error::config_field("N", format!("photon number must be at least 1, got {n}")));
    }
    let per_phi: Vec<Result<Vec<(usize, f64, f64)>>> = phis
        .par_iter()
        .map(|&phi| {
            ns.iter()
                .map(|&n| {
                    let v = lossy_bound_closed_form(n, phi)
                        .map_err(|e| Error::config_field("phi", e.to_string()))?;
                    Ok((n, phi, v.sqrt()))
                })
                .collect()
        })
        .collect();
    let mut points = Vec::new();
    let mut fits = Vec::new();
    for (phi, rows) in phis.iter().zip(per_phi) {
        let rows = rows?;
        let use_min = rows.iter().filter(|r| r.0 >= FIT_MIN_N).count() >= 2;
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| !use_min || r.0 >= FIT_MIN_N)
            .map(|r| (r.0 as f64, r.2))
            .unzip();
        if let Some((slope, intercept)) = fit_loglog(&xs, &ys) {
            fits.push(LineFit { phi: *phi, slope, intercept });
        }
        points.extend(rows);
    }
    Ok(Figure2Data { points, fits })
}

impl Figure2Data {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,phi,delta_phi_min\n");
        for (n, phi, v) in &self.points {
            out.push_str(&format!("{n},{},{}\n", format_real(*phi), format_real(*v)));
        }
        for f in &self.fits {
            out.push_str(&format!(
                "# fit phi={} slope={} intercept={}\n",
                format_real(f.phi),
                format_real(f.slope),
                format_real(f.intercept)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Point {
            #[serde(rename = "N")]
            n: usize,
            phi: f64,
            delta_phi_min: f64,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            points: Vec<Point>,
            fits: &'a [LineFit],
        }
        let out = Out {
            points: self
                .points
                .iter()
                .map(|&(n, phi, delta_phi_min)| Point { n, phi, delta_phi_min })
                .collect(),
            fits: &self.fits,
        };
        let mut s = serde_json::to_string_pretty(&out).expect("finite values serialize");
        s.push('\n');
        s
    }

    /// Largest `|slope − target|` over the fits.
    pub fn worst_slope_deviation(&self, target: f64) -> Option<f64> {
        self.fits.iter().map(|f| (f.slope - target).abs()).reduce(f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let xs: Vec<f64> = (1..10).map(|n| n as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-0.5)).collect();
        let (s, c) = fit_loglog(&xs, &ys).unwrap();
        assert!((s + 0.5).abs() < 1e-14);
        assert!((c - 3f64.ln()).abs() < 1e-14);
        assert!(fit_loglog(&[2.0], &[1.0]).is_none());
    }

    #[test]
    fn single_n_has_no_fit() {
        let d = cmd_figure2(&[7], &default_phis()).unwrap();
        assert_eq!(d.points.len(), 9);
        assert!(d.fits.is_empty());
        assert!(!d.to_csv().contains("# fit"));
    }

    #[test]
    fn quarter_pi_decreases_in_n() {
        let ns: Vec<usize> = (5..=50).collect();
        let d = cmd_figure2(&ns, &[PI / 4.0]).unwrap();
        assert!(d.points.windows(2).all(|w| w[1].2 < w[0].2));
    }

    #[test]
    fn csv_layout() {
        let d = cmd_figure2(&[5, 6], &[PI / 4.0]).unwrap();
        let csv = d.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,phi,delta_phi_min");
        assert!(lines[1].starts_with("5,7.8539816339744828e-1,"));
        assert!(lines[3].starts_with("# fit phi=7.8539816339744828e-1 slope="));
        assert!(cmd_figure2(&[0], &[0.3]).is_err());
        assert!(cmd_figure2(&[3], &[2.0]).is_err());
    }
}
