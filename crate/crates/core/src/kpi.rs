//! Cell-level performance along the track: a linear chain of base stations,
//! per-position RSRP, SINR, an RSRQ-like ratio, Shannon spectral efficiency
//! and a throughput proxy.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::beam::TxGeometry;
use crate::error::{Error, Result};
use crate::stats::PathLossFit;
use crate::sweep::SnapshotSeries;
use crate::units::{db_to_linear_power, free_space_path_loss_db, power_to_db};

pub const KPI_SCHEMA: &str = "railbeam.kpi/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Deployment {
    pub inter_site_distance: f64,
    pub base_stations: usize,
    /// Chainage of the first base station.
    pub first_site: f64,
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub noise_density_dbm_hz: f64,
    /// Fraction of capacity lost to control and reference signals.
    pub overhead: f64,
    /// Mast height and offset from the track, shared by every site.
    pub h: f64,
    pub d: f64,
}

impl Default for Deployment {
    fn default() -> Self {
        Deployment {
            inter_site_distance: 2000.0,
            base_stations: 2,
            first_site: 0.0,
            tx_power_dbm: 43.0,
            bandwidth_hz: 10e6,
            noise_figure_db: 7.0,
            noise_density_dbm_hz: -174.0,
            overhead: 0.2,
            h: 22.0,
            d: 100.0,
        }
    }
}

impl Deployment {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kpi.inter_site_distance", self.inter_site_distance),
            ("kpi.bandwidth_hz", self.bandwidth_hz),
            ("kpi.d", self.d),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.base_stations == 0 {
            return Err(Error::invalid("kpi.base_stations", "needs at least one site"));
        }
        if !(self.h.is_finite() && self.h >= 0.0) {
            return Err(Error::invalid("kpi.h", format!("must be non-negative, got {}", self.h)));
        }
        if !(0.0..1.0).contains(&self.overhead) {
            return Err(Error::invalid(
                "kpi.overhead",
                format!("must be in [0, 1), got {}", self.overhead),
            ));
        }
        for (name, v) in [
            ("kpi.first_site", self.first_site),
            ("kpi.tx_power_dbm", self.tx_power_dbm),
            ("kpi.noise_figure_db", self.noise_figure_db),
            ("kpi.noise_density_dbm_hz", self.noise_density_dbm_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn sites(&self) -> Vec<f64> {
        (0..self.base_stations)
            .map(|i| self.first_site + i as f64 * self.inter_site_distance)
            .collect()
    }

    /// Thermal noise over the bandwidth plus the noise figure.
    pub fn noise_dbm(&self) -> f64 {
        self.noise_density_dbm_hz + 10.0 * self.bandwidth_hz.log10() + self.noise_figure_db
    }

    /// Track positions every `step` metres from the first to the last site.
    pub fn positions(&self, step: f64) -> Vec<f64> {
        let sites = self.sites();
        let (a, b) = (sites[0], *sites.last().unwrap());
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * step).collect()
    }

    fn geometry_for(&self, site: f64) -> TxGeometry {
        TxGeometry {
            h: self.h,
            d: self.d,
            tx_chainage: site,
        }
    }
}

/// Channel gain in dB from every site to every position; `None` marks a gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTable {
    pub positions: Vec<f64>,
    /// Indexed `[site][position]`.
    pub gains_db: Vec<Vec<Option<f64>>>,
}

impl GainTable {
    fn from_fn(dep: &Deployment, positions: &[f64], f: impl Fn(&TxGeometry, f64) -> Option<f64>) -> Self {
        let gains_db = dep
            .sites()
            .iter()
            .map(|s| {
                let g = dep.geometry_for(*s);
                positions.iter().map(|x| f(&g, *x)).collect()
            })
            .collect();
        GainTable {
            positions: positions.to_vec(),
            gains_db,
        }
    }

    /// Friis gains with isotropic antennas at both ends.
    pub fn free_space(dep: &Deployment, positions: &[f64], rx_height: f64, frequency_hz: f64) -> Self {
        Self::from_fn(dep, positions, |g, x| {
            let dist = site_distance(g, x, rx_height);
            Some(-free_space_path_loss_db(dist, frequency_hz))
        })
    }

    /// Gains extrapolated from a fitted log-distance law.
    pub fn from_fit(dep: &Deployment, positions: &[f64], rx_height: f64, fit: &PathLossFit) -> Self {
        Self::from_fn(dep, positions, |g, x| {
            Some(-fit.predict(site_distance(g, x, rx_height)))
        })
    }

    /// Gains taken from a swept series, reused at every site by offset along
    /// the track and mirrored about the mast. A position with no snapshot
    /// within half a step is a gap.
    pub fn from_series(dep: &Deployment, positions: &[f64], series: &SnapshotSeries) -> Self {
        let origin = series.sweep.tx.tx_chainage;
        let tol = 0.5 * series.dd;
        let lookup = |offset: f64| -> Option<f64> {
            let i = series.snapshots.partition_point(|s| s.chainage < offset - tol);
            let s = series.snapshots.get(i)?;
            let p = s.total_power();
            ((s.chainage - offset).abs() <= tol && p > 0.0).then(|| power_to_db(p))
        };
        Self::from_fn(dep, positions, |g, x| {
            let rel = x - g.tx_chainage;
            lookup(origin + rel).or_else(|| lookup(origin - rel))
        })
    }

    /// Same gains with a constant offset added at every site.
    pub fn offset(&self, db: f64) -> GainTable {
        GainTable {
            positions: self.positions.clone(),
            gains_db: self
                .gains_db
                .iter()
                .map(|row| row.iter().map(|g| g.map(|g| g + db)).collect())
                .collect(),
        }
    }
}

fn site_distance(g: &TxGeometry, x: f64, rx_height: f64) -> f64 {
    let along = x - g.tx_chainage;
    let up = g.h - rx_height;
    (along * along + g.d * g.d + up * up).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiPoint {
    pub position: f64,
    pub rsrp_dbm: Vec<f64>,
    pub serving: usize,
    pub sinr_db: f64,
    pub rsrq_db: f64,
    pub se_bps_hz: f64,
    pub throughput_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiTrace {
    pub schema: String,
    pub label: String,
    pub deployment: Deployment,
    pub noise_dbm: f64,
    pub points: Vec<KpiPoint>,
}

pub fn spectral_efficiency(sinr_db: f64) -> f64 {
    (1.0 + db_to_linear_power(sinr_db)).log2()
}

pub fn throughput_mbps(se: f64, bandwidth_hz: f64, overhead: f64) -> f64 {
    se * bandwidth_hz * (1.0 - overhead) / 1e6
}

/// KPIs at every position of `gains`. The serving site is the strongest one;
/// a noise of `-inf` dBm gives a noise-free evaluation.
pub fn evaluate_kpis(dep: &Deployment, gains: &GainTable, noise_dbm: f64, label: &str) -> Result<KpiTrace> {
    dep.validate()?;
    if gains.gains_db.len() != dep.base_stations {
        return Err(Error::invalid(
            "kpi.base_stations",
            format!("{} sites but gains for {}", dep.base_stations, gains.gains_db.len()),
        ));
    }
    let noise = db_to_linear_power(noise_dbm);
    let mut points = Vec::with_capacity(gains.positions.len());
    for (j, &position) in gains.positions.iter().enumerate() {
        let rsrp_dbm = gains
            .gains_db
            .iter()
            .enumerate()
            .map(|(b, row)| {
                row.get(j)
                    .copied()
                    .flatten()
                    .map(|g| dep.tx_power_dbm + g)
                    .ok_or(Error::MissingGain { bs: b, position: j })
            })
            .collect::<Result<Vec<f64>>>()?;
        let serving = argmax(&rsrp_dbm);
        let lin: Vec<f64> = rsrp_dbm.iter().map(|r| db_to_linear_power(*r)).collect();
        let total: f64 = lin.iter().sum();
        let interference: f64 = lin
            .iter()
            .enumerate()
            .filter(|(b, _)| *b != serving)
            .map(|(_, p)| *p)
            .sum();
        let sinr_db = power_to_db(lin[serving]) - power_to_db(interference + noise);
        let rsrq_db = power_to_db(lin[serving]) - power_to_db(total + noise);
        let se = spectral_efficiency(sinr_db);
        points.push(KpiPoint {
            position,
            rsrp_dbm,
            serving,
            sinr_db,
            rsrq_db,
            se_bps_hz: se,
            throughput_mbps: throughput_mbps(se, dep.bandwidth_hz, dep.overhead),
        });
    }
    Ok(KpiTrace {
        schema: KPI_SCHEMA.to_string(),
        label: label.to_string(),
        deployment: dep.clone(),
        noise_dbm,
        points,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

impl KpiTrace {
    pub fn serving_rsrp(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rsrp_dbm[p.serving]).collect()
    }

    /// CSV with the deployment recorded in a leading comment line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let d = &self.deployment;
        writeln!(
            out,
            "# {} label={} isd_m={} sites={} tx_power_dbm={} bandwidth_hz={} noise_dbm={:.3} overhead={}",
            self.schema,
            self.label,
            d.inter_site_distance,
            d.base_stations,
            d.tx_power_dbm,
            d.bandwidth_hz,
            self.noise_dbm,
            d.overhead
        )
        .map_err(|e| Error::io("kpi csv", e))?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["position_m".to_string()];
        header.extend((0..d.base_stations).map(|b| format!("rsrp_bs{b}_dbm")));
        header.extend(
            ["serving", "sinr_db", "rsrq_db", "se_bps_hz", "throughput_mbps"]
                .iter()
                .map(|s| s.to_string()),
        );
        w.write_record(&header)?;
        for p in &self.points {
            let mut row = vec![format!("{:.3}", p.position)];
            row.extend(p.rsrp_dbm.iter().map(|r| format!("{r:.4}")));
            row.push(p.serving.to_string());
            row.extend(
                [p.sinr_db, p.rsrq_db, p.se_bps_hz, p.throughput_mbps]
                    .iter()
                    .map(|v| format!("{v:.6}")),
            );
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("kpi csv", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEdge {
    pub sites: (usize, usize),
    pub min_sinr_db: f64,
    pub min_sinr_position: f64,
    pub min_rsrp_dbm: f64,
    pub min_rsrp_position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEdgeReport {
    pub label: String,
    pub edges: Vec<CellEdge>,
    /// Stretches where this trace's serving RSRP falls below the reference
    /// trace's, as `(from, to)` positions.
    pub crossover: Vec<(f64, f64)>,
    pub reference: Option<String>,
}

/// Worst SINR and serving RSRP between each pair of adjacent sites, and the
/// stretches where `trace` is weaker than `reference` (typically a narrow
/// beam against a wide one on the same positions).
pub fn cell_edge_report(trace: &KpiTrace, reference: Option<&KpiTrace>) -> Result<CellEdgeReport> {
    let sites = trace.deployment.sites();
    if sites.len() < 2 {
        return Err(Error::invalid(
            "kpi.base_stations",
            "cell edges need at least two sites",
        ));
    }
    let mut edges = Vec::new();
    for (i, pair) in sites.windows(2).enumerate() {
        let inside: Vec<&KpiPoint> = trace
            .points
            .iter()
            .filter(|p| p.position >= pair[0] && p.position <= pair[1])
            .collect();
        if inside.is_empty() {
            continue;
        }
        let by = |f: &dyn Fn(&KpiPoint) -> f64| {
            inside
                .iter()
                .min_by(|a, b| f(a).total_cmp(&f(b)))
                .map(|p| (f(p), p.position))
                .unwrap()
        };
        let (min_sinr_db, min_sinr_position) = by(&|p| p.sinr_db);
        let (min_rsrp_dbm, min_rsrp_position) = by(&|p| p.rsrp_dbm[p.serving]);
        edges.push(CellEdge {
            sites: (i, i + 1),
            min_sinr_db,
            min_sinr_position,
            min_rsrp_dbm,
            min_rsrp_position,
        });
    }
    let crossover = match reference {
        None => Vec::new(),
        Some(r) => {
            if r.points.len() != trace.points.len()
                || r.points
                    .iter()
                    .zip(&trace.points)
                    .any(|(a, b)| a.position != b.position)
            {
                return Err(Error::invalid("kpi reference", "traces cover different positions"));
            }
            let below: Vec<bool> = trace
                .serving_rsrp()
                .iter()
                .zip(r.serving_rsrp())
                .map(|(a, b)| *a < b)
                .collect();
            regions(&trace.points.iter().map(|p| p.position).collect::<Vec<_>>(), &below)
        }
    };
    Ok(CellEdgeReport {
        label: trace.label.clone(),
        edges,
        crossover,
        reference: reference.map(|r| r.label.clone()),
    })
}

fn regions(positions: &[f64], flag: &[bool]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for (i, (&x, &f)) in positions.iter().zip(flag).enumerate() {
        match (f, start) {
            (true, None) => start = Some(x),
            (false, Some(s)) => {
                out.push((s, positions[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let (Some(s), Some(&last)) = (start, positions.last()) {
        out.push((s, last));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(gains: Vec<Vec<f64>>) -> GainTable {
        GainTable {
            positions: (0..gains[0].len()).map(|i| i as f64).collect(),
            gains_db: gains.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
        }
    }

    fn sites(n: usize) -> Deployment {
        Deployment {
            base_stations: n,
            ..Deployment::default()
        }
    }

    #[test]
    fn default_noise_is_minus_97() {
        assert!((Deployment::default().noise_dbm() + 97.0).abs() < 1e-12);
    }

    #[test]
    fn single_site_free_space_rsrp() {
        let dep = Deployment {
            base_stations: 1,
            d: 100.0,
            h: 0.0,
            ..Deployment::default()
        };
        let g = GainTable::free_space(&dep, &[0.0], 0.0, 2.1e9);
        let t = evaluate_kpis(&dep, &g, dep.noise_dbm(), "fs").unwrap();
        assert!(
            (t.points[0].rsrp_dbm[0] + 35.9).abs() < 0.1,
            "{}",
            t.points[0].rsrp_dbm[0]
        );
    }

    #[test]
    fn equal_sites_noise_free_give_zero_sinr() {
        let t = evaluate_kpis(
            &sites(2),
            &table(vec![vec![-90.0], vec![-90.0]]),
            f64::NEG_INFINITY,
            "eq",
        )
        .unwrap();
        assert_eq!(t.points[0].sinr_db, 0.0);
        assert_eq!(t.points[0].se_bps_hz, 1.0);
    }

    #[test]
    fn spectral_efficiency_values() {
        assert_eq!(spectral_efficiency(0.0), 1.0);
        assert!((spectral_efficiency(20.0) - 6.658).abs() < 5e-4);
        assert!((throughput_mbps(1.0, 10e6, 0.2) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_edge_at_midpoint() {
        let dep = sites(2);
        let positions = dep.positions(1.0);
        let g = GainTable::free_space(&dep, &positions, 3.1, 2.1e9);
        let t = evaluate_kpis(&dep, &g, f64::NEG_INFINITY, "fs").unwrap();
        let mid = &t.points[1000];
        assert_eq!(mid.position, 1000.0);
        assert!(mid.sinr_db.abs() < 1e-9);
        let r = cell_edge_report(&t, None).unwrap();
        assert_eq!(r.edges.len(), 1);
        assert_eq!(r.edges[0].min_sinr_position, 1000.0);
        assert_eq!(r.edges[0].min_rsrp_position, 1000.0);
        assert!(r.crossover.is_empty());
    }

    #[test]
    fn missing_gain_is_reported() {
        let mut g = table(vec![vec![-90.0, -91.0], vec![-95.0, -96.0]]);
        g.gains_db[1][1] = None;
        let err = evaluate_kpis(&sites(2), &g, -97.0, "gap").unwrap_err();
        assert!(matches!(err, Error::MissingGain { bs: 1, position: 1 }));
    }

    #[test]
    fn crossover_on_constructed_gains() {
        let dep = sites(2);
        let positions = dep.positions(10.0);
        let wide = GainTable::free_space(&dep, &positions, 3.1, 2.1e9);
        let mut narrow = wide.offset(10.0);
        for row in &mut narrow.gains_db {
            for (j, g) in row.iter_mut().enumerate() {
                let x = positions[j];
                if (800.0..=1200.0).contains(&x) {
                    *g = g.map(|g| g - 25.0);
                }
            }
        }
        let tw = evaluate_kpis(&dep, &wide, dep.noise_dbm(), "typeA").unwrap();
        let tn = evaluate_kpis(&dep, &narrow, dep.noise_dbm(), "typeC").unwrap();
        let r = cell_edge_report(&tn, Some(&tw)).unwrap();
        assert_eq!(r.crossover, vec![(800.0, 1200.0)]);
        assert_eq!(r.reference.as_deref(), Some("typeA"));
    }

    #[test]
    fn csv_header_records_isd() {
        let t = evaluate_kpis(&sites(2), &table(vec![vec![-90.0], vec![-95.0]]), -97.0, "x").unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().contains("isd_m=2000"));
        assert_eq!(
            lines.next().unwrap(),
            "position_m,rsrp_bs0_dbm,rsrp_bs1_dbm,serving,sinr_db,rsrq_db,se_bps_hz,throughput_mbps"
        );
    }

    #[test]
    fn validation() {
        assert!(Deployment::default().validate().is_ok());
        for bad in [
            Deployment {
                inter_site_distance: 0.0,
                ..Deployment::default()
            },
            Deployment {
                overhead: 1.0,
                ..Deployment::default()
            },
            Deployment {
                base_stations: 0,
                ..Deployment::default()
            },
        ] {
            assert!(bad.validate().unwrap_err().is_validation());
        }
    }

    fn arb_gains() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (2usize..6, 1usize..20)
            .prop_flat_map(|(n, m)| prop::collection::vec(prop::collection::vec(-150.0f64..-40.0, m), n))
    }

    proptest! {
        #[test]
        fn removing_an_interferer_never_lowers_sinr(gains in arb_gains(), noise in -120.0f64..-80.0) {
            let n = gains.len();
            let full = evaluate_kpis(&sites(n), &table(gains.clone()), noise, "full").unwrap();
            for p in &full.points {
                let snr = p.rsrp_dbm[p.serving] - noise;
                prop_assert!(p.sinr_db <= snr + 1e-9);
            }
            for drop in 0..n {
                let kept: Vec<Vec<f64>> = gains.iter().enumerate().filter(|(b, _)| *b != drop).map(|(_, r)| r.clone()).collect();
                let fewer = evaluate_kpis(&sites(n - 1), &table(kept), noise, "fewer").unwrap();
                for (a, b) in full.points.iter().zip(&fewer.points) {
                    if a.serving != drop {
                        prop_assert!(b.sinr_db >= a.sinr_db - 1e-9);
                    }
                }
            }
        }

        #[test]
        fn serving_site_ignores_global_offset(gains in arb_gains(), offset in -30.0f64..30.0) {
            let n = gains.len();
            let t = table(gains);
            let a = evaluate_kpis(&sites(n), &t, -97.0, "a").unwrap();
            let b = evaluate_kpis(&sites(n), &t.offset(offset), -97.0, "b").unwrap();
            for (p, q) in a.points.iter().zip(&b.points) {
                prop_assert_eq!(p.serving, q.serving);
            }
        }

        #[test]
        fn efficiency_is_monotone(a in -30.0f64..40.0, b in -30.0f64..40.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(spectral_efficiency(lo) <= spectral_efficiency(hi));
            let t1 = throughput_mbps(spectral_efficiency(a), 10e6, 0.2);
            let t2 = throughput_mbps(spectral_efficiency(a), 20e6, 0.2);
            prop_assert!((t2 - 2.0 * t1).abs() <= 1e-9 * t2.abs().max(1.0));
        }
    }
}
