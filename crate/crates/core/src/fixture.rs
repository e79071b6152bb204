//! Seeded, reproducible run tables for tests, benchmarks and demos.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data_model::{
    format_series, load_csv, DimensionMeta, IngestOptions, Role, RunTable, Sampling, Sidecar,
};
use crate::names::string_enum;

string_enum! {
    pub enum FixtureKind as "fixture kind" {
        Edge => "edge",
        PowderLike => "powder-like" | "powder",
        Synthetic => "synthetic",
    }
}

impl FixtureKind {
    pub fn default_runs(self) -> usize {
        match self {
            FixtureKind::Edge => 64,
            FixtureKind::PowderLike => 50,
            FixtureKind::Synthetic => 500,
        }
    }
}

/// CSV text plus its metadata sidecar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub csv: String,
    pub sidecar: Sidecar,
}

impl Fixture {
    /// Loads the CSV and applies the sidecar, with the run cap lifted to fit.
    pub fn table(&self) -> RunTable {
        let options = IngestOptions {
            max_runs: usize::MAX,
        };
        let table = load_csv(&self.csv, &options).expect("fixtures are valid CSV");
        table
            .apply_sidecar(&self.sidecar)
            .expect("fixture sidecar matches")
    }
}

pub fn generate(kind: FixtureKind, runs: usize, dims: usize, seed: u64) -> Fixture {
    match kind {
        FixtureKind::Edge => edge(runs, seed),
        FixtureKind::PowderLike => powder_like(runs, seed),
        FixtureKind::Synthetic => synthetic(runs, dims, seed),
    }
}

fn meta(role: Role, sampling: Option<Sampling>) -> DimensionMeta {
    DimensionMeta {
        role: Some(role),
        sampling,
    }
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Rounds to six decimals so the CSV stays readable.
fn r6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Grid levels of the edge-detection inputs.
pub const EDGE_LOW: (f64, f64) = (0.05, 0.3);
pub const EDGE_HIGH: (f64, f64) = (0.3, 0.8);
pub const EDGE_SIGMA: (f64, f64) = (0.5, 3.0);

/// Edge-detection style table: a regular grid over `low`, `high` and `sigma`,
/// a separation score, a contour image per run, a distance profile and a
/// goodness-of-fit value that is exactly zero at one grid point.
pub fn edge(runs: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = (1..).find(|k: &usize| k.pow(3) >= runs).unwrap_or(1).max(2);
    let level =
        |range: (f64, f64), i: usize| r6(range.0 + (range.1 - range.0) * i as f64 / (k - 1) as f64);
    let optimum = [k / 3, k / 2, k / 2];
    let rows: Vec<Vec<String>> = (0..runs)
        .map(|id| {
            let idx = [id / (k * k), (id / k) % k, id % k];
            let low = level(EDGE_LOW, idx[0]);
            let high = level(EDGE_HIGH, idx[1]);
            let sigma = level(EDGE_SIGMA, idx[2]);
            let d: Vec<f64> = (0..3)
                .map(|a| (idx[a] as f64 - optimum[a] as f64) / (k - 1) as f64)
                .collect();
            let chi2 = r6(d.iter().map(|x| x * x).sum::<f64>() * 50.0);
            let sep = r6((1.0 - (high - low)).max(0.0) * (1.0 + 0.1 * rng.random::<f64>()) / sigma);
            let width = 2.0 + 2.0 * sigma;
            let profile: Vec<f64> = (0..32)
                .map(|t| {
                    r6((-(t as f64 - 16.0).powi(2) / (2.0 * width * width)).exp() * (1.0 + chi2))
                })
                .collect();
            vec![
                low.to_string(),
                high.to_string(),
                sigma.to_string(),
                sep.to_string(),
                format!("co/run_{id:03}.png"),
                format_series(&profile),
                chi2.to_string(),
            ]
        })
        .collect();
    let csv = write_csv(&["low", "high", "sigma", "sep", "co", "dtco", "chi2"], rows);
    let reg = Some(Sampling::Regular);
    let dimensions = BTreeMap::from([
        ("low".to_string(), meta(Role::InputControl, reg)),
        ("high".to_string(), meta(Role::InputControl, reg)),
        ("sigma".to_string(), meta(Role::InputControl, reg)),
        ("sep".to_string(), meta(Role::OutputDirect, None)),
        ("co".to_string(), meta(Role::OutputDirect, None)),
        ("dtco".to_string(), meta(Role::OutputDerived, None)),
        ("chi2".to_string(), meta(Role::OutputDerived, None)),
    ]);
    Fixture {
        csv,
        sidecar: Sidecar {
            dimensions,
            default_sampling: None,
        },
    }
}

pub const PATTERN_LENGTH: usize = 400;
/// Centre of the run-dependent peak.
pub const PATTERN_BUMP: usize = 196;
/// Peak shared by every run.
pub const PATTERN_INVARIANT: usize = 291;
const PATTERN_COMPENSATE: usize = 340;
const BUMP_HALF_WIDTH: f64 = 12.0;
const STRATA: usize = 10;

fn raised_cosine(t: usize, centre: usize) -> f64 {
    let d = (t as f64 - centre as f64) / BUMP_HALF_WIDTH;
    if d.abs() >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (PI * d).cos())
    }
}

/// Half-width of the refinement box around the optimum.
const REFINE: f64 = 0.35;

/// Diffraction-pattern stand-in: four inputs of which only `zoff1` and
/// `zoff2` drive the fit value `chi2`. The angles are stratified so every
/// fifth of the runs, ordered by `chi2`, covers their full range.
pub fn powder_like(runs: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lhs = |rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64| {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        strata
            .into_iter()
            .map(|s| r6(lo + (hi - lo) * (s as f64 + rng.random::<f64>()) / n as f64))
            .collect::<Vec<f64>>()
    };
    // A global sweep followed by a local refinement around the optimum.
    let optimum = (0.1, -0.15);
    let local = runs / 2;
    let global = runs - local;
    let mut zoff1 = lhs(&mut rng, global, -1.0, 1.0);
    let mut zoff2 = lhs(&mut rng, global, -1.0, 1.0);
    zoff1.extend(lhs(&mut rng, local, optimum.0 - REFINE, optimum.0 + REFINE));
    zoff2.extend(lhs(&mut rng, local, optimum.1 - REFINE, optimum.1 + REFINE));
    let chi2: Vec<f64> = (0..runs)
        .map(|i| r6(((zoff1[i] - optimum.0).abs()).max((zoff2[i] - optimum.1).abs()) * 10.0))
        .collect();

    let mut order: Vec<usize> = (0..runs).collect();
    order.sort_by(|&a, &b| chi2[a].total_cmp(&chi2[b]).then(a.cmp(&b)));
    let mut angles = [vec![0.0; runs], vec![0.0; runs]];
    let group = runs.div_ceil(5).max(1);
    for angle in angles.iter_mut() {
        for members in order.chunks(group) {
            let mut strata: Vec<usize> = (0..members.len()).map(|i| i % STRATA).collect();
            strata.shuffle(&mut rng);
            for (&run, s) in members.iter().zip(strata) {
                let u = 0.25 + 0.5 * rng.random::<f64>();
                angle[run] = r6(90.0 * (s as f64 + u) / STRATA as f64);
            }
        }
    }

    let amplitude: Vec<f64> = (0..runs)
        .map(|i| 1.0 + 0.4 * (zoff1[i] + 1.0) + 0.2 * (zoff2[i] + 1.0))
        .collect();
    let max_amp = 2.2;
    let rows: Vec<Vec<String>> = (0..runs)
        .map(|i| {
            let pattern: Vec<f64> = (0..PATTERN_LENGTH)
                .map(|t| {
                    let base = 0.2 + 0.05 * (t as f64 / 37.0).sin();
                    r6(base
                        + amplitude[i] * raised_cosine(t, PATTERN_BUMP)
                        + 3.0 * raised_cosine(t, PATTERN_INVARIANT)
                        + (max_amp - amplitude[i]) * raised_cosine(t, PATTERN_COMPENSATE))
                })
                .collect();
            vec![
                zoff1[i].to_string(),
                zoff2[i].to_string(),
                angles[0][i].to_string(),
                angles[1][i].to_string(),
                chi2[i].to_string(),
                format_series(&pattern),
            ]
        })
        .collect();
    let csv = write_csv(
        &["zoff1", "zoff2", "angl1", "angl2", "chi2", "pattern"],
        rows,
    );
    let stoch = Some(Sampling::Stochastic);
    let dimensions = BTreeMap::from([
        ("zoff1".to_string(), meta(Role::InputControl, stoch)),
        ("zoff2".to_string(), meta(Role::InputControl, stoch)),
        ("angl1".to_string(), meta(Role::InputControl, stoch)),
        ("angl2".to_string(), meta(Role::InputControl, stoch)),
        ("chi2".to_string(), meta(Role::OutputDerived, None)),
        ("pattern".to_string(), meta(Role::OutputDirect, None)),
    ]);
    Fixture {
        csv,
        sidecar: Sidecar {
            dimensions,
            default_sampling: None,
        },
    }
}

pub fn synthetic_name(d: usize) -> String {
    format!("d{d:02}")
}

/// `runs × dims` uniform values in `[0, 1)`, columns `d00`, `d01`, ...
pub fn synthetic(runs: usize, dims: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..dims).map(synthetic_name).collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..runs)
        .map(|_| (0..dims).map(|_| rng.random::<f64>().to_string()).collect())
        .collect();
    Fixture {
        csv: write_csv(&header, rows),
        sidecar: Sidecar {
            dimensions: names
                .iter()
                .map(|n| {
                    (
                        n.clone(),
                        meta(Role::InputControl, Some(Sampling::Stochastic)),
                    )
                })
                .collect(),
            default_sampling: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::DType;

    #[test]
    fn edge_schema() {
        let t = edge(64, 1).table();
        let dtypes: Vec<DType> = t.dimensions().iter().map(|d| d.dtype).collect();
        use DType::*;
        assert_eq!(
            dtypes,
            [
                Quantitative,
                Quantitative,
                Quantitative,
                Quantitative,
                ImageRef2D,
                Series1D,
                Quantitative
            ]
        );
        let chi2 = t.numbers("chi2").unwrap();
        assert_eq!(chi2.iter().filter(|&&c| c == 0.0).count(), 1);
    }

    #[test]
    fn fixtures_are_reproducible() {
        for kind in FixtureKind::ALL {
            assert_eq!(generate(*kind, 40, 5, 7), generate(*kind, 40, 5, 7));
            assert_ne!(generate(*kind, 40, 5, 7).csv, generate(*kind, 40, 5, 8).csv);
        }
    }

    #[test]
    fn powder_pattern_shape() {
        let t = powder_like(50, 3).table();
        let pattern = t.series("pattern").unwrap();
        let total = |s: &Vec<f64>| s.iter().sum::<f64>();
        for s in pattern {
            assert_eq!(s.len(), PATTERN_LENGTH);
            assert_eq!(s[PATTERN_INVARIANT], pattern[0][PATTERN_INVARIANT]);
            assert!((total(s) - total(&pattern[0])).abs() < 1e-3);
        }
    }
}
