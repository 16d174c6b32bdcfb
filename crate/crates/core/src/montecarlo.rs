//! Monte Carlo estimates of the length measure of an ideal polygon.
//!
//! Each orthogeodesic class is sampled in its normalized chart
//! `(a, 0) × (1, ∞)` from the proposal `∝ 1/(x - y)²`, whose marginals
//! invert in closed form; cusp classes use the closed-form density
//! `4 t²/sinh²t`. Work is split into fixed-size chunks, each drawn from its
//! own random stream, and reduced in chunk order, so results depend only on
//! the seed and the sample count.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::density::{cusp_density, cusp_mass, polygon_volume, rho_window_mass, total_mass_f};
use crate::error::{Error, Result};
use crate::hypgeom::{
    cross_ratio_angles, intersection_length, length_from_a, length_from_factors, triangle_length_l2, ExtReal,
};
use crate::polygon::{orthospectrum, IdealPolygon};
use crate::quad::{gauss_kronrod, Tolerance};

pub use crate::rng::{rng_stream, Stream, DEFAULT_SEED};

/// Samples drawn from one random stream.
const CHUNK: u64 = 1 << 14;

/// Angular distance below which a boundary point counts as a vertex.
pub const VERTEX_TOLERANCE: f64 = 1e-12;

const TAU: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleClass {
    /// Enters through side `i` and leaves through side `j` (`i < j`).
    SidePair { i: usize, j: usize },
    /// Crosses the two sides that meet at vertex `k`.
    Cusp { k: usize },
    /// Does not meet the interior.
    Miss,
}

/// A geodesic with endpoints at boundary angles `x`, `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
    pub chord: f64,
    pub class: SampleClass,
}

/// Importance-sampling estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMass {
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Weighted histogram of intersection lengths.
///
/// `overflow` holds the mass outside `[first edge, last edge)`, so
/// `total_mass = Σ masses + overflow`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub overflow: f64,
    pub total_mass: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl EmpiricalMeasure {
    fn empty(bin_edges: &[f64], n_samples: u64, seed: u64) -> Self {
        EmpiricalMeasure {
            bin_edges: bin_edges.to_vec(),
            masses: vec![0.0; bin_edges.len() - 1],
            overflow: 0.0,
            total_mass: 0.0,
            n_samples,
            seed,
        }
    }

    /// SHA-256 of every stored number, in order, as hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.n_samples.to_le_bytes());
        h.update(self.seed.to_le_bytes());
        for v in self
            .bin_edges
            .iter()
            .chain(&self.masses)
            .chain([&self.overflow, &self.total_mass])
        {
            h.update(v.to_bits().to_le_bytes());
        }
        hex(&h.finalize())
    }

    /// Cumulative mass fraction at each edge after the first.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.masses
            .iter()
            .map(|m| {
                acc += m;
                acc / self.total_mass
            })
            .collect()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Default histogram: quarter-unit bins on `[0, 20]`.
pub fn default_bins() -> Vec<f64> {
    (0..=80).map(|k| 0.25 * k as f64).collect()
}

fn check_bins(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::Degenerate("a histogram needs at least two edges".into()));
    }
    if let Some(&e) = edges.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::domain("bin edges", e, "0 <= edge < ∞"));
    }
    if let Some(w) = edges.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::domain("bin edges", w[1], "strictly increasing"));
    }
    Ok(())
}

fn bin_index(edges: &[f64], t: f64) -> Option<usize> {
    if t < edges[0] || t >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|&e| e <= t) - 1)
}

/// Running sums for one chunk.
#[derive(Debug, Clone)]
struct Tally {
    count: u64,
    sum: f64,
    sum_sq: f64,
    bins: Vec<f64>,
    overflow: f64,
}

impl Tally {
    fn new(n_bins: usize) -> Self {
        Tally {
            count: 0,
            sum: 0.0,
            sum_sq: 0.0,
            bins: vec![0.0; n_bins],
            overflow: 0.0,
        }
    }

    fn add(&mut self, edges: &[f64], length: f64, weight: f64) {
        self.count += 1;
        self.sum += weight;
        self.sum_sq += weight * weight;
        if weight != 0.0 {
            match bin_index(edges, length) {
                Some(k) => self.bins[k] += weight,
                None => self.overflow += weight,
            }
        }
    }

    fn merge(mut self, other: &Tally) -> Self {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (b, o) in self.bins.iter_mut().zip(&other.bins) {
            *b += o;
        }
        self.overflow += other.overflow;
        self
    }

    fn mean_and_stderr(&self) -> (f64, f64) {
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = if self.count > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        (mean, (var / n).sqrt())
    }
}

/// Runs `draw` over `n_samples` split into fixed chunks; chunk `c` uses
/// stream `(stream_base << 32) | c`. Chunks run in parallel and are merged
/// in index order.
fn run_chunks<F>(n_samples: u64, seed: u64, stream_base: u64, n_bins: usize, draw: F) -> Tally
where
    F: Fn(&mut Stream, &mut Tally) + Sync,
{
    let chunks = n_samples.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_stream(seed, (stream_base << 32) | c);
            let mut tally = Tally::new(n_bins);
            let size = CHUNK.min(n_samples - c * CHUNK);
            for _ in 0..size {
                draw(&mut rng, &mut tally);
            }
            tally
        })
        .collect();
    tallies.iter().fold(Tally::new(n_bins), Tally::merge)
}

/// One draw from the proposal `∝ 1/(x - y)²` on `(a, 0) × (1, ∞)`,
/// returning the intersection length. `log_norm = ln(1 - a)` is the
/// proposal's total mass.
fn draw_chart_length(rng: &mut Stream, a: f64, log_norm: f64) -> f64 {
    let u = rng.uniform();
    let v = rng.uniform();
    // 1 - x = (1 - a)^{1 - u}; the corner distances come from expm1.
    let neg_x = ((1.0 - u) * log_norm).exp_m1();
    let x_minus_a = -(1.0 - a) * (-u * log_norm).exp_m1();
    let one_minus_x = 1.0 + neg_x;
    // (1 - x)/(y - x) = 1 - v.
    let y_minus_1 = one_minus_x * v / (1.0 - v);
    let y = 1.0 + y_minus_1;
    let y_minus_a = y_minus_1 + (1.0 - a);
    length_from_factors(y, y_minus_a, one_minus_x, neg_x, x_minus_a, y_minus_1)
}

fn check_a(op: &'static str, a: f64) -> Result<()> {
    if a < 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, a, "-∞ < a < 0"))
    }
}

/// Importance-sampling estimate and length histogram for the class of
/// geodesics crossing both sides of the quadrilateral `(a, 0, 1, ∞)`.
fn class_run(a: f64, n_samples: u64, seed: u64, stream_base: u64, edges: &[f64]) -> (ClassMass, EmpiricalMeasure) {
    let log_norm = (-a).ln_1p();
    let scale = 4.0 * log_norm;
    let tally = run_chunks(n_samples, seed, stream_base, edges.len() - 1, |rng, tally| {
        let length = draw_chart_length(rng, a, log_norm);
        tally.add(edges, length, scale * length);
    });
    let (estimate, stderr) = tally.mean_and_stderr();
    let n = n_samples as f64;
    let mut measure = EmpiricalMeasure::empty(edges, n_samples, seed);
    measure.masses = tally.bins.iter().map(|b| b / n).collect();
    measure.overflow = tally.overflow / n;
    measure.total_mass = measure.masses.iter().sum::<f64>() + measure.overflow;
    (
        ClassMass {
            estimate,
            stderr,
            n_samples,
            seed,
        },
        measure,
    )
}

/// Estimate of `∫_a^0 ∫_1^∞ 4 L(x, y) dy dx/(x - y)²`, which equals
/// `-8 L(a)`.
pub fn mc_class_mass(a: f64, n_samples: u64, seed: u64) -> Result<ClassMass> {
    check_a("mc_class_mass", a)?;
    if n_samples == 0 {
        return Err(Error::domain("mc_class_mass", 0.0, "n_samples >= 1"));
    }
    Ok(class_run(a, n_samples, seed, 0, &default_bins()).0)
}

/// [`mc_class_mass`] together with the weighted histogram of lengths.
pub fn mc_class_measure(a: f64, n_samples: u64, seed: u64, bin_edges: &[f64]) -> Result<(ClassMass, EmpiricalMeasure)> {
    check_a("mc_class_measure", a)?;
    check_bins(bin_edges)?;
    if n_samples == 0 {
        return Err(Error::domain("mc_class_measure", 0.0, "n_samples >= 1"));
    }
    Ok(class_run(a, n_samples, seed, 0, bin_edges))
}

/// Largest gap between the empirical cumulative distribution of a class
/// histogram and the one predicted by `rho(l, ·)/F(l)`, over the edges.
pub fn cdf_sup_distance(a: f64, measure: &EmpiricalMeasure) -> Result<f64> {
    let l = length_from_a(a)?;
    let f = total_mass_f(l)?;
    let empirical = measure.cdf();
    let mut predicted = 0.0;
    let mut worst: f64 = 0.0;
    let first = rho_window_mass(l, 0.0, measure.bin_edges[0], 1e-9)?;
    predicted += first;
    for (k, w) in measure.bin_edges.windows(2).enumerate() {
        predicted += rho_window_mass(l, w[0], w[1], 1e-9)?;
        worst = worst.max((empirical[k] - predicted / f).abs());
    }
    Ok(worst)
}

fn arc_of(p: &IdealPolygon, theta: f64) -> Result<(usize, bool)> {
    let theta = theta.rem_euclid(TAU);
    let angles = p.angles();
    let n = angles.len();
    for (k, &v) in angles.iter().enumerate() {
        let d = (theta - v).rem_euclid(TAU);
        if d.min(TAU - d) <= VERTEX_TOLERANCE {
            return Ok((k, true));
        }
    }
    let after = angles.partition_point(|&v| v < theta);
    Ok(if after == 0 { (n - 1, false) } else { (after - 1, false) })
}

/// Length of the part of the geodesic from boundary angle `x` to `y` that
/// lies inside the polygon, and which pair of sides it crosses.
///
/// An endpoint within [`VERTEX_TOLERANCE`] of a vertex is treated as the
/// vertex itself: the geodesic runs into that cusp and the chord is
/// infinite.
pub fn chord_length(p: &IdealPolygon, x: f64, y: f64) -> Result<(f64, SampleClass)> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::domain(
            "chord_length",
            if x.is_finite() { y } else { x },
            "finite angle",
        ));
    }
    let gap = (x - y).rem_euclid(TAU);
    if gap.min(TAU - gap) == 0.0 {
        return Err(Error::Degenerate("geodesic with coincident endpoints".into()));
    }
    let n = p.n();
    let (ax, vx) = arc_of(p, x)?;
    let (ay, vy) = arc_of(p, y)?;
    if vx || vy {
        let k = if vx { ax } else { ay };
        return Ok((f64::INFINITY, SampleClass::Cusp { k }));
    }
    if ax == ay {
        return Ok((0.0, SampleClass::Miss));
    }
    let (i, j, ti, tj) = if ax < ay { (ax, ay, x, y) } else { (ay, ax, y, x) };
    let th = |k: usize| p.angle(k);
    if j == i + 1 || (i == 0 && j == n - 1) {
        // Adjacent arcs meet at vertex k; normalize x_{k+1}, x_k, x_{k-1}
        // to 0, ∞, 1 so the chord is the one in the triangle (0, 1, ∞).
        let (k, in_k, in_prev) = if j == i + 1 { (j, tj, ti) } else { (0, ti, tj) };
        let m = |t: f64| cross_ratio_angles(t, th(k + 1), th(k), th(k + n - 1));
        let chord = triangle_length_l2(m(in_k)?, m(in_prev)?)?;
        return Ok((chord, SampleClass::Cusp { k }));
    }
    // Normalize x_{i+1}, x_j, x_{j+1} to 0, 1, ∞; x_i goes to a < 0.
    let m = |t: f64| cross_ratio_angles(t, th(i + 1), th(j + 1), th(j));
    let a = m(th(i))?;
    let chord = intersection_length(m(ti)?, m(tj)?, a)?;
    Ok((chord, SampleClass::SidePair { i, j }))
}

/// [`chord_length`] for endpoints on the extended real line.
pub fn chord_length_points(p: &IdealPolygon, x: ExtReal, y: ExtReal) -> Result<(f64, SampleClass)> {
    chord_length(p, x.to_angle(), y.to_angle())
}

/// Per-class Monte Carlo reproduction of the polygon's length measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonMeasure {
    pub classes: Vec<(usize, usize, ClassMass)>,
    pub cusp_mass: f64,
    pub measure: EmpiricalMeasure,
    pub total: f64,
    pub total_stderr: f64,
    pub expected_total: f64,
}

fn cusp_bin_mass(count: usize, t0: f64, t1: f64) -> Result<f64> {
    if count == 0 {
        return Ok(0.0);
    }
    let est = gauss_kronrod(
        |t| {
            if t > 0.0 {
                cusp_density(count, t).unwrap_or(0.0)
            } else {
                4.0 * count as f64
            }
        },
        t0,
        t1,
        &[],
        Tolerance::new(1e-14, 1e-12),
        1000,
    )?;
    Ok(est.value)
}

/// Samples every orthogeodesic class in its own chart (`n_samples` each,
/// class `c` on streams `(c + 1) << 32 | chunk`) and adds the cusp classes
/// in closed form.
pub fn mc_polygon_measure(p: &IdealPolygon, n_samples: u64, seed: u64, bin_edges: &[f64]) -> Result<PolygonMeasure> {
    check_bins(bin_edges)?;
    if n_samples == 0 {
        return Err(Error::domain("mc_polygon_measure", 0.0, "n_samples >= 1"));
    }
    let spectrum = orthospectrum(p);
    let runs: Vec<(usize, usize, ClassMass, EmpiricalMeasure)> = spectrum
        .entries
        .par_iter()
        .enumerate()
        .map(|(c, e)| {
            let (mass, measure) = class_run(e.a, n_samples, seed, c as u64 + 1, bin_edges);
            (e.i, e.j, mass, measure)
        })
        .collect();

    let n = p.cusp_count();
    let mut measure = EmpiricalMeasure::empty(bin_edges, n_samples, seed);
    for (k, w) in bin_edges.windows(2).enumerate() {
        measure.masses[k] = cusp_bin_mass(n, w[0], w[1])?;
    }
    let below = cusp_bin_mass(n, 0.0, bin_edges[0])?;
    let cusp_total = cusp_mass(n);
    measure.overflow = cusp_total - below - measure.masses.iter().sum::<f64>();
    let mut total = cusp_total;
    let mut variance = 0.0;
    for (_, _, mass, m) in &runs {
        for (acc, v) in measure.masses.iter_mut().zip(&m.masses) {
            *acc += v;
        }
        measure.overflow += m.overflow;
        total += mass.estimate;
        variance += mass.stderr * mass.stderr;
    }
    measure.overflow += below;
    measure.total_mass = measure.masses.iter().sum::<f64>() + measure.overflow;
    Ok(PolygonMeasure {
        classes: runs.into_iter().map(|(i, j, mass, _)| (i, j, mass)).collect(),
        cusp_mass: cusp_total,
        measure,
        total,
        total_stderr: variance.sqrt(),
        expected_total: polygon_volume(p),
    })
}

/// Estimate from uniformly drawn endpoint pairs, which exercises
/// [`chord_length`] end to end.
///
/// The weight `2 (2π)² chord/|e^{ix} - e^{iy}|²` has infinite variance
/// (pairs close to a vertex have long chords and nearly coincident
/// endpoints), so the reported standard error understates the error and
/// only a loose comparison is meaningful. Pairs landing within the vertex
/// tolerance are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalEstimate {
    pub total: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub misses: u64,
    pub cusp_hits: u64,
    pub side_pair_hits: u64,
}

pub fn mc_global_estimate(p: &IdealPolygon, n_samples: u64, seed: u64) -> Result<GlobalEstimate> {
    if n_samples == 0 {
        return Err(Error::domain("mc_global_estimate", 0.0, "n_samples >= 1"));
    }
    // Bins 0 and 1 count cusp and side-pair hits.
    let tally = run_chunks(n_samples, seed, u32::MAX as u64, 2, |rng, tally| {
        let s = global_sample(p, rng);
        tally.count += 1;
        tally.sum += s.weight;
        tally.sum_sq += s.weight * s.weight;
        match s.class {
            SampleClass::Cusp { .. } => tally.bins[0] += 1.0,
            SampleClass::SidePair { .. } => tally.bins[1] += 1.0,
            SampleClass::Miss => {}
        }
    });
    let (total, stderr) = tally.mean_and_stderr();
    let cusp_hits = tally.bins[0] as u64;
    let side_pair_hits = tally.bins[1] as u64;
    Ok(GlobalEstimate {
        total,
        stderr,
        n_samples,
        misses: n_samples - cusp_hits - side_pair_hits,
        cusp_hits,
        side_pair_hits,
    })
}

/// One uniformly drawn endpoint pair, classified and weighted.
pub fn global_sample(p: &IdealPolygon, rng: &mut Stream) -> GeodesicSample {
    let x = TAU * rng.uniform();
    let y = TAU * rng.uniform();
    let (chord, class) = chord_length(p, x, y).unwrap_or((0.0, SampleClass::Miss));
    let weight = if chord.is_finite() && chord > 0.0 {
        let chord_sq = 4.0 * ((x - y) / 2.0).sin().powi(2);
        2.0 * TAU * TAU * chord / chord_sq
    } else {
        0.0
    };
    let class = if chord.is_finite() { class } else { SampleClass::Miss };
    GeodesicSample {
        x,
        y,
        weight,
        chord: if chord.is_finite() { chord } else { 0.0 },
        class,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub i: usize,
    pub j: usize,
    pub mass: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinsReport {
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub overflow: f64,
}

/// Monte Carlo run in exchange form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub n_samples: u64,
    pub per_class: Vec<ClassReport>,
    pub cusp_mass: f64,
    pub total: f64,
    pub expected_total: f64,
    pub bins: BinsReport,
    pub digest: String,
}

impl RunReport {
    pub fn new(run: &PolygonMeasure) -> Self {
        RunReport {
            seed: run.measure.seed,
            n_samples: run.measure.n_samples,
            per_class: run
                .classes
                .iter()
                .map(|&(i, j, m)| ClassReport {
                    i,
                    j,
                    mass: m.estimate,
                    stderr: m.stderr,
                })
                .collect(),
            cusp_mass: run.cusp_mass,
            total: run.total,
            expected_total: run.expected_total,
            bins: BinsReport {
                edges: run.measure.bin_edges.clone(),
                masses: run.measure.masses.clone(),
                overflow: run.measure.overflow,
            },
            digest: run_digest(run),
        }
    }
}

/// SHA-256 over the class estimates and the combined histogram.
pub fn run_digest(run: &PolygonMeasure) -> String {
    let mut h = Sha256::new();
    for (i, j, m) in &run.classes {
        h.update((*i as u64).to_le_bytes());
        h.update((*j as u64).to_le_bytes());
        h.update(m.estimate.to_bits().to_le_bytes());
        h.update(m.stderr.to_bits().to_le_bytes());
    }
    h.update(run.measure.digest().as_bytes());
    hex(&h.finalize())
}
