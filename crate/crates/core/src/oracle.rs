//! Monte Carlo deployments used to check the analytic coverage model.
//!
//! Each trial drops `N` nodes uniformly on the field, counts isolated nodes
//! (no other node within `R`) and counts how many nodes cover one uniform
//! probe point. Trial `i` draws from a ChaCha8 stream seeded with
//! `seed ^ (i * 0x9E3779B97F4A7C15)` (wrapping), so results do not depend
//! on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coverage::{binomial_pmf, coverage_poisson_default, isolation_probability, total_variation, FieldSpec};
use crate::error::{Error, Result};
use crate::num::{count, Real};

/// Multiplier of the per-trial seed split.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Below this many trials standard errors are reported but flagged.
pub const MIN_RELIABLE_TRIALS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    /// Distances wrap around both axes.
    #[default]
    Torus,
    /// Plain Euclidean distances inside the square.
    Bounded,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::Torus => "torus",
            Topology::Bounded => "bounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig<T> {
    pub field: FieldSpec<T>,
    pub n_nodes: usize,
    pub trials: usize,
    pub seed: u64,
    pub topology: Topology,
}

impl<T: Real> TrialConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        if self.n_nodes == 0 {
            return Err(Error::invalid("n_nodes", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        Ok(())
    }
}

/// Seed of trial `index`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    master ^ index.wrapping_mul(SEED_STRIDE)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats<T> {
    pub n_nodes: usize,
    pub trials: usize,
    /// Fraction of trials with no isolated node.
    pub p_no_isolated: T,
    pub p_no_isolated_stderr: T,
    pub mean_isolated_count: T,
    pub mean_isolated_stderr: T,
    /// Empirical mass over the number of nodes covering the probe, `0 ..= N`.
    pub coverage_histogram: Vec<T>,
    pub coverage_histogram_stderr: Vec<T>,
    /// False when `trials < MIN_RELIABLE_TRIALS`.
    pub stderr_reliable: bool,
}

/// Integer tallies; summing them is associative, which keeps parallel runs
/// bit-identical to sequential ones.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    no_isolated: u64,
    isolated_sum: u64,
    isolated_sq_sum: u128,
    histogram: Vec<u64>,
}

impl Tally {
    fn empty(n_nodes: usize) -> Self {
        Self {
            no_isolated: 0,
            isolated_sum: 0,
            isolated_sq_sum: 0,
            histogram: vec![0; n_nodes + 1],
        }
    }

    fn record(mut self, isolated: usize, covering: usize) -> Self {
        self.no_isolated += u64::from(isolated == 0);
        self.isolated_sum += isolated as u64;
        self.isolated_sq_sum += (isolated as u128) * (isolated as u128);
        self.histogram[covering] += 1;
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.no_isolated += other.no_isolated;
        self.isolated_sum += other.isolated_sum;
        self.isolated_sq_sum += other.isolated_sq_sum;
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }
}

/// Runs the trials on the rayon pool.
pub fn simulate<T: Real>(config: &TrialConfig<T>) -> Result<TrialStats<T>> {
    config.validate()?;
    let tally = (0..config.trials)
        .into_par_iter()
        .fold(
            || Tally::empty(config.n_nodes),
            |acc, i| {
                let (isolated, covering) = run_trial(config, i as u64);
                acc.record(isolated, covering)
            },
        )
        .reduce(|| Tally::empty(config.n_nodes), Tally::merge);
    Ok(summarize(config, &tally))
}

/// Same as [`simulate`] on the calling thread only.
pub fn simulate_sequential<T: Real>(config: &TrialConfig<T>) -> Result<TrialStats<T>> {
    config.validate()?;
    let tally = (0..config.trials).fold(Tally::empty(config.n_nodes), |acc, i| {
        let (isolated, covering) = run_trial(config, i as u64);
        acc.record(isolated, covering)
    });
    Ok(summarize(config, &tally))
}

/// Node positions drawn for trial `index`, followed by the probe point.
pub fn trial_layout<T: Real>(config: &TrialConfig<T>, index: u64) -> (Vec<(T, T)>, (T, T)) {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, index));
    let side = config.field.side_length;
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.gen();
        T::from_f64(u).unwrap_or_else(T::zero) * side
    };
    let nodes = (0..config.n_nodes)
        .map(|_| {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            (x, y)
        })
        .collect();
    let probe = (draw(&mut rng), draw(&mut rng));
    (nodes, probe)
}

fn run_trial<T: Real>(config: &TrialConfig<T>, index: u64) -> (usize, usize) {
    let (nodes, probe) = trial_layout(config, index);
    let isolated = isolated_count(&nodes, &config.field, config.topology);
    let covering = covering_count(&nodes, probe, &config.field, config.topology);
    (isolated, covering)
}

#[inline]
fn axis_delta<T: Real>(a: T, b: T, side: T, topology: Topology) -> T {
    let d = (a - b).abs();
    match topology {
        Topology::Torus => d.min(side - d),
        Topology::Bounded => d,
    }
}

#[inline]
fn within<T: Real>(p: (T, T), q: (T, T), field: &FieldSpec<T>, topology: Topology) -> bool {
    let dx = axis_delta(p.0, q.0, field.side_length, topology);
    let dy = axis_delta(p.1, q.1, field.side_length, topology);
    dx * dx + dy * dy <= field.range * field.range
}

/// Nodes within range `R` of `probe`.
pub fn covering_count<T: Real>(nodes: &[(T, T)], probe: (T, T), field: &FieldSpec<T>, topology: Topology) -> usize {
    nodes.iter().filter(|&&n| within(n, probe, field, topology)).count()
}

/// Nodes with no other node within distance `R`.
///
/// Uses a uniform bucket grid with cells at least `R` wide when the field
/// holds three or more cells per axis; otherwise compares all pairs.
pub fn isolated_count<T: Real>(nodes: &[(T, T)], field: &FieldSpec<T>, topology: Topology) -> usize {
    // shrink slightly so rounding in cell assignment never leaves a cell narrower than R
    let cells = (field.side_length / field.range * T::from_f64(1.0 - 1e-9).unwrap_or_else(T::one))
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(1024);
    if cells < 3 {
        isolated_count_pairwise(nodes, field, topology)
    } else {
        isolated_count_grid(nodes, field, topology, cells)
    }
}

/// All-pairs reference for [`isolated_count`].
pub fn isolated_count_pairwise<T: Real>(nodes: &[(T, T)], field: &FieldSpec<T>, topology: Topology) -> usize {
    (0..nodes.len())
        .filter(|&i| {
            !nodes
                .iter()
                .enumerate()
                .any(|(j, &q)| j != i && within(nodes[i], q, field, topology))
        })
        .count()
}

fn isolated_count_grid<T: Real>(nodes: &[(T, T)], field: &FieldSpec<T>, topology: Topology, cells: usize) -> usize {
    let scale = count::<T>(cells) / field.side_length;
    let cell_of = |v: T| (v * scale).floor().to_usize().unwrap_or(0).min(cells - 1);

    // counting sort of node indices by cell
    let keys: Vec<usize> = nodes.iter().map(|&(x, y)| cell_of(y) * cells + cell_of(x)).collect();
    let mut start = vec![0usize; cells * cells + 1];
    for &k in &keys {
        start[k + 1] += 1;
    }
    for i in 0..cells * cells {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut order = vec![0usize; nodes.len()];
    for (i, &k) in keys.iter().enumerate() {
        order[fill[k]] = i;
        fill[k] += 1;
    }

    let neighbours = |c: usize| -> [Option<usize>; 3] {
        match topology {
            Topology::Torus => [Some((c + cells - 1) % cells), Some(c), Some((c + 1) % cells)],
            Topology::Bounded => [c.checked_sub(1), Some(c), (c + 1 < cells).then_some(c + 1)],
        }
    };

    (0..nodes.len())
        .filter(|&i| {
            let (cx, cy) = (keys[i] % cells, keys[i] / cells);
            !neighbours(cy).into_iter().flatten().any(|ny| {
                neighbours(cx).into_iter().flatten().any(|nx| {
                    let cell = ny * cells + nx;
                    order[start[cell]..start[cell + 1]]
                        .iter()
                        .any(|&j| j != i && within(nodes[i], nodes[j], field, topology))
                })
            })
        })
        .count()
}

fn summarize<T: Real>(config: &TrialConfig<T>, tally: &Tally) -> TrialStats<T> {
    let n = config.trials as f64;
    let proportion_stderr = |p: f64| (p * (1.0 - p) / n).sqrt();

    let p = tally.no_isolated as f64 / n;
    let mean = tally.isolated_sum as f64 / n;
    let mean_stderr = if config.trials > 1 {
        let sum = tally.isolated_sum as f64;
        let var = ((tally.isolated_sq_sum as f64) - sum * sum / n).max(0.0) / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let histogram: Vec<f64> = tally.histogram.iter().map(|&c| c as f64 / n).collect();

    let to_t = |v: f64| T::from_f64(v).unwrap_or_else(T::nan);
    TrialStats {
        n_nodes: config.n_nodes,
        trials: config.trials,
        p_no_isolated: to_t(p),
        p_no_isolated_stderr: to_t(proportion_stderr(p)),
        mean_isolated_count: to_t(mean),
        mean_isolated_stderr: to_t(mean_stderr),
        coverage_histogram_stderr: histogram.iter().map(|&q| to_t(proportion_stderr(q))).collect(),
        coverage_histogram: histogram.into_iter().map(to_t).collect(),
        stderr_reliable: config.trials >= MIN_RELIABLE_TRIALS,
    }
}

/// Simulation against the analytic formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<T> {
    /// `(1 - e^-lambda)^N`.
    pub formula_p: T,
    /// `|p_no_isolated - formula_p|`.
    pub isolation_gap: T,
    pub isolation_stderr: T,
    /// Gap in units of the standard error; `None` when the standard error is 0.
    pub isolation_gap_sigmas: Option<T>,
    /// `N e^-lambda`.
    pub predicted_mean_isolated: T,
    pub mean_isolated_gap: T,
    /// Histogram against the `N - 1` trial binomial with `P_R = lambda / N`.
    pub tv_binomial: T,
    /// Histogram against Poisson(lambda).
    pub tv_poisson: T,
    /// A single node is always isolated, so the formula cannot match at `N = 1`.
    pub degenerate: bool,
    pub stderr_reliable: bool,
}

pub fn compare_to_formula<T: Real>(stats: &TrialStats<T>, lambda: T, n_nodes: usize) -> Result<Comparison<T>> {
    let formula_p = isolation_probability(lambda, n_nodes)?;
    let isolation_gap = (stats.p_no_isolated - formula_p).abs();
    let isolation_gap_sigmas =
        (stats.p_no_isolated_stderr > T::zero()).then(|| isolation_gap / stats.p_no_isolated_stderr);
    let predicted_mean_isolated = count::<T>(n_nodes) * (-lambda).exp();
    let binomial = binomial_pmf(n_nodes - 1, lambda / count(n_nodes));
    let poisson = coverage_poisson_default(lambda)?;
    Ok(Comparison {
        formula_p,
        isolation_gap,
        isolation_stderr: stats.p_no_isolated_stderr,
        isolation_gap_sigmas,
        predicted_mean_isolated,
        mean_isolated_gap: (stats.mean_isolated_count - predicted_mean_isolated).abs(),
        tv_binomial: total_variation(&stats.coverage_histogram, &binomial),
        tv_poisson: total_variation(&stats.coverage_histogram, &poisson.mass),
        degenerate: n_nodes == 1,
        stderr_reliable: stats.stderr_reliable,
    })
}
