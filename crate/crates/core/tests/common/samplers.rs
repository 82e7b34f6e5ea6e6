//! Distributional checks of the samplers against closed-form moments,
//! rejection sampling and grid quadrature. Each check returns a short
//! summary on success and the first mismatch on failure.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use symest::dynamics::g;
use symest::polish_mcmc::{polish_sweep, sample_theta, theta_conditional_params, PolishConfig, PolishState};
use symest::samplers::{
    sample_truncated_exponential, sample_truncated_normal, update_site, Neighbors, RngStream,
};
use symest::strength_mcmc::{gibbs_sweep, init_chain, GibbsConfig};
use symest::symbolic::{cells_from_bits, Interval, RefinedCells};

pub type Check = Result<String, String>;

pub const DRAWS: usize = 100_000;
pub const SLICE_TV: f64 = 0.03;
pub const JOINT_TV: f64 = 0.05;

struct Moments {
    mean: f64,
    var: f64,
    m4: f64,
}

fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Moments { mean, var, m4 }
}

/// Sample mean and variance within 3 standard errors of the targets.
fn check_moments(xs: &[f64], mean: f64, var: f64, label: &str) -> Result<(), String> {
    let m = moments(xs);
    let n = xs.len() as f64;
    let se_mean = (var / n).sqrt();
    let se_var = ((m.m4 - m.var * m.var) / n).sqrt();
    if (m.mean - mean).abs() > 3.0 * se_mean {
        return Err(format!("{label}: mean {} vs {mean} (se {se_mean:e})", m.mean));
    }
    if (m.var - var).abs() > 3.0 * se_var {
        return Err(format!("{label}: variance {} vs {var} (se {se_var:e})", m.var));
    }
    Ok(())
}

pub fn truncated_exponential() -> Check {
    let cases = [(1, 1.0, 0.0), (2, 5e5, 3e-6), (3, 0.25, 10.0)];
    for (seed, lambda, lower) in cases {
        let mut rng = RngStream::new(seed);
        let mut xs = Vec::with_capacity(DRAWS);
        for _ in 0..DRAWS {
            xs.push(sample_truncated_exponential(&mut rng, lambda, lower).map_err(|e| e.to_string())?);
        }
        if let Some(x) = xs.iter().find(|&&x| x <= lower) {
            return Err(format!("exponential draw {x} not above {lower}"));
        }
        check_moments(&xs, lower + 1.0 / lambda, 1.0 / (lambda * lambda), "exponential")?;
    }
    Ok(format!("{} exponential cases", cases.len()))
}

/// Mean and variance of N(μ, s²) restricted to (lo, hi).
fn truncated_normal_moments(mu: f64, s: f64, lo: f64, hi: f64) -> (f64, f64) {
    let std = Normal::standard();
    let (a, b) = ((lo - mu) / s, (hi - mu) / s);
    // Mass from the tail nearer the interval to keep precision far out.
    let z = if a > 0.0 {
        std.sf(a) - std.sf(b)
    } else {
        std.cdf(b) - std.cdf(a)
    };
    let pa = if a.is_finite() { std.pdf(a) } else { 0.0 };
    let pb = if b.is_finite() { std.pdf(b) } else { 0.0 };
    let ta = if a.is_finite() { a * pa } else { 0.0 };
    let tb = if b.is_finite() { b * pb } else { 0.0 };
    let r = (pa - pb) / z;
    (mu + s * r, s * s * (1.0 + (ta - tb) / z - r * r))
}

pub fn truncated_normal() -> Check {
    let cases = [
        (0.0, 1.0, -1.0, 1.5),
        (0.0, 1.0, -6.0, 6.0),
        (0.0, 1.0, 0.5, 4.0),
        (0.0, 1.0, 3.0, 10.0),
        (0.0, 1.0, 31.0, 39.0),
        (2.0, 0.5, -5.0, 1.0),
        (-1.71, 1e-9, -1.7110, -1.7095),
        (0.3, 2.0, f64::NEG_INFINITY, -1.0),
    ];
    for (k, &(mu, s, lo, hi)) in cases.iter().enumerate() {
        let mut rng = RngStream::with_stream(77, k as u64);
        let iv = Interval::open(lo, hi);
        let mut xs = Vec::with_capacity(DRAWS);
        for _ in 0..DRAWS {
            xs.push(sample_truncated_normal(&mut rng, mu, s * s, &iv).map_err(|e| e.to_string())?);
        }
        if let Some(x) = xs.iter().find(|&&x| !iv.contains(x)) {
            return Err(format!("normal case {k}: draw {x} outside ({lo}, {hi})"));
        }
        let (mean, var) = truncated_normal_moments(mu, s, lo, hi);
        check_moments(&xs, mean, var, &format!("normal case {k}"))?;
    }
    Ok(format!("{} truncated normal cases", cases.len()))
}

pub fn theta_update() -> Check {
    let mut orbit = vec![0.8];
    for i in 0..30 {
        let next = g(-1.71, orbit[i]) + 1e-9 * ((i % 3) as f64 - 1.0);
        orbit.push(next);
    }
    let sigma = 1e-8;
    let (mu, var) = theta_conditional_params(&orbit, sigma).map_err(|e| e.to_string())?;
    let truncation = Interval::open(-1.72, -1.70);
    let mut rng = RngStream::new(4);
    let mut xs = Vec::with_capacity(DRAWS);
    for _ in 0..DRAWS {
        xs.push(sample_theta(&mut rng, &orbit, sigma, &truncation).map_err(|e| e.to_string())?);
    }
    check_moments(&xs, mu, var, "theta update")?;
    Ok("theta conditional".into())
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    0.5 * p.iter().zip(q).map(|(a, b)| (a / sp - b / sq).abs()).sum::<f64>()
}

fn histogram(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for &x in xs {
        let k = (((x - lo) / (hi - lo)) * bins as f64) as usize;
        h[k.min(bins - 1)] += 1.0;
    }
    h
}

/// Unnormalized log density of one site given its neighbors.
fn site_log_density(theta: f64, lambda: f64, y: f64, nb: Neighbors) -> f64 {
    let mut h = 0.0;
    if let Some(prev) = nb.prev {
        h += (y - g(theta, prev)).powi(2);
    }
    if let Some(next) = nb.next {
        h += (next - g(theta, y)).powi(2);
    }
    -lambda * h
}

/// Rejection sampler: uniform proposals on the cell, accepted against the
/// density maximum found on a fine grid.
fn rejection_draws(
    rng: &mut RngStream,
    theta: f64,
    lambda: f64,
    nb: Neighbors,
    cell: &Interval,
    count: usize,
) -> Vec<f64> {
    let grid_max = (0..=20_000)
        .map(|k| cell.lower + (cell.upper - cell.lower) * k as f64 / 20_000.0)
        .map(|y| site_log_density(theta, lambda, y, nb))
        .fold(f64::NEG_INFINITY, f64::max);
    let log_max = grid_max + 1e-3;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let y = cell.lower + rng.open01() * (cell.upper - cell.lower);
        if rng.open01().ln() <= site_log_density(theta, lambda, y, nb) - log_max {
            out.push(y);
        }
    }
    out
}

pub fn slice_update() -> Check {
    let theta = -1.71;
    let sigma: f64 = 0.08;
    let lambda = 1.0 / (2.0 * sigma * sigma);
    let cases = [
        // Interior site, one symmetric piece.
        (Neighbors { prev: Some(0.8), next: Some(0.95) }, Interval::NEGATIVE),
        // Interior site whose next value forces two mirror pieces.
        (Neighbors { prev: Some(0.7), next: Some(0.1) }, Interval::X),
        // Initial site: no predecessor.
        (Neighbors { prev: None, next: Some(-0.2) }, Interval::X),
        (Neighbors { prev: None, next: Some(0.5) }, Interval::NON_NEGATIVE),
    ];
    let mut worst: f64 = 0.0;
    for (k, (nb, cell)) in cases.into_iter().enumerate() {
        let mut rng = RngStream::with_stream(101, k as u64);
        let mut y = cell.midpoint();
        let mut chain = Vec::with_capacity(2 * DRAWS);
        for _ in 0..1_000 {
            y = update_site(&mut rng, theta, lambda, y, nb, &cell);
        }
        for _ in 0..2 * DRAWS {
            y = update_site(&mut rng, theta, lambda, y, nb, &cell);
            if !cell.contains(y) {
                return Err(format!("slice case {k}: {y} left its cell"));
            }
            chain.push(y);
        }
        let oracle = rejection_draws(&mut rng, theta, lambda, nb, &cell, 2 * DRAWS);
        let tv = total_variation(
            &histogram(&chain, cell.lower, cell.upper, 50),
            &histogram(&oracle, cell.lower, cell.upper, 50),
        );
        if tv >= SLICE_TV {
            return Err(format!("slice case {k}: TV {tv:.4}"));
        }
        worst = worst.max(tv);
    }
    Ok(format!("slice TV {worst:.4}"))
}

/// Quadrature of a density on a `fine × fine` midpoint grid over the box,
/// summed into `coarse × coarse` bins.
fn binned_quadrature(
    fine: usize,
    coarse: usize,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    density: impl Fn(f64, f64) -> f64,
) -> Vec<f64> {
    let mut bins = vec![0.0; coarse * coarse];
    let per = fine / coarse;
    for i in 0..fine {
        let x = x0 + (x1 - x0) * (i as f64 + 0.5) / fine as f64;
        for j in 0..fine {
            let y = y0 + (y1 - y0) * (j as f64 + 0.5) / fine as f64;
            bins[(i / per) * coarse + j / per] += density(x, y);
        }
    }
    bins
}

fn joint_histogram(pairs: &[(f64, f64)], (x0, x1): (f64, f64), (y0, y1): (f64, f64), coarse: usize) -> Vec<f64> {
    let mut bins = vec![0.0; coarse * coarse];
    for &(x, y) in pairs {
        let i = (((x - x0) / (x1 - x0)) * coarse as f64) as usize;
        let j = (((y - y0) / (y1 - y0)) * coarse as f64) as usize;
        bins[i.min(coarse - 1) * coarse + j.min(coarse - 1)] += 1.0;
    }
    bins
}

pub fn two_site_gibbs() -> Check {
    let theta = -1.6;
    let sigma: f64 = 0.15;
    let lambda = 1.0 / (2.0 * sigma * sigma);
    // One observation: y₁ < 0. The chain keeps y₀ on [0, 1).
    let data = cells_from_bits(&[0]).map_err(|e| e.to_string())?;
    let config = GibbsConfig {
        sigma,
        ..GibbsConfig::default()
    };
    let mut state = init_chain(&data, RngStream::new(8));
    let mut pairs = Vec::with_capacity(2 * DRAWS);
    for sweep in 0..2 * DRAWS + 1_000 {
        gibbs_sweep(&mut state, theta, &config, &data);
        if sweep >= 1_000 {
            pairs.push((state.y[0], state.y[1]));
        }
    }
    let quad = binned_quadrature(200, 20, (0.0, 1.0), (-1.0, 0.0), |y0, y1| {
        (-lambda * (y1 - g(theta, y0)).powi(2)).exp()
    });
    let tv = total_variation(&joint_histogram(&pairs, (0.0, 1.0), (-1.0, 0.0), 20), &quad);
    if tv < JOINT_TV {
        Ok(format!("two-site gibbs TV {tv:.4}"))
    } else {
        Err(format!("two-site gibbs TV {tv:.4}"))
    }
}

pub fn two_site_polish() -> Check {
    let sigma: f64 = 0.05;
    let lambda = 1.0 / (2.0 * sigma * sigma);
    let truncation = Interval::open(-1.8, -1.6);
    let c0 = Interval::open(0.7, 0.9);
    let c1 = Interval::open(-0.3, 0.0);
    let cells = RefinedCells {
        epsilon: 0.1,
        cells: vec![c0, c1],
    };
    let config = PolishConfig {
        sigma,
        truncation,
        ..PolishConfig::default()
    };
    let mut state = PolishState {
        theta: -1.7,
        y: vec![0.8, -0.1],
        sweep: 0,
        rng: RngStream::new(31),
    };
    let mut pairs = Vec::with_capacity(2 * DRAWS);
    for sweep in 0..2 * DRAWS + 1_000 {
        polish_sweep(&mut state, &config, &cells).map_err(|e| e.to_string())?;
        if sweep >= 1_000 {
            pairs.push((state.theta, state.y[1]));
        }
    }
    // Marginal of (θ, y₁): integrate y₀ over its cell by the midpoint rule.
    let inner = 200;
    let quad = binned_quadrature(200, 20, (-1.8, -1.6), (-0.3, 0.0), |theta, y1| {
        (0..inner)
            .map(|k| {
                let y0 = c0.lower + c0.length() * (k as f64 + 0.5) / inner as f64;
                (-lambda * (y1 - g(theta, y0)).powi(2)).exp()
            })
            .sum()
    });
    let tv = total_variation(&joint_histogram(&pairs, (-1.8, -1.6), (-0.3, 0.0), 20), &quad);
    if tv < JOINT_TV {
        Ok(format!("two-site polish TV {tv:.4}"))
    } else {
        Err(format!("two-site polish TV {tv:.4}"))
    }
}
