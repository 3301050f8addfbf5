//! Test statistics used by the dynamic analyses.
//!
//! Small samples are not an error: results computed from too little data are
//! returned with `low_confidence` set. Errors are reserved for inputs on
//! which the statistic is undefined.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;

use crate::error::StatsError;

/// Samples smaller than this (per group, or per expected cell) make a result
/// low-confidence.
pub const MIN_CELL: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub low_confidence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContingencyResult {
    pub chi2: f64,
    pub df: f64,
    pub p_value: f64,
    pub cramers_v: f64,
    pub low_confidence: bool,
}

/// Average 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Upper tail of the chi-squared distribution.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let d = ChiSquared::new(df).expect("positive degrees of freedom");
    d.sf(x).clamp(0.0, 1.0)
}

/// Spearman's rank correlation of paired observations, with a two-sided
/// p-value from Student's t on n − 2 degrees of freedom.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<TestResult, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::DegenerateInput(format!(
            "{} vs {} observations",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(StatsError::InsufficientData(format!("{n} pairs, need 3")));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateInput("constant vector".into()));
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if (1.0 - rho.abs()) < 1e-15 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
        (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
    };
    Ok(TestResult {
        statistic: rho,
        p_value: p,
        low_confidence: (n as f64) < MIN_CELL,
    })
}

/// Pearson's goodness-of-fit statistic of `observed` counts against
/// `expected_freqs` (probabilities summing to 1) scaled to the observed total.
/// Categories with zero expectation are left out of the sum.
pub fn chi_squared_gof(observed: &[f64], expected_freqs: &[f64], df: f64) -> Result<TestResult, StatsError> {
    if observed.len() != expected_freqs.len() {
        return Err(StatsError::DegenerateInput("observed and expected differ in length".into()));
    }
    if df.is_nan() || df <= 0.0 {
        return Err(StatsError::DegenerateInput(format!("df = {df}")));
    }
    let total: f64 = observed.iter().sum();
    if total <= 0.0 {
        return Err(StatsError::InsufficientData("no observations".into()));
    }
    let psum: f64 = expected_freqs.iter().sum();
    if (psum - 1.0).abs() > 1e-6 || expected_freqs.iter().any(|p| *p < 0.0) {
        return Err(StatsError::DegenerateInput(format!("expected frequencies sum to {psum}")));
    }
    let mut chi2 = 0.0;
    let mut low = false;
    for (o, p) in observed.iter().zip(expected_freqs) {
        let e = p * total;
        if e > 0.0 {
            chi2 += (o - e) * (o - e) / e;
            low |= e < MIN_CELL;
        }
    }
    Ok(TestResult {
        statistic: chi2,
        p_value: chi2_sf(chi2, df),
        low_confidence: low,
    })
}

/// Pearson's chi-squared test of independence on an r×c table of counts.
/// All-zero rows and columns are dropped first.
pub fn chi_squared_independence(table: &[Vec<f64>]) -> Result<ContingencyResult, StatsError> {
    let rows: Vec<&Vec<f64>> = table.iter().filter(|r| r.iter().sum::<f64>() > 0.0).collect();
    let width = table.iter().map(Vec::len).max().unwrap_or(0);
    let cell = |r: &Vec<f64>, j: usize| r.get(j).copied().unwrap_or(0.0);
    let cols: Vec<usize> = (0..width)
        .filter(|&j| rows.iter().map(|r| cell(r, j)).sum::<f64>() > 0.0)
        .collect();
    let (r, c) = (rows.len(), cols.len());
    if r.min(c) < 2 {
        return Err(StatsError::DegenerateInput(format!("{r}x{c} table after dropping empty margins")));
    }
    let row_sums: Vec<f64> = rows.iter().map(|row| cols.iter().map(|&j| cell(row, j)).sum()).collect();
    let col_sums: Vec<f64> = cols.iter().map(|&j| rows.iter().map(|row| cell(row, j)).sum()).collect();
    let n: f64 = row_sums.iter().sum();
    let mut chi2 = 0.0;
    let mut low = false;
    for (i, row) in rows.iter().enumerate() {
        for (jj, &j) in cols.iter().enumerate() {
            let e = row_sums[i] * col_sums[jj] / n;
            let o = cell(row, j);
            chi2 += (o - e) * (o - e) / e;
            low |= e < MIN_CELL;
        }
    }
    let df = ((r - 1) * (c - 1)) as f64;
    let k = r.min(c) as f64;
    Ok(ContingencyResult {
        chi2,
        df,
        p_value: chi2_sf(chi2, df),
        cramers_v: ((chi2 / n) / (k - 1.0)).sqrt().clamp(0.0, 1.0),
        low_confidence: low,
    })
}

/// Cramér's V of a contingency table.
pub fn cramers_v(table: &[Vec<f64>]) -> Result<f64, StatsError> {
    chi_squared_independence(table).map(|r| r.cramers_v)
}

/// Two-sided Mann–Whitney U test: pooled average ranks, normal
/// approximation with tie-corrected variance and continuity correction.
/// The reported U is the smaller of U1 and U2.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64]) -> Result<TestResult, StatsError> {
    let (n1, n2) = (xs.len(), ys.len());
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::InsufficientData("empty sample".into()));
    }
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let ranks = average_ranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let (f1, f2) = (n1 as f64, n2 as f64);
    let u1 = r1 - f1 * (f1 + 1.0) / 2.0;
    let u = u1.min(f1 * f2 - u1);

    let n = f1 + f2;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    for run in sorted.chunk_by(|a, b| a == b) {
        let t = run.len() as f64;
        ties += t * t * t - t;
    }
    let var = if n > 1.0 {
        f1 * f2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)))
    } else {
        0.0
    };
    let p = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - f1 * f2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(TestResult {
        statistic: u,
        p_value: p,
        low_confidence: f1 < MIN_CELL || f2 < MIN_CELL,
    })
}
