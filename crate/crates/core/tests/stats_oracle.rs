//! Statistics kernel against the arbitrary-precision reference values in
//! `tests/data/stats_oracle.json` (see `tests/oracle/stats_oracle.py`).

use serde::Deserialize;
use survey_core::analysis::stats::{chi_squared_gof, chi_squared_independence, mann_whitney_u, spearman_rho};

#[derive(Deserialize)]
struct Mw {
    u: f64,
    p: f64,
}

#[derive(Deserialize)]
struct Sp {
    n: usize,
    rho: f64,
    p: f64,
}

#[derive(Deserialize)]
struct Gof {
    df: f64,
    chi2: f64,
    p: f64,
}

#[derive(Deserialize)]
struct Cv {
    chi2: f64,
    p: f64,
    v: f64,
}

#[derive(Deserialize)]
struct Dataset {
    id: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
    observed: Vec<f64>,
    probs: Vec<f64>,
    table: Vec<Vec<f64>>,
    mann_whitney: Mw,
    spearman: Option<Sp>,
    chi2_gof: Gof,
    cramers_v: Cv,
}

const STAT_TOL: f64 = 1e-9;
const P_TOL: f64 = 1e-6;

fn datasets() -> Vec<Dataset> {
    serde_json::from_str(include_str!("data/stats_oracle.json")).unwrap()
}

fn close(got: f64, want: f64, tol: f64, what: &str, id: usize) {
    assert!(
        (got - want).abs() <= tol,
        "dataset {id} {what}: got {got}, oracle {want}"
    );
}

#[test]
fn ten_datasets() {
    assert_eq!(datasets().len(), 10);
}

#[test]
fn mann_whitney_matches_oracle() {
    for d in datasets() {
        let r = mann_whitney_u(&d.xs, &d.ys).unwrap();
        close(r.statistic, d.mann_whitney.u, STAT_TOL, "U", d.id);
        close(r.p_value, d.mann_whitney.p, P_TOL, "U p", d.id);
        let swapped = mann_whitney_u(&d.ys, &d.xs).unwrap();
        assert_eq!(swapped.statistic, r.statistic);
        assert_eq!(swapped.p_value, r.p_value);
    }
}

#[test]
fn spearman_matches_oracle() {
    for d in datasets() {
        let n = d.xs.len().min(d.ys.len());
        let got = spearman_rho(&d.xs[..n], &d.ys[..n]);
        match d.spearman {
            Some(s) => {
                assert_eq!(s.n, n);
                let r = got.unwrap();
                close(r.statistic, s.rho, STAT_TOL, "rho", d.id);
                close(r.p_value, s.p, P_TOL, "rho p", d.id);
            }
            None => assert!(got.is_err(), "dataset {} has a constant vector", d.id),
        }
    }
}

#[test]
fn chi_squared_gof_matches_oracle() {
    for d in datasets() {
        let r = chi_squared_gof(&d.observed, &d.probs, d.chi2_gof.df).unwrap();
        close(r.statistic, d.chi2_gof.chi2, STAT_TOL, "chi2", d.id);
        close(r.p_value, d.chi2_gof.p, P_TOL, "chi2 p", d.id);
    }
}

#[test]
fn cramers_v_matches_oracle() {
    for d in datasets() {
        let r = chi_squared_independence(&d.table).unwrap();
        close(r.chi2, d.cramers_v.chi2, STAT_TOL, "independence chi2", d.id);
        close(r.p_value, d.cramers_v.p, P_TOL, "independence p", d.id);
        close(r.cramers_v, d.cramers_v.v, STAT_TOL, "V", d.id);
    }
}
