use std::fs;
use std::path::Path;

use fracpole_core::reference::{
    PUBLISHED_KAPPA, PUBLISHED_K_ME, PUBLISHED_LAMBDA, PUBLISHED_ME_A, PUBLISHED_MR_A,
    REFERENCE_LAGS,
};
use fracpole_core::trigpoly::grid_theta;
use fracpole_core::{
    finite_window_smoother_from_density, fit_me, geometric_mean, harmonic_mean, is_posdef,
    moments_of_density, optimal_smoother, prediction_variance, residual, simulate_ar,
    simulate_spectral, simulate_true_example, solve_mr, AutocovSeq, Complex64, FilterCoeffs,
    GridDensity, MeSpectrum, MrOptions, MrSpectrum,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::CliError;
use crate::output::{num, Report, Table};

pub const DOC_REVISION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub n_grid: usize,
    pub tol: f64,
}

impl Settings {
    fn mr_options(&self) -> MrOptions {
        MrOptions {
            tol: self.tol,
            n_grid: self.n_grid,
            ..MrOptions::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDoc {
    pub n_grid: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub kind: String,
    pub n: usize,
    pub params: serde_json::Value,
    pub grid: GridDoc,
    pub moments_in: Vec<Complex64>,
    pub residual_inf: f64,
    pub spec_revision: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeParams {
    #[serde(flatten)]
    spectrum: MeSpectrum,
    k: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SolverInfo {
    n_grid: usize,
    iterations: usize,
    refinements: usize,
    residual: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MrParams {
    #[serde(flatten)]
    spectrum: MrSpectrum,
    kappa: f64,
    solver: SolverInfo,
}

fn reflection_pairs(g: &[Complex64]) -> Vec<[f64; 2]> {
    g.iter().map(|c| [c.re, c.im]).collect()
}

fn spectrum_table(grid: &GridDoc) -> Table {
    let mut t = Table::new(&["theta", "value"]);
    for (i, v) in grid.values.iter().enumerate() {
        t.push(vec![num(grid_theta(grid.n_grid, false, i)), num(*v)]);
    }
    t
}

fn spectrum_report(doc: &SpectrumDoc) -> Result<Report, CliError> {
    Report::new(doc, spectrum_table(&doc.grid))
}

pub fn check(r: &AutocovSeq) -> Result<(Report, Option<CliError>), CliError> {
    let rep = is_posdef(r);
    let mut table = Table::new(&["lag", "re", "im"]);
    for (k, g) in rep.reflection.iter().enumerate() {
        table.push(vec![(k + 1).to_string(), num(g.re), num(g.im)]);
    }
    let doc = json!({
        "posdef": rep.posdef,
        "n": r.n(),
        "reflection": reflection_pairs(&rep.reflection),
    });
    let failure = (!rep.posdef).then(|| CliError::NotPosDef {
        message: format!(
            "autocorrelation sequence is not positive definite (failed at lag {})",
            rep.reflection.len()
        ),
        reflection: reflection_pairs(&rep.reflection),
    });
    Ok((Report::new(&doc, table)?, failure))
}

fn me_doc(r: &AutocovSeq, me: MeSpectrum, n_grid: usize) -> Result<SpectrumDoc, CliError> {
    let grid = me.to_grid(n_grid)?;
    let residual = r
        .to_moment_vector()
        .sub(&moments_of_density(&grid, r.n())?)
        .norm_inf();
    let params = MeParams {
        k: me.k(),
        spectrum: me,
    };
    Ok(SpectrumDoc {
        kind: "me".into(),
        n: r.n(),
        params: serde_json::to_value(&params)?,
        grid: GridDoc {
            n_grid,
            values: grid.values().to_vec(),
        },
        moments_in: r.as_slice().to_vec(),
        residual_inf: residual,
        spec_revision: DOC_REVISION.into(),
    })
}

fn mr_doc(r: &AutocovSeq, params: MrParams, n_grid: usize) -> Result<SpectrumDoc, CliError> {
    let grid = params.spectrum.to_grid(n_grid)?;
    Ok(SpectrumDoc {
        kind: "mr".into(),
        n: r.n(),
        residual_inf: params.solver.residual,
        params: serde_json::to_value(&params)?,
        grid: GridDoc {
            n_grid,
            values: grid.values().to_vec(),
        },
        moments_in: r.as_slice().to_vec(),
        spec_revision: DOC_REVISION.into(),
    })
}

pub fn me(r: &AutocovSeq, s: Settings) -> Result<Report, CliError> {
    spectrum_report(&me_doc(r, fit_me(r)?, s.n_grid)?)
}

fn solve(r: &AutocovSeq, s: Settings) -> Result<MrParams, CliError> {
    let sol = solve_mr(r, &s.mr_options())?;
    let d = &sol.diagnostics;
    Ok(MrParams {
        kappa: sol.spectrum.kappa(),
        solver: SolverInfo {
            n_grid: d.n_grid,
            iterations: d.iterations,
            refinements: d.refinements,
            residual: d.final_residual(),
        },
        spectrum: sol.spectrum,
    })
}

pub fn mr(r: &AutocovSeq, s: Settings) -> Result<Report, CliError> {
    spectrum_report(&mr_doc(r, solve(r, s)?, s.n_grid)?)
}

/// Re-evaluates a stored spectrum document, on its own grid unless
/// `n_grid` is given.
pub fn eval(path: &Path, n_grid: Option<usize>) -> Result<Report, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let doc: SpectrumDoc = serde_json::from_str(&text)?;
    let n_grid = n_grid.unwrap_or(doc.grid.n_grid);
    let r = AutocovSeq::new(doc.moments_in.clone())?;
    let out = match doc.kind.as_str() {
        "me" => {
            let p: MeParams = serde_json::from_value(doc.params)?;
            me_doc(&r, p.spectrum, n_grid)?
        }
        "mr" => {
            let mut p: MrParams = serde_json::from_value(doc.params)?;
            p.solver.residual =
                residual(&p.spectrum.lambda, &r.to_moment_vector(), p.solver.n_grid)?.norm_inf();
            mr_doc(&r, p, n_grid)?
        }
        other => {
            return Err(CliError::Malformed(format!(
                "unknown spectrum kind {other:?}"
            )))
        }
    };
    spectrum_report(&out)
}

#[derive(Serialize)]
struct Means {
    harmonic: f64,
    geometric: f64,
}

fn means(g: &GridDensity) -> Means {
    Means {
        harmonic: harmonic_mean(g),
        geometric: geometric_mean(g),
    }
}

fn filter_rows(table: &mut Table, name: &str, f: &FilterCoeffs) {
    for (k, c) in &f.coeffs {
        table.push(vec![name.into(), k.to_string(), num(c.re), num(c.im)]);
    }
}

pub fn filters(
    r: &AutocovSeq,
    s: Settings,
    max_lag: usize,
    window: Option<usize>,
) -> Result<Report, CliError> {
    let me = fit_me(r)?;
    let mr = solve_mr(r, &s.mr_options())?.spectrum;
    let me_grid = me.to_grid(s.n_grid)?;
    let mr_grid = mr.to_grid(s.n_grid)?;
    let predictor = me.predictor();
    let smoother = optimal_smoother(&mr_grid, max_lag)?;
    let window_smoother = match window {
        Some(m) => Some(finite_window_smoother_from_density(&mr_grid, m)?),
        None => None,
    };

    let mut table = Table::new(&["filter", "lag", "re", "im"]);
    filter_rows(&mut table, "predictor", &predictor);
    filter_rows(&mut table, "smoother", &smoother);
    if let Some(w) = &window_smoother {
        filter_rows(&mut table, "window_smoother", w);
    }
    let doc = json!({
        "n": r.n(),
        "n_grid": s.n_grid,
        "predictor": predictor,
        "smoother": smoother,
        "window_smoother": window_smoother,
        "prediction_variance": prediction_variance(r)?,
        "means": { "me": means(&me_grid), "mr": means(&mr_grid) },
    });
    Report::new(&doc, table)
}

pub fn compare(r: &AutocovSeq, s: Settings, max_lag: usize) -> Result<Report, CliError> {
    let me = fit_me(r)?;
    let mr = solve(r, s)?;
    let me_grid = me.to_grid(s.n_grid)?;
    let mr_grid = mr.spectrum.to_grid(s.n_grid)?;
    let (me_m, mr_m) = (means(&me_grid), means(&mr_grid));
    let me_smoother = optimal_smoother(&me_grid, max_lag)?;
    let mr_smoother = optimal_smoother(&mr_grid, max_lag)?;

    let mut table = Table::new(&["quantity", "me", "mr"]);
    let rows = [
        ("harmonic_mean", me_m.harmonic, mr_m.harmonic),
        ("geometric_mean", me_m.geometric, mr_m.geometric),
        ("k2", me.k2, mr.spectrum.k2),
    ];
    for (name, a, b) in rows {
        table.push(vec![name.into(), num(a), num(b)]);
    }
    let doc = json!({
        "n": r.n(),
        "n_grid": s.n_grid,
        "moments_in": r.as_slice(),
        "me": {
            "k2": me.k2,
            "a": me.a,
            "harmonic_mean": me_m.harmonic,
            "geometric_mean": me_m.geometric,
            "smoother_variance": me_smoother.variance,
        },
        "mr": {
            "lambda": mr.spectrum.lambda.coeffs(),
            "k2": mr.spectrum.k2,
            "kappa": mr.kappa,
            "a_hat": mr.spectrum.factor.monic,
            "harmonic_mean": mr_m.harmonic,
            "geometric_mean": mr_m.geometric,
            "smoother_variance": mr_smoother.variance,
        },
        "prediction_variance": prediction_variance(r)?,
        "orderings": {
            "harmonic_mr_ge_me": mr_m.harmonic >= me_m.harmonic,
            "geometric_me_ge_mr": me_m.geometric >= mr_m.geometric,
        },
    });
    Report::new(&doc, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Source {
    True,
    Me,
    Mr,
}

pub fn simulate(
    source: Source,
    r: Option<&AutocovSeq>,
    s: Settings,
    length: usize,
    seed: u64,
) -> Result<Report, CliError> {
    let need = || r.ok_or_else(|| CliError::Malformed("this source needs moments".into()));
    let real = match source {
        Source::True => simulate_true_example(length, seed),
        Source::Me => simulate_ar(&fit_me(need()?)?, length, seed)?,
        Source::Mr => {
            let mr = solve_mr(need()?, &s.mr_options())?.spectrum;
            let n_grid = s.n_grid.max((4 * length).next_power_of_two());
            simulate_spectral(&mr.to_grid(n_grid)?, length, seed)?
        }
    };
    let mut table = Table::new(&["k", "value"]);
    for (k, v) in real.samples.iter().enumerate() {
        table.push(vec![k.to_string(), num(*v)]);
    }
    Report::new(&real, table)
}

#[derive(Serialize)]
struct DemoRow {
    quantity: String,
    published: Option<f64>,
    computed: f64,
    deviation: Option<f64>,
}

impl DemoRow {
    fn new(quantity: String, published: Option<f64>, computed: f64) -> Self {
        Self {
            quantity,
            published,
            computed,
            deviation: published.map(|p| (computed - p).abs()),
        }
    }
}

/// The worked example end to end, against its published values.
pub fn demo(s: Settings) -> Result<Report, CliError> {
    let r = AutocovSeq::from_real(&REFERENCE_LAGS)?;
    let me = fit_me(&r)?;
    let mr = solve(&r, s)?;
    let me_grid = me.to_grid(s.n_grid)?;
    let mr_grid = mr.spectrum.to_grid(s.n_grid)?;

    let mut rows = Vec::new();
    for (k, (a, p)) in me.a.iter().zip(PUBLISHED_ME_A).enumerate() {
        rows.push(DemoRow::new(format!("me.a{}", k + 1), Some(p), a.re));
    }
    rows.push(DemoRow::new("me.k".into(), Some(PUBLISHED_K_ME), me.k()));
    rows.push(DemoRow::new("me.k2".into(), None, me.k2));
    for (k, (l, p)) in mr
        .spectrum
        .lambda
        .coeffs()
        .iter()
        .zip(PUBLISHED_LAMBDA)
        .enumerate()
    {
        rows.push(DemoRow::new(format!("mr.lambda{k}"), Some(p), l.re));
    }
    for (k, (a, p)) in mr
        .spectrum
        .factor
        .monic
        .iter()
        .zip(PUBLISHED_MR_A)
        .enumerate()
    {
        rows.push(DemoRow::new(format!("mr.a_hat{}", k + 1), Some(p), a.re));
    }
    rows.push(DemoRow::new(
        "mr.kappa".into(),
        Some(PUBLISHED_KAPPA),
        mr.kappa,
    ));
    rows.push(DemoRow::new("mr.kappa2".into(), None, mr.spectrum.kappa2));
    rows.push(DemoRow::new("mr.k2".into(), None, mr.spectrum.k2));
    let extra = [
        ("me.harmonic_mean", harmonic_mean(&me_grid)),
        ("me.geometric_mean", geometric_mean(&me_grid)),
        ("mr.harmonic_mean", harmonic_mean(&mr_grid)),
        ("mr.geometric_mean", geometric_mean(&mr_grid)),
        ("mr.residual_inf", mr.solver.residual),
    ];
    for (name, v) in extra {
        rows.push(DemoRow::new(name.into(), None, v));
    }

    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let mut table = Table::new(&["quantity", "published", "computed", "deviation"]);
    for row in &rows {
        table.push(vec![
            row.quantity.clone(),
            opt(row.published),
            num(row.computed),
            opt(row.deviation),
        ]);
    }
    let doc = json!({
        "moments_in": REFERENCE_LAGS,
        "n_grid": s.n_grid,
        "tol": s.tol,
        "rows": rows,
    });
    Report::new(&doc, table)
}
