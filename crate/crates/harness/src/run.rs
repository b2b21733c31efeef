//! Experiment runners.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use gausscq_bem2d::cache::fingerprint;
use gausscq_bem2d::{BemTransfer, HMinusHalfNorm, ScatteringProblem};
use gausscq_core::artifact::{decode_trace, decode_weights, encode_trace, encode_weights};
use gausscq_core::cq::{
    apply_cq, compute_weights_with, relative_l2_error, CqOptions, CqWeightSet, TimeSignal, Trace,
    REFERENCE_STAGES,
};
use gausscq_core::kernels::{eval_datum, ScalarKernel};
use gausscq_core::stability::{
    cancellation_check, characterize_theta0, characterize_theta_pi, is_degenerate_theta,
    m_theta_roots, stage_order_defect, CancellationReport, StageOrderDefect,
    Theta0Characterization, ThetaPiCharacterization, BETA_ASSERT_LIMIT,
};
use gausscq_core::tableau::{
    gauss_tableau, tableau, verify_assumption2, verify_eigenvector_nondegeneracy,
    Assumption2Report, ButcherTableau, Family, NondegeneracyReport,
};
use gausscq_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BemConvergence, ExperimentConfig, ScalarConvergence, StageRange};
use crate::report::{convergence_rows, write_atomic, ConvergenceReport, Index, IndexEntry};

/// Points of the `theta` grid on `[-pi, pi]`.
pub const THETA_GRID_POINTS: usize = 721;
/// Half-width of the windows around degenerate angles left out of the grid.
pub const DEGENERATE_WINDOW: f64 = 0.05;

fn family_tag(f: Family) -> &'static str {
    match f {
        Family::Gauss => "gauss",
        Family::RadauIIA => "radau",
    }
}

/// Shared caches for a batch of experiments.
#[derive(Debug, Default)]
pub struct RunContext {
    pub cq: CqOptions,
    weights_dir: Option<PathBuf>,
    matrix_dir: Option<PathBuf>,
    references: Mutex<HashMap<String, Arc<Trace>>>,
}

impl RunContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores weight sets and reference traces under `dir`.
    pub fn with_weights_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.weights_dir = Some(dir.into());
        self
    }

    /// Stores assembled boundary-element matrices under `dir`.
    pub fn with_matrix_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.matrix_dir = Some(dir.into());
        self
    }

    fn artifact_path(&self, stem: &str, key: &str, ext: &str) -> Option<PathBuf> {
        let h = fingerprint(key.as_bytes());
        self.weights_dir
            .as_ref()
            .map(|d| d.join(format!("{stem}-{h:016x}.{ext}")))
    }

    /// Weight set for a scalar kernel, read from or written to the cache.
    pub fn scalar_weights(
        &self,
        k: &ScalarKernel,
        t: &ButcherTableau,
        h: f64,
        steps: usize,
    ) -> Result<CqWeightSet> {
        let key = format!(
            "{k:?}|{:?}|{}|{}|{steps}|{:?}",
            t.family,
            t.m,
            h.to_bits(),
            self.cq
        );
        let stem = format!("w-{}{}-{}-N{steps}", family_tag(t.family), t.m, k.name());
        let path = self.artifact_path(&stem, &key, "gcqw");
        if let Some(ws) = path
            .as_deref()
            .and_then(|p| fs::read(p).ok())
            .and_then(|b| decode_weights(&b).ok())
        {
            if ws.h.to_bits() == h.to_bits()
                && ws.steps == steps
                && ws.m == t.m
                && ws.family == t.family
            {
                return Ok(ws);
            }
        }
        let ws = compute_weights_with(k, t, h, steps, &self.cq)?;
        if let Some(p) = path {
            write_atomic(&p, &encode_weights(&ws))?;
        }
        Ok(ws)
    }

    fn cached_trace<F>(&self, stem: &str, key: &str, compute: F) -> Result<Arc<Trace>>
    where
        F: FnOnce() -> Result<Trace>,
    {
        if let Some(tr) = self.references.lock().unwrap().get(key) {
            return Ok(tr.clone());
        }
        let path = self.artifact_path(stem, key, "gcqt");
        let disk = path
            .as_deref()
            .and_then(|p| fs::read(p).ok())
            .and_then(|b| decode_trace(&b).ok());
        let trace = match disk {
            Some(tr) => tr,
            None => {
                let tr = compute()?;
                if let Some(p) = &path {
                    write_atomic(p, &encode_trace(&tr))?;
                }
                tr
            }
        };
        let trace = Arc::new(trace);
        self.references
            .lock()
            .unwrap()
            .insert(key.to_string(), trace.clone());
        Ok(trace)
    }

    fn scalar_solve(
        &self,
        cfg: &ScalarConvergence,
        t: &ButcherTableau,
        steps: usize,
    ) -> Result<Trace> {
        let h = cfg.final_time / steps as f64;
        let ws = self.scalar_weights(&cfg.kernel, t, h, steps)?;
        let nodes: Vec<f64> = t.c.iter().copied().collect();
        let datum = cfg.datum;
        eval_datum(&datum, None, 0.0)?;
        let g = TimeSignal::sample_scalar(h, steps, &nodes, |x| {
            eval_datum(&datum, None, x).unwrap_or(f64::NAN)
        });
        apply_cq(&ws, &g)
    }

    /// 5-stage Radau IIA solution of the scalar problem at `n_ref` steps.
    pub fn scalar_reference(&self, cfg: &ScalarConvergence) -> Result<Arc<Trace>> {
        let key = format!(
            "scalar|{:?}|{:?}|{}|{}|{:?}",
            cfg.kernel,
            cfg.datum,
            cfg.final_time.to_bits(),
            cfg.n_ref,
            self.cq
        );
        let stem = format!(
            "ref-{}-{}-N{}",
            cfg.kernel.name(),
            cfg.datum.name(),
            cfg.n_ref
        );
        self.cached_trace(&stem, &key, || {
            let t = tableau(Family::RadauIIA, REFERENCE_STAGES)?;
            let reference = ScalarConvergence {
                family: Family::RadauIIA,
                m: REFERENCE_STAGES,
                ..cfg.clone()
            };
            self.scalar_solve(&reference, &t, cfg.n_ref)
        })
    }

    fn problem(cfg: &BemConvergence) -> ScatteringProblem {
        ScatteringProblem {
            geometry: cfg.geometry,
            operator: cfg.operator,
            datum: cfg.datum,
            final_time: cfg.final_time,
            n_panels: cfg.n_panels,
        }
    }

    /// Boundary-element transfer function for a configuration.
    pub fn bem_transfer(&self, cfg: &BemConvergence) -> Result<BemTransfer> {
        let transfer = Self::problem(cfg)
            .transfer()?
            .with_quadrature(cfg.quadrature)
            .with_cache_capacity(0);
        match &self.matrix_dir {
            Some(dir) => {
                let q = serde_json::to_string(&cfg.quadrature)
                    .map_err(|e| Error::Decode(e.to_string()))?;
                let label = format!(
                    "{}-q{:016x}",
                    cfg.geometry.name(),
                    fingerprint(q.as_bytes())
                );
                transfer.with_matrix_cache(dir, &label)
            }
            None => Ok(transfer),
        }
    }

    fn bem_reference_key(&self, cfg: &BemConvergence) -> String {
        format!(
            "bem|{:?}|{:?}|{:?}|{}|{}|{}|{:?}|{:?}",
            cfg.geometry,
            cfg.operator,
            cfg.datum,
            cfg.final_time.to_bits(),
            cfg.n_ref,
            cfg.n_panels,
            cfg.quadrature,
            self.cq
        )
    }

    /// 5-stage Radau IIA reference for a boundary problem, shared by all
    /// configurations that differ only in the method and step counts.
    pub fn bem_reference(
        &self,
        cfg: &BemConvergence,
        transfer: &BemTransfer,
    ) -> Result<Arc<Trace>> {
        let key = self.bem_reference_key(cfg);
        let stem = format!(
            "ref-{}-{}-n{}-N{}",
            cfg.geometry.name(),
            cfg.operator.name(),
            cfg.n_panels,
            cfg.n_ref
        );
        self.cached_trace(&stem, &key, || {
            let t = tableau(Family::RadauIIA, REFERENCE_STAGES)?;
            Self::problem(cfg).solve(transfer, &t, cfg.n_ref, &self.cq)
        })
    }
}

pub fn run_scalar_convergence(
    cfg: &ScalarConvergence,
    ctx: &RunContext,
) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let start = Instant::now();
    let t = tableau(cfg.family, cfg.m)?;
    let reference = ctx.scalar_reference(cfg)?;
    let errors = cfg
        .steps
        .iter()
        .map(|&n| relative_l2_error(&ctx.scalar_solve(cfg, &t, n)?, &reference))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        config: ExperimentConfig::ScalarConvergence(cfg.clone()),
        rows: convergence_rows(&cfg.steps, &errors)?,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_bem_convergence(cfg: &BemConvergence, ctx: &RunContext) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let start = Instant::now();
    let t = tableau(cfg.family, cfg.m)?;
    let transfer = ctx.bem_transfer(cfg)?;
    let reference = ctx.bem_reference(cfg, &transfer)?;
    let norm = HMinusHalfNorm::new(transfer.mesh())?;
    let problem = RunContext::problem(cfg);
    let errors = cfg
        .steps
        .iter()
        .map(|&n| norm.error_metric(&problem.solve(&transfer, &t, n, &ctx.cq)?, &reference))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        config: ExperimentConfig::BemConvergence(cfg.clone()),
        rows: convergence_rows(&cfg.steps, &errors)?,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Imaginary-axis roots of `R(z) = e^{i theta}` over the `theta` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaGridSummary {
    pub points: usize,
    pub skipped: usize,
    pub roots: usize,
    pub max_abs_re: f64,
    /// Smallest `beta - 1` over nonzero roots with `|y| <= BETA_ASSERT_LIMIT`.
    pub min_beta_excess: f64,
    pub max_beta: f64,
}

pub fn theta_grid_summary(m: usize) -> Result<ThetaGridSummary> {
    let pi = std::f64::consts::PI;
    let mut s = ThetaGridSummary {
        points: THETA_GRID_POINTS,
        skipped: 0,
        roots: 0,
        max_abs_re: 0.0,
        min_beta_excess: f64::INFINITY,
        max_beta: 0.0,
    };
    for k in 0..THETA_GRID_POINTS {
        let theta = -pi + 2.0 * pi * k as f64 / (THETA_GRID_POINTS - 1) as f64;
        if is_degenerate_theta(m, theta, DEGENERATE_WINDOW) {
            s.skipped += 1;
            continue;
        }
        let set = m_theta_roots(m, theta)?;
        s.roots += set.y.len();
        s.max_abs_re = s.max_abs_re.max(set.max_abs_re);
        for ((&y, &b), &e) in set.y.iter().zip(&set.betas).zip(&set.excess) {
            if y != 0.0 && y.abs() <= BETA_ASSERT_LIMIT {
                s.min_beta_excess = s.min_beta_excess.min(e);
                s.max_beta = s.max_beta.max(b);
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub m: usize,
    pub theta_grid: ThetaGridSummary,
    /// Absent for `m = 1`, which has no nonzero root pairs at `theta = 0`.
    pub theta0: Option<Theta0Characterization>,
    pub theta_pi: ThetaPiCharacterization,
    pub assumption2: Assumption2Report,
    pub nondegeneracy: NondegeneracyReport,
    pub stage_order_defect: StageOrderDefect,
    pub cancellation: Option<CancellationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub name: String,
    pub version: String,
    pub stages: Vec<StageReport>,
}

impl StabilityReport {
    pub fn stage(&self, m: usize) -> Option<&StageReport> {
        self.stages.iter().find(|s| s.m == m)
    }
}

pub fn run_stability_report(range: &StageRange) -> Result<StabilityReport> {
    range.validate()?;
    let stages = (range.m_min..=range.m_max)
        .into_par_iter()
        .map(|m| {
            let t = gauss_tableau(m)?;
            Ok(StageReport {
                m,
                theta_grid: theta_grid_summary(m)?,
                theta0: if m >= 2 {
                    Some(characterize_theta0(m)?)
                } else {
                    None
                },
                theta_pi: characterize_theta_pi(m)?,
                assumption2: verify_assumption2(&t),
                nondegeneracy: verify_eigenvector_nondegeneracy(&t),
                stage_order_defect: stage_order_defect(&t)?,
                cancellation: if m >= 3 {
                    Some(cancellation_check(m)?)
                } else {
                    None
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport {
        name: range.name.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        stages,
    })
}

/// Residuals of the odd/even cancellation identity, one per stage count.
pub fn run_cancellation_table(range: &StageRange) -> Result<Vec<CancellationReport>> {
    range.validate()?;
    (range.m_min.max(3)..=range.m_max)
        .map(cancellation_check)
        .collect()
}

/// `m,l,r,residual` rows.
pub fn cancellation_csv(reports: &[CancellationReport]) -> String {
    let mut out = String::from("m,l,r,residual\n");
    for rep in reports {
        for (l, (r, res)) in rep.r.iter().zip(&rep.residuals).enumerate() {
            out.push_str(&format!("{},{},{:e},{:e}\n", rep.m, l + 1, r, res));
        }
    }
    out
}

/// Result of one experiment.
#[derive(Debug, Clone)]
pub enum Outcome {
    Convergence(ConvergenceReport),
    Stability(StabilityReport),
    Cancellation(Vec<CancellationReport>),
}

impl Outcome {
    pub fn convergence(&self) -> Option<&ConvergenceReport> {
        match self {
            Outcome::Convergence(r) => Some(r),
            _ => None,
        }
    }

    /// File name and contents written for this outcome.
    pub fn file(&self, name: &str) -> Result<(String, Vec<u8>)> {
        Ok(match self {
            Outcome::Convergence(r) => (format!("{name}.csv"), r.to_csv().into_bytes()),
            Outcome::Stability(r) => {
                let text =
                    serde_json::to_string_pretty(r).map_err(|e| Error::Decode(e.to_string()))?;
                (format!("{name}.json"), text.into_bytes())
            }
            Outcome::Cancellation(r) => (format!("{name}.csv"), cancellation_csv(r).into_bytes()),
        })
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, ctx: &RunContext) -> Result<Outcome> {
    match cfg {
        ExperimentConfig::ScalarConvergence(c) => {
            run_scalar_convergence(c, ctx).map(Outcome::Convergence)
        }
        ExperimentConfig::BemConvergence(c) => {
            run_bem_convergence(c, ctx).map(Outcome::Convergence)
        }
        ExperimentConfig::StabilityReport(c) => run_stability_report(c).map(Outcome::Stability),
        ExperimentConfig::CancellationTable(c) => {
            run_cancellation_table(c).map(Outcome::Cancellation)
        }
    }
}

/// Runs independent cells in parallel. References are computed first, one
/// per distinct problem, so that no cell waits on another.
pub fn run_batch(configs: &[ExperimentConfig], ctx: &RunContext) -> Result<Vec<Outcome>> {
    for c in configs {
        c.validate()?;
    }
    let mut seen = std::collections::HashSet::new();
    for c in configs {
        match c {
            ExperimentConfig::ScalarConvergence(s)
                if seen.insert(format!("{:?}{:?}{}", s.kernel, s.datum, s.n_ref)) =>
            {
                ctx.scalar_reference(s)?;
            }
            ExperimentConfig::BemConvergence(b) if seen.insert(ctx.bem_reference_key(b)) => {
                ctx.bem_reference(b, &ctx.bem_transfer(b)?)?;
            }
            _ => {}
        }
    }
    configs.par_iter().map(|c| run_experiment(c, ctx)).collect()
}

/// Writes each outcome and records it in `index.json` under `table`.
pub fn write_outcomes(
    dir: &Path,
    table: &str,
    configs: &[ExperimentConfig],
    outcomes: &[Outcome],
) -> Result<Vec<PathBuf>> {
    let mut index = Index::load_or_new(dir)?;
    let mut written = Vec::new();
    for (cfg, outcome) in configs.iter().zip(outcomes) {
        let (file, bytes) = outcome.file(cfg.name())?;
        let path = dir.join(&file);
        write_atomic(&path, &bytes)?;
        index.insert(IndexEntry {
            table: table.to_string(),
            cell: cfg.name().to_string(),
            file,
            config: cfg.clone(),
            wall_time_s: outcome.convergence().map_or(0.0, |r| r.wall_time_s),
        });
        written.push(path);
    }
    index.save(dir)?;
    Ok(written)
}
