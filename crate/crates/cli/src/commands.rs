//! The four subcommands. Each returns the text to print on success.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use kdv_core::harness::{
    study_points, ConvergenceReport, DirectReference, ReferenceSource, RunRecord, Study,
};
use kdv_core::{evolve, Field, Scheme, SchemeConfig, SobolevIndex};

use crate::config::Settings;
use crate::csv_report::{aborted_trailer, format_block, HEADER};
use crate::error::{CliError, CliResult};
use crate::field_io::{write_atomic, write_field};
use crate::reference_cache::ReferenceCache;

/// Where `run` writes its final field when `out` is not set.
pub const DEFAULT_RUN_OUTPUT: &str = "final.field";

/// Evolves the initial datum to `T`, writes the final field and returns
/// `t=<T> mass=<m> h0=<norm> steps=<n>`.
pub fn cmd_run(s: &Settings) -> CliResult<String> {
    let (u0, _) = s.initial_datum()?;
    let cfg = SchemeConfig::new(s.scheme()?, s.tau()?)?.with_dealias(s.dealias()?);
    let t_final = s.t_final()?;
    let state = evolve(&u0, t_final, &cfg)?;
    let out = s.out().unwrap_or_else(|| PathBuf::from(DEFAULT_RUN_OUTPUT));
    let meta = format!("scheme={} tau={} T={t_final} steps={}", cfg.scheme, cfg.tau, state.step_count);
    write_field(&out, &state.u, &[meta])?;
    Ok(format!(
        "t={} mass={:e} h0={} steps={}",
        state.t,
        state.u.mass(),
        state.u.sobolev_norm(SobolevIndex::L2),
        state.step_count
    ))
}

/// Writes `rough_data` for `(N, theta, seed)` and reports its norms.
pub fn cmd_roughgen(s: &Settings) -> CliResult<String> {
    let spec = s.rough_spec()?;
    let out = s
        .out()
        .ok_or_else(|| CliError::config("missing required setting 'out'"))?;
    let u0 = kdv_core::harness::rough_data(&spec)?;
    let meta = format!("rough N={} theta={} seed={}", spec.n, spec.theta, spec.seed);
    write_field(&out, &u0, &[meta])?;
    let h_theta = u0.sobolev_norm(SobolevIndex::new(spec.theta)?);
    Ok(format!("h_theta={h_theta} linf={}", u0.max_abs()))
}

fn study(s: &Settings) -> CliResult<Study> {
    let (u0, data) = s.initial_datum()?;
    let study = Study {
        u0,
        data,
        gamma: s.gamma()?,
        t_final: s.t_final()?,
        taus: s.tau_list()?,
        tau_ref: s.tau_ref()?,
        dealias: s.dealias()?,
    };
    study.validate()?;
    Ok(study)
}

fn reference(s: &Settings, study: &Study) -> CliResult<Field> {
    let field = match s.cache_dir() {
        Some(dir) => ReferenceCache::new(&dir)
            .map_err(|e| CliError::file(&dir, e))?
            .reference(&study.u0, study.t_final, study.tau_ref)?,
        None => DirectReference.reference(&study.u0, study.t_final, study.tau_ref)?,
    };
    Ok(field)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::file("<stdout>", e))
        }
    }
}

/// Runs one scheme over the study. Numerical failures become DNF rows when
/// `tolerate_dnf` is set; otherwise the first failure ends the block, and
/// only the runs before it are kept.
fn scheme_block(
    scheme: Scheme,
    study: &Study,
    reference: &Field,
    tolerate_dnf: bool,
) -> (ConvergenceReport, Option<kdv_core::Error>) {
    let mut records = Vec::new();
    let mut failure = None;
    for (result, &tau) in study_points(scheme, study, reference).into_iter().zip(&study.taus) {
        match result {
            Ok(rec) => records.push(rec),
            Err(e) if tolerate_dnf && e.is_numerical() => records.push(RunRecord::did_not_finish(tau, &e)),
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    (ConvergenceReport::from_records(scheme, study, records), failure)
}

fn study_csv(s: &Settings, schemes: &[Scheme], tolerate_dnf: bool) -> CliResult<String> {
    let study = study(s)?;
    let out = s.out();
    let mut csv = format!("{HEADER}\n");
    let reference = match reference(s, &study) {
        Ok(r) => r,
        Err(e) => {
            csv.push_str(&aborted_trailer(&format!("reference solution failed: {e}")));
            emit(out.as_deref(), &csv)?;
            return Err(e);
        }
    };
    for &scheme in schemes {
        let (report, failure) = scheme_block(scheme, &study, &reference, tolerate_dnf);
        csv.push_str(&format_block(&report));
        if let Some(e) = failure {
            csv.push_str(&aborted_trailer(&format!("{scheme}: {e}")));
            emit(out.as_deref(), &csv)?;
            return Err(e.into());
        }
    }
    emit(out.as_deref(), &csv)?;
    Ok(match out {
        Some(path) => format!("wrote {}", path.display()),
        None => String::new(),
    })
}

/// Convergence table for a single scheme.
pub fn cmd_converge(s: &Settings) -> CliResult<String> {
    study_csv(s, &[s.scheme()?], false)
}

/// One block per scheme against a shared reference; numerical failures
/// are recorded as DNF rows instead of aborting.
pub fn cmd_compare(s: &Settings) -> CliResult<String> {
    study_csv(s, &s.schemes()?, true)
}

