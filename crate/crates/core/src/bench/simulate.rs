use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::table::fmt_real;
use crate::error::{Error, Result};
use crate::protocol::{
    client_estimate, marginal_server_estimate, run_protocol_with, server_estimate, RoundRecord, RunOptions,
    RunRecord, ServerView,
};
use crate::rng::SeedStream;

pub const TRANSCRIPTS: &str = "transcripts.jsonl";
pub const SERVER_TRANSCRIPTS: &str = "transcripts_server.jsonl";
pub const SUMMARY: &str = "summary.csv";

pub const SUMMARY_HEADER: &str = "run,omega,t,M,accepted,aborted,S_M,client_estimate,\
omniscient_server_estimate,marginal_server_estimate";

#[derive(Serialize)]
struct Line<'a, T: Serialize> {
    run: u64,
    #[serde(flatten)]
    record: &'a T,
}

/// Per-run estimates; `None` where the estimator has nothing to work with.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub run: u64,
    pub omega: f64,
    pub t: f64,
    pub m: u64,
    pub accepted: u64,
    pub aborted: u64,
    pub s_m: f64,
    pub client_estimate: f64,
    /// Server that knows the average state of its half of the target.
    pub omniscient_server_estimate: Option<f64>,
    /// Server that assumes the maximally mixed state.
    pub marginal_server_estimate: Option<f64>,
}

fn optional(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Unestimable(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

impl RunSummary {
    pub fn from_run(run: u64, rec: &RunRecord) -> Result<Self> {
        let view = rec.server_view();
        Ok(Self {
            run,
            omega: rec.omega_true,
            t: rec.t,
            m: rec.m,
            accepted: rec.accepted,
            aborted: rec.aborted,
            s_m: rec.s_m,
            client_estimate: client_estimate(rec)?,
            omniscient_server_estimate: optional(server_estimate(&view, rec.omniscient_server_state()?))?,
            marginal_server_estimate: optional(marginal_server_estimate(&view))?,
        })
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "unestimable".to_string(), fmt_real);
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.run,
            fmt_real(self.omega),
            fmt_real(self.t),
            self.m,
            self.accepted,
            self.aborted,
            fmt_real(self.s_m),
            fmt_real(self.client_estimate),
            opt(self.omniscient_server_estimate),
            opt(self.marginal_server_estimate),
        )
    }
}

/// Runs `trials` independent protocol runs of `M` repetitions. Run `r`
/// draws from `SeedStream::new(seed).child(r)`. Writes the client-side and
/// server-side JSON-lines transcripts and `summary.csv` into `out_dir`.
pub fn simulate(cfg: &ExperimentConfig, seed: u64, out_dir: &Path) -> Result<Vec<RunSummary>> {
    cfg.validate()?;
    if cfg.sweep.is_some() {
        return Err(Error::Configuration("sweeps apply to curve emission only".into()));
    }
    let params = cfg.test_params()?;
    std::fs::create_dir_all(out_dir)?;
    let mut full = BufWriter::new(File::create(out_dir.join(TRANSCRIPTS))?);
    let mut server = BufWriter::new(File::create(out_dir.join(SERVER_TRANSCRIPTS))?);
    let mut summary = BufWriter::new(File::create(out_dir.join(SUMMARY))?);
    writeln!(summary, "{SUMMARY_HEADER}")?;

    let options = RunOptions { policy: cfg.abort_policy, record_transcript: cfg.record_transcript };
    let root = SeedStream::new(seed);
    let mut out = Vec::with_capacity(cfg.trials as usize);
    for run in 0..cfg.trials {
        let rec = run_protocol_with(cfg.m, &params, &cfg.noise, &cfg.field, &mut root.child(run).rng(), options)?;
        for r in &rec.rounds {
            write_line::<RoundRecord>(&mut full, run, r)?;
            write_line::<ServerView>(&mut server, run, &r.server_view())?;
        }
        let s = RunSummary::from_run(run, &rec)?;
        writeln!(summary, "{}", s.csv_row())?;
        out.push(s);
    }
    full.flush()?;
    server.flush()?;
    summary.flush()?;
    Ok(out)
}

fn write_line<T: Serialize>(w: &mut impl Write, run: u64, record: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, &Line { run, record })?;
    w.write_all(b"\n")?;
    Ok(())
}
