use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{prop1_lower, prop2_lower, theorem1_bound, theorem2_bound, theorem2_coefficient, BoundKind, BoundReport};
use crate::channels::KrausChannel;
use crate::linalg::trace_norm_hermitian;
use crate::protocol::{
    effective_channel_with, monte_carlo_epsilon, scaling_sweep, EpsCovMethod, ProtocolConfig, ProtocolError,
    WeakDistribution,
};
use crate::refframe::{f_strong, min_overlap};
use crate::sdp::{block_covariant_channel, diamond_error, restricted_fwc, sqrt_fwc, SdpStatus, DEFAULT_TOL};

use super::config::{Format, ModelKind, RunConfig};
use super::output::{format_float, render_svg, sweep_csv, RESULT_COLUMNS};
use super::HarnessError;

fn bound_line(r: &BoundReport) -> String {
    let kind = match r.kind {
        BoundKind::Upper => "upper",
        BoundKind::Lower => "lower",
    };
    let note = r.note.as_deref().unwrap_or("").replace(',', ";");
    format!(
        "{},{kind},{},{},{},{note}",
        r.name,
        format_float(r.value),
        r.preconditions_met,
        r.asymptotic_terms_dropped
    )
}

/// Writes to `--out` when given, otherwise to `sink`.
fn emit(cfg: &RunConfig, text: &str, sink: &mut dyn Write) -> Result<(), HarnessError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => sink.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_bounds(cfg: &RunConfig, sink: &mut dyn Write) -> Result<(), HarnessError> {
    let model = cfg.require_model()?;
    let np = cfg.physical(model) as u64;
    let total = |what: &str| -> Result<u64, HarnessError> {
        match (cfg.n, cfg.nr) {
            (Some(n), _) => Ok(n),
            (None, Some(nr)) => Ok(np + nr),
            _ => Err(HarnessError::Usage(format!("{what} needs --n or --nr"))),
        }
    };
    let mut lines = vec![format!("# bounds d={} model={}", cfg.d, if model == ModelKind::Weak { "weak" } else { "strong" })];
    let reports = match model {
        ModelKind::Weak => {
            let ne = cfg.require_ne()?;
            let n = total("the weak model")?;
            let nr = n.checked_sub(np).ok_or_else(|| HarnessError::Usage(format!("n = {n} below n_P = {np}")))?;
            lines.push(format!("# n_e={ne} n_P={np} n_R={nr} n={n}"));
            vec![theorem1_bound(cfg.d, ne, np as u32, nr)?, prop1_lower(n, ne)?]
        }
        ModelKind::Strong => {
            let pe = cfg.require_pe()?;
            let n = total("the strong model")?;
            lines.push(format!("# p_e={pe} n={n} alpha={}", cfg.alpha));
            let mut v = Vec::new();
            if pe < 0.5 {
                lines.push(format!("# coefficient={}", format_float(theorem2_coefficient(cfg.d, pe)?)));
                v.push(theorem2_bound(cfg.d, pe, n, cfg.alpha)?);
            } else {
                lines.push("# theorem2 needs p_e < 1/2; skipped".into());
            }
            v.push(prop2_lower(n, pe)?);
            v
        }
    };
    lines.push("name,kind,value,preconditions_met,asymptotic_terms_dropped,note".into());
    lines.extend(reports.iter().map(bound_line));
    let mut text = lines.join("\n");
    text.push('\n');
    emit(cfg, &text, sink)
}

/// Grid of total qudit counts used when `--n-grid` is absent.
pub fn default_grid(cfg: &RunConfig) -> Result<Vec<u64>, HarnessError> {
    let model = cfg.require_model()?;
    let np = cfg.physical(model) as u64;
    Ok(match model {
        ModelKind::Weak => {
            let per = 2 * (cfg.require_ne()? as u64 + 1);
            [16u64, 24, 32, 48, 64, 96].iter().map(|lattice| np + per * (3 * lattice + 1)).collect()
        }
        ModelKind::Strong => [4u64, 6, 9, 13, 18, 24, 30].iter().map(|s| np + 2 * s).collect(),
    })
}

pub fn cmd_sweep(cfg: &RunConfig, sink: &mut dyn Write) -> Result<(), HarnessError> {
    let model = cfg.sweep_model()?;
    let grid = match &cfg.n_grid {
        Some(g) => g.clone(),
        None => default_grid(cfg)?,
    };
    if cfg.format == Format::CsvSvg && cfg.out.is_none() {
        return Err(HarnessError::Usage("--format csv+svg needs --out".into()));
    }
    let table = scaling_sweep(&model, &grid, cfg.threads, cfg.timing)?;
    emit(cfg, &sweep_csv(&table, cfg.seed), sink)?;
    if cfg.format == Format::CsvSvg {
        if let Some(out) = &cfg.out {
            std::fs::write(out.with_extension("svg"), render_svg(&table))?;
        }
    }
    Ok(())
}

pub fn cmd_simulate(cfg: &RunConfig, sink: &mut dyn Write) -> Result<(), HarnessError> {
    let model = cfg.require_model()?;
    let code = cfg.code(model)?;
    let nr = cfg.nr.ok_or_else(|| HarnessError::Usage("simulate needs --nr".into()))?;
    let mut pc = match model {
        ModelKind::Weak => {
            let ne = cfg.require_ne()?;
            let per = 2 * (ne as u64 + 1);
            if nr == 0 || nr % per != 0 {
                return Err(HarnessError::Usage(format!("--nr must be a positive multiple of {per} for n_e = {ne}")));
            }
            ProtocolConfig::weak(code, (nr / per) as u32, ne, WeakDistribution::UniformUpTo)?
        }
        ModelKind::Strong => {
            if nr == 0 || nr % 2 != 0 {
                return Err(HarnessError::Usage("--nr must be a positive even number".into()));
            }
            ProtocolConfig::strong(code, (nr / 2) as usize, cfg.require_pe()?)?
        }
    };
    pc.mc_samples = cfg.mc_samples;
    pc.seed = cfg.seed;
    pc.quad_order = cfg.quad_order;
    let start = std::time::Instant::now();
    let mc = monte_carlo_epsilon(&pc)?;
    let elapsed = if cfg.timing { start.elapsed().as_millis() } else { 0 };
    let exact = effective_channel_with(&pc, EpsCovMethod::CovariantClosedForm)?;
    let (n, n_p) = (pc.n() as u64, pc.n_p() as u64);
    let (param, upper, lower, reference) = match model {
        ModelKind::Weak => {
            let ne = cfg.require_ne()?;
            let f = 1.0 - min_overlap(&pc.ensemble.spec, n_p as u32 + 1);
            (ne as f64, theorem1_bound(2, ne, n_p as u32, nr)?.value, prop1_lower(n, ne)?.value, f)
        }
        ModelKind::Strong => {
            let pe = cfg.require_pe()?;
            let up = if pe < 0.5 { theorem2_bound(2, pe, n, cfg.alpha)?.value } else { f64::INFINITY };
            let s = pc.ensemble.copies as u32;
            (pe, up, prop2_lower(n, pe)?.value, 1.0 - f_strong(2, s, n_p as u32).map_err(ProtocolError::from)?)
        }
    };
    let z = if mc.stderr > 0.0 { (mc.estimate - exact.mixture.a) / mc.stderr } else { 0.0 };
    let mut text = String::new();
    text.push_str(&format!(
        "# simulate d=2 model={} n_P={n_p} n_R={nr} n={n} samples={} seed={}\n",
        if model == ModelKind::Weak { "weak" } else { "strong" },
        mc.samples,
        cfg.seed
    ));
    text.push_str(&format!("# mc_estimate={} mc_stderr={}\n", format_float(mc.estimate), format_float(mc.stderr)));
    text.push_str(&format!("# exact={} z={:.3} lemma1_upper={}\n", format_float(exact.mixture.a), z, format_float(exact.lemma1.value)));
    text.push_str(&RESULT_COLUMNS.join(","));
    text.push('\n');
    text.push_str(&format!(
        "{n},{n_p},{nr},{},{},{},{},{},{},{elapsed},{}\n",
        if model == ModelKind::Weak { "weak" } else { "strong" },
        format_float(param),
        format_float(mc.estimate),
        format_float(upper),
        format_float(lower),
        format_float(reference),
        cfg.seed
    ));
    emit(cfg, &text, sink)
}

/// Summary of the SDP cross-checks.
#[derive(Clone, Debug, Default)]
pub struct SdpCheckSummary {
    /// `max |sqrt_fwc^2 - restricted_fwc|` over block-covariant instances.
    pub fidelity_max_diff: f64,
    pub fidelity_instances: usize,
    /// Diamond values outside `[eps, d_in eps]` (trace-distance `eps` of the Choi states).
    pub bracket_violations: usize,
    pub bracket_instances: usize,
    pub max_gap: f64,
    pub lines: Vec<String>,
}

impl SdpCheckSummary {
    pub fn passed(&self) -> bool {
        self.fidelity_max_diff <= 1e-5 && self.bracket_violations == 0 && self.max_gap <= DEFAULT_TOL
    }
}

/// Runs `fidelity` block-covariant comparisons and `diamond` random-pair
/// bracket checks.
pub fn sdp_cross_validation(fidelity: usize, diamond: usize, seed: u64) -> Result<SdpCheckSummary, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SdpCheckSummary::default();
    let note_gap = |out: &mut SdpCheckSummary, status: SdpStatus, gap: f64| {
        if status == SdpStatus::Optimal {
            out.max_gap = out.max_gap.max(gap);
        }
    };
    for i in 0..fidelity {
        let count = rng.gen_range(2..=3);
        let mut two_js: Vec<usize> = Vec::new();
        while two_js.len() < count {
            let j = rng.gen_range(0..=3);
            if !two_js.contains(&j) {
                two_js.push(j);
            }
        }
        let terms = rng.gen_range(1..=2);
        let budget = rng.gen_range(0.3..0.95);
        let raw: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scale = budget / raw.iter().map(|c: &f64| c.abs()).sum::<f64>();
        let profile: Vec<f64> = raw.iter().map(|c| c * scale).collect();
        let (blocks, ch) = block_covariant_channel(&two_js, &profile)?;
        let r = restricted_fwc(&blocks, &ch)?;
        let sdp = sqrt_fwc(&ch.choi(), &KrausChannel::identity(ch.dim_in()).choi())?;
        note_gap(&mut out, sdp.solution.status, sdp.solution.gap);
        let diff = (sdp.value * sdp.value - r.value).abs();
        out.fidelity_max_diff = out.fidelity_max_diff.max(diff);
        out.fidelity_instances += 1;
        out.lines.push(format!(
            "fidelity {i}: blocks {two_js:?} sdp {} restricted {} diff {:.2e} gap {:.2e}",
            format_float(sdp.value * sdp.value),
            format_float(r.value),
            diff,
            sdp.solution.gap
        ));
    }
    let dims = [(2, 2), (2, 3), (3, 2), (3, 3)];
    for i in 0..diamond {
        let (di, dout) = dims[i % dims.len()];
        let a = KrausChannel::random(di, dout, rng.gen_range(1..=3), &mut rng).choi();
        let b = KrausChannel::random(di, dout, rng.gen_range(1..=3), &mut rng).choi();
        let v = diamond_error(&a, &b)?;
        note_gap(&mut out, v.solution.status, v.solution.gap);
        let lo = 0.5 * trace_norm_hermitian(&(a.matrix() - b.matrix()));
        let ok = v.value >= lo - 1e-7 && v.value <= di as f64 * lo + 1e-7;
        if !ok {
            out.bracket_violations += 1;
        }
        out.bracket_instances += 1;
        out.lines.push(format!(
            "diamond {i}: {di}->{dout} value {} bracket [{}, {}] {}",
            format_float(v.value),
            format_float(lo),
            format_float(di as f64 * lo),
            if ok { "ok" } else { "VIOLATED" }
        ));
    }
    Ok(out)
}

/// Returns whether every check passed.
pub fn cmd_sdp_check(instances: usize, seed: u64, verbose: bool, sink: &mut dyn Write) -> Result<bool, HarnessError> {
    let s = sdp_cross_validation(instances, 2 * instances, seed)?;
    if verbose {
        for l in &s.lines {
            writeln!(sink, "{l}")?;
        }
    }
    writeln!(
        sink,
        "{} fidelity: {} block-covariant instances, max |sqrt_fwc^2 - restricted| = {:.3e} (tol 1e-5)",
        if s.fidelity_max_diff <= 1e-5 { "PASS" } else { "FAIL" },
        s.fidelity_instances,
        s.fidelity_max_diff
    )?;
    writeln!(
        sink,
        "{} diamond bracket: {} of {} random pairs outside [eps, d eps]",
        if s.bracket_violations == 0 { "PASS" } else { "FAIL" },
        s.bracket_violations,
        s.bracket_instances
    )?;
    writeln!(
        sink,
        "{} duality gap: max {:.3e} over optimal exits (tol {:.0e})",
        if s.max_gap <= DEFAULT_TOL { "PASS" } else { "FAIL" },
        s.max_gap,
        DEFAULT_TOL
    )?;
    Ok(s.passed())
}
