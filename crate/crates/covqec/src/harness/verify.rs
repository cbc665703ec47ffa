//! Invariant suite at CI scale. Each check returns a witness string on failure.

use std::collections::BTreeSet;
use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    compression_dims, fisher_upper_strong, fisher_upper_weak, kraus_zero_check, lemma4_lower, prop1_lower, prop2_lower,
    theorem1_bound, Hamiltonian,
};
use crate::channels::{cov_fidelity_and_errors, covariant_choi, haar_quadrature_su2, KrausChannel};
use crate::codes::{code_error, five_qubit_code, subsets, trivial_code};
use crate::protocol::{effective_channel, ProtocolConfig, WeakDistribution};
use crate::refframe::{appendix_e_closed_form, appendix_e_sum, outcome_density_su2, strong_combined_spec, weak_spec};
use crate::rep::{enumerate_diagrams, schur_weyl_distribution, tensor_decompose, weyl_dimension};
use crate::sdp::diamond_error;

use super::commands::{cmd_sweep, sdp_cross_validation};
use super::config::RunConfig;
use super::HarnessError;

pub const MODULES: [&str; 8] = ["rep", "refframe", "channels", "sdp", "codes", "protocol", "bounds", "harness"];

type Witness = Result<(), String>;

struct Check {
    module: &'static str,
    name: &'static str,
    run: fn() -> Witness,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    /// `None` when the check passed.
    pub witness: Option<String>,
}

/// Test hook: appends a check to `module` that always fails with a fixed witness.
#[derive(Clone, Copy, Debug)]
pub struct FaultHook {
    pub module: &'static str,
}

fn ensure(ok: bool, witness: impl FnOnce() -> String) -> Witness {
    if ok {
        Ok(())
    } else {
        Err(witness())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn lr_dimensions() -> Witness {
    for d in [2usize, 3] {
        for a in 0..=3 {
            for b in 0..=3 {
                for lam in enumerate_diagrams(a, d).map_err(err)? {
                    for mu in enumerate_diagrams(b, d).map_err(err)? {
                        let mut total = BigUint::zero();
                        for (nu, c) in tensor_decompose(&lam, &mu, d).map_err(err)? {
                            total += weyl_dimension(&nu, d).map_err(err)? * c;
                        }
                        let want = weyl_dimension(&lam, d).map_err(err)? * weyl_dimension(&mu, d).map_err(err)?;
                        ensure(total == want, || format!("d={d} {lam:?} x {mu:?}: {total} != {want}"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn schur_weyl_sums() -> Witness {
    for d in [2usize, 3] {
        for s in 0..=8 {
            let total: BigRational = schur_weyl_distribution(s, d).map_err(err)?.into_iter().map(|(_, p)| p).sum();
            ensure(total.is_one(), || format!("d={d} s={s}: sum {total}"))?;
        }
    }
    Ok(())
}

fn povm_completeness() -> Witness {
    let mut specs = Vec::new();
    for m in [4, 10] {
        specs.push(weak_spec(2, m, 5).map_err(err)?.1);
    }
    for s in 1..=4 {
        specs.push(strong_combined_spec(2, s).map_err(err)?);
    }
    for spec in specs {
        let quad = haar_quadrature_su2(spec.max_row_gap() as usize + 2).map_err(err)?;
        let total = quad.integrate(|n| outcome_density_su2(&spec, n.half_angle()));
        ensure((total - 1.0).abs() < 1e-6, || format!("{} pairs: integral {total}", spec.pairs()))?;
    }
    Ok(())
}

fn closed_form_identity() -> Witness {
    for lattice in [10u64, 57, 200] {
        for delta in 0..=4 {
            for lo in [0u64, 3, 7] {
                let (a, b) = (appendix_e_sum(lattice, delta, lo), appendix_e_closed_form(lattice, delta, lo));
                ensure((a - b).abs() < 1e-12, || format!("M={lattice} delta={delta} lo={lo}: {a} vs {b}"))?;
            }
        }
    }
    Ok(())
}

fn covariant_error_bound() -> Witness {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut tested = 0;
    while tested < 20 {
        let d = if tested % 2 == 0 { 2 } else { 3 };
        let (a, b) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
        let (f, eps) = cov_fidelity_and_errors(a, b);
        if eps > 0.5 {
            continue;
        }
        tested += 1;
        let id = KrausChannel::identity(d).choi();
        let wc = diamond_error(&covariant_choi(d, b), &id).map_err(err)?.value;
        let bound = 9.0 * d as f64 * a.max(1.0 - f);
        ensure(wc <= bound + 1e-6, || format!("d={d} a={a} b={b}: {wc} > {bound}"))?;
    }
    Ok(())
}

fn sdp_small() -> Witness {
    let s = sdp_cross_validation(4, 8, 3).map_err(err)?;
    ensure(s.passed(), || {
        format!(
            "fidelity diff {:.3e}, {} bracket violations, gap {:.3e}",
            s.fidelity_max_diff, s.bracket_violations, s.max_gap
        )
    })
}

fn five_qubit_erasures() -> Witness {
    let code = five_qubit_code().map_err(err)?;
    for k in 1..=2 {
        for s in subsets(5, k) {
            let e = code_error(&code, &s).map_err(err)?;
            ensure(e <= 1e-8, || format!("erasures {s:?}: error {e}"))?;
        }
    }
    Ok(())
}

fn protocol_sandwich() -> Witness {
    let weak = ProtocolConfig::weak(five_qubit_code().map_err(err)?, 8, 1, WeakDistribution::UniformUpTo).map_err(err)?;
    let r = effective_channel(&weak).map_err(err)?;
    let n = weak.n() as u64;
    let lower = prop1_lower(n, 1).map_err(err)?.value;
    let upper = theorem1_bound(2, 1, 5, weak.n_r() as u64).map_err(err)?.value;
    ensure(lower <= r.eps_cov && (upper >= 1.0 || r.eps_cov <= upper), || {
        format!("weak m=8: {lower} <= {} <= {upper} fails", r.eps_cov)
    })?;
    for p in [0.1, 0.2] {
        let strong = ProtocolConfig::strong(trivial_code(2), 4, p).map_err(err)?;
        let r = effective_channel(&strong).map_err(err)?;
        let lower = prop2_lower(strong.n() as u64, p).map_err(err)?.value;
        ensure(lower <= r.eps_cov, || format!("strong p={p}: {lower} > {}", r.eps_cov))?;
    }
    Ok(())
}

fn fisher_chain() -> Witness {
    let h = Hamiltonian::new(vec![1.0, -1.0]).map_err(err)?;
    for n in [3u64, 10, 1161] {
        for n_e in [1u32, 2] {
            let chain = lemma4_lower(h.spread(), fisher_upper_weak(n, n_e, &h).map_err(err)?.value).map_err(err)?.value;
            let direct = prop1_lower(n, n_e).map_err(err)?.value;
            ensure(chain == direct, || format!("weak n={n} n_e={n_e}: {chain} != {direct}"))?;
        }
        for p in [0.1, 0.25] {
            let chain = lemma4_lower(2.0, fisher_upper_strong(n, 2.0, p).map_err(err)?.value).map_err(err)?.value;
            let direct = prop2_lower(n, p).map_err(err)?.value;
            ensure(chain == direct, || format!("strong n={n} p={p}: {chain} != {direct}"))?;
        }
    }
    Ok(())
}

fn kraus_residuals() -> Witness {
    let h = Hamiltonian::new(vec![0.7, -0.2]).map_err(err)?;
    for (n, n_e) in [(2, 1), (3, 1), (3, 2)] {
        let r = kraus_zero_check(n, n_e, &h, 0.4, 0.1).map_err(err)?;
        let worst = r.zero.max(r.second_moment).max(r.trace_preservation);
        ensure(worst <= 1e-9, || format!("n={n} n_e={n_e}: {r:?}"))?;
    }
    Ok(())
}

fn compression() -> Witness {
    for d in [2, 3] {
        for n_r in (0..=20).step_by(2) {
            let c = compression_dims(d, n_r).map_err(err)?;
            ensure(c.exact <= c.bound, || format!("d={d} n_R={n_r}: {} > {}", c.exact, c.bound))?;
        }
    }
    Ok(())
}

fn sweep_determinism() -> Witness {
    let overrides = [("model", "strong".to_string()), ("pe", "0.1".into()), ("n-grid", "9,13".into()), ("seed", "4".into())];
    let cfg = RunConfig::resolve(None, &overrides).map_err(err)?;
    let run = |threads: usize| -> Result<Vec<u8>, String> {
        let mut c = cfg.clone();
        c.threads = threads;
        let mut buf = Vec::new();
        cmd_sweep(&c, &mut buf).map_err(err)?;
        Ok(buf)
    };
    let (a, b, c) = (run(1)?, run(1)?, run(2)?);
    ensure(a == b && a == c, || "sweep output differs between identical runs".into())
}

fn checks() -> Vec<Check> {
    vec![
        Check { module: "rep", name: "lr-dimension-identity", run: lr_dimensions },
        Check { module: "rep", name: "schur-weyl-normalization", run: schur_weyl_sums },
        Check { module: "refframe", name: "povm-completeness", run: povm_completeness },
        Check { module: "refframe", name: "closed-form-overlap", run: closed_form_identity },
        Check { module: "channels", name: "covariant-error-bound", run: covariant_error_bound },
        Check { module: "sdp", name: "cross-validation", run: sdp_small },
        Check { module: "codes", name: "five-qubit-erasures", run: five_qubit_erasures },
        Check { module: "protocol", name: "bound-sandwich", run: protocol_sandwich },
        Check { module: "bounds", name: "fisher-chain", run: fisher_chain },
        Check { module: "bounds", name: "kraus-residuals", run: kraus_residuals },
        Check { module: "bounds", name: "compression", run: compression },
        Check { module: "harness", name: "sweep-determinism", run: sweep_determinism },
    ]
}

/// Runs the suite (or one module of it), printing a PASS/FAIL line per check.
pub fn run_checks(only: Option<&str>, fault: Option<FaultHook>, sink: &mut dyn Write) -> Result<Vec<CheckOutcome>, HarnessError> {
    if let Some(m) = only {
        if !MODULES.contains(&m) {
            return Err(HarnessError::Usage(format!("--only expects one of {}, got {m:?}", MODULES.join(", "))));
        }
    }
    let selected = |module: &str| only.is_none_or(|m| m == module);
    let mut outcomes = Vec::new();
    let mut report = |o: CheckOutcome, sink: &mut dyn Write| -> std::io::Result<()> {
        match &o.witness {
            None => writeln!(sink, "PASS {}::{}", o.module, o.name)?,
            Some(w) => writeln!(sink, "FAIL {}::{}: {w}", o.module, o.name)?,
        }
        sink.flush()?;
        outcomes.push(o);
        Ok(())
    };
    for c in checks().into_iter().filter(|c| selected(c.module)) {
        let witness = (c.run)().err();
        report(CheckOutcome { module: c.module, name: c.name, witness }, sink)?;
    }
    if let Some(hook) = fault {
        if selected(hook.module) {
            let witness = Some("expected 0, found 1 (injected)".into());
            report(CheckOutcome { module: hook.module, name: "injected-fault", witness }, sink)?;
        }
    }
    let seen: BTreeSet<_> = outcomes.iter().map(|o| o.module).collect();
    let failed = outcomes.iter().filter(|o| o.witness.is_some()).count();
    writeln!(sink, "{} checks in {} modules, {failed} failed", outcomes.len(), seen.len())?;
    Ok(outcomes)
}
