//! Acceptance gate. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::time::{Duration, Instant};

use qctwistor::check::ExactCheck;
use qctwistor::correspondence::{ad_conjugation_check, reeb_tuple_check, stabilizer_check};
use qctwistor::embedding::{filtration_compat_check, phi};
use qctwistor::flat::{self, NumericConfig};
use qctwistor::graded::{graded_dimensions, sp_basis, sp_slots, MAX_GRADE, MIN_GRADE};
use qctwistor::report::{closed_form_check, homomorphism_check, run_all, Format, SuiteConfig, PERTURBATION, PROBE_THRESHOLD};
use qctwistor::sampling::rng_from_seed;
use qctwistor::scalar::{Complex, Quaternion};

const SEED: u64 = 20_241_018;

struct Outcome {
    ok: bool,
    detail: String,
}

fn exact(check: &ExactCheck) -> Outcome {
    Outcome {
        ok: check.passed() && check.instances > 0,
        detail: match check.failures.first() {
            None => format!("{} instances", check.instances),
            Some(f) => format!("{} of {} failed, first: {f}", check.failures.len(), check.instances),
        },
    }
}

fn within(outcome: Outcome, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    match limit {
        Some(l) if elapsed > l => Outcome {
            ok: false,
            detail: format!("{}; {:.1?} exceeds {:.0?}", outcome.detail, elapsed, l),
        },
        _ => Outcome { detail: format!("{}; {:.1?}", outcome.detail, elapsed), ..outcome },
    }
}

fn closed_form() -> Outcome {
    let mut all = ExactCheck::default();
    for n in 1..=3 {
        let mut rng = rng_from_seed(SEED + n as u64);
        all.merge(closed_form_check(&mut rng, n, 1000));
    }
    exact(&all)
}

fn homomorphism_and_filtration() -> Outcome {
    let mut all = ExactCheck::default();
    for n in 1..=3 {
        let mut rng = rng_from_seed(SEED + n as u64);
        all.merge(homomorphism_check(&mut rng, n, 500, phi));
        let f = filtration_compat_check(&mut rng, n, 500);
        all.instances += 3 * f.trials;
        all.failures.extend(f.counterexamples.into_iter().map(|(name, m)| format!("n = {n}, {name}: {m}")));
    }
    exact(&all)
}

fn grading_laws() -> Outcome {
    let mut all = ExactCheck::default();
    for n in 1..=3 {
        let basis = sp_basis(n);
        let slots = sp_slots(n);
        for a in &basis {
            for b in &basis {
                let br = a.element.bracket(&b.element).expect("same n");
                let target = slots[a.slot].grade + slots[b.slot].grade;
                let ok = if (MIN_GRADE..=MAX_GRADE).contains(&target) {
                    br.grade_project(target).expect("grade in range") == br
                } else {
                    br.is_zero()
                };
                all.record(ok, || format!("n = {n}: [{}, {}] leaves grade {target}", a.label, b.label));
            }
        }
        let dim = |dims: &[(i32, usize)], k: i32| dims.iter().find(|(g, _)| *g == k).map_or(0, |(_, d)| *d);
        let sp = graded_dimensions::<Quaternion>(n);
        let su = graded_dimensions::<Complex>(n);
        for (k, expected) in [(-2, 3), (-1, 4 * n), (1, 4 * n), (2, 3)] {
            all.record(dim(&sp, k) == expected, || format!("n = {n}: dim g_{k} = {}", dim(&sp, k)));
        }
        all.record(dim(&su, -1) == 4 * n + 4, || format!("n = {n}: dim g~_-1 = {}", dim(&su, -1)));
    }
    exact(&all)
}

fn reeb_tuples() -> Outcome {
    let mut all = ExactCheck::default();
    for n in 1..=3 {
        let mut rng = rng_from_seed(SEED + n as u64);
        all.merge(reeb_tuple_check(&mut rng, n, 100).expect("valid samples"));
    }
    exact(&all)
}

fn stabilizer() -> Outcome {
    let mut rng = rng_from_seed(SEED);
    let (fiber, mut line) = stabilizer_check(&mut rng, 2, 500);
    line.merge(fiber);
    exact(&line)
}

fn ad_conjugation() -> Outcome {
    let mut all = ExactCheck::default();
    for n in 1..=3 {
        let mut rng = rng_from_seed(SEED + n as u64);
        all.merge(ad_conjugation_check(&mut rng, n, 100).expect("valid samples"));
    }
    exact(&all)
}

fn flat_model() -> Outcome {
    let mut all = ExactCheck::default();
    for n in 1..=3 {
        let model = flat::build_flat_qc(n).expect("flat model builds");
        all.merge(flat::check_structure_equation(&model));
        all.merge(flat::check_reeb_conditions(&model));
        all.merge(flat::check_closed(&model));
        all.merge(flat::check_quaternion_relations(&model));
        if n == 1 {
            let d = flat::duchemin_check(&model).expect("n = 1");
            all.record(d.passed(), || format!("orthonormal-oriented condition: {d:?}"));
        }
    }
    exact(&all)
}

fn levi_signature() -> Outcome {
    let cfg = NumericConfig { fd_step: 1e-5, residual_tol: 1e-6, eig_floor: 1e-8 };
    let mut notes = Vec::new();
    let mut ok = true;
    for (n, samples) in [(1, 100), (2, 25)] {
        let model = flat::build_flat_qc(n).expect("flat model builds");
        let mut rng = rng_from_seed(SEED + n as u64);
        let charts: Vec<_> = (0..samples).map(|_| flat::sample_chart(&mut rng, &model)).collect();
        let levi = flat::levi_signature(&model, &charts, &cfg).expect("valid config");
        let residual = flat::integrability_residual(&model, &charts, &cfg, 0.0).expect("valid config");
        let probe = flat::integrability_residual(&model, &charts, &cfg, PERTURBATION).expect("valid config");
        ok &= levi.passed() && levi.min_eig > cfg.eig_floor && residual < cfg.residual_tol && probe > PROBE_THRESHOLD;
        notes.push(format!(
            "n = {n}: {}/{samples} samples at {:?}, min |eigenvalue| {:.3e}, residual {:.1e}, probe {:.1e}",
            samples - levi.mismatched - levi.degenerate,
            levi.expected,
            levi.min_eig,
            residual,
            probe
        ));
    }
    Outcome { ok, detail: notes.join("; ") }
}

fn determinism() -> Outcome {
    let cfg = SuiteConfig { seed: 7, trials: 20, ..SuiteConfig::default() };
    let first = run_all(&cfg).and_then(|r| r.render(Format::Json)).expect("suite runs");
    let second = run_all(&cfg).and_then(|r| r.render(Format::Json)).expect("suite runs");
    Outcome { ok: first == second, detail: format!("{} bytes", first.len()) }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 9] = [
        ("closed-form phi_-1 equals grade -1 projection of phi", closed_form, Some(Duration::from_secs(30))),
        ("phi is a filtered Lie algebra homomorphism", homomorphism_and_filtration, None),
        ("bracket respects the grading, component dimensions", grading_laws, None),
        ("Reeb tuples and J_0 on them", reeb_tuples, None),
        ("stabilizer of C d_0 in Sp(1)Sp(n) R+", stabilizer, None),
        ("Ad conjugation of the rotated Reeb values", ad_conjugation, None),
        ("flat model structure equations", flat_model, Some(Duration::from_secs(60))),
        ("Levi signature, integrability and perturbation probe", levi_signature, Some(Duration::from_secs(300))),
        ("byte-identical reports for identical config", determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = within(run(), start.elapsed(), *limit);
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name} ({})", k + 1, outcome.detail);
        failed += usize::from(!outcome.ok);
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
