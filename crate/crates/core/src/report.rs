//! Check suites, their machine-readable reports, and the bracket table
//! export used by the command-line harness.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::check::ExactCheck;
use crate::correspondence as corr;
use crate::embedding::{filtration_compat_check, parabolic_preimage_basis, phi, phi_minus1, phi_minus1_via_projection};
use crate::error::{Error, Result};
use crate::flat::{self, FlatQC, NumericConfig, SampleRow};
use crate::g0::{adjoint, preserves_grading, rho_minus1, rho_minus2, G0Element};
use crate::graded::{
    bracket_table, from_slot_values, graded_dimensions, minus1, minus2, sp_basis, sp_slots, BracketRow, CMatrix,
    QMatrix, SpElement, MAX_GRADE, MIN_GRADE,
};
use crate::sampling::{self, rng_from_seed, SampleRng};
use crate::scalar::{Complex, Quaternion, Rational, Scalar};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_N: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub numeric: NumericConfig,
    pub max_n: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Replaces `φ` by the map with a negated `V` block in the homomorphism
    /// check.
    pub inject_phi_fault: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 1,
            seed: 42,
            trials: 100,
            numeric: NumericConfig::default(),
            max_n: DEFAULT_MAX_N,
            format: Format::Json,
            out: None,
            inject_phi_fault: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > self.max_n {
            return Err(Error::InvalidConfig(format!("n = {} outside 1..={}", self.n, self.max_n)));
        }
        flat::validate_numeric(&self.numeric)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// `"exact"` for exact checks, otherwise the largest observed error.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum MaxError {
    Exact,
    Value(f64),
}

impl Serialize for MaxError {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MaxError::Exact => s.serialize_str("exact"),
            MaxError::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl std::fmt::Display for MaxError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaxError::Exact => f.write_str("exact"),
            MaxError::Value(v) => write!(f, "{v:e}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// The identity being checked.
    pub paper_ref: String,
    pub status: Status,
    pub trials: usize,
    pub max_abs_error: MaxError,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CheckReport {
    fn exact(name: &str, identity: &str, trials: usize, check: &ExactCheck) -> Self {
        CheckReport {
            name: name.into(),
            paper_ref: identity.into(),
            status: if check.passed() { Status::Pass } else { Status::Fail },
            trials,
            max_abs_error: MaxError::Exact,
            counterexample: check.failures.first().cloned(),
        }
    }

    fn skipped(name: &str, identity: &str, reason: &str) -> Self {
        CheckReport {
            name: name.into(),
            paper_ref: identity.into(),
            status: Status::Skip,
            trials: 0,
            max_abs_error: MaxError::Exact,
            counterexample: Some(reason.into()),
        }
    }

    fn numeric(name: &str, identity: &str, trials: usize, passed: bool, err: f64, counterexample: Option<String>) -> Self {
        CheckReport {
            name: name.into(),
            paper_ref: identity.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            trials,
            max_abs_error: MaxError::Value(err),
            counterexample,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleRow>,
}

impl Report {
    fn new(suite: &str, cfg: &SuiteConfig, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skip => summary.skip += 1,
            }
        }
        Report {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            n: cfg.n,
            seed: cfg.seed,
            checks,
            summary,
            warnings: Vec::new(),
            samples: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Merges two reports under a new suite name.
    pub fn combine(suite: &str, cfg: &SuiteConfig, parts: Vec<Report>) -> Report {
        let mut checks = Vec::new();
        let mut warnings = Vec::new();
        let mut samples = Vec::new();
        for p in parts {
            checks.extend(p.checks);
            warnings.extend(p.warnings);
            samples.extend(p.samples);
        }
        let mut out = Report::new(suite, cfg, checks);
        out.warnings = warnings;
        out.samples = samples;
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => {
                let mut s = String::from("name,status,trials,max_abs_error,counterexample\n");
                for c in &self.checks {
                    let status = serde_json::to_value(c.status)?;
                    let ce = c.counterexample.as_deref().unwrap_or("").replace('"', "\"\"");
                    let _ = writeln!(
                        s,
                        "{},{},{},{},\"{}\"",
                        c.name,
                        status.as_str().unwrap_or(""),
                        c.trials,
                        c.max_abs_error,
                        ce
                    );
                }
                Ok(s)
            }
            Format::Text => {
                let mut s = format!("suite {} (n = {}, seed = {})\n", self.suite, self.n, self.seed);
                for c in &self.checks {
                    let tag = match c.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Skip => "SKIP",
                    };
                    let _ = write!(s, "{tag} {} trials={} max_abs_error={}", c.name, c.trials, c.max_abs_error);
                    if let Some(ce) = &c.counterexample {
                        let _ = write!(s, " ({ce})");
                    }
                    s.push('\n');
                }
                for w in &self.warnings {
                    let _ = writeln!(s, "warning: {w}");
                }
                let _ = writeln!(
                    s,
                    "{} passed, {} failed, {} skipped",
                    self.summary.pass, self.summary.fail, self.summary.skip
                );
                Ok(s)
            }
        }
    }
}

/// `U + jV ↦ [[U, -conj(V)], [-V, conj(U)]]`: `φ` with its lower `V` block
/// negated, which is not a homomorphism.
pub fn phi_negated_v(m: &QMatrix) -> CMatrix {
    let s = m.rows();
    let mut out = phi(m);
    for r in 0..s {
        for c in 0..s {
            out[(r + s, c)] = -out[(r + s, c)].clone();
        }
    }
    out
}

fn random_check(
    name: &str,
    identity: &str,
    trials: usize,
    run: impl FnOnce() -> Result<ExactCheck>,
) -> Result<CheckReport> {
    if trials == 0 {
        return Ok(CheckReport::skipped(name, identity, "trials = 0"));
    }
    Ok(CheckReport::exact(name, identity, trials, &run()?))
}

fn sample_g0(rng: &mut SampleRng, n: usize) -> G0Element {
    let s = sampling::positive_rational(rng);
    let z = sampling::unit_quaternion(rng);
    G0Element::new(s, z, sampling::sp_n(rng, n)).expect("sampled factors are valid")
}

/// `φ([M, N]) = [φ M, φ N]` over `trials` random pairs, for a chosen map.
pub fn homomorphism_check(rng: &mut SampleRng, n: usize, trials: usize, map: fn(&QMatrix) -> CMatrix) -> ExactCheck {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let m = sampling::sp_generic(rng, n);
        let k = sampling::sp_generic(rng, n);
        let lhs = map(m.bracket(&k).expect("same n").matrix());
        let rhs = map(m.matrix()).commutator(&map(k.matrix()));
        out.record(lhs == rhs, || format!("M = {m}, N = {k}"));
    }
    out
}

/// Closed-form `φ_{-1}` against the projection, `trials` inputs per grade.
pub fn closed_form_check(rng: &mut SampleRng, n: usize, trials: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    for k in MIN_GRADE..=MAX_GRADE {
        for _ in 0..trials {
            let m = sampling::sp_homogeneous(rng, n, k);
            let closed = phi_minus1(&m);
            let projected = phi_minus1_via_projection(&m);
            out.record(closed == projected, || format!("grade {k}: {m} gives {closed} vs {projected}"));
        }
    }
    out
}

fn bracket_grading_structural(n: usize) -> ExactCheck {
    let basis = sp_basis(n);
    let slots = sp_slots(n);
    let mut out = ExactCheck::default();
    for bi in &basis {
        for bj in &basis {
            let br = bi.element.bracket(&bj.element).expect("same n");
            let target = slots[bi.slot].grade + slots[bj.slot].grade;
            let ok = if (MIN_GRADE..=MAX_GRADE).contains(&target) {
                br.grade_project(target).expect("grade in range") == br
            } else {
                br.is_zero()
            };
            out.record(ok, || format!("[{}, {}] leaves grade {target}", bi.label, bj.label));
        }
    }
    out
}

fn bracket_grading_random(rng: &mut SampleRng, n: usize, trials: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let i = rng_grade(rng);
        let j = rng_grade(rng);
        let a = sampling::sp_homogeneous(rng, n, i);
        let b = sampling::sp_homogeneous(rng, n, j);
        let br = a.bracket(&b).expect("same n");
        let ok = if (MIN_GRADE..=MAX_GRADE).contains(&(i + j)) {
            br.grade_project(i + j).expect("grade in range") == br
        } else {
            br.is_zero()
        };
        out.record(ok, || format!("[{a}, {b}] not in grade {}", i + j));
    }
    out
}

fn rng_grade(rng: &mut SampleRng) -> i32 {
    use rand::Rng;
    rng.random_range(MIN_GRADE..=MAX_GRADE)
}

fn jacobi_check(rng: &mut SampleRng, n: usize, trials: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let a = sampling::sp_generic(rng, n);
        let b = sampling::sp_generic(rng, n);
        let c = sampling::sp_generic(rng, n);
        let br = |x: &SpElement, y: &SpElement| x.bracket(y).expect("same n");
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        out.record(sum.is_zero(), || format!("Jacobi fails at {a}, {b}, {c}"));
    }
    out
}

fn dimension_structural(n: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    let sp = graded_dimensions::<Quaternion>(n);
    let su = graded_dimensions::<Complex>(n);
    let expect_sp = [(-2, 3), (-1, 4 * n), (1, 4 * n), (2, 3)];
    for (k, d) in expect_sp {
        let found = sp.iter().find(|(g, _)| *g == k).map_or(0, |(_, v)| *v);
        out.record(found == d, || format!("dim g_{k} = {found}, expected {d}"));
    }
    let total: usize = sp.iter().map(|(_, d)| d).sum();
    out.record(total == (n + 2) * (2 * n + 5), || format!("dim sp(Q) = {total}"));
    let su_m1 = su.iter().find(|(g, _)| *g == -1).map_or(0, |(_, v)| *v);
    out.record(su_m1 == 4 * n + 4, || format!("dim g~_-1 = {su_m1}"));
    let su_total: usize = su.iter().map(|(_, d)| d).sum();
    let m = 2 * n + 4;
    out.record(su_total == m * m - 1, || format!("dim su(Q~) = {su_total}"));
    out
}

fn parabolic_preimage_structural(n: usize) -> ExactCheck {
    let mut out = ExactCheck::default();
    let basis = parabolic_preimage_basis(n);
    for b in &basis {
        out.record(b.in_parabolic(), || format!("{b} maps into p~ but is not in p"));
    }
    let dim_g: usize = graded_dimensions::<Quaternion>(n).iter().map(|(_, d)| d).sum();
    let dim_p = dim_g - (4 * n + 3);
    out.record(basis.len() == dim_p - 2, || format!("dim phi^-1(p~) = {}, expected {}", basis.len(), dim_p - 2));
    out
}

fn rho_agreement_check(rng: &mut SampleRng, n: usize, trials: usize) -> Result<ExactCheck> {
    let mut out = ExactCheck::default();
    for _ in 0..trials {
        let g = sample_g0(rng, n);
        let x = sampling::h_vector(rng, n);
        let p = sampling::imaginary_quaternion(rng);
        let ad_x = adjoint(&g, &minus1(x.clone())?);
        out.record(ad_x == minus1(rho_minus1(&g, &x)?)?, || format!("rho_-1 vs Ad at g = {g}, x = {x:?}"));
        let ad_p = adjoint(&g, &minus2(n, p.clone())?);
        out.record(ad_p == minus2(n, rho_minus2(&g, &p)?)?, || format!("rho_-2 vs Ad at g = {g}, p = {p}"));
        let m = sampling::sp_generic(rng, n);
        out.record(preserves_grading(&g, &m), || format!("Ad({g}) mixes grades of {m}"));
    }
    Ok(out)
}

/// Exact suite over the graded algebras, the embedding, the Levi factor
/// actions and the correspondence algebra.
pub fn run_algebra_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let n = cfg.n;
    let t = cfg.trials;
    let mut rng = rng_from_seed(cfg.seed);
    let phi_map: fn(&QMatrix) -> CMatrix = if cfg.inject_phi_fault { phi_negated_v } else { phi };
    let mut checks = vec![
        CheckReport::exact(
            "bracket_grading_basis",
            "[g_i, g_j] ⊂ g_{i+j} on all basis pairs",
            sp_basis(n).len().pow(2),
            &bracket_grading_structural(n),
        ),
        CheckReport::exact("graded_dimensions", "dim g_k = (3, 4n, ·, 4n, 3); dim g~_-1 = 4n+4", 1, &dimension_structural(n)),
        CheckReport::exact(
            "parabolic_preimage",
            "phi^-1(p~) ⊂ p, of codimension 2 in p",
            1,
            &parabolic_preimage_structural(n),
        ),
        CheckReport::exact("vertical_map", "J_0 on phi_-1[(j,0)]_0 and phi_-1[(k,0)]_0", 1, &corr::vertical_map_check(n)?),
        CheckReport::exact(
            "identification_dimensions",
            "rank D~ = dim g~_-1 = 4n+4, dim M~ = 4n+5",
            1,
            &corr::dimension_check(n),
        ),
        CheckReport::exact("bracket_table", "structure constants rebuild every basis bracket", 1, &verify_bracket_table(n, &bracket_table(n))?),
    ];
    checks.push(random_check("phi_minus1_closed_form", "closed-form phi_-1 = proj_{g~_-1} ∘ phi, per grade", t, || {
        Ok(closed_form_check(&mut rng, n, t))
    })?);
    checks.push(random_check("phi_homomorphism", "phi([M,N]) = [phi M, phi N]", t, || {
        Ok(homomorphism_check(&mut rng, n, t, phi_map))
    })?);
    checks.push(random_check(
        "phi_filtration",
        "phi(p+) ⊂ p~, phi(g^-1) ⊂ g~^-1, phi(M) ∈ p~ ⇒ M ∈ p",
        t,
        || {
            let r = filtration_compat_check(&mut rng, n, t);
            let mut out = ExactCheck { instances: 3 * t, failures: Vec::new() };
            out.failures.extend(r.counterexamples.into_iter().map(|(name, m)| format!("{name}: {m}")));
            Ok(out)
        },
    )?);
    checks.push(random_check("bracket_grading_random", "[g_i, g_j] ⊂ g_{i+j} on random elements", t, || {
        Ok(bracket_grading_random(&mut rng, n, t))
    })?);
    checks.push(random_check("jacobi", "Jacobi identity in sp(Q)", t, || Ok(jacobi_check(&mut rng, n, t)))?);
    checks.push(random_check("rho_agreement", "Ad(g) on g_-1, g_-2 equals rho_-1, rho_-2", t, || {
        rho_agreement_check(&mut rng, n, t)
    })?);
    let (fiber, line) = corr::stabilizer_check(&mut rng, n, t);
    checks.push(random_check("stabilizer_fiber", "rho_0(g) i = i ⇔ z ∈ U(1)", t, || Ok(fiber))?);
    checks.push(random_check("stabilizer_line", "Phi(g) preserves C d0 ⇔ z ∈ U(1); scalings do", t, || Ok(line))?);
    checks.push(random_check("ad_conjugation", "Ad(g_I^-1)[-z_I j z̄_I]_-2 = [-j]_-2 and the k analogue", t, || {
        corr::ad_conjugation_check(&mut rng, n, t)
    })?);
    checks.push(random_check("reeb_tuples", "(0, s, 0, -1), (0, -s i, 0, i) and J_0 between them", t, || {
        corr::reeb_tuple_check(&mut rng, n, t)
    })?);
    checks.push(random_check("horizontal_map", "J_0 phi_-1[x]_-1 = phi_-1[x i-bar]_-1", t, || {
        corr::horizontal_map_check(&mut rng, n, t)
    })?);
    checks.push(random_check("cross_product_frame", "(I, J, K) oriented orthonormal, I × K = -J", t, || {
        Ok(corr::cross_product_check(&mut rng, t))
    })?);
    let mut unlifted = 0;
    let audit = if t > 0 { Some(corr::identification_audit(&mut rng, n, t)?) } else { None };
    if let Some(a) = &audit {
        unlifted = a.orbit_unlifted;
    }
    checks.push(random_check("orbit_map", "rho_0(z_I) i = I for every rational lift", t, || {
        Ok(audit.as_ref().map(|a| a.orbit.clone()).unwrap_or_default())
    })?);
    checks.push(random_check("right_action", "((u,q).g).h = (u,q).(gh)", t, || {
        Ok(audit.as_ref().map(|a| a.right_action.clone()).unwrap_or_default())
    })?);
    let mut report = Report::new("algebra", cfg, checks);
    if unlifted > 0 {
        report.warnings.push(format!("{unlifted} sampled points of S^2 have no rational lift z_I"));
    }
    Ok(report)
}

/// Exact and numeric checks on the flat model and its twistor space.
pub fn run_model_suite(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let n = cfg.n;
    let t = cfg.trials;
    let mut rng = rng_from_seed(cfg.seed);
    let flat = flat::build_flat_qc(n)?;
    let mut checks = Vec::new();

    let mut coeff = ExactCheck::default();
    let solved = flat::solve_bilinear_coefficient(n)?;
    coeff.record(solved == Rational::from_integer(flat::ETA_BILINEAR_COEFFICIENT.into()), || {
        format!("solved coefficient {solved}")
    });
    checks.push(CheckReport::exact("bilinear_coefficient", "η^a coefficient solved from dη = 2g(I·,·)", 1, &coeff));
    checks.push(CheckReport::exact("structure_equation", "dη^a(u,v) = 2 g(I_a u, v) on D", 1, &flat::check_structure_equation(&flat)));
    checks.push(CheckReport::exact(
        "reeb_conditions",
        "ξ_a ⌟ η^b = δ_a^b, (ξ_a ⌟ dη^b)|_D = -(ξ_b ⌟ dη^a)|_D",
        1,
        &flat::check_reeb_conditions(&flat),
    ));
    checks.push(CheckReport::exact("closed_forms", "d(dη^a) = 0", 1, &flat::check_closed(&flat)));
    checks.push(CheckReport::exact("quaternion_relations", "I_a^2 = -1, I_1 I_2 = I_3, I_a orthogonal", 1, &flat::check_quaternion_relations(&flat)));
    checks.push(match flat::duchemin_check(&flat) {
        Ok(d) => {
            let mut c = ExactCheck::default();
            c.record(d.passed(), || format!("{d:?}"));
            CheckReport::exact("duchemin", "dη^a|_D oriented orthonormal in Λ²₊D*", 1, &c)
        }
        Err(Error::WrongDimension { .. }) => {
            CheckReport::skipped("duchemin", "dη^a|_D oriented orthonormal in Λ²₊D*", "only defined for n = 1")
        }
        Err(e) => return Err(e),
    });

    let charts: Vec<flat::TwistorChart> = (0..t).map(|_| flat::sample_chart(&mut rng, &flat)).collect();
    checks.push(random_check("cr_structure", "rank H = 4n+4, (J^Z)^2 = -Id, rank D = 4n", t, || {
        Ok(exact_cr_check(&flat, &charts))
    })?);
    checks.push(random_check("chart_overlap", "J^Z on Ver agrees in both fibre charts", t, || {
        let mut c = ExactCheck::default();
        for ch in &charts {
            let a = ch.point.coefficients();
            if a[0] == Rational::one() || a[0] == -Rational::one() {
                continue;
            }
            let ok = flat::chart_overlap_consistent(&ch.point)?;
            c.record(ok, || format!("charts disagree at {}", ch.point));
        }
        Ok(c)
    })?);

    let mut report_warnings = Vec::new();
    let mut samples = Vec::new();
    if t == 0 {
        checks.push(CheckReport::skipped("levi_signature", "Levi form of signature (4n+2, 2)", "trials = 0"));
        checks.push(CheckReport::skipped("integrability", "[X,Y]-[JX,JY] ∈ H and Nijenhuis residual", "trials = 0"));
        checks.push(CheckReport::skipped("perturbation_probe", "J + εE is detected as non-integrable", "trials = 0"));
    } else {
        let levi = flat::levi_signature(&flat, &charts, &cfg.numeric)?;
        for (idx, row) in levi.rows.iter().enumerate() {
            if row.degenerate {
                report_warnings.push(format!(
                    "sample {idx}: degenerate Levi form, min |eigenvalue| = {:e} <= {:e}",
                    row.min_eig, cfg.numeric.eig_floor
                ));
            }
        }
        let bad = levi.rows.iter().position(|r| r.degenerate || r.signature != levi.expected);
        checks.push(CheckReport::numeric(
            "levi_signature",
            "Levi form of signature (4n+2, 2)",
            t,
            levi.passed(),
            levi.min_eig,
            bad.map(|i| {
                let r = &levi.rows[i];
                format!("sample {i}: signature {:?}, min |eigenvalue| {:e}", r.signature, r.min_eig)
            }),
        ));
        let worst = levi.rows.iter().map(|r| r.residuals.max()).fold(0.0, f64::max);
        let bad = levi.rows.iter().position(|r| !(r.residuals.max() < cfg.numeric.residual_tol));
        checks.push(CheckReport::numeric(
            "integrability",
            "[X,Y]-[JX,JY] ∈ H and Nijenhuis residual",
            t,
            bad.is_none(),
            worst,
            bad.map(|i| format!("sample {i}: residuals {:?}", levi.rows[i].residuals)),
        ));
        let probe = flat::integrability_residual(&flat, &charts, &cfg.numeric, PERTURBATION)?;
        checks.push(CheckReport::numeric(
            "perturbation_probe",
            "J + εE is detected as non-integrable",
            t,
            probe > PROBE_THRESHOLD,
            probe,
            (probe <= PROBE_THRESHOLD).then(|| format!("perturbed residual {probe:e} <= {PROBE_THRESHOLD:e}")),
        ));
        samples = levi.rows;
    }
    let mut report = Report::new("model", cfg, checks);
    report.warnings = report_warnings;
    report.samples = samples;
    Ok(report)
}

/// Size `ε` of the perturbation probe.
pub const PERTURBATION: f64 = 0.1;
/// Residual the perturbation probe must exceed.
pub const PROBE_THRESHOLD: f64 = 1e-3;

fn exact_cr_check(flat: &FlatQC, charts: &[flat::TwistorChart]) -> ExactCheck {
    let n = flat.n();
    let mut c = ExactCheck::default();
    for ch in charts {
        let cr = flat::cr_structure_at(flat, ch);
        let rank = cr.rank();
        c.record(rank == 4 * n + 4, || format!("rank H = {rank} at {}", ch.point));
        c.record(cr.squares_to_minus_identity(), || format!("J^2 != -Id at {}", ch.point));
        let d_rank = flat::distribution_rank_at(flat, &ch.base);
        c.record(d_rank == 4 * n, || format!("rank D = {d_rank}"));
    }
    c
}

/// Runs both suites and merges the reports.
pub fn run_all(cfg: &SuiteConfig) -> Result<Report> {
    let algebra = run_algebra_suite(cfg)?;
    let model = run_model_suite(cfg)?;
    Ok(Report::combine("all", cfg, vec![algebra, model]))
}

pub const BRACKET_CSV_HEADER: &str = "i,j,k,coeff_re,coeff_im_i,coeff_im_j,coeff_im_k";

#[derive(Serialize, Deserialize)]
struct BracketRecord {
    i: usize,
    j: usize,
    k: usize,
    coeff: [String; 4],
}

/// Serializes a bracket table. Coefficients are written as exact rationals.
pub fn render_bracket_table(n: usize, rows: &[BracketRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut s = String::from(BRACKET_CSV_HEADER);
            s.push('\n');
            for r in rows {
                let [w, x, y, z] = r.coeff.components();
                let _ = writeln!(s, "{},{},{},{w},{x},{y},{z}", r.i, r.j, r.k);
            }
            Ok(s)
        }
        Format::Json => {
            let records: Vec<BracketRecord> = rows
                .iter()
                .map(|r| BracketRecord { i: r.i, j: r.j, k: r.k, coeff: r.coeff.components().map(ToString::to_string) })
                .collect();
            let doc = serde_json::json!({ "schema": SCHEMA_VERSION, "n": n, "rows": records });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        Format::Text => {
            let basis = sp_basis(n);
            let slots = sp_slots(n);
            let mut s = String::new();
            for r in rows {
                let _ = writeln!(s, "[{}, {}] ∋ ({}) in slot {}", basis[r.i].label, basis[r.j].label, r.coeff, slots[r.k].label);
            }
            Ok(s)
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

fn parse_index(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Parses a CSV or JSON bracket table.
pub fn parse_bracket_table(text: &str, format: Format) -> Result<Vec<BracketRow>> {
    match format {
        Format::Csv => {
            let mut lines = text.lines();
            if lines.next().map(str::trim) != Some(BRACKET_CSV_HEADER) {
                return Err(Error::Parse("missing bracket table header".into()));
            }
            lines
                .filter(|l| !l.trim().is_empty())
                .map(|line| {
                    let f: Vec<&str> = line.split(',').collect();
                    if f.len() != 7 {
                        return Err(Error::Parse(format!("expected 7 fields in {line:?}")));
                    }
                    Ok(BracketRow {
                        i: parse_index(f[0])?,
                        j: parse_index(f[1])?,
                        k: parse_index(f[2])?,
                        coeff: Quaternion::new(
                            parse_rational(f[3])?,
                            parse_rational(f[4])?,
                            parse_rational(f[5])?,
                            parse_rational(f[6])?,
                        ),
                    })
                })
                .collect()
        }
        Format::Json => {
            #[derive(Deserialize)]
            struct Doc {
                rows: Vec<BracketRecord>,
            }
            let doc: Doc = serde_json::from_str(text)?;
            doc.rows
                .into_iter()
                .map(|r| {
                    let [w, x, y, z] = &r.coeff;
                    Ok(BracketRow {
                        i: r.i,
                        j: r.j,
                        k: r.k,
                        coeff: Quaternion::new(parse_rational(w)?, parse_rational(x)?, parse_rational(y)?, parse_rational(z)?),
                    })
                })
                .collect()
        }
        Format::Text => Err(Error::InvalidConfig("text bracket tables cannot be reloaded".into())),
    }
}

/// Rebuilds each `[b_i, b_j]` from the table and compares with the bracket,
/// and checks antisymmetry of the table.
pub fn verify_bracket_table(n: usize, rows: &[BracketRow]) -> Result<ExactCheck> {
    let basis = sp_basis(n);
    let nslots = sp_slots(n).len();
    let nb = basis.len();
    let mut values = vec![vec![Quaternion::zero(); nslots]; nb * nb];
    let mut out = ExactCheck::default();
    for r in rows {
        if r.i >= nb || r.j >= nb || r.k >= nslots {
            out.record(false, || format!("row ({}, {}, {}) out of range", r.i, r.j, r.k));
            continue;
        }
        values[r.i * nb + r.j][r.k] = r.coeff.clone();
    }
    for i in 0..nb {
        for j in 0..nb {
            if i == j {
                continue;
            }
            let actual = basis[i].element.bracket(&basis[j].element)?;
            let rebuilt = from_slot_values(n, &values[i * nb + j]);
            let ok = rebuilt.as_ref().is_ok_and(|m| *m == actual);
            out.record(ok, || format!("[{}, {}] differs from table", basis[i].label, basis[j].label));
            let anti = values[i * nb + j].iter().zip(&values[j * nb + i]).all(|(a, b)| *a == -b.clone());
            out.record(anti, || format!("table not antisymmetric at ({i}, {j})"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutated_phi_is_caught() {
        let mut rng = rng_from_seed(1);
        let check = homomorphism_check(&mut rng, 1, 10, phi_negated_v);
        assert!(!check.passed());
        let mut rng = rng_from_seed(1);
        assert!(homomorphism_check(&mut rng, 1, 10, phi).passed());
    }

    #[test]
    fn bracket_table_csv_round_trip() {
        let rows = bracket_table(1);
        let csv = render_bracket_table(1, &rows, Format::Csv).unwrap();
        let back = parse_bracket_table(&csv, Format::Csv).unwrap();
        assert_eq!(back, rows);
        assert_eq!(render_bracket_table(1, &back, Format::Csv).unwrap(), csv);
        assert!(verify_bracket_table(1, &back).unwrap().passed());
        let json = render_bracket_table(1, &rows, Format::Json).unwrap();
        assert_eq!(parse_bracket_table(&json, Format::Json).unwrap(), rows);
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let mut rows = bracket_table(1);
        rows[0].coeff = rows[0].coeff.clone() + Quaternion::one();
        assert!(!verify_bracket_table(1, &rows).unwrap().passed());
    }

    #[test]
    fn config_validation() {
        assert!(SuiteConfig { n: 0, ..Default::default() }.validate().is_err());
        assert!(SuiteConfig { n: 5, ..Default::default() }.validate().is_err());
        let mut cfg = SuiteConfig::default();
        cfg.numeric.fd_step = 0.0;
        assert!(cfg.validate().is_err());
    }
}
