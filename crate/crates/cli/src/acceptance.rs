//! Acceptance criteria 1 to 10, runnable from `fliess-kit suite <name>` and
//! from the `acceptance` test target.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use fliess_core::bounds::{
    a112487, binomial_constant, bk_table, phi, verify_bk_majorant, verify_composition_bound,
    verify_shuffle_bound, verify_shuffle_power_sum,
};
use fliess_core::evolution::{
    evolve, one_parameter_check, shuffle_volterra, startode_residual, volterra_derivative_residual,
    SeriesCurve,
};
use fliess_core::fliess::{
    cascade_check, feedback_check, fliess_eval, iterated_integral, realization_to_series,
    InputSignal, PolynomialRealization,
};
use fliess_core::groups::{
    group_inverse, group_product, shuffle_inverse, shuffle_quotient, UnitalSeries,
};
use fliess_core::poly::VarNames;
use fliess_core::products::shuffle;
use fliess_core::scalar::factorial;
use fliess_core::series::random_ball_series;
use fliess_core::{Alphabet, Polynomial, Rational, Result, Series, Word};

/// Suite names accepted by `fliess-kit suite`.
pub const SUITES: [&str; 5] = [
    "group-axioms",
    "shuffle-group",
    "bounds",
    "fliess-numeric",
    "evolution",
];

/// Criteria run by a suite.
pub fn suite_criteria(name: &str) -> Option<&'static [usize]> {
    Some(match name {
        "group-axioms" => &[3],
        "shuffle-group" => &[4],
        "bounds" => &[1, 2, 5, 6],
        "fliess-numeric" => &[7, 8],
        "evolution" => &[9, 10],
        _ => return None,
    })
}

/// Reference `b_0(K), ..., b_7(K)`.
pub const REFERENCE_BK: [&str; 8] = [
    "-1",
    "-1 + K",
    "-2 + 5*K - 3*K^2",
    "-6 + 26*K - 35*K^2 + 15*K^3",
    "-24 + 154*K - 340*K^2 + 315*K^3 - 105*K^4",
    "-120 + 1044*K - 3304*K^2 + 4900*K^3 - 3465*K^4 + 945*K^5",
    "-720 + 8028*K - 33740*K^2 + 70532*K^3 - 78750*K^4 + 45045*K^5 - 10395*K^6",
    "-5040 + 69264*K - 367884*K^2 + 1008980*K^3 - 1571570*K^4 + 1406790*K^5 - 675675*K^6 + 135135*K^7",
];

/// Reference majorant values `b̄_0, ..., b̄_6`.
pub const REFERENCE_BBAR: [i64; 7] = [1, 2, 10, 82, 938, 13778, 247210];

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// `criterion <id> <PASS|FAIL>: <title> (<passed>/<total> checks, <secs> s)`
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}: {} ({}/{} checks, {:.2} s)",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }

    /// Per-check lines followed by [`line`](Self::line).
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  [{}] {}: {}",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        let _ = writeln!(out, "{}", self.line());
        out
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// Records an error from a step as a failed check.
    fn guard<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.add(name, false, format!("{}: {e}", e.name()));
                None
            }
        }
    }
}

const TITLES: [&str; 10] = [
    "b_k table reproduction",
    "A112487 majorant",
    "output-feedback group axioms",
    "shuffle group",
    "shuffle and composition bound lemmas",
    "shuffle-power majorant",
    "interconnection numerics",
    "realization conversion",
    "evolution solver",
    "Volterra series",
];

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: usize) -> CriterionReport {
    let start = Instant::now();
    let mut c = Checks(Vec::new());
    match id {
        1 => criterion_1(&mut c),
        2 => criterion_2(&mut c),
        3 => criterion_3(&mut c),
        4 => criterion_4(&mut c),
        5 => criterion_5(&mut c),
        6 => criterion_6(&mut c),
        7 => criterion_7(&mut c),
        8 => criterion_8(&mut c),
        9 => criterion_9(&mut c),
        10 => criterion_10(&mut c),
        _ => c.add("criterion id", false, format!("no criterion {id}")),
    }
    CriterionReport {
        id,
        title: TITLES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        checks: c.0,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<CriterionReport> {
    (1..=10).map(run_criterion).collect()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn reference_table() -> Vec<Polynomial> {
    let mut names = VarNames::new(&["K", "M"]);
    REFERENCE_BK
        .iter()
        .map(|t| Polynomial::parse(t, &mut names).expect("fixed text"))
        .collect()
}

fn criterion_1(c: &mut Checks) {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = crate::run_with(
        ["fliess-kit", "bk-table", "--kmax", "7"],
        &mut out,
        &mut err,
    );
    let elapsed = start.elapsed();
    let text = String::from_utf8_lossy(&out).to_string();
    c.add(
        "command exit",
        code == 0,
        format!(
            "bk-table --kmax 7 exited {code} {}",
            String::from_utf8_lossy(&err).trim()
        ),
    );
    if code != 0 {
        return;
    }
    let header = text.lines().next().unwrap_or("");
    c.add(
        "normalization header",
        header.contains("b_k(K) * K * M^k")
            && header.contains("no k!")
            && header.contains("agree exactly"),
        header.to_string(),
    );
    let reference = reference_table();
    let mut names = VarNames::new(&["K", "M"]);
    let mut matched = 0;
    for (k, expected) in reference.iter().enumerate() {
        let prefix = format!("b_{k}(K) = ");
        let got = text
            .lines()
            .find_map(|l| l.strip_prefix(&prefix))
            .and_then(|p| Polynomial::parse(p, &mut names).ok());
        if got.as_ref() == Some(expected) {
            matched += 1;
        } else {
            c.add(
                format!("b_{k}"),
                false,
                format!("expected {} but computed {:?}", REFERENCE_BK[k], got),
            );
        }
    }
    c.add(
        "reference polynomials",
        matched == 8,
        format!("{matched}/8 match coefficient-exactly"),
    );
    // the command raises OracleMismatch unless the two computations agree
    if let Some(table) = c.guard("oracles", bk_table(7)) {
        c.add(
            "Lie derivative vs group inverse",
            table.coefficients.len() == 8,
            "exact symbolic agreement in K, M for k <= 7",
        );
    }
    c.add(
        "runtime",
        elapsed < Duration::from_secs(30),
        format!("{:.3} s < 30 s", elapsed.as_secs_f64()),
    );
}

fn criterion_2(c: &mut Checks) {
    let bbar = a112487(7);
    let reference_ok = REFERENCE_BBAR
        .iter()
        .zip(&bbar)
        .all(|(p, b)| b.to_string() == p.to_string());
    c.add(
        "majorant sequence",
        reference_ok,
        format!(
            "second-order Eulerian sums {:?}; reference values agree, bbar_7 derived",
            bbar.iter().map(|b| b.to_string()).collect::<Vec<_>>()
        ),
    );
    if let Some(table) = c.guard("b_k table", bk_table(7)) {
        let r = verify_bk_majorant(&table, 7, 10);
        c.add(
            "|b_k(K)| <= bbar_k on K = 0, 0.1, ..., 1",
            r.pass,
            format!("{} (worst {})", r.summary(), r.witness),
        );
    }
}

fn criterion_3(c: &mut Checks) {
    let start = Instant::now();
    let n = 6;
    let alphabet = Alphabet::siso();
    let one = q(1, 1);
    let id = UnitalSeries::<Rational>::identity(alphabet, n);
    let (mut assoc, mut ident, mut inv, mut round) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for t in 0..25u64 {
        let draw = |k: u64| {
            UnitalSeries::new(random_ball_series(
                one.clone(),
                one.clone(),
                n,
                1,
                1000 + 3 * t + k,
            ))
            .expect("m components")
        };
        let (a, b, d) = (draw(0), draw(1), draw(2));
        let result = (|| -> Result<[bool; 4]> {
            let ab = group_product(&a, &b, n)?;
            let lhs = group_product(&ab, &d, n)?;
            let rhs = group_product(&a, &group_product(&b, &d, n)?, n)?;
            let identity = group_product(&a, &id, n)? == a && group_product(&id, &a, n)? == a;
            let ai = group_inverse(&a, n)?;
            let inverse = group_product(&a, &ai, n)?.is_identity()
                && group_product(&ai, &a, n)?.is_identity();
            let abi = group_inverse(&ab, n)?;
            let roundtrip = group_product(&ab, &abi, n)?.is_identity()
                && abi == group_product(&group_inverse(&b, n)?, &ai, n)?;
            Ok([lhs == rhs, identity, inverse, roundtrip])
        })();
        match result {
            Ok(r) => {
                assoc += r[0] as usize;
                ident += r[1] as usize;
                inv += r[2] as usize;
                round += r[3] as usize;
            }
            Err(e) => failures.push(format!("triple {t}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    c.add(
        "associativity",
        assoc == 25,
        format!("{assoc}/25 triples exact at N = {n}"),
    );
    c.add("identity", ident == 25, format!("{ident}/25"));
    c.add("two-sided inverse", inv == 25, format!("{inv}/25"));
    c.add(
        "inverse round trip",
        round == 25,
        format!("{round}/25; (ab)^-1 = b^-1 a^-1 and (ab)(ab)^-1 = delta"),
    );
    if !failures.is_empty() {
        c.add("errors", false, failures.join("; "));
    }
    c.add(
        "runtime",
        elapsed < Duration::from_secs(60),
        format!("{:.3} s < 60 s", elapsed.as_secs_f64()),
    );
}

fn criterion_4(c: &mut Checks) {
    let l = 8;
    let alphabet = Alphabet::siso();
    let one = Series::one(alphabet, l);
    let (mut inv_ok, mut quot_ok) = (0, 0);
    for seed in 0..25u64 {
        let mut s = random_ball_series(q(1, 1), q(1, 1), l, 1, 2000 + seed);
        if s.coeff(0, &Word::empty()).map_or(true, |v| v == q(0, 1)) {
            s.add_term(0, Word::empty(), q(1, 1));
        }
        if let Some(inv) = c.guard("shuffle inverse", shuffle_inverse(&s, l)) {
            if shuffle(&s, &inv, l).ok().as_ref() == Some(&one) {
                inv_ok += 1;
            }
        }
        if shuffle_quotient(&s, &s, l).ok().as_ref() == Some(&one) {
            quot_ok += 1;
        }
    }
    c.add(
        "c ⧢ c^-1 = 1",
        inv_ok == 25,
        format!("{inv_ok}/25 exact at L = {l}"),
    );
    c.add(
        "c / c = 1",
        quot_ok == 25,
        format!("{quot_ok}/25 exact at L = {l}"),
    );
}

fn criterion_5(c: &mut Checks) {
    let r = verify_shuffle_bound(&q(1, 1), &q(1, 2), 5, 200, 7);
    let random = r
        .lines
        .iter()
        .find(|l| l.starts_with("random pairs"))
        .cloned()
        .unwrap_or_default();
    c.add(
        "shuffle bound, 200 pairs",
        r.pass,
        format!("{} ({random})", r.summary()),
    );
    let eq = r
        .lines
        .iter()
        .find(|l| l.starts_with("equality case"))
        .cloned()
        .unwrap_or_default();
    c.add(
        "equality case ratio = 1",
        eq.contains("ratio = 1 (exact), pass=true"),
        eq,
    );
    if let Some(r) = c.guard(
        "composition bound",
        verify_composition_bound(&q(1, 1), &q(1, 2), 4, 100, 7),
    ) {
        c.add("composition bound, 100 pairs", r.pass, r.summary());
    }
    let exact = 1.5 + 5.25f64.sqrt();
    c.add(
        "phi(3)",
        (phi(3.0) - exact).abs() < 1e-10 && (phi(3.0) - 3.79129).abs() < 5e-6,
        format!("phi(3) = {:.16e}", phi(3.0)),
    );
}

fn criterion_6(c: &mut Checks) {
    let (k, n, len) = binomial_constant(12, 12);
    c.add(
        "binomial scan",
        k == q(1, 4),
        format!("K = {k} at n = {n}, |eta| = {len}"),
    );
    if let Some(r) = c.guard(
        "shuffle-power",
        verify_shuffle_power_sum(&q(1, 1), 64, 8, 3),
    ) {
        let n_line = r
            .lines
            .iter()
            .find(|l| l.starts_with("N ="))
            .cloned()
            .unwrap_or_default();
        c.add(
            "|d^n|_4N <= K/2^n for n <= 8",
            r.pass,
            format!("{} ({n_line})", r.summary()),
        );
    }
}

/// Polynomial with coefficients uniform on a lattice in `[-1, 1]`.
fn unit_polynomial(trunc: usize, seed: u64) -> Series<f64> {
    let s = random_ball_series(q(1, 1), q(1, 1), trunc, 1, seed);
    let mut out = Series::zero(Alphabet::siso(), 1, trunc);
    for (_, w, v) in s.terms() {
        let scaled = v / factorial::<Rational>(w.len());
        out.add_term(
            0,
            w.clone(),
            num_traits::ToPrimitive::to_f64(&scaled).expect("finite"),
        );
    }
    // a polynomial, so its coefficients beyond length 3 are zero
    out.extend_as_polynomial(8)
}

fn criterion_7(c: &mut Checks) {
    let horizon = 0.05;
    let u = InputSignal::from_fn(0.0, horizon, 2048, 1, |t| vec![(40.0 * t).cos()])
        .expect("valid grid");
    let (mut prod, mut casc, mut fb) = (0.0f64, 0.0f64, 0.0f64);
    let mut errors = Vec::new();
    for seed in 0..5u64 {
        let cs = unit_polynomial(3, 3000 + 2 * seed);
        let ds = unit_polynomial(3, 3001 + 2 * seed);
        let r = (|| -> Result<(f64, f64, f64)> {
            let fc = fliess_eval(&cs, &u, horizon)?.y[0];
            let fd = fliess_eval(&ds, &u, horizon)?.y[0];
            let fcd = fliess_eval(&shuffle(&cs, &ds, 6)?, &u, horizon)?.y[0];
            let cr = cascade_check(&cs, &ds, &u, horizon, 8)?;
            let fr = feedback_check(&cs, &ds, &u, horizon, 8, 40)?;
            Ok(((fc * fd - fcd).abs(), cr, fr))
        })();
        match r {
            Ok((p, cr, fr)) => {
                prod = prod.max(p);
                casc = casc.max(cr);
                fb = fb.max(fr);
            }
            Err(e) => errors.push(format!("pair {seed}: {e}")),
        }
    }
    c.add(
        "F_c F_d = F_{c⧢d}",
        errors.is_empty() && prod <= 1e-6,
        format!("max residual {prod:.3e} <= 1e-6 over 5 pairs"),
    );
    c.add(
        "cascade",
        errors.is_empty() && casc <= 1e-4,
        format!("max residual {casc:.3e} <= 1e-4"),
    );
    c.add(
        "feedback loop vs F_{c@d}",
        errors.is_empty() && fb <= 1e-3,
        format!("max residual {fb:.3e} <= 1e-3"),
    );
    if !errors.is_empty() {
        c.add("errors", false, errors.join("; "));
    }
    // pure quadrature error under grid halving
    let mut ratios = Vec::new();
    let (s1, c1) = (
        (40.0 * horizon).sin() / 40.0,
        (1.0 - (40.0 * horizon).cos()) / 1600.0,
    );
    let words: Vec<(Word, f64)> = vec![
        (Word::letter(1), s1),
        (Word::parse("x0x1").expect("word"), c1),
        (Word::parse("x1x1").expect("word"), s1 * s1 / 2.0),
        (Word::power(0, 3), horizon.powi(3) / 6.0),
    ];
    for (w, exact) in &words {
        let err = |points: usize| -> Result<f64> {
            let v = InputSignal::from_fn(0.0, horizon, points, 1, |t| vec![(40.0 * t).cos()])?;
            Ok((iterated_integral(w, &v, horizon)? - exact).abs())
        };
        if let (Some(a), Some(b)) = (
            c.guard("quadrature", err(257)),
            c.guard("quadrature", err(513)),
        ) {
            ratios.push((w.to_string(), a / b));
        }
    }
    let ok = ratios.iter().all(|(_, r)| (3.5..4.5).contains(r));
    let detail = ratios
        .iter()
        .map(|(w, r)| format!("{w}: {r:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    c.add("quadrature error ratio per halving ≈ 4", ok, detail);
}

fn criterion_8(c: &mut Checks) {
    let symbolic_one =
        |s: &Series<Polynomial>, word: &Word| s.coeff(0, word).ok().map(|p| p.as_constant());
    if let Some(s) = c.guard(
        "ż = u",
        PolynomialRealization::parse("state z\ng1: 1\nh: z\nz0: 0")
            .and_then(|r| realization_to_series(&r, 6)),
    ) {
        let x1 = Word::letter(1);
        c.add(
            "ż = u, y = z, z0 = 0 gives x1",
            s.support() == vec![x1.clone()] && symbolic_one(&s, &x1) == Some(Some(q(1, 1))),
            format!(
                "support {:?}",
                s.support()
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
            ),
        );
    }
    if let Some(s) = c.guard(
        "ż = zu",
        PolynomialRealization::parse("state z\ng1: z\nh: z\nz0: 1")
            .and_then(|r| realization_to_series(&r, 6)),
    ) {
        let expected: Vec<Word> = (0..=6).map(|k| Word::power(1, k)).collect();
        let ones = expected
            .iter()
            .all(|w| symbolic_one(&s, w) == Some(Some(q(1, 1))));
        c.add(
            "ż = zu, y = z, z0 = 1 gives Σ x1^k",
            s.support() == expected && ones,
            "L = 6, all coefficients 1",
        );
    }
    let text = "state z\nparam K M\ng0: M/K*(z^2 - z^3)\ng1: z^2\nh: -z\nz0: K";
    let r = c.guard("inverse realization", PolynomialRealization::parse(text));
    let table = c.guard("b_k table", bk_table(7));
    if let (Some(r), Some(table)) = (r, table) {
        if let Some(s) = c.guard("inverse realization series", realization_to_series(&r, 7)) {
            let mut names = table.names.clone();
            let mut agree = 0;
            for k in 0..=7 {
                let got = s
                    .coeff(0, &Word::power(0, k))
                    .map(|p| p.rename(&r.names, &mut names));
                if got.as_ref().ok() == Some(&table.coefficients[k]) {
                    agree += 1;
                }
            }
            c.add(
                "inverse realization reproduces (cbar^-1, x0^k)",
                agree == 8,
                format!("{agree}/8 symbolic matches in K, M"),
            );
        }
    }
}

fn criterion_9(c: &mut Checks) {
    let w = |s: &str| Word::parse(s).expect("word");
    let sf = |terms: &[(f64, &str)]| {
        Series::from_terms(Alphabet::siso(), 5, terms.iter().map(|&(v, t)| (v, w(t))))
    };
    let curve = SeriesCurve::polynomial(vec![
        sf(&[(0.5, "e"), (1.0, "x1"), (-0.3, "x0x1")]),
        sf(&[(0.25, "e"), (1.0, "x0"), (0.5, "x1x1")]),
        sf(&[(-1.0, "x1x0"), (0.2, "x1x1x1")]),
    ])
    .expect("same shape");
    if let Some(path) = c.guard("triangular access", evolve(&curve, 5, 256)) {
        let st = path.stats();
        let ok = st.max_level_read.iter().enumerate().all(|(n, &r)| r <= n);
        c.add(
            "triangular access at L = 5",
            ok,
            format!(
                "longest word read per level {:?}; lower-level reads {:?}",
                st.max_level_read, st.reads
            ),
        );
        c.add(
            "diagonal of C_n",
            st.diagonal_max.iter().all(|&d| d == 0.0),
            format!("max |(eta ◁ c, eta)| per level {:?}", st.diagonal_max),
        );
        if let Some(r) = c.guard("startODE", startode_residual(&curve, &path)) {
            c.add(
                "startODE words vs direct quadrature",
                r <= 1e-12,
                format!("max difference {r:.3e} <= 1e-12"),
            );
        }
    }
    let x1 = Series::from_terms(Alphabet::siso(), 4, [(1.0f64, w("x1"))]);
    let steps = [64usize, 128, 256];
    let residuals: Vec<f64> = steps
        .iter()
        .filter_map(|&s| c.guard("one-parameter residual", one_parameter_check(&x1, 4, s)))
        .collect();
    if residuals.len() == 3 {
        c.add(
            "one-parameter residual at 256 steps",
            residuals[2] <= 1e-8,
            format!("{:.3e} <= 1e-8", residuals[2]),
        );
        let ratios = [residuals[0] / residuals[1], residuals[1] / residuals[2]];
        c.add(
            "one-parameter residual ≈ 16x smaller per step doubling",
            ratios.iter().all(|r| (12.0..20.0).contains(r)),
            format!(
                "residuals {:?} at steps {steps:?}, ratios {ratios:?}; RK4 keeps the group law of this equation to roundoff",
                residuals.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>()
            ),
        );
    }
    if let Some(path) = c.guard(
        "evolve x1",
        evolve(&SeriesCurve::constant(x1.clone()), 4, 256),
    ) {
        let v = path.last().body().coeff(0, &w("x0x1")).unwrap_or(f64::NAN);
        c.add(
            "(gamma(1), x0x1) = 1/2",
            (v - 0.5).abs() <= 1e-8,
            format!("{v:.16e}"),
        );
    }
    // solver order on a curve where RK4 is not exact
    let mixed = SeriesCurve::constant(sf(&[(1.0, "x0"), (1.0, "x1"), (0.5, "e")]));
    let fine = c.guard("reference solve", evolve(&mixed, 5, 1024));
    let coarse: Vec<_> = [16usize, 32]
        .iter()
        .filter_map(|&s| c.guard("order solve", evolve(&mixed, 5, s)))
        .collect();
    if let (Some(fine), 2) = (fine, coarse.len()) {
        let err = |p: &fliess_core::evolution::GroupPath<f64>| {
            p.last()
                .body()
                .try_sub(fine.last().body())
                .map(|d| d.max_abs())
                .unwrap_or(f64::NAN)
        };
        let ratio = err(&coarse[0]) / err(&coarse[1]);
        c.add(
            "solution error ratio per step doubling",
            (12.0..20.0).contains(&ratio),
            format!("{ratio:.3} for c = 1/2 + x0 + x1, L = 5, steps 16 -> 32"),
        );
    }
}

fn criterion_10(c: &mut Checks) {
    let w = |s: &str| Word::parse(s).expect("word");
    let l = 5;
    let eta = Series::from_terms(
        Alphabet::siso(),
        l,
        [(1.0f64, w("x1")), (-0.5, w("x0x1")), (0.25, w("x1x1"))],
    );
    let curve = SeriesCurve::constant(eta.clone());
    for t in [0.5f64, 1.0] {
        let mut expected = Series::one(Alphabet::siso(), l);
        let mut power = Series::one(Alphabet::siso(), l);
        for n in 1..=l {
            power = shuffle(&power, &eta, l).expect("same shape");
            expected = expected
                .axpy(&(t.powi(n as i32) / factorial::<f64>(n)), &power)
                .expect("same shape");
        }
        if let Some(got) = c.guard("volterra", shuffle_volterra(&curve, &t, l, 256)) {
            let err = got
                .try_sub(&expected)
                .map(|d| d.max_abs())
                .unwrap_or(f64::NAN);
            c.add(
                format!("gamma({t}) = Σ t^n eta^n / n!"),
                err <= 1e-8,
                format!("max error {err:.3e} <= 1e-8 at L = {l}, 256 steps"),
            );
        }
    }
    let varying = SeriesCurve::polynomial(vec![
        eta.clone(),
        Series::from_terms(Alphabet::siso(), l, [(1.0f64, w("x0"))]),
    ])
    .expect("same shape");
    let res: Vec<f64> = [32usize, 64, 128]
        .iter()
        .filter_map(|&s| {
            c.guard(
                "derivative residual",
                volterra_derivative_residual(&varying, &1.0, l, s),
            )
        })
        .collect();
    if res.len() == 3 {
        let ratios = [res[0] / res[1], res[1] / res[2]];
        c.add(
            "derivative residual O(step^2)",
            ratios.iter().all(|r| (3.0..5.0).contains(r)),
            format!(
                "residuals {:?} at steps 32, 64, 128; ratios {ratios:.3?}",
                res.iter().map(|r| format!("{r:.3e}")).collect::<Vec<_>>()
            ),
        );
    }
}
