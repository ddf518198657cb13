//! Growth constants and numerical verification of the norm bounds for the
//! shuffle and composition products, the shuffle-power majorant, and the
//! `b_k(K)` polynomials bounding the group inverse of the extremal series.
//!
//! Norms are taken over the truncated support, so every check states "no
//! counterexample up to length L".

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fliess::lie_derivative;
use crate::groups::{group_inverse, UnitalSeries};
use crate::poly::{Monomial, Polynomial, VarNames};
use crate::products::{compose, shuffle};
use crate::scalar::{binomial, factorial, pow};
use crate::series::Series;
use crate::words::{Alphabet, Word};
use crate::Rational;

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `K_ε = sup_n (n+1)/(1+ε)^n` and the closed-form bound `K̂_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEpsilon {
    pub k: f64,
    pub k_hat: f64,
    /// Length attaining `K_ε`.
    pub argmax: usize,
}

/// Brute force over `n = 0..=⌈1/log(1+ε)⌉ + 2`, which brackets the
/// continuous maximizer `1/log(1+ε) − 1`.
pub fn k_epsilon(eps: f64) -> KEpsilon {
    assert!(eps > 0.0, "ε must be positive");
    let l = (1.0 + eps).ln();
    let n_star = (1.0 / l).ceil() as usize;
    let (argmax, k) = (0..=n_star + 2)
        .map(|n| (n, (n as f64 + 1.0) / (1.0 + eps).powi(n as i32)))
        .fold(
            (0, f64::MIN),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    KEpsilon {
        k,
        k_hat: (1.0 + eps) / (std::f64::consts::E * l),
        argmax,
    }
}

/// `max_{n ≤ L} (n+1)(1+a)^n / (1+ε)^n`, exact. With `a = 0` this is the
/// truncated `K_ε`.
pub fn k_epsilon_truncated(eps: &Rational, a: &Rational, trunc: usize) -> Rational {
    let q = (Rational::one() + a) / (Rational::one() + eps);
    (0..=trunc)
        .map(|n| rat(n as i64 + 1) * pow(&q, n))
        .max()
        .expect("nonempty range")
}

/// `φ(x) = x/2 + √(x²/4 + x)`.
pub fn phi(x: f64) -> f64 {
    x / 2.0 + (x * x / 4.0 + x).sqrt()
}

/// `φ^{-1}(y) = y²/(1+y)`.
pub fn phi_inverse(y: f64) -> f64 {
    y * y / (1.0 + y)
}

/// Outcome of one verification experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lemma: String,
    pub samples: usize,
    /// Largest `lhs / rhs` observed.
    pub max_ratio: f64,
    /// Input attaining `max_ratio`.
    pub witness: String,
    pub pass: bool,
    /// Per-check detail, one line each.
    pub lines: Vec<String>,
}

impl BoundReport {
    /// `lemma=<id> samples=<n> max_ratio=<float> pass=<bool>`
    pub fn summary(&self) -> String {
        format!(
            "lemma={} samples={} max_ratio={:.16e} pass={}",
            self.lemma, self.samples, self.max_ratio, self.pass
        )
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "witness={}", self.witness)?;
        write!(f, "{}", self.summary())
    }
}

fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn ratio(lhs: &Rational, rhs: &Rational) -> Rational {
    if rhs.is_zero() {
        if lhs.is_zero() {
            Rational::zero()
        } else {
            rat(i64::MAX)
        }
    } else {
        lhs / rhs
    }
}

/// `‖c ⧢ d‖_{M(1+ε)} ≤ K_ε ‖c‖_M ‖d‖_M` on seeded random pairs from the
/// `M`-ball, plus the extremal pair `c = d = Σ M^|η| |η|! η`, whose ratio
/// is exactly 1. Exact rational arithmetic throughout.
pub fn verify_shuffle_bound(
    m: &Rational,
    eps: &Rational,
    trunc: usize,
    samples: usize,
    seed: u64,
) -> BoundReport {
    let alphabet = Alphabet::siso();
    let m_eps = m * (Rational::one() + eps);
    let k_eps = k_epsilon_truncated(eps, &Rational::zero(), trunc);
    let check = |c: &Series<Rational>, d: &Series<Rational>| -> Rational {
        let lhs = shuffle(c, d, trunc).expect("same shape").linf_norm(&m_eps);
        let rhs = &k_eps * c.linf_norm(m) * d.linf_norm(m);
        ratio(&lhs, &rhs)
    };
    let ratios: Vec<Rational> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let c = Series::random_ball_with(Rational::one(), m.clone(), alphabet, trunc, &mut rng);
            let d = Series::random_ball_with(Rational::one(), m.clone(), alphabet, trunc, &mut rng);
            check(&c, &d)
        })
        .collect();
    let worst = Series::worst_case(Rational::one(), m.clone(), alphabet, trunc, 1);
    let equality = check(&worst, &worst);
    let zero = Series::zero(alphabet, 1, trunc);
    let zero_ratio = check(&zero, &zero);

    let (mut witness, mut best) = ("worst-case".to_string(), equality.clone());
    for (i, r) in ratios.iter().enumerate() {
        if *r > best {
            best = r.clone();
            witness = format!("sample {i}");
        }
    }
    let random_pass = ratios.iter().all(|r| *r <= Rational::one());
    let lines = vec![
        format!("K_eps(L={trunc}) = {}", fmt_rat(&k_eps)),
        format!(
            "random pairs: {samples}, max ratio {:.16e}, pass={random_pass}",
            ratios.iter().max().map(to_f64).unwrap_or(0.0)
        ),
        format!(
            "equality case ratio = {} (exact), pass={}",
            fmt_rat(&equality),
            equality == Rational::one()
        ),
        format!("zero pair ratio = {}", fmt_rat(&zero_ratio)),
    ];
    BoundReport {
        lemma: "shuffle-bound".into(),
        samples,
        max_ratio: to_f64(&best),
        witness,
        pass: random_pass && equality == Rational::one() && zero_ratio.is_zero(),
        lines,
    }
}

/// `‖c ∘ d‖_{M(1+ε)} ≤ ‖c‖_M K_ε(φ(m‖d‖_M))` on seeded random pairs, each
/// `d` rescaled to half the largest norm allowed by `ε > φ(m‖d‖_M)`.
pub fn verify_composition_bound(
    m: &Rational,
    eps: &Rational,
    trunc: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let eps_f = to_f64(eps);
    if !(eps_f > 0.0) {
        return Err(Error::PreconditionUnsatisfiable(format!(
            "ε = {} leaves no room for ε > φ(m‖d‖)",
            fmt_rat(eps)
        )));
    }
    let alphabet = Alphabet::siso();
    let m_arity = alphabet.m() as f64;
    let m_eps = m * (Rational::one() + eps);
    // largest admissible ‖d‖ is φ^{-1}(ε)/m; aim for half of it
    let target = Rational::from_float(0.5 * phi_inverse(eps_f) / m_arity)
        .filter(|t| t.is_positive())
        .ok_or_else(|| Error::PreconditionUnsatisfiable(format!("ε = {eps_f}")))?;

    let run = |c: &Series<Rational>, d: &Series<Rational>| -> Result<f64> {
        let nd = d.linf_norm(m);
        let phi_d = phi(m_arity * to_f64(&nd));
        if !(phi_d < eps_f) {
            return Err(Error::PreconditionUnsatisfiable(format!(
                "φ(m‖d‖) = {phi_d} ≥ ε = {eps_f}"
            )));
        }
        let lhs = compose(c, d, trunc)?.linf_norm(&m_eps);
        let a = Rational::from_float(phi_d).expect("finite");
        let rhs = c.linf_norm(m) * k_epsilon_truncated(eps, &a, trunc);
        Ok(to_f64(&ratio(&lhs, &rhs)))
    };

    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let c = Series::random_ball_with(Rational::one(), m.clone(), alphabet, trunc, &mut rng);
            let d = Series::random_ball_with(Rational::one(), m.clone(), alphabet, trunc, &mut rng);
            let nd = d.linf_norm(m);
            let d = if nd.is_zero() {
                d
            } else {
                d.scale(&(&target / nd))
            };
            run(&c, &d)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = sample_rng(seed, u64::MAX);
    let c = Series::random_ball_with(Rational::one(), m.clone(), alphabet, trunc, &mut rng);
    let zero_d = Series::zero(alphabet, 1, trunc);
    let zero_ratio = run(&c, &zero_d)?;
    let one = Series::one(alphabet, trunc);
    let d = Series::worst_case(target.clone(), m.clone(), alphabet, trunc, 1);
    let unit_ratio = run(&one, &d)?;

    let (mut best, mut witness) = (zero_ratio.max(unit_ratio), "special".to_string());
    for (i, &r) in ratios.iter().enumerate() {
        if r > best {
            best = r;
            witness = format!("sample {i}");
        }
    }
    let tol = 1e-12;
    let pass = best <= 1.0 + tol;
    Ok(BoundReport {
        lemma: "composition-bound".into(),
        samples,
        max_ratio: best,
        witness,
        pass,
        lines: vec![
            format!("phi(3) = {:.16e}", phi(3.0)),
            format!(
                "target m*|d| = {:.16e}, phi = {:.16e} < eps = {eps_f}",
                to_f64(&target) * m_arity,
                phi(to_f64(&target) * m_arity)
            ),
            format!("d = 0 ratio = {zero_ratio:.16e}"),
            format!("c = 1 ratio = {unit_ratio:.16e}"),
            format!(
                "random pairs: {samples}, max ratio {:.16e}",
                ratios.iter().fold(0.0f64, |a, &b| a.max(b))
            ),
        ],
    })
}

/// `max binom(n−1+k, n−1) / 4^k` over `1 ≤ n ≤ n_max`, `n ≤ k ≤ k_max`,
/// with the maximizing `(n, k)`.
pub fn binomial_constant(n_max: usize, k_max: usize) -> (Rational, usize, usize) {
    let mut best = (Rational::zero(), 0, 0);
    for n in 1..=n_max {
        for k in n..=k_max {
            let v = Rational::new(
                binomial((n - 1 + k) as u64, (n - 1) as u64),
                num_traits::pow(num_bigint::BigInt::from(4), k),
            );
            if v > best.0 {
                best = (v, n, k);
            }
        }
    }
    best
}

/// The majorant argument for differences of shuffle powers.
///
/// Draws a proper `c` and a proper perturbation `p` from the `M`-ball,
/// sets `c_j = c + p/j`, searches the smallest integer `N ≥ M` with
/// `‖c‖_N + sup_j ‖c_j‖_N ≤ 1/2`, and builds the explicit majorant `d`.
/// Checks, for `1 ≤ n ≤ L`:
/// (a) `‖d^{⧢n}‖_{4N} ≤ K/2^n` with `K` from the binomial scan, and `d^{⧢n}`
///     dominating `|c^{⧢n}| + |c_1^{⧢n}|` coefficientwise;
/// (b) `Σ_n ‖c^{⧢n} − c_j^{⧢n}‖_{4N}` strictly decreasing along `j = 1, 2, 4, 8, 16`.
pub fn verify_shuffle_power_sum(
    m: &Rational,
    n_search: usize,
    trunc: usize,
    seed: u64,
) -> Result<BoundReport> {
    let alphabet = Alphabet::siso();
    let mut rng = sample_rng(seed, 0);
    let proper = |s: Series<Rational>| {
        let mut out = Series::zero(alphabet, 1, trunc);
        for (_, w, v) in s.terms() {
            if !w.is_empty() {
                out.add_term(0, w.clone(), v.clone());
            }
        }
        out
    };
    let c = proper(Series::random_ball_with(
        Rational::one(),
        m.clone(),
        alphabet,
        trunc,
        &mut rng,
    ));
    let p = proper(Series::random_ball_with(
        Rational::one(),
        m.clone(),
        alphabet,
        trunc,
        &mut rng,
    ));
    let js = [1i64, 2, 4, 8, 16];
    let cj: Vec<Series<Rational>> = js
        .iter()
        .map(|&j| {
            c.axpy(&Rational::new(1.into(), j.into()), &p)
                .expect("same shape")
        })
        .collect();

    let start = m.ceil().to_integer().to_usize().unwrap_or(1).max(1);
    let half = Rational::new(1.into(), 2.into());
    let mut found = None;
    for n in start..=start + n_search {
        let nn = rat(n as i64);
        let sup = cj.iter().map(|s| s.linf_norm(&nn)).max().expect("nonempty");
        // ‖c_j‖ ≤ ‖c‖ + ‖p‖/j bounds the sup over all j ≥ 1
        let sup = sup.max(c.linf_norm(&nn) + p.linf_norm(&nn));
        let s = c.linf_norm(&nn) + sup;
        if s <= half {
            found = Some((n, s));
            break;
        }
    }
    let (n_found, s) = found.ok_or_else(|| {
        Error::PreconditionUnsatisfiable(format!(
            "no N ≤ {} gives ‖c‖ + sup‖c_j‖ ≤ 1/2",
            start + n_search
        ))
    })?;
    let nn = rat(n_found as i64);
    let n4 = rat(4 * n_found as i64);
    let mut d = Series::worst_case(s.clone(), nn.clone(), alphabet, trunc, 1);
    d = proper(d);

    let (k_const, kn, kk) = binomial_constant(12, 12);
    let mut lines = vec![
        format!(
            "binomial scan n,|eta| <= 12: K = {} at n={kn}, |eta|={kk}",
            fmt_rat(&k_const)
        ),
        format!(
            "N = {n_found}, s = |c|_N + sup|c_j|_N = {:.16e}",
            to_f64(&s)
        ),
    ];
    let mut best = 0.0f64;
    let mut witness = String::new();
    let mut pass = true;
    let mut d_pow = Series::one(alphabet, trunc);
    let mut c_pow = Series::one(alphabet, trunc);
    let mut c1_pow = Series::one(alphabet, trunc);
    let mut cj_pows: Vec<Series<Rational>> = vec![Series::one(alphabet, trunc); js.len()];
    let mut sums = vec![Rational::zero(); js.len()];
    for n in 1..=trunc {
        d_pow = shuffle(&d_pow, &d, trunc)?;
        c_pow = shuffle(&c_pow, &c, trunc)?;
        c1_pow = shuffle(&c1_pow, &cj[0], trunc)?;
        for word in alphabet.words_up_to(trunc).iter() {
            let dv = d_pow.coeff(0, word)?;
            let expected = if word.len() >= n {
                s.clone().pow(n as i32)
                    * pow(&nn, word.len())
                    * factorial::<Rational>(word.len())
                    * Rational::from_integer(binomial(word.len() as u64 - 1, n as u64 - 1))
            } else {
                Rational::zero()
            };
            if dv != expected {
                return Err(Error::OracleMismatch(format!(
                    "(d^{n}, {word}) = {} but the closed form gives {}",
                    fmt_rat(&dv),
                    fmt_rat(&expected)
                )));
            }
            if dv < c_pow.coeff(0, word)?.abs() + c1_pow.coeff(0, word)?.abs() {
                pass = false;
                lines.push(format!("domination fails at n={n}, {word}"));
            }
        }
        let lhs = d_pow.linf_norm(&n4);
        let rhs = &k_const / pow(&rat(2), n);
        let r = ratio(&lhs, &rhs);
        let rf = to_f64(&r);
        lines.push(format!(
            "n={n}: |d^n|_4N = {:.16e}, K/2^n = {:.16e}, ratio = {rf:.16e}",
            to_f64(&lhs),
            to_f64(&rhs)
        ));
        if r > Rational::one() {
            pass = false;
        }
        if rf > best {
            best = rf;
            witness = format!("n={n}");
        }
        for (idx, s_j) in cj.iter().enumerate() {
            cj_pows[idx] = shuffle(&cj_pows[idx], s_j, trunc)?;
            sums[idx] += (&c_pow - &cj_pows[idx]).linf_norm(&n4);
        }
    }
    for (idx, j) in js.iter().enumerate() {
        lines.push(format!("j={j}: partial sum = {:.16e}", to_f64(&sums[idx])));
    }
    let decreasing = sums.windows(2).all(|w| w[1] < w[0]);
    let bounded = sums.iter().all(|v| *v <= k_const);
    lines.push(format!(
        "partial sums decreasing in j: {decreasing}; all <= K: {bounded}"
    ));
    Ok(BoundReport {
        lemma: "shuffle-power".into(),
        samples: trunc,
        max_ratio: best,
        witness,
        pass: pass && decreasing && bounded,
        lines,
    })
}

/// The `b_k(K)` polynomials of `(c̄^{∘−1}, x0^k) = b_k(K) K M^k`, where
/// `c̄ = Σ K M^|η| |η|! η`.
#[derive(Debug, Clone)]
pub struct BkTable {
    /// `b_k` as a polynomial in `K` alone.
    pub b: Vec<Polynomial>,
    /// `(c̄^{∘−1}, x0^k)` in `K` and `M`.
    pub coefficients: Vec<Polynomial>,
    pub names: VarNames,
    pub header: String,
}

impl BkTable {
    pub const K: usize = 0;
    pub const M: usize = 1;

    /// Coefficient of `K^i` in `b_k`.
    pub fn coefficient(&self, k: usize, i: i32) -> Rational {
        self.b[k]
            .coefficients_in(Self::K)
            .get(&i)
            .and_then(|p| p.as_constant())
            .unwrap_or_else(Rational::zero)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.header);
        for (k, b) in self.b.iter().enumerate() {
            out.push_str(&format!("b_{k}(K) = {}\n", b.display(&self.names)));
        }
        out
    }
}

/// Largest `k_max` accepted by [`bk_table`].
pub const BK_LIMIT: usize = 10;

/// Computes `(c̄^{∘−1}, x0^k)` for `k ≤ k_max` twice: by iterated Lie
/// derivatives `L_{g0}^k h(z0)` of the realization `g0 = (M/K)(z² − z³)`,
/// `h = −z`, `z0 = K`, and by the weight-sweep group inverse of `c̄` with
/// symbolic `K, M`. The two must agree exactly. Dividing by `K M^k` gives
/// `b_k(K)`; no factorial is divided out.
pub fn bk_table(k_max: usize) -> Result<BkTable> {
    if k_max > BK_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} exceeds {BK_LIMIT}"
        )));
    }
    // variables: K, M, z
    let mut names = VarNames::new(&["K", "M", "z"]);
    let z_var = 2;
    let g0 = Polynomial::parse("M/K*(z^2 - z^3)", &mut names).expect("fixed text");
    let h = Polynomial::parse("-z", &mut names).expect("fixed text");
    let k_poly = Polynomial::var(BkTable::K);
    let m_poly = Polynomial::var(BkTable::M);

    let mut lie = Vec::with_capacity(k_max + 1);
    let mut d = h;
    for _ in 0..=k_max {
        lie.push(d.substitute(z_var, &k_poly).expect("K is a monomial"));
        // state is the single variable z; lie_derivative differentiates
        // variables 0..g.len(), so place g0 at index z_var
        let mut field = vec![Polynomial::zero(); z_var + 1];
        field[z_var] = g0.clone();
        d = lie_derivative(&field, &d);
    }

    let alphabet = Alphabet::siso();
    let c_bar = Series::worst_case(k_poly.clone(), m_poly, alphabet, k_max, 1);
    let inverse = group_inverse(&UnitalSeries::new(c_bar)?, k_max)?;
    let mut coefficients = Vec::with_capacity(k_max + 1);
    let mut b = Vec::with_capacity(k_max + 1);
    for (k, lie_k) in lie.into_iter().enumerate() {
        let via_group = inverse.body().coeff(0, &Word::power(0, k))?;
        if via_group != lie_k {
            return Err(Error::OracleMismatch(format!(
                "x0^{k}: Lie derivative {} vs group inverse {}",
                lie_k.display(&names),
                via_group.display(&names)
            )));
        }
        let mut mono = vec![0i32; 2];
        mono[BkTable::K] = 1;
        mono[BkTable::M] = k as i32;
        let bk = via_group.div_term(&Monomial::from_exponents(&mono), &Rational::one());
        if bk
            .terms()
            .any(|(m, _)| m.exponent(BkTable::M) != 0 || m.exponent(BkTable::K) < 0)
        {
            return Err(Error::OracleMismatch(format!(
                "x0^{k} coefficient is not K M^{k} times a polynomial in K"
            )));
        }
        coefficients.push(via_group);
        b.push(bk);
    }
    Ok(BkTable {
        b,
        coefficients,
        names,
        header: format!(
            "# (cbar^-1, x0^k) = b_k(K) * K * M^k  (no k! factor); k <= {k_max}; \
             Lie-derivative and group-inverse computations agree exactly"
        ),
    })
}

/// A112487: 1, 2, 10, 82, 938, 13778, 247210, 5240338, ...
///
/// `b̄_n = Σ_k E2(n,k) 2^{k+1}` for `n ≥ 1`, with `E2` the second-order
/// Eulerian numbers.
pub fn a112487(n_max: usize) -> Vec<num_bigint::BigInt> {
    use num_bigint::BigInt;
    let mut out = vec![BigInt::one()];
    // E2(n, k), k = 0..n-1; E2(1, 0) = 1
    let mut row = vec![BigInt::one()];
    for n in 1..=n_max {
        if n > 1 {
            let mut next = vec![BigInt::zero(); n];
            for k in 0..n {
                let mut v = BigInt::zero();
                if k < row.len() {
                    v += BigInt::from(k + 1) * &row[k];
                }
                if k >= 1 && k - 1 < row.len() {
                    v += BigInt::from(2 * n - 1 - k) * &row[k - 1];
                }
                next[k] = v;
            }
            row = next;
        }
        let sum: BigInt = row
            .iter()
            .enumerate()
            .map(|(k, e)| e * num_traits::pow(BigInt::from(2), k + 1))
            .sum();
        out.push(sum);
    }
    out
}

/// `|b_k(K)| ≤ b̄_k` for `k ≤ k_max` on `K = i/grid`, `0 ≤ i ≤ grid`, in
/// exact arithmetic.
pub fn verify_bk_majorant(table: &BkTable, k_max: usize, grid: usize) -> BoundReport {
    let bbar = a112487(k_max);
    let mut best = 0.0f64;
    let mut witness = String::new();
    let mut pass = true;
    let mut lines = Vec::new();
    for k in 0..=k_max.min(table.b.len() - 1) {
        let mut worst = Rational::zero();
        for i in 0..=grid {
            let kv = Rational::new((i as i64).into(), (grid as i64).into());
            let v = table.b[k]
                .eval_rational(&[kv.clone(), Rational::zero()])
                .expect("polynomial in K")
                .abs();
            let r = v / Rational::from_integer(bbar[k].clone());
            if r > worst {
                worst = r.clone();
            }
            if r > Rational::one() {
                pass = false;
            }
            if to_f64(&r) > best {
                best = to_f64(&r);
                witness = format!("k={k}, K={}", fmt_rat(&kv));
            }
        }
        lines.push(format!(
            "k={k}: bbar={} max |b_k|/bbar = {:.16e}",
            bbar[k],
            to_f64(&worst)
        ));
    }
    BoundReport {
        lemma: "bk-majorant".into(),
        samples: (k_max + 1) * (grid + 1),
        max_ratio: best,
        witness,
        pass,
        lines,
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

fn fmt_rat(r: &Rational) -> String {
    use crate::scalar::ScalarText;
    r.format_scalar()
}


#[cfg(test)]
mod table_tests {
    use super::*;

    const REFERENCE: [&str; 8] = [
        "-1",
        "-1 + K",
        "-2 + 5*K - 3*K^2",
        "-6 + 26*K - 35*K^2 + 15*K^3",
        "-24 + 154*K - 340*K^2 + 315*K^3 - 105*K^4",
        "-120 + 1044*K - 3304*K^2 + 4900*K^3 - 3465*K^4 + 945*K^5",
        "-720 + 8028*K - 33740*K^2 + 70532*K^3 - 78750*K^4 + 45045*K^5 - 10395*K^6",
        "-5040 + 69264*K - 367884*K^2 + 1008980*K^3 - 1571570*K^4 + 1406790*K^5 - 675675*K^6 + 135135*K^7",
    ];

    #[test]
    fn table_through_seven() {
        let table = bk_table(7).unwrap();
        let mut names = VarNames::new(&["K"]);
        for (k, text) in REFERENCE.iter().enumerate() {
            assert_eq!(
                table.b[k],
                Polynomial::parse(text, &mut names).unwrap(),
                "b_{k}"
            );
        }
        let r = verify_bk_majorant(&table, 7, 10);
        assert!(r.pass, "{r}");
    }

    #[test]
    fn shuffle_power_majorant() {
        let r = verify_shuffle_power_sum(&Rational::one(), 64, 8, 3).unwrap();
        assert!(r.pass, "{r}");
    }
}
