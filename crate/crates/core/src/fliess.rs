//! Chen-Fliess operators: iterated integrals on a sampled input, operator
//! evaluation, interconnection checks, and series of polynomial realizations.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groups::feedback;
use crate::poly::{Polynomial, VarNames};
use crate::products::compose;
use crate::scalar::RealScalar;
use crate::series::Series;
use crate::words::{Alphabet, Letter, Word};
use crate::Rational;

/// Samples of `u = (u_1, ..., u_m)` on a uniform grid over `[t0, t1]`.
/// The drift channel `u_0 = 1` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSignal {
    t0: f64,
    t1: f64,
    times: Vec<f64>,
    /// `channels[i]` holds `u_{i+1}` on the grid.
    channels: Vec<Vec<f64>>,
    ones: Vec<f64>,
}

const SPACING_TOL: f64 = 1e-9;

impl InputSignal {
    /// `channels[i][k]` is `u_{i+1}` at grid point `k`; the grid has as many
    /// points as each channel (at least 2).
    pub fn new(t0: f64, t1: f64, channels: Vec<Vec<f64>>, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::GridTooCoarse(format!("{points} grid points")));
        }
        if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "empty interval [{t0}, {t1}]"
            )));
        }
        for ch in &channels {
            if ch.len() != points {
                return Err(Error::InvalidArgument(
                    "channel length differs from grid".into(),
                ));
            }
            if ch.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite input sample".into()));
            }
        }
        let h = (t1 - t0) / (points - 1) as f64;
        let times = (0..points).map(|k| t0 + h * k as f64).collect();
        Ok(InputSignal {
            t0,
            t1,
            times,
            channels,
            ones: vec![1.0; points],
        })
    }

    /// Samples `f` on `points` equally spaced times.
    pub fn from_fn(
        t0: f64,
        t1: f64,
        points: usize,
        m: usize,
        f: impl Fn(f64) -> Vec<f64>,
    ) -> Result<Self> {
        if points < 2 {
            return Err(Error::GridTooCoarse(format!("{points} grid points")));
        }
        let h = (t1 - t0) / (points - 1) as f64;
        let mut channels = vec![Vec::with_capacity(points); m];
        for k in 0..points {
            let v = f(t0 + h * k as f64);
            if v.len() != m {
                return Err(Error::InvalidArgument("input function arity".into()));
            }
            for (ch, x) in channels.iter_mut().zip(v) {
                ch.push(x);
            }
        }
        Self::new(t0, t1, channels, points)
    }

    /// The zero input with `m` channels.
    pub fn zero(t0: f64, t1: f64, points: usize, m: usize) -> Result<Self> {
        Self::new(t0, t1, vec![vec![0.0; points]; m], points)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn m(&self) -> usize {
        self.channels.len()
    }

    pub fn points(&self) -> usize {
        self.times.len()
    }

    pub fn step(&self) -> f64 {
        (self.t1 - self.t0) / (self.points() - 1) as f64
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `u_i` on the grid; `i = 0` is the constant drift channel.
    pub fn channel(&self, i: usize) -> &[f64] {
        if i == 0 {
            &self.ones
        } else {
            &self.channels[i - 1]
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    /// Same grid, new channel data.
    pub fn with_channels(&self, channels: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.t0, self.t1, channels, self.points())
    }

    /// Pointwise sum of two signals on the same grid.
    pub fn add(&self, other: &InputSignal) -> Result<Self> {
        if self.points() != other.points() || self.m() != other.m() {
            return Err(Error::InvalidArgument("signals on different grids".into()));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        self.with_channels(channels)
    }

    /// Grid index and interpolation weight for time `t`.
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let span = self.t1 - self.t0;
        if t < self.t0 - SPACING_TOL * span || t > self.t1 + SPACING_TOL * span {
            return Err(Error::InvalidArgument(format!(
                "t={t} outside [{}, {}]",
                self.t0, self.t1
            )));
        }
        let x = ((t - self.t0) / self.step()).clamp(0.0, (self.points() - 1) as f64);
        let k = (x.floor() as usize).min(self.points() - 2);
        Ok((k, x - k as f64))
    }

    /// Linear interpolation of a grid function at `t`.
    pub fn sample(&self, values: &[f64], t: f64) -> Result<f64> {
        let (k, frac) = self.locate(t)?;
        Ok(values[k] * (1.0 - frac) + values[k + 1] * frac)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(f64, f64, usize)> = None;
        let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut t0 = None;
                let mut t1 = None;
                let mut m = None;
                for field in rest.split_whitespace() {
                    if let Some(v) = field.strip_prefix("t0=") {
                        t0 = v.parse().ok();
                    } else if let Some(v) = field.strip_prefix("t1=") {
                        t1 = v.parse().ok();
                    } else if let Some(v) = field.strip_prefix("m=") {
                        m = v.parse().ok();
                    }
                }
                if let (Some(a), Some(b), Some(c)) = (t0, t1, m) {
                    header = Some((a, b, c));
                }
                continue;
            }
            let values: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            let values = values.map_err(|e| Error::SyntaxError {
                line: line_no,
                message: e.to_string(),
            })?;
            rows.push((line_no, values));
        }
        let (t0, t1, m) = header.ok_or_else(|| Error::SyntaxError {
            line: 1,
            message: "missing `# t0=.. t1=.. m=..` header".into(),
        })?;
        if rows.len() < 2 {
            return Err(Error::GridTooCoarse(format!("{} samples", rows.len())));
        }
        let points = rows.len();
        let h = (t1 - t0) / (points - 1) as f64;
        let mut channels = vec![Vec::with_capacity(points); m];
        for (k, (line_no, row)) in rows.into_iter().enumerate() {
            if row.len() != m + 1 {
                return Err(Error::SyntaxError {
                    line: line_no,
                    message: format!("expected {} columns", m + 1),
                });
            }
            let expected = t0 + h * k as f64;
            if (row[0] - expected).abs() > SPACING_TOL * (t1 - t0).abs().max(1.0) {
                return Err(Error::SyntaxError {
                    line: line_no,
                    message: format!("time {} off the uniform grid (expected {expected})", row[0]),
                });
            }
            for (ch, v) in channels.iter_mut().zip(&row[1..]) {
                ch.push(*v);
            }
        }
        Self::new(t0, t1, channels, points)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# t0={:.16e} t1={:.16e} m={}",
            self.t0,
            self.t1,
            self.m()
        )
        .unwrap();
        for (k, t) in self.times.iter().enumerate() {
            write!(s, "{t:.16e}").unwrap();
            for ch in &self.channels {
                write!(s, " {:.16e}", ch[k]).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// `E_η[u](t, t0)` on the whole grid, for every word requested so far.
///
/// `E_{x_i η}(t) = ∫_{t0}^t u_i(τ) E_η(τ) dτ`, so each word extends a
/// memoized suffix by one cumulative trapezoid pass.
pub struct IteratedIntegrals<'a> {
    u: &'a InputSignal,
    memo: HashMap<Word, Vec<f64>>,
}

impl<'a> IteratedIntegrals<'a> {
    pub fn new(u: &'a InputSignal) -> Self {
        let mut memo = HashMap::new();
        memo.insert(Word::empty(), vec![1.0; u.points()]);
        IteratedIntegrals { u, memo }
    }

    pub fn get(&mut self, word: &Word) -> Result<&[f64]> {
        if let Some(l) = word.max_letter() {
            if l as usize > self.u.m() {
                return Err(Error::AlphabetMismatch {
                    left: l,
                    right: self.u.m() as Letter,
                });
            }
        }
        if !self.memo.contains_key(word) {
            for k in (0..word.len()).rev() {
                let suffix = word.suffix(k);
                if self.memo.contains_key(&suffix) {
                    continue;
                }
                let (i, tail) = suffix.split_first().expect("nonempty suffix");
                let inner = &self.memo[&tail];
                let values = cumulative_trapezoid(self.u.channel(i as usize), inner, self.u.step());
                self.memo.insert(suffix, values);
            }
        }
        Ok(&self.memo[word])
    }
}

fn cumulative_trapezoid(a: &[f64], b: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..a.len() {
        acc += 0.5 * h * (a[k - 1] * b[k - 1] + a[k] * b[k]);
        out.push(acc);
    }
    out
}

/// `E_η[u](t, t0)`.
pub fn iterated_integral(word: &Word, u: &InputSignal, t: f64) -> Result<f64> {
    let mut ii = IteratedIntegrals::new(u);
    let values = ii.get(word)?.to_vec();
    u.sample(&values, t)
}

/// Output of a truncated Fliess operator on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FliessTrajectory {
    /// `y[j][k]`: component `j` at grid point `k`.
    pub y: Vec<Vec<f64>>,
    /// `max_j |Σ_{|η|=L} (c_j,η) E_η|` per grid point; a truncation-error
    /// indicator.
    pub top_stratum: Vec<f64>,
}

/// Truncated operator value at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FliessValue {
    pub y: Vec<f64>,
    pub top_stratum: f64,
}

fn check_input_arity<T>(c: &Series<T>, u: &InputSignal) -> Result<()>
where
    T: crate::Scalar,
{
    if c.alphabet().m() as usize != u.m() {
        return Err(Error::ComponentMismatch {
            expected: c.alphabet().m() as usize,
            found: u.m(),
        });
    }
    Ok(())
}

/// `F_c[u]` on the whole grid.
pub fn fliess_trajectory<T: RealScalar>(
    c: &Series<T>,
    u: &InputSignal,
) -> Result<FliessTrajectory> {
    check_input_arity(c, u)?;
    let mut ii = IteratedIntegrals::new(u);
    let n = u.points();
    let mut y = vec![vec![0.0; n]; c.components()];
    let mut top = vec![vec![0.0; n]; c.components()];
    for (j, word, coef) in c.terms() {
        let k = coef.to_f64().expect("finite coefficient");
        let e = ii.get(word)?;
        for (acc, v) in y[j].iter_mut().zip(e) {
            *acc += k * v;
        }
        if word.len() == c.trunc() {
            for (acc, v) in top[j].iter_mut().zip(e) {
                *acc += k * v;
            }
        }
    }
    let top_stratum = (0..n)
        .map(|k| top.iter().fold(0.0f64, |a, comp| a.max(comp[k].abs())))
        .collect();
    Ok(FliessTrajectory { y, top_stratum })
}

/// `y(t) = F_c[u](t) = Σ (c,η) E_η[u](t, t0)` over the stored support.
pub fn fliess_eval<T: RealScalar>(c: &Series<T>, u: &InputSignal, t: f64) -> Result<FliessValue> {
    let traj = fliess_trajectory(c, u)?;
    let y = traj
        .y
        .iter()
        .map(|comp| u.sample(comp, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(FliessValue {
        y,
        top_stratum: u.sample(&traj.top_stratum, t)?,
    })
}

/// `|F_c[F_d[u]](t) − F_{c∘d}[u](t)|`, maximized over components, with
/// `c∘d` computed at truncation `trunc`.
pub fn cascade_check<T: RealScalar>(
    c: &Series<T>,
    d: &Series<T>,
    u: &InputSignal,
    t: f64,
    trunc: usize,
) -> Result<f64> {
    let inner = fliess_trajectory(d, u)?;
    let v = u.with_channels(inner.y)?;
    let lhs = fliess_eval(c, &v, t)?;
    let cd = compose(
        &c.extend_as_polynomial(trunc),
        &d.extend_as_polynomial(trunc),
        trunc,
    )?;
    let rhs = fliess_eval(&cd, u, t)?;
    Ok(lhs
        .y
        .iter()
        .zip(&rhs.y)
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs())))
}

/// Result of the Picard iteration for a closed loop.
#[derive(Debug, Clone)]
pub struct LoopSolution {
    pub output: InputSignal,
    /// Sup-norm distance between the last two iterates.
    pub increment: f64,
    pub iterations: usize,
}

/// Closed loop `y = F_c[u]`, `u = v + F_d[y]` by Picard iteration from
/// `y = 0`. Fails with `LoopDiverged` after three consecutive growing
/// increments.
pub fn feedback_loop_simulate<T: RealScalar>(
    c: &Series<T>,
    d: &Series<T>,
    v: &InputSignal,
    iterations: usize,
) -> Result<LoopSolution> {
    for s in [c, d] {
        if s.alphabet().m() != 1 || s.components() != 1 {
            return Err(Error::UnsupportedArity {
                m: s.alphabet().m() as usize,
                l: s.components(),
            });
        }
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("at least one iteration".into()));
    }
    let mut y = v.with_channels(vec![vec![0.0; v.points()]])?;
    let mut increment = f64::INFINITY;
    let mut growth = 0;
    for it in 1..=iterations {
        let fb = fliess_trajectory(d, &y)?;
        let u = v.add(&v.with_channels(fb.y)?)?;
        let next = fliess_trajectory(c, &u)?;
        let step = next.y[0]
            .iter()
            .zip(y.channel(1))
            .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        if it > 1 && step > increment {
            growth += 1;
            if growth >= 3 {
                return Err(Error::LoopDiverged { iterations: it });
            }
        } else {
            growth = 0;
        }
        increment = step;
        y = v.with_channels(next.y)?;
        if increment == 0.0 {
            return Ok(LoopSolution {
                output: y,
                increment,
                iterations: it,
            });
        }
    }
    Ok(LoopSolution {
        output: y,
        increment,
        iterations,
    })
}

/// `|y_loop(t) − F_{c@d}[v](t)|` with `c@d` truncated at `trunc`.
pub fn feedback_check<T: RealScalar>(
    c: &Series<T>,
    d: &Series<T>,
    v: &InputSignal,
    t: f64,
    trunc: usize,
    iterations: usize,
) -> Result<f64> {
    let sim = feedback_loop_simulate(c, d, v, iterations)?;
    let closed = feedback(
        &c.extend_as_polynomial(trunc),
        &d.extend_as_polynomial(trunc),
        trunc,
    )?;
    let algebraic = fliess_eval(&closed, v, t)?;
    Ok((v.sample(sim.output.channel(1), t)? - algebraic.y[0]).abs())
}

/// `L_g h = Σ_i g_i ∂h/∂z_i`, the state being variables `0..g.len()`.
pub fn lie_derivative(g: &[Polynomial], h: &Polynomial) -> Polynomial {
    g.iter()
        .enumerate()
        .fold(Polynomial::zero(), |acc, (i, gi)| {
            &acc + &(gi * &h.derivative(i))
        })
}

/// `ż = g_0(z) + Σ g_i(z) u_i`, `z(0) = z0`, `y = h(z)` with polynomial
/// data. State variables are polynomial variables `0..n`; any further
/// variables are symbolic parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialRealization {
    pub names: VarNames,
    pub n: usize,
    /// `g[i]` is the vector field multiplying `u_i` (`u_0 = 1`).
    pub g: Vec<Vec<Polynomial>>,
    pub h: Vec<Polynomial>,
    pub z0: Vec<Polynomial>,
}

impl PolynomialRealization {
    pub fn m(&self) -> usize {
        self.g.len() - 1
    }

    /// Parameter names, in variable order after the state.
    pub fn params(&self) -> Vec<String> {
        (self.n..self.names.len())
            .map(|i| self.names.name(i))
            .collect()
    }

    /// Line format:
    ///
    /// ```text
    /// state z
    /// param K M
    /// g0: M/K*(z^2 - z^3)
    /// g1: M/K*z^2
    /// h: -z
    /// z0: K
    /// ```
    ///
    /// Vector entries are separated by `;`. Missing `g_i` default to zero.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names = VarNames::default();
        let mut n = None;
        let mut fields: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("state ") {
                if n.is_some() {
                    return Err(syntax(line_no, "state declared twice"));
                }
                for v in rest.split_whitespace() {
                    names.intern(v);
                }
                n = Some(names.len());
            } else if let Some(rest) = line.strip_prefix("param ") {
                if n.is_none() {
                    return Err(syntax(line_no, "declare the state before parameters"));
                }
                for v in rest.split_whitespace() {
                    names.intern(v);
                }
            } else if let Some((key, value)) = line.split_once(':') {
                fields.push((line_no, key.trim().to_string(), value.to_string()));
            } else {
                return Err(syntax(line_no, "expected `key: value`"));
            }
        }
        let n = n.ok_or_else(|| syntax(1, "missing `state` line"))?;
        let declared = names.len();
        let mut g: Vec<Option<Vec<Polynomial>>> = Vec::new();
        let mut h = None;
        let mut z0 = None;
        for (line_no, key, value) in fields {
            let mut parsed = Vec::new();
            for part in value.split(';') {
                let p = Polynomial::parse(part, &mut names).map_err(|e| syntax(line_no, e))?;
                if names.len() != declared {
                    return Err(syntax(
                        line_no,
                        format!("undeclared symbol `{}`", names.name(declared)),
                    ));
                }
                parsed.push(p);
            }
            if key == "h" {
                h = Some(parsed);
            } else if key == "z0" {
                if parsed.len() != n {
                    return Err(syntax(line_no, format!("z0 needs {n} entries")));
                }
                z0 = Some(parsed);
            } else if let Some(i) = key.strip_prefix('g').and_then(|s| s.parse::<usize>().ok()) {
                if parsed.len() != n {
                    return Err(syntax(line_no, format!("g{i} needs {n} entries")));
                }
                if g.len() <= i {
                    g.resize(i + 1, None);
                }
                g[i] = Some(parsed);
            } else {
                return Err(syntax(line_no, format!("unknown key `{key}`")));
            }
        }
        if g.len() < 2 {
            g.resize(2, None);
        }
        let g = g
            .into_iter()
            .map(|gi| gi.unwrap_or_else(|| vec![Polynomial::zero(); n]))
            .collect();
        Ok(PolynomialRealization {
            names,
            n,
            g,
            h: h.ok_or_else(|| syntax(0, "missing `h`"))?,
            z0: z0.ok_or_else(|| syntax(0, "missing `z0`"))?,
        })
    }

    /// Replaces the named parameters by rational values.
    pub fn with_params(&self, values: &[(String, Rational)]) -> Result<Self> {
        let mut out = self.clone();
        for (name, value) in values {
            let i = self
                .names
                .index(name)
                .filter(|&i| i >= self.n)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter `{name}`")))?;
            let c = Polynomial::constant(value.clone());
            let sub = |p: &Polynomial| {
                p.substitute(i, &c)
                    .ok_or_else(|| Error::InvalidArgument(format!("{name} = 0 in a denominator")))
            };
            for gi in &mut out.g {
                for p in gi.iter_mut() {
                    *p = sub(p)?;
                }
            }
            for p in out.h.iter_mut().chain(out.z0.iter_mut()) {
                *p = sub(p)?;
            }
        }
        Ok(out)
    }

    /// Integrates the realization with classical RK4, one step per grid
    /// interval, and returns `h(z(t))` on the grid. All parameters must be
    /// given numerically.
    pub fn simulate(
        &self,
        params: &[f64],
        u: &InputSignal,
        substeps: usize,
    ) -> Result<Vec<Vec<f64>>> {
        if u.m() != self.m() {
            return Err(Error::ComponentMismatch {
                expected: self.m(),
                found: u.m(),
            });
        }
        let mut point = vec![0.0; self.n];
        point.extend_from_slice(params);
        let z0: Vec<f64> = self.z0.iter().map(|p| p.eval_f64(&point)).collect();
        let field = |z: &[f64], inputs: &[f64]| -> Vec<f64> {
            let mut pt = z.to_vec();
            pt.extend_from_slice(params);
            (0..self.n)
                .map(|k| {
                    self.g
                        .iter()
                        .enumerate()
                        .map(|(i, gi)| {
                            let ui = if i == 0 { 1.0 } else { inputs[i - 1] };
                            if ui == 0.0 {
                                0.0
                            } else {
                                ui * gi[k].eval_f64(&pt)
                            }
                        })
                        .sum()
                })
                .collect()
        };
        let input_at = |t: f64| -> Result<Vec<f64>> {
            (1..=u.m()).map(|i| u.sample(u.channel(i), t)).collect()
        };
        let mut z = z0;
        let hs = u.step() / substeps.max(1) as f64;
        let mut out = vec![Vec::with_capacity(u.points()); self.h.len()];
        let emit = |z: &[f64], out: &mut Vec<Vec<f64>>| {
            let mut pt = z.to_vec();
            pt.extend_from_slice(params);
            for (o, h) in out.iter_mut().zip(&self.h) {
                o.push(h.eval_f64(&pt));
            }
        };
        emit(&z, &mut out);
        for k in 0..u.points() - 1 {
            for s in 0..substeps.max(1) {
                let t = u.times()[k] + hs * s as f64;
                let (ua, um, ub) = (input_at(t)?, input_at(t + 0.5 * hs)?, input_at(t + hs)?);
                let k1 = field(&z, &ua);
                let z2: Vec<f64> = z.iter().zip(&k1).map(|(a, b)| a + 0.5 * hs * b).collect();
                let k2 = field(&z2, &um);
                let z3: Vec<f64> = z.iter().zip(&k2).map(|(a, b)| a + 0.5 * hs * b).collect();
                let k3 = field(&z3, &um);
                let z4: Vec<f64> = z.iter().zip(&k3).map(|(a, b)| a + hs * b).collect();
                let k4 = field(&z4, &ub);
                for i in 0..self.n {
                    z[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
            emit(&z, &mut out);
        }
        Ok(out)
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::SyntaxError {
        line,
        message: message.into(),
    }
}

/// `(c_j, η) = L_{g_{i_1}} ⋯ L_{g_{i_k}} h_j(z0)` for `η = x_{i_k} ⋯ x_{i_1}`:
/// the first letter of `η` names the innermost derivative. Coefficients are
/// polynomials in the realization's parameters.
pub fn realization_to_series(
    r: &PolynomialRealization,
    trunc: usize,
) -> Result<Series<Polynomial>> {
    let m = r.m();
    if m == 0 || m > crate::words::MAX_LETTER as usize {
        return Err(Error::InvalidArgument(format!("{m} inputs")));
    }
    let alphabet = Alphabet::new(m as Letter);
    let mut out = Series::zero(alphabet, r.h.len(), trunc);
    for (j, hj) in r.h.iter().enumerate() {
        // derivatives D(η) before evaluation, one length level at a time
        let mut level: Vec<(Word, Polynomial)> = vec![(Word::empty(), hj.clone())];
        for len in 0..=trunc {
            let mut next = Vec::new();
            for (word, d) in &level {
                let mut v = d.clone();
                for (i, z) in r.z0.iter().enumerate() {
                    v = v.substitute(i, z).ok_or_else(|| {
                        Error::InvalidArgument("state appears in a denominator".into())
                    })?;
                }
                out.add_term(j, word.clone(), v);
                if len < trunc && !d.is_zero() {
                    for (b, gb) in r.g.iter().enumerate() {
                        let lie = lie_derivative(gb, d);
                        if !lie.is_zero() {
                            next.push((word.concat(&Word::letter(b as Letter)), lie));
                        }
                    }
                }
            }
            level = next;
        }
    }
    Ok(out)
}

/// Replaces every coefficient polynomial by its value at the given
/// parameter point (variables in order, state variables ignored).
pub fn eval_symbolic_series(
    s: &Series<Polynomial>,
    point: &[Rational],
) -> Result<Series<Rational>> {
    let mut out = Series::zero(s.alphabet(), s.components(), s.trunc());
    for (j, w, p) in s.terms() {
        let v = p
            .eval_rational(point)
            .ok_or_else(|| Error::InvalidArgument("parameter value hits a pole".into()))?;
        out.add_term(j, w.clone(), v);
    }
    Ok(out)
}
