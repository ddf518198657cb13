//! Lie-type evolution `γ̇_δ = γ_δ.c(t) = c(t) + γ(t) ◁ c(t)` on the
//! output-feedback group, and the Volterra series `γ̇ = γ ⧢ η(t)` in the
//! shuffle unit group.
//!
//! Coefficientwise the evolution reads
//! `(γ̇, η) = (c, η) + Σ_{1≤|ρ|≤|η|} (γ, ρ)(ρ ◁ c, η)`, which is lower
//! triangular in word length. Levels are solved in order of length, each by
//! classical RK4 on `[0, 1]`. The RK4 stage states of every solved level are
//! kept, so a level sees exactly the values a single RK4 run on the whole
//! system would produce.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{group_product, UnitalSeries};
use crate::products::{pre_lie, shuffle};
use crate::scalar::{from_usize, FieldScalar, RealScalar};
use crate::series::Series;
use crate::words::{Alphabet, Word};

/// Declared regularity of a curve. Not checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    C0,
    C1,
    Smooth,
}

/// A samplable curve `t ↦ c(t)` of series with fixed shape.
#[derive(Clone)]
pub struct SeriesCurve<T> {
    alphabet: Alphabet,
    components: usize,
    trunc: usize,
    continuity: Continuity,
    eval: Arc<dyn Fn(&T) -> Series<T> + Send + Sync>,
}

/// A curve in the Lie algebra of the output-feedback group: one component
/// per input.
pub type LieAlgebraCurve<T> = SeriesCurve<T>;

impl<T> fmt::Debug for SeriesCurve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesCurve")
            .field("alphabet", &self.alphabet)
            .field("components", &self.components)
            .field("trunc", &self.trunc)
            .field("continuity", &self.continuity)
            .finish_non_exhaustive()
    }
}

impl<T: FieldScalar> SeriesCurve<T> {
    pub fn new(
        alphabet: Alphabet,
        components: usize,
        trunc: usize,
        continuity: Continuity,
        eval: impl Fn(&T) -> Series<T> + Send + Sync + 'static,
    ) -> Self {
        SeriesCurve {
            alphabet,
            components,
            trunc,
            continuity,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: Series<T>) -> Self {
        let (alphabet, components, trunc) = (c.alphabet(), c.components(), c.trunc());
        Self::new(alphabet, components, trunc, Continuity::Smooth, move |_| {
            c.clone()
        })
    }

    /// `c(t) = Σ_k t^k c_k`.
    pub fn polynomial(coeffs: Vec<Series<T>>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty coefficient list".into()))?;
        let (alphabet, components) = (first.alphabet(), first.components());
        let trunc = coeffs.iter().map(|c| c.trunc()).min().expect("nonempty");
        let coeffs = coeffs
            .iter()
            .map(|c| {
                if c.alphabet() != alphabet {
                    return Err(Error::AlphabetMismatch {
                        left: alphabet.m(),
                        right: c.alphabet().m(),
                    });
                }
                c.truncate(trunc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(
            alphabet,
            components,
            trunc,
            Continuity::Smooth,
            move |t| {
                coeffs
                    .iter()
                    .rev()
                    .fold(Series::zero(alphabet, components, trunc), |acc, c| {
                        acc.scale(t).try_add(c).expect("same shape")
                    })
            },
        ))
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    /// `c(t)` truncated to `trunc`; fails if the evaluator changes shape.
    pub fn evaluate(&self, t: &T, trunc: usize) -> Result<Series<T>> {
        let c = (self.eval)(t);
        if c.alphabet() != self.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet.m(),
                right: c.alphabet().m(),
            });
        }
        if c.components() != self.components {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                found: c.components(),
            });
        }
        c.truncate(trunc)
    }
}

/// Per-solve bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverStats {
    pub steps: usize,
    pub trunc: usize,
    /// Longest word read while solving level `n`.
    pub max_level_read: Vec<usize>,
    /// Coefficient reads of lower levels while solving level `n`.
    pub reads: Vec<usize>,
    /// `max |(η ◁ c(t), η)|` over level `n` and all sample times.
    pub diagonal_max: Vec<f64>,
    /// `max |γ_h(1) − γ_{2h}(1)|` over level `n`.
    pub level_residuals: Vec<f64>,
}

/// Solution of the evolution equation on the grid `t_s = s/steps`.
#[derive(Debug, Clone)]
pub struct GroupPath<T> {
    times: Vec<T>,
    values: Vec<UnitalSeries<T>>,
    stats: SolverStats,
    /// `max |γ_h − γ_{2h}|` at nodes shared with the half-resolution grid.
    node_residuals: Vec<Option<f64>>,
}

impl<T: FieldScalar> GroupPath<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[UnitalSeries<T>] {
        &self.values
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    /// `γ_δ(s/steps)`.
    pub fn at_step(&self, s: usize) -> &UnitalSeries<T> {
        &self.values[s]
    }

    /// Step-doubling residual at node `s`, when `s` is also a node of the
    /// half-resolution grid.
    pub fn residual_at(&self, s: usize) -> Option<f64> {
        self.node_residuals.get(s).copied().flatten()
    }

    pub fn last(&self) -> &UnitalSeries<T> {
        self.values.last().expect("grid has at least two nodes")
    }
}

impl<T: FieldScalar + RealScalar> GroupPath<T> {
    /// Grid value at `t`, which must be a grid node up to `1e-12`.
    pub fn at(&self, t: f64) -> Result<&UnitalSeries<T>> {
        let steps = self.stats.steps as f64;
        let s = (t * steps).round();
        if !(0.0..=steps).contains(&s) || (s / steps - t).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "t = {t} is not a node of the {steps}-step grid"
            )));
        }
        Ok(&self.values[s as usize])
    }
}

struct TimeNode<T> {
    c: Series<T>,
    /// For each word index `η`: `(ρ, (ρ ◁ c, η))`.
    coupling: Vec<Vec<(usize, T)>>,
}

/// Coefficient storage with access checks: solving level `n` may only read
/// words of length at most `n` that are already solved.
struct Store<T> {
    words: Vec<Word>,
    solved: Vec<bool>,
    /// `[component][word][step]` → the four RK4 stage states.
    stages: Vec<Vec<Vec<[T; 4]>>>,
    /// `[component][word][node]`.
    nodes: Vec<Vec<Vec<T>>>,
    level: usize,
    max_read: usize,
    reads: usize,
}

impl<T: FieldScalar> Store<T> {
    fn read(&mut self, comp: usize, w: usize, step: usize, stage: usize) -> Result<T> {
        let len = self.words[w].len();
        if len > self.level || !self.solved[w] {
            return Err(Error::TriangularityViolation {
                level: self.level,
                word: self.words[w].to_string(),
            });
        }
        self.max_read = self.max_read.max(len);
        self.reads += 1;
        Ok(self.stages[comp][w][step][stage].clone())
    }
}

/// Time node index of RK4 stage `k` in step `s`, on the half-step grid.
fn stage_node(s: usize, k: usize) -> usize {
    match k {
        0 => 2 * s,
        1 | 2 => 2 * s + 1,
        _ => 2 * s + 2,
    }
}

fn time_nodes<T: FieldScalar>(
    curve: &SeriesCurve<T>,
    words: &[Word],
    index: &HashMap<Word, usize>,
    trunc: usize,
    steps: usize,
) -> Result<Vec<TimeNode<T>>> {
    let alphabet = curve.alphabet();
    let two_steps = from_usize::<T>(2 * steps);
    (0..=2 * steps)
        .into_par_iter()
        .map(|tau| {
            let t = from_usize::<T>(tau) / two_steps.clone();
            let c = curve.evaluate(&t, trunc)?;
            let mut coupling = vec![Vec::new(); words.len()];
            for (r, rho) in words.iter().enumerate() {
                if rho.is_empty() {
                    continue;
                }
                let single = Series::from_terms(alphabet, trunc, [(T::one(), rho.clone())]);
                for (_, eta, v) in pre_lie(&single, &c, trunc)?.terms() {
                    coupling[index[eta]].push((r, v.clone()));
                }
            }
            Ok(TimeNode { c, coupling })
        })
        .collect()
}

fn solve<T: FieldScalar + RealScalar>(
    curve: &LieAlgebraCurve<T>,
    trunc: usize,
    steps: usize,
) -> Result<(Vec<Vec<Vec<T>>>, Vec<Word>, SolverStats)> {
    let alphabet = curve.alphabet();
    let m = alphabet.m() as usize;
    if curve.components() != m {
        return Err(Error::ComponentMismatch {
            expected: m,
            found: curve.components(),
        });
    }
    if curve.trunc() < trunc {
        return Err(Error::TruncationMismatch {
            have: curve.trunc(),
            need: trunc,
        });
    }
    let words = alphabet.words_up_to(trunc);
    let index: HashMap<Word, usize> = words
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let nodes_t = time_nodes(curve, &words, &index, trunc, steps)?;
    let h = T::one() / from_usize::<T>(steps);
    let half = h.clone() / from_usize::<T>(2);
    let sixth = h.clone() / from_usize::<T>(6);
    let two = from_usize::<T>(2);
    let four = from_usize::<T>(4);

    let zero_stage = || [T::zero(), T::zero(), T::zero(), T::zero()];
    let mut store = Store {
        words: words.clone(),
        solved: vec![false; words.len()],
        stages: vec![vec![vec![zero_stage(); steps]; words.len()]; m],
        nodes: vec![vec![vec![T::zero(); steps + 1]; words.len()]; m],
        level: 0,
        max_read: 0,
        reads: 0,
    };
    let mut stats = SolverStats {
        steps,
        trunc,
        max_level_read: Vec::new(),
        reads: Vec::new(),
        diagonal_max: Vec::new(),
        level_residuals: Vec::new(),
    };

    for n in 0..=trunc {
        store.level = n;
        store.max_read = 0;
        store.reads = 0;
        let level: Vec<usize> = (0..words.len()).filter(|&w| words[w].len() == n).collect();
        let (quad, coupled): (Vec<usize>, Vec<usize>) =
            level.iter().partition(|&&w| words[w].count(0) == 0);
        let local: HashMap<usize, usize> =
            coupled.iter().enumerate().map(|(i, &w)| (w, i)).collect();

        let mut diag = 0.0f64;
        for node in &nodes_t {
            for &w in &level {
                for (r, v) in &node.coupling[w] {
                    if *r == w {
                        diag = diag.max(v.abs().to_f64().unwrap_or(f64::INFINITY));
                    }
                }
            }
        }
        stats.diagonal_max.push(diag);

        for comp in 0..m {
            // words without x0: (γ, η) = ∫ (c, η), integrated by Simpson's
            // rule on each step, which is what RK4 does for this right side
            for &w in &quad {
                debug_assert!(nodes_t.iter().all(|node| node.coupling[w].is_empty()));
                let word = &words[w];
                let f = |tau: usize| {
                    nodes_t[tau]
                        .c
                        .get(comp, word)
                        .cloned()
                        .unwrap_or_else(T::zero)
                };
                let mut y = T::zero();
                for s in 0..steps {
                    let (f0, fm, f1) = (f(2 * s), f(2 * s + 1), f(2 * s + 2));
                    store.stages[comp][w][s] = [
                        y.clone(),
                        y.clone() + half.clone() * f0.clone(),
                        y.clone() + half.clone() * fm.clone(),
                        y.clone() + h.clone() * fm.clone(),
                    ];
                    y = y + sixth.clone() * (f0 + four.clone() * fm + f1);
                    store.nodes[comp][w][s + 1] = y.clone();
                }
            }
            for &w in &quad {
                store.solved[w] = true;
            }
            if coupled.is_empty() {
                continue;
            }

            // remaining words: v̇ = C_n(t) v + b_n(t)
            let rhs = |store: &mut Store<T>, s: usize, k: usize, y: &[T]| -> Result<Vec<T>> {
                let node = &nodes_t[stage_node(s, k)];
                let mut out = Vec::with_capacity(coupled.len());
                for &w in &coupled {
                    let mut acc = node.c.get(comp, &words[w]).cloned().unwrap_or_else(T::zero);
                    for (r, v) in &node.coupling[w] {
                        let value = match local.get(r) {
                            Some(&i) => y[i].clone(),
                            None => store.read(comp, *r, s, k)?,
                        };
                        acc = acc + value * v.clone();
                    }
                    out.push(acc);
                }
                Ok(out)
            };
            let axpy = |y: &[T], a: &T, k: &[T]| -> Vec<T> {
                y.iter()
                    .zip(k)
                    .map(|(y, k)| y.clone() + a.clone() * k.clone())
                    .collect()
            };
            let mut v = vec![T::zero(); coupled.len()];
            for s in 0..steps {
                let y1 = v.clone();
                let k1 = rhs(&mut store, s, 0, &y1)?;
                let y2 = axpy(&v, &half, &k1);
                let k2 = rhs(&mut store, s, 1, &y2)?;
                let y3 = axpy(&v, &half, &k2);
                let k3 = rhs(&mut store, s, 2, &y3)?;
                let y4 = axpy(&v, &h, &k3);
                let k4 = rhs(&mut store, s, 3, &y4)?;
                for (i, &w) in coupled.iter().enumerate() {
                    store.stages[comp][w][s] =
                        [y1[i].clone(), y2[i].clone(), y3[i].clone(), y4[i].clone()];
                    v[i] = v[i].clone()
                        + sixth.clone()
                            * (k1[i].clone()
                                + two.clone() * k2[i].clone()
                                + two.clone() * k3[i].clone()
                                + k4[i].clone());
                    store.nodes[comp][w][s + 1] = v[i].clone();
                }
            }
        }
        for &w in &coupled {
            store.solved[w] = true;
        }
        stats.max_level_read.push(store.max_read);
        stats.reads.push(store.reads);
    }
    Ok((store.nodes, words, stats))
}

fn assemble<T: FieldScalar>(
    alphabet: Alphabet,
    trunc: usize,
    words: &[Word],
    nodes: &[Vec<Vec<T>>],
    node: usize,
) -> UnitalSeries<T> {
    let m = alphabet.m() as usize;
    let mut body = Series::zero(alphabet, m, trunc);
    for (comp, per_word) in nodes.iter().enumerate() {
        for (w, values) in per_word.iter().enumerate() {
            body.add_term(comp, words[w].clone(), values[node].clone());
        }
    }
    UnitalSeries::new(body).expect("m components")
}

/// Solves `γ̇_δ = γ_δ.c(t)`, `γ_δ(0) = δ` on `[0, 1]` with `steps` RK4 steps.
pub fn evolve<T: FieldScalar + RealScalar>(
    curve: &LieAlgebraCurve<T>,
    trunc: usize,
    steps: usize,
) -> Result<GroupPath<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let (nodes, words, mut stats) = solve(curve, trunc, steps)?;
    let alphabet = curve.alphabet();
    let coarse_steps = (steps / 2).max(1);
    let (coarse, _, _) = solve(curve, trunc, coarse_steps)?;
    let diff = |fine_node: usize, coarse_node: usize, level: Option<usize>| -> f64 {
        let mut r = 0.0f64;
        for (fine, coarse) in nodes.iter().zip(&coarse) {
            for (w, word) in words.iter().enumerate() {
                if level.is_none_or(|n| word.len() == n) {
                    let d = (fine[w][fine_node].clone() - coarse[w][coarse_node].clone()).abs();
                    r = r.max(d.to_f64().unwrap_or(f64::INFINITY));
                }
            }
        }
        r
    };
    stats.level_residuals = (0..=trunc)
        .map(|n| diff(steps, coarse_steps, Some(n)))
        .collect();
    let node_residuals = (0..=steps)
        .map(|s| {
            if steps == 2 * coarse_steps && s % 2 == 0 {
                Some(diff(s, s / 2, None))
            } else {
                None
            }
        })
        .collect();
    let times = (0..=steps)
        .map(|s| from_usize::<T>(s) / from_usize::<T>(steps))
        .collect();
    let values = (0..=steps)
        .map(|s| assemble(alphabet, trunc, &words, &nodes, s))
        .collect();
    Ok(GroupPath {
        times,
        values,
        stats,
        node_residuals,
    })
}

/// `max |γ_δ(1/2) ⊚ γ_δ(1/2) − γ_δ(1)|` for the constant curve `c`.
pub fn one_parameter_check<T: FieldScalar + RealScalar>(
    c: &Series<T>,
    trunc: usize,
    steps: usize,
) -> Result<f64> {
    if steps == 0 || !steps.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "steps = {steps} must be positive and even"
        )));
    }
    let path = evolve(&SeriesCurve::constant(c.clone()), trunc, steps)?;
    let half = path.at_step(steps / 2);
    let square = group_product(half, half, trunc)?;
    let diff = square.body().try_sub(path.last().body())?;
    Ok(diff.max_abs().to_f64().unwrap_or(f64::INFINITY))
}

/// `max |(γ(t), η) − ∫_0^t (c(s), η) ds|` over grid nodes and words without
/// `x0`, the integral taken by composite Simpson directly on the curve.
pub fn startode_residual<T: FieldScalar + RealScalar>(
    curve: &LieAlgebraCurve<T>,
    path: &GroupPath<T>,
) -> Result<f64> {
    let steps = path.stats.steps;
    let trunc = path.stats.trunc;
    let h = T::one() / from_usize::<T>(steps);
    let at =
        |tau: usize| curve.evaluate(&(from_usize::<T>(tau) / from_usize::<T>(2 * steps)), trunc);
    let samples = (0..=2 * steps).map(at).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for comp in 0..curve.components() {
        for word in curve.alphabet().words_up_to(trunc) {
            if word.count(0) != 0 {
                continue;
            }
            let f = |tau: usize| {
                samples[tau]
                    .get(comp, &word)
                    .cloned()
                    .unwrap_or_else(T::zero)
            };
            let mut integral = T::zero();
            for s in 0..steps {
                integral = integral
                    + h.clone() / from_usize::<T>(6)
                        * (f(2 * s) + from_usize::<T>(4) * f(2 * s + 1) + f(2 * s + 2));
                let solved = path.values[s + 1].body().coeff(comp, &word)?;
                let d = (solved - integral.clone())
                    .abs()
                    .to_f64()
                    .unwrap_or(f64::INFINITY);
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

/// Finite-difference check of the linearization
/// `(δ + c) ⊚ (δ + d) = δ + c + d + c ◁ d + O(c, d²)` along the evolution:
/// with `γ_{±}(h)` the solutions for the constant curves `±c`,
/// `∂_t ∂_s body(γ(t) ⊚ (s d)_δ)` at `0` is approximated by central
/// differences in both `t` and `s` and compared with `c ◁ d`.
pub fn linear_part_residual<T: FieldScalar + RealScalar>(
    c: &Series<T>,
    d: &Series<T>,
    trunc: usize,
    steps: usize,
    s: &T,
) -> Result<f64> {
    let plus = evolve(&SeriesCurve::constant(c.clone()), trunc, steps)?;
    let minus = evolve(&SeriesCurve::constant(-c), trunc, steps)?;
    let h = T::one() / from_usize::<T>(steps);
    let body = |g: &UnitalSeries<T>, scale: &T| -> Result<Series<T>> {
        let e = UnitalSeries::new(d.truncate(trunc)?.scale(scale))?;
        Ok(group_product(g, &e, trunc)?.into_body())
    };
    let ds = |g: &UnitalSeries<T>| -> Result<Series<T>> {
        Ok(body(g, s)?
            .try_sub(&body(g, &-s.clone())?)?
            .scale(&(T::one() / (from_usize::<T>(2) * s.clone()))))
    };
    let mixed = ds(plus.at_step(1))?
        .try_sub(&ds(minus.at_step(1))?)?
        .scale(&(T::one() / (from_usize::<T>(2) * h)));
    let expected = pre_lie(&c.truncate(trunc)?, &d.truncate(trunc)?, trunc)?;
    Ok(mixed
        .try_sub(&expected)?
        .max_abs()
        .to_f64()
        .unwrap_or(f64::INFINITY))
}

/// Controls for non-proper Volterra sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraOptions {
    /// Largest order summed when `η` is not proper.
    pub cap: usize,
    /// Terms with max coefficient below this end the sum.
    pub tol: f64,
}

impl Default for VolterraOptions {
    fn default() -> Self {
        VolterraOptions {
            cap: 64,
            tol: 1e-14,
        }
    }
}

/// The Volterra sum on the grid `s_k = k t / steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraPath<T> {
    pub times: Vec<T>,
    /// `γ(s_k)`.
    pub values: Vec<Series<T>>,
    /// Orders summed.
    pub orders: usize,
    /// Max coefficient of the last summed order at `t`.
    pub tail: f64,
}

/// `γ(t) = 1 + Σ_n ∫_0^t ∫_0^{t_{n−1}} ⋯ η(t_1) ⧢ ⋯ ⧢ η(t_n)`, built as
/// `I_n(s) = ∫_0^s I_{n−1} ⧢ η` with a fourth-order cumulative rule.
pub fn shuffle_volterra_path<T: FieldScalar + RealScalar>(
    curve: &SeriesCurve<T>,
    t: &T,
    trunc: usize,
    steps: usize,
    opts: VolterraOptions,
) -> Result<VolterraPath<T>> {
    if steps < 3 {
        return Err(Error::GridTooCoarse(format!(
            "{steps} steps; the cumulative rule needs at least 3"
        )));
    }
    let alphabet = curve.alphabet();
    let comps = curve.components();
    let dt = t.clone() / from_usize::<T>(steps);
    let times: Vec<T> = (0..=steps)
        .map(|k| from_usize::<T>(k) * dt.clone())
        .collect();
    let eta = times
        .par_iter()
        .map(|s| curve.evaluate(s, trunc))
        .collect::<Result<Vec<_>>>()?;
    let proper = eta.iter().all(|e| e.is_proper());
    let one = Series::from_components(vec![Series::one(alphabet, trunc); comps])?;
    let w24 = |k: i64| T::from_i64(k).expect("small integer") / from_usize::<T>(24);
    let interior = [w24(-1), w24(13), w24(13), w24(-1)];
    let first = [w24(9), w24(19), w24(-5), w24(1)];
    let last = [w24(1), w24(-5), w24(19), w24(9)];

    let mut total = vec![one.clone(); steps + 1];
    let mut prev = vec![one; steps + 1];
    let mut orders = 0;
    let mut tail = 0.0;
    let max_order = if proper { trunc } else { opts.cap };
    for n in 1..=max_order {
        let g = prev
            .par_iter()
            .zip(&eta)
            .map(|(p, e)| shuffle(p, e, trunc))
            .collect::<Result<Vec<_>>>()?;
        let mut cur = Vec::with_capacity(steps + 1);
        cur.push(Series::zero(alphabet, comps, trunc));
        for k in 0..steps {
            let (base, weights) = if k == 0 {
                (0, &first)
            } else if k + 2 > steps {
                (steps - 3, &last)
            } else {
                (k - 1, &interior)
            };
            let mut next = cur[k].clone();
            for (i, wgt) in weights.iter().enumerate() {
                next = next.axpy(&(wgt.clone() * dt.clone()), &g[base + i])?;
            }
            cur.push(next);
        }
        for (acc, term) in total.iter_mut().zip(&cur) {
            *acc = acc.try_add(term)?;
        }
        orders = n;
        tail = cur[steps].max_abs().to_f64().unwrap_or(f64::INFINITY);
        let size = cur
            .iter()
            .map(|s| s.max_abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        prev = cur;
        if !proper && size < opts.tol {
            return Ok(VolterraPath {
                times,
                values: total,
                orders,
                tail,
            });
        }
    }
    if !proper {
        return Err(Error::OrderCapExceeded {
            cap: opts.cap,
            tail,
        });
    }
    Ok(VolterraPath {
        times,
        values: total,
        orders,
        tail,
    })
}

/// `γ(t)` from [`shuffle_volterra_path`] with default options.
pub fn shuffle_volterra<T: FieldScalar + RealScalar>(
    curve: &SeriesCurve<T>,
    t: &T,
    trunc: usize,
    steps: usize,
) -> Result<Series<T>> {
    let path = shuffle_volterra_path(curve, t, trunc, steps, VolterraOptions::default())?;
    Ok(path.values.into_iter().last().expect("nonempty grid"))
}

/// `max |(γ(s+Δ) − γ(s−Δ))/2Δ − γ(s) ⧢ η(s)|` at the grid node nearest
/// `t/2`, for the Volterra path on `[0, t]`.
pub fn volterra_derivative_residual<T: FieldScalar + RealScalar>(
    curve: &SeriesCurve<T>,
    t: &T,
    trunc: usize,
    steps: usize,
) -> Result<f64> {
    let path = shuffle_volterra_path(curve, t, trunc, steps, VolterraOptions::default())?;
    let k = steps / 2;
    let dt = t.clone() / from_usize::<T>(steps);
    let fd = path.values[k + 1]
        .try_sub(&path.values[k - 1])?
        .scale(&(T::one() / (from_usize::<T>(2) * dt)));
    let rhs = shuffle(
        &path.values[k],
        &curve.evaluate(&path.times[k], trunc)?,
        trunc,
    )?;
    Ok(fd
        .try_sub(&rhs)?
        .max_abs()
        .to_f64()
        .unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::factorial;
    use crate::Rational;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn f(terms: &[(f64, &str)], trunc: usize) -> Series<f64> {
        Series::from_terms(
            Alphabet::siso(),
            trunc,
            terms.iter().map(|&(v, t)| (v, w(t))),
        )
    }

    #[test]
    fn zero_curve_stays_at_identity() {
        let path = evolve(&SeriesCurve::constant(f(&[], 3)), 3, 8).unwrap();
        assert!(path.values().iter().all(|g| g.is_identity()));
    }

    #[test]
    fn constant_x1_hand_values() {
        let path = evolve(&SeriesCurve::constant(f(&[(1.0, "x1")], 2)), 2, 64).unwrap();
        for (t, g) in path.times().iter().zip(path.values()) {
            let b = g.body();
            assert!((b.coeff(0, &w("x1")).unwrap() - t).abs() < 1e-14);
            assert!((b.coeff(0, &w("x0x1")).unwrap() - t * t / 2.0).abs() < 1e-14);
            assert_eq!(b.coeff(0, &w("x0")).unwrap(), 0.0);
            assert_eq!(b.coeff(0, &w("x1x0")).unwrap(), 0.0);
            assert_eq!(b.coeff(0, &w("x1x1")).unwrap(), 0.0);
        }
    }

    #[test]
    fn exact_rational_steps() {
        let c = Series::from_terms(
            Alphabet::siso(),
            3,
            [(Rational::from_integer(1.into()), w("x1"))],
        );
        let path = evolve(&SeriesCurve::constant(c), 3, 4).unwrap();
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(path.last().body().coeff(0, &w("x0x1")).unwrap(), half);
    }

    #[test]
    fn triangular_access() {
        let c = f(&[(0.5, "e"), (1.0, "x1"), (-0.3, "x0"), (0.2, "x1x0")], 5);
        let path = evolve(&SeriesCurve::constant(c), 5, 16).unwrap();
        let stats = path.stats();
        for n in 0..=5 {
            assert!(stats.max_level_read[n] <= n);
            assert_eq!(stats.diagonal_max[n], 0.0);
        }
        assert!(stats.reads[3] > 0);
    }

    #[test]
    fn startode_matches_quadrature() {
        let curve = SeriesCurve::polynomial(vec![
            f(&[(1.0, "x1"), (0.5, "e")], 3),
            f(&[(2.0, "x1x1")], 3),
            f(&[(-1.0, "x1")], 3),
        ])
        .unwrap();
        let path = evolve(&curve, 3, 32).unwrap();
        assert!(startode_residual(&curve, &path).unwrap() < 1e-14);
        // ∫_0^1 (1 − s²) ds
        let x1 = path.last().body().coeff(0, &w("x1")).unwrap();
        assert!((x1 - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rk4_keeps_the_group_law() {
        // the RK4 map of this affine, left-invariant equation is right
        // translation by its own one-step value, so the law holds to roundoff
        let c = f(&[(1.0, "x0"), (1.0, "x1"), (0.5, "e")], 5);
        for steps in [8, 16, 32] {
            assert!(one_parameter_check(&c, 5, steps).unwrap() < 1e-14);
        }
        assert_eq!(one_parameter_check(&f(&[], 3), 3, 4).unwrap(), 0.0);
        assert!(matches!(
            one_parameter_check(&c, 3, 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rk4_fourth_order() {
        let c = f(&[(1.0, "x0"), (1.0, "x1"), (0.5, "e")], 5);
        let curve = SeriesCurve::constant(c);
        let fine = evolve(&curve, 5, 1024).unwrap();
        let err = |steps| {
            let p = evolve(&curve, 5, steps).unwrap();
            p.last()
                .body()
                .try_sub(fine.last().body())
                .unwrap()
                .max_abs()
        };
        let ratio = err(16) / err(32);
        assert!((14.0..18.0).contains(&ratio), "{ratio}");
        assert!(fine.stats().level_residuals[5] < 1e-12);
    }

    #[test]
    fn linear_part() {
        let c = f(&[(1.0, "x1"), (0.5, "x0"), (0.25, "e")], 3);
        let d = f(&[(1.0, "e"), (-1.0, "x1"), (0.5, "x1x1")], 3);
        let r1 = linear_part_residual(&c, &d, 3, 32, &(1.0 / 32.0)).unwrap();
        let r2 = linear_part_residual(&c, &d, 3, 64, &(1.0 / 64.0)).unwrap();
        assert!(r1 < 1e-2 && r2 < r1 / 3.0, "{r1} {r2}");
    }

    #[test]
    fn volterra_constant_proper() {
        let eta = f(&[(1.0, "x1"), (-0.5, "x0x1")], 5);
        let mut expected = Series::one(Alphabet::siso(), 5);
        let mut half = Series::one(Alphabet::siso(), 5);
        let mut power = Series::one(Alphabet::siso(), 5);
        for n in 1..=5 {
            power = shuffle(&power, &eta, 5).unwrap();
            expected = expected.axpy(&(1.0 / factorial::<f64>(n)), &power).unwrap();
            half = half
                .axpy(&(0.5f64.powi(n as i32) / factorial::<f64>(n)), &power)
                .unwrap();
        }
        let curve = SeriesCurve::constant(eta);
        let got = shuffle_volterra(&curve, &1.0, 5, 256).unwrap();
        assert!(got.try_sub(&expected).unwrap().max_abs() < 1e-8);
        let got = shuffle_volterra(&curve, &0.5, 5, 64).unwrap();
        assert!(got.try_sub(&half).unwrap().max_abs() < 1e-8);
        let zero = shuffle_volterra(&SeriesCurve::constant(f(&[], 3)), &1.0, 3, 8).unwrap();
        assert_eq!(zero, Series::one(Alphabet::siso(), 3));
    }

    #[test]
    fn volterra_non_proper() {
        // γ = exp(t) ∅ for η = ∅
        let path = shuffle_volterra_path(
            &SeriesCurve::constant(f(&[(1.0, "e")], 2)),
            &1.0,
            2,
            64,
            VolterraOptions::default(),
        )
        .unwrap();
        let e = path.values[64].coeff(0, &Word::empty()).unwrap();
        assert!((e - 1f64.exp()).abs() < 1e-7);
        let opts = VolterraOptions { cap: 3, tol: 1e-14 };
        assert!(matches!(
            shuffle_volterra_path(
                &SeriesCurve::constant(f(&[(1.0, "e")], 2)),
                &1.0,
                2,
                64,
                opts
            ),
            Err(Error::OrderCapExceeded { cap: 3, .. })
        ));
    }

    #[test]
    fn volterra_derivative_order() {
        let curve =
            SeriesCurve::polynomial(vec![f(&[(1.0, "x1")], 3), f(&[(1.0, "x0x1")], 3)]).unwrap();
        let r1 = volterra_derivative_residual(&curve, &1.0, 3, 32).unwrap();
        let r2 = volterra_derivative_residual(&curve, &1.0, 3, 64).unwrap();
        assert!(r1 / r2 > 3.0 && r1 / r2 < 5.0, "{r1} {r2}");
    }
}
