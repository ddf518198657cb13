use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fliess_core::bounds::{
    bk_table, verify_bk_majorant, verify_composition_bound, verify_shuffle_bound,
    verify_shuffle_power_sum, BoundReport,
};
use fliess_core::evolution::{evolve, shuffle_volterra_path, SeriesCurve, VolterraOptions};
use fliess_core::fliess::{
    cascade_check, fliess_eval, realization_to_series, InputSignal, PolynomialRealization,
};
use fliess_core::groups::{feedback, group_inverse, shuffle_inverse, UnitalSeries};
use fliess_core::products::{compose, lie_bracket, mixed_compose, pre_lie, shuffle};
use fliess_core::scalar::parse_rational;
use fliess_core::series::{parse_series, ParseOptions};
use fliess_core::{Polynomial, Rational, RealScalar, ScalarText, Series};

use crate::acceptance;
use crate::{Cli, CliError, Global, Lemma, Mode, SampleArgs, Verb};

type Outcome = std::result::Result<String, (String, CliError)>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn load<T: RealScalar + ScalarText>(path: &Path, g: &Global) -> Result<Series<T>, CliError> {
    let opts = ParseOptions {
        trunc: g.trunc,
        m: None,
    };
    Ok(parse_series(&read(path)?, &opts)?)
}

fn trunc_for<T: fliess_core::Scalar>(g: &Global, inputs: &[&Series<T>]) -> usize {
    g.trunc
        .unwrap_or_else(|| inputs.iter().map(|s| s.trunc()).min().unwrap_or(0))
}

fn scalar<T: ScalarText>(text: &str, flag: &str) -> Result<T, CliError> {
    T::parse_scalar(text).ok_or_else(|| CliError::Usage(format!("--{flag}: cannot parse `{text}`")))
}

fn rational(text: &str, flag: &str) -> Result<Rational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Usage(format!("--{flag}: cannot parse `{text}`")))
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn algebra<T: RealScalar + ScalarText>(verb: &Verb, g: &Global) -> Result<String, CliError> {
    let binary = |a: &PathBuf, b: &PathBuf| -> Result<(Series<T>, Series<T>, usize), CliError> {
        let (a, b) = (load::<T>(a, g)?, load::<T>(b, g)?);
        let l = trunc_for(g, &[&a, &b]);
        Ok((a, b, l))
    };
    let out = match verb {
        Verb::Shuffle { a, b } => {
            let (a, b, l) = binary(a, b)?;
            shuffle(&a, &b, l)?
        }
        Verb::Compose { a, b } => {
            let (a, b, l) = binary(a, b)?;
            compose(&a, &b, l)?
        }
        Verb::MixedCompose { a, b } => {
            let (a, b, l) = binary(a, b)?;
            mixed_compose(&a, &b, l)?
        }
        Verb::PreLie { a, b } => {
            let (a, b, l) = binary(a, b)?;
            pre_lie(&a, &b, l)?
        }
        Verb::Bracket { a, b } => {
            let (a, b, l) = binary(a, b)?;
            lie_bracket(&a, &b, l)?
        }
        Verb::Feedback { c, d } => {
            let (c, d, l) = binary(c, d)?;
            feedback(&c, &d, l)?
        }
        Verb::ShuffleInv { a } => {
            let a = load::<T>(a, g)?;
            let l = trunc_for(g, &[&a]);
            shuffle_inverse(&a, l)?
        }
        Verb::GroupInv { a } => {
            let a = load::<T>(a, g)?;
            let l = trunc_for(g, &[&a]);
            group_inverse(&UnitalSeries::new(a)?, l)?.into_body()
        }
        Verb::Norm { a, m } => {
            let a = load::<T>(a, g)?;
            let mg: T = scalar(m, "M")?;
            if !(mg > T::zero()) {
                return Err(CliError::Usage("--M must be positive".into()));
            }
            let est = a.growth_estimate(mg.to_f64().unwrap_or(f64::NAN));
            return Ok(format!(
                "norm={}\ngrowth K={} M={}\n",
                a.linf_norm(&mg).format_scalar(),
                float(est.k),
                float(est.m)
            ));
        }
        _ => unreachable!("not an algebraic verb"),
    };
    Ok(out.to_text())
}

fn signal(path: &Path) -> Result<InputSignal, CliError> {
    Ok(InputSignal::parse(&read(path)?)?)
}

fn numeric(verb: &Verb, g: &Global) -> Result<String, CliError> {
    match verb {
        Verb::FliessEval { c, u, t } => {
            let c = load::<f64>(c, g)?;
            let u = signal(u)?;
            let t = t.unwrap_or(u.t1());
            let v = fliess_eval(&c, &u, t)?;
            let y: Vec<String> = v.y.iter().map(|&y| float(y)).collect();
            Ok(format!(
                "t={} y={} top_stratum={}\n",
                float(t),
                y.join(","),
                float(v.top_stratum)
            ))
        }
        Verb::CascadeCheck { c, d, u, t } => {
            let (c, d) = (load::<f64>(c, g)?, load::<f64>(d, g)?);
            let u = signal(u)?;
            let t = t.unwrap_or(u.t1());
            let l = g.trunc.unwrap_or(6);
            Ok(format!(
                "residual={}\n",
                float(cascade_check(&c, &d, &u, t, l)?)
            ))
        }
        _ => unreachable!("not a numeric verb"),
    }
}

fn realize(r: &Path, params: &[String], g: &Global) -> Result<String, CliError> {
    let real = PolynomialRealization::parse(&read(r)?)?;
    let mut bound = Vec::new();
    for p in params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param expects NAME=VALUE, got `{p}`")))?;
        bound.push((name.trim().to_string(), rational(value, "param")?));
    }
    let free: Vec<String> = real
        .params()
        .into_iter()
        .filter(|p| !bound.iter().any(|(name, _)| name == p))
        .collect();
    let real = real.with_params(&bound)?;
    let l = g.trunc.unwrap_or(4);
    let series = realization_to_series(&real, l)?;
    if free.is_empty() {
        let exact: Series<Rational> = series.map(|p| p.as_constant().expect("no free symbols"));
        return Ok(match g.mode(Mode::Rational) {
            Mode::Rational => exact.to_text(),
            Mode::Float => exact.to_f64().to_text(),
        });
    }
    Ok(symbolic_text(&series, &real, &free))
}

fn symbolic_text(s: &Series<Polynomial>, r: &PolynomialRealization, free: &[String]) -> String {
    let mut out = format!(
        "# alphabet m={} components l={} trunc L={}\n# symbolic in {}\n",
        s.alphabet().m(),
        s.components(),
        s.trunc(),
        free.join(" ")
    );
    for (j, w, v) in s.terms() {
        let prefix = if s.components() > 1 {
            format!("[{}] ", j + 1)
        } else {
            String::new()
        };
        let _ = writeln!(out, "{prefix}({}) {w}", v.display(&r.names));
    }
    out
}

fn curve<T: RealScalar + ScalarText>(
    files: &[PathBuf],
    g: &Global,
) -> Result<SeriesCurve<T>, CliError> {
    let coeffs = files
        .iter()
        .map(|f| load::<T>(f, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesCurve::polynomial(coeffs)?)
}

fn run_evolve<T: RealScalar + ScalarText>(
    files: &[PathBuf],
    steps: usize,
    times: &str,
    g: &Global,
) -> Result<String, CliError> {
    let c = curve::<T>(files, g)?;
    let l = g.trunc.unwrap_or(c.trunc());
    let path = evolve(&c, l, steps)?;
    let mut manifest = String::new();
    let mut inline = String::new();
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    }
    for t in times.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let tv: f64 = t
            .parse()
            .map_err(|_| CliError::Usage(format!("--times: cannot parse `{t}`")))?;
        let value = path.at(tv)?;
        let node = (tv * steps as f64).round() as usize;
        let residual = path
            .residual_at(node)
            .map_or_else(|| "nan".to_string(), float);
        let text = value.body().to_text();
        match &g.out {
            Some(dir) => {
                let name = format!("gamma_{node:06}.series");
                let file = dir.join(&name);
                std::fs::write(&file, &text)
                    .map_err(|e| CliError::Io(file.display().to_string(), e))?;
                let _ = writeln!(manifest, "t={} file={name} residual={residual}", float(tv));
            }
            None => {
                let _ = writeln!(inline, "# t={} file=- residual={residual}", float(tv));
                inline.push_str(&text);
            }
        }
    }
    if let Some(dir) = &g.out {
        let file = dir.join("manifest.txt");
        std::fs::write(&file, &manifest)
            .map_err(|e| CliError::Io(file.display().to_string(), e))?;
        return Ok(manifest);
    }
    Ok(inline)
}

fn run_volterra<T: RealScalar + ScalarText>(
    files: &[PathBuf],
    t: f64,
    steps: usize,
    cap: usize,
    g: &Global,
) -> Result<String, CliError> {
    let eta = curve::<T>(files, g)?;
    let l = g.trunc.unwrap_or(eta.trunc());
    let tv = T::from_f64(t).ok_or_else(|| CliError::Usage(format!("--t {t}")))?;
    let opts = VolterraOptions {
        cap,
        ..VolterraOptions::default()
    };
    let path = shuffle_volterra_path(&eta, &tv, l, steps, opts)?;
    let value = path.values.last().expect("nonempty grid");
    Ok(format!(
        "# t={} orders={} tail={}\n{}",
        float(t),
        path.orders,
        float(path.tail),
        value.to_text()
    ))
}

fn report(r: BoundReport) -> Outcome {
    let text = format!("{r}\n");
    if r.pass {
        Ok(text)
    } else {
        Err((text, CliError::Failed(r.summary())))
    }
}

fn verify(lemma: &Lemma, g: &Global) -> Outcome {
    let inner = || -> Result<BoundReport, CliError> {
        Ok(match lemma {
            Lemma::ShuffleBound(SampleArgs { m, eps, l, samples }) => verify_shuffle_bound(
                &rational(m, "M")?,
                &rational(eps, "eps")?,
                *l,
                *samples,
                g.seed(),
            ),
            Lemma::CompositionBound(SampleArgs { m, eps, l, samples }) => verify_composition_bound(
                &rational(m, "M")?,
                &rational(eps, "eps")?,
                *l,
                *samples,
                g.seed(),
            )?,
            Lemma::ShufflePower { m, n_search, l } => {
                verify_shuffle_power_sum(&rational(m, "M")?, *n_search, *l, g.seed())?
            }
            Lemma::BkMajorant { kmax, grid } => verify_bk_majorant(&bk_table(*kmax)?, *kmax, *grid),
        })
    };
    match inner() {
        Ok(r) => report(r),
        Err(e) => Err((String::new(), e)),
    }
}

fn suite(name: &str) -> Outcome {
    let ids = acceptance::suite_criteria(name).ok_or_else(|| {
        (
            String::new(),
            CliError::Usage(format!(
                "unknown suite `{name}`; expected one of {}",
                acceptance::SUITES.join(", ")
            )),
        )
    })?;
    let mut text = String::new();
    let (mut checks, mut failed) = (0, 0);
    for id in ids {
        let r = acceptance::run_criterion(*id);
        text.push_str(&r.render());
        checks += r.checks.len();
        failed += r.checks.iter().filter(|c| !c.pass).count();
    }
    let _ = writeln!(
        text,
        "suite={name} checks={checks} failed={failed} pass={}",
        failed == 0
    );
    if failed == 0 {
        Ok(text)
    } else {
        Err((
            text,
            CliError::Failed(format!("{failed} of {checks} checks failed")),
        ))
    }
}

/// Runs one parsed command and returns its stdout text. On failure the
/// text produced so far accompanies the error.
pub fn execute(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let plain = |r: Result<String, CliError>| r.map_err(|e| (String::new(), e));
    match &cli.verb {
        v @ (Verb::Shuffle { .. }
        | Verb::Compose { .. }
        | Verb::MixedCompose { .. }
        | Verb::PreLie { .. }
        | Verb::Bracket { .. }
        | Verb::ShuffleInv { .. }
        | Verb::GroupInv { .. }
        | Verb::Feedback { .. }
        | Verb::Norm { .. }) => plain(match g.mode(Mode::Rational) {
            Mode::Rational => algebra::<Rational>(v, g),
            Mode::Float => algebra::<f64>(v, g),
        }),
        v @ (Verb::FliessEval { .. } | Verb::CascadeCheck { .. }) => plain(numeric(v, g)),
        Verb::Realize { r, params } => plain(realize(r, params, g)),
        Verb::Evolve { c, steps, times } => plain(match g.mode(Mode::Float) {
            Mode::Rational => run_evolve::<Rational>(c, *steps, times, g),
            Mode::Float => run_evolve::<f64>(c, *steps, times, g),
        }),
        Verb::Volterra { eta, t, steps, cap } => plain(match g.mode(Mode::Float) {
            Mode::Rational => run_volterra::<Rational>(eta, *t, *steps, *cap, g),
            Mode::Float => run_volterra::<f64>(eta, *t, *steps, *cap, g),
        }),
        Verb::BkTable { kmax } => {
            plain(bk_table(*kmax).map(|t| t.render()).map_err(CliError::from))
        }
        Verb::Verify { lemma } => verify(lemma, g),
        Verb::Suite { name } => suite(name),
    }
}
