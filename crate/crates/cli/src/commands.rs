use std::fmt::Write;
use std::process::ExitCode;
use std::time::Duration;

use lintersect::bounds::{self, BoundReport, TheoremId};
use lintersect::ffpoly::{self, Domain};
use lintersect::random::{random_admissible_family, seeded};
use lintersect::search::{self, SearchConfig, SearchProblem, SearchResult};
use lintersect::setfam::{self, Mode};
use lintersect::witness::{self, CertConfig, Certificate};
use lintersect::{Error, PrimeModulus, ResidueSet, SetFamily};
use serde::Serialize;

use crate::input::{modulus, read_family};
use crate::output::{cells, Format, Report};
use crate::{CertKind, Command, Limits, Params, Sweep, Theorem};

/// Exit status and message for anything that is not a computed result.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_COUNTEREXAMPLE: u8 = 1;

/// The generator scans all `2^n` subsets.
const GENERATE_MAX_N: usize = 20;

impl Failure {
    pub fn validation(message: String) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SearchCapExceeded { .. } | Error::DimensionOverflow { .. } => EXIT_CAP,
            Error::CounterExample(_) => EXIT_COUNTEREXAMPLE,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

pub fn run(command: Command, format: Format) -> Outcome {
    match command {
        Command::Bsupp { l, p, integers } => {
            let domain = if integers {
                Domain::Integers
            } else {
                Domain::Modular(modulus(p)?.expect("clap requires p"))
            };
            bsupp(&l.to_set()?, domain, format)
        }
        Command::Shadow { family, levels } => shadow(&read_family(&family)?, levels, format),
        Command::Bound {
            family,
            theorem,
            params,
        } => bound(&read_family(&family)?, theorem, &params, format),
        Command::Certificate {
            family,
            kind,
            params,
            with_nonshadows,
            unchecked,
            emit_matrix,
            matrix_cap,
        } => {
            let config = CertConfig {
                matrix_cap,
                keep_matrix: emit_matrix,
            };
            certificate(
                &read_family(&family)?,
                kind,
                &params,
                with_nonshadows,
                unchecked,
                config,
                format,
            )
        }
        Command::Search { n, params, limits } => run_search(n, &params, &limits, format),
        Command::Sweep { sweep } => match sweep {
            Sweep::Sharpness {
                n_max,
                s_max,
                limits,
            } => sharpness(n_max, s_max, &limits, format),
            Sweep::Unattainability { p, n_max, limits } => {
                unattainability(PrimeModulus::new(p)?, n_max, &limits, format)
            }
        },
        Command::Generate { n, params, seed } => generate(n, &params, seed, format),
    }
}

fn mode_of(p: Option<PrimeModulus>) -> Mode {
    p.map_or(Mode::Exact, Mode::Modular)
}

fn list<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    let items: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    items.join(" ")
}

fn bsupp(l: &ResidueSet, domain: Domain, format: Format) -> Outcome {
    let e = ffpoly::annihilator_expansion(l, domain)?;
    let rows = e
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| cells([&j, c]))
        .collect();
    let text = format!(
        "L = {l} over {domain}\ncoefficients: {}\nsupport: {}\n",
        list(e.coeffs()),
        list(e.support())
    );
    Report::new(&e)
        .table(vec!["j", "coefficient"], rows)
        .text(text)
        .emit(format);
    Ok(ExitCode::SUCCESS)
}

fn shadow(family: &SetFamily, levels: Option<Vec<usize>>, format: Format) -> Outcome {
    let n = family.n();
    let levels = levels.unwrap_or_else(|| (0..=n).collect());
    if let Some(&bad) = levels.iter().find(|&&j| j > n) {
        return Err(Error::LevelOutOfRange { level: bad, n }.into());
    }
    let stats: Vec<_> = levels
        .iter()
        .map(|&j| setfam::level_stats(family, j))
        .collect();
    let rows = stats
        .iter()
        .map(|s| cells([&s.level, &s.shadow_count, &s.nonshadow_count]))
        .collect();
    let mut text = format!("n = {n}, |F| = {}\n", family.len());
    for s in &stats {
        let _ = writeln!(
            text,
            "level {:>2}: shadow {:>6}  non-shadow {:>6}",
            s.level, s.shadow_count, s.nonshadow_count
        );
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        n: usize,
        family_size: usize,
        levels: &'a [setfam::LevelStats],
    }
    Report::new(&Doc {
        n,
        family_size: family.len(),
        levels: &stats,
    })
    .table(vec!["j", "shadow", "nonshadow"], rows)
    .text(text)
    .emit(format);
    Ok(ExitCode::SUCCESS)
}

fn theorem_id(t: Theorem) -> TheoremId {
    match t {
        Theorem::AbsClassic => TheoremId::AbsClassic,
        Theorem::Multilevel => TheoremId::MultilevelNonshadow,
        Theorem::ModularMultilevel => TheoremId::ModularMultilevel,
        Theorem::CoeffSensitive => TheoremId::CoeffSensitive,
        Theorem::CoeffSensitiveNonshadow => TheoremId::CoeffSensitiveNonshadow,
        Theorem::AlmostInitial => TheoremId::AlmostInitial,
        Theorem::Consecutive => TheoremId::Consecutive,
        Theorem::NonmodularSupport => TheoremId::NonmodularSupport,
    }
}

fn bound(family: &SetFamily, theorem: Theorem, params: &Params, format: Format) -> Outcome {
    let (k, l, p) = (params.k.to_set()?, params.l.to_set()?, modulus(params.p)?);
    let report = bounds::check(theorem_id(theorem), family, &k, &l, p)?;
    let row = cells([
        &format!("{:?}", report.theorem),
        &report.hypotheses_ok,
        &report.lhs,
        &report.rhs,
        &report.slack,
    ]);
    Report::new(&report)
        .table(
            vec!["theorem", "hypotheses_ok", "lhs", "rhs", "slack"],
            vec![row],
        )
        .text(bound_text(&report))
        .emit(format);
    Ok(ExitCode::SUCCESS)
}

fn bound_text(r: &BoundReport) -> String {
    let mut text = format!(
        "{:?} ({}), n = {}, s = {}, r = {}\n",
        r.theorem, r.mode, r.n, r.s, r.r
    );
    if r.hypotheses_ok {
        text.push_str("hypotheses: ok\n");
    } else {
        let _ = writeln!(text, "hypotheses violated: {:?}", r.violated);
    }
    let _ = writeln!(
        text,
        "lhs = {}  rhs = {}  slack = {}",
        r.lhs, r.rhs, r.slack
    );
    if let Some(support) = &r.bsupp {
        let _ = writeln!(text, "bsupp: {}", list(support));
    }
    text
}

fn certificate(
    family: &SetFamily,
    kind: CertKind,
    params: &Params,
    with_nonshadows: bool,
    unchecked: bool,
    config: CertConfig,
    format: Format,
) -> Outcome {
    let (k, l, p) = (params.k.to_set()?, params.l.to_set()?, modulus(params.p)?);
    match kind {
        CertKind::Gram => {
            let p = p.ok_or_else(|| Failure::validation("gram certificates need --p".into()))?;
            let g = witness::gram_witness(family, &l, p)?;
            let mut text = format!("gram matrix {0}x{0} mod {p}: ", g.size);
            match &g.violation {
                None => text.push_str("valid\n"),
                Some(v) => {
                    let _ = writeln!(
                        text,
                        "invalid at ({}, {}): {} and {} give {}",
                        v.row, v.col, v.first, v.second, v.value
                    );
                }
            }
            Report::new(&g)
                .table(vec!["size", "valid"], vec![cells([&g.size, &g.valid])])
                .text(text)
                .emit(format);
        }
        CertKind::Witness => {
            let mode = mode_of(p);
            let w = if unchecked {
                witness::build_witness_unchecked(family, &k, &l, mode)?
            } else {
                witness::build_witness(family, &k, &l, mode)?
            };
            let cert = witness::verify_independence(&w, config)?;
            emit_certificate(&cert, Some(w.ambient_dimension()), format);
        }
        CertKind::Incidence => {
            let domain = p.map_or(Domain::Integers, Domain::Modular);
            let cert =
                witness::incidence_independence(family, &l, domain, with_nonshadows, config)?;
            emit_certificate(&cert, None, format);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_certificate(cert: &Certificate, dimension: Option<u128>, format: Format) {
    let mut report = Report::new(cert);
    if let (Some(m), serde_json::Value::Object(fields)) = (&cert.matrix, &mut report.json) {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect();
        fields.insert("matrix".into(), serde_json::to_value(rows).expect("json"));
    }
    if let (Some(d), serde_json::Value::Object(fields)) = (dimension, &mut report.json) {
        fields.insert(
            "ambient_dimension".into(),
            serde_json::to_value(d).expect("json"),
        );
    }
    let text = format!(
        "{} vectors in {} coordinates over {}: rank {}, {}\n",
        cert.rows,
        cert.cols,
        cert.domain,
        cert.rank,
        if cert.independent {
            "independent"
        } else {
            "dependent"
        }
    );
    report
        .table(
            vec!["rows", "cols", "rank", "independent"],
            vec![cells([
                &cert.rows,
                &cert.cols,
                &cert.rank,
                &cert.independent,
            ])],
        )
        .text(text)
        .emit(format);
}

fn search_config(limits: &Limits) -> Result<SearchConfig, Failure> {
    if !(limits.time_budget >= 0.0 && limits.time_budget.is_finite()) {
        return Err(Failure::validation(format!(
            "time budget must be a nonnegative number of seconds, got {}",
            limits.time_budget
        )));
    }
    Ok(SearchConfig {
        max_n: limits.max_n,
        max_vertices: limits.max_vertices,
        time_budget: Some(Duration::from_secs_f64(limits.time_budget)),
        threads: limits.threads,
        theorem_prune: !limits.no_theorem_prune,
    })
}

fn run_search(n: usize, params: &Params, limits: &Limits, format: Format) -> Outcome {
    let (k, l, p) = (params.k.to_set()?, params.l.to_set()?, modulus(params.p)?);
    let problem = SearchProblem {
        n,
        mode: mode_of(p),
        k,
        l,
    };
    let result = search::max_family(&problem, &search_config(limits)?)?;
    let timed_out = result.timed_out;
    emit_search(&result, format);
    Ok(if timed_out {
        ExitCode::from(EXIT_CAP)
    } else {
        ExitCode::SUCCESS
    })
}

fn emit_search(r: &SearchResult, format: Format) {
    let row = cells([
        &r.max_size,
        &r.bound_used,
        &r.vertices,
        &r.nodes_explored,
        &r.proof_of_optimality,
        &r.timed_out,
    ]);
    let mut text = format!(
        "max size {} (bound {}{}), {} vertices, {} nodes\n",
        r.max_size,
        r.bound_used,
        r.bound_source
            .map(|t| format!(" from {t:?}"))
            .unwrap_or_default(),
        r.vertices,
        r.nodes_explored
    );
    if r.timed_out {
        text.push_str("timed out: best found so far, optimality not proven\n");
    }
    text.push_str(&r.witness.to_text());
    Report::new(r)
        .table(
            vec![
                "max_size",
                "bound",
                "vertices",
                "nodes",
                "proof_of_optimality",
                "timed_out",
            ],
            vec![row],
        )
        .text(text)
        .emit(format);
}

fn sharpness(n_max: usize, s_max: usize, limits: &Limits, format: Format) -> Outcome {
    let rows = search::sharpness_sweep(n_max, s_max, &search_config(limits)?)?;
    let table = rows
        .iter()
        .map(|r| {
            cells([
                &r.n,
                &r.s,
                &r.r,
                &r.attained,
                &r.bound,
                &r.union_witness,
                &r.proof_of_optimality,
            ])
        })
        .collect();
    let mut text = String::from("  n  s  r  attained     bound\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{:>3}{:>3}{:>3}{:>10}{:>10}",
            r.n, r.s, r.r, r.attained, r.bound
        );
    }
    let all_proven = rows.iter().all(|r| r.proof_of_optimality);
    Report::new(&rows)
        .table(
            vec![
                "n",
                "s",
                "r",
                "attained",
                "bound",
                "union_witness",
                "proof_of_optimality",
            ],
            table,
        )
        .text(text)
        .emit(format);
    Ok(if all_proven {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CAP)
    })
}

fn unattainability(p: PrimeModulus, n_max: usize, limits: &Limits, format: Format) -> Outcome {
    let rows = search::unattainability_sweep(p, n_max, &search_config(limits)?)?;
    let table = rows
        .iter()
        .map(|r| {
            cells([
                &r.p,
                &r.n,
                &r.s,
                &r.r,
                &list(&r.k),
                &r.max_size,
                &r.level_bound,
                &r.abs_bound,
                &r.proof_of_optimality,
            ])
        })
        .collect();
    let mut text = String::from("  p  n  s  r  K              max  binom(n,s)  N(n,s,r)\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{:>3}{:>3}{:>3}{:>3}  {:<12}{:>6}{:>12}{:>10}",
            r.p,
            r.n,
            r.s,
            r.r,
            format!("{{{}}}", list(&r.k).replace(' ', ",")),
            r.max_size,
            r.level_bound,
            r.abs_bound
        );
    }
    let all_proven = rows.iter().all(|r| r.proof_of_optimality);
    Report::new(&rows)
        .table(
            vec![
                "p",
                "n",
                "s",
                "r",
                "K",
                "max_size",
                "level_bound",
                "abs_bound",
                "proof_of_optimality",
            ],
            table,
        )
        .text(text)
        .emit(format);
    Ok(if all_proven {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CAP)
    })
}

fn generate(n: usize, params: &Params, seed: u64, format: Format) -> Outcome {
    let (k, l, p) = (params.k.to_set()?, params.l.to_set()?, modulus(params.p)?);
    let mode = mode_of(p);
    if let Some(p) = p {
        k.validate(Domain::Modular(p))?;
        l.validate(Domain::Modular(p))?;
    }
    if n > GENERATE_MAX_N {
        return Err(Error::SearchCapExceeded {
            required: format!("n = {n}"),
            cap: GENERATE_MAX_N,
        }
        .into());
    }
    let family = random_admissible_family(n, &k, &l, mode, &mut seeded(seed))?;
    let rows = family
        .iter()
        .map(|s| {
            vec![s
                .elements()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ")]
        })
        .collect();
    Report::new(&family)
        .table(vec!["set"], rows)
        .text(family.to_text())
        .emit(format);
    Ok(ExitCode::SUCCESS)
}
