//! The four subcommands. Each builds an [`ExperimentReport`]; sweeps run in
//! parallel and are assembled in input order.

use anyhow::{bail, Context};
use qbmax_core::lemmas::{chain_gate, Tolerance, Verdict, VerificationReport, Verifier};
use qbmax_core::operators::{approximation_rate, theorem6_bound_on, theorem6_factor, uniform_grid};
use qbmax_core::statconv::StTarget;
use qbmax_core::{
    theorem8_harness, verify_st_limit_conditions_with, MaxProductOperator, ModulusGrid,
    TestFunction,
};
use rayon::prelude::*;

use crate::args::{
    check_alphas, check_grid, join, parse_function, parse_matrix, parse_sequence, BoundArgs,
    EvalArgs, StatArgs, SweepPoint, VerifyArgs,
};
use crate::report::{float, opt, opt_float, ExperimentReport};

fn out_path(out: &Option<std::path::PathBuf>) -> String {
    out.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "-".into())
}

pub fn cmd_eval(args: &EvalArgs) -> anyhow::Result<ExperimentReport> {
    let f = parse_function(&args.f)?;
    check_grid(args.grid)?;
    let points = args.q.sweep(&args.n)?;
    let q_echo = args.q.describe();
    let config = vec![
        ("f", args.f.clone()),
        ("n", join(&args.n)),
        q_echo,
        ("grid", args.grid.to_string()),
        ("out", out_path(&args.out)),
    ];
    let mut report =
        ExperimentReport::new("eval", config, &["n", "q", "x", "f_x", "B_x", "abs_error"]);

    let blocks: Vec<(Vec<Vec<String>>, f64)> = points
        .par_iter()
        .map(|p| -> anyhow::Result<_> {
            let op = MaxProductOperator::new(p.n, p.q)?;
            let samples = op.sample(&f)?;
            let mut rows = Vec::with_capacity(args.grid);
            let mut sup = 0.0f64;
            for x in uniform_grid(args.grid)? {
                let fx = f.eval(x);
                let bx = op.apply(&samples, x)?.value;
                let err = (bx - fx).abs();
                sup = sup.max(err);
                rows.push(vec![
                    p.n.to_string(),
                    float(p.q.get()),
                    float(x),
                    float(fx),
                    float(bx),
                    float(err),
                ]);
            }
            Ok((rows, sup))
        })
        .collect::<anyhow::Result<_>>()?;

    for (p, (rows, sup)) in points.iter().zip(blocks) {
        rows.into_iter().for_each(|r| report.push(r));
        report.notes.push(format!(
            "sup_error n={} q={} value={}",
            p.n,
            float(p.q.get()),
            float(sup)
        ));
    }
    Ok(report)
}

struct BoundRow {
    alpha: u32,
    sup: f64,
    cor1_max: f64,
    thm6: f64,
    /// `thm6` with the grid resolution slack added to the modulus.
    thm6_upper: f64,
    gate: bool,
}

fn bound_rows<F: TestFunction>(
    f: &F,
    omega: &ModulusGrid,
    p: SweepPoint,
    alphas: &[u32],
    grid: usize,
) -> anyhow::Result<Vec<BoundRow>> {
    let op = MaxProductOperator::new(p.n, p.q)?;
    let samples = op.sample(f)?;
    let (mut sup, mut cor1_max) = (0.0f64, 0.0f64);
    for x in uniform_grid(grid)? {
        sup = sup.max((op.apply(&samples, x)?.value - f.eval(x)).abs());
        cor1_max = cor1_max.max(2.0 * omega.omega(op.delta_n(x)?)?);
    }
    let gate = chain_gate(p.n, p.q);
    alphas
        .iter()
        .map(|&alpha| {
            let rate = approximation_rate(p.n + 1, p.q, alpha)?;
            Ok(BoundRow {
                alpha,
                sup,
                cor1_max,
                thm6: theorem6_bound_on(omega, p.n, p.q, alpha)?,
                thm6_upper: theorem6_factor(p.n, p.q) * omega.omega_upper(rate)?,
                gate,
            })
        })
        .collect()
}

pub fn cmd_bound(args: &BoundArgs) -> anyhow::Result<ExperimentReport> {
    let f = parse_function(&args.f)?;
    check_grid(args.grid)?;
    check_alphas(&args.alpha)?;
    let points = args.q.sweep(&args.n)?;
    let config = vec![
        ("f", args.f.clone()),
        ("n", join(&args.n)),
        args.q.describe(),
        ("alpha", join(&args.alpha)),
        ("grid", args.grid.to_string()),
        ("out", out_path(&args.out)),
    ];
    let columns = [
        "n",
        "q",
        "alpha",
        "sup_error",
        "bound_cor1_max",
        "bound_thm6",
        "ratio",
        "verdict",
    ];
    let mut report = ExperimentReport::new("bound", config, &columns);
    let omega = ModulusGrid::new(&f, args.grid)?;
    let tol = Tolerance::default();

    let blocks: Vec<Vec<BoundRow>> = points
        .par_iter()
        .map(|&p| bound_rows(&f, &omega, p, &args.alpha, args.grid))
        .collect::<anyhow::Result<_>>()?;

    for (p, rows) in points.iter().zip(blocks) {
        for r in rows {
            let verdict = if !r.gate {
                Verdict::Skip
            } else if tol.holds(r.sup, r.thm6_upper) {
                Verdict::Pass
            } else {
                report.max_violation = report.max_violation.max(r.sup - r.thm6_upper);
                Verdict::Fail
            };
            report.tally.add(verdict);
            let ratio = if r.thm6 > 0.0 {
                r.sup / r.thm6
            } else if r.sup == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            report.push(vec![
                p.n.to_string(),
                float(p.q.get()),
                r.alpha.to_string(),
                float(r.sup),
                float(r.cor1_max),
                float(r.thm6),
                float(ratio),
                verdict.as_str().into(),
            ]);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lemma {
    Two,
    Three,
    Four,
    Five,
    Kernel,
}

impl Lemma {
    fn parse(text: &str) -> anyhow::Result<Lemma> {
        Ok(match text {
            "2" => Lemma::Two,
            "3" => Lemma::Three,
            "4" => Lemma::Four,
            "5" => Lemma::Five,
            "kernel" => Lemma::Kernel,
            other => bail!("unknown lemma {other:?}; expected 2, 3, 4, 5 or kernel"),
        })
    }

    fn uses_alpha(self) -> bool {
        matches!(self, Lemma::Four | Lemma::Kernel)
    }

    fn run(self, v: &Verifier, alpha: u32) -> qbmax_core::Result<VerificationReport> {
        match self {
            Lemma::Two => v.lemma2(),
            Lemma::Three => v.lemma3(),
            Lemma::Four => v.lemma4(alpha),
            Lemma::Five => v.lemma5(),
            Lemma::Kernel => v.kernel_bound(alpha),
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExperimentReport> {
    let lemma = Lemma::parse(&args.lemma)?;
    check_grid(args.grid)?;
    check_alphas(&args.alpha)?;
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        bail!("tol must be a nonnegative real, got {}", args.tol);
    }
    let tol = Tolerance::with_rel(args.tol);
    let points = args.q.sweep(&args.n)?;
    let alphas: Vec<Option<u32>> = if lemma.uses_alpha() {
        args.alpha.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut config = vec![
        ("lemma", args.lemma.clone()),
        ("n", join(&args.n)),
        args.q.describe(),
    ];
    if lemma.uses_alpha() {
        config.push(("alpha", join(&args.alpha)));
    }
    config.extend([
        ("grid", args.grid.to_string()),
        ("tol", float(tol.rel)),
        ("tol_abs", float(tol.abs)),
        ("out", out_path(&args.out)),
    ]);
    let columns = [
        "lemma", "n", "q", "alpha", "j", "k", "x", "lhs", "rhs", "verdict",
    ];
    let mut report = ExperimentReport::new("verify", config, &columns);

    let jobs: Vec<(SweepPoint, Option<u32>)> = points
        .iter()
        .flat_map(|&p| alphas.iter().map(move |&a| (p, a)))
        .collect();
    let results: Vec<VerificationReport> = jobs
        .par_iter()
        .map(|&(p, alpha)| -> anyhow::Result<_> {
            let v = Verifier::new(p.n, p.q, args.grid)?.with_tolerance(tol);
            Ok(lemma.run(&v, alpha.unwrap_or(2))?)
        })
        .collect::<anyhow::Result<_>>()?;

    let (mut checked, mut failed) = (0, 0);
    for r in results {
        checked += r.points_checked;
        failed += r.points_failed;
        report.max_violation = report.max_violation.max(r.max_violation);
        for row in r.rows {
            report.tally.add(row.verdict);
            report.push(vec![
                row.check.as_str().into(),
                row.n.to_string(),
                float(row.q),
                opt(row.alpha),
                opt(row.j),
                opt(row.k),
                opt_float(Some(row.x).filter(|x| !x.is_nan())),
                float(row.lhs),
                float(row.rhs),
                row.verdict.as_str().into(),
            ]);
        }
    }
    report.notes.push(format!("points_checked={checked}"));
    report.notes.push(format!("points_failed={failed}"));
    Ok(report)
}

fn eps_label(eps: f64) -> String {
    format!("eps{eps}")
}

pub fn cmd_stat(args: &StatArgs) -> anyhow::Result<ExperimentReport> {
    let seq = parse_sequence(&args.seq)?;
    let matrix = parse_matrix(&args.matrix)?;
    let f = parse_function(&args.f)?;
    check_grid(args.grid)?;
    check_alphas(&[args.alpha])?;
    if let Some(&n) = args.n.iter().find(|&&n| n == 0 || n > args.n_max) {
        bail!("--n entries must lie in 1..={}, got {n}", args.n_max);
    }
    let st = verify_st_limit_conditions_with(seq, &matrix, args.n_max, &args.eps)
        .context("statistical limit tabulation")?;

    let config = vec![
        ("seq", args.seq.clone()),
        ("matrix", args.matrix.clone()),
        ("N", args.n_max.to_string()),
        ("eps", join(&args.eps)),
        ("n", join(&args.n)),
        ("f", args.f.clone()),
        ("alpha", args.alpha.to_string()),
        ("grid", args.grid.to_string()),
        ("out", out_path(&args.out)),
    ];
    let mut columns: Vec<String> = ["n", "q_n", "E_n_q", "bound_thm6", "bound_thm8"]
        .map(String::from)
        .to_vec();
    for target in [StTarget::PowerToOne, StTarget::InverseQIntegerToZero] {
        let prefix = match target {
            StTarget::PowerToOne => "violation_mass",
            StTarget::InverseQIntegerToZero => "inv_qint_mass",
        };
        columns.extend(
            args.eps
                .iter()
                .map(|&e| format!("{prefix}_{}", eps_label(e))),
        );
    }
    columns.push("verdict".into());
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = ExperimentReport::new("stat", config, &column_refs);

    let mut wanted = args.n.clone();
    wanted.sort_unstable();
    wanted.dedup();
    let harness: Vec<_> = wanted
        .par_iter()
        .map(|&n| theorem8_harness(&f, seq, &[n], args.grid, args.alpha))
        .collect::<qbmax_core::Result<_>>()?;
    let mut evaluated = harness.into_iter().flat_map(|r| r.rows).peekable();

    for n in 1..=args.n_max {
        let mut row = vec![n.to_string(), float(seq.value(n))];
        let eval = evaluated.next_if(|r| r.n == n);
        match &eval {
            Some(r) => {
                row.extend([r.sup_error, r.bound_thm6, r.bound_thm8].map(opt_float));
            }
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        row.extend(st.series.iter().map(|s| float(s.masses[n - 1])));
        let verdict = match eval {
            Some(r) if r.excluded => "excluded".to_string(),
            Some(r) => {
                let v = r.verdict.unwrap_or(Verdict::Skip);
                report.tally.add(v);
                if v == Verdict::Fail {
                    let gap = r.sup_error.unwrap_or(0.0) - r.bound_thm6.unwrap_or(0.0);
                    report.max_violation = report.max_violation.max(gap);
                }
                v.as_str().to_string()
            }
            None => String::new(),
        };
        row.push(verdict);
        report.push(row);
    }

    report
        .notes
        .push(format!("trend.threshold={}", float(st.threshold)));
    for s in &st.series {
        let marks: Vec<String> = s
            .checkpoints
            .iter()
            .map(|(n, m)| format!("{n}:{}", float(*m)))
            .collect();
        report.notes.push(format!(
            "trend target={} eps={} final_mass={} checkpoints={} verdict={}",
            s.target.as_str(),
            s.eps,
            float(s.final_mass()),
            marks.join(";"),
            if s.converges {
                "converges"
            } else {
                "not-converged"
            },
        ));
    }
    Ok(report)
}
