use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Value};

use super::tables::{embedded_tables, solutions_of, theorem_rows, TableRow, MASTER_TABLES};
use super::{solution_json, Finding, ReportError, RunReport, Severity};
use crate::arith::SUnitExponents;
use crate::elliptic::{
    decompose, point_to_solution, solution_to_point, CurveModel, ModelKind, SPoint,
};
use crate::lucas::{
    case_analysis_p5, defective_lookup, eleven_primitive_exponents, CandidateVerdict, CaseShape,
    QuadField,
};
use crate::model::{check_solution, mod8_admissible, Solution, Verdict};
use crate::oracle::{
    enumerate_solutions, smooth_exponent_scan, verify_table, OracleRun, SearchConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Quick,
    Full,
}

impl Mode {
    fn label(self) -> &'static str {
        match self {
            Mode::Quick => "quick",
            Mode::Full => "full",
        }
    }

    fn cubic_bound(self) -> u64 {
        match self {
            Mode::Quick => 10_000,
            Mode::Full => 1_000_000,
        }
    }
}

/// Bound used for every n >= 4 and by the smooth-exponent scan.
const HIGHER_BOUND: u64 = 1_000;
const SMOOTH_N_MAX: u32 = 16;
const SMOOTH_Y_MAX: u64 = 2_000;

fn join(tables: &[u8]) -> String {
    tables
        .iter()
        .map(u8::to_string)
        .collect::<Vec<_>>()
        .join("+")
}

fn solutions_json(list: &[Solution]) -> Vec<Value> {
    list.iter().map(solution_json).collect()
}

fn run_json(run: &OracleRun) -> Value {
    json!({
        "n": run.config.n,
        "y_max": run.config.y_max,
        "require_bc_positive": run.config.require_bc_positive,
        "found": run.solutions.len(),
        "fast_path": run.fast_path,
        "candidates": run.stats.candidates,
        "exact_tests": run.stats.exact_tests,
    })
}

fn rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn model_json(m: &CurveModel) -> Value {
    json!({
        "kind": m.kind,
        "alpha": m.alpha,
        "beta": m.beta,
        "gamma": m.gamma,
        "A": m.coefficient().to_string(),
        "equation": m.to_string(),
    })
}

fn point_json(p: &SPoint) -> Value {
    json!({ "U": rational(&p.u), "V": rational(&p.v), "z": p.z.to_string() })
}

/// Findings for a = 0 rows with odd x, over any set of oracle runs.
fn mod8_finding<'a>(runs: impl IntoIterator<Item = &'a OracleRun>) -> Finding {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for run in runs {
        for s in &run.solutions {
            checked += 1;
            if !mod8_admissible(s.exp, s.x_parity()) {
                violations.push(solution_json(s));
            }
        }
    }
    Finding::check(
        violations.is_empty(),
        "mod-8 parity",
        format!("a = 0 forces x even on all {checked} oracle solutions"),
        json!(violations),
    )
}

fn diff_findings(
    report: &mut RunReport,
    rows: &[&TableRow],
    anchor: &str,
    run: &OracleRun,
) -> Result<(), ReportError> {
    let claimed: Vec<Solution> = rows.iter().map(|r| r.solution.clone()).collect();
    let diff = verify_table(&claimed, run)?;
    for s in &diff.claimed_not_found {
        let row = rows.iter().find(|r| &r.solution == s).expect("claimed row");
        report.findings.push(Finding::new(
            Severity::Discrepancy,
            row.anchor(),
            "listed solution not found by the oracle",
            solution_json(s),
        ));
    }
    for s in &diff.found_not_claimed {
        report.findings.push(Finding::new(
            Severity::Discrepancy,
            anchor,
            format!(
                "oracle solution with y <= {} missing from the list",
                run.config.y_max
            ),
            solution_json(s),
        ));
    }
    for s in &diff.duplicate_claims {
        report.findings.push(Finding::new(
            Severity::Discrepancy,
            anchor,
            "solution listed twice",
            solution_json(s),
        ));
    }
    if diff.is_empty() {
        report.findings.push(Finding::ok(
            anchor,
            format!(
                "{} listed solutions match the oracle exactly for y <= {}",
                claimed.len(),
                run.config.y_max
            ),
        ));
    }
    Ok(())
}

fn list_findings(report: &mut RunReport, expected: &[Solution], anchor: &str, run: &OracleRun) {
    let want: BTreeSet<&Solution> = expected.iter().collect();
    let got: BTreeSet<&Solution> = run.solutions.iter().collect();
    let missing: Vec<Value> = want.difference(&got).map(|s| solution_json(s)).collect();
    let extra: Vec<Value> = got.difference(&want).map(|s| solution_json(s)).collect();
    report.findings.push(Finding::check(
        missing.is_empty() && extra.is_empty(),
        anchor,
        format!(
            "oracle for n = {} with y <= {} returns exactly {} solutions",
            run.config.n,
            run.config.y_max,
            want.len()
        ),
        json!({ "missing": missing, "extra": extra }),
    ));
}

/// Checks every shipped table against the oracle, recomputes the printed
/// model columns, and runs the n = 5, 6, 10 and smooth-exponent checks.
pub fn cmd_verify_tables(mode: Mode, workers: usize) -> Result<RunReport, ReportError> {
    let cubic_bound = mode.cubic_bound();
    let mut report = RunReport::new(
        "verify-tables",
        json!({ "mode": mode.label(), "workers": workers, "cubic_y_max": cubic_bound, "higher_y_max": HIGHER_BOUND }),
    );
    let rows = embedded_tables();
    report.findings.push(Finding::ok(
        "tables",
        format!("{} rows load and verify exactly", rows.len()),
    ));

    for row in &rows {
        let (model, z) = row.recomputed();
        if model != row.model || z != BigUint::from(row.z_claimed) {
            report.findings.push(Finding::new(
                Severity::PaperTypo,
                row.anchor(),
                format!("printed model columns disagree with (a, b, c); recomputed z = {z}"),
                json!({
                    "printed": { "alpha": row.model[0], "beta": row.model[1], "gamma": row.model[2], "z": row.z_claimed },
                    "recomputed": { "alpha": model[0], "beta": model[1], "gamma": model[2], "z": z.to_string() },
                    "solution": solution_json(&row.solution),
                }),
            ));
        }
    }

    for (n, master, subset) in MASTER_TABLES {
        let full: BTreeSet<Solution> = solutions_of(&rows, master)
            .into_iter()
            .filter(|s| s.exp.bc_positive())
            .collect();
        let sub: BTreeSet<Solution> = solutions_of(&rows, subset).into_iter().collect();
        report.findings.push(Finding::check(
            full == sub,
            format!("Tables {} (n = {n})", join(subset)),
            format!("equal to the bc > 0 rows of Tables {}", join(master)),
            json!({
                "only_in_subset": solutions_json(&sub.difference(&full).cloned().collect::<Vec<_>>()),
                "only_in_master": solutions_json(&full.difference(&sub).cloned().collect::<Vec<_>>()),
            }),
        ));
    }

    let mut runs = Vec::new();
    for (n, master, _) in MASTER_TABLES {
        let bound = if n == 3 { cubic_bound } else { HIGHER_BOUND };
        let run = enumerate_solutions(&SearchConfig::new(n, bound).workers(workers))?;
        let claimed: Vec<&TableRow> = rows
            .iter()
            .filter(|r| master.contains(&r.table) && r.solution.y <= BigUint::from(bound))
            .collect();
        diff_findings(
            &mut report,
            &claimed,
            &format!("Tables {} (n = {n})", join(master)),
            &run,
        )?;
        runs.push(run);
    }
    for n in [5, 6, 10] {
        let run = enumerate_solutions(&SearchConfig::new(n, HIGHER_BOUND).workers(workers))?;
        list_findings(
            &mut report,
            &theorem_rows(n),
            &format!("solution list n = {n}"),
            &run,
        );
        runs.push(run);
    }

    let scan = smooth_exponent_scan(SMOOTH_N_MAX, SMOOTH_Y_MAX, workers)?;
    report.findings.push(smooth_finding(&scan));
    report
        .findings
        .push(mod8_finding(runs.iter().chain(scan.values())));

    let mut all: Vec<Solution> = runs
        .iter()
        .flat_map(|r| r.solutions.iter().cloned())
        .collect();
    all.sort();
    report.solutions = all;
    report.details = json!({
        "rows_per_table": (1..=6u8).map(|t| rows.iter().filter(|r| r.table == t).count()).collect::<Vec<_>>(),
        "runs": runs.iter().map(run_json).collect::<Vec<_>>(),
        "smooth_scan": scan.iter().map(|(n, r)| (n.to_string(), json!(r.solutions.len()))).collect::<serde_json::Map<_, _>>(),
    });
    Ok(report)
}

fn smooth_finding(scan: &std::collections::BTreeMap<u32, OracleRun>) -> Finding {
    let nonzero: Vec<u32> = scan
        .iter()
        .filter(|(_, r)| !r.solutions.is_empty())
        .map(|(&n, _)| n)
        .collect();
    let expected: Vec<u32> = scan
        .keys()
        .copied()
        .filter(|n| [3, 4, 6].contains(n))
        .collect();
    let y_max = scan.values().next().map_or(0, |r| r.config.y_max);
    Finding::check(
        nonzero == expected,
        "smooth exponents",
        format!("among {{2,3}}-smooth n, solutions with y <= {y_max} exist only for n = 3, 4, 6"),
        json!({ "nonzero": nonzero }),
    )
}

pub fn cmd_enumerate(
    n: u32,
    y_max: u64,
    bc_positive: bool,
    workers: usize,
) -> Result<RunReport, ReportError> {
    let cfg = SearchConfig::new(n, y_max)
        .bc_positive(bc_positive)
        .workers(workers);
    let mut report = RunReport::new(
        "enumerate",
        json!({ "n": n, "y_max": y_max, "require_bc_positive": bc_positive, "workers": workers }),
    );
    let run = enumerate_solutions(&cfg)?;
    report.findings.push(mod8_finding([&run]));
    report.details = run_json(&run);
    report.solutions = run.solutions;
    Ok(report)
}

pub fn cmd_smooth_scan(n_max: u32, y_max: u64, workers: usize) -> Result<RunReport, ReportError> {
    let mut report = RunReport::new(
        "smooth-scan",
        json!({ "n_max": n_max, "y_max": y_max, "workers": workers }),
    );
    let scan = smooth_exponent_scan(n_max, y_max, workers)?;
    report.findings.push(smooth_finding(&scan));
    report.findings.push(mod8_finding(scan.values()));
    report.details = json!({
        "counts": scan.iter().map(|(n, r)| (n.to_string(), json!(r.solutions.len()))).collect::<serde_json::Map<_, _>>(),
        "runs": scan.values().map(run_json).collect::<Vec<_>>(),
    });
    report.solutions = scan.into_values().flat_map(|r| r.solutions).collect();
    Ok(report)
}

/// Reduces an exponent triple to its model. With (x, y) it also maps the
/// solution to its point and back; without, it does so for every shipped
/// row with the same exponents.
pub fn cmd_reduce(
    n: u32,
    exp: SUnitExponents,
    xy: Option<(BigUint, BigUint)>,
) -> Result<RunReport, ReportError> {
    let kind = ModelKind::for_exponent(n)?;
    let (model, z) = decompose(exp, kind);
    let mut config = json!({ "n": n, "a": exp.a, "b": exp.b, "c": exp.c });
    if let Some((x, y)) = &xy {
        config["x"] = json!(x.to_string());
        config["y"] = json!(y.to_string());
    }
    let mut report = RunReport::new("reduce", config);

    let solutions: Vec<(String, Solution)> = match xy {
        Some((x, y)) => {
            let s = Solution::new(x, y, exp, n).map_err(|e| ReportError::Usage(e.to_string()))?;
            vec![("input".to_string(), s)]
        }
        None => embedded_tables()
            .into_iter()
            .filter(|r| r.solution.exp == exp && r.solution.n == n && r.table <= 3)
            .map(|r| (r.anchor(), r.solution))
            .collect(),
    };

    let mut points = Vec::new();
    for (anchor, s) in &solutions {
        match check_solution(s) {
            Verdict::Valid => {}
            verdict => {
                report.findings.push(Finding::new(
                    Severity::Discrepancy,
                    anchor.clone(),
                    format!("not a solution: {verdict:?}"),
                    solution_json(s),
                ));
                continue;
            }
        }
        let (m, p) = solution_to_point(s)?;
        let back = point_to_solution(&m, &p, n);
        report.findings.push(Finding::check(
            back.as_ref() == Some(s) && m == model,
            anchor.clone(),
            "point lies on the model and lifts back to the solution",
            point_json(&p),
        ));
        points.push(
            json!({ "anchor": anchor, "solution": solution_json(s), "point": point_json(&p) }),
        );
        report.solutions.push(s.clone());
    }
    report.details = json!({ "model": model_json(&model), "z": z.to_string(), "points": points });
    Ok(report)
}

/// Points of the L_5 quartics that are written out explicitly for reference,
/// as (d, case, k, u, v, w) with U = u/v and V = w/v^2. Cases absent here
/// have no explicit list.
const REFERENCE_POINTS: [(u32, CaseShape, u64, u64, u64, u64); 6] = [
    (2, CaseShape::PowerOfTwo, 11, 1, 1, 1),
    (2, CaseShape::PowerOfTwo, 11, 1, 2, 1),
    (6, CaseShape::PowerOfTwo, 11, 3, 1, 3),
    (6, CaseShape::PowerOfTwo, 11, 9, 4, 57),
    (6, CaseShape::PowerOfThree, 11, 3, 1, 3),
    (6, CaseShape::PowerOfThree, 11, 9, 4, 57),
];

fn expected_candidates(d: u32) -> Vec<(Solution, CandidateVerdict)> {
    let s = |x, y, e| Solution::from_parts(x, y, e, 5);
    match d {
        2 => vec![
            (s(1, 3, (1, 0, 2)), CandidateVerdict::RejectedBZero),
            (s(241, 9, (3, 0, 2)), CandidateVerdict::RejectedBZero),
        ],
        6 => vec![(s(837, 15, (1, 5, 2)), CandidateVerdict::RejectedCoprimality)],
        _ => Vec::new(),
    }
}

/// Field facts, the p >= 7 gate, and the p = 5 case analysis for d.
pub fn cmd_lucas(d: u32, bound: u64) -> Result<RunReport, ReportError> {
    let field = QuadField::new(d)?;
    let mut report = RunReport::new("lucas", json!({ "d": d, "box": bound }));
    let analysis = case_analysis_p5(d, bound)?;

    let h = field.class_number();
    let exponents = eleven_primitive_exponents(field, 1000);
    report.findings.push(Finding::check(
        exponents == vec![5],
        "primitive divisor gate",
        "11 = (-d/11) (mod p) leaves p = 5 only, and h is prime to 5",
        json!({ "p": exponents, "class_number": h }),
    ));
    report.findings.push(Finding::check(
        h % 5 != 0 && field.unit_group_order() % 5 != 0,
        "class number and units",
        format!(
            "h = {h} and {} units, both prime to p",
            field.unit_group_order()
        ),
        Value::Null,
    ));
    let defective = defective_lookup(field, 5)?;
    report.findings.push(Finding::check(
        defective.is_empty(),
        "defective pairs",
        "no defective L_5 has roots in this field",
        json!(defective.iter().map(|e| e.to_string()).collect::<Vec<_>>()),
    ));
    report.findings.push(Finding::check(
        analysis.mod8_rejected == 0,
        "mod-8 filter",
        format!(
            "L_5 = 5 (mod 8) on all {} coprime pairs with u odd",
            analysis.pairs_examined
        ),
        json!({ "rejected": analysis.mod8_rejected }),
    ));
    let eliminated = analysis.eliminated_hits();
    report.findings.push(Finding::check(
        eliminated.is_empty(),
        "eliminated branches",
        "no pair lands in a sign/parity branch that mod 8 rules out",
        json!(eliminated
            .iter()
            .map(|h| json!({ "branch": h.branch.to_string(), "u": h.u, "v": h.v }))
            .collect::<Vec<_>>()),
    ));

    let got: Vec<(Solution, CandidateVerdict)> = analysis
        .candidates
        .iter()
        .map(|c| (c.lifted.solution.clone(), c.verdict))
        .collect();
    let want = expected_candidates(d);
    report.findings.push(Finding::check(
        got == want,
        format!("d = {d} candidates"),
        "lifted candidates and their verdicts match the reference list",
        json!({ "expected": want.iter().map(|(s, v)| json!({ "solution": solution_json(s), "verdict": v.label() })).collect::<Vec<_>>() }),
    ));
    let accepted = analysis.accepted();
    report.findings.push(Finding::check(
        accepted.is_empty(),
        "bc > 0",
        "no candidate survives with bc > 0",
        json!(accepted
            .iter()
            .map(|s| solution_json(s))
            .collect::<Vec<_>>()),
    ));

    for &(rd, case, k, u, v, w) in REFERENCE_POINTS
        .iter()
        .filter(|p| p.0 == d && p.3 <= bound && p.4 <= bound)
    {
        let anchor = format!("d = {d} {case} point ({u}/{v}, {w}/{v}^2)");
        debug_assert_eq!(rd, d);
        let found = analysis
            .points
            .iter()
            .find(|p| p.case == case && (p.k, p.u, p.v, p.w) == (k, u, v, w));
        if found.is_some() {
            report
                .findings
                .push(Finding::ok(anchor, "reference point recovered"));
        } else if !case.v_values(bound).contains(&v) {
            report.findings.push(Finding::new(
                Severity::PaperTypo,
                anchor,
                format!(
                    "v = {v} does not have the case's shape; the point belongs to another case"
                ),
                Value::Null,
            ));
        } else {
            report.findings.push(Finding::new(
                Severity::Discrepancy,
                anchor,
                "reference point not found",
                Value::Null,
            ));
        }
    }
    for p in &analysis.points {
        let case_listed = REFERENCE_POINTS.iter().any(|r| (r.0, r.1) == (d, p.case));
        let listed = REFERENCE_POINTS
            .iter()
            .any(|r| (r.0, r.1, r.2, r.3, r.4, r.5) == (d, p.case, p.k, p.u, p.v, p.w));
        if case_listed && !listed && p.shape_ok {
            report.findings.push(Finding::new(
                Severity::Discrepancy,
                format!("d = {d} {}", p.case),
                "S-unit shaped point missing from the reference list",
                json!({ "u": p.u, "v": p.v, "w": p.w }),
            ));
        }
    }

    report.solutions = accepted.into_iter().cloned().collect();
    report.details = json!({
        "field": {
            "d": d,
            "discriminant": field.discriminant(),
            "class_number": h,
            "unit_group_order": field.unit_group_order(),
        },
        "pairs_examined": analysis.pairs_examined,
        "branches": analysis.branches.iter().map(|b| json!({
            "branch": b.to_string(),
            "residues_mod_8": b.residues(),
            "survives": b.survives(),
        })).collect::<Vec<_>>(),
        "points": analysis.points.iter().map(|p| {
            let (u, v) = p.coordinates();
            json!({
                "case": p.case.number(),
                "curve": format!("-{} V^2 = 5U^4 - {} U^2 + {}", p.k, 10 * d, d * d),
                "U": rational(&u),
                "V": rational(&v),
                "shape_ok": p.shape_ok,
            })
        }).collect::<Vec<_>>(),
        "candidates": analysis.candidates.iter().map(|c| json!({
            "cases": c.cases.iter().map(|s| s.number()).collect::<Vec<_>>(),
            "eta": c.lifted.eta.to_string(),
            "x": c.lifted.x.to_string(),
            "z": c.lifted.z.to_string(),
            "y": c.lifted.y.to_string(),
            "solution": solution_json(&c.lifted.solution),
            "verdict": c.verdict.label(),
        })).collect::<Vec<_>>(),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_example() {
        let r = cmd_reduce(3, SUnitExponents::new(6, 0, 1), None).unwrap();
        assert_eq!(r.details["model"]["equation"], "V^2 = U^3 - 11");
        assert_eq!(r.details["z"], "2");
        assert_eq!(r.exit_status(), 0);
        assert_eq!(r.solutions, vec![Solution::from_parts(5, 9, (6, 0, 1), 3)]);
        assert_eq!(r.details["points"][0]["point"]["U"], "9/4");
    }

    #[test]
    fn reduce_rejects_other_exponents() {
        assert!(matches!(
            cmd_reduce(5, SUnitExponents::new(1, 0, 2), None),
            Err(ReportError::Elliptic(_))
        ));
    }

    #[test]
    fn reduce_with_bad_point() {
        let r = cmd_reduce(
            3,
            SUnitExponents::new(0, 0, 1),
            Some((5u32.into(), 3u32.into())),
        )
        .unwrap();
        assert_eq!(r.exit_status(), 1);
    }

    #[test]
    fn lucas_reports() {
        let r = cmd_lucas(2, 50).unwrap();
        assert_eq!(r.exit_status(), 0, "{}", r.to_json());
        let xs: Vec<&str> = r.details["candidates"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["x"].as_str().unwrap())
            .collect();
        assert_eq!(xs, vec!["1", "241"]);
        assert!(r.solutions.is_empty());

        let r = cmd_lucas(6, 50).unwrap();
        assert_eq!(r.exit_status(), 0, "{}", r.to_json());
        assert_eq!(r.count(Severity::PaperTypo), 1);
        assert_eq!(
            r.details["candidates"][0]["verdict"],
            "rejected-coprimality"
        );
    }

    #[test]
    fn enumerate_example() {
        let r = cmd_enumerate(5, 100, false, 2).unwrap();
        assert_eq!(r.solutions.len(), 2);
        assert_eq!(r.exit_status(), 0);
        assert_eq!(
            r.to_json(),
            cmd_enumerate(5, 100, false, 2).unwrap().to_json()
        );
    }
}
