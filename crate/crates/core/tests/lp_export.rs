use groupforge::exact::IpSize;
use groupforge::{export_ip_model, Aggregation, RatingMatrix, RatingScale, Semantics};
use lp_parser_rs::model::{ComparisonOp, Constraint, VariableKind};
use lp_parser_rs::problem::LpProblem;

fn four_by_three() -> RatingMatrix {
    RatingMatrix::from_rows(
        &[[5.0, 3.0, 1.0], [2.0, 4.0, 4.0], [1.0, 1.0, 5.0], [3.0, 5.0, 2.0]],
        RatingScale::five_star(),
    )
    .unwrap()
}

fn parse(text: &str) -> LpProblem {
    LpProblem::parse(text).unwrap_or_else(|e| panic!("LP text does not parse: {e:?}\n{text}"))
}

fn constraint_terms(problem: &LpProblem, name: &str) -> (Vec<(String, f64)>, ComparisonOp, f64) {
    let id = problem.name_id(name).unwrap_or_else(|| panic!("missing constraint {name}"));
    match &problem.constraints[&id] {
        Constraint::Standard { coefficients, operator, rhs, .. } => {
            let mut terms: Vec<(String, f64)> =
                coefficients.iter().map(|c| (problem.resolve(c.name).to_string(), c.value)).collect();
            terms.sort_by(|a, b| a.0.cmp(&b.0));
            (terms, *operator, *rhs)
        }
        other => panic!("unexpected constraint {other:?}"),
    }
}

#[test]
fn parses_with_expected_families() {
    let (n, m, l, k) = (4, 3, 2, 2);
    for semantics in [Semantics::Lm, Semantics::Av] {
        let model = export_ip_model(&four_by_three(), k, l, semantics, &Aggregation::Min).unwrap();
        let problem = parse(&model.to_lp_string());
        let expected = IpSize::expected(n, m, l, semantics);
        assert_eq!(problem.constraint_count(), expected.constraints);
        assert_eq!(problem.objective_count(), 1);

        let names: Vec<(String, VariableKind)> = problem
            .variables
            .values()
            .map(|v| (problem.resolve(v.name).to_string(), v.kind))
            .collect();
        let count = |prefix: &str| names.iter().filter(|(name, _)| name.starts_with(prefix)).count();
        assert_eq!(count("u_"), n * l);
        assert_eq!(count("y_"), m * l);
        assert_eq!(count("w_"), m * l);
        assert_eq!(names.len(), expected.binaries() + expected.continuous_vars);
        for (name, kind) in &names {
            let binary = ["u_", "y_", "w_", "a_"].iter().any(|p| name.starts_with(p));
            assert_eq!(*kind == VariableKind::Binary, binary, "{name}");
        }

        for g in 1..=l {
            let (terms, op, rhs) = constraint_terms(&problem, &format!("kth_{g}"));
            assert_eq!(terms, (1..=m).map(|j| (format!("y_{j}_{g}"), 1.0)).collect::<Vec<_>>());
            assert_eq!((op, rhs), (ComparisonOp::EQ, 1.0));
            let (terms, op, rhs) = constraint_terms(&problem, &format!("above_{g}"));
            assert_eq!(terms, (1..=m).map(|j| (format!("w_{j}_{g}"), 1.0)).collect::<Vec<_>>());
            assert_eq!((op, rhs), (ComparisonOp::EQ, (k - 1) as f64));
        }
        for i in 1..=n {
            let (terms, op, rhs) = constraint_terms(&problem, &format!("assign_{i}"));
            assert_eq!(terms, (1..=l).map(|g| (format!("u_{i}_{g}"), 1.0)).collect::<Vec<_>>());
            assert_eq!((op, rhs), (ComparisonOp::EQ, 1.0));
        }
    }
}

#[test]
fn larger_instance_wraps_lines_and_still_parses() {
    let rows: Vec<Vec<f64>> = (0..12).map(|u| (0..9).map(|i| ((u * 7 + i * 3) % 5 + 1) as f64).collect()).collect();
    let matrix = RatingMatrix::from_rows(&rows, RatingScale::five_star()).unwrap();
    let text = export_ip_model(&matrix, 3, 4, Semantics::Av, &Aggregation::Min).unwrap().to_lp_string();
    assert!(text.lines().all(|l| l.len() < 255));
    let problem = parse(&text);
    assert_eq!(problem.constraint_count(), IpSize::expected(12, 9, 4, Semantics::Av).constraints);
}
