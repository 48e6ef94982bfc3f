use groupforge::analysis::fixture_modularity_case;
use groupforge::greedy::build_intermediate_groups;
use groupforge::io::{parse_ratings_csv, IngestPolicy};
use groupforge::{
    absolute_error, check_modularity_violation, exact_optimum, fixtures, grd_form_groups, greedy_key, group_satisfaction,
    group_top_k, item_group_score, partition_objective, AlgorithmConfig, Aggregation, ExactOptions, Partition, Semantics,
};

fn cfg(s: Semantics, a: Aggregation, k: usize, l: usize) -> AlgorithmConfig {
    AlgorithmConfig::new(s, a, k, l)
}

fn part(n: usize, blocks: &[&[usize]]) -> Partition {
    Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
}

fn blocks(out: &groupforge::GroupingOutcome) -> Vec<Vec<usize>> {
    out.groups().iter().map(|g| g.members.clone()).collect()
}

#[test]
fn item_scores_and_lists() {
    assert_eq!(item_group_score(&fixtures::ex1(), &[2, 3], 1, Semantics::Lm).unwrap(), 5.0);
    assert_eq!(item_group_score(&fixtures::ex2(), &[0, 1, 4, 5], 1, Semantics::Av).unwrap(), 9.0);

    let ex3 = group_top_k(&fixtures::ex3(), &[0, 1], 2, Semantics::Lm).unwrap();
    assert_eq!((ex3.items(), ex3.scores()), (&[1, 0][..], &[4.0, 1.0][..]));

    let av = group_top_k(&fixtures::ex2(), &[0, 1, 4, 5], 2, Semantics::Av).unwrap();
    assert_eq!((av.items(), av.scores()), (&[2, 1][..], &[11.0, 9.0][..]));
    assert_eq!(group_satisfaction(&av, &Aggregation::Min).unwrap(), 9.0);
    assert_eq!(group_satisfaction(&av, &Aggregation::Sum).unwrap(), 20.0);
}

#[test]
fn partition_objectives() {
    let ex1 = partition_objective(&fixtures::ex1(), &part(6, &[&[2, 3], &[1, 5], &[0, 4]]), 1, Semantics::Lm, &Aggregation::Min);
    assert_eq!(ex1.unwrap().objective(), 11.0);
    let ex2 = partition_objective(&fixtures::ex2(), &part(6, &[&[0, 2, 3], &[1, 4, 5]]), 2, Semantics::Av, &Aggregation::Min);
    assert_eq!(ex2.unwrap().objective(), 14.0);
    let p1 = partition_objective(&fixtures::proof1(), &Partition::singletons(3), 1, Semantics::Av, &Aggregation::Min);
    assert_eq!(p1.unwrap().objective(), 12.0);

    let ex4 = fixtures::ex4();
    let against = partition_objective(&ex4, &part(4, &[&[0, 1, 2], &[3]]), 2, Semantics::Av, &Aggregation::Min).unwrap();
    let common = partition_objective(&ex4, &part(4, &[&[0, 3], &[1, 2]]), 2, Semantics::Av, &Aggregation::Min).unwrap();
    assert_eq!((against.objective(), common.objective()), (15.0, 14.0));
}

#[test]
fn keys_and_buckets() {
    let k1 = greedy_key(&fixtures::ex1(), 1, 1, Semantics::Lm, &Aggregation::Min).unwrap();
    assert_eq!((k1.sequence().collect::<Vec<_>>(), k1.signature()), (vec![2], &[5.0][..]));
    let k2 = greedy_key(&fixtures::ex1(), 2, 2, Semantics::Lm, &Aggregation::Sum).unwrap();
    assert_eq!((k2.sequence().collect::<Vec<_>>(), k2.signature()), (vec![1, 0], &[5.0, 2.0][..]));
    let k3 = greedy_key(&fixtures::ex2(), 2, 2, Semantics::Av, &Aggregation::Min).unwrap();
    assert_eq!((k3.sequence().collect::<Vec<_>>(), k3.signature()), (vec![1, 0], &[][..]));

    let b = build_intermediate_groups(&fixtures::ex1(), &cfg(Semantics::Lm, Aggregation::Min, 2, 3)).unwrap();
    let mut sizes: Vec<usize> = b.groups.iter().map(|g| g.members.len()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 1, 1, 1, 2]);
}

#[test]
fn greedy_and_exact_values() {
    let ex1 = fixtures::ex1();
    let out = grd_form_groups(&ex1, &cfg(Semantics::Lm, Aggregation::Min, 1, 3)).unwrap();
    assert_eq!((out.objective(), blocks(&out)), (11.0, vec![vec![2, 3], vec![1, 5], vec![0, 4]]));
    let opt = exact_optimum(&ex1, &cfg(Semantics::Lm, Aggregation::Min, 1, 3), ExactOptions::default()).unwrap();
    assert_eq!((opt.objective(), blocks(&opt)), (12.0, vec![vec![0, 2, 3], vec![1, 5], vec![4]]));
    assert_eq!(absolute_error(&out, &opt).unwrap(), 1.0);

    let out = grd_form_groups(&ex1, &cfg(Semantics::Lm, Aggregation::Min, 2, 3)).unwrap();
    assert_eq!((out.objective(), blocks(&out)), (7.0, vec![vec![0], vec![1], vec![2, 3, 4, 5]]));
    assert_eq!(grd_form_groups(&ex1, &cfg(Semantics::Lm, Aggregation::Sum, 2, 3)).unwrap().objective(), 17.0);

    let ex2 = fixtures::ex2();
    assert_eq!(grd_form_groups(&ex2, &cfg(Semantics::Av, Aggregation::Min, 2, 2)).unwrap().objective(), 13.0);
    assert_eq!(grd_form_groups(&ex2, &cfg(Semantics::Av, Aggregation::Sum, 2, 2)).unwrap().objective(), 34.0);

    let ex5 = fixtures::ex5();
    let c = cfg(Semantics::Lm, Aggregation::Sum, 2, 3);
    let grd = grd_form_groups(&ex5, &c).unwrap();
    let opt = exact_optimum(&ex5, &c, ExactOptions::default()).unwrap();
    assert_eq!((grd.objective(), opt.objective()), (20.0, 21.0));
    assert_eq!(absolute_error(&grd, &opt).unwrap(), 1.0);
}

#[test]
fn modularity_fixtures() {
    for (name, matrix, expected, sub, sup) in [
        ("proof1", fixtures::proof1(), (12.0, 10.0, 11.0, 10.0), true, false),
        ("proof2", fixtures::proof2(), (13.0, 13.0, 12.0, 11.0), false, true),
    ] {
        let (p1, p2, mv) = fixture_modularity_case(name).unwrap();
        let r = check_modularity_violation(&matrix, 1, &p1, &p2, mv, Semantics::Av, &Aggregation::Min).unwrap();
        assert_eq!(r.quadruple(), expected, "{name}");
        assert_eq!((r.submodularity_violated, r.supermodularity_violated), (sub, sup), "{name}");
    }
}

#[test]
fn csv_of_ex1_loads() {
    let ex1 = fixtures::ex1();
    let mut text = String::new();
    for u in 0..6 {
        for i in 0..3 {
            text.push_str(&format!("{},{},{}\n", u + 1, 100 + i, ex1.score(u, i)));
        }
    }
    assert_eq!(text.lines().count(), 18);
    let loaded = parse_ratings_csv(text.as_bytes(), &IngestPolicy::default()).unwrap();
    assert_eq!(loaded.score(0, 1), 4.0);
    assert_eq!(loaded.user_label(0), "1");
    assert_eq!(loaded.item_label(1), "101");
}
