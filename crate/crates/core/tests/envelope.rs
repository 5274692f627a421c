use griglab::bounds::{
    envelope_compare, envelope_csv, quotient_csv, quotient_table, EnvelopeInput,
};
use griglab::conjugacy::{conj_growth_table, default_quotient};
use griglab::enumeration::ball;
use griglab::Group;

fn grigorchuk_tables() -> (Vec<(usize, u64)>, Vec<griglab::conjugacy::ConjGrowthRow>) {
    let g = Group::grigorchuk();
    let b = ball(&g, 8).unwrap();
    let rows = conj_growth_table(&g, &b, 8, 6, default_quotient(&g).as_ref()).unwrap();
    ((0..=8).map(|n| (n, b.gamma(n) as u64)).collect(), rows)
}

#[test]
fn envelope_matches_golden_file() {
    let (gamma, rows) = grigorchuk_tables();
    let input: Vec<EnvelopeInput> = rows
        .iter()
        .map(|r| EnvelopeInput {
            n: r.n,
            gamma: gamma[r.n].1 as f64,
            f_lower: r.lower as f64,
            f_upper: r.upper as f64,
        })
        .collect();
    let csv = envelope_csv(&envelope_compare(&input));
    assert_eq!(csv.lines().count(), 8, "header and seven rows");
    assert_eq!(csv, include_str!("golden/envelope.csv"));
}

#[test]
fn quotients_match_golden_file() {
    let (gamma, rows) = grigorchuk_tables();
    let q = quotient_table(&gamma, &rows);
    assert!(q
        .iter()
        .all(|r| r.gamma_over_f_lower >= 1.0 && r.gamma_over_f_upper >= 1.0));
    assert_eq!(q[0].gamma_over_f_lower, 1.0);
    assert_eq!(q[1].gamma_over_f_upper, 1.0);
    assert_eq!(quotient_csv(&q), include_str!("golden/quotient.csv"));
}
