use griglab::bounds::{estimate_t, sigma};
use griglab::enumeration::ball;
use griglab::width::{FactorSet, ProductSearch, SearchBudget};
use griglab::{Group, Word};
use proptest::prelude::*;

fn word(max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(
        prop_oneof![Just(b'a'), Just(b'b'), Just(b'c'), Just(b'd')],
        0..max,
    )
    .prop_map(Word::from_labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(x in word(12), y in word(12), z in word(12)) {
        let g = Group::grigorchuk();
        let (x, y, z) = (g.eval(&x).unwrap(), g.eval(&y).unwrap(), g.eval(&z).unwrap());
        let left = g.multiply(&g.multiply(&x, &y).unwrap(), &z).unwrap();
        let right = g.multiply(&x, &g.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn eval_is_a_homomorphism(u in word(16), v in word(16)) {
        let g = Group::grigorchuk();
        let uv = g.eval(&u.concat(&v)).unwrap();
        prop_assert_eq!(uv, g.multiply(&g.eval(&u).unwrap(), &g.eval(&v).unwrap()).unwrap());
        let inv = g.eval(&g.inverse_word(&u).unwrap()).unwrap();
        prop_assert!(g.multiply(&g.eval(&u).unwrap(), &inv).unwrap().is_identity());
    }

    #[test]
    fn keys_round_trip(u in word(20)) {
        let g = Group::grigorchuk();
        let x = g.eval(&u).unwrap();
        prop_assert_eq!(g.from_key(x.key()).unwrap(), x);
    }

    #[test]
    fn reduction_is_idempotent_and_sound(u in word(24)) {
        let g = Group::grigorchuk();
        let r = g.reduce(&u).unwrap();
        prop_assert_eq!(g.reduce(&r).unwrap(), r.clone());
        prop_assert!(r.len() <= u.len());
        prop_assert_eq!(g.eval(&r).unwrap(), g.eval(&u).unwrap());
    }

    #[test]
    fn word_sections_agree_with_tree(u in word(16)) {
        let g = Group::grigorchuk();
        let x = g.eval(&u).unwrap();
        if let Ok(secs) = g.word_sections(&u) {
            prop_assert!(!g.root_active(&x));
            let tree = g.sections(&x);
            for (s, t) in secs.iter().zip(&tree) {
                prop_assert_eq!(&g.eval(s).unwrap(), t);
            }
        } else {
            prop_assert!(g.root_active(&x));
        }
    }

    #[test]
    fn conjugation_respects_products(x in word(8), y in word(8), t in word(8)) {
        let g = Group::grigorchuk();
        let (x, y, t) = (g.eval(&x).unwrap(), g.eval(&y).unwrap(), g.eval(&t).unwrap());
        let lhs = g.conjugate(&g.multiply(&x, &y).unwrap(), &t).unwrap();
        let rhs = g.multiply(&g.conjugate(&x, &t).unwrap(), &g.conjugate(&y, &t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sigma_decreases_in_m(d in 2usize..6, m in 1usize..200) {
        let s = sigma(d, m).unwrap();
        let next = sigma(d, m + 1).unwrap();
        prop_assert!(s > 0.0 && s <= 1.0);
        prop_assert!(next < s);
    }

    #[test]
    fn t_never_decreases_with_more_rows(rows in proptest::collection::vec((1u64..1000, 1u64..1000), 1..10)) {
        let gamma: Vec<u64> = rows.iter().map(|r| r.0 + r.1).collect();
        let st1: Vec<u64> = rows.iter().map(|r| r.1).collect();
        let mut last = 0.0;
        for k in 1..=rows.len() {
            let t = estimate_t(&gamma[..k], &st1[..k]).unwrap();
            prop_assert!(t >= last);
            last = t;
        }
    }
}

#[test]
fn larger_budgets_keep_decompositions() {
    let g = Group::grigorchuk();
    let b = ball(&g, 5).unwrap();
    let small_set = FactorSet::conjugates(&g, b"abcd", 2).unwrap();
    let big_set = FactorSet::conjugates(&g, b"abcd", 3).unwrap();
    let small = ProductSearch::new(
        &g,
        &small_set,
        SearchBudget {
            radius: 2,
            k_max: 3,
            ..Default::default()
        },
    )
    .unwrap();
    let big = ProductSearch::new(
        &g,
        &big_set,
        SearchBudget {
            radius: 3,
            k_max: 4,
            ..Default::default()
        },
    )
    .unwrap();
    for i in 0..b.len() {
        let s = small.decompose(b.element(i)).unwrap();
        let l = big.decompose(b.element(i)).unwrap();
        if let Some(e) = s.expression() {
            let f = l.expression().expect("found with the smaller budget");
            assert!(f.len() <= e.len());
        }
    }
}

#[test]
fn searches_are_thread_independent() {
    let g = Group::grigorchuk();
    let b = ball(&g, 6).unwrap();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let set = FactorSet::conjugates(&g, b"a", 6).unwrap();
            let s = ProductSearch::new(
                &g,
                &set,
                SearchBudget {
                    radius: 6,
                    k_max: 4,
                    ..Default::default()
                },
            )
            .unwrap();
            (0..b.len())
                .filter(|&i| griglab::enumeration::parity_vector(b.word(i))[0] == 0)
                .map(|i| {
                    s.decompose(b.element(i))
                        .unwrap()
                        .expression()
                        .map(|e| e.to_string())
                })
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(6));
}
