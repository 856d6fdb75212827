use ontochat_core::bench::{aggregate, percent, Category, Cluster, Odp, Phrasing, RunOutcome};
use proptest::prelude::*;

fn outcomes(bits: &[bool]) -> Vec<RunOutcome> {
    let mut runs = Vec::new();
    let mut i = 0;
    for odp in Odp::ALL {
        for category in Category::ALL {
            for phrasing in Phrasing::ALL {
                for comments in [false, true] {
                    runs.push(RunOutcome {
                        question_id: format!("{}-{category:?}-{phrasing:?}", odp.id()),
                        odp,
                        category,
                        phrasing,
                        comments,
                        translation: None,
                        provider_error: None,
                        correct: bits[i],
                        failure_kind: None,
                    });
                    i += 1;
                }
            }
        }
    }
    runs
}

proptest! {
    #[test]
    fn cells_match_recount(bits in prop::collection::vec(any::<bool>(), 84)) {
        let runs = outcomes(&bits);
        for cell in aggregate(&runs) {
            let members: Vec<&RunOutcome> = runs
                .iter()
                .filter(|r| Cluster::of(r.category) == cell.cluster && r.comments == cell.comments && r.phrasing == cell.phrasing)
                .collect();
            let correct = members.iter().filter(|r| r.correct).count();
            prop_assert_eq!(cell.total, members.len());
            prop_assert_eq!(cell.total, if cell.cluster == Cluster::TwoIntent { 3 } else { 9 });
            prop_assert_eq!(cell.correct, correct);
            // Independent rounding: nearest integer, halves up, via floats.
            let expected = (100.0 * correct as f64 / members.len() as f64 + 0.5).floor() as u32;
            prop_assert_eq!(cell.percent, expected);
        }
    }

    #[test]
    fn flipping_to_correct_never_lowers_a_cell(bits in prop::collection::vec(any::<bool>(), 84), flip in 0usize..84) {
        let before = aggregate(&outcomes(&bits));
        let mut flipped = bits.clone();
        flipped[flip] = true;
        let after = aggregate(&outcomes(&flipped));
        for (a, b) in before.iter().zip(&after) {
            prop_assert!(b.percent >= a.percent);
        }
    }

    #[test]
    fn percent_bounds(c in 0usize..1000, extra in 0usize..1000) {
        let t = c + extra;
        let p = percent(c, t);
        prop_assert!(p <= 100);
        if t > 0 && c == t { prop_assert_eq!(p, 100); }
    }
}
