mod support;

use std::collections::BTreeSet;

use ontochat_core::gateway::{assemble_prompt, PromptOptions};
use ontochat_core::partition::{apply_comment_policy, partition, render_prompt_tbox, CommentPolicy};
use ontochat_core::rdf::{parse_turtle, serialize_turtle, Graph, Pattern, Term, Triple};
use ontochat_core::sparql::{evaluate, order_terms, parse_query, results_equal, ResultSet};
use ontochat_core::vocab::rdfs;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use support::*;

fn graph(seed: u64, max: usize) -> Graph {
    random_graph(&mut rng(seed), max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn turtle_round_trip(seed in any::<u64>()) {
        let g = graph(seed, 30);
        let text = serialize_turtle(&g);
        let back = parse_turtle(&text).unwrap().graph;
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_turtle(&back), text);
    }

    #[test]
    fn insertion_order_is_irrelevant(seed in any::<u64>()) {
        let g = graph(seed, 30);
        let mut triples: Vec<Triple> = g.iter().cloned().collect();
        triples.shuffle(&mut rng(seed ^ 1));
        let mut h: Graph = triples.into_iter().collect();
        h.set_prefixes(g.prefixes().clone());
        prop_assert_eq!(serialize_turtle(&h), serialize_turtle(&g));
    }

    #[test]
    fn duplicate_insert_keeps_size(seed in any::<u64>()) {
        let mut g = graph(seed, 30);
        let before = g.len();
        let all: Vec<Triple> = g.iter().cloned().collect();
        for t in all {
            prop_assert!(!g.insert(t));
        }
        prop_assert_eq!(g.len(), before);
    }

    #[test]
    fn match_pattern_equals_linear_scan(seed in any::<u64>(), mask in 0u8..8, pick in any::<prop::sample::Index>()) {
        let g = graph(seed, 30);
        prop_assume!(!g.is_empty());
        let all: Vec<&Triple> = g.iter().collect();
        let probe = all[pick.index(all.len())];
        // Occasionally probe with a term absent from the graph.
        let missing = Term::iri("http://ex.org/absent");
        let s = (mask & 1 != 0).then(|| if seed % 7 == 0 { &missing } else { probe.subject() });
        let p = (mask & 2 != 0).then(|| probe.predicate());
        let o = (mask & 4 != 0).then(|| probe.object());
        let pattern = Pattern::new(s, p, o);
        let got = g.match_pattern(pattern);
        let want: Vec<&Triple> = g.iter().filter(|t| pattern.matches(t)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn wildcard_match_returns_every_triple_once(seed in any::<u64>()) {
        let g = graph(seed, 30);
        let got = g.match_pattern(Pattern::new(None, None, None));
        let unique: BTreeSet<&Triple> = got.iter().copied().collect();
        prop_assert_eq!(got.len(), g.len());
        prop_assert_eq!(unique.len(), g.len());
    }

    #[test]
    fn partition_is_complete_and_disjoint(seed in any::<u64>()) {
        let g = random_schema_data_graph(&mut rng(seed));
        let p = partition(&g);
        let t: BTreeSet<&Triple> = p.tbox.iter().collect();
        let a: BTreeSet<&Triple> = p.abox.iter().collect();
        prop_assert!(t.is_disjoint(&a));
        let union: BTreeSet<&Triple> = t.union(&a).copied().collect();
        prop_assert_eq!(union, g.iter().collect::<BTreeSet<_>>());
        for triple in p.tbox.iter() {
            let s = triple.subject();
            let ok = s.is_blank() || s.as_iri().is_some_and(|i| p.schema_entities.contains(i) || i.ends_with("/onto"));
            prop_assert!(ok, "unexpected TBox subject {}", s);
        }
    }

    #[test]
    fn prompt_tbox_never_contains_individuals(seed in any::<u64>(), comments in any::<bool>()) {
        let g = random_schema_data_graph(&mut rng(seed));
        let p = partition(&g);
        let text = render_prompt_tbox(&apply_comment_policy(&p.tbox, CommentPolicy::from_comments(comments)));
        for i in p.individuals() {
            prop_assert!(!text.contains(&i), "{} leaked", i);
            prop_assert!(!text.contains(&i.replace("http://data.example/", "d:")));
        }
    }

    #[test]
    fn comment_stripping_counts(seed in any::<u64>()) {
        let g = random_schema_data_graph(&mut rng(seed));
        let tbox = partition(&g).tbox;
        let comments = tbox.iter().filter(|t| t.predicate_iri() == rdfs::COMMENT).count();
        let stripped = apply_comment_policy(&tbox, CommentPolicy::Strip);
        prop_assert_eq!(stripped.len(), tbox.len() - comments);
        prop_assert_eq!(&apply_comment_policy(&stripped, CommentPolicy::Strip), &stripped);
        prop_assert_eq!(&apply_comment_policy(&tbox, CommentPolicy::Retain), &tbox);
        prop_assert!(!render_prompt_tbox(&stripped).contains("rdfs:comment"));
    }

    #[test]
    fn order_by_is_monotone(seed in any::<u64>()) {
        let g = graph(seed, 30);
        for (dir, desc) in [("ASC", false), ("DESC", true)] {
            let q = parse_query(&format!("SELECT ?o WHERE {{ ?s ?p ?o }} ORDER BY {dir}(?o)")).unwrap();
            let rs = evaluate(&q, &g);
            for w in rs.rows().windows(2) {
                let ord = order_terms(w[0][0].as_ref(), w[1][0].as_ref());
                let ord = if desc { ord.reverse() } else { ord };
                prop_assert_ne!(ord, std::cmp::Ordering::Greater);
            }
        }
    }

    #[test]
    fn evaluation_is_pure(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 30);
        let q = parse_query(&random_query(&mut r).to_sparql()).unwrap();
        prop_assert_eq!(evaluate(&q, &g), evaluate(&q, &g));
    }

    #[test]
    fn results_equal_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 30);
        let q = parse_query(&random_query(&mut r).to_sparql()).unwrap();
        let a = evaluate(&q, &g);
        prop_assert!(results_equal(&a, &a, true));
        prop_assert!(results_equal(&a, &a, false));
        let ResultSet::Solutions { variables, rows } = a.clone() else { unreachable!() };
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut r);
        let renamed: Vec<String> = variables.iter().map(|v| format!("{v}_renamed")).collect();
        let b = ResultSet::Solutions { variables: renamed, rows: shuffled };
        prop_assert!(results_equal(&a, &b, false));
        prop_assert_eq!(results_equal(&a, &b, false), results_equal(&b, &a, false));
        prop_assert_eq!(results_equal(&a, &b, true), results_equal(&b, &a, true));
        let c = evaluate(&parse_query(&random_query(&mut r).to_sparql()).unwrap(), &g);
        prop_assert_eq!(results_equal(&a, &c, false), results_equal(&c, &a, false));
    }

    #[test]
    fn prompt_assembly_is_deterministic(seed in any::<u64>(), question in "[A-Za-z ?]{1,40}") {
        prop_assume!(!question.trim().is_empty());
        let g = random_schema_data_graph(&mut rng(seed));
        let tbox = partition(&g).tbox;
        let text = render_prompt_tbox(&tbox);
        let options = PromptOptions { prefixes: tbox.prefixes().clone(), repair: None };
        let a = assemble_prompt(&text, &question, &options).unwrap();
        let b = assemble_prompt(&render_prompt_tbox(&tbox), &question, &options).unwrap();
        prop_assert_eq!(a.render(), b.render());
        prop_assert_eq!(a.question, question);
    }
}
