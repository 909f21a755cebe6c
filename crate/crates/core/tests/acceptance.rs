//! Acceptance report: one PASS/FAIL line per criterion, all exact.

use std::time::Instant;

use rand::Rng;

use arboreq::game::full_lp;
use arboreq::rational::ratio;
use arboreq::rda_engine::d_values;
use arboreq::strategy::decision::GeneralAlgorithm;
use arboreq::strategy::directional::DirectionalAlgorithm;
use arboreq::strategy::enumerate::Limits;
use arboreq::strategy::randomized::{Class, DirectionalMix};
use arboreq::strategy::rda::{is_rda_expressible, Rda, DEFAULT_EXPANSION_BOUND};
use arboreq::suite::random::{random_rda, rng};
use arboreq::suite::verify::{COLLAPSE, RDA_MATCHES_DIRECTIONAL, WEAKLY_BALANCED_COLLAPSE};
use arboreq::suite::{
    chimera_suite, instance_pool, mixture_suite, probe_optimal_set_convexity, product_bound_suite,
    replacement_suite, verify_corpus, CorpusSpec,
};
use arboreq::{Filter, Tree, Verdict};

const NON_DIRECTIONAL: &str = "(query 1 \
    (on0 (query 2 (on0 (done 0)) (on1 (query 4 (on0 (query 3 (on0 (done 0)) (on1 (done 1)))) (on1 (done 1)))))) \
    (on1 (query 3 (on0 (query 4 (on0 (done 0)) (on1 (done 1)))) (on1 (done 1)))))";

struct Report {
    lines: Vec<String>,
    all_passed: bool,
}

impl Report {
    fn line(&mut self, v: &Verdict, detail: String, started: Instant) {
        self.all_passed &= v.passed;
        let mut s = format!(
            "{} {} ({} checks; {}; {:.1}s)",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            v.checks,
            detail,
            started.elapsed().as_secs_f64()
        );
        for f in &v.failures {
            s.push_str(&format!("\n    - {f}"));
        }
        println!("{s}");
        self.lines.push(s);
    }
}

fn two_by_two() -> Tree {
    Tree::parse("(and (or * *) (or * *))").unwrap()
}

fn depth_first_fixture(report: &mut Report) {
    let started = Instant::now();
    let t = two_by_two();
    let a = GeneralAlgorithm::decode(NON_DIRECTIONAL, &t).unwrap();
    let mut v = Verdict::new("depth-first algorithm that is not directional");
    let first = a.probe_bits(0b0011);
    let second = a.probe_bits(0b0010);
    v.require(first == vec![0, 2, 3], || {
        format!("probes {first:?} on 1100")
    });
    v.require(second == vec![0, 1, 3, 2], || {
        format!("probes {second:?} on 0100")
    });
    v.require(a.is_depth_first(&t), || "not depth-first".into());
    v.require(!a.is_directional(&t), || "directional".into());
    report.line(
        &v,
        "probe sequences x1 x3 x4 and x1 x2 x4 x3".into(),
        started,
    );
}

fn correlated_mix_fixture(report: &mut Report) {
    let started = Instant::now();
    let t = two_by_two();
    let alpha = DirectionalAlgorithm::decode("[1 2 | [1 2] [1 2]]", &t).unwrap();
    let beta = DirectionalAlgorithm::decode("[1 2 | [2 1] [2 1]]", &t).unwrap();
    let mix = DirectionalMix::from_weights(
        Class::Directional,
        [(alpha, ratio(1, 2)), (beta, ratio(1, 2))],
    )
    .unwrap();
    let mut v = Verdict::new("correlated directional mix is not an rda");
    v.require(is_rda_expressible(&t, &mix).is_none(), || {
        "half-half mix factorizes".into()
    });
    let mut r = rng(22);
    let pool = instance_pool(6);
    let mut expanded = 0;
    for i in 0..60 {
        let tree = if i == 0 {
            t.clone()
        } else {
            pool[i * 7 % pool.len()].clone()
        };
        let rda = if i % 3 == 0 {
            Rda::uniform(&tree)
        } else {
            random_rda(&mut r, &tree, 3)
        };
        let m = rda.expand(DEFAULT_EXPANSION_BOUND).unwrap();
        let witness = is_rda_expressible(&tree, &m);
        v.require(
            witness
                .as_ref()
                .is_some_and(|w| w.expand(DEFAULT_EXPANSION_BOUND).unwrap() == m),
            || {
                format!(
                    "expansion of {} on {} has no round-tripping witness",
                    rda.encode(),
                    tree.render()
                )
            },
        );
        expanded += 1;
    }
    report.line(&v, format!("{expanded} expansions round-trip"), started);
}

fn anchors(report: &mut Report) {
    let started = Instant::now();
    let mut v = Verdict::new("two-leaf anchors");
    for (text, expected) in [
        ("(and * *)", [ratio(3, 2), ratio(2, 1), ratio(2, 1)]),
        ("(or * *)", [ratio(2, 1), ratio(3, 2), ratio(2, 1)]),
    ] {
        let t = Tree::parse(text).unwrap();
        let d = d_values(&t).unwrap();
        let engine = [d.d0.clone(), d.d1.clone(), d.d.clone()];
        let lp: Vec<_> = [Filter::Zero, Filter::One, Filter::All]
            .iter()
            .map(|&f| {
                full_lp(&t, Class::Directional, f, &Limits::default())
                    .unwrap()
                    .value()
                    .clone()
            })
            .collect();
        v.require(engine == expected, || {
            format!("{text}: engine gives {engine:?}")
        });
        v.require(lp == expected, || {
            format!("{text}: enumeration LP gives {lp:?}")
        });
    }
    report.line(
        &v,
        "(d0, d1, d) = (3/2, 2, 2) and (2, 3/2, 2)".into(),
        started,
    );
}

#[test]
fn acceptance() {
    let mut report = Report {
        lines: Vec::new(),
        all_passed: true,
    };

    let started = Instant::now();
    let corpus = verify_corpus(&CorpusSpec::default(), None).unwrap();
    let n = corpus.trees;
    let detail = format!("{n} corpus trees");
    report.line(&corpus.combined(COLLAPSE), detail.clone(), started);
    report.line(
        &corpus.combined(RDA_MATCHES_DIRECTIONAL),
        detail.clone(),
        started,
    );
    let mut yao = corpus.combined("yao");
    yao.name = "yao".into();
    report.line(&yao, format!("{} solved games", 9 * n), started);
    report.line(
        &corpus.combined(WEAKLY_BALANCED_COLLAPSE),
        format!("{} of {n} trees weakly balanced", corpus.weakly_balanced),
        started,
    );
    report.line(&corpus.combined("class chain"), detail, started);

    depth_first_fixture(&mut report);
    correlated_mix_fixture(&mut report);

    let pool = instance_pool(6);
    let started = Instant::now();
    let c = chimera_suite(&pool, 2024, 24).unwrap();
    report.line(&c.verdict, format!("{} instances", c.instances), started);
    let started = Instant::now();
    let r = replacement_suite(&pool, 2025, 60).unwrap();
    report.line(&r.verdict, format!("{} instances", r.instances), started);
    let started = Instant::now();
    let m = mixture_suite(&pool, 2026, 60).unwrap();
    report.line(&m.verdict, format!("{} instances", m.instances), started);
    let started = Instant::now();
    let p = product_bound_suite(&pool, 2027, 24).unwrap();
    report.line(
        &p.verdict,
        format!("{} instances, AND and OR roots alternating", p.instances),
        started,
    );

    let started = Instant::now();
    let mut convex = Verdict::new("convexity probe");
    let seeded = {
        let mut r = rng(5);
        let candidates: Vec<&Tree> = pool.iter().filter(|t| t.leaf_count() == 5).collect();
        candidates[r.random_range(0..candidates.len())].clone()
    };
    for t in [two_by_two(), seeded.clone()] {
        let probe = probe_optimal_set_convexity(&t).unwrap();
        let mut v = probe.verdict.clone();
        v.name = t.render();
        convex.absorb(v);
    }
    report.line(
        &convex,
        format!(
            "weights 0, 1/4, 1/2, 3/4, 1 on (and (or * *) (or * *)) and {}",
            seeded.render()
        ),
        started,
    );

    println!(
        "NOT REPRODUCED the separation example's tree (R <= 51, d = 33525/640) is not given, so the strict gap between general and depth-first values is not witnessed; the uncountable optimal set is replaced by the finite convexity probe above"
    );

    anchors(&mut report);

    assert!(
        report.all_passed,
        "failing criteria:\n{}",
        report
            .lines
            .iter()
            .filter(|l| l.starts_with("FAIL"))
            .cloned()
            .collect::<Vec<_>>()
            .join("\n")
    );
}
