use std::collections::BTreeSet;
use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use frechet_core::bench::{generate_query, measured_config, run_bench, BenchOptions};
use frechet_core::dataset::{
    load_database, load_queries, synthesize, write_database, write_queries, DatasetError, Profile,
    Query, SyntheticSpec,
};
use frechet_core::decider::{Cascade, CascadeConfig};
use frechet_core::engine::naive_scan;
use frechet_core::freespace::frechet_distance_bisection;
use frechet_core::index::{IndexConfig, SpatialIndex};
use frechet_core::selftest::random_summaries;
use frechet_core::{lb_frechet, Curve, Engine};

fn clustered(seed: u64, count: usize) -> frechet_core::dataset::Synthetic {
    synthesize(SyntheticSpec {
        seed,
        count,
        profile: Profile::ClusteredPaths,
    })
}

#[test]
fn database_round_trip_is_vertex_exact() {
    let db = clustered(4, 50).database;
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_database(dir.path(), &db).unwrap();
    let loaded = load_database(&manifest).unwrap();
    assert_eq!(loaded.len(), 50);
    for (a, b) in db.curves().iter().zip(loaded.curves()) {
        assert_eq!(a.id(), b.id());
        assert_eq!(a.vertices(), b.vertices());
    }
    // A second cycle is a fixed point too.
    let again = tempfile::tempdir().unwrap();
    let reloaded = load_database(&write_database(again.path(), &loaded).unwrap()).unwrap();
    assert_eq!(loaded.curves(), reloaded.curves());

    let queries: Vec<Query> = db.curves()[..5]
        .iter()
        .enumerate()
        .map(|(k, c)| Query::new(c.clone(), k as f64 * 0.25))
        .collect();
    let qpath = dir.path().join("queries.txt");
    write_queries(&qpath, &queries).unwrap();
    let back = load_queries(&qpath).unwrap();
    for (a, b) in queries.iter().zip(&back) {
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.curve.vertices(), b.curve.vertices());
    }
}

#[test]
fn ingestion_errors_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("one.txt"), "1 2\n").unwrap();
    fs::write(p.join("ok.txt"), "0 0\r\n1 1 7\r\n\r\n2 2\r\n").unwrap();
    fs::write(p.join("bad.txt"), "0 0\n1 x\n").unwrap();

    fs::write(p.join("m1.txt"), "# comment\nok.txt\n\none.txt\n").unwrap();
    assert!(matches!(
        load_database(&p.join("m1.txt")),
        Err(DatasetError::TooFewVertices { count: 1, .. })
    ));
    fs::write(p.join("m2.txt"), "ok.txt\nbad.txt\n").unwrap();
    assert!(matches!(
        load_database(&p.join("m2.txt")),
        Err(DatasetError::Parse { line: 2, .. })
    ));
    fs::write(p.join("m3.txt"), "ok.txt\nok.txt\n").unwrap();
    assert!(matches!(
        load_database(&p.join("m3.txt")),
        Err(DatasetError::DuplicateCurve {
            line: 2,
            first: 1,
            ..
        })
    ));
    fs::write(p.join("m4.txt"), "ok.txt\n").unwrap();
    let db = load_database(&p.join("m4.txt")).unwrap();
    assert_eq!(db.curve(0).len(), 3);

    for (name, text) in [
        ("q1.txt", "ok.txt -0.5\n"),
        ("q2.txt", "ok.txt nan\n"),
        ("q3.txt", "ok.txt inf\n"),
    ] {
        fs::write(p.join(name), text).unwrap();
        assert!(matches!(
            load_queries(&p.join(name)),
            Err(DatasetError::InvalidDelta { .. })
        ));
    }
    fs::write(p.join("q4.txt"), "ok.txt\n").unwrap();
    assert!(matches!(
        load_queries(&p.join("q4.txt")),
        Err(DatasetError::Parse { .. })
    ));
    fs::write(p.join("q5.txt"), "ok.txt 0\nok.txt 1.5\n").unwrap();
    let qs = load_queries(&p.join("q5.txt")).unwrap();
    assert_eq!(qs.iter().map(|q| q.delta).collect::<Vec<_>>(), [0.0, 1.5]);

    assert!(matches!(
        load_database(&p.join("absent.txt")),
        Err(DatasetError::Io { .. })
    ));
}

#[test]
fn pipeline_matches_naive_scan() {
    let engine = Engine::new(clustered(8, 300).database, IndexConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cascade = Cascade::new(CascadeConfig::default());
    let mut untimed = Cascade::new(CascadeConfig {
        timing: false,
        ..Default::default()
    });
    let mut tested = 0;
    while tested < 40 {
        let k = [0, 1, 3, 10][tested % 4];
        let Some(g) = generate_query(&engine, k, &mut rng) else {
            continue;
        };
        let q = &g.query;
        let got = engine.query(tested, &q.curve, q.delta, &mut cascade);
        assert_eq!(
            got.matches,
            naive_scan(engine.database(), &q.curve, q.delta)
        );
        assert_eq!(got.matches.len(), k);
        assert_eq!(got.false_positives, got.candidates - got.matches.len());
        let bare = engine.query(tested, &q.curve, q.delta, &mut untimed);
        assert_eq!(bare.matches, got.matches);
        assert_eq!(bare.timings.total_us(), 0.0);
        tested += 1;
    }
}

#[test]
fn identical_curve_at_zero_and_tiny_delta() {
    let db = clustered(2, 60).database;
    let engine = Engine::new(db.clone(), IndexConfig::default());
    let mut cascade = Cascade::new(CascadeConfig::default());
    let c = db.curve(17);
    let r = engine.query(0, c, 0.0, &mut cascade);
    assert!(r.matches.iter().any(|id| id == c.id()));

    // Below the lower bound to every curve nothing can match.
    let far = Curve::new(
        "far",
        c.vertices().iter().map(|v| v.translate(1e6, 0.0)).collect(),
    )
    .unwrap();
    let min_lb = db
        .curves()
        .iter()
        .map(|d| lb_frechet(far.summary(), d.summary()))
        .fold(f64::INFINITY, f64::min);
    let r = engine.query(1, &far, 0.5 * min_lb, &mut cascade);
    assert!(r.matches.is_empty());
    assert_eq!(r.candidates, 0);
}

#[test]
fn threads_preserve_results_and_order() {
    let engine = Engine::new(clustered(5, 200).database, IndexConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let queries: Vec<Query> = (0..24)
        .filter_map(|k| generate_query(&engine, k % 5, &mut rng).map(|g| g.query))
        .collect();
    let one = engine.run_queries(&queries, measured_config(), 1);
    let four = engine.run_queries(&queries, measured_config(), 4);
    for (k, (a, b)) in one.iter().zip(&four).enumerate() {
        assert_eq!(a.query, k);
        assert_eq!(b.query, k);
        assert_eq!(a.matches, b.matches);
        assert!(a.matches.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn box_queries_match_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let points = random_summaries(&mut rng, 1000);
    for capacity in [1, 16] {
        let index = SpatialIndex::build(
            points.iter().enumerate().map(|(k, s)| (*s, k)),
            IndexConfig {
                leaf_capacity: capacity,
            },
        );
        index.validate().unwrap();
        for _ in 0..100 {
            let mut lo = [0.0; 8];
            let mut hi = [0.0; 8];
            for d in 0..8 {
                let a = rng.gen_range(-2.0..22.0);
                let w = rng.gen_range(0.0..12.0);
                lo[d] = a;
                hi[d] = a + w;
            }
            let mut got = Vec::new();
            index.box_query_into(&lo, &hi, &mut got);
            got.sort_unstable();
            let expected: Vec<usize> = points
                .iter()
                .enumerate()
                .filter(|(_, s)| {
                    let a = s.to_array();
                    (0..8).all(|d| lo[d] <= a[d] && a[d] <= hi[d])
                })
                .map(|(k, _)| k)
                .collect();
            assert_eq!(got, expected);
        }
    }
}

#[test]
fn clustered_curves_sharing_hubs_are_close() {
    let synthetic = clustered(12, 1000);
    let db = &synthetic.database;
    let mut pairs = Vec::new();
    for a in 0..db.len() {
        for b in a + 1..db.len() {
            if synthetic.hubs[a] == synthetic.hubs[b] {
                pairs.push((a, b));
            }
        }
    }
    assert!(pairs.len() >= 100, "only {} same-hub pairs", pairs.len());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sample: Vec<(usize, usize)> = (0..100)
        .map(|_| pairs[rng.gen_range(0..pairs.len())])
        .collect();
    let close = sample
        .iter()
        .filter(|&&(a, b)| {
            frechet_distance_bisection(db.curve(a), db.curve(b), 1e-6) < 3.0 * synthetic.jitter
        })
        .count();
    assert!(
        close >= 90,
        "{close} of 100 same-hub pairs within 3x jitter"
    );
}

#[test]
fn generated_queries_are_deterministic_and_exact() {
    let engine = Engine::new(clustered(3, 250).database, IndexConfig::default());
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..10)
            .filter_map(|_| generate_query(&engine, 1, &mut rng))
            .map(|g| (g.source, g.query.delta))
            .collect::<Vec<_>>()
    };
    let a = draw(99);
    assert_eq!(a, draw(99));
    assert!(!a.is_empty());
    for (source, delta) in a {
        let c = engine.database().curve(source);
        assert_eq!(
            naive_scan(engine.database(), c, delta),
            [c.id().to_string()]
        );
    }
}

#[test]
fn report_aggregates_match_records() {
    let engine = Engine::new(clustered(6, 300).database, IndexConfig::default());
    let report = run_bench(
        &engine,
        &BenchOptions {
            ks: vec![0, 1, 10],
            queries_per_k: 5,
            seed: 6,
            warmup: false,
        },
    )
    .unwrap();
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.records.len(), 15);
    for row in &report.rows {
        let recs: Vec<_> = report.records.iter().filter(|r| r.k == row.k).collect();
        assert_eq!(recs.len(), row.queries);
        let n = recs.len() as f64;
        let mean = |f: &dyn Fn(&&frechet_core::bench::QueryRecord) -> f64| {
            recs.iter().map(f).sum::<f64>() / n
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-9);
        assert!(close(
            row.total_ms.mean,
            mean(&|r| r.result.timings.total_us() / 1000.0)
        ));
        assert!(close(
            row.exact_ms.mean,
            mean(&|r| r.result.timings.exact_us / 1000.0)
        ));
        assert!(close(
            row.without_recursive_ms.mean,
            mean(&|r| r.without_recursive_us / 1000.0)
        ));
        assert!(close(
            row.false_positives.mean,
            mean(&|r| r.result.false_positives as f64)
        ));
        let m = row.total_ms.mean;
        let var = recs
            .iter()
            .map(|r| (r.result.timings.total_us() / 1000.0 - m).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        assert!(close(row.total_ms.std, var.sqrt()));
        for r in &recs {
            assert_eq!(r.result.matches.len(), row.k);
            let ids: BTreeSet<_> = r.result.matches.iter().collect();
            assert_eq!(ids.len(), row.k);
        }
    }
    assert!(report.render_table().contains("# false positives of index"));
    let parsed: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 3);
    assert_eq!(report.records_jsonl().lines().count(), 15);
}
