use credal_core::bench::{digest, read_records, run_grid, write_records, BenchConfig, GridCell};
use credal_core::criteria::{self, Algorithm, SolveConfig};
use credal_core::generators::{gen_instance, GenConfig};
use credal_core::oracle::{oracle_opt_sets, ORACLE_TOL};
use credal_core::Instance;

fn instance(seed: u64, option: Option<char>) -> Instance {
    gen_instance(&GenConfig {
        seed,
        n_omega: 16,
        dom_size: 8,
        k: 16,
        option,
        ..GenConfig::default()
    })
    .unwrap()
}

#[test]
fn generated_text_solves_like_the_original() {
    let inst = instance(11, None);
    let back = Instance::parse(&inst.to_text()).unwrap();
    let cfg = SolveConfig::default();
    for alg in Algorithm::ALL {
        let a = criteria::run(alg, &inst.prevision, &inst.gambles, &cfg).unwrap();
        let b = criteria::run(alg, &back.prevision, &back.gambles, &cfg).unwrap();
        assert_eq!(a.chosen, b.chosen, "{alg}");
        assert_eq!(a.cum_ipm_iterations, b.cum_ipm_iterations, "{alg}");
    }
}

#[test]
fn controlled_instances_agree_with_oracle() {
    let cfg = SolveConfig::default();
    for (seed, option) in [(1, 'a'), (2, 'e'), (3, 'j')] {
        let inst = instance(seed, Some(option));
        let o = oracle_opt_sets(&inst.prevision, &inst.gambles, ORACLE_TOL).unwrap();
        for alg in [
            Algorithm::Id1,
            Algorithm::Id2,
            Algorithm::Id3,
            Algorithm::Id4,
        ] {
            let r = criteria::run(alg, &inst.prevision, &inst.gambles, &cfg).unwrap();
            assert_eq!(r.chosen, o.interval_dominant, "{alg} option {option}");
        }
        let r = criteria::run(Algorithm::Maximin3, &inst.prevision, &inst.gambles, &cfg).unwrap();
        assert_eq!(r.chosen, o.maximin, "option {option}");
    }
}

#[test]
fn records_survive_a_csv_round_trip() {
    let cells = [GridCell {
        n_omega: 4,
        dom_size: 2,
        k: 4,
    }];
    let cfg = BenchConfig {
        algorithms: vec![Algorithm::Maximax2, Algorithm::Id3],
        repetitions: 2,
        seed: 9,
        ..BenchConfig::default()
    };
    let records = run_grid(&cells, &cfg).unwrap();
    assert_eq!(records.len(), 4);
    let mut buf = Vec::new();
    write_records(&records, &mut buf).unwrap();
    let back = read_records(buf.as_slice()).unwrap();
    assert_eq!(back.len(), records.len());
    for (a, b) in records.iter().zip(&back) {
        assert_eq!(a.result_digest, b.result_digest);
        assert_eq!(a.cum_ipm_iterations, b.cum_ipm_iterations);
    }
    assert_ne!(records[0].result_digest, digest(&[]));
}
