//! Statistical checks that the bootstrap replicates track the sampling
//! distribution they are meant to approximate.

mod common;

use dmboot::datagen::{DgpConfig, Innovations, Model};
use dmboot::rng::{derive_seed, stream_rng, tags};
use dmboot::*;
use rand_distr::{Distribution, StandardNormal};

fn iid_normal(n: usize, seed: u64) -> Sample {
    let mut rng = stream_rng(seed, 0);
    Sample::univariate((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
}

/// The mean of the bootstrap sup statistics over M = 2000 replicates of a
/// single i.i.d. sample should match the Monte Carlo mean of the real sup
/// statistic over 2000 fresh samples within 10%.
#[test]
fn cusum_bootstrap_mean_tracks_sampling_mean() {
    let n = 200;
    let reps = 2000;

    let mut mc_total = 0.0;
    for rep in 0..reps {
        let dgp = DgpConfig {
            n,
            dim: 1,
            model: Model::Ar1 { zeta: 0.0 },
            innovations: Innovations::Normal,
            burn_in: 8,
            seed: derive_seed(41, tags::DGP, rep as u64),
        };
        let sample = generate(&dgp).unwrap();
        let table = PrefixTable::build(&sample, &Kernel::Variance).unwrap();
        mc_total += cusum_statistic(&cusum_process(&table).unwrap());
    }
    let mc_mean = mc_total / reps as f64;

    let sample = iid_normal(n, 99);
    let table = PrefixTable::build(&sample, &Kernel::Variance).unwrap();
    let bw = estimate_bandwidth(&table.pseudo_full()).unwrap();
    let batch = gen_multipliers(&MultiplierConfig {
        n,
        ell: bw.ell_opt,
        replicates: reps,
        seed: 7,
    })
    .unwrap();
    for method in [BootMethod::Check, BootMethod::Hat] {
        let set = replicate_batch(&table, &batch, BootTarget::Cusum, method).unwrap();
        let stats = set.stats.unwrap();
        let boot_mean = stats.iter().sum::<f64>() / stats.len() as f64;
        let rel = (boot_mean - mc_mean).abs() / mc_mean;
        assert!(
            rel < 0.10,
            "{method:?}: bootstrap mean {boot_mean:.4} vs monte carlo mean {mc_mean:.4} ({:.1}%)",
            rel * 100.0
        );
    }
}

/// Replicate statistics do not depend on the position of the row inside the
/// batch, only on the row's substream.
#[test]
fn replicate_statistics_are_per_row() {
    let sample = iid_normal(60, 3);
    let table = PrefixTable::build(&sample, &Kernel::GiniMeanDifference).unwrap();
    let full = gen_multipliers(&MultiplierConfig {
        n: 60,
        ell: 4,
        replicates: 8,
        seed: 11,
    })
    .unwrap();
    let head = gen_multipliers(&MultiplierConfig {
        n: 60,
        ell: 4,
        replicates: 3,
        seed: 11,
    })
    .unwrap();
    let stats_full = replicate_batch(&table, &full, BootTarget::Cusum, BootMethod::Check)
        .unwrap()
        .stats
        .unwrap();
    let stats_head = replicate_batch(&table, &head, BootTarget::Cusum, BootMethod::Check)
        .unwrap()
        .stats
        .unwrap();
    assert_eq!(&stats_full[..3], &stats_head[..]);
}
