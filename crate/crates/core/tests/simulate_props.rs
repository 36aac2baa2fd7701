use fdrelay::model::{Duplex, LinkConfig, Mode, Protocol, SystemParams, TimeSplit};
use fdrelay::simulate::{mc_ergodic, mc_outage, mc_throughput_fixed, mc_throughput_instantaneous, SinrModel};

const IL: SinrModel = SinrModel::InterferenceLimited;

fn split(a: f64) -> TimeSplit {
    TimeSplit::new(a).unwrap()
}

fn cfg(duplex: Duplex, protocol: Protocol) -> LinkConfig {
    LinkConfig::new(duplex, protocol, Mode::Instantaneous)
}

#[test]
fn same_seed_same_bits_across_thread_counts() {
    let p = SystemParams::default().with_ps_db(20.0);
    let c = cfg(Duplex::FdDual, Protocol::Af);
    // Spans several chunks, the last one partial.
    let trials = 200_001;
    let run = || mc_ergodic(&p, split(0.3), &c, SinrModel::Exact, trials, 17).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    assert_eq!(one.mean.to_bits(), four.mean.to_bits());
    assert_eq!(one.half_width_95.to_bits(), four.half_width_95.to_bits());
    let other = mc_ergodic(&p, split(0.3), &c, SinrModel::Exact, trials, 18).unwrap();
    assert_ne!(one.mean, other.mean);
}

#[test]
fn common_numbers_keep_outage_monotone_in_threshold() {
    let p = SystemParams::default().with_ps_db(25.0);
    let c = cfg(Duplex::FdSingle, Protocol::Df);
    let mut last = 0.0;
    for g in [0.5, 1.0, 3.0, 7.0, 15.0, 63.0] {
        let v = mc_outage(&p, split(0.2), &c, IL, g, 100_000, 5).unwrap().mean;
        assert!(v >= last, "threshold {g}: {v} < {last}");
        last = v;
    }
}

#[test]
fn per_draw_optimum_beats_fixed_splits() {
    let p = SystemParams::default().with_ps_db(20.0);
    let trials = 20_000;
    for duplex in [Duplex::FdSingle, Duplex::FdDual, Duplex::HdSingle] {
        for protocol in Protocol::ALL {
            let c = cfg(duplex, protocol);
            let best = mc_throughput_instantaneous(&p, &c, IL, trials, 9).unwrap().mean;
            for alpha in [0.1, 0.3, 0.5] {
                let fixed = mc_throughput_fixed(&p, split(alpha), &c, IL, trials, 9).unwrap().mean;
                assert!(best >= fixed - 1e-9, "{duplex:?} {protocol:?} at {alpha}: {best} < {fixed}");
            }
        }
    }
}

#[test]
fn df_beats_af_per_draw() {
    let p = SystemParams::default().with_ps_db(15.0);
    for duplex in [Duplex::FdSingle, Duplex::FdDual, Duplex::HdSingle] {
        let af = mc_throughput_instantaneous(&p, &cfg(duplex, Protocol::Af), IL, 20_000, 2).unwrap().mean;
        let df = mc_throughput_instantaneous(&p, &cfg(duplex, Protocol::Df), IL, 20_000, 2).unwrap().mean;
        assert!(df >= af - 1e-9, "{duplex:?}: {df} < {af}");
    }
}

#[test]
fn relay_noise_only_adds_outage() {
    for db in [0.0, 20.0, 40.0] {
        let p = SystemParams::default().with_ps_db(db);
        for duplex in [Duplex::FdSingle, Duplex::FdDual] {
            for protocol in Protocol::ALL {
                let c = cfg(duplex, protocol);
                let g = p.gamma_th();
                let exact = mc_outage(&p, split(0.2), &c, SinrModel::Exact, g, 50_000, 6).unwrap().mean;
                let il = mc_outage(&p, split(0.2), &c, IL, g, 50_000, 6).unwrap().mean;
                assert!(exact >= il, "{duplex:?} {protocol:?} {db} dB: {exact} < {il}");
            }
        }
    }
}

#[test]
fn second_half_duplex_antenna_helps() {
    let p = SystemParams::default().with_ps_db(15.0);
    for protocol in Protocol::ALL {
        let one = mc_ergodic(&p, split(0.3), &cfg(Duplex::HdSingle, protocol), SinrModel::Exact, 50_000, 8).unwrap();
        let two = mc_ergodic(&p, split(0.3), &cfg(Duplex::HdDualMrc, protocol), SinrModel::Exact, 50_000, 8).unwrap();
        assert!(two.mean >= one.mean, "{protocol:?}: {} < {}", two.mean, one.mean);
    }
}

#[test]
fn vanishing_power_gives_vanishing_rate() {
    let p = SystemParams::default().with_ps_db(-100.0);
    for duplex in Duplex::ALL {
        let r = mc_ergodic(&p, split(0.3), &cfg(duplex, Protocol::Af), SinrModel::Exact, 10_000, 1).unwrap();
        assert!(r.mean < 1e-6, "{duplex:?}: {}", r.mean);
    }
}

#[test]
fn zero_trials_is_an_error() {
    let p = SystemParams::default();
    assert!(mc_ergodic(&p, split(0.3), &cfg(Duplex::FdSingle, Protocol::Df), IL, 0, 1).is_err());
}
