//! Built-in experiment configurations.

use crate::config::*;
use qfi_core::ProtocolKind;

pub const PRESET_NAMES: [&str; 13] = [
    "rmm-time",
    "rqc-sites-product",
    "rqc-sites-ghz",
    "rqc-time-product",
    "rqc-time-ghz",
    "rqc-small-q-sites",
    "rqc-small-Lq-time",
    "sff-ctr",
    "sff-sp",
    "t1-exact",
    "concentration-rmm",
    "cue-equivalence",
    "symmetric-check",
];

fn base(name: &str, samples: usize, experiment: Experiment) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        seed: 20240601,
        samples,
        threads: None,
        out_dir: None,
        plot: PlotOptions::default(),
        substitutions: Vec::new(),
        experiment,
    }
}

fn rqc_sites(name: &str, state: ChainState) -> ExperimentConfig {
    let mut cfg = base(
        name,
        100,
        Experiment::RqcSites(RqcSites {
            local_dim: 4,
            sites: vec![2, 3, 4, 5],
            t: 2,
            theta: 1.0,
            hamiltonian: HamiltonianSpec::TracelessDefault,
            initial_state: state,
            schedule: ScheduleSpec::Auto,
            protocols: ProtocolKind::ALL.to_vec(),
            slope_tolerance: 0.15,
        }),
    );
    cfg.substitutions = vec![
        "local dimension q = 4 with L <= 5 (N <= 1024) instead of q = 8 at large L; q^L is capped for the state-vector path".into(),
        "odd L uses the staircase sigma = (+1, -1, .., -1); brickwork needs even L on a ring".into(),
    ];
    cfg
}

fn rqc_time(name: &str, state: ChainState) -> ExperimentConfig {
    base(
        name,
        100,
        Experiment::RqcTime(RqcTime {
            local_dim: 2,
            sites: 8,
            t_max: 10,
            theta: 1.0,
            hamiltonian: HamiltonianSpec::TracelessDefault,
            initial_state: state,
            schedule: ScheduleSpec::Brickwork,
            protocols: ProtocolKind::ALL.to_vec(),
            check: TimeCheck::Fits,
            tolerance: 0.1,
        }),
    )
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "rmm-time" => base(
            name,
            100,
            Experiment::RmmTime(RmmTime {
                dim: 100,
                theta: 1.0,
                t_max: 10,
                hamiltonian: HamiltonianSpec::TracelessDefault,
                initial_state: RmmState::Basis,
                protocols: ProtocolKind::ALL.to_vec(),
                fit_tolerance: 0.1,
            }),
        ),
        "rqc-sites-product" => rqc_sites(name, ChainState::Product),
        "rqc-sites-ghz" => rqc_sites(name, ChainState::Ghz),
        "rqc-time-product" => rqc_time(name, ChainState::Product),
        "rqc-time-ghz" => rqc_time(name, ChainState::Ghz),
        "rqc-small-q-sites" => {
            let mut cfg = base(
                name,
                100,
                Experiment::RqcSites(RqcSites {
                    local_dim: 2,
                    sites: vec![2, 4, 6, 8, 10, 12],
                    t: 2,
                    theta: 1.0,
                    hamiltonian: HamiltonianSpec::TracelessDefault,
                    initial_state: ChainState::Product,
                    schedule: ScheduleSpec::Brickwork,
                    protocols: ProtocolKind::ALL.to_vec(),
                    slope_tolerance: 0.5,
                }),
            );
            cfg.substitutions =
                vec!["L <= 12 so that q^L <= 4096; q = 2 is far from the large-q regime, so the slope tolerance is 50%".into()];
            cfg
        }
        "rqc-small-Lq-time" => {
            let mut cfg = base(
                name,
                200,
                Experiment::RqcTime(RqcTime {
                    local_dim: 2,
                    sites: 4,
                    t_max: 30,
                    theta: 1.0,
                    hamiltonian: HamiltonianSpec::TracelessDefault,
                    initial_state: ChainState::Product,
                    schedule: ScheduleSpec::Brickwork,
                    protocols: vec![ProtocolKind::Control],
                    check: TimeCheck::Envelope,
                    tolerance: 0.2,
                }),
            );
            cfg.substitutions = vec!["t <= 30 with 200 samples instead of t up to 50 with 1000 runs; only the envelope property is checked".into()];
            cfg
        }
        "sff-ctr" => base(
            name,
            10_000,
            Experiment::Sff(Sff {
                dim: 50,
                theta: 1.0,
                t_values: vec![1, 2, 3, 4, 5],
                protocol: ProtocolKind::Control,
                hamiltonian: HamiltonianSpec::TracelessDefault,
                se_multiple: 3.0,
                relative_tolerance: 0.0,
            }),
        ),
        "sff-sp" => base(
            name,
            3000,
            Experiment::Sff(Sff {
                dim: 100,
                theta: 1.0,
                t_values: vec![1, 2, 3, 4, 5],
                protocol: ProtocolKind::StatePrep,
                hamiltonian: HamiltonianSpec::TracelessDefault,
                se_multiple: 3.0,
                relative_tolerance: 0.05,
            }),
        ),
        "t1-exact" => base(
            name,
            20_000,
            Experiment::T1Exact(T1Exact {
                dim: 4,
                theta: 1.0,
                hamiltonian: HamiltonianSpec::Diagonal(vec![1.0, 1.0, -1.0, -1.0]),
                se_multiple: 3.0,
            }),
        ),
        "concentration-rmm" => base(
            name,
            300,
            Experiment::Concentration(Concentration {
                dims: vec![64, 100, 400],
                t: 2,
                protocol: ProtocolKind::Control,
                theta: 1.0,
                delta_points: 20,
            }),
        ),
        "cue-equivalence" => base(
            name,
            2000,
            Experiment::CueEquivalence(CueEquivalence {
                sites: 2,
                local_dims: vec![2, 4, 8],
                t: 2,
                theta: 1.0,
                initial_state: ChainState::Product,
            }),
        ),
        "symmetric-check" => base(
            name,
            0,
            Experiment::SymmetricCheck(SymmetricCheck { sites: vec![1, 2, 3, 4], local_dims: vec![2, 3, 4], tolerance: 1e-9 }),
        ),
        _ => return None,
    };
    Some(cfg)
}

pub fn all_presets() -> Vec<ExperimentConfig> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("listed preset exists")).collect()
}
