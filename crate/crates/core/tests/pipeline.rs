//! Schedule sampling, overlap counting and the protocol run, wired together.

use proptest::prelude::*;
use swapguard_core::mc::{count_overlaps, sample_attacks, sample_on_times, AttackKind, LengthDist};
use swapguard_core::protocol::{run_protocol, MalwarePolicy, NetworkConfig, Scope};
use swapguard_core::qstate::KrausChannel;
use swapguard_core::rng::trial_rng;
use swapguard_core::schedule::{AttackParams, CycleParams};
use swapguard_core::secret;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn protocol_flag_agrees_with_overlap_sweep(seed in any::<u64>(), m in 0u64..4, theta in 2.0f64..15.0) {
        let cycle = CycleParams::new(0.6, 0.2, 0.2).unwrap();
        let schedule = sample_on_times(seed, 60.0, m, cycle).unwrap();
        let params = AttackParams::new(theta, 1.0).unwrap();
        let attacks = sample_attacks(seed ^ 1, 60.0, params, AttackKind::ExponentialGap, LengthDist::Fixed).unwrap();
        let policy = MalwarePolicy::new(KrausChannel::fully_depolarizing(0, 2), Scope::DecoysOnly);
        let r = run_protocol(&NetworkConfig::bell_chain(2), &schedule, &attacks, &policy).unwrap();
        let sweep = count_overlaps(&schedule, &attacks);
        prop_assert_eq!(r.overlap_count, sweep.overlap_count);
        prop_assert_eq!(r.catastrophic, sweep.overlap_count > 0);
        // Decoy-only malware never reaches the payload.
        prop_assert!((r.final_fidelity - 1.0).abs() < 1e-10);
    }
}

#[test]
fn shared_seed_drives_the_same_protocol_run() {
    let cycle = CycleParams::online_only(1.0).unwrap();
    let set = secret::split(0xABCD_EF01, 3, 5, &mut trial_rng(4, 0)).unwrap();
    let a = secret::reconstruct(&set.shares[..3]).unwrap();
    let b = secret::reconstruct(&set.shares[2..]).unwrap();
    let sa = secret::expand_schedule(a, 500.0, 8, cycle).unwrap();
    let sb = secret::expand_schedule(b, 500.0, 8, cycle).unwrap();
    assert_eq!(sa, sb);
    assert_eq!(sa.len(), 8);
}
