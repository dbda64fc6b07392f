use serde::{Deserialize, Serialize};

use super::{AttackTrace, CyclePhase, Interval, OnTimeSchedule};

/// One intersecting (block, window) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair {
    pub block: usize,
    pub window: usize,
    /// Start of the intersection.
    pub start: f64,
    /// Phase of the block at `start`.
    pub phase: CyclePhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub overlap_count: u64,
    pub first_overlap: Option<f64>,
    pub hit_phase: Option<CyclePhase>,
}

fn pair(schedule: &OnTimeSchedule, block: usize, window: usize, start: f64) -> OverlapPair {
    let offset = start - schedule.on_times()[block];
    let phase = CyclePhase::at_offset(schedule.cycle(), offset)
        .expect("intersection start lies inside a nonempty block");
    OverlapPair {
        block,
        window,
        start,
        phase,
    }
}

/// All intersecting (block, window) pairs, found with a two-pointer sweep
/// over the two sorted disjoint interval lists.
pub fn overlap_pairs(schedule: &OnTimeSchedule, attacks: &AttackTrace) -> Vec<OverlapPair> {
    let blocks: Vec<Interval> = schedule.blocks().collect();
    let windows = attacks.windows();
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < blocks.len() && j < windows.len() {
        if let Some(start) = blocks[i].intersection_start(&windows[j]) {
            out.push(pair(schedule, i, j, start));
        }
        if blocks[i].end <= windows[j].end {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn outcome(pairs: &[OverlapPair]) -> TrialOutcome {
    let first = pairs.iter().min_by(|a, b| a.start.total_cmp(&b.start));
    TrialOutcome {
        overlap_count: pairs.len() as u64,
        first_overlap: first.map(|p| p.start),
        hit_phase: first.map(|p| p.phase),
    }
}

pub fn count_overlaps(schedule: &OnTimeSchedule, attacks: &AttackTrace) -> TrialOutcome {
    outcome(&overlap_pairs(schedule, attacks))
}

/// Quadratic reference implementation of [`count_overlaps`].
pub fn count_overlaps_brute_force(schedule: &OnTimeSchedule, attacks: &AttackTrace) -> TrialOutcome {
    let mut pairs = Vec::new();
    for (j, w) in attacks.windows().iter().enumerate() {
        for (i, b) in schedule.blocks().enumerate() {
            if let Some(start) = w.intersection_start(&b) {
                pairs.push(pair(schedule, i, j, start));
            }
        }
    }
    outcome(&pairs)
}
