//! Explicit enumeration and validation of s-colored Motzkin walks.
//!
//! Everything here is small-n ground truth: enumeration is depth-first and
//! lexicographic in step values, so output order is deterministic and cheap
//! to pin in golden tests.

use crate::arith::ArithmeticMode;
use crate::combinatorics;
use rug::ops::Pow;
use rug::Integer;
use std::collections::HashMap;

/// Maximum number of walks an enumeration call is allowed to produce.
pub const ENUMERATION_GUARD: u64 = 100_000_000;

/// A step is a signed color index: 0 is flat, +k is an up step of color k,
/// -k a down step of color k (1 <= k <= s).
pub type Step = i32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub steps: Vec<Step>,
    pub s: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    BelowAxis,
    ColorMismatch,
    UnmatchedAtEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    pub first_violation: Option<usize>,
    pub kind: Option<ViolationKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchProfile {
    /// Height at the start of the inspected segment.
    pub m: usize,
    /// Unmatched down steps inside the segment.
    pub p: usize,
    /// Unmatched up steps inside the segment.
    pub q: usize,
    pub up_colors: Vec<u32>,
    pub down_colors: Vec<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum WalksError {
    #[error("enumeration would produce {0} walks, above the guard {ENUMERATION_GUARD}")]
    GuardExceeded(String),
    #[error("step value {0} outside [-s, s] for s={1}")]
    BadStep(Step, u32),
    #[error("walk is not a valid Motzkin walk")]
    InvalidWalk,
    #[error("cut positions out of range")]
    BadCut,
}

impl Walk {
    pub fn new(steps: Vec<Step>, s: u32) -> Result<Self, WalksError> {
        for &st in &steps {
            if st.unsigned_abs() > s {
                return Err(WalksError::BadStep(st, s));
            }
        }
        Ok(Walk { steps, s })
    }

    /// One walk per line format: comma-separated signed step values.
    pub fn dump(&self) -> String {
        self.steps
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Stack-based validity check: push color on up, pop-and-compare on down.
pub fn validate(walk: &Walk) -> ValidityReport {
    let mut stack: Vec<u32> = Vec::new();
    for (i, &st) in walk.steps.iter().enumerate() {
        if st > 0 {
            stack.push(st as u32);
        } else if st < 0 {
            match stack.pop() {
                None => {
                    return ValidityReport {
                        valid: false,
                        first_violation: Some(i),
                        kind: Some(ViolationKind::BelowAxis),
                    }
                }
                Some(c) => {
                    if c != (-st) as u32 {
                        return ValidityReport {
                            valid: false,
                            first_violation: Some(i),
                            kind: Some(ViolationKind::ColorMismatch),
                        };
                    }
                }
            }
        }
    }
    if stack.is_empty() {
        ValidityReport {
            valid: true,
            first_violation: None,
            kind: None,
        }
    } else {
        ValidityReport {
            valid: false,
            first_violation: Some(walk.steps.len()),
            kind: Some(ViolationKind::UnmatchedAtEnd),
        }
    }
}

fn check_guard(n: usize, s: u32) -> Result<(), WalksError> {
    let total = combinatorics::total_motzkin(n, s, ArithmeticMode::Exact)
        .expect("small-n total count");
    let total = total.as_integer().unwrap();
    if *total > ENUMERATION_GUARD {
        return Err(WalksError::GuardExceeded(total.to_string()));
    }
    Ok(())
}

/// All valid s-colored Motzkin walks of length n, in depth-first
/// lexicographic order of step values (-s, ..., -1, 0, 1, ..., s).
pub fn enumerate_walks(n: usize, s: u32) -> Result<Vec<Walk>, WalksError> {
    check_guard(n, s)?;
    let mut out = Vec::new();
    let mut steps: Vec<Step> = Vec::with_capacity(n);
    let mut stack: Vec<u32> = Vec::new();
    dfs_valid(n, s, &mut steps, &mut stack, &mut out);
    Ok(out)
}

fn dfs_valid(n: usize, s: u32, steps: &mut Vec<Step>, stack: &mut Vec<u32>, out: &mut Vec<Walk>) {
    let remaining = n - steps.len();
    if stack.len() > remaining {
        return; // cannot come back down to height 0
    }
    if remaining == 0 {
        out.push(Walk {
            steps: steps.clone(),
            s,
        });
        return;
    }
    // down step (only the matching color is valid)
    if let Some(&c) = stack.last() {
        steps.push(-(c as Step));
        stack.pop();
        dfs_valid(n, s, steps, stack, out);
        stack.push(c);
        steps.pop();
    }
    // flat step (needs at least stack.len() later steps to unwind)
    if stack.len() < remaining {
        steps.push(0);
        dfs_valid(n, s, steps, stack, out);
        steps.pop();
    }
    // up steps, each color (needs room to come back down)
    if stack.len() + 2 <= remaining {
        for c in 1..=s {
            steps.push(c as Step);
            stack.push(c);
            dfs_valid(n, s, steps, stack, out);
            stack.pop();
            steps.pop();
        }
    }
}

/// Exact count of valid colored prefixes of length n per final height.
///
/// Entry h equals s^h * M_{n,h}: every walk shape with h unmatched ups is
/// visited once per coloring of those ups. Dividing by s^h therefore gives
/// an enumeration-side value for M_{n,h} that is independent of the DP and
/// the closed form.
pub fn count_prefixes_by_height(n: usize, s: u32) -> Result<Vec<Integer>, WalksError> {
    // the guard bounds the visited tree within a factor ~(2s+1)
    check_guard(n, s)?;
    let mut counts = vec![Integer::new(); n + 1];
    let mut stack: Vec<u32> = Vec::new();
    dfs_open(n, s, 0, &mut stack, &mut counts);
    Ok(counts)
}

fn dfs_open(n: usize, s: u32, depth: usize, stack: &mut Vec<u32>, counts: &mut [Integer]) {
    if depth == n {
        counts[stack.len()] += 1;
        return;
    }
    if let Some(&c) = stack.last() {
        stack.pop();
        dfs_open(n, s, depth + 1, stack, counts);
        stack.push(c);
    }
    dfs_open(n, s, depth + 1, stack, counts); // flat
    for c in 1..=s {
        stack.push(c);
        dfs_open(n, s, depth + 1, stack, counts);
        stack.pop();
    }
}

/// Enumeration-side M_{n,m}: prefix count at height m divided by s^m.
pub fn enumerated_motzkin_count(n: usize, s: u32, m: usize) -> Result<Integer, WalksError> {
    let counts = count_prefixes_by_height(n, s)?;
    if m > n {
        return Ok(Integer::new());
    }
    let mut c = counts[m].clone();
    let denom = Integer::from(s).pow(m as u32);
    debug_assert!(c.is_divisible(&denom));
    c /= denom;
    Ok(c)
}

/// Height and unmatched-step profile of a walk over the segment
/// [cut_start, cut_end): m is the height at cut_start, p/q count unmatched
/// down/up steps inside the segment, with their color sequences.
pub fn match_profile(
    walk: &Walk,
    cut_start: usize,
    cut_end: usize,
) -> Result<MatchProfile, WalksError> {
    if cut_start > cut_end || cut_end > walk.steps.len() {
        return Err(WalksError::BadCut);
    }
    if !validate(walk).valid {
        return Err(WalksError::InvalidWalk);
    }
    let m = walk.steps[..cut_start]
        .iter()
        .map(|&s| s.signum() as i64)
        .sum::<i64>() as usize;
    // replay the segment with a local stack; pops from an empty local stack
    // are unmatched downs of the segment
    let mut seg_stack: Vec<u32> = Vec::new();
    let mut down_colors: Vec<u32> = Vec::new();
    for &st in &walk.steps[cut_start..cut_end] {
        if st > 0 {
            seg_stack.push(st as u32);
        } else if st < 0 {
            if seg_stack.pop().is_none() {
                down_colors.push((-st) as u32);
            }
        }
    }
    Ok(MatchProfile {
        m,
        p: down_colors.len(),
        q: seg_stack.len(),
        up_colors: seg_stack,
        down_colors,
    })
}

/// Class key for profile histograms: (m, p, q) with coloring summed out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProfileClass {
    pub m: usize,
    pub p: usize,
    pub q: usize,
}

/// Exact histogram over (m, p, q) classes of the segment [cut_start,
/// cut_end) across all valid walks. For a plain cut b, pass an empty
/// segment [b, b); classes then reduce to the height m at the cut.
pub fn profile_histogram(
    n: usize,
    s: u32,
    cut_start: usize,
    cut_end: usize,
) -> Result<HashMap<ProfileClass, Integer>, WalksError> {
    let walks = enumerate_walks(n, s)?;
    let mut hist: HashMap<ProfileClass, Integer> = HashMap::new();
    for w in &walks {
        let pr = match_profile(w, cut_start, cut_end)?;
        *hist
            .entry(ProfileClass {
                m: pr.m,
                p: pr.p,
                q: pr.q,
            })
            .or_default() += 1;
    }
    Ok(hist)
}
