//! Frame-type assignment and coding order.
//!
//! Each scene segment starts with an I frame, places P anchors every
//! `gop_length` frames, and codes the frames between consecutive anchors
//! as B frames referencing both. Coding order is anchors first: each
//! anchor is emitted before the B frames it closes, so every reference is
//! available when needed. A segment whose tail does not land on the anchor
//! phase promotes its final frame to a P anchor, keeping every B frame
//! bracketed.

use std::fmt;

use crate::error::{CodecError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameType {
    I,
    P,
    B,
}

impl fmt::Display for FrameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameType::I => "I",
            FrameType::P => "P",
            FrameType::B => "B",
        })
    }
}

/// One frame's slot in the coding schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedFrame {
    pub display_index: usize,
    pub frame_type: FrameType,
    /// Nearest anchor before this frame: the single reference of a P frame,
    /// the forward reference of a B frame, absent for I frames.
    pub prev_anchor: Option<usize>,
    /// Anchor after this frame: the backward reference, B frames only.
    pub next_anchor: Option<usize>,
}

/// Plans frame types and coding order for the whole sequence.
///
/// `scene_cuts[i]` marks display index `i` as the first frame of a new
/// scene; index 0 starts a scene regardless. The result is in coding
/// order and covers every display index exactly once.
pub fn plan_coding_order(
    frame_count: usize,
    gop_length: usize,
    scene_cuts: &[bool],
) -> Result<Vec<PlannedFrame>> {
    if frame_count == 0 {
        return Err(CodecError::EmptySequence);
    }
    if gop_length == 0 {
        return Err(CodecError::InvalidConfig("gop_length must be positive".into()));
    }
    if scene_cuts.len() != frame_count {
        return Err(CodecError::InvalidConfig(format!(
            "scene cut flags cover {} frames, sequence has {}",
            scene_cuts.len(),
            frame_count
        )));
    }

    let mut segment_starts: Vec<usize> = vec![0];
    segment_starts.extend((1..frame_count).filter(|&i| scene_cuts[i]));

    let mut plan = Vec::with_capacity(frame_count);
    for (si, &start) in segment_starts.iter().enumerate() {
        let end = segment_starts.get(si + 1).copied().unwrap_or(frame_count);
        plan_segment(start, end, gop_length, &mut plan);
    }
    Ok(plan)
}

fn plan_segment(start: usize, end: usize, gop_length: usize, plan: &mut Vec<PlannedFrame>) {
    let last = end - 1;
    let mut anchors: Vec<usize> = (start..=last).step_by(gop_length).collect();
    if *anchors.last().unwrap() != last {
        anchors.push(last);
    }

    plan.push(PlannedFrame {
        display_index: start,
        frame_type: FrameType::I,
        prev_anchor: None,
        next_anchor: None,
    });
    for pair in anchors.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        plan.push(PlannedFrame {
            display_index: to,
            frame_type: FrameType::P,
            prev_anchor: Some(from),
            next_anchor: None,
        });
        for display_index in from + 1..to {
            plan.push(PlannedFrame {
                display_index,
                frame_type: FrameType::B,
                prev_anchor: Some(from),
                next_anchor: Some(to),
            });
        }
    }
}
