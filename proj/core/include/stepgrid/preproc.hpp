#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stepgrid/types.hpp"

namespace stepgrid {

/// 10-bin histogram and the threshold derived from it: the center value of
/// the bin after the highest-count bin (clamped to the last bin).
struct ThresholdResult {
  double threshold = 0.0;
  std::array<int64_t, 10> histogram{};
  std::array<double, 11> bin_edges{};
  int modal_bin = 0;
};

/// Histogram rule applied to a single frame, bins spanning [min, max] of that
/// frame. Throws Errc::degenerate_frame when max == min.
ThresholdResult adaptive_threshold(const PressureFrame& frame);

/// The same rule applied to the pooled pixels of a whole sequence. A single
/// frame of pure background spans only its own noise range, so a per-frame
/// threshold always marks part of it foreground; activity decisions therefore
/// use this sequence-scoped threshold.
ThresholdResult pooled_threshold(const PressureSequence& seq);

/// mask[i] = values[i] > threshold.
std::vector<bool> binarize(const PressureFrame& frame, double threshold);

/// Number of pixels strictly above threshold.
int count_active(const PressureFrame& frame, double threshold);

struct SegmentParams {
  int min_active_pixels = 5;  // rejects single-pixel noise
  int max_gap_frames = 2;     // tolerates 80 ms dropouts at 25 fps
};

/// Temporal step segmentation: a frame is active when >= min_active_pixels
/// pixels exceed the pooled sequence threshold; maximal runs of active frames
/// are merged across gaps of <= max_gap_frames and runs shorter than 2 frames
/// are discarded. Returns an empty list when there is no activity.
std::vector<FrameRange> segment_steps(const PressureSequence& seq,
                                      int min_active_pixels = SegmentParams{}.min_active_pixels,
                                      int max_gap_frames = SegmentParams{}.max_gap_frames);

/// Minimal box containing every pixel above threshold in every frame of the
/// range. Throws Errc::no_active_pixels when the range has none.
BoundingBox step_bounding_box(const PressureSequence& seq, FrameRange range, double threshold);

/// Crops every frame of the range to bbox, keeping raw (pre-binarization)
/// values. The label is inherited; step_id is left for the caller.
StepSequence crop_step(const PressureSequence& seq, FrameRange range, const BoundingBox& bbox);

/// Pastes the step into a zero canvas so that the pressure-weighted centroid
/// (pooled over all frames) lands at the canvas center, rounded to the
/// nearest integer offset. Throws Errc::canvas_too_small when the canvas
/// cannot hold the frames without clipping.
StepSequence center_normalize(const StepSequence& step, int canvas_h, int canvas_w);

struct ExtractedStep {
  FrameRange range;
  BoundingBox bbox;
  StepSequence step;
};

/// segment + bbox + crop for a whole sequence.
std::vector<ExtractedStep> extract_steps(const PressureSequence& seq,
                                         const SegmentParams& params = {});

}  // namespace stepgrid
