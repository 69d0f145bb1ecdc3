#pragma once

#include <string>
#include <vector>

#include "stepgrid/types.hpp"

namespace stepgrid {

/// The three ways of turning a step into imagery.
enum class Strategy { MaxFrame, AverageFrame, FullSequence };

std::string strategy_name(Strategy s);          // "max" / "avg" / "seq"
Strategy parse_strategy(const std::string& s);  // throws Errc::bad_config

struct RenderConfig {
  int out_size = 299;  // square resize target fed to the embedder
};

struct TransformOutput {
  std::string step_id;
  Strategy strategy = Strategy::MaxFrame;
  std::vector<GrayImage> images;  // 1 for Max/Average, frame count for FullSequence
  std::string label;
};

/// Index of the frame with the highest pixel sum; ties go to the earliest.
size_t select_max_frame(const StepSequence& step);

/// Element-wise arithmetic mean of all frames (accumulated in double, in
/// frame order).
PressureFrame average_frames(const StepSequence& step);

/// Linear map to 8-bit gray: round(255 * clamp((v - vmin) / (vmax - vmin)));
/// rounding is half away from zero. Brighter means more pressure.
GrayImage render_gray(const PressureFrame& frame, double vmin, double vmax);

/// Bilinear resize with the half-pixel-center convention
/// (src = (dst + 0.5) * scale - 0.5, clamped to borders).
GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h);

/// Same resampling on raw pressure values.
PressureFrame resize_bilinear(const PressureFrame& frame, int out_w, int out_h);

/// Applies one strategy to a step. All frames of the step are rendered with
/// vmin = 0 and vmax = the step-wide raw maximum, so intensities stay
/// comparable across the moments of one step, then resized to
/// cfg.out_size x cfg.out_size.
TransformOutput transform_step(const StepSequence& step, Strategy strategy,
                               const RenderConfig& cfg = {});

}  // namespace stepgrid
