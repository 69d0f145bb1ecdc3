#include "stepgrid/preproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stepgrid {

namespace {

constexpr int kBins = 10;

template <typename PixelVisitor>
ThresholdResult histogram_threshold(double mn, double mx, PixelVisitor&& visit_pixels) {
  require(mx > mn, Errc::degenerate_frame, "adaptive threshold: all pixels equal");
  ThresholdResult res;
  const double width = (mx - mn) / kBins;
  for (int i = 0; i <= kBins; ++i) res.bin_edges[size_t(i)] = mn + width * i;
  res.bin_edges[kBins] = mx;

  visit_pixels([&](double v) {
    int bin = v >= mx ? kBins - 1 : int((v - mn) / width);
    bin = std::clamp(bin, 0, kBins - 1);
    res.histogram[size_t(bin)] += 1;
  });

  // ties -> lowest index
  res.modal_bin = 0;
  for (int i = 1; i < kBins; ++i)
    if (res.histogram[size_t(i)] > res.histogram[size_t(res.modal_bin)]) res.modal_bin = i;

  const int threshold_bin = std::min(res.modal_bin + 1, kBins - 1);
  res.threshold = mn + (threshold_bin + 0.5) * width;
  return res;
}

}  // namespace

ThresholdResult adaptive_threshold(const PressureFrame& frame) {
  require(frame.valid(), Errc::bad_config, "adaptive_threshold: invalid frame");
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (float v : frame.values) {
    mn = std::min(mn, double(v));
    mx = std::max(mx, double(v));
  }
  return histogram_threshold(mn, mx, [&](auto&& add) {
    for (float v : frame.values) add(double(v));
  });
}

ThresholdResult pooled_threshold(const PressureSequence& seq) {
  require(seq.valid(), Errc::bad_config, "pooled_threshold: invalid sequence");
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& f : seq.frames)
    for (float v : f.values) {
      mn = std::min(mn, double(v));
      mx = std::max(mx, double(v));
    }
  return histogram_threshold(mn, mx, [&](auto&& add) {
    for (const auto& f : seq.frames)
      for (float v : f.values) add(double(v));
  });
}

std::vector<bool> binarize(const PressureFrame& frame, double threshold) {
  require(std::isfinite(threshold), Errc::bad_range, "binarize: non-finite threshold");
  std::vector<bool> mask(frame.pixel_count());
  for (size_t i = 0; i < mask.size(); ++i) mask[i] = double(frame.values[i]) > threshold;
  return mask;
}

int count_active(const PressureFrame& frame, double threshold) {
  int n = 0;
  for (float v : frame.values)
    if (double(v) > threshold) ++n;
  return n;
}

std::vector<FrameRange> segment_steps(const PressureSequence& seq, int min_active_pixels,
                                      int max_gap_frames) {
  require(seq.valid(), Errc::bad_config, "segment_steps: invalid sequence");
  double threshold;
  try {
    threshold = pooled_threshold(seq).threshold;
  } catch (const Error& e) {
    if (e.errc() == Errc::degenerate_frame) return {};  // flat sequence, all background
    throw;
  }

  std::vector<bool> active(seq.num_frames());
  for (size_t t = 0; t < seq.num_frames(); ++t)
    active[t] = count_active(seq.frames[t], threshold) >= min_active_pixels;

  std::vector<FrameRange> runs;
  int t = 0;
  const int n = int(seq.num_frames());
  while (t < n) {
    if (!active[size_t(t)]) {
      ++t;
      continue;
    }
    int start = t;
    while (t < n && active[size_t(t)]) ++t;
    runs.push_back({start, t});
  }

  std::vector<FrameRange> merged;
  for (const auto& run : runs) {
    if (!merged.empty() && run.start - merged.back().end <= max_gap_frames)
      merged.back().end = run.end;
    else
      merged.push_back(run);
  }

  std::erase_if(merged, [](const FrameRange& r) { return r.length() < 2; });
  return merged;
}

BoundingBox step_bounding_box(const PressureSequence& seq, FrameRange range, double threshold) {
  require(range.start >= 0 && range.end <= int(seq.num_frames()) && range.length() > 0,
          Errc::bad_range, "step_bounding_box: bad frame range");
  int r0 = seq.rows(), r1 = -1, c0 = seq.cols(), c1 = -1;
  for (int t = range.start; t < range.end; ++t) {
    const auto& f = seq.frames[size_t(t)];
    for (int r = 0; r < f.rows; ++r)
      for (int c = 0; c < f.cols; ++c)
        if (double(f.at(r, c)) > threshold) {
          r0 = std::min(r0, r);
          r1 = std::max(r1, r);
          c0 = std::min(c0, c);
          c1 = std::max(c1, c);
        }
  }
  require(r1 >= 0, Errc::no_active_pixels, "step_bounding_box: no pixels above threshold");
  return {r0, c0, r1 - r0 + 1, c1 - c0 + 1};
}

StepSequence crop_step(const PressureSequence& seq, FrameRange range, const BoundingBox& bbox) {
  require(range.start >= 0 && range.end <= int(seq.num_frames()) && range.length() > 0,
          Errc::bad_range, "crop_step: bad frame range");
  require(bbox.within(seq.rows(), seq.cols()), Errc::box_out_of_bounds,
          "crop_step: bbox exceeds sensor grid");
  StepSequence step;
  step.bbox = bbox;
  step.subject_id = seq.subject_id;
  step.frames.reserve(size_t(range.length()));
  for (int t = range.start; t < range.end; ++t) {
    const auto& src = seq.frames[size_t(t)];
    PressureFrame dst(bbox.height, bbox.width);
    for (int r = 0; r < bbox.height; ++r)
      for (int c = 0; c < bbox.width; ++c) dst.at(r, c) = src.at(bbox.row0 + r, bbox.col0 + c);
    step.frames.push_back(std::move(dst));
  }
  return step;
}

StepSequence center_normalize(const StepSequence& step, int canvas_h, int canvas_w) {
  require(step.valid(), Errc::bad_config, "center_normalize: invalid step");
  const int h = step.bbox.height, w = step.bbox.width;
  require(canvas_h >= h && canvas_w >= w, Errc::canvas_too_small,
          "center_normalize: canvas smaller than step frames");

  double total = 0.0, moment_r = 0.0, moment_c = 0.0;
  for (const auto& f : step.frames)
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double v = f.at(r, c);
        total += v;
        moment_r += v * r;
        moment_c += v * c;
      }
  // an all-zero step has no centroid; fall back to the geometric box center
  double centroid_r = total > 0.0 ? moment_r / total : (h - 1) / 2.0;
  double centroid_c = total > 0.0 ? moment_c / total : (w - 1) / 2.0;

  const double center_r = (canvas_h - 1) / 2.0;
  const double center_c = (canvas_w - 1) / 2.0;
  const int off_r = int(std::lround(center_r - centroid_r));
  const int off_c = int(std::lround(center_c - centroid_c));
  require(off_r >= 0 && off_c >= 0 && off_r + h <= canvas_h && off_c + w <= canvas_w,
          Errc::canvas_too_small, "center_normalize: centered paste would clip");

  StepSequence out;
  out.bbox = {0, 0, canvas_h, canvas_w};
  out.subject_id = step.subject_id;
  out.step_id = step.step_id;
  out.frames.reserve(step.frames.size());
  for (const auto& f : step.frames) {
    PressureFrame canvas(canvas_h, canvas_w);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) canvas.at(off_r + r, off_c + c) = f.at(r, c);
    out.frames.push_back(std::move(canvas));
  }
  return out;
}

std::vector<ExtractedStep> extract_steps(const PressureSequence& seq,
                                         const SegmentParams& params) {
  auto ranges = segment_steps(seq, params.min_active_pixels, params.max_gap_frames);
  if (ranges.empty()) return {};
  const double threshold = pooled_threshold(seq).threshold;
  std::vector<ExtractedStep> out;
  out.reserve(ranges.size());
  for (const auto& range : ranges) {
    BoundingBox bbox = step_bounding_box(seq, range, threshold);
    out.push_back({range, bbox, crop_step(seq, range, bbox)});
  }
  return out;
}

}  // namespace stepgrid
