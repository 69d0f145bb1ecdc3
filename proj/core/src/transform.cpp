#include "stepgrid/transform.hpp"

#include <algorithm>
#include <cmath>

namespace stepgrid {

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::MaxFrame: return "max";
    case Strategy::AverageFrame: return "avg";
    case Strategy::FullSequence: return "seq";
  }
  fail(Errc::bad_config, "unknown strategy");
}

Strategy parse_strategy(const std::string& s) {
  if (s == "max") return Strategy::MaxFrame;
  if (s == "avg") return Strategy::AverageFrame;
  if (s == "seq") return Strategy::FullSequence;
  fail(Errc::bad_config, "unknown strategy '" + s + "' (expected max|avg|seq)");
}

size_t select_max_frame(const StepSequence& step) {
  require(!step.frames.empty(), Errc::empty_sequence, "select_max_frame: empty step");
  size_t best = 0;
  double best_sum = -1.0;
  for (size_t t = 0; t < step.frames.size(); ++t) {
    double sum = 0.0;
    for (float v : step.frames[t].values) sum += double(v);
    if (sum > best_sum) {
      best_sum = sum;
      best = t;
    }
  }
  return best;
}

PressureFrame average_frames(const StepSequence& step) {
  require(!step.frames.empty(), Errc::empty_sequence, "average_frames: empty step");
  const auto& first = step.frames.front();
  std::vector<double> acc(first.pixel_count(), 0.0);
  for (const auto& f : step.frames)
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += double(f.values[i]);
  PressureFrame mean(first.rows, first.cols);
  const double n = double(step.frames.size());
  for (size_t i = 0; i < acc.size(); ++i) mean.values[i] = float(acc[i] / n);
  return mean;
}

namespace {

// round half away from zero, clamped to a byte
uint8_t to_byte(double x) { return uint8_t(std::min(255.0, std::max(0.0, std::round(x)))); }

struct SampleAxis {
  int lo, hi;
  double frac;
};

SampleAxis axis_coords(int dst, int dst_size, int src_size) {
  const double scale = double(src_size) / double(dst_size);
  double src = (dst + 0.5) * scale - 0.5;
  src = std::clamp(src, 0.0, double(src_size - 1));
  int lo = int(std::floor(src));
  int hi = std::min(lo + 1, src_size - 1);
  return {lo, hi, src - lo};
}

template <typename Getter>
double bilinear_at(int r, int c, int out_h, int out_w, int in_h, int in_w, Getter&& get) {
  const auto ay = axis_coords(r, out_h, in_h);
  const auto ax = axis_coords(c, out_w, in_w);
  const double top = get(ay.lo, ax.lo) * (1.0 - ax.frac) + get(ay.lo, ax.hi) * ax.frac;
  const double bot = get(ay.hi, ax.lo) * (1.0 - ax.frac) + get(ay.hi, ax.hi) * ax.frac;
  return top * (1.0 - ay.frac) + bot * ay.frac;
}

}  // namespace

GrayImage render_gray(const PressureFrame& frame, double vmin, double vmax) {
  require(vmax > vmin, Errc::bad_range, "render_gray: vmax must exceed vmin");
  GrayImage img(frame.cols, frame.rows);
  const double inv = 1.0 / (vmax - vmin);
  for (size_t i = 0; i < frame.values.size(); ++i) {
    double t = (double(frame.values[i]) - vmin) * inv;
    t = std::clamp(t, 0.0, 1.0);
    img.pixels[i] = to_byte(255.0 * t);
  }
  return img;
}

GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
  require(out_w >= 1 && out_h >= 1, Errc::bad_range, "resize: output dims must be positive");
  if (out_w == img.width && out_h == img.height) return img;
  GrayImage out(out_w, out_h);
  for (int r = 0; r < out_h; ++r)
    for (int c = 0; c < out_w; ++c)
      out.at(r, c) = to_byte(bilinear_at(r, c, out_h, out_w, img.height, img.width,
                                         [&](int y, int x) { return double(img.at(y, x)); }));
  return out;
}

PressureFrame resize_bilinear(const PressureFrame& frame, int out_w, int out_h) {
  require(out_w >= 1 && out_h >= 1, Errc::bad_range, "resize: output dims must be positive");
  if (out_w == frame.cols && out_h == frame.rows) return frame;
  PressureFrame out(out_h, out_w);
  for (int r = 0; r < out_h; ++r)
    for (int c = 0; c < out_w; ++c)
      out.at(r, c) = float(bilinear_at(r, c, out_h, out_w, frame.rows, frame.cols,
                                       [&](int y, int x) { return double(frame.at(y, x)); }));
  return out;
}

TransformOutput transform_step(const StepSequence& step, Strategy strategy,
                               const RenderConfig& cfg) {
  require(step.valid(), Errc::bad_config, "transform_step: invalid step");
  double vmax = 0.0;
  for (const auto& f : step.frames)
    for (float v : f.values) vmax = std::max(vmax, double(v));

  TransformOutput out;
  out.step_id = step.step_id;
  out.strategy = strategy;
  out.label = step.subject_id;

  auto render = [&](const PressureFrame& f) {
    return resize_bilinear(render_gray(f, 0.0, vmax), cfg.out_size, cfg.out_size);
  };

  switch (strategy) {
    case Strategy::MaxFrame:
      out.images.push_back(render(step.frames[select_max_frame(step)]));
      break;
    case Strategy::AverageFrame:
      out.images.push_back(render(average_frames(step)));
      break;
    case Strategy::FullSequence:
      out.images.reserve(step.frames.size());
      for (const auto& f : step.frames) out.images.push_back(render(f));
      break;
  }
  return out;
}

}  // namespace stepgrid
