#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stepgrid/error.hpp"

namespace stepgrid {

/// One 2-D pressure mapping. Values are non-negative sensor readings stored
/// as float32 (the on-disk precision), row-major.
struct PressureFrame {
  int rows = 0;
  int cols = 0;
  std::vector<float> values;

  PressureFrame() = default;
  PressureFrame(int r, int c) : rows(r), cols(c), values(size_t(r) * size_t(c), 0.0f) {}

  float& at(int r, int c) { return values[size_t(r) * cols + c]; }
  float at(int r, int c) const { return values[size_t(r) * cols + c]; }
  size_t pixel_count() const { return values.size(); }

  bool valid() const {
    if (rows <= 0 || cols <= 0) return false;
    if (values.size() != size_t(rows) * size_t(cols)) return false;
    for (float v : values)
      if (!std::isfinite(v) || v < 0.0f) return false;
    return true;
  }
};

/// Temporal stack of frames from one walking recording (2-3 steps).
struct PressureSequence {
  std::vector<PressureFrame> frames;
  double fps = 25.0;
  std::string subject_id;
  std::string sequence_id;

  int rows() const { return frames.empty() ? 0 : frames.front().rows; }
  int cols() const { return frames.empty() ? 0 : frames.front().cols; }
  size_t num_frames() const { return frames.size(); }

  bool valid() const {
    if (frames.empty() || fps <= 0.0) return false;
    for (const auto& f : frames) {
      if (!f.valid()) return false;
      if (f.rows != rows() || f.cols != cols()) return false;
    }
    return true;
  }
};

/// Half-open frame index range [start, end).
struct FrameRange {
  int start = 0;
  int end = 0;
  int length() const { return end - start; }
  bool operator==(const FrameRange&) const = default;
};

struct BoundingBox {
  int row0 = 0;
  int col0 = 0;
  int height = 0;
  int width = 0;

  bool within(int rows, int cols) const {
    return row0 >= 0 && col0 >= 0 && height > 0 && width > 0 && row0 + height <= rows &&
           col0 + width <= cols;
  }
  bool operator==(const BoundingBox&) const = default;
};

/// One segmented footstep: frames cropped to a shared bounding box.
struct StepSequence {
  std::vector<PressureFrame> frames;  // all bbox.height x bbox.width
  BoundingBox bbox;                   // in original sensor coordinates
  std::string subject_id;
  std::string step_id;

  bool valid() const {
    if (frames.empty()) return false;
    for (const auto& f : frames)
      if (!f.valid() || f.rows != bbox.height || f.cols != bbox.width) return false;
    return true;
  }
};

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), pixels(size_t(w) * size_t(h), 0) {}

  uint8_t& at(int r, int c) { return pixels[size_t(r) * width + c]; }
  uint8_t at(int r, int c) const { return pixels[size_t(r) * width + c]; }

  bool valid() const {
    return width > 0 && height > 0 && pixels.size() == size_t(width) * size_t(height);
  }
  bool operator==(const GrayImage&) const = default;
};

/// Fixed-length real descriptor emitted by an embedder.
struct Descriptor {
  std::vector<float> values;

  int dim() const { return int(values.size()); }
  bool valid() const {
    if (values.empty()) return false;
    for (float v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

struct ReportRow {
  int repeat = 0;
  int fold = 0;
  std::string strategy;
  double accuracy = 0.0;
};

/// Per-fold, per-repeat accuracies plus per-strategy means.
struct EvalReport {
  std::vector<ReportRow> rows;

  std::map<std::string, double> strategy_means() const {
    std::map<std::string, double> sums;
    std::map<std::string, int> counts;
    for (const auto& r : rows) {
      sums[r.strategy] += r.accuracy;
      counts[r.strategy] += 1;
    }
    for (auto& [name, s] : sums) s /= counts[name];
    return sums;
  }
};

}  // namespace stepgrid
