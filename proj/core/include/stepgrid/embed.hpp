#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "stepgrid/transform.hpp"
#include "stepgrid/types.hpp"

namespace stepgrid {

enum class EmbedderKind { ExternalModel, MockProjection };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::MockProjection;
  std::string model_path;  // ExternalModel only
  int output_dim = 2048;
  uint64_t seed = 0;  // MockProjection only
  int input_size = 299;
};

/// Descriptors for every image of one transformed step, in frame order.
struct EmbeddedStep {
  std::string step_id;
  std::vector<Descriptor> descriptors;
  std::string label;
};

/// Read-only after construction; embed calls may run concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int output_dim() const = 0;
  virtual int input_size() const = 0;
  /// Forward one image; the image must match input_size exactly.
  virtual Descriptor embed(const GrayImage& img) const = 0;
};

/// Deterministic stand-in for the external CNN: an 8x8 grid of mean-pooled
/// intensities (64 values, scaled to [0,1]) concatenated with a normalized
/// 32-bin intensity histogram, multiplied by a seeded random +-1/sqrt(96)
/// projection matrix of shape output_dim x 96. Pooling uses integer byte
/// sums; the projection accumulates in double, in feature order, so the
/// result is bit-identical across runs and platforms.
class MockProjectionEmbedder final : public Embedder {
 public:
  static constexpr int kGridCells = 64;
  static constexpr int kHistBins = 32;
  static constexpr int kFeatureDim = kGridCells + kHistBins;

  MockProjectionEmbedder(uint64_t seed, int output_dim, int input_size);

  int output_dim() const override { return output_dim_; }
  int input_size() const override { return input_size_; }
  Descriptor embed(const GrayImage& img) const override;

  /// The 96 pooled features alone (the linear stage's input); used by tests.
  static std::array<double, kFeatureDim> features(const GrayImage& img);

  /// Row-major output_dim x 96 projection entries.
  const std::vector<float>& projection() const { return projection_; }
  uint64_t projection_checksum() const;

 private:
  int output_dim_;
  int input_size_;
  std::vector<float> projection_;
};

/// Builds the embedder described by the spec. ExternalModel requires the
/// model file to exist and the backend to be compiled in
/// (-DSTEPGRID_WITH_ONNXRUNTIME=ON); the handle reports the output dimension
/// discovered from the model graph.
std::unique_ptr<Embedder> load_embedder(const EmbedderSpec& spec);

/// Size-checked forward pass (Errc::size_mismatch on a wrong image size).
Descriptor embed_image(const Embedder& embedder, const GrayImage& img);

/// One descriptor per image, order preserved.
EmbeddedStep embed_step(const Embedder& embedder, const TransformOutput& transformed);

/// Per-channel input scaling for the external model: pixel byte b enters the
/// network as b * scale + offset. Read from a "<model>.json" sidecar
/// ({"scale": s, "offset": o}, scalars or 3-element arrays); defaults to
/// scale 1/255, offset 0 when the sidecar is absent.
struct InputScaling {
  std::array<double, 3> scale{1.0 / 255.0, 1.0 / 255.0, 1.0 / 255.0};
  std::array<double, 3> offset{0.0, 0.0, 0.0};
};

InputScaling load_input_scaling(const std::filesystem::path& model_path);

}  // namespace stepgrid
