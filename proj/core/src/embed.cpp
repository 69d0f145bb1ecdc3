#include "stepgrid/embed.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "stepgrid/rng.hpp"

namespace stepgrid {

MockProjectionEmbedder::MockProjectionEmbedder(uint64_t seed, int output_dim, int input_size)
    : output_dim_(output_dim), input_size_(input_size) {
  require(output_dim >= 1, Errc::bad_config, "mock embedder: output_dim must be positive");
  require(input_size >= 8, Errc::bad_config, "mock embedder: input_size must be at least 8");
  projection_.resize(size_t(output_dim) * kFeatureDim);
  Rng rng(derive_seed(seed, "mock-projection"));
  const float magnitude = float(1.0 / std::sqrt(double(kFeatureDim)));
  for (auto& p : projection_) p = rng.coin() ? magnitude : -magnitude;
}

std::array<double, MockProjectionEmbedder::kFeatureDim> MockProjectionEmbedder::features(
    const GrayImage& img) {
  std::array<double, kFeatureDim> f{};
  // 8x8 grid of mean intensities, integer sums to stay platform-exact
  for (int gi = 0; gi < 8; ++gi) {
    const int r0 = gi * img.height / 8, r1 = (gi + 1) * img.height / 8;
    for (int gj = 0; gj < 8; ++gj) {
      const int c0 = gj * img.width / 8, c1 = (gj + 1) * img.width / 8;
      uint64_t sum = 0;
      for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) sum += img.at(r, c);
      const uint64_t count = uint64_t(r1 - r0) * uint64_t(c1 - c0);
      f[size_t(gi * 8 + gj)] = double(sum) / (double(count) * 255.0);
    }
  }
  // normalized 32-bin global histogram
  std::array<uint64_t, kHistBins> counts{};
  for (uint8_t v : img.pixels) counts[size_t(v >> 3)] += 1;
  for (int b = 0; b < kHistBins; ++b)
    f[size_t(kGridCells + b)] = double(counts[size_t(b)]) / double(img.pixels.size());
  return f;
}

Descriptor MockProjectionEmbedder::embed(const GrayImage& img) const {
  const auto f = features(img);
  Descriptor d;
  d.values.resize(size_t(output_dim_));
  for (int i = 0; i < output_dim_; ++i) {
    const float* row = projection_.data() + size_t(i) * kFeatureDim;
    double acc = 0.0;  // fixed j order
    for (int j = 0; j < kFeatureDim; ++j) acc += double(row[j]) * f[size_t(j)];
    d.values[size_t(i)] = float(acc);
  }
  return d;
}

uint64_t MockProjectionEmbedder::projection_checksum() const {
  uint64_t h = 0xcbf29ce484222325ull;
  for (float v : projection_) {
    uint32_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    h = (h ^ bits) * 0x100000001b3ull;
  }
  return h;
}

InputScaling load_input_scaling(const std::filesystem::path& model_path) {
  const std::filesystem::path sidecar = model_path.string() + ".json";
  InputScaling s;
  std::ifstream in(sidecar);
  if (!in) return s;  // sidecar optional
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  require(!j.is_discarded(), Errc::bad_config, "input scaling sidecar: invalid JSON");
  auto read_triplet = [&](const char* key, std::array<double, 3>& dst) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (v.is_number()) {
      dst.fill(v.get<double>());
    } else {
      require(v.is_array() && v.size() == 3, Errc::bad_config,
              std::string("input scaling sidecar: '") + key + "' must be a number or [r,g,b]");
      for (int c = 0; c < 3; ++c) dst[size_t(c)] = v.at(size_t(c)).get<double>();
    }
  };
  read_triplet("scale", s.scale);
  read_triplet("offset", s.offset);
  return s;
}

// Defined in embed_onnx.cpp when the backend is compiled in.
std::unique_ptr<Embedder> load_external_embedder(const EmbedderSpec& spec);

#ifndef STEPGRID_WITH_ONNXRUNTIME
std::unique_ptr<Embedder> load_external_embedder(const EmbedderSpec&) {
  fail(Errc::model_load,
       "external model support is not compiled in; rebuild with -DSTEPGRID_WITH_ONNXRUNTIME=ON "
       "or use the mock embedder");
}
#endif

std::unique_ptr<Embedder> load_embedder(const EmbedderSpec& spec) {
  switch (spec.kind) {
    case EmbedderKind::MockProjection:
      return std::make_unique<MockProjectionEmbedder>(spec.seed, spec.output_dim,
                                                      spec.input_size);
    case EmbedderKind::ExternalModel: {
      require(!spec.model_path.empty(), Errc::bad_config, "external embedder: model_path unset");
      require(std::filesystem::exists(spec.model_path), Errc::model_load,
              "external embedder: model file not found: " + spec.model_path);
      return load_external_embedder(spec);
    }
  }
  fail(Errc::bad_config, "unknown embedder kind");
}

Descriptor embed_image(const Embedder& embedder, const GrayImage& img) {
  require(img.valid(), Errc::bad_config, "embed_image: invalid image");
  require(img.width == embedder.input_size() && img.height == embedder.input_size(),
          Errc::size_mismatch,
          "embed_image: image is " + std::to_string(img.width) + "x" +
              std::to_string(img.height) + " but the embedder expects " +
              std::to_string(embedder.input_size()));
  return embedder.embed(img);
}

EmbeddedStep embed_step(const Embedder& embedder, const TransformOutput& transformed) {
  require(!transformed.images.empty(), Errc::empty_sequence, "embed_step: no images");
  EmbeddedStep out;
  out.step_id = transformed.step_id;
  out.label = transformed.label;
  out.descriptors.reserve(transformed.images.size());
  for (const auto& img : transformed.images) out.descriptors.push_back(embed_image(embedder, img));
  return out;
}

}  // namespace stepgrid
