// Optional onnxruntime backend for the ExternalModel embedder. Compiled only
// with -DSTEPGRID_WITH_ONNXRUNTIME=ON; everything else in the project runs on
// the mock embedder.
#ifdef STEPGRID_WITH_ONNXRUNTIME

#include <onnxruntime_cxx_api.h>

#include <memory>
#include <vector>

#include "stepgrid/embed.hpp"

namespace stepgrid {

namespace {

class OnnxEmbedder final : public Embedder {
 public:
  OnnxEmbedder(const EmbedderSpec& spec)
      : env_(ORT_LOGGING_LEVEL_WARNING, "stepgrid"),
        session_(nullptr),
        input_size_(spec.input_size),
        scaling_(load_input_scaling(spec.model_path)) {
    Ort::SessionOptions options;
    options.SetIntraOpNumThreads(1);
    try {
      session_ = Ort::Session(env_, spec.model_path.c_str(), options);
    } catch (const Ort::Exception& e) {
      fail(Errc::model_load, std::string("onnx: cannot load model: ") + e.what());
    }

    require(session_.GetInputCount() == 1, Errc::shape_mismatch,
            "onnx: model must declare exactly one input");
    require(session_.GetOutputCount() == 1, Errc::shape_mismatch,
            "onnx: model must declare exactly one output");

    Ort::AllocatorWithDefaultOptions alloc;
    input_name_ = session_.GetInputNameAllocated(0, alloc).get();
    output_name_ = session_.GetOutputNameAllocated(0, alloc).get();

    auto in_info = session_.GetInputTypeInfo(0).GetTensorTypeAndShapeInfo();
    auto in_shape = in_info.GetShape();
    require(in_shape.size() == 4, Errc::shape_mismatch,
            "onnx: expected a rank-4 NCHW image input");
    // dynamic batch (-1) is fine; fix H/W from the declared shape when static
    if (in_shape[2] > 0) input_size_ = int(in_shape[2]);
    require(in_shape[2] == in_shape[3] || in_shape[2] <= 0, Errc::shape_mismatch,
            "onnx: only square inputs are supported");

    auto out_info = session_.GetOutputTypeInfo(0).GetTensorTypeAndShapeInfo();
    auto out_shape = out_info.GetShape();
    int64_t dim = 1;
    for (size_t i = 1; i < out_shape.size(); ++i) {
      require(out_shape[i] > 0, Errc::shape_mismatch, "onnx: output shape must be static");
      dim *= out_shape[i];
    }
    require(out_shape.size() >= 2 && dim > 0, Errc::shape_mismatch,
            "onnx: output is not a flat vector per input");
    output_dim_ = int(dim);
  }

  int output_dim() const override { return output_dim_; }
  int input_size() const override { return input_size_; }

  Descriptor embed(const GrayImage& img) const override {
    const int s = input_size_;
    std::vector<float> input(size_t(3) * s * s);
    // replicate the gray channel x3, applying per-channel scaling
    for (int ch = 0; ch < 3; ++ch)
      for (int i = 0; i < s * s; ++i)
        input[size_t(ch) * s * s + size_t(i)] =
            float(double(img.pixels[size_t(i)]) * scaling_.scale[size_t(ch)] +
                  scaling_.offset[size_t(ch)]);

    const std::array<int64_t, 4> shape{1, 3, s, s};
    Ort::MemoryInfo mem = Ort::MemoryInfo::CreateCpu(OrtArenaAllocator, OrtMemTypeDefault);
    Ort::Value tensor = Ort::Value::CreateTensor<float>(mem, input.data(), input.size(),
                                                        shape.data(), shape.size());
    const char* in_names[] = {input_name_.c_str()};
    const char* out_names[] = {output_name_.c_str()};
    auto outputs = const_cast<Ort::Session&>(session_).Run(Ort::RunOptions{nullptr}, in_names,
                                                           &tensor, 1, out_names, 1);
    const float* data = outputs.front().GetTensorData<float>();
    Descriptor d;
    d.values.assign(data, data + output_dim_);
    return d;
  }

 private:
  Ort::Env env_;
  Ort::Session session_;
  std::string input_name_, output_name_;
  int input_size_;
  int output_dim_ = 0;
  InputScaling scaling_;
};

}  // namespace

std::unique_ptr<Embedder> load_external_embedder(const EmbedderSpec& spec) {
  return std::make_unique<OnnxEmbedder>(spec);
}

}  // namespace stepgrid

#endif  // STEPGRID_WITH_ONNXRUNTIME
