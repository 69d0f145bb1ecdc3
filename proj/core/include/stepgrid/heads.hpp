#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stepgrid/types.hpp"

namespace stepgrid {

// Both heads keep every parameter in one flat vector so the optimizer,
// finite-difference checks, and checkpoints all speak the same layout.
// Blocks are column-major, in the order documented next to each type; the
// checkpoint stores exactly this flat order as little-endian f32.

/// Fully-connected classifier: p = softmax(W d + b).
/// Layout: [W (C x D), b (C)].
struct SoftmaxHead {
  int num_classes = 0;
  int input_dim = 0;
  Eigen::VectorXd theta;

  static SoftmaxHead zeros(int classes, int dim);
  Eigen::Index param_count() const {
    return Eigen::Index(num_classes) * input_dim + num_classes;
  }

  Eigen::Map<const Eigen::MatrixXd> W() const;
  Eigen::Map<const Eigen::VectorXd> b() const;
  Eigen::Map<Eigen::MatrixXd> W();
  Eigen::Map<Eigen::VectorXd> b();
};

/// Single GRU layer with update gate z, reset gate r, candidate h~:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   h~ = tanh(Wh x + Uh (r . h) + bh)
///   h' = (1 - z) . h + z . h~
/// followed by a linear readout of the final hidden state.
/// Layout: [Wz, Wr, Wh (H x D), Uz, Ur, Uh (H x H), bz, br, bh (H),
///          V (C x H), c (C)].
struct GruClassifier {
  int hidden = 0;
  int input_dim = 0;
  int num_classes = 0;
  Eigen::VectorXd theta;

  static GruClassifier zeros(int hidden, int dim, int classes);
  Eigen::Index param_count() const;

  Eigen::Map<const Eigen::MatrixXd> Wz() const;
  Eigen::Map<const Eigen::MatrixXd> Wr() const;
  Eigen::Map<const Eigen::MatrixXd> Wh() const;
  Eigen::Map<const Eigen::MatrixXd> Uz() const;
  Eigen::Map<const Eigen::MatrixXd> Ur() const;
  Eigen::Map<const Eigen::MatrixXd> Uh() const;
  Eigen::Map<const Eigen::VectorXd> bz() const;
  Eigen::Map<const Eigen::VectorXd> br() const;
  Eigen::Map<const Eigen::VectorXd> bh() const;
  Eigen::Map<const Eigen::MatrixXd> V() const;
  Eigen::Map<const Eigen::VectorXd> c() const;

  Eigen::Map<Eigen::MatrixXd> Wz();
  Eigen::Map<Eigen::MatrixXd> Wr();
  Eigen::Map<Eigen::MatrixXd> Wh();
  Eigen::Map<Eigen::MatrixXd> Uz();
  Eigen::Map<Eigen::MatrixXd> Ur();
  Eigen::Map<Eigen::MatrixXd> Uh();
  Eigen::Map<Eigen::VectorXd> bz();
  Eigen::Map<Eigen::VectorXd> br();
  Eigen::Map<Eigen::VectorXd> bh();
  Eigen::Map<Eigen::MatrixXd> V();
  Eigen::Map<Eigen::VectorXd> c();
};

Eigen::VectorXd to_eigen(const Descriptor& d);

/// Numerically stable softmax (max subtraction): sums to 1 within 1e-12.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

Eigen::VectorXd softmax_forward(const SoftmaxHead& head, const Descriptor& d);
Eigen::VectorXd gru_step(const GruClassifier& g, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& h_prev);

/// h0 = 0, iterate gru_step over the descriptors in order, then
/// softmax(V h_T + c).
Eigen::VectorXd gru_classify(const GruClassifier& g, const std::vector<Descriptor>& seq);

int predict(const SoftmaxHead& head, const Descriptor& d);
int predict(const GruClassifier& g, const std::vector<Descriptor>& seq);

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  int epochs = 100;
  int batch_size = 16;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;  // beta1 0.9, beta2 0.999, eps 1e-8
  uint64_t seed = 0;
  double l2 = 0.0;
  int hidden = 128;  // GRU only
};

struct LabeledDescriptor {
  Descriptor descriptor;
  int label = 0;
};

struct LabeledSequence {
  std::vector<Descriptor> sequence;
  int label = 0;
};

struct TrainCurve {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch (+ l2 penalty)
};

/// Weights ~ Uniform(+-1/sqrt(fan_in)) drawn in flat layout order; biases 0.
SoftmaxHead init_softmax(int classes, int dim, uint64_t seed);
GruClassifier init_gru(int hidden, int dim, int classes, uint64_t seed);

/// Minibatch training of mean cross-entropy + l2 * ||theta||^2. Epoch-level
/// shuffling and parameter init are seeded; batches accumulate per-sample
/// gradients in visit order, so a run is bit-deterministic for a fixed
/// platform. Zero epochs returns the initialization untouched.
TrainCurve train(SoftmaxHead& head, const std::vector<LabeledDescriptor>& data,
                 const TrainConfig& cfg);
TrainCurve train(GruClassifier& g, const std::vector<LabeledSequence>& data,
                 const TrainConfig& cfg);

struct TrainedSoftmax {
  SoftmaxHead model;
  TrainCurve curve;
};
struct TrainedGru {
  GruClassifier model;
  TrainCurve curve;
};

TrainedSoftmax train_softmax_head(const std::vector<LabeledDescriptor>& data, int num_classes,
                                  const TrainConfig& cfg);
TrainedGru train_gru_head(const std::vector<LabeledSequence>& data, int num_classes,
                          const TrainConfig& cfg);

/// Per-sample cross-entropy and its analytic gradient in flat layout
/// (the l2 term is training's job, not the sample loss's).
double softmax_loss_grad(const SoftmaxHead& head, const Descriptor& d, int label,
                         Eigen::VectorXd* grad);
double gru_loss_grad(const GruClassifier& g, const std::vector<Descriptor>& seq, int label,
                     Eigen::VectorXd* grad);

/// Max relative error between the analytic gradient and central finite
/// differences with step 1e-5, over all parameters. The error is measured
/// against max(1, |analytic| + |numeric|) so structurally zero directions
/// compare absolutely.
double grad_check(const SoftmaxHead& head, const Descriptor& d, int label);
double grad_check(const GruClassifier& g, const std::vector<Descriptor>& seq, int label);

// ---------------------------------------------------------------------------
// HED1 checkpoints: magic "HED1", little-endian u32 header length, JSON
// header {arch, classes, dim, hidden, labels, train}, then the flat
// parameter vector as little-endian f32.
// ---------------------------------------------------------------------------

struct Checkpoint {
  std::string arch;  // "softmax" | "gru"
  std::vector<std::string> labels;
  TrainConfig cfg;
  SoftmaxHead softmax;
  GruClassifier gru;
};

size_t write_checkpoint(const SoftmaxHead& head, const std::vector<std::string>& labels,
                        const TrainConfig& cfg, std::ostream& sink);
size_t write_checkpoint(const GruClassifier& g, const std::vector<std::string>& labels,
                        const TrainConfig& cfg, std::ostream& sink);
Checkpoint read_checkpoint(std::istream& source);

void save_checkpoint(const SoftmaxHead& head, const std::vector<std::string>& labels,
                     const TrainConfig& cfg, const std::filesystem::path& path);
void save_checkpoint(const GruClassifier& g, const std::vector<std::string>& labels,
                     const TrainConfig& cfg, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace stepgrid
