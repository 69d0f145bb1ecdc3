#include "stepgrid/heads.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "stepgrid/rng.hpp"

namespace stepgrid {

using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// --------------------------------------------------------------------------
// parameter layout
// --------------------------------------------------------------------------

SoftmaxHead SoftmaxHead::zeros(int classes, int dim) {
  require(classes >= 1 && dim >= 1, Errc::bad_config, "softmax head: bad dimensions");
  SoftmaxHead h;
  h.num_classes = classes;
  h.input_dim = dim;
  h.theta = VectorXd::Zero(h.param_count());
  return h;
}

Map<const MatrixXd> SoftmaxHead::W() const {
  return {theta.data(), num_classes, input_dim};
}
Map<const VectorXd> SoftmaxHead::b() const {
  return {theta.data() + Eigen::Index(num_classes) * input_dim, num_classes};
}
Map<MatrixXd> SoftmaxHead::W() { return {theta.data(), num_classes, input_dim}; }
Map<VectorXd> SoftmaxHead::b() {
  return {theta.data() + Eigen::Index(num_classes) * input_dim, num_classes};
}

namespace {

// offsets of the GRU blocks within the flat vector
struct GruLayout {
  Eigen::Index wz, wr, wh, uz, ur, uh, bz, br, bh, v, c, total;
};

GruLayout gru_layout(int H, int D, int C) {
  GruLayout L{};
  Eigen::Index off = 0;
  auto block = [&off](Eigen::Index n) {
    Eigen::Index at = off;
    off += n;
    return at;
  };
  const Eigen::Index HD = Eigen::Index(H) * D, HH = Eigen::Index(H) * H;
  L.wz = block(HD);
  L.wr = block(HD);
  L.wh = block(HD);
  L.uz = block(HH);
  L.ur = block(HH);
  L.uh = block(HH);
  L.bz = block(H);
  L.br = block(H);
  L.bh = block(H);
  L.v = block(Eigen::Index(C) * H);
  L.c = block(C);
  L.total = off;
  return L;
}

}  // namespace

GruClassifier GruClassifier::zeros(int hidden, int dim, int classes) {
  require(hidden >= 1 && dim >= 1 && classes >= 1, Errc::bad_config, "gru: bad dimensions");
  GruClassifier g;
  g.hidden = hidden;
  g.input_dim = dim;
  g.num_classes = classes;
  g.theta = VectorXd::Zero(gru_layout(hidden, dim, classes).total);
  return g;
}

Eigen::Index GruClassifier::param_count() const {
  return gru_layout(hidden, input_dim, num_classes).total;
}

#define STEPGRID_GRU_MAT(name, field, rows, cols)                                  \
  Map<const MatrixXd> GruClassifier::name() const {                                \
    return {theta.data() + gru_layout(hidden, input_dim, num_classes).field, rows, \
            cols};                                                                 \
  }                                                                                \
  Map<MatrixXd> GruClassifier::name() {                                            \
    return {theta.data() + gru_layout(hidden, input_dim, num_classes).field, rows, \
            cols};                                                                 \
  }
#define STEPGRID_GRU_VEC(name, field, n)                                            \
  Map<const VectorXd> GruClassifier::name() const {                                 \
    return {theta.data() + gru_layout(hidden, input_dim, num_classes).field, n};    \
  }                                                                                 \
  Map<VectorXd> GruClassifier::name() {                                             \
    return {theta.data() + gru_layout(hidden, input_dim, num_classes).field, n};    \
  }

STEPGRID_GRU_MAT(Wz, wz, hidden, input_dim)
STEPGRID_GRU_MAT(Wr, wr, hidden, input_dim)
STEPGRID_GRU_MAT(Wh, wh, hidden, input_dim)
STEPGRID_GRU_MAT(Uz, uz, hidden, hidden)
STEPGRID_GRU_MAT(Ur, ur, hidden, hidden)
STEPGRID_GRU_MAT(Uh, uh, hidden, hidden)
STEPGRID_GRU_VEC(bz, bz, hidden)
STEPGRID_GRU_VEC(br, br, hidden)
STEPGRID_GRU_VEC(bh, bh, hidden)
STEPGRID_GRU_MAT(V, v, num_classes, hidden)
STEPGRID_GRU_VEC(c, c, num_classes)

#undef STEPGRID_GRU_MAT
#undef STEPGRID_GRU_VEC

// --------------------------------------------------------------------------
// forward
// --------------------------------------------------------------------------

VectorXd to_eigen(const Descriptor& d) {
  VectorXd x(d.dim());
  for (int i = 0; i < d.dim(); ++i) x[i] = double(d.values[size_t(i)]);
  return x;
}

VectorXd softmax(const VectorXd& logits) {
  const double m = logits.maxCoeff();
  VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

VectorXd softmax_forward(const SoftmaxHead& head, const Descriptor& d) {
  require(d.dim() == head.input_dim, Errc::dim_mismatch,
          "softmax_forward: descriptor dim " + std::to_string(d.dim()) + " != " +
              std::to_string(head.input_dim));
  return softmax(head.W() * to_eigen(d) + head.b());
}

namespace {

inline VectorXd sigmoid(const VectorXd& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

struct GruCell {
  VectorXd z, r, g, h;  // gates, candidate, new state
};

GruCell gru_cell(const GruClassifier& m, const VectorXd& x, const VectorXd& h_prev) {
  GruCell cell;
  cell.z = sigmoid(m.Wz() * x + m.Uz() * h_prev + m.bz());
  cell.r = sigmoid(m.Wr() * x + m.Ur() * h_prev + m.br());
  cell.g = (m.Wh() * x + m.Uh() * (cell.r.cwiseProduct(h_prev)) + m.bh()).array().tanh();
  cell.h = (1.0 - cell.z.array()) * h_prev.array() + cell.z.array() * cell.g.array();
  return cell;
}

}  // namespace

VectorXd gru_step(const GruClassifier& g, const VectorXd& x, const VectorXd& h_prev) {
  require(x.size() == g.input_dim, Errc::dim_mismatch, "gru_step: input dim mismatch");
  require(h_prev.size() == g.hidden, Errc::dim_mismatch, "gru_step: hidden dim mismatch");
  return gru_cell(g, x, h_prev).h;
}

VectorXd gru_classify(const GruClassifier& g, const std::vector<Descriptor>& seq) {
  require(!seq.empty(), Errc::empty_sequence, "gru_classify: empty sequence");
  VectorXd h = VectorXd::Zero(g.hidden);
  for (const auto& d : seq) {
    require(d.dim() == g.input_dim, Errc::dim_mismatch, "gru_classify: descriptor dim mismatch");
    h = gru_cell(g, to_eigen(d), h).h;
  }
  return softmax(g.V() * h + g.c());
}

namespace {

int argmax(const VectorXd& p) {
  Eigen::Index i = 0;
  p.maxCoeff(&i);
  return int(i);
}

}  // namespace

int predict(const SoftmaxHead& head, const Descriptor& d) {
  return argmax(softmax_forward(head, d));
}
int predict(const GruClassifier& g, const std::vector<Descriptor>& seq) {
  return argmax(gru_classify(g, seq));
}

// --------------------------------------------------------------------------
// loss and gradients
// --------------------------------------------------------------------------

namespace {

// stable -log softmax(logits)[label], plus dlogits = p - onehot
double cross_entropy(const VectorXd& logits, int label, VectorXd& dlogits) {
  const double m = logits.maxCoeff();
  const VectorXd e = (logits.array() - m).exp();
  const double sum = e.sum();
  dlogits = e / sum;
  const double loss = std::log(sum) - (logits[label] - m);
  dlogits[label] -= 1.0;
  return loss;
}

}  // namespace

double softmax_loss_grad(const SoftmaxHead& head, const Descriptor& d, int label,
                         VectorXd* grad) {
  require(label >= 0 && label < head.num_classes, Errc::bad_config, "loss: label out of range");
  const VectorXd x = to_eigen(d);
  require(x.size() == head.input_dim, Errc::dim_mismatch, "loss: descriptor dim mismatch");
  VectorXd dlogits;
  const double loss = cross_entropy(head.W() * x + head.b(), label, dlogits);
  if (grad) {
    grad->setZero(head.param_count());
    const int C = head.num_classes, D = head.input_dim;
    Map<MatrixXd>(grad->data(), C, D) = dlogits * x.transpose();
    Map<VectorXd>(grad->data() + Eigen::Index(C) * D, C) = dlogits;
  }
  return loss;
}

double gru_loss_grad(const GruClassifier& g, const std::vector<Descriptor>& seq, int label,
                     VectorXd* grad) {
  require(!seq.empty(), Errc::empty_sequence, "gru loss: empty sequence");
  require(label >= 0 && label < g.num_classes, Errc::bad_config, "loss: label out of range");
  const int T = int(seq.size());
  const int H = g.hidden, D = g.input_dim, C = g.num_classes;

  std::vector<VectorXd> xs(static_cast<size_t>(T));
  std::vector<GruCell> cells(static_cast<size_t>(T));
  std::vector<VectorXd> hs(static_cast<size_t>(T) + 1);
  hs[0] = VectorXd::Zero(H);
  for (int t = 0; t < T; ++t) {
    xs[size_t(t)] = to_eigen(seq[size_t(t)]);
    require(xs[size_t(t)].size() == D, Errc::dim_mismatch, "gru loss: descriptor dim mismatch");
    cells[size_t(t)] = gru_cell(g, xs[size_t(t)], hs[size_t(t)]);
    hs[size_t(t) + 1] = cells[size_t(t)].h;
  }

  VectorXd dlogits;
  const double loss = cross_entropy(g.V() * hs[size_t(T)] + g.c(), label, dlogits);
  if (!grad) return loss;

  const GruLayout L = gru_layout(H, D, C);
  grad->setZero(L.total);
  auto mat = [&](Eigen::Index off, int rows, int cols) {
    return Map<MatrixXd>(grad->data() + off, rows, cols);
  };
  auto vec = [&](Eigen::Index off, int n) { return Map<VectorXd>(grad->data() + off, n); };

  mat(L.v, C, H) = dlogits * hs[size_t(T)].transpose();
  vec(L.c, C) = dlogits;

  VectorXd dh = g.V().transpose() * dlogits;
  for (int t = T - 1; t >= 0; --t) {
    const auto& cell = cells[size_t(t)];
    const VectorXd& h_prev = hs[size_t(t)];
    const VectorXd dz =
        dh.array() * (cell.g - h_prev).array() * cell.z.array() * (1.0 - cell.z.array());
    const VectorXd dg = dh.array() * cell.z.array() * (1.0 - cell.g.array().square());
    const VectorXd uh_dg = g.Uh().transpose() * dg;
    const VectorXd dr = uh_dg.array() * h_prev.array() * cell.r.array() * (1.0 - cell.r.array());

    mat(L.wh, H, D) += dg * xs[size_t(t)].transpose();
    mat(L.uh, H, H) += dg * cell.r.cwiseProduct(h_prev).transpose();
    vec(L.bh, H) += dg;
    mat(L.wr, H, D) += dr * xs[size_t(t)].transpose();
    mat(L.ur, H, H) += dr * h_prev.transpose();
    vec(L.br, H) += dr;
    mat(L.wz, H, D) += dz * xs[size_t(t)].transpose();
    mat(L.uz, H, H) += dz * h_prev.transpose();
    vec(L.bz, H) += dz;

    dh = (dh.array() * (1.0 - cell.z.array())).matrix() + g.Uz().transpose() * dz +
         g.Ur().transpose() * dr + uh_dg.cwiseProduct(cell.r);
  }
  return loss;
}

// --------------------------------------------------------------------------
// initialization and training
// --------------------------------------------------------------------------

namespace {

void fill_uniform(Map<MatrixXd> block, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < block.cols(); ++j)
    for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = rng.uniform(-bound, bound);
}

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, Eigen::Index n) : cfg_(cfg) {
    if (cfg.optimizer == OptimizerKind::Adam) {
      m_ = VectorXd::Zero(n);
      v_ = VectorXd::Zero(n);
    }
  }

  void step(VectorXd& theta, const VectorXd& grad) {
    if (cfg_.optimizer == OptimizerKind::Sgd) {
      theta -= cfg_.learning_rate * grad;
      return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    m_ = beta1 * m_ + (1.0 - beta1) * grad;
    v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double bias1 = 1.0 - std::pow(beta1, t_);
    const double bias2 = 1.0 - std::pow(beta2, t_);
    theta.array() -=
        cfg_.learning_rate * (m_.array() / bias1) / ((v_.array() / bias2).sqrt() + eps);
  }

 private:
  TrainConfig cfg_;
  VectorXd m_, v_;
  int t_ = 0;
};

template <typename Sample, typename LossGrad>
TrainCurve run_training(VectorXd& theta, const std::vector<Sample>& data, const TrainConfig& cfg,
                        LossGrad&& loss_grad) {
  require(!data.empty(), Errc::bad_config, "train: empty dataset");
  std::set<int> classes;
  for (const auto& s : data) classes.insert(s.label);
  require(classes.size() >= 2, Errc::single_class_data, "train: need at least two classes");
  require(cfg.epochs >= 0 && cfg.batch_size >= 1 && cfg.learning_rate > 0 && cfg.l2 >= 0,
          Errc::bad_config, "train: bad config");

  TrainCurve curve;
  Optimizer opt(cfg, theta.size());
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  VectorXd grad(theta.size()), sample_grad(theta.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", epoch));
    shuffle(order, shuffle_rng);

    double ce_sum = 0.0;
    for (size_t begin = 0; begin < order.size(); begin += size_t(cfg.batch_size)) {
      const size_t end = std::min(order.size(), begin + size_t(cfg.batch_size));
      grad.setZero();
      for (size_t i = begin; i < end; ++i) {
        ce_sum += loss_grad(data[order[i]], &sample_grad);
        grad += sample_grad;
      }
      grad /= double(end - begin);
      if (cfg.l2 > 0.0) grad += 2.0 * cfg.l2 * theta;
      opt.step(theta, grad);
    }
    const double epoch_loss = ce_sum / double(data.size()) + cfg.l2 * theta.squaredNorm();
    require(std::isfinite(epoch_loss), Errc::numeric_failure, "train: loss diverged");
    curve.epoch_loss.push_back(epoch_loss);
  }
  return curve;
}

}  // namespace

SoftmaxHead init_softmax(int classes, int dim, uint64_t seed) {
  SoftmaxHead head = SoftmaxHead::zeros(classes, dim);
  Rng rng(derive_seed(seed, "init-softmax"));
  fill_uniform(head.W(), 1.0 / std::sqrt(double(dim)), rng);
  // biases stay zero
  return head;
}

GruClassifier init_gru(int hidden, int dim, int classes, uint64_t seed) {
  GruClassifier g = GruClassifier::zeros(hidden, dim, classes);
  Rng rng(derive_seed(seed, "init-gru"));
  const GruLayout L = gru_layout(hidden, dim, classes);
  auto block = [&](Eigen::Index off, int rows, int cols, double bound) {
    fill_uniform(Map<MatrixXd>(g.theta.data() + off, rows, cols), bound, rng);
  };
  const double bx = 1.0 / std::sqrt(double(dim));
  const double bh = 1.0 / std::sqrt(double(hidden));
  block(L.wz, hidden, dim, bx);
  block(L.wr, hidden, dim, bx);
  block(L.wh, hidden, dim, bx);
  block(L.uz, hidden, hidden, bh);
  block(L.ur, hidden, hidden, bh);
  block(L.uh, hidden, hidden, bh);
  block(L.v, classes, hidden, bh);
  return g;
}

TrainCurve train(SoftmaxHead& head, const std::vector<LabeledDescriptor>& data,
                 const TrainConfig& cfg) {
  return run_training(head.theta, data, cfg, [&](const LabeledDescriptor& s, VectorXd* grad) {
    return softmax_loss_grad(head, s.descriptor, s.label, grad);
  });
}

TrainCurve train(GruClassifier& g, const std::vector<LabeledSequence>& data,
                 const TrainConfig& cfg) {
  return run_training(g.theta, data, cfg, [&](const LabeledSequence& s, VectorXd* grad) {
    return gru_loss_grad(g, s.sequence, s.label, grad);
  });
}

TrainedSoftmax train_softmax_head(const std::vector<LabeledDescriptor>& data, int num_classes,
                                  const TrainConfig& cfg) {
  require(!data.empty(), Errc::bad_config, "train: empty dataset");
  TrainedSoftmax out{init_softmax(num_classes, data.front().descriptor.dim(), cfg.seed), {}};
  out.curve = train(out.model, data, cfg);
  return out;
}

TrainedGru train_gru_head(const std::vector<LabeledSequence>& data, int num_classes,
                          const TrainConfig& cfg) {
  require(!data.empty() && !data.front().sequence.empty(), Errc::bad_config,
          "train: empty dataset");
  TrainedGru out{
      init_gru(cfg.hidden, data.front().sequence.front().dim(), num_classes, cfg.seed), {}};
  out.curve = train(out.model, data, cfg);
  return out;
}

// --------------------------------------------------------------------------
// finite differences
// --------------------------------------------------------------------------

namespace {

template <typename Loss>
double max_rel_error(VectorXd& theta, const VectorXd& analytic, Loss&& loss) {
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = loss();
    theta[i] = saved - h;
    const double down = loss();
    theta[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max(1.0, std::abs(analytic[i]) + std::abs(numeric));
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace

double grad_check(const SoftmaxHead& head, const Descriptor& d, int label) {
  VectorXd analytic;
  softmax_loss_grad(head, d, label, &analytic);
  SoftmaxHead probe = head;
  return max_rel_error(probe.theta, analytic,
                       [&] { return softmax_loss_grad(probe, d, label, nullptr); });
}

double grad_check(const GruClassifier& g, const std::vector<Descriptor>& seq, int label) {
  VectorXd analytic;
  gru_loss_grad(g, seq, label, &analytic);
  GruClassifier probe = g;
  return max_rel_error(probe.theta, analytic,
                       [&] { return gru_loss_grad(probe, seq, label, nullptr); });
}

// --------------------------------------------------------------------------
// checkpoints
// --------------------------------------------------------------------------

namespace {

using nlohmann::json;

json cfg_to_json(const TrainConfig& cfg) {
  return {{"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"optimizer", cfg.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
          {"seed", cfg.seed},
          {"l2", cfg.l2},
          {"hidden", cfg.hidden}};
}

TrainConfig cfg_from_json(const json& j) {
  TrainConfig cfg;
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.optimizer = j.value("optimizer", "adam") == std::string("sgd") ? OptimizerKind::Sgd
                                                                     : OptimizerKind::Adam;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.l2 = j.value("l2", cfg.l2);
  cfg.hidden = j.value("hidden", cfg.hidden);
  return cfg;
}

size_t write_checkpoint_impl(const json& header, const VectorXd& theta, std::ostream& sink) {
  const std::string head = header.dump();
  sink.write("HED1", 4);
  const uint32_t len = uint32_t(head.size());
  sink.write(reinterpret_cast<const char*>(&len), 4);
  sink.write(head.data(), std::streamsize(head.size()));
  std::vector<float> params(static_cast<size_t>(theta.size()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) params[size_t(i)] = float(theta[i]);
  sink.write(reinterpret_cast<const char*>(params.data()), std::streamsize(params.size() * 4));
  require(bool(sink), Errc::io_failure, "checkpoint: write failure");
  return 8 + head.size() + params.size() * 4;
}

}  // namespace

size_t write_checkpoint(const SoftmaxHead& head, const std::vector<std::string>& labels,
                        const TrainConfig& cfg, std::ostream& sink) {
  json header = {{"arch", "softmax"},
                 {"classes", head.num_classes},
                 {"dim", head.input_dim},
                 {"labels", labels},
                 {"train", cfg_to_json(cfg)}};
  return write_checkpoint_impl(header, head.theta, sink);
}

size_t write_checkpoint(const GruClassifier& g, const std::vector<std::string>& labels,
                        const TrainConfig& cfg, std::ostream& sink) {
  json header = {{"arch", "gru"},       {"classes", g.num_classes}, {"dim", g.input_dim},
                 {"hidden", g.hidden},  {"labels", labels},         {"train", cfg_to_json(cfg)}};
  return write_checkpoint_impl(header, g.theta, sink);
}

Checkpoint read_checkpoint(std::istream& source) {
  char magic[4] = {};
  source.read(magic, 4);
  require(source.gcount() == 4 && std::memcmp(magic, "HED1", 4) == 0, Errc::bad_magic,
          "checkpoint: bad magic");
  uint32_t len = 0;
  source.read(reinterpret_cast<char*>(&len), 4);
  require(bool(source), Errc::truncated_payload, "checkpoint: truncated header length");
  std::string head(len, '\0');
  source.read(head.data(), std::streamsize(len));
  require(size_t(source.gcount()) == len, Errc::truncated_payload,
          "checkpoint: truncated header");
  json j = json::parse(head, nullptr, false);
  require(!j.is_discarded(), Errc::io_failure, "checkpoint: invalid JSON header");

  Checkpoint ck;
  ck.arch = j.at("arch");
  ck.labels = j.at("labels").get<std::vector<std::string>>();
  ck.cfg = cfg_from_json(j.at("train"));

  Eigen::Index n = 0;
  if (ck.arch == "softmax") {
    ck.softmax = SoftmaxHead::zeros(j.at("classes"), j.at("dim"));
    n = ck.softmax.param_count();
  } else if (ck.arch == "gru") {
    ck.gru = GruClassifier::zeros(j.at("hidden"), j.at("dim"), j.at("classes"));
    n = ck.gru.param_count();
  } else {
    fail(Errc::bad_config, "checkpoint: unknown arch '" + ck.arch + "'");
  }

  std::vector<float> params(static_cast<size_t>(n));
  source.read(reinterpret_cast<char*>(params.data()), std::streamsize(params.size() * 4));
  require(size_t(source.gcount()) == params.size() * 4, Errc::truncated_payload,
          "checkpoint: truncated parameters");
  VectorXd& theta = ck.arch == "softmax" ? ck.softmax.theta : ck.gru.theta;
  for (Eigen::Index i = 0; i < n; ++i) theta[i] = double(params[size_t(i)]);
  return ck;
}

void save_checkpoint(const SoftmaxHead& head, const std::vector<std::string>& labels,
                     const TrainConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), Errc::io_failure, "checkpoint: cannot open " + path.string());
  write_checkpoint(head, labels, cfg, out);
}

void save_checkpoint(const GruClassifier& g, const std::vector<std::string>& labels,
                     const TrainConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), Errc::io_failure, "checkpoint: cannot open " + path.string());
  write_checkpoint(g, labels, cfg, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), Errc::io_failure, "checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace stepgrid
