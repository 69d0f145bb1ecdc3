#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "stepgrid/embed.hpp"
#include "stepgrid/heads.hpp"
#include "stepgrid/preproc.hpp"
#include "stepgrid/synth.hpp"
#include "stepgrid/transform.hpp"

using namespace stepgrid;
using Eigen::VectorXd;

namespace {

Descriptor make_descriptor(const std::vector<double>& v) {
  Descriptor d;
  for (double x : v) d.values.push_back(float(x));
  return d;
}

Descriptor random_descriptor(Rng& rng, int dim, double lo = -1.0, double hi = 1.0) {
  Descriptor d;
  for (int i = 0; i < dim; ++i) d.values.push_back(float(rng.uniform(lo, hi)));
  return d;
}

GruClassifier random_gru(Rng& rng, int H, int D, int C, double scale = 0.5) {
  GruClassifier g = GruClassifier::zeros(H, D, C);
  for (Eigen::Index i = 0; i < g.theta.size(); ++i) g.theta[i] = rng.uniform(-scale, scale);
  return g;
}

}  // namespace

TEST_CASE("softmax_forward: zero parameters give the uniform distribution") {
  const SoftmaxHead head = SoftmaxHead::zeros(13, 8);
  const auto p = softmax_forward(head, make_descriptor(std::vector<double>(8, 0.3)));
  for (int k = 0; k < 13; ++k) CHECK(p[k] == doctest::Approx(1.0 / 13).epsilon(1e-12));
  CHECK(std::abs(p.sum() - 1.0) < 1e-12);
}

TEST_CASE("softmax_forward: logits (1000, 0) do not overflow") {
  SoftmaxHead head = SoftmaxHead::zeros(2, 1);
  head.W()(0, 0) = 1000.0;
  head.W()(1, 0) = 0.0;
  const auto p = softmax_forward(head, make_descriptor({1.0}));
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("softmax_forward: matches the naive formula at small magnitudes") {
  Rng rng(3);
  for (int it = 0; it < 500; ++it) {
    const int C = 2 + int(rng.below(6)), D = 1 + int(rng.below(8));
    SoftmaxHead head = SoftmaxHead::zeros(C, D);
    for (Eigen::Index i = 0; i < head.theta.size(); ++i) head.theta[i] = rng.uniform(-1, 1);
    const auto d = random_descriptor(rng, D);
    const VectorXd logits = head.W() * to_eigen(d) + head.b();
    std::vector<double> raw(logits.data(), logits.data() + C);
    const auto want = oracle::naive_softmax(raw);
    const auto got = softmax_forward(head, d);
    CHECK(std::abs(got.sum() - 1.0) < 1e-12);
    for (int k = 0; k < C; ++k) CHECK(std::abs(got[k] - want[size_t(k)]) < 1e-12);
  }
}

TEST_CASE("softmax_forward: permutation equivariant in the class rows") {
  Rng rng(5);
  const int C = 5, D = 7;
  SoftmaxHead head = SoftmaxHead::zeros(C, D);
  for (Eigen::Index i = 0; i < head.theta.size(); ++i) head.theta[i] = rng.uniform(-1, 1);
  const auto d = random_descriptor(rng, D);
  const auto p = softmax_forward(head, d);

  const std::vector<int> perm{3, 0, 4, 1, 2};
  SoftmaxHead permuted = SoftmaxHead::zeros(C, D);
  for (int k = 0; k < C; ++k) {
    permuted.W().row(k) = head.W().row(perm[size_t(k)]);
    permuted.b()[k] = head.b()[perm[size_t(k)]];
  }
  const auto q = softmax_forward(permuted, d);
  for (int k = 0; k < C; ++k) CHECK(q[k] == doctest::Approx(p[perm[size_t(k)]]).epsilon(1e-15));
}

TEST_CASE("gru_step: zero parameters and zero state stay at zero") {
  const GruClassifier g = GruClassifier::zeros(4, 3, 2);
  const VectorXd h = gru_step(g, VectorXd::Zero(3), VectorXd::Zero(4));
  // z = r = 0.5 and the candidate is tanh(0) = 0
  for (int i = 0; i < 4; ++i) CHECK(h[i] == 0.0);
}

TEST_CASE("gru_step: saturated update gate copies the candidate") {
  Rng rng(7);
  GruClassifier open = random_gru(rng, 6, 5, 2, 0.4);
  // push bz very high: z -> 1, so h' -> h~
  open.bz().setConstant(50.0);

  const VectorXd x = to_eigen(random_descriptor(rng, 5));
  const VectorXd h_prev = VectorXd::Constant(6, 0.3);
  const VectorXd h = gru_step(open, x, h_prev);

  const VectorXd r = (1.0 / (1.0 + (-(open.Wr() * x + open.Ur() * h_prev + open.br())).array().exp()))
                         .matrix();
  const VectorXd cand =
      (open.Wh() * x + open.Uh() * r.cwiseProduct(h_prev) + open.bh()).array().tanh();
  for (int i = 0; i < 6; ++i) CHECK(h[i] == doctest::Approx(cand[i]).epsilon(1e-12));
}

TEST_CASE("gru_step: stays in (-1, 1) when the previous state does") {
  Rng rng(9);
  for (int it = 0; it < 200; ++it) {
    GruClassifier g = random_gru(rng, 5, 4, 2, 2.0);
    VectorXd h = VectorXd::Zero(5);
    for (int t = 0; t < 10; ++t) {
      h = gru_step(g, to_eigen(random_descriptor(rng, 4)), h);
      for (int i = 0; i < 5; ++i) {
        CHECK(h[i] > -1.0);
        CHECK(h[i] < 1.0);
      }
    }
  }
}

TEST_CASE("gru_step: matches the scalar reference on 1000 random instances") {
  Rng rng(11);
  for (int it = 0; it < 1000; ++it) {
    const int H = 1 + int(rng.below(6)), D = 1 + int(rng.below(5));
    GruClassifier g = random_gru(rng, H, D, 2, 1.0);

    oracle::ScalarGru ref;
    ref.H = H;
    ref.D = D;
    auto copy_mat = [&](Eigen::Map<const Eigen::MatrixXd> m, std::vector<double>& dst) {
      dst.resize(size_t(m.rows()) * size_t(m.cols()));
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) dst[size_t(r) * size_t(m.cols()) + size_t(c)] = m(r, c);
    };
    auto copy_vec = [&](Eigen::Map<const Eigen::VectorXd> v, std::vector<double>& dst) {
      dst.assign(v.data(), v.data() + v.size());
    };
    copy_mat(g.Wz(), ref.Wz);
    copy_mat(g.Wr(), ref.Wr);
    copy_mat(g.Wh(), ref.Wh);
    copy_mat(g.Uz(), ref.Uz);
    copy_mat(g.Ur(), ref.Ur);
    copy_mat(g.Uh(), ref.Uh);
    copy_vec(g.bz(), ref.bz);
    copy_vec(g.br(), ref.br);
    copy_vec(g.bh(), ref.bh);

    std::vector<double> x(size_t(D)), h(size_t(H));
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : h) v = rng.uniform(-0.9, 0.9);
    const VectorXd got =
        gru_step(g, Eigen::Map<const VectorXd>(x.data(), D), Eigen::Map<const VectorXd>(h.data(), H));
    const auto want = oracle::gru_step(ref, x, h);
    for (int i = 0; i < H; ++i) CHECK(std::abs(got[i] - want[size_t(i)]) < 1e-10);
  }
}

TEST_CASE("gru_classify: base cases") {
  Rng rng(13);
  GruClassifier g = random_gru(rng, 4, 3, 5);

  SUBCASE("length-1 sequence equals one step plus readout") {
    const auto d = random_descriptor(rng, 3);
    const VectorXd h = gru_step(g, to_eigen(d), VectorXd::Zero(4));
    const VectorXd want = softmax(g.V() * h + g.c());
    const VectorXd got = gru_classify(g, {d});
    for (int k = 0; k < 5; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-15));
  }
  SUBCASE("zero model reads out the uniform distribution") {
    const GruClassifier zero = GruClassifier::zeros(4, 3, 5);
    const VectorXd p = gru_classify(zero, {random_descriptor(rng, 3)});
    for (int k = 0; k < 5; ++k) CHECK(p[k] == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("empty sequence is rejected") {
    try {
      gru_classify(g, {});
      FAIL("expected empty-sequence error");
    } catch (const Error& e) {
      CHECK(e.errc() == Errc::empty_sequence);
    }
  }
  SUBCASE("reversing a non-palindromic sequence changes the readout") {
    std::vector<Descriptor> seq;
    for (int t = 0; t < 6; ++t) seq.push_back(random_descriptor(rng, 3));
    std::vector<Descriptor> rev(seq.rbegin(), seq.rend());
    const VectorXd a = gru_classify(g, seq);
    const VectorXd b = gru_classify(g, rev);
    CHECK((a - b).cwiseAbs().maxCoeff() > 1e-12);
  }
}

TEST_CASE("grad_check: softmax head under 1e-6") {
  Rng rng(17);
  for (int it = 0; it < 20; ++it) {
    const int C = 2 + int(rng.below(8)), D = 1 + int(rng.below(16));
    SoftmaxHead head = init_softmax(C, D, rng.next_u64());
    const auto d = random_descriptor(rng, D);
    const int label = int(rng.below(uint64_t(C)));
    CHECK(grad_check(head, d, label) < 1e-6);
  }
}

TEST_CASE("grad_check: gru classifier under 1e-4") {
  Rng rng(19);
  for (int it = 0; it < 5; ++it) {
    GruClassifier g = random_gru(rng, 8, 16, 3, 0.6);
    std::vector<Descriptor> seq;
    for (int t = 0; t < 5; ++t) seq.push_back(random_descriptor(rng, 16));
    const int label = int(rng.below(3));
    CHECK(grad_check(g, seq, label) < 1e-4);
  }
}

TEST_CASE("grad_check: structurally zero directions are zero both ways") {
  // a zero descriptor removes W from every path, so its block must carry
  // zero analytic and numeric gradient
  SoftmaxHead head = init_softmax(4, 6, 123);
  const Descriptor zero = make_descriptor(std::vector<double>(6, 0.0));
  VectorXd analytic;
  softmax_loss_grad(head, zero, 2, &analytic);
  for (Eigen::Index i = 0; i < 4 * 6; ++i) CHECK(std::abs(analytic[i]) < 1e-12);

  SoftmaxHead probe = head;
  constexpr double h = 1e-5;
  for (Eigen::Index i = 0; i < 8; ++i) {  // spot-check a few W entries
    const double saved = probe.theta[i];
    probe.theta[i] = saved + h;
    const double up = softmax_loss_grad(probe, zero, 2, nullptr);
    probe.theta[i] = saved - h;
    const double down = softmax_loss_grad(probe, zero, 2, nullptr);
    probe.theta[i] = saved;
    CHECK(std::abs((up - down) / (2 * h)) < 1e-12);
  }
  CHECK(grad_check(head, zero, 2) < 1e-12);
}

TEST_CASE("train: linearly separable two-class set reaches accuracy 1.0") {
  Rng rng(23);
  std::vector<LabeledDescriptor> data;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2;
    Descriptor d = random_descriptor(rng, 4, -0.2, 0.2);
    d.values[0] += label == 0 ? -1.0f : 1.0f;
    data.push_back({d, label});
  }
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 8;
  cfg.seed = 1;
  const auto trained = train_softmax_head(data, 2, cfg);
  int correct = 0;
  for (const auto& s : data) correct += predict(trained.model, s.descriptor) == s.label;
  CHECK(correct == 40);
  CHECK(trained.curve.epoch_loss.back() < trained.curve.epoch_loss.front());
}

TEST_CASE("train: zero epochs returns the initialization untouched") {
  Rng rng(29);
  std::vector<LabeledDescriptor> data;
  for (int i = 0; i < 10; ++i) data.push_back({random_descriptor(rng, 5), i % 2});
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 42;
  const auto trained = train_softmax_head(data, 2, cfg);
  const SoftmaxHead init = init_softmax(2, 5, 42);
  CHECK(trained.model.theta == init.theta);
  CHECK(trained.curve.epoch_loss.empty());
}

TEST_CASE("train: single-class data is rejected") {
  Rng rng(31);
  std::vector<LabeledDescriptor> data;
  for (int i = 0; i < 6; ++i) data.push_back({random_descriptor(rng, 3), 0});
  TrainConfig cfg;
  try {
    train_softmax_head(data, 2, cfg);
    FAIL("expected single-class error");
  } catch (const Error& e) {
    CHECK(e.errc() == Errc::single_class_data);
  }
}

TEST_CASE("train: bit-deterministic given data order and seed") {
  Rng rng(37);
  std::vector<LabeledDescriptor> data;
  for (int i = 0; i < 30; ++i) data.push_back({random_descriptor(rng, 6), i % 3});
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 9;
  const auto a = train_softmax_head(data, 3, cfg);
  const auto b = train_softmax_head(data, 3, cfg);
  CHECK(a.model.theta == b.model.theta);
  CHECK(a.curve.epoch_loss == b.curve.epoch_loss);
}

TEST_CASE("train: gru separates temporal twins that averaging cannot") {
  // two subject pairs whose average frames coincide; the GRU sees order,
  // the softmax-on-average head cannot exceed pair-level chance
  GenConfig cfg;
  cfg.num_subjects = 4;
  cfg.sequences_per_subject = 6;
  cfg.steps_per_sequence = 2;
  cfg.noise_sigma = 0.0;
  cfg.seed = 99;
  const auto ds = generate_temporal_twin_dataset(cfg);

  const auto embedder = load_embedder({EmbedderKind::MockProjection, "", 24, 5, 32});
  const RenderConfig render{32};

  std::map<std::string, int> class_of;
  for (const auto& seq : ds.sequences) class_of.emplace(seq.subject_id, 0);
  int next = 0;
  for (auto& [label, idx] : class_of) idx = next++;

  std::vector<LabeledSequence> gru_data;
  std::vector<LabeledDescriptor> avg_data;
  for (const auto& seq : ds.sequences) {
    for (const auto& e : extract_steps(seq)) {
      StepSequence step = e.step;
      step.subject_id = seq.subject_id;
      const auto full = embed_step(*embedder, transform_step(step, Strategy::FullSequence, render));
      const auto avg = embed_step(*embedder, transform_step(step, Strategy::AverageFrame, render));
      gru_data.push_back({full.descriptors, class_of.at(seq.subject_id)});
      avg_data.push_back({avg.descriptors.front(), class_of.at(seq.subject_id)});
    }
  }
  REQUIRE(gru_data.size() >= 40);

  TrainConfig tc;
  tc.epochs = 80;
  tc.batch_size = 8;
  tc.hidden = 16;
  tc.seed = 7;
  const auto gru = train_gru_head(gru_data, 4, tc);
  int gru_correct = 0;
  for (const auto& s : gru_data) gru_correct += predict(gru.model, s.sequence) == s.label;
  CHECK(double(gru_correct) / double(gru_data.size()) > 0.95);

  const auto soft = train_softmax_head(avg_data, 4, tc);
  int soft_correct = 0;
  for (const auto& s : avg_data) soft_correct += predict(soft.model, s.descriptor) == s.label;
  CHECK(double(soft_correct) / double(avg_data.size()) <= 0.55);
}

TEST_CASE("checkpoints: round-trip both architectures") {
  Rng rng(41);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.hidden = 6;

  SUBCASE("softmax") {
    SoftmaxHead head = init_softmax(3, 5, 77);
    std::stringstream buf;
    write_checkpoint(head, {"a", "b", "c"}, cfg, buf);
    const Checkpoint ck = read_checkpoint(buf);
    CHECK(ck.arch == "softmax");
    CHECK(ck.labels == std::vector<std::string>{"a", "b", "c"});
    CHECK(ck.softmax.num_classes == 3);
    CHECK(ck.softmax.input_dim == 5);
    for (Eigen::Index i = 0; i < head.theta.size(); ++i)
      CHECK(ck.softmax.theta[i] == double(float(head.theta[i])));
  }
  SUBCASE("gru") {
    GruClassifier g = random_gru(rng, 6, 4, 3);
    std::stringstream buf;
    write_checkpoint(g, {"x", "y", "z"}, cfg, buf);
    const Checkpoint ck = read_checkpoint(buf);
    CHECK(ck.arch == "gru");
    CHECK(ck.gru.hidden == 6);
    CHECK(ck.gru.input_dim == 4);
    CHECK(ck.gru.num_classes == 3);
    for (Eigen::Index i = 0; i < g.theta.size(); ++i)
      CHECK(ck.gru.theta[i] == double(float(g.theta[i])));
  }
  SUBCASE("bad magic is rejected") {
    std::stringstream buf("NOPE");
    try {
      read_checkpoint(buf);
      FAIL("expected bad magic");
    } catch (const Error& e) {
      CHECK(e.errc() == Errc::bad_magic);
    }
  }
}
