#include "stepgrid/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "stepgrid/transform.hpp"

namespace stepgrid {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_power_of_two(size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::vector<double> haar_fwt_1d(const std::vector<double>& x) {
  require(is_power_of_two(x.size()), Errc::bad_range, "haar fwt: length must be a power of two");
  std::vector<double> out = x;
  std::vector<double> tmp(x.size());
  for (size_t len = out.size(); len >= 2; len /= 2) {
    for (size_t i = 0; i < len / 2; ++i) {
      tmp[i] = (out[2 * i] + out[2 * i + 1]) * kInvSqrt2;
      tmp[len / 2 + i] = (out[2 * i] - out[2 * i + 1]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.begin() + std::ptrdiff_t(len), out.begin());
  }
  return out;
}

std::vector<double> haar_ifwt_1d(const std::vector<double>& coeffs) {
  require(is_power_of_two(coeffs.size()), Errc::bad_range,
          "haar ifwt: length must be a power of two");
  std::vector<double> out = coeffs;
  std::vector<double> tmp(coeffs.size());
  for (size_t len = 2; len <= out.size(); len *= 2) {
    for (size_t i = 0; i < len / 2; ++i) {
      tmp[2 * i] = (out[i] + out[len / 2 + i]) * kInvSqrt2;
      tmp[2 * i + 1] = (out[i] - out[len / 2 + i]) * kInvSqrt2;
    }
    std::copy(tmp.begin(), tmp.begin() + std::ptrdiff_t(len), out.begin());
  }
  return out;
}

// --------------------------------------------------------------------------
// wavelet descriptor
// --------------------------------------------------------------------------

namespace {

constexpr int kCube = 16;       // resampled frames, rows, cols
constexpr int kCorner = 4;      // spatial low-pass corner kept in full
constexpr int kTopCount = 80;   // largest-magnitude coefficients kept besides

}  // namespace

WaveletDescriptor wavelet_descriptor(const StepSequence& step) {
  require(step.valid(), Errc::bad_config, "wavelet descriptor: invalid step");

  // (a) spatial resample of each frame to 16x16
  std::vector<PressureFrame> spatial;
  spatial.reserve(step.frames.size());
  for (const auto& f : step.frames) spatial.push_back(resize_bilinear(f, kCube, kCube));

  // (b) temporal resample to 16 frames by linear interpolation
  const int T = int(spatial.size());
  std::vector<double> cube(size_t(kCube) * kCube * kCube);
  auto at = [&cube](int t, int r, int c) -> double& {
    return cube[(size_t(t) * kCube + size_t(r)) * kCube + size_t(c)];
  };
  for (int t = 0; t < kCube; ++t) {
    double src = (t + 0.5) * double(T) / kCube - 0.5;
    src = std::clamp(src, 0.0, double(T - 1));
    const int lo = int(std::floor(src));
    const int hi = std::min(lo + 1, T - 1);
    const double frac = src - lo;
    for (int r = 0; r < kCube; ++r)
      for (int c = 0; c < kCube; ++c)
        at(t, r, c) = (1.0 - frac) * double(spatial[size_t(lo)].at(r, c)) +
                      frac * double(spatial[size_t(hi)].at(r, c));
  }

  // (c) separable Haar: rows and columns of each frame, then time
  std::vector<double> line(kCube);
  for (int t = 0; t < kCube; ++t) {
    for (int r = 0; r < kCube; ++r) {
      for (int c = 0; c < kCube; ++c) line[size_t(c)] = at(t, r, c);
      const auto coef = haar_fwt_1d(line);
      for (int c = 0; c < kCube; ++c) at(t, r, c) = coef[size_t(c)];
    }
    for (int c = 0; c < kCube; ++c) {
      for (int r = 0; r < kCube; ++r) line[size_t(r)] = at(t, r, c);
      const auto coef = haar_fwt_1d(line);
      for (int r = 0; r < kCube; ++r) at(t, r, c) = coef[size_t(r)];
    }
  }
  for (int r = 0; r < kCube; ++r)
    for (int c = 0; c < kCube; ++c) {
      for (int t = 0; t < kCube; ++t) line[size_t(t)] = at(t, r, c);
      const auto coef = haar_fwt_1d(line);
      for (int t = 0; t < kCube; ++t) at(t, r, c) = coef[size_t(t)];
    }

  // (d) low-pass corner + the 80 largest remaining magnitudes
  WaveletDescriptor d;
  d.step_id = step.step_id;
  d.label = step.subject_id;
  d.values.reserve(WaveletDescriptor::kDim);
  for (int t = 0; t < kCube; ++t)
    for (int r = 0; r < kCorner; ++r)
      for (int c = 0; c < kCorner; ++c) d.values.push_back(at(t, r, c));

  std::vector<int> rest;
  rest.reserve(size_t(kCube) * kCube * kCube - size_t(kCube) * kCorner * kCorner);
  for (int t = 0; t < kCube; ++t)
    for (int r = 0; r < kCube; ++r)
      for (int c = 0; c < kCube; ++c)
        if (r >= kCorner || c >= kCorner) rest.push_back((t * kCube + r) * kCube + c);
  std::partial_sort(rest.begin(), rest.begin() + kTopCount, rest.end(), [&](int a, int b) {
    const double ma = std::abs(cube[size_t(a)]), mb = std::abs(cube[size_t(b)]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  std::sort(rest.begin(), rest.begin() + kTopCount);  // fixed, index-ascending order
  for (int i = 0; i < kTopCount; ++i) d.values.push_back(cube[size_t(rest[size_t(i)])]);
  return d;
}

// --------------------------------------------------------------------------
// quadratic-kernel SVM, SMO dual ascent
// --------------------------------------------------------------------------

double quadratic_kernel(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), Errc::dim_mismatch, "kernel: dimension mismatch");
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  return (dot + 1.0) * (dot + 1.0);
}

namespace {

struct PairProblem {
  std::vector<const std::vector<double>*> x;
  std::vector<double> y;  // +1 / -1
};

struct PairSolution {
  std::vector<double> alpha;
  double bias = 0.0;
};

// Maximal-violating-pair SMO on min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0.
PairSolution solve_pair(const PairProblem& prob, double c_reg, double eps, int max_passes) {
  const int n = int(prob.x.size());
  std::vector<double> K(size_t(n) * size_t(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      K[size_t(i) * size_t(n) + size_t(j)] = K[size_t(j) * size_t(n) + size_t(i)] =
          quadratic_kernel(*prob.x[size_t(i)], *prob.x[size_t(j)]);
  auto q = [&](int i, int j) {
    return prob.y[size_t(i)] * prob.y[size_t(j)] * K[size_t(i) * size_t(n) + size_t(j)];
  };

  std::vector<double> alpha(size_t(n), 0.0);
  std::vector<double> grad(size_t(n), -1.0);  // G_i = sum_j Q_ij a_j - 1

  auto in_up = [&](int i) {
    return prob.y[size_t(i)] > 0 ? alpha[size_t(i)] < c_reg : alpha[size_t(i)] > 0;
  };
  auto in_low = [&](int i) {
    return prob.y[size_t(i)] > 0 ? alpha[size_t(i)] > 0 : alpha[size_t(i)] < c_reg;
  };

  int passes = 0;
  double m_up = 0.0, m_low = 0.0;
  while (true) {
    require(passes++ < max_passes, Errc::non_convergence,
            "svm: SMO did not reach the KKT tolerance within the iteration cap");

    // select the maximal violating pair
    int i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const double s = -prob.y[size_t(k)] * grad[size_t(k)];
      if (in_up(k) && s > m_up) {
        m_up = s;
        i = k;
      }
      if (in_low(k) && s < m_low) {
        m_low = s;
        j = k;
      }
    }
    if (i < 0 || j < 0 || m_up - m_low <= eps) break;

    // two-variable subproblem; K_ii + K_jj - 2 K_ij covers both sign cases
    const double yi = prob.y[size_t(i)], yj = prob.y[size_t(j)];
    double quad = K[size_t(i) * size_t(n) + size_t(i)] + K[size_t(j) * size_t(n) + size_t(j)] -
                  2.0 * K[size_t(i) * size_t(n) + size_t(j)];
    if (quad <= 0) quad = 1e-12;

    const double old_ai = alpha[size_t(i)], old_aj = alpha[size_t(j)];
    if (yi != yj) {
      const double delta = (-grad[size_t(i)] - grad[size_t(j)]) / quad;
      const double diff = old_ai - old_aj;
      alpha[size_t(i)] += delta;
      alpha[size_t(j)] += delta;
      if (diff > 0 && alpha[size_t(j)] < 0) {
        alpha[size_t(j)] = 0;
        alpha[size_t(i)] = diff;
      } else if (diff <= 0 && alpha[size_t(i)] < 0) {
        alpha[size_t(i)] = 0;
        alpha[size_t(j)] = -diff;
      }
      if (diff > 0 && alpha[size_t(i)] > c_reg) {
        alpha[size_t(i)] = c_reg;
        alpha[size_t(j)] = c_reg - diff;
      } else if (diff <= 0 && alpha[size_t(j)] > c_reg) {
        alpha[size_t(j)] = c_reg;
        alpha[size_t(i)] = c_reg + diff;
      }
    } else {
      const double delta = (grad[size_t(i)] - grad[size_t(j)]) / quad;
      const double sum = old_ai + old_aj;
      alpha[size_t(i)] -= delta;
      alpha[size_t(j)] += delta;
      if (alpha[size_t(i)] > c_reg) {
        alpha[size_t(i)] = c_reg;
        alpha[size_t(j)] = sum - c_reg;
      } else if (alpha[size_t(j)] > c_reg) {
        alpha[size_t(j)] = c_reg;
        alpha[size_t(i)] = sum - c_reg;
      }
      if (alpha[size_t(i)] < 0) {
        alpha[size_t(i)] = 0;
        alpha[size_t(j)] = sum;
      } else if (alpha[size_t(j)] < 0) {
        alpha[size_t(j)] = 0;
        alpha[size_t(i)] = sum;
      }
    }

    const double dai = alpha[size_t(i)] - old_ai;
    const double daj = alpha[size_t(j)] - old_aj;
    if (dai == 0.0 && daj == 0.0) break;  // numerically stuck at the boundary
    for (int k = 0; k < n; ++k) grad[size_t(k)] += q(k, i) * dai + q(k, j) * daj;
  }

  PairSolution sol;
  sol.alpha = std::move(alpha);
  // bias from the free vectors when present, else the midpoint of the bounds
  double free_sum = 0.0;
  int free_count = 0;
  for (int k = 0; k < n; ++k)
    if (sol.alpha[size_t(k)] > 0 && sol.alpha[size_t(k)] < c_reg) {
      free_sum += -prob.y[size_t(k)] * grad[size_t(k)];
      ++free_count;
    }
  sol.bias = free_count > 0 ? free_sum / free_count : (m_up + m_low) / 2.0;
  return sol;
}

}  // namespace

SvmModel svm_train(const std::vector<WaveletDescriptor>& data, const SvmTrainOptions& opts) {
  require(!data.empty(), Errc::bad_config, "svm_train: empty dataset");
  require(opts.c_reg > 0, Errc::bad_config, "svm_train: C must be positive");
  const size_t dim = data.front().values.size();
  for (const auto& d : data)
    require(d.values.size() == dim, Errc::dim_mismatch, "svm_train: mixed descriptor dims");

  std::set<std::string> label_set;
  for (const auto& d : data) label_set.insert(d.label);
  require(label_set.size() >= 2, Errc::single_class_data, "svm_train: need at least two classes");

  SvmModel model;
  model.c_reg = opts.c_reg;
  model.class_labels.assign(label_set.begin(), label_set.end());

  std::map<std::string, int> class_index;
  for (int i = 0; i < int(model.class_labels.size()); ++i)
    class_index[model.class_labels[size_t(i)]] = i;

  std::vector<std::vector<const WaveletDescriptor*>> by_class(model.class_labels.size());
  for (const auto& d : data) by_class[size_t(class_index[d.label])].push_back(&d);

  const double eps = opts.kkt_tolerance * 0.5;
  for (int a = 0; a < int(model.class_labels.size()); ++a)
    for (int b = a + 1; b < int(model.class_labels.size()); ++b) {
      PairProblem prob;
      for (const auto* d : by_class[size_t(a)]) {
        prob.x.push_back(&d->values);
        prob.y.push_back(+1.0);
      }
      for (const auto* d : by_class[size_t(b)]) {
        prob.x.push_back(&d->values);
        prob.y.push_back(-1.0);
      }
      PairSolution sol = solve_pair(prob, opts.c_reg, eps, opts.max_passes);

      BinarySvm machine;
      machine.positive_class = a;
      machine.negative_class = b;
      machine.bias = sol.bias;
      for (size_t k = 0; k < prob.x.size(); ++k)
        if (sol.alpha[k] > 0) {
          machine.support_vectors.push_back(*prob.x[k]);
          machine.alpha_y.push_back(sol.alpha[k] * prob.y[k]);
        }
      model.machines.push_back(std::move(machine));
    }
  return model;
}

double svm_decision(const SvmModel& model, const BinarySvm& machine,
                    const std::vector<double>& x) {
  (void)model;
  double sum = machine.bias;
  for (size_t k = 0; k < machine.support_vectors.size(); ++k)
    sum += machine.alpha_y[k] * quadratic_kernel(machine.support_vectors[k], x);
  return sum;
}

std::string svm_predict(const SvmModel& model, const WaveletDescriptor& d) {
  require(!model.machines.empty(), Errc::bad_config, "svm_predict: untrained model");
  for (const auto& m : model.machines)
    if (!m.support_vectors.empty())
      require(m.support_vectors.front().size() == d.values.size(), Errc::dim_mismatch,
              "svm_predict: descriptor dimension mismatch");

  std::vector<int> votes(model.class_labels.size(), 0);
  std::vector<double> scores(model.class_labels.size(), 0.0);
  for (const auto& m : model.machines) {
    const double f = svm_decision(model, m, d.values);
    if (f > 0)
      votes[size_t(m.positive_class)] += 1;
    else
      votes[size_t(m.negative_class)] += 1;
    scores[size_t(m.positive_class)] += f;
    scores[size_t(m.negative_class)] -= f;
  }
  int best = 0;
  for (int k = 1; k < int(votes.size()); ++k) {
    if (votes[size_t(k)] > votes[size_t(best)] ||
        (votes[size_t(k)] == votes[size_t(best)] && scores[size_t(k)] > scores[size_t(best)]))
      best = k;
  }
  return model.class_labels[size_t(best)];
}

double svm_kkt_residual(const SvmModel& model, const std::vector<WaveletDescriptor>& data) {
  double worst = 0.0;
  for (const auto& machine : model.machines) {
    const std::string& pos = model.class_labels[size_t(machine.positive_class)];
    const std::string& neg = model.class_labels[size_t(machine.negative_class)];
    for (const auto& d : data) {
      if (d.label != pos && d.label != neg) continue;
      const double y = d.label == pos ? +1.0 : -1.0;
      const double yf = y * svm_decision(model, machine, d.values);

      // recover alpha for this point (0 unless it is a stored support vector)
      double alpha = 0.0;
      for (size_t k = 0; k < machine.support_vectors.size(); ++k)
        if (machine.support_vectors[k] == d.values) {
          alpha = std::abs(machine.alpha_y[k]);
          break;
        }

      double residual;
      const double edge = 1e-9 * model.c_reg;
      if (alpha <= edge)
        residual = std::max(0.0, 1.0 - yf);
      else if (alpha >= model.c_reg - edge)
        residual = std::max(0.0, yf - 1.0);
      else
        residual = std::abs(1.0 - yf);
      worst = std::max(worst, residual);
    }
  }
  return worst;
}

}  // namespace stepgrid
