#pragma once

#include <string>
#include <vector>

#include "stepgrid/types.hpp"

namespace stepgrid {

/// Orthonormal Haar fast wavelet transform, full depth. Input length must be
/// a power of two. Per level the leading segment [a | d] holds the averaged
/// approximations a_i = (x_{2i} + x_{2i+1}) / sqrt(2) followed by the details
/// d_i = (x_{2i} - x_{2i+1}) / sqrt(2); the recursion continues on a.
std::vector<double> haar_fwt_1d(const std::vector<double>& x);

/// Exact inverse of haar_fwt_1d.
std::vector<double> haar_ifwt_1d(const std::vector<double>& coeffs);

/// The conventional 336-dimensional step descriptor:
///  (a) each frame is resampled to 16x16 by bilinear interpolation,
///  (b) the temporal axis is resampled to 16 frames by linear interpolation,
///  (c) a separable 2-D Haar FWT runs over each frame and a 1-D Haar FWT
///      over time for every spatial coefficient,
///  (d) the 4x4 spatial low-pass corner across all 16 temporal indices
///      (256 values) is kept, plus the values of the 80 largest-magnitude
///      remaining coefficients, emitted in linear-index order.
struct WaveletDescriptor {
  static constexpr int kDim = 336;
  std::vector<double> values;  // exactly 336
  std::string step_id;
  std::string label;
};

WaveletDescriptor wavelet_descriptor(const StepSequence& step);

/// One-vs-one multi-class SVM with the quadratic kernel K(x,y) = (x.y + 1)^2,
/// trained by SMO-style dual ascent per class pair.
struct BinarySvm {
  int positive_class = 0;  // class index voted for when f(x) > 0
  int negative_class = 0;
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alpha_y;  // alpha_i * y_i per support vector
  double bias = 0.0;
};

struct SvmModel {
  std::vector<std::string> class_labels;  // index -> label, sorted ascending
  std::vector<BinarySvm> machines;        // one per unordered class pair
  double c_reg = 1.0;
};

double quadratic_kernel(const std::vector<double>& a, const std::vector<double>& b);

struct SvmTrainOptions {
  double c_reg = 1.0;
  double kkt_tolerance = 1e-3;
  int max_passes = 2000000;  // SMO iteration cap; exceeding it is an error
};

/// Throws Errc::single_class_data for fewer than two classes and
/// Errc::non_convergence when a pairwise machine hits the iteration cap.
SvmModel svm_train(const std::vector<WaveletDescriptor>& data, const SvmTrainOptions& opts = {});

/// Majority vote over all pairwise machines; vote ties break on the summed
/// decision values, then on class order.
std::string svm_predict(const SvmModel& model, const WaveletDescriptor& d);

/// Decision value of one pairwise machine (sign votes positive/negative).
double svm_decision(const SvmModel& model, const BinarySvm& machine,
                    const std::vector<double>& x);

/// Largest violation of the trained dual's KKT conditions; the solver
/// guarantees <= kkt_tolerance on the data it was trained on.
double svm_kkt_residual(const SvmModel& model, const std::vector<WaveletDescriptor>& data);

}  // namespace stepgrid
