#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rbfd/matrix.hpp"
#include "rbfd/model.hpp"

namespace rbfd::testing {

// Independent reference loss in long double, straight from the model formula.
inline long double reference_loss(const DenseMatrix& target, const RbfModel& model,
                                  const IndexSample* sample = nullptr) {
  auto entry = [&](std::size_t i, std::size_t j) {
    long double pred = model.b();
    for (std::size_t k = 0; k < model.r(); ++k) {
      const long double d = static_cast<long double>(model.u(k)[i]) - model.v(k)[j];
      pred += static_cast<long double>(model.a()[k]) * std::exp(-d * d);
    }
    const long double rho = pred - target(i, j);
    return rho * rho;
  };
  long double acc = 0.0L;
  if (sample) {
    for (const auto& p : sample->pairs) acc += entry(p.i, p.j);
    return acc / static_cast<long double>(sample->size());
  }
  for (std::size_t i = 0; i < target.rows(); ++i)
    for (std::size_t j = 0; j < target.cols(); ++j) acc += entry(i, j);
  return acc / static_cast<long double>(target.size());
}

// Central differences with step h on every flat parameter.
inline std::vector<double> fd_gradient(const DenseMatrix& target, const RbfModel& model,
                                       double h = 1e-6, const IndexSample* sample = nullptr) {
  RbfModel probe = model;
  auto theta = probe.flat();
  std::vector<double> out(theta.size());
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double saved = theta[p];
    theta[p] = saved + h;
    const long double up = reference_loss(target, probe, sample);
    theta[p] = saved - h;
    const long double down = reference_loss(target, probe, sample);
    theta[p] = saved;
    out[p] = static_cast<double>((up - down) / (2.0L * h));
  }
  return out;
}

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace rbfd::testing
