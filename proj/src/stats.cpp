// Copyright 2026 The mfgmajor Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mfgmajor/stats.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "mfgmajor/errors.hpp"

namespace mfgmajor {

MeanEstimate EstimateMean(const std::vector<double>& sample) {
  MeanEstimate est;
  est.count = sample.size();
  if (sample.empty()) {
    est.mean = est.se = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  double sum = 0.0;
  for (double v : sample) sum += v;
  est.mean = sum / sample.size();
  if (sample.size() < 2) {
    est.se = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  double ss = 0.0;
  for (double v : sample) ss += (v - est.mean) * (v - est.mean);
  est.se = std::sqrt(ss / (sample.size() - 1) / sample.size());
  return est;
}

RegressionResult RobustOls(const std::vector<double>& x, int p,
                           const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (x.size() != n * p) throw DomainError("regression design has the wrong size");
  if (n <= static_cast<std::size_t>(p)) {
    throw DomainError("regression needs more rows than regressors");
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (int j = 0; j < p; ++j) scale(j) = std::max(scale(j), std::abs(x[r * p + j]));
  }
  for (int j = 0; j < p; ++j) {
    if (scale(j) == 0.0) throw SingularMatrixError("regressor is identically zero", NAN);
  }
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd row(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (int j = 0; j < p; ++j) row(j) = x[r * p + j] / scale(j);
    xtx.selfadjointView<Eigen::Lower>().rankUpdate(row);
    xty += row * y[r];
  }
  xtx = xtx.selfadjointView<Eigen::Lower>();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xtx);
  qr.setThreshold(1e-12);
  if (qr.rank() < p) throw SingularMatrixError("regression design is rank deficient", NAN);
  const Eigen::MatrixXd inv = qr.inverse();
  const Eigen::VectorXd beta = inv * xty;
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (int j = 0; j < p; ++j) row(j) = x[r * p + j] / scale(j);
    const double e = y[r] - row.dot(beta);
    meat.selfadjointView<Eigen::Lower>().rankUpdate(row, e * e);
  }
  meat = meat.selfadjointView<Eigen::Lower>();
  const Eigen::MatrixXd cov = inv * meat * inv;
  RegressionResult out;
  out.coef.resize(p);
  out.se.resize(p);
  for (int j = 0; j < p; ++j) {
    out.coef[j] = beta(j) / scale(j);
    out.se[j] = std::sqrt(std::max(cov(j, j), 0.0)) / scale(j);
  }
  return out;
}

LineFit FitLine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("line fit needs at least two paired points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

}  // namespace mfgmajor
