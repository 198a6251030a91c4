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

#include "mfgmajor/params.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "mfgmajor/errors.hpp"

namespace mfgmajor {
namespace {

void RequireFinite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw DomainError(fmt::format("{} must be finite (got {})", name, v));
  }
}

bool RelativelyEqual(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

void LiquiditySchedule::Validate() const {
  RequireFinite(alpha_slope, "alpha_slope");
  RequireFinite(alpha_intercept, "alpha_intercept");
  RequireFinite(alpha0_slope, "alpha0_slope");
  RequireFinite(alpha0_intercept, "alpha0_intercept");
  RequireFinite(horizon, "horizon");
  if (!(horizon > 0.0)) {
    throw DomainError(fmt::format("horizon must be positive (got {})", horizon));
  }
  // Affine schedules are positive on [0, T] iff they are at both ends.
  if (!(alpha(0.0) > 0.0) || !(alpha(horizon) > 0.0)) {
    throw DomainError(fmt::format(
        "alpha must be strictly positive on [0, T] (alpha(0) = {}, alpha(T) = {})",
        alpha(0.0), alpha(horizon)));
  }
  if (!(alpha0(0.0) > 0.0) || !(alpha0(horizon) > 0.0)) {
    throw DomainError(fmt::format(
        "alpha0 must be strictly positive on [0, T] (alpha0(0) = {}, alpha0(T) = {})",
        alpha0(0.0), alpha0(horizon)));
  }
}

std::optional<double> LiquiditySchedule::Proportionality() const {
  constexpr double kTol = 1e-12;
  const double c = alpha0_intercept / alpha_intercept;
  if (alpha_slope == 0.0 || alpha0_slope == 0.0) {
    if (alpha_slope == 0.0 && alpha0_slope == 0.0) return c;
    return std::nullopt;
  }
  const double c_slope = alpha0_slope / alpha_slope;
  if (RelativelyEqual(c, c_slope, kTol) && c > 0.0) return c;
  return std::nullopt;
}

void MarketParams::Validate() const {
  liquidity.Validate();
  const std::pair<double, const char*> all[] = {
      {a, "a"},           {a0, "a0"},           {lambda, "lambda"},
      {lambda0, "lambda0"}, {S0, "S0"},         {sigma_S, "sigma_S"},
      {Xbar0, "Xbar0"},   {sigma_bar, "sigma_bar"}, {sigma_0, "sigma_0"},
      {sigma_X, "sigma_X"}, {X0_0, "X0_0"},     {Xcheck0, "Xcheck0"}};
  for (const auto& [v, name] : all) RequireFinite(v, name);
  if (!(a > 0.0)) throw DomainError(fmt::format("a must be positive (got {})", a));
  if (a0 < 0.0) throw DomainError(fmt::format("a0 must be non-negative (got {})", a0));
  if (lambda < 0.0) {
    throw DomainError(fmt::format("lambda must be non-negative (got {})", lambda));
  }
  if (lambda0 < 0.0) {
    throw DomainError(fmt::format("lambda0 must be non-negative (got {})", lambda0));
  }
  const std::pair<double, const char*> vols[] = {{sigma_S, "sigma_S"},
                                                 {sigma_bar, "sigma_bar"},
                                                 {sigma_0, "sigma_0"},
                                                 {sigma_X, "sigma_X"}};
  for (const auto& [v, name] : vols) {
    if (v < 0.0) {
      throw DomainError(fmt::format("{} must be non-negative (got {})", name, v));
    }
  }
}

}  // namespace mfgmajor
