// Copyright 2026 The ANT Authors
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

#include "ant/ibp.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "ant/error.hpp"

namespace ant {

namespace {

void require_binary(const DenseMatrix& z) {
  for (double x : z.values()) {
    if (x != 0.0 && x != 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "IBP: Z entries must be 0 or 1");
    }
  }
}

}  // namespace

BinaryStats binary_stats(const DenseMatrix& z) {
  require_binary(z);
  BinaryStats s;
  for (Index c = 0; c < z.cols(); ++c) {
    std::size_t m = 0;
    for (Index r = 0; r < z.rows(); ++r) m += z(r, c) != 0.0 ? 1 : 0;
    if (m > 0) ++s.k;
    s.ones += m;
  }
  return s;
}

double log_ibp_prior_log_params(const DenseMatrix& z, double log_a, double log_b) {
  require_binary(z);
  const std::size_t n = z.rows();
  const double inv_b = std::exp(-log_b);

  // Column patterns; K_h! over identical non-empty columns.
  std::map<std::vector<char>, std::size_t> patterns;
  std::vector<std::size_t> counts;
  for (Index c = 0; c < z.cols(); ++c) {
    std::vector<char> pattern(n);
    std::size_t m = 0;
    for (Index r = 0; r < n; ++r) {
      pattern[r] = z(r, c) != 0.0 ? 1 : 0;
      m += static_cast<std::size_t>(pattern[r]);
    }
    if (m == 0) continue;
    ++patterns[pattern];
    counts.push_back(m);
  }
  const auto k = static_cast<double>(counts.size());

  double log_p = k * (log_a + log_b);
  for (const auto& [pattern, kh] : patterns) log_p -= std::lgamma(static_cast<double>(kh) + 1.0);

  // H = sum_j 1 / (b + j - 1), written in 1/b so a huge b does not overflow.
  double h = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    h += inv_b / (1.0 + static_cast<double>(j - 1) * inv_b);
  }
  log_p -= std::exp(log_a + log_b) * h;

  // G(n - m + b) / G(n + b) = 1 / prod_{j=1}^{m} (n - j + b).
  for (std::size_t m : counts) {
    log_p += std::lgamma(static_cast<double>(m));
    for (std::size_t j = 1; j <= m; ++j) {
      log_p -= log_b + std::log1p(static_cast<double>(n - j) * inv_b);
    }
  }
  return log_p;
}

double log_ibp_prior(const IbpSample& sample) {
  if (!(sample.a > 0.0) || !(sample.b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IBP: a and b must be positive");
  }
  return log_ibp_prior_log_params(sample.z, std::log(sample.a), std::log(sample.b));
}

double sva_limit(const DenseMatrix& z, double lambda1, double lambda2) {
  const auto s = binary_stats(z);
  return -lambda2 * static_cast<double>(s.ones) -
         (lambda1 - lambda2) * static_cast<double>(s.k);
}

std::vector<SvaLimitPoint> sva_limit_check(const DenseMatrix& z, double lambda1,
                                           double lambda2, std::span<const double> betas) {
  if (!(lambda1 > lambda2 && lambda2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "SVA limit needs lambda1 > lambda2 > 0");
  }
  const double limit = sva_limit(z, lambda1, lambda2);
  std::vector<SvaLimitPoint> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "SVA limit: beta must be > 0");
    SvaLimitPoint p;
    p.beta = beta;
    p.value = log_ibp_prior_log_params(z, -beta * lambda1, beta * lambda2) / beta;
    p.error = std::abs(p.value - limit);
    out.push_back(p);
  }
  return out;
}

}  // namespace ant
