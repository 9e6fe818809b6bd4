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

#ifndef ANT_IBP_HPP
#define ANT_IBP_HPP

#include <span>
#include <vector>

#include "ant/dense_matrix.hpp"

namespace ant {

/// Binary feature matrix Z (|V| x columns) under a two-parameter IBP.
struct IbpSample {
  DenseMatrix z;
  double a = 1.0;
  double b = 1.0;
};

/// Natural log of the two-parameter IBP probability of Z:
///   (ab)^K / prod_h K_h! * exp(-ab H) * prod_k G(m_k) G(|V| - m_k + b) / G(|V| + b)
/// with H = sum_{j=1}^{|V|} 1 / (b + j - 1). Empty columns are ignored, K
/// counts the rest and K_h counts columns sharing each distinct pattern.
/// Throws kInvalidArgument for entries outside {0, 1} or a, b <= 0.
double log_ibp_prior(const IbpSample& sample);

/// Same value with a and b given by their logarithms, so that a = exp(-beta
/// lambda1) and b = exp(beta lambda2) stay representable for large beta.
double log_ibp_prior_log_params(const DenseMatrix& z, double log_a, double log_b);

/// Number of non-empty columns and total ones of a binary Z.
struct BinaryStats {
  std::size_t k = 0;
  std::size_t ones = 0;
};
BinaryStats binary_stats(const DenseMatrix& z);

struct SvaLimitPoint {
  double beta = 0.0;
  double value = 0.0;  // (1/beta) log p(Z) at a = exp(-beta l1), b = exp(beta l2)
  double error = 0.0;  // |value - limit|
};

/// The beta -> infinity limit: -lambda2 ||Z||_0 - (lambda1 - lambda2) K.
double sva_limit(const DenseMatrix& z, double lambda1, double lambda2);

/// Evaluates the scaled log prior at each beta. Requires lambda1 > lambda2 > 0.
std::vector<SvaLimitPoint> sva_limit_check(const DenseMatrix& z, double lambda1,
                                           double lambda2, std::span<const double> betas);

}  // namespace ant

#endif  // ANT_IBP_HPP
