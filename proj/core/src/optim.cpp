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

#include "ant/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ant {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double decayed_lr(const YogiConfig& cfg, std::size_t t) {
  if (cfg.decay_every == 0 || t == 0) return cfg.lr;
  const auto drops = static_cast<double>((t - 1) / cfg.decay_every);
  return cfg.lr * std::pow(cfg.decay_factor, drops);
}

StepContext make_step_context(const YogiConfig& cfg, std::size_t t) {
  StepContext ctx;
  ctx.t = t;
  ctx.lr = decayed_lr(cfg, t);
  ctx.beta1 = cfg.beta1;
  ctx.beta2 = cfg.beta2;
  ctx.epsilon = cfg.epsilon;
  const auto td = static_cast<double>(t);
  ctx.bias1 = cfg.beta1 < 1.0 ? 1.0 - std::pow(cfg.beta1, td) : 1.0;
  ctx.bias2 = cfg.beta2 < 1.0 ? 1.0 - std::pow(cfg.beta2, td) : 1.0;
  return ctx;
}

StepContext StepClock::tick() { return make_step_context(cfg_, ++steps_); }

StepContext StepClock::peek() const { return make_step_context(cfg_, steps_ + 1); }

void yogi_update(std::span<double> param, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const StepContext& ctx) {
  const std::size_t n = param.size();
  if (grad.size() != n || m.size() != n || v.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "yogi: parameter/state size mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    const double g2 = g * g;
    m[i] = ctx.beta1 * m[i] + (1.0 - ctx.beta1) * g;
    v[i] = v[i] - (1.0 - ctx.beta2) * sign(v[i] - g2) * g2;
    const double m_hat = m[i] / ctx.bias1;
    const double v_hat = v[i] / ctx.bias2;
    param[i] -= ctx.lr * m_hat / (std::sqrt(v_hat) + ctx.epsilon);
  }
}

void yogi_step(std::span<double> param, std::span<const double> grad, YogiState& state) {
  if (param.size() != grad.size() || state.m.size() != param.size() ||
      state.v.size() != param.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "yogi_step: shape mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::kNumerical, "yogi_step: non-finite gradient");
    }
  }
  ++state.step;
  yogi_update(param, grad, state.m, state.v, make_step_context(state.config, state.step));
}

void DenseParameter::apply(const StepContext& ctx) {
  yogi_update(value.values(), grad.values(), m.values(), v.values(), ctx);
}

double prox_scalar(double t, double threshold, bool nonneg, bool exempt) {
  if (exempt) return nonneg ? std::max(t, 0.0) : t;
  if (nonneg) return std::max(t - threshold, 0.0);
  const double mag = std::abs(t) - threshold;
  return mag > 0.0 ? sign(t) * mag : 0.0;
}

std::size_t prox_row(SparseRowMatrix& t, Index row, double eta, const ProxConfig& cfg) {
  if (eta < 0.0) throw Error(ErrorCode::kInvalidArgument, "prox: negative step size");
  const double threshold = eta * cfg.lambda2;
  const SparseRowMatrix* mask = cfg.mask_complement.get();
  if (mask != nullptr && row >= mask->rows()) mask = nullptr;
  return t.update_row(row, [&](Index col, double value) {
    const bool exempt = mask != nullptr && mask->get(row, col) != 0.0;
    return prox_scalar(value, threshold, cfg.nonneg, exempt);
  });
}

SparseRowMatrix prox_step(const SparseRowMatrix& t, double eta, const ProxConfig& cfg) {
  SparseRowMatrix out = t;
  for (Index r = 0; r < out.rows(); ++r) prox_row(out, r, eta, cfg);
  return out;
}

OrthogonalityPenalty orthogonality_penalty(const DenseMatrix& a) {
  if (a.empty()) throw Error(ErrorCode::kInvalidArgument, "orthogonality: empty A");
  OrthogonalityPenalty out;
  out.grad = DenseMatrix(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i + 1; j < a.rows(); ++j) {
      const double g = dot(a.row(i), a.row(j));
      // (i, j) and (j, i) are both in the ordered sum.
      out.value += 2.0 * std::abs(g);
      const double s = 2.0 * sign(g);
      if (s == 0.0) continue;
      auto gi = out.grad.row(i);
      auto gj = out.grad.row(j);
      const auto ai = a.row(i);
      const auto aj = a.row(j);
      for (std::size_t c = 0; c < a.cols(); ++c) {
        gi[c] += s * aj[c];
        gj[c] += s * ai[c];
      }
    }
  }
  return out;
}

NegativePairPenalty negative_pair_penalty(const SparseRowMatrix& t,
                                          std::span<const std::pair<Index, Index>> pairs) {
  NegativePairPenalty out;
  const std::size_t k = t.cols();
  for (const auto& [u, v] : pairs) {
    if (u >= t.rows() || v >= t.rows()) {
      throw Error(ErrorCode::kOutOfRange, "negative pair index out of range");
    }
    const auto ru = t.row(u);
    const auto rv = t.row(v);
    auto& gu = out.grad[u];
    auto& gv = out.grad[v];
    gu.resize(k, 0.0);
    gv.resize(k, 0.0);
    // Merge the two sorted rows over shared columns.
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < ru.size() && b < rv.size()) {
      if (ru[a].col < rv[b].col) {
        ++a;
      } else if (rv[b].col < ru[a].col) {
        ++b;
      } else {
        const double x = ru[a].value;
        const double y = rv[b].value;
        out.value += std::abs(x) * std::abs(y);
        gu[ru[a].col] += sign(x) * std::abs(y);
        gv[rv[b].col] += sign(y) * std::abs(x);
        ++a;
        ++b;
      }
    }
  }
  return out;
}

}  // namespace ant
