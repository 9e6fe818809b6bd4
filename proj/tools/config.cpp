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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ant/anchors.hpp"
#include "ant/error.hpp"
#include "ant/model.hpp"

namespace ant::app {

#define ANT_CONFIG_FIELDS(X)                                                              \
  X(task) X(data) X(val_data) X(test_data) X(out) X(dim) X(dense) X(anchors)              \
  X(item_anchors) X(anchor_init) X(nonneg) X(lambda1) X(lambda2) X(ortho_weight)          \
  X(neg_pair_weight) X(mask_path) X(transform_grad) X(nbant) X(delta_k) X(nbant_objective) X(nbant_tol)     \
  X(epochs) X(batch_size) X(lr) X(lr_decay) X(decay_step) X(init_std) X(window)           \
  X(train_fraction) X(val_fraction) X(test_fraction) X(seed) X(threads) X(deterministic) \
  X(keep_best)

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json::object();
#define ANT_PUT(name) j[#name] = c.name;
  ANT_CONFIG_FIELDS(ANT_PUT)
#undef ANT_PUT
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config: expected a JSON object");
  std::set<std::string> known;
#define ANT_GET(name)                                 \
  known.insert(#name);                                \
  if (j.contains(#name)) j.at(#name).get_to(c.name);
  ANT_CONFIG_FIELDS(ANT_GET)
#undef ANT_GET
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::kParse, "config: unknown key " + key);
  }
}

#undef ANT_CONFIG_FIELDS

void RunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "config: " + what);
  };
  if (task != "recsys" && task != "textclf") fail("task must be recsys or textclf");
  if (dim == 0) fail("dim must be >= 1");
  if (!dense && anchors == 0) fail("anchors must be >= 1");
  parse_anchor_strategy(anchor_init);
  parse_transform_gradient(transform_grad);
  if (lambda2 < 0.0 || ortho_weight < 0.0 || neg_pair_weight < 0.0) {
    fail("regularization weights must be >= 0");
  }
  if (nbant) {
    if (dense) fail("nbant needs ANT tables");
    if (!(lambda1 > lambda2)) fail("nbant needs lambda1 > lambda2");
    if (delta_k == 0) fail("delta_k must be >= 1");
    if (item_anchors != 0 && item_anchors != anchors) {
      fail("nbant ties user and item anchor counts");
    }
  }
  if (nbant_objective != "validation" && nbant_objective != "training") {
    fail("nbant_objective must be validation or training");
  }
  if (epochs == 0 || batch_size == 0) fail("epochs and batch_size must be >= 1");
  if (!(lr >= 0.0)) fail("lr must be >= 0");
  if (!(lr_decay > 0.0)) fail("lr_decay must be > 0");
  if (threads == 0) fail("threads must be >= 1");
  if (train_fraction < 0.0 || val_fraction < 0.0 || test_fraction < 0.0 ||
      std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
    fail("split fractions must be >= 0 and sum to 1");
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "config " + path + ": " + e.what());
  }
  RunConfig c;
  try {
    from_json(j, c);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "config " + path + ": " + e.what());
  }
  return c;
}

}  // namespace ant::app
