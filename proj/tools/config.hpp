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

#ifndef ANT_TOOLS_CONFIG_HPP
#define ANT_TOOLS_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

namespace ant::app {

/// Settings for one training run. JSON keys are the field names; command-line
/// flags are the same names in kebab-case and override file values.
struct RunConfig {
  std::string task = "recsys";  // recsys | textclf
  std::string data;             // ratings file, or labeled training file
  std::string val_data;         // textclf only
  std::string test_data;        // textclf only
  std::string out;              // output directory, empty for none

  std::size_t dim = 16;
  bool dense = false;  // full embedding table instead of ANT
  std::size_t anchors = 10;
  std::size_t item_anchors = 0;  // recsys items; 0 means same as anchors
  std::string anchor_init = "random";
  bool nonneg = true;
  double lambda1 = 0.01;
  double lambda2 = 1e-4;
  double ortho_weight = 0.0;
  double neg_pair_weight = 0.0;
  std::string mask_path;  // relation file for the domain mask
  std::string transform_grad = "active";  // active | full_row

  bool nbant = false;
  std::size_t delta_k = 1;
  std::string nbant_objective = "validation";  // validation | training
  double nbant_tol = 1e-4;

  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double lr = 0.01;
  double lr_decay = 0.5;
  std::size_t decay_step = 100000;
  double init_std = 0.1;  // dense table initialization
  std::size_t window = 10;  // co-occurrence window for kmeanspp anchors

  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;

  std::uint64_t seed = 7;
  std::size_t threads = 1;
  bool deterministic = false;
  bool keep_best = true;  // report the epoch with the best validation score

  /// Throws ant::Error(kInvalidArgument) on inconsistent settings.
  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Unknown keys are rejected.
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_config(const std::string& path);

}  // namespace ant::app

#endif  // ANT_TOOLS_CONFIG_HPP
