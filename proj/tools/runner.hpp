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

#ifndef ANT_TOOLS_RUNNER_HPP
#define ANT_TOOLS_RUNNER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "ant/model.hpp"
#include "ant/tasks.hpp"
#include "config.hpp"

namespace ant::app {

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;  // MSE for recsys, accuracy for textclf
  std::size_t nnz = 0;
  std::size_t k = 0;        // anchors summed over tables
  double sva_obj = 0.0;
  bool aborted = false;
};

struct RecsysResult {
  std::vector<EpochLog> epochs;
  std::size_t reported_epoch = 0;  // 1-based epoch whose scores are reported
  double val_mse = 0.0;
  double test_mse = 0.0;
  ParamCount users;
  ParamCount items;
  std::size_t total_params = 0;  // users.total + items.total at the reported epoch
  std::size_t final_k = 0;       // user-table anchors after the last epoch
  std::size_t reported_k = 0;
  std::size_t moved_to_train = 0;
  double seconds = 0.0;
};

/// Splits `data`, trains MF (dense or ANT tables), optionally saves to
/// cfg.out, and reports test MSE at the best validation epoch when
/// cfg.keep_best is set (last epoch otherwise). Writes per-epoch lines to
/// `log` when non-null.
RecsysResult run_recsys(const RunConfig& cfg, const RatingsDataset& data, std::ostream* log);

struct TextclfResult {
  std::vector<EpochLog> epochs;
  std::size_t reported_epoch = 0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  ParamCount params;
  std::size_t vocab_size = 0;
  std::size_t final_k = 0;
  double seconds = 0.0;
};

TextclfResult run_textclf(const RunConfig& cfg, const LabeledCorpus& train,
                          const LabeledCorpus& val, const LabeledCorpus& test,
                          std::ostream* log);

/// Persistable form of a table: ANT tables as is, dense tables as A = table
/// with an identity transform.
AntModel to_ant_model(const EmbeddingTable& table);

std::string format_epoch(const EpochLog& e, const char* metric_name);

}  // namespace ant::app

#endif  // ANT_TOOLS_RUNNER_HPP
