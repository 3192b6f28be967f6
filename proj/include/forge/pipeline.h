// Copyright 2026 The Forge Authors.
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

// File-level plumbing shared by the C API and the tests: prediction over a
// user-turn file and pairing gold with predictions.

#ifndef FORGE_PIPELINE_H_
#define FORGE_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "forge/eval.h"
#include "forge/parser.h"

namespace forge {

struct PredictSummary {
  uint64_t turns = 0;
  uint64_t matches = 0;  // prediction equals the file's target
  uint64_t invalid = 0;  // predicted Invalid
};

// Reads user-turn lines {"id","turn","context","utterance","target",...} and
// writes the same objects with a "pred" field added. When `dump` is set,
// every turn whose prediction differs from the target is appended to
// `dump_path` with its ranked derivations.
PredictSummary predict_file(ParserHandle& parser, const SchemaSet& schemas,
                            const std::string& gold_path, const std::string& out_path,
                            const GrammarParser* dump = nullptr,
                            const std::string& dump_path = "");

// Pairs gold lines with prediction lines by position. Prediction lines carry
// "pred" (or "target"); "id" and "turn" must agree. Throws Error(kValidation)
// on a count or key mismatch and Error(kParse) on malformed JSON.
std::vector<EvalRecord> load_eval_records(const std::string& gold_path,
                                          const std::string& pred_path);

}  // namespace forge

#endif  // FORGE_PIPELINE_H_
