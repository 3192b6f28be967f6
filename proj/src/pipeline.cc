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

#include "forge/pipeline.h"

#include <fstream>

#include "forge/linearize.h"
#include "json.hpp"

namespace forge {

namespace {

nlohmann::json parse_line(const std::string& line, const std::string& path, size_t lineno) {
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw Error(ErrorKind::kParse, "not an object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path + ":" + std::to_string(lineno) + ": " + e.what());
  }
}

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorKind::kValidation, where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kValidation, where + ": bad \"" + key + "\"");
  }
}

std::vector<std::string> nonblank_lines(const std::string& path) {
  std::vector<std::string> out;
  for (auto& l : read_lines(path)) {
    if (!trim(l).empty()) out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

PredictSummary predict_file(ParserHandle& parser, const SchemaSet& schemas,
                            const std::string& gold_path, const std::string& out_path,
                            const GrammarParser* dump, const std::string& dump_path) {
  const auto lines = nonblank_lines(gold_path);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + out_path);
  std::ofstream log;
  if (dump) {
    log.open(dump_path, std::ios::binary);
    if (!log) throw Error(ErrorKind::kIo, "cannot write " + dump_path);
  }
  PredictSummary s;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string where = gold_path + ":" + std::to_string(i + 1);
    auto j = parse_line(lines[i], gold_path, i + 1);
    const Context ctx = delinearize_context(field<std::string>(j, "context", where), schemas);
    const std::string utterance = field<std::string>(j, "utterance", where);
    const UserState pred = parser.parse(ctx, utterance);
    j["pred"] = linearize(pred);
    out << j.dump() << '\n';
    ++s.turns;
    s.invalid += pred.act == UserAct::kInvalid;
    bool match = false;
    if (j.contains("target") && j["target"].is_string()) {
      match = states_equal(pred, delinearize_user(j["target"].get<std::string>(), schemas));
    }
    s.matches += match;
    if (dump && !match) {
      nlohmann::json entry = {{"line", i + 1},
                              {"utterance", utterance},
                              {"context", j["context"]},
                              {"target", j.value("target", "")},
                              {"pred", j["pred"]}};
      nlohmann::json ds = nlohmann::json::array();
      for (const auto& d : dump->derivations(ctx, utterance)) {
        ds.push_back({{"tag", d.derivation.tag},
                      {"admissible", d.admissible},
                      {"productions", d.derivation.num_productions},
                      {"trace", d.derivation.trace}});
      }
      entry["derivations"] = ds;
      log << entry.dump() << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + out_path);
  return s;
}

std::vector<EvalRecord> load_eval_records(const std::string& gold_path,
                                          const std::string& pred_path) {
  const auto gold = nonblank_lines(gold_path);
  const auto pred = nonblank_lines(pred_path);
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::kValidation,
                "line count mismatch: gold has " + std::to_string(gold.size()) + ", pred has " +
                    std::to_string(pred.size()) + " (diff " +
                    std::to_string(static_cast<long long>(pred.size()) -
                                   static_cast<long long>(gold.size())) +
                    ")");
  }
  std::vector<EvalRecord> out;
  out.reserve(gold.size());
  for (size_t i = 0; i < gold.size(); ++i) {
    const std::string gw = gold_path + ":" + std::to_string(i + 1);
    const std::string pw = pred_path + ":" + std::to_string(i + 1);
    const auto g = parse_line(gold[i], gold_path, i + 1);
    const auto p = parse_line(pred[i], pred_path, i + 1);
    EvalRecord r;
    r.dialogue_id = field<std::string>(g, "id", gw);
    r.turn = field<uint64_t>(g, "turn", gw);
    r.context = g.value("context", "");
    r.utterance = g.value("utterance", "");
    r.gold = field<std::string>(g, "target", gw);
    r.pred = p.contains("pred") ? field<std::string>(p, "pred", pw)
                                : field<std::string>(p, "target", pw);
    if (p.contains("id") && p["id"] != g["id"]) {
      throw Error(ErrorKind::kValidation, pw + ": id does not match the gold line");
    }
    if (p.contains("turn") && p["turn"] != g["turn"]) {
      throw Error(ErrorKind::kValidation, pw + ": turn does not match the gold line");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace forge
