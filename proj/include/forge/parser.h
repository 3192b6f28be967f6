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

// Contextual user-utterance parsers: the built-in grammar inversion, or an
// external process speaking one JSON object per line.

#ifndef FORGE_PARSER_H_
#define FORGE_PARSER_H_

#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "forge/state_machine.h"
#include "forge/templates.h"
#include "forge/toc.h"

namespace forge {

class ParserHandle {
 public:
  virtual ~ParserHandle() = default;
  // `ctx` is the user-facing context. Unparseable input yields act Invalid.
  virtual UserState parse(const Context& ctx, std::string_view utterance) = 0;
};

class GrammarParser : public ParserHandle {
 public:
  // All references must outlive the parser.
  GrammarParser(const MachineSpec& m, const Grammar& g, const Lexicon& lex)
      : m_(m), g_(g), lex_(lex) {}

  UserState parse(const Context& ctx, std::string_view utterance) override;
  // Ranked derivations with admissibility, for debugging.
  std::vector<ScoredDerivation> derivations(const Context& ctx, std::string_view utterance) const;

 private:
  const MachineSpec& m_;
  const Grammar& g_;
  const Lexicon& lex_;
};

// Runs `command` through /bin/sh and sends {"context","utterance"} lines,
// reading {"target"} lines back. Calls are serialized.
class ExternalParser : public ParserHandle {
 public:
  ExternalParser(const std::string& command, const SchemaSet& schemas);
  ~ExternalParser() override;
  ExternalParser(const ExternalParser&) = delete;
  ExternalParser& operator=(const ExternalParser&) = delete;

  UserState parse(const Context& ctx, std::string_view utterance) override;

 private:
  const SchemaSet& schemas_;
  std::mutex mu_;
  int pid_ = -1;
  FILE* to_ = nullptr;
  FILE* from_ = nullptr;
};

}  // namespace forge

#endif  // FORGE_PARSER_H_
