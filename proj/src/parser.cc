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

#include "forge/parser.h"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>

#include "forge/linearize.h"
#include "json.hpp"

namespace forge {

namespace {

UserState invalid() {
  UserState us;
  us.act = UserAct::kInvalid;
  return us;
}

}  // namespace

std::vector<ScoredDerivation> GrammarParser::derivations(const Context& ctx,
                                                         std::string_view utterance) const {
  return parse_utterance(g_, lex_, utterance, [&](const Derivation& d) {
    return interpret(m_, ctx, d).has_value();
  });
}

UserState GrammarParser::parse(const Context& ctx, std::string_view utterance) {
  auto ranked = derivations(ctx, utterance);
  if (ranked.empty() || !ranked.front().admissible) return invalid();
  auto us = interpret(m_, ctx, ranked.front().derivation);
  return us ? *us : invalid();
}

ExternalParser::ExternalParser(const std::string& command, const SchemaSet& schemas)
    : schemas_(schemas) {
  int in[2], out[2];
  if (pipe(in) != 0 || pipe(out) != 0) throw Error(ErrorKind::kIo, "pipe failed");
  pid_ = fork();
  if (pid_ < 0) throw Error(ErrorKind::kIo, "fork failed");
  if (pid_ == 0) {
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    close(in[0]);
    close(in[1]);
    close(out[0]);
    close(out[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  to_ = fdopen(in[1], "w");
  from_ = fdopen(out[0], "r");
  if (!to_ || !from_) throw Error(ErrorKind::kIo, "fdopen failed");
  // A dead child must not kill us on write.
  signal(SIGPIPE, SIG_IGN);
}

ExternalParser::~ExternalParser() {
  if (to_) fclose(to_);
  if (from_) fclose(from_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

UserState ExternalParser::parse(const Context& ctx, std::string_view utterance) {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json req = {{"context", linearize(ctx)}, {"utterance", std::string(utterance)}};
  const std::string line = req.dump() + "\n";
  if (fputs(line.c_str(), to_) < 0 || fflush(to_) != 0) {
    throw Error(ErrorKind::kIo, "external parser closed its input");
  }
  std::string reply;
  char buf[4096];
  while (fgets(buf, sizeof buf, from_)) {
    reply += buf;
    if (!reply.empty() && reply.back() == '\n') break;
  }
  if (reply.empty()) throw Error(ErrorKind::kIo, "external parser closed its output");
  try {
    auto j = nlohmann::json::parse(reply);
    return delinearize_user(j.at("target").get<std::string>(), schemas_);
  } catch (const nlohmann::json::exception&) {
    return invalid();
  } catch (const Error&) {
    return invalid();
  }
}

}  // namespace forge
