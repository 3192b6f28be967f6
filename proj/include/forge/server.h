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

// JSON chat API over in-memory sessions.
//
//   POST   /api/session              {"seed":N}     -> {"session_id","reply",...}
//   POST   /api/session/ID/message   {"text":".."}  -> {"reply","agent_state",
//                                                       "user_state","context","ended"}
//   GET    /api/session/ID/state
//   DELETE /api/session/ID
//
// States are linearizations. Routing lives in ChatService::handle so it can
// be exercised without a socket.

#ifndef FORGE_SERVER_H_
#define FORGE_SERVER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "forge/agent.h"

namespace forge {

// JSON bodies shared with the C API.
std::string session_state_json(const Session& s);
std::string step_result_json(const Session& s, const StepResult& r);

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

class ChatService {
 public:
  explicit ChatService(const AgentRuntime& rt) : rt_(rt) {}

  HttpReply handle(std::string_view method, std::string_view path, std::string_view body);
  size_t num_sessions() const;

 private:
  struct Entry {
    std::mutex mu;
    std::unique_ptr<Session> session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;

  const AgentRuntime& rt_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  uint64_t next_id_ = 1;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;  // served at "/" when set
};

// Blocks until the process is stopped. Throws Error(kIo) if the port cannot
// be bound or the static directory does not exist.
void run_server(ChatService& service, const ServerConfig& cfg);

}  // namespace forge

#endif  // FORGE_SERVER_H_
