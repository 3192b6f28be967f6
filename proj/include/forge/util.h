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

#ifndef FORGE_UTIL_H_
#define FORGE_UTIL_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
  kIo,
  kParse,
  kValidation,
  kUsage,
  kState,
  kNotFound,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Seeded generator. Bounded draws use rejection sampling on the raw 64-bit
// stream so sequences do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed);
  uint64_t next();
  // Uniform in [0, n). n must be positive.
  uint64_t below(uint64_t n);
  // Uniform in [0, 1).
  double uniform();
  bool chance(double p) { return uniform() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

 private:
  uint64_t state_[4];
};

// Stateless 64-bit mixer, used to derive per-stream seeds.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool is_identifier(std::string_view s);

// Lowercases and splits on whitespace and punctuation. "hh:mm" times stay
// atomic, as do apostrophe-free alphanumeric runs.
std::vector<std::string> tokenize(std::string_view utterance);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace forge

#endif  // FORGE_UTIL_H_
