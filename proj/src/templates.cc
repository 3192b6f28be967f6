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

#include "forge/templates.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "forge/engine.h"
#include "json.hpp"

namespace forge {

Part Part::literal(std::string text) {
  Part p;
  p.kind = Kind::kLiteral;
  p.tokens = tokenize(text);
  p.text = std::move(text);
  return p;
}

Part Part::nt(std::string name) {
  Part p;
  p.kind = Kind::kNonterminal;
  p.text = std::move(name);
  return p;
}

Part Part::value(ValueSlotSpec spec) {
  Part p;
  p.kind = Kind::kValue;
  if (spec.lex_column.empty()) spec.lex_column = spec.slot;
  p.slot = std::move(spec);
  return p;
}

Part Part::placeholder(std::string name) {
  Part p;
  p.kind = Kind::kPlaceholder;
  p.text = std::move(name);
  return p;
}

void Grammar::add(const std::string& nonterminal, Production p) {
  rules_[nonterminal].push_back(std::move(p));
}

const std::vector<Production>* Grammar::productions(std::string_view nonterminal) const {
  auto it = rules_.find(nonterminal);
  return it == rules_.end() ? nullptr : &it->second;
}

size_t Grammar::size() const {
  size_t n = 0;
  for (const auto& [_, ps] : rules_) n += ps.size();
  return n;
}

void Grammar::validate() const {
  // 0 = unvisited, 1 = on stack, 2 = done
  std::map<std::string, int, std::less<>> mark;
  std::function<void(const std::string&)> visit = [&](const std::string& nt) {
    int& m = mark[nt];
    if (m == 2) return;
    if (m == 1) throw Error(ErrorKind::kValidation, "grammar: cycle through " + nt);
    m = 1;
    for (const auto& p : rules_.at(nt)) {
      for (const auto& part : p.parts) {
        if (part.kind != Part::Kind::kNonterminal) continue;
        if (!rules_.count(part.text)) {
          throw Error(ErrorKind::kValidation,
                      "grammar: " + nt + " refers to undefined " + part.text);
        }
        visit(part.text);
      }
    }
    mark[nt] = 2;
  };
  for (const auto& [nt, _] : rules_) visit(nt);
}

void Lexicon::add(const std::string& domain, const std::string& column, const Value& value) {
  auto toks = tokenize(value.display());
  if (toks.empty()) return;
  auto& bucket = entries_[toks];
  for (const auto& e : bucket) {
    if (e.domain == domain && e.column == column && e.value.normalized() == value.normalized()) {
      return;
    }
  }
  bucket.push_back({domain, column, value});
  max_len_ = std::max(max_len_, toks.size());
  ++count_;
}

std::vector<Lexicon::Match> Lexicon::lookup(const std::vector<std::string>& tokens,
                                            size_t start) const {
  std::vector<Match> out;
  const size_t limit = std::min(max_len_, tokens.size() - std::min(start, tokens.size()));
  std::vector<std::string> key;
  for (size_t len = 1; len <= limit; ++len) {
    key.push_back(tokens[start + len - 1]);
    auto it = entries_.find(key);
    if (it == entries_.end()) continue;
    for (const auto& e : it->second) out.push_back({start + len, &e});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool Lexicon::contains(const std::string& domain, const std::string& column,
                       const Value& v) const {
  auto it = entries_.find(tokenize(v.display()));
  if (it == entries_.end()) return false;
  for (const auto& e : it->second) {
    if (e.domain == domain && e.column == column && e.value.normalized() == v.normalized()) {
      return true;
    }
  }
  return false;
}

Lexicon build_lexicon(const Database& db) {
  Lexicon lex;
  for (const auto& d : db.schemas().domains()) {
    for (const auto& col : d.table.columns) {
      if (col.kind != ValueKind::kStringEnum && col.kind != ValueKind::kFreeString) continue;
      for (const auto& v : db.distinct(d.name, col.name)) lex.add(d.name, col.name, v);
    }
  }
  return lex;
}

ValueSampler database_sampler(const Database& db) {
  return [&db](const ValueSlotSpec& spec, Rng& rng) -> Value {
    const DomainSchema& d = db.schemas().require(spec.domain);
    const ColumnSpec* col = d.table.column(spec.lex_column);
    switch (spec.kind) {
      case ValueKind::kStringEnum:
      case ValueKind::kFreeString:
        if (!col) {
          throw Error(ErrorKind::kState, "no values for " + spec.domain + "." + spec.slot);
        }
        return sample_value(db, spec.domain, col->name, rng);
      case ValueKind::kInteger:
        if (col && !db.distinct(d.name, col->name).empty()) {
          return sample_value(db, spec.domain, col->name, rng);
        }
        return Value::integer(1 + static_cast<int64_t>(rng.below(8)));
      case ValueKind::kTimeOfDay:
        // 11:00 .. 21:45 in quarter hours
        return Value::time(TimeOfDay{11 * 60 + 15 * static_cast<int>(rng.below(44))});
      case ValueKind::kDayOfWeek:
        return Value::day(static_cast<Day>(rng.below(7)));
    }
    return Value::dontcare();
  };
}

namespace {

struct Walk {
  const Grammar& g;
  const ExpandRequest& req;
  Rng& rng;
  std::vector<std::string> words;
  std::vector<Binding> bindings;
  int nprod = 0;

  std::string expand_production(const std::string& nt, const Production& p, size_t index) {
    ++nprod;
    std::string trace = nt + "#" + std::to_string(index);
    std::string children;
    for (const auto& part : p.parts) {
      switch (part.kind) {
        case Part::Kind::kLiteral:
          if (!part.text.empty()) words.push_back(part.text);
          break;
        case Part::Kind::kNonterminal: {
          const auto* ps = g.productions(part.text);
          if (!ps || ps->empty()) {
            throw Error(ErrorKind::kValidation, "grammar: undefined " + part.text);
          }
          const size_t k = rng.below(ps->size());
          children += expand_production(part.text, (*ps)[k], k);
          break;
        }
        case Part::Kind::kValue: {
          const ValueSlotSpec& s = part.slot;
          Value v;
          auto it = req.fixed.find(s.key());
          if (it != req.fixed.end()) {
            v = it->second;
            if (req.lexicon && v.is_str() &&
                !req.lexicon->contains(s.domain, s.lex_column, v)) {
              throw Error(ErrorKind::kState,
                          "value '" + v.display() + "' is not a known " + s.domain + "." +
                              s.lex_column);
            }
          } else if (req.sampler) {
            v = req.sampler(s, rng);
          } else {
            throw Error(ErrorKind::kState, "no value for " + s.key());
          }
          words.push_back(v.display());
          bindings.push_back({s.domain, s.slot, v, s.op, s.disjunct, s.role});
          break;
        }
        case Part::Kind::kPlaceholder: {
          auto it = req.text.find(part.text);
          if (it == req.text.end()) {
            throw Error(ErrorKind::kState, "no text for placeholder " + part.text);
          }
          if (!it->second.empty()) words.push_back(it->second);
          break;
        }
      }
    }
    return children.empty() ? trace : trace + "[" + children + "]";
  }
};

}  // namespace

Expansion expand(const Grammar& g, const ExpandRequest& req, Rng& rng) {
  const auto* ps = g.productions(req.start);
  if (!ps) throw Error(ErrorKind::kValidation, "grammar: undefined " + req.start);
  std::vector<size_t> allowed;
  for (size_t i = 0; i < ps->size(); ++i) {
    if (!req.filter || req.filter((*ps)[i])) allowed.push_back(i);
  }
  if (allowed.empty()) throw Error(ErrorKind::kState, "no production of " + req.start + " applies");
  const size_t k = rng.pick(allowed);
  const Production& p = (*ps)[k];
  Walk w{g, req, rng, {}, {}, 0};
  Expansion out;
  out.derivation.trace = w.expand_production(req.start, p, k);
  out.derivation.tag = p.tag;
  out.derivation.top = &p;
  out.derivation.bindings = std::move(w.bindings);
  out.derivation.num_productions = w.nprod;
  out.utterance = join(w.words, " ");
  return out;
}

namespace {

struct Yield {
  std::vector<std::string> words;
  std::vector<Binding> bindings;
  int nprod = 0;
  std::string trace;
};

class Enumerator {
 public:
  Enumerator(const Grammar& g, const ValueChoices& choices, size_t limit)
      : g_(g), choices_(choices), limit_(limit) {}

  std::vector<Yield> production(const std::string& nt, const Production& p, size_t index) {
    std::vector<Yield> acc{Yield{}};
    std::string children;
    for (const auto& part : p.parts) {
      std::vector<Yield> next;
      switch (part.kind) {
        case Part::Kind::kLiteral:
          for (auto& y : acc) {
            if (!part.text.empty()) y.words.push_back(part.text);
          }
          continue;
        case Part::Kind::kPlaceholder:
          for (auto& y : acc) y.words.push_back("{" + part.text + "}");
          continue;
        case Part::Kind::kValue: {
          const ValueSlotSpec& s = part.slot;
          for (const auto& y : acc) {
            for (const auto& v : choices_(s)) {
              if (next.size() >= limit_) break;
              Yield z = y;
              z.words.push_back(v.display());
              z.bindings.push_back({s.domain, s.slot, v, s.op, s.disjunct, s.role});
              next.push_back(std::move(z));
            }
          }
          break;
        }
        case Part::Kind::kNonterminal: {
          const auto& subs = nonterminal(part.text);
          for (const auto& y : acc) {
            for (const auto& sub : subs) {
              if (next.size() >= limit_) break;
              Yield z = y;
              z.words.insert(z.words.end(), sub.words.begin(), sub.words.end());
              z.bindings.insert(z.bindings.end(), sub.bindings.begin(), sub.bindings.end());
              z.nprod += sub.nprod;
              z.trace += sub.trace;
              next.push_back(std::move(z));
            }
          }
          break;
        }
      }
      acc = std::move(next);
    }
    const std::string head = nt + "#" + std::to_string(index);
    for (auto& y : acc) {
      ++y.nprod;
      y.trace = y.trace.empty() ? head : head + "[" + y.trace + "]";
    }
    return acc;
  }

 private:
  const std::vector<Yield>& nonterminal(const std::string& nt) {
    auto it = memo_.find(nt);
    if (it != memo_.end()) return it->second;
    std::vector<Yield> out;
    if (const auto* ps = g_.productions(nt)) {
      for (size_t i = 0; i < ps->size() && out.size() < limit_; ++i) {
        for (auto& y : production(nt, (*ps)[i], i)) {
          if (out.size() >= limit_) break;
          out.push_back(std::move(y));
        }
      }
    }
    return memo_.emplace(nt, std::move(out)).first->second;
  }

  const Grammar& g_;
  const ValueChoices& choices_;
  size_t limit_;
  std::map<std::string, std::vector<Yield>> memo_;
};

}  // namespace

std::vector<Expansion> enumerate_expansions(const Grammar& g, std::string_view start,
                                            const std::function<bool(const Production&)>& filter,
                                            const ValueChoices& choices, size_t limit) {
  std::vector<Expansion> out;
  const auto* ps = g.productions(start);
  if (!ps) return out;
  Enumerator e(g, choices, limit);
  const std::string nt(start);
  for (size_t i = 0; i < ps->size(); ++i) {
    const Production& p = (*ps)[i];
    if (filter && !filter(p)) continue;
    size_t n = 0;
    for (auto& y : e.production(nt, p, i)) {
      if (n++ >= limit) break;
      Expansion x;
      x.utterance = join(y.words, " ");
      x.derivation.tag = p.tag;
      x.derivation.top = &p;
      x.derivation.bindings = std::move(y.bindings);
      x.derivation.num_productions = y.nprod;
      x.derivation.trace = std::move(y.trace);
      out.push_back(std::move(x));
    }
  }
  return out;
}

namespace {

constexpr size_t kCellCap = 256;

struct Partial {
  size_t end = 0;
  std::vector<Binding> bindings;
  int nprod = 0;
  std::string trace;
};

class Chart {
 public:
  Chart(const Grammar& g, const Lexicon& lex, std::vector<std::string> tokens)
      : g_(g), lex_(lex), tokens_(std::move(tokens)) {}

  const std::vector<std::string>& tokens() const { return tokens_; }

  // Derivations of `nt` starting at `pos`; equal (end, bindings) pairs keep
  // the one with fewer productions, then the smaller trace.
  const std::vector<Partial>& nonterminal(const std::string& nt, size_t pos) {
    auto key = std::make_pair(nt, pos);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Partial> out;
    const auto* ps = g_.productions(nt);
    if (ps) {
      for (size_t i = 0; i < ps->size(); ++i) {
        for (auto& p : production(nt, (*ps)[i], i, pos)) add(out, std::move(p));
      }
    }
    if (out.size() > kCellCap) out.resize(kCellCap);
    return memo_.emplace(key, std::move(out)).first->second;
  }

  std::vector<Partial> production(const std::string& nt, const Production& p, size_t index,
                                  size_t pos) {
    std::vector<Partial> acc;
    Partial seed;
    seed.end = pos;
    seq(p, 0, seed, acc);
    const std::string head = nt + "#" + std::to_string(index);
    for (auto& r : acc) {
      ++r.nprod;
      r.trace = r.trace.empty() ? head : head + "[" + r.trace + "]";
    }
    return acc;
  }

 private:
  static bool better(const Partial& a, const Partial& b) {
    return std::tie(a.nprod, a.trace) < std::tie(b.nprod, b.trace);
  }

  static void add(std::vector<Partial>& out, Partial p) {
    for (auto& q : out) {
      if (q.end == p.end && q.bindings == p.bindings) {
        if (better(p, q)) q = std::move(p);
        return;
      }
    }
    out.push_back(std::move(p));
  }

  void seq(const Production& p, size_t k, const Partial& cur, std::vector<Partial>& acc) {
    if (acc.size() >= kCellCap) return;
    if (k == p.parts.size()) {
      acc.push_back(cur);
      return;
    }
    const Part& part = p.parts[k];
    const size_t pos = cur.end;
    switch (part.kind) {
      case Part::Kind::kLiteral: {
        if (pos + part.tokens.size() > tokens_.size()) return;
        for (size_t i = 0; i < part.tokens.size(); ++i) {
          if (tokens_[pos + i] != part.tokens[i]) return;
        }
        Partial next = cur;
        next.end = pos + part.tokens.size();
        seq(p, k + 1, next, acc);
        return;
      }
      case Part::Kind::kNonterminal: {
        for (const auto& sub : nonterminal(part.text, pos)) {
          Partial next = cur;
          next.end = sub.end;
          next.bindings.insert(next.bindings.end(), sub.bindings.begin(), sub.bindings.end());
          next.nprod += sub.nprod;
          next.trace += sub.trace;
          seq(p, k + 1, next, acc);
        }
        return;
      }
      case Part::Kind::kValue: {
        const ValueSlotSpec& s = part.slot;
        auto bind = [&](size_t end, const Value& v) {
          Partial next = cur;
          next.end = end;
          next.bindings.push_back({s.domain, s.slot, v, s.op, s.disjunct, s.role});
          seq(p, k + 1, next, acc);
        };
        if (s.kind == ValueKind::kStringEnum || s.kind == ValueKind::kFreeString) {
          for (const auto& m : lex_.lookup(tokens_, pos)) {
            if (m.entry->domain == s.domain && m.entry->column == s.lex_column) {
              bind(m.end, m.entry->value);
            }
          }
        } else if (pos < tokens_.size()) {
          if (auto v = value_from_text(s.kind, tokens_[pos])) bind(pos + 1, *v);
        }
        return;
      }
      case Part::Kind::kPlaceholder:
        // Placeholders only occur in agent templates, which are never parsed.
        return;
    }
  }

  const Grammar& g_;
  const Lexicon& lex_;
  std::vector<std::string> tokens_;
  std::map<std::pair<std::string, size_t>, std::vector<Partial>> memo_;
};

}  // namespace

std::vector<ScoredDerivation> parse_utterance(const Grammar& g, const Lexicon& lex,
                                              std::string_view utterance,
                                              const Admissible& admissible,
                                              std::string_view start) {
  std::vector<std::string> toks = tokenize(utterance);
  // Typed input often ends with punctuation the user templates never have.
  while (start == kUserTurn && !toks.empty() &&
         (toks.back() == "." || toks.back() == "!" || toks.back() == "?")) {
    toks.pop_back();
  }
  Chart chart(g, lex, std::move(toks));
  const size_t n = chart.tokens().size();
  std::vector<ScoredDerivation> out;
  const auto* ps = g.productions(start);
  if (!ps) return out;
  const std::string nt(start);
  for (size_t i = 0; i < ps->size(); ++i) {
    const Production& p = (*ps)[i];
    // Cheap rejection on a leading literal.
    if (!p.parts.empty() && p.parts[0].kind == Part::Kind::kLiteral) {
      const auto& lt = p.parts[0].tokens;
      if (lt.size() > n || !std::equal(lt.begin(), lt.end(), chart.tokens().begin())) continue;
    }
    for (auto& r : chart.production(nt, p, i, 0)) {
      if (r.end != n) continue;
      ScoredDerivation sd;
      sd.derivation.tag = p.tag;
      sd.derivation.top = &p;
      sd.derivation.bindings = std::move(r.bindings);
      sd.derivation.num_productions = r.nprod;
      sd.derivation.trace = std::move(r.trace);
      sd.admissible = !admissible || admissible(sd.derivation);
      out.push_back(std::move(sd));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredDerivation& a,
                                              const ScoredDerivation& b) {
    const auto& da = a.derivation;
    const auto& db = b.derivation;
    const bool na = !a.admissible;
    const bool nb = !b.admissible;
    const size_t ba = da.bindings.size();
    const size_t bb = db.bindings.size();
    return std::tie(na, bb, da.num_productions, da.tag, da.trace) <
           std::tie(nb, ba, db.num_productions, db.tag, db.trace);
  });
  return out;
}

namespace {

using nlohmann::json;

Part part_from_json(const json& j, const SchemaSet& schemas, const std::string& where) {
  if (j.is_string()) return Part::literal(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorKind::kValidation, where + ": bad part");
  if (j.contains("nt")) return Part::nt(j.at("nt").get<std::string>());
  if (j.contains("placeholder")) return Part::placeholder(j.at("placeholder").get<std::string>());
  if (!j.contains("value")) throw Error(ErrorKind::kValidation, where + ": bad part");
  const std::string ref = j.at("value").get<std::string>();
  const auto dot = ref.find('.');
  if (dot == std::string::npos) throw Error(ErrorKind::kValidation, where + ": bad value " + ref);
  ValueSlotSpec s;
  s.domain = ref.substr(0, dot);
  s.slot = ref.substr(dot + 1);
  const DomainSchema* d = schemas.domain(s.domain);
  if (!d) throw Error(ErrorKind::kValidation, where + ": unknown domain " + s.domain);
  if (const ColumnSpec* c = d->table.column(s.slot)) {
    s.kind = c->kind;
    s.lex_column = c->name;
  } else {
    const ParamSpec* found = nullptr;
    for (const auto& a : d->actions) {
      if ((found = a.param(s.slot))) break;
    }
    if (!found) throw Error(ErrorKind::kValidation, where + ": unknown slot " + ref);
    s.kind = found->kind;
    s.lex_column = found->links_table_column.value_or(found->name);
  }
  if (j.contains("op")) {
    auto op = parse_filter_op(j.at("op").get<std::string>());
    if (!op) throw Error(ErrorKind::kValidation, where + ": bad op");
    s.op = *op;
  }
  if (j.contains("role")) s.role = j.at("role").get<std::string>();
  s.disjunct = j.value("disjunct", false);
  return Part::value(std::move(s));
}

}  // namespace

void load_template_file(const std::string& path, const SchemaSet& schemas, Grammar& g) {
  const std::string text = read_file(path);
  std::vector<json> items;
  try {
    const std::string t = trim(text);
    if (!t.empty() && t[0] == '[') {
      for (auto& j : json::parse(t)) items.push_back(j);
    } else {
      for (const auto& line : read_lines(path)) {
        if (!trim(line).empty()) items.push_back(json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  for (size_t i = 0; i < items.size(); ++i) {
    const std::string where = path + "[" + std::to_string(i) + "]";
    const json& j = items[i];
    if (!j.is_object() || !j.contains("nonterminal") || !j.contains("parts")) {
      throw Error(ErrorKind::kValidation, where + ": expected nonterminal and parts");
    }
    Production p;
    for (const auto& part : j.at("parts")) p.parts.push_back(part_from_json(part, schemas, where));
    p.tag = j.value("tag", "");
    if (j.contains("params")) {
      for (auto& [k, v] : j.at("params").items()) p.params[k] = v.get<std::string>();
    }
    g.add(j.at("nonterminal").get<std::string>(), std::move(p));
  }
}

}  // namespace forge
