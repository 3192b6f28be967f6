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

#include "forge/linearize.h"

#include <algorithm>
#include <cctype>

#include "forge/util.h"

namespace forge {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string refs(const std::set<SlotRef>& r) {
  std::vector<std::string> parts;
  for (const auto& ref : r) parts.push_back(ref.domain + " . " + ref.slot);
  return join(parts, " , ");
}

std::string linearize_row(const Row& row) {
  std::vector<std::string> parts;
  for (const auto& [k, v] : row) parts.push_back(k + " = " + linearize(v));
  return "first { " + join(parts, " , ") + " }";
}

std::string linearize_result(const ExecResult& r) {
  std::string out = "#results = " + std::to_string(r.count);
  if (r.first) out += " " + linearize_row(*r.first);
  if (r.error) {
    out += " error = " + r.error->code;
    if (!r.error->param.empty()) out += " " + r.error->param;
  }
  return out;
}

void append_agent_fields(std::string& out, const std::set<SlotRef>& requested,
                         const std::set<SlotRef>& change,
                         const std::optional<Statement>& proposed) {
  if (!requested.empty()) out += " request " + refs(requested) + " ;";
  if (!change.empty()) out += " change " + refs(change) + " ;";
  if (proposed) out += " propose " + linearize(*proposed) + " ;";
}

std::vector<Statement> sorted(std::vector<Statement> v) {
  UserState tmp;
  tmp.statements = std::move(v);
  canonicalize(tmp);
  return std::move(tmp.statements);
}

// Token stream with quoted text collapsed into single tokens.
struct Token {
  std::string text;
  bool quoted = false;
};

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  const auto raw = split_ws(text);
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != "\"") {
      out.push_back({raw[i], false});
      continue;
    }
    std::vector<std::string> words;
    size_t j = i + 1;
    for (; j < raw.size() && raw[j] != "\""; ++j) words.push_back(raw[j]);
    if (j == raw.size()) {
      throw Error(ErrorKind::kParse, "unterminated string at token " + std::to_string(i));
    }
    std::string s = join(words, " "), unescaped;
    for (size_t k = 0; k < s.size(); ++k) {
      if (s[k] == '\\' && k + 1 < s.size()) ++k;
      unescaped += s[k];
    }
    out.push_back({unescaped, true});
    i = j;
  }
  return out;
}

class Reader {
 public:
  Reader(std::string_view text, const SchemaSet& schemas)
      : toks_(lex(text)), schemas_(schemas) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token& peek(size_t ahead = 0) const {
    static const Token kEnd{"<end>", false};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : kEnd;
  }
  bool at(std::string_view s) const { return !done() && !peek().quoted && peek().text == s; }
  bool accept(std::string_view s) {
    if (!at(s)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "', found '" + peek().text + "'");
  }
  std::string word() {
    if (done() || peek().quoted) fail("expected a word");
    return toks_[pos_++].text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::kParse, "token " + std::to_string(pos_) + ": " + msg);
  }

  // "Exec:" or "Exec" ":"
  std::string act_token() {
    std::string w = word();
    if (w.size() > 1 && w.back() == ':') return w.substr(0, w.size() - 1);
    expect(":");
    return w;
  }

  Value value() {
    if (done()) fail("expected a value");
    const Token t = toks_[pos_++];
    if (t.quoted) return Value::str(t.text);
    if (t.text == "dontcare") return Value::dontcare();
    if (auto tm = parse_time(t.text)) return Value::time(*tm);
    if (auto d = parse_day(t.text); d && t.text.size() > 3) return Value::day(*d);
    bool digits = !t.text.empty();
    for (size_t i = 0; i < t.text.size(); ++i) {
      const char c = t.text[i];
      if (!(std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && c == '-' && t.text.size() > 1))) {
        digits = false;
      }
    }
    if (digits) return Value::integer(std::stoll(t.text));
    --pos_;
    fail("bad value '" + t.text + "'");
  }

  const DomainSchema& domain(const std::string& name) const {
    const DomainSchema* d = schemas_.domain(name);
    if (!d) throw Error(ErrorKind::kValidation, "unknown domain '" + name + "'");
    return *d;
  }

  Statement statement(StatementStatus status) {
    // Collect optional projection list.
    std::vector<std::string> requested;
    if (peek(1).text == "," || peek(1).text == "of") {
      do {
        requested.push_back(word());
      } while (accept(","));
      expect("of");
    }
    const std::string dname = word();
    const DomainSchema& d = domain(dname);
    if (accept(".")) {
      if (!requested.empty()) fail("projection on an action");
      ActionStatement a;
      a.domain = dname;
      a.action = word();
      const ActionSchema* act = d.action(a.action);
      if (!act) throw Error(ErrorKind::kValidation, "unknown action '" + dname + "." + a.action + "'");
      expect("(");
      if (!accept(")")) {
        do {
          const std::string p = word();
          if (!act->param(p)) {
            throw Error(ErrorKind::kValidation, "unknown param '" + a.action + "." + p + "'");
          }
          expect("=");
          a.params[p] = value();
        } while (accept(","));
        expect(")");
      }
      return Statement::action(std::move(a), status);
    }
    QueryStatement q;
    q.domain = dname;
    for (auto& r : requested) {
      if (!d.table.column(r)) throw Error(ErrorKind::kValidation, "unknown slot '" + dname + "." + r + "'");
      q.requested.insert(r);
    }
    expect("(");
    if (!accept(")")) {
      do {
        FilterAtom atom;
        atom.slot = word();
        if (!d.table.column(atom.slot)) {
          throw Error(ErrorKind::kValidation, "unknown slot '" + dname + "." + atom.slot + "'");
        }
        auto op = parse_filter_op(word());
        if (!op) fail("bad operator");
        atom.op = *op;
        atom.values.push_back(value());
        while (accept("or")) atom.values.push_back(value());
        q.filter.push_back(std::move(atom));
      } while (accept(","));
      expect(")");
    }
    return Statement::query(std::move(q), status);
  }

  std::set<SlotRef> slot_refs() {
    std::set<SlotRef> out;
    do {
      SlotRef r;
      r.domain = word();
      const DomainSchema& d = domain(r.domain);
      expect(".");
      r.slot = word();
      bool known = d.table.column(r.slot) != nullptr;
      for (const auto& a : d.actions) known = known || a.param(r.slot);
      if (!known) throw Error(ErrorKind::kValidation, "unknown slot '" + r.domain + "." + r.slot + "'");
      out.insert(std::move(r));
    } while (accept(","));
    return out;
  }

  ExecResult result() {
    ExecResult r;
    expect("#results");
    expect("=");
    const std::string n = word();
    if (n.empty() || !std::all_of(n.begin(), n.end(), ::isdigit)) fail("bad result count");
    r.count = std::stoull(n);
    if (accept("first")) {
      expect("{");
      Row row;
      if (!accept("}")) {
        do {
          const std::string col = word();
          expect("=");
          row[col] = value();
        } while (accept(","));
        expect("}");
      }
      r.first = std::move(row);
    }
    if (accept("error")) {
      expect("=");
      ExecError e;
      e.code = word();
      if (!at(";")) e.param = word();
      r.error = std::move(e);
    }
    return r;
  }

  void agent_segments(std::set<SlotRef>& requested, std::set<SlotRef>& change,
                      std::optional<Statement>& proposed) {
    while (!done()) {
      if (accept("request")) {
        requested = slot_refs();
      } else if (accept("change")) {
        change = slot_refs();
      } else if (accept("propose")) {
        proposed = statement(StatementStatus::kProposed);
      } else {
        fail("unexpected '" + peek().text + "'");
      }
      expect(";");
    }
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  const SchemaSet& schemas_;
};

}  // namespace

std::string linearize(const Value& v) {
  if (v.is_str()) return "\" " + escape(v.as_str()) + " \"";
  return v.display();
}

std::string linearize(const Statement& s) {
  std::string out;
  if (s.is_query()) {
    QueryStatement q = s.as_query();
    q.canonicalize();
    if (!q.requested.empty()) {
      out += join(std::vector<std::string>(q.requested.begin(), q.requested.end()), " , ");
      out += " of ";
    }
    out += q.domain + " (";
    std::vector<std::string> atoms;
    for (const auto& a : q.filter) {
      std::vector<std::string> vals;
      for (const auto& v : a.values) vals.push_back(linearize(v));
      atoms.push_back(a.slot + " " + std::string(filter_op_symbol(a.op)) + " " + join(vals, " or "));
    }
    if (!atoms.empty()) out += " " + join(atoms, " , ");
    out += " )";
  } else {
    const auto& a = s.as_action();
    out += a.domain + " . " + a.action + " (";
    std::vector<std::string> params;
    for (const auto& [k, v] : a.params) params.push_back(k + " = " + linearize(v));
    if (!params.empty()) out += " " + join(params, " , ");
    out += " )";
  }
  return out;
}

std::string linearize(const UserState& us) {
  std::string out = std::string(user_act_name(us.act)) + ":";
  for (const auto& s : sorted(us.statements)) out += " " + linearize(s) + " ;";
  return out;
}

std::string linearize(const AgentState& as) {
  std::string out = std::string(agent_act_name(as.act)) + ":";
  std::optional<Statement> proposed = as.proposed;
  if (proposed) canonicalize(*proposed);
  append_agent_fields(out, as.requested, as.suggest_change, proposed);
  return out;
}

std::string linearize(const Context& ctx) {
  std::string out = ctx.last_act.by_agent
                        ? "agent " + std::string(agent_act_name(static_cast<AgentAct>(ctx.last_act.code)))
                        : "user " + std::string(user_act_name(static_cast<UserAct>(ctx.last_act.code)));
  out += ":";
  if (ctx.focus) out += " focus " + *ctx.focus + " ;";
  for (const auto& [name, rec] : ctx.domains) {
    if (rec.query && rec.query->result) {
      out += std::string(rec.query_fresh ? " exec_new " : " exec ") + linearize(*rec.query) + " " +
             linearize_result(*rec.query->result) + " ;";
    }
    if (rec.action && rec.action->result) {
      out += std::string(rec.action_fresh ? " exec_new " : " exec ") + linearize(*rec.action) +
             " " + linearize_result(*rec.action->result) + " ;";
    }
  }
  for (const auto& s : sorted(ctx.carryover)) out += " pending " + linearize(s) + " ;";
  append_agent_fields(out, ctx.agent.requested, ctx.agent.suggest_change, ctx.agent.proposed);
  return out;
}

UserState delinearize_user(std::string_view text, const SchemaSet& schemas) {
  Reader r(text, schemas);
  UserState us;
  const std::string act = r.act_token();
  auto a = parse_user_act(act);
  if (!a) r.fail("unknown user act '" + act + "'");
  us.act = *a;
  while (!r.done()) {
    us.statements.push_back(r.statement(StatementStatus::kAccepted));
    r.expect(";");
  }
  return us;
}

AgentState delinearize_agent(std::string_view text, const SchemaSet& schemas) {
  Reader r(text, schemas);
  AgentState as;
  const std::string act = r.act_token();
  auto a = parse_agent_act(act);
  if (!a) r.fail("unknown agent act '" + act + "'");
  as.act = *a;
  r.agent_segments(as.requested, as.suggest_change, as.proposed);
  return as;
}

Context delinearize_context(std::string_view text, const SchemaSet& schemas) {
  Context ctx;
  if (trim(text).empty()) return ctx;
  Reader r(text, schemas);
  const std::string speaker = r.word();
  const std::string act = r.act_token();
  if (speaker == "agent") {
    auto a = parse_agent_act(act);
    if (!a) r.fail("unknown agent act '" + act + "'");
    ctx.last_act = LastAct::agent(*a);
  } else if (speaker == "user") {
    auto a = parse_user_act(act);
    if (!a) r.fail("unknown user act '" + act + "'");
    ctx.last_act = LastAct::user(*a);
  } else {
    r.fail("expected 'agent' or 'user'");
  }
  if (r.accept("focus")) {
    const std::string d = r.word();
    r.domain(d);
    ctx.focus = d;
    r.expect(";");
  }
  while (r.at("exec") || r.at("exec_new")) {
    const bool fresh = r.word() == "exec_new";
    Statement s = r.statement(StatementStatus::kExecuted);
    s.result = r.result();
    r.expect(";");
    auto& rec = ctx.domains[s.domain()];
    if (s.is_query()) {
      if (rec.query) r.fail("second executed query for '" + s.domain() + "'");
      rec.query = std::move(s);
      rec.query_fresh = fresh;
    } else {
      if (rec.action) r.fail("second executed action for '" + s.domain() + "'");
      rec.action = std::move(s);
      rec.action_fresh = fresh;
    }
  }
  while (r.accept("pending")) {
    ctx.carryover.push_back(r.statement(StatementStatus::kAccepted));
    r.expect(";");
  }
  r.agent_segments(ctx.agent.requested, ctx.agent.suggest_change, ctx.agent.proposed);
  return ctx;
}

AnyState delinearize(std::string_view text, StateKind kind, const SchemaSet& schemas) {
  switch (kind) {
    case StateKind::kUser: return delinearize_user(text, schemas);
    case StateKind::kAgent: return delinearize_agent(text, schemas);
    case StateKind::kContext: return delinearize_context(text, schemas);
  }
  return delinearize_context(text, schemas);
}

}  // namespace forge
