#include "eovsim/policy.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace eovsim {

const char* to_string(PolicyId id) {
  switch (id) {
    case PolicyId::kP0: return "P0";
    case PolicyId::kP1: return "P1";
    case PolicyId::kP2: return "P2";
    case PolicyId::kP3: return "P3";
    case PolicyId::kCustom: return "CUSTOM";
  }
  return "CUSTOM";
}

PolicyId policy_id_from_string(const std::string& s) {
  if (s == "P0") return PolicyId::kP0;
  if (s == "P1") return PolicyId::kP1;
  if (s == "P2") return PolicyId::kP2;
  if (s == "P3") return PolicyId::kP3;
  if (s == "CUSTOM") return PolicyId::kCustom;
  throw std::invalid_argument("unknown policy id: " + s);
}

static PolicyNode leaf(int org) {
  PolicyNode n;
  n.org = org;
  return n;
}

static PolicyNode n_of(int n, std::vector<PolicyNode> children) {
  PolicyNode node;
  node.n = n;
  node.children = std::move(children);
  return node;
}

PolicyNode expand_builtin(PolicyId id, int num_orgs) {
  if (num_orgs < 2) throw std::invalid_argument("UNSUPPORTED_N: need at least 2 orgs");
  std::vector<PolicyNode> all;
  for (int o = 0; o < num_orgs; ++o) all.push_back(leaf(o));
  switch (id) {
    case PolicyId::kP0:
      return n_of(num_orgs, std::move(all));
    case PolicyId::kP1: {
      std::vector<PolicyNode> rest(all.begin() + 1, all.end());
      return n_of(2, {leaf(0), n_of(1, std::move(rest))});
    }
    case PolicyId::kP2: {
      // First group takes orgs 0..N/2 inclusive, second the remainder,
      // which is empty below 3 orgs.
      if (num_orgs < 3)
        throw std::invalid_argument("UNSUPPORTED_N: P2 needs at least 3 orgs");
      int split = num_orgs / 2;
      std::vector<PolicyNode> first(all.begin(), all.begin() + split + 1);
      std::vector<PolicyNode> second(all.begin() + split + 1, all.end());
      return n_of(2, {n_of(1, std::move(first)), n_of(1, std::move(second))});
    }
    case PolicyId::kP3:
      return n_of(num_orgs / 2 + 1, std::move(all));
    case PolicyId::kCustom:
      throw std::invalid_argument("CUSTOM policies have no builtin expansion");
  }
  throw std::invalid_argument("unknown policy id");
}

static void collect_orgs(const PolicyNode& node, std::set<int>& out) {
  if (node.is_leaf()) {
    out.insert(node.org);
    return;
  }
  for (const PolicyNode& c : node.children) collect_orgs(c, out);
}

std::vector<int> policy_orgs(const PolicyNode& node) {
  std::set<int> s;
  collect_orgs(node, s);
  return {s.begin(), s.end()};
}

static bool satisfied(const PolicyNode& node, const std::set<int>& orgs) {
  if (node.is_leaf()) return orgs.count(node.org) > 0;
  int hits = 0;
  for (const PolicyNode& c : node.children)
    if (satisfied(c, orgs) && ++hits >= node.n) return true;
  return false;
}

std::optional<std::vector<size_t>> satisfying_subset(
    const PolicyNode& node, const std::vector<Endorsement>& endorsements) {
  // Any subset with pairwise-identical payloads lives inside one identity
  // group, and satisfaction only grows with more orgs, so checking whole
  // groups (in order of first appearance) is exact.
  std::vector<std::vector<size_t>> groups;
  for (size_t i = 0; i < endorsements.size(); ++i) {
    bool placed = false;
    for (auto& g : groups) {
      const Endorsement& rep = endorsements[g.front()];
      const Endorsement& e = endorsements[i];
      if (e.read_set == rep.read_set && e.range_reads == rep.range_reads &&
          e.write_set == rep.write_set) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  for (const auto& g : groups) {
    std::set<int> orgs;
    for (size_t i : g) orgs.insert(static_cast<int>(endorsements[i].org));
    if (satisfied(node, orgs)) return g;
  }
  return std::nullopt;
}

static int count_nested(const PolicyNode& node, bool below_root) {
  if (node.is_leaf()) return 0;
  int c = below_root ? 1 : 0;
  for (const PolicyNode& ch : node.children) c += count_nested(ch, true);
  return c;
}

int sub_policy_count(const PolicyNode& node) { return count_nested(node, false); }

int min_signatures(const PolicyNode& node) {
  if (node.is_leaf()) return 1;
  std::vector<int> mins;
  mins.reserve(node.children.size());
  for (const PolicyNode& c : node.children) mins.push_back(min_signatures(c));
  std::sort(mins.begin(), mins.end());
  int n = std::min<int>(node.n, static_cast<int>(mins.size()));
  return std::accumulate(mins.begin(), mins.begin() + n, 0);
}

double vscc_cost_ms(const PolicyNode& node, const VsccCostModel& m) {
  return m.base_ms + m.per_subpolicy_ms * sub_policy_count(node) +
         m.per_signature_ms * min_signatures(node);
}

// ---- textual syntax ----

namespace {

struct Token {
  enum Kind { kString, kInt, kColon, kLBracket, kRBracket, kLBrace, kRBrace, kComma, kEnd };
  Kind kind;
  std::string text;
  long value = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return {Token::kEnd, ""};
    char c = s_[pos_];
    switch (c) {
      case ':': ++pos_; return {Token::kColon, ":"};
      case '[': ++pos_; return {Token::kLBracket, "["};
      case ']': ++pos_; return {Token::kRBracket, "]"};
      case '{': ++pos_; return {Token::kLBrace, "{"};
      case '}': ++pos_; return {Token::kRBrace, "}"};
      case ',': ++pos_; return {Token::kComma, ","};
      case '"': {
        size_t end = s_.find('"', pos_ + 1);
        if (end == std::string::npos)
          throw std::invalid_argument("policy parse: unterminated string");
        Token t{Token::kString, s_.substr(pos_ + 1, end - pos_ - 1)};
        pos_ = end + 1;
        return t;
      }
      default:
        if (std::isdigit(static_cast<unsigned char>(c))) {
          size_t end = pos_;
          while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
          Token t{Token::kInt, s_.substr(pos_, end - pos_)};
          t.value = std::stol(t.text);
          pos_ = end;
          return t;
        }
        throw std::invalid_argument(std::string("policy parse: unexpected character '") + c +
                                    "'");
    }
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) { advance(); }

  PolicyNode parse() {
    PolicyNode n = clause();
    expect(Token::kEnd, "trailing input after policy");
    return n;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  void expect(Token::Kind k, const char* what) {
    if (cur_.kind != k) throw std::invalid_argument(std::string("policy parse: ") + what);
    advance();
  }

  // clause := '{'? key ':' body '}'?   where key is "signed-by" or "<n>-of"
  PolicyNode clause() {
    bool braced = cur_.kind == Token::kLBrace;
    if (braced) advance();
    if (cur_.kind != Token::kString)
      throw std::invalid_argument("policy parse: expected quoted key");
    std::string key = cur_.text;
    advance();
    expect(Token::kColon, "expected ':' after key");
    PolicyNode node;
    if (key == "signed-by") {
      if (cur_.kind != Token::kInt)
        throw std::invalid_argument("policy parse: signed-by needs an org id");
      node = leaf(static_cast<int>(cur_.value));
      advance();
    } else if (key.size() > 3 && key.substr(key.size() - 3) == "-of") {
      std::string num = key.substr(0, key.size() - 3);
      for (char c : num)
        if (!std::isdigit(static_cast<unsigned char>(c)))
          throw std::invalid_argument("policy parse: bad n-of key '" + key + "'");
      int n = std::stoi(num);
      expect(Token::kLBracket, "expected '[' after n-of");
      std::vector<PolicyNode> children;
      if (cur_.kind != Token::kRBracket) {
        children.push_back(clause());
        while (cur_.kind == Token::kComma) {
          advance();
          children.push_back(clause());
        }
      }
      expect(Token::kRBracket, "expected ']' closing n-of list");
      if (children.empty()) throw std::invalid_argument("policy parse: empty n-of list");
      if (n < 1 || n > static_cast<int>(children.size()))
        throw std::invalid_argument("policy parse: n out of range for n-of");
      node = n_of(n, std::move(children));
    } else {
      throw std::invalid_argument("policy parse: unknown key '" + key + "'");
    }
    if (braced) expect(Token::kRBrace, "expected '}' closing clause");
    return node;
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace

PolicyNode parse_policy(const std::string& text) { return Parser(text).parse(); }

std::string format_policy(const PolicyNode& node) {
  if (node.is_leaf()) return "\"signed-by\": " + std::to_string(node.org);
  std::string out = "\"" + std::to_string(node.n) + "-of\": [ ";
  for (size_t i = 0; i < node.children.size(); ++i) {
    if (i) out += ", ";
    out += format_policy(node.children[i]);
  }
  out += " ]";
  return out;
}

}  // namespace eovsim
