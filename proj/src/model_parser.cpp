#include "defm/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "defm/errors.hpp"

namespace defm {

namespace {

struct Token {
  enum Type {
    ident,
    lbrace,
    rbrace,
    lparen,
    rparen,
    comma,
    plus,
    minus,
    star,
    equals,
    arrow,
    eol,
  };
  Type type;
  std::string text;
  int line;
  int col;
};

const char* token_name(Token::Type t) {
  switch (t) {
    case Token::ident: return "identifier";
    case Token::lbrace: return "'{'";
    case Token::rbrace: return "'}'";
    case Token::lparen: return "'('";
    case Token::rparen: return "')'";
    case Token::comma: return "','";
    case Token::plus: return "'+'";
    case Token::minus: return "'-'";
    case Token::star: return "'*'";
    case Token::equals: return "'='";
    case Token::arrow: return "'->'";
    case Token::eol: return "end of line";
  }
  return "?";
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Parser {
 public:
  explicit Parser(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      lines_.emplace_back(lineno, line);
    }
  }

  ModelSpec parse() {
    for (const auto& [lineno, raw] : lines_) {
      tokenize(lineno, raw);
      if (tokens_.empty()) continue;
      pos_ = 0;
      const Token& head = peek();
      if (head.type != Token::ident)
        error(head, "expected 'outcomes', 'term' or 'forbid'");
      if (head.text == "outcomes")
        parse_outcomes();
      else if (head.text == "term")
        parse_term();
      else if (head.text == "forbid")
        parse_forbid();
      else
        error(head, "expected 'outcomes', 'term' or 'forbid'");
    }
    finish();
    return std::move(spec_);
  }

 private:
  // --- lexing ------------------------------------------------------------

  void tokenize(int lineno, const std::string& raw) {
    tokens_.clear();
    std::size_t i = 0;
    while (i < raw.size()) {
      const char c = raw[i];
      const int col = static_cast<int>(i) + 1;
      if (c == '#') break;
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (c == '-' && i + 1 < raw.size() && raw[i + 1] == '>') {
        tokens_.push_back({Token::arrow, "->", lineno, col});
        i += 2;
        continue;
      }
      Token::Type type;
      switch (c) {
        case '{': type = Token::lbrace; break;
        case '}': type = Token::rbrace; break;
        case '(': type = Token::lparen; break;
        case ')': type = Token::rparen; break;
        case ',': type = Token::comma; break;
        case '+': type = Token::plus; break;
        case '-': type = Token::minus; break;
        case '*': type = Token::star; break;
        case '=': type = Token::equals; break;
        default: {
          if (!ident_char(c) || std::isdigit(static_cast<unsigned char>(c)))
            fail(errc::syntax, loc(lineno, col) + "unexpected character '" +
                                   std::string(1, c) + "'");
          std::size_t j = i;
          while (j < raw.size() && ident_char(raw[j])) ++j;
          tokens_.push_back({Token::ident, raw.substr(i, j - i), lineno, col});
          i = j;
          continue;
        }
      }
      tokens_.push_back({type, std::string(1, c), lineno, col});
      ++i;
    }
    tokens_.push_back({Token::eol, "", lineno, static_cast<int>(raw.size()) + 1});
  }

  // --- token stream helpers ----------------------------------------------

  const Token& peek() const { return tokens_[pos_]; }

  const Token& advance() { return tokens_[pos_++]; }

  const Token& expect(Token::Type type, const char* what = nullptr) {
    const Token& t = peek();
    if (t.type != type)
      error(t, std::string("expected ") + (what ? what : token_name(type)));
    return advance();
  }

  static std::string loc(int line, int col) {
    return "line " + std::to_string(line) + ", col " + std::to_string(col) +
           ": ";
  }

  [[noreturn]] void error(const Token& t, const std::string& msg) const {
    std::string found =
        t.type == Token::eol ? "end of line" : "'" + t.text + "'";
    fail(errc::syntax, loc(t.line, t.col) + msg + ", found " + found);
  }

  // --- productions ---------------------------------------------------------

  void parse_outcomes() {
    const Token& kw = advance();
    if (!spec_.outcomes.empty())
      fail(errc::syntax, loc(kw.line, kw.col) + "duplicate 'outcomes' line");
    for (;;) {
      const Token& name = expect(Token::ident, "outcome name");
      if (outcome_index_.count(name.text))
        fail(errc::syntax, loc(name.line, name.col) + "duplicate outcome '" +
                               name.text + "'");
      outcome_index_[name.text] = spec_.outcomes.size();
      spec_.outcomes.push_back(name.text);
      if (peek().type != Token::comma) break;
      advance();
    }
    expect(Token::eol);
  }

  void parse_term() {
    advance();  // 'term'
    const Token& name = expect(Token::ident, "term name");
    for (const auto& t : spec_.terms)
      if (t.name == name.text)
        fail(errc::duplicate_term, loc(name.line, name.col) +
                                       "duplicate term '" + name.text + "'");
    expect(Token::equals);

    TermDecl term;
    term.name = name.text;

    if (peek().type == Token::ident && peek().text == "logit") {
      const Token& kw = advance();
      expect(Token::lparen);
      const Token& outcome = expect(Token::ident, "outcome name");
      check_outcome(outcome);
      expect(Token::rparen);
      term.kind = TermKind::logit;
      PatternPair p;
      p.cur.emplace_back(outcome.text, true);
      term.patterns.push_back(std::move(p));
      (void)kw;
    } else {
      auto [first, first_tok] = parse_pattern();
      if (peek().type == Token::arrow) {
        advance();
        auto [second, second_tok] = parse_pattern();
        (void)second_tok;
        term.kind = TermKind::transition;
        PatternPair p;
        p.prev = std::move(first);
        p.cur = std::move(second);
        term.patterns.push_back(std::move(p));
      } else {
        term.kind = TermKind::association;
        PatternPair p;
        p.cur = std::move(first);
        term.patterns.push_back(std::move(p));
        while (peek().type == Token::plus) {
          advance();
          auto [next, next_tok] = parse_pattern();
          (void)next_tok;
          PatternPair q;
          q.cur = std::move(next);
          term.patterns.push_back(std::move(q));
        }
        check_association(term, first_tok);
      }
    }

    if (peek().type == Token::star) {
      advance();
      const Token& cov = expect(Token::ident, "covariate name");
      term.covariate = cov.text;
    }
    expect(Token::eol);
    spec_.terms.push_back(std::move(term));
  }

  void parse_forbid() {
    advance();  // 'forbid'
    auto [prev, prev_tok] = parse_pattern();
    (void)prev_tok;
    expect(Token::arrow);
    auto [cur, cur_tok] = parse_pattern();
    (void)cur_tok;
    expect(Token::eol);
    PatternPair p;
    p.prev = std::move(prev);
    p.cur = std::move(cur);
    spec_.forbids.push_back(std::move(p));
  }

  std::pair<std::vector<std::pair<std::string, bool>>, Token> parse_pattern() {
    const Token& open = expect(Token::lbrace, "'{'");
    std::vector<std::pair<std::string, bool>> constraints;
    std::set<std::string> seen;
    for (;;) {
      const Token& name = expect(Token::ident, "outcome name");
      check_outcome(name);
      if (!seen.insert(name.text).second)
        fail(errc::syntax, loc(name.line, name.col) +
                               "outcome '" + name.text +
                               "' constrained twice in one pattern");
      bool value;
      if (peek().type == Token::plus)
        value = true;
      else if (peek().type == Token::minus)
        value = false;
      else
        error(peek(), "expected '+' or '-' after outcome name");
      advance();
      constraints.emplace_back(name.text, value);
      if (peek().type != Token::comma) break;
      advance();
    }
    expect(Token::rbrace);
    // Canonical order: outcome declaration order.
    std::sort(constraints.begin(), constraints.end(),
              [&](const auto& a, const auto& b) {
                return outcome_index_.at(a.first) < outcome_index_.at(b.first);
              });
    return {std::move(constraints), open};
  }

  // --- semantic checks -----------------------------------------------------

  void check_outcome(const Token& name) {
    if (spec_.outcomes.empty())
      fail(errc::syntax,
           loc(name.line, name.col) + "'outcomes' line must come first");
    if (!outcome_index_.count(name.text))
      fail(errc::unknown_outcome, loc(name.line, name.col) +
                                      "unknown outcome '" + name.text + "'");
  }

  void check_association(const TermDecl& term, const Token& at) {
    std::set<std::string> referenced;
    for (const auto& p : term.patterns)
      for (const auto& [name, value] : p.cur) referenced.insert(name);
    if (referenced.size() < 2)
      fail(errc::syntax,
           loc(at.line, at.col) +
               "association term '" + term.name +
               "' must constrain at least two outcomes (use logit(...) for "
               "single-outcome terms)");
  }

  void finish() const {
    if (spec_.outcomes.empty())
      fail(errc::syntax, "model declares no outcomes");
    if (spec_.terms.empty())
      fail(errc::syntax, "model declares no terms");
  }

  std::vector<std::pair<int, std::string>> lines_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  ModelSpec spec_;
  std::map<std::string, std::size_t> outcome_index_;
};

void print_constraints(std::ostream& os,
                       const std::vector<std::pair<std::string, bool>>& cs) {
  os << '{';
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) os << ", ";
    os << cs[i].first << (cs[i].second ? '+' : '-');
  }
  os << '}';
}

}  // namespace

ModelSpec parse_model(const std::string& text) { return Parser(text).parse(); }

std::string to_text(const ModelSpec& spec) {
  std::ostringstream os;
  os << "outcomes ";
  for (std::size_t i = 0; i < spec.outcomes.size(); ++i) {
    if (i) os << ", ";
    os << spec.outcomes[i];
  }
  os << '\n';
  for (const auto& term : spec.terms) {
    os << "term " << term.name << " = ";
    switch (term.kind) {
      case TermKind::logit:
        os << "logit(" << term.patterns.front().cur.front().first << ')';
        break;
      case TermKind::transition:
        print_constraints(os, term.patterns.front().prev);
        os << " -> ";
        print_constraints(os, term.patterns.front().cur);
        break;
      case TermKind::association:
        for (std::size_t i = 0; i < term.patterns.size(); ++i) {
          if (i) os << " + ";
          print_constraints(os, term.patterns[i].cur);
        }
        break;
    }
    if (term.covariate) os << " * " << *term.covariate;
    os << '\n';
  }
  for (const auto& forbid : spec.forbids) {
    os << "forbid ";
    print_constraints(os, forbid.prev);
    os << " -> ";
    print_constraints(os, forbid.cur);
    os << '\n';
  }
  return os.str();
}

}  // namespace defm
