#include "aclbdd/condition.hpp"

#include <cctype>
#include <charconv>

namespace aclbdd {

NodeRef condition_to_bdd(Manager &mgr, const VariableLayout &layout, const Condition &c) {
  switch (c.kind) {
  case Condition::Kind::True:
    return kTrue;
  case Condition::Kind::Range: {
    const auto max = layout.max_value(c.field);
    if (c.lo > c.hi || c.hi > max)
      throw ConditionError("condition " + to_string(c) + " is outside the domain 0.." +
                           std::to_string(max) + " of " + std::string(field_name(c.field)));
    return bv_in_range(mgr, layout.bitvec(mgr, c.field), c.lo, c.hi);
  }
  case Condition::Kind::Not:
    return mgr.neg(condition_to_bdd(mgr, layout, c.children.at(0)));
  case Condition::Kind::And: {
    NodeRef acc = kTrue;
    for (const auto &ch : c.children)
      acc = mgr.conj(acc, condition_to_bdd(mgr, layout, ch));
    return acc;
  }
  case Condition::Kind::Or: {
    NodeRef acc = kFalse;
    for (const auto &ch : c.children)
      acc = mgr.disj(acc, condition_to_bdd(mgr, layout, ch));
    return acc;
  }
  }
  return kFalse;
}

namespace {

struct Token {
  enum class Type { Ident, Number, Arrow, Comma, Bar, LParen, RParen, LBracket, RBracket, Eq, End };
  Type type;
  std::string_view text;
  std::size_t pos;
};

class ConditionParser {
public:
  ConditionParser(std::string_view text, const ProtocolTable &protocols)
      : text_(text), protocols_(protocols) {
    lex();
  }

  Condition parse() {
    if (peek().type == Token::Type::End)
      return Condition::always();
    auto c = expr();
    if (peek().type != Token::Type::End)
      fail(peek(), "unexpected input");
    return c;
  }

private:
  using T = Token::Type;

  [[noreturn]] void fail(const Token &t, const std::string &msg) const {
    throw ConditionError("condition: " + msg + " at offset " + std::to_string(t.pos) +
                         (t.text.empty() ? std::string() : " ('" + std::string(t.text) + "')"));
  }

  void lex() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      const auto start = i;
      auto single = [&](T type) {
        tokens_.push_back({type, text_.substr(start, 1), start});
        ++i;
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_'))
          ++i;
        tokens_.push_back({T::Ident, text_.substr(start, i - start), start});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i])))
          ++i;
        tokens_.push_back({T::Number, text_.substr(start, i - start), start});
      } else if (c == '<' && i + 1 < text_.size() && text_[i + 1] == '-') {
        tokens_.push_back({T::Arrow, text_.substr(start, 2), start});
        i += 2;
      } else if (c == ',') {
        single(T::Comma);
      } else if (c == '|') {
        single(T::Bar);
      } else if (c == '(') {
        single(T::LParen);
      } else if (c == ')') {
        single(T::RParen);
      } else if (c == '[') {
        single(T::LBracket);
      } else if (c == ']') {
        single(T::RBracket);
      } else if (c == '=') {
        single(T::Eq);
      } else {
        fail({T::End, text_.substr(start, 1), start}, "unexpected character");
      }
    }
    tokens_.push_back({T::End, {}, text_.size()});
  }

  const Token &peek() const { return tokens_[pos_]; }
  const Token &take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool keyword(std::string_view kw) const {
    const auto &t = peek();
    if (t.type != T::Ident || t.text.size() != kw.size())
      return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i])
        return false;
    return true;
  }
  void expect(T type, const char *what) {
    if (peek().type != type)
      fail(peek(), std::string("expected ") + what);
    take();
  }

  Condition expr() {
    std::vector<Condition> alts{conj()};
    while (peek().type == T::Bar || keyword("OR")) {
      take();
      alts.push_back(conj());
    }
    return alts.size() == 1 ? std::move(alts[0]) : Condition::any_of(std::move(alts));
  }

  Condition conj() {
    std::vector<Condition> parts{unary()};
    while (peek().type == T::Comma || keyword("AND")) {
      take();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? std::move(parts[0]) : Condition::all_of(std::move(parts));
  }

  Condition unary() {
    if (keyword("NOT")) {
      take();
      return Condition::negate(unary());
    }
    if (keyword("TRUE")) {
      take();
      return Condition::always();
    }
    if (peek().type == T::LParen) {
      take();
      auto c = expr();
      expect(T::RParen, "')'");
      return c;
    }
    if (peek().type == T::LBracket) {
      take();
      if (peek().type == T::RBracket) {
        take();
        return Condition::always();
      }
      auto c = expr();
      expect(T::RBracket, "']'");
      return c;
    }
    return atom();
  }

  std::uint32_t number() {
    const auto &t = peek();
    if (t.type != T::Number)
      fail(t, "expected a number");
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{})
      fail(t, "number out of range");
    take();
    return v;
  }

  std::uint32_t value(Field f) {
    const auto &t = peek();
    if (f == Field::Proto && t.type == T::Ident) {
      const auto *e = protocols_.find(t.text);
      if (!e)
        fail(t, "unknown protocol");
      take();
      return e->number;
    }
    return number();
  }

  Condition atom() {
    const auto &name = peek();
    if (name.type != T::Ident)
      fail(name, "expected a field name");
    const auto field = parse_field(name.text);
    if (!field)
      fail(name, "unknown field");
    take();
    if (peek().type == T::Arrow || peek().type == T::Eq) {
      take();
      return Condition::eq(*field, value(*field));
    }
    if (keyword("RANGE")) {
      take();
      const bool paren = peek().type == T::LParen;
      if (paren)
        take();
      const auto lo = value(*field);
      if (paren && peek().type == T::Comma)
        take();
      const auto hi = value(*field);
      if (paren)
        expect(T::RParen, "')'");
      if (lo > hi)
        fail(name, "range lower bound exceeds upper bound");
      return Condition::range(*field, lo, hi);
    }
    fail(peek(), "expected '<-' or 'range'");
  }

  std::string_view text_;
  const ProtocolTable &protocols_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

} // namespace

Condition parse_condition(std::string_view text, const ProtocolTable &protocols) {
  return ConditionParser(text, protocols).parse();
}

std::string to_string(const Condition &c) {
  switch (c.kind) {
  case Condition::Kind::True:
    return "TRUE";
  case Condition::Kind::Range:
    if (c.lo == c.hi)
      return std::string(field_name(c.field)) + "<-" + std::to_string(c.lo);
    return std::string(field_name(c.field)) + " range (" + std::to_string(c.lo) + "," +
           std::to_string(c.hi) + ")";
  case Condition::Kind::Not:
    return "NOT(" + to_string(c.children.at(0)) + ")";
  case Condition::Kind::And:
  case Condition::Kind::Or: {
    if (c.children.empty())
      return c.kind == Condition::Kind::And ? "TRUE" : "NOT(TRUE)";
    std::string out = "(";
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      if (i)
        out += c.kind == Condition::Kind::And ? ", " : " | ";
      out += to_string(c.children[i]);
    }
    return out + ")";
  }
  }
  return {};
}

} // namespace aclbdd
