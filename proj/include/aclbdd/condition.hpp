/// @file  condition.hpp
/// @brief Query constraints over header fields and their textual syntax
///
/// Syntax:
///
///     Proto<-tcp, Port range 80 90, NOT(Proto<-icmp)
///     [Dest1<-120, Port range (80,90)] | Proto<-udp
///
/// Comma (or AND) is conjunction, `|` (or OR) disjunction, NOT negation;
/// parentheses and square brackets group. An empty string is TRUE.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aclbdd/acl.hpp"
#include "aclbdd/bdd.hpp"
#include "aclbdd/layout.hpp"

namespace aclbdd {

class ConditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Condition {
  enum class Kind : std::uint8_t { True, Range, Not, And, Or };

  Kind kind = Kind::True;
  Field field = Field::Proto;
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  std::vector<Condition> children;

  static Condition always() { return {}; }
  static Condition eq(Field f, std::uint32_t value) { return range(f, value, value); }
  static Condition range(Field f, std::uint32_t lo, std::uint32_t hi) {
    return {Kind::Range, f, lo, hi, {}};
  }
  static Condition negate(Condition c) { return {Kind::Not, Field::Proto, 0, 0, {std::move(c)}}; }
  static Condition all_of(std::vector<Condition> cs) {
    return {Kind::And, Field::Proto, 0, 0, std::move(cs)};
  }
  static Condition any_of(std::vector<Condition> cs) {
    return {Kind::Or, Field::Proto, 0, 0, std::move(cs)};
  }

  friend bool operator==(const Condition &, const Condition &) = default;
};

/// Throws ConditionError on a value outside the field's domain.
NodeRef condition_to_bdd(Manager &mgr, const VariableLayout &layout, const Condition &c);

/// Throws ConditionError with the offending position on bad input.
Condition parse_condition(std::string_view text,
                          const ProtocolTable &protocols = ProtocolTable::standard());

std::string to_string(const Condition &c);

} // namespace aclbdd
