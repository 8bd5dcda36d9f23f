/// @file  compiler.hpp
/// @brief Access-list rules to boolean functions over a `VariableLayout`

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "aclbdd/acl.hpp"
#include "aclbdd/bdd.hpp"
#include "aclbdd/layout.hpp"

namespace aclbdd {

/// A rule field does not fit the layout's widths.
class CompileError : public std::runtime_error {
public:
  CompileError(std::size_t line, const std::string &message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

struct CompiledRuleSet {
  /// Packets the rule set accepts.
  NodeRef accept = kFalse;
  /// Match condition of each rule, independent of its action.
  std::vector<NodeRef> per_rule;
  VariableLayout layout;
  RuleSet source;
};

/// Match condition of one rule: protocol cube, masked source and destination
/// segments, and the port range (no constraint when the port is absent).
NodeRef compile_rule(Manager &mgr, const VariableLayout &layout, const Rule &rule);

/// First-match fold, last rule first: a permit contributes `match | rest`, a
/// deny `~match & rest`; the empty tail is FALSE (implicit deny).
/// `match[i]` is the condition of `rules[i]`.
NodeRef fold_rules(Manager &mgr, std::span<const Rule> rules, std::span<const NodeRef> match,
                   NodeRef tail = kFalse);

CompiledRuleSet compile_ruleset(Manager &mgr, const VariableLayout &layout, const RuleSet &rs);

} // namespace aclbdd
