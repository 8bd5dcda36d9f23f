#include "aclbdd/compiler.hpp"

namespace aclbdd {

namespace {

void check_fits(const Rule &rule, std::uint64_t value, unsigned width, const char *what) {
  if (value >> width)
    throw CompileError(rule.source_line, std::string(what) + " " + std::to_string(value) +
                                             " does not fit in " + std::to_string(width) +
                                             " bits");
}

} // namespace

NodeRef compile_rule(Manager &mgr, const VariableLayout &layout, const Rule &rule) {
  const auto &w = layout.widths();
  check_fits(rule, rule.protocol.number, w.proto, "protocol number");
  for (std::size_t s = 0; s < 4; ++s) {
    check_fits(rule, rule.src.base[s], w.segment, "source segment");
    check_fits(rule, rule.src.mask[s], w.segment, "source mask segment");
    check_fits(rule, rule.dst.base[s], w.segment, "destination segment");
    check_fits(rule, rule.dst.mask[s], w.segment, "destination mask segment");
  }
  if (rule.port) {
    check_fits(rule, rule.port->lo, w.port, "port");
    check_fits(rule, rule.port->hi, w.port, "port");
  }

  // Conjoin from the bottom of the default order upwards so intermediate
  // results stay small.
  NodeRef acc = kTrue;
  for (std::size_t s = 4; s-- > 0;)
    acc = mgr.conj(masked_eq(mgr, layout.bitvec(mgr, dest_field(s)), rule.dst.base[s],
                             rule.dst.mask[s]),
                   acc);
  for (std::size_t s = 4; s-- > 0;)
    acc = mgr.conj(
        masked_eq(mgr, layout.bitvec(mgr, src_field(s)), rule.src.base[s], rule.src.mask[s]), acc);
  if (rule.port)
    acc = mgr.conj(bv_in_range(mgr, layout.bitvec(mgr, Field::Port), rule.port->lo, rule.port->hi),
                   acc);
  return mgr.conj(bv_eq_const(mgr, layout.bitvec(mgr, Field::Proto), rule.protocol.number), acc);
}

NodeRef fold_rules(Manager &mgr, std::span<const Rule> rules, std::span<const NodeRef> match,
                   NodeRef tail) {
  if (rules.size() != match.size())
    throw std::invalid_argument("fold_rules: rule and condition counts differ");
  NodeRef acc = tail;
  for (std::size_t i = rules.size(); i-- > 0;)
    acc = rules[i].action == Action::Permit ? mgr.disj(match[i], acc)
                                            : mgr.conj(mgr.neg(match[i]), acc);
  return acc;
}

CompiledRuleSet compile_ruleset(Manager &mgr, const VariableLayout &layout, const RuleSet &rs) {
  if (mgr.var_count() != layout.variable_count() || mgr.levels() != layout.levels())
    throw std::invalid_argument("manager order does not match the layout");
  CompiledRuleSet out{kFalse, {}, layout, rs};
  out.per_rule.reserve(rs.size());
  for (const auto &r : rs.rules)
    out.per_rule.push_back(compile_rule(mgr, layout, r));
  out.accept = fold_rules(mgr, rs.rules, out.per_rule);
  return out;
}

} // namespace aclbdd
