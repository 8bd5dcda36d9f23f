#include "aclbdd/analysis.hpp"

#include <algorithm>
#include <unordered_map>

namespace aclbdd {

NodeRef instantiate(Manager &mgr, const VariableLayout &layout, const Condition &c, NodeRef f) {
  return mgr.conj(condition_to_bdd(mgr, layout, c), f);
}

namespace {

/// Per-call memo of each node's support as a variable bitmask.
class SupportCache {
public:
  explicit SupportCache(const Manager &mgr)
      : mgr_(mgr), words_((mgr.var_count() + 63) / 64) {}

  [[nodiscard]] std::vector<std::uint64_t> mask(std::span<const VarId> vars) const {
    std::vector<std::uint64_t> m(words_, 0);
    for (auto v : vars)
      m[v / 64] |= std::uint64_t{1} << (v % 64);
    return m;
  }

  bool depends_on_any(NodeRef f, const std::vector<std::uint64_t> &vars) {
    const auto &s = get(f);
    for (std::size_t i = 0; i < words_; ++i)
      if (s[i] & vars[i])
        return true;
    return false;
  }

private:
  const std::vector<std::uint64_t> &get(NodeRef f) {
    if (auto it = memo_.find(f); it != memo_.end())
      return it->second;
    std::vector<std::uint64_t> s(words_, 0);
    if (!f.is_terminal()) {
      const auto v = mgr_.top_var(f);
      s[v / 64] |= std::uint64_t{1} << (v % 64);
      const auto &lo = get(mgr_.low(f));
      for (std::size_t i = 0; i < words_; ++i)
        s[i] |= lo[i];
      const auto &hi = get(mgr_.high(f));
      for (std::size_t i = 0; i < words_; ++i)
        s[i] |= hi[i];
    }
    return memo_.emplace(f, std::move(s)).first->second;
  }

  const Manager &mgr_;
  std::size_t words_;
  std::unordered_map<NodeRef, std::vector<std::uint64_t>> memo_;
};

class FieldPartitioner {
public:
  FieldPartitioner(Manager &mgr, const VariableLayout &layout)
      : mgr_(mgr), layout_(layout), support_(mgr) {
    for (auto f : kAllFields) {
      const auto vars = layout.vars(f);
      auto &tails = tail_masks_[field_index(f)];
      for (std::size_t i = 0; i <= vars.size(); ++i)
        tails.push_back(support_.mask(vars.subspan(i)));
    }
  }

  std::vector<std::pair<Interval, NodeRef>> run(Field field, NodeRef f) {
    out_.clear();
    field_ = field;
    split(f, 0, 0);
    return std::move(out_);
  }

private:
  // Cofactor of f is constant over all values sharing the top `i` bits
  // `prefix` once f no longer depends on the remaining bits.
  void split(NodeRef f, unsigned i, std::uint64_t prefix) {
    const auto vars = layout_.vars(field_);
    const auto w = static_cast<unsigned>(vars.size());
    if (!support_.depends_on_any(f, tail_masks_[field_index(field_)][i])) {
      const auto rest = w - i;
      const auto lo = static_cast<std::uint32_t>(prefix << rest);
      const auto hi = static_cast<std::uint32_t>(((prefix + 1) << rest) - 1);
      emit({lo, hi}, f);
      return;
    }
    const VarId v = vars[i];
    const bool zero = false, one = true;
    split(mgr_.restrict(f, {&v, 1}, {&zero, 1}), i + 1, prefix << 1);
    split(mgr_.restrict(f, {&v, 1}, {&one, 1}), i + 1, (prefix << 1) | 1);
  }

  void emit(Interval iv, NodeRef g) {
    if (!out_.empty() && out_.back().second == g && out_.back().first.hi + 1 == iv.lo) {
      out_.back().first.hi = iv.hi;
      return;
    }
    out_.emplace_back(iv, g);
  }

  Manager &mgr_;
  const VariableLayout &layout_;
  SupportCache support_;
  std::array<std::vector<std::vector<std::uint64_t>>, kFieldCount> tail_masks_;
  Field field_ = Field::Proto;
  std::vector<std::pair<Interval, NodeRef>> out_;
};

class TableBuilder {
public:
  TableBuilder(Manager &mgr, const VariableLayout &layout, std::vector<Field> columns,
               std::size_t budget)
      : partitioner_(mgr, layout), budget_(budget) {
    table_.columns = std::move(columns);
    current_.resize(table_.columns.size());
  }

  Table run(NodeRef f) {
    if (!f.is_false()) {
      if (table_.columns.empty())
        throw std::invalid_argument("a table needs at least one column");
      rec(0, f, 0);
    }
    return std::move(table_);
  }

private:
  void rec(std::size_t col, NodeRef g, std::size_t diverge) {
    bool first = true;
    for (const auto &[iv, cof] : partitioner_.run(table_.columns[col], g)) {
      if (cof.is_false())
        continue;
      const auto d = first ? diverge : col;
      first = false;
      current_[col] = iv;
      if (col + 1 < table_.columns.size()) {
        rec(col + 1, cof, d);
        continue;
      }
      if (!cof.is_true())
        throw std::logic_error("table columns do not cover the function's support");
      if (budget_ != 0 && table_.rows.size() >= budget_)
        throw RowBudgetExceeded(budget_);
      table_.rows.push_back({current_, d});
    }
  }

  FieldPartitioner partitioner_;
  std::size_t budget_;
  Table table_;
  std::vector<Interval> current_;
};

} // namespace

std::vector<std::pair<Interval, NodeRef>> partition_field(Manager &mgr,
                                                          const VariableLayout &layout, Field field,
                                                          NodeRef f) {
  return FieldPartitioner(mgr, layout).run(field, f);
}

Table show_conditions(Manager &mgr, const VariableLayout &layout, std::span<const Field> order,
                      NodeRef f, std::size_t row_budget) {
  return TableBuilder(mgr, layout, complete_order(order), row_budget).run(f);
}

Table give_summary(Manager &mgr, const VariableLayout &layout, std::span<const Field> columns,
                   NodeRef f, std::size_t row_budget) {
  if (columns.empty())
    throw std::invalid_argument("summary needs at least one column");
  check_distinct(columns);
  std::vector<Field> hidden;
  for (auto fld : kAllFields)
    if (std::find(columns.begin(), columns.end(), fld) == columns.end())
      hidden.push_back(fld);
  const auto projected = mgr.exists(f, layout.vars(hidden));
  return TableBuilder(mgr, layout, {columns.begin(), columns.end()}, row_budget).run(projected);
}

NodeRef table_function(Manager &mgr, const VariableLayout &layout, const Table &table) {
  check_distinct(table.columns);
  std::vector<BitVec> vecs;
  for (auto f : table.columns)
    vecs.push_back(layout.bitvec(mgr, f));
  NodeRef acc = kFalse;
  for (const auto &row : table.rows) {
    if (row.cells.size() != table.columns.size())
      throw std::invalid_argument("table row width does not match its columns");
    NodeRef cube = kTrue;
    for (std::size_t c = row.cells.size(); c-- > 0;)
      cube = mgr.conj(bv_in_range(mgr, vecs[c], row.cells[c].lo, row.cells[c].hi), cube);
    acc = mgr.disj(acc, cube);
  }
  return acc;
}

DiffResult diff(Manager &mgr, const CompiledRuleSet &old_set, const CompiledRuleSet &new_set) {
  if (!old_set.layout.compatible(new_set.layout) ||
      mgr.levels() != old_set.layout.levels())
    throw std::invalid_argument("diff: rule sets were compiled with different layouts");
  if (!mgr.owns(old_set.accept) || !mgr.owns(new_set.accept))
    throw std::invalid_argument("diff: rule sets must share one manager");
  DiffResult d;
  d.newallow = mgr.conj(new_set.accept, mgr.neg(old_set.accept));
  d.newdeny = mgr.conj(old_set.accept, mgr.neg(new_set.accept));
  return d;
}

std::vector<RedundantRule> find_redundant(Manager &mgr, const CompiledRuleSet &crs) {
  const auto &rules = crs.source.rules;
  const auto n = rules.size();
  std::vector<bool> redundant(n, false);
  // Fold of the kept rules after position i.
  NodeRef suffix = kFalse;
  for (std::size_t i = n; i-- > 0;) {
    const auto head = std::span<const Rule>(rules).first(i);
    const auto head_match = std::span<const NodeRef>(crs.per_rule).first(i);
    const auto without = fold_rules(mgr, head, head_match, suffix);
    if (without == crs.accept) {
      redundant[i] = true;
      continue;
    }
    suffix = fold_rules(mgr, std::span<const Rule>(rules).subspan(i, 1),
                        std::span<const NodeRef>(crs.per_rule).subspan(i, 1), suffix);
  }
  std::vector<RedundantRule> out;
  for (std::size_t i = 0; i < n; ++i)
    if (redundant[i])
      out.push_back({i, rules[i].source_line, rules[i].text.empty() ? unparse(rules[i])
                                                                    : rules[i].text});
  return out;
}

std::vector<RedundantRule> find_redundant(Manager &mgr, const VariableLayout &layout,
                                          const RuleSet &rs) {
  return find_redundant(mgr, compile_ruleset(mgr, layout, rs));
}

void check_packet(const VariableLayout &layout, const Packet &p) {
  for (auto f : kAllFields)
    if (p.value(f) > layout.max_value(f))
      throw std::out_of_range("packet field " + std::string(field_name(f)) + " value " +
                              std::to_string(p.value(f)) + " exceeds " +
                              std::to_string(layout.max_value(f)));
}

bool rule_matches(const Rule &rule, const Packet &p) noexcept {
  if (rule.protocol.number != p.proto)
    return false;
  for (std::size_t s = 0; s < 4; ++s) {
    if ((p.src[s] | rule.src.mask[s]) != (rule.src.base[s] | rule.src.mask[s]))
      return false;
    if ((p.dst[s] | rule.dst.mask[s]) != (rule.dst.base[s] | rule.dst.mask[s]))
      return false;
  }
  return !rule.port || (rule.port->lo <= p.port && p.port <= rule.port->hi);
}

std::optional<std::size_t> first_match(const RuleSet &rs, const Packet &p) noexcept {
  for (std::size_t i = 0; i < rs.rules.size(); ++i)
    if (rule_matches(rs.rules[i], p))
      return i;
  return std::nullopt;
}

bool linear_accept(const RuleSet &rs, const Packet &p) noexcept {
  const auto m = first_match(rs, p);
  return m && rs.rules[*m].action == Action::Permit;
}

bool bdd_accept(const Manager &mgr, const VariableLayout &layout, NodeRef f, const Packet &p) {
  const auto fields = layout.var_fields();
  const auto shifts = layout.var_shifts();
  return mgr.eval_with(f, [&](VarId v) { return (p.value(fields[v]) >> shifts[v]) & 1u; });
}

PacketVerdict eval_packet(const Manager &mgr, const CompiledRuleSet &crs, const Packet &p) {
  check_packet(crs.layout, p);
  PacketVerdict out;
  out.accept = bdd_accept(mgr, crs.layout, crs.accept, p);
  out.matched_rule = first_match(crs.source, p);
  out.linear_accept =
      out.matched_rule && crs.source.rules[*out.matched_rule].action == Action::Permit;
  return out;
}

std::vector<std::int8_t> packet_assignment(const VariableLayout &layout, const Packet &p) {
  check_packet(layout, p);
  std::vector<std::int8_t> out(layout.variable_count());
  for (VarId v = 0; v < out.size(); ++v)
    out[v] = static_cast<std::int8_t>((p.value(layout.field_of(v)) >> layout.shift_of(v)) & 1u);
  return out;
}

} // namespace aclbdd
