#include "aclbdd/bdd.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace aclbdd {

namespace {

std::uint32_t next_tag() {
  static std::atomic<std::uint32_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

inline std::size_t mix(std::size_t seed, std::uint64_t v) {
  v *= 0x9e3779b97f4a7c15ULL;
  v ^= v >> 29;
  return seed ^ (v + 0x9e3779b9 + (seed << 6) + (seed >> 2));
}

std::vector<std::uint32_t> identity_levels(std::uint32_t n) {
  std::vector<std::uint32_t> levels(n);
  std::iota(levels.begin(), levels.end(), 0u);
  return levels;
}

} // namespace

std::size_t Manager::TripleHash::operator()(const Node &n) const noexcept {
  return mix(mix(mix(0, n.var), n.low), n.high);
}

std::size_t Manager::Key3Hash::operator()(const Key3 &k) const noexcept {
  return mix(mix(mix(0, k.a), k.b), k.c);
}

Manager::Manager(std::uint32_t var_count) : Manager(identity_levels(var_count)) {}

Manager::Manager(std::vector<std::uint32_t> var_levels)
    : tag_(next_tag()), level_of_(std::move(var_levels)) {
  const auto n = static_cast<std::uint32_t>(level_of_.size());
  var_at_.assign(n, n);
  for (VarId v = 0; v < n; ++v) {
    const auto l = level_of_[v];
    if (l >= n || var_at_[l] != n)
      throw BddError("variable levels must be a permutation of 0.." + std::to_string(n) + "-1");
    var_at_[l] = v;
  }
  // Slots 0 and 1 are the terminals.
  nodes_.push_back({n, 0, 0});
  nodes_.push_back({n, 1, 1});
}

std::uint32_t Manager::level(VarId v) const {
  check_var(v);
  return level_of_[v];
}

VarId Manager::var_at_level(std::uint32_t l) const {
  if (l >= var_count())
    throw BddError("level " + std::to_string(l) + " out of range");
  return var_at_[l];
}

void Manager::check_owned(NodeRef a) const {
  if (!owns(a))
    throw BddError("node handle does not belong to this manager");
}

void Manager::check_var(VarId v) const {
  if (v >= var_count())
    throw BddError("variable " + std::to_string(v) + " out of range (manager has " +
                   std::to_string(var_count()) + ")");
}

std::uint32_t Manager::make(VarId var, std::uint32_t low, std::uint32_t high) {
  if (low == high)
    return low;
  const Node key{var, low, high};
  if (auto it = unique_.find(key); it != unique_.end())
    return it->second;
  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(key);
  unique_.emplace(key, idx);
  return idx;
}

NodeRef Manager::mk(VarId var, NodeRef low, NodeRef high) {
  check_var(var);
  check_owned(low);
  check_owned(high);
  const auto l = level_of_[var];
  if (l >= node_level(low.index) || l >= node_level(high.index))
    throw BddError("mk: variable " + std::to_string(var) +
                   " does not precede the top variables of its children");
  return ref(make(var, low.index, high.index));
}

NodeRef Manager::var(VarId v) { return mk(v, kFalse, kTrue); }
NodeRef Manager::nvar(VarId v) { return mk(v, kTrue, kFalse); }

VarId Manager::top_var(NodeRef a) const {
  check_owned(a);
  if (a.is_terminal())
    throw BddError("terminal has no top variable");
  return nodes_[a.index].var;
}

NodeRef Manager::low(NodeRef a) const {
  check_owned(a);
  if (a.is_terminal())
    throw BddError("terminal has no children");
  return ref(nodes_[a.index].low);
}

NodeRef Manager::high(NodeRef a) const {
  check_owned(a);
  if (a.is_terminal())
    throw BddError("terminal has no children");
  return ref(nodes_[a.index].high);
}

std::uint32_t Manager::apply_rec(BinOp op, std::uint32_t a, std::uint32_t b) {
  switch (op) {
  case BinOp::And:
    if (a == 0 || b == 0)
      return 0;
    if (a == 1 || a == b)
      return b;
    if (b == 1)
      return a;
    break;
  case BinOp::Or:
    if (a == 1 || b == 1)
      return 1;
    if (a == 0 || a == b)
      return b;
    if (b == 0)
      return a;
    break;
  case BinOp::Xor:
    if (a == b)
      return 0;
    if (a == 0)
      return b;
    if (b == 0)
      return a;
    if (a == 1)
      return neg_rec(b);
    if (b == 1)
      return neg_rec(a);
    break;
  case BinOp::Implies:
    if (a == 0 || b == 1 || a == b)
      return 1;
    if (a == 1)
      return b;
    if (b == 0)
      return neg_rec(a);
    break;
  }
  if (op != BinOp::Implies && a > b)
    std::swap(a, b);

  const Key3 key{a, b, static_cast<std::uint32_t>(op)};
  if (auto it = apply_cache_.find(key); it != apply_cache_.end())
    return it->second;

  const auto la = node_level(a);
  const auto lb = node_level(b);
  const auto top = std::min(la, lb);
  const auto a0 = la == top ? nodes_[a].low : a;
  const auto a1 = la == top ? nodes_[a].high : a;
  const auto b0 = lb == top ? nodes_[b].low : b;
  const auto b1 = lb == top ? nodes_[b].high : b;
  const auto lo = apply_rec(op, a0, b0);
  const auto hi = apply_rec(op, a1, b1);
  const auto r = make(var_at_[top], lo, hi);
  apply_cache_.emplace(key, r);
  return r;
}

NodeRef Manager::apply(BinOp op, NodeRef a, NodeRef b) {
  check_owned(a);
  check_owned(b);
  return ref(apply_rec(op, a.index, b.index));
}

std::uint32_t Manager::neg_rec(std::uint32_t a) {
  if (a < 2)
    return 1 - a;
  if (auto it = neg_cache_.find(a); it != neg_cache_.end())
    return it->second;
  const Node n = nodes_[a];
  const auto lo = neg_rec(n.low);
  const auto hi = neg_rec(n.high);
  const auto r = make(n.var, lo, hi);
  neg_cache_.emplace(a, r);
  neg_cache_.emplace(r, a);
  return r;
}

NodeRef Manager::neg(NodeRef a) {
  check_owned(a);
  return ref(neg_rec(a.index));
}

std::uint32_t Manager::ite_rec(std::uint32_t c, std::uint32_t t, std::uint32_t e) {
  if (c == 1)
    return t;
  if (c == 0)
    return e;
  if (t == e)
    return t;
  if (t == 1 && e == 0)
    return c;
  if (t == 0 && e == 1)
    return neg_rec(c);
  if (t == 1)
    return apply_rec(BinOp::Or, c, e);
  if (e == 0)
    return apply_rec(BinOp::And, c, t);

  const Key3 key{c, t, e};
  if (auto it = ite_cache_.find(key); it != ite_cache_.end())
    return it->second;

  const auto top = std::min({node_level(c), node_level(t), node_level(e)});
  auto cof = [&](std::uint32_t x, bool hi) {
    return node_level(x) == top ? (hi ? nodes_[x].high : nodes_[x].low) : x;
  };
  const auto lo = ite_rec(cof(c, false), cof(t, false), cof(e, false));
  const auto hi = ite_rec(cof(c, true), cof(t, true), cof(e, true));
  const auto r = make(var_at_[top], lo, hi);
  ite_cache_.emplace(key, r);
  return r;
}

NodeRef Manager::ite(NodeRef c, NodeRef t, NodeRef e) {
  check_owned(c);
  check_owned(t);
  check_owned(e);
  return ref(ite_rec(c.index, t.index, e.index));
}

NodeRef Manager::exists(NodeRef a, std::span<const VarId> vars) {
  check_owned(a);
  std::vector<char> quantified(var_count(), 0);
  std::uint32_t deepest = 0;
  for (auto v : vars) {
    check_var(v);
    quantified[v] = 1;
    deepest = std::max(deepest, level_of_[v] + 1);
  }
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  auto rec = [&](auto &self, std::uint32_t i) -> std::uint32_t {
    if (i < 2 || node_level(i) >= deepest)
      return i;
    if (auto it = memo.find(i); it != memo.end())
      return it->second;
    const Node n = nodes_[i];
    const auto lo = self(self, n.low);
    const auto hi = self(self, n.high);
    const auto r = quantified[n.var] ? apply_rec(BinOp::Or, lo, hi) : make(n.var, lo, hi);
    memo.emplace(i, r);
    return r;
  };
  return ref(rec(rec, a.index));
}

NodeRef Manager::restrict(NodeRef a, std::span<const VarId> vars, std::span<const bool> values) {
  check_owned(a);
  if (vars.size() != values.size())
    throw BddError("restrict: variable and value lists differ in length");
  std::vector<std::int8_t> fixed(var_count(), -1);
  std::uint32_t deepest = 0;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    check_var(vars[k]);
    fixed[vars[k]] = values[k] ? 1 : 0;
    deepest = std::max(deepest, level_of_[vars[k]] + 1);
  }
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  auto rec = [&](auto &self, std::uint32_t i) -> std::uint32_t {
    if (i < 2 || node_level(i) >= deepest)
      return i;
    if (auto it = memo.find(i); it != memo.end())
      return it->second;
    const Node n = nodes_[i];
    std::uint32_t r;
    if (fixed[n.var] >= 0)
      r = self(self, fixed[n.var] ? n.high : n.low);
    else
      r = make(n.var, self(self, n.low), self(self, n.high));
    memo.emplace(i, r);
    return r;
  };
  return ref(rec(rec, a.index));
}

std::vector<VarId> Manager::support(NodeRef a) const {
  check_owned(a);
  std::vector<char> seen_var(var_count(), 0);
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack{a.index};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (i < 2 || !seen.insert(i).second)
      continue;
    seen_var[nodes_[i].var] = 1;
    stack.push_back(nodes_[i].low);
    stack.push_back(nodes_[i].high);
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < var_count(); ++v)
    if (seen_var[v])
      out.push_back(v);
  return out;
}

bool Manager::eval(NodeRef a, std::span<const std::int8_t> assignment) const {
  check_owned(a);
  std::uint32_t i = a.index;
  while (i > 1) {
    const Node &n = nodes_[i];
    if (n.var >= assignment.size() || assignment[n.var] < 0)
      throw BddError("eval: variable " + std::to_string(n.var) + " is unassigned");
    i = assignment[n.var] ? n.high : n.low;
  }
  return i == 1;
}

BddStats Manager::stats(NodeRef a) const {
  check_owned(a);
  std::unordered_map<std::uint32_t, std::size_t> depth;
  auto rec = [&](auto &self, std::uint32_t i) -> std::size_t {
    if (i < 2)
      return 0;
    if (auto it = depth.find(i); it != depth.end())
      return it->second;
    const Node &n = nodes_[i];
    const auto d = 1 + std::max(self(self, n.low), self(self, n.high));
    depth.emplace(i, d);
    return d;
  };
  BddStats s;
  s.max_depth = rec(rec, a.index);
  s.node_count = depth.size();
  return s;
}

BigCount Manager::sat_count(NodeRef a, std::span<const VarId> vars) const {
  check_owned(a);
  std::vector<std::uint32_t> set_levels;
  set_levels.reserve(vars.size());
  std::vector<char> in_set(var_count(), 0);
  for (auto v : vars) {
    check_var(v);
    if (!in_set[v])
      set_levels.push_back(level_of_[v]);
    in_set[v] = 1;
  }
  for (auto v : support(a))
    if (!in_set[v])
      throw BddError("sat_count: variable " + std::to_string(v) +
                     " in the support is outside the counted set");
  std::sort(set_levels.begin(), set_levels.end());
  const auto k = set_levels.size();
  auto pos = [&](std::uint32_t i) -> std::size_t {
    if (i < 2)
      return k;
    const auto l = node_level(i);
    return static_cast<std::size_t>(
        std::lower_bound(set_levels.begin(), set_levels.end(), l) - set_levels.begin());
  };
  std::unordered_map<std::uint32_t, BigCount> memo;
  auto rec = [&](auto &self, std::uint32_t i) -> BigCount {
    if (i < 2)
      return BigCount(i);
    if (auto it = memo.find(i); it != memo.end())
      return it->second;
    const Node &n = nodes_[i];
    const auto p = pos(i);
    BigCount lo = self(self, n.low) << (pos(n.low) - p - 1);
    BigCount hi = self(self, n.high) << (pos(n.high) - p - 1);
    BigCount r = lo + hi;
    memo.emplace(i, r);
    return r;
  };
  return rec(rec, a.index) << pos(a.index);
}

std::string Manager::to_dot(NodeRef a, const std::function<std::string(VarId)> &name) const {
  check_owned(a);
  std::ostringstream os;
  os << "digraph bdd {\n";
  os << "  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack{a.index};
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (i < 2 || !seen.insert(i).second)
      continue;
    const Node &n = nodes_[i];
    os << "  n" << i << " [label=\"" << (name ? name(n.var) : "x" + std::to_string(n.var))
       << "\"];\n";
    os << "  n" << i << " -> n" << n.low << " [style=dashed];\n";
    os << "  n" << i << " -> n" << n.high << ";\n";
    stack.push_back(n.low);
    stack.push_back(n.high);
  }
  os << "}\n";
  return os.str();
}

bool Manager::check_invariants() const {
  if (unique_.size() != nodes_.size() - 2)
    return false;
  for (std::uint32_t i = 2; i < nodes_.size(); ++i) {
    const Node &n = nodes_[i];
    if (n.low == n.high || n.low >= i || n.high >= i)
      return false;
    const auto l = level_of_[n.var];
    if (l >= node_level(n.low) || l >= node_level(n.high))
      return false;
    auto it = unique_.find(n);
    if (it == unique_.end() || it->second != i)
      return false;
  }
  return true;
}

} // namespace aclbdd
