#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "aclbdd/bdd.hpp"
#include "support/oracle.hpp"

using namespace aclbdd;

TEST_CASE("mk removes redundant tests and duplicate nodes") {
  Manager mgr(3);
  CHECK(mgr.mk(0, kFalse, kFalse) == kFalse);
  CHECK(mgr.mk(1, kTrue, kTrue) == kTrue);
  const auto a = mgr.mk(2, kFalse, kTrue);
  const auto b = mgr.mk(2, kFalse, kTrue);
  CHECK(a == b);
  CHECK(mgr.store_size() == 1);
}

TEST_CASE("mk rejects ordering violations") {
  Manager mgr(3);
  const auto x0 = mgr.var(0);
  CHECK_THROWS_AS(mgr.mk(2, x0, kTrue), BddError);
  CHECK_THROWS_AS(mgr.mk(0, x0, kTrue), BddError);
  CHECK_THROWS_AS(mgr.mk(7, kFalse, kTrue), BddError);
}

TEST_CASE("(x1 | x2) & x3 has three internal nodes") {
  Manager mgr(3);
  const auto f = mgr.conj(mgr.disj(mgr.var(0), mgr.var(1)), mgr.var(2));
  CHECK(mgr.node_count(f) == 3);
  CHECK(mgr.max_depth(f) == 3);
}

TEST_CASE("apply identities") {
  Manager mgr(4);
  const auto a = mgr.disj(mgr.var(0), mgr.conj(mgr.var(1), mgr.var(3)));
  CHECK(mgr.conj(a, mgr.neg(a)) == kFalse);
  CHECK(mgr.disj(a, kFalse) == a);
  CHECK(mgr.apply(BinOp::Xor, a, a) == kFalse);
  CHECK(mgr.apply(BinOp::Implies, a, a) == kTrue);
  CHECK(mgr.apply(BinOp::Implies, kFalse, a) == kTrue);
}

TEST_CASE("De Morgan pair gives the same node") {
  Manager mgr(3);
  const auto a = mgr.var(0), b = mgr.var(1), c = mgr.var(2);
  const auto lhs = mgr.neg(mgr.conj(a, mgr.disj(b, c)));
  const auto rhs = mgr.conj(mgr.disj(mgr.neg(a), mgr.neg(b)), mgr.disj(mgr.neg(a), mgr.neg(c)));
  CHECK(lhs == rhs);
}

TEST_CASE("neg") {
  Manager mgr(2);
  CHECK(mgr.neg(kTrue) == kFalse);
  CHECK(mgr.neg(kFalse) == kTrue);
  const auto x = mgr.apply(BinOp::Xor, mgr.var(0), mgr.var(1));
  CHECK(mgr.neg(mgr.neg(x)) == x);
  CHECK(mgr.neg(x) != x);
}

TEST_CASE("ite") {
  Manager mgr(3);
  const auto x1 = mgr.var(0), x2 = mgr.var(1), x3 = mgr.var(2);
  CHECK(mgr.ite(kTrue, x1, x2) == x1);
  CHECK(mgr.ite(kFalse, x1, x2) == x2);
  CHECK(mgr.ite(x3, kTrue, kFalse) == x3);

  // Truth tables of both sides, enumerated over 3 variables.
  oracle::Expr v1{oracle::Expr::Op::Var, 0}, v2{oracle::Expr::Op::Var, 1},
      v3{oracle::Expr::Op::Var, 2};
  const auto lhs_t = [&](std::uint64_t a) { return v1.eval(a) ? v3.eval(a) : (v2.eval(a) && v3.eval(a)); };
  const auto rhs_t = [&](std::uint64_t a) { return (v1.eval(a) || v2.eval(a)) && v3.eval(a); };
  for (std::uint64_t a = 0; a < 8; ++a)
    REQUIRE(lhs_t(a) == rhs_t(a));

  const auto via_ite = mgr.ite(x1, x3, mgr.conj(x2, x3));
  CHECK(via_ite == mgr.conj(mgr.disj(x1, x2), x3));
}

TEST_CASE("exists") {
  Manager mgr(10);
  const VarId two[] = {1};
  CHECK(mgr.exists(kFalse, two) == kFalse);
  CHECK(mgr.exists(mgr.conj(mgr.var(0), mgr.var(1)), two) == mgr.var(0));

  // 8-bit equality cube x = 0b10110010 on variables 2..9.
  NodeRef cube = kTrue;
  for (VarId v = 9; v >= 2; --v)
    cube = mgr.conj(((0b10110010 >> (9 - v)) & 1) ? mgr.var(v) : mgr.nvar(v), cube);
  // Enumerating the 256 values finds exactly one witness, so projecting
  // all eight bits away leaves TRUE.
  int witnesses = 0;
  std::vector<std::int8_t> asg(10, 0);
  for (int x = 0; x < 256; ++x) {
    for (VarId v = 2; v <= 9; ++v)
      asg[v] = static_cast<std::int8_t>((x >> (9 - v)) & 1);
    witnesses += mgr.eval(cube, asg);
  }
  REQUIRE(witnesses == 1);
  const VarId bits[] = {2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(mgr.exists(cube, bits) == kTrue);
  CHECK(mgr.support(mgr.exists(mgr.conj(cube, mgr.var(0)), bits)) == std::vector<VarId>{0});
}

TEST_CASE("eval") {
  Manager mgr(3);
  const auto f = mgr.conj(mgr.disj(mgr.var(0), mgr.var(1)), mgr.var(2));
  const std::int8_t on[] = {0, 1, 1};
  const std::int8_t off[] = {0, 0, 1};
  CHECK(mgr.eval(kTrue, std::span<const std::int8_t>{}));
  CHECK(mgr.eval(f, on));
  CHECK_FALSE(mgr.eval(f, off));
  const std::int8_t partial[] = {0, -1, 1};
  CHECK_THROWS_AS((void)mgr.eval(f, partial), BddError);
  // x1 = 1 never reaches x2.
  const std::int8_t shortcut[] = {1, -1, 1};
  CHECK(mgr.eval(f, shortcut));
}

TEST_CASE("stats and sat_count") {
  Manager mgr(4);
  CHECK(mgr.stats(kFalse).node_count == 0);
  CHECK(mgr.stats(kFalse).max_depth == 0);
  const VarId all[] = {0, 1, 2, 3};
  CHECK(mgr.sat_count(kTrue, all) == 16);
  CHECK(mgr.sat_count(kFalse, all) == 0);
  const auto f = mgr.disj(mgr.var(1), mgr.var(3));
  CHECK(mgr.sat_count(f, all) == 12);
  const VarId just[] = {1, 3};
  CHECK(mgr.sat_count(f, just) == 3);
  const VarId missing[] = {1};
  CHECK_THROWS_AS((void)mgr.sat_count(f, missing), BddError);
}

TEST_CASE("operands from another manager are rejected") {
  Manager a(2), b(2);
  const auto fa = a.var(0);
  const auto fb = b.var(0);
  CHECK(fa != fb);
  CHECK_THROWS_AS(a.conj(fa, fb), BddError);
  CHECK_THROWS_AS(a.neg(fb), BddError);
  CHECK_THROWS_AS(a.ite(fb, kTrue, kFalse), BddError);
  // Terminals are shared.
  CHECK(a.conj(fa, kTrue) == fa);
}

TEST_CASE("custom level order") {
  Manager mgr(std::vector<std::uint32_t>{2, 0, 1});
  CHECK(mgr.var_at_level(0) == 1);
  CHECK(mgr.level(0) == 2);
  const auto f = mgr.conj(mgr.var(0), mgr.var(1));
  CHECK(mgr.top_var(f) == 1);
  CHECK_THROWS_AS(Manager(std::vector<std::uint32_t>{0, 0, 1}), BddError);
}

TEST_CASE("dot export marks low edges dashed") {
  Manager mgr(2);
  const auto dot = mgr.to_dot(mgr.conj(mgr.var(0), mgr.var(1)),
                              [](VarId v) { return "v" + std::to_string(v); });
  CHECK(dot.find("style=dashed") != std::string::npos);
  CHECK(dot.find("label=\"v1\"") != std::string::npos);
}

TEST_CASE("random expressions match truth tables and are canonical") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 300; ++iter) {
    const unsigned n = 1 + iter % 10;
    Manager mgr(n);
    const auto e1 = oracle::random_expr(rng, n, 6);
    const auto tt = oracle::truth_table(*e1, n);
    const auto f = oracle::build(mgr, *e1);
    REQUIRE(oracle::truth_table(mgr, f, n) == tt);
    // A second, independent construction path for the same function.
    CHECK(oracle::from_truth_table(mgr, tt, n) == f);
  }
}

TEST_CASE("every function of 3 variables combines correctly under every operator") {
  Manager mgr(3);
  std::vector<NodeRef> fn(256);
  std::vector<oracle::TruthTable> tt(256, oracle::TruthTable(8));
  for (unsigned bits = 0; bits < 256; ++bits) {
    for (unsigned a = 0; a < 8; ++a)
      tt[bits][a] = (bits >> a) & 1u;
    fn[bits] = oracle::from_truth_table(mgr, tt[bits], 3);
  }
  for (unsigned f = 0; f < 256; ++f) {
    REQUIRE(mgr.neg(fn[f]) == fn[~f & 0xff]);
    for (unsigned g = 0; g < 256; ++g) {
      REQUIRE(mgr.apply(BinOp::And, fn[f], fn[g]) == fn[f & g]);
      REQUIRE(mgr.apply(BinOp::Or, fn[f], fn[g]) == fn[f | g]);
      REQUIRE(mgr.apply(BinOp::Xor, fn[f], fn[g]) == fn[f ^ g]);
      REQUIRE(mgr.apply(BinOp::Implies, fn[f], fn[g]) == fn[(~f | g) & 0xff]);
    }
  }
  CHECK(mgr.check_invariants());
}

TEST_CASE("operators over 4 variables agree with truth tables") {
  Manager mgr(4);
  std::mt19937_64 rng(11);
  std::vector<NodeRef> fn(1u << 16);
  for (unsigned bits = 0; bits < fn.size(); ++bits) {
    oracle::TruthTable t(16);
    for (unsigned a = 0; a < 16; ++a)
      t[a] = (bits >> a) & 1u;
    fn[bits] = oracle::from_truth_table(mgr, t, 4);
  }
  for (unsigned f = 0; f < fn.size(); ++f)
    REQUIRE(mgr.neg(fn[f]) == fn[~f & 0xffff]);
  std::uniform_int_distribution<unsigned> pick(0, 0xffff);
  for (int i = 0; i < 20000; ++i) {
    const auto f = pick(rng), g = pick(rng), h = pick(rng);
    REQUIRE(mgr.conj(fn[f], fn[g]) == fn[f & g]);
    REQUIRE(mgr.disj(fn[f], fn[g]) == fn[f | g]);
    REQUIRE(mgr.apply(BinOp::Xor, fn[f], fn[g]) == fn[f ^ g]);
    REQUIRE(mgr.apply(BinOp::Implies, fn[f], fn[g]) == fn[(~f | g) & 0xffff]);
    REQUIRE(mgr.ite(fn[f], fn[g], fn[h]) == fn[(f & g) | (~f & h & 0xffff)]);
  }
  CHECK(mgr.check_invariants());
}

TEST_CASE("semantics do not depend on the variable order") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 50; ++iter) {
    const unsigned n = 8;
    std::vector<std::uint32_t> levels(n);
    std::iota(levels.begin(), levels.end(), 0u);
    std::shuffle(levels.begin(), levels.end(), rng);
    Manager a(n), b(levels);
    const auto e = oracle::random_expr(rng, n, 7);
    const auto fa = oracle::build(a, *e);
    const auto fb = oracle::build(b, *e);
    CHECK(oracle::truth_table(a, fa, n) == oracle::truth_table(b, fb, n));
    CHECK(b.check_invariants());
  }
}

TEST_CASE("restrict and support") {
  Manager mgr(3);
  const auto f = mgr.ite(mgr.var(0), mgr.var(1), mgr.var(2));
  const VarId v0[] = {0};
  const bool t[] = {true}, fl[] = {false};
  CHECK(mgr.restrict(f, v0, t) == mgr.var(1));
  CHECK(mgr.restrict(f, v0, fl) == mgr.var(2));
  CHECK(mgr.support(f) == std::vector<VarId>{0, 1, 2});
  CHECK(mgr.support(kTrue).empty());
}
