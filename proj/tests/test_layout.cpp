#include <doctest.h>

#include <set>

#include "aclbdd/layout.hpp"

using namespace aclbdd;

TEST_CASE("default layout has 83 variables") {
  VariableLayout layout;
  CHECK(layout.variable_count() == 83);
  CHECK(layout.width(Field::Proto) == 3);
  CHECK(layout.width(Field::Port) == 16);
  CHECK(layout.width(Field::Src3) == 8);
  CHECK(layout.max_value(Field::Port) == 65535);
  CHECK(layout.vars(Field::Proto)[0] == 0);
  CHECK(layout.vars(Field::Port)[0] == 3);
  CHECK(layout.vars(Field::Dest4).back() == 82);
  CHECK(layout.var_name(0) == "prt[2]");
  CHECK(layout.var_name(3) == "p[15]");
  CHECK(layout.var_name(19) == "sa1[7]");
  CHECK(layout.var_name(82) == "da4[0]");
  CHECK(layout.field_of(20) == Field::Src1);
  CHECK(layout.shift_of(20) == 6);
  auto mgr = layout.make_manager();
  CHECK(mgr.var_count() == 83);
}

TEST_CASE("reduced widths") {
  VariableLayout layout(Widths{2, 3, 2});
  CHECK(layout.variable_count() == 21);
  CHECK(layout.max_value(Field::Dest1) == 3);
  CHECK_THROWS_AS(VariableLayout(Widths{0, 3, 2}), std::invalid_argument);
}

TEST_CASE("field orders and bit orders give permutations") {
  const Field order[] = {Field::Dest4, Field::Dest3, Field::Dest2, Field::Dest1, Field::Src4,
                         Field::Src3,  Field::Src2,  Field::Src1,  Field::Port,  Field::Proto};
  for (auto bits : {BitOrder::MsbFirst, BitOrder::LsbFirst}) {
    VariableLayout layout(Widths{}, order, bits);
    std::set<std::uint32_t> seen(layout.levels().begin(), layout.levels().end());
    CHECK(seen.size() == 83);
    CHECK(*seen.rbegin() == 82);
    const auto d4 = layout.vars(Field::Dest4);
    if (bits == BitOrder::MsbFirst)
      CHECK(layout.levels()[d4[0]] == 0);
    else
      CHECK(layout.levels()[d4[7]] == 0);
    // Variable ids are independent of the order.
    CHECK(d4[0] == 75);
  }
  const Field partial[] = {Field::Port};
  CHECK_THROWS_AS(VariableLayout(Widths{}, partial), std::invalid_argument);
  CHECK_THROWS_AS(VariableLayout::with_levels(Widths{}, std::vector<std::uint32_t>(83, 0)),
                  std::invalid_argument);
}

TEST_CASE("bitvec of a field reads the right variables") {
  VariableLayout layout(Widths{2, 3, 2});
  auto mgr = layout.make_manager();
  const auto bv = layout.bitvec(mgr, Field::Port);
  REQUIRE(bv.width() == 3);
  CHECK(bv.bits[0] == mgr.var(layout.vars(Field::Port)[0]));
}

TEST_CASE("field names") {
  CHECK(field_name(Field::Dest1) == "Dest1");
  CHECK(field_title(Field::Port) == "Ports");
  CHECK(field_title(Field::Src1) == "Src 1");
  CHECK(parse_field("ports") == Field::Port);
  CHECK(parse_field("Source2") == Field::Src2);
  CHECK(parse_field("Src 3") == Field::Src3);
  CHECK(parse_field("dst4") == Field::Dest4);
  CHECK(parse_field("protocol") == Field::Proto);
  CHECK_FALSE(parse_field("Src5").has_value());
  for (auto f : kAllFields)
    CHECK(parse_field(field_name(f)) == f);
}

TEST_CASE("order completion") {
  const Field prefix[] = {Field::Port, Field::Proto};
  const auto full = complete_order(prefix);
  REQUIRE(full.size() == kFieldCount);
  CHECK(full[0] == Field::Port);
  CHECK(full[1] == Field::Proto);
  CHECK(full[2] == Field::Src1);
  const Field dup[] = {Field::Port, Field::Port};
  CHECK_THROWS_AS(check_distinct(dup), std::invalid_argument);
}
