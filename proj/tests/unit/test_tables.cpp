#include "doctest.h"
#include "test_support.hpp"
#include "tlearn/tables.hpp"
#include "tlearn/text_format.hpp"

using namespace testing;

TEST_SUITE("tables") {
  TEST_CASE("absent pairs read the default value") {
    TransitionValueTable t(4, 2.0);
    CHECK(t.get(S(1), S(2)) == 2.0);
    CHECK_FALSE(t.contains(S(1), S(2)));
    CHECK(t.observed_successors(S(1)).empty());
    CHECK_FALSE(t.max_observed(S(1)).has_value());
    CHECK(t.size() == 0);
  }

  TEST_CASE("entries are created sorted and observed successors match the keys") {
    TransitionValueTable t(5);
    t.set(S(1), S(4), 1.0);
    t.entry(S(1), S(2)).value = 3.0;
    t.set(S(1), S(3), -1.0);
    CHECK(t.observed_successors(S(1)) == std::vector<StateId>{S(2), S(3), S(4)});
    CHECK(*t.max_observed(S(1)) == 3.0);
    CHECK(t.size() == 3);
    CHECK(t.row(S(1))[0].updates == 0);
  }

  TEST_CASE("out of range successor throws") {
    TransitionValueTable t(2);
    CHECK_THROWS_AS(t.set(S(1), S(3), 1.0), std::out_of_range);
  }

  TEST_CASE("dump and reload are exact") {
    TransitionValueTable t(4, 0.25);
    t.set(S(1), S(3), 1.0 / 3.0);
    auto& e = t.entry(S(2), S(4));
    e.value = 0.1 + 0.2;
    e.updates = 17;
    const auto text = dump_table(t);
    CHECK(text.find("default = 0.25") != std::string::npos);
    CHECK(text.find("2 4 0.30000000000000004 17") != std::string::npos);
    CHECK(load_transition_table(text, 4) == t);
  }

  TEST_CASE("warm-start file without update counts") {
    const auto t = load_transition_table("[tvalues]\n1 3 1.7\n3 5 2\n", 6);
    CHECK(t.get(S(1), S(3)) == 1.7);
    CHECK(t.row(S(1))[0].updates == 0);
  }

  TEST_CASE("malformed dumps are rejected") {
    CHECK_THROWS_AS(load_transition_table("[qvalues]\n", 3), ParseError);
    CHECK_THROWS_AS(load_transition_table("[tvalues]\n1 9 1\n", 3), ParseError);
    CHECK_THROWS_AS(load_transition_table("[tvalues]\n1 2\n", 3), ParseError);
    CHECK_THROWS_AS(load_transition_table("[tvalues]\nscale = 2\n", 3), ParseError);
  }

  TEST_CASE("QTable initialisation and rows") {
    QTable q(3, 4, 2.0);
    for (std::uint32_t s = 1; s <= 3; ++s)
      for (std::uint32_t a = 1; a <= 4; ++a) CHECK(q.get(S(s), A(a)) == 2.0);
    q.set(S(2), A(3), 5.0);
    CHECK(q.row(S(2))[2] == 5.0);
    CHECK(q.max_value(S(2)) == 5.0);
    q.record_update(S(2), A(3));
    CHECK(q.updates(S(2), A(3)) == 1);
    CHECK(dump_table(q).find("2 3 5\n") != std::string::npos);
  }

  TEST_CASE("VTable pins terminals to zero") {
    const Mdp m = small_mdp();
    VTable v(m.terminal_set(), 1.5);
    CHECK(v.get(S(1)) == 1.5);
    CHECK(v.get(S(4)) == 0.0);
    v.set(S(4), 3.0);
    CHECK(v.get(S(4)) == 0.0);
    v.set(S(1), 3.0);
    CHECK(v.get(S(1)) == 3.0);
  }
}
