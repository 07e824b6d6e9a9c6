#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"
#include "trigame/game_model.hpp"

using namespace trigame;
using namespace trigame::testing;
using Catch::Approx;

TEST_CASE("payoff cells for the reference parameters") {
  const GameParams p = condition1_params();
  const PayoffTriple all_on = payoff_lookup(p, {true, true, true});
  CHECK(all_on.japan == -70.0);
  CHECK(all_on.others == -15.0);
  CHECK(all_on.iaea == 20.0);

  const PayoffTriple all_off = payoff_lookup(p, {false, false, false});
  CHECK(all_off.japan == -p.c_sj);
  CHECK(all_off.others == 0.0);
  CHECK(all_off.iaea == 0.0);
}

TEST_CASE("payoff lookup is total and zero for zero parameters") {
  const GameParams zero{};
  for (bool d : {false, true}) {
    for (bool s : {false, true}) {
      for (bool o : {false, true}) {
        const PayoffTriple cell = payoff_lookup(zero, {d, s, o});
        CHECK(cell.japan == 0.0);
        CHECK(cell.others == 0.0);
        CHECK(cell.iaea == 0.0);
      }
    }
  }
}

TEST_CASE("Japan expected utilities") {
  const GameParams p = condition1_params();
  const auto [u_discharge, u_store] = expected_utilities_japan(p, 0.5, 0.3);
  CHECK(u_discharge == Approx(-45.0).margin(1e-12));
  CHECK(u_store == Approx(-7.5).margin(1e-12));

  const auto [d0, s0] = expected_utilities_japan(p, 0.0, 0.9);
  CHECK(d0 == -(p.c_dj + p.c_mj));
  CHECK(s0 == -p.c_sj);

  CHECK_THROWS_AS(expected_utilities_japan(p, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(expected_utilities_japan(p, 0.5, 1.5), std::domain_error);
}

TEST_CASE("Japan utilities do not depend on the oppose probability") {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const GameParams p = random_params(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double y = u(rng);
    CHECK(expected_utilities_japan(p, y, u(rng)) ==
          expected_utilities_japan(p, y, u(rng)));
  }
}

TEST_CASE("other countries expected utilities") {
  const GameParams p = condition1_params();
  const auto [u_sanction, u_accept] = expected_utilities_others(p, 0.8, 0.5);
  CHECK(u_sanction == Approx(-13.0).margin(1e-12));
  CHECK(u_accept == Approx(-8.0).margin(1e-12));

  const auto [s0, a0] = expected_utilities_others(p, 0.0, 0.2);
  CHECK(s0 == -p.c_hj);
  CHECK(a0 == 0.0);

  const auto [closed_s, closed_a] = expected_utilities_others(p, 0.37, 0.91);
  const auto [oracle_s, oracle_a] = weighted_utilities_others(p, 0.37, 0.91);
  CHECK(closed_s == Approx(oracle_s).margin(1e-12));
  CHECK(closed_a == Approx(oracle_a).margin(1e-12));
}

TEST_CASE("IAEA utilities differ by the reputation value") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const GameParams p = random_params(rng);
    const auto [oppose, support] = expected_utilities_iaea(p, u(rng), u(rng));
    CHECK(oppose - support ==
          Approx(p.c_ii).epsilon(1e-14).margin(1e-14));
  }
  // exact whenever the monitoring/harm terms vanish, which covers every
  // shipped scenario
  GameParams p = condition1_params();  // c_mi = e_di = h_ri = 0
  for (int i = 0; i < 20; ++i) {
    const auto [oppose, support] = expected_utilities_iaea(p, u(rng), u(rng));
    CHECK(oppose - support == p.c_ii);
  }
  const auto [o1, s1] = expected_utilities_iaea(p, 1.0, 0.4);
  CHECK(o1 == 20.0);
  CHECK(s1 == 0.0);
  const auto [o0, s0] = expected_utilities_iaea(p, 0.0, 0.4);
  CHECK(o0 == p.c_ii);
  CHECK(s0 == 0.0);
}

TEST_CASE("closed forms match the payoff-weighting oracle") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const GameParams p = random_params(rng);
    const double a = u(rng);
    const double b = u(rng);

    const auto japan = expected_utilities_japan(p, a, b);
    const auto japan_oracle = weighted_utilities_japan(p, a, b);
    REQUIRE(japan.first == Approx(japan_oracle.first).margin(1e-12));
    REQUIRE(japan.second == Approx(japan_oracle.second).margin(1e-12));

    const auto others = expected_utilities_others(p, a, b);
    const auto others_oracle = weighted_utilities_others(p, a, b);
    REQUIRE(others.first == Approx(others_oracle.first).margin(1e-12));
    REQUIRE(others.second == Approx(others_oracle.second).margin(1e-12));

    const auto iaea = expected_utilities_iaea(p, a, b);
    const auto iaea_oracle = weighted_utilities_iaea(p, a, b);
    REQUIRE(iaea.first == Approx(iaea_oracle.first).margin(1e-12));
    REQUIRE(iaea.second == Approx(iaea_oracle.second).margin(1e-12));
  }
}

TEST_CASE("replicator field at the reference state") {
  const GameParams p = condition1_params();
  const StateDerivative d = replicator_rhs(p, {0.8, 0.5, 0.5});
  CHECK(d.dx == Approx(-6.0).margin(1e-12));
  CHECK(d.dy == Approx(-1.25).margin(1e-12));
  CHECK(d.dz == Approx(5.0).margin(1e-12));

  // growth-rate factor equals the utility gap
  const auto [u_discharge, u_store] = expected_utilities_japan(p, 0.5, 0.0);
  CHECK(d.dx / (0.8 * (1.0 - 0.8)) ==
        Approx(u_discharge - u_store).margin(1e-12));
  CHECK(u_discharge - u_store == Approx(-37.5).margin(1e-12));
}

TEST_CASE("pure profiles are exact fixed points") {
  std::mt19937 rng(14);
  for (int i = 0; i < 20; ++i) {
    const GameParams p = random_params(rng);
    for (double x : {0.0, 1.0}) {
      for (double y : {0.0, 1.0}) {
        for (double z : {0.0, 1.0}) {
          const StateDerivative d = replicator_rhs(p, {x, y, z});
          REQUIRE(d.dx == 0.0);
          REQUIRE(d.dy == 0.0);
          REQUIRE(d.dz == 0.0);
        }
      }
    }
  }
}

TEST_CASE("components freeze on their own boundary") {
  const GameParams p = condition2_params();
  CHECK(replicator_rhs(p, {0.0, 0.3, 0.7}).dx == 0.0);
  CHECK(replicator_rhs(p, {1.0, 0.3, 0.7}).dx == 0.0);
  CHECK(replicator_rhs(p, {0.4, 0.3, 1.0}).dz == 0.0);
  CHECK(replicator_rhs(p, {0.4, 1.0, 0.7}).dy == 0.0);
}

TEST_CASE("oppose share always grows in the interior when reputation is positive") {
  std::mt19937 rng(15);
  std::uniform_real_distribution<double> interior(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 200; ++i) {
    GameParams p = random_params(rng);
    REQUIRE(p.c_ii > 0);
    const StateDerivative d =
        replicator_rhs(p, {interior(rng), interior(rng), interior(rng)});
    REQUIRE(d.dz > 0.0);
  }
}

TEST_CASE("field components ignore the strategies the closed forms drop") {
  std::mt19937 rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const GameParams p = random_params(rng);
    const double x = u(rng), y = u(rng);
    const StateDerivative d1 = replicator_rhs(p, {x, y, u(rng)});
    const StateDerivative d2 = replicator_rhs(p, {x, y, u(rng)});
    REQUIRE(d1.dx == d2.dx);  // no z anywhere in the x component
    REQUIRE(d1.dy == d2.dy);  // no z in the y component
    const double z = u(rng);
    const StateDerivative d3 = replicator_rhs(p, {u(rng), u(rng), z});
    const StateDerivative d4 = replicator_rhs(p, {u(rng), u(rng), z});
    REQUIRE(d3.dz == d4.dz);  // no x, y in the z component
  }
}

TEST_CASE("delayed field is the same function of the supplied state") {
  std::mt19937 rng(17);
  for (int i = 0; i < 100; ++i) {
    const GameParams p = random_params(rng);
    const StrategyState s = random_state(rng);
    REQUIRE(delayed_rhs(p, s) == replicator_rhs(p, s));
  }

  const StateDerivative corner = delayed_rhs(condition2_params(), {1, 0, 1});
  CHECK(corner.dx == 0.0);
  CHECK(corner.dy == 0.0);
  CHECK(corner.dz == 0.0);

  const StateDerivative mid = delayed_rhs(condition3_params(), {0.5, 0.5, 0.5});
  CHECK(mid.dx == 9.375);
  CHECK(mid.dy == 0.0);
  CHECK(mid.dz == 5.0);
}

TEST_CASE("parameter validation") {
  GameParams p = condition1_params();
  CHECK_NOTHROW(p.validate());
  p.c_dj = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = condition1_params();
  p.tau = -0.01;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  const GameParams zero{};
  CHECK_NOTHROW(zero.validate());
}

TEST_CASE("parameter field table covers every name once") {
  CHECK(find_param_field("c_sj") != nullptr);
  CHECK(find_param_field("tau") != nullptr);
  CHECK(find_param_field("bogus") == nullptr);
  GameParams p;
  for (const auto& field : kParamFields) p.*(field.member) = 1.0;
  CHECK(p == GameParams{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
}
