#include <doctest.h>

#include <cmath>

#include "psl/errors.hpp"
#include "psl/profiles.hpp"
#include "psl/quadrature.hpp"
#include "support.hpp"

using namespace psl;

TEST_CASE("single bump evaluates to its closed form") {
  const Profile rho({{2.0, 0.0, 1.0}});
  CHECK(eval_rho(rho, 1.0) == doctest::Approx(1.2130613194252668).epsilon(1e-15));
  CHECK(eval_rho(Profile{}, 3.0) == 0.0);
  CHECK(eval_I(Profile{}, 3.0) == 0.0);
}

TEST_CASE("running integral, derivative and L2 norm agree with quadrature") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Profile rho = testing::random_profile(rng);
    for (double x : {-2.0, -0.3, 0.0, 1.7}) {
      const auto numeric = integrate_adaptive([&](double t) { return eval_rho(rho, t); }, -40.0, x, {});
      CHECK(eval_I(rho, x) == doctest::Approx(numeric.value).epsilon(1e-11));
      const double h = 1e-4;
      const double fd = (eval_rho(rho, x + h) - eval_rho(rho, x - h)) / (2 * h);
      CHECK(eval_rho_prime(rho, x) == doctest::Approx(fd).epsilon(1e-6));
    }
    const auto sq = integrate_adaptive([&](double t) { return std::pow(eval_rho(rho, t), 2); }, -40.0, 40.0, {}, 16);
    CHECK(l2_norm_sq(rho) == doctest::Approx(sq.value).epsilon(1e-11));
  }
}

TEST_CASE("shifted moves every centre") {
  const Profile rho({{0.5, 0.2, 0.4}, {-0.1, -1.0, 0.9}});
  const Profile moved = rho.shifted(0.75);
  for (double x : {-1.0, 0.0, 0.4}) CHECK(eval_rho(moved, x + 0.75) == doctest::Approx(eval_rho(rho, x)));
  CHECK(rho.max_abs_rho() == doctest::Approx(0.6));
}

TEST_CASE("support radius covers the envelope and each bump") {
  const Profile rho({{1.0, 4.0, 0.5}});
  const double eps = 1e-16;
  const double r = support_radius(rho, 1.0, 0.0, eps);
  CHECK(r >= envelope_half_width(1.0, eps));
  CHECK(std::abs(eval_rho(rho, r)) <= eps * (1 + 1e-12));
  CHECK(std::exp(-r * r) <= eps * (1 + 1e-12));
}

TEST_CASE("validation names the offending bump field") {
  CHECK_THROWS_AS(Profile({{1.0, 0.0, 0.0}}), ValidationError);
  try {
    profile_from_json(nlohmann::json::parse(R"({"bumps":[{"a":1,"c":0,"w":0}]})"), "state.rho");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "state.rho.bumps[0].w");
  }
  CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse(R"({"bumps":[{"a":1,"c":0}]})")), ValidationError);
}

TEST_CASE("json round trip") {
  const Profile rho({{0.5, 0.2, 0.4}, {-0.1, -1.0, 0.9}});
  const Profile back = profile_from_json(nlohmann::json::parse(profile_to_json(rho).dump()));
  REQUIRE(back.bumps().size() == 2);
  CHECK(back.bumps()[1].c == -1.0);
}
