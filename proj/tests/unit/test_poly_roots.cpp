#include "doctest.h"

#include <algorithm>

#include "core/poly_roots.hpp"

using namespace nfloc;

TEST_CASE("roots of a polynomial with known factors") {
  // (x - 3)(x + 1)(x - 0.5)(x^2 + 1)
  Polynomial p{1.0};
  for (double r : {3.0, -1.0, 0.5}) {
    const double lin[2] = {-r, 1.0};
    p = poly_multiply(p, lin);
  }
  const double quad[3] = {1.0, 0.0, 1.0};
  p = poly_multiply(p, quad);
  REQUIRE(p.size() == 6);

  const auto all = polynomial_roots(p);
  CHECK(all.size() == 5);
  const auto real = real_roots(p);
  REQUIRE(real.size() == 3);
  CHECK(real[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(real[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(real[2] == doctest::Approx(-1.0).epsilon(1e-12));
  for (double r : real) CHECK(std::abs(poly_eval(p, r)) < 1e-10);
}

TEST_CASE("polynomial arithmetic") {
  const Polynomial a{1, 2};
  const Polynomial b{0, 0, 3};
  CHECK(poly_add(a, b) == Polynomial{1, 2, 3});
  CHECK(poly_scale(a, -2) == Polynomial{-2, -4});
  CHECK(poly_eval(Polynomial{1, 2, 3}, 2.0) == 17.0);
  // leading zeros are ignored; constants have no roots
  CHECK(real_roots(Polynomial{-2, 1, 0, 0}).size() == 1);
  CHECK(polynomial_roots(Polynomial{4}).empty());
}
