#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "graspaff/distribution.hpp"
#include "graspaff/error.hpp"

using namespace graspaff;
using fixtures::error_of;
using fixtures::vec;

TEST_CASE("normalize worked examples") {
  const auto a = normalize(vec({2, 2}));
  CHECK(a[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.5).epsilon(1e-12));

  const auto b = normalize(vec({1, 0, 0}));
  CHECK(b.values() == vec({1, 0, 0}));

  const auto c = normalize(vec({3, 1, 1}));
  CHECK(std::abs(c[0] - 0.6) <= 1e-12);
  CHECK(std::abs(c[1] - 0.2) <= 1e-12);
  CHECK(std::abs(c[2] - 0.2) <= 1e-12);
}

TEST_CASE("normalize errors") {
  CHECK(error_of([] { normalize(vec({0, 0, 0})); }) == ErrorCode::AllZero);
  CHECK(error_of([] { normalize(vec({1, -0.5, 1})); }) == ErrorCode::NegativeEntry);
  CHECK(error_of([] { normalize(vec({1, 1}), 3); }) == ErrorCode::DimensionMismatch);
  CHECK(error_of([] { normalize(vec({1, std::nan("")})); }) == ErrorCode::NegativeEntry);
  CHECK(error_of([] { normalize(VectorXd()); }) == ErrorCode::AllZero);
}

TEST_CASE("from_normalized accepts small drift and rejects larger") {
  const auto d = from_normalized(vec({0.5, 0.5 + 5e-7}), 2);
  CHECK(std::abs(d.values().sum() - 1.0) <= 1e-12);
  CHECK(error_of([] { from_normalized(vec({0.5, 0.5 + 5e-6}), 2); }) == ErrorCode::NotNormalized);
}

TEST_CASE("argmax worked examples") {
  CHECK(argmax(vec({0.1, 0.7, 0.2})) == 1);
  CHECK(argmax(vec({0.5, 0.5})) == 0);
  CHECK(argmax(vec({0.25, 0.25, 0.25, 0.25})) == 0);
}

TEST_CASE("normalize properties over random vectors") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(2, 33);
  std::uniform_real_distribution<double> entry(0.0, 10.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  std::bernoulli_distribution zero(0.3);
  for (int rep = 0; rep < 500; ++rep) {
    VectorXd v(size(rng));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = zero(rng) ? 0.0 : entry(rng);
    v(0) += 0.1;  // never all zero

    const auto once = normalize(v);
    CHECK(std::abs(once.values().sum() - 1.0) <= 1e-12);
    CHECK((once.values().array() >= 0).all());

    // idempotent bit-for-bit
    const auto twice = normalize(once.values());
    CHECK(twice.values() == once.values());

    // scale-invariant
    const double c = scale(rng);
    const auto scaled = normalize((c * v).eval());
    CHECK((scaled.values() - once.values()).cwiseAbs().maxCoeff() <= 1e-12);

    // argmax invariant, including the tie-break
    CHECK(argmax(v) == argmax(once));
  }
}

TEST_CASE("float distributions use the same code path") {
  Eigen::VectorXf v(3);
  v << 1.f, 3.f, 0.f;
  const auto d = normalize(v);
  CHECK(d[1] == doctest::Approx(0.75f));
  CHECK(argmax(d) == 1);
}

TEST_CASE("nonzero_std") {
  CHECK(nonzero_std(vec({0.2, 0.8, 0})) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(nonzero_std(vec({0, 0, 1})) == 0.0);
  CHECK(nonzero_std(vec({1.0 / 3, 1.0 / 3, 1.0 / 3})) == 0.0);
}
