#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "xbar/simd/kernels.hpp"

using namespace xbar;

TEST_CASE("scalar kernels against plain loops") {
  const auto& k = simd::scalar_kernels();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> g(7 * 5), v(7), out(5);
  for (auto& x : g) x = u(rng);
  for (auto& x : v) x = u(rng);
  k.vmm(g.data(), 7, 5, v.data(), out.data());
  CHECK(oracle::max_abs_diff(out, oracle::ideal(g, 7, 5, v)) < 1e-14);
  double d = 0.0;
  for (std::size_t i = 0; i < 7; ++i) d += v[i] * g[i];
  CHECK(std::abs(k.dot(v.data(), g.data(), 7) - d) < 1e-14);
}

TEST_CASE("every available ISA agrees with scalar") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (auto isa : simd::available_isas()) {
    const auto* k = simd::kernels_for(isa);
    REQUIRE(k != nullptr);
    INFO(simd::to_string(isa));
    for (std::size_t rows : {1u, 3u, 17u, 64u}) {
      for (std::size_t cols : {1u, 4u, 9u, 64u}) {
        std::vector<double> g(rows * cols), v(rows), a(cols), b(cols);
        for (auto& x : g) x = u(rng);
        for (auto& x : v) x = u(rng);
        if (rows > 2) v[1] = 0.0;
        ref.vmm(g.data(), rows, cols, v.data(), a.data());
        k->vmm(g.data(), rows, cols, v.data(), b.data());
        CHECK(oracle::max_abs_diff(a, b) <= 1e-12);
        CHECK(std::abs(ref.dot(g.data(), g.data(), g.size()) - k->dot(g.data(), g.data(), g.size())) <=
              1e-11);
      }
    }
    for (std::size_t n : {0u, 1u, 5u, 64u, 1001u}) {
      std::vector<double> x(n), qa(n), qb(n);
      for (auto& e : x) e = u(rng);
      const double step = 2.0 / 63.0;
      ref.quantize(x.data(), qa.data(), n, -1.0, 1.0, step);
      k->quantize(x.data(), qb.data(), n, -1.0, 1.0, step);
      CHECK(qa == qb);
    }
  }
}

TEST_CASE("scalar is always available") {
  const auto isas = simd::available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == simd::Isa::Scalar);
  CHECK(simd::kernels_for(simd::Isa::Scalar) == &simd::scalar_kernels());
}
