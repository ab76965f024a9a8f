#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ripe/error.hpp"
#include "ripe/kernels.hpp"

using namespace ripe::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  if (avx2::table() && isa_available(Isa::Avx2)) out.push_back(avx2::table());
  if (neon::table() && isa_available(Isa::Neon)) out.push_back(neon::table());
  return out;
}

double tolerance(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] * (y.empty() ? 1.0 : y[i]));
  return 1e-13 * (s + 1.0);
}

}  // namespace

TEST_CASE("scalar kernels on hand values") {
  const auto& t = scalar::table();
  const double x[] = {1, 2, 3, 4, 5};
  const double y[] = {2, 0, -1, 0.5, 1};
  CHECK(t.dot(x, y, 5) == doctest::Approx(2 + 0 - 3 + 2 + 5));
  CHECK(t.sum(x, 5) == 15.0);
  CHECK(t.squared_deviation(x, 3.0, 5) == 10.0);
  double z[] = {1, 1, 1, 1, 1};
  t.axpy(2.0, x, z, 5);
  CHECK(z[4] == 11.0);
  CHECK(t.dot(x, y, 0) == 0.0);
}

TEST_CASE("vector kernels match scalar reference on every length up to 67") {
  std::mt19937_64 rng(42);
  const auto& ref = scalar::table();
  const auto tables = vector_tables();
  if (tables.empty()) MESSAGE("no vector kernel available on this machine; only scalar checked");
  for (const KernelTable* vt : tables) {
    for (std::size_t n = 0; n <= 67; ++n) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto x = random_vector(n, rng);
        const auto y = random_vector(n, rng);
        CHECK(std::fabs(vt->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= tolerance(x, y));
        CHECK(std::fabs(vt->sum(x.data(), n) - ref.sum(x.data(), n)) <= tolerance(x, {}));
        const double c = 0.3;
        const double sd_ref = ref.squared_deviation(x.data(), c, n);
        CHECK(std::fabs(vt->squared_deviation(x.data(), c, n) - sd_ref) <= 1e-13 * (sd_ref + 1.0));
        auto a = y;
        auto b = y;
        vt->axpy(-1.7, x.data(), a.data(), n);
        ref.axpy(-1.7, x.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("dispatch follows set_isa and rejects unavailable variants") {
  const Isa before = active_isa();
  set_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  const std::vector<double> x{1, 2, 3};
  CHECK(dot(x, x) == 14.0);
  if (!isa_available(Isa::Neon)) CHECK_THROWS_AS(set_isa(Isa::Neon), ripe::Error);
  set_isa(before);
  CHECK(active_isa() == before);
  CHECK(isa_name(Isa::Scalar) == "scalar");
}

TEST_CASE("span wrappers agree across variants") {
  std::mt19937_64 rng(7);
  const auto x = random_vector(1001, rng);
  const auto y = random_vector(1001, rng);
  const Isa before = active_isa();
  set_isa(Isa::Scalar);
  const double d0 = dot(x, y);
  const double s0 = sum(x);
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_available(isa)) continue;
    set_isa(isa);
    CHECK(dot(x, y) == doctest::Approx(d0).epsilon(1e-12));
    CHECK(sum(x) == doctest::Approx(s0).epsilon(1e-12));
  }
  set_isa(before);
}
