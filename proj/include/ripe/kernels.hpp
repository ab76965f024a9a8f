#pragma once

// Dense double-precision inner loops used by the lasso solver, Gram
// assembly and the t-test screen. Each kernel has a scalar reference and
// vector variants; the active variant is picked once at startup from the
// CPU feature flags (override with RIPE_SIMD=scalar|avx2|neon).

#include <cstddef>
#include <span>
#include <string_view>

namespace ripe::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();

// Throws Error(Usage) when the requested variant is not supported here.
void set_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
// sum_i (x_i - center)^2
double squared_deviation(std::span<const double> x, double center);

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*squared_deviation)(const double*, double, std::size_t);
};

namespace scalar {
const KernelTable& table();
}
namespace avx2 {
const KernelTable* table();  // nullptr when not compiled in
}
namespace neon {
const KernelTable* table();
}

}  // namespace ripe::kernels
