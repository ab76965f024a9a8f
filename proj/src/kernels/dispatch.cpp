#include <atomic>
#include <cstdlib>
#include <string>

#include "ripe/error.hpp"
#include "ripe/kernels.hpp"

namespace ripe::kernels {

#if !(defined(__x86_64__) || defined(_M_X64))
const KernelTable* avx2::table() { return nullptr; }
#endif
#if !defined(__aarch64__)
const KernelTable* neon::table() { return nullptr; }
#endif

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &scalar::table();
    case Isa::Avx2: return avx2::table();
    case Isa::Neon: return neon::table();
  }
  return nullptr;
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (const char* env = std::getenv("RIPE_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
    if (want == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

struct State {
  std::atomic<Isa> isa;
  std::atomic<const KernelTable*> table;
  State() {
    const Isa chosen = detect();
    isa.store(chosen);
    table.store(table_for(chosen));
  }
};

State& state() {
  static State s;
  return s;
}

inline const KernelTable& current() { return *state().table.load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return table_for(isa) != nullptr && cpu_supports(isa); }

Isa active_isa() { return state().isa.load(); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorCode::Usage, "kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  }
  state().table.store(table_for(isa));
  state().isa.store(isa);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return current().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  current().axpy(a, x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return current().sum(x.data(), x.size()); }

double squared_deviation(std::span<const double> x, double center) {
  return current().squared_deviation(x.data(), center, x.size());
}

}  // namespace ripe::kernels
