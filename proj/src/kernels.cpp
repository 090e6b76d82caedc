#include "ergolab/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace ergolab::kernels {
namespace {

std::atomic<int> g_forced{-1};  // -1 = auto

Isa detect() {
  return avx2_ops() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

bool isa_available(Isa isa) {
  return isa == Isa::scalar || (isa == Isa::avx2 && avx2_ops() != nullptr);
}

Isa active_isa() {
  const int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

void force_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::runtime_error("kernel ISA not available on this CPU");
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void clear_forced_isa() { g_forced.store(-1, std::memory_order_relaxed); }

const Ops& ops() {
  if (active_isa() == Isa::avx2) return *avx2_ops();
  return scalar_ops();
}

}  // namespace ergolab::kernels
