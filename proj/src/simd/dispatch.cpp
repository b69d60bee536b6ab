#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "xbar/simd/kernels.hpp"

namespace xbar::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

namespace {

const KernelTable kScalar{Isa::Scalar, detail::vmm_scalar, detail::dot_scalar,
                          detail::quantize_scalar};

#if defined(XBAR_HAVE_AVX2)
const KernelTable kAvx2{Isa::Avx2, detail::vmm_avx2, detail::dot_avx2, detail::quantize_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

#if defined(XBAR_HAVE_NEON)
const KernelTable kNeon{Isa::Neon, detail::vmm_neon, detail::dot_neon, detail::quantize_neon};
#endif

const KernelTable& select() {
  const char* env = std::getenv("XBAR_SIMD");
  if (env != nullptr) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == to_string(isa)) {
        const KernelTable* t = kernels_for(isa);
        return t != nullptr ? *t : kScalar;
      }
    }
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* t = kernels_for(isa)) return *t;
  }
  return kScalar;
}

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2:
#if defined(XBAR_HAVE_AVX2)
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
    case Isa::Neon:
#if defined(XBAR_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (kernels_for(isa) != nullptr) out.push_back(isa);
  }
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace xbar::simd
