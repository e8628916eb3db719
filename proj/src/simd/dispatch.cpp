#include <cstdlib>
#include <string>

#include "segwave/simd/kernels.hpp"

namespace segwave::simd {
namespace {

constexpr KernelTable kScalar{Isa::Scalar, &scalar::wave_residual, &scalar::reaction,
                              &scalar::max_product};
constexpr KernelTable kAvx2{Isa::Avx2, &avx2::wave_residual, &avx2::reaction,
                            &avx2::max_product};

bool cpu_has_avx2() noexcept {
#if defined(SEGWAVE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable& select() noexcept {
    if (const char* env = std::getenv("SEGWAVE_ISA"); env != nullptr && std::string(env) == "scalar")
        return kScalar;
    return cpu_has_avx2() ? kAvx2 : kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2: return cpu_has_avx2();
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) noexcept {
    return isa == Isa::Avx2 && isa_available(Isa::Avx2) ? kAvx2 : kScalar;
}

const KernelTable& kernels() noexcept {
    static const KernelTable& table = select();
    return table;
}

}  // namespace segwave::simd
