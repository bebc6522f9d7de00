#include <cstdlib>
#include <string>
#include <string_view>

#include "dynens/kernels.hpp"

namespace dynens::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, scalar::accumulate_scaled, scalar::row_sums,
                              scalar::row_argmax};
#if defined(DYNENS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, avx2::accumulate_scaled, avx2::row_sums,
                            avx2::row_argmax};
#endif
#if defined(DYNENS_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, neon::accumulate_scaled, neon::row_sums,
                            neon::row_argmax};
#endif

bool force_scalar() noexcept {
    const char* env = std::getenv("DYNENS_FORCE_SCALAR");
    return env != nullptr && std::string_view(env) != "" && std::string_view(env) != "0";
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(DYNENS_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(DYNENS_HAVE_NEON)
            return true;  // mandatory on AArch64
#else
            return false;
#endif
    }
    return false;
}

Isa best_isa() noexcept {
    static const Isa chosen = [] {
        if (force_scalar()) return Isa::Scalar;
        if (isa_available(Isa::Avx2)) return Isa::Avx2;
        if (isa_available(Isa::Neon)) return Isa::Neon;
        return Isa::Scalar;
    }();
    return chosen;
}

const KernelTable& table(Isa isa) {
    if (!isa_available(isa)) {
        fail(ErrorKind::InvalidArgument,
             "kernel ISA '" + std::string(to_string(isa)) + "' is not available on this machine");
    }
    switch (isa) {
#if defined(DYNENS_HAVE_AVX2)
        case Isa::Avx2: return kAvx2;
#endif
#if defined(DYNENS_HAVE_NEON)
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

const KernelTable& active() { return table(best_isa()); }

}  // namespace dynens::kernels
