#pragma once

// Data-parallel inner loops used by inference, validation and accuracy
// derivation. Every variant performs the same IEEE operations in the same
// per-element order as the scalar reference, so results are bit-identical
// across ISAs; the tests assert exact equality, not a tolerance.

#include <cstddef>
#include <span>
#include <string_view>

#include "dynens/core.hpp"

namespace dynens::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa) noexcept;

/// Widest available ISA. Setting DYNENS_FORCE_SCALAR=1 in the environment
/// pins the scalar reference (read once, on first call).
Isa best_isa() noexcept;

struct KernelTable {
    Isa isa;
    /// acc[j] = acc[j] + weight * x[j]; rounding after the multiply and after the add.
    void (*accumulate_scaled)(double* acc, const double* x, std::size_t n, double weight);
    /// out[r] = ((0 + m[r,0]) + m[r,1]) + ... in column order.
    void (*row_sums)(const double* m, std::size_t rows, std::size_t cols, double* out);
    /// out[r] = first column index holding the row maximum.
    void (*row_argmax)(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out);
};

/// Throws InvalidArgument if the ISA is not available.
const KernelTable& table(Isa isa);

/// table(best_isa()).
const KernelTable& active();

namespace scalar {
void accumulate_scaled(double* acc, const double* x, std::size_t n, double weight);
void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out);
void row_argmax(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out);
}  // namespace scalar

#if defined(DYNENS_HAVE_AVX2)
namespace avx2 {
void accumulate_scaled(double* acc, const double* x, std::size_t n, double weight);
void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out);
void row_argmax(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out);
}  // namespace avx2
#endif

#if defined(DYNENS_HAVE_NEON)
namespace neon {
void accumulate_scaled(double* acc, const double* x, std::size_t n, double weight);
void row_sums(const double* m, std::size_t rows, std::size_t cols, double* out);
void row_argmax(const double* m, std::size_t rows, std::size_t cols, ClassIndex* out);
}  // namespace neon
#endif

}  // namespace dynens::kernels
