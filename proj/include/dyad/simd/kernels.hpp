#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Reduction kernels behind the statistics code. Each kernel has a scalar
// reference in dyad::simd::generic and vector variants selected once at
// startup from the CPU's capabilities. DYAD_SIMD=generic in the environment
// forces the scalar path.

namespace dyad::simd {

enum class Isa { generic, avx2, neon };

std::string_view to_string(Isa isa);

/// Instruction set chosen by the dispatcher for this process.
Isa active_isa();
/// True when the running CPU can execute the given variant.
bool isa_supported(Isa isa);

struct CenteredMoments {
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
/// Sum of (x - mean)^2.
double squared_deviation(std::span<const double> x, double mean);
/// Centered second moments of a paired series about the supplied means.
CenteredMoments centered_moments(std::span<const double> x, std::span<const double> y,
                                 double mean_x, double mean_y);
/// acc[i] += in[i]
void accumulate(std::span<double> acc, std::span<const double> in);

// Direct entry points for equivalence testing. Spans must have equal length
// where two are taken; the dispatching wrappers above check this.
#define DYAD_SIMD_DECLARE_VARIANT(ns)                                                        \
    namespace ns {                                                                           \
    double sum(const double* x, std::size_t n);                                              \
    double dot(const double* x, const double* y, std::size_t n);                             \
    double squared_deviation(const double* x, std::size_t n, double mean);                   \
    CenteredMoments centered_moments(const double* x, const double* y, std::size_t n,        \
                                     double mean_x, double mean_y);                          \
    void accumulate(double* acc, const double* in, std::size_t n);                           \
    }

DYAD_SIMD_DECLARE_VARIANT(generic)
DYAD_SIMD_DECLARE_VARIANT(avx2)
DYAD_SIMD_DECLARE_VARIANT(neon)

#undef DYAD_SIMD_DECLARE_VARIANT

}  // namespace dyad::simd
