#include "dyad/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dyad::simd {

namespace {

struct KernelTable {
    Isa isa;
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*squared_deviation)(const double*, std::size_t, double);
    CenteredMoments (*centered_moments)(const double*, const double*, std::size_t, double, double);
    void (*accumulate)(double*, const double*, std::size_t);
};

constexpr KernelTable kGeneric{Isa::generic, generic::sum, generic::dot, generic::squared_deviation,
                               generic::centered_moments, generic::accumulate};

KernelTable select_table() {
    const char* env = std::getenv("DYAD_SIMD");
    if (env && std::string(env) == "generic") return kGeneric;
#if defined(DYAD_ENABLE_AVX2)
    if (isa_supported(Isa::avx2)) {
        return {Isa::avx2, avx2::sum, avx2::dot, avx2::squared_deviation, avx2::centered_moments,
                avx2::accumulate};
    }
#endif
#if defined(DYAD_ENABLE_NEON)
    if (isa_supported(Isa::neon)) {
        return {Isa::neon, neon::sum, neon::dot, neon::squared_deviation, neon::centered_moments,
                neon::accumulate};
    }
#endif
    return kGeneric;
}

const KernelTable& table() {
    static const KernelTable t = select_table();
    return t;
}

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("kernel inputs differ in length");
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::generic: return "generic";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::generic: return true;
        case Isa::avx2:
#if defined(DYAD_ENABLE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(DYAD_ENABLE_NEON)
            return true;  // mandatory on AArch64
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() { return table().isa; }

double sum(std::span<const double> x) { return table().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
    require_same_length(x.size(), y.size());
    return table().dot(x.data(), y.data(), x.size());
}

double squared_deviation(std::span<const double> x, double mean) {
    return table().squared_deviation(x.data(), x.size(), mean);
}

CenteredMoments centered_moments(std::span<const double> x, std::span<const double> y,
                                 double mean_x, double mean_y) {
    require_same_length(x.size(), y.size());
    return table().centered_moments(x.data(), y.data(), x.size(), mean_x, mean_y);
}

void accumulate(std::span<double> acc, std::span<const double> in) {
    require_same_length(acc.size(), in.size());
    table().accumulate(acc.data(), in.data(), acc.size());
}

}  // namespace dyad::simd
