#include "dyad/simd/kernels.hpp"

namespace dyad::simd::generic {

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double squared_deviation(const double* x, std::size_t n, double mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        s += d * d;
    }
    return s;
}

CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean_x,
                                 double mean_y) {
    CenteredMoments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

void accumulate(double* acc, const double* in, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += in[i];
}

}  // namespace dyad::simd::generic
