#include "dyad/simd/kernels.hpp"

#if defined(__x86_64__) && !defined(__AVX2__)
#error "this should be compiled with -mavx2 -mfma"
#endif

#include <immintrin.h>

namespace dyad::simd::avx2 {

namespace {

// Fixed lane order keeps results reproducible run to run.
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

constexpr std::size_t kStep = 8;  // two 4-wide accumulators

}  // namespace

double sum(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kStep <= n; i += kStep) {
        a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
        a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kStep <= n; i += kStep) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double squared_deviation(const double* x, std::size_t n, double mean) {
    const __m256d m = _mm256_set1_pd(mean);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kStep <= n; i += kStep) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), m);
        a0 = _mm256_fmadd_pd(d0, d0, a0);
        a1 = _mm256_fmadd_pd(d1, d1, a1);
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) {
        const double d = x[i] - mean;
        s += d * d;
    }
    return s;
}

CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean_x,
                                 double mean_y) {
    const __m256d mx = _mm256_set1_pd(mean_x);
    const __m256d my = _mm256_set1_pd(mean_y);
    __m256d xx = _mm256_setzero_pd();
    __m256d yy = _mm256_setzero_pd();
    __m256d xy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), mx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), my);
        xx = _mm256_fmadd_pd(dx, dx, xx);
        yy = _mm256_fmadd_pd(dy, dy, yy);
        xy = _mm256_fmadd_pd(dx, dy, xy);
    }
    CenteredMoments m{hsum(xx), hsum(yy), hsum(xy)};
    for (; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

void accumulate(double* acc, const double* in, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(in + i)));
    }
    for (; i < n; ++i) acc[i] += in[i];
}

}  // namespace dyad::simd::avx2
