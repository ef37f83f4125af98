#include "dyad/simd/kernels.hpp"

#include <arm_neon.h>

namespace dyad::simd::neon {

double sum(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vaddq_f64(a0, vld1q_f64(x + i));
        a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* x, const double* y, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0);
    float64x2_t a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
        a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double squared_deviation(const double* x, std::size_t n, double mean) {
    const float64x2_t m = vdupq_n_f64(mean);
    float64x2_t a = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), m);
        a = vfmaq_f64(a, d, d);
    }
    double s = vaddvq_f64(a);
    for (; i < n; ++i) {
        const double d = x[i] - mean;
        s += d * d;
    }
    return s;
}

CenteredMoments centered_moments(const double* x, const double* y, std::size_t n, double mean_x,
                                 double mean_y) {
    const float64x2_t mx = vdupq_n_f64(mean_x);
    const float64x2_t my = vdupq_n_f64(mean_y);
    float64x2_t xx = vdupq_n_f64(0.0);
    float64x2_t yy = vdupq_n_f64(0.0);
    float64x2_t xy = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t dx = vsubq_f64(vld1q_f64(x + i), mx);
        const float64x2_t dy = vsubq_f64(vld1q_f64(y + i), my);
        xx = vfmaq_f64(xx, dx, dx);
        yy = vfmaq_f64(yy, dy, dy);
        xy = vfmaq_f64(xy, dx, dy);
    }
    CenteredMoments m{vaddvq_f64(xx), vaddvq_f64(yy), vaddvq_f64(xy)};
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
    for (; i + 2 <= n; i += 2) vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(in + i)));
    for (; i < n; ++i) acc[i] += in[i];
}

}  // namespace dyad::simd::neon
