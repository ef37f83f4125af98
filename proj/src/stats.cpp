#include "dyad/stats.hpp"

#include "dyad/simd/kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace dyad {

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw LengthMismatchError("pearson: series lengths differ (" + std::to_string(x.size()) +
                                  " vs " + std::to_string(y.size()) + ")");
    }
    const std::size_t n = x.size();
    if (n < 2) throw InsufficientDataError("pearson: need at least 2 pairs");
    auto constant = [](std::span<const double> s) {
        return std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); });
    };
    if (constant(x) || constant(y)) throw ConstantSeriesError("pearson: series has zero variance");

    const double mx = simd::sum(x) / static_cast<double>(n);
    const double my = simd::sum(y) / static_cast<double>(n);
    const auto m = simd::centered_moments(x, y, mx, my);
    if (!(m.sxx > 0.0) || !(m.syy > 0.0)) throw ConstantSeriesError("pearson: series has zero variance");
    const double r = m.sxy / std::sqrt(m.sxx * m.syy);
    return {std::clamp(r, -1.0, 1.0), n};
}

std::vector<double> DesignMatrix::column(std::size_t j) const {
    std::vector<double> out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = (*this)(i, j);
    return out;
}

DesignMatrix make_design(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> column_names) {
    DesignMatrix m;
    m.rows = rows.size();
    m.cols = column_names.size();
    m.column_names = std::move(column_names);
    m.values.reserve(m.rows * m.cols);
    for (const auto& r : rows) {
        if (r.size() != m.cols) throw LengthMismatchError("design row width does not match column names");
        m.values.insert(m.values.end(), r.begin(), r.end());
    }
    return m;
}

std::vector<double> RegressionResult::predict(const DesignMatrix& x) const {
    std::vector<double> beta(predictor_names.size());
    for (std::size_t j = 0; j < beta.size(); ++j) beta[j] = coefficients.at(predictor_names[j]);
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        out[i] = (has_intercept ? intercept : 0.0) + simd::dot(x.row(i), beta);
    }
    return out;
}

RegressionResult fit_mlr(const DesignMatrix& x, std::span<const double> y, const FitOptions& options) {
    if (x.values.size() != x.rows * x.cols || x.column_names.size() != x.cols) {
        throw LengthMismatchError("fit_mlr: malformed design matrix");
    }
    if (y.size() != x.rows) {
        throw LengthMismatchError("fit_mlr: response has " + std::to_string(y.size()) +
                                  " rows, design has " + std::to_string(x.rows));
    }
    const std::size_t n = x.rows;
    const std::size_t offset = options.intercept ? 1 : 0;
    const std::size_t q = x.cols + offset;
    if (q == 0) throw InsufficientDataError("fit_mlr: no columns to fit");
    if (n <= q) {
        throw InsufficientDataError("fit_mlr: need more than " + std::to_string(q) +
                                    " observations, have " + std::to_string(n));
    }

    std::vector<std::string> names;
    if (options.intercept) names.emplace_back(kInterceptName);
    names.insert(names.end(), x.column_names.begin(), x.column_names.end());

    Eigen::MatrixXd a(n, q);
    for (std::size_t i = 0; i < n; ++i) {
        if (options.intercept) a(i, 0) = 1.0;
        for (std::size_t j = 0; j < x.cols; ++j) a(i, j + offset) = x(i, j);
    }
    Eigen::VectorXd scale(q);
    std::vector<std::string> zero_columns;
    for (std::size_t j = 0; j < q; ++j) {
        scale(j) = a.col(j).norm();
        if (!(scale(j) > 0.0)) zero_columns.push_back(names[j]);
    }
    if (!zero_columns.empty()) {
        throw RankDeficiencyError(zero_columns, "fit_mlr: all-zero column '" + zero_columns.front() + "'");
    }
    for (std::size_t j = 0; j < q; ++j) a.col(j) /= scale(j);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double threshold = options.rank_tolerance * sv(0);
    std::vector<bool> involved(q, false);
    bool deficient = false;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) >= threshold) continue;
        deficient = true;
        const Eigen::VectorXd v = svd.matrixV().col(k);
        const double vmax = v.cwiseAbs().maxCoeff();
        for (std::size_t j = 0; j < q; ++j) {
            if (std::abs(v(j)) > 1e-6 * vmax) involved[j] = true;
        }
    }
    if (deficient) {
        std::vector<std::string> cols;
        std::string list;
        for (std::size_t j = 0; j < q; ++j) {
            if (!involved[j]) continue;
            cols.push_back(names[j]);
            list += (list.empty() ? "" : ", ") + names[j];
        }
        throw RankDeficiencyError(cols, "fit_mlr: design is rank deficient; collinear columns: " + list);
    }

    Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd beta_scaled = svd.solve(yv);
    const Eigen::VectorXd beta = beta_scaled.cwiseQuotient(scale);

    RegressionResult result;
    result.n = n;
    result.has_intercept = options.intercept;
    result.intercept = options.intercept ? beta(0) : 0.0;
    result.predictor_names = x.column_names;
    for (std::size_t j = 0; j < x.cols; ++j) result.coefficients[x.column_names[j]] = beta(j + offset);

    const auto fitted = result.predict(x);
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    const double ss_res = simd::dot(residual, residual);
    const double y_mean = simd::sum(y) / static_cast<double>(n);
    const double ss_tot = simd::squared_deviation(y, y_mean);
    if (!(ss_tot > 0.0)) throw ConstantSeriesError("fit_mlr: response has zero variance");
    result.r_squared = 1.0 - ss_res / ss_tot;
    return result;
}

EmotionVector mean_vector(std::span<const EmotionVector> vectors) {
    if (vectors.empty()) throw InsufficientDataError("mean_vector: no vectors");
    EmotionVector::Weights acc{};
    for (const auto& v : vectors) simd::accumulate(acc, v.weights());
    const double n = static_cast<double>(vectors.size());
    for (double& w : acc) w /= n;
    return EmotionVector::from_weights(acc);
}

}  // namespace dyad
