#pragma once

#include "dyad/emotion.hpp"
#include "dyad/error.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dyad {

class StatsError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public StatsError {
public:
    using StatsError::StatsError;
};

/// A series has zero variance, so a correlation is undefined.
class ConstantSeriesError : public StatsError {
public:
    using StatsError::StatsError;
};

class InsufficientDataError : public StatsError {
public:
    using StatsError::StatsError;
};

/// The design matrix (with its intercept column, if any) is not of full
/// column rank. columns() names every column involved in a near-null
/// direction. "(intercept)" stands for the intercept column.
class RankDeficiencyError : public StatsError {
public:
    RankDeficiencyError(std::vector<std::string> columns, const std::string& message)
        : StatsError(message), columns_(std::move(columns)) {}
    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    std::vector<std::string> columns_;
};

inline constexpr const char* kInterceptName = "(intercept)";

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
};

/// Pearson product-moment correlation. Throws LengthMismatchError,
/// InsufficientDataError (n < 2) or ConstantSeriesError.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Row-major n x p design matrix without the intercept column.
struct DesignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::string> column_names;

    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    std::vector<double> column(std::size_t j) const;
};

/// Builds a design matrix from rows; throws LengthMismatchError on ragged input.
DesignMatrix make_design(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> column_names);

struct RegressionResult {
    std::vector<std::string> predictor_names;
    std::map<std::string, double> coefficients;
    double intercept = 0.0;
    bool has_intercept = true;
    double r_squared = 0.0;
    std::size_t n = 0;

    double coefficient(const std::string& name) const { return coefficients.at(name); }
    /// Fitted values for the design the result came from.
    std::vector<double> predict(const DesignMatrix& x) const;
};

struct FitOptions {
    bool intercept = true;
    /// Singular values below this fraction of the largest flag rank deficiency.
    double rank_tolerance = 1e-10;
};

/// Ordinary least squares through an SVD of the column-equilibrated design.
/// r_squared is the centred form 1 - SSres / SStot in both intercept modes.
RegressionResult fit_mlr(const DesignMatrix& x, std::span<const double> y, const FitOptions& options = {});

/// Elementwise mean. Throws InsufficientDataError on an empty list.
EmotionVector mean_vector(std::span<const EmotionVector> vectors);

}  // namespace dyad
