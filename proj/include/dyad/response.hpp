#pragma once

#include "dyad/emotion.hpp"
#include "dyad/error.hpp"

#include <string>
#include <string_view>

namespace dyad {

enum class ResponseErrorKind {
    unparseable,     // no JSON object could be recovered
    non_numeric,     // a label's value is not a number
    unknown_label,   // a numeric entry names a label outside the set
    negative_weight,
    sum_out_of_range,
};

std::string_view to_string(ResponseErrorKind kind);

class ResponseError : public Error {
public:
    ResponseError(ResponseErrorKind kind, const std::string& message) : Error(message), kind_(kind) {}
    ResponseErrorKind kind() const noexcept { return kind_; }

private:
    ResponseErrorKind kind_;
};

/// Accepted window for the raw weight sum before rescaling.
inline constexpr double kRenormalizeWindow = 0.1;

/// Recovers one weight per label from a model reply. The reply may wrap the
/// object in prose or a code fence, or nest it one level under a single key.
/// Missing labels count as 0. A raw sum within 1 +/- kRenormalizeWindow is
/// divided out; anything else raises ResponseError.
EmotionVector parse_annotation_response(std::string_view raw, const LabelSet& labels);

}  // namespace dyad
