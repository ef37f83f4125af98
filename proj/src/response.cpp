#include "dyad/response.hpp"

#include "dyad/util.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>

namespace dyad {

using nlohmann::json;

std::string_view to_string(ResponseErrorKind kind) {
    switch (kind) {
        case ResponseErrorKind::unparseable: return "unparseable";
        case ResponseErrorKind::non_numeric: return "non_numeric";
        case ResponseErrorKind::unknown_label: return "unknown_label";
        case ResponseErrorKind::negative_weight: return "negative_weight";
        case ResponseErrorKind::sum_out_of_range: return "sum_out_of_range";
    }
    return "?";
}

namespace {

std::string lower(std::string_view s) {
    std::string out(trim(s));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

json extract_object(std::string_view raw) {
    const auto first = raw.find('{');
    const auto last = raw.rfind('}');
    if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
        throw ResponseError(ResponseErrorKind::unparseable, "reply contains no JSON object");
    }
    try {
        return json::parse(raw.substr(first, last - first + 1));
    } catch (const json::parse_error&) {
        throw ResponseError(ResponseErrorKind::unparseable, "reply is not valid JSON");
    }
}

}  // namespace

EmotionVector parse_annotation_response(std::string_view raw, const LabelSet& labels) {
    json obj = extract_object(raw);
    if (!obj.is_object()) throw ResponseError(ResponseErrorKind::unparseable, "reply is not a JSON object");
    if (obj.size() == 1 && obj.begin()->is_object()) obj = json(*obj.begin());

    EmotionVector::Weights w{};
    std::array<bool, kEmotionCount> seen{};
    for (const auto& [key, value] : obj.items()) {
        const auto label = parse_emotion_label(lower(key));
        if (!label || !contains(labels, *label)) {
            if (value.is_number()) {
                throw ResponseError(ResponseErrorKind::unknown_label,
                                    "reply assigns weight to unexpected label '" + key + "'");
            }
            continue;
        }
        if (!value.is_number()) {
            throw ResponseError(ResponseErrorKind::non_numeric, "weight for '" + key + "' is not a number");
        }
        const double v = value.get<double>();
        if (!std::isfinite(v)) {
            throw ResponseError(ResponseErrorKind::non_numeric, "weight for '" + key + "' is not finite");
        }
        if (v < 0.0) {
            throw ResponseError(ResponseErrorKind::negative_weight,
                                "weight for '" + key + "' is negative (" + format_double(v) + ")");
        }
        const auto i = index_of(*label);
        if (seen[i]) throw ResponseError(ResponseErrorKind::unparseable, "label '" + key + "' appears twice");
        seen[i] = true;
        w[i] = v;
    }
    double s = 0.0;
    for (double v : w) s += v;
    if (!(std::abs(s - 1.0) <= kRenormalizeWindow)) {
        throw ResponseError(ResponseErrorKind::sum_out_of_range,
                            "weights sum to " + format_double(s) + ", outside [0.9, 1.1]");
    }
    return EmotionVector::normalized(w);
}

}  // namespace dyad
