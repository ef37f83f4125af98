#pragma once

#include "dyad/annotate.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace dyad {

/// AnnotationSet file: annotator id, label schema, entries with all seven
/// weights, and recorded failures, in key order.
std::string serialize_annotation_set(const AnnotationSet& set);
AnnotationSet parse_annotation_set(std::string_view text);

void write_annotation_set(const AnnotationSet& set, const std::filesystem::path& path);
AnnotationSet read_annotation_set(const std::filesystem::path& path);

}  // namespace dyad
