#pragma once

#include "dyad/run_config.hpp"
#include "dyad/synthetic.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dyad {

struct AnnotateOptions {
    /// Restrict to these annotator labels; empty means all.
    std::vector<std::string> annotators;
    bool retry_failed = false;
};

struct AnalyzeOptions {
    std::vector<std::string> annotators;
};

struct BenchmarkOptions {
    std::vector<std::string> annotators;
};

// Exit status: 0 when every requested output was produced, 1 on data or
// analysis errors, 2 on configuration errors.

int cmd_annotate(const RunConfig& cfg, const AnnotateOptions& options, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& cfg, const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_benchmark(const RunConfig& cfg, const BenchmarkOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate_corpus(const std::filesystem::path& corpus, const ScaleRange& scale, std::ostream& out,
                        std::ostream& err);
int cmd_generate_synthetic(const std::filesystem::path& out_dir, const SyntheticOptions& options, std::ostream& out,
                           std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dyad
