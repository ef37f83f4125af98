#pragma once

#include "dyad/analysis.hpp"
#include "dyad/annotate.hpp"
#include "dyad/commands.hpp"
#include "dyad/corpus.hpp"
#include "dyad/emotion.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <unistd.h>

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <random>
#include <string>
#include <vector>

namespace dyad::test {

inline std::filesystem::path data_path(const std::string& relative) {
    return std::filesystem::path(DYAD_DATA_DIR) / relative;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dyad_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Oracles. Written from the textbook formulas, sharing no code with the
// library.

/// Two-pass Pearson correlation in long double.
inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dx = x[i] - mx;
        const long double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

using big = boost::multiprecision::cpp_bin_float_50;

struct OracleFit {
    double intercept = 0.0;
    std::vector<double> coefficients;
    double r_squared = 0.0;
};

/// Least squares by forming X'X and X'y in 50-digit arithmetic and solving
/// with Gaussian elimination and partial pivoting.
inline OracleFit oracle_least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                                      bool intercept) {
    const std::size_t n = rows.size();
    const std::size_t p = rows.empty() ? 0 : rows[0].size();
    const std::size_t q = p + (intercept ? 1 : 0);
    auto at = [&](std::size_t i, std::size_t j) -> big {
        if (intercept) return j == 0 ? big(1) : big(rows[i][j - 1]);
        return big(rows[i][j]);
    };
    std::vector<std::vector<big>> a(q, std::vector<big>(q + 1, big(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < q; ++r) {
            const big xr = at(i, r);
            for (std::size_t c = 0; c < q; ++c) a[r][c] += xr * at(i, c);
            a[r][q] += xr * big(y[i]);
        }
    }
    for (std::size_t col = 0; col < q; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < q; ++r) {
            if (boost::multiprecision::abs(a[r][col]) > boost::multiprecision::abs(a[piv][col])) piv = r;
        }
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < q; ++r) {
            if (r == col) continue;
            const big f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= q; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<big> beta(q);
    for (std::size_t r = 0; r < q; ++r) beta[r] = a[r][q] / a[r][r];

    OracleFit fit;
    std::size_t off = 0;
    if (intercept) {
        fit.intercept = static_cast<double>(beta[0]);
        off = 1;
    }
    for (std::size_t j = 0; j < p; ++j) fit.coefficients.push_back(static_cast<double>(beta[j + off]));

    big ybar = 0;
    for (double v : y) ybar += big(v);
    ybar /= n;
    big ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        big pred = 0;
        for (std::size_t c = 0; c < q; ++c) pred += beta[c] * at(i, c);
        ss_res += (big(y[i]) - pred) * (big(y[i]) - pred);
        ss_tot += (big(y[i]) - ybar) * (big(y[i]) - ybar);
    }
    fit.r_squared = static_cast<double>(big(1) - ss_res / ss_tot);
    return fit;
}

/// Elementwise arithmetic mean.
inline std::array<double, kEmotionCount> oracle_mean(const std::vector<EmotionVector>& vs) {
    std::array<double, kEmotionCount> out{};
    for (const auto& v : vs) {
        for (std::size_t k = 0; k < kEmotionCount; ++k) out[k] += v.weights()[k];
    }
    for (auto& w : out) w /= static_cast<double>(vs.size());
    return out;
}

// ---------------------------------------------------------------------------
// Fixture builders.

inline EmotionVector random_simplex(std::mt19937_64& rng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::array<double, kEmotionCount> w{};
    double s = 0;
    for (auto& x : w) s += (x = g(rng));
    for (auto& x : w) x /= s;
    return EmotionVector::normalized(w);
}

inline EmotionVector vec(std::initializer_list<std::pair<EmotionLabel, double>> parts) {
    std::array<double, kEmotionCount> w{};
    for (const auto& [l, v] : parts) w[index_of(l)] = v;
    return EmotionVector::from_weights(w);
}

/// Dialogue with strictly alternating speakers.
inline Dialogue alternating_dialogue(const std::string& id, Outcome outcome, Role first, int turns) {
    Dialogue d;
    d.id = id;
    d.outcome = outcome;
    for (int t = 1; t <= turns; ++t) {
        const bool first_speaks = (t % 2) == 1;
        const Role speaker = first_speaks ? first : (first == Role::buyer ? Role::seller : Role::buyer);
        d.turns.push_back({t, speaker, id + " turn " + std::to_string(t)});
    }
    return d;
}

inline SelfReport report(double frustration, SviReport svi = {4, 4, 4, 4}) { return {frustration, svi}; }

inline AnnotationSet empty_set(const std::string& name, LabelSet labels = canonical_label_set()) {
    AnnotationSet s;
    s.annotator = {name, "test-model", "none"};
    s.label_set = std::move(labels);
    return s;
}

/// Graded human annotations over utterances of synthetic dialogues, with a
/// label set lacking surprise, plus models derived from them.
struct BenchmarkFixture {
    Corpus corpus;
    LabelSet human_labels;
    std::vector<HumanAnnotation> records;
    std::map<UtteranceKey, EmotionVector> means;  // elementwise oracle
    AnnotationSet graded;                          // equals the human means
    AnnotationSet graded_noisy;                    // human means plus small jitter
    AnnotationSet one_hot;                         // argmax of the human means
};

inline BenchmarkFixture make_benchmark_fixture(std::uint64_t seed = 17) {
    BenchmarkFixture f;
    f.human_labels = {EmotionLabel::joy,        EmotionLabel::anger,   EmotionLabel::fear,
                      EmotionLabel::compassion, EmotionLabel::sadness, EmotionLabel::neutral};
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> g(0.7, 1.0);
    std::uniform_real_distribution<double> jitter(0.0, 0.05);
    f.graded = empty_set("graded");
    f.graded_noisy = empty_set("graded-noisy");
    f.one_hot = empty_set("one-hot",
                          {EmotionLabel::joy, EmotionLabel::anger, EmotionLabel::fear, EmotionLabel::surprise,
                           EmotionLabel::compassion, EmotionLabel::sadness});
    for (int d = 0; d < 8; ++d) {
        auto dialogue = alternating_dialogue("b" + std::to_string(d), d % 3 ? Outcome::resolved : Outcome::impasse,
                                             Role::buyer, 6);
        for (const auto& u : dialogue.turns) {
            const UtteranceKey key{dialogue.id, u.turn_index};
            EmotionVector::Weights truth{};
            for (auto l : f.human_labels) truth[index_of(l)] = g(rng);
            std::vector<EmotionVector> per;
            for (int a = 0; a < 3; ++a) {
                EmotionVector::Weights w = truth;
                for (auto l : f.human_labels) w[index_of(l)] += jitter(rng);
                per.push_back(EmotionVector::normalized(w));
                f.records.push_back({"h" + std::to_string(a), key, per.back()});
            }
            const auto m = oracle_mean(per);
            const auto mean = EmotionVector::normalized(m);
            f.means.emplace(key, mean);
            f.graded.entries.emplace(key, mean);
            EmotionVector::Weights noisy = mean.weights();
            for (auto l : f.human_labels) noisy[index_of(l)] += jitter(rng) * 0.2;
            f.graded_noisy.entries.emplace(key, EmotionVector::normalized(noisy));
            EmotionLabel top = f.human_labels.front();
            for (auto l : f.human_labels) {
                if (l != EmotionLabel::neutral && mean[l] > mean[top]) top = l;
            }
            f.one_hot.entries.emplace(key, EmotionVector::one_hot(top));
        }
        f.corpus.dialogues.push_back(std::move(dialogue));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Command-line helpers.

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

inline CliResult run_dyad(std::vector<std::string> args) {
    args.insert(args.begin(), "dyad");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Relative path -> contents for every regular file under `root`.
inline std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
    std::map<std::string, std::string> out;
    if (!std::filesystem::exists(root)) return out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
    return out;
}

/// Number in "<label>: ..., R new requests" lines, summed.
inline long new_requests(const std::string& out) {
    long total = 0;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find(" new requests");
        if (pos == std::string::npos) continue;
        auto start = line.rfind(' ', pos - 1);
        total += std::stol(line.substr(start + 1, pos - start - 1));
    }
    return total;
}

}  // namespace dyad::test
