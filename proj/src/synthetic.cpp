#include "dyad/synthetic.hpp"

#include "dyad/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace dyad {

namespace {

EmotionVector dirichlet(std::mt19937_64& rng, double alpha) {
    std::gamma_distribution<double> g(alpha, 1.0);
    EmotionVector::Weights w{};
    for (;;) {
        double s = 0.0;
        for (double& v : w) s += (v = g(rng));
        if (s > 0.0) break;
    }
    return EmotionVector::normalized(w);
}

EmotionVector blend(const EmotionVector& a, const EmotionVector& b, double wa) {
    EmotionVector::Weights w{};
    for (std::size_t i = 0; i < kEmotionCount; ++i) w[i] = wa * a.weights()[i] + (1.0 - wa) * b.weights()[i];
    return EmotionVector::normalized(w);
}

}  // namespace

SyntheticData generate_planted_signal(const SyntheticOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::mt19937_64 noise_rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<int> length(o.min_turns, o.max_turns);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> likert(1.0, 7.0);
    std::normal_distribution<double> planted_noise(0.0, o.noise_sigma);
    std::normal_distribution<double> report_noise(0.0, 0.3);

    SyntheticData out;
    out.planted.annotator = {"synthetic-planted", "synthetic", "planted"};
    out.noise.annotator = {"synthetic-noise", "synthetic", "noise"};

    for (std::size_t i = 0; i < o.dialogues; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "syn%04zu", i + 1);
        Dialogue d;
        d.id = id;
        std::map<Role, EmotionVector> profile{{Role::buyer, dirichlet(rng, 0.6)}, {Role::seller, dirichlet(rng, 0.6)}};
        const int turns = length(rng);
        const Role first = unit(rng) < 0.5 ? Role::buyer : Role::seller;
        for (int t = 1; t <= turns; ++t) {
            const Role speaker = (t % 2 == 1) == (first == Role::buyer) ? Role::buyer : Role::seller;
            d.turns.push_back({t, speaker, "Synthetic " + std::string(to_string(speaker)) + " turn " + std::to_string(t) + "."});
            const UtteranceKey key{d.id, t};
            out.planted.entries.emplace(key, blend(profile.at(speaker), dirichlet(rng, 1.0), 0.75));
            out.noise.entries.emplace(key, dirichlet(noise_rng, 1.0));
        }

        const auto whole = *dialogue_mean(d, out.planted);
        const auto seller = dialogue_mean(d, out.planted, Role::seller);
        d.outcome = seller && (*seller)[EmotionLabel::anger] + 0.1 * unit(rng) > 0.3 ? Outcome::impasse : Outcome::resolved;

        for (auto role : kRoles) {
            SelfReport rep;
            const double f = 2.0 + 8.0 * whole[EmotionLabel::anger] - 4.0 * whole[EmotionLabel::joy] + report_noise(rng);
            rep.frustration = std::clamp(f, 1.0, 7.0);
            SviReport svi{likert(rng), likert(rng), likert(rng), likert(rng)};
            if (role == o.planted_role) {
                const auto own = dialogue_mean(d, out.planted, role);
                const double x = own ? (*own)[o.planted_emotion] : 0.0;
                const double v = o.planted_intercept + o.planted_slope * x + planted_noise(rng);
                switch (o.planted_scale) {
                    case SviSubscale::outcome_feeling: svi.outcome_feeling = v; break;
                    case SviSubscale::process: svi.process = v; break;
                    case SviSubscale::relationship: svi.relationship = v; break;
                    case SviSubscale::self_feeling: svi.self_feeling = v; break;
                }
            }
            rep.svi = svi;
            d.reports.emplace(role, rep);
        }
        out.corpus.dialogues.push_back(std::move(d));
    }
    return out;
}

}  // namespace dyad
