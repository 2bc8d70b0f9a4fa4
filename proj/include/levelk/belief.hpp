#pragma once

// Belief machinery over reasoning depth: a Poisson distribution on levels
// whose rate carries a Gamma prior. Observed levels update the posterior in
// closed form (Gamma-Poisson conjugacy), the point estimate is the posterior
// mean, and an opponent's played level is recovered from an observed episode
// by smoothed maximum likelihood against the per-level policies.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levelk/game.hpp"

namespace levelk {

/// P(level = k) under a Poisson rate lambda. Direct evaluation for small k,
/// log-space above k = 20 to dodge factorial overflow.
inline double poisson_pmf(int k, double lambda) {
    if (k < 0) throw std::invalid_argument("level must be nonnegative");
    if (lambda < 0.0) throw std::invalid_argument("Poisson rate must be nonnegative");
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    if (k <= 20) {
        double v = std::exp(-lambda);
        for (int i = 1; i <= k; ++i) v *= lambda / static_cast<double>(i);
        return v;
    }
    return std::exp(-lambda + static_cast<double>(k) * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0));
}

/// Poisson probabilities of levels 0..k renormalized to condition on
/// "level at most k". lambda = 0 degenerates to all mass on level 0.
inline std::vector<double> truncated_level_weights(double lambda, int k) {
    if (k < 0) throw std::invalid_argument("truncation level must be nonnegative");
    if (lambda < 0.0) throw std::invalid_argument("Poisson rate must be nonnegative");
    std::vector<double> g(static_cast<std::size_t>(k) + 1);
    double total = 0.0;
    for (int i = 0; i <= k; ++i) {
        g[static_cast<std::size_t>(i)] = poisson_pmf(i, lambda);
        total += g[static_cast<std::size_t>(i)];
    }
    if (total == 0.0) {
        // every unconditional mass underflowed (huge rate); conditioning on
        // "level at most k" concentrates at k in that limit
        g.assign(static_cast<std::size_t>(k) + 1, 0.0);
        g.back() = 1.0;
        return g;
    }
    for (double& w : g) w /= total;
    return g;
}

/// Shape/rate parameters of a Gamma distribution; mean a/b.
struct GammaParams {
    double a = 1.0;
    double b = 1.0;

    friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

inline void check_gamma(const GammaParams& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0))
        throw std::invalid_argument("Gamma parameters must be positive");
}

/// Conjugate update: observing levels k_1..k_m moves Gamma(a, b) to
/// Gamma(a + sum k_r, b + m). An empty batch returns the prior unchanged.
inline GammaParams posterior_update(GammaParams prior, std::span<const int> observed_levels) {
    check_gamma(prior);
    long sum = 0;
    for (int k : observed_levels) {
        if (k < 0) throw std::invalid_argument("observed level must be nonnegative");
        sum += k;
    }
    return GammaParams{prior.a + static_cast<double>(sum),
                       prior.b + static_cast<double>(observed_levels.size())};
}

inline double posterior_mean(GammaParams p) {
    check_gamma(p);
    return p.a / p.b;
}

/**
 * One modeling agent's running belief over the population's mean reasoning
 * level. Keeps the prior, the conjugate posterior, and the raw observation
 * counters so the bookkeeping stays auditable: posterior is always the prior
 * shifted by (sum of observed levels, observation count).
 */
class BeliefState {
public:
    BeliefState(GammaParams prior, int depth_cap) : prior_(prior), posterior_(prior), depth_cap_(depth_cap) {
        check_gamma(prior);
        if (depth_cap < 0) throw std::invalid_argument("depth cap must be nonnegative");
        lambda_hat_ = posterior_mean(posterior_);
    }

    void observe(std::span<const int> levels) {
        for (int k : levels) {
            if (k < 0) throw std::invalid_argument("observed level must be nonnegative");
            sum_ += k;
        }
        count_ += static_cast<long>(levels.size());
        posterior_ = GammaParams{prior_.a + static_cast<double>(sum_), prior_.b + static_cast<double>(count_)};
        lambda_hat_ = posterior_mean(posterior_);
    }

    const GammaParams& prior() const { return prior_; }
    const GammaParams& posterior() const { return posterior_; }
    double lambda_hat() const { return lambda_hat_; }
    int depth_cap() const { return depth_cap_; }
    long observation_count() const { return count_; }
    long observation_sum() const { return sum_; }

private:
    GammaParams prior_;
    GammaParams posterior_;
    double lambda_hat_ = 0.0;
    int depth_cap_ = 0;
    long count_ = 0;
    long sum_ = 0;
};

/// One observed step of an opponent's behavior.
struct EpisodeStep {
    int state = 0;
    int action = 0;
};

/**
 * Maximum-likelihood level of an observed episode against the candidate
 * per-level policies. Each step contributes log max(pi_level(a|s), epsilon);
 * the floor keeps deterministic levels from zeroing out on a single off-path
 * action. Ties, including the empty episode, resolve to the lowest level.
 */
inline int infer_level(std::span<const EpisodeStep> episode,
                       std::span<const PolicyTable> level_policies, double epsilon) {
    if (level_policies.empty()) throw std::invalid_argument("need at least one level policy");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");

    const auto& shape = level_policies.front().probs;
    for (const EpisodeStep& step : episode) {
        if (step.state < 0 || step.state >= static_cast<int>(shape.size()))
            throw std::invalid_argument("episode state out of range");
        if (step.action < 0 ||
            step.action >= static_cast<int>(shape[static_cast<std::size_t>(step.state)].size()))
            throw std::invalid_argument("episode action out of range");
    }

    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t level = 0; level < level_policies.size(); ++level) {
        double score = 0.0;
        for (const EpisodeStep& step : episode) {
            const double p = level_policies[level]
                                 .probs[static_cast<std::size_t>(step.state)][static_cast<std::size_t>(step.action)];
            score += std::log(std::max(p, epsilon));
        }
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(level);
        }
    }
    return best;
}

}  // namespace levelk
