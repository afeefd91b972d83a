#include "sybilblind/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

#include "sybilblind/error.hpp"
#include "sybilblind/graph_io.hpp"
#include "sybilblind/random.hpp"

namespace sybilblind {
namespace {

constexpr std::size_t kDirectBinomialLimit = 60;

double choose_direct(std::size_t n, std::size_t k) {
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

double log_choose(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

double binomial_pmf(std::size_t n, std::size_t k, double p) {
    if (n <= kDirectBinomialLimit) {
        return choose_direct(n, k) * std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(n - k));
    }
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    return std::exp(log_choose(dn, dk) + dk * std::log(p) + (dn - dk) * std::log1p(-p));
}

// Pr(X = k) for X ~ Hypergeometric(draws from `good` + `bad` items, k good).
double hypergeometric_pmf(std::size_t good, std::size_t bad, std::size_t draws, std::size_t k) {
    if (k > good || draws < k || draws - k > bad) return 0.0;
    return std::exp(log_choose(static_cast<double>(good), static_cast<double>(k)) +
                    log_choose(static_cast<double>(bad), static_cast<double>(draws - k)) -
                    log_choose(static_cast<double>(good + bad), static_cast<double>(draws)));
}

bool both_within(std::size_t n_bb, std::size_t n_bs, std::size_t n_sb, std::size_t n_ss, double tau) {
    return noise_within(n_sb, n_sb + n_bb, tau) && noise_within(n_bs, n_bs + n_ss, tau);
}

void check_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in [0, 1]");
}

MonteCarloEstimate finish(std::size_t hits, std::size_t trials) {
    MonteCarloEstimate est;
    est.trials = trials;
    est.estimate = static_cast<double>(hits) / static_cast<double>(trials);
    est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
    return est;
}

}  // namespace

double auc(std::span<const double> scores, const GroundTruth& truth) {
    if (scores.size() != truth.size()) throw DataError("score vector does not match the labels");
    const std::size_t ns = truth.num_sybils();
    const std::size_t nb = truth.size() - ns;
    if (ns == 0 || nb == 0) throw DataError("AUC needs at least one Sybil and one benign node");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of 1-based average ranks of the Sybils.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::size_t sybils = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            sybils += truth.is_sybil(order[j]) ? 1 : 0;
            ++j;
        }
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        rank_sum += avg_rank * static_cast<double>(sybils);
        i = j;
    }
    const double dns = static_cast<double>(ns);
    const double u = rank_sum - dns * (dns + 1.0) / 2.0;
    return u / (dns * static_cast<double>(nb));
}

double fnr(std::span<const double> probabilities, const GroundTruth& truth) {
    if (probabilities.size() != truth.size()) throw DataError("probability vector does not match the labels");
    std::size_t sybils = 0;
    std::size_t missed = 0;
    for (std::size_t u = 0; u < truth.size(); ++u) {
        if (!truth.is_sybil(u)) continue;
        ++sybils;
        if (!(probabilities[u] > 0.5)) ++missed;
    }
    if (sybils == 0) throw DataError("false negative rate needs at least one Sybil");
    return static_cast<double>(missed) / static_cast<double>(sybils);
}

BoundReport noise_bounds(std::size_t n, double r, double tau) {
    if (!(tau > 0.0 && tau <= 0.5)) throw InvalidArgument("tau must lie in (0, 0.5]");
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("r must lie in (0, 1)");
    BoundReport b;
    b.n = n;
    b.r = r;
    b.tau = tau;
    const double dn = static_cast<double>(n);
    b.lower = std::pow(1.0 - r, dn) * std::pow(r, dn);
    const double spread = 1.0 - 2.0 * tau;
    const double exponent = 2.0 * spread * spread * (1.0 - r) * (1.0 - r) * dn / (tau * tau + (1.0 - tau) * (1.0 - tau));
    b.upper = std::exp(-exponent);
    b.k_min = std::exp(exponent);
    b.k_max = 1.0 / b.lower;
    b.lower_exceeds_upper = b.lower > b.upper;
    return b;
}

bool noise_within(std::size_t noisy, std::size_t total, double tau) {
    if (total == 0) return true;
    // Relative slack absorbs the rounding in tau * total (0.3 * 10 etc.).
    return static_cast<double>(noisy) <= tau * static_cast<double>(total) * (1.0 + 1e-12);
}

double noise_prob_independent(std::size_t n, double r, double tau) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("r must lie in [0, 1]");
    check_tau(tau);
    if (n > kMaxExactSampleSize) throw DataError("sampling size too large for exact enumeration");
    std::vector<double> benign_in_b(n + 1);
    std::vector<double> sybil_in_s(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        benign_in_b[k] = binomial_pmf(n, k, 1.0 - r);
        sybil_in_s[k] = binomial_pmf(n, k, r);
    }
    double total = 0.0;
    for (std::size_t n_bb = 0; n_bb <= n; ++n_bb) {
        for (std::size_t n_ss = 0; n_ss <= n; ++n_ss) {
            if (both_within(n_bb, n - n_bb, n - n_ss, n_ss, tau)) total += benign_in_b[n_bb] * sybil_in_s[n_ss];
        }
    }
    return total;
}

double noise_prob_exact(std::size_t num_benign, std::size_t num_sybil, std::size_t n, double tau,
                        SamplingModel model) {
    const std::size_t population = num_benign + num_sybil;
    if (population == 0) throw DataError("empty population");
    if (model == SamplingModel::independent) {
        return noise_prob_independent(n, static_cast<double>(num_sybil) / static_cast<double>(population), tau);
    }
    check_tau(tau);
    if (n > kMaxExactSampleSize) throw DataError("sampling size too large for exact enumeration");
    if (2 * n > population) throw DataError("disjoint sampling needs 2n <= population");
    double total = 0.0;
    for (std::size_t n_bb = 0; n_bb <= n; ++n_bb) {
        const double p_b = hypergeometric_pmf(num_benign, num_sybil, n, n_bb);
        if (p_b == 0.0) continue;
        const std::size_t n_bs = n - n_bb;
        for (std::size_t n_sb = 0; n_sb <= n; ++n_sb) {
            if (!both_within(n_bb, n_bs, n_sb, n - n_sb, tau)) continue;
            total += p_b * hypergeometric_pmf(num_benign - n_bb, num_sybil - n_bs, n, n_sb);
        }
    }
    return total;
}

MonteCarloEstimate noise_prob_mc_independent(std::size_t n, double r, double tau, std::size_t trials,
                                             std::uint64_t seed) {
    if (trials == 0) throw InvalidArgument("Monte-Carlo needs at least one trial");
    check_tau(tau);
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t n_bs = 0;
        std::size_t n_ss = 0;
        for (std::size_t i = 0; i < n; ++i) n_bs += uniform_unit(rng) < r ? 1 : 0;
        for (std::size_t i = 0; i < n; ++i) n_ss += uniform_unit(rng) < r ? 1 : 0;
        hits += both_within(n - n_bs, n_bs, n - n_ss, n_ss, tau) ? 1 : 0;
    }
    return finish(hits, trials);
}

MonteCarloEstimate noise_prob_mc(std::size_t num_benign, std::size_t num_sybil, std::size_t n, double tau,
                                 SamplingModel model, std::size_t trials, std::uint64_t seed) {
    const std::size_t population = num_benign + num_sybil;
    if (population == 0) throw DataError("empty population");
    if (model == SamplingModel::independent) {
        return noise_prob_mc_independent(n, static_cast<double>(num_sybil) / static_cast<double>(population), tau,
                                         trials, seed);
    }
    if (trials == 0) throw InvalidArgument("Monte-Carlo needs at least one trial");
    check_tau(tau);
    if (2 * n > population) throw DataError("disjoint sampling needs 2n <= population");
    Rng rng(seed);
    // Ids below num_benign are benign. A partial Fisher-Yates pass over any
    // permutation yields a uniform ordered sample, so the array is never reset.
    std::vector<std::size_t> nodes(population);
    std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < 2 * n; ++i) std::swap(nodes[i], nodes[i + uniform_below(rng, population - i)]);
        std::size_t n_bb = 0;
        std::size_t n_sb = 0;
        for (std::size_t i = 0; i < n; ++i) n_bb += nodes[i] < num_benign ? 1 : 0;
        for (std::size_t i = n; i < 2 * n; ++i) n_sb += nodes[i] < num_benign ? 1 : 0;
        hits += both_within(n_bb, n - n_bb, n_sb, n - n_sb, tau) ? 1 : 0;
    }
    return finish(hits, trials);
}

std::vector<SweepPoint> sweep(SweepAxis axis, std::span<const double> values, const ScenarioSpec& base_scenario,
                              const SybilBlindConfig& base_config) {
    const bool scenario_varies = axis == SweepAxis::attack_edges || axis == SweepAxis::sybil_fraction;
    std::optional<Scenario> shared;
    if (!scenario_varies) shared = build_scenario(base_scenario);

    std::vector<SweepPoint> points;
    points.reserve(values.size());
    for (double value : values) {
        if (!(value >= 0.0) || !std::isfinite(value)) throw InvalidArgument("sweep values must be finite and >= 0");
        ScenarioSpec spec = base_scenario;
        SybilBlindConfig cfg = base_config;
        const auto count = static_cast<std::size_t>(std::llround(value));
        switch (axis) {
            case SweepAxis::attack_edges: spec.num_attack_edges = count; break;
            case SweepAxis::sybil_fraction: spec.sybil_fraction = value; break;
            case SweepAxis::sampling_size: cfg.n = count; break;
            case SweepAxis::trials:
                cfg.k = count;
                cfg.kappa = std::min(cfg.kappa, cfg.k);
                break;
        }
        std::optional<Scenario> own;
        if (scenario_varies) own = build_scenario(spec);
        const Scenario& scenario = scenario_varies ? *own : *shared;
        auto result = run_sybilblind(scenario.graph, cfg);
        points.push_back({value, auc(result.aggregated, scenario.truth), result.selected_trial_index});
    }
    return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points, bool header) {
    if (header) out << "value,auc\n";
    for (const auto& p : points) out << format_double(p.value) << ',' << format_double(p.auc) << '\n';
}

}  // namespace sybilblind
