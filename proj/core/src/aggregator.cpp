#include "sybilblind/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sybilblind/error.hpp"

namespace sybilblind {

Prediction predict(std::span<const double> posteriors) {
    Prediction out;
    out.sybil.resize(posteriors.size());
    std::size_t count = 0;
    for (std::size_t u = 0; u < posteriors.size(); ++u) {
        out.sybil[u] = posteriors[u] > 0.5 ? 1 : 0;
        count += out.sybil[u];
    }
    if (!posteriors.empty()) out.sybil_fraction = static_cast<double>(count) / static_cast<double>(posteriors.size());
    return out;
}

double homophily(const Graph& g, std::span<const std::uint8_t> sybil) {
    if (g.num_edges() == 0) throw DataError("homophily of a graph without edges");
    if (sybil.size() != g.num_nodes()) throw DataError("label vector does not match the graph");
    std::size_t same = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (NodeId v : g.neighbors(u)) same += (u < v && sybil[u] == sybil[v]) ? 1 : 0;
    }
    return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

double one_side_entropy(double s) {
    if (s > 0.5) return 0.0;
    auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
    return term(s) + term(1.0 - s);
}

TrialDiagnostics diagnose(const Graph& g, std::span<const double> posteriors, std::size_t trial_index) {
    auto pred = predict(posteriors);
    TrialDiagnostics d;
    d.trial_index = trial_index;
    d.s = pred.sybil_fraction;
    d.h = homophily(g, pred.sybil);
    d.e = one_side_entropy(d.s);
    return d;
}

namespace {

double primary(const TrialDiagnostics& d, SelectionOrder order) {
    return order == SelectionOrder::homophily_first ? d.h : d.e;
}

double secondary(const TrialDiagnostics& d, SelectionOrder order) {
    return order == SelectionOrder::homophily_first ? d.e : d.h;
}

}  // namespace

bool ranks_before(const TrialDiagnostics& a, const TrialDiagnostics& b, SelectionOrder order) {
    if (primary(a, order) != primary(b, order)) return primary(a, order) > primary(b, order);
    return a.trial_index < b.trial_index;
}

std::size_t select_trial(std::span<const TrialDiagnostics> trials, std::size_t kappa, SelectionOrder order) {
    if (trials.empty()) throw InvalidArgument("no trials to select from");
    if (kappa < 1 || kappa > trials.size()) {
        throw InvalidArgument("kappa = " + std::to_string(kappa) + " must lie in [1, " +
                              std::to_string(trials.size()) + "]");
    }
    std::vector<std::size_t> idx(trials.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kappa), idx.end(),
                      [&](std::size_t a, std::size_t b) { return ranks_before(trials[a], trials[b], order); });

    // Within the top-kappa list, idx is already in ranks_before order, so a
    // strict improvement test keeps the earlier (better-ranked) trial on ties.
    std::size_t best = idx[0];
    for (std::size_t i = 1; i < kappa; ++i) {
        if (secondary(trials[idx[i]], order) > secondary(trials[best], order)) best = idx[i];
    }
    return best;
}

HeaSelection hea_select(std::span<const TrialResult> trials, std::size_t kappa, SelectionOrder order) {
    std::vector<TrialDiagnostics> diags;
    diags.reserve(trials.size());
    for (const auto& t : trials) diags.push_back(t.diagnostics);
    const std::size_t pos = select_trial(diags, kappa, order);
    return {trials[pos].diagnostics.trial_index, trials[pos].posteriors};
}

std::vector<double> baseline_aggregate(std::span<const std::vector<double>> posteriors, Baseline mode) {
    if (posteriors.empty()) throw InvalidArgument("no trials to aggregate");
    const std::size_t n = posteriors.front().size();
    for (const auto& p : posteriors) {
        if (p.size() != n) throw InvalidArgument("posterior vectors differ in length");
    }
    std::vector<double> out = posteriors.front();
    for (std::size_t t = 1; t < posteriors.size(); ++t) {
        const auto& p = posteriors[t];
        for (std::size_t u = 0; u < n; ++u) {
            switch (mode) {
                case Baseline::average: out[u] += p[u]; break;
                case Baseline::min: out[u] = std::min(out[u], p[u]); break;
                case Baseline::max: out[u] = std::max(out[u], p[u]); break;
            }
        }
    }
    if (mode == Baseline::average) {
        const double k = static_cast<double>(posteriors.size());
        for (double& x : out) x /= k;
    }
    return out;
}

}  // namespace sybilblind
