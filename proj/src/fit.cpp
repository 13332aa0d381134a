#include "tfit/fit.hpp"

#include <algorithm>
#include <cmath>

#include "tfit/errors.hpp"

namespace tfit {

Metric metric_from_name(std::string_view name) {
    if (name == "wo") return Metric::wo;
    if (name == "cosine") return Metric::cosine;
    throw config_error("unknown metric '" + std::string(name) + "' (expected wo, cosine)");
}

const char* to_string(Metric m) {
    return m == Metric::wo ? "wo" : "cosine";
}

// 1/avg(rx, ry) = 2/(rx + ry); ranks come from the full vectors, n only
// limits which features are eligible for the intersection.
FitScore weighted_overlap(const RankedVector& x, const RankedVector& y, std::size_t n) {
    TopNIndex index(x, n);
    return index.overlap(y);
}

TopNIndex::TopNIndex(const RankedVector& v, std::size_t n) : vec_(&v), n_(n) {
    auto top = std::min(n, v.size());
    rank_of_.reserve(top);
    for (std::size_t i = 0; i < top; ++i)
        rank_of_.emplace(std::string_view(v[i].context), static_cast<std::uint32_t>(i + 1));
}

FitScore TopNIndex::overlap(const RankedVector& y) const {
    FitScore score;
    score.metric = Metric::wo;
    score.n_used = n_;
    auto top = std::min(n_, y.size());
    double sum = 0.0;
    std::size_t shared = 0;
    for (std::size_t i = 0; i < top; ++i) {
        auto it = rank_of_.find(std::string_view(y[i].context));
        if (it == rank_of_.end()) continue;
        sum += 2.0 / (static_cast<double>(it->second) + static_cast<double>(i + 1));
        ++shared;
    }
    score.value = sum;
    score.shared_features = shared;
    return score;
}

FitScore cosine(const SparseVec& u, const SparseVec& v) {
    FitScore score;
    score.metric = Metric::cosine;
    score.n_used = 0;
    double nu = 0.0, nv = 0.0;
    for (const auto& [k, w] : u) nu += w * w;
    for (const auto& [k, w] : v) nv += w * w;
    if (nu == 0.0 || nv == 0.0) return score;

    const SparseVec& small = u.size() <= v.size() ? u : v;
    const SparseVec& large = u.size() <= v.size() ? v : u;
    std::unordered_map<std::string_view, double> lookup;
    lookup.reserve(small.size());
    for (const auto& [k, w] : small) lookup.emplace(std::string_view(k), w);
    double dot = 0.0;
    std::size_t shared = 0;
    for (const auto& [k, w] : large) {
        auto it = lookup.find(std::string_view(k));
        if (it == lookup.end()) continue;
        dot += w * it->second;
        ++shared;
    }
    score.value = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
    score.shared_features = shared;
    return score;
}

FitScore thematic_fit(const CoocMatrix& matrix, const Prototype& prototype,
                      std::string_view candidate, std::size_t n, Metric metric) {
    if (prototype.ranked.empty() || !matrix.target_id(candidate)) {
        FitScore score;
        score.metric = metric;
        score.n_used = metric == Metric::wo ? n : 0;
        score.covered = false;
        return score;
    }
    auto cand = rank_vector(matrix, candidate, prototype.filter);
    if (metric == Metric::wo) {
        auto score = weighted_overlap(prototype.ranked, cand, n);
        score.covered = true;
        return score;
    }
    SparseVec u, v;
    u.reserve(prototype.ranked.size());
    for (const auto& item : prototype.ranked) u.emplace_back(item.context, item.weight);
    v.reserve(cand.size());
    for (const auto& item : cand) v.emplace_back(item.context, item.weight);
    auto score = cosine(u, v);
    score.covered = true;
    return score;
}

}  // namespace tfit
