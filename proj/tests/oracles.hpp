#pragma once

// Brute-force reference implementations used as test oracles. Deliberately
// naive and structurally unlike the library: dense maps, positional rank
// counting without sorting, textbook statistics formulas.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Pairs = std::map<std::pair<std::string, std::string>, double>;

inline Pairs ppmi(const Pairs& counts) {
    std::map<std::string, double> tm, cm;
    double total = 0.0;
    for (const auto& [k, v] : counts) {
        tm[k.first] += v;
        cm[k.second] += v;
        total += v;
    }
    Pairs out;
    for (const auto& [k, v] : counts) {
        double pmi = std::log(v * total / (tm[k.first] * cm[k.second])) / std::log(2.0);
        if (pmi > 0.0) out[k] = pmi;
    }
    return out;
}

inline Pairs plmi(const Pairs& counts) {
    std::map<std::string, double> tm, cm;
    double total = 0.0;
    for (const auto& [k, v] : counts) {
        tm[k.first] += v;
        cm[k.second] += v;
        total += v;
    }
    Pairs out;
    for (const auto& [k, v] : counts) {
        double pmi = std::log(v * total / (tm[k.first] * cm[k.second])) / std::log(2.0);
        if (pmi * v > 0.0) out[k] = pmi * v;
    }
    return out;
}

using Triples = std::map<std::tuple<std::string, std::string, std::string>, double>;

inline Triples plmi_tensor(const Triples& counts) {
    std::map<std::string, double> vm, rm, fm;
    double total = 0.0;
    for (const auto& [k, o] : counts) {
        vm[std::get<0>(k)] += o;
        rm[std::get<1>(k)] += o;
        fm[std::get<2>(k)] += o;
        total += o;
    }
    Triples out;
    for (const auto& [k, o] : counts) {
        double expected =
            vm[std::get<0>(k)] * rm[std::get<1>(k)] * fm[std::get<2>(k)] / (total * total);
        double lmi = std::log(o / expected) / std::log(2.0) * o;
        if (lmi > 0.0) out[k] = lmi;
    }
    return out;
}

// Weighted vectors as (context, weight) lists in arbitrary order; contexts
// unique within a vector.
using WVec = std::vector<std::pair<std::string, double>>;

// Position of item i under (weight desc, context asc): one plus the number of
// items strictly ahead of it.
inline std::size_t rank_in(const WVec& v, std::size_t i) {
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j == i) continue;
        if (v[j].second > v[i].second ||
            (v[j].second == v[i].second && v[j].first < v[i].first))
            ++ahead;
    }
    return ahead + 1;
}

inline double wo(const WVec& x, const WVec& y, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t rx = rank_in(x, i);
        if (rx > n) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j].first != x[i].first) continue;
            std::size_t ry = rank_in(y, j);
            if (ry > n) continue;
            sum += 1.0 / ((static_cast<double>(rx) + static_cast<double>(ry)) / 2.0);
        }
    }
    return sum;
}

inline double cosine(const WVec& u, const WVec& v) {
    std::map<std::string, double> mu, mv;
    for (const auto& [k, w] : u) mu[k] += w;
    for (const auto& [k, w] : v) mv[k] += w;
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (const auto& [k, w] : mu) nu += w * w;
    for (const auto& [k, w] : mv) nv += w * w;
    for (const auto& [k, w] : mu) {
        auto it = mv.find(k);
        if (it != mv.end()) dot += w * it->second;
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// 1-based average ranks: #smaller + (#equal + 1) / 2.
inline std::vector<double> avg_ranks(const std::vector<double>& xs) {
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::size_t less = 0, equal = 0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (xs[j] < xs[i]) ++less;
            if (xs[j] == xs[i]) ++equal;
        }
        ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson(avg_ranks(xs), avg_ranks(ys));
}

inline double harmonic(std::size_t m) {
    double h = 0.0;
    for (std::size_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
    return h;
}

}  // namespace oracle
