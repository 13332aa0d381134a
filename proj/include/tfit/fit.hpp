#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tfit/cooc.hpp"
#include "tfit/prototype.hpp"

namespace tfit {

enum class Metric { wo, cosine };
Metric metric_from_name(std::string_view name);
const char* to_string(Metric m);

struct FitScore {
    double value = 0.0;
    std::size_t n_used = 0;           // the N cutoff (0 when the metric has none)
    std::size_t shared_features = 0;  // intersected top-N contexts / common support
    Metric metric = Metric::wo;
    bool covered = true;
};

// WO(x, y) = sum over f in top-N(x) intersect top-N(y) of 1/avg(r_x(f), r_y(f)).
// Ranks are positions in the full ranked vectors; N truncates only the
// eligible intersection. Empty vectors or empty intersections score 0.
FitScore weighted_overlap(const RankedVector& x, const RankedVector& y, std::size_t n);

// Precomputed top-n lookup table for one side of the overlap; reuse it when
// one vector is scored against many. Holds views into the source vector,
// which must outlive the index.
class TopNIndex {
public:
    TopNIndex(const RankedVector& v, std::size_t n);
    std::size_t n() const { return n_; }
    const RankedVector& vec() const { return *vec_; }
    FitScore overlap(const RankedVector& y) const;

private:
    const RankedVector* vec_;
    std::size_t n_;
    std::unordered_map<std::string_view, std::uint32_t> rank_of_;
};

using SparseVec = std::vector<std::pair<std::string, double>>;

// dot(u,v) / (|u|*|v|); either vector zero gives 0 (defined, not an error).
FitScore cosine(const SparseVec& u, const SparseVec& v);

// Score a candidate against a prototype. The candidate's vector is built
// under the prototype's own context filter. A candidate without a vector, or
// an empty prototype, yields 0 with covered=false.
FitScore thematic_fit(const CoocMatrix& matrix, const Prototype& prototype,
                      std::string_view candidate, std::size_t n, Metric metric);

}  // namespace tfit
