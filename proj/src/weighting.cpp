#include "tfit/weighting.hpp"

#include <cmath>

#include "tfit/errors.hpp"

namespace tfit {

namespace {

void require_raw(Weighting state, const char* what) {
    if (state != Weighting::raw)
        throw data_error(std::string(what) + " is already " + to_string(state) +
                         "-weighted; refusing to weight twice");
}

}  // namespace

// Cells become max(log2(count * D / (|w| * |c|)), 0); zero cells leave the
// sparse support. Marginals and D keep describing the raw counts.
CoocMatrix ppmi(CoocMatrix matrix, WeightStats* stats) {
    require_raw(matrix.weighted_, "matrix");
    const double d = matrix.total_;
    if (d <= 0.0) throw data_error("cannot weight a matrix with grand total 0");
    WeightStats ws;
    for (std::uint32_t t = 0; t < matrix.rows_.size(); ++t) {
        auto& row = matrix.rows_[t];
        ws.cells_before += row.size();
        std::size_t keep = 0;
        for (const auto& cell : row) {
            double expected = matrix.target_marg_[t] * matrix.context_marg_[cell.col];
            if (expected <= 0.0) {
                ++ws.dropped_zero_expected;
                continue;
            }
            double pmi = std::log2(cell.value * d / expected);
            if (pmi <= 0.0) {
                ++ws.dropped_nonpositive;
                continue;
            }
            row[keep++] = Cell{cell.col, pmi};
        }
        row.resize(keep);
        ws.cells_after += keep;
    }
    matrix.weighted_ = Weighting::ppmi;
    if (stats) *stats = ws;
    return matrix;
}

// PLMI = PPMI * raw count.
CoocMatrix plmi_matrix(CoocMatrix matrix, WeightStats* stats) {
    require_raw(matrix.weighted_, "matrix");
    const double d = matrix.total_;
    if (d <= 0.0) throw data_error("cannot weight a matrix with grand total 0");
    WeightStats ws;
    for (std::uint32_t t = 0; t < matrix.rows_.size(); ++t) {
        auto& row = matrix.rows_[t];
        ws.cells_before += row.size();
        std::size_t keep = 0;
        for (const auto& cell : row) {
            double expected = matrix.target_marg_[t] * matrix.context_marg_[cell.col];
            if (expected <= 0.0) {
                ++ws.dropped_zero_expected;
                continue;
            }
            double pmi = std::log2(cell.value * d / expected);
            if (pmi <= 0.0) {
                ++ws.dropped_nonpositive;
                continue;
            }
            row[keep++] = Cell{cell.col, pmi * cell.value};
        }
        row.resize(keep);
        ws.cells_after += keep;
    }
    matrix.weighted_ = Weighting::plmi;
    if (stats) *stats = ws;
    return matrix;
}

// Entries become max(log2(O / E) * O, 0) with E = m(v) m(r) m(f) / T^2,
// expectation under three-way independence.
RoleTensor plmi_tensor(RoleTensor tensor, WeightStats* stats) {
    require_raw(tensor.weighted_, "tensor");
    const double total = tensor.total_;
    if (total <= 0.0) throw data_error("cannot weight a tensor with grand total 0");
    WeightStats ws;
    for (std::uint32_t v = 0; v < tensor.by_verb_.size(); ++v) {
        auto& entries = tensor.by_verb_[v];
        ws.cells_before += entries.size();
        std::size_t keep = 0;
        for (const auto& e : entries) {
            double expected = tensor.verb_marg_[v] * tensor.rel_marg_[e.relation] *
                              tensor.filler_marg_[e.filler] / (total * total);
            if (expected <= 0.0) {
                ++ws.dropped_zero_expected;
                continue;
            }
            double lmi = std::log2(e.value / expected) * e.value;
            if (lmi <= 0.0) {
                ++ws.dropped_nonpositive;
                continue;
            }
            entries[keep++] = TensorEntry{e.relation, e.filler, lmi};
        }
        entries.resize(keep);
        ws.cells_after += keep;
    }
    tensor.weighted_ = Weighting::plmi;
    if (stats) *stats = ws;
    return tensor;
}

}  // namespace tfit
