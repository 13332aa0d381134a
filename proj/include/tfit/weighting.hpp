#pragma once

#include <cstdint>

#include "tfit/cooc.hpp"

namespace tfit {

struct WeightStats {
    std::uint64_t cells_before = 0;
    std::uint64_t cells_after = 0;
    std::uint64_t dropped_nonpositive = 0;    // association <= 0, removed from the support
    std::uint64_t dropped_zero_expected = 0;  // degenerate marginals, removed with a warning count
};

// All association scores use log base 2. Downstream weighted overlap depends
// only on ranks, so the base is inert there, but serialized values need one
// fixed choice.

// PPMI(w,c) = max(log2(|w,c| * D / (|w| * |c|)), 0); zero cells leave the
// sparse support. Throws data_error if the matrix is already weighted or D=0.
CoocMatrix ppmi(CoocMatrix matrix, WeightStats* stats = nullptr);

// PLMI(w,c) = PPMI(w,c) * |w,c|; same clamping and sparsity behavior.
CoocMatrix plmi_matrix(CoocMatrix matrix, WeightStats* stats = nullptr);

// PLMI(v,r,f) = max(log2(O/E) * O, 0) with E = m(v)*m(r)*m(f)/T^2 under
// three-way independence.
RoleTensor plmi_tensor(RoleTensor tensor, WeightStats* stats = nullptr);

}  // namespace tfit
