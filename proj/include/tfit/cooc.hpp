#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tfit/util.hpp"

namespace tfit {

enum class Weighting : std::uint8_t { raw = 0, ppmi = 1, plmi = 2 };

const char* to_string(Weighting w);

class CoocMatrix;
class RoleTensor;
struct WeightStats;
CoocMatrix ppmi(CoocMatrix matrix, WeightStats* stats);
CoocMatrix plmi_matrix(CoocMatrix matrix, WeightStats* stats);
RoleTensor plmi_tensor(RoleTensor tensor, WeightStats* stats);

struct Cell {
    std::uint32_t col;
    double value;
    bool operator==(const Cell&) const = default;
};

// Sparse word-context co-occurrence matrix with frozen vocabularies.
// Vocabularies are sorted lexicographically, so column-id order is string
// order. Marginals and the grand total D always describe the raw counts the
// matrix was built from, also after weighting.
class CoocMatrix {
public:
    CoocMatrix() = default;

    std::size_t n_targets() const { return targets_.size(); }
    std::size_t n_contexts() const { return contexts_.size(); }
    std::size_t n_cells() const;

    const std::vector<std::string>& targets() const { return targets_; }
    const std::vector<std::string>& contexts() const { return contexts_; }

    std::optional<std::uint32_t> target_id(std::string_view name) const;
    std::optional<std::uint32_t> context_id(std::string_view name) const;
    const std::string& target_name(std::uint32_t id) const { return targets_[id]; }
    const std::string& context_name(std::uint32_t id) const { return contexts_[id]; }

    const std::vector<Cell>& row_cells(std::uint32_t target_id) const { return rows_[target_id]; }

    // Stored row as (context, value); empty for out-of-vocabulary targets.
    std::vector<std::pair<std::string, double>> row(std::string_view target) const;

    double value(std::string_view target, std::string_view context) const;

    double target_marginal(std::uint32_t id) const { return target_marg_[id]; }
    double context_marginal(std::uint32_t id) const { return context_marg_[id]; }
    double total() const { return total_; }
    Weighting weighted() const { return weighted_; }

    void save(const std::filesystem::path& path) const;
    static CoocMatrix load(const std::filesystem::path& path);
    void export_tsv(std::ostream& out) const;  // target<TAB>context<TAB>value

    bool operator==(const CoocMatrix& other) const;

private:
    friend class MatrixBuilder;
    friend CoocMatrix ppmi(CoocMatrix, WeightStats*);
    friend CoocMatrix plmi_matrix(CoocMatrix, WeightStats*);

    std::vector<std::string> targets_;
    std::vector<std::string> contexts_;
    StringIdMap target_ids_;
    StringIdMap context_ids_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<double> target_marg_;
    std::vector<double> context_marg_;
    double total_ = 0.0;
    Weighting weighted_ = Weighting::raw;

    void rebuild_index();
};

// Accumulates (target, context, count) pairs. Sharded builds merge their
// partial builders; merging is associative and commutative.
class MatrixBuilder {
public:
    void add(std::string_view target, std::string_view context, std::uint64_t count = 1);
    void merge(MatrixBuilder&& other);
    std::uint64_t pair_multiplicity() const { return multiplicity_; }
    bool empty() const { return cells_.empty(); }

    // Freezes vocabularies and computes marginals. A lexeme survives when its
    // summed pair frequency is >= the threshold; cells survive when both ends
    // do. Thresholding a non-empty build down to nothing is an error; an empty
    // build yields a valid empty matrix.
    CoocMatrix finish(std::uint64_t min_target_freq = 0, std::uint64_t min_context_freq = 0);

private:
    Interner targets_;
    Interner contexts_;
    std::unordered_map<std::uint64_t, std::uint64_t> cells_;  // (target<<32|context) -> count
    std::uint64_t multiplicity_ = 0;
};

struct TensorEntry {
    std::uint32_t relation;
    std::uint32_t filler;
    double value;
    bool operator==(const TensorEntry&) const = default;
};

// Sparse (verb, relation, filler) co-occurrence store; houses the observed
// counts and the marginals needed for expected counts under independence.
class RoleTensor {
public:
    RoleTensor() = default;

    std::size_t n_verbs() const { return verbs_.size(); }
    std::size_t n_relations() const { return relations_.size(); }
    std::size_t n_fillers() const { return fillers_.size(); }
    std::size_t n_entries() const;

    const std::vector<std::string>& verbs() const { return verbs_; }
    const std::vector<std::string>& relations() const { return relations_; }
    const std::vector<std::string>& fillers() const { return fillers_; }

    std::optional<std::uint32_t> verb_id(std::string_view name) const;
    std::optional<std::uint32_t> relation_id(std::string_view name) const;
    std::optional<std::uint32_t> filler_id(std::string_view name) const;
    const std::string& verb_name(std::uint32_t id) const { return verbs_[id]; }
    const std::string& relation_name(std::uint32_t id) const { return relations_[id]; }
    const std::string& filler_name(std::uint32_t id) const { return fillers_[id]; }

    const std::vector<TensorEntry>& verb_entries(std::uint32_t verb_id) const { return by_verb_[verb_id]; }
    double value(std::string_view verb, std::string_view relation, std::string_view filler) const;

    double verb_marginal(std::uint32_t id) const { return verb_marg_[id]; }
    double relation_marginal(std::uint32_t id) const { return rel_marg_[id]; }
    double filler_marginal(std::uint32_t id) const { return filler_marg_[id]; }
    double total() const { return total_; }
    Weighting weighted() const { return weighted_; }

    void save(const std::filesystem::path& path) const;
    static RoleTensor load(const std::filesystem::path& path);
    void export_tsv(std::ostream& out) const;  // verb<TAB>relation<TAB>filler<TAB>value

    bool operator==(const RoleTensor& other) const;

private:
    friend class TensorBuilder;
    friend RoleTensor plmi_tensor(RoleTensor, WeightStats*);

    std::vector<std::string> verbs_;
    std::vector<std::string> relations_;
    std::vector<std::string> fillers_;
    StringIdMap verb_ids_;
    StringIdMap rel_ids_;
    StringIdMap filler_ids_;
    std::vector<std::vector<TensorEntry>> by_verb_;  // sorted by (relation, filler)
    std::vector<double> verb_marg_;
    std::vector<double> rel_marg_;
    std::vector<double> filler_marg_;
    double total_ = 0.0;
    Weighting weighted_ = Weighting::raw;

    void rebuild_index();
};

class TensorBuilder {
public:
    void add(std::string_view verb, std::string_view relation, std::string_view filler,
             std::uint64_t count = 1);
    void merge(TensorBuilder&& other);
    std::uint64_t triple_multiplicity() const { return multiplicity_; }
    bool empty() const { return cells_.empty(); }

    // Optional frequency thresholds on verbs and fillers, analogous to the
    // matrix build; 0 disables them.
    RoleTensor finish(std::uint64_t min_verb_freq = 0, std::uint64_t min_filler_freq = 0);

private:
    Interner verbs_;
    Interner relations_;
    Interner fillers_;
    std::unordered_map<std::uint64_t, std::uint64_t> cells_;  // packed (verb, rel, filler)
    std::uint64_t multiplicity_ = 0;
};

}  // namespace tfit
