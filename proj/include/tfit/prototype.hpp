#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tfit/cooc.hpp"

namespace tfit {

// Maps an abstract thematic role onto the tensor relations that realize it.
struct RoleSpec {
    std::string name;
    std::vector<std::string> relations;
};

// The four default roles: agent {sbj}, patient {obj}, instrument {with},
// location {on, at, in}. Unknown names resolve to a single-relation spec so
// gold files may name tensor relations directly.
class RoleRegistry {
public:
    static RoleRegistry defaults();
    void set(RoleSpec spec);
    const RoleSpec* find(std::string_view name) const;
    RoleSpec resolve(std::string_view name) const;

private:
    std::vector<RoleSpec> specs_;
};

enum class FilterMode { all, so, prep };

// Syntactic restriction of contexts: SO keeps subject/object relations, PREP
// keeps the inverse prepositional relations, ALL passes everything through.
struct ContextFilter {
    FilterMode mode = FilterMode::all;
    std::set<std::string, std::less<>> so_relations = {"sbj", "sbj-1", "obj", "obj-1"};
    std::set<std::string, std::less<>> prep_relations = {"at-1", "in-1", "on-1", "with-1"};

    static ContextFilter all() { return {FilterMode::all}; }
    static ContextFilter so() { return {FilterMode::so}; }
    static ContextFilter prep() { return {FilterMode::prep}; }
    static ContextFilter from_name(std::string_view name);

    bool accepts(std::string_view context) const;
    const char* name() const;
};

struct RankedItem {
    std::string context;
    double weight;
};

// Contexts sorted by descending weight; equal weights break ties by
// lexicographic context order, so the ranking is a total order. Ranks are
// ordinal positions 1..size with no gaps.
class RankedVector {
public:
    RankedVector() = default;

    static RankedVector rank(std::string owner, std::vector<RankedItem> items);

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const RankedItem& operator[](std::size_t i) const { return items_[i]; }
    std::size_t rank_at(std::size_t i) const { return i + 1; }
    const std::string& owner() const { return owner_; }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

private:
    std::string owner_;
    std::vector<RankedItem> items_;
};

enum class MergeMode { max, sum, qualified };
MergeMode merge_mode_from_name(std::string_view name);
const char* to_string(MergeMode m);

struct FillerPick {
    std::string lexeme;  // bare DSM lexeme used for vector lookup
    std::string label;   // display form; "in:direction-n" under qualified merge
    double score;        // merged PLMI
};

// Top-k fillers of a verb-specific role by PLMI, merged across the role's
// relations. `max` keeps a filler's best relation score, `sum` adds them,
// `qualified` keeps relation-qualified fillers distinct. Fewer than k are
// returned when fewer exist; an absent verb yields an empty list.
std::vector<FillerPick> top_fillers(const RoleTensor& tensor, std::string_view verb,
                                    const RoleSpec& role, std::size_t k,
                                    MergeMode merge = MergeMode::max);

struct Prototype {
    std::string verb;
    RoleSpec role;
    std::size_t k_requested = 0;
    std::vector<std::string> fillers_used;  // labels, in pick order
    std::vector<std::string> fillers_oov;   // labels dropped for missing vectors
    ContextFilter filter;
    RankedVector ranked;
};

// Sum the fillers' rows, keep the contexts the filter accepts, rank. Fillers
// without a vector are recorded and excluded; if none survive, throws
// data_error listing them.
Prototype build_prototype(const CoocMatrix& matrix, std::string_view verb, const RoleSpec& role,
                          std::size_t k_requested, const std::vector<FillerPick>& fillers,
                          const ContextFilter& filter);

// A single lexeme's filtered, salience-ranked vector; empty when the lexeme
// is out of vocabulary.
RankedVector rank_vector(const CoocMatrix& matrix, std::string_view lexeme,
                         const ContextFilter& filter);

// Header line with verb, role, filter, k, fillers_used, then
// rank<TAB>context<TAB>weight rows.
void export_prototype_tsv(const Prototype& p, std::ostream& out);

}  // namespace tfit
