#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tfit/util.hpp"

namespace tfit {

// One dependency arc, lemmas carrying a POS suffix (-n / -v / -j), e.g.
// (eat-v, obj, pizza-n). `relation` is the base label: sbj, obj, or a
// preposition lemma for collapsed PP attachments.
struct DepEdge {
    std::string head;
    std::string dep;
    std::string relation;
    std::uint64_t count = 1;
    std::string sentence_id;
};

// The set of context relation labels the DSM may emit. A base relation `r`
// contributes a direct context `r:lexeme` iff `r` is listed, and an inverse
// context `r-1:lexeme` iff `r` + inverse_suffix is listed.
class RelationInventory {
public:
    RelationInventory() : RelationInventory(defaults().labels_) {}
    explicit RelationInventory(std::set<std::string> labels, std::string inverse_suffix = "-1");

    // sbj, sbj-1, obj, obj-1, at-1, in-1, on-1, with-1
    static RelationInventory defaults();
    // Same plus the direct prepositional contexts (at, in, on, with). Opt-in;
    // the default inventory lists only the inverse prepositional relations.
    static RelationInventory defaults_with_direct_preps();

    bool has_direct(std::string_view relation) const;
    bool has_inverse(std::string_view relation) const;
    bool knows(std::string_view relation) const { return has_direct(relation) || has_inverse(relation); }

    const std::set<std::string>& labels() const { return labels_; }
    const std::string& inverse_suffix() const { return inverse_suffix_; }

private:
    std::set<std::string> labels_;
    std::string inverse_suffix_;
};

// parser label -> relation. Reserved relation names on the right-hand side:
//   @prep  the arc head->dep is a prepositional attachment; the emitted
//          relation is the lemma of the dependent's @case child
//   @case  marks preposition-attachment arcs; consumed by @prep, never emitted
// Lookup falls back from "label:subtype" to "label" so UD subtypes inherit
// their base label's mapping.
class LabelMapping {
public:
    static LabelMapping ud_default();
    static LabelMapping from_tsv(std::istream& in);

    void set(std::string parser_label, std::string relation);
    const std::string* lookup(std::string_view parser_label) const;

private:
    std::unordered_map<std::string, std::string, StringHash, std::equal_to<>> map_;
};

struct IngestStats {
    std::uint64_t lines = 0;
    std::uint64_t sentences = 0;
    std::uint64_t edges = 0;             // DepEdge emissions
    std::uint64_t edge_multiplicity = 0; // sum of emitted counts
    std::uint64_t malformed_lines = 0;   // skipped with a recorded error
    std::uint64_t dropped_arcs = 0;      // well-formed but unmapped / un-suffixable
    std::vector<std::pair<std::uint64_t, std::string>> errors;  // (line, message)

    static constexpr std::size_t max_recorded_errors = 64;
    void record(std::uint64_t line, std::string msg);
    void absorb(const IngestStats& other);
};

using EdgeSink = std::function<void(const DepEdge&)>;

// Stream CoNLL-U (10 tab-separated columns, blank-line sentence separators,
// `#` comments) into dependency edges. Malformed lines are skipped and
// counted; the stream is never aborted.
IngestStats read_conllu(std::istream& in, const LabelMapping& mapping, const EdgeSink& sink);

// TSV lines `target<TAB>relation<TAB>context<TAB>[count]`, count >= 1
// (default 1). Each line yields one edge carrying its multiplicity.
IngestStats read_triples(std::istream& in, const EdgeSink& sink);

struct DsmPair {
    std::string target;
    std::string context;  // "relation:lexeme"
    std::uint64_t count;
};

// Expand an edge into its word-context pairs: (head, "rel:dep") when the
// inventory lists the direct relation, (dep, "rel-1:head") when it lists the
// inverse. An edge with multiplicity 0 yields nothing.
std::vector<DsmPair> edges_to_dsm_pairs(const DepEdge& edge, const RelationInventory& inventory);

}  // namespace tfit
