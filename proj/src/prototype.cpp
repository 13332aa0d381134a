#include "tfit/prototype.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "tfit/errors.hpp"

namespace tfit {

RoleRegistry RoleRegistry::defaults() {
    RoleRegistry r;
    r.set({"agent", {"sbj"}});
    r.set({"patient", {"obj"}});
    r.set({"instrument", {"with"}});
    r.set({"location", {"on", "at", "in"}});
    return r;
}

void RoleRegistry::set(RoleSpec spec) {
    if (spec.name.empty()) throw config_error("role spec needs a name");
    if (spec.relations.empty())
        throw config_error("role '" + spec.name + "' needs at least one relation");
    for (auto& existing : specs_) {
        if (existing.name == spec.name) {
            existing = std::move(spec);
            return;
        }
    }
    specs_.push_back(std::move(spec));
}

const RoleSpec* RoleRegistry::find(std::string_view name) const {
    for (const auto& s : specs_)
        if (s.name == name) return &s;
    return nullptr;
}

RoleSpec RoleRegistry::resolve(std::string_view name) const {
    if (const auto* s = find(name)) return *s;
    return RoleSpec{std::string(name), {std::string(name)}};
}

ContextFilter ContextFilter::from_name(std::string_view name) {
    if (name == "all") return all();
    if (name == "so") return so();
    if (name == "prep") return prep();
    throw config_error("unknown context filter '" + std::string(name) + "' (expected all, so, prep)");
}

bool ContextFilter::accepts(std::string_view context) const {
    if (mode == FilterMode::all) return true;
    auto colon = context.find(':');
    auto relation = colon == std::string_view::npos ? context : context.substr(0, colon);
    const auto& set = mode == FilterMode::so ? so_relations : prep_relations;
    return set.find(relation) != set.end();
}

const char* ContextFilter::name() const {
    switch (mode) {
        case FilterMode::all: return "all";
        case FilterMode::so: return "so";
        case FilterMode::prep: return "prep";
    }
    return "?";
}

RankedVector RankedVector::rank(std::string owner, std::vector<RankedItem> items) {
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.context < b.context;
    });
    RankedVector rv;
    rv.owner_ = std::move(owner);
    rv.items_ = std::move(items);
    return rv;
}

MergeMode merge_mode_from_name(std::string_view name) {
    if (name == "max") return MergeMode::max;
    if (name == "sum") return MergeMode::sum;
    if (name == "qualified") return MergeMode::qualified;
    throw config_error("unknown merge mode '" + std::string(name) + "' (expected max, sum, qualified)");
}

const char* to_string(MergeMode m) {
    switch (m) {
        case MergeMode::max: return "max";
        case MergeMode::sum: return "sum";
        case MergeMode::qualified: return "qualified";
    }
    return "?";
}

std::vector<FillerPick> top_fillers(const RoleTensor& tensor, std::string_view verb,
                                    const RoleSpec& role, std::size_t k, MergeMode merge) {
    std::vector<FillerPick> picks;
    if (k == 0) return picks;
    auto vid = tensor.verb_id(verb);
    if (!vid) return picks;

    std::vector<char> wanted(tensor.n_relations(), 0);
    bool any = false;
    for (const auto& rel : role.relations) {
        if (auto rid = tensor.relation_id(rel)) {
            wanted[*rid] = 1;
            any = true;
        }
    }
    if (!any) return picks;

    const auto& entries = tensor.verb_entries(*vid);
    if (merge == MergeMode::qualified) {
        for (const auto& e : entries) {
            if (!wanted[e.relation]) continue;
            const auto& filler = tensor.filler_name(e.filler);
            picks.push_back(
                FillerPick{filler, tensor.relation_name(e.relation) + ":" + filler, e.value});
        }
    } else {
        std::unordered_map<std::uint32_t, double> merged;
        for (const auto& e : entries) {
            if (!wanted[e.relation]) continue;
            auto [it, fresh] = merged.emplace(e.filler, e.value);
            if (!fresh)
                it->second = merge == MergeMode::max ? std::max(it->second, e.value)
                                                     : it->second + e.value;
        }
        picks.reserve(merged.size());
        for (const auto& [fid, score] : merged) {
            const auto& filler = tensor.filler_name(fid);
            picks.push_back(FillerPick{filler, filler, score});
        }
    }
    std::sort(picks.begin(), picks.end(), [](const FillerPick& a, const FillerPick& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.label < b.label;
    });
    if (picks.size() > k) picks.resize(k);
    return picks;
}

Prototype build_prototype(const CoocMatrix& matrix, std::string_view verb, const RoleSpec& role,
                          std::size_t k_requested, const std::vector<FillerPick>& fillers,
                          const ContextFilter& filter) {
    Prototype p;
    p.verb = std::string(verb);
    p.role = role;
    p.k_requested = k_requested;
    p.filter = filter;

    std::unordered_map<std::uint32_t, double> sum;
    for (const auto& pick : fillers) {
        auto tid = matrix.target_id(pick.lexeme);
        if (!tid) {
            p.fillers_oov.push_back(pick.label);
            continue;
        }
        p.fillers_used.push_back(pick.label);
        for (const auto& cell : matrix.row_cells(*tid)) sum[cell.col] += cell.value;
    }
    if (!fillers.empty() && p.fillers_used.empty()) {
        std::string msg = "prototype for " + p.verb + "/" + role.name +
                          ": all fillers out of vocabulary:";
        for (const auto& f : p.fillers_oov) msg += " " + f;
        throw data_error(msg);
    }

    std::vector<RankedItem> items;
    items.reserve(sum.size());
    for (const auto& [col, weight] : sum) {
        const auto& context = matrix.context_name(col);
        if (filter.accepts(context)) items.push_back(RankedItem{context, weight});
    }
    p.ranked = RankedVector::rank(p.verb + "/" + role.name, std::move(items));
    return p;
}

RankedVector rank_vector(const CoocMatrix& matrix, std::string_view lexeme,
                         const ContextFilter& filter) {
    auto tid = matrix.target_id(lexeme);
    if (!tid) return RankedVector::rank(std::string(lexeme), {});
    std::vector<RankedItem> items;
    const auto& cells = matrix.row_cells(*tid);
    items.reserve(cells.size());
    for (const auto& cell : cells) {
        const auto& context = matrix.context_name(cell.col);
        if (filter.accepts(context)) items.push_back(RankedItem{context, cell.value});
    }
    return RankedVector::rank(std::string(lexeme), std::move(items));
}

void export_prototype_tsv(const Prototype& p, std::ostream& out) {
    out << "# verb=" << p.verb << "\trole=" << p.role.name << "\tfilter=" << p.filter.name()
        << "\tk=" << p.k_requested << "\tfillers_used=";
    for (std::size_t i = 0; i < p.fillers_used.size(); ++i) {
        if (i) out << ',';
        out << p.fillers_used[i];
    }
    out << '\n';
    for (std::size_t i = 0; i < p.ranked.size(); ++i)
        out << p.ranked.rank_at(i) << '\t' << p.ranked[i].context << '\t'
            << fmt_double(p.ranked[i].weight) << '\n';
}

}  // namespace tfit
