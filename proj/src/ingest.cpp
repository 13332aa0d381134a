#include "tfit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <optional>
#include <utility>

#include "tfit/errors.hpp"

namespace tfit {

RelationInventory::RelationInventory(std::set<std::string> labels, std::string inverse_suffix)
    : labels_(std::move(labels)), inverse_suffix_(std::move(inverse_suffix)) {}

RelationInventory RelationInventory::defaults() {
    return RelationInventory({"sbj", "sbj-1", "obj", "obj-1", "at-1", "in-1", "on-1", "with-1"});
}

RelationInventory RelationInventory::defaults_with_direct_preps() {
    auto inv = defaults();
    for (const char* p : {"at", "in", "on", "with"}) inv.labels_.insert(p);
    return inv;
}

bool RelationInventory::has_direct(std::string_view relation) const {
    return labels_.count(std::string(relation)) != 0;
}

bool RelationInventory::has_inverse(std::string_view relation) const {
    std::string inv(relation);
    inv += inverse_suffix_;
    return labels_.count(inv) != 0;
}

LabelMapping LabelMapping::ud_default() {
    LabelMapping m;
    m.set("nsubj", "sbj");
    m.set("csubj", "sbj");
    m.set("obj", "obj");
    m.set("dobj", "obj");
    m.set("obl", "@prep");
    m.set("nmod", "@prep");
    m.set("case", "@case");
    return m;
}

LabelMapping LabelMapping::from_tsv(std::istream& in) {
    LabelMapping m;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw config_error("label mapping line " + std::to_string(lineno) +
                               ": expected parser_label<TAB>relation");
        m.set(std::string(fields[0]), std::string(fields[1]));
    }
    return m;
}

void LabelMapping::set(std::string parser_label, std::string relation) {
    map_[std::move(parser_label)] = std::move(relation);
}

const std::string* LabelMapping::lookup(std::string_view parser_label) const {
    auto it = map_.find(parser_label);
    if (it != map_.end()) return &it->second;
    if (auto colon = parser_label.find(':'); colon != std::string_view::npos) {
        it = map_.find(parser_label.substr(0, colon));
        if (it != map_.end()) return &it->second;
    }
    return nullptr;
}

void IngestStats::record(std::uint64_t line, std::string msg) {
    if (errors.size() < max_recorded_errors) errors.emplace_back(line, std::move(msg));
}

void IngestStats::absorb(const IngestStats& other) {
    lines += other.lines;
    sentences += other.sentences;
    edges += other.edges;
    edge_multiplicity += other.edge_multiplicity;
    malformed_lines += other.malformed_lines;
    dropped_arcs += other.dropped_arcs;
    for (const auto& e : other.errors) {
        if (errors.size() >= max_recorded_errors) break;
        errors.push_back(e);
    }
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// NOUN/PROPN -> -n, VERB -> -v, ADJ -> -j; anything else has no DSM lexeme.
std::optional<std::string> suffixed_lemma(std::string_view lemma, std::string_view form,
                                          std::string_view upos) {
    char suffix;
    if (upos == "NOUN" || upos == "PROPN")
        suffix = 'n';
    else if (upos == "VERB")
        suffix = 'v';
    else if (upos == "ADJ")
        suffix = 'j';
    else
        return std::nullopt;
    std::string_view base = (lemma.empty() || lemma == "_") ? form : lemma;
    if (base.empty() || base == "_") return std::nullopt;
    auto out = lower_ascii(base);
    out += '-';
    out += suffix;
    return out;
}

struct Token {
    std::uint32_t id;
    std::uint32_t head;
    std::string lemma;
    std::string form;
    std::string upos;
    std::string deprel;
};

bool parse_u32(std::string_view s, std::uint32_t& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

struct SentenceCtx {
    std::vector<Token> tokens;
    std::string sent_id;
};

void flush_sentence(SentenceCtx& sent, std::uint64_t ordinal, const LabelMapping& mapping,
                    const EdgeSink& sink, IngestStats& stats) {
    if (sent.tokens.empty()) return;
    ++stats.sentences;
    std::string sentence_id = sent.sent_id.empty() ? std::to_string(ordinal) : sent.sent_id;

    std::unordered_map<std::uint32_t, const Token*> by_id;
    by_id.reserve(sent.tokens.size());
    for (const auto& t : sent.tokens) by_id.emplace(t.id, &t);

    // First case child per head, by token order, supplies the preposition
    // label for @prep arcs.
    std::unordered_map<std::uint32_t, std::string> prep_of;
    for (const auto& t : sent.tokens) {
        const std::string* rel = mapping.lookup(t.deprel);
        if (!rel || *rel != "@case") continue;
        std::string_view base = (t.lemma.empty() || t.lemma == "_") ? t.form : t.lemma;
        if (base.empty()) continue;
        prep_of.emplace(t.head, lower_ascii(base));
    }

    for (const auto& t : sent.tokens) {
        if (t.head == 0) continue;
        const std::string* rel = mapping.lookup(t.deprel);
        if (!rel) {
            ++stats.dropped_arcs;
            continue;
        }
        if (*rel == "@case") continue;  // consumed by PP collapsing
        std::string relation;
        if (*rel == "@prep") {
            auto it = prep_of.find(t.id);
            if (it == prep_of.end()) {
                ++stats.dropped_arcs;
                continue;
            }
            relation = it->second;
        } else {
            relation = *rel;
        }
        auto hit = by_id.find(t.head);
        if (hit == by_id.end()) {
            ++stats.dropped_arcs;
            continue;
        }
        const Token& h = *hit->second;
        auto head_lemma = suffixed_lemma(h.lemma, h.form, h.upos);
        auto dep_lemma = suffixed_lemma(t.lemma, t.form, t.upos);
        if (!head_lemma || !dep_lemma) {
            ++stats.dropped_arcs;
            continue;
        }
        sink(DepEdge{std::move(*head_lemma), std::move(*dep_lemma), std::move(relation), 1,
                     sentence_id});
        ++stats.edges;
        ++stats.edge_multiplicity;
    }
    sent.tokens.clear();
    sent.sent_id.clear();
}

}  // namespace

IngestStats read_conllu(std::istream& in, const LabelMapping& mapping, const EdgeSink& sink) {
    IngestStats stats;
    SentenceCtx sent;
    std::uint64_t ordinal = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++stats.lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush_sentence(sent, ++ordinal, mapping, sink, stats);
            continue;
        }
        if (line[0] == '#') {
            std::string_view v(line);
            if (v.starts_with("# sent_id")) {
                if (auto eq = v.find('='); eq != std::string_view::npos) {
                    auto id = v.substr(eq + 1);
                    while (!id.empty() && id.front() == ' ') id.remove_prefix(1);
                    sent.sent_id = std::string(id);
                }
            }
            continue;
        }
        if (!valid_utf8(line)) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "invalid UTF-8");
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 10) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "expected 10 columns, got " + std::to_string(fields.size()));
            continue;
        }
        // Multiword-token ranges (1-2) and empty nodes (1.1) are not arcs.
        if (fields[0].find('-') != std::string_view::npos ||
            fields[0].find('.') != std::string_view::npos)
            continue;
        Token t;
        if (!parse_u32(fields[0], t.id) || t.id == 0) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "bad token id '" + std::string(fields[0]) + "'");
            continue;
        }
        if (!parse_u32(fields[6], t.head)) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "bad head '" + std::string(fields[6]) + "'");
            continue;
        }
        t.form = std::string(fields[1]);
        t.lemma = std::string(fields[2]);
        t.upos = std::string(fields[3]);
        t.deprel = std::string(fields[7]);
        sent.tokens.push_back(std::move(t));
    }
    flush_sentence(sent, ++ordinal, mapping, sink, stats);
    return stats;
}

IngestStats read_triples(std::istream& in, const EdgeSink& sink) {
    IngestStats stats;
    std::string line;
    while (std::getline(in, line)) {
        ++stats.lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!valid_utf8(line)) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "invalid UTF-8");
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 3 && fields.size() != 4) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
            continue;
        }
        if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
            ++stats.malformed_lines;
            stats.record(stats.lines, "empty field");
            continue;
        }
        std::uint64_t count = 1;
        if (fields.size() == 4) {
            auto s = fields[3];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), count);
            if (ec != std::errc() || p != s.data() + s.size() || count == 0) {
                ++stats.malformed_lines;
                stats.record(stats.lines, "count is not a positive integer: '" + std::string(s) + "'");
                continue;
            }
        }
        sink(DepEdge{std::string(fields[0]), std::string(fields[2]), std::string(fields[1]), count,
                     {}});
        ++stats.edges;
        stats.edge_multiplicity += count;
    }
    return stats;
}

std::vector<DsmPair> edges_to_dsm_pairs(const DepEdge& edge, const RelationInventory& inventory) {
    std::vector<DsmPair> out;
    if (edge.count == 0) return out;
    if (inventory.has_direct(edge.relation)) {
        std::string ctx = edge.relation;
        ctx += ':';
        ctx += edge.dep;
        out.push_back(DsmPair{edge.head, std::move(ctx), edge.count});
    }
    if (inventory.has_inverse(edge.relation)) {
        std::string ctx = edge.relation;
        ctx += inventory.inverse_suffix();
        ctx += ':';
        ctx += edge.head;
        out.push_back(DsmPair{edge.dep, std::move(ctx), edge.count});
    }
    return out;
}

}  // namespace tfit
