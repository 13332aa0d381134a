#include "tfit/cooc.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <utility>

#include "bytes.hpp"
#include "tfit/errors.hpp"

namespace tfit {

namespace {

constexpr char kMatrixMagic[4] = {'T', 'F', 'C', 'M'};
constexpr char kTensorMagic[4] = {'T', 'F', 'R', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open store file: " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read failed: " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open store file for writing: " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

// Shared container head/tail: magic, version, total size, payload, crc32.
// The size field lets a short read surface as `truncated` before the
// checksum is even looked at.
std::string seal(detail::ByteWriter&& w) {
    w.patch_u64(8, w.size() + 4);
    std::uint32_t crc = detail::crc32(w.data().data(), w.size());
    w.u32(crc);
    return w.data();
}

detail::ByteReader open_container(const std::string& data, const char magic[4],
                                  const std::filesystem::path& path) {
    if (data.size() < 4 || std::memcmp(data.data(), magic, 4) != 0)
        throw load_error(load_error_kind::bad_magic, "not a recognized store file: " + path.string());
    if (data.size() < 16)
        throw load_error(load_error_kind::truncated, "store file header cut short: " + path.string());
    detail::ByteReader header(data.data() + 4, 12);
    std::uint32_t version = header.u32();
    if (version != kFormatVersion)
        throw load_error(load_error_kind::version_mismatch,
                         "unsupported store format version " + std::to_string(version) + ": " +
                             path.string());
    std::uint64_t total = header.u64();
    if (data.size() != total)
        throw load_error(load_error_kind::truncated,
                         "store file size mismatch (expected " + std::to_string(total) + " bytes, have " +
                             std::to_string(data.size()) + "): " + path.string());
    detail::ByteReader tail(data.data() + data.size() - 4, 4);
    std::uint32_t stored_crc = tail.u32();
    std::uint32_t actual_crc = detail::crc32(data.data(), data.size() - 4);
    if (stored_crc != actual_crc)
        throw load_error(load_error_kind::checksum_mismatch, "store file checksum mismatch: " + path.string());
    return detail::ByteReader(data.data() + 16, data.size() - 20);
}

void write_vocab(detail::ByteWriter& w, const std::vector<std::string>& vocab) {
    w.varint(vocab.size());
    for (const auto& s : vocab) w.str(s);
}

std::vector<std::string> read_vocab(detail::ByteReader& r) {
    auto n = r.varint();
    std::vector<std::string> vocab;
    vocab.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) vocab.push_back(r.str());
    return vocab;
}

void write_marginals(detail::ByteWriter& w, const std::vector<double>& m) {
    for (double v : m) w.f64(v);
}

std::vector<double> read_marginals(detail::ByteReader& r, std::size_t n) {
    std::vector<double> m(n);
    for (auto& v : m) v = r.f64();
    return m;
}

}  // namespace

const char* to_string(Weighting w) {
    switch (w) {
        case Weighting::raw: return "raw";
        case Weighting::ppmi: return "ppmi";
        case Weighting::plmi: return "plmi";
    }
    return "?";
}

std::size_t CoocMatrix::n_cells() const {
    std::size_t n = 0;
    for (const auto& row : rows_) n += row.size();
    return n;
}

std::optional<std::uint32_t> CoocMatrix::target_id(std::string_view name) const {
    auto it = target_ids_.find(name);
    if (it == target_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> CoocMatrix::context_id(std::string_view name) const {
    auto it = context_ids_.find(name);
    if (it == context_ids_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::pair<std::string, double>> CoocMatrix::row(std::string_view target) const {
    std::vector<std::pair<std::string, double>> out;
    auto id = target_id(target);
    if (!id) return out;
    const auto& cells = rows_[*id];
    out.reserve(cells.size());
    for (const auto& c : cells) out.emplace_back(contexts_[c.col], c.value);
    return out;
}

double CoocMatrix::value(std::string_view target, std::string_view context) const {
    auto t = target_id(target);
    auto c = context_id(context);
    if (!t || !c) return 0.0;
    const auto& cells = rows_[*t];
    auto it = std::lower_bound(cells.begin(), cells.end(), *c,
                               [](const Cell& cell, std::uint32_t col) { return cell.col < col; });
    if (it == cells.end() || it->col != *c) return 0.0;
    return it->value;
}

void CoocMatrix::rebuild_index() {
    target_ids_.clear();
    context_ids_.clear();
    target_ids_.reserve(targets_.size());
    context_ids_.reserve(contexts_.size());
    for (std::uint32_t i = 0; i < targets_.size(); ++i) target_ids_.emplace(targets_[i], i);
    for (std::uint32_t i = 0; i < contexts_.size(); ++i) context_ids_.emplace(contexts_[i], i);
}

bool CoocMatrix::operator==(const CoocMatrix& other) const {
    return targets_ == other.targets_ && contexts_ == other.contexts_ && rows_ == other.rows_ &&
           target_marg_ == other.target_marg_ && context_marg_ == other.context_marg_ &&
           total_ == other.total_ && weighted_ == other.weighted_;
}

void CoocMatrix::save(const std::filesystem::path& path) const {
    detail::ByteWriter w;
    w.raw(kMatrixMagic, 4);
    w.u32(kFormatVersion);
    w.u64(0);  // total size, patched by seal()
    w.u8(static_cast<std::uint8_t>(weighted_));
    write_vocab(w, targets_);
    write_vocab(w, contexts_);
    write_marginals(w, target_marg_);
    write_marginals(w, context_marg_);
    w.f64(total_);
    for (const auto& row : rows_) {
        w.varint(row.size());
        std::uint32_t prev = 0;
        bool first = true;
        for (const auto& c : row) {
            w.varint(first ? c.col : c.col - prev);
            w.f64(c.value);
            prev = c.col;
            first = false;
        }
    }
    write_file(path, seal(std::move(w)));
}

CoocMatrix CoocMatrix::load(const std::filesystem::path& path) {
    auto data = read_file(path);
    auto r = open_container(data, kMatrixMagic, path);
    CoocMatrix m;
    auto flag = r.u8();
    if (flag > static_cast<std::uint8_t>(Weighting::plmi))
        throw load_error(load_error_kind::truncated, "store file: bad weighting flag");
    m.weighted_ = static_cast<Weighting>(flag);
    m.targets_ = read_vocab(r);
    m.contexts_ = read_vocab(r);
    m.target_marg_ = read_marginals(r, m.targets_.size());
    m.context_marg_ = read_marginals(r, m.contexts_.size());
    m.total_ = r.f64();
    m.rows_.resize(m.targets_.size());
    for (auto& row : m.rows_) {
        auto n = r.varint();
        row.reserve(n);
        std::uint32_t col = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            auto delta = r.varint();
            col = (i == 0) ? static_cast<std::uint32_t>(delta) : col + static_cast<std::uint32_t>(delta);
            if (col >= m.contexts_.size())
                throw load_error(load_error_kind::truncated, "store file: cell column out of range");
            row.push_back(Cell{col, r.f64()});
        }
    }
    if (r.remaining() != 0)
        throw load_error(load_error_kind::truncated, "store file: trailing bytes after payload");
    m.rebuild_index();
    return m;
}

void CoocMatrix::export_tsv(std::ostream& out) const {
    for (std::uint32_t t = 0; t < rows_.size(); ++t)
        for (const auto& c : rows_[t])
            out << targets_[t] << '\t' << contexts_[c.col] << '\t' << fmt_double(c.value) << '\n';
}

void MatrixBuilder::add(std::string_view target, std::string_view context, std::uint64_t count) {
    if (count == 0) return;
    auto t = targets_.intern(target);
    auto c = contexts_.intern(context);
    cells_[(static_cast<std::uint64_t>(t) << 32) | c] += count;
    multiplicity_ += count;
}

void MatrixBuilder::merge(MatrixBuilder&& other) {
    for (const auto& [key, count] : other.cells_) {
        auto t = other.targets_.name(static_cast<std::uint32_t>(key >> 32));
        auto c = other.contexts_.name(static_cast<std::uint32_t>(key & 0xFFFFFFFFu));
        add(t, c, count);
    }
    other.cells_.clear();
    other.multiplicity_ = 0;
}

namespace {

// Sorted survivor vocabulary plus an old-id -> new-id translation table.
struct VocabRemap {
    std::vector<std::string> vocab;
    std::vector<std::uint32_t> new_id;  // indexed by old id; only valid where used
};

VocabRemap remap_used(const std::vector<std::string>& names, const std::vector<char>& used) {
    VocabRemap out;
    out.new_id.resize(names.size());
    std::vector<std::uint32_t> order;
    for (std::uint32_t i = 0; i < names.size(); ++i)
        if (used[i]) order.push_back(i);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return names[a] < names[b]; });
    out.vocab.reserve(order.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        out.new_id[order[rank]] = rank;
        out.vocab.push_back(names[order[rank]]);
    }
    return out;
}

}  // namespace

CoocMatrix MatrixBuilder::finish(std::uint64_t min_target_freq, std::uint64_t min_context_freq) {
    std::vector<std::uint64_t> target_freq(targets_.size(), 0);
    std::vector<std::uint64_t> context_freq(contexts_.size(), 0);
    for (const auto& [key, count] : cells_) {
        target_freq[key >> 32] += count;
        context_freq[key & 0xFFFFFFFFu] += count;
    }
    std::vector<char> keep_t(targets_.size()), keep_c(contexts_.size());
    for (std::size_t i = 0; i < target_freq.size(); ++i) keep_t[i] = target_freq[i] >= min_target_freq;
    for (std::size_t i = 0; i < context_freq.size(); ++i) keep_c[i] = context_freq[i] >= min_context_freq;

    std::vector<char> used_t(targets_.size(), 0), used_c(contexts_.size(), 0);
    std::size_t surviving = 0;
    for (const auto& [key, count] : cells_) {
        auto t = static_cast<std::uint32_t>(key >> 32);
        auto c = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
        if (!keep_t[t] || !keep_c[c]) continue;
        used_t[t] = used_c[c] = 1;
        ++surviving;
    }
    if (!cells_.empty() && surviving == 0)
        throw data_error("matrix build: min_target_freq=" + std::to_string(min_target_freq) +
                         ", min_context_freq=" + std::to_string(min_context_freq) +
                         " leave an empty matrix");

    auto tmap = remap_used(targets_.items(), used_t);
    auto cmap = remap_used(contexts_.items(), used_c);

    CoocMatrix m;
    m.targets_ = std::move(tmap.vocab);
    m.contexts_ = std::move(cmap.vocab);
    m.rows_.resize(m.targets_.size());
    std::vector<std::uint64_t> tmarg(m.targets_.size(), 0), cmarg(m.contexts_.size(), 0);
    std::uint64_t total = 0;
    for (const auto& [key, count] : cells_) {
        auto t = static_cast<std::uint32_t>(key >> 32);
        auto c = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
        if (!keep_t[t] || !keep_c[c]) continue;
        auto nt = tmap.new_id[t];
        auto nc = cmap.new_id[c];
        m.rows_[nt].push_back(Cell{nc, static_cast<double>(count)});
        tmarg[nt] += count;
        cmarg[nc] += count;
        total += count;
    }
    for (auto& row : m.rows_)
        std::sort(row.begin(), row.end(), [](const Cell& a, const Cell& b) { return a.col < b.col; });
    m.target_marg_.assign(tmarg.begin(), tmarg.end());
    m.context_marg_.assign(cmarg.begin(), cmarg.end());
    m.total_ = static_cast<double>(total);
    m.weighted_ = Weighting::raw;
    m.rebuild_index();
    return m;
}

std::size_t RoleTensor::n_entries() const {
    std::size_t n = 0;
    for (const auto& v : by_verb_) n += v.size();
    return n;
}

std::optional<std::uint32_t> RoleTensor::verb_id(std::string_view name) const {
    auto it = verb_ids_.find(name);
    if (it == verb_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> RoleTensor::relation_id(std::string_view name) const {
    auto it = rel_ids_.find(name);
    if (it == rel_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> RoleTensor::filler_id(std::string_view name) const {
    auto it = filler_ids_.find(name);
    if (it == filler_ids_.end()) return std::nullopt;
    return it->second;
}

double RoleTensor::value(std::string_view verb, std::string_view relation,
                         std::string_view filler) const {
    auto v = verb_id(verb);
    auto r = relation_id(relation);
    auto f = filler_id(filler);
    if (!v || !r || !f) return 0.0;
    const auto& entries = by_verb_[*v];
    auto key = std::make_pair(*r, *f);
    auto it = std::lower_bound(entries.begin(), entries.end(), key,
                               [](const TensorEntry& e, const std::pair<std::uint32_t, std::uint32_t>& k) {
                                   return std::make_pair(e.relation, e.filler) < k;
                               });
    if (it == entries.end() || it->relation != key.first || it->filler != key.second) return 0.0;
    return it->value;
}

void RoleTensor::rebuild_index() {
    verb_ids_.clear();
    rel_ids_.clear();
    filler_ids_.clear();
    for (std::uint32_t i = 0; i < verbs_.size(); ++i) verb_ids_.emplace(verbs_[i], i);
    for (std::uint32_t i = 0; i < relations_.size(); ++i) rel_ids_.emplace(relations_[i], i);
    for (std::uint32_t i = 0; i < fillers_.size(); ++i) filler_ids_.emplace(fillers_[i], i);
}

bool RoleTensor::operator==(const RoleTensor& other) const {
    return verbs_ == other.verbs_ && relations_ == other.relations_ && fillers_ == other.fillers_ &&
           by_verb_ == other.by_verb_ && verb_marg_ == other.verb_marg_ &&
           rel_marg_ == other.rel_marg_ && filler_marg_ == other.filler_marg_ &&
           total_ == other.total_ && weighted_ == other.weighted_;
}

void RoleTensor::save(const std::filesystem::path& path) const {
    detail::ByteWriter w;
    w.raw(kTensorMagic, 4);
    w.u32(kFormatVersion);
    w.u64(0);  // patched by seal()
    w.u8(static_cast<std::uint8_t>(weighted_));
    write_vocab(w, verbs_);
    write_vocab(w, relations_);
    write_vocab(w, fillers_);
    write_marginals(w, verb_marg_);
    write_marginals(w, rel_marg_);
    write_marginals(w, filler_marg_);
    w.f64(total_);
    for (const auto& entries : by_verb_) {
        w.varint(entries.size());
        std::uint64_t prev = 0;
        bool first = true;
        for (const auto& e : entries) {
            std::uint64_t key = (static_cast<std::uint64_t>(e.relation) << 32) | e.filler;
            w.varint(first ? key : key - prev);
            w.f64(e.value);
            prev = key;
            first = false;
        }
    }
    write_file(path, seal(std::move(w)));
}

RoleTensor RoleTensor::load(const std::filesystem::path& path) {
    auto data = read_file(path);
    auto r = open_container(data, kTensorMagic, path);
    RoleTensor t;
    auto flag = r.u8();
    if (flag > static_cast<std::uint8_t>(Weighting::plmi))
        throw load_error(load_error_kind::truncated, "store file: bad weighting flag");
    t.weighted_ = static_cast<Weighting>(flag);
    t.verbs_ = read_vocab(r);
    t.relations_ = read_vocab(r);
    t.fillers_ = read_vocab(r);
    t.verb_marg_ = read_marginals(r, t.verbs_.size());
    t.rel_marg_ = read_marginals(r, t.relations_.size());
    t.filler_marg_ = read_marginals(r, t.fillers_.size());
    t.total_ = r.f64();
    t.by_verb_.resize(t.verbs_.size());
    for (auto& entries : t.by_verb_) {
        auto n = r.varint();
        entries.reserve(n);
        std::uint64_t key = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            auto delta = r.varint();
            key = (i == 0) ? delta : key + delta;
            auto rel = static_cast<std::uint32_t>(key >> 32);
            auto fil = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
            if (rel >= t.relations_.size() || fil >= t.fillers_.size())
                throw load_error(load_error_kind::truncated, "store file: entry id out of range");
            entries.push_back(TensorEntry{rel, fil, r.f64()});
        }
    }
    if (r.remaining() != 0)
        throw load_error(load_error_kind::truncated, "store file: trailing bytes after payload");
    t.rebuild_index();
    return t;
}

void RoleTensor::export_tsv(std::ostream& out) const {
    for (std::uint32_t v = 0; v < by_verb_.size(); ++v)
        for (const auto& e : by_verb_[v])
            out << verbs_[v] << '\t' << relations_[e.relation] << '\t' << fillers_[e.filler] << '\t'
                << fmt_double(e.value) << '\n';
}

namespace {

constexpr std::uint32_t kMaxVerbs = 1u << 24;
constexpr std::uint32_t kMaxRelations = 1u << 16;
constexpr std::uint32_t kMaxFillers = 1u << 24;

}  // namespace

void TensorBuilder::add(std::string_view verb, std::string_view relation, std::string_view filler,
                        std::uint64_t count) {
    if (count == 0) return;
    auto v = verbs_.intern(verb);
    auto r = relations_.intern(relation);
    auto f = fillers_.intern(filler);
    if (v >= kMaxVerbs || r >= kMaxRelations || f >= kMaxFillers)
        throw data_error("tensor build: vocabulary exceeds supported size");
    cells_[(static_cast<std::uint64_t>(v) << 40) | (static_cast<std::uint64_t>(r) << 24) | f] += count;
    multiplicity_ += count;
}

void TensorBuilder::merge(TensorBuilder&& other) {
    for (const auto& [key, count] : other.cells_) {
        const auto& v = other.verbs_.name(static_cast<std::uint32_t>(key >> 40));
        const auto& r = other.relations_.name(static_cast<std::uint32_t>((key >> 24) & 0xFFFFu));
        const auto& f = other.fillers_.name(static_cast<std::uint32_t>(key & 0xFFFFFFu));
        add(v, r, f, count);
    }
    other.cells_.clear();
    other.multiplicity_ = 0;
}

RoleTensor TensorBuilder::finish(std::uint64_t min_verb_freq, std::uint64_t min_filler_freq) {
    std::vector<std::uint64_t> verb_freq(verbs_.size(), 0);
    std::vector<std::uint64_t> filler_freq(fillers_.size(), 0);
    for (const auto& [key, count] : cells_) {
        verb_freq[key >> 40] += count;
        filler_freq[key & 0xFFFFFFu] += count;
    }
    std::vector<char> keep_v(verbs_.size()), keep_f(fillers_.size());
    for (std::size_t i = 0; i < verb_freq.size(); ++i) keep_v[i] = verb_freq[i] >= min_verb_freq;
    for (std::size_t i = 0; i < filler_freq.size(); ++i) keep_f[i] = filler_freq[i] >= min_filler_freq;

    std::vector<char> used_v(verbs_.size(), 0), used_r(relations_.size(), 0), used_f(fillers_.size(), 0);
    std::size_t surviving = 0;
    for (const auto& [key, count] : cells_) {
        auto v = static_cast<std::uint32_t>(key >> 40);
        auto f = static_cast<std::uint32_t>(key & 0xFFFFFFu);
        if (!keep_v[v] || !keep_f[f]) continue;
        used_v[v] = used_f[f] = 1;
        used_r[(key >> 24) & 0xFFFFu] = 1;
        ++surviving;
    }
    if (!cells_.empty() && surviving == 0)
        throw data_error("tensor build: min_verb_freq=" + std::to_string(min_verb_freq) +
                         ", min_filler_freq=" + std::to_string(min_filler_freq) +
                         " leave an empty tensor");

    auto vmap = remap_used(verbs_.items(), used_v);
    auto rmap = remap_used(relations_.items(), used_r);
    auto fmap = remap_used(fillers_.items(), used_f);

    RoleTensor t;
    t.verbs_ = std::move(vmap.vocab);
    t.relations_ = std::move(rmap.vocab);
    t.fillers_ = std::move(fmap.vocab);
    t.by_verb_.resize(t.verbs_.size());
    std::vector<std::uint64_t> vmarg(t.verbs_.size(), 0), rmarg(t.relations_.size(), 0),
        fmarg(t.fillers_.size(), 0);
    std::uint64_t total = 0;
    for (const auto& [key, count] : cells_) {
        auto v = static_cast<std::uint32_t>(key >> 40);
        auto r = static_cast<std::uint32_t>((key >> 24) & 0xFFFFu);
        auto f = static_cast<std::uint32_t>(key & 0xFFFFFFu);
        if (!keep_v[v] || !keep_f[f]) continue;
        auto nv = vmap.new_id[v];
        auto nr = rmap.new_id[r];
        auto nf = fmap.new_id[f];
        t.by_verb_[nv].push_back(TensorEntry{nr, nf, static_cast<double>(count)});
        vmarg[nv] += count;
        rmarg[nr] += count;
        fmarg[nf] += count;
        total += count;
    }
    for (auto& entries : t.by_verb_)
        std::sort(entries.begin(), entries.end(), [](const TensorEntry& a, const TensorEntry& b) {
            return std::make_pair(a.relation, a.filler) < std::make_pair(b.relation, b.filler);
        });
    t.verb_marg_.assign(vmarg.begin(), vmarg.end());
    t.rel_marg_.assign(rmarg.begin(), rmarg.end());
    t.filler_marg_.assign(fmarg.begin(), fmarg.end());
    t.total_ = static_cast<double>(total);
    t.weighted_ = Weighting::raw;
    t.rebuild_index();
    return t;
}

}  // namespace tfit
