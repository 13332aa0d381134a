// tfit: build syntax-based DSMs, extract role prototypes, score thematic fit,
// and evaluate against human plausibility ratings.
//
// Exit codes: 0 success, 2 bad configuration, 3 I/O failure, 4 bad data.

#include <array>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfit/errors.hpp"
#include "tfit/evaluate.hpp"
#include "tfit/ingest.hpp"
#include "tfit/weighting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tfit;

namespace {

struct CommonOpts {
    std::string data_dir;
    std::string matrix_path;
    std::string tensor_path;

    fs::path matrix() const {
        return matrix_path.empty() ? fs::path(data_dir) / "matrix.tfm" : fs::path(matrix_path);
    }
    fs::path tensor() const {
        return tensor_path.empty() ? fs::path(data_dir) / "tensor.tft" : fs::path(tensor_path);
    }
};

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open output file: " + path.string());
    out << content;
    out.flush();
    if (!out) throw io_error("write failed: " + path.string());
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_text(out_path, content);
}

CoocMatrix load_matrix_as(const fs::path& path, const std::string& weight) {
    if (!fs::exists(path))
        throw io_error("matrix store not found: " + path.string() +
                       " (build one with `tfit build-matrix` or set --matrix/TFK_DATA_DIR)");
    auto m = CoocMatrix::load(path);
    if (m.weighted() == Weighting::raw) {
        if (weight == "ppmi") return ppmi(std::move(m));
        if (weight == "plmi") return plmi_matrix(std::move(m));
        return m;  // raw requested
    }
    if (to_string(m.weighted()) != weight)
        throw config_error("matrix store is " + std::string(to_string(m.weighted())) +
                           "-weighted but --weight asks for " + weight);
    return m;
}

RoleTensor load_tensor_plmi(const fs::path& path) {
    if (!fs::exists(path))
        throw io_error("tensor store not found: " + path.string() +
                       " (build one with `tfit build-tensor` or set --tensor/TFK_DATA_DIR)");
    auto t = RoleTensor::load(path);
    if (t.weighted() == Weighting::raw) return plmi_tensor(std::move(t));
    return t;
}

json stats_json(const IngestStats& s) {
    json j;
    j["lines"] = s.lines;
    j["sentences"] = s.sentences;
    j["edges"] = s.edges;
    j["edge_multiplicity"] = s.edge_multiplicity;
    j["malformed_lines"] = s.malformed_lines;
    j["dropped_arcs"] = s.dropped_arcs;
    return j;
}

json weight_stats_json(const WeightStats& w) {
    json j;
    j["cells_before"] = w.cells_before;
    j["cells_after"] = w.cells_after;
    j["dropped_nonpositive"] = w.dropped_nonpositive;
    j["dropped_zero_expected"] = w.dropped_zero_expected;
    return j;
}

enum class InputFormat { triples, conllu };

InputFormat resolve_format(const std::string& flag, const fs::path& input) {
    if (flag == "triples") return InputFormat::triples;
    if (flag == "conllu") return InputFormat::conllu;
    auto ext = input.extension().string();
    return (ext == ".conllu" || ext == ".conll") ? InputFormat::conllu : InputFormat::triples;
}

LabelMapping load_mapping(const std::string& path) {
    if (path.empty()) return LabelMapping::ud_default();
    std::ifstream in(path);
    if (!in) throw io_error("cannot open label mapping: " + path);
    return LabelMapping::from_tsv(in);
}

// ---------------------------------------------------------------- build

struct BuildMatrixOpts {
    std::vector<std::string> inputs;
    std::string format = "auto";
    std::string weight = "ppmi";
    std::uint64_t min_target_freq = 0;
    std::uint64_t min_context_freq = 0;
    std::string mapping;
    bool direct_preps = false;
    std::string out;
};

int cmd_build_matrix(const CommonOpts& common, const BuildMatrixOpts& o) {
    auto inventory = o.direct_preps ? RelationInventory::defaults_with_direct_preps()
                                    : RelationInventory::defaults();
    auto mapping = load_mapping(o.mapping);
    MatrixBuilder builder;
    IngestStats stats;
    EdgeSink sink = [&](const DepEdge& e) {
        for (const auto& p : edges_to_dsm_pairs(e, inventory)) builder.add(p.target, p.context, p.count);
    };
    for (const auto& input : o.inputs) {
        std::ifstream in(input);
        if (!in) throw io_error("cannot open input: " + input);
        auto s = resolve_format(o.format, input) == InputFormat::conllu
                     ? read_conllu(in, mapping, sink)
                     : read_triples(in, sink);
        stats.absorb(s);
    }
    if (builder.empty())
        throw data_error("no usable word-context pairs in input; nothing to build");
    auto pair_count = builder.pair_multiplicity();
    auto matrix = builder.finish(o.min_target_freq, o.min_context_freq);
    WeightStats ws;
    if (o.weight == "ppmi")
        matrix = ppmi(std::move(matrix), &ws);
    else if (o.weight == "plmi")
        matrix = plmi_matrix(std::move(matrix), &ws);

    auto out = o.out.empty() ? common.matrix() : fs::path(o.out);
    if (out.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out.parent_path(), ec);
    }
    matrix.save(out);

    json manifest;
    manifest["command"] = "build-matrix";
    manifest["inputs"] = o.inputs;
    manifest["config"] = {{"format", o.format},
                          {"weight", o.weight},
                          {"min_target_freq", o.min_target_freq},
                          {"min_context_freq", o.min_context_freq},
                          {"direct_preps", o.direct_preps},
                          {"mapping", o.mapping.empty() ? "ud-default" : o.mapping}};
    manifest["ingest"] = stats_json(stats);
    manifest["pair_multiplicity"] = pair_count;
    manifest["matrix"] = {{"targets", matrix.n_targets()},
                          {"contexts", matrix.n_contexts()},
                          {"cells", matrix.n_cells()},
                          {"total", matrix.total()},
                          {"weighted", to_string(matrix.weighted())}};
    if (o.weight != "raw") manifest["weighting"] = weight_stats_json(ws);
    manifest["out"] = out.string();
    write_text(out.string() + ".manifest.json", manifest.dump(2) + "\n");

    std::cout << "matrix: " << matrix.n_targets() << " targets, " << matrix.n_contexts()
              << " contexts, " << matrix.n_cells() << " cells -> " << out.string() << '\n';
    return 0;
}

struct BuildTensorOpts {
    std::vector<std::string> inputs;
    std::string format = "auto";
    std::string weight = "plmi";
    std::uint64_t min_verb_freq = 0;
    std::uint64_t min_filler_freq = 0;
    std::string mapping;
    std::string out;
};

int cmd_build_tensor(const CommonOpts& common, const BuildTensorOpts& o) {
    auto mapping = load_mapping(o.mapping);
    TensorBuilder builder;
    IngestStats stats;
    EdgeSink sink = [&](const DepEdge& e) { builder.add(e.head, e.relation, e.dep, e.count); };
    for (const auto& input : o.inputs) {
        std::ifstream in(input);
        if (!in) throw io_error("cannot open input: " + input);
        auto s = resolve_format(o.format, input) == InputFormat::conllu
                     ? read_conllu(in, mapping, sink)
                     : read_triples(in, sink);
        stats.absorb(s);
    }
    if (builder.empty()) throw data_error("no usable triples in input; nothing to build");
    auto triple_count = builder.triple_multiplicity();
    auto tensor = builder.finish(o.min_verb_freq, o.min_filler_freq);
    WeightStats ws;
    if (o.weight == "plmi") tensor = plmi_tensor(std::move(tensor), &ws);

    auto out = o.out.empty() ? common.tensor() : fs::path(o.out);
    if (out.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(out.parent_path(), ec);
    }
    tensor.save(out);

    json manifest;
    manifest["command"] = "build-tensor";
    manifest["inputs"] = o.inputs;
    manifest["config"] = {{"format", o.format},
                          {"weight", o.weight},
                          {"min_verb_freq", o.min_verb_freq},
                          {"min_filler_freq", o.min_filler_freq},
                          {"mapping", o.mapping.empty() ? "ud-default" : o.mapping}};
    manifest["ingest"] = stats_json(stats);
    manifest["triple_multiplicity"] = triple_count;
    manifest["tensor"] = {{"verbs", tensor.n_verbs()},
                          {"relations", tensor.n_relations()},
                          {"fillers", tensor.n_fillers()},
                          {"entries", tensor.n_entries()},
                          {"total", tensor.total()},
                          {"weighted", to_string(tensor.weighted())}};
    if (o.weight != "raw") manifest["weighting"] = weight_stats_json(ws);
    manifest["out"] = out.string();
    write_text(out.string() + ".manifest.json", manifest.dump(2) + "\n");

    std::cout << "tensor: " << tensor.n_verbs() << " verbs, " << tensor.n_relations()
              << " relations, " << tensor.n_fillers() << " fillers, " << tensor.n_entries()
              << " entries -> " << out.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- scoring

struct ScoreContext {
    const CoocMatrix* matrix;
    const RoleTensor* tensor;
    MergeMode merge;
    ContextFilter filter;
    std::size_t k;
    std::size_t n;
    Metric metric;
};

// Builds each (verb, role) prototype once and reuses it. A verb missing from
// the tensor or a prototype whose fillers are all OOV yields uncovered items
// rather than an abort.
class PrototypeScorer {
public:
    explicit PrototypeScorer(const ScoreContext& ctx)
        : ctx_(ctx), roles_(RoleRegistry::defaults()) {}

    FitScore score(const std::string& verb, const std::string& role, const std::string& candidate) {
        const Prototype* p = prototype_for(verb, role);
        if (!p || p->ranked.empty()) {
            FitScore s;
            s.metric = ctx_.metric;
            s.n_used = ctx_.metric == Metric::wo ? ctx_.n : 0;
            s.covered = false;
            return s;
        }
        return thematic_fit(*ctx_.matrix, *p, candidate, ctx_.n, ctx_.metric);
    }

    const Prototype* prototype_for(const std::string& verb, const std::string& role) {
        auto key = verb + "\t" + role;
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            std::optional<Prototype> built;
            auto spec = roles_.resolve(role);
            auto picks = top_fillers(*ctx_.tensor, verb, spec, ctx_.k, ctx_.merge);
            if (!picks.empty()) {
                try {
                    built = build_prototype(*ctx_.matrix, verb, spec, ctx_.k, picks, ctx_.filter);
                } catch (const data_error&) {
                    built.reset();
                }
            }
            it = cache_.emplace(std::move(key), std::move(built)).first;
        }
        return it->second ? &*it->second : nullptr;
    }

private:
    ScoreContext ctx_;
    RoleRegistry roles_;
    std::map<std::string, std::optional<Prototype>> cache_;
};

struct TopFillersOpts {
    std::string verb;
    std::string role;
    std::size_t k = 50;
    std::string merge = "max";
    std::string out;
};

int cmd_top_fillers(const CommonOpts& common, const TopFillersOpts& o) {
    auto tensor = load_tensor_plmi(common.tensor());
    auto spec = RoleRegistry::defaults().resolve(o.role);
    auto picks = top_fillers(tensor, o.verb, spec, o.k, merge_mode_from_name(o.merge));
    if (picks.empty() && !tensor.verb_id(o.verb))
        std::cerr << "note: verb '" << o.verb << "' not in tensor\n";
    std::ostringstream body;
    for (const auto& p : picks) body << p.label << '\t' << fmt_double(p.score) << '\n';
    emit(o.out, body.str());
    return 0;
}

struct PrototypeOpts {
    std::string verb;
    std::string role;
    std::size_t k = 50;
    std::string filter = "all";
    std::string merge = "max";
    std::string weight = "ppmi";
    std::string out;
};

int cmd_prototype(const CommonOpts& common, const PrototypeOpts& o) {
    auto tensor = load_tensor_plmi(common.tensor());
    auto matrix = load_matrix_as(common.matrix(), o.weight);
    auto spec = RoleRegistry::defaults().resolve(o.role);
    auto picks = top_fillers(tensor, o.verb, spec, o.k, merge_mode_from_name(o.merge));
    auto p = build_prototype(matrix, o.verb, spec, o.k, picks, ContextFilter::from_name(o.filter));
    std::ostringstream body;
    export_prototype_tsv(p, body);
    emit(o.out, body.str());
    return 0;
}

struct FitOpts {
    std::string verb;
    std::string role;
    std::vector<std::string> candidates;
    std::string batch;
    std::size_t k = 50;
    std::size_t n = 2000;
    std::string filter = "all";
    std::string merge = "max";
    std::string weight = "ppmi";
    std::string metric = "wo";
    std::string out;
};

int cmd_fit(const CommonOpts& common, const FitOpts& o) {
    std::vector<std::array<std::string, 3>> items;
    if (!o.batch.empty()) {
        if (!o.verb.empty() || !o.candidates.empty())
            throw config_error("--batch replaces the verb/role/candidate arguments");
        std::ifstream in(o.batch);
        if (!in) throw io_error("cannot open batch file: " + o.batch);
        std::string line;
        std::uint64_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto fields = split_tabs(line);
            if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
                throw data_error("batch file line " + std::to_string(lineno) +
                                 ": expected verb<TAB>role<TAB>candidate");
            items.push_back({std::string(fields[0]), std::string(fields[1]), std::string(fields[2])});
        }
    } else {
        if (o.verb.empty() || o.role.empty() || o.candidates.empty())
            throw config_error("need a verb, a role, and at least one candidate (or --batch)");
        for (const auto& c : o.candidates) items.push_back({o.verb, o.role, c});
    }

    auto tensor = load_tensor_plmi(common.tensor());
    auto matrix = load_matrix_as(common.matrix(), o.weight);
    ScoreContext ctx{&matrix,
                     &tensor,
                     merge_mode_from_name(o.merge),
                     ContextFilter::from_name(o.filter),
                     o.k,
                     o.n,
                     metric_from_name(o.metric)};
    PrototypeScorer scorer(ctx);
    std::ostringstream body;
    for (const auto& [verb, role, candidate] : items) {
        auto s = scorer.score(verb, role, candidate);
        body << verb << '\t' << role << '\t' << candidate << '\t' << fmt_double(s.value) << '\t'
             << (s.covered ? '1' : '0') << '\n';
    }
    emit(o.out, body.str());
    return 0;
}

struct EvalOpts {
    std::string gold;
    std::string weight = "ppmi";
    std::string metric = "wo";
    std::string filter = "all";
    std::string merge = "max";
    std::size_t k = 50;
    std::size_t n = 2000;
    std::string role_filter;
    std::string out;
};

EvalReport run_eval(const CoocMatrix& matrix, const RoleTensor& tensor, const GoldDataset& gold,
                    const EvalSettings& settings) {
    ScoreContext ctx{&matrix,
                     &tensor,
                     merge_mode_from_name(settings.merge),
                     ContextFilter::from_name(settings.filter),
                     settings.k,
                     settings.n,
                     metric_from_name(settings.metric)};
    PrototypeScorer scorer(ctx);
    return evaluate_dataset(
        gold, [&](const GoldRecord& r) { return scorer.score(r.verb, r.role, r.filler); }, settings);
}

int cmd_eval(const CommonOpts& common, const EvalOpts& o) {
    auto gold = load_gold(o.gold);
    auto tensor = load_tensor_plmi(common.tensor());
    auto matrix = load_matrix_as(common.matrix(), o.weight);
    EvalSettings settings{o.weight, o.metric, o.filter, o.merge, o.k, o.n, o.role_filter};
    auto report = run_eval(matrix, tensor, gold, settings);

    std::ostringstream summary;
    write_report_summary(report, summary);
    std::cout << summary.str();
    if (!o.out.empty()) {
        write_text(o.out + ".summary.txt", summary.str());
        std::ostringstream items;
        write_report_items_tsv(report, items);
        write_text(o.out + ".items.tsv", items.str());
    }
    return 0;
}

struct GridOpts {
    std::vector<std::string> gold;
    std::string weight = "ppmi";
    std::string merge = "max";
    std::vector<std::size_t> ks{10, 30, 50};
    std::vector<std::size_t> ns{500, 1000, 1500, 2000};
    std::vector<std::string> filters{"all", "so", "prep"};
    std::vector<std::string> metrics{"wo", "cosine"};
    std::string role_filter;
    unsigned jobs = 0;
    std::string out;
};

int cmd_grid(const CommonOpts& common, const GridOpts& o) {
    for (const auto& f : o.filters) ContextFilter::from_name(f);
    for (const auto& m : o.metrics) metric_from_name(m);
    merge_mode_from_name(o.merge);
    for (auto k : o.ks)
        if (k == 0) throw config_error("--k values must be >= 1");
    for (auto n : o.ns)
        if (n == 0) throw config_error("--n values must be >= 1");

    auto tensor = load_tensor_plmi(common.tensor());
    auto matrix = load_matrix_as(common.matrix(), o.weight);
    std::vector<GoldDataset> datasets;
    datasets.reserve(o.gold.size());
    for (const auto& g : o.gold) datasets.push_back(load_gold(g));

    struct Cell {
        const GoldDataset* gold;
        std::string metric;
        std::string filter;
        std::size_t k;
        std::size_t n;
    };
    std::vector<Cell> cells;
    for (const auto& ds : datasets)
        for (const auto& metric : o.metrics)
            for (const auto& filter : o.filters)
                for (auto k : o.ks)
                    for (auto n : o.ns) cells.push_back(Cell{&ds, metric, filter, k, n});

    std::vector<std::string> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            auto i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                const auto& c = cells[i];
                EvalSettings settings{o.weight, c.metric, c.filter, o.merge, c.k, c.n, o.role_filter};
                auto report = run_eval(matrix, tensor, *c.gold, settings);
                char cov[32];
                std::snprintf(cov, sizeof cov, "%.1f", report.coverage_pct);
                std::ostringstream row;
                row << c.gold->name << '\t' << o.weight << '\t' << c.metric << '\t' << c.filter
                    << '\t' << o.merge << '\t' << c.k << '\t' << c.n << '\t'
                    << fmt_double(report.rho.rho) << '\t' << report.n_covered << '\t'
                    << report.n_total << '\t' << cov << '\n';
                rows[i] = row.str();
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(cells.size());
                return;
            }
        }
    };

    unsigned jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<std::size_t>(jobs, cells.size());
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::ostringstream body;
    body << "dataset\tweight\tmetric\tfilter\tmerge\tk\tn\trho\tcovered\ttotal\tcoverage_pct\n";
    for (const auto& row : rows) body << row;
    emit(o.out, body.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thematic fit estimation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a config file");

    CommonOpts common;
    const char* env_dir = std::getenv("TFK_DATA_DIR");
    common.data_dir = env_dir ? env_dir : ".";
    app.add_option("--data-dir", common.data_dir, "store root (default $TFK_DATA_DIR or .)")
        ->capture_default_str();
    app.add_option("--matrix", common.matrix_path, "matrix store path (default <data-dir>/matrix.tfm)");
    app.add_option("--tensor", common.tensor_path, "tensor store path (default <data-dir>/tensor.tft)");

    int rc = 0;

    auto* bm = app.add_subcommand("build-matrix", "build the word-context matrix from corpora");
    auto bm_opts = std::make_shared<BuildMatrixOpts>();
    bm->add_option("inputs", bm_opts->inputs, "triple TSV or CoNLL-U files")->required();
    bm->add_option("--format", bm_opts->format, "input format")
        ->check(CLI::IsMember({"auto", "triples", "conllu"}))
        ->capture_default_str();
    bm->add_option("--weight", bm_opts->weight, "association weighting")
        ->check(CLI::IsMember({"raw", "ppmi", "plmi"}))
        ->capture_default_str();
    bm->add_option("--min-target-freq", bm_opts->min_target_freq, "drop rarer targets")
        ->capture_default_str();
    bm->add_option("--min-context-freq", bm_opts->min_context_freq, "drop rarer contexts")
        ->capture_default_str();
    bm->add_option("--mapping", bm_opts->mapping, "label mapping TSV (default: Universal Dependencies)");
    bm->add_flag("--direct-preps", bm_opts->direct_preps,
                 "also emit direct prepositional contexts (with:, at:, ...)");
    bm->add_option("--out", bm_opts->out, "output store path");
    bm->callback([&rc, &common, bm_opts] { rc = cmd_build_matrix(common, *bm_opts); });

    auto* bt = app.add_subcommand("build-tensor", "build the verb-relation-filler tensor");
    auto bt_opts = std::make_shared<BuildTensorOpts>();
    bt->add_option("inputs", bt_opts->inputs, "triple TSV or CoNLL-U files")->required();
    bt->add_option("--format", bt_opts->format, "input format")
        ->check(CLI::IsMember({"auto", "triples", "conllu"}))
        ->capture_default_str();
    bt->add_option("--weight", bt_opts->weight, "association weighting")
        ->check(CLI::IsMember({"raw", "plmi"}))
        ->capture_default_str();
    bt->add_option("--min-verb-freq", bt_opts->min_verb_freq, "drop rarer verbs")
        ->capture_default_str();
    bt->add_option("--min-filler-freq", bt_opts->min_filler_freq, "drop rarer fillers")
        ->capture_default_str();
    bt->add_option("--mapping", bt_opts->mapping, "label mapping TSV (default: Universal Dependencies)");
    bt->add_option("--out", bt_opts->out, "output store path");
    bt->callback([&rc, &common, bt_opts] { rc = cmd_build_tensor(common, *bt_opts); });

    auto* tf = app.add_subcommand("top-fillers", "list a role's typical fillers by PLMI");
    auto tf_opts = std::make_shared<TopFillersOpts>();
    tf->add_option("verb", tf_opts->verb)->required();
    tf->add_option("role", tf_opts->role, "agent, patient, instrument, location, or a relation")
        ->required();
    tf->add_option("--k", tf_opts->k, "number of fillers")->capture_default_str();
    tf->add_option("--merge", tf_opts->merge, "multi-relation merge mode")
        ->check(CLI::IsMember({"max", "sum", "qualified"}))
        ->capture_default_str();
    tf->add_option("--out", tf_opts->out, "output file (default stdout)");
    tf->callback([&rc, &common, tf_opts] { rc = cmd_top_fillers(common, *tf_opts); });

    auto* pr = app.add_subcommand("prototype", "build and export a role prototype");
    auto pr_opts = std::make_shared<PrototypeOpts>();
    pr->add_option("verb", pr_opts->verb)->required();
    pr->add_option("role", pr_opts->role)->required();
    pr->add_option("--k", pr_opts->k, "number of fillers")->capture_default_str();
    pr->add_option("--filter", pr_opts->filter, "context filter")
        ->check(CLI::IsMember({"all", "so", "prep"}))
        ->capture_default_str();
    pr->add_option("--merge", pr_opts->merge, "multi-relation merge mode")
        ->check(CLI::IsMember({"max", "sum", "qualified"}))
        ->capture_default_str();
    pr->add_option("--weight", pr_opts->weight, "matrix weighting")
        ->check(CLI::IsMember({"ppmi", "plmi"}))
        ->capture_default_str();
    pr->add_option("--out", pr_opts->out, "output file (default stdout)");
    pr->callback([&rc, &common, pr_opts] { rc = cmd_prototype(common, *pr_opts); });

    auto* ft = app.add_subcommand("fit", "score candidate fillers against a role prototype");
    auto ft_opts = std::make_shared<FitOpts>();
    ft->add_option("verb", ft_opts->verb);
    ft->add_option("role", ft_opts->role);
    ft->add_option("candidates", ft_opts->candidates, "candidate filler lexemes");
    ft->add_option("--batch", ft_opts->batch, "TSV file of verb<TAB>role<TAB>candidate rows");
    ft->add_option("--k", ft_opts->k, "number of fillers")->capture_default_str();
    ft->add_option("--n", ft_opts->n, "top-N cutoff for weighted overlap")->capture_default_str();
    ft->add_option("--filter", ft_opts->filter, "context filter")
        ->check(CLI::IsMember({"all", "so", "prep"}))
        ->capture_default_str();
    ft->add_option("--merge", ft_opts->merge, "multi-relation merge mode")
        ->check(CLI::IsMember({"max", "sum", "qualified"}))
        ->capture_default_str();
    ft->add_option("--weight", ft_opts->weight, "matrix weighting")
        ->check(CLI::IsMember({"ppmi", "plmi"}))
        ->capture_default_str();
    ft->add_option("--metric", ft_opts->metric, "similarity metric")
        ->check(CLI::IsMember({"wo", "cosine"}))
        ->capture_default_str();
    ft->add_option("--out", ft_opts->out, "output file (default stdout)");
    ft->callback([&rc, &common, ft_opts] { rc = cmd_fit(common, *ft_opts); });

    auto* ev = app.add_subcommand("eval", "evaluate against a gold plausibility dataset");
    auto ev_opts = std::make_shared<EvalOpts>();
    ev->add_option("gold", ev_opts->gold, "gold TSV: verb<TAB>role<TAB>filler<TAB>rating")
        ->required();
    ev->add_option("--weight", ev_opts->weight, "matrix weighting")
        ->check(CLI::IsMember({"ppmi", "plmi"}))
        ->capture_default_str();
    ev->add_option("--metric", ev_opts->metric, "similarity metric")
        ->check(CLI::IsMember({"wo", "cosine"}))
        ->capture_default_str();
    ev->add_option("--filter", ev_opts->filter, "context filter")
        ->check(CLI::IsMember({"all", "so", "prep"}))
        ->capture_default_str();
    ev->add_option("--merge", ev_opts->merge, "multi-relation merge mode")
        ->check(CLI::IsMember({"max", "sum", "qualified"}))
        ->capture_default_str();
    ev->add_option("--k", ev_opts->k, "number of fillers")->capture_default_str();
    ev->add_option("--n", ev_opts->n, "top-N cutoff for weighted overlap")->capture_default_str();
    ev->add_option("--role-filter", ev_opts->role_filter, "evaluate only items of this role");
    ev->add_option("--out", ev_opts->out, "output prefix for .summary.txt and .items.tsv");
    ev->callback([&rc, &common, ev_opts] { rc = cmd_eval(common, *ev_opts); });

    auto* gr = app.add_subcommand("grid", "sweep settings over one or more gold datasets");
    auto gr_opts = std::make_shared<GridOpts>();
    gr->add_option("gold", gr_opts->gold, "gold TSV files")->required();
    gr->add_option("--weight", gr_opts->weight, "matrix weighting")
        ->check(CLI::IsMember({"ppmi", "plmi"}))
        ->capture_default_str();
    gr->add_option("--merge", gr_opts->merge, "multi-relation merge mode")
        ->check(CLI::IsMember({"max", "sum", "qualified"}))
        ->capture_default_str();
    gr->add_option("--k", gr_opts->ks, "filler counts to sweep")->delimiter(',');
    gr->add_option("--n", gr_opts->ns, "top-N cutoffs to sweep")->delimiter(',');
    gr->add_option("--filter", gr_opts->filters, "context filters to sweep")->delimiter(',');
    gr->add_option("--metric", gr_opts->metrics, "metrics to sweep")->delimiter(',');
    gr->add_option("--role-filter", gr_opts->role_filter, "evaluate only items of this role");
    gr->add_option("--jobs", gr_opts->jobs, "worker threads (default: hardware concurrency)");
    gr->add_option("--out", gr_opts->out, "output TSV (default stdout)");
    gr->callback([&rc, &common, gr_opts] { rc = cmd_grid(common, *gr_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const load_error& e) {
        std::cerr << "load error: " << e.what() << '\n';
        return 3;
    } catch (const io_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
