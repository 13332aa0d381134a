#include "tfit/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include "tfit/errors.hpp"
#include "tfit/util.hpp"

namespace tfit {

GoldDataset load_gold(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open gold file: " + path.string());
    return load_gold(in, path.filename().string());
}

GoldDataset load_gold(std::istream& in, std::string name) {
    GoldDataset ds;
    ds.name = std::move(name);
    std::string line;
    std::uint64_t lineno = 0, data_lines = 0;
    std::set<std::string> seen;
    std::vector<std::string> duplicates;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        ++data_lines;
        auto fields = split_tabs(line);
        if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
            ++ds.skipped_lines;
            continue;
        }
        std::string rating_str(fields[3]);
        char* end = nullptr;
        double rating = std::strtod(rating_str.c_str(), &end);
        if (end != rating_str.c_str() + rating_str.size() || rating_str.empty() ||
            !std::isfinite(rating)) {
            ++ds.skipped_lines;
            continue;
        }
        std::string key;
        key.reserve(line.size());
        key.append(fields[0]);
        key += '\t';
        key.append(fields[1]);
        key += '\t';
        key.append(fields[2]);
        if (!seen.insert(key).second) {
            duplicates.push_back(std::string(fields[0]) + "/" + std::string(fields[1]) + "/" +
                                 std::string(fields[2]));
            continue;
        }
        ds.records.push_back(
            GoldRecord{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), rating});
    }
    if (!duplicates.empty()) {
        std::string msg = "gold dataset '" + ds.name + "' has duplicate triples:";
        for (const auto& d : duplicates) msg += " " + d;
        throw data_error(msg);
    }
    if (data_lines > 0 && ds.skipped_lines * 10 > data_lines)
        throw data_error("gold dataset '" + ds.name + "': " + std::to_string(ds.skipped_lines) +
                         " of " + std::to_string(data_lines) + " lines unparsable (more than 10%)");
    return ds;
}

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw data_error("spearman: length mismatch (" + std::to_string(xs.size()) + " vs " +
                         std::to_string(ys.size()) + ")");
    if (xs.size() < 2) throw data_error("spearman: need at least 2 observations");
    auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    const double n = static_cast<double>(rx.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mx;
        double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return SpearmanResult{0.0, true};
    double rho = sxy / std::sqrt(sxx * syy);
    return SpearmanResult{std::clamp(rho, -1.0, 1.0), false};
}

FisherResult fisher_rz(double r1, std::size_t n1, double r2, std::size_t n2) {
    if (!(std::fabs(r1) < 1.0) || !(std::fabs(r2) < 1.0))
        throw data_error("fisher_rz: |r| must be < 1 (the transform diverges at 1)");
    if (n1 <= 3 || n2 <= 3) throw data_error("fisher_rz: both sample sizes must exceed 3");
    double z1 = std::atanh(r1);
    double z2 = std::atanh(r2);
    double se = std::sqrt(1.0 / static_cast<double>(n1 - 3) + 1.0 / static_cast<double>(n2 - 3));
    double z = (z1 - z2) / se;
    double p = std::erfc(std::fabs(z) / std::sqrt(2.0));
    return FisherResult{z, p};
}

namespace {

std::array<std::string_view, 3> triple_of(const EvalRecord& r) {
    return {r.item.verb, r.item.role, r.item.filler};
}

}  // namespace

EvalReport evaluate_dataset(const GoldDataset& gold, const Scorer& scorer,
                            const EvalSettings& settings) {
    EvalReport report;
    report.dataset = gold.name;
    report.settings = settings;

    for (const auto& rec : gold.records) {
        if (!settings.role_filter.empty() && rec.role != settings.role_filter) continue;
        FitScore s = scorer(rec);
        EvalRecord row;
        row.item = rec;
        row.score = s.value;
        row.covered = s.covered;
        report.per_item.push_back(std::move(row));
    }
    report.n_total = report.per_item.size();
    if (report.n_total == 0)
        throw data_error("no gold items" + (settings.role_filter.empty()
                                                ? std::string()
                                                : " match role filter '" + settings.role_filter + "'"));

    std::vector<std::size_t> covered;
    for (std::size_t i = 0; i < report.per_item.size(); ++i)
        if (report.per_item[i].covered) covered.push_back(i);
    report.n_covered = covered.size();
    report.coverage_pct = 100.0 * static_cast<double>(report.n_covered) /
                          static_cast<double>(report.n_total);
    if (report.n_covered < 2)
        throw data_error("evaluation needs at least 2 covered items, have " +
                         std::to_string(report.n_covered));

    std::vector<double> gold_vals, score_vals;
    gold_vals.reserve(covered.size());
    score_vals.reserve(covered.size());
    for (auto i : covered) {
        gold_vals.push_back(report.per_item[i].item.rating);
        score_vals.push_back(report.per_item[i].score);
    }
    report.rho = spearman(gold_vals, score_vals);

    auto gold_ranks = average_ranks(gold_vals);
    auto score_ranks = average_ranks(score_vals);
    for (std::size_t k = 0; k < covered.size(); ++k) {
        auto& row = report.per_item[covered[k]];
        row.gold_rank = gold_ranks[k];
        row.score_rank = score_ranks[k];
        row.displacement = std::fabs(gold_ranks[k] - score_ranks[k]);
    }

    std::stable_sort(report.per_item.begin(), report.per_item.end(),
                     [](const EvalRecord& a, const EvalRecord& b) {
                         if (a.covered != b.covered) return a.covered;
                         if (!a.covered) return triple_of(a) < triple_of(b);
                         if (a.displacement != b.displacement) return a.displacement < b.displacement;
                         return triple_of(a) < triple_of(b);
                     });
    return report;
}

double metric_agreement(const EvalReport& a, const EvalReport& b) {
    std::map<std::array<std::string_view, 3>, double> sa, sb;
    for (const auto& r : a.per_item)
        if (r.covered) sa.emplace(triple_of(r), r.score);
    for (const auto& r : b.per_item)
        if (r.covered) sb.emplace(triple_of(r), r.score);
    std::vector<std::string> only_a, only_b;
    for (const auto& [k, v] : sa)
        if (!sb.count(k)) only_a.push_back(std::string(k[0]) + "/" + std::string(k[1]) + "/" +
                                           std::string(k[2]));
    for (const auto& [k, v] : sb)
        if (!sa.count(k)) only_b.push_back(std::string(k[0]) + "/" + std::string(k[1]) + "/" +
                                           std::string(k[2]));
    if (!only_a.empty() || !only_b.empty()) {
        std::string msg = "metric agreement: covered sets differ;";
        if (!only_a.empty()) {
            msg += " only in first:";
            for (const auto& s : only_a) msg += " " + s;
        }
        if (!only_b.empty()) {
            msg += " only in second:";
            for (const auto& s : only_b) msg += " " + s;
        }
        throw data_error(msg);
    }
    std::vector<double> xs, ys;
    xs.reserve(sa.size());
    ys.reserve(sb.size());
    for (const auto& [k, v] : sa) {
        xs.push_back(v);
        ys.push_back(sb.at(k));
    }
    return spearman(xs, ys).rho;
}

BestWorst best_worst(const EvalReport& report, std::size_t m, DisplacementCriterion criterion) {
    std::vector<EvalRecord> covered;
    for (const auto& r : report.per_item)
        if (r.covered) covered.push_back(r);
    if (m > covered.size()) m = covered.size();

    if (criterion == DisplacementCriterion::residual_from_linear_fit && covered.size() >= 2) {
        double n = static_cast<double>(covered.size());
        double mg = 0.0, ms = 0.0;
        for (const auto& r : covered) {
            mg += r.item.rating;
            ms += r.score;
        }
        mg /= n;
        ms /= n;
        double sgg = 0.0, sgs = 0.0;
        for (const auto& r : covered) {
            sgg += (r.item.rating - mg) * (r.item.rating - mg);
            sgs += (r.item.rating - mg) * (r.score - ms);
        }
        double slope = sgg == 0.0 ? 0.0 : sgs / sgg;
        double intercept = ms - slope * mg;
        for (auto& r : covered)
            r.displacement = std::fabs(r.score - (intercept + slope * r.item.rating));
    }

    auto annotate = [](std::vector<EvalRecord> items) {
        BestWorstList list;
        double sum = 0.0;
        for (const auto& r : items) {
            sum += r.item.rating;
            ++list.role_counts[r.item.role];
        }
        list.avg_gold = items.empty() ? 0.0 : sum / static_cast<double>(items.size());
        list.items = std::move(items);
        return list;
    };

    BestWorst out;
    std::sort(covered.begin(), covered.end(), [](const EvalRecord& a, const EvalRecord& b) {
        if (a.displacement != b.displacement) return a.displacement < b.displacement;
        return triple_of(a) < triple_of(b);
    });
    out.best = annotate({covered.begin(), covered.begin() + static_cast<std::ptrdiff_t>(m)});
    std::sort(covered.begin(), covered.end(), [](const EvalRecord& a, const EvalRecord& b) {
        if (a.displacement != b.displacement) return a.displacement > b.displacement;
        return triple_of(a) < triple_of(b);
    });
    out.worst = annotate({covered.begin(), covered.begin() + static_cast<std::ptrdiff_t>(m)});
    return out;
}

void write_report_items_tsv(const EvalReport& report, std::ostream& out) {
    out << "verb\trole\tfiller\trating\tscore\tcovered\tgold_rank\tscore_rank\tdisplacement\n";
    for (const auto& r : report.per_item) {
        out << r.item.verb << '\t' << r.item.role << '\t' << r.item.filler << '\t'
            << fmt_double(r.item.rating) << '\t' << fmt_double(r.score) << '\t'
            << (r.covered ? '1' : '0') << '\t';
        if (r.covered)
            out << fmt_double(r.gold_rank) << '\t' << fmt_double(r.score_rank) << '\t'
                << fmt_double(r.displacement) << '\n';
        else
            out << "-\t-\t-\n";
    }
}

void write_report_summary(const EvalReport& report, std::ostream& out) {
    char cov[32];
    std::snprintf(cov, sizeof cov, "%.1f", report.coverage_pct);
    out << "dataset: " << report.dataset << '\n'
        << "items: " << report.n_total << " (covered " << report.n_covered << ", coverage " << cov
        << "%)\n"
        << "spearman rho: " << fmt_double(report.rho.rho)
        << (report.rho.degenerate ? " (degenerate: zero rank variance)" : "") << '\n'
        << "settings: weight=" << report.settings.weight << " metric=" << report.settings.metric
        << " filter=" << report.settings.filter << " merge=" << report.settings.merge
        << " k=" << report.settings.k << " n=" << report.settings.n << " role-filter="
        << (report.settings.role_filter.empty() ? "-" : report.settings.role_filter) << '\n';
}

}  // namespace tfit
