#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tfit/fit.hpp"

namespace tfit {

struct GoldRecord {
    std::string verb;
    std::string role;
    std::string filler;
    double rating;
};

struct GoldDataset {
    std::string name;
    std::vector<GoldRecord> records;
    std::uint64_t skipped_lines = 0;
};

// TSV `verb<TAB>role<TAB>filler<TAB>rating`. Unparsable lines are skipped and
// counted; more than 10% bad lines or any duplicate (verb, role, filler)
// triple is a hard failure.
GoldDataset load_gold(const std::filesystem::path& path);
GoldDataset load_gold(std::istream& in, std::string name);

// 1-based average ranks (ties share the mean of their positions).
std::vector<double> average_ranks(std::span<const double> xs);

struct SpearmanResult {
    double rho = 0.0;
    bool degenerate = false;  // zero variance in a ranked list; rho reported as 0
};

// Pearson correlation of average-ranked data. Throws on length mismatch or
// fewer than two observations.
SpearmanResult spearman(std::span<const double> xs, std::span<const double> ys);

struct FisherResult {
    double z = 0.0;
    double p_two_sided = 1.0;
};

// Difference test between two independent correlations via Fisher's r-to-z:
// z_i = atanh(r_i), z = (z1 - z2) / sqrt(1/(n1-3) + 1/(n2-3)). Requires
// |r| < 1 and n > 3.
FisherResult fisher_rz(double r1, std::size_t n1, double r2, std::size_t n2);

struct EvalSettings {
    std::string weight = "ppmi";
    std::string metric = "wo";
    std::string filter = "all";
    std::string merge = "max";
    std::size_t k = 50;
    std::size_t n = 2000;
    std::string role_filter;  // empty = all roles
};

struct EvalRecord {
    GoldRecord item;
    double score = 0.0;
    bool covered = false;
    double gold_rank = 0.0;    // average rank within the covered set
    double score_rank = 0.0;
    double displacement = 0.0; // |gold_rank - score_rank|
};

struct EvalReport {
    std::string dataset;
    EvalSettings settings;
    SpearmanResult rho;
    std::size_t n_covered = 0;
    std::size_t n_total = 0;
    double coverage_pct = 0.0;
    // covered items sorted by ascending displacement, then uncovered items
    std::vector<EvalRecord> per_item;
};

using Scorer = std::function<FitScore(const GoldRecord&)>;

// rho is computed over covered items only; uncovered items count against
// coverage, never as zero scores. Fewer than two covered items is an error.
EvalReport evaluate_dataset(const GoldDataset& gold, const Scorer& scorer,
                            const EvalSettings& settings);

// Spearman rho between two systems' scores on the same gold dataset; the
// covered sets must be identical.
double metric_agreement(const EvalReport& a, const EvalReport& b);

enum class DisplacementCriterion { rank_displacement, residual_from_linear_fit };

struct BestWorstList {
    std::vector<EvalRecord> items;
    double avg_gold = 0.0;
    std::map<std::string, std::size_t> role_counts;
};

struct BestWorst {
    BestWorstList best;
    BestWorstList worst;
};

// The m covered items with the smallest / largest displacement; ties resolve
// by (verb, role, filler) so both lists are deterministic.
BestWorst best_worst(const EvalReport& report, std::size_t m,
                     DisplacementCriterion criterion = DisplacementCriterion::rank_displacement);

void write_report_items_tsv(const EvalReport& report, std::ostream& out);
void write_report_summary(const EvalReport& report, std::ostream& out);

}  // namespace tfit
