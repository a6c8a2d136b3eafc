#pragma once

#include "scr/core/rng.hpp"
#include "scr/data/click_matrix.hpp"
#include "scr/data/holdout.hpp"
#include "scr/data/item_table.hpp"
#include "scr/data/sampling.hpp"
#include "scr/inject/injection.hpp"
#include "scr/textenc/lr_baseline.hpp"
#include "scr/vae/recommend.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace scr::eval {

/// Identifies the run every report belongs to.
struct ReportStamp {
    std::uint64_t seed = 0;
    std::string manifest_hash;
};

struct UserRanking {
    std::size_t user = 0; ///< source row in the click matrix
    double ndcg20 = 0.0;
    double ndcg50 = 0.0;
    double recall20 = 0.0;
    double recall50 = 0.0;
};

struct RankingReport {
    std::string model;
    std::vector<UserRanking> users;
    std::size_t skipped = 0; ///< held-out users with an empty masked set
    double ndcg20 = 0.0;
    double ndcg50 = 0.0;
    double recall20 = 0.0;
    double recall50 = 0.0;
};

/// NDCG and recall at 20 and 50 of each held-out user's masked items.
RankingReport evaluate_ranking(const std::string& name, const vae::ClickVaeModel& model,
                               const textenc::TextEncoderModel* text, const data::HoldoutSplit& split,
                               const data::ItemEmbeddingTable& embeddings, const vae::ProfileSpec& spec);

/// Fraction of samples in which each style is positive.
std::vector<double> style_distribution_report(const data::LabeledProfileDataset& dataset);

struct StyleReport {
    std::vector<std::string> style_names;
    textenc::AucReport encoder;
    std::optional<textenc::AucReport> baseline;
    std::vector<double> prevalence;
    std::vector<std::vector<std::optional<double>>> correlation;
};

/**
 * For each k, every user's content vector from k sampled clicks (k = 0: the
 * full history), then the per-feature variance across users, averaged over
 * features.
 */
std::vector<double> variance_vs_k_study(const data::ItemEmbeddingTable& embeddings, const data::ClickMatrix& clicks,
                                        std::span<const std::size_t> k_values, Rng& rng);

void write_ranking_tsv(std::ostream& out, const ReportStamp& stamp, const RankingReport& report,
                       const std::vector<std::string>& user_ids);
void write_ranking_summary(std::ostream& out, const ReportStamp& stamp, const std::vector<RankingReport>& reports);
void write_style_tsv(std::ostream& out, const ReportStamp& stamp, const StyleReport& report);
void write_variance_tsv(std::ostream& out, const ReportStamp& stamp, std::span<const std::size_t> k_values,
                        std::span<const double> variances);
void write_shift_tsv(std::ostream& out, const ReportStamp& stamp, const inject::InjectionShift& shift);

} // namespace scr::eval
