#include "scr/eval/reports.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"
#include "scr/eval/metrics.hpp"

#include <algorithm>
#include <ostream>

namespace scr::eval {

namespace {

void stamp_line(std::ostream& out, const ReportStamp& stamp)
{
    out << "# manifest " << stamp.manifest_hash << " seed " << stamp.seed << '\n';
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

} // namespace

RankingReport evaluate_ranking(const std::string& name, const vae::ClickVaeModel& model,
                               const textenc::TextEncoderModel* text, const data::HoldoutSplit& split,
                               const data::ItemEmbeddingTable& embeddings, const vae::ProfileSpec& spec)
{
    RankingReport report;
    report.model = name;
    for (std::size_t h = 0; h < split.heldout_users.size(); ++h) {
        const auto& masked = split.masked[h];
        if (masked.empty() || split.fold_in[h].empty()) {
            ++report.skipped;
            continue;
        }
        const auto ranked = vae::recommend(model, text, split.fold_in[h], embeddings, 50, spec);
        UserRanking u;
        u.user = split.heldout_users[h];
        u.ndcg20 = *ndcg_at_k(ranked, masked, 20);
        u.ndcg50 = *ndcg_at_k(ranked, masked, 50);
        u.recall20 = *recall_at_k(ranked, masked, 20);
        u.recall50 = *recall_at_k(ranked, masked, 50);
        report.users.push_back(u);
    }
    if (report.users.empty())
        throw DataError("no held-out user has both fold-in and masked clicks");
    const double n = static_cast<double>(report.users.size());
    for (const auto& u : report.users) {
        report.ndcg20 += u.ndcg20 / n;
        report.ndcg50 += u.ndcg50 / n;
        report.recall20 += u.recall20 / n;
        report.recall50 += u.recall50 / n;
    }
    return report;
}

std::vector<double> style_distribution_report(const data::LabeledProfileDataset& dataset)
{
    if (dataset.size() == 0)
        throw DataError("style distribution of an empty dataset");
    std::vector<double> out(dataset.profiles.cols(), 0.0);
    for (std::size_t r = 0; r < dataset.size(); ++r)
        for (std::size_t s = 0; s < out.size(); ++s)
            out[s] += dataset.profiles(r, s) > 0.5 ? 1.0 : 0.0;
    for (double& v : out)
        v /= static_cast<double>(dataset.size());
    return out;
}

std::vector<double> variance_vs_k_study(const data::ItemEmbeddingTable& embeddings, const data::ClickMatrix& clicks,
                                        std::span<const std::size_t> k_values, Rng& rng)
{
    if (embeddings.size() != clicks.num_items())
        throw ShapeError("embeddings are not aligned to the click catalog");
    if (clicks.num_users() < 2)
        throw DataError("variance study needs at least two users");
    const std::size_t users = clicks.num_users(), dim = embeddings.dim();
    std::vector<double> out;
    for (std::size_t k : k_values) {
        nn::Tensor2 v(users, dim);
        for (std::size_t u = 0; u < users; ++u) {
            const auto items = clicks.items_of(u);
            const auto row = k == 0 ? data::mean_embedding(items, embeddings)
                                    : data::user_content_vector(items, embeddings, k, rng, clicks.user_ids()[u]);
            std::copy(row.begin(), row.end(), v.row(u).begin());
        }
        double total = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double mean = 0.0, var = 0.0;
            for (std::size_t u = 0; u < users; ++u)
                mean += v(u, d);
            mean /= static_cast<double>(users);
            for (std::size_t u = 0; u < users; ++u)
                var += (v(u, d) - mean) * (v(u, d) - mean);
            total += var / static_cast<double>(users - 1);
        }
        out.push_back(total / static_cast<double>(dim));
    }
    return out;
}

void write_ranking_tsv(std::ostream& out, const ReportStamp& stamp, const RankingReport& report,
                       const std::vector<std::string>& user_ids)
{
    stamp_line(out, stamp);
    out << "# model " << report.model << " users " << report.users.size() << " skipped " << report.skipped << '\n';
    out << "user\tndcg@20\tndcg@50\trecall@20\trecall@50\n";
    for (const auto& u : report.users)
        out << user_ids.at(u.user) << '\t' << format_double(u.ndcg20) << '\t' << format_double(u.ndcg50) << '\t'
            << format_double(u.recall20) << '\t' << format_double(u.recall50) << '\n';
}

void write_ranking_summary(std::ostream& out, const ReportStamp& stamp, const std::vector<RankingReport>& reports)
{
    stamp_line(out, stamp);
    out << "model\tusers\tskipped\tndcg@20\tndcg@50\trecall@20\trecall@50\n";
    for (const auto& r : reports)
        out << r.model << '\t' << r.users.size() << '\t' << r.skipped << '\t' << format_double(r.ndcg20) << '\t'
            << format_double(r.ndcg50) << '\t' << format_double(r.recall20) << '\t' << format_double(r.recall50)
            << '\n';
    if (reports.size() < 2)
        return;
    const auto& base = reports.back();
    out << "\ncomparison\tmetric\tabsolute\trelative\n";
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
        const auto& r = reports[i];
        const std::pair<const char*, std::pair<double, double>> rows[] = {
            {"ndcg@20", {r.ndcg20, base.ndcg20}},
            {"ndcg@50", {r.ndcg50, base.ndcg50}},
            {"recall@20", {r.recall20, base.recall20}},
            {"recall@50", {r.recall50, base.recall50}}};
        for (const auto& [metric, v] : rows) {
            const double abs = v.first - v.second;
            out << r.model << "-vs-" << base.model << '\t' << metric << '\t' << format_double(abs) << '\t'
                << (v.second != 0.0 ? format_double(abs / v.second) : "NA") << '\n';
        }
    }
}

void write_style_tsv(std::ostream& out, const ReportStamp& stamp, const StyleReport& report)
{
    stamp_line(out, stamp);
    out << "style\tprevalence\tauc\tbaseline_auc\n";
    for (std::size_t s = 0; s < report.style_names.size(); ++s)
        out << report.style_names[s] << '\t' << format_double(report.prevalence.at(s)) << '\t'
            << cell(report.encoder.per_style.at(s)) << '\t'
            << (report.baseline ? cell(report.baseline->per_style.at(s)) : "NA") << '\n';
    out << "average\t-\t" << cell(report.encoder.average) << '\t'
        << (report.baseline ? cell(report.baseline->average) : "NA") << '\n';

    out << "\npearson";
    for (const auto& name : report.style_names)
        out << '\t' << name;
    out << '\n';
    for (std::size_t a = 0; a < report.correlation.size(); ++a) {
        out << report.style_names[a];
        for (const auto& v : report.correlation[a])
            out << '\t' << cell(v);
        out << '\n';
    }
}

void write_variance_tsv(std::ostream& out, const ReportStamp& stamp, std::span<const std::size_t> k_values,
                        std::span<const double> variances)
{
    stamp_line(out, stamp);
    out << "k\tmean_feature_variance\n";
    for (std::size_t i = 0; i < k_values.size(); ++i)
        out << (k_values[i] == 0 ? std::string("all") : std::to_string(k_values[i])) << '\t'
            << format_double(variances[i]) << '\n';
}

void write_shift_tsv(std::ostream& out, const ReportStamp& stamp, const inject::InjectionShift& shift)
{
    stamp_line(out, stamp);
    out << "# users " << shift.users << " mean_relative_presence_increase "
        << format_double(shift.mean_relative_increase()) << '\n';
    out << "injected";
    for (const auto& name : shift.style_names)
        out << '\t' << name;
    out << '\n';
    for (std::size_t s = 0; s < shift.shift.rows(); ++s) {
        out << shift.style_names[s];
        for (std::size_t c = 0; c < shift.shift.cols(); ++c)
            out << '\t' << format_double(shift.shift(s, c));
        out << '\n';
    }
    out << "\nstyle\tidentity_presence\tinjected_presence\trelative_increase\trank_overlap\n";
    for (std::size_t s = 0; s < shift.style_names.size(); ++s)
        out << shift.style_names[s] << '\t' << format_double(shift.identity_presence[s]) << '\t'
            << format_double(shift.injected_presence[s]) << '\t' << format_double(shift.relative_increase(s)) << '\t'
            << format_double(shift.rank_overlap[s]) << '\n';
}

} // namespace scr::eval
