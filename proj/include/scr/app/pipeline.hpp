#pragma once

#include "scr/app/run_config.hpp"
#include "scr/data/dataset_io.hpp"
#include "scr/data/holdout.hpp"
#include "scr/data/sampling.hpp"
#include "scr/eval/reports.hpp"
#include "scr/inject/injection.hpp"
#include "scr/nn/gradcheck.hpp"
#include "scr/data/synth.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scr::app {

/// Writes clicks.tsv, embeddings.tsv, labels.tsv and the ground-truth files
/// user_styles.tsv and item_styles.tsv into `dir`.
data::SynthDataset run_synth(const data::SynthConfig& config, std::uint64_t seed, const std::filesystem::path& dir);

/// Filtered data and the evaluation split, reproduced identically from a config and the input files.
struct PreparedData {
    data::Dataset dataset;
    data::HoldoutSplit split;
    std::string clicks_checksum;
    std::string embeddings_checksum;
    std::string labels_checksum;

    /// Fold-in clicks of the held-out users as their own matrix.
    data::ClickMatrix fold_in_matrix() const;
};

PreparedData prepare_data(const RunConfig& config, const DataPaths& paths);

/// Label-propagation training set drawn from the training users.
data::LabeledProfileDataset training_profiles(const RunConfig& config, const PreparedData& data);
/// Validation set drawn once from the held-out users' fold-in clicks.
data::LabeledProfileDataset validation_profiles(const RunConfig& config, const PreparedData& data);

struct TrainSummary {
    RunManifest manifest;
    std::optional<textenc::LossCurve> text_curve;
    vae::VaeTrainReport vae_report;
};

/**
 * Trains the text encoder (skipped for an unconditioned run or an empty label
 * vocabulary), freezes it and trains the click VAE. Writes manifest.json,
 * text_encoder.ckpt, click_vae.ckpt, text_loss.tsv and vae_loss.tsv into `run_dir`.
 * On a numeric failure the restored last-good parameters are checkpointed before rethrowing.
 */
TrainSummary run_train(const RunConfig& config, const DataPaths& paths, const std::filesystem::path& run_dir);

/// A trained run loaded back from disk, checked against its manifest.
struct LoadedRun {
    RunManifest manifest;
    std::string manifest_hash;
    std::optional<textenc::TextEncoderModel> text;
    vae::ClickVaeModel model;

    const textenc::TextEncoderModel* text_ptr() const { return text ? &*text : nullptr; }
};

LoadedRun load_run(const std::filesystem::path& run_dir);

struct EvalOptions {
    vae::ProfileSpec profile;
    std::vector<std::size_t> variance_k{1, 2, 5, 10, 20, 50, 0};
    bool lr_baseline = true;
};

struct EvalSummary {
    std::vector<eval::RankingReport> rankings;
    std::optional<eval::StyleReport> styles;
    std::vector<double> variances;
};

/**
 * Ranking reports for the run (and for `ablation_dir`, when given), the style
 * report and the variance study, written as TSV files into `out_dir`. The data
 * files must match the manifest checksums.
 */
EvalSummary run_eval(const std::filesystem::path& run_dir, const std::optional<std::filesystem::path>& ablation_dir,
                     const DataPaths& paths, const std::filesystem::path& out_dir, const EvalOptions& options);

struct InjectOptions {
    /// Style names to inject, or {"all"}.
    std::vector<std::string> styles{"all"};
    /// Explicit decoder profile, used instead of `styles` when set.
    std::optional<std::vector<double>> target_profile;
    /// Held-out users to process, in held-out order; 0 means all.
    std::size_t max_users = 0;
    inject::ShiftConfig shift;
};

struct InjectSummary {
    std::optional<inject::InjectionShift> shift;
    std::size_t lists = 0;
};

/// Ranked lists per (user, injected style) into injected_lists.tsv, and the shift matrix into
/// shift_matrix.tsv when every style is injected.
InjectSummary run_inject(const std::filesystem::path& run_dir, const DataPaths& paths,
                         const std::filesystem::path& out_dir, const InjectOptions& options);

/// Reads "style<TAB>value" lines into a profile over `vocabulary`; unlisted styles are 0.
std::vector<double> read_target_profile(const std::filesystem::path& path, const std::vector<std::string>& vocabulary);

/// Resolves a style name, or throws ConfigError listing the vocabulary.
std::size_t style_index(const std::vector<std::string>& vocabulary, const std::string& name);

struct GradCheckLine {
    std::string name;
    nn::GradCheckReport report;
};

/// Finite-difference checks of every trainable loss on small random instances.
std::vector<GradCheckLine> run_grad_checks(std::uint64_t seed, double tolerance = 1e-4);

} // namespace scr::app
