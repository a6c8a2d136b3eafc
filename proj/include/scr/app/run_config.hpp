#pragma once

#include "scr/data/synth.hpp"
#include "scr/textenc/text_encoder.hpp"
#include "scr/vae/recommend.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace scr::app {

inline constexpr std::string_view software_version = "scr 0.1.0";

/// Every knob that influences a training run. Serialised into the run manifest.
struct RunConfig {
    std::uint64_t seed = 1;

    std::size_t min_items_per_user = 15;
    std::size_t min_users_per_item = 30;
    double heldout_frac = 0.05;
    double mask_fraction = 0.2;

    std::size_t k = 5;
    std::size_t labelprop_repeats = 10;
    bool strict_threshold = false;

    std::size_t epochs_text = 60;
    std::size_t text_hidden1 = 128;
    std::size_t text_hidden2 = 64;
    double text_dropout = 0.1;
    textenc::EncoderVariant text_variant = textenc::EncoderVariant::plain;
    std::size_t text_batch = 64;
    double text_lr = 1e-3;

    std::size_t epochs_vae = 60;
    double beta = 0.17;
    bool beta_warmup = false;
    std::size_t vae_hidden = 100;
    std::size_t latent = 32;
    double decoder_dropout = 0.5;
    std::size_t vae_batch = 100;
    double vae_lr = 1e-3;
    bool no_condition = false;
};

/// Throws ConfigError on out-of-range values.
void validate(const RunConfig& config);

nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

/// The three input files of a run.
struct DataPaths {
    std::filesystem::path clicks;
    std::filesystem::path embeddings;
    std::filesystem::path labels;

    /// clicks.tsv, embeddings.tsv and labels.tsv inside `dir`.
    static DataPaths in_dir(const std::filesystem::path& dir);
};

/**
 * Identity of a run: configuration, style vocabulary, input checksums and
 * software version. Holds no paths or timestamps, so identical inputs and
 * flags give an identical manifest and hash.
 */
struct RunManifest {
    RunConfig config;
    std::vector<std::string> styles;
    std::string clicks_checksum;
    std::string embeddings_checksum;
    std::string labels_checksum;
    std::size_t users = 0; ///< after filtering
    std::size_t items = 0; ///< after filtering
    std::string software = std::string(software_version);

    nlohmann::ordered_json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    /// FNV-1a of the serialised manifest, as 16 hex digits.
    std::string hash() const;
};

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

/// Derives the independent random stream used by one pipeline stage.
Rng stage_rng(std::uint64_t seed, std::string_view stage);

} // namespace scr::app
