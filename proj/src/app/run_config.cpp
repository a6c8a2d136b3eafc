#include "scr/app/run_config.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"
#include "scr/core/rng.hpp"

#include <fstream>

namespace scr::app {

using nlohmann::json;
using nlohmann::ordered_json;

void validate(const RunConfig& c)
{
    auto require = [](bool ok, const char* msg) {
        if (!ok)
            throw ConfigError(msg);
    };
    require(c.min_items_per_user >= 1 && c.min_users_per_item >= 1, "filter thresholds must be at least 1");
    require(c.heldout_frac > 0.0 && c.heldout_frac < 1.0, "heldout-frac must be in (0, 1)");
    require(c.mask_fraction >= 0.0 && c.mask_fraction < 1.0, "mask-fraction must be in [0, 1)");
    require(c.k >= 1 && c.labelprop_repeats >= 1, "k and labelprop-repeats must be at least 1");
    require(c.text_hidden1 >= 1 && c.text_hidden2 >= 1 && c.vae_hidden >= 1 && c.latent >= 1,
            "layer widths must be at least 1");
    require(c.text_dropout >= 0.0 && c.text_dropout < 1.0, "text-dropout must be in [0, 1)");
    require(c.decoder_dropout >= 0.0 && c.decoder_dropout < 1.0, "decoder-dropout must be in [0, 1)");
    require(c.beta >= 0.0, "beta must be non-negative");
    require(c.text_batch >= 1 && c.vae_batch >= 1, "batch sizes must be at least 1");
    require(c.text_lr > 0.0 && c.vae_lr > 0.0, "learning rates must be positive");
}

ordered_json to_json(const RunConfig& c)
{
    ordered_json j;
    j["seed"] = c.seed;
    j["min_items_per_user"] = c.min_items_per_user;
    j["min_users_per_item"] = c.min_users_per_item;
    j["heldout_frac"] = format_double(c.heldout_frac);
    j["mask_fraction"] = format_double(c.mask_fraction);
    j["k"] = c.k;
    j["labelprop_repeats"] = c.labelprop_repeats;
    j["strict_threshold"] = c.strict_threshold;
    j["epochs_text"] = c.epochs_text;
    j["text_hidden1"] = c.text_hidden1;
    j["text_hidden2"] = c.text_hidden2;
    j["text_dropout"] = format_double(c.text_dropout);
    j["text_variant"] = std::string(textenc::to_string(c.text_variant));
    j["text_batch"] = c.text_batch;
    j["text_lr"] = format_double(c.text_lr);
    j["epochs_vae"] = c.epochs_vae;
    j["beta"] = format_double(c.beta);
    j["beta_warmup"] = c.beta_warmup;
    j["vae_hidden"] = c.vae_hidden;
    j["latent"] = c.latent;
    j["decoder_dropout"] = format_double(c.decoder_dropout);
    j["vae_batch"] = c.vae_batch;
    j["vae_lr"] = format_double(c.vae_lr);
    j["no_condition"] = c.no_condition;
    return j;
}

namespace {

// Reals are stored as shortest round-trip strings so the manifest bytes are exact.
double real_field(const json& j, const char* key)
{
    const auto v = parse_double(j.at(key).get<std::string>());
    if (!v)
        throw DataError(std::string("manifest field '") + key + "' is not a number");
    return *v;
}

} // namespace

RunConfig run_config_from_json(const json& j)
{
    try {
        RunConfig c;
        c.seed = j.at("seed").get<std::uint64_t>();
        c.min_items_per_user = j.at("min_items_per_user").get<std::size_t>();
        c.min_users_per_item = j.at("min_users_per_item").get<std::size_t>();
        c.heldout_frac = real_field(j, "heldout_frac");
        c.mask_fraction = real_field(j, "mask_fraction");
        c.k = j.at("k").get<std::size_t>();
        c.labelprop_repeats = j.at("labelprop_repeats").get<std::size_t>();
        c.strict_threshold = j.at("strict_threshold").get<bool>();
        c.epochs_text = j.at("epochs_text").get<std::size_t>();
        c.text_hidden1 = j.at("text_hidden1").get<std::size_t>();
        c.text_hidden2 = j.at("text_hidden2").get<std::size_t>();
        c.text_dropout = real_field(j, "text_dropout");
        c.text_variant = textenc::variant_from_string(j.at("text_variant").get<std::string>());
        c.text_batch = j.at("text_batch").get<std::size_t>();
        c.text_lr = real_field(j, "text_lr");
        c.epochs_vae = j.at("epochs_vae").get<std::size_t>();
        c.beta = real_field(j, "beta");
        c.beta_warmup = j.at("beta_warmup").get<bool>();
        c.vae_hidden = j.at("vae_hidden").get<std::size_t>();
        c.latent = j.at("latent").get<std::size_t>();
        c.decoder_dropout = real_field(j, "decoder_dropout");
        c.vae_batch = j.at("vae_batch").get<std::size_t>();
        c.vae_lr = real_field(j, "vae_lr");
        c.no_condition = j.at("no_condition").get<bool>();
        return c;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed run configuration: ") + e.what());
    }
}

DataPaths DataPaths::in_dir(const std::filesystem::path& dir)
{
    return {dir / "clicks.tsv", dir / "embeddings.tsv", dir / "labels.tsv"};
}

ordered_json RunManifest::to_json() const
{
    ordered_json j;
    j["software"] = software;
    j["config"] = app::to_json(config);
    j["styles"] = styles;
    j["checksums"] = {{"clicks", clicks_checksum}, {"embeddings", embeddings_checksum}, {"labels", labels_checksum}};
    j["catalog"] = {{"users", users}, {"items", items}};
    return j;
}

RunManifest RunManifest::from_json(const json& j)
{
    try {
        RunManifest m;
        m.software = j.at("software").get<std::string>();
        m.config = run_config_from_json(j.at("config"));
        m.styles = j.at("styles").get<std::vector<std::string>>();
        m.clicks_checksum = j.at("checksums").at("clicks").get<std::string>();
        m.embeddings_checksum = j.at("checksums").at("embeddings").get<std::string>();
        m.labels_checksum = j.at("checksums").at("labels").get<std::string>();
        m.users = j.at("catalog").at("users").get<std::size_t>();
        m.items = j.at("catalog").at("items").get<std::size_t>();
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
}

std::string RunManifest::hash() const { return hex64(fnv1a64(to_json().dump())); }

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write manifest '" + path.string() + "'");
    out << manifest.to_json().dump(2) << '\n';
}

RunManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open manifest '" + path.string() + "'");
    try {
        return RunManifest::from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw DataError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

Rng stage_rng(std::uint64_t seed, std::string_view stage) { return Rng(derive_seed(seed, stage)); }

} // namespace scr::app
