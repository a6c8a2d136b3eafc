#include "scr/io/model_files.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"

namespace scr::io {

namespace {

using Header = std::vector<std::pair<std::string, std::string>>;

void check_kind(const Checkpoint& ck, const std::filesystem::path& path, std::string_view kind,
                const std::string& expected_manifest)
{
    if (ck.require("kind") != kind)
        throw DataError("'" + path.string() + "' holds a " + ck.require("kind") + " checkpoint, expected " +
                        std::string(kind));
    if (!expected_manifest.empty() && ck.require("manifest") != expected_manifest)
        throw DataError("'" + path.string() + "' was produced under manifest " + ck.require("manifest") +
                        ", expected " + expected_manifest);
}

} // namespace

void save_text_encoder(const std::filesystem::path& path, const textenc::TextEncoderModel& model,
                       const std::string& manifest_hash)
{
    const auto& s = model.shape;
    Header h{{"kind", "text_encoder"},
             {"manifest", manifest_hash},
             {"variant", std::string(textenc::to_string(s.variant))},
             {"input_dim", std::to_string(s.input_dim)},
             {"hidden1", std::to_string(s.hidden1)},
             {"hidden2", std::to_string(s.hidden2)},
             {"styles", std::to_string(s.styles)},
             {"input_dropout", format_double(s.input_dropout)},
             {"style_names", encode_list(model.style_names)}};
    textenc::TextEncoderModel copy = model;
    save_checkpoint(path, h, copy.parameters());
}

void save_click_vae(const std::filesystem::path& path, const vae::ClickVaeModel& model,
                    const std::string& manifest_hash)
{
    const auto& s = model.shape;
    Header h{{"kind", "click_vae"},
             {"manifest", manifest_hash},
             {"items", std::to_string(s.items)},
             {"styles", std::to_string(s.styles)},
             {"hidden", std::to_string(s.hidden)},
             {"latent", std::to_string(s.latent)},
             {"decoder_dropout", format_double(s.decoder_dropout)},
             {"style_names", encode_list(model.style_names)}};
    vae::ClickVaeModel copy = model;
    save_checkpoint(path, h, copy.parameters());
}

textenc::TextEncoderModel load_text_encoder(const std::filesystem::path& path, const std::string& expected_manifest)
{
    const Checkpoint ck = load_checkpoint(path);
    check_kind(ck, path, "text_encoder", expected_manifest);
    textenc::TextEncoderShape s{.input_dim = ck.require_count("input_dim"),
                                .hidden1 = ck.require_count("hidden1"),
                                .hidden2 = ck.require_count("hidden2"),
                                .styles = ck.require_count("styles"),
                                .input_dropout = ck.require_real("input_dropout"),
                                .variant = textenc::variant_from_string(ck.require("variant"))};
    textenc::TextEncoderModel m(s, decode_list(ck.require("style_names")));
    restore_params(ck, m.parameters());
    return m;
}

vae::ClickVaeModel load_click_vae(const std::filesystem::path& path, const std::string& expected_manifest)
{
    const Checkpoint ck = load_checkpoint(path);
    check_kind(ck, path, "click_vae", expected_manifest);
    vae::ClickVaeShape s{.items = ck.require_count("items"),
                         .styles = ck.require_count("styles"),
                         .hidden = ck.require_count("hidden"),
                         .latent = ck.require_count("latent"),
                         .decoder_dropout = ck.require_real("decoder_dropout")};
    vae::ClickVaeModel m(s, decode_list(ck.require("style_names")));
    restore_params(ck, m.parameters());
    return m;
}

} // namespace scr::io
