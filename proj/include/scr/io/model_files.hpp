#pragma once

#include "scr/io/checkpoint.hpp"
#include "scr/textenc/text_encoder.hpp"
#include "scr/vae/click_vae.hpp"

#include <filesystem>
#include <string>

namespace scr::io {

/// Checkpoints carry the hash of the run manifest they were produced under.
void save_text_encoder(const std::filesystem::path& path, const textenc::TextEncoderModel& model,
                       const std::string& manifest_hash);
void save_click_vae(const std::filesystem::path& path, const vae::ClickVaeModel& model,
                    const std::string& manifest_hash);

/// Throws DataError when the file is malformed or of the wrong kind, or when
/// `expected_manifest` is non-empty and differs from the stored hash.
textenc::TextEncoderModel load_text_encoder(const std::filesystem::path& path,
                                            const std::string& expected_manifest = {});
vae::ClickVaeModel load_click_vae(const std::filesystem::path& path, const std::string& expected_manifest = {});

} // namespace scr::io
