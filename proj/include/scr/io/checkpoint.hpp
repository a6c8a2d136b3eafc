#pragma once

#include "scr/nn/layer.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scr::io {

inline constexpr std::string_view checkpoint_magic = "SCR-CKPT v1";

struct CheckpointTensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

/**
 * Text checkpoint:
 *
 *     SCR-CKPT v1
 *     key=value key=value ...        (values percent-encoded)
 *     name rows cols
 *     <rows lines of cols decimals>
 *     ...
 *
 * Decimals use the shortest round-trip representation, so reading back
 * reproduces every parameter bit for bit.
 */
struct Checkpoint {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<CheckpointTensor> tensors;

    std::optional<std::string> field(std::string_view key) const;
    /// Throws DataError when missing.
    const std::string& require(std::string_view key) const;
    std::size_t require_count(std::string_view key) const;
    double require_real(std::string_view key) const;
};

std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

/// Comma-joined, each entry percent-encoded.
std::string encode_list(const std::vector<std::string>& items);
std::vector<std::string> decode_list(std::string_view text);

void write_checkpoint(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& header,
                      const std::vector<nn::ParamRef>& params);
void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& header,
                     const std::vector<nn::ParamRef>& params);

Checkpoint read_checkpoint(std::istream& in, const std::string& source);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies tensors into `params` by name; names and shapes must match exactly.
void restore_params(const Checkpoint& ckpt, const std::vector<nn::ParamRef>& params);

} // namespace scr::io
