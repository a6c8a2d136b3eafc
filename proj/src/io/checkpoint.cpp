#include "scr/io/checkpoint.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace scr::io {

namespace {

bool plain_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '/' ||
           c == ':' || c == '+';
}

std::size_t parse_count(std::string_view text, const std::string& what)
{
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw DataError(what + ": expected a count, got '" + std::string(text) + "'");
    return v;
}

} // namespace

std::string percent_encode(std::string_view text)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (char c : text) {
        if (plain_char(c)) {
            out += c;
        } else {
            const auto b = static_cast<unsigned char>(c);
            out += '%';
            out += hex[b >> 4];
            out += hex[b & 15];
        }
    }
    return out;
}

std::string percent_decode(std::string_view text)
{
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '%') {
            out += text[i];
            continue;
        }
        unsigned v = 0;
        if (i + 2 >= text.size())
            throw DataError("truncated percent escape in '" + std::string(text) + "'");
        auto [p, ec] = std::from_chars(text.data() + i + 1, text.data() + i + 3, v, 16);
        if (ec != std::errc() || p != text.data() + i + 3)
            throw DataError("bad percent escape in '" + std::string(text) + "'");
        out += static_cast<char>(v);
        i += 2;
    }
    return out;
}

std::string encode_list(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ',';
        out += percent_encode(items[i]);
    }
    return out;
}

std::vector<std::string> decode_list(std::string_view text)
{
    std::vector<std::string> out;
    if (text.empty())
        return out;
    for (const auto& part : split(text, ','))
        out.push_back(percent_decode(part));
    return out;
}

std::optional<std::string> Checkpoint::field(std::string_view key) const
{
    for (const auto& [k, v] : header)
        if (k == key)
            return v;
    return std::nullopt;
}

const std::string& Checkpoint::require(std::string_view key) const
{
    for (const auto& [k, v] : header)
        if (k == key)
            return v;
    throw DataError("checkpoint header lacks '" + std::string(key) + "'");
}

std::size_t Checkpoint::require_count(std::string_view key) const
{
    return parse_count(require(key), "checkpoint field '" + std::string(key) + "'");
}

double Checkpoint::require_real(std::string_view key) const
{
    auto v = parse_double(require(key));
    if (!v)
        throw DataError("checkpoint field '" + std::string(key) + "' is not a number");
    return *v;
}

void write_checkpoint(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& header,
                      const std::vector<nn::ParamRef>& params)
{
    out << checkpoint_magic << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].first.empty() || !std::all_of(header[i].first.begin(), header[i].first.end(), plain_char))
            throw ConfigError("checkpoint header key '" + header[i].first + "' is not a plain token");
        out << (i ? " " : "") << header[i].first << '=' << percent_encode(header[i].second);
    }
    out << '\n';
    for (const auto& p : params) {
        out << p.name << ' ' << p.rows << ' ' << p.cols << '\n';
        for (std::size_t r = 0; r < p.rows; ++r) {
            for (std::size_t c = 0; c < p.cols; ++c)
                out << (c ? " " : "") << format_double(p.values[r * p.cols + c]);
            out << '\n';
        }
    }
}

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& header,
                     const std::vector<nn::ParamRef>& params)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write checkpoint '" + path.string() + "'");
    write_checkpoint(out, header, params);
    if (!out)
        throw DataError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint read_checkpoint(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 1;
    auto fail = [&](const std::string& msg) -> DataError {
        return DataError(source + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (!std::getline(in, line) || trim(line) != checkpoint_magic)
        throw fail("not a checkpoint (expected '" + std::string(checkpoint_magic) + "')");

    Checkpoint ck;
    ++line_no;
    if (!std::getline(in, line))
        throw fail("missing header line");
    for (const auto& token : split(trim(line), ' ')) {
        if (token.empty())
            continue;
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw fail("header token '" + std::string(token) + "' is not key=value");
        ck.header.emplace_back(std::string(token.substr(0, eq)), percent_decode(token.substr(eq + 1)));
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto parts = split(trim(line), ' ');
        if (parts.size() != 3)
            throw fail("expected 'name rows cols'");
        CheckpointTensor t;
        t.name = parts[0];
        t.rows = parse_count(parts[1], source);
        t.cols = parse_count(parts[2], source);
        if (t.cols == 0)
            throw fail("tensor '" + t.name + "' has zero columns");
        t.values.reserve(t.rows * t.cols);
        for (std::size_t r = 0; r < t.rows; ++r) {
            ++line_no;
            if (!std::getline(in, line))
                throw fail("tensor '" + t.name + "' is truncated");
            const auto cells = split(trim(line), ' ');
            if (cells.size() != t.cols)
                throw fail("tensor '" + t.name + "' row has " + std::to_string(cells.size()) + " values, expected " +
                           std::to_string(t.cols));
            for (std::size_t c = 0; c < t.cols; ++c) {
                auto v = parse_double(cells[c]);
                if (!v)
                    throw fail("bad number '" + std::string(cells[c]) + "'");
                t.values.push_back(*v);
            }
        }
        ck.tensors.push_back(std::move(t));
    }
    return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open checkpoint '" + path.string() + "'");
    return read_checkpoint(in, path.string());
}

void restore_params(const Checkpoint& ckpt, const std::vector<nn::ParamRef>& params)
{
    if (ckpt.tensors.size() != params.size())
        throw DataError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                        std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& t = ckpt.tensors[i];
        const auto& p = params[i];
        if (t.name != p.name || t.rows != p.rows || t.cols != p.cols)
            throw DataError("checkpoint tensor '" + t.name + "' (" + std::to_string(t.rows) + "x" +
                            std::to_string(t.cols) + ") does not match model tensor '" + p.name + "' (" +
                            std::to_string(p.rows) + "x" + std::to_string(p.cols) + ")");
        std::copy(t.values.begin(), t.values.end(), p.values.begin());
    }
}

} // namespace scr::io
