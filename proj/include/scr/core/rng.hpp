#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scr {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Independent stream seed for a named sub-task.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) noexcept
{
    return mix64(base ^ mix64(fnv1a64(stream)));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept
{
    return mix64(base ^ mix64(index + 0x632be59bd9b4e019ULL));
}

} // namespace scr
