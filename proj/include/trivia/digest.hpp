#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace trivia {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256_str(std::string_view text);
Digest sha256_file(const std::filesystem::path& path);

std::string to_hex(const Digest& digest);

} // namespace trivia
