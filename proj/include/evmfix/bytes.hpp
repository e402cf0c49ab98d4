// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evmfix
{
using Bytes = std::vector<uint8_t>;

/// 20-byte account address.
struct Address
{
    std::array<uint8_t, 20> bytes{};

    auto operator<=>(const Address&) const = default;
};

/// 32-byte hash value (Keccak-256 output).
using Hash32 = std::array<uint8_t, 32>;

/// Encodes bytes as lowercase hex with a 0x prefix.
std::string to_hex(const uint8_t* data, size_t size);
std::string to_hex(const Bytes& data);
std::string to_hex(const Address& addr);
std::string to_hex(const Hash32& hash);

/// Decodes hex (with or without 0x prefix, case-insensitive).
/// Throws Error{invalid_hex} on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

/// Parses a 20-byte address from hex. Throws on wrong length.
Address address_from_hex(std::string_view hex);

/// Reads a bytecode file: tries hex first (optionally whitespace-trimmed),
/// falls back to raw binary when the content is not valid hex.
Bytes read_code_file(const std::string& path);

Bytes read_file(const std::string& path);

/// Writes a file atomically (temp file in the same directory + rename).
void write_file_atomic(const std::string& path, std::string_view content);
void write_file_atomic(const std::string& path, const Bytes& content);

}  // namespace evmfix
