// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/bytes.hpp>
#include <evmfix/word.hpp>

#include <string_view>

namespace evmfix
{
/// Keccak-256 with the original 0x01 domain padding (as used by Ethereum),
/// not the NIST SHA3-256 variant.
Hash32 keccak256(const uint8_t* data, size_t size);
Hash32 keccak256(const Bytes& data);
Hash32 keccak256(std::string_view text);

u256 keccak256_word(const Bytes& data);

/// Canonicalizes an ABI signature ("f(uint, address )" -> "f(uint256,address)")
/// and returns the 4-byte selector.
std::array<uint8_t, 4> function_selector(std::string_view signature);
uint32_t function_selector_u32(std::string_view signature);

}  // namespace evmfix
