// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/bytes.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace evmfix
{
// EVM machine word: unsigned 256-bit with wrap-around (modulo 2^256)
// arithmetic, which is what the unchecked fixed-width backend provides.
using u256 = boost::multiprecision::uint256_t;

inline constexpr unsigned word_size = 32;

u256 word_from_bytes(const uint8_t* data, size_t size);  // big-endian, size <= 32
u256 word_from_bytes(const Bytes& data);

/// Big-endian 32-byte encoding.
void word_to_bytes32(const u256& value, uint8_t out[32]);
Bytes word_to_bytes32(const u256& value);

/// Minimal big-endian encoding (at least one byte, no leading zeros).
Bytes word_to_minimal_bytes(const u256& value);

u256 word_from_address(const Address& addr);
Address address_from_word(const u256& value);  // low 20 bytes

/// Parses "0x..." hex or decimal.
u256 word_from_string(std::string_view text);
std::string word_to_hex(const u256& value);

// Two's-complement views used by the signed opcodes.
bool word_is_negative(const u256& value);
u256 word_neg(const u256& value);
u256 sdiv_words(const u256& a, const u256& b);
bool slt_words(const u256& a, const u256& b);

}  // namespace evmfix
