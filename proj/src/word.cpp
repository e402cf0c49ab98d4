// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/errors.hpp>
#include <evmfix/word.hpp>

#include <algorithm>

namespace evmfix
{
u256 word_from_bytes(const uint8_t* data, size_t size)
{
    u256 value = 0;
    for (size_t i = 0; i < size; ++i)
        value = (value << 8) | data[i];
    return value;
}

u256 word_from_bytes(const Bytes& data)
{
    return word_from_bytes(data.data(), data.size());
}

void word_to_bytes32(const u256& value, uint8_t out[32])
{
    for (unsigned i = 0; i < 32; ++i)
        out[i] = static_cast<uint8_t>(static_cast<uint32_t>((value >> (8 * (31 - i))) & 0xff));
}

Bytes word_to_bytes32(const u256& value)
{
    Bytes out(32);
    word_to_bytes32(value, out.data());
    return out;
}

Bytes word_to_minimal_bytes(const u256& value)
{
    uint8_t full[32];
    word_to_bytes32(value, full);
    unsigned first = 0;
    while (first < 31 && full[first] == 0)
        ++first;
    return Bytes{full + first, full + 32};
}

u256 word_from_address(const Address& addr)
{
    return word_from_bytes(addr.bytes.data(), addr.bytes.size());
}

Address address_from_word(const u256& value)
{
    uint8_t full[32];
    word_to_bytes32(value, full);
    Address addr;
    std::copy(full + 12, full + 32, addr.bytes.begin());
    return addr;
}

u256 word_from_string(std::string_view text)
{
    try
    {
        if (text.starts_with("0x") || text.starts_with("0X"))
            return u256{std::string{text}};
        return u256{std::string{text}};
    }
    catch (const std::exception&)
    {
        throw Error{Errc::invalid_hex, "cannot parse word: " + std::string{text}};
    }
}

std::string word_to_hex(const u256& value)
{
    return to_hex(word_to_minimal_bytes(value));
}

bool word_is_negative(const u256& value)
{
    return (value >> 255) != 0;
}

u256 word_neg(const u256& value)
{
    return u256{0} - value;
}

u256 sdiv_words(const u256& a, const u256& b)
{
    if (b == 0)
        return 0;
    const bool neg_a = word_is_negative(a);
    const bool neg_b = word_is_negative(b);
    const u256 abs_a = neg_a ? word_neg(a) : a;
    const u256 abs_b = neg_b ? word_neg(b) : b;
    const u256 q = abs_a / abs_b;  // truncates toward zero
    return (neg_a != neg_b) ? word_neg(q) : q;
}

bool slt_words(const u256& a, const u256& b)
{
    const bool neg_a = word_is_negative(a);
    const bool neg_b = word_is_negative(b);
    if (neg_a != neg_b)
        return neg_a;
    return a < b;
}

}  // namespace evmfix
