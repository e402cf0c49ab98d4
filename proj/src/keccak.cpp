// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/keccak.hpp>

#include <cctype>
#include <cstring>

namespace evmfix
{
namespace
{
constexpr uint64_t round_constants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr unsigned rotations[25] = {0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41,
    45, 15, 21, 8, 18, 2, 61, 56, 14};

inline uint64_t rotl(uint64_t x, unsigned n)
{
    return n == 0 ? x : (x << n) | (x >> (64 - n));
}

void keccak_f1600(uint64_t state[25])
{
    for (unsigned round = 0; round < 24; ++round)
    {
        // theta
        uint64_t c[5];
        for (unsigned x = 0; x < 5; ++x)
            c[x] = state[x] ^ state[x + 5] ^ state[x + 10] ^ state[x + 15] ^ state[x + 20];
        for (unsigned x = 0; x < 5; ++x)
        {
            const uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
            for (unsigned y = 0; y < 5; ++y)
                state[x + 5 * y] ^= d;
        }
        // rho + pi
        uint64_t b[25];
        for (unsigned x = 0; x < 5; ++x)
            for (unsigned y = 0; y < 5; ++y)
                b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl(state[x + 5 * y], rotations[x + 5 * y]);
        // chi
        for (unsigned x = 0; x < 5; ++x)
            for (unsigned y = 0; y < 5; ++y)
                state[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);
        // iota
        state[0] ^= round_constants[round];
    }
}
}  // namespace

Hash32 keccak256(const uint8_t* data, size_t size)
{
    constexpr size_t rate = 136;  // 1088-bit rate for 256-bit output
    uint64_t state[25] = {};
    uint8_t block[rate];

    while (size >= rate)
    {
        for (unsigned i = 0; i < rate / 8; ++i)
        {
            uint64_t lane;
            std::memcpy(&lane, data + 8 * i, 8);
            state[i] ^= lane;  // little-endian lanes
        }
        keccak_f1600(state);
        data += rate;
        size -= rate;
    }

    std::memset(block, 0, rate);
    if (size > 0)
        std::memcpy(block, data, size);
    block[size] = 0x01;  // Keccak padding, not the 0x06 of SHA3
    block[rate - 1] |= 0x80;
    for (unsigned i = 0; i < rate / 8; ++i)
    {
        uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);
        state[i] ^= lane;
    }
    keccak_f1600(state);

    Hash32 out;
    std::memcpy(out.data(), state, 32);
    return out;
}

Hash32 keccak256(const Bytes& data)
{
    return keccak256(data.data(), data.size());
}

Hash32 keccak256(std::string_view text)
{
    return keccak256(reinterpret_cast<const uint8_t*>(text.data()), text.size());
}

u256 keccak256_word(const Bytes& data)
{
    const Hash32 hash = keccak256(data);
    return word_from_bytes(hash.data(), hash.size());
}

namespace
{
std::string canonicalize_signature(std::string_view signature)
{
    std::string out;
    out.reserve(signature.size());
    for (const char c : signature)
        if (c != ' ' && c != '\t')
            out += c;
    // Expand bare uint/int inside the parameter list.
    const auto lparen = out.find('(');
    if (lparen == std::string::npos)
        return out;
    std::string params = out.substr(lparen);
    std::string expanded;
    size_t i = 0;
    while (i < params.size())
    {
        const bool at_word_start = i == 0 || !std::isalpha(static_cast<unsigned char>(params[i - 1]));
        if (at_word_start && params.compare(i, 4, "uint") == 0 &&
            (i + 4 >= params.size() || !std::isdigit(static_cast<unsigned char>(params[i + 4]))))
        {
            expanded += "uint256";
            i += 4;
        }
        else if (at_word_start && params.compare(i, 3, "int") == 0 &&
                 (i + 3 >= params.size() || !std::isdigit(static_cast<unsigned char>(params[i + 3]))))
        {
            expanded += "int256";
            i += 3;
        }
        else
        {
            expanded += params[i];
            ++i;
        }
    }
    return out.substr(0, lparen) + expanded;
}
}  // namespace

std::array<uint8_t, 4> function_selector(std::string_view signature)
{
    const std::string canonical = canonicalize_signature(signature);
    const Hash32 hash = keccak256(canonical);
    return {hash[0], hash[1], hash[2], hash[3]};
}

uint32_t function_selector_u32(std::string_view signature)
{
    const auto sel = function_selector(signature);
    return static_cast<uint32_t>(sel[0]) << 24 | static_cast<uint32_t>(sel[1]) << 16 |
           static_cast<uint32_t>(sel[2]) << 8 | sel[3];
}

}  // namespace evmfix
