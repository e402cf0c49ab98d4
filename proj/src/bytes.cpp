// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/bytes.hpp>
#include <evmfix/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace evmfix
{
namespace
{
constexpr char hex_digits[] = "0123456789abcdef";

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(const uint8_t* data, size_t size)
{
    std::string out;
    out.reserve(2 + 2 * size);
    out += "0x";
    for (size_t i = 0; i < size; ++i)
    {
        out += hex_digits[data[i] >> 4];
        out += hex_digits[data[i] & 0x0f];
    }
    return out;
}

std::string to_hex(const Bytes& data)
{
    return to_hex(data.data(), data.size());
}

std::string to_hex(const Address& addr)
{
    return to_hex(addr.bytes.data(), addr.bytes.size());
}

std::string to_hex(const Hash32& hash)
{
    return to_hex(hash.data(), hash.size());
}

Bytes from_hex(std::string_view hex)
{
    if (hex.starts_with("0x") || hex.starts_with("0X"))
        hex.remove_prefix(2);
    if (hex.size() % 2 != 0)
        throw Error{Errc::invalid_hex, "hex string has odd length"};
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2)
    {
        const int hi = hex_value(hex[i]);
        const int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw Error{Errc::invalid_hex, "invalid hex character"};
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

Address address_from_hex(std::string_view hex)
{
    const auto bytes = from_hex(hex);
    if (bytes.size() != 20)
        throw Error{Errc::invalid_hex, "address must be 20 bytes"};
    Address addr;
    std::copy(bytes.begin(), bytes.end(), addr.bytes.begin());
    return addr;
}

Bytes read_file(const std::string& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw Error{Errc::io_error, "cannot open " + path};
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto s = buf.str();
    return Bytes{s.begin(), s.end()};
}

Bytes read_code_file(const std::string& path)
{
    const Bytes raw = read_file(path);
    std::string text{raw.begin(), raw.end()};
    // Trim whitespace so "0xDEAD...\n" files parse; non-hex content is raw code.
    size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
        --end;
    const std::string trimmed = text.substr(begin, end - begin);
    try
    {
        return from_hex(trimmed);
    }
    catch (const Error&)
    {
        return raw;
    }
}

namespace
{
void write_atomic_impl(const std::string& path, const void* data, size_t size)
{
    namespace fs = std::filesystem;
    const fs::path target{path};
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out)
            throw Error{Errc::io_error, "cannot write " + tmp.string()};
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out)
            throw Error{Errc::io_error, "short write to " + tmp.string()};
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec)
        throw Error{Errc::io_error, "rename failed for " + path + ": " + ec.message()};
}
}  // namespace

void write_file_atomic(const std::string& path, std::string_view content)
{
    write_atomic_impl(path, content.data(), content.size());
}

void write_file_atomic(const std::string& path, const Bytes& content)
{
    write_atomic_impl(path, content.data(), content.size());
}

}  // namespace evmfix
