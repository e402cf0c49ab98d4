// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/errors.hpp>
#include <evmfix/ingest.hpp>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace evmfix
{
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{
std::optional<std::string> effective_cache_dir(const IngestOptions& options)
{
    if (options.cache_dir)
        return options.cache_dir;
    if (const char* env = std::getenv("EVMFIX_CACHE"); env != nullptr && *env != '\0')
        return std::string{env};
    return std::nullopt;
}

fs::path cache_path(const std::string& dir, const Address& address, const std::string& key)
{
    return fs::path{dir} / (to_hex(address) + "_" + key + ".json");
}

std::optional<json> cache_load(const std::optional<std::string>& dir, const Address& address,
    const std::string& key)
{
    if (!dir)
        return std::nullopt;
    const fs::path path = cache_path(*dir, address, key);
    std::ifstream in{path};
    if (!in)
        return std::nullopt;
    try
    {
        json doc;
        in >> doc;
        return doc;
    }
    catch (const json::exception&)
    {
        return std::nullopt;  // corrupt cache entries are refetched
    }
}

void cache_store(const std::optional<std::string>& dir, const Address& address,
    const std::string& key, const json& doc)
{
    if (!dir)
        return;
    std::error_code ec;
    fs::create_directories(*dir, ec);
    const fs::path path = cache_path(*dir, address, key);
    std::ofstream out{path, std::ios::trunc};
    out << doc.dump();
}

json rpc_call(const RpcEndpoint& endpoint, const std::string& method, json params)
{
    json request;
    request["jsonrpc"] = "2.0";
    request["id"] = 1;
    request["method"] = method;
    request["params"] = std::move(params);
    const std::string body = request.dump();

    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < std::max(endpoint.max_attempts, 1); ++attempt)
    {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(endpoint.backoff_ms * attempt));
        httplib::Client client{endpoint.url};
        client.set_connection_timeout(0, endpoint.timeout_ms * 1000);
        client.set_read_timeout(endpoint.timeout_ms / 1000, (endpoint.timeout_ms % 1000) * 1000);
        auto res = client.Post("/", body, "application/json");
        if (!res)
        {
            last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status != 200)
        {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        json doc;
        try
        {
            doc = json::parse(res->body);
        }
        catch (const json::exception& e)
        {
            last_error = std::string{"bad JSON-RPC response: "} + e.what();
            continue;
        }
        if (doc.contains("error") && !doc["error"].is_null())
        {
            last_error = "RPC error: " + doc["error"].dump();
            continue;
        }
        if (!doc.contains("result"))
        {
            last_error = "RPC response without result";
            continue;
        }
        return doc["result"];
    }
    throw Error{Errc::rpc_error, method + " failed: " + last_error};
}

std::string hex_quantity(uint64_t value)
{
    char buf[24];
    std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(value));
    return buf;
}

std::vector<TxEnv> transactions_from_block(const json& block, const Address& address)
{
    std::vector<TxEnv> out;
    if (!block.is_object())
        return out;
    for (const auto& tx : block.value("transactions", json::array()))
    {
        if (!tx.contains("to") || tx["to"].is_null())
            continue;  // contract creations are not replayed against the target
        const Address to = address_from_hex(tx["to"].get<std::string>());
        if (!(to == address))
            continue;
        TxEnv env;
        env.sender = address_from_hex(tx.at("from").get<std::string>());
        env.recipient = to;
        if (tx.contains("input"))
            env.calldata = from_hex(tx["input"].get<std::string>());
        else if (tx.contains("data"))
            env.calldata = from_hex(tx["data"].get<std::string>());
        if (tx.contains("value"))
            env.value = word_from_string(tx["value"].get<std::string>());
        if (tx.contains("gas"))
            env.gas_limit = static_cast<int64_t>(word_from_string(tx["gas"].get<std::string>()));
        else
            env.gas_limit = 10'000'000;
        env.id = tx.value("hash", "");
        out.push_back(std::move(env));
    }
    return out;
}
}  // namespace

Bytes fetch_code(const RpcEndpoint& endpoint, const Address& address,
    const std::string& block_tag, const IngestOptions& options)
{
    const auto dir = effective_cache_dir(options);
    const std::string key = "code_" + block_tag;
    if (const auto cached = cache_load(dir, address, key))
    {
        const Bytes code = from_hex((*cached).at("code").get<std::string>());
        if (code.empty())
            throw Error{Errc::empty_code, "no code at " + to_hex(address)};
        return code;
    }

    const json result = rpc_call(endpoint, "eth_getCode", json::array({to_hex(address), block_tag}));
    const std::string hex = result.get<std::string>();
    json entry;
    entry["code"] = hex;
    cache_store(dir, address, key, entry);

    const Bytes code = from_hex(hex);
    if (code.empty())
        throw Error{Errc::empty_code, "no code at " + to_hex(address)};
    return code;
}

std::vector<TxEnv> fetch_transactions(const RpcEndpoint& endpoint, const Address& address,
    uint64_t from_block, uint64_t to_block, const IngestOptions& options)
{
    if (to_block < from_block)
        return {};
    const uint64_t count = to_block - from_block + 1;
    if (count > options.block_range_cap)
        throw Error{Errc::range_too_large,
            "block range of " + std::to_string(count) + " exceeds cap of " +
                std::to_string(options.block_range_cap)};

    const auto dir = effective_cache_dir(options);

    // Fetch blocks concurrently up to the in-flight cap, then reassemble in
    // block order.
    std::vector<std::vector<TxEnv>> per_block(count);
    std::atomic<uint64_t> cursor{0};
    std::mutex error_mutex;
    std::optional<Error> first_error;

    const auto worker = [&] {
        while (true)
        {
            const uint64_t index = cursor.fetch_add(1);
            if (index >= count)
                return;
            const uint64_t number = from_block + index;
            try
            {
                const std::string key = "block_" + std::to_string(number);
                if (const auto cached = cache_load(dir, address, key))
                {
                    per_block[index] = transactions_from_block(*cached, address);
                    continue;
                }
                const json block = rpc_call(endpoint, "eth_getBlockByNumber",
                    json::array({hex_quantity(number), true}));
                cache_store(dir, address, key, block);
                per_block[index] = transactions_from_block(block, address);
            }
            catch (const Error& e)
            {
                std::lock_guard lock{error_mutex};
                if (!first_error)
                    first_error = e;
                return;
            }
        }
    };

    const unsigned workers =
        std::max(1u, std::min<unsigned>(options.max_in_flight, static_cast<unsigned>(count)));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i)
        pool.emplace_back(worker);
    for (auto& thread : pool)
        thread.join();
    if (first_error)
        throw *first_error;

    std::vector<TxEnv> out;
    size_t index = 0;
    for (auto& block_txs : per_block)
        for (TxEnv& tx : block_txs)
        {
            if (tx.id.empty())
                tx.id = "tx-" + std::to_string(index);
            ++index;
            out.push_back(std::move(tx));
        }
    return out;
}

}  // namespace evmfix
