// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/errors.hpp>
#include <evmfix/fixtures.hpp>

#include <json.hpp>

namespace evmfix
{
using nlohmann::json;

namespace
{
u256 word_from_json(const json& value)
{
    if (value.is_number_unsigned())
        return u256{value.get<uint64_t>()};
    if (value.is_string())
        return word_from_string(value.get<std::string>());
    throw Error{Errc::bad_config, "expected number or hex string"};
}

json parse(const std::string& text, const char* what)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::exception& e)
    {
        throw Error{Errc::bad_config, std::string{what} + ": " + e.what()};
    }
}
}  // namespace

WorldState world_from_json(const std::string& json_text)
{
    const json doc = parse(json_text, "world fixture");
    WorldState world;
    for (const auto& [addr_hex, body] : doc.value("accounts", json::object()).items())
    {
        Account account;
        if (body.contains("balance"))
            account.balance = word_from_json(body["balance"]);
        if (body.contains("code"))
            account.code = from_hex(body["code"].get<std::string>());
        account.nonce = body.value("nonce", uint64_t{0});
        for (const auto& [key, value] : body.value("storage", json::object()).items())
        {
            const u256 v = word_from_json(value);
            if (v != 0)
                account.storage[word_from_string(key)] = v;
        }
        world.accounts[address_from_hex(addr_hex)] = std::move(account);
    }
    if (doc.contains("block"))
    {
        const json& blk = doc["block"];
        if (blk.contains("number"))
            world.block.number = word_from_json(blk["number"]);
        if (blk.contains("timestamp"))
            world.block.timestamp = word_from_json(blk["timestamp"]);
        if (blk.contains("coinbase"))
            world.block.coinbase = word_from_json(blk["coinbase"]);
        if (blk.contains("difficulty"))
            world.block.difficulty = word_from_json(blk["difficulty"]);
        if (blk.contains("gas_limit"))
            world.block.gas_limit = word_from_json(blk["gas_limit"]);
        if (blk.contains("gas_price"))
            world.block.gas_price = word_from_json(blk["gas_price"]);
    }
    return world;
}

std::string world_to_json(const WorldState& world)
{
    json accounts = json::object();
    for (const auto& [addr, account] : world.accounts)
    {
        json body = json::object();
        body["balance"] = word_to_hex(account.balance);
        if (!account.code.empty())
            body["code"] = to_hex(account.code);
        body["nonce"] = account.nonce;
        if (!account.storage.empty())
        {
            json storage = json::object();
            for (const auto& [key, value] : account.storage)
                storage[word_to_hex(key)] = word_to_hex(value);
            body["storage"] = std::move(storage);
        }
        accounts[to_hex(addr)] = std::move(body);
    }
    json doc;
    doc["accounts"] = std::move(accounts);
    return doc.dump(2);
}

std::vector<TxEnv> transactions_from_json(const std::string& json_text)
{
    const json doc = parse(json_text, "transaction fixture");
    std::vector<TxEnv> txs;
    size_t index = 0;
    for (const auto& item : doc.value("transactions", json::array()))
    {
        TxEnv tx;
        tx.sender = address_from_hex(item.at("from").get<std::string>());
        if (item.contains("to") && !item["to"].is_null())
            tx.recipient = address_from_hex(item["to"].get<std::string>());
        if (item.contains("data"))
            tx.calldata = from_hex(item["data"].get<std::string>());
        if (item.contains("value"))
            tx.value = word_from_json(item["value"]);
        if (item.contains("gas"))
            tx.gas_limit = static_cast<int64_t>(word_from_json(item["gas"]));
        else
            tx.gas_limit = 10'000'000;
        tx.id = item.value("id", "tx-" + std::to_string(index));
        txs.push_back(std::move(tx));
        ++index;
    }
    return txs;
}

std::string transactions_to_json(const std::vector<TxEnv>& txs)
{
    json list = json::array();
    for (const TxEnv& tx : txs)
    {
        json item;
        item["from"] = to_hex(tx.sender);
        if (tx.recipient)
            item["to"] = to_hex(*tx.recipient);
        item["data"] = to_hex(tx.calldata);
        item["value"] = word_to_hex(tx.value);
        item["gas"] = tx.gas_limit;
        item["id"] = tx.id;
        list.push_back(std::move(item));
    }
    json doc;
    doc["transactions"] = std::move(list);
    return doc.dump(2);
}

std::string trace_to_json_lines(const std::vector<TraceEvent>& trace)
{
    std::string out;
    for (const TraceEvent& event : trace)
    {
        json line;
        line["kind"] = trace_kind_name(event.kind);
        line["context"] = to_hex(event.context);
        switch (event.kind)
        {
        case TraceKind::sstore:
            line["key"] = word_to_hex(event.key);
            line["value"] = word_to_hex(event.value);
            break;
        case TraceKind::log:
            line["topics"] = word_to_hex(event.key);
            line["data_hash"] = to_hex(event.data_hash);
            break;
        default:
            line["target"] = to_hex(event.target);
            line["value"] = word_to_hex(event.call_value);
            line["data_hash"] = to_hex(event.data_hash);
            line["success"] = event.success;
            line["return_hash"] = to_hex(event.return_hash);
            break;
        }
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace evmfix
