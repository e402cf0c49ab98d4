// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/asm_builder.hpp>
#include <evmfix/assembly.hpp>
#include <evmfix/deploy.hpp>
#include <evmfix/errors.hpp>
#include <evmfix/keccak.hpp>

#include <json.hpp>

namespace evmfix
{
using nlohmann::json;

u256 eip1967_implementation_slot()
{
    return keccak256_word(Bytes{'e', 'i', 'p', '1', '9', '6', '7', '.', 'p', 'r', 'o', 'x', 'y',
               '.', 'i', 'm', 'p', 'l', 'e', 'm', 'e', 'n', 't', 'a', 't', 'i', 'o', 'n'}) -
           1;
}

u256 eip1967_admin_slot()
{
    return keccak256_word(Bytes{'e', 'i', 'p', '1', '9', '6', '7', '.', 'p', 'r', 'o', 'x', 'y',
               '.', 'a', 'd', 'm', 'i', 'n'}) -
           1;
}

ProxyConfig::ProxyConfig()
  : implementation_slot{eip1967_implementation_slot()}, owner_slot{eip1967_admin_slot()}
{}

Bytes make_proxy(const ProxyConfig& config)
{
    if (config.implementation_slot == config.owner_slot)
        throw Error{Errc::bad_config, "proxy slots must differ"};

    const u256 upgrade_selector = function_selector_u32(config.upgrade_signature);

    AsmBuilder b;
    const LabelId upgrade = b.make_label();
    const LabelId do_return = b.make_label();
    const LabelId authorized = b.make_label();

    // selector = calldata[0..4]
    b.push(0).op(OP_CALLDATALOAD).push(0xe0).op(OP_SHR);
    b.op(OP_DUP1).push(upgrade_selector).op(OP_EQ).push_label(upgrade).op(OP_JUMPI);
    b.op(OP_POP);

    // forward path: delegatecall(gas, impl, calldata, no preallocated output)
    b.op(OP_CALLDATASIZE).push(0).push(0).op(OP_CALLDATACOPY);
    b.push(0).push(0).op(OP_CALLDATASIZE).push(0);
    b.push(word_to_bytes32(config.implementation_slot)).op(OP_SLOAD);
    b.op(OP_GAS).op(OP_DELEGATECALL);
    b.op(OP_RETURNDATASIZE).push(0).push(0).op(OP_RETURNDATACOPY);
    b.push_label(do_return).op(OP_JUMPI);
    b.op(OP_RETURNDATASIZE).push(0).op(OP_REVERT);
    b.bind(do_return).op(OP_JUMPDEST);
    b.op(OP_RETURNDATASIZE).push(0).op(OP_RETURN);

    // upgrade path: require caller == owner, store the new implementation
    b.bind(upgrade).op(OP_JUMPDEST).op(OP_POP);
    b.push(word_to_bytes32(config.owner_slot)).op(OP_SLOAD);
    b.op(OP_CALLER).op(OP_EQ).push_label(authorized).op(OP_JUMPI);
    b.push(0).op(OP_DUP1).op(OP_REVERT);
    b.bind(authorized).op(OP_JUMPDEST);
    b.push(4).op(OP_CALLDATALOAD);
    b.push(word_to_bytes32(config.implementation_slot)).op(OP_SSTORE);
    b.op(OP_STOP);

    return b.assemble(0).bytes;
}

Bytes to_logic_contract(const Bytes& original_runtime_code)
{
    if (original_runtime_code.size() > deployed_code_cap)
        throw Error{Errc::code_size_cap_exceeded, "logic code exceeds the deployed-code cap"};
    return original_runtime_code;
}

int64_t estimate_deploy_cost(const Bytes& code, const DeployCostModel& model)
{
    return model.per_byte * static_cast<int64_t>(code.size()) + model.create_overhead +
           model.tx_overhead;
}

DeploymentBundle make_bundle(const Bytes& logic_runtime_code, const ProxyConfig& config,
    const Address& proxy_address, const Address& logic_address)
{
    DeploymentBundle bundle;
    bundle.proxy_address = proxy_address;
    bundle.logic_address = logic_address;
    bundle.config = config;
    bundle.proxy_code = make_proxy(config);
    bundle.logic_code = to_logic_contract(logic_runtime_code);
    bundle.proxy_storage[config.owner_slot] = word_from_address(config.owner);
    bundle.cost_estimate =
        estimate_deploy_cost(bundle.proxy_code) + estimate_deploy_cost(bundle.logic_code);

    // Registering the implementation is itself an upgrade transaction.
    TxEnv install;
    install.sender = config.owner;
    install.recipient = proxy_address;
    const auto selector = function_selector(config.upgrade_signature);
    install.calldata.assign(selector.begin(), selector.end());
    const Bytes addr_word = word_to_bytes32(word_from_address(logic_address));
    install.calldata.insert(install.calldata.end(), addr_word.begin(), addr_word.end());
    install.gas_limit = 200000;
    install.id = "install-logic";
    bundle.init_transactions.push_back(std::move(install));
    return bundle;
}

void apply_bundle(WorldState& world, const DeploymentBundle& bundle, const VmConfig& vm)
{
    Account& proxy = world.get_or_create(bundle.proxy_address);
    proxy.code = bundle.proxy_code;
    for (const auto& [key, value] : bundle.proxy_storage)
        if (value != 0)
            proxy.storage[key] = value;
    world.get_or_create(bundle.logic_address).code = bundle.logic_code;

    for (const TxEnv& tx : bundle.init_transactions)
    {
        auto [next, receipt] = execute(world, tx, vm);
        if (receipt.status != TxStatus::success)
            throw Error{Errc::rewrite_diagnostic,
                "bundle init transaction '" + tx.id + "' failed: " +
                    tx_status_name(receipt.status)};
        world = std::move(next);
    }
}

UpgradePlan encode_upgrade(const DeploymentBundle& bundle, const Address& new_logic_address,
    const Bytes& new_logic_code)
{
    UpgradePlan plan;
    plan.proxy_address = bundle.proxy_address;
    plan.new_logic_address = new_logic_address;
    plan.new_logic_code = to_logic_contract(new_logic_code);

    plan.switchover.sender = bundle.config.owner;
    plan.switchover.recipient = bundle.proxy_address;
    const auto selector = function_selector(bundle.config.upgrade_signature);
    plan.switchover.calldata.assign(selector.begin(), selector.end());
    const Bytes addr_word = word_to_bytes32(word_from_address(new_logic_address));
    plan.switchover.calldata.insert(
        plan.switchover.calldata.end(), addr_word.begin(), addr_word.end());
    plan.switchover.gas_limit = 200000;
    plan.switchover.id = "switchover";
    return plan;
}

std::string bundle_to_json(const DeploymentBundle& bundle)
{
    json doc;
    doc["schema"] = "evmfix-bundle/1";
    doc["proxy_address"] = to_hex(bundle.proxy_address);
    doc["logic_address"] = to_hex(bundle.logic_address);
    doc["owner"] = to_hex(bundle.config.owner);
    doc["implementation_slot"] = word_to_hex(bundle.config.implementation_slot);
    doc["owner_slot"] = word_to_hex(bundle.config.owner_slot);
    doc["upgrade_signature"] = bundle.config.upgrade_signature;
    doc["proxy_code"] = to_hex(bundle.proxy_code);
    doc["logic_code"] = to_hex(bundle.logic_code);
    json storage = json::object();
    for (const auto& [key, value] : bundle.proxy_storage)
        storage[word_to_hex(key)] = word_to_hex(value);
    doc["proxy_storage"] = std::move(storage);
    json txs = json::array();
    for (const TxEnv& tx : bundle.init_transactions)
    {
        json item;
        item["from"] = to_hex(tx.sender);
        item["to"] = to_hex(*tx.recipient);
        item["data"] = to_hex(tx.calldata);
        item["value"] = word_to_hex(tx.value);
        item["gas"] = tx.gas_limit;
        item["id"] = tx.id;
        txs.push_back(std::move(item));
    }
    doc["init_transactions"] = std::move(txs);
    doc["cost_estimate"] = bundle.cost_estimate;
    return doc.dump(2);
}

DeploymentBundle bundle_from_json(const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::exception& e)
    {
        throw Error{Errc::bad_config, std::string{"bundle JSON: "} + e.what()};
    }
    DeploymentBundle bundle;
    bundle.proxy_address = address_from_hex(doc.at("proxy_address").get<std::string>());
    bundle.logic_address = address_from_hex(doc.at("logic_address").get<std::string>());
    bundle.config.owner = address_from_hex(doc.at("owner").get<std::string>());
    bundle.config.implementation_slot =
        word_from_string(doc.at("implementation_slot").get<std::string>());
    bundle.config.owner_slot = word_from_string(doc.at("owner_slot").get<std::string>());
    bundle.config.upgrade_signature = doc.value("upgrade_signature", "upgradeTo(address)");
    bundle.proxy_code = from_hex(doc.at("proxy_code").get<std::string>());
    bundle.logic_code = from_hex(doc.at("logic_code").get<std::string>());
    for (const auto& [key, value] : doc.value("proxy_storage", json::object()).items())
        bundle.proxy_storage[word_from_string(key)] =
            word_from_string(value.get<std::string>());
    for (const auto& item : doc.value("init_transactions", json::array()))
    {
        TxEnv tx;
        tx.sender = address_from_hex(item.at("from").get<std::string>());
        tx.recipient = address_from_hex(item.at("to").get<std::string>());
        tx.calldata = from_hex(item.at("data").get<std::string>());
        tx.value = word_from_string(item.value("value", "0x00"));
        tx.gas_limit = item.value("gas", int64_t{200000});
        tx.id = item.value("id", "init");
        bundle.init_transactions.push_back(std::move(tx));
    }
    bundle.cost_estimate = doc.value("cost_estimate", int64_t{0});
    return bundle;
}

}  // namespace evmfix
