// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/minievm.hpp>

#include <string>

namespace evmfix
{
/// Delegatecall-proxy parameters. The reserved slots default to the
/// EIP-1967 constants (keccak of a fixed label, minus one), which cannot
/// collide with sequentially allocated logic-contract slots.
struct ProxyConfig
{
    Address owner;
    u256 implementation_slot;  // default: eip1967 "implementation"
    u256 owner_slot;           // default: eip1967 "admin"
    std::string upgrade_signature = "upgradeTo(address)";

    ProxyConfig();
};

u256 eip1967_implementation_slot();
u256 eip1967_admin_slot();

/// Hand-assembled proxy runtime code. Calls carrying the upgrade selector
/// require caller == owner and store the new implementation; everything
/// else is forwarded via DELEGATECALL with return/revert data propagated
/// verbatim.
Bytes make_proxy(const ProxyConfig& config);

/// Logic contract derived from runtime code: identity, plus the size-cap
/// check. Constructors never ran in proxy storage, so contracts need an
/// explicit guarded init function (documented in the README).
Bytes to_logic_contract(const Bytes& original_runtime_code);

/// 200 gas per byte stored plus the fixed creation overhead.
struct DeployCostModel
{
    int64_t per_byte = 200;
    int64_t create_overhead = 32000;
    int64_t tx_overhead = 21000;
};

int64_t estimate_deploy_cost(const Bytes& code, const DeployCostModel& model = {});

struct DeploymentBundle
{
    Address proxy_address;
    Address logic_address;
    ProxyConfig config;
    Bytes proxy_code;
    Bytes logic_code;
    std::map<u256, u256> proxy_storage;  // owner pre-seeded
    std::vector<TxEnv> init_transactions;
    int64_t cost_estimate = 0;
};

DeploymentBundle make_bundle(const Bytes& logic_runtime_code, const ProxyConfig& config,
    const Address& proxy_address, const Address& logic_address);

/// Installs the bundle's accounts into the world and replays its init
/// transactions; throws Error{rewrite_diagnostic} if any init tx fails.
void apply_bundle(WorldState& world, const DeploymentBundle& bundle,
    const VmConfig& vm = {});

struct UpgradePlan
{
    Address proxy_address;
    Address new_logic_address;
    Bytes new_logic_code;
    TxEnv switchover;  // from owner, calldata = selector ++ left-padded address
};

UpgradePlan encode_upgrade(const DeploymentBundle& bundle, const Address& new_logic_address,
    const Bytes& new_logic_code);

std::string bundle_to_json(const DeploymentBundle& bundle);
DeploymentBundle bundle_from_json(const std::string& json_text);

}  // namespace evmfix
