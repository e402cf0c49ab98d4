// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/bytes.hpp>
#include <evmfix/opcodes.hpp>
#include <evmfix/word.hpp>

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace evmfix
{
struct Account
{
    u256 balance;
    Bytes code;
    std::map<u256, u256> storage;  // zero values are erased (absent == zero)
    uint64_t nonce = 0;
};

struct BlockContext
{
    u256 number;
    u256 timestamp;
    u256 coinbase;
    u256 difficulty;
    u256 gas_limit;
    u256 gas_price;
};

struct WorldState
{
    std::map<Address, Account> accounts;
    BlockContext block;  // fixture-configurable constants

    Account& get_or_create(const Address& addr) { return accounts[addr]; }
    const Account* find(const Address& addr) const
    {
        const auto it = accounts.find(addr);
        return it == accounts.end() ? nullptr : &it->second;
    }
};

/// Half-open pc interval inside the recipient's code whose entries are
/// counted per transaction (the difftester points this at the appended
/// patch region to count trampoline traversals).
struct WatchRegion
{
    uint32_t start = 0;
    uint32_t end = 0xffffffff;
};

struct TxEnv
{
    Address sender;
    std::optional<Address> recipient;  // nullopt = contract creation
    Bytes calldata;
    u256 value;
    int64_t gas_limit = 0;
    bool gas_accounting_enabled = true;
    std::optional<WatchRegion> watch;
    std::string id;  // fixture transaction id, informational
};

enum class TraceKind
{
    sstore,
    call,
    delegatecall,
    staticcall,
    create,
    selfdestruct,
    log,  // recorded, excluded from trace comparison unless strict mode
};

const char* trace_kind_name(TraceKind kind) noexcept;

struct TraceEvent
{
    TraceKind kind = TraceKind::sstore;
    Address context;  // storage context the event applies to
    // SSTORE parameters
    u256 key;
    u256 value;
    // Call-family parameters
    Address target;
    u256 call_value;
    Hash32 data_hash{};
    bool success = true;
    Hash32 return_hash{};

    bool operator==(const TraceEvent&) const = default;
};

enum class TxStatus
{
    success,
    revert,
    out_of_gas,
    invalid_opcode,
};

const char* tx_status_name(TxStatus status) noexcept;

struct Fault
{
    Address code_address;
    uint32_t pc = 0;
    std::string reason;
};

struct Receipt
{
    TxStatus status = TxStatus::success;
    int64_t gas_used = 0;
    Bytes return_data;
    std::vector<TraceEvent> trace;  // committed frames only, in order
    // Aborting instruction of the outermost frame, when the tx failed.
    std::optional<Fault> fault;
    uint32_t watch_entries = 0;
    std::optional<Address> created;
};

struct VmConfig
{
    const GasSchedule* schedule = &GasSchedule::petersburg();
    uint64_t step_limit = uint64_t{1} << 24;  // unlimited-gas termination bound
    size_t memory_limit = size_t{1} << 26;
    unsigned call_depth_limit = 1024;
};

/// Deterministic state transition. Execution failures are reported in the
/// receipt, never thrown; only resource ceilings (step limit, memory limit
/// with accounting disabled) throw Error{step_limit_exceeded}.
std::pair<WorldState, Receipt> execute(
    const WorldState& world, const TxEnv& tx, const VmConfig& config = {});

/// Same transition with gas accounting disabled; gas_used is still summed
/// for measurement.
std::pair<WorldState, Receipt> execute_with_unlimited_gas(
    const WorldState& world, const TxEnv& tx, const VmConfig& config = {});

}  // namespace evmfix
