// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/opcodes.hpp>

#include <cstdio>

namespace evmfix
{
namespace
{
constexpr int32_t G_zero = 0;
constexpr int32_t G_base = 2;
constexpr int32_t G_verylow = 3;
constexpr int32_t G_low = 5;
constexpr int32_t G_mid = 8;
constexpr int32_t G_high = 10;
constexpr int32_t G_jumpdest = 1;

struct TableEntry
{
    uint8_t opcode;
    const char* mnemonic;
    uint8_t immediate;
    int8_t in;
    int8_t out;
    int32_t gas;
};

// Supported opcode set. Everything else decodes as an INVALID-class
// instruction and aborts execution in the interpreter.
constexpr TableEntry table[] = {
    {OP_STOP, "STOP", 0, 0, 0, G_zero},
    {OP_ADD, "ADD", 0, 2, 1, G_verylow},
    {OP_MUL, "MUL", 0, 2, 1, G_low},
    {OP_SUB, "SUB", 0, 2, 1, G_verylow},
    {OP_DIV, "DIV", 0, 2, 1, G_low},
    {OP_SDIV, "SDIV", 0, 2, 1, G_low},
    {OP_MOD, "MOD", 0, 2, 1, G_low},
    {OP_LT, "LT", 0, 2, 1, G_verylow},
    {OP_GT, "GT", 0, 2, 1, G_verylow},
    {OP_SLT, "SLT", 0, 2, 1, G_verylow},
    {OP_SGT, "SGT", 0, 2, 1, G_verylow},
    {OP_EQ, "EQ", 0, 2, 1, G_verylow},
    {OP_ISZERO, "ISZERO", 0, 1, 1, G_verylow},
    {OP_AND, "AND", 0, 2, 1, G_verylow},
    {OP_OR, "OR", 0, 2, 1, G_verylow},
    {OP_XOR, "XOR", 0, 2, 1, G_verylow},
    {OP_NOT, "NOT", 0, 1, 1, G_verylow},
    {OP_BYTE, "BYTE", 0, 2, 1, G_verylow},
    {OP_SHL, "SHL", 0, 2, 1, G_verylow},
    {OP_SHR, "SHR", 0, 2, 1, G_verylow},
    {OP_SHA3, "SHA3", 0, 2, 1, 30},
    {OP_ADDRESS, "ADDRESS", 0, 0, 1, G_base},
    {OP_BALANCE, "BALANCE", 0, 1, 1, 400},
    {OP_ORIGIN, "ORIGIN", 0, 0, 1, G_base},
    {OP_CALLER, "CALLER", 0, 0, 1, G_base},
    {OP_CALLVALUE, "CALLVALUE", 0, 0, 1, G_base},
    {OP_CALLDATALOAD, "CALLDATALOAD", 0, 1, 1, G_verylow},
    {OP_CALLDATASIZE, "CALLDATASIZE", 0, 0, 1, G_base},
    {OP_CALLDATACOPY, "CALLDATACOPY", 0, 3, 0, G_verylow},
    {OP_CODESIZE, "CODESIZE", 0, 0, 1, G_base},
    {OP_CODECOPY, "CODECOPY", 0, 3, 0, G_verylow},
    {OP_GASPRICE, "GASPRICE", 0, 0, 1, G_base},
    {OP_RETURNDATASIZE, "RETURNDATASIZE", 0, 0, 1, G_base},
    {OP_RETURNDATACOPY, "RETURNDATACOPY", 0, 3, 0, G_verylow},
    {OP_BLOCKHASH, "BLOCKHASH", 0, 1, 1, 20},
    {OP_COINBASE, "COINBASE", 0, 0, 1, G_base},
    {OP_TIMESTAMP, "TIMESTAMP", 0, 0, 1, G_base},
    {OP_NUMBER, "NUMBER", 0, 0, 1, G_base},
    {OP_DIFFICULTY, "DIFFICULTY", 0, 0, 1, G_base},
    {OP_GASLIMIT, "GASLIMIT", 0, 0, 1, G_base},
    {OP_POP, "POP", 0, 1, 0, G_base},
    {OP_MLOAD, "MLOAD", 0, 1, 1, G_verylow},
    {OP_MSTORE, "MSTORE", 0, 2, 0, G_verylow},
    {OP_MSTORE8, "MSTORE8", 0, 2, 0, G_verylow},
    {OP_SLOAD, "SLOAD", 0, 1, 1, 200},
    {OP_SSTORE, "SSTORE", 0, 2, 0, G_zero},  // dynamic: set/reset
    {OP_JUMP, "JUMP", 0, 1, 0, G_mid},
    {OP_JUMPI, "JUMPI", 0, 2, 0, G_high},
    {OP_PC, "PC", 0, 0, 1, G_base},
    {OP_MSIZE, "MSIZE", 0, 0, 1, G_base},
    {OP_GAS, "GAS", 0, 0, 1, G_base},
    {OP_JUMPDEST, "JUMPDEST", 0, 0, 0, G_jumpdest},
    {OP_CREATE, "CREATE", 0, 3, 1, 32000},
    {OP_CALL, "CALL", 0, 7, 1, 700},
    {OP_RETURN, "RETURN", 0, 2, 0, G_zero},
    {OP_DELEGATECALL, "DELEGATECALL", 0, 6, 1, 700},
    {OP_STATICCALL, "STATICCALL", 0, 6, 1, 700},
    {OP_REVERT, "REVERT", 0, 2, 0, G_zero},
    {OP_INVALID, "INVALID", 0, 0, 0, G_zero},
    {OP_SELFDESTRUCT, "SELFDESTRUCT", 0, 1, 0, 5000},
};

constexpr const char* push_names[] = {"PUSH1", "PUSH2", "PUSH3", "PUSH4", "PUSH5", "PUSH6",
    "PUSH7", "PUSH8", "PUSH9", "PUSH10", "PUSH11", "PUSH12", "PUSH13", "PUSH14", "PUSH15",
    "PUSH16", "PUSH17", "PUSH18", "PUSH19", "PUSH20", "PUSH21", "PUSH22", "PUSH23", "PUSH24",
    "PUSH25", "PUSH26", "PUSH27", "PUSH28", "PUSH29", "PUSH30", "PUSH31", "PUSH32"};
constexpr const char* dup_names[] = {"DUP1", "DUP2", "DUP3", "DUP4", "DUP5", "DUP6", "DUP7",
    "DUP8", "DUP9", "DUP10", "DUP11", "DUP12", "DUP13", "DUP14", "DUP15", "DUP16"};
constexpr const char* swap_names[] = {"SWAP1", "SWAP2", "SWAP3", "SWAP4", "SWAP5", "SWAP6",
    "SWAP7", "SWAP8", "SWAP9", "SWAP10", "SWAP11", "SWAP12", "SWAP13", "SWAP14", "SWAP15",
    "SWAP16"};
constexpr const char* log_names[] = {"LOG0", "LOG1", "LOG2", "LOG3", "LOG4"};

std::array<OpcodeInfo, 256> build_info_table()
{
    std::array<OpcodeInfo, 256> info{};
    for (const auto& e : table)
        info[e.opcode] = OpcodeInfo{e.mnemonic, e.immediate, e.in, e.out, true};
    for (unsigned i = 0; i < 32; ++i)
        info[OP_PUSH1 + i] =
            OpcodeInfo{push_names[i], static_cast<uint8_t>(i + 1), 0, 1, true};
    for (unsigned i = 0; i < 16; ++i)
    {
        info[OP_DUP1 + i] =
            OpcodeInfo{dup_names[i], 0, static_cast<int8_t>(i + 1), static_cast<int8_t>(i + 2), true};
        info[OP_SWAP1 + i] = OpcodeInfo{
            swap_names[i], 0, static_cast<int8_t>(i + 2), static_cast<int8_t>(i + 2), true};
    }
    for (unsigned i = 0; i < 5; ++i)
        info[OP_LOG0 + i] = OpcodeInfo{log_names[i], 0, static_cast<int8_t>(i + 2), 0, true};
    return info;
}

std::array<int32_t, 256> build_gas_table()
{
    std::array<int32_t, 256> gas{};
    gas.fill(-1);
    for (const auto& e : table)
        gas[e.opcode] = e.gas;
    for (unsigned i = 0; i < 32; ++i)
        gas[OP_PUSH1 + i] = G_verylow;
    for (unsigned i = 0; i < 16; ++i)
    {
        gas[OP_DUP1 + i] = G_verylow;
        gas[OP_SWAP1 + i] = G_verylow;
    }
    for (unsigned i = 0; i < 5; ++i)
        gas[OP_LOG0 + i] = 375;
    return gas;
}

const std::array<OpcodeInfo, 256> info_table = build_info_table();

}  // namespace

const OpcodeInfo& opcode_info(uint8_t opcode) noexcept
{
    return info_table[opcode];
}

const GasSchedule& GasSchedule::petersburg()
{
    static const GasSchedule schedule = [] {
        GasSchedule s;
        s.fork = "petersburg";
        s.base = build_gas_table();
        return s;
    }();
    return schedule;
}

const GasSchedule& GasSchedule::for_fork(std::string_view name)
{
    if (name == "petersburg" || name.empty())
        return petersburg();
    throw Error{Errc::bad_config, "unknown gas fork: " + std::string{name}};
}

int64_t static_gas_of(uint8_t opcode, const GasSchedule& schedule)
{
    const int32_t gas = schedule.base[opcode];
    if (gas < 0)
    {
        char msg[48];
        std::snprintf(msg, sizeof(msg), "unsupported opcode 0x%02x", opcode);
        throw Error{Errc::unknown_opcode, msg};
    }
    return gas;
}

}  // namespace evmfix
