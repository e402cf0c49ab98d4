// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/errors.hpp>

#include <array>
#include <cstdint>
#include <string_view>

namespace evmfix
{
// clang-format off
inline constexpr uint8_t OP_STOP           = 0x00;
inline constexpr uint8_t OP_ADD            = 0x01;
inline constexpr uint8_t OP_MUL            = 0x02;
inline constexpr uint8_t OP_SUB            = 0x03;
inline constexpr uint8_t OP_DIV            = 0x04;
inline constexpr uint8_t OP_SDIV           = 0x05;
inline constexpr uint8_t OP_MOD            = 0x06;
inline constexpr uint8_t OP_LT             = 0x10;
inline constexpr uint8_t OP_GT             = 0x11;
inline constexpr uint8_t OP_SLT            = 0x12;
inline constexpr uint8_t OP_SGT            = 0x13;
inline constexpr uint8_t OP_EQ             = 0x14;
inline constexpr uint8_t OP_ISZERO         = 0x15;
inline constexpr uint8_t OP_AND            = 0x16;
inline constexpr uint8_t OP_OR             = 0x17;
inline constexpr uint8_t OP_XOR            = 0x18;
inline constexpr uint8_t OP_NOT            = 0x19;
inline constexpr uint8_t OP_BYTE           = 0x1a;
inline constexpr uint8_t OP_SHL            = 0x1b;
inline constexpr uint8_t OP_SHR            = 0x1c;
inline constexpr uint8_t OP_SHA3           = 0x20;
inline constexpr uint8_t OP_ADDRESS        = 0x30;
inline constexpr uint8_t OP_BALANCE        = 0x31;
inline constexpr uint8_t OP_ORIGIN         = 0x32;
inline constexpr uint8_t OP_CALLER         = 0x33;
inline constexpr uint8_t OP_CALLVALUE      = 0x34;
inline constexpr uint8_t OP_CALLDATALOAD   = 0x35;
inline constexpr uint8_t OP_CALLDATASIZE   = 0x36;
inline constexpr uint8_t OP_CALLDATACOPY   = 0x37;
inline constexpr uint8_t OP_CODESIZE       = 0x38;
inline constexpr uint8_t OP_CODECOPY       = 0x39;
inline constexpr uint8_t OP_GASPRICE       = 0x3a;
inline constexpr uint8_t OP_RETURNDATASIZE = 0x3d;
inline constexpr uint8_t OP_RETURNDATACOPY = 0x3e;
inline constexpr uint8_t OP_BLOCKHASH      = 0x40;
inline constexpr uint8_t OP_COINBASE       = 0x41;
inline constexpr uint8_t OP_TIMESTAMP      = 0x42;
inline constexpr uint8_t OP_NUMBER         = 0x43;
inline constexpr uint8_t OP_DIFFICULTY     = 0x44;
inline constexpr uint8_t OP_GASLIMIT       = 0x45;
inline constexpr uint8_t OP_POP            = 0x50;
inline constexpr uint8_t OP_MLOAD          = 0x51;
inline constexpr uint8_t OP_MSTORE         = 0x52;
inline constexpr uint8_t OP_MSTORE8        = 0x53;
inline constexpr uint8_t OP_SLOAD          = 0x54;
inline constexpr uint8_t OP_SSTORE         = 0x55;
inline constexpr uint8_t OP_JUMP           = 0x56;
inline constexpr uint8_t OP_JUMPI          = 0x57;
inline constexpr uint8_t OP_PC             = 0x58;
inline constexpr uint8_t OP_MSIZE          = 0x59;
inline constexpr uint8_t OP_GAS            = 0x5a;
inline constexpr uint8_t OP_JUMPDEST       = 0x5b;
inline constexpr uint8_t OP_PUSH1          = 0x60;
inline constexpr uint8_t OP_PUSH32         = 0x7f;
inline constexpr uint8_t OP_DUP1           = 0x80;
inline constexpr uint8_t OP_DUP16          = 0x8f;
inline constexpr uint8_t OP_SWAP1          = 0x90;
inline constexpr uint8_t OP_SWAP16         = 0x9f;
inline constexpr uint8_t OP_LOG0           = 0xa0;
inline constexpr uint8_t OP_LOG4           = 0xa4;
inline constexpr uint8_t OP_CREATE         = 0xf0;
inline constexpr uint8_t OP_CALL           = 0xf1;
inline constexpr uint8_t OP_RETURN         = 0xf3;
inline constexpr uint8_t OP_DELEGATECALL   = 0xf4;
inline constexpr uint8_t OP_STATICCALL     = 0xfa;
inline constexpr uint8_t OP_REVERT         = 0xfd;
inline constexpr uint8_t OP_INVALID        = 0xfe;
inline constexpr uint8_t OP_SELFDESTRUCT   = 0xff;
// clang-format on

struct OpcodeInfo
{
    const char* mnemonic = "UNKNOWN";
    uint8_t immediate_size = 0;  // push operand bytes
    int8_t stack_in = 0;
    int8_t stack_out = 0;
    bool known = false;  // in the supported set; unknown bytes decode as INVALID-class
};

const OpcodeInfo& opcode_info(uint8_t opcode) noexcept;

inline bool is_push(uint8_t opcode) noexcept
{
    return opcode >= OP_PUSH1 && opcode <= OP_PUSH32;
}
inline unsigned push_immediate_size(uint8_t opcode) noexcept
{
    return is_push(opcode) ? opcode - (OP_PUSH1 - 1) : 0;
}
/// PUSHk opcode for a k-byte immediate (1 <= k <= 32).
inline uint8_t push_opcode_for_size(unsigned size) noexcept
{
    return static_cast<uint8_t>(OP_PUSH1 - 1 + size);
}

// Static (base) gas costs for one fork. Tables are data; "petersburg" is the
// shipped default and reproduces the reference per-instruction figures
// (PUSH 3, JUMP 8, JUMPI 10, JUMPDEST 1, arithmetic 3/5, SLOAD 200).
struct GasSchedule
{
    std::string_view fork;
    std::array<int32_t, 256> base{};  // -1 where no cost is defined

    int64_t sha3_word = 6;
    int64_t copy_word = 3;
    int64_t memory_word = 3;  // plus words^2/512 quadratic term
    int64_t log_base = 375;
    int64_t log_topic = 375;
    int64_t log_byte = 8;
    int64_t sstore_set = 20000;
    int64_t sstore_reset = 5000;
    int64_t call_value_transfer = 9000;
    int64_t call_stipend = 2300;
    int64_t call_new_account = 25000;
    int64_t create_gas = 32000;
    int64_t identity_precompile_base = 15;
    int64_t identity_precompile_word = 3;

    static const GasSchedule& petersburg();
    /// Looks up a schedule by fork name; throws Error{bad_config} on unknown.
    static const GasSchedule& for_fork(std::string_view name);
};

/// Base gas of an opcode under the given schedule (default fork).
/// Throws Error{unknown_opcode} for bytes outside the supported set.
int64_t static_gas_of(uint8_t opcode, const GasSchedule& schedule = GasSchedule::petersburg());

}  // namespace evmfix
