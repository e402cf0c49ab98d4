// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/bytes.hpp>
#include <evmfix/opcodes.hpp>
#include <evmfix/word.hpp>

#include <set>
#include <string>
#include <vector>

namespace evmfix
{
/// One decoded instruction. For push instructions the operand is kept
/// zero-padded to the declared width; operand_bytes_in_code records how many
/// operand bytes were actually present (smaller only for a truncated push at
/// the end of the code, which real contracts produce when the constant pool
/// happens to start with a push byte).
struct Instruction
{
    uint32_t offset = 0;
    uint8_t opcode = 0;
    Bytes operand;
    uint8_t operand_bytes_in_code = 0;
    bool truncated = false;

    bool is_push() const noexcept { return evmfix::is_push(opcode); }
    bool is_invalid_class() const noexcept { return !opcode_info(opcode).known; }
    const char* mnemonic() const noexcept;
    uint32_t size_in_code() const noexcept { return 1 + operand_bytes_in_code; }
    uint32_t end() const noexcept { return offset + size_in_code(); }
    u256 push_value() const { return word_from_bytes(operand); }
};

struct Program
{
    std::vector<Instruction> instructions;
    uint32_t code_length = 0;
    // Constant-pool bytes following the instruction list. Always empty for
    // programs produced by disassemble (which decodes every byte); available
    // for hand-built programs so assemble can reattach a pool.
    Bytes trailing_data;
};

/// Byte addresses that the linear sweep marks as legal jump targets.
struct JumpdestSet
{
    std::set<uint32_t> valid_targets;

    bool contains(uint32_t offset) const { return valid_targets.count(offset) != 0; }
};

inline constexpr size_t deployed_code_cap = 24576;

/// Decodes bytecode into a Program tiling every input byte. Unknown opcodes
/// become single-byte INVALID-class instructions carrying the raw byte; a
/// trailing push with missing operand bytes is zero-padded and flagged
/// truncated. Never fails.
Program disassemble(const Bytes& code, size_t code_cap = deployed_code_cap);

/// Byte-exact inverse of disassemble. Throws Error{operand_width_mismatch}
/// when a push operand does not match its opcode's width.
Bytes assemble(const Program& program);

/// The linear sweep every EVM implementation performs: a JUMPDEST byte is a
/// valid target unless it lies inside the operand of a preceding push.
/// Control flow is deliberately ignored.
JumpdestSet jumpdest_analysis(const Bytes& code);

/// One instruction per line: `OFFSET_HEX: MNEMONIC [0xOPERAND]`.
std::string format_disassembly(const Program& program);
std::string format_instruction(const Instruction& instr);

}  // namespace evmfix
