// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/assembly.hpp>
#include <evmfix/errors.hpp>

#include <cstdio>

namespace evmfix
{
const char* Instruction::mnemonic() const noexcept
{
    const auto& info = opcode_info(opcode);
    return info.known ? info.mnemonic : "UNKNOWN";
}

Program disassemble(const Bytes& code, size_t code_cap)
{
    if (code.size() > code_cap)
        throw Error{Errc::code_size_cap_exceeded, "code exceeds size cap"};

    Program program;
    program.code_length = static_cast<uint32_t>(code.size());
    program.instructions.reserve(code.size());

    uint32_t pc = 0;
    while (pc < code.size())
    {
        Instruction instr;
        instr.offset = pc;
        instr.opcode = code[pc];
        const unsigned width = push_immediate_size(instr.opcode);
        if (width > 0)
        {
            const uint32_t available =
                std::min<uint32_t>(width, static_cast<uint32_t>(code.size()) - pc - 1);
            instr.operand.assign(code.begin() + pc + 1, code.begin() + pc + 1 + available);
            // Missing trailing bytes read as zero in the EVM.
            instr.operand.resize(width, 0x00);
            instr.operand_bytes_in_code = static_cast<uint8_t>(available);
            instr.truncated = available < width;
            pc += 1 + available;
        }
        else
        {
            pc += 1;
        }
        program.instructions.push_back(std::move(instr));
    }
    return program;
}

Bytes assemble(const Program& program)
{
    Bytes out;
    out.reserve(program.code_length);
    for (const auto& instr : program.instructions)
    {
        const unsigned width = push_immediate_size(instr.opcode);
        if (instr.operand.size() != width)
            throw Error{Errc::operand_width_mismatch,
                std::string{"operand width mismatch for "} + instr.mnemonic()};
        if (instr.operand_bytes_in_code > width)
            throw Error{Errc::operand_width_mismatch, "operand_bytes_in_code exceeds width"};
        out.push_back(instr.opcode);
        out.insert(out.end(), instr.operand.begin(),
            instr.operand.begin() + instr.operand_bytes_in_code);
    }
    out.insert(out.end(), program.trailing_data.begin(), program.trailing_data.end());
    return out;
}

JumpdestSet jumpdest_analysis(const Bytes& code)
{
    JumpdestSet set;
    size_t pc = 0;
    while (pc < code.size())
    {
        const uint8_t op = code[pc];
        if (op == OP_JUMPDEST)
            set.valid_targets.insert(static_cast<uint32_t>(pc));
        pc += 1 + push_immediate_size(op);
    }
    return set;
}

std::string format_instruction(const Instruction& instr)
{
    char head[32];
    std::snprintf(head, sizeof(head), "0x%02x: ", instr.offset);
    std::string line{head};
    if (instr.is_invalid_class())
    {
        char unk[24];
        std::snprintf(unk, sizeof(unk), "UNKNOWN_0x%02x", instr.opcode);
        line += unk;
        return line;
    }
    line += instr.mnemonic();
    if (!instr.operand.empty())
    {
        line += ' ';
        line += to_hex(instr.operand);
        if (instr.truncated)
            line += " (truncated)";
    }
    return line;
}

std::string format_disassembly(const Program& program)
{
    std::string out;
    for (const auto& instr : program.instructions)
    {
        out += format_instruction(instr);
        out += '\n';
    }
    return out;
}

}  // namespace evmfix
