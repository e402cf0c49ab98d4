// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/cfg.hpp>
#include <evmfix/errors.hpp>

#include <algorithm>
#include <cstdio>

namespace evmfix
{
const char* terminator_name(Terminator t) noexcept
{
    switch (t)
    {
    case Terminator::jump:
        return "JUMP";
    case Terminator::jumpi:
        return "JUMPI";
    case Terminator::stop:
        return "STOP";
    case Terminator::ret:
        return "RETURN";
    case Terminator::revert:
        return "REVERT";
    case Terminator::invalid:
        return "INVALID";
    case Terminator::selfdestruct:
        return "SELFDESTRUCT";
    case Terminator::fallthrough:
        return "fallthrough";
    }
    return "?";
}

namespace
{
bool is_terminator_opcode(const Instruction& instr) noexcept
{
    switch (instr.opcode)
    {
    case OP_JUMP:
    case OP_JUMPI:
    case OP_STOP:
    case OP_RETURN:
    case OP_REVERT:
    case OP_SELFDESTRUCT:
        return true;
    default:
        // Designated INVALID and every unknown byte abort execution.
        return instr.opcode == OP_INVALID || instr.is_invalid_class();
    }
}

Terminator terminator_of(const Instruction& instr) noexcept
{
    switch (instr.opcode)
    {
    case OP_JUMP:
        return Terminator::jump;
    case OP_JUMPI:
        return Terminator::jumpi;
    case OP_STOP:
        return Terminator::stop;
    case OP_RETURN:
        return Terminator::ret;
    case OP_REVERT:
        return Terminator::revert;
    case OP_SELFDESTRUCT:
        return Terminator::selfdestruct;
    default:
        return Terminator::invalid;
    }
}

// See the rule in the header. Returns the byte offset where the constant
// pool starts (== code length when there is none).
uint32_t find_data_start(const Program& program, const JumpdestSet& jumpdests)
{
    const auto& instrs = program.instructions;
    if (instrs.empty())
        return program.code_length;

    // Last offset at or after which a valid JUMPDEST exists.
    uint32_t last_jumpdest_end = 0;
    if (!jumpdests.valid_targets.empty())
        last_jumpdest_end = *jumpdests.valid_targets.rbegin() + 1;

    // Earliest instruction index from which the suffix is all
    // unknown-opcode/truncated instructions would be too strict for real
    // pools; instead require the suffix to contain at least one such
    // instruction and pick the earliest block boundary satisfying the rest.
    std::vector<bool> suffix_has_fallback(instrs.size() + 1, false);
    for (size_t i = instrs.size(); i-- > 0;)
        suffix_has_fallback[i] =
            suffix_has_fallback[i + 1] || instrs[i].is_invalid_class() || instrs[i].truncated;

    for (size_t i = 1; i < instrs.size(); ++i)
    {
        const Instruction& prev = instrs[i - 1];
        const uint32_t offset = instrs[i].offset;
        const bool block_boundary =
            is_terminator_opcode(prev) || jumpdests.contains(offset);
        if (!block_boundary)
            continue;
        if (offset < last_jumpdest_end)
            continue;
        if (!suffix_has_fallback[i])
            break;  // later boundaries only shrink the suffix
        return offset;
    }
    return program.code_length;
}
}  // namespace

const BasicBlock* PartialCfg::block_starting_at(uint32_t offset) const noexcept
{
    const auto it = std::lower_bound(blocks.begin(), blocks.end(), offset,
        [](const BasicBlock& b, uint32_t value) { return b.start < value; });
    if (it == blocks.end() || it->start != offset)
        return nullptr;
    return &*it;
}

int PartialCfg::block_index_containing(uint32_t pc) const noexcept
{
    const auto it = std::upper_bound(blocks.begin(), blocks.end(), pc,
        [](uint32_t value, const BasicBlock& b) { return value < b.start; });
    if (it == blocks.begin())
        return -1;
    const auto index = static_cast<int>(it - blocks.begin()) - 1;
    if (pc >= blocks[static_cast<size_t>(index)].end)
        return -1;
    return index;
}

bool PartialCfg::is_instruction_boundary(uint32_t pc) const noexcept
{
    return std::binary_search(instruction_offsets.begin(), instruction_offsets.end(), pc);
}

int PartialCfg::fallthrough_successor(uint32_t index) const noexcept
{
    for (const auto& [from, to] : fallthrough_edges)
        if (from == index)
            return static_cast<int>(to);
    return -1;
}

PartialCfg recover_blocks(const Program& program, const JumpdestSet& jumpdests)
{
    PartialCfg cfg;
    cfg.data_start = find_data_start(program, jumpdests);
    cfg.instruction_offsets.reserve(program.instructions.size());
    for (const auto& instr : program.instructions)
        cfg.instruction_offsets.push_back(instr.offset);

    const auto& instrs = program.instructions;
    size_t i = 0;
    while (i < instrs.size() && instrs[i].offset < cfg.data_start)
    {
        BasicBlock block;
        block.start = instrs[i].offset;
        block.first_instruction = static_cast<uint32_t>(i);
        block.starts_with_jumpdest = instrs[i].opcode == OP_JUMPDEST;

        size_t j = i;
        while (true)
        {
            const Instruction& instr = instrs[j];
            const bool terminates = is_terminator_opcode(instr);
            ++j;
            const bool at_end = j >= instrs.size() || instrs[j].offset >= cfg.data_start;
            if (terminates)
            {
                block.terminator = terminator_of(instr);
                break;
            }
            if (at_end || jumpdests.contains(instrs[j].offset))
            {
                block.terminator = Terminator::fallthrough;
                break;
            }
        }
        block.end = instrs[j - 1].end();
        block.instruction_count = static_cast<uint32_t>(j - i);
        cfg.blocks.push_back(block);
        i = j;
    }

    for (size_t index = 0; index < cfg.blocks.size(); ++index)
    {
        const BasicBlock& block = cfg.blocks[index];
        if (block.terminator != Terminator::jumpi && block.terminator != Terminator::fallthrough)
            continue;
        if (index + 1 < cfg.blocks.size() && cfg.blocks[index + 1].start == block.end)
            cfg.fallthrough_edges.emplace_back(static_cast<uint32_t>(index),
                static_cast<uint32_t>(index + 1));
    }
    return cfg;
}

const BasicBlock& block_containing(const PartialCfg& cfg, uint32_t pc)
{
    const int index = cfg.block_index_containing(pc);
    if (index < 0)
    {
        char msg[64];
        std::snprintf(msg, sizeof(msg), "pc 0x%x is in the data region", pc);
        throw Error{Errc::address_in_data_region, msg};
    }
    if (!cfg.is_instruction_boundary(pc))
    {
        char msg[64];
        std::snprintf(msg, sizeof(msg), "pc 0x%x is inside a push operand", pc);
        throw Error{Errc::not_on_instruction_boundary, msg};
    }
    return cfg.blocks[static_cast<size_t>(index)];
}

std::vector<BasicBlock> fallthrough_chain(const PartialCfg& cfg, const BasicBlock& block)
{
    std::vector<BasicBlock> chain;
    const BasicBlock* current = &block;
    while (current->terminator == Terminator::jumpi ||
           current->terminator == Terminator::fallthrough)
    {
        const BasicBlock* successor = cfg.block_starting_at(current->end);
        if (successor == nullptr || successor->starts_with_jumpdest)
            break;  // rejoin with an explicit jump (or fail later if none exists)
        chain.push_back(*successor);
        current = successor;
    }
    return chain;
}

std::string format_blocks(const PartialCfg& cfg)
{
    std::string out;
    for (const auto& block : cfg.blocks)
    {
        char line[96];
        std::snprintf(line, sizeof(line), "0x%04x..0x%04x  %-12s%s\n", block.start, block.end,
            terminator_name(block.terminator), block.starts_with_jumpdest ? "  [JUMPDEST]" : "");
        out += line;
    }
    return out;
}

std::string to_dot(const PartialCfg& cfg)
{
    std::string out = "digraph cfg {\n  node [shape=box fontname=monospace];\n";
    for (size_t i = 0; i < cfg.blocks.size(); ++i)
    {
        const auto& b = cfg.blocks[i];
        char line[128];
        std::snprintf(line, sizeof(line), "  b%zu [label=\"0x%04x..0x%04x\\n%s\"];\n", i, b.start,
            b.end, terminator_name(b.terminator));
        out += line;
    }
    for (const auto& [from, to] : cfg.fallthrough_edges)
    {
        char line[64];
        std::snprintf(line, sizeof(line), "  b%u -> b%u [style=dashed];\n", from, to);
        out += line;
    }
    out += "}\n";
    return out;
}

}  // namespace evmfix
