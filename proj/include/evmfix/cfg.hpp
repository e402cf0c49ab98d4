// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/assembly.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace evmfix
{
enum class Terminator
{
    jump,
    jumpi,
    stop,
    ret,
    revert,
    invalid,
    selfdestruct,
    fallthrough,
};

const char* terminator_name(Terminator t) noexcept;

struct BasicBlock
{
    uint32_t start = 0;
    uint32_t end = 0;  // one past the last instruction byte
    Terminator terminator = Terminator::fallthrough;
    bool starts_with_jumpdest = false;
    uint32_t first_instruction = 0;  // index into the Program
    uint32_t instruction_count = 0;
};

// Deliberately partial: block boundaries and fall-through edges only.
// No jump-target resolution, no data-flow analysis — the trampoline rewriter
// does not need them.
struct PartialCfg
{
    std::vector<BasicBlock> blocks;  // ordered, tiling [0, data_start)
    std::vector<std::pair<uint32_t, uint32_t>> fallthrough_edges;  // block index pairs
    uint32_t data_start = 0;  // start of the trailing constant pool
    std::vector<uint32_t> instruction_offsets;

    const BasicBlock* block_starting_at(uint32_t offset) const noexcept;
    int block_index_containing(uint32_t pc) const noexcept;  // -1 when outside code
    bool is_instruction_boundary(uint32_t pc) const noexcept;
    /// Index of the fall-through successor of block `index`, or -1.
    int fallthrough_successor(uint32_t index) const noexcept;
};

/// Recovers block boundaries over the code region. Blocks begin at offset 0,
/// at every valid JUMPDEST, and after every terminator. The trailing constant
/// pool (see below) is excluded from blocks.
///
/// Code/pool boundary rule: the pool is the longest instruction suffix that
/// starts at a block boundary > 0, contains no sweep-valid JUMPDEST, and
/// whose decode needed the INVALID fallback (or a truncated push) at least
/// once. Suffixes of well-formed instructions stay code; ambiguity resolves
/// toward data, which is never moved by the rewriter.
PartialCfg recover_blocks(const Program& program, const JumpdestSet& jumpdests);

/// The unique block enclosing pc. Throws Error{address_in_data_region} when
/// pc is outside the block tiling and Error{not_on_instruction_boundary}
/// when it points into a push operand.
const BasicBlock& block_containing(const PartialCfg& cfg, uint32_t pc);

/// The maximal run of successive fall-through-only successors that do NOT
/// start with a JUMPDEST (these must be duplicated when the block is moved).
/// Stops before the first JUMPDEST-starting successor, which can be rejoined
/// with an explicit jump instead.
std::vector<BasicBlock> fallthrough_chain(const PartialCfg& cfg, const BasicBlock& block);

/// One block per line: `start..end  terminator  [JUMPDEST]`.
std::string format_blocks(const PartialCfg& cfg);

/// DOT graph with fall-through edges, for debugging.
std::string to_dot(const PartialCfg& cfg);

}  // namespace evmfix
