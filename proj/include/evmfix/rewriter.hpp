// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/templates.hpp>

#include <string>
#include <vector>

namespace evmfix
{
struct TrampolineRecord
{
    uint32_t block_start = 0;
    uint32_t target = 0;  // appended copy address
    // Expected static-gas overhead per traversal of this trampoline: jump
    // there, landing JUMPDEST (when freshly added), jump back. 23 for blocks
    // that did not start with a JUMPDEST, 22 for blocks that did (their
    // landing JUMPDEST was already paid for in the original run). Blocks
    // whose copy ends in an original terminator have no jump-back.
    int64_t traversal_overhead = 0;
};

struct PatchNote
{
    uint32_t pc = 0;
    std::string template_id;
    uint32_t block_start = 0;
    int64_t success_gas_delta = 0;
};

struct RewriteResult
{
    Bytes patched_code;
    uint32_t appended_region_start = 0;
    std::vector<TrampolineRecord> trampolines;
    uint32_t size_increase = 0;
    std::vector<PatchNote> report;
    std::vector<std::string> notes;
};

/// Rewrites `code`, applying each template at its patch point via the
/// trampoline strategy:
///
///   original code                       appended region
///   +--------------------+--------+     +----------------------------+
///   | PUSHk T; JUMP; fe* | rest   | 00* | JUMPDEST  patched block    |
///   | (replaced block)   | as-is  | pad |  ... fall-through copies   |
///   +--------------------+--------+     |  PUSHk back; JUMP          |
///                                       +----------------------------+
///
/// Every byte outside replaced blocks keeps its address, so jump targets and
/// data constants need no fixup. The padding keeps a trailing push operand
/// of the original code from shadowing appended JUMPDESTs. Fall-through
/// successors without a JUMPDEST cannot be jumped back into and are
/// duplicated after the copy instead; JUMPDEST-starting successors are
/// rejoined with an explicit jump.
///
/// Patches must be sorted by pc, at most one per instruction. Throws
/// Error{insufficient_block_size} when a block cannot hold its trampoline,
/// Error{code_size_cap_exceeded} past the deployed-code cap,
/// Error{overlapping_patches}, and Error{rewrite_diagnostic} when a
/// fall-through chain runs off the end of the code.
RewriteResult rewrite(
    const Bytes& code, const std::vector<std::pair<PatchPoint, TemplateInstance>>& patches);

/// Padding (0x00 bytes, the STOP opcode) required between the original code
/// and the appended region so that no trailing push operand shadows it:
/// runs the linear sweep and measures how far the last (possibly phantom)
/// push operand extends past code_end.
uint32_t compute_padding(uint32_t code_end, const Bytes& code);

/// `PUSHk target; JUMP` with minimal k, INVALID-filled to exactly
/// block_size bytes. Throws Error{insufficient_block_size}.
std::vector<Instruction> trampoline_for(uint32_t target, uint32_t block_size);

}  // namespace evmfix
