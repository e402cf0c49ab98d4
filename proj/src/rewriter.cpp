// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/errors.hpp>
#include <evmfix/rewriter.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace evmfix
{
uint32_t compute_padding(uint32_t code_end, const Bytes& code)
{
    // Where would the sweep position land after consuming the last push
    // operand? For a truncated trailing push the declared operand extends
    // past the end of the code; anything appended inside that phantom range
    // would be treated as push data.
    size_t pc = 0;
    size_t sweep_end = 0;
    while (pc < code.size())
    {
        const size_t size = 1 + push_immediate_size(code[pc]);
        sweep_end = pc + size;
        pc += size;
    }
    if (sweep_end > code_end)
        return static_cast<uint32_t>(sweep_end - code_end);
    return 0;
}

std::vector<Instruction> trampoline_for(uint32_t target, uint32_t block_size)
{
    const unsigned width = push_width_for(target);
    const uint32_t needed = 1 + width + 1;  // PUSHk target; JUMP
    if (block_size < needed)
        throw Error{Errc::insufficient_block_size,
            "block of " + std::to_string(block_size) + " bytes cannot hold a " +
                std::to_string(needed) + "-byte trampoline"};

    std::vector<Instruction> out;
    Instruction push;
    push.opcode = push_opcode_for_size(width);
    push.operand = word_to_minimal_bytes(target);
    push.operand_bytes_in_code = static_cast<uint8_t>(width);
    out.push_back(std::move(push));
    Instruction jump;
    jump.opcode = OP_JUMP;
    jump.offset = 1 + width;
    out.push_back(jump);
    for (uint32_t at = needed; at < block_size; ++at)
    {
        Instruction fill;
        fill.opcode = OP_INVALID;
        fill.offset = at;
        out.push_back(fill);
    }
    return out;
}

namespace
{
struct BlockPatchSet
{
    const BasicBlock* block = nullptr;
    std::vector<const std::pair<PatchPoint, TemplateInstance>*> patches;  // pc order
};

// Emits the block's instructions into the builder with its patches applied.
void emit_patched_block(AsmBuilder& builder, const Program& program, const BasicBlock& block,
    const std::vector<const std::pair<PatchPoint, TemplateInstance>*>& patches)
{
    size_t next_patch = 0;
    uint32_t i = 0;
    while (i < block.instruction_count)
    {
        const Instruction& instr = program.instructions[block.first_instruction + i];
        if (next_patch < patches.size() && patches[next_patch]->first.pc == instr.offset)
        {
            const TemplateInstance& inst = patches[next_patch]->second;
            builder.append_relabeled(inst.ops, inst.label_count);
            if (inst.replaces == 0)
            {
                builder.raw(instr);
                i += 1;
            }
            else
            {
                if (i + inst.replaces > block.instruction_count)
                    throw Error{Errc::rewrite_diagnostic,
                        "template at pc " + std::to_string(instr.offset) +
                            " replaces past the end of its block"};
                i += inst.replaces;
            }
            ++next_patch;
        }
        else
        {
            builder.raw(instr);
            i += 1;
        }
    }
    if (next_patch != patches.size())
        throw Error{Errc::rewrite_diagnostic, "patch pc does not lie in its block"};
}

bool ends_with_explicit_terminator(Terminator t)
{
    return t != Terminator::jumpi && t != Terminator::fallthrough;
}
}  // namespace

RewriteResult rewrite(
    const Bytes& code, const std::vector<std::pair<PatchPoint, TemplateInstance>>& patches)
{
    RewriteResult result;
    result.patched_code = code;
    if (patches.empty())
        return result;

    const Program program = disassemble(code);
    const JumpdestSet jumpdests = jumpdest_analysis(code);
    const PartialCfg cfg = recover_blocks(program, jumpdests);

    // Validate and group by enclosing block.
    std::map<uint32_t, BlockPatchSet> by_block;
    uint32_t previous_end = 0;
    bool first = true;
    for (const auto& patch : patches)
    {
        const auto& [point, inst] = patch;
        const BasicBlock& block = block_containing(cfg, point.pc);
        if (!first && point.pc < previous_end)
            throw Error{Errc::overlapping_patches,
                "patches at pc " + std::to_string(point.pc) + " overlap (sorted by pc required)"};
        first = false;
        // A replacing template consumes instructions; find the end pc.
        uint32_t consumed_end = point.pc;
        if (inst.replaces > 0)
        {
            uint32_t index = block.first_instruction;
            while (index < block.first_instruction + block.instruction_count &&
                   program.instructions[index].offset != point.pc)
                ++index;
            const uint32_t last = index + inst.replaces - 1;
            if (last >= block.first_instruction + block.instruction_count)
                throw Error{Errc::rewrite_diagnostic,
                    "template at pc " + std::to_string(point.pc) + " spans past its block"};
            consumed_end = program.instructions[last].end();
        }
        previous_end = std::max(previous_end, consumed_end == point.pc ? point.pc + 1 : consumed_end);

        auto& set = by_block[block.start];
        set.block = &block;
        set.patches.push_back(&patch);
    }

    // Blocks duplicated into an earlier block's fall-through chain take
    // their patches with them and need no trampoline of their own: the only
    // way into a non-JUMPDEST block is the fall-through that now lives in
    // the appended copy.
    std::set<uint32_t> inlined;

    const uint32_t padding = compute_padding(static_cast<uint32_t>(code.size()), code);
    const uint32_t appended_start = static_cast<uint32_t>(code.size()) + padding;

    AsmBuilder builder;
    struct CopyInfo
    {
        const BasicBlock* block = nullptr;
        LabelId entry = 0;
        bool fresh_jumpdest = false;
        bool has_jump_back = false;
    };
    std::vector<CopyInfo> copies;

    for (auto& [start, set] : by_block)
    {
        if (inlined.count(start))
            continue;
        const BasicBlock& block = *set.block;

        CopyInfo info;
        info.block = &block;
        info.entry = builder.make_label();
        builder.bind(info.entry);
        if (!block.starts_with_jumpdest)
        {
            builder.op(OP_JUMPDEST);
            info.fresh_jumpdest = true;
        }
        emit_patched_block(builder, program, block, set.patches);

        // Fall-through handling: duplicate successors that cannot be jumped
        // to, then rejoin the original code at the first JUMPDEST successor.
        const BasicBlock* last = &block;
        if (!ends_with_explicit_terminator(block.terminator))
        {
            for (const BasicBlock& chained : fallthrough_chain(cfg, block))
            {
                std::vector<const std::pair<PatchPoint, TemplateInstance>*> chained_patches;
                if (const auto it = by_block.find(chained.start); it != by_block.end())
                {
                    chained_patches = it->second.patches;
                    inlined.insert(chained.start);
                }
                emit_patched_block(builder, program, chained, chained_patches);
                const BasicBlock* resolved = cfg.block_starting_at(chained.start);
                last = resolved;
            }
            if (!ends_with_explicit_terminator(last->terminator))
            {
                const BasicBlock* successor = cfg.block_starting_at(last->end);
                if (successor == nullptr || !successor->starts_with_jumpdest)
                    throw Error{Errc::rewrite_diagnostic,
                        "block at 0x" + word_to_hex(block.start).substr(2) +
                            " falls through off the end of the code; cannot relocate"};
                builder.push(u256{successor->start});
                builder.op(OP_JUMP);
                info.has_jump_back = true;
            }
        }
        copies.push_back(info);
    }

    const AssembledCode assembled = builder.assemble(appended_start);

    // Install trampolines. A block that starts with JUMPDEST keeps that
    // marker as the trampoline's first byte so existing jumps stay legal.
    Bytes patched = code;
    size_t copy_index = 0;
    for (const auto& [start, set] : by_block)
    {
        if (inlined.count(start))
            continue;
        const CopyInfo& info = copies[copy_index++];
        const BasicBlock& block = *info.block;
        const uint32_t target = assembled.label_addresses.at(info.entry);
        const uint32_t block_size = block.end - block.start;
        const uint32_t lead = block.starts_with_jumpdest ? 1 : 0;

        const std::vector<Instruction> tramp = trampoline_for(target, block_size - lead);
        uint32_t at = block.start;
        if (lead)
            patched[at++] = OP_JUMPDEST;
        for (const Instruction& instr : tramp)
        {
            patched[at++] = instr.opcode;
            for (uint8_t b : instr.operand)
                patched[at++] = b;
        }

        TrampolineRecord record;
        record.block_start = block.start;
        record.target = target;
        record.traversal_overhead = 3 + 8;  // PUSH + JUMP there
        if (info.fresh_jumpdest)
            record.traversal_overhead += 1;
        if (info.has_jump_back)
            record.traversal_overhead += 3 + 8;
        result.trampolines.push_back(record);
    }

    patched.insert(patched.end(), padding, 0x00);
    patched.insert(patched.end(), assembled.bytes.begin(), assembled.bytes.end());
    if (patched.size() > deployed_code_cap)
        throw Error{Errc::code_size_cap_exceeded,
            "patched code is " + std::to_string(patched.size()) + " bytes (cap " +
                std::to_string(deployed_code_cap) + ")"};

    for (const auto& [point, inst] : patches)
    {
        PatchNote note;
        note.pc = point.pc;
        note.template_id = inst.id;
        note.block_start = point.block.start;
        note.success_gas_delta = inst.success_gas_delta;
        result.report.push_back(note);
    }

    result.patched_code = std::move(patched);
    result.appended_region_start = appended_start;
    result.size_increase = static_cast<uint32_t>(result.patched_code.size() - code.size());
    return result;
}

}  // namespace evmfix
