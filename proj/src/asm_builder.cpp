// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/asm_builder.hpp>
#include <evmfix/errors.hpp>

namespace evmfix
{
unsigned push_width_for(const u256& value)
{
    return static_cast<unsigned>(word_to_minimal_bytes(value).size());
}

AsmOp AsmOp::push(const u256& value)
{
    Bytes operand = word_to_minimal_bytes(value);
    const uint8_t opcode = push_opcode_for_size(static_cast<unsigned>(operand.size()));
    return {Kind::instruction, opcode, std::move(operand), 0};
}

AsmBuilder& AsmBuilder::bind(LabelId label)
{
    ops_.push_back(AsmOp::bind(label));
    return *this;
}

AsmBuilder& AsmBuilder::op(uint8_t opcode)
{
    ops_.push_back(AsmOp::instr(opcode));
    return *this;
}

AsmBuilder& AsmBuilder::op(uint8_t opcode, Bytes operand)
{
    ops_.push_back(AsmOp::instr(opcode, std::move(operand)));
    return *this;
}

AsmBuilder& AsmBuilder::push(const u256& value)
{
    ops_.push_back(AsmOp::push(value));
    return *this;
}

AsmBuilder& AsmBuilder::push(const Bytes& operand)
{
    ops_.push_back(AsmOp::instr(push_opcode_for_size(static_cast<unsigned>(operand.size())), operand));
    return *this;
}

AsmBuilder& AsmBuilder::push_label(LabelId label)
{
    ops_.push_back(AsmOp::push_label(label));
    return *this;
}

AsmBuilder& AsmBuilder::raw(const Instruction& instruction)
{
    Bytes operand{instruction.operand.begin(),
        instruction.operand.begin() + instruction.operand_bytes_in_code};
    ops_.push_back(AsmOp::instr(instruction.opcode, std::move(operand)));
    return *this;
}

LabelId AsmBuilder::append_relabeled(const std::vector<AsmOp>& ops, uint32_t label_count)
{
    const LabelId base = next_label_;
    next_label_ += label_count;
    for (AsmOp op : ops)
    {
        if (op.kind != AsmOp::Kind::instruction)
        {
            if (op.label >= label_count)
                throw Error{Errc::bad_config, "template op references label out of range"};
            op.label += base;
        }
        ops_.push_back(std::move(op));
    }
    return base;
}

AssembledCode AsmBuilder::assemble(uint32_t base_offset) const
{
    // Start every label push at width 1 and grow to a fixed point. Widths
    // only grow, so this terminates.
    std::map<LabelId, unsigned> widths;
    for (const auto& op : ops_)
        if (op.kind == AsmOp::Kind::push_label)
            widths.try_emplace(op.label, 1);

    std::map<LabelId, uint32_t> addresses;
    for (bool changed = true; changed;)
    {
        changed = false;
        addresses.clear();
        uint32_t offset = base_offset;
        for (const auto& op : ops_)
        {
            switch (op.kind)
            {
            case AsmOp::Kind::label:
                addresses[op.label] = offset;
                break;
            case AsmOp::Kind::push_label:
                offset += 1 + widths.at(op.label);
                break;
            case AsmOp::Kind::instruction:
                offset += 1 + static_cast<uint32_t>(op.operand.size());
                break;
            }
        }
        for (auto& [label, width] : widths)
        {
            const auto it = addresses.find(label);
            if (it == addresses.end())
                throw Error{Errc::bad_config, "unbound label in assembly stream"};
            const unsigned needed = push_width_for(it->second);
            if (needed > width)
            {
                width = needed;
                changed = true;
            }
        }
    }

    AssembledCode out;
    out.label_addresses = addresses;
    for (const auto& op : ops_)
    {
        switch (op.kind)
        {
        case AsmOp::Kind::label:
            break;
        case AsmOp::Kind::push_label:
        {
            const unsigned width = widths.at(op.label);
            Bytes operand = word_to_minimal_bytes(addresses.at(op.label));
            operand.insert(operand.begin(), width - operand.size(), 0x00);
            out.bytes.push_back(push_opcode_for_size(width));
            out.bytes.insert(out.bytes.end(), operand.begin(), operand.end());
            break;
        }
        case AsmOp::Kind::instruction:
            out.bytes.push_back(op.opcode);
            out.bytes.insert(out.bytes.end(), op.operand.begin(), op.operand.end());
            break;
        }
    }
    return out;
}

}  // namespace evmfix
