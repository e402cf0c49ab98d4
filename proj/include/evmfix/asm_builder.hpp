// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/assembly.hpp>
#include <evmfix/word.hpp>

#include <map>
#include <vector>

namespace evmfix
{
using LabelId = uint32_t;

/// One unit of a code stream under construction: a concrete instruction, a
/// push whose operand is a label address (width picked at layout time), or a
/// label binding.
struct AsmOp
{
    enum class Kind
    {
        instruction,
        push_label,
        label,
    };

    Kind kind = Kind::instruction;
    uint8_t opcode = 0;
    Bytes operand;
    LabelId label = 0;

    static AsmOp instr(uint8_t opcode) { return {Kind::instruction, opcode, {}, 0}; }
    static AsmOp instr(uint8_t opcode, Bytes operand)
    {
        return {Kind::instruction, opcode, std::move(operand), 0};
    }
    static AsmOp push(const u256& value);  // minimal-width PUSH
    static AsmOp push_label(LabelId label) { return {Kind::push_label, 0, {}, label}; }
    static AsmOp bind(LabelId label) { return {Kind::label, 0, {}, label}; }
};

struct AssembledCode
{
    Bytes bytes;
    std::map<LabelId, uint32_t> label_addresses;  // absolute (base included)
};

/// Assembles an op stream at a base address. Label pushes get the minimal
/// width that fits the resolved address; widths are grown to a fixed point
/// since growing one push can move later labels.
class AsmBuilder
{
public:
    LabelId make_label() { return next_label_++; }

    AsmBuilder& bind(LabelId label);
    AsmBuilder& op(uint8_t opcode);
    AsmBuilder& op(uint8_t opcode, Bytes operand);
    AsmBuilder& push(const u256& value);
    AsmBuilder& push(const Bytes& operand);  // explicit width
    AsmBuilder& push_label(LabelId label);
    AsmBuilder& raw(const Instruction& instruction);

    /// Splices ops whose labels are numbered 0..label_count-1 into this
    /// stream, remapping them to fresh labels. Returns the remap base.
    LabelId append_relabeled(const std::vector<AsmOp>& ops, uint32_t label_count);

    const std::vector<AsmOp>& ops() const { return ops_; }
    bool empty() const { return ops_.empty(); }

    AssembledCode assemble(uint32_t base_offset) const;

private:
    std::vector<AsmOp> ops_;
    LabelId next_label_ = 0;
};

/// Byte length of `PUSHk value` with minimal k.
unsigned push_width_for(const u256& value);

}  // namespace evmfix
