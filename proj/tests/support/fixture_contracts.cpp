// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include "fixture_contracts.hpp"

#include <evmfix/assembly.hpp>
#include <evmfix/keccak.hpp>

namespace evmfix::fixtures
{
Address addr(uint8_t low_byte)
{
    Address a;
    a.bytes[19] = low_byte;
    return a;
}

Bytes add_program()
{
    return {0x60, 0x01, 0x60, 0x01, 0x01, 0x5b, 0x00};
}

namespace
{
void append_word(Bytes& out, const u256& value)
{
    const Bytes word = word_to_bytes32(value);
    out.insert(out.end(), word.begin(), word.end());
}

uint32_t first_opcode_pc(const Bytes& code, uint8_t opcode)
{
    for (const Instruction& instr : disassemble(code).instructions)
        if (instr.opcode == opcode)
            return instr.offset;
    return 0xffffffff;
}
}  // namespace

Bytes selector_calldata(uint32_t selector)
{
    return {static_cast<uint8_t>(selector >> 24), static_cast<uint8_t>(selector >> 16),
        static_cast<uint8_t>(selector >> 8), static_cast<uint8_t>(selector)};
}

TokenFixture build_token()
{
    TokenFixture token;
    token.contract = addr(0xbe);
    token.selector = function_selector_u32("batchTransfer(address[],uint256)");

    AsmBuilder b;
    const LabelId batch = b.make_label();
    const LabelId loop = b.make_label();
    const LabelId done = b.make_label();
    const LabelId fail = b.make_label();

    // dispatcher
    b.push(0).op(OP_CALLDATALOAD).push(0xe0).op(OP_SHR);
    b.op(OP_DUP1).push(token.selector).op(OP_EQ).push_label(batch).op(OP_JUMPI);
    b.push(0).op(OP_DUP1).op(OP_REVERT);

    b.bind(batch).op(OP_JUMPDEST).op(OP_POP);
    b.push(0x04).op(OP_CALLDATALOAD);  // [cnt]
    b.push(0x24).op(OP_CALLDATALOAD);  // [value, cnt]
    // require cnt > 0 and cnt <= 20
    b.op(OP_DUP2).op(OP_ISZERO).push_label(fail).op(OP_JUMPI);
    b.push(20).op(OP_DUP3).op(OP_GT).push_label(fail).op(OP_JUMPI);
    // amount = cnt * value — the unchecked multiplication under test
    b.op(OP_DUP1).op(OP_DUP3).op(OP_MUL);  // [amount, value, cnt]
    // require value > 0
    b.op(OP_DUP2).op(OP_ISZERO).push_label(fail).op(OP_JUMPI);
    // require balances[caller] >= amount
    b.op(OP_CALLER).op(OP_SLOAD);  // [balance, amount, value, cnt]
    b.op(OP_DUP2).op(OP_DUP2).op(OP_LT).push_label(fail).op(OP_JUMPI);
    // balances[caller] -= amount
    b.op(OP_SUB).op(OP_CALLER).op(OP_SSTORE);  // [value, cnt]
    b.push(0);                                 // [i, value, cnt]
    b.bind(loop).op(OP_JUMPDEST);
    b.op(OP_DUP3).op(OP_DUP2).op(OP_EQ).push_label(done).op(OP_JUMPI);
    b.op(OP_DUP1).push(0x20).op(OP_MUL).push(0x44).op(OP_ADD).op(OP_CALLDATALOAD);
    b.op(OP_DUP1).op(OP_SLOAD);              // [balance_r, recv, i, value, cnt]
    b.op(OP_DUP4).op(OP_ADD);                // [balance_r + value, recv, i, value, cnt]
    b.op(OP_SWAP1).op(OP_SSTORE);            // [i, value, cnt]
    b.push(1).op(OP_ADD);
    b.push_label(loop).op(OP_JUMP);
    b.bind(done).op(OP_JUMPDEST);
    b.op(OP_POP).op(OP_POP).op(OP_POP);
    b.push(1).push(0).op(OP_MSTORE).push(0x20).push(0).op(OP_RETURN);
    b.bind(fail).op(OP_JUMPDEST);
    b.push(0).op(OP_DUP1).op(OP_REVERT);

    token.code = b.assemble(0).bytes;
    token.mul_pc = first_opcode_pc(token.code, OP_MUL);
    return token;
}

Bytes TokenFixture::batch_transfer_calldata(
    const std::vector<Address>& receivers, const u256& value) const
{
    Bytes data = selector_calldata(selector);
    append_word(data, receivers.size());
    append_word(data, value);
    for (const Address& receiver : receivers)
        append_word(data, word_from_address(receiver));
    return data;
}

WalletFixture build_wallet()
{
    WalletFixture wallet;
    wallet.contract = addr(0xaa);
    wallet.sel_init_wallet = function_selector_u32("initWallet(address,uint256)");
    wallet.sel_init_multiowned = function_selector_u32("initMultiowned(address)");
    wallet.sel_init_daylimit = function_selector_u32("initDayLimit(uint256)");
    wallet.sel_owner = function_selector_u32("owner()");

    AsmBuilder b;
    const LabelId fn_wallet = b.make_label();
    const LabelId fn_multi = b.make_label();
    const LabelId fn_daylimit = b.make_label();
    const LabelId fn_owner = b.make_label();
    const LabelId body_multi = b.make_label();
    const LabelId body_daylimit = b.make_label();
    const LabelId ret1 = b.make_label();
    const LabelId ret2 = b.make_label();
    const LabelId ret3 = b.make_label();
    const LabelId ret4 = b.make_label();

    // dispatcher
    b.push(0).op(OP_CALLDATALOAD).push(0xe0).op(OP_SHR);
    b.op(OP_DUP1).push(wallet.sel_init_wallet).op(OP_EQ).push_label(fn_wallet).op(OP_JUMPI);
    b.op(OP_DUP1).push(wallet.sel_init_multiowned).op(OP_EQ).push_label(fn_multi).op(OP_JUMPI);
    b.op(OP_DUP1).push(wallet.sel_init_daylimit).op(OP_EQ).push_label(fn_daylimit).op(OP_JUMPI);
    b.op(OP_DUP1).push(wallet.sel_owner).op(OP_EQ).push_label(fn_owner).op(OP_JUMPI);
    b.push(0).op(OP_DUP1).op(OP_REVERT);

    // initWallet(owner, dayLimit): internal calls into both bodies.
    // Convention: body consumes [arg, return_address] and jumps back.
    b.bind(fn_wallet).op(OP_JUMPDEST).op(OP_POP);
    b.push(0x04).op(OP_CALLDATALOAD);     // [owner]
    b.push_label(ret1).op(OP_SWAP1);      // [owner, ret1]
    b.push_label(body_multi).op(OP_JUMP);
    b.bind(ret1).op(OP_JUMPDEST);
    b.push(0x24).op(OP_CALLDATALOAD);     // [dayLimit]
    b.push_label(ret2).op(OP_SWAP1);      // [dayLimit, ret2]
    b.push_label(body_daylimit).op(OP_JUMP);
    b.bind(ret2).op(OP_JUMPDEST);
    b.op(OP_STOP);

    // initMultiowned(owner), public
    b.bind(fn_multi).op(OP_JUMPDEST).op(OP_POP);
    b.push(0x04).op(OP_CALLDATALOAD);
    b.push_label(ret3).op(OP_SWAP1);
    b.push_label(body_multi).op(OP_JUMP);
    b.bind(ret3).op(OP_JUMPDEST);
    b.op(OP_STOP);

    // initDayLimit(limit), public
    b.bind(fn_daylimit).op(OP_JUMPDEST).op(OP_POP);
    b.push(0x04).op(OP_CALLDATALOAD);
    b.push_label(ret4).op(OP_SWAP1);
    b.push_label(body_daylimit).op(OP_JUMP);
    b.bind(ret4).op(OP_JUMPDEST);
    b.op(OP_STOP);

    // owner() view
    b.bind(fn_owner).op(OP_JUMPDEST).op(OP_POP);
    b.push(1).op(OP_SLOAD).push(0).op(OP_MSTORE).push(0x20).push(0).op(OP_RETURN);

    // internal body: m_owner = arg; m_numOwner = 1
    b.bind(body_multi).op(OP_JUMPDEST);  // [owner, ret]
    b.push(1).op(OP_SSTORE);             // m_owner (slot 1)
    b.push(1).push(0).op(OP_SSTORE);     // m_numOwner (slot 0) = 1
    b.op(OP_JUMP);

    // internal body: m_dayLimit = arg
    b.bind(body_daylimit).op(OP_JUMPDEST);  // [limit, ret]
    b.push(2).op(OP_SSTORE);                // m_dayLimit (slot 2)
    b.op(OP_JUMP);

    wallet.code = b.assemble(0).bytes;
    return wallet;
}

Bytes WalletFixture::init_wallet_calldata(const Address& owner, const u256& day_limit) const
{
    Bytes data = selector_calldata(sel_init_wallet);
    append_word(data, word_from_address(owner));
    append_word(data, day_limit);
    return data;
}

Bytes WalletFixture::one_address_calldata(uint32_t selector, const Address& value) const
{
    Bytes data = selector_calldata(selector);
    append_word(data, word_from_address(value));
    return data;
}

Bytes WalletFixture::one_word_calldata(uint32_t selector, const u256& value) const
{
    Bytes data = selector_calldata(selector);
    append_word(data, value);
    return data;
}

Bytes loop_then_store_program(uint32_t iterations)
{
    AsmBuilder b;
    const LabelId loop = b.make_label();
    b.push(iterations);
    b.bind(loop).op(OP_JUMPDEST);
    b.push(1).op(OP_SWAP1).op(OP_SUB);
    b.op(OP_DUP1).push_label(loop).op(OP_JUMPI);
    b.op(OP_POP);
    b.push(7).push(0).op(OP_SSTORE);
    b.op(OP_STOP);
    return b.assemble(0).bytes;
}

Bytes infinite_loop_program()
{
    return {0x5b, 0x60, 0x00, 0x56};
}

Bytes slot_writer_program()
{
    return {0x60, 0x2a, 0x60, 0x00, 0x55, 0x00};  // PUSH1 42; PUSH1 0; SSTORE; STOP
}

namespace
{
void push_address(AsmBuilder& b, const Address& address)
{
    Bytes operand{address.bytes.begin(), address.bytes.end()};
    b.push(operand);
}
}  // namespace

Bytes delegating_caller_program(const Address& callee)
{
    AsmBuilder b;
    b.push(0).push(0).push(0).push(0);
    push_address(b, callee);
    b.op(OP_GAS).op(OP_DELEGATECALL).op(OP_POP).op(OP_STOP);
    return b.assemble(0).bytes;
}

Bytes call_then_store_program(const Address& callee)
{
    AsmBuilder b;
    b.push(1).push(1).op(OP_SSTORE);  // slot1 = 1
    b.push(0).push(0).push(0).push(0).push(0);
    push_address(b, callee);
    b.op(OP_GAS).op(OP_CALL).op(OP_POP);
    b.push(2).push(2).op(OP_SSTORE);  // slot2 = 2
    b.op(OP_STOP);
    return b.assemble(0).bytes;
}

Bytes store_then_revert_program()
{
    return {0x60, 0x05, 0x60, 0x00, 0x55, 0x60, 0x00, 0x80, 0xfd};
}

WorldState world_with_contract(const Address& contract, const Bytes& code)
{
    WorldState world;
    world.accounts[contract].code = code;
    for (uint8_t i = 1; i <= 8; ++i)
        world.accounts[addr(i)].balance = u256{1} << 96;
    return world;
}

}  // namespace evmfix::fixtures
