// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/asm_builder.hpp>
#include <evmfix/minievm.hpp>

#include <map>
#include <vector>

namespace evmfix::fixtures
{
Address addr(uint8_t low_byte);

/// PUSH1 1; PUSH1 1; ADD; JUMPDEST; STOP — the two-constant add program used
/// across the gas and rewrite tests.
Bytes add_program();

/// Token with a `batchTransfer(address[],uint256)`-style entry point whose
/// amount computation multiplies unchecked. Simplified ABI: word0 = count,
/// word1 = value, words 2.. = receiver addresses. Balances live at
/// storage[address].
struct TokenFixture
{
    Bytes code;
    Address contract;
    uint32_t selector = 0;
    uint32_t mul_pc = 0;  // the vulnerable MUL

    Bytes batch_transfer_calldata(const std::vector<Address>& receivers, const u256& value) const;
};

TokenFixture build_token();

/// Multi-owner-wallet shape: initWallet(address,uint256) internally calls
/// the bodies of initMultiowned(address) and initDayLimit(uint256), all
/// three are public, and nothing guards re-initialization. owner() returns
/// the stored owner. Storage: slot 0 = m_numOwner, 1 = m_owner,
/// 2 = m_dayLimit.
struct WalletFixture
{
    Bytes code;
    Address contract;
    uint32_t sel_init_wallet = 0;
    uint32_t sel_init_multiowned = 0;
    uint32_t sel_init_daylimit = 0;
    uint32_t sel_owner = 0;

    Bytes init_wallet_calldata(const Address& owner, const u256& day_limit) const;
    Bytes one_address_calldata(uint32_t selector, const Address& value) const;
    Bytes one_word_calldata(uint32_t selector, const u256& value) const;
};

WalletFixture build_wallet();

/// Burns ~26 gas per iteration, then stores to slot 0.
Bytes loop_then_store_program(uint32_t iterations);
Bytes infinite_loop_program();

/// Callee that writes 0x2a to slot 0 of whatever storage context runs it.
Bytes slot_writer_program();
/// Caller that DELEGATECALLs the given address and stops.
Bytes delegating_caller_program(const Address& callee);
/// Writes slot1=1, CALLs `callee` (ignoring the result), writes slot2=2.
Bytes call_then_store_program(const Address& callee);
/// Writes slot 0 = 5 and then reverts.
Bytes store_then_revert_program();

/// World containing one contract account plus funded senders.
WorldState world_with_contract(const Address& contract, const Bytes& code);

Bytes selector_calldata(uint32_t selector);

}  // namespace evmfix::fixtures
