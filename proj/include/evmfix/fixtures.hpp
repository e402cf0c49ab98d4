// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/minievm.hpp>

#include <string>
#include <vector>

namespace evmfix
{
// Fixture JSON:
//   {
//     "accounts": {
//       "0xaddr": {"balance": "0x0", "code": "0x...", "nonce": 0,
//                   "storage": {"0xkey": "0xvalue"}}
//     },
//     "block": {"number": 1, "timestamp": 0, ...},      // optional
//     "transactions": [
//       {"from": "0x..", "to": "0x..", "data": "0x..", "value": "0x0",
//        "gas": 100000, "id": "tx-0"}
//     ]
//   }
// Worlds and transaction lists may live in the same file or separate ones.

WorldState world_from_json(const std::string& json_text);
std::string world_to_json(const WorldState& world);

std::vector<TxEnv> transactions_from_json(const std::string& json_text);
std::string transactions_to_json(const std::vector<TxEnv>& txs);

/// One TraceEvent per line (JSON lines).
std::string trace_to_json_lines(const std::vector<TraceEvent>& trace);

}  // namespace evmfix
