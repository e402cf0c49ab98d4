// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/minievm.hpp>

#include <optional>
#include <string>
#include <vector>

namespace evmfix
{
/// Standard Ethereum JSON-RPC 2.0 over HTTP.
struct RpcEndpoint
{
    std::string url;  // e.g. "http://127.0.0.1:8545"
    int timeout_ms = 10000;
    int max_attempts = 3;
    int backoff_ms = 100;
};

struct IngestOptions
{
    std::optional<std::string> cache_dir;  // default: $EVMFIX_CACHE or none
    uint64_t block_range_cap = 4096;
    unsigned max_in_flight = 4;  // concurrent block fetches
};

/// Deployed runtime code at the given block tag ("latest" or a number).
/// Cached on disk keyed by (address, block). Throws Error{rpc_error} after
/// retries are exhausted and Error{empty_code} for empty accounts.
Bytes fetch_code(const RpcEndpoint& endpoint, const Address& address,
    const std::string& block_tag = "latest", const IngestOptions& options = {});

/// External transactions whose recipient is `address`, over the inclusive
/// block range, in block order, normalized to replay fixtures. Throws
/// Error{range_too_large} past the configured cap.
std::vector<TxEnv> fetch_transactions(const RpcEndpoint& endpoint, const Address& address,
    uint64_t from_block, uint64_t to_block, const IngestOptions& options = {});

}  // namespace evmfix
