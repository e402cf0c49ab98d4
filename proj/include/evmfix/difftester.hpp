// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/minievm.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace evmfix
{
enum class Verdict
{
    identical,
    attack_candidate,
    oog_retried_then_identical,
    behavioral_divergence,
};

const char* verdict_name(Verdict verdict) noexcept;

struct TraceDivergence
{
    size_t index = 0;
    std::optional<TraceEvent> original;  // absent when one trace is shorter
    std::optional<TraceEvent> patched;
};

struct TxVerdict
{
    std::string tx_id;
    Verdict verdict = Verdict::identical;
    bool downstream_of_divergence = false;
    std::optional<TraceDivergence> divergence;
    int64_t original_gas = 0;
    int64_t patched_gas = 0;
    TxStatus original_status = TxStatus::success;
    TxStatus patched_status = TxStatus::success;
    uint32_t patched_region_entries = 0;  // trampoline traversals in the patched run
    std::string note;
};

struct DiffReport
{
    std::vector<TxVerdict> transactions;
    size_t identical_count = 0;
    size_t attack_count = 0;
    size_t oog_retried_count = 0;
    size_t divergence_count = 0;
    // Set when a known attack transaction was NOT classified as
    // attack_candidate: the patch failed to block it.
    bool patch_ineffective = false;
    std::vector<std::string> unblocked_attacks;
};

struct ReplayOptions
{
    // Start of the appended patch region in the patched code; a failing
    // patched run whose fault pc lies at/after it is an attack candidate.
    uint32_t appended_region_start = 0xffffffff;
    bool strict_traces = false;  // include LOG events in the comparison
    VmConfig vm;
};

/// Replays txs against the original and the patched code (same initial
/// world, recipient's code swapped) with independent state threading, and
/// classifies each transaction.
DiffReport replay_pair(const WorldState& world0, const Bytes& original, const Bytes& patched,
    const std::vector<TxEnv>& txs, const std::set<std::string>& known_attacks = {},
    const ReplayOptions& options = {});

/// Positional comparison over state-changing events only. LOG events are
/// filtered out unless strict.
std::optional<TraceDivergence> compare_traces(
    const std::vector<TraceEvent>& a, const std::vector<TraceEvent>& b, bool strict = false);

/// Mean extra gas over transactions that actually entered patched code.
/// Throws Error{no_affected_transactions} when none did.
double gas_overhead(const DiffReport& report);

std::string diff_report_to_json(const DiffReport& report);

}  // namespace evmfix
