// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/difftester.hpp>
#include <evmfix/errors.hpp>

#include <json.hpp>

#include <future>

namespace evmfix
{
using nlohmann::json;

const char* verdict_name(Verdict verdict) noexcept
{
    switch (verdict)
    {
    case Verdict::identical:
        return "identical";
    case Verdict::attack_candidate:
        return "attack_candidate";
    case Verdict::oog_retried_then_identical:
        return "oog_retried_then_identical";
    case Verdict::behavioral_divergence:
        return "behavioral_divergence";
    }
    return "?";
}

namespace
{
std::vector<TraceEvent> state_changing_only(const std::vector<TraceEvent>& trace, bool strict)
{
    std::vector<TraceEvent> out;
    out.reserve(trace.size());
    for (const TraceEvent& event : trace)
        if (strict || event.kind != TraceKind::log)
            out.push_back(event);
    return out;
}

bool storage_equal(const WorldState& a, const WorldState& b, const Address& contract)
{
    const Account* left = a.find(contract);
    const Account* right = b.find(contract);
    const std::map<u256, u256> empty;
    const auto& ls = left ? left->storage : empty;
    const auto& rs = right ? right->storage : empty;
    return ls == rs;
}
}  // namespace

std::optional<TraceDivergence> compare_traces(
    const std::vector<TraceEvent>& a, const std::vector<TraceEvent>& b, bool strict)
{
    const std::vector<TraceEvent> left = state_changing_only(a, strict);
    const std::vector<TraceEvent> right = state_changing_only(b, strict);
    const size_t common = std::min(left.size(), right.size());
    for (size_t i = 0; i < common; ++i)
    {
        if (!(left[i] == right[i]))
            return TraceDivergence{i, left[i], right[i]};
    }
    if (left.size() != right.size())
    {
        TraceDivergence div;
        div.index = common;
        if (common < left.size())
            div.original = left[common];
        if (common < right.size())
            div.patched = right[common];
        return div;
    }
    return std::nullopt;
}

DiffReport replay_pair(const WorldState& world0, const Bytes& original, const Bytes& patched,
    const std::vector<TxEnv>& txs, const std::set<std::string>& known_attacks,
    const ReplayOptions& options)
{
    DiffReport report;
    if (txs.empty())
        return report;

    // The contract under test is the (unique) recipient of the corpus.
    if (!txs.front().recipient)
        throw Error{Errc::fixture_mismatch, "replay transactions must have a recipient"};
    const Address contract = *txs.front().recipient;
    for (const TxEnv& tx : txs)
        if (!tx.recipient || !(*tx.recipient == contract))
            throw Error{Errc::fixture_mismatch,
                "transaction " + tx.id + " does not target the contract under test"};

    WorldState world_original = world0;
    WorldState world_patched = world0;
    world_original.get_or_create(contract).code = original;
    world_patched.get_or_create(contract).code = patched;

    const WatchRegion watch{options.appended_region_start, 0xffffffff};

    bool diverged = false;
    for (const TxEnv& tx : txs)
    {
        TxEnv tx_original = tx;
        TxEnv tx_patched = tx;
        tx_patched.watch = watch;

        // The two replays are independent; run them concurrently.
        auto original_future = std::async(std::launch::async,
            [&] { return execute(world_original, tx_original, options.vm); });
        auto [next_patched, receipt_patched] = execute(world_patched, tx_patched, options.vm);
        auto [next_original, receipt_original] = original_future.get();

        TxVerdict verdict;
        verdict.tx_id = tx.id;
        verdict.original_gas = receipt_original.gas_used;
        verdict.patched_gas = receipt_patched.gas_used;
        verdict.original_status = receipt_original.status;
        verdict.patched_status = receipt_patched.status;
        verdict.patched_region_entries = receipt_patched.watch_entries;

        auto divergence =
            compare_traces(receipt_original.trace, receipt_patched.trace, options.strict_traces);
        const bool statuses_match = receipt_original.status == receipt_patched.status;
        const bool storages_match = storage_equal(next_original, next_patched, contract);

        if (!divergence && statuses_match && storages_match)
        {
            verdict.verdict = Verdict::identical;
        }
        else if (receipt_patched.status != TxStatus::success && receipt_patched.fault &&
                 receipt_patched.fault->code_address == contract &&
                 receipt_patched.fault->pc >= options.appended_region_start)
        {
            // Failed inside code the patch appended.
            verdict.verdict = Verdict::attack_candidate;
            verdict.note = "patched run aborted in patch code at pc " +
                           std::to_string(receipt_patched.fault->pc);
        }
        else if (receipt_patched.status == TxStatus::out_of_gas &&
                 receipt_original.status != TxStatus::out_of_gas)
        {
            // Retry with gas accounting disabled; patch overhead may push a
            // tight gas budget over the edge without changing behavior.
            auto [retry_world, retry_receipt] =
                execute_with_unlimited_gas(world_patched, tx_patched, options.vm);
            auto retry_divergence = compare_traces(
                receipt_original.trace, retry_receipt.trace, options.strict_traces);
            if (!retry_divergence && receipt_original.status == retry_receipt.status &&
                storage_equal(next_original, retry_world, contract))
            {
                verdict.verdict = Verdict::oog_retried_then_identical;
                verdict.note = "identical after out-of-gas retry; senders must budget extra gas";
                verdict.patched_gas = retry_receipt.gas_used;
                verdict.patched_region_entries = retry_receipt.watch_entries;
                next_patched = std::move(retry_world);
                receipt_patched = std::move(retry_receipt);
            }
            else
            {
                verdict.verdict = Verdict::behavioral_divergence;
                verdict.divergence = retry_divergence;
            }
        }
        else
        {
            verdict.verdict = Verdict::behavioral_divergence;
            verdict.divergence = divergence;
        }

        if (diverged)
            verdict.downstream_of_divergence = true;
        if (verdict.verdict == Verdict::attack_candidate ||
            verdict.verdict == Verdict::behavioral_divergence)
            diverged = true;

        switch (verdict.verdict)
        {
        case Verdict::identical:
            ++report.identical_count;
            break;
        case Verdict::attack_candidate:
            ++report.attack_count;
            break;
        case Verdict::oog_retried_then_identical:
            ++report.oog_retried_count;
            break;
        case Verdict::behavioral_divergence:
            ++report.divergence_count;
            break;
        }

        if (known_attacks.count(tx.id) && verdict.verdict != Verdict::attack_candidate)
        {
            report.patch_ineffective = true;
            report.unblocked_attacks.push_back(tx.id);
        }

        report.transactions.push_back(std::move(verdict));

        // State threading: each run's post-state feeds its own next tx.
        world_original = std::move(next_original);
        world_patched = std::move(next_patched);
    }
    return report;
}

double gas_overhead(const DiffReport& report)
{
    int64_t total = 0;
    size_t affected = 0;
    for (const TxVerdict& tx : report.transactions)
    {
        if (tx.patched_region_entries == 0)
            continue;  // never reached patched code
        total += tx.patched_gas - tx.original_gas;
        ++affected;
    }
    if (affected == 0)
        throw Error{Errc::no_affected_transactions, "no transaction entered patched code"};
    return static_cast<double>(total) / static_cast<double>(affected);
}

std::string diff_report_to_json(const DiffReport& report)
{
    json doc;
    doc["schema"] = "evmfix-diff-report/1";
    json txs = json::array();
    for (const TxVerdict& tx : report.transactions)
    {
        json item;
        item["id"] = tx.tx_id;
        item["verdict"] = verdict_name(tx.verdict);
        item["original_status"] = tx_status_name(tx.original_status);
        item["patched_status"] = tx_status_name(tx.patched_status);
        item["original_gas"] = tx.original_gas;
        item["patched_gas"] = tx.patched_gas;
        item["patched_region_entries"] = tx.patched_region_entries;
        if (tx.downstream_of_divergence)
            item["downstream_of_divergence"] = true;
        if (!tx.note.empty())
            item["note"] = tx.note;
        if (tx.divergence)
        {
            json div;
            div["index"] = tx.divergence->index;
            const auto event_json = [](const TraceEvent& e) {
                json out;
                out["kind"] = trace_kind_name(e.kind);
                out["context"] = to_hex(e.context);
                out["key"] = word_to_hex(e.key);
                out["value"] = word_to_hex(e.value);
                out["target"] = to_hex(e.target);
                out["success"] = e.success;
                return out;
            };
            if (tx.divergence->original)
                div["original"] = event_json(*tx.divergence->original);
            if (tx.divergence->patched)
                div["patched"] = event_json(*tx.divergence->patched);
            item["first_divergence"] = std::move(div);
        }
        txs.push_back(std::move(item));
    }
    doc["transactions"] = std::move(txs);
    doc["identical"] = report.identical_count;
    doc["attack_candidates"] = report.attack_count;
    doc["oog_retried"] = report.oog_retried_count;
    doc["behavioral_divergences"] = report.divergence_count;
    doc["patch_ineffective"] = report.patch_ineffective;
    if (!report.unblocked_attacks.empty())
        doc["unblocked_attacks"] = report.unblocked_attacks;
    try
    {
        doc["mean_gas_overhead"] = gas_overhead(report);
    }
    catch (const Error&)
    {
        doc["mean_gas_overhead"] = nullptr;
    }
    return doc.dump(2);
}

}  // namespace evmfix
