// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
//
// evmfix — patch EVM contracts with trampoline instrumentation, validate
// patches by differential transaction replay, and package the result for
// delegatecall-proxy deployment.

#include <evmfix/assembly.hpp>
#include <evmfix/cfg.hpp>
#include <evmfix/deploy.hpp>
#include <evmfix/difftester.hpp>
#include <evmfix/errors.hpp>
#include <evmfix/fixtures.hpp>
#include <evmfix/ingest.hpp>
#include <evmfix/rewriter.hpp>
#include <evmfix/templates.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

using namespace evmfix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{
std::string read_text(const std::string& path)
{
    const Bytes raw = read_file(path);
    return std::string{raw.begin(), raw.end()};
}

std::set<std::string> load_attack_ids(const std::string& path)
{
    json doc = json::parse(read_text(path));
    std::set<std::string> ids;
    const json& list = doc.is_array() ? doc : doc.at("attacks");
    for (const auto& item : list)
        ids.insert(item.get<std::string>());
    return ids;
}

std::set<uint32_t> load_blacklist(const std::string& path)
{
    json doc = json::parse(read_text(path));
    std::set<uint32_t> pcs;
    const json& list = doc.is_array() ? doc : doc.at("blacklist");
    for (const auto& item : list)
        pcs.insert(item.get<uint32_t>());
    return pcs;
}

json patch_summary_json(const RewriteResult& result, const PatchPlan& plan)
{
    json doc;
    doc["schema"] = "evmfix-patch-summary/1";
    doc["appended_region_start"] = result.appended_region_start;
    doc["size_increase"] = result.size_increase;
    json trampolines = json::array();
    for (const auto& tramp : result.trampolines)
    {
        json item;
        item["block_start"] = tramp.block_start;
        item["target"] = tramp.target;
        item["traversal_gas_overhead"] = tramp.traversal_overhead;
        trampolines.push_back(std::move(item));
    }
    doc["trampolines"] = std::move(trampolines);
    json patches = json::array();
    for (const auto& note : result.report)
    {
        json item;
        item["pc"] = note.pc;
        item["template"] = note.template_id;
        item["block_start"] = note.block_start;
        item["success_gas_delta"] = note.success_gas_delta;
        patches.push_back(std::move(item));
    }
    doc["patches"] = std::move(patches);
    doc["warnings"] = plan.warnings;
    doc["skipped_pcs"] = plan.skipped_pcs;
    return doc;
}

struct PatchInputs
{
    std::string code_path;
    std::string report_path;
    std::string dsl_path;
    std::string slots_path;
    std::string template_dir;
    std::string blacklist_path;
};

struct PatchArtifacts
{
    Bytes original;
    RewriteResult result;
    PatchPlan plan;
};

PatchArtifacts run_patch_stage(const PatchInputs& in)
{
    PatchArtifacts out;
    out.original = read_code_file(in.code_path);

    std::string dsl_path = in.dsl_path;
    std::string slots_path = in.slots_path;
    if (!in.template_dir.empty())
    {
        // A template directory bundles a DSL file and a name map.
        if (dsl_path.empty() && fs::exists(fs::path{in.template_dir} / "patch.dsl"))
            dsl_path = (fs::path{in.template_dir} / "patch.dsl").string();
        if (slots_path.empty() && fs::exists(fs::path{in.template_dir} / "slots.json"))
            slots_path = (fs::path{in.template_dir} / "slots.json").string();
    }

    VulnerabilityReport report;
    if (!in.report_path.empty())
        report = parse_vulnerability_report(read_text(in.report_path));
    NameMap names;
    if (!slots_path.empty())
        names = parse_name_map(read_text(slots_path));
    std::optional<PatchDslFile> dsl;
    if (!dsl_path.empty())
        dsl = parse_patch_dsl(read_text(dsl_path), names);
    std::set<uint32_t> blacklist;
    if (!in.blacklist_path.empty())
        blacklist = load_blacklist(in.blacklist_path);

    const Program program = disassemble(out.original);
    const JumpdestSet jumpdests = jumpdest_analysis(out.original);
    const PartialCfg cfg = recover_blocks(program, jumpdests);

    out.plan = build_patch_plan(report, program, cfg, dsl, names, blacklist);
    out.result = rewrite(out.original, out.plan.patches);
    return out;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"EVM bytecode patching toolkit"};
    app.require_subcommand(1);
    bool json_output = false;
    app.add_flag("--json", json_output, "machine-readable output");

    // disasm
    auto* disasm_cmd = app.add_subcommand("disasm", "decode bytecode");
    std::string disasm_code, disasm_out;
    bool disasm_blocks = false, disasm_dot = false;
    disasm_cmd->add_option("--code", disasm_code, "bytecode file (hex or raw)")->required();
    disasm_cmd->add_option("--out", disasm_out, "output file (default stdout)");
    disasm_cmd->add_flag("--blocks", disasm_blocks, "dump basic blocks instead");
    disasm_cmd->add_flag("--dot", disasm_dot, "dump the partial CFG as DOT");

    // patch
    auto* patch_cmd = app.add_subcommand("patch", "rewrite a contract from a report");
    PatchInputs patch_in;
    std::string patch_out, patch_summary;
    patch_cmd->add_option("--code", patch_in.code_path, "bytecode file")->required();
    patch_cmd->add_option("--report", patch_in.report_path, "vulnerability report JSON");
    patch_cmd->add_option("--dsl", patch_in.dsl_path, "patch DSL file");
    patch_cmd->add_option("--slots", patch_in.slots_path, "name map JSON");
    patch_cmd->add_option("--template-dir", patch_in.template_dir,
        "directory with patch.dsl / slots.json");
    patch_cmd->add_option("--blacklist", patch_in.blacklist_path, "JSON list of pcs to skip");
    patch_cmd->add_option("--out", patch_out, "patched bytecode output (hex)")->required();
    patch_cmd->add_option("--json-summary", patch_summary, "rewrite summary JSON");

    // test
    auto* test_cmd = app.add_subcommand("test", "differential replay original vs patched");
    std::string test_world, test_original, test_patched, test_txs, test_attacks, test_report;
    std::string test_patch_summary;
    uint32_t test_appended_start = 0xffffffff;
    bool strict_traces = false;
    uint64_t step_limit = uint64_t{1} << 24;
    test_cmd->add_option("--world", test_world, "world fixture JSON")->required();
    test_cmd->add_option("--original", test_original, "original bytecode")->required();
    test_cmd->add_option("--patched", test_patched, "patched bytecode")->required();
    test_cmd->add_option("--txs", test_txs, "transaction fixture JSON")->required();
    test_cmd->add_option("--attacks", test_attacks, "known attack tx ids JSON");
    test_cmd->add_option("--patch-summary", test_patch_summary,
        "patch summary JSON (provides the appended region start)");
    test_cmd->add_option("--appended-start", test_appended_start,
        "appended region start (overrides --patch-summary)");
    test_cmd->add_flag("--strict-traces", strict_traces, "include LOG events in comparison");
    test_cmd->add_option("--step-limit", step_limit, "unlimited-gas instruction ceiling");
    test_cmd->add_option("--report", test_report, "diff report output JSON")->required();

    // deploy-plan
    auto* deploy_cmd = app.add_subcommand("deploy-plan", "emit a proxy deployment bundle");
    std::string deploy_logic, deploy_owner, deploy_out;
    std::string deploy_proxy_addr = "0x1000000000000000000000000000000000000001";
    std::string deploy_logic_addr = "0x1000000000000000000000000000000000000002";
    deploy_cmd->add_option("--logic", deploy_logic, "logic runtime bytecode")->required();
    deploy_cmd->add_option("--owner", deploy_owner, "upgrade owner address")->required();
    deploy_cmd->add_option("--proxy-address", deploy_proxy_addr, "proxy account address");
    deploy_cmd->add_option("--logic-address", deploy_logic_addr, "logic account address");
    deploy_cmd->add_option("--out", deploy_out, "bundle JSON output")->required();

    // fetch
    auto* fetch_cmd = app.add_subcommand("fetch", "fetch code/txs over JSON-RPC");
    std::string fetch_rpc, fetch_address, fetch_out, fetch_cache, fetch_code_out;
    uint64_t fetch_from = 0, fetch_to = 0;
    fetch_cmd->add_option("--rpc", fetch_rpc, "endpoint URL")->required();
    fetch_cmd->add_option("--address", fetch_address, "contract address")->required();
    fetch_cmd->add_option("--from", fetch_from, "first block")->required();
    fetch_cmd->add_option("--to", fetch_to, "last block")->required();
    fetch_cmd->add_option("--out", fetch_out, "transaction fixture output")->required();
    fetch_cmd->add_option("--code-out", fetch_code_out, "also fetch code to this file");
    fetch_cmd->add_option("--cache", fetch_cache, "cache directory");

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "patch, test, and plan deployment");
    std::string pipe_config;
    PatchInputs pipe_in;
    std::string pipe_world, pipe_txs, pipe_attacks, pipe_outdir = "evmfix-out", pipe_owner;
    std::string pipe_fork = "petersburg";
    bool pipe_strict = false;
    pipe_cmd->add_option("--config", pipe_config, "pipeline config JSON");
    pipe_cmd->add_option("--code", pipe_in.code_path, "bytecode file");
    pipe_cmd->add_option("--report", pipe_in.report_path, "vulnerability report JSON");
    pipe_cmd->add_option("--dsl", pipe_in.dsl_path, "patch DSL file");
    pipe_cmd->add_option("--slots", pipe_in.slots_path, "name map JSON");
    pipe_cmd->add_option("--blacklist", pipe_in.blacklist_path, "pcs to skip");
    pipe_cmd->add_option("--world", pipe_world, "world fixture JSON");
    pipe_cmd->add_option("--txs", pipe_txs, "transaction fixture JSON");
    pipe_cmd->add_option("--attacks", pipe_attacks, "known attack ids JSON");
    pipe_cmd->add_option("--owner", pipe_owner, "proxy owner address");
    pipe_cmd->add_option("--out-dir", pipe_outdir, "artifact directory");
    pipe_cmd->add_option("--gas-fork", pipe_fork, "gas schedule fork id");
    pipe_cmd->add_flag("--strict-traces", pipe_strict, "include LOG events in comparison");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*disasm_cmd)
        {
            const Bytes code = read_code_file(disasm_code);
            const Program program = disassemble(code);
            std::string text;
            if (disasm_blocks || disasm_dot)
            {
                const PartialCfg cfg = recover_blocks(program, jumpdest_analysis(code));
                text = disasm_dot ? to_dot(cfg) : format_blocks(cfg);
            }
            else if (json_output)
            {
                json lines = json::array();
                for (const auto& instr : program.instructions)
                {
                    json item;
                    item["offset"] = instr.offset;
                    item["opcode"] = instr.opcode;
                    item["mnemonic"] = instr.mnemonic();
                    if (!instr.operand.empty())
                        item["operand"] = to_hex(instr.operand);
                    if (instr.truncated)
                        item["truncated"] = true;
                    lines.push_back(std::move(item));
                }
                text = lines.dump(2) + "\n";
            }
            else
            {
                text = format_disassembly(program);
            }
            if (disasm_out.empty())
                std::cout << text;
            else
                write_file_atomic(disasm_out, text);
            return 0;
        }

        if (*patch_cmd)
        {
            const PatchArtifacts artifacts = run_patch_stage(patch_in);
            write_file_atomic(patch_out, to_hex(artifacts.result.patched_code) + "\n");
            const json summary = patch_summary_json(artifacts.result, artifacts.plan);
            if (!patch_summary.empty())
                write_file_atomic(patch_summary, summary.dump(2) + "\n");
            if (json_output)
                std::cout << summary.dump(2) << "\n";
            else
            {
                std::cout << "patched " << artifacts.result.report.size() << " site(s), +"
                          << artifacts.result.size_increase << " bytes, appended region at 0x"
                          << std::hex << artifacts.result.appended_region_start << std::dec
                          << "\n";
                for (const auto& warning : artifacts.plan.warnings)
                    std::cout << "warning: " << warning << "\n";
            }
            return 0;
        }

        if (*test_cmd)
        {
            const WorldState world = world_from_json(read_text(test_world));
            const Bytes original = read_code_file(test_original);
            const Bytes patched = read_code_file(test_patched);
            const std::vector<TxEnv> txs = transactions_from_json(read_text(test_txs));
            std::set<std::string> attacks;
            if (!test_attacks.empty())
                attacks = load_attack_ids(test_attacks);

            ReplayOptions options;
            options.strict_traces = strict_traces;
            options.vm.step_limit = step_limit;
            if (test_appended_start != 0xffffffff)
                options.appended_region_start = test_appended_start;
            else if (!test_patch_summary.empty())
            {
                const json summary = json::parse(read_text(test_patch_summary));
                options.appended_region_start = summary.at("appended_region_start").get<uint32_t>();
            }
            else
                options.appended_region_start = static_cast<uint32_t>(original.size());

            const DiffReport report = replay_pair(world, original, patched, txs, attacks, options);
            write_file_atomic(test_report, diff_report_to_json(report) + "\n");
            if (json_output)
                std::cout << diff_report_to_json(report) << "\n";
            else
                std::cout << report.identical_count << " identical, " << report.attack_count
                          << " attack candidate(s), " << report.oog_retried_count
                          << " oog-retried, " << report.divergence_count << " divergence(s)\n";
            if (report.divergence_count > 0 || report.patch_ineffective)
                return 1;
            return 0;
        }

        if (*deploy_cmd)
        {
            ProxyConfig config;
            config.owner = address_from_hex(deploy_owner);
            const Bytes logic = read_code_file(deploy_logic);
            const DeploymentBundle bundle = make_bundle(logic, config,
                address_from_hex(deploy_proxy_addr), address_from_hex(deploy_logic_addr));
            write_file_atomic(deploy_out, bundle_to_json(bundle) + "\n");
            if (json_output)
                std::cout << bundle_to_json(bundle) << "\n";
            else
                std::cout << "bundle written to " << deploy_out << " (cost estimate "
                          << bundle.cost_estimate << " gas)\n";
            return 0;
        }

        if (*fetch_cmd)
        {
            RpcEndpoint endpoint;
            endpoint.url = fetch_rpc;
            IngestOptions options;
            if (!fetch_cache.empty())
                options.cache_dir = fetch_cache;
            const Address address = address_from_hex(fetch_address);
            const std::vector<TxEnv> txs =
                fetch_transactions(endpoint, address, fetch_from, fetch_to, options);
            write_file_atomic(fetch_out, transactions_to_json(txs) + "\n");
            if (!fetch_code_out.empty())
            {
                const Bytes code = fetch_code(endpoint, address, "latest", options);
                write_file_atomic(fetch_code_out, to_hex(code) + "\n");
            }
            std::cout << "fetched " << txs.size() << " transaction(s)\n";
            return 0;
        }

        if (*pipe_cmd)
        {
            if (!pipe_config.empty())
            {
                const json config = json::parse(read_text(pipe_config));
                const auto fill = [&](const char* key, std::string& slot) {
                    if (slot.empty() && config.contains(key))
                        slot = config[key].get<std::string>();
                };
                fill("code", pipe_in.code_path);
                fill("report", pipe_in.report_path);
                fill("dsl", pipe_in.dsl_path);
                fill("slots", pipe_in.slots_path);
                fill("blacklist", pipe_in.blacklist_path);
                fill("world", pipe_world);
                fill("txs", pipe_txs);
                fill("attacks", pipe_attacks);
                fill("owner", pipe_owner);
                fill("out_dir", pipe_outdir);
                fill("gas_fork", pipe_fork);
                if (config.value("strict_traces", false))
                    pipe_strict = true;
            }
            if (pipe_in.code_path.empty() || pipe_world.empty() || pipe_txs.empty())
                throw Error{Errc::bad_config, "pipeline needs --code, --world, and --txs"};
            GasSchedule::for_fork(pipe_fork);  // validate the fork id

            fs::create_directories(pipe_outdir);
            const PatchArtifacts artifacts = run_patch_stage(pipe_in);
            const std::string patched_path = (fs::path{pipe_outdir} / "patched.hex").string();
            write_file_atomic(patched_path, to_hex(artifacts.result.patched_code) + "\n");
            const json summary = patch_summary_json(artifacts.result, artifacts.plan);
            write_file_atomic((fs::path{pipe_outdir} / "patch-summary.json").string(),
                summary.dump(2) + "\n");

            const WorldState world = world_from_json(read_text(pipe_world));
            const std::vector<TxEnv> txs = transactions_from_json(read_text(pipe_txs));
            std::set<std::string> attacks;
            if (!pipe_attacks.empty())
                attacks = load_attack_ids(pipe_attacks);
            ReplayOptions options;
            options.strict_traces = pipe_strict;
            options.appended_region_start = artifacts.result.appended_region_start;
            const DiffReport report = replay_pair(
                world, artifacts.original, artifacts.result.patched_code, txs, attacks, options);
            write_file_atomic((fs::path{pipe_outdir} / "diff-report.json").string(),
                diff_report_to_json(report) + "\n");

            json status;
            status["schema"] = "evmfix-pipeline-status/1";
            status["patched"] = true;
            status["divergences"] = report.divergence_count;
            status["attack_candidates"] = report.attack_count;
            status["patch_ineffective"] = report.patch_ineffective;
            status["unblocked_attacks"] = report.unblocked_attacks;

            if (!pipe_owner.empty())
            {
                ProxyConfig config;
                config.owner = address_from_hex(pipe_owner);
                const DeploymentBundle bundle = make_bundle(artifacts.result.patched_code,
                    config, address_from_hex("0x1000000000000000000000000000000000000001"),
                    address_from_hex("0x1000000000000000000000000000000000000002"));
                write_file_atomic(
                    (fs::path{pipe_outdir} / "bundle.json").string(), bundle_to_json(bundle) + "\n");
                status["bundle"] = true;
            }

            const bool ok = report.divergence_count == 0 && !report.patch_ineffective;
            status["ok"] = ok;
            write_file_atomic(
                (fs::path{pipe_outdir} / "status.json").string(), status.dump(2) + "\n");
            std::cout << status.dump(2) << "\n";
            return ok ? 0 : 1;
        }
    }
    catch (const Error& e)
    {
        json failure;
        failure["error"] = errc_name(e.code());
        failure["message"] = e.what();
        if (json_output)
            std::cerr << failure.dump() << "\n";
        else
            std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
    return 0;
}
