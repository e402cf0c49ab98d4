// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <evmfix/asm_builder.hpp>
#include <evmfix/cfg.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace evmfix
{
enum class VulnKind
{
    int_add_overflow,
    int_sub_underflow,
    int_mul_overflow,
    access_control,
};

const char* vuln_kind_name(VulnKind kind) noexcept;
/// Throws Error{unsupported_vulnerability_class} for names outside the
/// closed set (that case must surface to the operator).
VulnKind vuln_kind_from_name(std::string_view name);

struct ReportEntry
{
    uint32_t pc = 0;
    VulnKind kind = VulnKind::int_add_overflow;
    std::optional<std::array<uint8_t, 4>> selector;
    std::string note;
};

struct VulnerabilityReport
{
    std::string contract;  // code hash or address, informational
    std::vector<ReportEntry> entries;
};

VulnerabilityReport parse_vulnerability_report(const std::string& json_text);

/// The instruction address a template applies to, plus its enclosing block.
struct PatchPoint
{
    uint32_t pc = 0;
    std::string kind;
    BasicBlock block;
};

/// A template specialized to a concrete contract: no unresolved holes other
/// than local labels, which the rewriter places at layout time.
struct TemplateInstance
{
    std::string id;
    // Number of consecutive original instructions the ops replace at the
    // patch point. 0 means the ops are inserted before the instruction.
    uint32_t replaces = 1;
    std::vector<AsmOp> ops;
    uint32_t label_count = 0;
    int64_t success_gas_delta = 0;  // extra static gas on the non-reverting path
};

struct PatchTemplate
{
    std::string id;
    std::vector<VulnKind> applicability;
};

/// kind -> template, deterministic. Unsupported kinds throw
/// Error{unsupported_vulnerability_class}.
PatchTemplate select_template(VulnKind kind);

// Checked-arithmetic instances. Each is stack-neutral relative to the
// instruction it replaces and reverts exactly when the infinite-precision
// result does not fit a 256-bit word.
TemplateInstance checked_add_instance();  // reverts iff a + b wraps ((a+b) < a)
TemplateInstance checked_sub_instance();  // reverts iff b > a
TemplateInstance checked_mul_instance();  // reverts iff a != 0 and (a*b)/a != b
/// No-op insertion; the rewritten block is semantically identical and costs
/// exactly the trampoline overhead per traversal.
TemplateInstance identity_instance();

// ---- Patch DSL ----------------------------------------------------------
//
// Indentation-structured clauses:
//
//   add_require_patch:
//     <function>:
//       - <condition>
//
//   delete_public_function_patch:
//     - <function>
//
// Functions are a 4-byte selector (0x hex), a full signature
// ("initWallet(address,uint256)"), or a bare name resolved through the name
// map. Conditions: sload(<slot|name>), caller(), callvalue(),
// calldata(<word index>), integer literals, comparisons
// (== != < <= > >=), and/or/not, parentheses. '#' starts a comment.

struct CondExpr;
using CondPtr = std::shared_ptr<const CondExpr>;

struct CondExpr
{
    enum class Op
    {
        literal,
        sload,
        caller,
        callvalue,
        calldata,
        eq,
        ne,
        lt,
        le,
        gt,
        ge,
        logical_and,
        logical_or,
        logical_not,
    };

    Op op = Op::literal;
    u256 value;        // literal value, sload slot, or calldata word index
    std::string name;  // storage name as written, kept for pretty-printing
    CondPtr lhs;
    CondPtr rhs;
};

bool cond_equal(const CondExpr& a, const CondExpr& b);
std::string pretty_print_condition(const CondExpr& expr);

/// Function reference as written in the DSL.
struct FunctionRef
{
    std::string text;
    std::optional<uint32_t> selector;  // resolved

    bool operator==(const FunctionRef& other) const { return text == other.text; }
};

struct RequireClause
{
    FunctionRef function;
    std::vector<CondPtr> conditions;
};

struct PatchDslFile
{
    std::vector<RequireClause> add_require;
    std::vector<FunctionRef> delete_public_function;
};

/// Storage-name and function-name bindings. JSON forms accepted:
///   {"m_numOwner": 0}                                  (flat: storage only)
///   {"storage": {"m_numOwner": 0},
///    "functions": {"initWallet": "initWallet(address,uint256)"}}
struct NameMap
{
    std::map<std::string, u256> storage;
    std::map<std::string, std::string> functions;  // bare name -> signature or 0x selector
};

NameMap parse_name_map(const std::string& json_text);

/// Parses DSL text, resolving storage names through the map. Throws
/// Error{dsl_syntax_error} with line:column and Error{unresolved_storage_name}.
PatchDslFile parse_patch_dsl(const std::string& text, const NameMap& names = {});

std::string pretty_print_dsl(const PatchDslFile& file);

// ---- Dispatcher ----------------------------------------------------------

struct DispatchSite
{
    uint32_t selector = 0;
    uint32_t entry_address = 0;  // function body block address
    uint32_t push_pc = 0;        // PUSH of the body address
    uint32_t jumpi_pc = 0;
    uint32_t block_start = 0;
};

struct DispatcherInfo
{
    std::map<uint32_t, DispatchSite> sites;
};

/// Extracts selector -> entry mappings by pattern-matching
/// `PUSH4 <sel>; EQ; PUSHk <addr>; JUMPI` runs in the entry blocks.
/// Throws Error{dispatcher_not_recognized} when the entry code lacks the
/// standard calldata-dispatch idiom entirely; a recognized dispatcher with
/// no public functions yields an empty map.
DispatcherInfo locate_dispatcher(const Program& program, const PartialCfg& cfg);

/// Resolves a DSL function reference to a selector (FunctionNotFound if a
/// bare name has no binding).
uint32_t resolve_function_ref(const FunctionRef& ref, const NameMap& names);

/// Guard inserted at the function's entry: evaluates the conjunction of the
/// clause conditions and REVERTs when it does not hold.
std::pair<PatchPoint, TemplateInstance> specialize_add_require(const RequireClause& clause,
    const DispatcherInfo& dispatcher, const Program& program, const PartialCfg& cfg,
    const NameMap& names = {});

/// Reroutes the dispatcher comparison for the selector to a revert stub; the
/// function body stays at its address, so internal jump-based callers keep
/// working.
std::pair<PatchPoint, TemplateInstance> specialize_delete_public_function(
    const FunctionRef& function, const DispatcherInfo& dispatcher, const PartialCfg& cfg,
    const NameMap& names = {});

// ---- Report-driven planning ----------------------------------------------

struct PatchPlan
{
    std::vector<std::pair<PatchPoint, TemplateInstance>> patches;  // sorted by pc
    std::vector<std::string> warnings;
    std::vector<uint32_t> skipped_pcs;  // blacklisted
};

/// Turns a vulnerability report (plus optional DSL for access-control
/// entries) into a concrete patch list. Blacklisted pcs are skipped with a
/// note. A report pointing an arithmetic kind at a mismatching opcode is
/// rejected; an ADD preceded by a NOT in the same block (the compiler's
/// signed-addition idiom) is patched but flagged with a warning.
PatchPlan build_patch_plan(const VulnerabilityReport& report, const Program& program,
    const PartialCfg& cfg, const std::optional<PatchDslFile>& dsl = std::nullopt,
    const NameMap& names = {}, const std::set<uint32_t>& blacklist = {});

}  // namespace evmfix
