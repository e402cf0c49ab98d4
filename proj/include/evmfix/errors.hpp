// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace evmfix
{
// Error classes surfaced by the toolkit. The CLI maps each class to a
// distinct process exit code (see exit_code_for), which is part of the
// documented interface.
enum class Errc
{
    invalid_hex = 1,
    io_error,
    bad_config,
    unknown_opcode,
    operand_width_mismatch,
    not_on_instruction_boundary,
    address_in_data_region,
    insufficient_block_size,
    code_size_cap_exceeded,
    overlapping_patches,
    rewrite_diagnostic,
    dsl_syntax_error,
    unresolved_storage_name,
    function_not_found,
    dispatcher_not_recognized,
    unsupported_vulnerability_class,
    fixture_mismatch,
    no_affected_transactions,
    step_limit_exceeded,
    rpc_error,
    range_too_large,
    empty_code,
};

class Error : public std::runtime_error
{
public:
    Error(Errc code, const std::string& what) : std::runtime_error{what}, code_{code} {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

const char* errc_name(Errc code) noexcept;

/// Process exit code for an error class. 0 is success, 1 is reserved for
/// difftester behavioral divergence, 64+ are tool errors.
int exit_code_for(Errc code) noexcept;

}  // namespace evmfix
