// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/errors.hpp>

namespace evmfix
{
const char* errc_name(Errc code) noexcept
{
    switch (code)
    {
    case Errc::invalid_hex:
        return "InvalidHex";
    case Errc::io_error:
        return "IoError";
    case Errc::bad_config:
        return "BadConfig";
    case Errc::unknown_opcode:
        return "UnknownOpcode";
    case Errc::operand_width_mismatch:
        return "OperandWidthMismatch";
    case Errc::not_on_instruction_boundary:
        return "NotOnInstructionBoundary";
    case Errc::address_in_data_region:
        return "AddressInDataRegion";
    case Errc::insufficient_block_size:
        return "InsufficientBlockSize";
    case Errc::code_size_cap_exceeded:
        return "CodeSizeCapExceeded";
    case Errc::overlapping_patches:
        return "OverlappingPatches";
    case Errc::rewrite_diagnostic:
        return "RewriteDiagnostic";
    case Errc::dsl_syntax_error:
        return "SyntaxError";
    case Errc::unresolved_storage_name:
        return "UnresolvedStorageName";
    case Errc::function_not_found:
        return "FunctionNotFound";
    case Errc::dispatcher_not_recognized:
        return "DispatcherNotRecognized";
    case Errc::unsupported_vulnerability_class:
        return "UnsupportedVulnerabilityClass";
    case Errc::fixture_mismatch:
        return "FixtureMismatch";
    case Errc::no_affected_transactions:
        return "NoAffectedTransactions";
    case Errc::step_limit_exceeded:
        return "StepLimitExceeded";
    case Errc::rpc_error:
        return "RpcError";
    case Errc::range_too_large:
        return "RangeTooLarge";
    case Errc::empty_code:
        return "EmptyCode";
    }
    return "Error";
}

int exit_code_for(Errc code) noexcept
{
    // Stable public mapping; see README.
    switch (code)
    {
    case Errc::invalid_hex:
    case Errc::io_error:
    case Errc::bad_config:
        return 64;
    case Errc::unknown_opcode:
    case Errc::operand_width_mismatch:
        return 65;
    case Errc::not_on_instruction_boundary:
    case Errc::address_in_data_region:
        return 66;
    case Errc::insufficient_block_size:
        return 67;
    case Errc::code_size_cap_exceeded:
        return 68;
    case Errc::overlapping_patches:
    case Errc::rewrite_diagnostic:
        return 69;
    case Errc::dsl_syntax_error:
    case Errc::unresolved_storage_name:
        return 70;
    case Errc::function_not_found:
    case Errc::dispatcher_not_recognized:
        return 71;
    case Errc::unsupported_vulnerability_class:
        return 72;
    case Errc::fixture_mismatch:
        return 73;
    case Errc::no_affected_transactions:
        return 74;
    case Errc::step_limit_exceeded:
        return 75;
    case Errc::rpc_error:
    case Errc::range_too_large:
        return 76;
    case Errc::empty_code:
        return 77;
    }
    return 78;
}

}  // namespace evmfix
