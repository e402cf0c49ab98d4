// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/assembly.hpp>
#include <evmfix/errors.hpp>
#include <evmfix/keccak.hpp>
#include <evmfix/minievm.hpp>

#include <algorithm>
#include <cstring>

namespace evmfix
{
const char* trace_kind_name(TraceKind kind) noexcept
{
    switch (kind)
    {
    case TraceKind::sstore:
        return "SSTORE";
    case TraceKind::call:
        return "CALL";
    case TraceKind::delegatecall:
        return "DELEGATECALL";
    case TraceKind::staticcall:
        return "STATICCALL";
    case TraceKind::create:
        return "CREATE";
    case TraceKind::selfdestruct:
        return "SELFDESTRUCT";
    case TraceKind::log:
        return "LOG";
    }
    return "?";
}

const char* tx_status_name(TxStatus status) noexcept
{
    switch (status)
    {
    case TxStatus::success:
        return "success";
    case TxStatus::revert:
        return "revert";
    case TxStatus::out_of_gas:
        return "out_of_gas";
    case TxStatus::invalid_opcode:
        return "invalid_opcode";
    }
    return "?";
}

namespace
{
constexpr int64_t unlimited_budget = int64_t{1} << 56;

const Address identity_precompile = [] {
    Address a;
    a.bytes[19] = 0x04;
    return a;
}();

struct FrameInput
{
    Address code_address;
    Address storage_address;  // DELEGATECALL keeps the caller's context
    Address caller;
    u256 call_value;
    Bytes code;
    Bytes calldata;
    int64_t gas = 0;
    bool is_static = false;
};

struct FrameOutput
{
    bool success = false;
    TxStatus status = TxStatus::success;
    Bytes output;
    int64_t gas_left = 0;
    std::vector<TraceEvent> events;
    std::optional<Fault> fault;
};

class Machine
{
public:
    Machine(WorldState world, const VmConfig& config, bool accounting,
        std::optional<WatchRegion> watch, Address watched_address, Address origin)
      : world_{std::move(world)},
        config_{config},
        accounting_{accounting},
        watch_{watch},
        watched_address_{watched_address},
        origin_{word_from_address(origin)}
    {}

    WorldState& world() { return world_; }
    uint32_t watch_entries() const { return watch_entries_; }

    FrameOutput run(const FrameInput& input, unsigned depth);

private:
    [[noreturn]] void resource_limit(const char* what)
    {
        throw Error{Errc::step_limit_exceeded, what};
    }

    WorldState world_;
    const VmConfig& config_;
    bool accounting_;
    std::optional<WatchRegion> watch_;
    Address watched_address_;
    u256 origin_;
    uint64_t steps_ = 0;
    uint32_t watch_entries_ = 0;
};

// Per-frame interpreter state. Failure is signalled by setting `failed`
// plus a status; the main loop exits and the frame's state changes are
// rolled back by the caller.
struct Frame
{
    const FrameInput& in;
    const GasSchedule& sched;
    bool accounting;

    std::vector<u256> stack;
    Bytes memory;
    int64_t memory_words = 0;
    int64_t gas_left;
    Bytes return_buffer;  // last sub-call output
    std::vector<TraceEvent> events;
    JumpdestSet jumpdests;

    bool failed = false;
    bool halted = false;
    TxStatus fail_status = TxStatus::success;
    Bytes output;
    uint32_t pc = 0;
    std::optional<Fault> fault;

    Frame(const FrameInput& input, const GasSchedule& schedule, bool accounting_on)
      : in{input}, sched{schedule}, accounting{accounting_on}, gas_left{input.gas},
        jumpdests{jumpdest_analysis(input.code)}
    {}

    void fail(TxStatus status, const char* reason)
    {
        failed = true;
        halted = true;
        fail_status = status;
        gas_left = 0;  // failures other than REVERT consume the frame's gas
        fault = Fault{in.storage_address, pc, reason};
    }

    bool charge(int64_t amount)
    {
        if (accounting && amount > gas_left)
        {
            fail(TxStatus::out_of_gas, "out of gas");
            return false;
        }
        gas_left -= amount;
        return true;
    }

    u256 pop() {
        u256 v = stack.back();
        stack.pop_back();
        return v;
    }

    void push(const u256& v) { stack.push_back(v); }

    // Memory expansion with the quadratic cost term.
    bool grow_memory(const u256& offset, const u256& size, size_t memory_limit)
    {
        if (size == 0)
            return true;
        if (offset > memory_limit || size > memory_limit ||
            static_cast<uint64_t>(offset) + static_cast<uint64_t>(size) > memory_limit)
        {
            fail(TxStatus::out_of_gas, "memory limit exceeded");
            return false;
        }
        const int64_t end = static_cast<int64_t>(offset) + static_cast<int64_t>(size);
        const int64_t words = (end + 31) / 32;
        if (words <= memory_words)
            return true;
        const auto cost = [&](int64_t w) { return sched.memory_word * w + w * w / 512; };
        if (!charge(cost(words) - cost(memory_words)))
            return false;
        memory_words = words;
        memory.resize(static_cast<size_t>(words) * 32, 0);
        return true;
    }

    uint8_t* mem_at(const u256& offset) { return memory.data() + static_cast<size_t>(offset); }
};

Bytes slice_padded(const Bytes& data, const u256& offset, size_t size)
{
    Bytes out(size, 0);
    if (offset <= data.size())
    {
        const size_t begin = static_cast<size_t>(offset);
        const size_t n = std::min(size, data.size() - begin);
        std::copy_n(data.begin() + static_cast<ptrdiff_t>(begin), n, out.begin());
    }
    return out;
}

Address create_address(const Address& sender, uint64_t nonce)
{
    Bytes seed{sender.bytes.begin(), sender.bytes.end()};
    for (int i = 7; i >= 0; --i)
        seed.push_back(static_cast<uint8_t>(nonce >> (8 * i)));
    const Hash32 hash = keccak256(seed);
    Address out;
    std::copy(hash.begin() + 12, hash.end(), out.bytes.begin());
    return out;
}

FrameOutput Machine::run(const FrameInput& input, unsigned depth)
{
    FrameOutput out;
    if (depth > config_.call_depth_limit)
    {
        out.status = TxStatus::invalid_opcode;
        return out;
    }

    Frame f{input, *config_.schedule, accounting_};
    const Bytes& code = input.code;
    const bool watching = watch_ && input.code_address == watched_address_;
    bool was_in_watch = false;

    while (!f.halted)
    {
        if (f.pc >= code.size())
        {
            // Running off the end of the code is an implicit STOP.
            f.halted = true;
            break;
        }
        if (!accounting_ && ++steps_ > config_.step_limit)
            resource_limit("instruction step limit exceeded");

        if (watching)
        {
            const bool in_watch = f.pc >= watch_->start && f.pc < watch_->end;
            if (in_watch && !was_in_watch)
                ++watch_entries_;
            was_in_watch = in_watch;
        }

        const uint8_t op = code[f.pc];
        const OpcodeInfo& info = opcode_info(op);
        if (!info.known)
        {
            f.fail(TxStatus::invalid_opcode, "invalid opcode");
            break;
        }
        if (f.stack.size() < static_cast<size_t>(info.stack_in))
        {
            f.fail(TxStatus::invalid_opcode, "stack underflow");
            break;
        }
        if (f.stack.size() - info.stack_in + info.stack_out > 1024)
        {
            f.fail(TxStatus::invalid_opcode, "stack overflow");
            break;
        }
        if (!f.charge(f.sched.base[op]))
            break;

        switch (op)
        {
        case OP_STOP:
            f.halted = true;
            break;

        case OP_ADD:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a + b);
            break;
        }
        case OP_MUL:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a * b);
            break;
        }
        case OP_SUB:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a - b);
            break;
        }
        case OP_DIV:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(b == 0 ? u256{0} : a / b);
            break;
        }
        case OP_SDIV:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(sdiv_words(a, b));
            break;
        }
        case OP_MOD:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(b == 0 ? u256{0} : a % b);
            break;
        }
        case OP_LT:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a < b ? 1 : 0);
            break;
        }
        case OP_GT:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a > b ? 1 : 0);
            break;
        }
        case OP_SLT:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(slt_words(a, b) ? 1 : 0);
            break;
        }
        case OP_SGT:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(slt_words(b, a) ? 1 : 0);
            break;
        }
        case OP_EQ:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a == b ? 1 : 0);
            break;
        }
        case OP_ISZERO:
            f.push(f.pop() == 0 ? 1 : 0);
            break;
        case OP_AND:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a & b);
            break;
        }
        case OP_OR:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a | b);
            break;
        }
        case OP_XOR:
        {
            const u256 a = f.pop(), b = f.pop();
            f.push(a ^ b);
            break;
        }
        case OP_NOT:
            f.push(~f.pop());
            break;
        case OP_BYTE:
        {
            const u256 i = f.pop(), x = f.pop();
            f.push(i >= 32 ? u256{0} : (x >> (8 * (31 - static_cast<unsigned>(i)))) & 0xff);
            break;
        }
        case OP_SHL:
        {
            const u256 shift = f.pop(), x = f.pop();
            f.push(shift >= 256 ? u256{0} : x << static_cast<unsigned>(shift));
            break;
        }
        case OP_SHR:
        {
            const u256 shift = f.pop(), x = f.pop();
            f.push(shift >= 256 ? u256{0} : x >> static_cast<unsigned>(shift));
            break;
        }

        case OP_SHA3:
        {
            const u256 offset = f.pop(), size = f.pop();
            if (!f.grow_memory(offset, size, config_.memory_limit))
                break;
            const int64_t words = (static_cast<int64_t>(size) + 31) / 32;
            if (!f.charge(f.sched.sha3_word * words))
                break;
            const Hash32 hash = keccak256(size == 0 ? nullptr : f.mem_at(offset),
                static_cast<size_t>(size));
            f.push(word_from_bytes(hash.data(), hash.size()));
            break;
        }

        case OP_ADDRESS:
            f.push(word_from_address(input.storage_address));
            break;
        case OP_BALANCE:
        {
            const Address addr = address_from_word(f.pop());
            const Account* acct = world_.find(addr);
            f.push(acct ? acct->balance : u256{0});
            break;
        }
        case OP_ORIGIN:
            f.push(origin_);
            break;
        case OP_CALLER:
            f.push(word_from_address(input.caller));
            break;
        case OP_CALLVALUE:
            f.push(input.call_value);
            break;
        case OP_CALLDATALOAD:
        {
            const u256 offset = f.pop();
            const Bytes word = slice_padded(input.calldata, offset, 32);
            f.push(word_from_bytes(word));
            break;
        }
        case OP_CALLDATASIZE:
            f.push(input.calldata.size());
            break;
        case OP_CODESIZE:
            f.push(code.size());
            break;
        case OP_RETURNDATASIZE:
            f.push(f.return_buffer.size());
            break;
        case OP_GASPRICE:
            f.push(world_.block.gas_price);
            break;
        case OP_BLOCKHASH:
        {
            const u256 number = f.pop();
            Bytes seed = word_to_bytes32(number);
            f.push(keccak256_word(seed));  // fixture-deterministic stand-in
            break;
        }
        case OP_COINBASE:
            f.push(world_.block.coinbase);
            break;
        case OP_TIMESTAMP:
            f.push(world_.block.timestamp);
            break;
        case OP_NUMBER:
            f.push(world_.block.number);
            break;
        case OP_DIFFICULTY:
            f.push(world_.block.difficulty);
            break;
        case OP_GASLIMIT:
            f.push(world_.block.gas_limit);
            break;

        case OP_CALLDATACOPY:
        case OP_CODECOPY:
        case OP_RETURNDATACOPY:
        {
            const u256 dest = f.pop(), offset = f.pop(), size = f.pop();
            if (!f.grow_memory(dest, size, config_.memory_limit))
                break;
            const int64_t words = (static_cast<int64_t>(size) + 31) / 32;
            if (!f.charge(f.sched.copy_word * words))
                break;
            if (op == OP_RETURNDATACOPY &&
                (offset > f.return_buffer.size() ||
                    static_cast<size_t>(offset) + static_cast<size_t>(size) >
                        f.return_buffer.size()))
            {
                f.fail(TxStatus::invalid_opcode, "returndata out of bounds");
                break;
            }
            const Bytes* source = op == OP_CALLDATACOPY ? &input.calldata :
                                  op == OP_CODECOPY     ? &code :
                                                          &f.return_buffer;
            if (size > 0)
            {
                const Bytes chunk = slice_padded(*source, offset, static_cast<size_t>(size));
                std::copy(chunk.begin(), chunk.end(), f.mem_at(dest));
            }
            break;
        }

        case OP_POP:
            f.pop();
            break;
        case OP_MLOAD:
        {
            const u256 offset = f.pop();
            if (!f.grow_memory(offset, 32, config_.memory_limit))
                break;
            f.push(word_from_bytes(f.mem_at(offset), 32));
            break;
        }
        case OP_MSTORE:
        {
            const u256 offset = f.pop(), value = f.pop();
            if (!f.grow_memory(offset, 32, config_.memory_limit))
                break;
            word_to_bytes32(value, f.mem_at(offset));
            break;
        }
        case OP_MSTORE8:
        {
            const u256 offset = f.pop(), value = f.pop();
            if (!f.grow_memory(offset, 1, config_.memory_limit))
                break;
            *f.mem_at(offset) = static_cast<uint8_t>(static_cast<uint32_t>(value & 0xff));
            break;
        }

        case OP_SLOAD:
        {
            const u256 key = f.pop();
            const Account* acct = world_.find(input.storage_address);
            u256 value = 0;
            if (acct)
            {
                const auto it = acct->storage.find(key);
                if (it != acct->storage.end())
                    value = it->second;
            }
            f.push(value);
            break;
        }
        case OP_SSTORE:
        {
            if (input.is_static)
            {
                f.fail(TxStatus::invalid_opcode, "SSTORE in static context");
                break;
            }
            const u256 key = f.pop(), value = f.pop();
            Account& acct = world_.get_or_create(input.storage_address);
            const auto it = acct.storage.find(key);
            const u256 current = it == acct.storage.end() ? u256{0} : it->second;
            if (!f.charge(current == 0 && value != 0 ? f.sched.sstore_set : f.sched.sstore_reset))
                break;
            if (value == 0)
                acct.storage.erase(key);
            else
                acct.storage[key] = value;
            TraceEvent event;
            event.kind = TraceKind::sstore;
            event.context = input.storage_address;
            event.key = key;
            event.value = value;
            f.events.push_back(event);
            break;
        }

        case OP_JUMP:
        case OP_JUMPI:
        {
            const u256 target = f.pop();
            const u256 condition = op == OP_JUMPI ? f.pop() : u256{1};
            if (condition != 0)
            {
                if (target > 0xffffffff || !f.jumpdests.contains(static_cast<uint32_t>(target)))
                {
                    f.fail(TxStatus::invalid_opcode, "invalid jump destination");
                    break;
                }
                f.pc = static_cast<uint32_t>(target);
                continue;  // pc already advanced
            }
            break;
        }
        case OP_PC:
            f.push(f.pc);
            break;
        case OP_MSIZE:
            f.push(static_cast<uint64_t>(f.memory_words) * 32);
            break;
        case OP_GAS:
            f.push(static_cast<uint64_t>(std::max<int64_t>(f.gas_left, 0)));
            break;
        case OP_JUMPDEST:
            break;

        case OP_RETURN:
        case OP_REVERT:
        {
            const u256 offset = f.pop(), size = f.pop();
            if (!f.grow_memory(offset, size, config_.memory_limit))
                break;
            if (size > 0)
                f.output.assign(f.mem_at(offset), f.mem_at(offset) + static_cast<size_t>(size));
            f.halted = true;
            if (op == OP_REVERT)
            {
                // REVERT keeps the remaining gas, unlike the other failures.
                f.failed = true;
                f.fail_status = TxStatus::revert;
                f.fault = Fault{input.storage_address, f.pc, "revert"};
            }
            break;
        }

        case OP_INVALID:
            f.fail(TxStatus::invalid_opcode, "INVALID instruction");
            break;

        case OP_SELFDESTRUCT:
        {
            if (input.is_static)
            {
                f.fail(TxStatus::invalid_opcode, "SELFDESTRUCT in static context");
                break;
            }
            const Address beneficiary = address_from_word(f.pop());
            Account& self = world_.get_or_create(input.storage_address);
            const u256 balance = self.balance;
            self.balance = 0;
            world_.get_or_create(beneficiary).balance += balance;
            world_.accounts.erase(input.storage_address);
            TraceEvent event;
            event.kind = TraceKind::selfdestruct;
            event.context = input.storage_address;
            event.target = beneficiary;
            event.call_value = balance;
            f.events.push_back(event);
            f.halted = true;
            break;
        }

        case OP_CREATE:
        {
            if (input.is_static)
            {
                f.fail(TxStatus::invalid_opcode, "CREATE in static context");
                break;
            }
            const u256 value = f.pop(), offset = f.pop(), size = f.pop();
            if (!f.grow_memory(offset, size, config_.memory_limit))
                break;
            Account& creator = world_.get_or_create(input.storage_address);
            if (creator.balance < value)
            {
                f.push(0);
                f.return_buffer.clear();
                break;
            }
            const Address addr = create_address(input.storage_address, creator.nonce);
            creator.nonce += 1;
            Bytes init(size == 0 ? Bytes{} :
                                   Bytes{f.mem_at(offset), f.mem_at(offset) + static_cast<size_t>(size)});

            const WorldState snapshot = world_;
            creator.balance -= value;
            Account& created = world_.get_or_create(addr);
            created.balance += value;

            FrameInput sub;
            sub.code_address = addr;
            sub.storage_address = addr;
            sub.caller = input.storage_address;
            sub.call_value = value;
            sub.code = std::move(init);
            sub.gas = f.gas_left - f.gas_left / 64;
            FrameOutput result = run(sub, depth + 1);

            f.gas_left -= sub.gas - result.gas_left;
            TraceEvent event;
            event.kind = TraceKind::create;
            event.context = input.storage_address;
            event.target = addr;
            event.call_value = value;
            event.success = result.success;
            event.return_hash = keccak256(result.output);
            f.events.push_back(event);
            bool deployed = result.success;
            if (deployed && !f.charge(200 * static_cast<int64_t>(result.output.size())))
                deployed = false;  // code-deposit charge failed
            if (deployed)
            {
                world_.get_or_create(addr).code = result.output;
                f.events.insert(f.events.end(), result.events.begin(), result.events.end());
                f.push(word_from_address(addr));
            }
            else
            {
                world_ = snapshot;
                if (!f.failed)
                    f.push(0);
            }
            f.return_buffer.clear();
            break;
        }

        case OP_CALL:
        case OP_DELEGATECALL:
        case OP_STATICCALL:
        {
            const u256 gas_requested = f.pop();
            const Address target = address_from_word(f.pop());
            const u256 value = op == OP_CALL ? f.pop() : u256{0};
            const u256 in_offset = f.pop(), in_size = f.pop();
            const u256 out_offset = f.pop(), out_size = f.pop();

            if (op == OP_CALL && input.is_static && value != 0)
            {
                f.fail(TxStatus::invalid_opcode, "value transfer in static context");
                break;
            }
            if (!f.grow_memory(in_offset, in_size, config_.memory_limit) ||
                !f.grow_memory(out_offset, out_size, config_.memory_limit))
                break;

            int64_t extra = 0;
            if (value != 0)
            {
                extra += f.sched.call_value_transfer;
                if (world_.find(target) == nullptr)
                    extra += f.sched.call_new_account;
            }
            if (!f.charge(extra))
                break;

            // EIP-150 cap; the value-transfer stipend is granted on top of
            // what the parent pays, and the child's leftover (including
            // unused stipend) flows back.
            int64_t given = f.gas_left - f.gas_left / 64;
            if (accounting_ && gas_requested < static_cast<uint64_t>(given))
                given = static_cast<int64_t>(gas_requested);
            const int64_t child_gas = given + (value != 0 ? f.sched.call_stipend : 0);

            Bytes call_input = in_size == 0 ?
                                   Bytes{} :
                                   Bytes{f.mem_at(in_offset),
                                       f.mem_at(in_offset) + static_cast<size_t>(in_size)};

            TraceEvent event;
            event.kind = op == OP_CALL          ? TraceKind::call :
                         op == OP_DELEGATECALL  ? TraceKind::delegatecall :
                                                  TraceKind::staticcall;
            event.context = input.storage_address;
            event.target = target;
            event.call_value = op == OP_DELEGATECALL ? input.call_value : value;
            event.data_hash = keccak256(call_input);

            FrameOutput result;
            if (target == identity_precompile)
            {
                const int64_t words = (static_cast<int64_t>(in_size) + 31) / 32;
                const int64_t cost =
                    f.sched.identity_precompile_base + f.sched.identity_precompile_word * words;
                result.success = child_gas >= cost || !accounting_;
                result.gas_left = result.success ? child_gas - cost : 0;
                if (result.success)
                    result.output = call_input;
            }
            else
            {
                Account& sender_acct = world_.get_or_create(input.storage_address);
                if (value != 0 && sender_acct.balance < value)
                {
                    // Insufficient balance: the call fails without running.
                    result.success = false;
                    result.gas_left = child_gas;
                }
                else
                {
                    const WorldState snapshot = world_;
                    if (value != 0)
                    {
                        world_.get_or_create(input.storage_address).balance -= value;
                        world_.get_or_create(target).balance += value;
                    }
                    const Account* callee = world_.find(target);
                    FrameInput sub;
                    sub.code_address = target;
                    sub.caller = input.storage_address;
                    sub.calldata = std::move(call_input);
                    sub.gas = child_gas;
                    sub.code = callee ? callee->code : Bytes{};
                    if (op == OP_DELEGATECALL)
                    {
                        sub.storage_address = input.storage_address;
                        sub.caller = input.caller;
                        sub.call_value = input.call_value;
                        sub.is_static = input.is_static;
                    }
                    else
                    {
                        sub.storage_address = target;
                        sub.call_value = value;
                        sub.is_static = input.is_static || op == OP_STATICCALL;
                    }
                    result = run(sub, depth + 1);
                    if (!result.success && result.status != TxStatus::revert)
                        result.gas_left = 0;
                    if (!result.success)
                        world_ = snapshot;
                }
            }

            f.gas_left -= given;
            f.gas_left += result.gas_left;
            event.success = result.success;
            event.return_hash = keccak256(result.output);
            f.events.push_back(event);
            if (result.success)
                f.events.insert(f.events.end(), result.events.begin(), result.events.end());

            f.return_buffer = result.output;
            if (out_size > 0 && !result.output.empty())
            {
                const size_t n =
                    std::min(static_cast<size_t>(out_size), result.output.size());
                std::copy_n(result.output.begin(), n, f.mem_at(out_offset));
            }
            f.push(result.success ? 1 : 0);
            break;
        }

        default:
            if (is_push(op))
            {
                const unsigned width = push_immediate_size(op);
                const size_t available = std::min<size_t>(width, code.size() - f.pc - 1);
                u256 value = word_from_bytes(code.data() + f.pc + 1, available);
                value <<= 8 * (width - available);  // missing bytes read as zero
                f.push(value);
                f.pc += 1 + static_cast<uint32_t>(available);
                continue;
            }
            if (op >= OP_DUP1 && op <= OP_DUP16)
            {
                f.push(f.stack[f.stack.size() - 1 - (op - OP_DUP1)]);
                break;
            }
            if (op >= OP_SWAP1 && op <= OP_SWAP16)
            {
                std::swap(f.stack.back(), f.stack[f.stack.size() - 2 - (op - OP_SWAP1)]);
                break;
            }
            if (op >= OP_LOG0 && op <= OP_LOG4)
            {
                if (input.is_static)
                {
                    f.fail(TxStatus::invalid_opcode, "LOG in static context");
                    break;
                }
                const unsigned topics = op - OP_LOG0;
                const u256 offset = f.pop(), size = f.pop();
                if (!f.grow_memory(offset, size, config_.memory_limit))
                    break;
                if (!f.charge(f.sched.log_topic * topics +
                              f.sched.log_byte * static_cast<int64_t>(size)))
                    break;
                TraceEvent event;
                event.kind = TraceKind::log;
                event.context = input.storage_address;
                event.key = topics;
                for (unsigned t = 0; t < topics; ++t)
                {
                    const u256 topic = f.pop();
                    if (t == 0)
                        event.value = topic;
                }
                event.data_hash =
                    keccak256(size == 0 ? nullptr : f.mem_at(offset), static_cast<size_t>(size));
                f.events.push_back(event);
                break;
            }
            f.fail(TxStatus::invalid_opcode, "invalid opcode");
            break;
        }

        if (!f.halted)
            f.pc += 1;
    }

    out.success = !f.failed;
    out.status = f.failed ? f.fail_status : TxStatus::success;
    out.output = std::move(f.output);
    out.gas_left = f.gas_left;
    out.events = std::move(f.events);
    out.fault = std::move(f.fault);
    return out;
}

std::pair<WorldState, Receipt> execute_impl(
    const WorldState& world, const TxEnv& tx, const VmConfig& config, bool accounting)
{
    Machine machine{world, config, accounting, tx.watch, tx.recipient.value_or(Address{}),
        tx.sender};

    Receipt receipt;
    const int64_t budget = accounting ? tx.gas_limit : unlimited_budget;

    // No intrinsic per-transaction cost: gas_used counts executed
    // instructions only, matching the reference per-line figures.
    WorldState& w = machine.world();
    Account& sender = w.get_or_create(tx.sender);
    if (sender.balance < tx.value)
    {
        receipt.status = TxStatus::revert;
        receipt.fault = Fault{tx.sender, 0, "insufficient balance for value transfer"};
        return {world, receipt};
    }

    const WorldState pre = w;
    sender.nonce += 1;

    FrameInput frame;
    frame.caller = tx.sender;
    frame.call_value = tx.value;
    frame.calldata = tx.calldata;
    frame.gas = budget;

    Address target;
    if (tx.recipient)
    {
        target = *tx.recipient;
        w.get_or_create(tx.sender).balance -= tx.value;
        w.get_or_create(target).balance += tx.value;
        const Account* callee = w.find(target);
        frame.code_address = target;
        frame.storage_address = target;
        frame.code = callee ? callee->code : Bytes{};
    }
    else
    {
        target = create_address(tx.sender, w.get_or_create(tx.sender).nonce - 1);
        w.get_or_create(tx.sender).balance -= tx.value;
        w.get_or_create(target).balance += tx.value;
        frame.code_address = target;
        frame.storage_address = target;
        frame.code = tx.calldata;
        frame.calldata.clear();
        receipt.created = target;
    }

    FrameOutput result = machine.run(frame, 0);
    if (!tx.recipient && result.success)
    {
        machine.world().get_or_create(target).code = result.output;
    }

    receipt.status = result.status;
    receipt.gas_used = budget - result.gas_left;
    receipt.return_data = std::move(result.output);
    receipt.fault = std::move(result.fault);
    receipt.watch_entries = machine.watch_entries();
    if (result.success)
    {
        receipt.trace = std::move(result.events);
        return {std::move(machine.world()), receipt};
    }
    return {pre, receipt};
}
}  // namespace

std::pair<WorldState, Receipt> execute(
    const WorldState& world, const TxEnv& tx, const VmConfig& config)
{
    return execute_impl(world, tx, config, tx.gas_accounting_enabled);
}

std::pair<WorldState, Receipt> execute_with_unlimited_gas(
    const WorldState& world, const TxEnv& tx, const VmConfig& config)
{
    return execute_impl(world, tx, config, false);
}

}  // namespace evmfix
