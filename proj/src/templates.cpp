// evmfix: EVM bytecode patching toolkit
// Copyright 2026 The evmfix Authors.
// SPDX-License-Identifier: Apache-2.0
#include <evmfix/errors.hpp>
#include <evmfix/keccak.hpp>
#include <evmfix/templates.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace evmfix
{
using nlohmann::json;

const char* vuln_kind_name(VulnKind kind) noexcept
{
    switch (kind)
    {
    case VulnKind::int_add_overflow:
        return "int_add_overflow";
    case VulnKind::int_sub_underflow:
        return "int_sub_underflow";
    case VulnKind::int_mul_overflow:
        return "int_mul_overflow";
    case VulnKind::access_control:
        return "access_control";
    }
    return "?";
}

VulnKind vuln_kind_from_name(std::string_view name)
{
    if (name == "int_add_overflow")
        return VulnKind::int_add_overflow;
    if (name == "int_sub_underflow")
        return VulnKind::int_sub_underflow;
    if (name == "int_mul_overflow")
        return VulnKind::int_mul_overflow;
    if (name == "access_control")
        return VulnKind::access_control;
    throw Error{Errc::unsupported_vulnerability_class,
        "unsupported vulnerability class: " + std::string{name}};
}

VulnerabilityReport parse_vulnerability_report(const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::exception& e)
    {
        throw Error{Errc::bad_config, std::string{"report JSON: "} + e.what()};
    }
    VulnerabilityReport report;
    report.contract = doc.value("contract", "");
    for (const auto& item : doc.value("entries", json::array()))
    {
        ReportEntry entry;
        entry.pc = item.at("pc").get<uint32_t>();
        entry.kind = vuln_kind_from_name(item.at("kind").get<std::string>());
        if (item.contains("selector"))
        {
            const auto bytes = from_hex(item["selector"].get<std::string>());
            if (bytes.size() != 4)
                throw Error{Errc::bad_config, "report selector must be 4 bytes"};
            std::array<uint8_t, 4> sel;
            std::copy(bytes.begin(), bytes.end(), sel.begin());
            entry.selector = sel;
        }
        entry.note = item.value("note", "");
        report.entries.push_back(std::move(entry));
    }
    return report;
}

PatchTemplate select_template(VulnKind kind)
{
    switch (kind)
    {
    case VulnKind::int_add_overflow:
        return {"checked_add", {VulnKind::int_add_overflow}};
    case VulnKind::int_sub_underflow:
        return {"checked_sub", {VulnKind::int_sub_underflow}};
    case VulnKind::int_mul_overflow:
        return {"checked_mul", {VulnKind::int_mul_overflow}};
    case VulnKind::access_control:
        return {"add_require", {VulnKind::access_control}};
    }
    throw Error{Errc::unsupported_vulnerability_class, "unsupported vulnerability class"};
}

// ---- checked arithmetic ----------------------------------------------------

TemplateInstance checked_add_instance()
{
    // Replaces ADD, verifying (a + b) >= a. Stack on entry: [a, b, ...].
    TemplateInstance inst;
    inst.id = "checked_add";
    inst.replaces = 1;
    inst.label_count = 1;
    const LabelId ok = 0;
    inst.ops = {
        AsmOp::instr(OP_DUP1),   // [a, a, b]
        AsmOp::instr(OP_SWAP2),  // [b, a, a]
        AsmOp::instr(OP_ADD),    // [a+b, a]
        AsmOp::instr(OP_DUP1),   // [a+b, a+b, a]
        AsmOp::instr(OP_SWAP2),  // [a, a+b, a+b]
        AsmOp::instr(OP_SWAP1),  // [a+b, a, a+b]
        AsmOp::instr(OP_LT),     // [(a+b) < a, a+b]
        AsmOp::instr(OP_ISZERO),
        AsmOp::push_label(ok),
        AsmOp::instr(OP_JUMPI),
        AsmOp::push(0),
        AsmOp::instr(OP_DUP1),
        AsmOp::instr(OP_REVERT),
        AsmOp::bind(ok),
        AsmOp::instr(OP_JUMPDEST),  // [a+b]
    };
    // 8 * 3 + 3 (push) + 10 (jumpi) + 1 (jumpdest) − 3 (replaced ADD)
    inst.success_gas_delta = 35;
    return inst;
}

TemplateInstance checked_sub_instance()
{
    // Replaces SUB computing a − b; reverts iff b > a. Stack: [a, b, ...].
    TemplateInstance inst;
    inst.id = "checked_sub";
    inst.replaces = 1;
    inst.label_count = 1;
    const LabelId ok = 0;
    inst.ops = {
        AsmOp::instr(OP_DUP2),  // [b, a, b]
        AsmOp::instr(OP_DUP2),  // [a, b, a, b]
        AsmOp::instr(OP_LT),    // [a < b, a, b]
        AsmOp::instr(OP_ISZERO),
        AsmOp::push_label(ok),
        AsmOp::instr(OP_JUMPI),
        AsmOp::push(0),
        AsmOp::instr(OP_DUP1),
        AsmOp::instr(OP_REVERT),
        AsmOp::bind(ok),
        AsmOp::instr(OP_JUMPDEST),
        AsmOp::instr(OP_SUB),  // [a-b]
    };
    inst.success_gas_delta = 26;
    return inst;
}

TemplateInstance checked_mul_instance()
{
    // Replaces MUL; reverts iff a != 0 and (a*b mod 2^256)/a != b (the
    // SafeMath criterion). Stack: [a, b, ...].
    TemplateInstance inst;
    inst.id = "checked_mul";
    inst.replaces = 1;
    inst.label_count = 1;
    const LabelId ok = 0;
    inst.ops = {
        AsmOp::instr(OP_DUP2),  // [b, a, b]
        AsmOp::instr(OP_DUP2),  // [a, b, a, b]
        AsmOp::instr(OP_MUL),   // [c, a, b]        c = a*b mod 2^256
        AsmOp::instr(OP_DUP2),  // [a, c, a, b]
        AsmOp::instr(OP_ISZERO),
        AsmOp::push_label(ok),
        AsmOp::instr(OP_JUMPI),  // a == 0: c is 0, done
        AsmOp::instr(OP_DUP2),   // [a, c, a, b]
        AsmOp::instr(OP_DUP2),   // [c, a, c, a, b]
        AsmOp::instr(OP_DIV),    // [c/a, c, a, b]
        AsmOp::instr(OP_DUP4),   // [b, c/a, c, a, b]
        AsmOp::instr(OP_EQ),
        AsmOp::push_label(ok),
        AsmOp::instr(OP_JUMPI),
        AsmOp::push(0),
        AsmOp::instr(OP_DUP1),
        AsmOp::instr(OP_REVERT),
        AsmOp::bind(ok),
        AsmOp::instr(OP_JUMPDEST),  // [c, a, b]
        AsmOp::instr(OP_SWAP2),     // [b, a, c]
        AsmOp::instr(OP_POP),
        AsmOp::instr(OP_POP),  // [c]
    };
    inst.success_gas_delta = 63;  // a != 0 path; 33 when a == 0
    return inst;
}

TemplateInstance identity_instance()
{
    TemplateInstance inst;
    inst.id = "identity";
    inst.replaces = 0;
    inst.success_gas_delta = 0;
    return inst;
}

// ---- condition expressions -------------------------------------------------

bool cond_equal(const CondExpr& a, const CondExpr& b)
{
    if (a.op != b.op || a.value != b.value || a.name != b.name)
        return false;
    const auto sub_equal = [](const CondPtr& x, const CondPtr& y) {
        if (!x || !y)
            return !x && !y;
        return cond_equal(*x, *y);
    };
    return sub_equal(a.lhs, b.lhs) && sub_equal(a.rhs, b.rhs);
}

namespace
{
std::string format_number(const u256& value)
{
    if (value < 1000000)
        return value.str();
    return word_to_hex(value);
}
}  // namespace

std::string pretty_print_condition(const CondExpr& e)
{
    using Op = CondExpr::Op;
    const auto binary = [&](const char* op) {
        return "(" + pretty_print_condition(*e.lhs) + " " + op + " " +
               pretty_print_condition(*e.rhs) + ")";
    };
    switch (e.op)
    {
    case Op::literal:
        return format_number(e.value);
    case Op::sload:
        return "sload(" + (e.name.empty() ? format_number(e.value) : e.name) + ")";
    case Op::caller:
        return "caller()";
    case Op::callvalue:
        return "callvalue()";
    case Op::calldata:
        return "calldata(" + format_number(e.value) + ")";
    case Op::eq:
        return binary("==");
    case Op::ne:
        return binary("!=");
    case Op::lt:
        return binary("<");
    case Op::le:
        return binary("<=");
    case Op::gt:
        return binary(">");
    case Op::ge:
        return binary(">=");
    case Op::logical_and:
        return binary("and");
    case Op::logical_or:
        return binary("or");
    case Op::logical_not:
        return "not " + pretty_print_condition(*e.lhs);
    }
    return "?";
}

// ---- DSL parsing -----------------------------------------------------------

namespace
{
struct Token
{
    enum class Kind
    {
        ident,
        number,
        lparen,
        rparen,
        op,  // == != < <= > >=
        end,
    };
    Kind kind = Kind::end;
    std::string text;
    u256 number;
    size_t column = 0;
};

[[noreturn]] void syntax_error(size_t line, size_t column, const std::string& what)
{
    std::ostringstream msg;
    msg << "DSL syntax error at " << line << ":" << column << ": " << what;
    throw Error{Errc::dsl_syntax_error, msg.str()};
}

class ExprLexer
{
public:
    ExprLexer(std::string_view text, size_t line, size_t column_base)
      : text_{text}, line_{line}, column_base_{column_base}
    {
        advance();
    }

    const Token& peek() const { return current_; }

    Token take()
    {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        syntax_error(line_, column_base_ + current_.column, what);
    }

private:
    void advance()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        current_ = Token{};
        current_.column = pos_ + 1;
        if (pos_ >= text_.size())
        {
            current_.kind = Token::Kind::end;
            return;
        }
        const char c = text_[pos_];
        if (c == '(')
        {
            current_ = {Token::Kind::lparen, "(", 0, pos_ + 1};
            ++pos_;
            return;
        }
        if (c == ')')
        {
            current_ = {Token::Kind::rparen, ")", 0, pos_ + 1};
            ++pos_;
            return;
        }
        if (c == '=' || c == '!' || c == '<' || c == '>')
        {
            std::string op{c};
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=')
                op += '=';
            if (op == "=" || op == "!")
                syntax_error(line_, column_base_ + pos_ + 1, "expected comparison operator");
            current_ = {Token::Kind::op, op, 0, pos_ + 1};
            pos_ += op.size();
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
        {
            size_t end = pos_;
            const bool hex = text_.compare(pos_, 2, "0x") == 0 || text_.compare(pos_, 2, "0X") == 0;
            if (hex)
                end += 2;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end]))))
                ++end;
            const std::string digits{text_.substr(pos_, end - pos_)};
            Token t{Token::Kind::number, digits, 0, pos_ + 1};
            try
            {
                t.number = word_from_string(digits);
            }
            catch (const Error&)
            {
                syntax_error(line_, column_base_ + pos_ + 1, "bad number: " + digits);
            }
            current_ = t;
            pos_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        {
            size_t end = pos_;
            while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                             text_[end] == '_'))
                ++end;
            current_ = {Token::Kind::ident, std::string{text_.substr(pos_, end - pos_)}, 0, pos_ + 1};
            pos_ = end;
            return;
        }
        syntax_error(line_, column_base_ + pos_ + 1, std::string{"unexpected character '"} + c + "'");
    }

    std::string_view text_;
    size_t line_;
    size_t column_base_;
    size_t pos_ = 0;
    Token current_;
};

class CondParser
{
public:
    CondParser(std::string_view text, size_t line, size_t column_base, const NameMap& names)
      : lexer_{text, line, column_base}, line_{line}, names_{names}
    {}

    CondPtr parse()
    {
        CondPtr expr = parse_or();
        if (lexer_.peek().kind != Token::Kind::end)
            lexer_.fail("trailing tokens after condition");
        return expr;
    }

private:
    static std::shared_ptr<CondExpr> make(
        CondExpr::Op op, CondPtr lhs = nullptr, CondPtr rhs = nullptr)
    {
        auto node = std::make_shared<CondExpr>();
        node->op = op;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        return node;
    }

    CondPtr parse_or()
    {
        CondPtr lhs = parse_and();
        while (lexer_.peek().kind == Token::Kind::ident && lexer_.peek().text == "or")
        {
            lexer_.take();
            lhs = make(CondExpr::Op::logical_or, lhs, parse_and());
        }
        return lhs;
    }

    CondPtr parse_and()
    {
        CondPtr lhs = parse_not();
        while (lexer_.peek().kind == Token::Kind::ident && lexer_.peek().text == "and")
        {
            lexer_.take();
            lhs = make(CondExpr::Op::logical_and, lhs, parse_not());
        }
        return lhs;
    }

    CondPtr parse_not()
    {
        if (lexer_.peek().kind == Token::Kind::ident && lexer_.peek().text == "not")
        {
            lexer_.take();
            return make(CondExpr::Op::logical_not, parse_not());
        }
        return parse_cmp();
    }

    CondPtr parse_cmp()
    {
        CondPtr lhs = parse_primary();
        if (lexer_.peek().kind == Token::Kind::op)
        {
            const std::string op = lexer_.take().text;
            CondPtr rhs = parse_primary();
            if (op == "==")
                return make(CondExpr::Op::eq, lhs, rhs);
            if (op == "!=")
                return make(CondExpr::Op::ne, lhs, rhs);
            if (op == "<")
                return make(CondExpr::Op::lt, lhs, rhs);
            if (op == "<=")
                return make(CondExpr::Op::le, lhs, rhs);
            if (op == ">")
                return make(CondExpr::Op::gt, lhs, rhs);
            return make(CondExpr::Op::ge, lhs, rhs);
        }
        return lhs;
    }

    CondPtr parse_primary()
    {
        const Token t = lexer_.take();
        if (t.kind == Token::Kind::number)
        {
            auto node = make(CondExpr::Op::literal);
            node->value = t.number;
            return node;
        }
        if (t.kind == Token::Kind::lparen)
        {
            CondPtr inner = parse_or();
            expect_rparen();
            return inner;
        }
        if (t.kind != Token::Kind::ident)
            lexer_.fail("expected literal, builtin, or '('");

        if (t.text == "caller" || t.text == "callvalue")
        {
            expect_lparen();
            expect_rparen();
            return make(t.text == "caller" ? CondExpr::Op::caller : CondExpr::Op::callvalue);
        }
        if (t.text == "calldata")
        {
            expect_lparen();
            const Token arg = lexer_.take();
            if (arg.kind != Token::Kind::number)
                lexer_.fail("calldata() takes a word index");
            expect_rparen();
            auto node = make(CondExpr::Op::calldata);
            node->value = arg.number;
            return node;
        }
        if (t.text == "sload")
        {
            expect_lparen();
            const Token arg = lexer_.take();
            auto node = make(CondExpr::Op::sload);
            auto& slot = *node;
            if (arg.kind == Token::Kind::number)
            {
                slot.value = arg.number;
            }
            else if (arg.kind == Token::Kind::ident)
            {
                const auto it = names_.storage.find(arg.text);
                if (it == names_.storage.end())
                    throw Error{Errc::unresolved_storage_name,
                        "line " + std::to_string(line_) + ": storage name '" + arg.text +
                            "' not in the name map"};
                slot.value = it->second;
                slot.name = arg.text;
            }
            else
            {
                lexer_.fail("sload() takes a slot number or name");
            }
            expect_rparen();
            return node;
        }
        lexer_.fail("unknown builtin '" + t.text + "'");
    }

    void expect_lparen()
    {
        if (lexer_.take().kind != Token::Kind::lparen)
            lexer_.fail("expected '('");
    }
    void expect_rparen()
    {
        if (lexer_.take().kind != Token::Kind::rparen)
            lexer_.fail("expected ')'");
    }

    ExprLexer lexer_;
    size_t line_;
    const NameMap& names_;
};

bool is_selector_hex(std::string_view text)
{
    if (!(text.starts_with("0x") || text.starts_with("0X")) || text.size() != 10)
        return false;
    return std::all_of(text.begin() + 2, text.end(),
        [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

FunctionRef parse_function_ref(std::string text, const NameMap& names)
{
    FunctionRef ref;
    ref.text = text;
    if (is_selector_hex(text))
    {
        const auto bytes = from_hex(text);
        ref.selector = static_cast<uint32_t>(bytes[0]) << 24 | static_cast<uint32_t>(bytes[1]) << 16 |
                       static_cast<uint32_t>(bytes[2]) << 8 | bytes[3];
    }
    else if (text.find('(') != std::string::npos)
    {
        ref.selector = function_selector_u32(text);
    }
    else
    {
        const auto it = names.functions.find(text);
        if (it != names.functions.end())
        {
            if (is_selector_hex(it->second))
            {
                const auto bytes = from_hex(it->second);
                ref.selector = static_cast<uint32_t>(bytes[0]) << 24 |
                               static_cast<uint32_t>(bytes[1]) << 16 |
                               static_cast<uint32_t>(bytes[2]) << 8 | bytes[3];
            }
            else
            {
                ref.selector = function_selector_u32(it->second);
            }
        }
        // Bare names without a binding stay unresolved; resolving them is an
        // error only when the clause is actually specialized.
    }
    return ref;
}
}  // namespace

NameMap parse_name_map(const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::exception& e)
    {
        throw Error{Errc::bad_config, std::string{"name map JSON: "} + e.what()};
    }
    NameMap names;
    const auto read_slot = [](const json& v) -> u256 {
        if (v.is_number_unsigned())
            return u256{v.get<uint64_t>()};
        if (v.is_string())
            return word_from_string(v.get<std::string>());
        throw Error{Errc::bad_config, "storage slot must be a number or string"};
    };
    if (doc.contains("storage") || doc.contains("functions"))
    {
        for (const auto& [key, value] : doc.value("storage", json::object()).items())
            names.storage[key] = read_slot(value);
        for (const auto& [key, value] : doc.value("functions", json::object()).items())
            names.functions[key] = value.get<std::string>();
    }
    else
    {
        for (const auto& [key, value] : doc.items())
            names.storage[key] = read_slot(value);
    }
    return names;
}

PatchDslFile parse_patch_dsl(const std::string& text, const NameMap& names)
{
    PatchDslFile file;
    enum class Mode
    {
        none,
        add_require,
        delete_function,
    };
    Mode mode = Mode::none;
    RequireClause* current = nullptr;

    std::istringstream stream{text};
    std::string raw;
    size_t line_no = 0;
    while (std::getline(stream, raw))
    {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        size_t indent = 0;
        while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t'))
            ++indent;
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
            line.pop_back();
        if (indent >= line.size())
            continue;
        std::string body = line.substr(indent);

        if (indent == 0)
        {
            if (body == "add_require_patch:")
            {
                mode = Mode::add_require;
                current = nullptr;
            }
            else if (body == "delete_public_function_patch:")
            {
                mode = Mode::delete_function;
            }
            else
            {
                syntax_error(line_no, 1, "unknown clause '" + body + "'");
            }
            continue;
        }

        if (body.starts_with("-"))
        {
            size_t item_start = 1;
            while (item_start < body.size() &&
                   std::isspace(static_cast<unsigned char>(body[item_start])))
                ++item_start;
            const std::string item = body.substr(item_start);
            if (item.empty())
                syntax_error(line_no, indent + 1, "empty list item");
            if (mode == Mode::delete_function)
            {
                file.delete_public_function.push_back(parse_function_ref(item, names));
            }
            else if (mode == Mode::add_require)
            {
                if (current == nullptr)
                    syntax_error(line_no, indent + 1, "condition outside a function block");
                CondParser parser{item, line_no, indent + item_start, names};
                current->conditions.push_back(parser.parse());
            }
            else
            {
                syntax_error(line_no, indent + 1, "list item outside a clause");
            }
            continue;
        }

        if (mode == Mode::add_require && body.ends_with(":"))
        {
            body.pop_back();
            while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
                body.pop_back();
            file.add_require.push_back(RequireClause{parse_function_ref(body, names), {}});
            current = &file.add_require.back();
            continue;
        }
        syntax_error(line_no, indent + 1, "unexpected line '" + body + "'");
    }
    return file;
}

std::string pretty_print_dsl(const PatchDslFile& file)
{
    std::string out;
    if (!file.add_require.empty())
    {
        out += "add_require_patch:\n";
        for (const auto& clause : file.add_require)
        {
            out += "  " + clause.function.text + ":\n";
            for (const auto& cond : clause.conditions)
                out += "    - " + pretty_print_condition(*cond) + "\n";
        }
    }
    if (!file.delete_public_function.empty())
    {
        if (!out.empty())
            out += "\n";
        out += "delete_public_function_patch:\n";
        for (const auto& fn : file.delete_public_function)
            out += "  - " + fn.text + "\n";
    }
    return out;
}

// ---- condition compilation ---------------------------------------------

namespace
{
struct CondCode
{
    std::vector<AsmOp> ops;
    int64_t gas = 0;
};

void emit(CondCode& code, uint8_t opcode)
{
    code.ops.push_back(AsmOp::instr(opcode));
    code.gas += static_gas_of(opcode);
}

void emit_push(CondCode& code, const u256& value)
{
    code.ops.push_back(AsmOp::push(value));
    code.gas += 3;
}

bool yields_bool(const CondExpr& e)
{
    using Op = CondExpr::Op;
    switch (e.op)
    {
    case Op::eq:
    case Op::ne:
    case Op::lt:
    case Op::le:
    case Op::gt:
    case Op::ge:
    case Op::logical_and:
    case Op::logical_or:
    case Op::logical_not:
        return true;
    default:
        return false;
    }
}

void compile_value(const CondExpr& e, CondCode& code);

void compile_bool(const CondExpr& e, CondCode& code)
{
    compile_value(e, code);
    if (!yields_bool(e))
    {
        // Normalize to 0/1 so AND/OR behave logically.
        emit(code, OP_ISZERO);
        emit(code, OP_ISZERO);
    }
}

void compile_value(const CondExpr& e, CondCode& code)
{
    using Op = CondExpr::Op;
    const auto comparison = [&](uint8_t opcode, bool negate) {
        // EVM comparison opcodes consume (top, next); evaluate rhs first so
        // the lhs ends up on top.
        compile_value(*e.rhs, code);
        compile_value(*e.lhs, code);
        emit(code, opcode);
        if (negate)
            emit(code, OP_ISZERO);
    };
    switch (e.op)
    {
    case Op::literal:
        emit_push(code, e.value);
        return;
    case Op::sload:
        emit_push(code, e.value);
        emit(code, OP_SLOAD);
        return;
    case Op::caller:
        emit(code, OP_CALLER);
        return;
    case Op::callvalue:
        emit(code, OP_CALLVALUE);
        return;
    case Op::calldata:
        emit_push(code, 4 + e.value * 32);  // word index within the ABI arguments
        emit(code, OP_CALLDATALOAD);
        return;
    case Op::eq:
        comparison(OP_EQ, false);
        return;
    case Op::ne:
        comparison(OP_EQ, true);
        return;
    case Op::lt:
        comparison(OP_LT, false);
        return;
    case Op::ge:
        comparison(OP_LT, true);
        return;
    case Op::gt:
        comparison(OP_GT, false);
        return;
    case Op::le:
        comparison(OP_GT, true);
        return;
    case Op::logical_and:
        compile_bool(*e.lhs, code);
        compile_bool(*e.rhs, code);
        emit(code, OP_AND);
        return;
    case Op::logical_or:
        compile_bool(*e.lhs, code);
        compile_bool(*e.rhs, code);
        emit(code, OP_OR);
        return;
    case Op::logical_not:
        compile_value(*e.lhs, code);
        emit(code, OP_ISZERO);
        return;
    }
}
}  // namespace

// ---- dispatcher ----------------------------------------------------------

DispatcherInfo locate_dispatcher(const Program& program, const PartialCfg& cfg)
{
    DispatcherInfo info;
    if (cfg.blocks.empty())
        throw Error{Errc::dispatcher_not_recognized, "empty code"};

    bool saw_calldata_access = false;
    uint32_t block_index = 0;
    for (unsigned hops = 0; hops < 128; ++hops)
    {
        const BasicBlock& block = cfg.blocks[block_index];
        const auto& instrs = program.instructions;
        for (uint32_t i = 0; i < block.instruction_count; ++i)
        {
            const Instruction& instr = instrs[block.first_instruction + i];
            if (instr.opcode == OP_CALLDATALOAD || instr.opcode == OP_CALLDATASIZE)
                saw_calldata_access = true;
            if (instr.opcode != OP_PUSH1 + 3 || i + 3 >= block.instruction_count)
                continue;
            const Instruction& eq = instrs[block.first_instruction + i + 1];
            const Instruction& target = instrs[block.first_instruction + i + 2];
            const Instruction& jumpi = instrs[block.first_instruction + i + 3];
            if (eq.opcode == OP_EQ && target.is_push() && jumpi.opcode == OP_JUMPI)
            {
                DispatchSite site;
                site.selector = static_cast<uint32_t>(instr.push_value());
                site.entry_address = static_cast<uint32_t>(target.push_value());
                site.push_pc = target.offset;
                site.jumpi_pc = jumpi.offset;
                site.block_start = block.start;
                info.sites.emplace(site.selector, site);
            }
        }
        const int next = cfg.fallthrough_successor(block_index);
        if (next < 0)
            break;
        block_index = static_cast<uint32_t>(next);
    }

    if (!saw_calldata_access)
        throw Error{Errc::dispatcher_not_recognized, "entry code never inspects calldata"};
    return info;
}

uint32_t resolve_function_ref(const FunctionRef& ref, const NameMap& names)
{
    if (ref.selector)
        return *ref.selector;
    const FunctionRef reparsed = parse_function_ref(ref.text, names);
    if (reparsed.selector)
        return *reparsed.selector;
    throw Error{Errc::function_not_found,
        "function '" + ref.text + "' has no selector binding in the name map"};
}

std::pair<PatchPoint, TemplateInstance> specialize_add_require(const RequireClause& clause,
    const DispatcherInfo& dispatcher, const Program& program, const PartialCfg& cfg,
    const NameMap& names)
{
    const uint32_t selector = resolve_function_ref(clause.function, names);
    const auto it = dispatcher.sites.find(selector);
    if (it == dispatcher.sites.end())
        throw Error{Errc::function_not_found,
            "selector for '" + clause.function.text + "' not present in the dispatcher"};

    const BasicBlock* entry = cfg.block_starting_at(it->second.entry_address);
    if (entry == nullptr || !entry->starts_with_jumpdest)
        throw Error{Errc::function_not_found,
            "dispatcher target of '" + clause.function.text + "' is not a JUMPDEST block"};
    if (entry->instruction_count < 2)
        throw Error{Errc::function_not_found,
            "entry block of '" + clause.function.text + "' is too small to patch"};

    // Fold the condition list into one conjunction guarded by a single
    // revert.
    if (clause.conditions.empty())
        throw Error{Errc::dsl_syntax_error,
            "add_require for '" + clause.function.text + "' has no conditions"};
    CondPtr cond = clause.conditions.front();
    for (size_t i = 1; i < clause.conditions.size(); ++i)
    {
        auto node = std::make_shared<CondExpr>();
        node->op = CondExpr::Op::logical_and;
        node->lhs = cond;
        node->rhs = clause.conditions[i];
        cond = node;
    }

    CondCode code;
    compile_value(*cond, code);

    TemplateInstance inst;
    inst.id = "add_require";
    inst.replaces = 0;
    inst.label_count = 1;
    const LabelId ok = 0;
    inst.ops = std::move(code.ops);
    inst.ops.push_back(AsmOp::push_label(ok));
    inst.ops.push_back(AsmOp::instr(OP_JUMPI));
    inst.ops.push_back(AsmOp::push(0));
    inst.ops.push_back(AsmOp::instr(OP_DUP1));
    inst.ops.push_back(AsmOp::instr(OP_REVERT));
    inst.ops.push_back(AsmOp::bind(ok));
    inst.ops.push_back(AsmOp::instr(OP_JUMPDEST));
    inst.success_gas_delta = code.gas + 3 + 10 + 1;

    PatchPoint point;
    point.pc = program.instructions[entry->first_instruction + 1].offset;
    point.kind = "add_require";
    point.block = *entry;
    return {point, inst};
}

std::pair<PatchPoint, TemplateInstance> specialize_delete_public_function(
    const FunctionRef& function, const DispatcherInfo& dispatcher, const PartialCfg& cfg,
    const NameMap& names)
{
    const uint32_t selector = resolve_function_ref(function, names);
    const auto it = dispatcher.sites.find(selector);
    if (it == dispatcher.sites.end())
        throw Error{Errc::function_not_found,
            "selector for '" + function.text + "' not present in the dispatcher"};

    // Replace `PUSHk <body>; JUMPI` with a revert when the comparison hit.
    // Non-matching selectors continue through the dispatcher unchanged.
    TemplateInstance inst;
    inst.id = "delete_public_function";
    inst.replaces = 2;
    inst.label_count = 1;
    const LabelId next = 0;
    inst.ops = {
        AsmOp::instr(OP_ISZERO),
        AsmOp::push_label(next),
        AsmOp::instr(OP_JUMPI),
        AsmOp::push(0),
        AsmOp::instr(OP_DUP1),
        AsmOp::instr(OP_REVERT),
        AsmOp::bind(next),
        AsmOp::instr(OP_JUMPDEST),
    };
    inst.success_gas_delta = 4;  // ISZERO+PUSH+JUMPI+JUMPDEST vs PUSH+JUMPI

    PatchPoint point;
    point.pc = it->second.push_pc;
    point.kind = "delete_public_function";
    point.block = block_containing(cfg, it->second.push_pc);
    return {point, inst};
}

// ---- report-driven planning ------------------------------------------------

PatchPlan build_patch_plan(const VulnerabilityReport& report, const Program& program,
    const PartialCfg& cfg, const std::optional<PatchDslFile>& dsl, const NameMap& names,
    const std::set<uint32_t>& blacklist)
{
    PatchPlan plan;

    const auto instruction_at = [&](uint32_t pc) -> const Instruction& {
        const BasicBlock& block = block_containing(cfg, pc);
        for (uint32_t i = 0; i < block.instruction_count; ++i)
        {
            const Instruction& instr = program.instructions[block.first_instruction + i];
            if (instr.offset == pc)
                return instr;
        }
        throw Error{Errc::not_on_instruction_boundary, "pc not in block"};
    };

    bool needs_dsl = false;
    for (const ReportEntry& entry : report.entries)
    {
        if (blacklist.count(entry.pc))
        {
            plan.skipped_pcs.push_back(entry.pc);
            plan.warnings.push_back(
                "pc 0x" + word_to_hex(entry.pc).substr(2) + " blacklisted; not patched");
            continue;
        }
        if (entry.kind == VulnKind::access_control)
        {
            needs_dsl = true;
            continue;
        }

        const Instruction& instr = instruction_at(entry.pc);
        const uint8_t expected = entry.kind == VulnKind::int_add_overflow ? OP_ADD :
                                 entry.kind == VulnKind::int_sub_underflow ? OP_SUB :
                                                                             OP_MUL;
        if (instr.opcode != expected)
            throw Error{Errc::rewrite_diagnostic,
                std::string{"report kind "} + vuln_kind_name(entry.kind) + " does not match " +
                    instr.mnemonic() + " at pc " + std::to_string(entry.pc)};

        if (entry.kind == VulnKind::int_add_overflow)
        {
            // The compiler lowers `x - small_const` to `(~const) ADD`; a
            // checked unsigned add on that pattern always fires. Patch it
            // anyway but tell the operator, who may blacklist the pc.
            const BasicBlock& block = block_containing(cfg, entry.pc);
            for (uint32_t i = 0; i < block.instruction_count; ++i)
            {
                const Instruction& prior = program.instructions[block.first_instruction + i];
                if (prior.offset >= entry.pc)
                    break;
                if (prior.opcode == OP_NOT)
                {
                    plan.warnings.push_back("pc " + std::to_string(entry.pc) +
                                            ": ADD preceded by NOT looks like a signed/negated "
                                            "idiom; verify or blacklist this location");
                    break;
                }
            }
        }

        PatchPoint point;
        point.pc = entry.pc;
        point.block = block_containing(cfg, entry.pc);
        TemplateInstance inst;
        switch (entry.kind)
        {
        case VulnKind::int_add_overflow:
            inst = checked_add_instance();
            break;
        case VulnKind::int_sub_underflow:
            inst = checked_sub_instance();
            break;
        case VulnKind::int_mul_overflow:
            inst = checked_mul_instance();
            break;
        default:
            break;
        }
        point.kind = inst.id;
        plan.patches.emplace_back(std::move(point), std::move(inst));
    }

    if (dsl && (!dsl->add_require.empty() || !dsl->delete_public_function.empty()))
    {
        const DispatcherInfo dispatcher = locate_dispatcher(program, cfg);
        for (const auto& clause : dsl->add_require)
            plan.patches.push_back(
                specialize_add_require(clause, dispatcher, program, cfg, names));
        for (const auto& fn : dsl->delete_public_function)
            plan.patches.push_back(
                specialize_delete_public_function(fn, dispatcher, cfg, names));
    }
    else if (needs_dsl)
    {
        throw Error{Errc::bad_config,
            "report contains access_control entries but no patch DSL was supplied"};
    }

    std::sort(plan.patches.begin(), plan.patches.end(),
        [](const auto& a, const auto& b) { return a.first.pc < b.first.pc; });
    for (size_t i = 1; i < plan.patches.size(); ++i)
        if (plan.patches[i].first.pc == plan.patches[i - 1].first.pc)
            throw Error{Errc::overlapping_patches,
                "two patches at pc " + std::to_string(plan.patches[i].first.pc)};
    return plan;
}

}  // namespace evmfix
