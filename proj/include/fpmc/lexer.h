#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fpmc {

struct Token {
    enum class Kind { Identifier, Number, String, Symbol, End };

    Kind kind = Kind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t offset = 0;

    bool is(Kind k, std::string_view t) const { return kind == k && text == t; }
    bool is_symbol(std::string_view t) const { return is(Kind::Symbol, t); }
    bool is_keyword(std::string_view t) const { return is(Kind::Identifier, t); }
};

/// Splits model, property and expression text into tokens. `//` and `#`
/// start comments running to the end of the line.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with error reporting helpers shared by the
/// expression, property and model parsers.
class TokenStream {
public:
    /// `single_line` makes errors report column only (line 0).
    TokenStream(std::vector<Token> tokens, bool single_line);

    Token const& peek(std::size_t ahead = 0) const;
    Token const& next();
    bool at_end() const { return peek().kind == Token::Kind::End; }

    bool accept_symbol(std::string_view symbol);
    bool accept_keyword(std::string_view keyword);
    Token const& expect_symbol(std::string_view symbol);
    Token const& expect_keyword(std::string_view keyword);
    Token const& expect_identifier(std::string_view what);

    [[noreturn]] void fail(Token const& at, std::string const& message) const;
    [[noreturn]] void fail(std::string const& message) const { fail(peek(), message); }

    std::size_t position() const { return index_; }
    void rewind(std::size_t position) { index_ = position; }

private:
    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    bool single_line_;
};

std::string describe(Token const& token);

}  // namespace fpmc
