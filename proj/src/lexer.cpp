#include "fpmc/lexer.h"

#include <array>
#include <cctype>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

constexpr std::array<std::string_view, 8> kMultiCharSymbols = {"||", "|>", "->", "=>", "<=", ">=", "!=", "=="};
constexpr std::string_view kSingleCharSymbols = "&|!^()[]{},;:=<>-?*/+";

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::size_t line_start = 0;

    auto make = [&](Token::Kind kind, std::size_t begin, std::size_t end) {
        Token token;
        token.kind = kind;
        token.text = std::string(text.substr(begin, end - begin));
        token.line = line;
        token.column = begin - line_start + 1;
        token.offset = begin;
        tokens.push_back(std::move(token));
    };

    while (pos < text.size()) {
        char const c = text[pos];
        if (c == '\n') {
            ++pos;
            ++line;
            line_start = pos;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
            continue;
        }
        if (c == '#' || (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/')) {
            while (pos < text.size() && text[pos] != '\n') {
                ++pos;
            }
            continue;
        }
        if (ident_start(c)) {
            std::size_t const begin = pos;
            while (pos < text.size() && ident_char(text[pos])) {
                ++pos;
            }
            make(Token::Kind::Identifier, begin, pos);
            continue;
        }
        if (digit(c) || (c == '.' && pos + 1 < text.size() && digit(text[pos + 1]))) {
            std::size_t const begin = pos;
            while (pos < text.size() && digit(text[pos])) {
                ++pos;
            }
            if (pos < text.size() && text[pos] == '.') {
                ++pos;
                while (pos < text.size() && digit(text[pos])) {
                    ++pos;
                }
            }
            if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
                std::size_t look = pos + 1;
                if (look < text.size() && (text[look] == '-' || text[look] == '+')) {
                    ++look;
                }
                if (look < text.size() && digit(text[look])) {
                    pos = look;
                    while (pos < text.size() && digit(text[pos])) {
                        ++pos;
                    }
                }
            }
            make(Token::Kind::Number, begin, pos);
            continue;
        }
        if (c == '"') {
            std::size_t const begin = pos;
            ++pos;
            std::string value;
            while (pos < text.size() && text[pos] != '"' && text[pos] != '\n') {
                if (text[pos] == '\\' && pos + 1 < text.size()) {
                    ++pos;
                }
                value.push_back(text[pos++]);
            }
            if (pos >= text.size() || text[pos] != '"') {
                throw ParseError("unterminated string", line, begin - line_start + 1);
            }
            ++pos;
            make(Token::Kind::String, begin, pos);
            tokens.back().text = std::move(value);
            continue;
        }
        bool matched = false;
        for (auto symbol : kMultiCharSymbols) {
            if (text.substr(pos, symbol.size()) == symbol) {
                make(Token::Kind::Symbol, pos, pos + symbol.size());
                pos += symbol.size();
                matched = true;
                break;
            }
        }
        if (matched) {
            continue;
        }
        if (kSingleCharSymbols.find(c) != std::string_view::npos) {
            make(Token::Kind::Symbol, pos, pos + 1);
            ++pos;
            continue;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", line, pos - line_start + 1);
    }
    Token end;
    end.kind = Token::Kind::End;
    end.line = line;
    end.column = pos - line_start + 1;
    end.offset = pos;
    tokens.push_back(end);
    return tokens;
}

std::string describe(Token const& token) {
    switch (token.kind) {
        case Token::Kind::End:
            return "end of input";
        case Token::Kind::String:
            return "string \"" + token.text + "\"";
        default:
            return "'" + token.text + "'";
    }
}

TokenStream::TokenStream(std::vector<Token> tokens, bool single_line)
    : tokens_(std::move(tokens)), single_line_(single_line) {}

Token const& TokenStream::peek(std::size_t ahead) const {
    std::size_t const i = std::min(index_ + ahead, tokens_.size() - 1);
    return tokens_[i];
}

Token const& TokenStream::next() {
    Token const& token = tokens_[index_];
    if (index_ + 1 < tokens_.size()) {
        ++index_;
    }
    return token;
}

bool TokenStream::accept_symbol(std::string_view symbol) {
    if (peek().is_symbol(symbol)) {
        next();
        return true;
    }
    return false;
}

bool TokenStream::accept_keyword(std::string_view keyword) {
    if (peek().is_keyword(keyword)) {
        next();
        return true;
    }
    return false;
}

Token const& TokenStream::expect_symbol(std::string_view symbol) {
    if (!peek().is_symbol(symbol)) {
        fail("expected '" + std::string(symbol) + "' but found " + describe(peek()));
    }
    return next();
}

Token const& TokenStream::expect_keyword(std::string_view keyword) {
    if (!peek().is_keyword(keyword)) {
        fail("expected '" + std::string(keyword) + "' but found " + describe(peek()));
    }
    return next();
}

Token const& TokenStream::expect_identifier(std::string_view what) {
    if (peek().kind != Token::Kind::Identifier) {
        fail("expected " + std::string(what) + " but found " + describe(peek()));
    }
    return next();
}

void TokenStream::fail(Token const& at, std::string const& message) const {
    throw ParseError(message, single_line_ ? 0 : at.line, at.column);
}

}  // namespace fpmc
