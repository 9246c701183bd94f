#include <algorithm>
#include <stdexcept>

#include "kmc/dsl.hpp"

namespace kmc {

namespace {

constexpr std::size_t kMaxNesting = 2000;

enum class Tok { Ident, Punct, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  SourceSpan span;
};

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run(std::vector<ParseError>& errors) {
    std::vector<Token> tokens;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      SourceSpan start = here();
      if (is_alpha(c)) {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]) || text_[pos_] == '_'))
          advance();
        tokens.push_back({Tok::Ident, std::string(text_.substr(begin, pos_ - begin)), finish(start)});
        continue;
      }
      if (std::string_view(":.;!?<>{}()").find(c) != std::string_view::npos) {
        advance();
        tokens.push_back({Tok::Punct, std::string(1, c), finish(start)});
        continue;
      }
      // One UTF-8 sequence (or one stray byte) per invalid character.
      advance();
      while (pos_ < text_.size() && (static_cast<unsigned char>(text_[pos_]) & 0xC0) == 0x80) advance();
      errors.push_back({ParseError::Kind::Syntax, finish(start),
                        is_digit(c) ? "identifiers must start with a letter"
                                    : "unexpected character '" + std::string(text_.substr(start.offset, pos_ - start.offset)) + "'"});
    }
    tokens.push_back({Tok::Eof, "", eof_span()});
    return tokens;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
      ++column_;
    }
    ++pos_;
  }

  SourceSpan here() const {
    return {static_cast<std::uint32_t>(line_), static_cast<std::uint32_t>(column_), 1,
            static_cast<std::uint32_t>(pos_)};
  }

  SourceSpan finish(SourceSpan start) const {
    start.length = static_cast<std::uint32_t>(std::max<std::size_t>(1, column_ - start.column));
    return start;
  }

  // The last character of the input, so that "unexpected end of input" still
  // points inside the text.
  SourceSpan eof_span() const {
    if (text_.empty()) return {1, 1, 1, 0};
    std::size_t last = text_.size() - 1;
    while (last > 0 && (static_cast<unsigned char>(text_[last]) & 0xC0) == 0x80) --last;
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < last; ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else if ((static_cast<unsigned char>(text_[i]) & 0xC0) != 0x80) {
        ++column;
      }
    }
    return {static_cast<std::uint32_t>(line), static_cast<std::uint32_t>(column), 1,
            static_cast<std::uint32_t>(last)};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

struct SyntaxError {
  SourceSpan span;
  std::string message;
};

struct Decl {
  std::string role;
  SourceSpan span;
  LocalTypePtr type;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::vector<Decl> run(std::vector<ParseError>& errors) {
    std::vector<Decl> decls;
    while (peek().kind != Tok::Eof) {
      try {
        decls.push_back(decl());
      } catch (const SyntaxError& e) {
        errors.push_back({ParseError::Kind::Syntax, e.span, e.message});
        // Resynchronize at the next declaration.
        if (peek().kind != Tok::Eof) ++pos_;
        while (peek().kind != Tok::Eof && !is_keyword(peek(), "role")) ++pos_;
      }
    }
    return decls;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  const Token& take() {
    const Token& t = peek();
    if (t.kind != Tok::Eof) ++pos_;
    return t;
  }

  static bool is_keyword(const Token& t, std::string_view word) { return t.kind == Tok::Ident && t.text == word; }
  static bool is_punct(const Token& t, char c) { return t.kind == Tok::Punct && t.text[0] == c; }

  [[noreturn]] void fail(const Token& at, const std::string& expected) const {
    std::string found = at.kind == Tok::Eof ? "end of input" : "'" + at.text + "'";
    throw SyntaxError{at.span, "expected " + expected + ", found " + found};
  }

  const Token& expect_punct(char c) {
    if (!is_punct(peek(), c)) fail(peek(), std::string("'") + c + "'");
    return take();
  }

  const Token& expect_name(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(t, what);
    if (is_reserved_word(t.text)) throw SyntaxError{t.span, "'" + t.text + "' is a reserved word and cannot be " + what};
    return take();
  }

  // Labels and sorts may reuse keywords; they only appear after `!`/`?`/`<`.
  const Token& expect_word(const std::string& what) {
    if (peek().kind != Tok::Ident) fail(peek(), what);
    return take();
  }

  Decl decl() {
    if (!is_keyword(peek(), "role")) fail(peek(), "'role'");
    take();
    const Token& name = expect_name("a role name");
    expect_punct(':');
    auto type = ltype(0);
    if (peek().kind != Tok::Eof && !is_keyword(peek(), "role")) fail(peek(), "'role' or end of input");
    return {name.text, name.span, std::move(type)};
  }

  LocalTypePtr ltype(std::size_t depth) {
    if (depth > kMaxNesting) throw SyntaxError{peek().span, "session type nested too deeply"};
    const Token& t = peek();
    if (is_keyword(t, "end")) {
      take();
      return lt::end(t.span);
    }
    if (is_keyword(t, "rec")) {
      take();
      const Token& var = expect_name("a recursion variable");
      expect_punct('.');
      return lt::rec(var.text, ltype(depth + 1), t.span);
    }
    if (is_punct(t, '(')) {
      take();
      auto inner = ltype(depth + 1);
      expect_punct(')');
      return inner;
    }
    if (is_punct(t, '{')) return branches(depth);
    if (t.kind == Tok::Ident && !is_reserved_word(t.text)) {
      if (is_punct(peek(1), '!') || is_punct(peek(1), '?')) {
        auto branch = atom(depth);
        SourceSpan span = branch.span;
        return lt::choice({std::move(branch)}, span);
      }
      take();
      return lt::var(t.text, t.span);
    }
    fail(t, "a session type");
  }

  LocalType::Branch atom(std::size_t depth) {
    const Token& peer = expect_name("a peer role");
    const Token& dir = take();  // '!' or '?', checked by the caller
    const Token& label = expect_word("a message label");
    std::string sort = "unit";
    SourceSpan span = peer.span;
    SourceSpan last = label.span;
    if (is_punct(peek(), '<')) {
      take();
      sort = expect_word("a payload sort").text;
      last = expect_punct('>').span;
    }
    if (last.line == span.line) span.length = last.column + last.length - span.column;
    expect_punct(';');
    auto cont = ltype(depth + 1);
    Action action{peer.text, dir.text == "!" ? Direction::Send : Direction::Receive, label.text, sort};
    return {std::move(action), std::move(cont), span};
  }

  LocalTypePtr branches(std::size_t depth) {
    const Token& open = peek();
    std::vector<LocalType::Branch> out;
    for (;;) {
      expect_punct('{');
      const Token& peer = peek();
      if (!(peer.kind == Tok::Ident && (is_punct(peek(1), '!') || is_punct(peek(1), '?'))))
        fail(peer, "a send or receive action");
      out.push_back(atom(depth + 1));
      expect_punct('}');
      if (!is_keyword(peek(), "or")) break;
      take();
    }
    if (out.size() == 1)
      throw SyntaxError{open.span, "braces are reserved for choices with several branches"};
    return lt::choice(std::move(out), open.span);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse_system(std::string_view text) {
  ParseResult result;
  std::vector<Token> tokens = Lexer(text).run(result.errors);
  SourceSpan eof = tokens.back().span;
  std::vector<Decl> decls = Parser(std::move(tokens)).run(result.errors);
  if (!result.errors.empty()) return result;

  ParsedSystem parsed;
  for (const auto& d : decls) {
    try {
      auto translated = translate_local_type(*d.type, d.role);
      parsed.system.add_role(d.role, std::move(translated.machine));
      parsed.transition_spans.push_back(std::move(translated.transition_spans));
    } catch (const LocalTypeError& e) {
      SourceSpan span = e.span().valid() ? e.span() : d.span;
      result.errors.push_back({ParseError::Kind::Validation, span, std::string(to_string(e.fault())) + ": " + e.what()});
      parsed.system.add_role(d.role, Machine());
      parsed.transition_spans.emplace_back();
    }
    parsed.local_types.push_back(d.type);
    parsed.role_spans.push_back(d.span);
  }

  for (auto& diag : validate_system(parsed.system)) {
    SourceSpan span = eof;
    if (diag.role) {
      span = parsed.role_spans[*diag.role];
      const auto& spans = parsed.transition_spans[*diag.role];
      if (diag.transition && *diag.transition < spans.size() && spans[*diag.transition].valid())
        span = spans[*diag.transition];
    }
    if (diag.severity == Severity::Lint) {
      parsed.lints.push_back(std::move(diag));
      continue;
    }
    result.errors.push_back({ParseError::Kind::Validation, span, std::string(to_string(diag.code)) + ": " + diag.message});
  }
  if (result.errors.empty()) result.parsed = std::move(parsed);
  return result;
}

System parse_system_or_throw(std::string_view text) {
  auto result = parse_system(text);
  if (!result) {
    const auto& e = result.errors.front();
    throw std::runtime_error(std::to_string(e.span.line) + ":" + std::to_string(e.span.column) + ": " + e.message);
  }
  return std::move(result.parsed->system);
}

}  // namespace kmc
