// Copyright 2026 The anyonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anyon/diagram.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>

namespace anyon {

DiagramError::DiagramError(const std::string& message, int line, int column)
    : FormatError(line > 0 ? "line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + message
                           : message),
      line_(line),
      column_(column) {}

namespace {

std::string layer_text(const CategorySpec& spec, const std::vector<Label>& layer) {
  std::string s = "[";
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (i) s += ", ";
    s += spec.label_name(layer[i]);
  }
  return s + "]";
}

void check_label(const CategorySpec& spec, Label a) {
  if (a < 0 || a >= spec.rank()) throw ValidationError("charge index out of range");
}

}  // namespace

Diagram Diagram::empty() { return make(Node{}); }

Diagram Diagram::identity(const CategorySpec& spec, Label a) {
  check_label(spec, a);
  Node n;
  n.kind = Kind::Identity;
  n.labels = {a};
  n.bottom = {a};
  n.top = {a};
  return make(std::move(n));
}

Diagram Diagram::identity(const CategorySpec& spec, const std::vector<Label>& strands) {
  Diagram d = empty();
  for (Label a : strands) d = tensor(d, identity(spec, a));
  return d;
}

Diagram Diagram::cup(const CategorySpec& spec, Label a) {
  check_label(spec, a);
  Node n;
  n.kind = Kind::Cup;
  n.labels = {a};
  n.top = {spec.dual(a), a};
  return make(std::move(n));
}

Diagram Diagram::cap(const CategorySpec& spec, Label a) {
  check_label(spec, a);
  Node n;
  n.kind = Kind::Cap;
  n.labels = {a};
  n.bottom = {spec.dual(a), a};
  return make(std::move(n));
}

Diagram Diagram::split(const CategorySpec& spec, Label parent, Label left, Label right) {
  check_label(spec, parent);
  check_label(spec, left);
  check_label(spec, right);
  if (!spec.fuses(left, right, parent)) {
    throw ValidationError("inadmissible vertex: " + spec.label_name(left) + " x " +
                          spec.label_name(right) + " does not contain " + spec.label_name(parent));
  }
  Node n;
  n.kind = Kind::Split;
  n.labels = {parent, left, right};
  n.bottom = {parent};
  n.top = {left, right};
  return make(std::move(n));
}

Diagram Diagram::fuse(const CategorySpec& spec, Label left, Label right, Label parent) {
  check_label(spec, parent);
  check_label(spec, left);
  check_label(spec, right);
  if (!spec.fuses(left, right, parent)) {
    throw ValidationError("inadmissible vertex: " + spec.label_name(left) + " x " +
                          spec.label_name(right) + " does not contain " + spec.label_name(parent));
  }
  Node n;
  n.kind = Kind::Fuse;
  n.labels = {left, right, parent};
  n.bottom = {left, right};
  n.top = {parent};
  return make(std::move(n));
}

namespace {

void check_range(const CategorySpec& spec, const std::vector<Label>& layer, int first, int last) {
  for (Label a : layer) check_label(spec, a);
  if (first < 0 || last < first || last >= static_cast<int>(layer.size())) {
    throw ValidationError("loop range {" + std::to_string(first) + ".." + std::to_string(last) +
                          "} is not a contiguous range of the " + std::to_string(layer.size()) +
                          "-strand layer " + layer_text(spec, layer));
  }
}

}  // namespace

Diagram Diagram::omega(const CategorySpec& spec, Label target, std::vector<Label> layer, int first,
                       int last) {
  check_label(spec, target);
  check_range(spec, layer, first, last);
  Node n;
  n.kind = Kind::Omega;
  n.labels = {target};
  n.first = first;
  n.last = last;
  n.bottom = layer;
  n.top = std::move(layer);
  return make(std::move(n));
}

Diagram Diagram::loop(const CategorySpec& spec, Label charge, std::vector<Label> layer, int first,
                      int last) {
  check_label(spec, charge);
  check_range(spec, layer, first, last);
  Node n;
  n.kind = Kind::Loop;
  n.labels = {charge};
  n.first = first;
  n.last = last;
  n.bottom = layer;
  n.top = std::move(layer);
  return make(std::move(n));
}

Diagram Diagram::scalar(Complex value) {
  Node n;
  n.kind = Kind::Scalar;
  n.value = value;
  return make(std::move(n));
}

Diagram Diagram::tensor(const Diagram& left, const Diagram& right) {
  if (left.kind() == Kind::Empty) return right;
  if (right.kind() == Kind::Empty) return left;
  Node n;
  n.kind = Kind::Tensor;
  n.bottom = left.bottom();
  n.bottom.insert(n.bottom.end(), right.bottom().begin(), right.bottom().end());
  n.top = left.top();
  n.top.insert(n.top.end(), right.top().begin(), right.top().end());
  n.children = {left, right};
  return make(std::move(n));
}

Diagram Diagram::compose(const Diagram& lower, const Diagram& upper) {
  if (lower.top() != upper.bottom()) {
    throw ValidationError("cannot stack: lower top has " + std::to_string(lower.top().size()) +
                          " strands, upper bottom has " + std::to_string(upper.bottom().size()) +
                          " (or charges differ)");
  }
  Node n;
  n.kind = Kind::Compose;
  n.bottom = lower.bottom();
  n.top = upper.top();
  n.children = {lower, upper};
  return make(std::move(n));
}

Diagram Diagram::sum(const Diagram& a, const Diagram& b) {
  if (a.bottom() != b.bottom() || a.top() != b.top()) {
    throw ValidationError("summands have different boundaries");
  }
  Node n;
  n.kind = Kind::Sum;
  n.bottom = a.bottom();
  n.top = a.top();
  n.children = {a, b};
  return make(std::move(n));
}

int Diagram::generator_count() const {
  switch (kind()) {
    case Kind::Empty:
    case Kind::Identity:
      return 0;
    case Kind::Tensor:
    case Kind::Compose:
    case Kind::Sum: {
      int n = 0;
      for (const auto& c : children()) n += c.generator_count();
      return n;
    }
    default:
      return 1;
  }
}

std::string Diagram::to_string(const CategorySpec& spec) const {
  auto name = [&](Label a) { return spec.label_name(a); };
  switch (kind()) {
    case Kind::Empty:
      return "empty";
    case Kind::Identity:
      return "id(" + name(labels()[0]) + ")";
    case Kind::Cup:
      return "cup(" + name(labels()[0]) + ")";
    case Kind::Cap:
      return "cap(" + name(labels()[0]) + ")";
    case Kind::Split:
      return "split(" + name(labels()[0]) + " -> " + name(labels()[1]) + ", " + name(labels()[2]) +
             ")";
    case Kind::Fuse:
      return "fuse(" + name(labels()[0]) + ", " + name(labels()[1]) + " -> " + name(labels()[2]) +
             ")";
    case Kind::Omega:
    case Kind::Loop:
      return std::string(kind() == Kind::Omega ? "omega(" : "loop(") + name(labels()[0]) + "){" +
             std::to_string(first()) + ".." + std::to_string(last()) + "}" +
             layer_text(spec, bottom());
    case Kind::Scalar: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "scalar(%.17g, %.17g)", value().real(), value().imag());
      return buf;
    }
    case Kind::Tensor:
      return "(" + children()[0].to_string(spec) + " | " + children()[1].to_string(spec) + ")";
    case Kind::Compose:
      return "(" + children()[0].to_string(spec) + " ; " + children()[1].to_string(spec) + ")";
    case Kind::Sum:
      return "(" + children()[0].to_string(spec) + " + " + children()[1].to_string(spec) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Ident, Number, Dollar, LParen, RParen, LBrace, RBrace, LBracket, RBracket,
                 Comma, Semicolon, Circle, Bar, Plus, Arrow, DotDot, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  Lexer(std::string_view text, int line_offset) : text_(text), line_(1 + line_offset) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      const int line = line_, col = col_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      const char c = text_[pos_];
      auto single = [&](Tok k) {
        out.push_back({k, std::string(1, c), line, col});
        advance(1);
      };
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
        if (c == '-' && peek(1) == '>') {
          out.push_back({Tok::Arrow, "->", line, col});
          advance(2);
          continue;
        }
        if (c == '.' && peek(1) == '.') {
          out.push_back({Tok::DotDot, "..", line, col});
          advance(2);
          continue;
        }
        const bool numeric = std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
        std::size_t end = pos_ + 1;
        while (end < text_.size()) {
          const char d = text_[end];
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
            ++end;
          } else if (numeric && d == '.' && !(end + 1 < text_.size() && text_[end + 1] == '.')) {
            ++end;
          } else if (numeric && (d == '-' || d == '+') &&
                     (text_[end - 1] == 'e' || text_[end - 1] == 'E')) {
            ++end;
          } else {
            break;
          }
        }
        std::string word(text_.substr(pos_, end - pos_));
        if (word == "-") throw DiagramError("unexpected '-'", line, col);
        const bool is_number = numeric;
        out.push_back({is_number ? Tok::Number : Tok::Ident, word, line, col});
        advance(end - pos_);
        continue;
      }
      switch (c) {
        case '(': single(Tok::LParen); continue;
        case ')': single(Tok::RParen); continue;
        case '{': single(Tok::LBrace); continue;
        case '}': single(Tok::RBrace); continue;
        case '[': single(Tok::LBracket); continue;
        case ']': single(Tok::RBracket); continue;
        case ',': single(Tok::Comma); continue;
        case ';': single(Tok::Semicolon); continue;
        case '|': single(Tok::Bar); continue;
        case '+': single(Tok::Plus); continue;
        case '$': single(Tok::Dollar); continue;
        default: break;
      }
      if (text_.substr(pos_, 3) == "\xE2\x88\x98") {  // U+2218 RING OPERATOR
        out.push_back({Tok::Circle, "\xE2\x88\x98", line, col});
        pos_ += 3;
        ++col_;
        continue;
      }
      throw DiagramError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

 private:
  char peek(std::size_t k) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

// Untyped syntax tree; omega/loop layers are resolved during typing.
struct Syntax {
  enum class Kind { Gen, Omega, Loop, Tensor, Compose, Sum };
  Kind kind = Kind::Gen;
  std::string name;  // generator name
  std::vector<Label> labels;
  std::vector<double> numbers;
  int first = 0, last = -1;
  std::optional<std::vector<Label>> layer;
  std::vector<std::unique_ptr<Syntax>> children;
  int line = 0, column = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const CategorySpec& spec, const DiagramBindings& bindings)
      : toks_(std::move(toks)), spec_(spec), bindings_(bindings) {}

  std::unique_ptr<Syntax> parse() {
    auto s = sum();
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "'");
    return s;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw DiagramError(msg, cur().line, cur().column);
  }
  const Token& expect(Tok k, const char* what) {
    if (cur().kind != k) {
      fail(std::string("expected ") + what + (cur().kind == Tok::End ? " before end of input"
                                                                     : ", found '" + cur().text + "'"));
    }
    return toks_[pos_++];
  }
  bool accept(Tok k) {
    if (cur().kind != k) return false;
    ++pos_;
    return true;
  }

  std::unique_ptr<Syntax> binary(Syntax::Kind kind, const Token& at, std::unique_ptr<Syntax> l,
                                 std::unique_ptr<Syntax> r) {
    auto s = std::make_unique<Syntax>();
    s->kind = kind;
    s->line = at.line;
    s->column = at.column;
    s->children.push_back(std::move(l));
    s->children.push_back(std::move(r));
    return s;
  }

  std::unique_ptr<Syntax> sum() {
    auto left = vcomp();
    while (cur().kind == Tok::Plus) {
      const Token at = cur();
      ++pos_;
      left = binary(Syntax::Kind::Sum, at, std::move(left), vcomp());
    }
    return left;
  }

  std::unique_ptr<Syntax> vcomp() {
    auto left = hcomp();
    while (cur().kind == Tok::Semicolon || cur().kind == Tok::Circle) {
      const Token at = cur();
      ++pos_;
      auto right = hcomp();
      if (at.kind == Tok::Semicolon) {
        left = binary(Syntax::Kind::Compose, at, std::move(left), std::move(right));
      } else {
        left = binary(Syntax::Kind::Compose, at, std::move(right), std::move(left));
      }
    }
    return left;
  }

  std::unique_ptr<Syntax> hcomp() {
    auto left = atom();
    while (cur().kind == Tok::Bar) {
      const Token at = cur();
      ++pos_;
      left = binary(Syntax::Kind::Tensor, at, std::move(left), atom());
    }
    return left;
  }

  Label charge() {
    const Token at = cur();
    if (accept(Tok::Dollar)) {
      const Token& id = expect(Tok::Ident, "placeholder name after '$'");
      auto it = bindings_.find(id.text);
      if (it == bindings_.end()) {
        throw DiagramError("unbound placeholder '$" + id.text + "'", at.line, at.column);
      }
      return it->second;
    }
    if (cur().kind == Tok::Ident && cur().text == "dual" && toks_[pos_ + 1].kind == Tok::LParen) {
      pos_ += 2;
      const Label inner = charge();
      expect(Tok::RParen, "')'");
      return spec_.dual(inner);
    }
    if (cur().kind != Tok::Ident && cur().kind != Tok::Number) fail("expected a charge label");
    ++pos_;
    try {
      return spec_.resolve(at.text);
    } catch (const FormatError& e) {
      throw DiagramError(e.what(), at.line, at.column);
    }
  }

  int integer() {
    const Token& t = expect(Tok::Number, "an integer");
    int v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) {
      throw DiagramError("expected an integer, found '" + t.text + "'", t.line, t.column);
    }
    return v;
  }

  double number() {
    const Token& t = expect(Tok::Number, "a number");
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) {
      throw DiagramError("malformed number '" + t.text + "'", t.line, t.column);
    }
    return v;
  }

  std::unique_ptr<Syntax> atom() {
    if (accept(Tok::LParen)) {
      auto s = sum();
      expect(Tok::RParen, "')'");
      return s;
    }
    const Token at = cur();
    if (at.kind != Tok::Ident) fail("expected a generator");
    ++pos_;
    auto s = std::make_unique<Syntax>();
    s->line = at.line;
    s->column = at.column;
    s->name = at.text;
    if (at.text == "empty") return s;
    expect(Tok::LParen, "'('");
    if (at.text == "id" || at.text == "cup" || at.text == "cap") {
      s->labels.push_back(charge());
    } else if (at.text == "split") {
      s->labels.push_back(charge());
      expect(Tok::Arrow, "'->'");
      s->labels.push_back(charge());
      expect(Tok::Comma, "','");
      s->labels.push_back(charge());
    } else if (at.text == "fuse") {
      s->labels.push_back(charge());
      expect(Tok::Comma, "','");
      s->labels.push_back(charge());
      expect(Tok::Arrow, "'->'");
      s->labels.push_back(charge());
    } else if (at.text == "omega" || at.text == "loop") {
      s->kind = at.text == "omega" ? Syntax::Kind::Omega : Syntax::Kind::Loop;
      s->labels.push_back(charge());
      expect(Tok::RParen, "')'");
      expect(Tok::LBrace, "'{'");
      s->first = integer();
      expect(Tok::DotDot, "'..'");
      s->last = integer();
      expect(Tok::RBrace, "'}'");
      if (accept(Tok::LBracket)) {
        std::vector<Label> layer;
        if (cur().kind != Tok::RBracket) {
          layer.push_back(charge());
          while (accept(Tok::Comma)) layer.push_back(charge());
        }
        expect(Tok::RBracket, "']'");
        s->layer = std::move(layer);
      }
      return s;
    } else if (at.text == "scalar") {
      s->numbers.push_back(number());
      if (accept(Tok::Comma)) s->numbers.push_back(number());
    } else {
      throw DiagramError("unknown generator '" + at.text + "'", at.line, at.column);
    }
    expect(Tok::RParen, "')'");
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const CategorySpec& spec_;
  const DiagramBindings& bindings_;
};

bool polymorphic(const Syntax& s) {
  return (s.kind == Syntax::Kind::Omega || s.kind == Syntax::Kind::Loop) && !s.layer;
}

Diagram type(const Syntax& s, const CategorySpec& spec,
             const std::optional<std::vector<Label>>& hint) {
  auto at = [&](auto&& build) -> Diagram {
    try {
      return build();
    } catch (const DiagramError&) {
      throw;
    } catch (const ValidationError& e) {
      throw DiagramError(std::string("type error: ") + e.what(), s.line, s.column);
    }
  };
  switch (s.kind) {
    case Syntax::Kind::Gen:
      return at([&] {
        if (s.name == "empty") return Diagram::empty();
        if (s.name == "id") return Diagram::identity(spec, s.labels[0]);
        if (s.name == "cup") return Diagram::cup(spec, s.labels[0]);
        if (s.name == "cap") return Diagram::cap(spec, s.labels[0]);
        if (s.name == "split") return Diagram::split(spec, s.labels[0], s.labels[1], s.labels[2]);
        if (s.name == "fuse") return Diagram::fuse(spec, s.labels[0], s.labels[1], s.labels[2]);
        const double im = s.numbers.size() > 1 ? s.numbers[1] : 0.0;
        return Diagram::scalar({s.numbers[0], im});
      });
    case Syntax::Kind::Omega:
    case Syntax::Kind::Loop: {
      const auto layer = s.layer ? s.layer : hint;
      if (!layer) {
        throw DiagramError(
            "cannot infer the strands around this loop; stack it against another layer or give "
            "them explicitly as [a, b, ...]",
            s.line, s.column);
      }
      return at([&] {
        return s.kind == Syntax::Kind::Omega
                   ? Diagram::omega(spec, s.labels[0], *layer, s.first, s.last)
                   : Diagram::loop(spec, s.labels[0], *layer, s.first, s.last);
      });
    }
    case Syntax::Kind::Tensor: {
      const Diagram l = type(*s.children[0], spec, std::nullopt);
      const Diagram r = type(*s.children[1], spec, std::nullopt);
      return Diagram::tensor(l, r);
    }
    case Syntax::Kind::Compose: {
      const Syntax& lower = *s.children[0];
      const Syntax& upper = *s.children[1];
      Diagram lo = Diagram::empty(), up = Diagram::empty();
      if (polymorphic(lower) && !polymorphic(upper)) {
        up = type(upper, spec, std::nullopt);
        lo = type(lower, spec, up.bottom());
      } else {
        lo = type(lower, spec, hint);
        up = type(upper, spec, lo.top());
      }
      return at([&] { return Diagram::compose(lo, up); });
    }
    case Syntax::Kind::Sum: {
      const Diagram a = type(*s.children[0], spec, hint);
      const Diagram b = type(*s.children[1], spec, hint);
      return at([&] { return Diagram::sum(a, b); });
    }
  }
  throw DiagramError("internal: unknown syntax node", s.line, s.column);
}

}  // namespace

Diagram parse_diagram(std::string_view text, const CategorySpec& spec,
                      const DiagramBindings& bindings, int line_offset) {
  Lexer lexer(text, line_offset);
  Parser parser(lexer.run(), spec, bindings);
  const auto syntax = parser.parse();
  return type(*syntax, spec, std::nullopt);
}

}  // namespace anyon
