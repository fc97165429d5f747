#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gorenet/dsl.hpp"
#include "gorenet/error.hpp"

namespace gorenet {

const Scenario* TwoLayerModel::find_scenario(std::string_view name) const {
  for (const auto& s : scenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const NamedScript* TwoLayerModel::find_script(std::string_view name) const {
  for (const auto& s : scripts) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view origin) {
  std::ostringstream out;
  out << origin << ':' << d.span.line << ':' << d.span.column << ": "
      << (d.severity == Severity::error ? "error" : "warning") << ": " << d.message << " [" << d.code
      << ']';
  return out.str();
}

SourceDocument read_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("io", "error while reading '" + path.string() + "'");
  return {buf.str(), path.string()};
}

namespace {

enum class Tok : std::uint8_t { string, ident, integer, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;  // decoded for strings
  Span span;
};

struct SyntaxError {
  ParseDiagnostic diagnostic;
};

// Returns the offset of the first byte that breaks UTF-8, if any.
std::optional<std::size_t> invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      n = 1, cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      n = 2, cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      n = 3, cp = c & 0x07;
    } else {
      return i;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      if (i + k >= s.size()) return i;
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += n + 1;
  }
  return std::nullopt;
}

bool ident_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '.' || c >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.span = {line_, col_, 0};
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      const std::size_t start = pos_;
      const char c = text_[pos_];
      if (c == '"') {
        t.kind = Tok::string;
        t.text = read_string(t.span);
      } else if (ident_byte(static_cast<unsigned char>(c))) {
        while (pos_ < text_.size()) {
          const auto b = static_cast<unsigned char>(text_[pos_]);
          if (ident_byte(b)) {
            advance();
          } else if (b == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] != '>' &&
                     text_[pos_ + 1] != '-' && ident_byte(static_cast<unsigned char>(text_[pos_ + 1]))) {
            advance();
          } else {
            break;
          }
        }
        t.text = std::string(text_.substr(start, pos_ - start));
        t.kind = std::all_of(t.text.begin(), t.text.end(), [](char ch) { return ch >= '0' && ch <= '9'; })
                     ? Tok::integer
                     : Tok::ident;
      } else {
        t.kind = Tok::punct;
        for (std::string_view p : {"--(", "-->", "->", "=>"}) {
          if (text_.substr(pos_, p.size()) == p) {
            t.text = std::string(p);
            break;
          }
        }
        if (t.text.empty()) {
          if (std::string_view("{}()[],;:=@").find(c) == std::string_view::npos) {
            throw SyntaxError{{Severity::error, "syntax", "unexpected character '" + std::string(1, c) + "'",
                               {line_, col_, 1}}};
          }
          t.text = std::string(1, c);
        }
        for (std::size_t k = 0; k < t.text.size(); ++k) advance();
      }
      t.span.length = pos_ - start;
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string read_string(const Span& at) {
    std::string out;
    advance();
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\n') break;
      if (c == '\\' && pos_ + 1 < text_.size()) {
        const char e = text_[pos_ + 1];
        const char* decoded = e == 'n' ? "\n" : e == 't' ? "\t" : e == '"' ? "\"" : e == '\\' ? "\\" : nullptr;
        if (decoded == nullptr) {
          throw SyntaxError{{Severity::error, "syntax", std::string("unknown escape '\\") + e + "'",
                             {line_, col_, 2}}};
        }
        out += decoded;
        advance();
        advance();
        continue;
      }
      out += c;
      advance();
    }
    throw SyntaxError{{Severity::error, "syntax", "unterminated string", {at.line, at.column, 1}}};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---- raw statements -------------------------------------------------------

struct Ref {
  bool by_id = false;
  std::string text;
  Span span;
};

struct RawElement {
  ElementKind kind;
  std::string name;
  std::optional<std::string> id;
  bool decision = false;
  Span span;
};

struct RawActor {
  ActorKind kind;
  std::string name;
  std::optional<std::string> id;
  std::vector<Ref> plays;
  std::vector<RawElement> elements;
  Span span;
};

struct RawLink {
  LinkKind kind;
  Ref a, b;
  std::optional<Polarity> polarity;
  Span span;
};

struct RawDepend {
  Ref from, to;
  std::optional<RawElement> inline_dependum;
  Ref dependum;
  Span span;
};

struct RawArc {
  Token from, to;
  std::uint32_t weight = 1;
  Span span;
};

struct RawNet {
  std::vector<std::pair<Place, Span>> places;
  std::vector<std::pair<Transition, Span>> transitions;
  std::vector<RawArc> arcs;
  std::vector<std::pair<Token, std::uint64_t>> marking;
  std::optional<Token> loop;
  std::vector<std::pair<std::string, std::vector<Token>>> scripts;
  std::vector<Token> run;
  Span span;
};

struct RawBind {
  Token place;
  std::optional<ElementKind> kind;
  Ref element;
  Polarity polarity = Polarity::help;
  Span span;
};

struct RawLabel {
  Ref element;
  QualLabel label;
};

struct RawScenario {
  std::string name;
  bool extends = false;
  std::vector<RawLabel> labels;
  Span span;
};

struct RawJudgment {
  Ref element;
  std::vector<QualLabel> given;
  QualLabel label;
  std::string scenario;
  Span span;
};

struct RawDocument {
  std::vector<RawActor> actors;
  std::vector<RawElement> free_elements;
  std::vector<RawLink> links;
  std::vector<RawDepend> depends;
  std::optional<RawNet> net;
  std::vector<RawBind> binds;
  std::optional<Ref> trigger;
  std::optional<std::vector<RawLabel>> baseline;
  std::vector<RawScenario> scenarios;
  std::vector<RawJudgment> judgments;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, bool judgments_only)
      : toks_(std::move(tokens)), judgments_only_(judgments_only) {}

  RawDocument run() {
    while (peek().kind != Tok::end) {
      if (accept(";")) continue;
      statement();
    }
    return std::move(doc_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return (t.kind == Tok::punct || t.kind == Tok::ident) && t.text == text;
  }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    Span span = at.span;
    if (at.kind == Tok::end) span.length = 0;
    throw SyntaxError{{Severity::error, "syntax", message, span}};
  }
  std::string describe(const Token& t) const {
    switch (t.kind) {
      case Tok::end: return "end of input";
      case Tok::string: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }
  const Token& expect(std::string_view text) {
    if (!is(text)) fail(peek(), "expected '" + std::string(text) + "' but found " + describe(peek()));
    return next();
  }
  const Token& expect_kind(Tok kind, std::string_view what) {
    if (peek().kind != kind) fail(peek(), "expected " + std::string(what) + " but found " + describe(peek()));
    return next();
  }
  Span span_from(const Span& start) const {
    const Token& last = toks_[pos_ == 0 ? 0 : pos_ - 1];
    Span s = start;
    if (last.span.line == start.line) {
      s.length = last.span.column + last.span.length - start.column;
    }
    return s;
  }

  std::string id_text() {
    if (peek().kind == Tok::ident || peek().kind == Tok::integer) return next().text;
    fail(peek(), "expected an identifier after '@' but found " + describe(peek()));
  }

  // Declarations accept a bare word as well as a quoted name.
  std::string declared_name(std::string_view what) {
    if (peek().kind == Tok::ident) return next().text;
    return expect_kind(Tok::string, what).text;
  }

  std::optional<std::string> optional_id() {
    if (!accept("@")) return std::nullopt;
    return id_text();
  }

  Ref ref() {
    Ref r;
    r.span = peek().span;
    if (accept("@")) {
      r.by_id = true;
      r.text = id_text();
      r.span = span_from(r.span);
    } else {
      r.text = expect_kind(Tok::string, "a quoted name or @id").text;
    }
    return r;
  }

  QualLabel label() {
    const Token& t = peek();
    if (t.kind == Tok::ident) {
      if (auto l = parse_label(t.text)) {
        next();
        return *l;
      }
    }
    fail(t, "expected a label (S, PS, C, U, PD, D) but found " + describe(t));
  }

  void statement() {
    const Token& t = peek();
    if (judgments_only_ && !is("judgment")) {
      fail(t, "judgment files may only contain judgment statements");
    }
    if (t.kind == Tok::string || is("@")) return link_statement();
    if (t.kind != Tok::ident) fail(t, "expected a statement but found " + describe(t));
    if (auto ak = parse_actor_kind(t.text)) return actor(*ak);
    if (auto ek = parse_element_kind(t.text)) {
      doc_.free_elements.push_back(element_decl(*ek));
      return;
    }
    if (t.text == "depend") return depend();
    if (t.text == "net") return net();
    if (t.text == "bind") return bind();
    if (t.text == "trigger") return trigger();
    if (t.text == "baseline") return baseline();
    if (t.text == "scenario") return scenario();
    if (t.text == "judgment") return judgment();
    fail(t, "unknown statement " + describe(t));
  }

  RawElement element_decl(ElementKind kind) {
    RawElement e{kind, "", std::nullopt, false, peek().span};
    next();
    e.name = declared_name("an element name");
    e.id = optional_id();
    e.decision = accept("decision");
    e.span = span_from(e.span);
    return e;
  }

  void actor(ActorKind kind) {
    RawActor a{kind, "", std::nullopt, {}, {}, peek().span};
    next();
    a.name = declared_name("an actor name");
    a.id = optional_id();
    a.span = span_from(a.span);
    expect("{");
    while (!accept("}")) {
      if (accept(";")) continue;
      const Token& t = peek();
      if (t.kind == Tok::end) fail(t, "unterminated actor block");
      if (t.kind == Tok::ident && t.text == "plays") {
        next();
        a.plays.push_back(ref());
      } else if (auto ek = t.kind == Tok::ident ? parse_element_kind(t.text) : std::nullopt) {
        a.elements.push_back(element_decl(*ek));
      } else {
        fail(t, "expected an element declaration or 'plays' but found " + describe(t));
      }
    }
    doc_.actors.push_back(std::move(a));
  }

  void link_statement() {
    RawLink l;
    l.span = peek().span;
    l.a = ref();
    const Token& op = peek();
    if (op.kind != Tok::ident) fail(op, "expected a link keyword but found " + describe(op));
    if (op.text == "and-of") {
      l.kind = LinkKind::decomposition;
    } else if (op.text == "means-end") {
      l.kind = LinkKind::means_end;
    } else if (op.text == "helps" || op.text == "hurts" || op.text == "makes" || op.text == "breaks") {
      l.kind = LinkKind::contribution;
      l.polarity = op.text == "helps"   ? Polarity::help
                   : op.text == "hurts" ? Polarity::hurt
                   : op.text == "makes" ? Polarity::make
                                        : Polarity::brk;
    } else {
      fail(op, "expected and-of, means-end, helps, hurts, makes or breaks but found " + describe(op));
    }
    next();
    l.b = ref();
    l.span = span_from(l.span);
    doc_.links.push_back(std::move(l));
  }

  void depend() {
    RawDepend d;
    d.span = peek().span;
    next();
    d.from = ref();
    expect("--(");
    if (accept("@")) {
      d.dependum.by_id = true;
      d.dependum.span = toks_[pos_ - 1].span;
      d.dependum.text = id_text();
    } else {
      const Token& name = expect_kind(Tok::string, "a dependum name");
      d.dependum = {false, name.text, name.span};
      if (accept(":")) {
        const Token& k = expect_kind(Tok::ident, "an element kind");
        auto kind = parse_element_kind(k.text);
        if (!kind) fail(k, "expected goal, softgoal, task or resource but found " + describe(k));
        d.inline_dependum = RawElement{*kind, name.text, std::nullopt, false, name.span};
      }
    }
    expect(")");
    expect("-->");
    d.to = ref();
    d.span = span_from(d.span);
    doc_.depends.push_back(std::move(d));
  }

  std::uint64_t integer() {
    const Token& t = expect_kind(Tok::integer, "a non-negative integer");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{}) fail(t, "integer out of range");
    return v;
  }

  const Token& node_id() {
    if (peek().kind != Tok::ident && peek().kind != Tok::integer) {
      fail(peek(), "expected a place or transition id but found " + describe(peek()));
    }
    return next();
  }

  void net() {
    const Token& head = next();
    if (doc_.net) fail(head, "only one net block is allowed");
    RawNet n;
    n.span = head.span;
    expect("{");
    while (!accept("}")) {
      if (accept(";")) continue;
      const Token& t = peek();
      const Span start = t.span;
      if (t.kind == Tok::end) fail(t, "unterminated net block");
      if (is("place")) {
        next();
        Place p;
        p.id = node_id().text;
        if (peek().kind == Tok::string) p.label = next().text;
        if (accept("as")) {
          const Token& k = expect_kind(Tok::ident, "a place kind");
          p.kind = parse_place_kind(k.text);
          if (!p.kind) fail(k, "expected goal, softgoal, task, resource or agent but found " + describe(k));
        }
        n.places.emplace_back(std::move(p), span_from(start));
      } else if (is("trans")) {
        next();
        Transition tr;
        tr.id = node_id().text;
        if (peek().kind == Tok::string) tr.label = next().text;
        n.transitions.emplace_back(std::move(tr), span_from(start));
      } else if (is("arc")) {
        next();
        RawArc a;
        a.from = node_id();
        expect("->");
        a.to = node_id();
        if (accept("weight")) {
          const Token& w = peek();
          auto v = integer();
          if (v > 0xFFFFFFFFu) fail(w, "arc weight out of range");
          a.weight = static_cast<std::uint32_t>(v);
        }
        a.span = span_from(start);
        n.arcs.push_back(std::move(a));
      } else if (is("marking")) {
        next();
        expect("{");
        while (!accept("}")) {
          if (accept(",") || accept(";")) continue;
          Token p = node_id();
          expect(":");
          n.marking.emplace_back(std::move(p), integer());
        }
      } else if (is("loop")) {
        next();
        n.loop = node_id();
      } else if (is("script")) {
        next();
        std::string name = node_id().text;
        std::vector<Token> steps;
        expect("[");
        if (!accept("]")) {
          do {
            steps.push_back(node_id());
          } while (accept(","));
          expect("]");
        }
        n.scripts.emplace_back(std::move(name), std::move(steps));
      } else if (is("run")) {
        next();
        expect("[");
        do {
          n.run.push_back(node_id());
        } while (accept(","));
        expect("]");
      } else {
        fail(t, "expected place, trans, arc, marking, loop, script or run but found " + describe(t));
      }
    }
    doc_.net = std::move(n);
  }

  void bind() {
    RawBind b;
    b.span = peek().span;
    next();
    b.place = node_id();
    expect("=>");
    const Token& k = expect_kind(Tok::ident, "element, goal, softgoal, task or resource");
    if (k.text != "element") {
      b.kind = parse_element_kind(k.text);
      if (!b.kind) fail(k, "expected element, goal, softgoal, task or resource but found " + describe(k));
    }
    b.element = ref();
    if (accept("polarity")) {
      const Token& p = expect_kind(Tok::ident, "help or hurt");
      auto pol = parse_polarity(p.text);
      if (!pol) fail(p, "expected a polarity but found " + describe(p));
      b.polarity = *pol;
    }
    b.span = span_from(b.span);
    doc_.binds.push_back(std::move(b));
  }

  void trigger() {
    const Token& head = next();
    if (doc_.trigger) fail(head, "only one trigger is allowed");
    const Token& k = expect_kind(Tok::ident, "'element' or an element kind");
    if (k.text != "element" && !parse_element_kind(k.text)) {
      fail(k, "expected 'element' or an element kind but found " + describe(k));
    }
    doc_.trigger = ref();
  }

  std::vector<RawLabel> label_block() {
    std::vector<RawLabel> out;
    expect("{");
    while (!accept("}")) {
      if (accept(",") || accept(";")) continue;
      if (peek().kind == Tok::end) fail(peek(), "unterminated label block");
      Ref r = ref();
      expect("=");
      out.push_back({std::move(r), label()});
    }
    return out;
  }

  void baseline() {
    const Token& head = next();
    if (doc_.baseline) fail(head, "only one baseline block is allowed");
    doc_.baseline = label_block();
  }

  void scenario() {
    RawScenario s;
    s.span = peek().span;
    next();
    s.name = expect_kind(Tok::string, "a scenario name").text;
    if (accept("extends")) {
      expect("baseline");
      s.extends = true;
    }
    s.span = span_from(s.span);
    s.labels = label_block();
    doc_.scenarios.push_back(std::move(s));
  }

  void judgment() {
    RawJudgment j;
    j.span = peek().span;
    next();
    j.element = ref();
    expect("given");
    expect("{");
    do {
      j.given.push_back(label());
    } while (accept(","));
    expect("}");
    expect("=>");
    j.label = label();
    if (accept("in")) j.scenario = expect_kind(Tok::string, "a scenario name").text;
    j.span = span_from(j.span);
    doc_.judgments.push_back(std::move(j));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool judgments_only_;
  RawDocument doc_;
};

// ---- resolution -----------------------------------------------------------

class Resolver {
 public:
  Resolver(std::vector<ParseDiagnostic>& diags, Span fallback) : diags_(diags), fallback_(fallback) {}

  void error(std::string code, std::string message, Span span) {
    diags_.push_back({Severity::error, std::move(code), std::move(message), span});
  }

  void index_elements(const GoalModel& model) {
    for (const auto& e : model.elements) {
      by_name_[e.name].push_back(e.id);
      ids_.insert(e.id);
    }
  }

  std::optional<std::string> element(const Ref& r) {
    if (r.by_id) {
      if (ids_.contains(r.text)) return r.text;
      error("unknown-element", "no element with id '" + r.text + "'", r.span);
      return std::nullopt;
    }
    auto it = by_name_.find(r.text);
    if (it == by_name_.end()) {
      error("unknown-element", "no element named \"" + r.text + "\"", r.span);
      return std::nullopt;
    }
    if (it->second.size() > 1) {
      error("ambiguous-name", "several elements are named \"" + r.text + "\"; refer to one by @id", r.span);
      return std::nullopt;
    }
    return it->second.front();
  }

  void remember(const std::string& subject, Span span) { spans_.emplace(subject, span); }

  Span span_of(const std::string& subject) const {
    auto it = spans_.find(subject);
    return it == spans_.end() ? fallback_ : it->second;
  }

  void report(const ValidationReport& report) {
    for (const auto& v : report.violations) {
      diags_.push_back({v.severity, v.rule, v.subject + ": " + v.message, span_of(v.subject)});
    }
  }

  bool failed() const {
    return std::any_of(diags_.begin(), diags_.end(),
                       [](const ParseDiagnostic& d) { return d.severity == Severity::error; });
  }

 private:
  std::vector<ParseDiagnostic>& diags_;
  Span fallback_;
  std::map<std::string, std::vector<std::string>> by_name_;
  std::set<std::string> ids_;
  std::multimap<std::string, Span> spans_;
};

std::string declared_id(const std::optional<std::string>& id, const std::string& name) {
  return id.value_or(slugify(name));
}

void resolve_judgments(const std::vector<RawJudgment>& raw, Resolver& r, JudgmentTable& table) {
  for (const auto& j : raw) {
    auto id = r.element(j.element);
    if (!id) continue;
    const Judgment* existing = table.lookup(*id, canonical_multiset(j.given), j.scenario);
    if (existing != nullptr && existing->scenario == j.scenario) {
      r.error("duplicate-judgment", "judgment for this element and evidence is given twice", j.span);
      continue;
    }
    table.add({*id, j.given, j.scenario, j.label, Provenance::file});
  }
}

TwoLayerModel resolve(RawDocument& doc, Resolver& r) {
  TwoLayerModel m;
  GoalModel& g = m.goals;

  std::map<std::string, std::vector<std::string>> actor_names;
  for (const auto& a : doc.actors) {
    Actor actor{declared_id(a.id, a.name), a.name, a.kind, {}};
    if (actor.id.empty()) r.error("invalid-id", "actor name gives an empty id; add @id", a.span);
    r.remember(actor.id, a.span);
    actor_names[a.name].push_back(actor.id);
    g.actors.push_back(std::move(actor));
  }
  auto actor_ref = [&](const Ref& ref) -> std::optional<std::string> {
    if (ref.by_id) {
      if (std::any_of(g.actors.begin(), g.actors.end(), [&](const Actor& a) { return a.id == ref.text; })) {
        return ref.text;
      }
      r.error("unknown-actor", "no actor with id '" + ref.text + "'", ref.span);
      return std::nullopt;
    }
    auto it = actor_names.find(ref.text);
    if (it == actor_names.end()) {
      r.error("unknown-actor", "no actor named \"" + ref.text + "\"", ref.span);
      return std::nullopt;
    }
    if (it->second.size() > 1) {
      r.error("ambiguous-name", "several actors are named \"" + ref.text + "\"; refer to one by @id", ref.span);
      return std::nullopt;
    }
    return it->second.front();
  };

  auto add_element = [&](const RawElement& e, std::optional<std::string> owner) {
    Element el{declared_id(e.id, e.name), e.name, e.kind, std::move(owner), e.decision};
    if (el.id.empty()) r.error("invalid-id", "element name gives an empty id; add @id", e.span);
    r.remember(el.id, e.span);
    g.elements.push_back(std::move(el));
  };
  for (std::size_t i = 0; i < doc.actors.size(); ++i) {
    for (const auto& e : doc.actors[i].elements) add_element(e, g.actors[i].id);
  }
  for (const auto& e : doc.free_elements) add_element(e, std::nullopt);
  // Inline dependums declare a boundary-free element unless an identical
  // one already exists.
  for (const auto& d : doc.depends) {
    if (!d.inline_dependum) continue;
    const std::string id = slugify(d.inline_dependum->name);
    auto it = std::find_if(g.elements.begin(), g.elements.end(), [&](const Element& e) { return e.id == id; });
    if (it != g.elements.end() && !it->owner && it->kind == d.inline_dependum->kind &&
        it->name == d.inline_dependum->name) {
      continue;
    }
    add_element(*d.inline_dependum, std::nullopt);
  }
  r.index_elements(g);

  for (std::size_t i = 0; i < doc.actors.size(); ++i) {
    for (const auto& p : doc.actors[i].plays) {
      if (auto role = actor_ref(p)) g.actors[i].plays.push_back(*role);
    }
    std::sort(g.actors[i].plays.begin(), g.actors[i].plays.end());
  }
  for (const auto& l : doc.links) {
    auto a = r.element(l.a);
    auto b = r.element(l.b);
    if (!a || !b) continue;
    Link link{link_id(l.kind, *a, *b, l.polarity), l.kind, *a, *b, l.polarity, std::nullopt};
    r.remember(link.id, l.span);
    g.links.push_back(std::move(link));
  }
  for (const auto& d : doc.depends) {
    auto from = r.element(d.from);
    auto to = r.element(d.to);
    std::optional<std::string> dependum =
        d.inline_dependum ? std::optional(slugify(d.inline_dependum->name)) : r.element(d.dependum);
    if (!from || !to || !dependum) continue;
    Link link{link_id(LinkKind::dependency, *from, *to, std::nullopt, *dependum), LinkKind::dependency,
              *from, *to, std::nullopt, *dependum};
    r.remember(link.id, d.span);
    g.links.push_back(std::move(link));
  }
  sort_model(g);
  if (r.failed()) return m;
  r.report(validate(g));

  if (doc.net) {
    RawNet& n = *doc.net;
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::vector<Arc> arcs;
    std::set<std::string> place_ids, transition_ids;
    for (auto& [p, span] : n.places) {
      r.remember(p.id, span);
      place_ids.insert(p.id);
      places.push_back(p);
    }
    for (auto& [t, span] : n.transitions) {
      r.remember(t.id, span);
      transition_ids.insert(t.id);
      transitions.push_back(t);
    }
    bool arcs_ok = true;
    for (const auto& a : n.arcs) {
      const bool from_known = place_ids.contains(a.from.text) || transition_ids.contains(a.from.text);
      const bool to_known = place_ids.contains(a.to.text) || transition_ids.contains(a.to.text);
      auto missing = [&](const Token& t, const Token& other) {
        const char* what = transition_ids.contains(other.text) ? "place"
                           : place_ids.contains(other.text)    ? "transition"
                                                               : "node";
        r.error(std::string("unknown-") + what, std::string("no ") + what + " '" + t.text + "'", t.span);
        arcs_ok = false;
      };
      if (!from_known) missing(a.from, a.to);
      if (!to_known) missing(a.to, a.from);
      r.remember(a.from.text + "->" + a.to.text, a.span);
      arcs.push_back({a.from.text, a.to.text, a.weight});
    }
    if (arcs_ok) {
      auto report = validate_net(places, transitions, arcs);
      r.report(report);
      if (!report.has_errors()) {
        m.net.emplace(std::move(places), std::move(transitions), std::move(arcs));
      }
    }
    if (m.net) {
      m.initial_marking = m.net->empty_marking();
      std::set<std::string> marked;
      for (const auto& [tok, count] : n.marking) {
        auto p = m.net->place_index(tok.text);
        if (!p) {
          r.error("unknown-place", "no place '" + tok.text + "'", tok.span);
        } else if (!marked.insert(tok.text).second) {
          r.error("duplicate-marking", "place '" + tok.text + "' is marked twice", tok.span);
        } else {
          m.initial_marking.tokens[*p] = count;
        }
      }
      if (n.loop) {
        if (!m.net->transition_index(n.loop->text)) {
          r.error("unknown-transition", "no transition '" + n.loop->text + "'", n.loop->span);
        } else {
          m.round_transition = n.loop->text;
        }
      }
      for (const auto& [name, steps] : n.scripts) {
        NamedScript s{name, {}};
        for (const auto& t : steps) {
          if (!m.net->transition_index(t.text)) {
            r.error("unknown-transition", "no transition '" + t.text + "'", t.span);
          }
          s.steps.push_back(t.text);
        }
        if (m.find_script(name) != nullptr) r.error("duplicate-script", "script '" + name + "' declared twice", n.span);
        m.scripts.push_back(std::move(s));
      }
      for (const auto& t : n.run) {
        if (m.find_script(t.text) == nullptr) {
          r.error("unknown-script", "no script '" + t.text + "'", t.span);
        }
        m.default_run.push_back(t.text);
      }
    }
  }

  for (const auto& b : doc.binds) {
    auto id = r.element(b.element);
    if (!m.net) {
      if (!doc.net) r.error("unknown-place", "there is no net to bind place '" + b.place.text + "'", b.place.span);
      continue;
    }
    if (!m.net->place_index(b.place.text)) {
      r.error("unknown-place", "no place '" + b.place.text + "'", b.place.span);
      continue;
    }
    if (!id) continue;
    r.remember(b.place.text, b.span);
    m.binding.entries.push_back({b.place.text, *id, b.polarity, b.kind});
  }
  if (doc.trigger) {
    if (auto id = r.element(*doc.trigger)) {
      m.binding.trigger = *id;
      r.remember(*id, doc.trigger->span);
    }
  }
  if (m.net && !r.failed()) {
    auto report = bind_and_check(g, *m.net, m.binding);
    r.report(report);
  }

  auto labels = [&](const std::vector<RawLabel>& raw) {
    LabelMap out;
    for (const auto& l : raw) {
      auto id = r.element(l.element);
      if (!id) continue;
      if (!out.emplace(*id, l.label).second) {
        r.error("duplicate-label", "element labelled twice", l.element.span);
      }
    }
    return out;
  };
  if (doc.baseline) m.baseline = labels(*doc.baseline);
  for (const auto& s : doc.scenarios) {
    if (m.find_scenario(s.name) != nullptr) {
      r.error("duplicate-scenario", "scenario \"" + s.name + "\" declared twice", s.span);
      continue;
    }
    m.scenarios.push_back({s.name, s.extends, labels(s.labels)});
  }
  resolve_judgments(doc.judgments, r, m.judgments);
  return m;
}

std::optional<ParseDiagnostic> check_encoding(std::string_view text) {
  auto bad = invalid_utf8(text);
  if (!bad) return std::nullopt;
  Span span{1, 1, 1};
  for (std::size_t i = 0; i < *bad; ++i) {
    if (text[i] == '\n') {
      ++span.line;
      span.column = 1;
    } else {
      ++span.column;
    }
  }
  return ParseDiagnostic{Severity::error, "invalid-utf8", "document is not valid UTF-8", span};
}

Span first_span(const std::vector<Token>& tokens) {
  Span s = tokens.front().span;
  if (tokens.front().kind == Tok::end) s.length = 0;
  return s;
}

}  // namespace

ParseResult parse(const SourceDocument& doc) {
  ParseResult result;
  if (auto bad = check_encoding(doc.text)) {
    result.diagnostics.push_back(*bad);
    return result;
  }
  try {
    auto tokens = Lexer(doc.text).run();
    const Span fallback = first_span(tokens);
    auto raw = Parser(std::move(tokens), false).run();
    Resolver resolver(result.diagnostics, fallback);
    auto model = resolve(raw, resolver);
    if (!resolver.failed()) result.model = std::move(model);
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(e.diagnostic);
  }
  return result;
}

JudgmentParseResult parse_judgments(const SourceDocument& doc, const GoalModel& model) {
  JudgmentParseResult result;
  if (auto bad = check_encoding(doc.text)) {
    result.diagnostics.push_back(*bad);
    return result;
  }
  try {
    auto tokens = Lexer(doc.text).run();
    const Span fallback = first_span(tokens);
    auto raw = Parser(std::move(tokens), true).run();
    Resolver resolver(result.diagnostics, fallback);
    resolver.index_elements(model);
    JudgmentTable table;
    resolve_judgments(raw.judgments, resolver, table);
    if (!resolver.failed()) result.table = std::move(table);
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back(e.diagnostic);
  }
  return result;
}

}  // namespace gorenet
