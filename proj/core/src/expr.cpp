#include "algred/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "algred/errors.hpp"

namespace algred {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Chart::Chart(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_)
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate coordinate name '" + n + "'");
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

ChartPtr make_chart(std::vector<std::string> names) { return std::make_shared<const Chart>(std::move(names)); }

namespace {

NodePtr leaf_constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->constant = v;
  return n;
}

NodePtr leaf_coordinate(std::size_t i) {
  auto n = std::make_shared<Node>();
  n->op = Op::Coordinate;
  n->coordinate = i;
  return n;
}

NodePtr node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}


const char* call_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return "?";
  }
}

std::optional<Op> call_op(std::string_view name) {
  if (name == "sin") return Op::Sin;
  if (name == "cos") return Op::Cos;
  if (name == "exp") return Op::Exp;
  if (name == "log") return Op::Log;
  if (name == "sqrt") return Op::Sqrt;
  return std::nullopt;
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(std::string_view text, const Chart& chart) : s_(text), chart_(chart) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw SyntaxError(pos_, "operator or end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n')) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = node(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = node(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = node(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = node(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return node(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return node(Op::Pow, base, unary());
    return base;
  }

  static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
  static bool digit(char c) { return c >= '0' && c <= '9'; }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError(pos_, "number, identifier, '(' or '-'");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) throw SyntaxError(pos_, "')'");
      return e;
    }
    if (digit(c) || c == '.') return number();
    if (ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (auto idx = chart_.index_of(name)) return leaf_coordinate(*idx);
      if (auto op = call_op(name)) {
        if (!accept('(')) throw SyntaxError(pos_, "'('");
        NodePtr arg = expr();
        if (!accept(')')) throw SyntaxError(pos_, "')'");
        return node(*op, arg);
      }
      if (name == "pi") return leaf_constant(std::numbers::pi);
      throw UnknownCoordinate(std::string(name), start);
    }
    throw SyntaxError(pos_, "number, identifier, '(' or '-'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && digit(s_[pos_])) ++pos_;
    }
    if (pos_ - start == 1 && s_[start] == '.') throw SyntaxError(start, "number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q >= s_.size() || !digit(s_[q])) throw SyntaxError(q, "exponent digits");
      while (q < s_.size() && digit(s_[q])) ++q;
      pos_ = q;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_ || !std::isfinite(v)) throw SyntaxError(start, "finite number");
    return leaf_constant(v);
  }

  std::string_view s_;
  const Chart& chart_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- evaluation

double apply_value(Op op, double a, double b) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) throw DomainError("div");
      return a / b;
    case Op::Pow: {
      const bool integral = std::nearbyint(b) == b;
      if (!integral && !(a > 0.0)) throw DomainError("pow");
      if (integral && b < 0 && a == 0.0) throw DomainError("pow");
      return std::pow(a, b);
    }
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    case Op::Log:
      if (!(a > 0.0)) throw DomainError("log");
      return std::log(a);
    case Op::Sqrt:
      if (!(a > 0.0)) throw DomainError("sqrt");
      return std::sqrt(a);
    default: throw std::logic_error("apply_value: leaf op");
  }
}

double value_of(const Node& n, const Point& p) {
  switch (n.op) {
    case Op::Constant: return n.constant;
    case Op::Coordinate: return p[n.coordinate];
    default: {
      const double a = value_of(*n.lhs, p);
      const double b = n.rhs ? value_of(*n.rhs, p) : 0.0;
      const double r = apply_value(n.op, a, b);
      if (!std::isfinite(r)) throw DomainError("overflow");
      return r;
    }
  }
}

bool depends(const Node& n, std::size_t i) {
  if (n.op == Op::Coordinate) return n.coordinate == i;
  if (n.op == Op::Constant) return false;
  return (n.lhs && depends(*n.lhs, i)) || (n.rhs && depends(*n.rhs, i));
}

bool has_coordinates(const Node& n) {
  if (n.op == Op::Coordinate) return true;
  if (n.op == Op::Constant) return false;
  return (n.lhs && has_coordinates(*n.lhs)) || (n.rhs && has_coordinates(*n.rhs));
}

Jet2 jet_of(const Node& n, const Point& p) {
  const std::size_t dim = p.size();
  switch (n.op) {
    case Op::Constant: return Jet2::constant(n.constant, dim);
    case Op::Coordinate: return Jet2::variable(p[n.coordinate], n.coordinate, dim);
    case Op::Neg: return -jet_of(*n.lhs, p);
    case Op::Add: return jet_of(*n.lhs, p) + jet_of(*n.rhs, p);
    case Op::Sub: return jet_of(*n.lhs, p) - jet_of(*n.rhs, p);
    case Op::Mul: return jet_of(*n.lhs, p) * jet_of(*n.rhs, p);
    case Op::Div: return jet_of(*n.lhs, p) / jet_of(*n.rhs, p);
    case Op::Pow:
      // Constant exponent subtrees such as (-2) or 1/2 keep the integer-power path.
      if (!has_coordinates(*n.rhs)) return pow(jet_of(*n.lhs, p), value_of(*n.rhs, p));
      return pow(jet_of(*n.lhs, p), jet_of(*n.rhs, p));
    case Op::Sin: return sin(jet_of(*n.lhs, p));
    case Op::Cos: return cos(jet_of(*n.lhs, p));
    case Op::Exp: return exp(jet_of(*n.lhs, p));
    case Op::Log: return log(jet_of(*n.lhs, p));
    case Op::Sqrt: return sqrt(jet_of(*n.lhs, p));
  }
  throw std::logic_error("jet_of: bad op");
}

// ---------------------------------------------------------------- printing

std::string fmt_double(double v) { return format_number(v); }

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Constant: return n.constant < 0 || std::signbit(n.constant) ? 3 : 5;
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string infix(const Node& n, const Chart* chart, int required);

std::string infix_bare(const Node& n, const Chart* chart) {
  switch (n.op) {
    case Op::Constant:
      if (std::signbit(n.constant)) return "-" + fmt_double(-n.constant);
      return fmt_double(n.constant);
    case Op::Coordinate: return chart ? chart->name(n.coordinate) : "x" + std::to_string(n.coordinate);
    case Op::Neg: return "-" + infix(*n.lhs, chart, 3);
    case Op::Add: return infix(*n.lhs, chart, 1) + " + " + infix(*n.rhs, chart, 2);
    case Op::Sub: return infix(*n.lhs, chart, 1) + " - " + infix(*n.rhs, chart, 2);
    case Op::Mul: return infix(*n.lhs, chart, 2) + "*" + infix(*n.rhs, chart, 3);
    case Op::Div: return infix(*n.lhs, chart, 2) + "/" + infix(*n.rhs, chart, 3);
    case Op::Pow: return infix(*n.lhs, chart, 5) + "^" + infix(*n.rhs, chart, 3);
    default: return std::string(call_name(n.op)) + "(" + infix(*n.lhs, chart, 0) + ")";
  }
}

std::string infix(const Node& n, const Chart* chart, int required) {
  std::string s = infix_bare(n, chart);
  return precedence(n) < required ? "(" + s + ")" : s;
}

std::string sexpr(const Node& n, const Chart* chart) {
  switch (n.op) {
    case Op::Constant: return fmt_double(n.constant);
    case Op::Coordinate: return chart ? chart->name(n.coordinate) : "x" + std::to_string(n.coordinate);
    case Op::Neg: return "(neg " + sexpr(*n.lhs, chart) + ")";
    case Op::Add: return "(+ " + sexpr(*n.lhs, chart) + " " + sexpr(*n.rhs, chart) + ")";
    case Op::Sub: return "(- " + sexpr(*n.lhs, chart) + " " + sexpr(*n.rhs, chart) + ")";
    case Op::Mul: return "(* " + sexpr(*n.lhs, chart) + " " + sexpr(*n.rhs, chart) + ")";
    case Op::Div: return "(/ " + sexpr(*n.lhs, chart) + " " + sexpr(*n.rhs, chart) + ")";
    case Op::Pow: return "(^ " + sexpr(*n.lhs, chart) + " " + sexpr(*n.rhs, chart) + ")";
    default: return "(" + std::string(call_name(n.op)) + " " + sexpr(*n.lhs, chart) + ")";
  }
}

bool same(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  if (a.op == Op::Constant) return a.constant == b.constant;
  if (a.op == Op::Coordinate) return a.coordinate == b.coordinate;
  if (!same(*a.lhs, *b.lhs)) return false;
  if (a.rhs || b.rhs) return a.rhs && b.rhs && same(*a.rhs, *b.rhs);
  return true;
}

// ---------------------------------------------------------------- folding

std::optional<double> const_of(const NodePtr& n) {
  if (n && n->op == Op::Constant) return n->constant;
  return std::nullopt;
}

NodePtr fold(Op op, NodePtr a, NodePtr b = nullptr) {
  const auto ca = const_of(a), cb = const_of(b);
  if (ca && (!b || cb)) {
    try {
      const double v = apply_value(op, *ca, cb.value_or(0.0));
      if (std::isfinite(v)) return leaf_constant(v);
    } catch (const DomainError&) {
      // keep the tree; the error resurfaces at evaluation time
    }
  }
  switch (op) {
    case Op::Neg:
      if (a->op == Op::Neg) return a->lhs;
      break;
    case Op::Add:
      if (ca && *ca == 0.0) return b;
      if (cb && *cb == 0.0) return a;
      break;
    case Op::Sub:
      if (cb && *cb == 0.0) return a;
      if (ca && *ca == 0.0) return fold(Op::Neg, b);
      break;
    case Op::Mul:
      if ((ca && *ca == 0.0) || (cb && *cb == 0.0)) return leaf_constant(0.0);
      if (ca && *ca == 1.0) return b;
      if (cb && *cb == 1.0) return a;
      if (ca && *ca == -1.0) return fold(Op::Neg, b);
      if (cb && *cb == -1.0) return fold(Op::Neg, a);
      break;
    case Op::Div:
      if (ca && *ca == 0.0 && !(cb && *cb == 0.0)) return leaf_constant(0.0);
      if (cb && *cb == 1.0) return a;
      if (cb && *cb == -1.0) return fold(Op::Neg, a);
      break;
    case Op::Pow:
      if (cb && *cb == 1.0) return a;
      if (cb && *cb == 0.0) return leaf_constant(1.0);
      break;
    default: break;
  }
  return node(op, std::move(a), std::move(b));
}

NodePtr rebuild(const NodePtr& n, const std::vector<CoordinateImage>& images) {
  switch (n->op) {
    case Op::Constant: return n;
    case Op::Coordinate: {
      const auto& img = images.at(n->coordinate);
      if (std::holds_alternative<double>(img)) return leaf_constant(std::get<double>(img));
      return leaf_coordinate(std::get<std::size_t>(img));
    }
    default: return fold(n->op, rebuild(n->lhs, images), n->rhs ? rebuild(n->rhs, images) : nullptr);
  }
}

const ChartPtr& common_chart(const Expression& a, const Expression& b) {
  if (a.chart() && b.chart() && a.chart() != b.chart() && !(*a.chart() == *b.chart()))
    throw std::invalid_argument("expressions live on different charts");
  return a.chart() ? a.chart() : b.chart();
}

}  // namespace

Expression::Expression(NodePtr root, ChartPtr chart) : root_(std::move(root)), chart_(std::move(chart)) {}

Expression Expression::constant(double value, ChartPtr chart) { return Expression(leaf_constant(value), std::move(chart)); }

Expression Expression::coordinate(std::size_t index, ChartPtr chart) {
  if (chart && index >= chart->dim()) throw std::out_of_range("coordinate index outside chart");
  return Expression(leaf_coordinate(index), std::move(chart));
}

bool Expression::is_constant() const { return !root_ || !has_coordinates(*root_); }

bool Expression::is_zero() const { return !root_ || (root_->op == Op::Constant && root_->constant == 0.0); }

std::optional<double> Expression::constant_value() const {
  if (!root_) return 0.0;
  return const_of(root_);
}

bool Expression::depends_on(std::size_t coordinate) const { return root_ && depends(*root_, coordinate); }

double Expression::value(const Point& p) const {
  if (!root_) return 0.0;
  try {
    return value_of(*root_, p);
  } catch (const DomainError& e) {
    throw DomainError(e.op(), p);
  }
}

std::string Expression::to_string() const { return root_ ? infix(*root_, chart_.get(), 0) : "0"; }

std::string Expression::to_sexpr() const { return root_ ? sexpr(*root_, chart_.get()) : "0"; }

Expression parse_expression(std::string_view text, const ChartPtr& chart) {
  if (!chart) throw std::invalid_argument("parse_expression: null chart");
  Parser parser(text, *chart);
  return Expression(parser.run(), chart);
}

Jet2 eval_jet2(const Expression& e, const Point& p) {
  if (e.chart() && p.size() != e.chart()->dim()) throw ArityMismatch(e.chart()->dim(), p.size());
  if (!e.root()) return Jet2::constant(0.0, p.size());
  try {
    return jet_of(*e.root(), p);
  } catch (const DomainError& err) {
    throw DomainError(err.op(), p);
  }
}

bool structurally_equal(const Expression& a, const Expression& b) {
  if (!a.root() || !b.root()) return a.is_zero() && b.is_zero();
  return same(*a.root(), *b.root());
}

namespace {
NodePtr root_or_zero(const Expression& e) { return e.root() ? e.root() : leaf_constant(0.0); }
}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(fold(Op::Add, root_or_zero(a), root_or_zero(b)), common_chart(a, b));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(fold(Op::Sub, root_or_zero(a), root_or_zero(b)), common_chart(a, b));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(fold(Op::Mul, root_or_zero(a), root_or_zero(b)), common_chart(a, b));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(fold(Op::Div, root_or_zero(a), root_or_zero(b)), common_chart(a, b));
}
Expression operator-(const Expression& a) { return Expression(fold(Op::Neg, root_or_zero(a)), a.chart()); }

Expression rechart(const Expression& e, const ChartPtr& target, const std::vector<CoordinateImage>& images) {
  if (e.chart() && images.size() != e.chart()->dim()) throw ArityMismatch(e.chart()->dim(), images.size());
  for (const auto& img : images)
    if (std::holds_alternative<std::size_t>(img) && std::get<std::size_t>(img) >= target->dim())
      throw std::out_of_range("rechart: target coordinate out of range");
  return Expression(e.root() ? rebuild(e.root(), images) : leaf_constant(0.0), target);
}

}  // namespace algred
