#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "algred/jet.hpp"

namespace algred {

using Point = std::vector<double>;

// Ordered list of distinct coordinate names.
class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<std::string> names);

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const Chart& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
};

using ChartPtr = std::shared_ptr<const Chart>;
ChartPtr make_chart(std::vector<std::string> names);

// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

enum class Op { Constant, Coordinate, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt };

struct Node {
  Op op = Op::Constant;
  double constant = 0.0;
  std::size_t coordinate = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

// Immutable scalar field on a chart.
class Expression {
 public:
  Expression() = default;
  Expression(NodePtr root, ChartPtr chart);

  static Expression constant(double value, ChartPtr chart);
  static Expression coordinate(std::size_t index, ChartPtr chart);

  const NodePtr& root() const { return root_; }
  const ChartPtr& chart() const { return chart_; }

  bool is_constant() const;
  bool is_zero() const;
  std::optional<double> constant_value() const;
  bool depends_on(std::size_t coordinate) const;

  // Plain double evaluation, independent of the jet path.
  double value(const Point& p) const;

  // Infix text that parses back to the same function (shortest round-trip constants).
  std::string to_string() const;
  // Prefix form used by tests to pin the tree shape, e.g. (+ (^ x 2) (sin y)).
  std::string to_sexpr() const;

 private:
  NodePtr root_;
  ChartPtr chart_;
};

Expression parse_expression(std::string_view text, const ChartPtr& chart);

Jet2 eval_jet2(const Expression& e, const Point& p);

bool structurally_equal(const Expression& a, const Expression& b);

// Folding builders used for symbolic synthesis (quotient substitution, the
// reduced bivector).
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);

// Maps each old coordinate to a coordinate of the new chart or a fixed value.
using CoordinateImage = std::variant<std::size_t, double>;
Expression rechart(const Expression& e, const ChartPtr& target, const std::vector<CoordinateImage>& images);

}  // namespace algred
