#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "algred/expr.hpp"

namespace algred {

enum class Verdict { Skipped, Pass, Indeterminate, Fail };

std::string_view to_string(Verdict v);
// Severity order FAIL > INDETERMINATE > PASS > SKIPPED.
Verdict worst(Verdict a, Verdict b);

struct CheckReport {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::optional<double> residual;
  std::optional<Point> witness;
  std::vector<std::string> notes;
  std::vector<CheckReport> children;

  static CheckReport leaf(std::string name, Verdict v);
  static CheckReport skipped(std::string name, std::string why);

  // Adds a child and folds its verdict and residual into this node.
  CheckReport& add(CheckReport child);

  const CheckReport* find(std::string_view name) const;
  bool passed() const { return verdict == Verdict::Pass; }
};

// First FAIL or INDETERMINATE leaf in pre-order, if any.
const CheckReport* first_failure(const CheckReport& r);
// Names of all leaves in pre-order with their verdicts.
std::vector<std::pair<std::string, Verdict>> leaves_preorder(const CheckReport& r);

std::string render_text(const CheckReport& r);

// Accumulates a max residual over sample points and decides PASS/FAIL.
class ResidualCheck {
 public:
  ResidualCheck(std::string name, double tol);

  void observe(double residual, const Point& at);
  // Evaluation failure at a point: the check fails with a note.
  void fail(const Point& at, const std::string& note);
  void note(std::string text) { notes_.push_back(std::move(text)); }

  double max_residual() const { return max_; }
  CheckReport finish() const;

 private:
  std::string name_;
  double tol_;
  double max_ = 0.0;
  bool seen_ = false;
  Point witness_;
  std::optional<Point> error_point_;
  std::vector<std::string> notes_;
};

}  // namespace algred
