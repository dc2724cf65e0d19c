#include "algred/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "algred/errors.hpp"

namespace algred {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Skipped: return "SKIPPED";
    case Verdict::Pass: return "PASS";
    case Verdict::Indeterminate: return "INDETERMINATE";
    case Verdict::Fail: return "FAIL";
  }
  return "?";
}

Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

CheckReport CheckReport::leaf(std::string name, Verdict v) {
  CheckReport r;
  r.name = std::move(name);
  r.verdict = v;
  return r;
}

CheckReport CheckReport::skipped(std::string name, std::string why) {
  CheckReport r = leaf(std::move(name), Verdict::Skipped);
  r.notes.push_back(std::move(why));
  return r;
}

CheckReport& CheckReport::add(CheckReport child) {
  // A node with only skipped children stays skipped.
  if (children.empty()) verdict = child.verdict;
  else verdict = worst(verdict, child.verdict);
  if (child.residual && (!residual || *child.residual > *residual || std::isnan(*child.residual))) {
    residual = child.residual;
    witness = child.witness;
  }
  children.push_back(std::move(child));
  return children.back();
}

const CheckReport* CheckReport::find(std::string_view n) const {
  if (name == n) return this;
  for (const auto& c : children)
    if (const auto* f = c.find(n)) return f;
  return nullptr;
}

const CheckReport* first_failure(const CheckReport& r) {
  if (r.children.empty()) return (r.verdict == Verdict::Fail || r.verdict == Verdict::Indeterminate) ? &r : nullptr;
  for (const auto& c : r.children)
    if (const auto* f = first_failure(c)) return f;
  return nullptr;
}

namespace {
void collect(const CheckReport& r, std::vector<std::pair<std::string, Verdict>>& out) {
  if (r.children.empty()) out.emplace_back(r.name, r.verdict);
  for (const auto& c : r.children) collect(c, out);
}

void render(const CheckReport& r, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += r.name;
  out += ": ";
  out += to_string(r.verdict);
  if (r.residual) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "  residual=%.3e", *r.residual);
    out += buf;
  }
  if (r.witness && r.verdict != Verdict::Pass) out += "  at " + format_point(*r.witness);
  out += "\n";
  for (const auto& n : r.notes) {
    out.append(static_cast<std::size_t>(depth) * 2 + 4, ' ');
    out += "- " + n + "\n";
  }
  for (const auto& c : r.children) render(c, depth + 1, out);
}
}  // namespace

std::vector<std::pair<std::string, Verdict>> leaves_preorder(const CheckReport& r) {
  std::vector<std::pair<std::string, Verdict>> out;
  collect(r, out);
  return out;
}

std::string render_text(const CheckReport& r) {
  std::string s;
  render(r, 0, s);
  return s;
}

ResidualCheck::ResidualCheck(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

void ResidualCheck::observe(double residual, const Point& at) {
  if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
  if (!seen_ || residual > max_) {
    max_ = residual;
    witness_ = at;
  }
  seen_ = true;
}

void ResidualCheck::fail(const Point& at, const std::string& text) {
  if (!error_point_) error_point_ = at;
  notes_.push_back(text);
}

CheckReport ResidualCheck::finish() const {
  CheckReport r;
  r.name = name_;
  r.notes = notes_;
  if (error_point_) {
    r.verdict = Verdict::Fail;
    r.witness = *error_point_;
    if (seen_) r.residual = max_;
    return r;
  }
  if (!seen_) {
    r.verdict = Verdict::Pass;
    r.residual = 0.0;
    r.notes.push_back("vacuous");
    return r;
  }
  r.residual = max_;
  r.witness = witness_;
  r.verdict = max_ <= tol_ ? Verdict::Pass : Verdict::Fail;
  return r;
}

}  // namespace algred
