#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace algred::support {

std::string source_path(const std::string& rel) { return std::string(ALGRED_SOURCE_DIR) + "/" + rel; }

ModelFile load(const std::string& rel) { return load_model(source_path(rel)); }

std::vector<std::string> corpus_files(const std::string& subdir) {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(source_path(subdir)))
    if (entry.path().extension() == ".alg") out.push_back(subdir + "/" + entry.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string leaf(std::mt19937_64& rng, const std::vector<std::string>& coords) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(coords.size()));
  const int k = pick(rng);
  if (k < static_cast<int>(coords.size())) return coords[static_cast<std::size_t>(k)];
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  return format_number(std::round(c(rng) * 100.0) / 100.0);
}

}  // namespace

std::string random_expression(std::mt19937_64& rng, const std::vector<std::string>& coords, int depth) {
  if (depth <= 0) return leaf(rng, coords);
  std::uniform_int_distribution<int> op(0, 11);
  const auto sub = [&] { return random_expression(rng, coords, depth - 1); };
  switch (op(rng)) {
    case 0: return "(" + sub() + " + " + sub() + ")";
    case 1: return "(" + sub() + " - " + sub() + ")";
    case 2: return "(" + sub() + " * " + sub() + ")";
    case 3: return "(" + sub() + ") / (2 + cos(" + sub() + "))";
    case 4: return "sin(" + sub() + ")";
    case 5: return "cos(" + sub() + ")";
    case 6: return "exp(0.25 * sin(" + sub() + "))";
    case 7: return "log(2 + sin(" + sub() + "))";
    case 8: return "sqrt(1 + (" + sub() + ")^2)";
    case 9: return "(" + sub() + ")^3";
    case 10: return "-(" + sub() + ")";
    default: return leaf(rng, coords);
  }
}

FiniteDifference central_differences(const Expression& e, const Point& p, double h) {
  const std::size_t n = p.size();
  FiniteDifference fd;
  fd.gradient.assign(n, 0.0);
  fd.hessian.assign(n, std::vector<double>(n, 0.0));
  const auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
    Point q = p;
    q[i] += si;
    q[j] += sj;
    return e.value(q);
  };
  const double f0 = e.value(p);
  for (std::size_t i = 0; i < n; ++i) {
    fd.gradient[i] = (at(i, h, i, 0.0) - at(i, -h, i, 0.0)) / (2 * h);
    fd.hessian[i][i] = (at(i, h, i, 0.0) - 2 * f0 + at(i, -h, i, 0.0)) / (h * h);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
      fd.hessian[i][j] = fd.hessian[j][i] = v;
    }
  }
  return fd;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 1.0, err = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
  return err / scale;
}

std::vector<std::string> failing_leaves(const CheckReport& r) {
  std::vector<std::string> out;
  for (const auto& [name, v] : leaves_preorder(r))
    if (v == Verdict::Fail || v == Verdict::Indeterminate) out.push_back(name);
  return out;
}

std::string mutant_target(const std::string& rel) {
  std::ifstream in(source_path(rel));
  std::string line;
  const std::string tag = "# target: ";
  while (std::getline(in, line))
    if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
  return {};
}

}  // namespace algred::support
