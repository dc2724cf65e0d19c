#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "algred/model_file.hpp"
#include "algred/quotient.hpp"
#include "algred/report.hpp"
#include "algred/structures.hpp"

namespace algred {

// Command-line overrides; unset fields fall back to the model file, then to
// the defaults.
struct RunOptions {
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> rank_tol;
  std::optional<std::string> box;  // "lo:hi" for all coordinates or "x=lo:hi,y=lo:hi"
};

// Applies overrides to the model's sample/tolerance settings. Throws
// std::invalid_argument on a malformed box.
void apply_options(ModelFile& m, const RunOptions& opt);

struct CheckResult {
  ModelFile model;  // with effective settings
  std::vector<Point> samples;
  CheckReport report;
  Classification classification = Classification::None;
  std::optional<QuotientSpec> quotient;
  bool quotient_derived = false;
  std::optional<QuotientData> quotient_model;
  std::optional<Bivector> bivector;
  std::optional<DiracPresentation> presentation;
};

// Runs every check on an already-parsed model.
CheckResult run_check(ModelFile model, const RunOptions& opt = {});

// 0 all pass, 1 any FAIL, 3 INDETERMINATE without FAIL.
int exit_code(const CheckReport& r);

// Quotient model file for a result whose prerequisites passed.
ModelFile reduced_model_file(const CheckResult& r);

// Checks that must pass before a reduction is written.
CheckReport prerequisites(const CheckResult& r);

std::string report_json(const CheckResult& r);

int cmd_check(const std::string& path, const RunOptions& opt, const std::optional<std::string>& json_path,
              std::ostream& out, std::ostream& err);
int cmd_reduce(const std::string& path, const RunOptions& opt, const std::string& out_path,
               const std::optional<std::string>& json_path, std::ostream& out, std::ostream& err);

}  // namespace algred
