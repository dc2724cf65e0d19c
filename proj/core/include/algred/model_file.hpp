#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "algred/algebroid.hpp"
#include "algred/quotient.hpp"
#include "algred/sampling.hpp"
#include "algred/structures.hpp"

namespace algred {

struct SampleSettings {
  Box box;                      // one interval per chart coordinate
  std::size_t count = 64;
  std::uint64_t seed = 0;
  Interval fiber_box{-1.0, 1.0};  // range of the linear fiber coordinates u^a
};

struct Tolerances {
  double tol = 1e-9;
  double rank_tol = 1e-8;
};

struct ModelFile {
  std::string name;
  AlgebroidModel algebroid;
  IMComponents form;
  std::optional<QuotientSpec> quotient;
  SampleSettings samples;
  Tolerances tolerances;
  std::optional<Bivector> bivector;
};

// Throws ModelError (with line/column) or the expression errors wrapped in it.
ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::string& path);

std::string write_model(const ModelFile& m);

// "d" + coordinate names joined by '^', or "1" for degree 0.
std::string component_name(const MultiIndex& idx, const Chart& chart);

}  // namespace algred
