#include <cmath>

#include "algred/pipeline.hpp"
#include "json.hpp"

namespace algred {

namespace {

using nlohmann::json;

json number_or_null(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json node_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["verdict"] = std::string(to_string(r.verdict));
  j["residual"] = number_or_null(r.residual);
  j["witness"] = r.witness ? json(*r.witness) : json(nullptr);
  j["notes"] = r.notes;
  json children = json::array();
  for (const auto& c : r.children) children.push_back(node_json(c));
  j["children"] = std::move(children);
  return j;
}

}  // namespace

std::string report_json(const CheckResult& r) {
  const auto& m = r.model;
  const Chart& chart = *m.algebroid.chart();
  json j;
  j["schema"] = "algred-report/1";
  j["model"] = m.name;
  json meta;
  meta["tolerances"] = {{"tol", m.tolerances.tol}, {"rank_tol", m.tolerances.rank_tol}};
  meta["seed"] = m.samples.seed;
  meta["samples"] = m.samples.count;
  json box = json::object();
  for (std::size_t i = 0; i < chart.dim(); ++i)
    box[chart.name(i)] = {m.samples.box.bounds[i].first, m.samples.box.bounds[i].second};
  meta["box"] = box;
  meta["fiber_box"] = {m.samples.fiber_box.first, m.samples.fiber_box.second};
  meta["assumptions"] = {"single adapted chart", "fibers of the base projection are connected"};
  j["meta"] = meta;
  j["verdict"] = std::string(to_string(r.report.verdict));
  j["exit_code"] = exit_code(r.report);
  j["classification"] = std::string(to_string(r.classification));
  if (r.quotient) {
    json q;
    std::vector<std::string> fiber, kernel;
    for (auto i : r.quotient->fiber_coords) fiber.push_back(chart.name(i));
    for (auto a : r.quotient->kernel_sections) kernel.push_back(m.algebroid.frame()[a]);
    q["fiber"] = fiber;
    q["kernel"] = kernel;
    q["derived"] = r.quotient_derived;
    j["quotient"] = q;
  } else {
    j["quotient"] = nullptr;
  }
  if (r.bivector) {
    json b;
    std::vector<std::string> coords = r.bivector->chart->names();
    b["coordinates"] = coords;
    json comps = json::object();
    for (const auto& [key, e] : r.bivector->coeffs) comps[coords[key.first] + "^" + coords[key.second]] = e.to_string();
    b["components"] = comps;
    j["bivector"] = b;
  } else {
    j["bivector"] = nullptr;
  }
  if (r.presentation) {
    json p;
    p["points"] = r.presentation->points;
    p["anchors"] = r.presentation->anchors;
    p["forms"] = r.presentation->forms;
    j["dirac_presentation"] = p;
  } else {
    j["dirac_presentation"] = nullptr;
  }
  j["report"] = node_json(r.report);
  return j.dump(2) + "\n";
}

}  // namespace algred
