#include "algred/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "algred/errors.hpp"

namespace algred {

namespace {

Interval parse_interval(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("box interval must be lo:hi, got '" + s + "'");
  std::size_t used = 0;
  const std::string lo = s.substr(0, colon), hi = s.substr(colon + 1);
  Interval iv;
  try {
    iv.first = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    iv.second = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad number in box interval '" + s + "'");
  }
  if (!(iv.first < iv.second)) throw std::invalid_argument("empty box interval '" + s + "'");
  return iv;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<TotalSpacePoint> total_space_points(const SampleSettings& s, std::size_t rank, std::size_t count) {
  Box box = s.box;
  for (std::size_t a = 0; a < rank; ++a) box.bounds.push_back(s.fiber_box);
  const std::size_t n = s.box.dim();
  std::vector<TotalSpacePoint> out;
  for (const auto& p : sample_points(box, count, s.seed)) {
    TotalSpacePoint t;
    t.base.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
    t.fiber.assign(p.begin() + static_cast<std::ptrdiff_t>(n), p.end());
    out.push_back(std::move(t));
  }
  return out;
}

CheckReport declared_bivector_check(const Bivector& declared, const std::optional<Bivector>& computed,
                                    const std::vector<Point>& points, double tol) {
  ResidualCheck rc("declared-bivector", tol);
  if (!computed) {
    rc.fail(points.front(), "no reduced Poisson bivector was derived");
    return rc.finish();
  }
  if (declared.chart->names() != computed->chart->names()) {
    rc.fail(points.front(), "declared bivector lives on a different chart than the reduced one");
    return rc.finish();
  }
  for (const auto& x : points) {
    try {
      const auto a = declared.values(x), b = computed->values(x);
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
      rc.observe(m, x);
    } catch (const DomainError& e) {
      rc.fail(x, e.what());
    }
  }
  return rc.finish();
}

}  // namespace

void apply_options(ModelFile& m, const RunOptions& opt) {
  if (opt.samples) {
    if (*opt.samples == 0) throw std::invalid_argument("--samples must be positive");
    m.samples.count = *opt.samples;
  }
  if (opt.seed) m.samples.seed = *opt.seed;
  if (opt.tol) {
    if (!(*opt.tol > 0)) throw std::invalid_argument("--tol must be positive");
    m.tolerances.tol = *opt.tol;
  }
  if (opt.rank_tol) {
    if (!(*opt.rank_tol > 0)) throw std::invalid_argument("--rank-tol must be positive");
    m.tolerances.rank_tol = *opt.rank_tol;
  }
  if (opt.box) {
    const Chart& chart = *m.algebroid.chart();
    const std::string spec = trim(*opt.box);
    if (spec.find('=') == std::string::npos) {
      const Interval iv = parse_interval(spec);
      m.samples.box = Box{std::vector<Interval>(chart.dim(), iv)};
    } else {
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("box entry must be name=lo:hi, got '" + item + "'");
        const std::string name = trim(item.substr(0, eq));
        const auto idx = chart.index_of(name);
        if (!idx) throw std::invalid_argument("unknown coordinate '" + name + "' in --box");
        m.samples.box.bounds[*idx] = parse_interval(trim(item.substr(eq + 1)));
      }
    }
  }
}

int exit_code(const CheckReport& r) {
  switch (r.verdict) {
    case Verdict::Fail:
      return 1;
    case Verdict::Indeterminate:
      return 3;
    default:
      return 0;
  }
}

CheckResult run_check(ModelFile model, const RunOptions& opt) {
  apply_options(model, opt);
  validate(model.algebroid, model.form);

  CheckResult res;
  const auto& A = model.algebroid;
  const auto& F = model.form;
  const double tol = model.tolerances.tol;
  const RankPolicy policy{model.tolerances.rank_tol};
  res.samples = sample_points(model.samples.box, model.samples.count, model.samples.seed);
  const auto& samples = res.samples;

  CheckReport root = CheckReport::leaf("check", Verdict::Pass);
  root.add(check_algebroid_axioms(A, samples, tol));
  root.add(im_residuals(A, F, samples, tol));

  // Later stages assume the algebroid and IM equations hold.
  if (root.verdict != Verdict::Pass) {
    const std::string why = "algebroid axioms or IM equations did not pass";
    if (!model.quotient && F.degree >= 2) root.add(CheckReport::skipped("kernel-reducibility", why));
    if (model.quotient) res.quotient = model.quotient;
    if (model.quotient) root.add(CheckReport::skipped("quotient", why));
    if (model.bivector) root.add(CheckReport::skipped("declared-bivector", why));
    res.report = std::move(root);
    res.model = std::move(model);
    return res;
  }

  if (model.quotient) {
    res.quotient = model.quotient;
  } else if (F.degree >= 2) {
    KernelReduction kr = kernel_reducibility_report(A, F, samples, tol, policy);
    root.add(std::move(kr.report));
    if (kr.derived) {
      res.quotient = kr.derived;
      res.quotient_derived = true;
    }
  } else {
    root.add(CheckReport::skipped("kernel-reducibility", "degree-1 forms have no kernel to reduce"));
  }

  if (res.quotient) {
    const QuotientSpec& Q = *res.quotient;
    CheckReport qnode = CheckReport::leaf("quotient", Verdict::Pass);
    QuotientVerdict qv = reduce_by(A, F, Q, samples, model.samples.box.center(), tol);
    qnode.add(qv.algebroid_basic);
    qnode.add(qv.form_basic);
    if (qv.quotient_model) {
      res.quotient_model = qv.quotient_model;
      qnode.add(quotient_properties(A, Q, *qv.quotient_model, samples, tol, policy));
      if (res.quotient_derived) {
        SampleSettings base = model.samples;
        base.box.bounds.clear();
        for (auto i : Q.base_coords) base.box.bounds.push_back(model.samples.box.bounds[i]);
        const auto& qa = qv.quotient_model->algebroid;
        qnode.add(check_kernel_dimension("quotient-trivial-kernel", qa, qv.quotient_model->form,
                                         total_space_points(base, qa.rank(), 50), 0, policy));
      }
    } else {
      qnode.add(CheckReport::skipped("quotient-model", "data is not basic for the quotient"));
    }
    const bool quotient_ok = qnode.verdict == Verdict::Pass;
    root.add(std::move(qnode));

    if (!quotient_ok) {
      if (F.degree >= 2) root.add(CheckReport::skipped("structures", "quotient checks did not pass"));
    } else if (F.degree == 2) {
      CheckReport snode = CheckReport::leaf("structures", Verdict::Pass);
      StructureVerdict sv =
          dirac_quotient_report(A, F, Q, TwistSpec::from_components(A, F), samples, tol, policy);
      res.classification = sv.classification;
      snode.add(std::move(sv.report));
      const bool dirac = res.classification == Classification::DiracQuotientData ||
                         res.classification == Classification::PoissonQuotientData;
      if (dirac && res.quotient_model) {
        const auto bs = base_samples(Q, samples);
        const auto& q = *res.quotient_model;
        snode.add(check_lagrangian(q.algebroid, q.form, bs, tol, policy));
        res.presentation = dirac_presentation(q.algebroid, q.form, bs);
        if (res.classification == Classification::PoissonQuotientData) {
          PoissonResult pr = reduced_poisson(q.algebroid, q.form, bs, tol, policy);
          res.bivector = pr.bivector;
          snode.add(std::move(pr.report));
        }
      }
      root.add(std::move(snode));
    } else if (F.degree >= 3) {
      CheckReport snode = CheckReport::leaf("structures", Verdict::Pass);
      const QuotientData* qd = res.quotient_model ? &*res.quotient_model : nullptr;
      StructureVerdict sv = higher_quotient_report(A, F, Q, qd, samples, tol, policy);
      res.classification = sv.classification;
      snode.add(std::move(sv.report));
      if (res.classification == Classification::HigherPoisson && qd && !res.quotient_derived) {
        SampleSettings base = model.samples;
        base.box.bounds.clear();
        for (auto i : Q.base_coords) base.box.bounds.push_back(model.samples.box.bounds[i]);
        snode.add(check_kernel_dimension("quotient-trivial-kernel", qd->algebroid, qd->form,
                                         total_space_points(base, qd->algebroid.rank(), 50), 0, policy));
      }
      root.add(std::move(snode));
    }
  }

  if (model.bivector) {
    const auto pts = res.quotient ? base_samples(*res.quotient, samples) : samples;
    root.add(declared_bivector_check(*model.bivector, res.bivector, pts, tol));
  }

  res.report = std::move(root);
  res.model = std::move(model);
  return res;
}

CheckReport prerequisites(const CheckResult& r) {
  CheckReport pre = CheckReport::leaf("reduce-prerequisites", Verdict::Pass);
  for (const char* name : {"algebroid-axioms", "im-equations", "kernel-reducibility", "quotient"}) {
    if (const CheckReport* c = r.report.find(name)) {
      if (c->verdict == Verdict::Skipped && std::string(name) == "kernel-reducibility") continue;
      pre.add(*c);
    }
  }
  if (!r.quotient && pre.verdict == Verdict::Pass) {
    CheckReport none = CheckReport::leaf("quotient", Verdict::Fail);
    none.notes.push_back("no quotient declared and none derived");
    pre.add(std::move(none));
  } else if (!r.quotient_model && pre.verdict == Verdict::Pass) {
    CheckReport none = CheckReport::leaf("quotient-model", Verdict::Fail);
    none.notes.push_back("the quotient model could not be built");
    pre.add(std::move(none));
  }
  return pre;
}

ModelFile reduced_model_file(const CheckResult& r) {
  if (!r.quotient || !r.quotient_model) throw NotBasic("no quotient model to write");
  const QuotientSpec& Q = *r.quotient;
  const QuotientData& q = *r.quotient_model;
  ModelFile out;
  out.name = r.model.name + "_reduced";
  out.algebroid = q.algebroid;
  out.form = q.form;
  out.quotient = QuotientSpec::trivial(q.algebroid.dim(), q.algebroid.rank());
  out.samples = r.model.samples;
  out.samples.box.bounds.clear();
  for (auto i : Q.base_coords) out.samples.box.bounds.push_back(r.model.samples.box.bounds[i]);
  out.tolerances = r.model.tolerances;
  out.bivector = r.bivector;
  return out;
}

namespace {

void print_summary(const CheckResult& r, std::ostream& out) {
  out << render_text(r.report);
  out << "classification: " << to_string(r.classification) << "\n";
  out << "verdict: " << to_string(r.report.verdict) << "\n";
}

bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int cmd_check(const std::string& path, const RunOptions& opt, const std::optional<std::string>& json_path,
              std::ostream& out, std::ostream& err) {
  CheckResult r;
  try {
    r = run_check(load_model(path), opt);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  print_summary(r, out);
  if (json_path && !write_text(*json_path, report_json(r), err)) return 2;
  return exit_code(r.report);
}

int cmd_reduce(const std::string& path, const RunOptions& opt, const std::string& out_path,
               const std::optional<std::string>& json_path, std::ostream& out, std::ostream& err) {
  CheckResult r;
  try {
    r = run_check(load_model(path), opt);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (json_path && !write_text(*json_path, report_json(r), err)) return 2;
  const CheckReport pre = prerequisites(r);
  if (pre.verdict != Verdict::Pass) {
    err << "reduction refused:\n" << render_text(pre);
    return pre.verdict == Verdict::Indeterminate ? 3 : 1;
  }
  if (!write_text(out_path, write_model(reduced_model_file(r)), err)) return 2;
  print_summary(r, out);
  out << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace algred
