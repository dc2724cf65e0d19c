#include "algred/model_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "algred/errors.hpp"

namespace algred {

namespace {

struct Piece {
  std::string_view text;
  std::size_t column;  // 1-based
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

Piece trim(Piece p) {
  std::size_t b = 0, e = p.text.size();
  while (b < e && is_space(p.text[b])) ++b;
  while (e > b && is_space(p.text[e - 1])) --e;
  return {p.text.substr(b, e - b), p.column + b};
}

std::vector<Piece> split(Piece p, char sep) {
  std::vector<Piece> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= p.text.size(); ++i) {
    if (i == p.text.size() || p.text[i] == sep) {
      out.push_back(trim({p.text.substr(start, i - start), p.column + start}));
      start = i + 1;
    }
  }
  return out;
}

std::vector<Piece> words(Piece p) {
  std::vector<Piece> out;
  std::size_t i = 0;
  while (i < p.text.size()) {
    while (i < p.text.size() && is_space(p.text[i])) ++i;
    const std::size_t s = i;
    while (i < p.text.size() && !is_space(p.text[i])) ++i;
    if (i > s) out.push_back({p.text.substr(s, i - s), p.column + s});
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!start(s[0])) return false;
  for (char c : s)
    if (!start(c) && !(c >= '0' && c <= '9')) return false;
  return true;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  ModelFile run();

 private:
  [[noreturn]] void fail(std::size_t column, const std::string& msg) const { throw ModelError(line_, column, msg); }

  double number(Piece p) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p.text.data(), p.text.data() + p.text.size(), v);
    if (ec != std::errc() || ptr != p.text.data() + p.text.size() || !std::isfinite(v))
      fail(p.column, "expected a number, got '" + std::string(p.text) + "'");
    return v;
  }

  std::uint64_t integer(Piece p) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(p.text.data(), p.text.data() + p.text.size(), v);
    if (ec != std::errc() || ptr != p.text.data() + p.text.size())
      fail(p.column, "expected a non-negative integer, got '" + std::string(p.text) + "'");
    return v;
  }

  Expression expr(Piece p) const {
    if (p.text.empty()) fail(p.column, "empty expression");
    try {
      return parse_expression(p.text, chart_);
    } catch (const SyntaxError& e) {
      fail(p.column + e.offset(), "expected " + e.expected());
    } catch (const UnknownCoordinate& e) {
      fail(p.column + e.offset(), "unknown coordinate '" + e.name() + "'");
    }
  }

  void need_chart(std::size_t column) const {
    if (!chart_) fail(column, "[chart] must come first");
  }
  void need_frame(std::size_t column) const {
    need_chart(column);
    if (!frame_) fail(column, "[bundle] must come before this section");
  }

  std::size_t frame_label(Piece p) const {
    auto a = model_.algebroid.frame_index(std::string(p.text));
    if (!a) fail(p.column, "unknown frame element '" + std::string(p.text) + "'");
    return *a;
  }

  std::size_t coordinate(Piece p) const {
    auto i = chart_->index_of(p.text);
    if (!i) fail(p.column, "unknown coordinate '" + std::string(p.text) + "'");
    return *i;
  }

  // "1" or "dx^dy^..." with sign from sorting; repeated index is an error.
  MultiIndex component(Piece p, std::size_t degree) const {
    MultiIndex idx;
    if (p.text == "1") {
      if (degree != 0) fail(p.column, "component '1' is only valid for 0-forms");
      return idx;
    }
    for (const Piece& f : split(p, '^')) {
      if (f.text.size() < 2 || f.text[0] != 'd') fail(f.column, "expected d<coordinate>");
      idx.push_back(coordinate({f.text.substr(1), f.column + 1}));
    }
    if (idx.size() != degree)
      fail(p.column, "component has " + std::to_string(idx.size()) + " factors, expected " + std::to_string(degree));
    MultiIndex copy = idx;
    if (sort_with_sign(copy) == 0) fail(p.column, "repeated index in component");
    return idx;
  }

  void entry(const std::string& section, Piece key, Piece value);
  void finish();

  std::string_view text_;
  std::size_t line_ = 0;
  ModelFile model_;
  ChartPtr chart_;
  bool frame_ = false;
  std::optional<std::size_t> degree_;
  std::map<std::string, std::size_t> sections_;
  std::set<std::string> keys_;
  bool has_eta_ = false, has_twist_ = false, has_mu_ = false;
  std::vector<std::string> q_fiber_, q_kernel_;
  bool has_quotient_ = false;
  std::map<std::size_t, Interval> box_;
  std::optional<Bivector> bivector_;
};

void Reader::entry(const std::string& section, Piece key, Piece value) {
  const std::string k(key.text);
  if (!keys_.insert(section + "\x1f" + k).second) fail(key.column, "duplicate key '" + k + "' in [" + section + "]");

  if (section == "meta") {
    if (k != "name") fail(key.column, "unknown key '" + k + "' in [meta]");
    model_.name = std::string(value.text);
  } else if (section == "chart") {
    if (k != "coordinates") fail(key.column, "expected 'coordinates'");
    std::vector<std::string> names;
    for (const auto& w : words(value)) {
      if (!is_identifier(w.text)) fail(w.column, "invalid coordinate name '" + std::string(w.text) + "'");
      for (const auto& n : names)
        if (n == w.text) fail(w.column, "duplicate coordinate '" + n + "'");
      names.emplace_back(w.text);
    }
    if (names.empty()) fail(value.column, "chart needs at least one coordinate");
    chart_ = make_chart(names);
    model_.samples.box = Box::uniform(names.size());
  } else if (section == "bundle") {
    need_chart(key.column);
    if (k != "frame") fail(key.column, "expected 'frame'");
    std::vector<std::string> labels;
    for (const auto& w : words(value)) {
      if (!is_identifier(w.text)) fail(w.column, "invalid frame label '" + std::string(w.text) + "'");
      for (const auto& l : labels)
        if (l == w.text) fail(w.column, "duplicate frame label '" + l + "'");
      labels.emplace_back(w.text);
    }
    if (labels.empty()) fail(value.column, "frame needs at least one element");
    model_.algebroid = AlgebroidModel(chart_, labels);
    frame_ = true;
  } else if (section == "anchor") {
    need_frame(key.column);
    const std::size_t a = frame_label(key);
    const auto parts = split(value, ',');
    if (parts.size() != chart_->dim())
      fail(value.column, "anchor needs " + std::to_string(chart_->dim()) + " components, got " + std::to_string(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) model_.algebroid.set_anchor(a, i, expr(parts[i]));
  } else if (section == "brackets") {
    need_frame(key.column);
    const auto close = key.text.find(']');
    if (key.text.empty() || key.text[0] != '[' || close == std::string_view::npos)
      fail(key.column, "expected [a, b].c");
    const auto pair = split({key.text.substr(1, close - 1), key.column + 1}, ',');
    if (pair.size() != 2) fail(key.column, "expected two frame elements in brackets");
    Piece rest = trim({key.text.substr(close + 1), key.column + close + 1});
    if (rest.text.empty() || rest.text[0] != '.') fail(rest.column, "expected '.' after ]");
    const Piece target = trim({rest.text.substr(1), rest.column + 1});
    const std::size_t a = frame_label(pair[0]), b = frame_label(pair[1]), c = frame_label(target);
    if (a == b) fail(key.column, "bracket of an element with itself");
    const std::array<std::size_t, 3> norm{std::min(a, b), std::max(a, b), c};
    if (!keys_.insert("brackets-norm\x1f" + std::to_string(norm[0]) + "," + std::to_string(norm[1]) + "," +
                      std::to_string(norm[2]))
             .second)
      fail(key.column, "bracket component given twice");
    model_.algebroid.set_structure(a, b, c, expr(value));
  } else if (section == "mu" || section == "eta") {
    need_frame(key.column);
    if (section == "mu" && k == "degree") {
      const auto d = integer(value);
      if (d < 1 || d > chart_->dim() + 1) fail(value.column, "degree must be between 1 and dim+1");
      degree_ = d;
      model_.form.degree = d;
      model_.form.mu.assign(model_.algebroid.rank(), FormField(d - 1, chart_));
      model_.form.eta.assign(model_.algebroid.rank(), FormField(d, chart_));
      return;
    }
    if (!degree_) fail(key.column, "'degree' must be given first in [mu]");
    const auto dot = key.text.find('.');
    if (dot == std::string_view::npos) fail(key.column, "expected <frame>.<component>");
    const std::size_t a = frame_label(trim({key.text.substr(0, dot), key.column}));
    const std::size_t deg = section == "mu" ? *degree_ - 1 : *degree_;
    const MultiIndex idx = component(trim({key.text.substr(dot + 1), key.column + dot + 1}), deg);
    auto& target = section == "mu" ? model_.form.mu[a] : model_.form.eta[a];
    MultiIndex sorted = idx;
    sort_with_sign(sorted);
    if (target.coeffs().count(sorted)) fail(key.column, "component given twice");
    target.set(idx, expr(value));
  } else if (section == "twist") {
    need_frame(key.column);
    if (!degree_) fail(key.column, "[mu] with a degree must come before [twist]");
    if (!model_.form.chi) model_.form.chi = FormField(*degree_ + 1, chart_);
    const MultiIndex idx = component(key, *degree_ + 1);
    model_.form.chi->set(idx, expr(value));
  } else if (section == "quotient") {
    need_frame(key.column);
    std::vector<std::string> names;
    for (const auto& w : words(value)) names.emplace_back(w.text);
    if (k == "fiber") {
      for (const auto& w : words(value)) coordinate(w);
      q_fiber_ = names;
    } else if (k == "kernel") {
      for (const auto& w : words(value)) frame_label(w);
      q_kernel_ = names;
    } else {
      fail(key.column, "expected 'fiber' or 'kernel'");
    }
  } else if (section == "samples") {
    need_chart(key.column);
    if (k == "count") {
      model_.samples.count = integer(value);
      if (model_.samples.count == 0) fail(value.column, "count must be positive");
    } else if (k == "seed") {
      model_.samples.seed = integer(value);
    } else if (k == "fiber_box" || k.rfind("box.", 0) == 0) {
      const auto w = words(value);
      if (w.size() != 2) fail(value.column, "expected 'lo hi'");
      const double lo = number(w[0]), hi = number(w[1]);
      if (!(lo < hi)) fail(value.column, "empty interval");
      if (k == "fiber_box") model_.samples.fiber_box = {lo, hi};
      else box_[coordinate({key.text.substr(4), key.column + 4})] = {lo, hi};
    } else {
      fail(key.column, "unknown key '" + k + "' in [samples]");
    }
  } else if (section == "tolerances") {
    const double v = number(value);
    if (!(v > 0.0)) fail(value.column, "tolerance must be positive");
    if (k == "tol") model_.tolerances.tol = v;
    else if (k == "rank_tol") model_.tolerances.rank_tol = v;
    else fail(key.column, "expected 'tol' or 'rank_tol'");
  } else if (section == "bivector") {
    need_chart(key.column);
    const auto parts = split(key, '^');
    if (parts.size() != 2) fail(key.column, "expected <coord>^<coord>");
    const std::size_t m = coordinate(parts[0]), n = coordinate(parts[1]);
    if (m == n) fail(key.column, "bivector component with repeated index");
    if (!bivector_) bivector_ = Bivector{chart_, {}};
    const Expression e = expr(value);
    bivector_->coeffs[{std::min(m, n), std::max(m, n)}] = m < n ? e : -e;
  } else {
    fail(1, "unknown section [" + section + "]");
  }
}

void Reader::finish() {
  if (!chart_) throw ModelError(line_, 1, "missing [chart]");
  if (!frame_) throw ModelError(line_, 1, "missing [bundle]");
  if (!has_mu_ || !degree_) throw ModelError(line_, 1, "missing [mu] with a degree");
  if (has_eta_ && has_twist_) throw ModelError(line_, 1, "at most one of [eta] and [twist]");
  if (has_twist_) {
    model_.form.eta.clear();
    if (!model_.form.chi) model_.form.chi = FormField(*degree_ + 1, chart_);
  }
  for (const auto& [i, iv] : box_) model_.samples.box.bounds[i] = iv;
  if (has_quotient_) {
    try {
      model_.quotient = QuotientSpec::from_names(model_.algebroid, q_fiber_, q_kernel_);
    } catch (const std::exception& e) {
      throw ModelError(sections_.at("quotient"), 1, e.what());
    }
  }
  model_.bivector = bivector_;
}

ModelFile Reader::run() {
  std::string section;
  std::size_t pos = 0;
  while (pos <= text_.size()) {
    std::size_t end = text_.find('\n', pos);
    if (end == std::string_view::npos) end = text_.size();
    ++line_;
    Piece raw{text_.substr(pos, end - pos), 1};
    pos = end + 1;
    // strip comments
    const auto hash = raw.text.find('#');
    if (hash != std::string_view::npos) raw.text = raw.text.substr(0, hash);
    const Piece ln = trim(raw);
    if (ln.text.empty()) {
      if (end == text_.size()) break;
      continue;
    }
    if (ln.text.front() == '[' && ln.text.find('=') == std::string_view::npos) {
      if (ln.text.back() != ']') fail(ln.column + ln.text.size(), "expected ']'");
      section = std::string(trim({ln.text.substr(1, ln.text.size() - 2), ln.column + 1}).text);
      static const std::set<std::string> known{"meta",  "chart",    "bundle",  "anchor",  "brackets",   "mu",
                                               "eta",   "twist",    "quotient", "samples", "tolerances", "bivector"};
      if (!known.count(section)) fail(ln.column, "unknown section [" + section + "]");
      if (sections_.count(section)) fail(ln.column, "section [" + section + "] appears twice");
      sections_[section] = line_;
      if (section == "eta") has_eta_ = true;
      if (section == "twist") has_twist_ = true;
      if (section == "mu") has_mu_ = true;
      if (section == "quotient") has_quotient_ = true;
      if (end == text_.size()) break;
      continue;
    }
    if (section.empty()) fail(ln.column, "entry outside of a section");
    const auto eq = ln.text.find('=');
    if (eq == std::string_view::npos) fail(ln.column, "expected key = value");
    const Piece key = trim({ln.text.substr(0, eq), ln.column});
    const Piece value = trim({ln.text.substr(eq + 1), ln.column + eq + 1});
    if (key.text.empty()) fail(ln.column, "empty key");
    entry(section, key, value);
    if (end == text_.size()) break;
  }
  finish();
  return std::move(model_);
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

ModelFile parse_model(std::string_view text) { return Reader(text).run(); }

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string component_name(const MultiIndex& idx, const Chart& chart) {
  if (idx.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "^d" : "d") + chart.name(idx[i]);
  return s;
}

std::string write_model(const ModelFile& m) {
  const auto& A = m.algebroid;
  const Chart& chart = *A.chart();
  std::ostringstream out;
  if (!m.name.empty()) out << "[meta]\nname = " << m.name << "\n\n";
  out << "[chart]\ncoordinates =";
  for (const auto& n : chart.names()) out << " " << n;
  out << "\n\n[bundle]\nframe =";
  for (const auto& l : A.frame()) out << " " << l;
  out << "\n\n[anchor]\n";
  for (std::size_t a = 0; a < A.rank(); ++a) {
    out << A.frame()[a] << " =";
    for (std::size_t i = 0; i < A.dim(); ++i) out << (i ? ", " : " ") << A.anchor(a, i).to_string();
    out << "\n";
  }
  out << "\n[brackets]\n";
  for (const auto& [key, e] : A.structure_entries())
    out << "[" << A.frame()[key[0]] << ", " << A.frame()[key[1]] << "]." << A.frame()[key[2]] << " = " << e.to_string() << "\n";
  out << "\n[mu]\ndegree = " << m.form.degree << "\n";
  for (std::size_t a = 0; a < A.rank(); ++a)
    for (const auto& [idx, e] : m.form.mu[a].coeffs())
      out << A.frame()[a] << "." << component_name(idx, chart) << " = " << e.to_string() << "\n";
  if (m.form.chi) {
    out << "\n[twist]\n";
    for (const auto& [idx, e] : m.form.chi->coeffs()) out << component_name(idx, chart) << " = " << e.to_string() << "\n";
  } else {
    bool any = false;
    for (const auto& f : m.form.eta) any = any || !f.coeffs().empty();
    if (any) {
      out << "\n[eta]\n";
      for (std::size_t a = 0; a < A.rank(); ++a)
        for (const auto& [idx, e] : m.form.eta[a].coeffs())
          out << A.frame()[a] << "." << component_name(idx, chart) << " = " << e.to_string() << "\n";
    }
  }
  if (m.quotient) {
    out << "\n[quotient]\nfiber =";
    for (auto i : m.quotient->fiber_coords) out << " " << chart.name(i);
    out << "\nkernel =";
    for (auto a : m.quotient->kernel_sections) out << " " << A.frame()[a];
    out << "\n";
  }
  out << "\n[samples]\n";
  for (std::size_t i = 0; i < chart.dim(); ++i)
    out << "box." << chart.name(i) << " = " << fmt(m.samples.box.bounds[i].first) << " " << fmt(m.samples.box.bounds[i].second) << "\n";
  out << "fiber_box = " << fmt(m.samples.fiber_box.first) << " " << fmt(m.samples.fiber_box.second) << "\n";
  out << "count = " << m.samples.count << "\nseed = " << m.samples.seed << "\n";
  out << "\n[tolerances]\ntol = " << fmt(m.tolerances.tol) << "\nrank_tol = " << fmt(m.tolerances.rank_tol) << "\n";
  if (m.bivector) {
    out << "\n[bivector]\n";
    for (const auto& [key, e] : m.bivector->coeffs)
      out << chart.name(key.first) << "^" << chart.name(key.second) << " = " << e.to_string() << "\n";
  }
  return out.str();
}

}  // namespace algred
