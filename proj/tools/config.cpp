#include "config.hpp"

#include <charconv>
#include <cmath>

#include "chaoslab/errors.hpp"

namespace chaoslab::cli {

namespace {

const std::set<std::string> kTopLevelKeys{"model",  "beta", "levels", "quadrature",  "events",
                                          "mc",     "region", "output_dir", "options"};

double parse_real(std::string_view s, const std::string& whole) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("cannot parse complex number '" + whole + "'");
  return v;
}

std::string describe_type(const json& j) { return j.type_name(); }

}  // namespace

Node::Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError(path_ + ": expected an object, got " + describe_type(j));
}

std::string Node::key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

void Node::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(key_path(key) + ": " + what);
}

bool Node::has(const std::string& key) const { return j_->contains(key) && !(*j_)[key].is_null(); }

const json& Node::raw(const std::string& key) {
  static const json null_value;
  used_.insert(key);
  if (!j_->contains(key)) return null_value;
  return (*j_)[key];
}

Node Node::child(const std::string& key) {
  static const json empty = json::object();
  const json& v = raw(key);
  if (v.is_null()) return Node(empty, key_path(key));
  if (!v.is_object()) fail(key, "expected an object, got " + describe_type(v));
  return Node(v, key_path(key));
}

std::optional<double> Node::number(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) fail(key, "expected a number, got " + describe_type(v));
  return v.get<double>();
}

std::optional<std::int64_t> Node::integer(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer()) fail(key, "expected an integer, got " + describe_type(v));
  return v.get<std::int64_t>();
}

std::optional<std::uint64_t> Node::unsigned_integer(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer, got " + v.dump());
  return v.get<std::uint64_t>();
}

std::optional<std::string> Node::string(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) fail(key, "expected a string, got " + describe_type(v));
  return v.get<std::string>();
}

std::optional<bool> Node::boolean(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (!v.is_boolean()) fail(key, "expected a boolean, got " + describe_type(v));
  return v.get<bool>();
}

std::optional<std::vector<double>> Node::numbers(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (v.is_number()) return std::vector<double>{v.get<double>()};
  if (!v.is_array()) fail(key, "expected a list of numbers, got " + describe_type(v));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::optional<std::vector<std::size_t>> Node::sizes(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  if (v.is_number_unsigned()) return std::vector<std::size_t>{v.get<std::size_t>()};
  if (!v.is_array()) fail(key, "expected a list of non-negative integers, got " + describe_type(v));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_unsigned()) fail(key + "[" + std::to_string(i) + "]", "expected a non-negative integer");
    out.push_back(v[i].get<std::size_t>());
  }
  return out;
}

std::optional<cplx> Node::complex(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  return complex_from_json(v, key_path(key));
}

std::optional<std::vector<cplx>> Node::complexes(const std::string& key) {
  const json& v = raw(key);
  if (v.is_null()) return std::nullopt;
  // [re, im] is one value; any other array is a list.
  const bool single = !v.is_array() || (v.size() == 2 && v[0].is_number() && v[1].is_number());
  if (single) return std::vector<cplx>{complex_from_json(v, key_path(key))};
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(complex_from_json(v[i], key_path(key) + "[" + std::to_string(i) + "]"));
  if (out.empty()) fail(key, "empty list");
  return out;
}

void Node::finish() const {
  for (const auto& [k, v] : j_->items())
    if (!used_.count(k)) throw ConfigError(key_path(k) + ": unknown key");
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.empty()) throw ConfigError("cannot parse complex number ''");
  if (s.back() != 'i' && s.back() != 'j') return {parse_real(s, text), 0.0};
  s.pop_back();
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  auto imag_part = [&](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, text);
  };
  if (split == std::string::npos) return {0.0, imag_part(s)};
  return {parse_real(std::string_view(s).substr(0, split), text), imag_part(std::string_view(s).substr(split))};
}

cplx complex_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) {
    try {
      return parse_complex(j.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  throw ConfigError(path + ": expected a complex number (number, [re, im] or \"a+bi\"), got " + j.dump());
}

CoefficientLaw parse_law(const json& j, const std::string& path) {
  try {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "rademacher") return CoefficientLaw::rademacher();
      if (s == "uniform") return CoefficientLaw::uniform();
      if (s == "gaussian") return CoefficientLaw::gaussian();
      throw ConfigError(path + ": unknown law '" + s + "' (rademacher, uniform, gaussian, two_point)");
    }
    Node n(j, path);
    Node tp = n.child("two_point");
    n.finish();
    const auto p = tp.number("p");
    if (!p) tp.fail("p", "required");
    const auto a = tp.number("a");
    const auto b = tp.number("b");
    tp.finish();
    if (a.has_value() != b.has_value()) tp.fail(a ? "b" : "a", "give both atoms or neither");
    return a ? CoefficientLaw::two_point(*p, *a, *b) : CoefficientLaw::two_point(*p);
  } catch (const ParameterError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::shared_ptr<const FieldModel> parse_model(Node node) {
  const std::string kind = node.string("model").value_or("fourier");
  const json& law_j = node.raw("law");
  try {
    if (kind == "fourier") {
      const auto law = law_j.is_null() ? CoefficientLaw::rademacher() : parse_law(law_j, node.key_path("law"));
      for (const char* k : {"schedule", "base", "covariance", "length"})
        if (node.has(k)) node.fail(k, "not used by the fourier model");
      node.finish();
      return std::make_shared<const FieldModel>(FourierModel{law});
    }
    if (kind != "dilated") node.fail("model", "expected \"fourier\" or \"dilated\", got \"" + kind + "\"");

    Node sched = node.child("schedule");
    ScalingSchedule schedule;
    if (sched.has("a") || sched.has("b")) {
      auto a = sched.numbers("a");
      auto b = sched.numbers("b");
      if (!a || !b) sched.fail(a ? "b" : "a", "explicit schedules need both a and b");
      sched.finish();
      schedule = build_schedule(std::move(*a), std::move(*b));
    } else {
      const auto fam = sched.integer("family").value_or(2);
      const double exponent = sched.number("alpha").value_or(0.4);
      const auto n_max = sched.unsigned_integer("n_max").value_or(4096);
      sched.finish();
      if (fam < 1 || fam > 3) sched.fail("family", "expected 1 (power), 2 (harmonic) or 3 (log_harmonic)");
      const ScheduleFamily f = fam == 1 ? ScheduleFamily::power
                               : fam == 2 ? ScheduleFamily::harmonic
                                          : ScheduleFamily::log_harmonic;
      schedule = build_schedule(f, n_max, exponent);
    }

    const std::string base_name = node.string("base").value_or("gaussian_stationary");
    const std::string cov_name = node.string("covariance").value_or("squared_exponential");
    const double length = node.number("length").value_or(1.0);
    node.finish();
    if (cov_name != "squared_exponential" && cov_name != "exponential")
      node.fail("covariance", "expected \"squared_exponential\" or \"exponential\"");
    if (base_name == "gaussian_stationary") {
      if (!law_j.is_null()) node.fail("law", "a Gaussian base takes no coefficient law");
      const auto cov = cov_name == "exponential" ? CovarianceKind::exponential : CovarianceKind::squared_exponential;
      return std::make_shared<const FieldModel>(
          DilatedModel{StationaryBase::gaussian_stationary(cov, length), std::move(schedule)});
    }
    if (base_name == "cosine") {
      const auto law = law_j.is_null() ? CoefficientLaw::rademacher() : parse_law(law_j, node.key_path("law"));
      return std::make_shared<const FieldModel>(
          DilatedModel{StationaryBase::cosine_process(law), std::move(schedule)});
    }
    node.fail("base", "expected \"gaussian_stationary\" or \"cosine\", got \"" + base_name + "\"");
  } catch (const ParameterError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(node.path() + ": " + e.what());
  }
}

namespace {

TestFunction parse_term(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "one") return TestFunction::one();
    throw ConfigError(path + ": unknown test function '" + j.get<std::string>() + "'");
  }
  Node n(j, path);
  std::optional<cplx> coeff = n.complex("coeff");
  std::optional<TestFunction> f;
  int kinds = 0;
  if (n.has("poly")) {
    ++kinds;
    const json& p = n.raw("poly");
    if (!p.is_array() || p.empty()) n.fail("poly", "expected a non-empty coefficient list");
    std::vector<cplx> c;
    for (std::size_t i = 0; i < p.size(); ++i)
      c.push_back(complex_from_json(p[i], n.key_path("poly") + "[" + std::to_string(i) + "]"));
    f = TestFunction::poly(std::move(c));
  }
  if (n.has("trig")) {
    ++kinds;
    Node t = n.child("trig");
    const auto freq = t.number("freq");
    const double phase = t.number("phase").value_or(0.0);
    if (!freq) t.fail("freq", "required");
    t.finish();
    f = TestFunction::trig(*freq, phase);
  }
  if (n.has("dyadic")) {
    ++kinds;
    Node d = n.child("dyadic");
    const auto l = d.unsigned_integer("l");
    const auto i = d.unsigned_integer("i");
    if (!l || !i) d.fail(l ? "i" : "l", "required");
    d.finish();
    try {
      f = TestFunction::dyadic(static_cast<unsigned>(*l), *i);
    } catch (const ParameterError& e) {
      throw ConfigError(d.path() + ": " + e.what());
    }
  }
  if (n.has("one")) {
    ++kinds;
    n.raw("one");
    f = TestFunction::one();
  }
  n.finish();
  if (kinds != 1) throw ConfigError(path + ": expected exactly one of one, poly, trig, dyadic");
  return coeff ? *coeff * *f : *f;
}

}  // namespace

TestFunction parse_test_function(const json& j, const std::string& path) {
  if (!j.is_array()) return parse_term(j, path);
  if (j.empty()) throw ConfigError(path + ": empty test function list");
  TestFunction f = parse_term(j[0], path + "[0]");
  for (std::size_t i = 1; i < j.size(); ++i) f = f + parse_term(j[i], path + "[" + std::to_string(i) + "]");
  return f;
}

std::shared_ptr<const FieldModel> RunConfig::model() const {
  static const json empty = json::object();
  return parse_model(Node(model_json ? *model_json : empty, "model"));
}

QuadratureSpec RunConfig::quad(unsigned default_g) const {
  return QuadratureSpec{g.value_or(default_g), oversample.value_or(8.0)};
}

RunConfig parse_run_config(const json& j) {
  RunConfig cfg;
  cfg.source = j;
  Node top(j, "");
  for (const auto& [k, v] : j.items())
    if (!kTopLevelKeys.count(k)) throw ConfigError(k + ": unknown key");

  if (top.has("model")) {
    top.child("model");
    cfg.model_json = j["model"];
    cfg.model();  // validate now
  }
  cfg.betas = top.complexes("beta");
  cfg.levels = top.sizes("levels");

  Node q = top.child("quadrature");
  if (auto g = q.unsigned_integer("g")) {
    if (*g < 1 || *g > 24) q.fail("g", "must lie in [1, 24]");
    cfg.g = static_cast<unsigned>(*g);
  }
  cfg.oversample = q.number("oversample");
  if (cfg.oversample && *cfg.oversample < 8.0) q.fail("oversample", "must be at least 8");
  q.finish();

  Node ev = top.child("events");
  const json& a = ev.raw("alpha");
  if (a.is_string()) {
    if (a.get<std::string>() != "auto") ev.fail("alpha", "expected a number or \"auto\"");
    cfg.alpha_auto = true;
  } else if (a.is_number()) {
    cfg.alpha = a.get<double>();
  } else if (!a.is_null()) {
    ev.fail("alpha", "expected a number or \"auto\"");
  }
  cfg.p = ev.number("p");
  if (cfg.p && !(*cfg.p > 0.0)) ev.fail("p", "must be positive");
  ev.finish();

  Node mc = top.child("mc");
  if (auto r = mc.unsigned_integer("replicas")) {
    if (*r == 0) mc.fail("replicas", "must be at least 1");
    cfg.replicas = *r;
  }
  cfg.seed = mc.unsigned_integer("master_seed");
  if (auto t = mc.unsigned_integer("threads")) {
    if (*t == 0) mc.fail("threads", "must be at least 1");
    cfg.threads = *t;
  }
  mc.finish();

  if (top.has("region")) {
    Node r = top.child("region");
    BetaRegion region;
    const json& circles = r.raw("circles");
    if (!circles.is_null()) {
      if (!circles.is_array()) r.fail("circles", "expected a list");
      for (std::size_t i = 0; i < circles.size(); ++i) {
        Node c(circles[i], r.key_path("circles") + "[" + std::to_string(i) + "]");
        BetaCircle bc;
        bc.center = c.complex("center").value_or(bc.center);
        bc.radius = c.number("radius").value_or(bc.radius);
        bc.m = c.unsigned_integer("m").value_or(bc.m);
        c.finish();
        try {
          validate(bc);
        } catch (const ParameterError& e) {
          throw ConfigError(c.path() + ": " + e.what());
        }
        region.circles.push_back(bc);
      }
    }
    if (r.has("rectangle")) {
      Node rect = r.child("rectangle");
      BetaRectangle br;
      if (auto re = rect.numbers("re")) {
        if (re->size() != 2 || !((*re)[0] <= (*re)[1])) rect.fail("re", "expected [lo, hi]");
        br.re_lo = (*re)[0];
        br.re_hi = (*re)[1];
      }
      if (auto im = rect.numbers("im")) {
        if (im->size() != 2 || !((*im)[0] <= (*im)[1])) rect.fail("im", "expected [lo, hi]");
        br.im_lo = (*im)[0];
        br.im_hi = (*im)[1];
      }
      br.nx = rect.unsigned_integer("nx").value_or(br.nx);
      br.ny = rect.unsigned_integer("ny").value_or(br.ny);
      if (br.nx == 0 || br.ny == 0) rect.fail(br.nx == 0 ? "nx" : "ny", "must be at least 1");
      rect.finish();
      region.rectangle = br;
    }
    r.finish();
    cfg.region = region;
  }
  cfg.output_dir = top.string("output_dir");
  if (top.has("options")) {
    top.child("options");
    cfg.options = j["options"];
  }
  top.finish();
  return cfg;
}

}  // namespace chaoslab::cli
