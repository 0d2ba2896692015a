#include "sesop/bench/solvers.hpp"

#include "sesop/baselines.hpp"
#include "sesop/sesop.hpp"
#include "sesop/text.hpp"
#include "sesop/tn.hpp"

#include <algorithm>
#include <cctype>

namespace sesop::bench {

namespace {

struct Entry {
  std::string name;
  std::vector<std::string> keys;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"sesop", {"M", "orth", "inner_tol", "max_inner"}},
      {"sesop_orth", {"M", "inner_tol", "max_inner"}},
      {"pcd_sesop", {"M", "orth", "inner_tol", "max_inner"}},
      {"ssf_sesop", {"M", "orth", "inner_tol", "max_inner"}},
      {"pcd", {}},
      {"ssf", {}},
      {"sesop_newton", {"M", "inner_tol", "max_inner"}},
      {"sesop_tn", {"lmax", "force", "outer_steps", "outer_gradients", "warm"}},
      {"tn", {"lmax", "force"}},
      {"linear_cg", {}},
      {"fista", {"c", "restart"}},
      {"ista", {"c"}},
      {"steepest_descent", {"ls"}},
      {"nonlinear_cg", {"ls"}},
  };
  return entries;
}

const Entry& find(const std::string& name) {
  for (const Entry& e : registry())
    if (e.name == name) return e;
  std::string valid;
  for (const Entry& e : registry()) valid += (valid.empty() ? "" : ", ") + e.name;
  throw Error("unknown solver '" + name + "' (valid: " + valid + ")");
}

class Params {
public:
  explicit Params(const SolverSpec& spec) : p_(spec.params) {}

  double number(const std::string& key, double fallback) const {
    auto it = p_.find(key);
    return it == p_.end() ? fallback : parse_double(it->second);
  }
  Index integer(const std::string& key, Index fallback) const {
    auto it = p_.find(key);
    return it == p_.end() ? fallback : static_cast<Index>(parse_int(it->second));
  }
  bool flag(const std::string& key, bool fallback) const { return integer(key, fallback) != 0; }
  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = p_.find(key);
    return it == p_.end() ? fallback : it->second;
  }

private:
  const std::map<std::string, std::string>& p_;
};

const CompositeObjective& need_composite(const Problem& problem, const std::string& solver) {
  const CompositeObjective* comp = problem.objective->composite();
  if (!comp) throw Error(solver + " needs a composite (least-squares) problem");
  return *comp;
}

LineSearchMode parse_ls(const std::string& text) {
  if (text == "armijo") return LineSearchMode::armijo;
  if (text == "exact") return LineSearchMode::exact_quadratic;
  throw Error("unknown line search '" + text + "' (valid: armijo, exact)");
}

}  // namespace

std::string SolverSpec::to_string() const {
  std::string out = "solver=" + name;
  for (const auto& [k, v] : params) out += "," + k + "=" + v;
  return out;
}

std::string SolverSpec::label() const {
  std::string out = name;
  for (const auto& [k, v] : params) out += "_" + k + v;
  std::replace_if(out.begin(), out.end(), [](char ch) { return !(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'); }, '-');
  return out;
}

SolverSpec SolverSpec::parse(std::string_view text) {
  SolverSpec spec;
  std::vector<std::string> parts = split(text, ',');
  if (!parts.empty() && trim(parts.front()).find('=') == std::string::npos) {
    spec.name = trim(parts.front());
    parts.erase(parts.begin());
  }
  std::string rest;
  for (const std::string& p : parts) rest += (rest.empty() ? "" : ",") + p;
  if (!trim(rest).empty()) spec.params = parse_key_values(rest);
  if (auto it = spec.params.find("solver"); it != spec.params.end()) {
    if (!spec.name.empty()) throw Error("solver named twice in '" + std::string(text) + "'");
    spec.name = it->second;
    spec.params.erase(it);
  }
  if (spec.name.empty()) throw Error("solver spec needs a name");
  validate(spec);
  return spec;
}

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Entry& e : registry()) out.push_back(e.name);
    return out;
  }();
  return names;
}

const std::vector<std::string>& solver_keys(const std::string& name) { return find(name).keys; }

void validate(const SolverSpec& spec) {
  const Entry& e = find(spec.name);
  for (const auto& [k, v] : spec.params) {
    if (std::find(e.keys.begin(), e.keys.end(), k) == e.keys.end()) {
      std::string valid;
      for (const std::string& key : e.keys) valid += (valid.empty() ? "" : ", ") + key;
      throw Error("solver " + spec.name + " has no parameter '" + k + "' (valid: " +
                  (valid.empty() ? "none" : valid) + ")");
    }
  }
}

SolveResult run_solver(const SolverSpec& spec, const Problem& problem, const StopCriteria& stop,
                       const RunOptions& options) {
  validate(spec);
  const Objective& obj = *problem.objective;
  const Params p(spec);
  const std::string& n = spec.name;

  if (n == "sesop" || n == "sesop_orth" || n == "pcd_sesop" || n == "ssf_sesop" || n == "pcd" ||
      n == "ssf" || n == "sesop_newton") {
    SesopConfig c;
    c.stop = stop;
    if (n == "pcd" || n == "pcd_sesop") c.first = FirstDirection::pcd;
    if (n == "ssf" || n == "ssf_sesop") c.first = FirstDirection::ssf;
    if (n == "sesop_newton") c.first = FirstDirection::newton;
    c.history = (n == "pcd" || n == "ssf") ? 0 : p.integer("M", c.history);
    c.include_orth = p.flag("orth", n == "sesop_orth");
    c.inner.tol = p.number("inner_tol", c.inner.tol);
    c.inner.max_inner = static_cast<int>(p.integer("max_inner", c.inner.max_inner));
    SolveResult r = run_sesop(obj, problem.x0, c, options);
    r.trace.set_header("solver", n);
    return r;
  }
  if (n == "sesop_tn" || n == "tn") {
    TnConfig t;
    t.stop = stop;
    t.l_max = p.integer("lmax", t.l_max);
    if (spec.params.count("force")) t.fixed_force_tol = p.number("force", 0.5);
    if (n == "tn") return run_tn_classic(obj, problem.x0, t, options);
    SesopTnConfig c;
    c.tn = t;
    c.outer_steps = p.integer("outer_steps", c.outer_steps);
    c.outer_gradients = p.integer("outer_gradients", c.outer_gradients);
    c.warm_start = p.flag("warm", c.warm_start);
    return run_sesop_tn(obj, problem.x0, c, options);
  }
  if (n == "linear_cg") {
    LinearCgOptions cg;
    cg.tol = stop.grad_tol;
    cg.max_iter = stop.max_iters;
    if (stop.max_cg_steps > 0) cg.max_iter = std::min<Index>(cg.max_iter, stop.max_cg_steps);
    cg.f_tol = stop.f_tol;
    return run_linear_cg(obj, problem.x0, cg, options);
  }
  if (n == "fista" || n == "ista") {
    const CompositeObjective& comp = need_composite(problem, n);
    ProximalConfig c;
    c.stop = stop;
    c.c = p.number("c", 0.0);
    c.restart = p.flag("restart", false);
    return n == "fista" ? run_fista(comp, problem.x0, c, options)
                        : run_ssf_iteration(comp, problem.x0, c, options);
  }
  DescentConfig d;
  d.stop = stop;
  d.line_search = parse_ls(p.text("ls", "armijo"));
  if (n == "steepest_descent") return run_steepest_descent(obj, problem.x0, d, options);
  return run_nonlinear_cg(obj, problem.x0, d, options);
}

}  // namespace sesop::bench
