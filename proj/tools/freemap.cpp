// freemap: command-line front end.
//
// Exit codes: 0 pass, 1 property violation, 2 parse/usage error,
// 3 evaluation error, 4 I/O or file-format error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freemap/calc.hpp"
#include "freemap/elliptic.hpp"
#include "freemap/json_io.hpp"
#include "freemap/parser.hpp"
#include "freemap/random.hpp"

using namespace freemap;

namespace {

constexpr int kPass = 0, kViolation = 1, kParse = 2, kEval = 3, kIo = 4;

struct Options {
  std::string tuple_file, domain_file, codomain_file, direction_file, x_file, y_file, gamma_file;
  std::string out_file;
  std::vector<std::string> exprs;
  std::string suite;
  std::uint64_t seed = 1;
  int trials = 0;
  std::optional<double> tol;
  bool as_json = false;
  std::size_t arity = 0;
  double theta = 0.7;
  int rays = 8;
  int steps = 12;
  std::size_t size = 2;
};

struct Outcome {
  json report;
  int code = kPass;
};

// ---------------------------------------------------------------------------
// Input helpers

MatrixTuple load_tuple(const std::string& path) { return tuple_from_json(read_json_file(path)); }
NCDomain load_domain(const std::string& path) { return domain_from_json(read_json_file(path)); }
Matrix load_matrix(const std::string& path) { return matrix_from_json(read_json_file(path)); }

FreeMap build_map(const std::vector<std::string>& exprs, std::size_t arity) {
  if (exprs.empty()) throw std::invalid_argument("no expression given");
  std::vector<Expr> comps;
  for (const auto& s : exprs) comps.push_back(parse(s, arity));
  return FreeMap(arity, std::move(comps));
}

json inputs_of(const Options& o) {
  json in = json::object();
  if (!o.exprs.empty()) in["exprs"] = o.exprs;
  for (const auto& [key, path] : {std::pair{"tuple", o.tuple_file}, {"domain", o.domain_file},
                                  {"codomain", o.codomain_file}, {"direction", o.direction_file},
                                  {"x", o.x_file}, {"y", o.y_file}, {"gamma", o.gamma_file}})
    if (!path.empty()) in[key] = read_json_file(path);
  return in;
}

double tuple_max_abs(const MatrixTuple& t) {
  double s = 0.0;
  for (const auto& m : t) s = std::max(s, max_abs(m));
  return s;
}

double tuple_diff(const MatrixTuple& a, const MatrixTuple& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.arity(); ++j) d = std::max(d, max_abs_diff(a[j], b[j]));
  return d;
}

// Random member of `dom` of size n: a random tuple, halved until it lies inside.
MatrixTuple random_member(Rng& rng, const NCDomain& dom, std::size_t n) {
  MatrixTuple x = random_tuple(rng, dom.arity(), n, rng.uniform(0.1, 2.0));
  for (int k = 0; k < 60; ++k) {
    if (dom.is_member(x)) return x;
    x = cplx{0.5, 0.0} * x;
  }
  throw std::runtime_error("could not sample a domain member");
}

// Random member of the disk domain ||X - 1|| < sqrt(2).
MatrixTuple disk_member(Rng& rng, std::size_t n) {
  return MatrixTuple{Matrix::identity(n) +
                     random_matrix_with_norm(rng, n, rng.uniform(0.0, 0.99) * std::numbers::sqrt2)};
}

// ---------------------------------------------------------------------------
// Commands

Outcome cmd_eval(const Options& o) {
  const MatrixTuple x = load_tuple(o.tuple_file);
  const std::size_t g = o.arity ? o.arity : x.arity();
  const FreeMap f = build_map(o.exprs, g);
  const MatrixTuple fx = evaluate_map(f, x);
  json r = report_json("eval", inputs_of(o), "ok", 0.0, json::array());
  r["result"] = fx.arity() == 1 ? to_json(fx[0]) : to_json(fx);
  return {r, kPass};
}

Outcome cmd_member(const Options& o) {
  const NCDomain dom = load_domain(o.domain_file);
  const MatrixTuple x = load_tuple(o.tuple_file);
  const Location loc = dom.classify(x);
  const double gap = dom.boundary_distance(x);
  json r = report_json("member", inputs_of(o), to_string(loc), 0.0, json::array());
  r["member"] = dom.is_member(x);
  r["gap"] = gap;
  return {r, kPass};
}

Outcome cmd_deriv(const Options& o) {
  const MatrixTuple x = load_tuple(o.tuple_file);
  const FreeMap f = build_map(o.exprs, o.arity ? o.arity : x.arity());
  json r = report_json("deriv", inputs_of(o), "ok", 0.0, json::array());
  if (!o.direction_file.empty()) {
    const MatrixTuple h = load_tuple(o.direction_file);
    const MatrixTuple d = directional_derivative(f, x, h);
    r["derivative"] = d.arity() == 1 ? to_json(d[0]) : to_json(d);
  } else {
    const DerivativeMatrix d = derivative_matrix(f, x);
    const auto sv = singular_values(d.matrix);
    r["matrix"] = to_json(d.matrix);
    r["smallest_singular_value"] = sv.empty() ? 0.0 : sv.back();
    r["largest_singular_value"] = sv.empty() ? 0.0 : sv.front();
  }
  return {r, kPass};
}

// Property suites over seeded random instances.
Outcome cmd_check(const Options& o) {
  Rng rng(o.seed);
  const int trials = o.trials > 0 ? o.trials : 50;
  json samples = json::array();
  double worst = 0.0;  // deviation relative to scale
  double tol = 0.0;

  if (o.suite == "blocks") {
    tol = o.tol.value_or(1e-10);
    for (int t = 0; t < trials; ++t) {
      const std::size_t g = rng.integer(1, 3), n = rng.integer(1, 3), m = rng.integer(1, 3);
      const FreeMap f = random_self_map(rng, g, 4, 4);
      const BlockWitness w{random_tuple(rng, g, n), random_tuple(rng, g, m),
                           random_matrix(rng, n, m) * (1.0 / std::sqrt(double(n * m))), 1.0};
      const auto rep = check_block_formula(f, w);
      const double rel = rep.max_deviation / rep.scale;
      worst = std::max(worst, rel);
      samples.push_back(json{{"trial", t}, {"n", n}, {"m", m}, {"relative_deviation", rel}});
    }
  } else if (o.suite == "sums") {
    tol = o.tol.value_or(1e-10);
    for (int t = 0; t < trials; ++t) {
      const std::size_t g = rng.integer(1, 3), n = rng.integer(1, 3), m = rng.integer(1, 3);
      const FreeMap f = random_self_map(rng, g, 4, 4);
      const MatrixTuple x = random_tuple(rng, g, n), y = random_tuple(rng, g, m);
      const MatrixTuple want = direct_sum(evaluate_map(f, x), evaluate_map(f, y));
      const double rel = tuple_diff(evaluate_map(f, direct_sum(x, y)), want) / std::max(1.0, tuple_max_abs(want));
      worst = std::max(worst, rel);
      samples.push_back(json{{"trial", t}, {"n", n}, {"m", m}, {"relative_deviation", rel}});
    }
  } else if (o.suite == "similarity") {
    tol = o.tol.value_or(1e-9);
    for (int t = 0; t < trials; ++t) {
      const std::size_t g = rng.integer(1, 3), n = rng.integer(1, 4);
      const FreeMap f = random_self_map(rng, g, 4, 4);
      const MatrixTuple x = random_tuple(rng, g, n);
      const Matrix s = random_well_conditioned(rng, n, 10.0), si = inverse(s);
      std::vector<Matrix> sx, want;
      for (const auto& c : x) sx.push_back(s * c * si);
      for (const auto& c : evaluate_map(f, x)) want.push_back(s * c * si);
      const MatrixTuple w(std::move(want));
      const double rel = tuple_diff(evaluate_map(f, MatrixTuple(std::move(sx))), w) / std::max(1.0, tuple_max_abs(w));
      worst = std::max(worst, rel);
      samples.push_back(json{{"trial", t}, {"n", n}, {"relative_deviation", rel}});
    }
  } else if (o.suite == "derivative") {
    tol = o.tol.value_or(1e-6);
    for (int t = 0; t < trials; ++t) {
      const std::size_t g = rng.integer(1, 2), n = rng.integer(1, 4);
      const FreeMap f = random_self_map(rng, g, 4, 4);
      const MatrixTuple x = random_tuple(rng, g, n, 0.8), h = random_tuple(rng, g, n);
      const MatrixTuple d = directional_derivative(f, x, h);
      constexpr double s = 1e-5;
      const MatrixTuple fd = cplx{1.0 / (2.0 * s), 0.0} *
                             (evaluate_map(f, x + cplx{s, 0.0} * h) - evaluate_map(f, x - cplx{s, 0.0} * h));
      const double rel = tuple_diff(d, fd) / std::max(1.0, tuple_max_abs(d));
      worst = std::max(worst, rel);
      samples.push_back(json{{"trial", t}, {"n", n}, {"relative_deviation", rel}});
    }
    // x^2 has derivative XH + HX exactly.
    const FreeMap sq(1, {parse("x1^2", 1)});
    const Matrix x = random_matrix(rng, 3, 3), h = random_matrix(rng, 3, 3);
    const Matrix want = x * h + h * x;
    const double rel =
        max_abs_diff(directional_derivative(sq, MatrixTuple{x}, MatrixTuple{h})[0], want) / std::max(1.0, max_abs(want));
    worst = std::max(worst, rel);
    samples.push_back(json{{"trial", "x1^2"}, {"n", 3}, {"relative_deviation", rel}});
  } else if (o.suite == "ampliation") {
    tol = o.tol.value_or(1e-8);
    for (int t = 0; t < trials; ++t) {
      const FreeMap f = t == 0 ? mobius_map(o.theta) : random_self_map(rng, rng.integer(1, 2), 3, 3);
      for (std::size_t n : {2, 3}) {
        const auto rep = ampliation_check(f, n);
        worst = std::max(worst, rep.max_mismatch);
        samples.push_back(json{{"trial", t}, {"g", f.arity()}, {"n", n}, {"max_mismatch", rep.max_mismatch}});
      }
    }
  } else {
    throw CLI::ValidationError("check", "unknown suite '" + o.suite + "'");
  }

  const bool ok = worst <= tol;
  json r = report_json("check " + o.suite, json{{"seed", o.seed}, {"trials", trials}}, ok ? "pass" : "fail", worst,
                       std::move(samples));
  r["tolerance"] = tol;
  return {r, ok ? kPass : kViolation};
}

Outcome cmd_probe_proper(const Options& o) {
  const NCDomain dom = load_domain(o.domain_file);
  const NCDomain codom = o.codomain_file.empty() ? dom : load_domain(o.codomain_file);
  const FreeMap f = build_map(o.exprs, dom.arity());
  Rng rng(o.seed);
  std::vector<MatrixTuple> rays;
  if (!o.tuple_file.empty()) rays.push_back(load_tuple(o.tuple_file));
  for (int k = 0; k < o.rays; ++k) rays.push_back(random_tuple(rng, dom.arity(), o.size));
  const auto rep = properness_probe(f, dom, codom, rays, o.steps);
  const double tol = o.tol.value_or(1e-6);
  const bool ok = rep.failed_rays == 0 && rep.max_terminal_gap <= tol;
  json in = inputs_of(o);
  in["seed"] = o.seed;
  json r = report_json("probe-proper", in, ok ? "boundary-to-boundary" : "properness-violated", rep.max_terminal_gap,
                       to_json(rep)["rays"]);
  r["failed_rays"] = rep.failed_rays;
  r["tolerance"] = tol;
  return {r, ok ? kPass : kViolation};
}

Outcome cmd_probe_injective(const Options& o) {
  const NCDomain dom = load_domain(o.domain_file);
  const FreeMap f = build_map(o.exprs, dom.arity());
  const double tol = o.tol.value_or(1e-9);
  json samples = json::array();
  std::size_t candidates = 0;
  double worst = 0.0;
  auto run = [&](const MatrixTuple& x, const MatrixTuple& y, const Matrix& gamma) {
    const auto rep = injectivity_probe(f, dom, x, y, gamma, tol);
    candidates += rep.verdict == InjectivityVerdict::counterexample_candidate;
    worst = std::max(worst, rep.image_defect);
    samples.push_back(to_json(rep));
  };
  if (!o.x_file.empty() || !o.y_file.empty()) {
    if (o.x_file.empty() || o.y_file.empty()) throw CLI::ValidationError("probe-injective", "--x and --y go together");
    const MatrixTuple x = load_tuple(o.x_file), y = load_tuple(o.y_file);
    run(x, y, o.gamma_file.empty() ? Matrix::identity(x.size()).block(0, 0, x.size(), y.size())
                                   : load_matrix(o.gamma_file));
  } else {
    Rng rng(o.seed);
    const int trials = o.trials > 0 ? o.trials : 100;
    for (int t = 0; t < trials; ++t) {
      const std::size_t n = rng.integer(1, static_cast<int>(o.size)), m = rng.integer(1, static_cast<int>(o.size));
      const MatrixTuple x = random_member(rng, dom, n), y = random_member(rng, dom, m);
      run(x, y, random_matrix(rng, n, m));
    }
  }
  json in = inputs_of(o);
  in["seed"] = o.seed;
  const std::string verdict = candidates ? "counterexample-candidate" : "no-counterexample";
  json r = report_json("probe-injective", in, verdict, worst, std::move(samples));
  r["counterexample_candidates"] = candidates;
  return {r, candidates ? kViolation : kPass};
}

Outcome cmd_mobius(const Options& o) {
  const double theta = o.theta;
  const int trials = o.trials > 0 ? o.trials : 100;
  const FreeMap f = mobius_map(theta), finv = mobius_map(-theta);
  const NCDomain disk = NCDomain::pencil(disk_pencil());
  Rng rng(o.seed);

  // membership preservation and inverse round trip
  std::size_t preserved = 0;
  double inverse_dev = 0.0;
  for (int t = 0; t < trials; ++t) {
    const MatrixTuple x = disk_member(rng, rng.integer(1, 4));
    const MatrixTuple fx = evaluate_map(f, x);
    preserved += disk.is_member(fx);
    inverse_dev = std::max(inverse_dev, tuple_diff(evaluate_map(finv, fx), x) / std::max(1.0, tuple_max_abs(x)));
  }

  // properness along 8 rays, sizes 1..4
  std::vector<MatrixTuple> rays;
  for (int k = 0; k < o.rays; ++k) rays.push_back(MatrixTuple{random_matrix(rng, 1 + k % 4, 1 + k % 4)});
  const auto proper = properness_probe(f, disk, disk, rays, o.steps);

  const cplx d0 = directional_derivative(f, MatrixTuple{Matrix(1, 1)}, MatrixTuple{Matrix::scalar(1.0)})[0](0, 0);
  const double deriv_dev = std::abs(d0 - std::exp(cplx{0.0, theta}));

  const double gap_tol = o.tol.value_or(1e-6);
  const bool members_ok = preserved == static_cast<std::size_t>(trials);
  const bool proper_ok = proper.failed_rays == 0 && proper.max_terminal_gap <= gap_tol;
  const bool deriv_ok = deriv_dev <= 1e-10;
  const bool inverse_ok = inverse_dev <= 1e-10;
  const bool ok = members_ok && proper_ok && deriv_ok && inverse_ok;

  json r = report_json("mobius", json{{"theta", theta}, {"seed", o.seed}, {"trials", trials}}, ok ? "pass" : "fail",
                       std::max({proper.max_terminal_gap, deriv_dev, inverse_dev}), to_json(proper)["rays"]);
  r["checks"] = json{
      {"membership", {{"preserved", preserved}, {"trials", trials}, {"passed", members_ok}}},
      {"properness", {{"max_terminal_gap", proper.max_terminal_gap}, {"failed_rays", proper.failed_rays},
                      {"tolerance", gap_tol}, {"passed", proper_ok}}},
      {"derivative_at_zero", {{"value", complex_json(d0)}, {"deviation", deriv_dev}, {"tolerance", 1e-10},
                              {"passed", deriv_ok}}},
      {"inverse", {{"theta_inverse", -theta}, {"max_relative_deviation", inverse_dev}, {"tolerance", 1e-10},
                   {"passed", inverse_ok}}}};
  return {r, ok ? kPass : kViolation};
}

Outcome cmd_ellipse(const Options& o) {
  const EllipseModel model;
  const WitnessReport w = nonexistence_witness(model);
  auto within = [](double v, double ref, double tol) { return std::abs(v - ref) <= tol; };
  const json checks{
      {"r0", within(w.r0, EllipseReference::r0, EllipseReference::r0_tol)},
      {"min_eig", within(w.min_eig, EllipseReference::min_eig, EllipseReference::min_eig_tol)},
      {"c3_over_c1", within(w.c3_over_c1, EllipseReference::c3_over_c1, EllipseReference::c3_tol)},
      {"c5_over_c1", within(w.c5_over_c1, EllipseReference::c5_over_c1, EllipseReference::c5_tol)}};
  bool ok = true;
  for (const auto& [k, v] : checks.items()) ok = ok && v.get<bool>();
  const double dev = std::max({std::abs(w.r0 - EllipseReference::r0) / EllipseReference::r0_tol,
                               std::abs(w.min_eig - EllipseReference::min_eig) / EllipseReference::min_eig_tol,
                               std::abs(w.c3_over_c1 - EllipseReference::c3_over_c1) / EllipseReference::c3_tol,
                               std::abs(w.c5_over_c1 - EllipseReference::c5_over_c1) / EllipseReference::c5_tol});
  json r = report_json("ellipse", json{{"t", model.t()}}, ok ? "pass" : "fail", dev, json::array());
  const json witness = to_json(w);
  for (const auto& [k, v] : witness.items()) r[k] = v;
  r["model"] = json{{"t", model.t()}, {"K", model.complete_k()}, {"mu", model.mu()}, {"a", model.a()},
                    {"b", model.b()}, {"C1", model.c1()}, {"C2", model.c2()}};
  r["checks"] = checks;
  r["interior"] = w.min_eig > 0.0;
  (void)o;
  return {r, ok ? kPass : kViolation};
}

// ---------------------------------------------------------------------------
// Output

void print_text(std::ostream& os, const json& r) {
  for (const auto& [k, v] : r.items()) {
    if (v.is_primitive()) {
      os << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    } else {
      const std::string s = v.dump();
      if (s.size() <= 160) os << k << ": " << s << '\n';
      else os << k << ": [" << v.size() << " entries; use --json]\n";
    }
  }
}

int emit(const Options& o, const Outcome& out) {
  std::ostringstream buf;
  if (o.as_json) buf << out.report.dump(2) << '\n';
  else print_text(buf, out.report);
  if (o.out_file.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream f(o.out_file);
    if (!(f << buf.str())) {
      std::cerr << "error: cannot write " << o.out_file << '\n';
      return kIo;
    }
  }
  return out.code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free maps on matrix tuples: evaluation, LMI domains, derivatives and rigidity probes"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "PRNG seed (mt19937_64)");
    c->add_option("--trials", o.trials, "number of randomized trials");
    c->add_option("--tol", o.tol, "tolerance override");
    c->add_flag("--json", o.as_json, "emit JSON");
    c->add_option("--out", o.out_file, "write the report to a file");
  };

  auto* eval = app.add_subcommand("eval", "evaluate expressions at a tuple");
  eval->add_option("expr", o.exprs, "expression(s), one per component")->required();
  eval->add_option("--tuple", o.tuple_file, "tuple JSON file")->required();
  eval->add_option("--arity", o.arity, "number of variables (default: tuple arity)");
  common(eval);

  auto* member = app.add_subcommand("member", "domain membership and spectral gap");
  member->add_option("--domain", o.domain_file, "domain JSON file")->required();
  member->add_option("--tuple", o.tuple_file, "tuple JSON file")->required();
  common(member);

  auto* deriv = app.add_subcommand("deriv", "derivative by the block trick");
  deriv->add_option("expr", o.exprs, "expression(s), one per component")->required();
  deriv->add_option("--tuple", o.tuple_file, "base point")->required();
  deriv->add_option("--direction", o.direction_file, "direction H (omit for the full derivative matrix)");
  deriv->add_option("--arity", o.arity, "number of variables (default: tuple arity)");
  common(deriv);

  auto* check = app.add_subcommand("check", "randomized property suites");
  check->add_option("suite", o.suite, "blocks | sums | similarity | derivative | ampliation")
      ->required()
      ->check(CLI::IsMember({"blocks", "sums", "similarity", "derivative", "ampliation"}));
  check->add_option("--theta", o.theta, "angle of the Mobius map included in the ampliation suite");
  common(check);

  auto* proper = app.add_subcommand("probe-proper", "boundary-to-boundary probe along rays");
  proper->add_option("expr", o.exprs, "expression(s), one per component")->required();
  proper->add_option("--domain", o.domain_file, "domain JSON file")->required();
  proper->add_option("--codomain", o.codomain_file, "codomain JSON file (default: the domain)");
  proper->add_option("--tuple", o.tuple_file, "extra ray direction");
  proper->add_option("--rays", o.rays, "number of random rays");
  proper->add_option("--steps", o.steps, "points per ray");
  proper->add_option("--size", o.size, "matrix size of random rays");
  common(proper);

  auto* inj = app.add_subcommand("probe-injective", "intertwining probe for injectivity");
  inj->add_option("expr", o.exprs, "expression(s), one per component")->required();
  inj->add_option("--domain", o.domain_file, "domain JSON file")->required();
  inj->add_option("--x", o.x_file, "tuple X");
  inj->add_option("--y", o.y_file, "tuple Y");
  inj->add_option("--gamma", o.gamma_file, "matrix Gamma (default: identity)");
  inj->add_option("--size", o.size, "largest matrix size for random trials");
  common(inj);

  auto* mob = app.add_subcommand("mobius", "Mobius self-maps of the disk domain");
  mob->add_option("--theta", o.theta, "rotation angle");
  mob->add_option("--rays", o.rays, "number of properness rays");
  mob->add_option("--steps", o.steps, "points per ray");
  common(mob);

  auto* ell = app.add_subcommand("ellipse", "nonexistence witness on the ellipse domain");
  common(ell);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kParse;
  }

  try {
    Outcome out;
    if (*eval) out = cmd_eval(o);
    else if (*member) out = cmd_member(o);
    else if (*deriv) out = cmd_deriv(o);
    else if (*check) out = cmd_check(o);
    else if (*proper) out = cmd_probe_proper(o);
    else if (*inj) out = cmd_probe_injective(o);
    else if (*mob) out = cmd_mobius(o);
    else out = cmd_ellipse(o);
    return emit(o, out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kIo;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kEval;
  } catch (const std::exception& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kEval;
  }
}
