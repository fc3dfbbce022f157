// Command-line front end: verification, structure audits, metric search,
// catalog emission, and curvature reports for left-invariant geometry on
// finite-dimensional real Lie algebras.
//
// Exit codes: 0 success / l.c.K. confirmed; 1 genuine negative;
//             2 invalid input; 3 precondition unmet.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lck/catalog.hpp"
#include "lck/search.hpp"
#include "lck/structure.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitPrecondition = 3;

constexpr const char* kSchema = "lck-report/1";

bool log_enabled() {
  const char* v = std::getenv("LCK_LOG");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

void vlog(const std::string& msg) {
  if (log_enabled()) std::cerr << "[lck] " << msg << "\n";
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lck::ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonOpts {
  bool json = false;
  bool exact = false;
};

struct LoadedInput {
  lck::AlgebraFileVariant data;
  std::string digest;
};

LoadedInput load_input(const std::string& path, const CommonOpts& opts) {
  std::string text = read_file(path);
  LoadedInput out{lck::load_algebra_text(text, path), fnv1a_hex(text)};
  if (opts.exact && std::holds_alternative<lck::AlgebraFile<double>>(out.data))
    throw lck::ValidationError(
        path + ": file contains decimal entries but --exact was requested");
  vlog("loaded " + path + " (backend " +
       (out.data.index() == 0 ? std::string("rational") : std::string("float")) +
       ")");
  return out;
}

template <class S>
const char* backend_name() {
  return lck::scalar_traits<S>::exact ? "rational" : "float";
}

void emit_report(const CommonOpts& opts, const ordered_json& rep,
                 const std::string& human) {
  if (opts.json)
    std::cout << rep.dump(2) << "\n";
  else
    std::cout << human;
}

std::string yesno(bool v) { return v ? "yes" : "no"; }

// ---------------------------------------------------------------------- verify

template <class S>
int run_verify(const lck::AlgebraFile<S>& file, const std::string& path,
               const std::string& digest, const CommonOpts& opts) {
  using namespace lck;
  if (!file.J || !file.metric)
    throw ValidationError(path + ": verify needs both a J and a metric");

  const LieAlgebra<S>& g = file.algebra;
  JClass jc = classify_J(g, *file.J);
  if (!jc.almost_complex)
    throw ValidationError(path + ": J squared is not minus the identity");
  if (!jc.integrable)
    throw ValidationError(path + ": J is not integrable (nonzero torsion " +
                          std::to_string(jc.worst_integrable) + ")");

  HermitianStructure<S> h(g, InnerProduct<S>(*file.metric), *file.J,
                          file.orientation);
  LckCertificate<S> cert = check_lck(h);

  std::string theta_str = format_form(cert.theta, g.dual_labels());
  std::string verdict;
  int code = kExitNegative;
  if (cert.is_kahler) {
    verdict = "kahler: yes, theta = 0";
    code = kExitOk;
  } else if (cert.is_lck) {
    verdict = "lcK: yes, theta = " + theta_str + ", vaisman: " +
              yesno(cert.vaisman == VaismanVerdict::vaisman);
    code = kExitOk;
  } else {
    verdict = "lcK: no";
  }

  ordered_json rep;
  rep["schema"] = kSchema;
  rep["command"] = "verify";
  rep["input"] = path;
  rep["digest"] = digest;
  rep["backend"] = backend_name<S>();
  rep["dim"] = g.dim();
  rep["unimodular"] = g.is_unimodular();
  rep["J"] = {{"almost_complex", jc.almost_complex},
              {"integrable", jc.integrable},
              {"abelian", jc.abelian},
              {"bi_invariant", jc.bi_invariant}};
  rep["omega"] = format_form(cert.omega, g.dual_labels());
  rep["residual"] = cert.residual();
  if constexpr (scalar_traits<S>::exact)
    rep["residual_sq_exact"] = scalar_str(cert.residual_sq);
  rep["theta"] = theta_str;
  rep["theta_closed"] = cert.theta_closed;
  rep["theta_routes_agree"] = cert.theta_routes_agree;
  rep["is_lck"] = cert.is_lck;
  rep["is_kahler"] = cert.is_kahler;
  rep["vaisman"] = to_string(cert.vaisman);
  rep["vaisman_routes_agree"] = cert.vaisman_routes_agree;
  rep["verdict"] = verdict;
  rep["exit"] = code;

  std::ostringstream hum;
  hum << "algebra: dim " << g.dim() << ", unimodular: " << yesno(g.is_unimodular())
      << "\n";
  hum << "J: integrable: " << yesno(jc.integrable)
      << ", abelian: " << yesno(jc.abelian)
      << ", bi-invariant: " << yesno(jc.bi_invariant) << "\n";
  hum << "omega = " << format_form(cert.omega, g.dual_labels()) << "\n";
  hum << "residual = " << (cert.is_lck ? std::string("0") : std::to_string(cert.residual()))
      << "\n";
  hum << "theta = " << theta_str << " (closed: " << yesno(cert.theta_closed)
      << ")\n";
  hum << verdict << "\n";
  emit_report(opts, rep, hum.str());
  return code;
}

// ----------------------------------------------------------------------- audit

template <class S>
int run_audit(const lck::AlgebraFile<S>& file, const std::string& path,
              const std::string& digest, const CommonOpts& opts) {
  using namespace lck;
  if (!file.J || !file.metric)
    throw ValidationError(path + ": audit needs both a J and a metric");
  const LieAlgebra<S>& g = file.algebra;
  HermitianStructure<S> h(g, InnerProduct<S>(*file.metric), *file.J,
                          file.orientation);
  LckCertificate<S> cert = check_lck(h);
  if (!cert.is_lck)
    throw PreconditionError(path + ": audit requires a zero-residual structure");

  JClass jc = classify_J(g, *file.J);
  ordered_json rep;
  rep["schema"] = kSchema;
  rep["command"] = "audit";
  rep["input"] = path;
  rep["digest"] = digest;
  rep["backend"] = backend_name<S>();
  std::ostringstream hum;
  int code = kExitOk;

  if (jc.abelian) {
    rep["mode"] = "abelian";
    AuditReport ar = audit_abelian_lck(h, cert);
    ordered_json checks = ordered_json::array();
    hum << "audit (abelian complex structure):\n";
    for (const auto& c : ar.checks) {
      checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"worst", c.worst},
                        {"witness", c.witness}});
      hum << "  " << (c.passed ? "pass" : "FAIL") << "  " << c.name;
      if (!c.passed) hum << "  (worst " << c.worst << ", " << c.witness << ")";
      hum << "\n";
    }
    rep["checks"] = checks;
    rep["all_passed"] = ar.all_passed();
    if (!ar.all_passed()) code = kExitNegative;

    if (auto heis = recognize_heisenberg(g)) {
      ordered_json recog;
      recog["type"] = "heisenberg";
      recog["n"] = heis->n;
      hum << "isomorphic to R x h_" << (2 * heis->n + 1) << ", n = " << heis->n;
      try {
        auto nf = normal_form_abelian(h, cert);
        recog["lambda"] = to_double(nf.lambda);
        if constexpr (scalar_traits<S>::exact)
          recog["lambda_exact"] = scalar_str(nf.lambda);
        hum << ", lambda = " << scalar_str(nf.lambda);
      } catch (const PreconditionError& e) {
        recog["lambda_error"] = e.what();
      }
      hum << "\n";
      rep["recognized"] = recog;
    } else {
      rep["recognized"] = nullptr;
    }
  } else if (jc.bi_invariant) {
    rep["mode"] = "bi_invariant";
    hum << "audit (bi-invariant complex structure):\n";
    auto rec = recognize_bi_invariant_model(h, cert);
    if (rec) {
      rep["recognized"] = {{"type", "bi_model"}, {"n", rec->n}};
      hum << "recognized bi-invariant model R^2 x R^" << (2 * rec->n)
          << ", n = " << rec->n << "\n";
      auto traces = g.ad_traces();
      Vec<S> a = *cert.A;
      S tr(0);
      for (int i = 0; i < g.dim(); ++i) tr += a[i] * traces[i];
      rep["trace_ad_A"] = to_double(tr);
      hum << "not unimodular: tr ad_A = " << scalar_str(tr) << "\n";
    } else {
      rep["recognized"] = nullptr;
      hum << "bi-invariant J but the structure does not match the model\n";
      code = kExitNegative;
    }
  } else {
    throw PreconditionError(path + ": J is not abelian and not bi-invariant");
  }
  rep["exit"] = code;
  emit_report(opts, rep, hum.str());
  return code;
}

// ---------------------------------------------------------------------- search

struct SearchOpts {
  CommonOpts common;
  lck::SearchConfig cfg;
  std::string emit_path;
};

template <class S>
int run_search(const lck::AlgebraFile<S>& file, const std::string& path,
               const std::string& digest, const SearchOpts& opts) {
  using namespace lck;
  if (!file.J) throw ValidationError(path + ": search needs a J");
  LieAlgebra<double> g = to_float_algebra(file.algebra);
  Mat<double> j = to_float_matrix(*file.J);
  SearchResult res = search_lck_metric(g, j, opts.cfg);

  ordered_json rep;
  rep["schema"] = kSchema;
  rep["command"] = "search";
  rep["input"] = path;
  rep["digest"] = digest;
  rep["config"] = {{"restarts", opts.cfg.restarts},
                   {"seed", opts.cfg.seed},
                   {"max_iters", opts.cfg.max_iters},
                   {"tol_residual", opts.cfg.tol_residual},
                   {"threads", opts.cfg.threads}};
  ordered_json trace = ordered_json::array();
  for (const auto& t : res.trace)
    trace.push_back({{"restart", t.restart},
                     {"iterations", t.iterations},
                     {"residual", t.residual}});
  rep["trace"] = trace;
  rep["best_restart"] = res.best_restart;
  rep["best_residual"] = res.best_residual;
  rep["certified"] = res.certificate.has_value();

  std::ostringstream hum;
  hum << "search over J-compatible metrics (" << opts.cfg.restarts
      << " restarts, seed " << opts.cfg.seed << ")\n";
  for (const auto& t : res.trace)
    hum << "  restart " << t.restart << ": residual " << t.residual << " after "
        << t.iterations << " iterations\n";
  hum << "best residual = " << res.best_residual << " (restart "
      << res.best_restart << ")\n";

  int code;
  if (res.certificate) {
    hum << "certified l.c.K. metric found (re-verified residual "
        << res.certificate->residual() << ", vaisman: "
        << to_string(res.certificate->vaisman) << ")\n";
    code = kExitOk;
    if (!opts.emit_path.empty()) {
      AlgebraFile<double> out{g, j, res.best_metric.matrix(), file.orientation};
      out.algebra.set_labels(file.algebra.labels());
      out.algebra.set_dual_labels(file.algebra.dual_labels());
      save_algebra(opts.emit_path, out);
      rep["written"] = opts.emit_path;
      hum << "metric written to " << opts.emit_path << "\n";
    }
  } else {
    hum << "no certified metric (" << kSweepDisclaimer << ")\n";
    rep["disclaimer"] = kSweepDisclaimer;
    code = kExitNegative;
  }
  rep["exit"] = code;
  emit_report(opts.common, rep, hum.str());
  return code;
}

// --------------------------------------------------------------------- catalog

struct CatalogOpts {
  CommonOpts common;
  std::string name;
  std::vector<std::string> params;
  std::string emit_path;
};

int run_catalog(CatalogOpts opts) {
  using namespace lck;
  if (opts.name == "emit") {  // "catalog emit <name> <params...>" writes a file
    if (opts.params.empty())
      throw ValidationError("catalog emit needs an entry name");
    opts.name = opts.params.front();
    opts.params.erase(opts.params.begin());
    if (opts.emit_path.empty()) opts.emit_path = opts.name + ".alg";
  }
  if (opts.name.empty()) {
    ordered_json rep;
    rep["schema"] = kSchema;
    rep["command"] = "catalog";
    rep["entries"] = {"heisenberg <n> <lambda>", "acfm", "bi_model <n>",
                      "aff <m>", "complex_heisenberg"};
    rep["exit"] = kExitOk;
    std::ostringstream hum;
    hum << "catalog entries:\n"
        << "  heisenberg <n> <lambda>   R x h_{2n+1}, metric parameter lambda\n"
        << "  acfm                      4-dim solvable non-Vaisman example\n"
        << "  bi_model <n>              bi-invariant model R^2 x R^2n\n"
        << "  aff <m>                   aff(A) for nilpotent truncated polynomials\n"
        << "  complex_heisenberg        dim-6 unimodular bi-invariant-J target\n";
    emit_report(opts.common, rep, hum.str());
    return kExitOk;
  }

  auto need_params = [&](std::size_t n) {
    if (opts.params.size() != n)
      throw ValidationError("catalog entry '" + opts.name + "' needs " +
                            std::to_string(n) + " parameter(s)");
  };
  auto param_int = [&](std::size_t i) {
    try {
      return std::stoi(opts.params.at(i));
    } catch (...) {
      throw ValidationError("bad integer parameter '" + opts.params.at(i) + "'");
    }
  };

  AlgebraFile<Rat> file{LieAlgebra<Rat>(1), std::nullopt, std::nullopt, 1};
  if (opts.name == "heisenberg") {
    need_params(2);
    Rat lambda = parse_rational(opts.params[1]);
    file = to_file(heisenberg_family<Rat>(param_int(0), lambda));
  } else if (opts.name == "acfm") {
    need_params(0);
    file = to_file(acfm_solvable<Rat>());
  } else if (opts.name == "bi_model") {
    need_params(1);
    file = to_file(bi_model<Rat>(param_int(0)));
  } else if (opts.name == "aff") {
    need_params(1);
    AffData<Rat> aff = aff_nilpotent<Rat>(param_int(0));
    file = AlgebraFile<Rat>{aff.lie, aff.J, std::nullopt, 1};
  } else if (opts.name == "complex_heisenberg") {
    need_params(0);
    PairedStructure<Rat> cx = complex_heisenberg<Rat>();
    file = AlgebraFile<Rat>{cx.algebra, cx.J, std::nullopt, 1};
  } else {
    throw ValidationError("unknown catalog entry '" + opts.name + "'");
  }

  std::string text = save_algebra_text(file);
  ordered_json rep;
  rep["schema"] = kSchema;
  rep["command"] = "catalog";
  rep["name"] = opts.name;
  rep["params"] = opts.params;
  rep["dim"] = file.algebra.dim();
  std::ostringstream hum;
  if (!opts.emit_path.empty()) {
    save_algebra(opts.emit_path, file);
    rep["written"] = opts.emit_path;
    hum << "written to " << opts.emit_path << "\n";
  } else {
    hum << text;
    rep["document"] = text;
  }
  rep["exit"] = kExitOk;
  emit_report(opts.common, rep, hum.str());
  return kExitOk;
}

// ------------------------------------------------------------------- curvature

template <class S>
int run_curvature(const lck::AlgebraFile<S>& file, const std::string& path,
                  const std::string& digest, const CommonOpts& opts,
                  bool tensor) {
  using namespace lck;
  if (!file.metric)
    throw ValidationError(path + ": curvature needs a metric");
  const LieAlgebra<S>& g = file.algebra;
  InnerProduct<S> ip(*file.metric);
  double scal = scalar_curvature(g, ip);

  ordered_json rep;
  rep["schema"] = kSchema;
  rep["command"] = "curvature";
  rep["input"] = path;
  rep["digest"] = digest;
  rep["backend"] = backend_name<S>();
  rep["scalar_curvature"] = scal;
  std::ostringstream hum;
  hum << "scalar curvature = " << scal << "\n";

  if (tensor) {
    Connection<S> conn = levi_civita(g, ip);
    CurvatureTensor<S> r(g, conn);
    ordered_json entries = ordered_json::array();
    int n = g.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            S v = r.coeff(i, j, k, l);
            if (is_zero(v, scalar_traits<S>::exact ? 0.0 : tol::form_eq))
              continue;
            entries.push_back({{"i", i + 1},
                               {"j", j + 1},
                               {"k", k + 1},
                               {"l", l + 1},
                               {"value", to_double(v)}});
            hum << "  R(" << g.labels()[i] << "," << g.labels()[j] << ")"
                << g.labels()[k] << " -> " << g.labels()[l] << " : "
                << scalar_str(v) << "\n";
          }
    rep["tensor"] = entries;
  }
  rep["exit"] = kExitOk;
  emit_report(opts, rep, hum.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification and search toolkit for left-invariant l.c.K. "
               "structures on Lie algebras"};
  app.require_subcommand(1);

  CommonOpts common;
  std::string path;
  bool curvature_tensor = false;
  SearchOpts search_opts;
  CatalogOpts catalog_opts;

  auto add_common = [&](CLI::App* cmd, bool needs_path = true) {
    cmd->add_flag("--json", common.json, "machine-readable report");
    cmd->add_flag("--exact", common.exact,
                  "require the rational backend (reject decimal inputs)");
    if (needs_path)
      cmd->add_option("path", path, "AlgebraFile input")->required();
  };

  CLI::App* verify = app.add_subcommand("verify", "check the l.c.K. equation");
  add_common(verify);
  CLI::App* audit = app.add_subcommand(
      "audit", "structural audit, recognizers and normal form");
  add_common(audit);
  CLI::App* search =
      app.add_subcommand("search", "seeded multi-start metric search");
  add_common(search);
  search->add_option("--restarts", search_opts.cfg.restarts, "random restarts");
  search->add_option("--seed", search_opts.cfg.seed, "RNG seed");
  search->add_option("--tol", search_opts.cfg.tol_residual,
                     "certification tolerance");
  search->add_option("--max-iters", search_opts.cfg.max_iters,
                     "iteration budget per restart");
  search->add_option("--threads", search_opts.cfg.threads,
                     "parallel restarts (result is thread-count independent)");
  search->add_option("--emit", search_opts.emit_path,
                     "write the certified metric to this path");
  CLI::App* catalog =
      app.add_subcommand("catalog", "list or emit built-in structures");
  catalog->add_flag("--json", common.json, "machine-readable report");
  catalog->add_option("name", catalog_opts.name, "catalog entry");
  catalog->add_option("params", catalog_opts.params, "entry parameters");
  catalog->add_option("--emit", catalog_opts.emit_path, "write to this path");
  CLI::App* curvature =
      app.add_subcommand("curvature", "Levi-Civita scalar curvature");
  add_common(curvature);
  curvature->add_flag("--tensor", curvature_tensor,
                      "print the full curvature tensor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (catalog->parsed()) {
      catalog_opts.common = common;
      return run_catalog(catalog_opts);
    }
    LoadedInput in = load_input(path, common);
    if (verify->parsed())
      return std::visit(
          [&](const auto& f) { return run_verify(f, path, in.digest, common); },
          in.data);
    if (audit->parsed())
      return std::visit(
          [&](const auto& f) { return run_audit(f, path, in.digest, common); },
          in.data);
    if (search->parsed()) {
      search_opts.common = common;
      return std::visit(
          [&](const auto& f) {
            return run_search(f, path, in.digest, search_opts);
          },
          in.data);
    }
    if (curvature->parsed())
      return std::visit(
          [&](const auto& f) {
            return run_curvature(f, path, in.digest, common, curvature_tensor);
          },
          in.data);
  } catch (const lck::PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const lck::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
