#include "bergman/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bergman/errors.hpp"
#include "bergman/essential_spectrum.hpp"
#include "bergman/selftest.hpp"
#include "bergman/serialize.hpp"
#include "bergman/spectra.hpp"
#include "bergman/toeplitz.hpp"

namespace bergman::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_range(const char* name, std::size_t v, std::size_t lo, std::size_t hi) {
  if (v < lo || v > hi) throw std::invalid_argument(fmt::format("--{} = {} outside [{}, {}]", name, v, lo, hi));
}

cplx parse_point(const std::string& text) {
  const auto comma = text.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return {re, 0.0};
    }
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double re = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument("trailing characters");
    const double im = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument("trailing characters");
    return {re, im};
  } catch (const std::exception&) {
    throw UsageError(fmt::format("cannot read point '{}' (expected re or re,im)", text));
  }
}

struct Artifact {
  std::string body;
  std::string meta;  // JSON object text for the "result" field of the sidecar
  std::vector<std::string> warnings;
};

void write_config(JsonWriter& w, const RunConfig& c) {
  w.begin_object();
  w.key("n").value(static_cast<std::uint64_t>(c.n));
  w.key("n2").value(static_cast<std::uint64_t>(c.n2));
  w.key("q_r").value(static_cast<std::uint64_t>(c.q_r));
  w.key("q_theta").value(static_cast<std::uint64_t>(c.q_theta));
  w.key("grid");
  write_grid(w, c.grid);
  w.key("grid_given").value(c.grid_given);
  w.key("eps").value(c.eps);
  w.key("m_theta").value(static_cast<std::uint64_t>(c.m_theta));
  w.key("m_boundary").value(static_cast<std::uint64_t>(c.m_boundary));
  w.key("adaptive").value(c.adaptive);
  w.key("two_d").value(c.two_d);
  w.key("force_quadrature").value(c.force_quadrature);
  w.key("estimate").value(c.estimate);
  w.key("winding").value(c.winding);
  w.key("probes").begin_array();
  for (const auto& p : c.probes) w.value(p);
  w.end_array();
  w.key("seed").value(static_cast<std::uint64_t>(c.seed));
  w.key("threads").value(static_cast<std::uint64_t>(c.threads));
  w.end_object();
}

std::filesystem::path sidecar_path(const std::filesystem::path& artifact) {
  std::filesystem::path p = artifact;
  if (p.has_extension()) p.replace_extension();
  p += ".meta.json";
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

SpectrumParams spectrum_params(const RunConfig& c) {
  SpectrumParams p;
  p.n = c.n;
  p.eps = c.eps;
  p.grid = c.grid;
  p.m_boundary = c.m_boundary;
  p.q_r = c.q_r;
  p.q_theta = c.q_theta;
  return p;
}

// Resolves the quadrature defaults for the symbol and returns warnings.
std::vector<std::string> resolve_quadrature(RunConfig& c, const SymbolExpr& e, bool two_d_general) {
  std::vector<std::string> warnings;
  if (c.quadrature_given) return warnings;
  if (two_d_general) {
    c.q_r = 32;
    c.q_theta = 64;
    warnings.push_back("non-separable 2D symbol: product quadrature with Q_r = 32, Q_theta = 64 per factor");
  } else if (e.has_transcendental() && !(!e.is_two_variable() && expand_polynomial(e))) {
    c.q_r *= 2;
    c.q_theta *= 2;
    warnings.push_back(fmt::format("symbol contains re/im/abs/exp: quadrature doubled to Q_r = {}, Q_theta = {}",
                                   c.q_r, c.q_theta));
  }
  return warnings;
}

bool needs_2d(const RunConfig& c, const SymbolExpr& e) { return c.two_d || e.is_two_variable(); }

Eigen::MatrixXcd assemble(RunConfig& c, const SymbolExpr& e, std::vector<std::string>& warnings,
                          JsonWriter& meta) {
  const bool two_d = needs_2d(c, e);
  const bool general = two_d && (c.force_quadrature || !split_separable(e));
  auto w = resolve_quadrature(c, e, general);
  warnings.insert(warnings.end(), w.begin(), w.end());
  const auto rule = build_quadrature(c.q_r, c.q_theta);
  const auto path = c.force_quadrature ? AssemblyPath::ForceQuadrature : AssemblyPath::Auto;
  meta.key("assembly").begin_object();
  Eigen::MatrixXcd m;
  if (two_d) {
    auto t = build_toeplitz_2d(e, c.n2, rule, path);
    meta.key("kind").value("2d").key("n").value(static_cast<std::uint64_t>(c.n2));
    meta.key("mode").value(to_string(t.meta.mode));
    m = std::move(t.entries);
  } else {
    auto t = build_toeplitz_1d(e, c.n, rule, path);
    meta.key("kind").value("1d").key("n").value(static_cast<std::uint64_t>(c.n));
    meta.key("mode").value(to_string(t.meta.mode));
    m = std::move(t.entries);
  }
  meta.key("q_r").value(static_cast<std::uint64_t>(c.q_r));
  meta.key("q_theta").value(static_cast<std::uint64_t>(c.q_theta));
  meta.end_object();
  return m;
}

bool csv(const RunConfig& c) { return c.format == "csv"; }

Artifact cmd_matrix(RunConfig& c, const SymbolExpr& e) {
  Artifact a;
  JsonWriter meta;
  meta.begin_object();
  const Eigen::MatrixXcd m = assemble(c, e, a.warnings, meta);
  meta.end_object();
  const bool two_d = needs_2d(c, e);
  a.body = csv(c) ? matrix_to_csv(m) : matrix_to_json(m, two_d ? c.n2 : c.n, two_d ? "2d" : "1d");
  a.meta = meta.str();
  return a;
}

Artifact cmd_spectrum(RunConfig& c, const SymbolExpr& e) {
  Artifact a;
  JsonWriter meta;
  meta.begin_object();
  if (c.estimate) {
    if (e.is_two_variable() || c.two_d) throw UsageError("--estimate needs a one-variable symbol");
    auto w = resolve_quadrature(c, e, false);
    a.warnings.insert(a.warnings.end(), w.begin(), w.end());
    const auto est = spectrum_1d_estimate_detailed(e, spectrum_params(c));
    meta.key("estimate").begin_object();
    meta.key("pseudo_nodes").value(static_cast<std::uint64_t>(est.pseudo_nodes));
    meta.key("winding_nodes").value(static_cast<std::uint64_t>(est.winding_nodes));
    meta.key("refused_nodes").value(static_cast<std::uint64_t>(est.refused_nodes));
    meta.key("boundary_points").value(static_cast<std::uint64_t>(est.boundary_points));
    meta.end_object();
    a.body = csv(c) ? region_to_csv(est.region) : region_to_json(est.region);
  } else {
    const Eigen::MatrixXcd m = assemble(c, e, a.warnings, meta);
    const auto s = eigenvalues(m, e.to_string());
    a.body = csv(c) ? spectrum_to_csv(s) : spectrum_to_json(s);
  }
  meta.end_object();
  a.meta = meta.str();
  return a;
}

Artifact cmd_pseudo(RunConfig& c, const SymbolExpr& e) {
  Artifact a;
  JsonWriter meta;
  meta.begin_object();
  const Eigen::MatrixXcd m = assemble(c, e, a.warnings, meta);
  meta.end_object();
  const auto g = pseudospectrum(m, c.grid, c.eps, c.threads);
  a.body = csv(c) ? pseudospectrum_to_csv(g) : pseudospectrum_to_json(g);
  a.meta = meta.str();
  return a;
}

Artifact cmd_ess1d(RunConfig& c, const SymbolExpr& e) {
  if (e.is_two_variable()) throw UsageError("ess1d needs a one-variable symbol");
  const std::size_t m = c.m_theta_given ? c.m_theta : 256;
  const auto r = essential_spectrum_1d(e, m);
  Artifact a;
  a.body = csv(c) ? region_to_csv(r) : region_to_json(r);
  JsonWriter meta;
  meta.begin_object().key("m_theta").value(static_cast<std::uint64_t>(m)).end_object();
  a.meta = meta.str();
  return a;
}

EssentialParams essential_params(const RunConfig& c) {
  EssentialParams p;
  p.slice = spectrum_params(c);
  p.m_theta = c.m_theta;
  p.adaptive = c.adaptive;
  p.auto_grid = !c.grid_given;
  p.threads = c.threads;
  return p;
}

Artifact cmd_ess2d(RunConfig& c, const SymbolExpr& e) {
  Artifact a;
  // Slices are one-variable; only transcendental symbols change the rule.
  a.warnings = resolve_quadrature(c, e, false);
  const auto r = essential_spectrum_2d(e, essential_params(c));
  a.body = csv(c) ? region_to_csv(r.union_region) : essential_to_json(r);
  JsonWriter meta;
  meta.begin_object().key("essential");
  write_essential_params(meta, r.params);
  meta.end_object();
  a.meta = meta.str();
  return a;
}

Artifact cmd_verify(RunConfig& c, const SymbolExpr& e) {
  if (c.probes.empty()) throw UsageError("verify needs at least one --probe");
  Artifact a;
  if (c.winding) {
    if (e.is_two_variable()) throw UsageError("--winding needs a one-variable symbol");
    const std::size_t m = c.m_theta_given ? c.m_theta : c.m_boundary;
    JsonWriter w;
    w.begin_object().key("m_theta").value(static_cast<std::uint64_t>(m)).key("probes").begin_array();
    for (const auto& p : c.probes) {
      const int k = winding_number(e, p, m);
      w.begin_object().key("lambda").value(p).key("winding").value(k).end_object();
    }
    w.end_array().end_object();
    a.body = w.str();
    a.meta = "{}\n";
    return a;
  }
  a.warnings = resolve_quadrature(c, e, false);
  const auto result = essential_spectrum_2d(e, essential_params(c));
  const bool general = !split_separable(e);
  const auto rule = general ? build_quadrature(c.quadrature_given ? c.q_r : 32, c.quadrature_given ? c.q_theta : 64)
                            : build_quadrature(c.q_r, c.q_theta);
  const auto report = verify_against_2d_sections(e, result, c.n2, c.probes, rule);
  a.body = verify_to_json(report);
  JsonWriter meta;
  meta.begin_object().key("essential");
  write_essential_params(meta, result.params);
  meta.end_object();
  a.meta = meta.str();
  return a;
}

}  // namespace

void RunConfig::validate() const {
  check_range("n", n, 1, kMaxSection1D);
  check_range("n2", n2, 2, kMaxSection2D);
  check_range("q-r", q_r, 1, 1024);
  check_range("q-theta", q_theta, 1, 8192);
  check_range("n-re", grid.n_re, 2, 2001);
  check_range("n-im", grid.n_im, 2, 2001);
  check_range("m-theta", m_theta, 4, 65536);
  check_range("m-boundary", m_boundary, 8, 65536);
  check_range("threads", threads, 0, 256);
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("--eps must be positive and finite");
  if (format != "json" && format != "csv") throw std::invalid_argument("--format must be json or csv");
  grid.validate();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Toeplitz operators on Bergman spaces of the disc and bi-disc: sections, spectra, "
               "pseudospectra and essential spectra"};
  app.name("bergspec");
  app.require_subcommand(1);

  std::vector<std::string> probe_text;
  auto* symbol = app.add_option("--symbol,-s", c.symbol, "symbol expression, e.g. \"z*conj(z) + w\"");
  app.add_option("--n", c.n, "1D section size")->capture_default_str();
  app.add_option("--n2", c.n2, "2D section size per factor")->capture_default_str();
  auto* qr = app.add_option("--q-r", c.q_r, "radial Gauss-Legendre nodes")->capture_default_str();
  auto* qt = app.add_option("--q-theta", c.q_theta, "angular nodes")->capture_default_str();
  auto* g1 = app.add_option("--re-min", c.grid.re_min)->capture_default_str();
  auto* g2 = app.add_option("--re-max", c.grid.re_max)->capture_default_str();
  auto* g3 = app.add_option("--im-min", c.grid.im_min)->capture_default_str();
  auto* g4 = app.add_option("--im-max", c.grid.im_max)->capture_default_str();
  app.add_option("--n-re", c.grid.n_re, "grid nodes along Re")->capture_default_str();
  app.add_option("--n-im", c.grid.n_im, "grid nodes along Im")->capture_default_str();
  app.add_option("--eps", c.eps, "pseudospectrum level")->capture_default_str();
  auto* mt = app.add_option("--m-theta", c.m_theta, "theta samples (ess2d per family, ess1d curve)")
                 ->capture_default_str();
  app.add_option("--m-boundary", c.m_boundary, "boundary-curve samples per slice")->capture_default_str();
  auto* no_adapt = app.add_flag("--no-adapt", "disable the M -> 2M refinement round");
  app.add_flag("--2d", c.two_d, "treat a one-variable symbol as f(z, w) = g(z)");
  app.add_flag("--force-quadrature", c.force_quadrature, "skip the exact and Kronecker assembly paths");
  app.add_flag("--estimate", c.estimate, "spectrum: emit the pseudospectral region estimate");
  app.add_flag("--winding", c.winding, "verify: winding numbers of a one-variable symbol at the probes");
  app.add_option("--probe", probe_text, "probe point re[,im] (repeatable)");
  app.add_option("--out,-o", c.out, "artifact path; a <stem>.meta.json sidecar is written next to it");
  app.add_option("--format", c.format, "json or csv")->capture_default_str();
  app.add_option("--seed", c.seed, "seed for randomized self-tests")->capture_default_str();
  app.add_option("--threads", c.threads, "worker cap, 0 = auto")->capture_default_str();

  const char* names[][2] = {{"matrix", "assemble the section matrix"},
                            {"spectrum", "eigenvalues of the section (or --estimate)"},
                            {"pseudo", "sigma_min grid of the section"},
                            {"ess1d", "boundary-curve essential spectrum of a one-variable symbol"},
                            {"ess2d", "essential spectrum on the bi-disc as a union of slice spectra"},
                            {"verify", "2D section probes or winding diagnostics"},
                            {"selftest", "run the built-in oracle suite"}};
  for (const auto& [name, desc] : names) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  c.quadrature_given = qr->count() > 0 || qt->count() > 0;
  c.grid_given = g1->count() + g2->count() + g3->count() + g4->count() > 0;
  c.m_theta_given = mt->count() > 0;
  c.adaptive = no_adapt->count() == 0;

  try {
    for (const auto& p : probe_text) c.probes.push_back(parse_point(p));
    c.validate();

    if (c.subcommand == "selftest") {
      bool ok = true;
      for (const auto& r : run_selftest(c.seed)) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) out << ": " << r.detail;
        out << '\n';
        ok = ok && r.passed;
      }
      return ok ? kOk : kNumerical;
    }

    if (symbol->count() == 0) throw UsageError("--symbol is required");
    const SymbolExpr e = parse(c.symbol);

    Artifact a;
    if (c.subcommand == "matrix") a = cmd_matrix(c, e);
    else if (c.subcommand == "spectrum") a = cmd_spectrum(c, e);
    else if (c.subcommand == "pseudo") a = cmd_pseudo(c, e);
    else if (c.subcommand == "ess1d") a = cmd_ess1d(c, e);
    else if (c.subcommand == "ess2d") a = cmd_ess2d(c, e);
    else a = cmd_verify(c, e);

    for (const auto& w : a.warnings) err << "warning: " << w << '\n';

    std::filesystem::path target;
    if (!c.out.empty()) {
      target = c.out;
    } else if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) {
      target = std::filesystem::path(dir) / (c.subcommand + "." + c.format);
    }
    if (target.empty()) {
      out << a.body;
      return kOk;
    }
    JsonWriter meta;
    meta.begin_object();
    meta.key("tool").value("bergspec");
    meta.key("subcommand").value(c.subcommand);
    meta.key("symbol").value(c.symbol);
    meta.key("parsed").value(e.to_string());
    meta.key("format").value(c.format);
    meta.key("config");
    write_config(meta, c);
    meta.key("warnings").begin_array();
    for (const auto& w : a.warnings) meta.value(w);
    meta.end_array();
    meta.key("result").raw(a.meta.empty() ? "{}" : std::string_view(a.meta).substr(0, a.meta.find_last_not_of('\n') + 1));
    meta.end_object();
    write_file(target, a.body);
    write_file(sidecar_path(target), meta.str());
    return kOk;
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const RefusedDiagnostic& ex) {
    err << "refused: " << ex.what() << '\n';
    return kRefused;
  } catch (const NumericalError& ex) {
    err << "numerical failure: " << ex.what() << '\n';
    return kNumerical;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }
}

}  // namespace bergman::cli
