#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "schottky.hpp"

namespace schottky::cli {

using nlohmann::json;

enum ExitCode { kOk = 0, kParseError = 1, kPrecondition = 2, kInternal = 3 };

struct Options {
  std::string backend = "exact";
  double eps = 1e-9;
  std::string output;
  std::map<std::string, std::string> args;  // flag name -> value, echoed in the report
};

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Parse, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, "'" + path + "' is not valid JSON: " + e.what());
  }
}

/// "F:g", "Z:g", "Surface:g" or "Lattice:<file>" (file holds a torus or a
/// group object).
inline GroupSpec parse_group_shorthand(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorCode::Parse, "group shorthand '" + text + "' needs KIND:ARG");
  std::string kind = text.substr(0, colon);
  std::string arg = text.substr(colon + 1);
  if (kind == "Lattice") {
    json j = load_json_file(arg);
    if (j.contains("kind")) return io::group_from_json(j);
    json g{{"kind", "Lattice"}, {"g", j.value("g", j.at("Z").size())}, {"period", j.at("Z")}};
    if (j.contains("backend")) g["backend"] = j.at("backend");
    return io::group_from_json(g);
  }
  std::size_t g = 0;
  try {
    std::size_t used = 0;
    long v = std::stol(arg, &used);
    if (used != arg.size() || v < 1) throw std::invalid_argument("g");
    g = static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    fail(ErrorCode::Parse, "group shorthand '" + text + "' needs a positive integer");
  }
  if (kind == "F") return GroupSpec::free(g);
  if (kind == "Z") return GroupSpec::free_abelian(g);
  if (kind == "Surface") return GroupSpec::surface(g);
  fail(ErrorCode::Parse, "unknown group kind in '" + text + "'");
}

class Runner {
 public:
  Runner(Options opts, std::ostream& out) : opts_(std::move(opts)), out_(out), tol_(opts_.eps) {}

  template <typename F>
  void with_backend(F&& f) {
    if (opts_.backend == "exact")
      f.template operator()<GaussianRational>();
    else if (opts_.backend == "approx")
      f.template operator()<ApproxComplex>();
    else
      fail(ErrorCode::Parse, "backend must be exact or approx");
  }

  std::optional<GroupSpec> group_flag() const {
    auto it = opts_.args.find("group");
    if (it == opts_.args.end() || it->second.empty()) return std::nullopt;
    return parse_group_shorthand(it->second);
  }

  const std::string& arg(const std::string& name) const {
    auto it = opts_.args.find(name);
    if (it == opts_.args.end() || it->second.empty()) fail(ErrorCode::Parse, "missing --" + name);
    return it->second;
  }
  bool has(const std::string& name) const {
    auto it = opts_.args.find(name);
    return it != opts_.args.end() && !it->second.empty();
  }

  json input(const std::string& name) {
    json j = load_json_file(arg(name));
    echo_[name] = j;
    return j;
  }

  template <Scalar S>
  Representation<S> rep(const std::string& name) {
    return io::rep_from_json<S>(input(name), group_flag());
  }

  template <Scalar S>
  Representation<S> valid_rep(const std::string& name) {
    auto r = rep<S>(name);
    validate(r, tol_);
    return r;
  }

  void emit(const std::string& command, json result) {
    json report{{"command", command}, {"backend", opts_.backend}, {"eps", opts_.eps}};
    json args = json::object();
    for (const auto& [k, v] : opts_.args)
      if (!v.empty()) args[k] = v;
    report["args"] = std::move(args);
    report["inputs"] = echo_;
    report["result"] = std::move(result);
    write(report);
  }

  void write(const json& report) {
    std::string text = report.dump(2) + "\n";
    if (opts_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(opts_.output);
    if (!f) fail(ErrorCode::Parse, "cannot write '" + opts_.output + "'");
    f << text;
  }

  const Tolerance& tol() const { return tol_; }
  Options& options() { return opts_; }

 private:
  Options opts_;
  std::ostream& out_;
  Tolerance tol_;
  json echo_ = json::object();
};

template <Scalar S>
json matrices_json(const std::vector<Matrix<S>>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(io::to_json(m));
  return out;
}

template <Scalar S>
json vectors_json(const std::vector<Vector<S>>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(io::to_json(v));
  return out;
}

template <Scalar S>
json gauge_report_json(const GaugeReport<S>& r) {
  json out{{"ok", r.ok}, {"max_residual", r.max_residual}};
  if (!r.ok) {
    out["failed_check"] = r.failed_check;
    if (r.index) out["index"] = *r.index;
    if (r.residual) out["residual"] = io::to_json(*r.residual);
  }
  return out;
}

template <Scalar S>
json h1_json(const H1Result<S>& h) {
  return json{{"dim", h.dim}, {"cocycles", vectors_json(h.cocycles)}, {"coboundaries", vectors_json(h.coboundaries)}};
}

/// Lattice reps use the torus flag when given, else their own period.
template <Scalar S>
TorusData<S> torus_for(Runner& run, const GroupSpec& group) {
  if (run.has("torus")) return io::torus_from_json<S>(run.input("torus"), run.tol());
  if (group.kind() == GroupKind::Lattice && group.has_period()) return make_torus(group.period_as<S>(), run.tol());
  fail(ErrorCode::Parse, "a --torus file (or a lattice with a period) is required");
}

inline Morphism alpha_for(Runner& run, const GroupSpec& group) {
  if (group.kind() == GroupKind::Lattice) {
    if (run.has("torus")) {
      json t = run.input("torus");
      json g{{"kind", "Lattice"}, {"g", t.at("Z").size()}, {"period", t.at("Z")}};
      if (io::torus_backend(t) == "approx") g["backend"] = "approx";
      return alpha_torus(io::group_from_json(g));
    }
    return alpha_torus(group);
  }
  return canonical_alpha(group);
}

// ---------------------------------------------------------------------------

inline void cmd_validate(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    run.emit("validate", {{"valid", true}, {"group", io::to_json(r.group)}, {"rank", r.rank}});
  });
}

inline void cmd_evaluate(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    Word w = parse_word(r.group, run.arg("word"));
    run.emit("evaluate", {{"word", format_word(r.group, w)}, {"value", io::to_json(evaluate(r, w, run.tol()))}});
  });
}

inline void cmd_kolchin(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    auto res = unipotence_flag(r, run.tol());
    if (const auto* cert = std::get_if<UnipotenceCertificate<S>>(&res)) {
      run.emit("kolchin", {{"unipotent", true},
                           {"certificate", {{"P", io::to_json(cert->triangularizer)}, {"flag", cert->flag_dims}}},
                           {"verified", verify_certificate(r, *cert, run.tol())}});
    } else {
      const auto& w = std::get<NotUnipotentWitness<S>>(res);
      run.emit("kolchin", {{"unipotent", false},
                           {"witness", {{"stage", w.stage}, {"quotient_images", matrices_json(w.quotient_images)}}}});
    }
  });
}

inline void cmd_peel(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    auto p = peel(r, run.tol());
    run.emit("peel", {{"sub", io::to_json(p.sub)},
                      {"quotient", io::to_json(p.quotient)},
                      {"inclusion", io::to_json(p.inclusion)},
                      {"projection", io::to_json(p.projection)}});
  });
}

inline void cmd_pullback(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto tau = run.valid_rep<S>("rep");
    Morphism alpha = [&] {
      if (tau.group.kind() == GroupKind::Free) return alpha_surface(tau.group.g());
      if (run.has("torus")) return alpha_for(run, GroupSpec::lattice_unbound(tau.group.g()));
      return alpha_torus(tau.group.g());
    }();
    auto pulled = pullback(tau, alpha, run.tol());
    validate(pulled, run.tol());
    run.emit("pullback", {{"source", io::to_json(alpha.source)}, {"rep", io::to_json(pulled)}});
  });
}

inline void cmd_intertwiners(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto a = run.valid_rep<S>("rep1");
    auto b = run.valid_rep<S>("rep2");
    auto basis = intertwiners(a, b, run.tol());
    run.emit("intertwiners", {{"dim", basis.size()}, {"basis", matrices_json(basis)}});
  });
}

inline void cmd_iso(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto a = run.valid_rep<S>("rep1");
    auto b = run.valid_rep<S>("rep2");
    auto t = is_isomorphic(a, b, run.tol());
    run.emit("iso", {{"isomorphic", t.has_value()}, {"witness", t ? io::to_json(*t) : json(nullptr)}});
  });
}

inline void cmd_h0(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    auto basis = h0(r, run.tol());
    run.emit("h0", {{"dim", basis.size()}, {"basis", vectors_json(basis)}});
  });
}

inline void cmd_h1(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    run.emit("h1", h1_json(h1(r, run.tol())));
  });
}

inline void cmd_ext1(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto a = run.valid_rep<S>("rep-a");
    auto b = run.valid_rep<S>("rep-b");
    run.emit("ext1", h1_json(ext1(a, b, run.tol())));
  });
}

template <Scalar S>
json extension_json(const Extension<S>& e) {
  return json{{"E", io::to_json(e.total)},
              {"inclusion", io::to_json(e.inclusion)},
              {"projection", io::to_json(e.projection)},
              {"sub", io::to_json(e.sub)},
              {"quotient", io::to_json(e.quotient)}};
}

inline void cmd_ext_build(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto a = run.valid_rep<S>("rep-a");
    auto b = run.valid_rep<S>("rep-b");
    auto hom = hom_rep(a, b, run.tol());
    auto c = io::cocycle_from_json<S>(run.input("cocycle"), hom);
    auto e = build_extension(a, b, c, run.tol());
    run.emit("ext-build", extension_json(e));
  });
}

inline void cmd_ext_extract(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    json ext = run.input("ext");
    if (ext.contains("result")) ext = ext.at("result");
    auto e = io::rep_from_json<S>(ext.at("E"), run.group_flag());
    validate(e, run.tol());
    auto inc = io::matrix_from_json<S>(ext.at("inclusion"));
    auto proj = io::matrix_from_json<S>(ext.at("projection"));
    auto cls = extract_class(e, inc, proj, run.tol());
    json result{{"cocycle", io::to_json(cls.cocycle)}, {"representative", io::to_json(cls.representative)}};
    if (run.has("cocycle")) {
      auto c = io::cocycle_from_json<S>(run.input("cocycle"), cls.cocycle.coefficients);
      result["matches"] = class_eq(cls.cocycle, c, run.tol());
    }
    run.emit("ext-extract", result);
  });
}

inline void cmd_schottkyize(Runner& run) {
  json rep_json = run.input("rep");
  json torus_json = run.input("torus");
  if (rep_json.contains("components")) {
    auto torus = io::torus_from_json<GaussianRational>(torus_json, run.tol());
    auto approx_lattice = torus.cast<ApproxComplex>().lattice;
    std::vector<FlatComponent> comps;
    for (const auto& c : rep_json.at("components"))
      comps.push_back({io::rep_from_json<ApproxComplex>(c.at("character"), approx_lattice),
                       io::rep_from_json<GaussianRational>(c.at("unipotent"), torus.lattice)});
    auto res = schottkyize_flat_sum(torus, comps, run.tol());
    auto check = verify_gauge(torus.cast<ApproxComplex>(), res.source, res.sigma, res.gauge, Tolerance(run.tol().eps * 1e3));
    run.emit("schottkyize", {{"mode", "flat-sum"},
                             {"sigma", io::to_json(res.sigma)},
                             {"gauge", io::to_json(res.gauge)},
                             {"source", io::to_json(res.source)},
                             {"kernel_residuals", res.kernel_residuals},
                             {"verification", gauge_report_json(check)}});
    return;
  }
  bool approx = run.options().backend == "approx" || io::torus_backend(torus_json) == "approx";
  if (approx) {
    auto torus = io::torus_from_json<ApproxComplex>(torus_json, run.tol());
    auto chi = io::rep_from_json<ApproxComplex>(rep_json, torus.lattice);
    validate(chi, run.tol());
    auto res = schottkyize_character(torus, chi, run.tol());
    auto check = verify_gauge(torus, chi, res.sigma, res.gauge, Tolerance(run.tol().eps * 1e3));
    run.emit("schottkyize", {{"mode", "character"},
                             {"sigma", io::to_json(res.sigma)},
                             {"gauge", io::to_json(res.gauge)},
                             {"verification", gauge_report_json(check)}});
    return;
  }
  auto torus = io::torus_from_json<GaussianRational>(torus_json, run.tol());
  auto rho = io::rep_from_json<GaussianRational>(rep_json, torus.lattice);
  validate(rho);
  auto res = schottkyize_unipotent(torus, rho);
  auto check = verify_gauge(torus, rho, res.sigma, res.gauge);
  run.emit("schottkyize", {{"mode", "unipotent"},
                           {"sigma", io::to_json(res.sigma)},
                           {"gauge", io::to_json(res.gauge)},
                           {"verification", gauge_report_json(check)}});
}

inline void cmd_verify_gauge(Runner& run) {
  json torus_json = run.input("torus");
  json sch = run.input("schottky");
  if (sch.contains("result")) sch = sch.at("result");
  bool approx = run.options().backend == "approx" || io::torus_backend(torus_json) == "approx" ||
                sch.at("gauge").value("backend", std::string("exact")) == "approx";
  auto go = [&]<Scalar S>() {
    auto torus = io::torus_from_json<S>(torus_json, run.tol());
    auto rho = run.has("rep") ? io::rep_from_json<S>(run.input("rep"), torus.lattice)
                              : io::rep_from_json<S>(sch.at("source"), torus.lattice);
    auto sigma = io::rep_from_json<S>(sch.at("sigma"));
    auto gauge = io::gauge_from_json<S>(sch.at("gauge"));
    run.emit("verify-gauge", gauge_report_json(verify_gauge(torus, rho, sigma, gauge, run.tol())));
  };
  if (approx)
    go.template operator()<ApproxComplex>();
  else
    go.template operator()<GaussianRational>();
}

inline void cmd_predicate(Runner& run, const std::string& name) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    Morphism alpha = alpha_for(run, r.group);
    bool value = false;
    if (name == "is-schottky")
      value = is_schottky_module(r, alpha, run.tol());
    else if (name == "is-principal-schottky")
      value = is_principal_schottky(r, alpha, run.tol());
    else
      value = ad_schottky_check(r, alpha, run.tol());
    run.emit(name, {{"value", value}});
  });
}

inline void cmd_adjoint(Runner& run) {
  run.with_backend([&]<Scalar S>() {
    auto r = run.valid_rep<S>("rep");
    auto ad = adjoint_rep(r, run.tol());
    run.emit("adjoint", {{"rep", io::to_json(ad)}, {"unipotent", is_unipotent(ad, run.tol())}});
  });
}

inline void cmd_jordan(Runner& run) {
  json j = run.input("matrix");
  if (j.is_object()) j = j.at("matrix");
  auto m = io::matrix_from_json<GaussianRational>(j);
  auto jp = jordan_decompose(m);
  json f = json::array();
  for (const auto& c : jp.squarefree.coeffs()) f.push_back(to_string(c));
  run.emit("jordan", {{"s", io::to_json(jp.semisimple)}, {"u", io::to_json(jp.unipotent)}, {"squarefree", f}});
}

// ---------------------------------------------------------------------------

inline int error_exit(const Error& e) {
  if (e.code() == ErrorCode::Parse) return kParseError;
  if (e.code() == ErrorCode::Internal) return kInternal;
  return kPrecondition;
}

/// Parses argv, runs one subcommand, writes the JSON report to `out` (or
/// --output) and diagnostics to `err`. Returns the process exit code.
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schottky representations: exact unipotent calculus, cohomology and gauges"};
  app.name("schottky_cli");
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  app.add_option("--backend", opts.backend, "scalar backend")->check(CLI::IsMember({"exact", "approx"}));
  app.add_option("--eps", opts.eps, "tolerance for the approximate backend");
  app.add_option("-o,--output", opts.output, "write the report here instead of stdout");

  struct Sub {
    const char* name;
    const char* help;
    std::vector<const char*> flags;
    std::function<void(Runner&)> body;
  };
  const std::vector<Sub> subs = {
      {"validate", "check representation invariants", {"rep", "group"}, cmd_validate},
      {"evaluate", "image of a word", {"rep", "group", "word"}, cmd_evaluate},
      {"kolchin", "unipotence flag certificate", {"rep", "group"}, cmd_kolchin},
      {"peel", "split off a trivial line", {"rep", "group"}, cmd_peel},
      {"pullback", "pull a Sigma-representation back along alpha", {"rep", "group", "torus"}, cmd_pullback},
      {"intertwiners", "basis of Hom(rep1, rep2)", {"rep1", "rep2", "group"}, cmd_intertwiners},
      {"iso", "isomorphism test with witness", {"rep1", "rep2", "group"}, cmd_iso},
      {"h0", "invariants", {"rep", "group"}, cmd_h0},
      {"h1", "first cohomology", {"rep", "group"}, cmd_h1},
      {"ext1", "Ext^1(A, B)", {"rep-a", "rep-b", "group"}, cmd_ext1},
      {"ext-build", "extension from a cocycle", {"rep-a", "rep-b", "cocycle", "group"}, cmd_ext_build},
      {"ext-extract", "class of an extension", {"ext", "cocycle", "group"}, cmd_ext_extract},
      {"schottkyize", "Schottky representation and gauge", {"torus", "rep"}, cmd_schottkyize},
      {"verify-gauge", "check a gauge certificate", {"torus", "rep", "schottky"}, cmd_verify_gauge},
      {"is-schottky", "rho factors through alpha", {"rep", "group", "torus"}, [](Runner& r) { cmd_predicate(r, "is-schottky"); }},
      {"is-principal-schottky", "rho(ker alpha) is central", {"rep", "group", "torus"},
       [](Runner& r) { cmd_predicate(r, "is-principal-schottky"); }},
      {"ad-schottky", "Ad(rho) factors through alpha", {"rep", "group", "torus"}, [](Runner& r) { cmd_predicate(r, "ad-schottky"); }},
      {"adjoint", "adjoint representation", {"rep", "group"}, cmd_adjoint},
      {"jordan", "Jordan-Chevalley decomposition", {"matrix"}, cmd_jordan},
  };
  std::map<std::string, std::string> values;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    for (const char* f : s.flags) sub->add_option(std::string("--") + f, values[std::string(s.name) + "/" + f]);
  }

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;
  for (const char* f : chosen->flags) opts.args[f] = values[std::string(chosen->name) + "/" + f];

  auto report_error = [&](const std::string& code, const std::string& message, int exit_code) {
    err << "error: " << message << "\n";
    json report{{"command", chosen->name}, {"error", {{"code", code}, {"message", message}}}, {"exit_code", exit_code}};
    out << report.dump(2) << "\n";
    return exit_code;
  };
  try {
    Runner runner(opts, out);
    chosen->body(runner);
    return kOk;
  } catch (const Error& e) {
    return report_error(error_name(e.code()), e.what(), error_exit(e));
  } catch (const json::exception& e) {
    return report_error("ParseError", e.what(), kParseError);
  } catch (const std::exception& e) {
    return report_error("InternalInvariantBreach", e.what(), kInternal);
  }
}

}  // namespace schottky::cli
