#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "schottky_cli.hpp"

using namespace schottky;
using nlohmann::json;
using Q = GaussianRational;
using M = ExactMatrix;

namespace {

struct Outcome {
  int code;
  json report;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  json report = out.str().empty() ? json() : json::parse(out.str());
  return {code, report, err.str()};
}

class Scratch {
 public:
  Scratch() : dir_(std::filesystem::temp_directory_path() / ("schottky_cli_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(dir_);
  }
  ~Scratch() { std::filesystem::remove_all(dir_); }
  std::string write(const std::string& name, const json& j) {
    auto path = dir_ / name;
    std::ofstream(path) << j.dump();
    return path.string();
  }
  std::string write_text(const std::string& name, const std::string& text) {
    auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

 private:
  std::filesystem::path dir_;
};

const M J{{1, 1}, {0, 1}};

// Brace-initialized json turns two-element string pairs into objects.
json rows(std::initializer_list<std::vector<std::string>> r) {
  json out = json::array();
  for (const auto& row : r) out.push_back(row);
  return out;
}

}  // namespace

TEST_CASE("schottkyize the worked example", "[cli]") {
  Scratch s;
  auto t = s.write("t.json", {{"g", 1}, {"Z", {{"i"}}}});
  auto rho = s.write("rho.json", io::to_json(ExactRep{GroupSpec::lattice_unbound(1), 2, {J, J}}));
  auto out = run_cli({"schottkyize", "--torus", t, "--rep", rho});
  REQUIRE(out.code == 0);
  CHECK(out.report["command"] == "schottkyize");
  CHECK(out.report["inputs"].contains("torus"));
  CHECK(out.report["result"]["sigma"]["images"][0] == rows({{"1", "1-1*i"}, {"0", "1"}}));
  CHECK(out.report["result"]["gauge"]["A"][0] == rows({{"0", "-1"}, {"0", "0"}}));
  CHECK(out.report["result"]["verification"]["ok"] == true);
}

TEST_CASE("h1 with a group shorthand", "[cli]") {
  Scratch s;
  auto trivial = s.write("trivial1.json", {{"trivial", 1}});
  auto out = run_cli({"h1", "--group", "F:3", "--rep", trivial});
  REQUIRE(out.code == 0);
  CHECK(out.report["result"]["dim"] == 3);
  CHECK(run_cli({"h1", "--group", "Z:4", "--rep", trivial}).report["result"]["dim"] == 4);
  auto lat = s.write("lat.json", {{"g", 1}, {"Z", {{"i"}}}});
  CHECK(run_cli({"h1", "--group", "Lattice:" + lat, "--rep", trivial}).report["result"]["dim"] == 2);
  CHECK(run_cli({"h1", "--group", "Q:3", "--rep", trivial}).code == 1);
}

TEST_CASE("iso of a rep with itself", "[cli]") {
  Scratch s;
  auto a = s.write("a.json", io::to_json(ExactRep{GroupSpec::free(2), 2, {J, M{{2, 1}, {1, 1}}}}));
  auto out = run_cli({"iso", "--rep1", a, "--rep2", a});
  REQUIRE(out.code == 0);
  CHECK(out.report["result"]["isomorphic"] == true);
  CHECK(out.report["result"]["witness"] == io::to_json(M::identity(2)));
}

TEST_CASE("exit codes", "[cli]") {
  Scratch s;
  auto bad = s.write_text("bad.json", R"({"group": {"kind": "FreeGroup", "g": 1}, "images": [[["1/0"]]]})");
  auto out = run_cli({"validate", "--rep", bad});
  CHECK(out.code == 1);
  CHECK(out.report["error"]["code"] == "ParseError");

  auto nc = s.write("nc.json", io::to_json(ExactRep{GroupSpec::free_abelian(2), 2, {J, M{{1, 0}, {1, 1}}}}));
  out = run_cli({"validate", "--rep", nc});
  CHECK(out.code == 2);
  CHECK(out.report["error"]["code"] == "NonCommuting");
  CHECK_THAT(out.err, Catch::Matchers::ContainsSubstring("NonCommuting"));

  CHECK(run_cli({"validate", "--rep", s.write_text("garbage.json", "{not json")}).code == 1);
  CHECK(run_cli({"validate", "--rep", "/nonexistent/file.json"}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"validate"}).code == 1);
  CHECK(run_cli({"--backend", "fuzzy", "validate", "--rep", nc}).code == 1);

  auto f2 = s.write("f2.json", io::to_json(ExactRep{GroupSpec::free(2), 2, {M{{1, 2}, {0, 1}}, M{{1, 0}, {2, 1}}}}));
  out = run_cli({"peel", "--rep", f2});
  CHECK(out.code == 2);
  CHECK(out.report["error"]["code"] == "NotUnipotent");
}

TEST_CASE("every subcommand runs", "[cli]") {
  Scratch s;
  auto t = s.write("t.json", {{"g", 1}, {"Z", {{"i"}}}});
  auto rho = s.write("rho.json", io::to_json(ExactRep{GroupSpec::lattice_unbound(1), 2, {J, J}}));
  auto tau = s.write("tau.json", io::to_json(ExactRep{GroupSpec::free_abelian(1), 2, {J}}));
  auto one = s.write("one.json", {{"trivial", 1}});
  auto mat = s.write("m.json", rows({{"2", "1"}, {"0", "2"}}));

  auto ok = [](const Outcome& o) {
    INFO(o.err);
    return o.code == 0 && o.report.contains("result");
  };
  CHECK(ok(run_cli({"validate", "--rep", rho})));
  CHECK(run_cli({"evaluate", "--rep", tau, "--word", "B1^3"}).report["result"]["value"] == rows({{"1", "3"}, {"0", "1"}}));
  CHECK(run_cli({"kolchin", "--rep", rho}).report["result"]["verified"] == true);
  CHECK(ok(run_cli({"peel", "--rep", rho})));
  CHECK(run_cli({"pullback", "--rep", tau}).report["result"]["rep"]["images"][1] == io::to_json(M::identity(2)));
  CHECK(run_cli({"intertwiners", "--rep1", tau, "--rep2", tau}).report["result"]["dim"] == 2);
  CHECK(run_cli({"h0", "--rep", tau}).report["result"]["dim"] == 1);
  CHECK(run_cli({"ext1", "--group", "F:2", "--rep-a", one, "--rep-b", one}).report["result"]["dim"] == 2);

  auto cocycle = s.write("c.json", {{"values", {{"1"}, {"i"}}}});
  auto built = run_cli({"ext-build", "--group", "Z:2", "--rep-a", one, "--rep-b", one, "--cocycle", cocycle});
  REQUIRE(built.code == 0);
  auto ext = s.write("e.json", built.report);
  auto extracted = run_cli({"ext-extract", "--ext", ext, "--cocycle", cocycle});
  CHECK(extracted.report["result"]["matches"] == true);

  auto sch = run_cli({"schottkyize", "--torus", t, "--rep", rho});
  auto sch_file = s.write("s.json", sch.report);
  CHECK(run_cli({"verify-gauge", "--torus", t, "--rep", rho, "--schottky", sch_file}).report["result"]["ok"] == true);
  json tampered = sch.report;
  tampered["result"]["gauge"]["A"][0][0][1] = "0";
  auto bad = run_cli({"verify-gauge", "--torus", t, "--rep", rho, "--schottky", s.write("bad.json", tampered)});
  CHECK(bad.report["result"]["ok"] == false);
  CHECK(bad.report["result"]["failed_check"] == "exp-identity");

  CHECK(run_cli({"is-schottky", "--rep", rho}).report["result"]["value"] == false);
  CHECK(run_cli({"is-principal-schottky", "--rep", rho}).report["result"]["value"] == false);
  CHECK(run_cli({"ad-schottky", "--rep", rho, "--torus", t}).report["result"]["value"] == false);
  CHECK(run_cli({"adjoint", "--rep", rho}).report["result"]["unipotent"] == true);
  CHECK(run_cli({"jordan", "--matrix", mat}).report["result"]["u"] == rows({{"1", "1/2"}, {"0", "1"}}));

  auto ta = s.write("ta.json", {{"g", 1}, {"Z", {{"0.25+1.5*i"}}}, {"backend", "approx"}});
  auto chi = s.write("chi.json", {{"group", {{"kind", "Lattice"}, {"g", 1}}}, {"images", {{{"2"}}, {{"-1"}}}}});
  auto character = run_cli({"schottkyize", "--torus", ta, "--rep", chi});
  CHECK(character.report["result"]["mode"] == "character");
  CHECK(character.report["result"]["verification"]["ok"] == true);

  json flat{{"components",
             {{{"character", {{"images", {{{"1"}}, {{"-1"}}}}}}, {"unipotent", io::to_json(ExactRep{GroupSpec::lattice_unbound(1), 2, {J, J}})}}}}};
  auto fs = run_cli({"schottkyize", "--torus", t, "--rep", s.write("flat.json", flat)});
  INFO(fs.err);
  CHECK(fs.report["result"]["mode"] == "flat-sum");
  CHECK(fs.report["result"]["verification"]["ok"] == true);

  auto approx = run_cli({"--backend", "approx", "--eps", "1e-12", "h1", "--group", "F:3", "--rep", one});
  CHECK(approx.report["result"]["dim"] == 3);
  CHECK(approx.report["eps"] == 1e-12);
}

TEST_CASE("reports re-parse to equal values", "[cli][property]") {
  Scratch s;
  gen::Source src(71);
  for (int n = 0; n < 100; ++n) {
    std::size_t g = src.index(1, 2);
    switch (n % 4) {
      case 0: {  // pullback of a random Sigma-rep
        ExactRep tau = src.any_rep(GroupSpec::free_abelian(g), src.index(1, 3), 7);
        auto out = run_cli({"pullback", "--rep", s.write("tau.json", io::to_json(tau))});
        REQUIRE(out.code == 0);
        auto back = io::rep_from_json<Q>(out.report["result"]["rep"]);
        REQUIRE(back == pullback(tau, alpha_torus(g)));
        REQUIRE(io::to_json(back) == out.report["result"]["rep"]);
        break;
      }
      case 1: {  // ext-build on a random cocycle
        auto group = GroupSpec::free(g);
        ExactRep a = src.any_rep(group, 1, 7), b = src.any_rep(group, src.index(1, 2), 7);
        auto c = src.cocycle(hom_rep(a, b));
        auto out = run_cli({"ext-build", "--rep-a", s.write("a.json", io::to_json(a)), "--rep-b",
                            s.write("b.json", io::to_json(b)), "--cocycle", s.write("c.json", io::to_json(c))});
        REQUIRE(out.code == 0);
        REQUIRE(io::rep_from_json<Q>(out.report["result"]["E"]) == build_extension(a, b, c).total);
        REQUIRE(io::cocycle_from_json<Q>(out.report["inputs"]["cocycle"]) == c);
        break;
      }
      case 2: {  // schottkyize a random unipotent lattice rep
        auto torus = make_torus(src.symmetric_invertible(g));
        ExactRep rho = src.unipotent_rep(torus.lattice, src.index(1, 3));
        auto out = run_cli({"schottkyize", "--torus", s.write("t.json", io::to_json(torus)), "--rep",
                            s.write("rho.json", io::to_json(rho))});
        REQUIRE(out.code == 0);
        auto expected = schottkyize_unipotent(torus, rho);
        REQUIRE(io::rep_from_json<Q>(out.report["result"]["sigma"]) == expected.sigma);
        REQUIRE(io::gauge_from_json<Q>(out.report["result"]["gauge"]) == expected.gauge);
        REQUIRE(io::torus_from_json<Q>(out.report["inputs"]["torus"]).period == torus.period);
        break;
      }
      default: {  // approximate scalars survive the text form bit for bit
        ApproxRep chi{GroupSpec::lattice_unbound(1), 1, {}};
        for (int k = 0; k < 2; ++k) chi.images.push_back(ApproxMatrix{{src.approx_modulus(1e-2, 1e2)}});
        auto out = run_cli({"--backend", "approx", "adjoint", "--rep", s.write("chi.json", io::to_json(chi))});
        REQUIRE(out.code == 0);
        REQUIRE(io::rep_from_json<ApproxComplex>(out.report["inputs"]["rep"]) == chi);
        break;
      }
    }
  }
}
