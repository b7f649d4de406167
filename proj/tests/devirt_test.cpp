#include <doctest.h>

#include <nlohmann/json.hpp>

#include "aa/devirt.hpp"
#include "aa/generator.hpp"
#include "helpers.hpp"

using namespace aa;
using namespace aatest;

namespace {

VariantConfig make(Variant v, Abstraction a = Abstraction::Tba) {
  VariantConfig c;
  c.variant = v;
  c.abstraction = a;
  return c;
}

}  // namespace

TEST_CASE("fig2 reports under Id and Ex") {
  ProgramIR p = loadFixture("fig2.ir");
  SolveResult id = solve(p, make(Variant::Id));
  DevirtReport rid = devirtualize(id, p, "fig2.ir");
  CHECK(rid.perCall.at("n28").callees == std::set<std::string>{"Y::vfun"});
  CHECK(rid.perCall.at("n28").monomorphic);
  CHECK_FALSE(rid.perCall.at("n28").fallback);
  CHECK(rid.monomorphicCount == 1);
  CHECK(rid.virtualEdgeCount == 1);

  SolveResult ex = solve_ex(p, Abstraction::Tba);
  DevirtReport rex = devirtualize(ex, p, "fig2.ir");
  CHECK(rex.perCall.at("n28").callees ==
        std::set<std::string>{"Y::vfun", "Z::vfun"});
  CHECK_FALSE(rex.perCall.at("n28").monomorphic);
  CHECK(rex.monomorphicCount == 0);
  CHECK(rex.virtualEdgeCount == 2);
}

TEST_CASE("a program without virtual calls reports zero counts") {
  ProgramIR p = loadFixture("fig12.ir");
  SolveResult r = solve(p, make(Variant::Id));
  DevirtReport rep = devirtualize(r, p);
  CHECK(rep.perCall.empty());
  CHECK(rep.monomorphicCount == 0);
  CHECK(rep.virtualEdgeCount == 0);
  CHECK(rep.classTypeCount == 0);
}

TEST_CASE("an unresolved receiver falls back to the class hierarchy") {
  // the receiver is never assigned, so the analysis cannot resolve it
  ProgramIR p = parse_program(R"(
class X { }
class Y : X { }
virtual m in X, Y
func main() {
  var r: X*
  n1: vcall r->m()
}
)");
  SolveResult r = solve(p, make(Variant::Id));
  DevirtReport rep = devirtualize(r, p);
  CHECK(rep.perCall.at("n1").fallback);
  CHECK(rep.perCall.at("n1").callees ==
        std::set<std::string>{"X::m", "Y::m"});
}

TEST_CASE("class-type metric: 4 under Id, 7 under Ex on fig2") {
  ProgramIR p = loadFixture("fig2.ir");
  SolveResult id = solve(p, make(Variant::Id));
  CHECK(class_type_metric(id, p) == 4);  // (x,X),(z,X),(X.f,Y),(t,Y)
  SolveResult ex = solve_ex(p, Abstraction::Tba);
  CHECK(class_type_metric(ex, p) == 7);  // adds (y,X),(X.f,Z),(t,Z)
}

TEST_CASE("metric trends: Id at least as good as Ex") {
  GenParams params;
  params.statements = 16;
  params.vcalls = 2;
  params.shape = GenShape::Acyclic;
  for (uint64_t seed : {31, 32, 33, 34}) {
    ProgramIR p = parse_program(generate_program(params, seed));
    for (Abstraction a : {Abstraction::Tba, Abstraction::Asb}) {
      SolveResult id = solve(p, make(Variant::Id, a));
      SolveResult ex = solve_ex(p, a);
      DevirtReport rid = devirtualize(id, p);
      DevirtReport rex = devirtualize(ex, p);
      CHECK(rid.monomorphicCount >= rex.monomorphicCount);
      CHECK(rid.virtualEdgeCount <= rex.virtualEdgeCount);
      CHECK(class_type_metric(id, p) <= class_type_metric(ex, p));
    }
  }
}

TEST_CASE("every reported callee defines or inherits the method") {
  GenParams params;
  params.statements = 14;
  params.vcalls = 3;
  for (uint64_t seed : {41, 42, 43}) {
    ProgramIR p = parse_program(generate_program(params, seed));
    SolveResult r = solve(p, make(Variant::Id));
    DevirtReport rep = devirtualize(r, p);
    for (const auto& [call, cr] : rep.perCall) {
      const std::string& method = p.stmt(call).method;
      for (const auto& callee : cr.callees) {
        auto sep = callee.find("::");
        REQUIRE(sep != std::string::npos);
        std::string cls = callee.substr(0, sep);
        CHECK(callee.substr(sep + 2) == method);
        CHECK(p.classes.at(cls).virtuals.count(method) == 1);
      }
    }
  }
}

TEST_CASE("the JSON report carries the documented schema") {
  ProgramIR p = loadFixture("fig2.ir");
  SolveResult r = solve(p, make(Variant::Id));
  DevirtReport rep = devirtualize(r, p, "fig2.ir");
  auto j = nlohmann::json::parse(rep.toJson());
  CHECK(j["program"] == "fig2.ir");
  CHECK(j["variant"] == "id");
  CHECK(j["abstraction"] == "tba");
  REQUIRE(j["calls"].is_array());
  CHECK(j["calls"][0]["id"] == "n28");
  CHECK(j["calls"][0]["monomorphic"] == true);
  CHECK(j["calls"][0]["fallback"] == false);
  CHECK(j["metrics"]["mono"] == 1);
  CHECK(j["metrics"]["edges"] == 1);
  CHECK(j["metrics"]["classTypes"] == 4);
  CHECK(j["perf"].contains("nodes"));
  CHECK(j["perf"].contains("visits"));
  CHECK(j["perf"].contains("ms"));
}

TEST_CASE("devirtualize is deterministic over the final states") {
  ProgramIR p = loadFixture("fig2.ir");
  SolveResult a = solve(p, make(Variant::Id));
  SolveResult b = solve(p, make(Variant::Id));
  DevirtReport ra = devirtualize(a, p, "x");
  DevirtReport rb = devirtualize(b, p, "x");
  CHECK(ra.toJson() == rb.toJson());
}
