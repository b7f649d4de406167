#include <doctest.h>

#include <random>

#include "aa/generator.hpp"
#include "aa/solver.hpp"
#include "helpers.hpp"

using namespace aa;
using namespace aatest;

TEST_CASE("parse fig2: classes, hierarchy, origin") {
  ProgramIR p = loadFixture("fig2.ir");
  CHECK(p.classes.size() == 3);
  CHECK(p.hasClass("X"));
  CHECK(p.isSubclassOf("Y", "X"));
  CHECK(p.isSubclassOf("Z", "Y"));
  CHECK(p.isSubclassOf("Z", "X"));
  CHECK_FALSE(p.isSubclassOf("X", "Z"));
  CHECK(p.origin == std::set<std::string>{"n28"});
  CHECK(p.stmt("n28").kind == StmtKind::VirtualCall);
  CHECK(p.stmt("n28").receiver == "t");
}

TEST_CASE("parse empty function body") {
  ProgramIR p = parse_program("class X { }\nfunc main() {\n}\n");
  const Cfg& cfg = p.functions.at("main");
  CHECK(cfg.nodes.empty());
  CHECK(p.stmt(cfg.start).kind == StmtKind::Skip);
  CHECK(p.stmt(cfg.end).kind == StmtKind::Skip);
  CHECK(cfg.succ.at(cfg.start) == std::vector<std::string>{cfg.end});
  CHECK(p.origin.empty());
}

TEST_CASE("parse fig4b: address-taken variables") {
  ProgramIR p = loadFixture("fig4b.ir");
  CHECK(p.addrTakenVars == std::set<std::string>{"a"});
  CHECK(p.functions.at("main").nodes.size() == 5);
}

TEST_CASE("addrTakenVars is exactly the &x scan, usedPointerVars the store scan") {
  ProgramIR p = loadFixture("fig2.ir");
  CHECK(p.addrTakenVars == std::set<std::string>{"z"});
  CHECK(p.usedPointerVars == std::set<std::string>{"p", "x", "y"});
}

TEST_CASE("var_of per the grammar") {
  CHECK(var_of(AccessExpr::makeArrow("x", "f")) == std::set<std::string>{"x"});
  CHECK(var_of(AccessExpr::makeNull()).empty());
  CHECK(var_of(AccessExpr::makeAddrOf("z")) == std::set<std::string>{"z"});
  CHECK(var_of(AccessExpr::makeDeref("x")) == std::set<std::string>{"x"});
  CHECK(var_of(AccessExpr::makeDot("x", "f")) == std::set<std::string>{"x"});
  CHECK(var_of(AccessExpr::makeNew("T", "s")).empty());
}

TEST_CASE("base_of per the grammar") {
  CHECK(base_of(AccessExpr::makeDeref("x")) == std::set<std::string>{"x"});
  CHECK(base_of(AccessExpr::makeDot("x", "f")).empty());
  CHECK(base_of(AccessExpr::makeNew("T", "s")).empty());
  CHECK(base_of(AccessExpr::makeArrow("x", "f")) == std::set<std::string>{"x"});
  CHECK(base_of(AccessExpr::makeVar("x")).empty());
  CHECK(base_of(AccessExpr::makeAddrOf("x")).empty());
}

TEST_CASE("var_of and base_of invariants over all expression forms") {
  std::vector<AccessExpr> all = {
      AccessExpr::makeVar("x"),        AccessExpr::makeDeref("x"),
      AccessExpr::makeArrow("x", "f"), AccessExpr::makeDot("x", "f"),
      AccessExpr::makeAddrOf("x"),     AccessExpr::makeNew("T", "s"),
      AccessExpr::makeNull()};
  for (const auto& e : all) {
    CHECK(var_of(e).size() <= 1);
    CHECK(base_of(e).size() <= 1);
    for (const auto& b : base_of(e)) CHECK(var_of(e).count(b) == 1);
  }
}

TEST_CASE("parse errors carry codes and positions") {
  CHECK_THROWS_WITH_AS(parse_program("class X { }\nfunc f() {\n  n1: &a = x\n}\n"),
                       doctest::Contains("address-of on left-hand side"),
                       ParseError);
  try {
    parse_program("class X { }\nclass Y : W { }\nfunc f() { }\n");
    FAIL("expected UndeclaredClass");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseCode::UndeclaredClass);
  }
  try {
    parse_program("class A : B { }\nclass B : A { }\nfunc f() { }\n");
    FAIL("expected CyclicHierarchy");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseCode::CyclicHierarchy);
  }
  try {
    parse_program("class X { }\nfunc f() {\n  n1: x = null\n}\n");
    FAIL("expected UndeclaredVariable");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseCode::UndeclaredVariable);
    CHECK(e.line == 3);
  }
  try {
    parse_program(
        "class X { }\nfunc f() {\n  var p: X*\n  n1: fcall p() targets {}\n}\n");
    FAIL("expected MalformedStatement");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseCode::SyntaxError);  // empty list is a syntax error
  }
}

TEST_CASE("whole-object assignment is rejected in cpp mode") {
  try {
    parse_program(
        "class X { }\nfunc f() {\n  var a: X  var b: X\n  n1: a = b\n}\n");
    FAIL("expected MalformedStatement");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseCode::MalformedStatement);
  }
}

TEST_CASE("parse-print-parse round trip is structurally identical") {
  for (const char* name :
       {"fig2.ir", "fig3a.ir", "fig4b.ir", "fig5.ir", "fig12.ir", "fig14.ir"}) {
    ProgramIR a = loadFixture(name);
    ProgramIR b = parse_program(print_program(a));
    CHECK(print_program(a) == print_program(b));
    CHECK(a.origin == b.origin);
    CHECK(a.addrTakenVars == b.addrTakenVars);
    CHECK(a.varTypes.size() == b.varTypes.size());
    for (const auto& [f, cfg] : a.functions) {
      CHECK(cfg.nodes == b.functions.at(f).nodes);
      CHECK(cfg.succ == b.functions.at(f).succ);
    }
  }
  // generated programs too, including branchy shapes
  GenParams params;
  params.statements = 18;
  params.shape = GenShape::Acyclic;
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    ProgramIR a = parse_program(generate_program(params, seed));
    ProgramIR b = parse_program(print_program(a));
    CHECK(print_program(a) == print_program(b));
  }
}

TEST_CASE("origin equals the virtual-call statements") {
  GenParams params;
  params.statements = 20;
  params.vcalls = 3;
  for (uint64_t seed : {10, 11, 12}) {
    ProgramIR p = parse_program(generate_program(params, seed));
    std::set<std::string> vcalls;
    for (const auto& [id, st] : p.statements)
      if (st.kind == StmtKind::VirtualCall) vcalls.insert(id);
    CHECK(p.origin == vcalls);
  }
}

TEST_CASE("supergraph of a single call-free function is its cfg") {
  ProgramIR p = loadFixture("fig2.ir");
  Supergraph g = build_supergraph(p);
  const Cfg& cfg = p.functions.at("main");
  for (const auto& [a, succs] : cfg.succ) CHECK(g.succ.at(a) == succs);
  CHECK(g.nodes.size() == cfg.nodes.size() + 2);
}

TEST_CASE("direct call synthesizes parameter copy assignments") {
  ProgramIR p = parse_program(R"(
class X { }
virtual m in X
func main() {
  var a: X*
  n1: a = new X
  n2: call f(a) -> r
  n3: vcall r->m()
  var r: X*
}
func f(q: X*) {
  var ret: X*
  n4: ret = q
}
)");
  Supergraph g = build_supergraph(p);
  REQUIRE(g.nodes.count("n2.bind0"));
  const Statement& bind = g.nodes.at("n2.bind0");
  CHECK(bind.kind == StmtKind::Assign);
  CHECK(bind.lhs == AccessExpr::makeVar("q"));
  CHECK(bind.rhs == AccessExpr::makeVar("a"));
  REQUIRE(g.nodes.count("n2.ret"));
  CHECK(g.nodes.at("n2.ret").lhs == AccessExpr::makeVar("r"));
  // call node no longer falls through
  CHECK(g.succ.at("n2") == std::vector<std::string>{"n2.bind0"});
}

TEST_CASE("interprocedural flow matches the inlined program (oracle)") {
  // a's pointee must reach q's use inside f; the inlined single-function
  // version of the same program is the oracle
  ProgramIR two = parse_program(R"(
class X { field f: X* }
virtual m in X
func main() {
  var a: X*  var r: X*
  n1: a = new X
  n2: call f(a) -> r
  n3: vcall r->m()
}
func f(q: X*) {
  var ret: X*
  n4: q->f = new X
  n5: ret = q->f
}
)");
  ProgramIR inlined = parse_program(R"(
class X { field f: X* }
virtual m in X
func main() {
  var a: X*  var r: X*  var q: X*  var ret: X*
  n1: a = new X
  b1: q = a
  n4: q->f = new X
  n5: ret = q->f
  b2: r = ret
  n3: vcall r->m()
}
)");
  SolveResult rTwo = solve_ex(two, Abstraction::Tba);
  SolveResult rIn = solve_ex(inlined, Abstraction::Tba);
  CHECK(pointeesOf("r", rTwo.at("n3").ain, rTwo.names) ==
        pointeesOf("r", rIn.at("n3").ain, rIn.names));
  CHECK(pointeesOf("r", rTwo.at("n3").ain, rTwo.names) ==
        std::set<std::string>{"&X"});
}

TEST_CASE("indirect call wires every declared target") {
  ProgramIR p = parse_program(R"(
class X { }
func main() {
  var a: X*  var fp: X*
  n1: fcall fp(a) targets {f, g}
}
func f(q1: X*) { }
func g(q2: X*) { }
)");
  Supergraph g = build_supergraph(p);
  CHECK(g.nodes.count("n1.bind0@f"));
  CHECK(g.nodes.count("n1.bind0@g"));
  CHECK(g.hasEdge("n1.bind0@f", p.functions.at("f").start));
  CHECK(g.hasEdge("n1.bind0@g", p.functions.at("g").start));
}

TEST_CASE("direct call to an undeclared function is UnknownCallee") {
  ProgramIR p = parse_program(R"(
class X { }
func main() {
  var a: X*
  n1: call nosuch(a)
}
)");
  CHECK_THROWS_AS((void)build_supergraph(p), ParseError);
  try {
    (void)build_supergraph(p);
  } catch (const ParseError& e) {
    CHECK(e.code == ParseCode::UnknownCallee);
  }
}

TEST_CASE("declared_pointees walks the hierarchy downward") {
  ProgramIR p = loadFixture("fig2.ir");
  CHECK(declared_pointees("t", p) ==
        std::set<std::string>{"X", "Y", "Z"});
  ProgramIR q = parse_program(
      "class X { }\nclass Y : X { }\nfunc f() {\n  var l: Y*\n  n1: l = new "
      "Y\n}\n");
  CHECK(declared_pointees("l", q) == std::set<std::string>{"Y"});
  CHECK_THROWS_AS((void)declared_pointees("nosuch", q), ParseError);
}
