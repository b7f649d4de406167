#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace aa;
using namespace aatest;

namespace {

struct Setup {
  ProgramIR p;
  NameTable t;
  UsedPointerStore ups;

  explicit Setup(const std::string& fixture)
      : p(loadFixture(fixture)), ups(collect_used_pointers(p)) {}

  TransferCtx ctx(Variant v, Abstraction a = Abstraction::Tba) {
    VariantConfig cfg;
    cfg.variant = v;
    cfg.abstraction = a;
    return TransferCtx{p, cfg, t, nullptr, &ups};
  }
  NameId var(const std::string& v) { return t.intern(NameKind::Var, v); }
  NameId addr(const std::string& v) { return t.intern(NameKind::AddrVar, v); }
  NameId type(const std::string& c) { return t.intern(NameKind::AddrType, c); }
};

std::set<std::string> genNames(const DemandGen& g, const NameTable& t) {
  return names(g.gen, t);
}

}  // namespace

TEST_CASE("d_kill only at plain-variable assignments") {
  Setup s("fig2.ir");
  auto ctx = s.ctx(Variant::Id);
  CHECK(names(d_kill(s.p.stmt("n05"), ctx), s.t) ==
        std::set<std::string>{"x"});  // x = new X
  CHECK(d_kill(s.p.stmt("n15"), ctx).empty());  // *p = x, weak update
  CHECK(d_kill(s.p.stmt("n23"), ctx).empty());  // x->f = new Y
}

TEST_CASE("addr_expr raises &x only for address-taken variables") {
  Setup s("fig2.ir");
  auto ctx = s.ctx(Variant::Id);
  CHECK(names(addr_expr(AccessExpr::makeVar("z"), ctx), s.t) ==
        std::set<std::string>{"&z"});
  CHECK(addr_expr(AccessExpr::makeVar("x"), ctx).empty());
  CHECK(addr_expr(AccessExpr::makeNew("X", "n05"), ctx).empty());
}

TEST_CASE("ld_gen per variant") {
  Setup s("fig2.ir");
  AccessExpr zf = AccessExpr::makeArrow("z", "f");
  CHECK(names(ld_gen(zf, AliasRel{}, s.ctx(Variant::Id)), s.t) ==
        std::set<std::string>{"z", "&z"});
  CHECK(names(ld_gen(zf, AliasRel{}, s.ctx(Variant::Cd)), s.t) ==
        std::set<std::string>{"z"});
  CHECK(names(ld_gen(AccessExpr::makeAddrOf("z"), AliasRel{},
                     s.ctx(Variant::Id)),
              s.t) == std::set<std::string>{"&z"});

  Setup j("fig14.ir");
  AliasRel xX;
  xX.add(j.var("x"), j.type("X"));
  CHECK(names(ld_gen(AccessExpr::makeDot("x", "f"), xX, j.ctx(Variant::Jd)),
              j.t) == std::set<std::string>{"x", "X.f"});
}

TEST_CASE("rd_gen per variant") {
  Setup s("fig2.ir");
  CHECK(names(rd_gen(AccessExpr::makeDeref("p"), s.ctx(Variant::Id)), s.t) ==
        std::set<std::string>{"p"});  // p is not address-taken

  // l = a.f with &a occurring in the program: the address demand is raised
  Setup f5("fig5.ir");  // &a1 occurs
  CHECK(names(rd_gen(AccessExpr::makeDot("a1", "f"), f5.ctx(Variant::Id)),
              f5.t) == std::set<std::string>{"&A"});

  Setup j("fig14.ir");
  CHECK(names(rd_gen(AccessExpr::makeDot("x", "f"), j.ctx(Variant::Jd)),
              j.t) == std::set<std::string>{"x"});
}

TEST_CASE("d_gen: virtual calls are origin nodes demanding the receiver") {
  Setup s("fig2.ir");
  DemandSet empty;
  DemandGen g = d_gen(s.p.stmt("n28"), empty, AliasRel{},
                      s.ctx(Variant::Id), false, false);
  CHECK(g.fired);
  CHECK(genNames(g, s.t) == std::set<std::string>{"t"});
}

TEST_CASE("d_gen at n27: demand for z and &z, then X.f once z resolves") {
  Setup s("fig2.ir");
  DemandSet dout;
  dout.insert(s.var("t"));
  DemandGen g1 = d_gen(s.p.stmt("n27"), dout, AliasRel{},
                       s.ctx(Variant::Id), false, false);
  CHECK(genNames(g1, s.t) == std::set<std::string>{"z", "&z"});

  AliasRel zX;
  zX.add(s.var("z"), s.type("X"));
  DemandGen g2 = d_gen(s.p.stmt("n27"), dout, zX, s.ctx(Variant::Id), false,
                       false);
  CHECK(genNames(g2, s.t) == std::set<std::string>{"z", "&z", "X.f"});
}

TEST_CASE("d_gen at n04: the &z demand fires no new demand through p") {
  Setup s("fig2.ir");
  DemandSet dout;
  dout.insert(s.var("z"));
  dout.insert(s.addr("z"));
  DemandGen g = d_gen(s.p.stmt("n04"), dout, AliasRel{}, s.ctx(Variant::Id),
                      false, false);
  CHECK(g.fired);  // the &z demand is served here
  CHECK(g.gen.empty());  // base(p) = {} and p is not address-taken
}

TEST_CASE("d_gen: unrelated assignment with empty demand generates nothing") {
  Setup s("fig2.ir");
  DemandGen g = d_gen(s.p.stmt("n05"), DemandSet{}, AliasRel{},
                      s.ctx(Variant::Id), false, false);
  CHECK_FALSE(g.fired);
  CHECK(g.gen.empty());
}

TEST_CASE("d_kill_cd: the conventional kill at indirect stores") {
  Setup s("fig2.ir");
  auto cd = s.ctx(Variant::Cd);
  DemandSet dout;
  dout.insert(s.var("z"));

  // round 1: pointees of p unknown; z is killed and p demanded
  CHECK(names(d_kill_cd(s.p.stmt("n15"), dout, cd), s.t) ==
        std::set<std::string>{"z"});
  DemandGen g1 = d_gen(s.p.stmt("n15"), dout, AliasRel{}, cd, false, false);
  CHECK(genNames(g1, s.t) == std::set<std::string>{"p"});

  // with (p,&z) known the left side resolves and the demand for x is raised
  // (Fig 20 round 2, after n05 = {x}); the kill predicate stays constant
  AliasRel pz;
  pz.add(s.var("p"), s.addr("z"));
  DemandGen g2 = d_gen(s.p.stmt("n15"), dout, pz, cd, true, false);
  CHECK(genNames(g2, s.t) == std::set<std::string>{"x", "p"});
  CHECK(names(d_kill_cd(s.p.stmt("n15"), dout, cd), s.t) ==
        std::set<std::string>{"z"});

  // nothing to kill without demands
  CHECK(d_kill_cd(s.p.stmt("n15"), DemandSet{}, cd).empty());
  // field stores never kill
  DemandSet fieldDemand;
  fieldDemand.insert(s.t.intern(NameKind::TypeField, "X", "f"));
  CHECK(d_kill_cd(s.p.stmt("n24"), fieldDemand, cd).empty());
}

TEST_CASE("d_kill_cd only touches address-taken compatible variables") {
  Setup s("fig2.ir");
  auto cd = s.ctx(Variant::Cd);
  DemandSet dout;
  dout.insert(s.var("x"));  // x is not address-taken: *p cannot write it
  CHECK(d_kill_cd(s.p.stmt("n15"), dout, cd).empty());
}

TEST_CASE("a_gen fires on demanded sides and resolves through aliases") {
  Setup s("fig2.ir");
  auto id = s.ctx(Variant::Id);

  // n04 with &z demanded -> (p,&z)
  DemandSet dz;
  dz.insert(s.addr("z"));
  AliasGen g1 = a_gen(s.p.stmt("n04"), dz, AliasRel{}, id);
  REQUIRE(g1.fired);
  REQUIRE(g1.pairs.size() == 1);
  CHECK(g1.pairs[0] == std::make_pair(std::min(s.var("p"), s.addr("z")),
                                      std::max(s.var("p"), s.addr("z"))));

  // n15 with (p,&z),(x,&X) known and z demanded: generates (z,x); the
  // points-to consequence z->X appears in the closure
  AliasRel ain;
  ain.add(s.var("p"), s.addr("z"));
  ain.add(s.var("x"), s.type("X"));
  DemandSet zd;
  zd.insert(s.var("z"));
  AliasGen g2 = a_gen(s.p.stmt("n15"), zd, ain, id);
  REQUIRE(g2.fired);
  AliasRel out = ain;
  for (auto& [a, b] : g2.pairs) out.add(a, b);
  CHECK(out.closureOf(s.var("z")).count(s.type("X")) == 1);

  // n24 under Id with no demand for y and no aliases of y: silent
  AliasGen g3 = a_gen(s.p.stmt("n24"), zd, ain, id);
  CHECK_FALSE(g3.fired);
  CHECK(g3.pairs.empty());

  // the same n24 under the exhaustive demand with (y,&X): (X.f,&Z)
  AliasRel withY = ain;
  withY.add(s.var("y"), s.type("X"));
  AliasGen g4 = a_gen(s.p.stmt("n24"), DemandSet::universalSet(), withY,
                      s.ctx(Variant::Ex));
  REQUIRE(g4.fired);
  NameId xf = s.t.intern(NameKind::TypeField, "X", "f");
  NameId az = s.t.intern(NameKind::AddrType, "Z");
  CHECK(g4.pairs == std::vector<std::pair<NameId, NameId>>{
                        {std::min(xf, az), std::max(xf, az)}});
}

TEST_CASE("a_kill: strong update at x = r only") {
  Setup s("fig2.ir");
  auto ctx = s.ctx(Variant::Id);
  AliasRel ain;
  ain.add(s.var("x"), s.type("X"));
  // x = new X kills the incoming (x,&X)
  auto killed = a_kill_var(s.p.stmt("n05"), ctx, ain);
  REQUIRE(killed.has_value());
  AliasRel out = a_apply(ain, killed, {});
  CHECK_FALSE(out.contains(s.var("x"), s.type("X")));
  // weak updates
  CHECK_FALSE(a_kill_var(s.p.stmt("n23"), ctx, ain).has_value());
  CHECK_FALSE(a_kill_var(s.p.stmt("n15"), ctx, ain).has_value());
  Statement skip;
  skip.kind = StmtKind::Skip;
  CHECK_FALSE(a_kill_var(skip, ctx, ain).has_value());
}

TEST_CASE("a_apply preserves connections that ran through the killed name") {
  Setup s("fig2.ir");
  AliasRel ain;
  ain.add(s.var("x"), s.var("y"));
  ain.add(s.var("y"), s.type("X"));
  AliasRel out = a_apply(ain, s.var("y"), {});
  CHECK_FALSE(out.contains(s.var("x"), s.var("y")));
  CHECK(out.closureOf(s.var("x")).count(s.type("X")) == 1);
}

TEST_CASE("self-copy does not kill (directly or through an indirection)") {
  ProgramIR p = parse_program(R"(
class X { }
func main() {
  var h: X**  var q: X*
  n1: h = &q
  n2: q = new X
  n3: q = *h
}
)");
  NameTable t;
  UsedPointerStore ups = collect_used_pointers(p);
  VariantConfig cfg;
  TransferCtx ctx{p, cfg, t, nullptr, &ups};
  AliasRel ain;
  ain.add(t.intern(NameKind::Var, "h"), t.intern(NameKind::AddrVar, "q"));
  ain.add(t.intern(NameKind::Var, "q"), t.intern(NameKind::AddrType, "X"));
  // *h may read q itself: the kill is suppressed
  CHECK_FALSE(a_kill_var(p.stmt("n3"), ctx, ain).has_value());
  // with no aliases for h the kill applies normally
  CHECK(a_kill_var(p.stmt("n3"), ctx, AliasRel{}).has_value());
}

TEST_CASE("transfer outputs are monotone in (Ain, Dout)") {
  std::mt19937_64 rng(99);
  Setup s("fig2.ir");
  std::vector<std::string> stmts{"n03", "n04", "n05", "n14",
                                 "n15", "n23", "n24", "n27"};
  std::vector<NameId> pool{s.var("z"), s.addr("z"), s.var("x"), s.var("t"),
                           s.var("p"), s.var("y"),
                           s.t.intern(NameKind::TypeField, "X", "f"),
                           s.type("X"), s.type("Y")};
  for (Variant v : {Variant::Id, Variant::Cd}) {
    auto ctx = s.ctx(v);
    for (int trial = 0; trial < 120; ++trial) {
      DemandSet dSmall, dBig;
      for (NameId n : pool) {
        if (rng() % 3 == 0) {
          dSmall.insert(n);
          dBig.insert(n);
        } else if (rng() % 2 == 0) {
          dBig.insert(n);
        }
      }
      AliasRel aSmall, aBig;
      for (int e = 0; e < 4; ++e) {
        NameId a = pool[rng() % pool.size()], b = pool[rng() % pool.size()];
        if (a == b) continue;
        if (rng() % 2) {
          aSmall.add(a, b);
          aBig.add(a, b);
        } else {
          aBig.add(a, b);
        }
      }
      const Statement& st = s.p.stmt(stmts[rng() % stmts.size()]);
      // Cd's speculation condition is anti-monotone by itself; the solver
      // latches it, so monotonicity holds at any fixed latch state
      bool latch = v == Variant::Cd;
      DemandGen gs = d_gen(st, dSmall, aSmall, ctx, latch, latch);
      DemandGen gb = d_gen(st, dBig, aBig, ctx, latch, latch);
      for (NameId n : gs.gen) CHECK(gb.gen.count(n));
      AliasGen as = a_gen(st, dSmall, aSmall, ctx);
      AliasGen ab = a_gen(st, dBig, aBig, ctx);
      AliasRel bigOut;
      for (auto& [a, b] : ab.pairs) bigOut.add(a, b);
      for (auto& [x, y] : as.pairs) CHECK(bigOut.contains(x, y));
    }
  }
}

TEST_CASE("the universal demand dominates every concrete demand") {
  Setup s("fig2.ir");
  auto ctx = s.ctx(Variant::Id);
  AliasRel ain;
  ain.add(s.var("p"), s.addr("z"));
  ain.add(s.var("x"), s.type("X"));
  for (const char* id : {"n03", "n04", "n05", "n15", "n23", "n27"}) {
    DemandSet some;
    some.insert(s.var("z"));
    some.insert(s.var("t"));
    DemandGen g = d_gen(s.p.stmt(id), some, ain, ctx, false, false);
    DemandGen u = d_gen(s.p.stmt(id), DemandSet::universalSet(), ain, ctx,
                        false, false);
    for (NameId n : g.gen) CHECK(u.gen.count(n));
  }
}

TEST_CASE("a_gen pairs are drawn from the two sides' abstract names") {
  Setup s("fig2.ir");
  auto ctx = s.ctx(Variant::Ex);
  AliasRel ain;
  ain.add(s.var("p"), s.addr("z"));
  ain.add(s.var("x"), s.type("X"));
  ain.add(s.var("y"), s.type("X"));
  for (const char* id : {"n03", "n04", "n05", "n14", "n15", "n23", "n24",
                         "n27"}) {
    const Statement& st = s.p.stmt(id);
    AliasGen g = a_gen(st, DemandSet::universalSet(), ain, ctx);
    auto lbar = abs_name(st.lhs, ain, ctx.absCtx());
    auto rbar = abs_name(st.rhs, ain, ctx.absCtx());
    for (auto& [a, b] : g.pairs) {
      bool ok = (lbar.count(a) && rbar.count(b)) ||
                (lbar.count(b) && rbar.count(a));
      CHECK(ok);
    }
  }
}

TEST_CASE("jd validation rejects pointer syntax naming the statement") {
  ProgramIR p = loadFixture("fig2.ir");
  VariantConfig cfg;
  cfg.variant = Variant::Jd;
  CHECK_THROWS_WITH_AS(validate_for_variant(p, cfg),
                       doctest::Contains("n03"), AnalysisError);
  ProgramIR j = loadFixture("fig14.ir");
  CHECK_NOTHROW(validate_for_variant(j, cfg));
}

TEST_CASE("object-store flag requires the type-based abstraction") {
  ProgramIR p = loadFixture("fig5.ir");
  VariantConfig cfg;
  cfg.useObjectStore = true;
  cfg.abstraction = Abstraction::Asb;
  CHECK_THROWS_AS(validate_for_variant(p, cfg), AnalysisError);
}
