#include "aa/report.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aa {

std::string render_name_set(const DemandSet& d, const NameTable& names) {
  if (d.isUniversal()) return "{*}";
  std::vector<std::string> xs;
  for (NameId id : d.ids()) xs.push_back(names.text(id));
  std::sort(xs.begin(), xs.end());
  std::string s = "{";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += xs[i];
  }
  return s + "}";
}

std::string render_pair_set(const AliasRel& rel, const NameTable& names) {
  std::vector<std::string> xs;
  for (const auto& [a, b] : rel.closurePairs()) {
    std::string ta = names.text(a), tb = names.text(b);
    if (tb < ta) std::swap(ta, tb);
    xs.push_back("(" + ta + "," + tb + ")");
  }
  std::sort(xs.begin(), xs.end());
  std::string s = "{";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += xs[i];
  }
  return s + "}";
}

std::string render_states_text(const ProgramIR& p, SolveResult& r) {
  std::ostringstream os;
  os << "analysis variant=" << variant_name(r.cfg.variant)
     << " abstraction=" << abstraction_name(r.cfg.abstraction) << "\n";
  for (const auto& fname : p.functionOrder) {
    const Cfg& cfg = p.functions.at(fname);
    os << "func " << fname << ":\n";
    for (const auto& n : cfg.nodes) {
      const NodeState& ns = r.at(n);
      os << "  " << n << ": " << p.stmt(n).text() << "\n";
      os << "    Din: " << render_name_set(ns.din, r.names)
         << "  Dout: " << render_name_set(ns.dout, r.names) << "\n";
      os << "    Ain: " << render_pair_set(ns.ain, r.names)
         << "  Aout: " << render_pair_set(ns.aout, r.names) << "\n";
    }
  }
  for (const auto& [call, callees] : r.callGraph) {
    if (!p.origin.count(call)) continue;
    os << "resolve " << call << " -> {";
    bool first = true;
    for (const auto& c : callees) {
      if (!first) os << ", ";
      os << c;
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

std::string render_states_json(const ProgramIR& p, SolveResult& r,
                               const DevirtReport& devirt) {
  nlohmann::json nodes = nlohmann::json::array();
  auto nameArray = [&](const DemandSet& d) {
    nlohmann::json a = nlohmann::json::array();
    if (d.isUniversal()) {
      a.push_back("*");
      return a;
    }
    std::vector<std::string> xs;
    for (NameId id : d.ids()) xs.push_back(r.names.text(id));
    std::sort(xs.begin(), xs.end());
    for (auto& x : xs) a.push_back(x);
    return a;
  };
  auto pairArray = [&](const AliasRel& rel) {
    std::vector<std::pair<std::string, std::string>> ps;
    for (const auto& [x, y] : rel.closurePairs()) {
      std::string tx = r.names.text(x), ty = r.names.text(y);
      if (ty < tx) std::swap(tx, ty);
      ps.emplace_back(tx, ty);
    }
    std::sort(ps.begin(), ps.end());
    nlohmann::json a = nlohmann::json::array();
    for (auto& [x, y] : ps) a.push_back({x, y});
    return a;
  };
  for (const auto& fname : p.functionOrder) {
    for (const auto& n : p.functions.at(fname).nodes) {
      const NodeState& ns = r.at(n);
      nodes.push_back({{"id", n},
                       {"stmt", p.stmt(n).text()},
                       {"din", nameArray(ns.din)},
                       {"dout", nameArray(ns.dout)},
                       {"ain", pairArray(ns.ain)},
                       {"aout", pairArray(ns.aout)}});
    }
  }
  nlohmann::json j = nlohmann::json::parse(devirt.toJson());
  j["nodes"] = nodes;
  return j.dump(2);
}

}  // namespace aa
