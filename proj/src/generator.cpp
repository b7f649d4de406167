#include "aa/generator.hpp"

#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "aa/oracle.hpp"

namespace aa {

namespace {

struct Gen {
  const GenParams& params;
  std::mt19937_64 rng;
  std::ostringstream out;
  std::vector<std::string> classes;
  std::vector<std::string> allObjects, allPointers, allHandles;
  std::vector<std::string> objects;   // the active region's slices
  std::vector<std::string> pointers;
  std::vector<std::string> handles;
  std::set<std::string> initialized;  // has a defined value
  bool fieldWritten = false;          // some field store emitted
  int label = 0;

  explicit Gen(const GenParams& p, uint64_t seed) : params(p), rng(seed) {}

  static std::vector<std::string> slice(const std::vector<std::string>& xs,
                                        int region, int regions) {
    if (regions <= 1 || xs.empty()) return xs;
    std::vector<std::string> out;
    for (size_t i = 0; i < xs.size(); ++i)
      if (static_cast<int>(i) % regions == region) out.push_back(xs[i]);
    return out.empty() ? std::vector<std::string>{xs.front()} : out;
  }

  void focusRegion(int stmtIndex, int totalStmts) {
    int region = params.regions <= 1
                     ? 0
                     : stmtIndex * params.regions / std::max(1, totalStmts);
    region = std::min(region, params.regions - 1);
    objects = slice(allObjects, region, params.regions);
    pointers = slice(allPointers, region, params.regions);
    handles = slice(allHandles, region, params.regions);
  }

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }
  bool chance(int percent) { return pick(100) < static_cast<size_t>(percent); }
  const std::string& any(const std::vector<std::string>& xs) {
    return xs[pick(xs.size())];
  }
  std::string anyInit(const std::vector<std::string>& xs) {
    std::vector<std::string> have;
    for (const auto& x : xs)
      if (initialized.count(x)) have.push_back(x);
    return have.empty() ? std::string() : have[pick(have.size())];
  }

  std::string nextLabel() {
    std::ostringstream os;
    os << "n" << std::setw(3) << std::setfill('0') << ++label;
    return os.str();
  }

  void emitHeader() {
    if (params.lang == Lang::Java) out << "lang java\n";
    const std::string base = "C1";
    for (int i = 1; i <= params.classes; ++i) {
      std::string name = "C" + std::to_string(i);
      classes.push_back(name);
      out << "class " << name;
      if (i > 1) out << " : C" << (i - 1);
      if (i == 1) {
        std::string fieldType =
            params.lang == Lang::Java ? base : base + "*";
        out << " { field f: " << fieldType << " field g: " << fieldType
            << " }";
      } else {
        out << " { }";
      }
      out << "\n";
    }
    out << "virtual m in ";
    for (int i = 1; i <= params.classes; ++i) {
      if (i > 1) out << ", ";
      out << "C" << i;
    }
    out << "\n";
  }

  void emitDecls() {
    const std::string base = "C1";
    if (params.lang == Lang::Cpp) {
      for (int i = 0; i < params.objectVars; ++i) {
        std::string v = "o" + std::to_string(i + 1);
        allObjects.push_back(v);
        out << "  var " << v << ": " << any(classes) << "\n";
      }
    }
    for (int i = 0; i < params.pointerVars; ++i) {
      std::string v = "p" + std::to_string(i + 1);
      allPointers.push_back(v);
      out << "  var " << v << ": " << base
          << (params.lang == Lang::Java ? "" : "*") << "\n";
    }
    if (params.lang == Lang::Cpp && params.maxPtrLevel >= 2) {
      for (int i = 0; i < params.handleVars; ++i) {
        std::string v = "h" + std::to_string(i + 1);
        allHandles.push_back(v);
        out << "  var " << v << ": " << base << "**\n";
      }
    }
    focusRegion(0, 1);
  }

  std::string statementCpp() {
    for (int attempt = 0; attempt < 24; ++attempt) {
      switch (pick(9)) {
        case 0: {  // p = new C
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = new " + any(classes);
        }
        case 1: {  // p = &o
          if (objects.empty()) break;
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = &" + any(objects);
        }
        case 2: {  // p = q
          std::string q = anyInit(pointers);
          if (q.empty()) break;
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = " + q;
        }
        case 3: {  // h = &p / *h = p / p = *h
          if (handles.empty()) break;
          switch (pick(3)) {
            case 0: {
              std::string h = any(handles);
              initialized.insert(h);
              return h + " = &" + any(pointers);
            }
            case 1: {
              std::string h = anyInit(handles);
              std::string p = anyInit(pointers);
              if (h.empty() || p.empty()) break;
              return "*" + h + " = " + p;
            }
            case 2: {
              std::string h = anyInit(handles);
              if (h.empty()) break;
              std::string p = any(pointers);
              initialized.insert(p);
              return p + " = *" + h;
            }
          }
          break;
        }
        case 4: {  // x->f = q
          std::string x = anyInit(pointers);
          std::string q = anyInit(pointers);
          if (x.empty() || q.empty()) break;
          fieldWritten = true;
          return x + "->" + (chance(70) ? "f" : "g") + " = " + q;
        }
        case 5: {  // p = x->f
          if (!fieldWritten) break;
          std::string x = anyInit(pointers);
          if (x.empty()) break;
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = " + x + "->" + (chance(70) ? "f" : "g");
        }
        case 6: {  // o.f = q
          if (objects.empty()) break;
          std::string q = anyInit(pointers);
          if (q.empty()) break;
          fieldWritten = true;
          return any(objects) + "." + (chance(70) ? "f" : "g") + " = " + q;
        }
        case 7: {  // p = o.f
          if (objects.empty() || !fieldWritten) break;
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = " + any(objects) + "." + (chance(70) ? "f" : "g");
        }
        case 8: {  // x->f = new C
          std::string x = anyInit(pointers);
          if (x.empty()) break;
          fieldWritten = true;
          return x + "->" + (chance(70) ? "f" : "g") + " = new " +
                 any(classes);
        }
      }
    }
    std::string p = any(pointers);
    initialized.insert(p);
    return p + " = new " + any(classes);
  }

  std::string statementJava() {
    for (int attempt = 0; attempt < 24; ++attempt) {
      switch (pick(5)) {
        case 0: {
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = new " + any(classes);
        }
        case 1: {
          std::string q = anyInit(pointers);
          if (q.empty()) break;
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = " + q;
        }
        case 2:
        case 3: {
          std::string x = anyInit(pointers);
          std::string q = anyInit(pointers);
          if (x.empty() || q.empty()) break;
          fieldWritten = true;
          return x + "." + (chance(70) ? "f" : "g") + " = " + q;
        }
        case 4: {
          if (!fieldWritten) break;
          std::string x = anyInit(pointers);
          if (x.empty()) break;
          std::string p = any(pointers);
          initialized.insert(p);
          return p + " = " + x + "." + (chance(70) ? "f" : "g");
        }
      }
    }
    std::string p = any(pointers);
    initialized.insert(p);
    return p + " = new " + any(classes);
  }

  std::string run() {
    emitHeader();
    out << "func main() {\n";
    emitDecls();

    // choose where the virtual calls go (never the very first statements)
    std::set<int> callAt;
    int total = params.statements;
    for (int i = 0; i < params.vcalls && total > 2; ++i)
      callAt.insert(2 + static_cast<int>(pick(total - 2)));

    std::vector<std::string> labels;
    auto emit = [&](const std::string& body) {
      std::string lbl = nextLabel();
      labels.push_back(lbl);
      out << "  " << lbl << ": " << body << "\n";
    };
    for (int i = 0; i < total; ++i) {
      focusRegion(i, total);
      if (callAt.count(i)) {
        // receivers are usually constructed close to the call, the way
        // object code reads; sometimes an older pointer is called through
        std::string r = chance(70) ? any(pointers) : anyInit(pointers);
        if (r.empty()) r = any(pointers);
        if (!initialized.count(r) || chance(70)) {
          emit(r + " = new " + any(classes));
          initialized.insert(r);
        }
        emit("vcall " + r + (params.lang == Lang::Java ? "." : "->") +
             "m()");
      } else {
        emit(params.lang == Lang::Java ? statementJava() : statementCpp());
      }
    }

    if (params.shape != GenShape::StraightLine && labels.size() >= 4) {
      std::vector<std::string> edges;
      for (size_t i = 0; i + 1 < labels.size(); ++i)
        edges.push_back(labels[i] + "->" + labels[i + 1]);
      size_t extras = 1 + labels.size() / 5;
      for (size_t k = 0; k < extras; ++k) {
        size_t i = pick(labels.size() - 2);
        size_t j = i + 2 + pick(labels.size() - i - 2);
        edges.push_back(labels[i] + "->" + labels[j]);
      }
      if (params.shape == GenShape::General) {
        for (int k = 0; k < 2; ++k) {
          size_t j = 1 + pick(labels.size() - 1);
          size_t i = pick(j + 1);
          edges.push_back(labels[j] + "->" + labels[i]);
        }
      }
      out << "  edges: ";
      for (size_t i = 0; i < edges.size(); ++i) {
        if (i) out << ", ";
        out << edges[i];
      }
      out << "\n";
    }
    out << "}\n";
    return out.str();
  }
};

}  // namespace

std::string generate_program(const GenParams& params, uint64_t seed) {
  Gen g(params, seed);
  return g.run();
}

ProgramIR generate_runnable(const GenParams& params, uint64_t seed,
                            int maxTries) {
  uint64_t s = seed;
  for (int i = 0; i < maxTries; ++i) {
    ProgramIR p = parse_program(generate_program(params, s));
    try {
      run_concrete(p);
      return p;
    } catch (const AnalysisError&) {
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    }
  }
  throw std::runtime_error("generate_runnable: no runnable program found");
}

}  // namespace aa
