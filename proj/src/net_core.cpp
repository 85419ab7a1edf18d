#include <algorithm>
#include <numeric>
#include <sstream>

#include "yonet/net.hpp"
#include "json.hpp"

namespace yonet {

// ------------------------------------------------------ instantiated forest

namespace {

void build_rec(const GNet& g, NetIndex& ix, const FormulaPtr& f, NodeRef ref, int parent) {
  int id = static_cast<int>(ix.nodes.size());
  ix.nodes.push_back(NetNode{ref, f, f->tag, f->var, nullptr, parent, {}});
  ix.by_ref[ref] = id;
  if (parent >= 0) ix.nodes[parent].kids.push_back(id);
  switch (f->tag) {
    case Conn::Tensor:
    case Conn::Par:
      build_rec(g, ix, f->left, NodeRef{ref.root, ref.path + "L"}, id);
      build_rec(g, ix, f->right, NodeRef{ref.root, ref.path + "R"}, id);
      break;
    case Conn::Forall:
      build_rec(g, ix, f->body, NodeRef{ref.root, ref.path + "B"}, id);
      break;
    case Conn::Exists: {
      auto it = g.witnesses.find(ref);
      if (it == g.witnesses.end())
        throw ValidationError(NetFault::BadWitness, "missing witness at " + ref.str());
      ix.nodes[id].witness = it->second;
      FormulaPtr premise = substitute(f->body, f->var, it->second);
      build_rec(g, ix, premise, NodeRef{ref.root, ref.path + "B"}, id);
      break;
    }
    default:
      break;
  }
}

}  // namespace

NetIndex::NetIndex(const GNet& g) {
  for (int i = 0; i < static_cast<int>(g.sequent.formulas.size()); i++) {
    roots.push_back(static_cast<int>(nodes.size()));
    build_rec(g, *this, g.sequent.formulas[i], NodeRef{i, ""}, -1);
  }
  // jumps: a forall link of eigenvariable X jumps on every exists link whose
  // witness formula has a free occurrence of X
  for (int a = 0; a < static_cast<int>(nodes.size()); a++) {
    if (nodes[a].tag != Conn::Forall) continue;
    for (int e = 0; e < static_cast<int>(nodes.size()); e++) {
      if (nodes[e].tag != Conn::Exists) continue;
      if (occurs_free(nodes[e].witness, nodes[a].var)) jump_pairs.emplace_back(a, e);
    }
  }
}

const NetNode& NetIndex::at(const NodeRef& r) const { return nodes[id_of(r)]; }

int NetIndex::id_of(const NodeRef& r) const {
  auto it = by_ref.find(r);
  if (it == by_ref.end())
    throw ValidationError(NetFault::BadWitness, "no such node: " + r.str());
  return it->second;
}

bool NetIndex::in_subtree(int node, int root) const {
  while (node >= 0) {
    if (node == root) return true;
    node = nodes[node].parent;
  }
  return false;
}

// ---------------------------------------------------------------- validate

void validate_structure(const GNet& g) {
  NetIndex ix(g);

  // cut pairs are dual up to renaming
  for (auto& [i, j] : g.sequent.cuts) {
    if (i < 0 || j < 0 || i >= static_cast<int>(g.sequent.formulas.size()) ||
        j >= static_cast<int>(g.sequent.formulas.size()) || i == j)
      throw ValidationError(NetFault::DirtySequent, "bad cut pair indices");
    if (!alpha_equal(dual(g.sequent.formulas[i]), g.sequent.formulas[j]))
      throw ValidationError(NetFault::DirtySequent, "cut pair is not dual");
  }

  // eigenvariables are pairwise distinct and internal to the net: they may
  // leak into cut formulas during reduction, never into the conclusions
  std::set<std::string> eigens;
  for (auto& n : ix.nodes) {
    if (n.tag != Conn::Forall) continue;
    if (!eigens.insert(n.var).second)
      throw ValidationError(NetFault::DirtySequent, "eigenvariable bound twice: " + n.var);
  }
  std::set<std::string> free_all;
  for (int i = 0; i < static_cast<int>(g.sequent.formulas.size()); i++) {
    auto fr = free_vars(g.sequent.formulas[i]);
    free_all.insert(fr.begin(), fr.end());
    if (g.sequent.is_cut_formula(i)) continue;
    for (auto& v : fr)
      if (eigens.count(v))
        throw ValidationError(NetFault::DirtySequent,
                              "eigenvariable free in a conclusion: " + v);
  }

  // witness variables must be in scope somewhere
  for (auto& [ref, w] : g.witnesses) {
    if (ix.by_ref.find(ref) == ix.by_ref.end() || ix.at(ref).tag != Conn::Exists)
      throw ValidationError(NetFault::BadWitness, "witness key is not an exists link: " + ref.str());
    for (auto& v : free_vars(w))
      if (!free_all.count(v) && !eigens.count(v))
        throw ValidationError(NetFault::BadWitness, "witness variable out of scope: " + v);
  }

  // tiling: every atom leaf in exactly one axiom; units never in axioms
  std::map<NodeRef, int> cover;
  for (auto& [p, q] : g.axioms) {
    for (auto& r : {p, q}) {
      const NetNode& n = ix.at(r);
      if (n.tag != Conn::Atom && n.tag != Conn::NegAtom)
        throw ValidationError(NetFault::DanglingLeaf, "axiom endpoint is not an atom: " + r.str());
      cover[r]++;
    }
    const NetNode& a = ix.at(p);
    const NetNode& b = ix.at(q);
    if (a.var != b.var || a.tag == b.tag)
      throw ValidationError(NetFault::DanglingLeaf,
                            "axiom joins " + render(a.formula) + " and " + render(b.formula));
  }
  for (auto& n : ix.nodes) {
    if (n.tag == Conn::Atom || n.tag == Conn::NegAtom) {
      auto it = cover.find(n.ref);
      if (it == cover.end())
        throw ValidationError(NetFault::DanglingLeaf, "leaf in no axiom: " + n.ref.str());
      if (it->second != 1)
        throw ValidationError(NetFault::DanglingLeaf, "leaf in several axioms: " + n.ref.str());
    }
    if (n.tag == Conn::Bot) {
      auto it = g.thinning.find(n.ref);
      if (it == g.thinning.end())
        throw ValidationError(NetFault::DanglingLeaf, "bot without thinning edge: " + n.ref.str());
      ix.id_of(it->second);
    }
  }
  for (auto& [b, t] : g.thinning) {
    (void)t;
    if (ix.at(b).tag != Conn::Bot)
      throw ValidationError(NetFault::DanglingLeaf, "thinning source is not bot: " + b.str());
  }
}

// -------------------------------------------------------------- correctness

namespace {

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  }
  // returns false when the edge closes a cycle
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[a] = b;
    return true;
  }
};

struct SwitchSpace {
  // fixed edges plus one selectable group per par/forall
  std::vector<std::pair<int, int>> fixed;
  std::vector<std::vector<std::pair<int, int>>> groups;
  int vertices = 0;
};

SwitchSpace switch_space(const GNet& g, const NetIndex& ix) {
  SwitchSpace sp;
  sp.vertices = static_cast<int>(ix.nodes.size());
  std::map<int, std::vector<int>> jump_of;
  for (auto& [a, e] : ix.jump_pairs) jump_of[a].push_back(e);

  for (int id = 0; id < sp.vertices; id++) {
    const NetNode& n = ix.nodes[id];
    switch (n.tag) {
      case Conn::Tensor:
      case Conn::Par:
        if (n.tag == Conn::Tensor) {
          sp.fixed.emplace_back(id, n.kids[0]);
          sp.fixed.emplace_back(id, n.kids[1]);
        } else {
          sp.groups.push_back({{id, n.kids[0]}, {id, n.kids[1]}});
        }
        break;
      case Conn::Exists:
        sp.fixed.emplace_back(id, n.kids[0]);
        break;
      case Conn::Forall: {
        std::vector<std::pair<int, int>> opts{{id, n.kids[0]}};
        for (int e : jump_of[id]) opts.emplace_back(id, e);
        if (opts.size() == 1)
          sp.fixed.push_back(opts[0]);
        else
          sp.groups.push_back(std::move(opts));
        break;
      }
      default:
        break;
    }
  }
  for (auto& [p, q] : g.axioms) sp.fixed.emplace_back(ix.id_of(p), ix.id_of(q));
  for (auto& [b, t] : g.thinning) sp.fixed.emplace_back(ix.id_of(b), ix.id_of(t));
  for (auto& [i, j] : g.sequent.cuts) sp.fixed.emplace_back(ix.roots[i], ix.roots[j]);
  return sp;
}

bool test_switching(const SwitchSpace& sp, const std::vector<size_t>& pick) {
  UnionFind uf(sp.vertices);
  int components = sp.vertices;
  for (auto& [a, b] : sp.fixed) {
    if (!uf.join(a, b)) return false;
    components--;
  }
  for (size_t gi = 0; gi < sp.groups.size(); gi++) {
    auto& [a, b] = sp.groups[gi][pick[gi]];
    if (!uf.join(a, b)) return false;
    components--;
  }
  return components == 1;
}

}  // namespace

bool is_correct_gnet(const GNet& g, long cap) {
  (void)cap;
  validate_structure(g);
  NetIndex ix(g);
  if (ix.nodes.empty()) return false;
  SwitchSpace sp = switch_space(g, ix);

  // contraction procedure: merge along fixed edges, then resolve a group
  // once all of its options reach one vertex; a closable option is a cycle
  // in some switching, an unresolvable group a disconnection
  UnionFind uf(sp.vertices);
  int comps = sp.vertices;
  for (auto& [a, b] : sp.fixed) {
    if (!uf.join(a, b)) return false;
    comps--;
  }
  std::vector<bool> done(sp.groups.size(), false);
  size_t remaining = sp.groups.size();
  bool progress = true;
  while (remaining > 0 && progress) {
    progress = false;
    for (size_t gi = 0; gi < sp.groups.size(); gi++) {
      if (done[gi]) continue;
      int src = uf.find(sp.groups[gi][0].first);
      int tgt = -1;
      bool all_same = true;
      for (auto& [a, b] : sp.groups[gi]) {
        (void)a;
        int t = uf.find(b);
        if (t == src) return false;
        if (tgt == -1) tgt = t;
        else if (t != tgt) all_same = false;
      }
      if (!all_same) continue;
      uf.join(src, tgt);
      comps--;
      done[gi] = true;
      remaining--;
      progress = true;
    }
  }
  if (remaining > 0) return false;
  return comps == 1;
}

bool is_correct_gnet_enumerated(const GNet& g, long cap) {
  validate_structure(g);
  NetIndex ix(g);
  if (ix.nodes.empty()) return false;
  SwitchSpace sp = switch_space(g, ix);

  long total = 1;
  for (auto& grp : sp.groups) {
    total *= static_cast<long>(grp.size());
    if (total > cap)
      throw std::runtime_error("switching enumeration exceeds cap (" + std::to_string(cap) + ")");
  }
  std::vector<size_t> pick(sp.groups.size(), 0);
  while (true) {
    if (!test_switching(sp, pick)) return false;
    size_t i = 0;
    for (; i < pick.size(); i++) {
      if (++pick[i] < sp.groups[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }
  return true;
}

std::map<NodeRef, std::vector<NodeRef>> jumps(const GNet& g) {
  NetIndex ix(g);
  std::map<NodeRef, std::vector<NodeRef>> out;
  for (auto& n : ix.nodes)
    if (n.tag == Conn::Forall) out[n.ref] = {};
  for (auto& [a, e] : ix.jump_pairs) out[ix.nodes[a].ref].push_back(ix.nodes[e].ref);
  return out;
}

// ---------------------------------------------------------------- identity

bool gnet_iso(const GNet& g1, const GNet& g2) {
  if (g1.sequent.formulas.size() != g2.sequent.formulas.size()) return false;
  if (g1.sequent.cuts != g2.sequent.cuts) return false;
  NetIndex a(g1), b(g2);
  if (a.nodes.size() != b.nodes.size()) return false;
  // parallel walk: the forests must agree on shape; binders give a bijection
  std::map<std::string, std::string> fwd, bwd;
  for (size_t i = 0; i < a.nodes.size(); i++) {
    const NetNode& x = a.nodes[i];
    const NetNode& y = b.nodes[i];
    if (x.ref != y.ref || x.tag != y.tag) return false;
    if (x.tag == Conn::Forall || x.tag == Conn::Exists) {
      auto f = fwd.find(x.var);
      auto g = bwd.find(y.var);
      if (f != fwd.end() || g != bwd.end()) {
        if (f == fwd.end() || g == bwd.end()) return false;
        if (f->second != y.var || g->second != x.var) return false;
      } else {
        fwd[x.var] = y.var;
        bwd[y.var] = x.var;
      }
    }
  }
  auto rename = [&](const std::string& v) {
    auto it = fwd.find(v);
    return it == fwd.end() ? v : it->second;
  };
  for (size_t i = 0; i < a.nodes.size(); i++) {
    const NetNode& x = a.nodes[i];
    const NetNode& y = b.nodes[i];
    if (x.tag == Conn::Atom || x.tag == Conn::NegAtom)
      if (rename(x.var) != y.var) return false;
  }
  auto norm_axioms = [](const GNet& g) {
    std::vector<Edge> ax = g.axioms;
    for (auto& e : ax) e = mk_edge(e.first, e.second);
    std::sort(ax.begin(), ax.end());
    return ax;
  };
  if (norm_axioms(g1) != norm_axioms(g2)) return false;
  if (g1.thinning != g2.thinning) return false;
  // witnesses up to the binder bijection
  if (g1.witnesses.size() != g2.witnesses.size()) return false;
  for (auto& [ref, w] : g1.witnesses) {
    auto it = g2.witnesses.find(ref);
    if (it == g2.witnesses.end()) return false;
    FormulaPtr renamed = w;
    for (auto& [from, to] : fwd)
      if (from != to && occurs_free(renamed, from))
        renamed = substitute(renamed, from, Formula::atom(to));
    if (!alpha_equal(renamed, it->second)) return false;
  }
  return true;
}

// ------------------------------------------------------------------- JSON

std::string to_json(const GNet& g) {
  nlohmann::json j;
  j["sequent"] = nlohmann::json::array();
  for (auto& f : g.sequent.formulas) j["sequent"].push_back(render(f));
  j["cuts"] = nlohmann::json::array();
  for (auto& [a, b] : g.sequent.cuts) j["cuts"].push_back({a, b});
  j["axioms"] = nlohmann::json::array();
  for (auto& [p, q] : g.axioms) j["axioms"].push_back({p.str(), q.str()});
  j["witnesses"] = nlohmann::json::object();
  for (auto& [r, w] : g.witnesses) j["witnesses"][r.str()] = render(w);
  if (!g.thinning.empty()) {
    j["thinning"] = nlohmann::json::object();
    for (auto& [b, t] : g.thinning) j["thinning"][b.str()] = t.str();
  }
  return j.dump(2);
}

GNet gnet_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GNet g;
  for (auto& s : j.at("sequent")) g.sequent.formulas.push_back(parse_formula(s.get<std::string>()));
  if (j.contains("cuts"))
    for (auto& c : j["cuts"]) g.sequent.cuts.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
  for (auto& e : j.at("axioms"))
    g.axioms.push_back(mk_edge(NodeRef::parse(e.at(0).get<std::string>()),
                               NodeRef::parse(e.at(1).get<std::string>())));
  if (j.contains("witnesses"))
    for (auto& [k, v] : j["witnesses"].items())
      g.witnesses[NodeRef::parse(k)] = parse_formula(v.get<std::string>());
  if (j.contains("thinning"))
    for (auto& [k, v] : j["thinning"].items())
      g.thinning[NodeRef::parse(k)] = NodeRef::parse(v.get<std::string>());
  return g;
}

std::string to_dot(const GNet& g) {
  NetIndex ix(g);
  std::ostringstream out;
  out << "graph gnet {\n  rankdir=BT;\n  node [shape=plaintext];\n";
  auto nid = [](const NodeRef& r) {
    std::string s = "n" + std::to_string(r.root) + "_" + r.path;
    return s;
  };
  auto label = [](const NetNode& n) -> std::string {
    switch (n.tag) {
      case Conn::Atom: return n.var;
      case Conn::NegAtom: return "~" + n.var;
      case Conn::Tensor: return "*";
      case Conn::Par: return "@";
      case Conn::Forall: return "all " + n.var;
      case Conn::Exists: return "ex " + n.var + " := " + render(n.witness);
      case Conn::One: return "1";
      case Conn::Bot: return "bot";
    }
    return "?";
  };
  for (auto& n : ix.nodes) {
    out << "  " << nid(n.ref) << " [label=\"" << label(n) << "\"];\n";
    for (int k : n.kids)
      out << "  " << nid(ix.nodes[k].ref) << " -- " << nid(n.ref) << ";\n";
  }
  for (auto& [p, q] : g.axioms)
    out << "  " << nid(p) << " -- " << nid(q) << " [constraint=false, penwidth=1.4];\n";
  for (auto& [b, t] : g.thinning)
    out << "  " << nid(b) << " -- " << nid(t)
        << " [constraint=false, style=dashed, color=blue];\n";
  for (auto& [a, es] : jumps(g))
    for (auto& e : es)
      out << "  " << nid(a) << " -- " << nid(e)
          << " [constraint=false, style=dashed, color=gray];\n";
  for (auto& [i, j] : g.sequent.cuts)
    out << "  " << nid(NodeRef{i, ""}) << " -- " << nid(NodeRef{j, ""})
        << " [constraint=false, style=bold, label=\"cut\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace yonet
