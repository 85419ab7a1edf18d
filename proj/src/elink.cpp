#include <algorithm>
#include <functional>

#include "yonet/elink.hpp"
#include "json.hpp"

namespace yonet {

FormulaPtr formula_at_ref(const Sequent& s, const NodeRef& r) {
  if (r.root < 0 || r.root >= static_cast<int>(s.formulas.size()))
    throw std::runtime_error("bad root index " + r.str());
  return subformula_at(s.formulas[r.root], r.path);
}

namespace {

void collect_exists(const FormulaPtr& f, NodeRef at, std::vector<NodeRef>& out) {
  if (f->is_quant()) {
    if (f->tag == Conn::Exists) out.push_back(at);
    collect_exists(f->body, NodeRef{at.root, at.path + "B"}, out);
  } else if (f->is_binary()) {
    collect_exists(f->left, NodeRef{at.root, at.path + "L"}, out);
    collect_exists(f->right, NodeRef{at.root, at.path + "R"}, out);
  }
}

CoEdge coedge_of(const Sequent& s, const NodeRef& ex) {
  FormulaPtr f = formula_at_ref(s, ex);
  auto d = yoneda_decompose(f);
  if (!d) throw NotInFragment("exists body is not co-Yoneda: " + render(f));
  CoEdge c;
  c.exists = ex;
  c.var = f->var;
  c.pos = NodeRef{ex.root, ex.path + "B" + d->slot_path};
  c.neg = NodeRef{ex.root, ex.path + "B" + d->hole_path};
  return c;
}

}  // namespace

std::vector<CoEdge> coedges(const Sequent& s) {
  std::vector<CoEdge> out;
  for (int i = 0; i < static_cast<int>(s.formulas.size()); i++) {
    std::vector<NodeRef> exs;
    collect_exists(s.formulas[i], NodeRef{i, ""}, exs);
    for (auto& e : exs) out.push_back(coedge_of(s, e));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, CoEdge> existential_vars(const Sequent& s) {
  std::map<std::string, CoEdge> out;
  for (auto& c : coedges(s)) out[c.var] = c;
  return out;
}

void validate_elinking(const ELinking& l) {
  if (!is_clean(l.sequent))
    throw ValidationError(NetFault::DirtySequent, "sequent is not clean");
  for (auto& [i, j] : l.sequent.cuts) {
    if (i < 0 || j < 0 || i >= static_cast<int>(l.sequent.formulas.size()) ||
        j >= static_cast<int>(l.sequent.formulas.size()) || i == j)
      throw ValidationError(NetFault::DirtySequent, "bad cut pair indices");
    if (!alpha_equal(dual(l.sequent.formulas[i]), l.sequent.formulas[j]))
      throw ValidationError(NetFault::DirtySequent, "cut pair is not dual");
  }

  auto cs = coedges(l.sequent);
  std::set<NodeRef> covector;  // leaves owned by co-edges
  for (auto& c : cs) {
    covector.insert(c.pos);
    covector.insert(c.neg);
    if (!l.witness.count(c.exists))
      throw ValidationError(NetFault::BadWitness, "co-edge without witness: " + c.exists.str());
  }
  if (l.witness.size() != cs.size())
    throw ValidationError(NetFault::BadWitness, "witness map keys do not match the co-edges");
  std::set<NodeRef> targets;
  for (auto& [k, t] : l.witness) {
    formula_at_ref(l.sequent, t);  // must exist
    (void)k;
    if (!targets.insert(t).second)
      throw ValidationError(NetFault::BadWitness, "witnessing function is not injective");
  }

  std::map<NodeRef, int> cover;
  for (auto& [p, q] : l.edges) {
    FormulaPtr a = formula_at_ref(l.sequent, p);
    FormulaPtr b = formula_at_ref(l.sequent, q);
    if (!a->is_atom() || !b->is_atom() || a->var != b->var || a->tag == b->tag)
      throw ValidationError(NetFault::DanglingLeaf,
                            "edge joins " + render(a) + " and " + render(b));
    if (covector.count(p) || covector.count(q))
      throw ValidationError(NetFault::DanglingLeaf, "edge covers an existential leaf");
    cover[p]++;
    cover[q]++;
  }
  for (int i = 0; i < static_cast<int>(l.sequent.formulas.size()); i++) {
    for (auto& [path, leaf] :
         [&] {
           std::vector<std::pair<std::string, FormulaPtr>> acc;
           std::function<void(const FormulaPtr&, std::string)> rec =
               [&](const FormulaPtr& f, std::string at) {
                 if (f->is_leaf()) {
                   acc.emplace_back(at, f);
                 } else if (f->is_binary()) {
                   rec(f->left, at + "L");
                   rec(f->right, at + "R");
                 } else {
                   rec(f->body, at + "B");
                 }
               };
           rec(l.sequent.formulas[i], "");
           return acc;
         }()) {
      NodeRef r{i, path};
      if (leaf->is_unit())
        throw ValidationError(NetFault::DirtySequent, "units have no place in a linking sequent");
      if (covector.count(r)) continue;
      auto it = cover.find(r);
      if (it == cover.end())
        throw ValidationError(NetFault::DanglingLeaf, "leaf in no edge: " + r.str());
      if (it->second != 1)
        throw ValidationError(NetFault::DanglingLeaf, "leaf in several edges: " + r.str());
    }
  }
}

DependencyGraph dependency_graph(const ELinking& l) {
  DependencyGraph d;
  d.coedges = coedges(l.sequent);
  for (int i = 0; i < static_cast<int>(d.coedges.size()); i++) {
    FormulaPtr wf = formula_at_ref(l.sequent, l.witness.at(d.coedges[i].exists));
    for (int j = 0; j < static_cast<int>(d.coedges.size()); j++)
      if (occurs_free(wf, d.coedges[j].var)) d.arcs.emplace_back(i, j);
  }
  return d;
}

bool is_acyclic(const ELinking& l) {
  DependencyGraph d = dependency_graph(l);
  int n = static_cast<int>(d.coedges.size());
  std::vector<std::vector<int>> out(n);
  std::vector<int> indeg(n, 0);
  for (auto& [a, b] : d.arcs) {
    out[a].push_back(b);
    indeg[b]++;
  }
  std::vector<int> queue;
  for (int i = 0; i < n; i++)
    if (indeg[i] == 0) queue.push_back(i);
  int seen = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    seen++;
    for (int w : out[v])
      if (--indeg[w] == 0) queue.push_back(w);
  }
  return seen == n;
}

FormulaPtr ground_witness(const ELinking& l, const CoEdge& c) {
  if (!is_acyclic(l)) throw CyclicWitness("witnessing function is cyclic");
  auto evars = existential_vars(l.sequent);
  std::function<FormulaPtr(const CoEdge&)> gw = [&](const CoEdge& cc) -> FormulaPtr {
    FormulaPtr w = formula_at_ref(l.sequent, l.witness.at(cc.exists));
    for (auto& [v, other] : evars)
      if (occurs_free(w, v)) w = substitute(w, v, gw(other));
    return w;
  };
  return gw(c);
}

// ---------------------------------------------------------------- expansion

namespace {

// Instantiated formula at a plain node, reading already-stored witness
// copies at the co-edge leaves below it.
FormulaPtr inst_at(const ELinking& l, const std::map<NodeRef, FormulaPtr>& stored,
                   const std::map<std::string, CoEdge>& evars, const NodeRef& r) {
  FormulaPtr f = formula_at_ref(l.sequent, r);
  std::function<FormulaPtr(const FormulaPtr&)> rec = [&](const FormulaPtr& g) -> FormulaPtr {
    switch (g->tag) {
      case Conn::Atom:
      case Conn::NegAtom: {
        auto it = evars.find(g->var);
        if (it == evars.end()) return g;
        auto st = stored.find(it->second.exists);
        if (st == stored.end())
          throw CyclicWitness("expansion order failure at " + r.str());
        return g->tag == Conn::Atom ? st->second : dual(st->second);
      }
      case Conn::Tensor: return Formula::tensor(rec(g->left), rec(g->right));
      case Conn::Par: return Formula::par(rec(g->left), rec(g->right));
      case Conn::Forall: return Formula::forall(g->var, rec(g->body));
      case Conn::Exists: throw ValidationError(NetFault::BadWitness,
                                               "witness target contains an existential link");
      case Conn::One:
      case Conn::Bot: return g;
    }
    return g;
  };
  return rec(f);
}

void leafpaths(const FormulaPtr& f, const std::string& at,
               std::vector<std::pair<std::string, FormulaPtr>>& out) {
  if (f->is_leaf()) {
    out.emplace_back(at, f);
  } else if (f->is_binary()) {
    leafpaths(f->left, at + "L", out);
    leafpaths(f->right, at + "R", out);
  } else {
    leafpaths(f->body, at + "B", out);
  }
}

void quantpaths(const FormulaPtr& f, const std::string& at,
                std::vector<std::pair<std::string, FormulaPtr>>& out) {
  if (f->is_quant()) {
    out.emplace_back(at, f);
    quantpaths(f->body, at + "B", out);
  } else if (f->is_binary()) {
    quantpaths(f->left, at + "L", out);
    quantpaths(f->right, at + "R", out);
  }
}

}  // namespace

GNet expand(const ELinking& l) {
  validate_elinking(l);
  DependencyGraph d = dependency_graph(l);
  int n = static_cast<int>(d.coedges.size());

  // ground witnesses carry no existential link, with one exception: a
  // target that is itself a unit existential conclusion (the parking spots
  // of the ready construction)
  std::vector<bool> special(n, false);
  for (int i = 0; i < n; i++) {
    if (is_unit_exists(formula_at_ref(l.sequent, l.witness.at(d.coedges[i].exists)))) {
      special[i] = true;
      continue;
    }
    FormulaPtr gw = ground_witness(l, d.coedges[i]);  // throws when cyclic
    std::vector<std::pair<std::string, FormulaPtr>> qs;
    quantpaths(gw, "", qs);
    for (auto& [p, q] : qs) {
      (void)p;
      if (q->tag == Conn::Exists)
        throw ValidationError(NetFault::BadWitness,
                              "ground witness contains an existential quantifier: " + render(gw));
    }
  }

  // dependencies first; a target containing another target expands first,
  // otherwise its copy would detach edges anchored at the inner target
  std::vector<std::vector<int>> out_arcs(n);
  std::vector<int> indeg(n, 0);
  auto add_arc = [&](int before, int after) {
    out_arcs[before].push_back(after);
    indeg[after]++;
  };
  for (auto& [a, b] : d.arcs) add_arc(b, a);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      if (i == j) continue;
      const NodeRef& wi = l.witness.at(d.coedges[i].exists);
      const NodeRef& wj = l.witness.at(d.coedges[j].exists);
      if (special[i]) {
        // the parked co-edge takes over the target link, which must have
        // been expanded before
        if (d.coedges[j].exists == wi) add_arc(j, i);
        continue;
      }
      if (special[j]) continue;
      if (wi.is_prefix_of(wj) && wi != wj) add_arc(i, j);
    }
  std::vector<int> order, ready;
  for (int i = 0; i < n; i++)
    if (indeg[i] == 0) ready.push_back(i);
  std::sort(ready.begin(), ready.end());
  while (!ready.empty()) {
    int v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int w : out_arcs[v])
      if (--indeg[w] == 0) ready.push_back(w);
    std::sort(ready.begin(), ready.end());
  }
  if (static_cast<int>(order.size()) != n)
    throw CyclicWitness("witness targets cannot be expanded in any order");

  GNet g;
  g.sequent = l.sequent;
  g.axioms = l.edges;
  std::set<std::string> used;
  for (auto& f : l.sequent.formulas) {
    auto v = all_vars(f);
    used.insert(v.begin(), v.end());
  }
  auto evars = existential_vars(l.sequent);
  std::map<NodeRef, FormulaPtr> stored;

  for (int oi : order) {
    const CoEdge& c = d.coedges[oi];
    NodeRef nu = l.witness.at(c.exists);
    if (special[oi]) {
      // parked on a unit existential conclusion: the copy at the positive
      // leaf takes over the target link, whose own premise becomes a fresh
      // pocket against the dual copy at the negative leaf
      for (auto& [k, t] : l.witness)
        if (k != c.exists && t != nu && nu.is_prefix_of(t))
          throw ValidationError(NetFault::BadWitness,
                                "witness points into a taken-over unit conclusion: " + k.str());
      std::string y = fresh_name("Y", used);
      used.insert(y);
      FormulaPtr bot_copy =
          Formula::exists(y, Formula::tensor(Formula::atom(y), Formula::natom(y)));
      stored[c.exists] = bot_copy;
      g.witnesses[c.exists] = bot_copy;
      // the moved link keeps its witness and its premise edges
      g.witnesses[c.pos] = g.witnesses.at(nu);
      for (auto it = g.witnesses.begin(); it != g.witnesses.end();) {
        if (it->first != nu && it->first != c.pos && nu.is_prefix_of(it->first)) {
          g.witnesses[NodeRef{c.pos.root, c.pos.path + it->first.path.substr(nu.path.size())}] =
              it->second;
          it = g.witnesses.erase(it);
        } else {
          ++it;
        }
      }
      for (auto& e : g.axioms)
        for (NodeRef* r : {&e.first, &e.second})
          if (nu.is_prefix_of(*r) && *r != nu)
            *r = NodeRef{c.pos.root, c.pos.path + r->path.substr(nu.path.size())};
      // the fresh pocket: target re-witnessed by the eigenvariable of the
      // dual copy, wired leafwise across
      g.witnesses[nu] = Formula::atom(y);
      g.axioms.push_back(
          mk_edge(NodeRef{nu.root, nu.path + "BL"}, NodeRef{c.neg.root, c.neg.path + "BL"}));
      g.axioms.push_back(
          mk_edge(NodeRef{nu.root, nu.path + "BR"}, NodeRef{c.neg.root, c.neg.path + "BR"}));
      continue;
    }
    FormulaPtr fnu = inst_at(l, stored, evars, nu);
    FormulaPtr fpos = cleaned_formula(fnu, used);
    stored[c.exists] = fpos;
    g.witnesses[c.exists] = fpos;

    // the copy at the positive leaf takes over the edges of the target
    for (auto& e : g.axioms) {
      for (NodeRef* r : {&e.first, &e.second}) {
        if (nu.is_prefix_of(*r))
          *r = NodeRef{c.pos.root, c.pos.path + r->path.substr(nu.path.size())};
      }
    }
    // the dual copy at the negative leaf is wired leafwise onto the target
    std::vector<std::pair<std::string, FormulaPtr>> ls;
    leafpaths(fnu, "", ls);
    for (auto& [lp, leaf] : ls) {
      if (!leaf->is_atom()) continue;
      g.axioms.push_back(
          mk_edge(NodeRef{c.neg.root, c.neg.path + lp}, NodeRef{nu.root, nu.path + lp}));
    }
    // exists links of the dual copy mirror the forall links of the target
    std::vector<std::pair<std::string, FormulaPtr>> qs;
    quantpaths(fnu, "", qs);
    for (auto& [qp, q] : qs)
      if (q->tag == Conn::Forall)
        g.witnesses[NodeRef{c.neg.root, c.neg.path + qp}] = Formula::atom(q->var);
  }
  return g;
}

bool is_correct_elinking(const ELinking& l, long cap) {
  validate_elinking(l);
  if (!is_acyclic(l)) return false;
  // an unexpandable witnessing function has no net reading at all
  try {
    GNet g = expand(l);
    return is_correct_gnet(g, cap);
  } catch (const ValidationError&) {
    return false;
  } catch (const CyclicWitness&) {
    return false;
  }
}

// ----------------------------------------------------------------- identity

namespace {

// Mirror wiring of two dual subtrees; quantifier pairs follow the identity
// template: co-edge on the existential side witnessed by the hole variable
// of the universal side, whose own slot/hole pair is closed by an edge.
void id_wire(const NodeRef& a, const FormulaPtr& fa, const NodeRef& b, const FormulaPtr& fb,
             std::set<std::string> skip_a, std::set<std::string> skip_b, const std::string& rel,
             const std::set<std::string>& skip_rel, ELinking& out) {
  if (skip_rel.count(rel)) return;
  switch (fa->tag) {
    case Conn::Atom:
    case Conn::NegAtom:
      if (skip_a.count(fa->var) || skip_b.count(fb->var)) return;
      out.edges.push_back(mk_edge(a, b));
      return;
    case Conn::Tensor:
    case Conn::Par:
      id_wire(NodeRef{a.root, a.path + "L"}, fa->left, NodeRef{b.root, b.path + "L"}, fb->left,
              skip_a, skip_b, rel + "L", skip_rel, out);
      id_wire(NodeRef{a.root, a.path + "R"}, fa->right, NodeRef{b.root, b.path + "R"}, fb->right,
              skip_a, skip_b, rel + "R", skip_rel, out);
      return;
    case Conn::Forall:
    case Conn::Exists: {
      const bool a_is_exists = fa->tag == Conn::Exists;
      const NodeRef& e = a_is_exists ? a : b;
      const NodeRef& u = a_is_exists ? b : a;
      const FormulaPtr& fu = a_is_exists ? fb : fa;
      auto du = yoneda_decompose(fu);
      if (!du) throw NotInFragment("identity over a non-Yoneda quantifier");
      // eigen edge inside the universal side
      out.edges.push_back(mk_edge(NodeRef{u.root, u.path + "B" + du->slot_path},
                                  NodeRef{u.root, u.path + "B" + du->hole_path}));
      // co-edge witnessed by the universal hole occurrence
      out.witness[e] = NodeRef{u.root, u.path + "B" + du->hole_path};
      skip_a.insert(fa->var);
      skip_b.insert(fb->var);
      id_wire(NodeRef{a.root, a.path + "B"}, fa->body, NodeRef{b.root, b.path + "B"}, fb->body,
              skip_a, skip_b, rel + "B", skip_rel, out);
      return;
    }
    case Conn::One:
    case Conn::Bot:
      throw NotInFragment("identity linking over units");
  }
}

}  // namespace

void identity_wiring(const NodeRef& a, const FormulaPtr& fa, const NodeRef& b,
                     const FormulaPtr& fb, const std::set<std::string>& skip_rel, ELinking& out) {
  id_wire(a, fa, b, fb, {}, {}, "", skip_rel, out);
}

ELinking identity_linking(const FormulaPtr& a) {
  if (!in_yoneda_fragment(a)) throw NotInFragment("not in the Yoneda fragment: " + render(a));
  Sequent s;
  s.formulas = {dual(a), a};
  s = cleaned(s);
  ELinking out;
  out.sequent = s;
  identity_wiring(NodeRef{0, ""}, s.formulas[0], NodeRef{1, ""}, s.formulas[1], {}, out);
  return out;
}

// --------------------------------------------------------------------- JSON

std::string to_json(const ELinking& l) {
  nlohmann::json j;
  j["sequent"] = nlohmann::json::array();
  for (auto& f : l.sequent.formulas) j["sequent"].push_back(render(f));
  j["cuts"] = nlohmann::json::array();
  for (auto& [a, b] : l.sequent.cuts) j["cuts"].push_back({a, b});
  j["edges"] = nlohmann::json::array();
  for (auto& [p, q] : l.edges) j["edges"].push_back({p.str(), q.str()});
  j["witnesses"] = nlohmann::json::object();
  for (auto& [k, t] : l.witness) j["witnesses"][k.str()] = t.str();
  if (!l.auxiliary.empty()) j["auxiliary"] = l.auxiliary;
  return j.dump(2);
}

ELinking elinking_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ELinking l;
  for (auto& s : j.at("sequent")) l.sequent.formulas.push_back(parse_formula(s.get<std::string>()));
  if (j.contains("cuts"))
    for (auto& c : j["cuts"]) l.sequent.cuts.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
  for (auto& e : j.at("edges"))
    l.edges.push_back(mk_edge(NodeRef::parse(e.at(0).get<std::string>()),
                              NodeRef::parse(e.at(1).get<std::string>())));
  if (j.contains("witnesses"))
    for (auto& [k, v] : j["witnesses"].items())
      l.witness[NodeRef::parse(k)] = NodeRef::parse(v.get<std::string>());
  if (j.contains("auxiliary"))
    for (auto& x : j["auxiliary"]) l.auxiliary.push_back(x.get<int>());
  return l;
}

std::string to_dot(const ELinking& l) {
  std::ostringstream out;
  out << "graph elinking {\n  rankdir=BT;\n  node [shape=plaintext];\n";
  auto nid = [](const NodeRef& r) { return "n" + std::to_string(r.root) + "_" + r.path; };
  std::function<void(const FormulaPtr&, NodeRef)> emit = [&](const FormulaPtr& f, NodeRef at) {
    std::string lab;
    switch (f->tag) {
      case Conn::Atom: lab = f->var; break;
      case Conn::NegAtom: lab = "~" + f->var; break;
      case Conn::Tensor: lab = "*"; break;
      case Conn::Par: lab = "@"; break;
      case Conn::Forall: lab = "all " + f->var; break;
      case Conn::Exists: lab = "ex " + f->var; break;
      case Conn::One: lab = "1"; break;
      case Conn::Bot: lab = "bot"; break;
    }
    out << "  " << nid(at) << " [label=\"" << lab << "\"];\n";
    if (f->is_binary()) {
      emit(f->left, NodeRef{at.root, at.path + "L"});
      emit(f->right, NodeRef{at.root, at.path + "R"});
      out << "  " << nid(NodeRef{at.root, at.path + "L"}) << " -- " << nid(at) << ";\n";
      out << "  " << nid(NodeRef{at.root, at.path + "R"}) << " -- " << nid(at) << ";\n";
    } else if (f->is_quant()) {
      emit(f->body, NodeRef{at.root, at.path + "B"});
      out << "  " << nid(NodeRef{at.root, at.path + "B"}) << " -- " << nid(at) << ";\n";
    }
  };
  for (int i = 0; i < static_cast<int>(l.sequent.formulas.size()); i++)
    emit(l.sequent.formulas[i], NodeRef{i, ""});
  for (auto& [p, q] : l.edges)
    out << "  " << nid(p) << " -- " << nid(q) << " [constraint=false, penwidth=1.4];\n";
  for (auto& [k, t] : l.witness)
    out << "  " << nid(k) << " -- " << nid(t)
        << " [constraint=false, style=dashed, color=orange];\n";
  for (auto& [i, j] : l.sequent.cuts)
    out << "  " << nid(NodeRef{i, ""}) << " -- " << nid(NodeRef{j, ""})
        << " [constraint=false, style=bold, label=\"cut\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace yonet
