#include <algorithm>
#include <functional>

#include "yonet/translate.hpp"

namespace yonet {

// ------------------------------------------------------------ Yon translation

namespace {

// moves conclusion `from` to position `to`, shifting the others
GNet permute_root_to(const GNet& g, int from, int to) {
  int n = static_cast<int>(g.sequent.formulas.size());
  std::vector<int> order;
  for (int i = 0; i < n; i++)
    if (i != from) order.push_back(i);
  order.insert(order.begin() + to, from);
  std::vector<int> newpos(n);
  for (int i = 0; i < n; i++) newpos[order[i]] = i;

  GNet out;
  out.sequent.formulas.resize(n);
  for (int i = 0; i < n; i++) out.sequent.formulas[newpos[i]] = g.sequent.formulas[i];
  for (auto& [a, b] : g.sequent.cuts) out.sequent.cuts.emplace_back(newpos[a], newpos[b]);
  for (auto& [p, q] : g.axioms)
    out.axioms.push_back(mk_edge(NodeRef{newpos[p.root], p.path}, NodeRef{newpos[q.root], q.path}));
  for (auto& [k, w] : g.witnesses) out.witnesses[NodeRef{newpos[k.root], k.path}] = w;
  for (auto& [b, t] : g.thinning)
    out.thinning[NodeRef{newpos[b.root], b.path}] = NodeRef{newpos[t.root], t.path};
  return out;
}

// wraps conclusion `a` of the net, prefixing refs below it
GNet wrap_conclusion(const GNet& g, int a, const FormulaPtr& wrapped, const std::string& prefix) {
  GNet out;
  out.sequent = g.sequent;
  out.sequent.formulas[a] = wrapped;
  for (auto& [p, q] : g.axioms) {
    auto fix = [&](const NodeRef& r) {
      return r.root == a ? NodeRef{a, prefix + r.path} : r;
    };
    out.axioms.push_back(mk_edge(fix(p), fix(q)));
  }
  for (auto& [k, w] : g.witnesses)
    out.witnesses[k.root == a ? NodeRef{a, prefix + k.path} : k] = w;
  for (auto& [b, t] : g.thinning) {
    auto fix = [&](const NodeRef& r) {
      return r.root == a ? NodeRef{a, prefix + r.path} : r;
    };
    out.thinning[fix(b)] = fix(t);
  }
  return out;
}

// cuts conclusion `a` of n against conclusion `yo_side` of the template and
// reduces; the surviving template conclusion returns to position `a`
GNet cut_against(const GNet& n, int a, const GNet& yo, int yo_side) {
  GNet joined = join_cut(n, a, yo, yo_side);
  GNet red = gnet_reduce(joined);
  // the reduced net keeps the non-cut conclusions in order: first n's
  // conclusions without a, then the template's survivor
  int last = static_cast<int>(red.sequent.formulas.size()) - 1;
  return permute_root_to(red, last, a);
}

GNet yon_rec(const Derivation& d) {
  switch (d.rule) {
    case Rule::Ax: {
      GNet g;
      g.sequent.formulas = d.conclusions;
      g.axioms.push_back(mk_edge(NodeRef{0, ""}, NodeRef{1, ""}));
      return g;
    }
    case Rule::One: {
      GNet g;
      g.sequent.formulas = {Formula::one()};
      return g;
    }
    case Rule::Bot: {
      GNet child = yon_rec(*d.kids[0]);
      GNet g;
      g.sequent.formulas = child.sequent.formulas;
      g.sequent.formulas.insert(g.sequent.formulas.begin() + d.a, Formula::bot());
      std::map<NodeRef, NodeRef> m;
      NetIndex ix(child);
      auto shift = [&](const NodeRef& r) {
        return NodeRef{r.root >= d.a ? r.root + 1 : r.root, r.path};
      };
      for (auto& [p, q] : child.axioms) g.axioms.push_back(mk_edge(shift(p), shift(q)));
      for (auto& [k, w] : child.witnesses) g.witnesses[shift(k)] = w;
      for (auto& [b, t] : child.thinning) g.thinning[shift(b)] = shift(t);
      (void)m;
      // rewiring-insensitive attachment
      g.thinning[NodeRef{d.a, ""}] = NodeRef{d.a == 0 ? 1 : 0, ""};
      return g;
    }
    case Rule::Par: {
      GNet child = yon_rec(*d.kids[0]);
      int last = static_cast<int>(child.sequent.formulas.size()) - 1;
      FormulaPtr merged = Formula::par(child.sequent.formulas[d.a], child.sequent.formulas[last]);
      GNet g;
      g.sequent.formulas = child.sequent.formulas;
      g.sequent.formulas[d.a] = merged;
      g.sequent.formulas.pop_back();
      auto fix = [&](const NodeRef& r) {
        if (r.root == d.a) return NodeRef{d.a, "L" + r.path};
        if (r.root == last) return NodeRef{d.a, "R" + r.path};
        return r;
      };
      for (auto& [p, q] : child.axioms) g.axioms.push_back(mk_edge(fix(p), fix(q)));
      for (auto& [k, w] : child.witnesses) g.witnesses[fix(k)] = w;
      for (auto& [b, t] : child.thinning) g.thinning[fix(b)] = fix(t);
      return g;
    }
    case Rule::Tensor: {
      GNet l = yon_rec(*d.kids[0]);
      GNet r = yon_rec(*d.kids[1]);
      GNet g;
      g.sequent.formulas.resize(d.conclusions.size());
      g.sequent.formulas[d.a] =
          Formula::tensor(l.sequent.formulas[0], r.sequent.formulas[0]);
      auto lift = [&](const GNet& side, const std::vector<int>& where, bool leftside) {
        auto fix = [&](const NodeRef& ref) {
          int parent = where[ref.root];
          if (parent == -1) return NodeRef{d.a, (leftside ? "L" : "R") + ref.path};
          return NodeRef{parent, ref.path};
        };
        for (int i = 1; i < static_cast<int>(side.sequent.formulas.size()); i++)
          g.sequent.formulas[where[i]] = side.sequent.formulas[i];
        for (auto& [p, q] : side.axioms) g.axioms.push_back(mk_edge(fix(p), fix(q)));
        for (auto& [k, w] : side.witnesses) g.witnesses[fix(k)] = w;
        for (auto& [b, t] : side.thinning) g.thinning[fix(b)] = fix(t);
      };
      lift(l, d.left_map, true);
      lift(r, d.right_map, false);
      return g;
    }
    case Rule::Forall: {
      GNet child = yon_rec(*d.kids[0]);
      FormulaPtr body = child.sequent.formulas[d.a];  // translated, X free
      FormulaPtr quant = Formula::forall(d.eigen, body);
      GNet wrapped = wrap_conclusion(child, d.a, quant, "B");
      GNet yo = yo2_net(quant);
      return cut_against(wrapped, d.a, yo, 1);
    }
    case Rule::Exists: {
      GNet child = yon_rec(*d.kids[0]);
      FormulaPtr orig = d.conclusions[d.a];  // ex X.A, untranslated
      FormulaPtr body_y = yoneda_translate_formula(orig->body);
      FormulaPtr wit_y = yoneda_translate_formula(d.witness);
      FormulaPtr quant = Formula::exists(orig->var, body_y);
      if (!equal(substitute(body_y, orig->var, wit_y), child.sequent.formulas[d.a]))
        throw std::runtime_error("translation does not commute with the witness substitution");
      GNet wrapped = wrap_conclusion(child, d.a, quant, "B");
      wrapped.witnesses[NodeRef{d.a, ""}] = wit_y;
      GNet yo = yo1_net(Formula::forall(orig->var, dual(body_y)));
      return cut_against(wrapped, d.a, yo, 1);
    }
    case Rule::Cut:
      throw std::runtime_error("the Yoneda translation expects a cut-free net");
  }
  throw std::runtime_error("bad derivation");
}

}  // namespace

LaxLinking yon_translate(const GNet& g) {
  if (!g.sequent.cuts.empty())
    throw std::runtime_error("the Yoneda translation expects a cut-free net");
  Derivation d = sequentialize(g);
  GNet t = yon_rec(d);
  LaxLinking out;
  out.sequent = t.sequent;
  out.edges = t.axioms;
  out.thinning = t.thinning;
  validate_lax(out);
  return out;
}

// --------------------------------------------------------- linking of a net

ELinking ell_cut_of_gnet(const GNet& g) {
  validate_structure(g);
  if (!g.sequent.cuts.empty())
    throw std::runtime_error("the linking translation expects a cut-free net");
  for (auto& [k, w] : g.witnesses) {
    (void)k;
    if (!bound_vars(w).empty())
      throw ValidationError(NetFault::BadWitness,
                            "linking extraction needs quantifier-free witnesses: " + render(w));
  }

  NetIndex ix(g);
  ELinking out;
  out.sequent = g.sequent;
  out.edges = g.axioms;

  // collect the exists links with the premise slots of their bound pair
  struct Item {
    NodeRef ex;
    NodeRef pos, neg;
    FormulaPtr wit;
  };
  std::vector<Item> items;
  for (auto& n : ix.nodes) {
    if (n.tag != Conn::Exists) continue;
    auto d = yoneda_decompose(n.formula);
    if (!d) throw NotInFragment("exists body is not co-Yoneda: " + render(n.formula));
    items.push_back(Item{n.ref, NodeRef{n.ref.root, n.ref.path + "B" + d->slot_path},
                         NodeRef{n.ref.root, n.ref.path + "B" + d->hole_path}, n.witness});
  }

  for (auto& it : items) {
    int k1 = static_cast<int>(out.sequent.formulas.size());
    out.sequent.formulas.push_back(it.wit);
    out.sequent.formulas.push_back(dual(it.wit));
    out.sequent.cuts.emplace_back(k1, k1 + 1);
    for (auto& e : out.edges) {
      for (NodeRef* r : {&e.first, &e.second}) {
        if (it.pos.is_prefix_of(*r))
          *r = NodeRef{k1, r->path.substr(it.pos.path.size())};
        else if (it.neg.is_prefix_of(*r))
          *r = NodeRef{k1 + 1, r->path.substr(it.neg.path.size())};
      }
    }
    out.witness[it.ex] = NodeRef{k1, ""};
  }
  return out;
}

GNet pi_cut(const GNet& g) {
  return expand(ell_cut_of_gnet(g));
}

ELinking ell_of_gnet(const GNet& g, long max_states) {
  return normalize(ell_cut_of_gnet(g), nullptr, max_states);
}

bool eps_equivalent(const GNet& g1, const GNet& g2, long max_states) {
  if (g1.sequent.formulas.size() != g2.sequent.formulas.size())
    throw SequentMismatch("nets have different conclusions");
  for (size_t i = 0; i < g1.sequent.formulas.size(); i++)
    if (!alpha_equal(g1.sequent.formulas[i], g2.sequent.formulas[i]))
      throw SequentMismatch("nets have different conclusions");
  ELinking l1 = ell_of_gnet(g1, max_states);
  ELinking l2 = ell_of_gnet(g2, max_states);
  // normal forms live over the original conclusions; align bound names
  for (size_t i = 0; i < l2.sequent.formulas.size(); i++)
    l2.sequent.formulas[i] = l1.sequent.formulas[i];
  return equivalent(l1, l2, max_states);
}

}  // namespace yonet
