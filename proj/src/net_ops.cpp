#include <algorithm>
#include <cassert>

#include "yonet/net.hpp"

namespace yonet {

namespace {

using RefMap = std::map<NodeRef, NodeRef>;

// Remaps axioms, witness keys and thinning edges through `m`; refs absent
// from the map are kept (their region was untouched).
void remap_net_data(const GNet& in, const RefMap& m, GNet& out) {
  auto go = [&](const NodeRef& r) {
    auto it = m.find(r);
    return it == m.end() ? r : it->second;
  };
  for (auto& [p, q] : in.axioms) out.axioms.push_back(mk_edge(go(p), go(q)));
  for (auto& [k, w] : in.witnesses) out.witnesses[go(k)] = w;
  for (auto& [b, t] : in.thinning) out.thinning[go(b)] = go(t);
}

// All leaf positions (atoms and units) of a formula, descending through
// quantifier bodies with a B step.
void leaf_paths_rec(const FormulaPtr& f, const std::string& at,
                    std::vector<std::pair<std::string, FormulaPtr>>& out) {
  if (f->is_leaf()) {
    out.emplace_back(at, f);
    return;
  }
  if (f->is_binary()) {
    leaf_paths_rec(f->left, at + "L", out);
    leaf_paths_rec(f->right, at + "R", out);
  } else {
    leaf_paths_rec(f->body, at + "B", out);
  }
}

std::vector<std::pair<std::string, FormulaPtr>> leaf_paths(const FormulaPtr& f) {
  std::vector<std::pair<std::string, FormulaPtr>> out;
  leaf_paths_rec(f, "", out);
  return out;
}

void quant_paths_rec(const FormulaPtr& f, const std::string& at,
                     std::vector<std::pair<std::string, FormulaPtr>>& out) {
  if (f->is_quant()) {
    out.emplace_back(at, f);
    quant_paths_rec(f->body, at + "B", out);
  } else if (f->is_binary()) {
    quant_paths_rec(f->left, at + "L", out);
    quant_paths_rec(f->right, at + "R", out);
  }
}

std::vector<std::pair<std::string, FormulaPtr>> quant_paths(const FormulaPtr& f) {
  std::vector<std::pair<std::string, FormulaPtr>> out;
  quant_paths_rec(f, "", out);
  return out;
}

FormulaPtr rename_all(const FormulaPtr& f, const std::map<std::string, std::string>& m) {
  auto nm = [&](const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  switch (f->tag) {
    case Conn::Atom: return Formula::atom(nm(f->var));
    case Conn::NegAtom: return Formula::natom(nm(f->var));
    case Conn::Tensor: return Formula::tensor(rename_all(f->left, m), rename_all(f->right, m));
    case Conn::Par: return Formula::par(rename_all(f->left, m), rename_all(f->right, m));
    case Conn::Forall: return Formula::forall(nm(f->var), rename_all(f->body, m));
    case Conn::Exists: return Formula::exists(nm(f->var), rename_all(f->body, m));
    default: return f;
  }
}

std::set<std::string> net_names(const GNet& g) {
  std::set<std::string> names;
  for (auto& f : g.sequent.formulas) {
    auto v = all_vars(f);
    names.insert(v.begin(), v.end());
  }
  for (auto& [k, w] : g.witnesses) {
    (void)k;
    auto v = all_vars(w);
    names.insert(v.begin(), v.end());
  }
  return names;
}

// Identity bundle between the instantiated subtrees at `pos` (carrying B)
// and `neg` (carrying the dual copy, same binder names). Adds axioms for
// atom leaves, thinning edges for unit leaves, and witnesses instantiating
// every exists link with the eigenvariable of its mirror forall link.
void wire_identity(const FormulaPtr& b, const NodeRef& pos, const NodeRef& neg, GNet& g) {
  for (auto& [lp, leaf] : leaf_paths(b)) {
    NodeRef p{pos.root, pos.path + lp};
    NodeRef n{neg.root, neg.path + lp};
    switch (leaf->tag) {
      case Conn::Atom:
      case Conn::NegAtom:
        g.axioms.push_back(mk_edge(p, n));
        break;
      case Conn::One: g.thinning[n] = p; break;   // dual side holds the bot
      case Conn::Bot: g.thinning[p] = n; break;
      default: break;
    }
  }
  for (auto& [qp, q] : quant_paths(b)) {
    // the exists link of the pair takes the forall's eigenvariable
    if (q->tag == Conn::Forall)
      g.witnesses[NodeRef{neg.root, neg.path + qp}] = Formula::atom(q->var);
    else
      g.witnesses[NodeRef{pos.root, pos.path + qp}] = Formula::atom(q->var);
  }
}

}  // namespace

// -------------------------------------------------------------------- join

GNet join_cut(const GNet& g1, int i1, const GNet& g2, int i2) {
  std::set<std::string> used = net_names(g1);
  // freshen g2's binders against g1 (eigenvariables are referenced by name
  // in witness formulas, so the renaming is applied netwide)
  std::set<std::string> g2_free;
  for (auto& f : g2.sequent.formulas) {
    auto fr = free_vars(f);
    g2_free.insert(fr.begin(), fr.end());
  }
  std::map<std::string, std::string> ren;
  for (auto& f : g2.sequent.formulas)
    for (auto& v : bound_vars(f))
      if (used.count(v) && !ren.count(v)) {
        std::set<std::string> avoid = used;
        auto g2n = net_names(g2);
        avoid.insert(g2n.begin(), g2n.end());
        for (auto& [a, b] : ren) { (void)a; avoid.insert(b); }
        ren[v] = fresh_name(v, avoid);
      }

  GNet out;
  out.sequent.formulas = g1.sequent.formulas;
  out.sequent.cuts = g1.sequent.cuts;
  out.axioms = g1.axioms;
  out.witnesses = g1.witnesses;
  out.thinning = g1.thinning;
  int off = static_cast<int>(g1.sequent.formulas.size());
  for (auto& f : g2.sequent.formulas) out.sequent.formulas.push_back(rename_all(f, ren));
  for (auto& [a, b] : g2.sequent.cuts) out.sequent.cuts.emplace_back(a + off, b + off);
  for (auto& [p, q] : g2.axioms)
    out.axioms.push_back(mk_edge(NodeRef{p.root + off, p.path}, NodeRef{q.root + off, q.path}));
  for (auto& [k, w] : g2.witnesses)
    out.witnesses[NodeRef{k.root + off, k.path}] = rename_all(w, ren);
  for (auto& [b, t] : g2.thinning)
    out.thinning[NodeRef{b.root + off, b.path}] = NodeRef{t.root + off, t.path};

  if (!alpha_equal(dual(out.sequent.formulas[i1]), out.sequent.formulas[i2 + off]))
    throw std::runtime_error("join_cut: formulas are not dual");
  out.sequent.cuts.emplace_back(i1, i2 + off);
  return out;
}

// ------------------------------------------------------------------- frame

namespace {

// replace the subtree at `path` of root formula r by wrapper(subtree),
// where the old subtree sits at child `sub` of the wrapper
void wrap_at(std::vector<FormulaPtr>& trees, RefMap& m, int r, const std::string& path,
             char sub, const FormulaPtr& wrapped) {
  trees[r] = replace_at(trees[r], path, wrapped);
  RefMap next;
  for (auto& [from, to] : m) {
    NodeRef t = to;
    if (t.root == r && t.path.compare(0, path.size(), path) == 0)
      t.path = path + sub + t.path.substr(path.size());
    next[from] = t;
  }
  m = next;
}

FormulaPtr delete_quants(const FormulaPtr& f, const std::string& at, RefMap& m, int r) {
  switch (f->tag) {
    case Conn::Forall:
    case Conn::Exists: {
      // children of the quantifier move up one step
      FormulaPtr body = delete_quants(f->body, at + "B", m, r);
      for (auto& [from, to] : m) {
        (void)from;
        if (to.root == r && to.path.compare(0, at.size() + 1, at + "B") == 0)
          to.path = at + to.path.substr(at.size() + 1);
      }
      return body;
    }
    case Conn::Tensor:
      return Formula::tensor(delete_quants(f->left, at + "L", m, r),
                             delete_quants(f->right, at + "R", m, r));
    case Conn::Par:
      return Formula::par(delete_quants(f->left, at + "L", m, r),
                          delete_quants(f->right, at + "R", m, r));
    default:
      return f;
  }
}

FormulaPtr inst_formula_rec(const NetIndex& ix, int id) {
  const NetNode& n = ix.nodes[id];
  switch (n.tag) {
    case Conn::Tensor:
      return Formula::tensor(inst_formula_rec(ix, n.kids[0]), inst_formula_rec(ix, n.kids[1]));
    case Conn::Par:
      return Formula::par(inst_formula_rec(ix, n.kids[0]), inst_formula_rec(ix, n.kids[1]));
    case Conn::Forall:
      return Formula::forall(n.var, inst_formula_rec(ix, n.kids[0]));
    case Conn::Exists:
      // path-shaped instantiated tree: the body slot holds the premise
      return Formula::exists(n.var, inst_formula_rec(ix, n.kids[0]));
    default:
      return n.formula;
  }
}

}  // namespace

GNet frame(const GNet& g) {
  if (!g.sequent.cuts.empty()) throw std::runtime_error("frame expects a cut-free net");
  NetIndex ix(g);

  std::vector<FormulaPtr> trees;
  for (size_t i = 0; i < g.sequent.formulas.size(); i++)
    trees.push_back(inst_formula_rec(ix, ix.roots[i]));

  RefMap m;
  for (auto& n : ix.nodes) m[n.ref] = n.ref;

  std::set<std::string> used;
  for (auto& t : trees) {
    auto v = all_vars(t);
    used.insert(v.begin(), v.end());
  }

  // one fresh axiom per jump
  std::vector<std::pair<NodeRef, NodeRef>> jump_list;
  for (auto& [a, e] : ix.jump_pairs) jump_list.emplace_back(ix.nodes[a].ref, ix.nodes[e].ref);
  std::sort(jump_list.begin(), jump_list.end());

  // fresh leaves are tracked through the map under synthetic keys, since
  // later wraps and the quantifier deletion shift them around
  std::vector<Edge> fresh_axioms;
  int jump_no = 0;
  for (auto& [aref, eref] : jump_list) {
    std::string z = fresh_name("Z", used);
    used.insert(z);
    NodeRef e = m.at(eref);
    wrap_at(trees, m, e.root, e.path, 'R',
            Formula::tensor(Formula::atom(z), subformula_at(trees[e.root], e.path)));
    NodeRef key1{-(2 * jump_no + 1), ""};
    m[key1] = NodeRef{e.root, e.path + "L"};
    NodeRef a = m.at(aref);
    wrap_at(trees, m, a.root, a.path, 'R',
            Formula::par(Formula::natom(z), subformula_at(trees[a.root], a.path)));
    NodeRef key2{-(2 * jump_no + 2), ""};
    m[key2] = NodeRef{a.root, a.path + "L"};
    fresh_axioms.emplace_back(key1, key2);
    jump_no++;
  }

  for (int r = 0; r < static_cast<int>(trees.size()); r++)
    trees[r] = delete_quants(trees[r], "", m, r);

  GNet out;
  out.sequent.formulas = trees;
  GNet tmp = g;
  tmp.witnesses.clear();  // quantifiers are gone
  remap_net_data(tmp, m, out);
  for (auto& e : fresh_axioms) out.axioms.push_back(mk_edge(m.at(e.first), m.at(e.second)));
  return out;
}

// --------------------------------------------------------- sequentialization

namespace {

// connectivity of the all-options graph with selected vertices or the cut
// edge removed; used to locate splitting tensors
struct OptionGraph {
  int n;
  std::vector<std::vector<int>> adj;

  OptionGraph(const GNet& g, const NetIndex& ix, int skip_vertex, int skip_cut)
      : n(static_cast<int>(ix.nodes.size())), adj(n) {
    auto add = [&](int a, int b) {
      if (a == skip_vertex || b == skip_vertex) return;
      adj[a].push_back(b);
      adj[b].push_back(a);
    };
    for (int id = 0; id < n; id++)
      for (int k : ix.nodes[id].kids) add(id, k);
    for (auto& [p, q] : g.axioms) add(ix.id_of(p), ix.id_of(q));
    for (auto& [b, t] : g.thinning) add(ix.id_of(b), ix.id_of(t));
    for (auto& [a, e] : ix.jump_pairs) add(a, e);
    for (int c = 0; c < static_cast<int>(g.sequent.cuts.size()); c++) {
      if (c == skip_cut) continue;
      add(ix.roots[g.sequent.cuts[c].first], ix.roots[g.sequent.cuts[c].second]);
    }
  }

  std::vector<int> components() const {
    std::vector<int> comp(n, -1);
    int c = 0;
    for (int s = 0; s < n; s++) {
      if (comp[s] >= 0) continue;
      std::vector<int> stack{s};
      comp[s] = c;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
          if (comp[w] < 0) {
            comp[w] = c;
            stack.push_back(w);
          }
      }
      c++;
    }
    return comp;
  }
};

struct Stripped {
  GNet net;
  RefMap map;
};

// retarget thinning edges whose target disappears onto `to`
void retarget_thinning(GNet& g, const NodeRef& gone, const NodeRef& to) {
  for (auto& [b, t] : g.thinning)
    if (t == gone) t = to;
}

// remove formula `idx` entirely (it must carry no edges)
GNet drop_root(const GNet& g, int idx, RefMap& m) {
  GNet out;
  for (int i = 0; i < static_cast<int>(g.sequent.formulas.size()); i++)
    if (i != idx) out.sequent.formulas.push_back(g.sequent.formulas[i]);
  auto shift = [&](int r) { return r > idx ? r - 1 : r; };
  for (auto& [a, b] : g.sequent.cuts) out.sequent.cuts.emplace_back(shift(a), shift(b));
  m.clear();
  NetIndex ix(g);
  for (auto& n : ix.nodes)
    if (n.ref.root != idx) m[n.ref] = NodeRef{shift(n.ref.root), n.ref.path};
  GNet tmp = g;
  // strip data belonging to the removed root
  tmp.axioms.erase(std::remove_if(tmp.axioms.begin(), tmp.axioms.end(),
                                  [&](const Edge& e) { return e.first.root == idx || e.second.root == idx; }),
                   tmp.axioms.end());
  for (auto it = tmp.witnesses.begin(); it != tmp.witnesses.end();)
    it = it->first.root == idx ? tmp.witnesses.erase(it) : std::next(it);
  for (auto it = tmp.thinning.begin(); it != tmp.thinning.end();)
    it = it->first.root == idx ? tmp.thinning.erase(it) : std::next(it);
  remap_net_data(tmp, m, out);
  return out;
}

bool has_incoming_thinning(const GNet& g, const NodeRef& r) {
  for (auto& [b, t] : g.thinning)
    if (t == r && b != r) return true;
  return false;
}

Derivation seq_rec(const GNet& g);

Derivation seq_split(const GNet& g, const NetIndex& ix, bool is_cut, int idx) {
  // idx: tensor conclusion index, or cut index
  int lroot, rroot;
  OptionGraph og(g, ix,
                 is_cut ? -1 : ix.roots[idx],
                 is_cut ? idx : -1);
  auto comp = og.components();
  if (is_cut) {
    lroot = ix.roots[g.sequent.cuts[idx].first];
    rroot = ix.roots[g.sequent.cuts[idx].second];
  } else {
    lroot = ix.nodes[ix.roots[idx]].kids[0];
    rroot = ix.nodes[ix.roots[idx]].kids[1];
  }
  if (comp[lroot] == comp[rroot]) throw NotSequentializable("tensor does not split");

  Derivation d;
  d.rule = is_cut ? Rule::Cut : Rule::Tensor;
  d.conclusions = g.sequent.formulas;
  d.a = is_cut ? -1 : idx;

  GNet left, right;
  RefMap lmap, rmap;
  auto side_of = [&](int root_id) { return comp[root_id] == comp[lroot] ? 0 : 1; };

  // distribute conclusions; the two premises become new first conclusions
  if (is_cut) {
    left.sequent.formulas.push_back(g.sequent.formulas[g.sequent.cuts[idx].first]);
    right.sequent.formulas.push_back(g.sequent.formulas[g.sequent.cuts[idx].second]);
    d.left_map.push_back(g.sequent.cuts[idx].first);
    d.right_map.push_back(g.sequent.cuts[idx].second);
  } else {
    left.sequent.formulas.push_back(g.sequent.formulas[idx]->left);
    right.sequent.formulas.push_back(g.sequent.formulas[idx]->right);
    d.left_map.push_back(-1);
    d.right_map.push_back(-1);
  }

  for (int i = 0; i < static_cast<int>(g.sequent.formulas.size()); i++) {
    bool principal = is_cut ? (i == g.sequent.cuts[idx].first || i == g.sequent.cuts[idx].second)
                            : i == idx;
    if (principal) continue;
    if (side_of(ix.roots[i]) == 0) {
      lmap[NodeRef{i, ""}] = NodeRef{static_cast<int>(left.sequent.formulas.size()), ""};
      d.left_map.push_back(i);
      left.sequent.formulas.push_back(g.sequent.formulas[i]);
    } else {
      rmap[NodeRef{i, ""}] = NodeRef{static_cast<int>(right.sequent.formulas.size()), ""};
      d.right_map.push_back(i);
      right.sequent.formulas.push_back(g.sequent.formulas[i]);
    }
  }
  for (auto& [a, b] : g.sequent.cuts) {
    if (is_cut && a == g.sequent.cuts[idx].first && b == g.sequent.cuts[idx].second) continue;
    if (side_of(ix.roots[a]) == 0)
      left.sequent.cuts.emplace_back(lmap.at(NodeRef{a, ""}).root, lmap.at(NodeRef{b, ""}).root);
    else
      right.sequent.cuts.emplace_back(rmap.at(NodeRef{a, ""}).root, rmap.at(NodeRef{b, ""}).root);
  }

  auto place = [&](const NodeRef& r) -> std::pair<int, NodeRef> {
    if (!is_cut && r.root == idx) {
      // inside one of the premises of the split tensor
      if (r.path.size() >= 1 && r.path[0] == 'L') return {0, NodeRef{0, r.path.substr(1)}};
      if (r.path.size() >= 1 && r.path[0] == 'R') return {1, NodeRef{0, r.path.substr(1)}};
      throw NotSequentializable("edge at the split tensor");
    }
    if (is_cut && (r.root == g.sequent.cuts[idx].first || r.root == g.sequent.cuts[idx].second)) {
      bool l = r.root == g.sequent.cuts[idx].first;
      return {l ? 0 : 1, NodeRef{0, r.path}};
    }
    int side = side_of(ix.roots[r.root]);
    auto& mp = side == 0 ? lmap : rmap;
    return {side, NodeRef{mp.at(NodeRef{r.root, ""}).root, r.path}};
  };

  for (auto& [p, q] : g.axioms) {
    auto [s1, p1] = place(p);
    auto [s2, p2] = place(q);
    if (s1 != s2) throw NotSequentializable("axiom crosses the split");
    (s1 == 0 ? left : right).axioms.push_back(mk_edge(p1, p2));
  }
  for (auto& [k, w] : g.witnesses) {
    auto [s, kk] = place(k);
    (s == 0 ? left : right).witnesses[kk] = w;
  }
  for (auto& [b, t] : g.thinning) {
    auto [s1, b1] = place(b);
    NodeRef tt = t;
    if (!is_cut && t.root == idx && t.path.empty()) tt = NodeRef{idx, "L"};  // node vanished
    auto [s2, t1] = place(tt);
    if (s1 != s2) throw NotSequentializable("thinning crosses the split");
    (s1 == 0 ? left : right).thinning[b1] = t1;
  }

  d.kids.push_back(std::make_shared<Derivation>(seq_rec(left)));
  d.kids.push_back(std::make_shared<Derivation>(seq_rec(right)));
  return d;
}

Derivation seq_rec(const GNet& g) {
  NetIndex ix(g);
  int nconc = static_cast<int>(g.sequent.formulas.size());

  // terminal cases
  if (g.sequent.cuts.empty() && nconc == 2 && g.sequent.formulas[0]->is_atom() &&
      g.sequent.formulas[1]->is_atom()) {
    Derivation d;
    d.rule = Rule::Ax;
    d.conclusions = g.sequent.formulas;
    return d;
  }
  if (g.sequent.cuts.empty() && nconc == 1 && g.sequent.formulas[0]->tag == Conn::One) {
    Derivation d;
    d.rule = Rule::One;
    d.conclusions = g.sequent.formulas;
    return d;
  }

  // negative phase: bot, par and forall conclusions come off immediately
  for (int i = 0; i < nconc; i++) {
    if (g.sequent.is_cut_formula(i)) continue;
    const FormulaPtr& f = g.sequent.formulas[i];
    if (f->tag == Conn::Bot && !has_incoming_thinning(g, NodeRef{i, ""})) {
      Derivation d;
      d.rule = Rule::Bot;
      d.conclusions = g.sequent.formulas;
      d.a = i;
      RefMap m;
      GNet rest = drop_root(g, i, m);
      NodeRef t = g.thinning.at(NodeRef{i, ""});
      d.bot_target = m.count(t) ? m.at(t) : t;
      d.kids.push_back(std::make_shared<Derivation>(seq_rec(rest)));
      return d;
    }
  }
  for (int i = 0; i < nconc; i++) {
    if (g.sequent.is_cut_formula(i)) continue;
    const FormulaPtr& f = g.sequent.formulas[i];
    if (f->tag == Conn::Par) {
      GNet child = g;
      child.sequent.formulas[i] = f->left;
      child.sequent.formulas.push_back(f->right);
      int last = static_cast<int>(child.sequent.formulas.size()) - 1;
      RefMap m;
      NetIndex cur(g);
      for (auto& n : cur.nodes) {
        if (n.ref.root != i) continue;
        if (n.ref.path.empty()) continue;
        if (n.ref.path[0] == 'L') m[n.ref] = NodeRef{i, n.ref.path.substr(1)};
        else m[n.ref] = NodeRef{last, n.ref.path.substr(1)};
      }
      GNet out;
      out.sequent = child.sequent;
      retarget_thinning(child, NodeRef{i, ""}, NodeRef{i, "L"});
      remap_net_data(child, m, out);
      Derivation d;
      d.rule = Rule::Par;
      d.conclusions = g.sequent.formulas;
      d.a = i;
      d.kids.push_back(std::make_shared<Derivation>(seq_rec(out)));
      return d;
    }
    if (f->tag == Conn::Forall) {
      GNet child = g;
      child.sequent.formulas[i] = f->body;
      RefMap m;
      NetIndex cur(g);
      for (auto& n : cur.nodes)
        if (n.ref.root == i && !n.ref.path.empty())
          m[n.ref] = NodeRef{i, n.ref.path.substr(1)};
      GNet out;
      out.sequent = child.sequent;
      retarget_thinning(child, NodeRef{i, ""}, NodeRef{i, "B"});
      remap_net_data(child, m, out);
      Derivation d;
      d.rule = Rule::Forall;
      d.conclusions = g.sequent.formulas;
      d.a = i;
      d.eigen = f->var;
      d.kids.push_back(std::make_shared<Derivation>(seq_rec(out)));
      return d;
    }
  }

  // exists conclusions without incoming jumps
  std::set<int> jumped;
  for (auto& [a, e] : ix.jump_pairs) {
    (void)a;
    jumped.insert(e);
  }
  for (int i = 0; i < nconc; i++) {
    if (g.sequent.is_cut_formula(i)) continue;
    const FormulaPtr& f = g.sequent.formulas[i];
    if (f->tag != Conn::Exists || jumped.count(ix.roots[i])) continue;
    FormulaPtr wit = g.witnesses.at(NodeRef{i, ""});
    GNet child = g;
    child.sequent.formulas[i] = substitute(f->body, f->var, wit);
    child.witnesses.erase(NodeRef{i, ""});
    RefMap m;
    NetIndex cur(g);
    for (auto& n : cur.nodes)
      if (n.ref.root == i && !n.ref.path.empty())
        m[n.ref] = NodeRef{i, n.ref.path.substr(1)};
    GNet out;
    out.sequent = child.sequent;
    retarget_thinning(child, NodeRef{i, ""}, NodeRef{i, "B"});
    remap_net_data(child, m, out);
    Derivation d;
    d.rule = Rule::Exists;
    d.conclusions = g.sequent.formulas;
    d.a = i;
    d.witness = wit;
    d.kids.push_back(std::make_shared<Derivation>(seq_rec(out)));
    return d;
  }

  // splitting phase
  for (int i = 0; i < nconc; i++) {
    if (g.sequent.is_cut_formula(i)) continue;
    if (g.sequent.formulas[i]->tag != Conn::Tensor) continue;
    OptionGraph og(g, ix, ix.roots[i], -1);
    auto comp = og.components();
    if (comp[ix.nodes[ix.roots[i]].kids[0]] != comp[ix.nodes[ix.roots[i]].kids[1]])
      return seq_split(g, ix, false, i);
  }
  for (int c = 0; c < static_cast<int>(g.sequent.cuts.size()); c++) {
    OptionGraph og(g, ix, -1, c);
    auto comp = og.components();
    if (comp[ix.roots[g.sequent.cuts[c].first]] != comp[ix.roots[g.sequent.cuts[c].second]])
      return seq_split(g, ix, true, c);
  }
  throw NotSequentializable("no removable link and no splitting tensor");
}

}  // namespace

Derivation sequentialize(const GNet& g) {
  validate_structure(g);
  return seq_rec(g);
}

GNet net_of_derivation(const Derivation& d) {
  switch (d.rule) {
    case Rule::Ax: {
      GNet g;
      g.sequent.formulas = d.conclusions;
      g.axioms.push_back(mk_edge(NodeRef{0, ""}, NodeRef{1, ""}));
      return g;
    }
    case Rule::One: {
      GNet g;
      g.sequent.formulas = d.conclusions;
      return g;
    }
    case Rule::Bot: {
      GNet child = net_of_derivation(*d.kids[0]);
      GNet g;
      g.sequent.formulas = d.conclusions;
      g.sequent.cuts = child.sequent.cuts;
      for (auto& [a, b] : g.sequent.cuts) {
        if (a >= d.a) a++;
        if (b >= d.a) b++;
      }
      RefMap m;
      NetIndex ix(child);
      for (auto& n : ix.nodes)
        m[n.ref] = NodeRef{n.ref.root >= d.a ? n.ref.root + 1 : n.ref.root, n.ref.path};
      remap_net_data(child, m, g);
      NodeRef t = d.bot_target;
      t = m.count(t) ? m.at(t) : t;
      g.thinning[NodeRef{d.a, ""}] = t;
      return g;
    }
    case Rule::Par:
    case Rule::Forall:
    case Rule::Exists: {
      GNet child = net_of_derivation(*d.kids[0]);
      GNet g;
      g.sequent.formulas = d.conclusions;
      g.sequent.cuts = child.sequent.cuts;
      RefMap m;
      NetIndex ix(child);
      int last = static_cast<int>(child.sequent.formulas.size()) - 1;
      for (auto& n : ix.nodes) {
        if (d.rule == Rule::Par) {
          if (n.ref.root == d.a) m[n.ref] = NodeRef{d.a, "L" + n.ref.path};
          else if (n.ref.root == last) m[n.ref] = NodeRef{d.a, "R" + n.ref.path};
          else m[n.ref] = n.ref;
        } else {
          m[n.ref] = n.ref.root == d.a ? NodeRef{d.a, "B" + n.ref.path} : n.ref;
        }
      }
      remap_net_data(child, m, g);
      if (d.rule == Rule::Exists) g.witnesses[NodeRef{d.a, ""}] = d.witness;
      return g;
    }
    case Rule::Tensor:
    case Rule::Cut: {
      GNet l = net_of_derivation(*d.kids[0]);
      GNet r = net_of_derivation(*d.kids[1]);
      GNet g;
      g.sequent.formulas = d.conclusions;
      auto lift = [&](const GNet& side, const std::vector<int>& where, bool leftside) {
        RefMap m;
        NetIndex ix(side);
        for (auto& n : ix.nodes) {
          int parent_idx = where[n.ref.root];
          if (parent_idx == -1) {
            // premise of the split tensor
            m[n.ref] = NodeRef{d.a, (leftside ? "L" : "R") + n.ref.path};
          } else {
            m[n.ref] = NodeRef{parent_idx, n.ref.path};
          }
        }
        GNet tmp = side;
        remap_net_data(tmp, m, g);
        for (auto& [a, b] : side.sequent.cuts)
          g.sequent.cuts.emplace_back(m.at(NodeRef{a, ""}).root, m.at(NodeRef{b, ""}).root);
      };
      lift(l, d.left_map, true);
      lift(r, d.right_map, false);
      if (d.rule == Rule::Cut)
        g.sequent.cuts.emplace_back(d.left_map[0], d.right_map[0]);
      return g;
    }
  }
  throw std::runtime_error("bad derivation");
}

// ----------------------------------------------------------- cut reduction

namespace {

GNet reduce_axiom_cut(const GNet& g, int ci) {
  auto [i, j] = g.sequent.cuts[ci];
  NodeRef ri{i, ""}, rj{j, ""};
  NodeRef u, v;
  bool fu = false, fv = false;
  for (auto& [p, q] : g.axioms) {
    if (p == ri || q == ri) { u = p == ri ? q : p; fu = true; }
    if (p == rj || q == rj) { v = p == rj ? q : p; fv = true; }
  }
  if (!fu || !fv) throw std::runtime_error("axiom cut without partner edges");
  if (u == rj || v == ri) throw std::runtime_error("cyclic axiom cut");

  GNet tmp = g;
  tmp.sequent.cuts.erase(tmp.sequent.cuts.begin() + ci);
  tmp.axioms.erase(std::remove_if(tmp.axioms.begin(), tmp.axioms.end(),
                                  [&](const Edge& e) {
                                    return e.first == ri || e.second == ri || e.first == rj ||
                                           e.second == rj;
                                  }),
                   tmp.axioms.end());
  tmp.axioms.push_back(mk_edge(u, v));
  retarget_thinning(tmp, ri, u);
  retarget_thinning(tmp, rj, u);

  // drop the two cut formulas
  int a = std::min(i, j), b = std::max(i, j);
  GNet out;
  for (int k = 0; k < static_cast<int>(tmp.sequent.formulas.size()); k++)
    if (k != a && k != b) out.sequent.formulas.push_back(tmp.sequent.formulas[k]);
  auto shift = [&](int r) { return r - (r > a) - (r > b); };
  for (auto& [x, y] : tmp.sequent.cuts) out.sequent.cuts.emplace_back(shift(x), shift(y));
  RefMap m;
  NetIndex ix(tmp);
  for (auto& n : ix.nodes)
    if (n.ref.root != a && n.ref.root != b)
      m[n.ref] = NodeRef{shift(n.ref.root), n.ref.path};
  remap_net_data(tmp, m, out);
  return out;
}

GNet reduce_unit_cut(const GNet& g, int ci) {
  auto [i, j] = g.sequent.cuts[ci];
  if (g.sequent.formulas[i]->tag != Conn::One) std::swap(i, j);
  NodeRef ri{i, ""}, rj{j, ""};
  NodeRef target = g.thinning.at(rj);
  if (target == ri) throw std::runtime_error("unit cut attached to itself");

  GNet tmp = g;
  tmp.sequent.cuts.erase(std::remove(tmp.sequent.cuts.begin(), tmp.sequent.cuts.end(),
                                     g.sequent.cuts[ci]),
                         tmp.sequent.cuts.end());
  tmp.thinning.erase(rj);
  retarget_thinning(tmp, ri, target);
  retarget_thinning(tmp, rj, target);

  int a = std::min(i, j), b = std::max(i, j);
  GNet out;
  for (int k = 0; k < static_cast<int>(tmp.sequent.formulas.size()); k++)
    if (k != a && k != b) out.sequent.formulas.push_back(tmp.sequent.formulas[k]);
  auto shift = [&](int r) { return r - (r > a) - (r > b); };
  for (auto& [x, y] : tmp.sequent.cuts) out.sequent.cuts.emplace_back(shift(x), shift(y));
  RefMap m;
  NetIndex ix(tmp);
  for (auto& n : ix.nodes)
    if (n.ref.root != a && n.ref.root != b)
      m[n.ref] = NodeRef{shift(n.ref.root), n.ref.path};
  remap_net_data(tmp, m, out);
  return out;
}

GNet reduce_mult_cut(const GNet& g, int ci) {
  auto [i, j] = g.sequent.cuts[ci];
  if (g.sequent.formulas[i]->tag != Conn::Tensor) std::swap(i, j);
  const FormulaPtr& ft = g.sequent.formulas[i];
  const FormulaPtr& fp = g.sequent.formulas[j];

  GNet out;
  out.sequent.formulas = g.sequent.formulas;
  out.sequent.formulas[i] = ft->left;
  out.sequent.formulas[j] = fp->left;
  int n1 = static_cast<int>(out.sequent.formulas.size());
  out.sequent.formulas.push_back(ft->right);
  out.sequent.formulas.push_back(fp->right);
  for (int c = 0; c < static_cast<int>(g.sequent.cuts.size()); c++)
    if (c != ci) out.sequent.cuts.push_back(g.sequent.cuts[c]);
  out.sequent.cuts.emplace_back(i, j);
  out.sequent.cuts.emplace_back(n1, n1 + 1);

  GNet tmp = g;
  retarget_thinning(tmp, NodeRef{i, ""}, NodeRef{i, "L"});
  retarget_thinning(tmp, NodeRef{j, ""}, NodeRef{j, "L"});
  RefMap m;
  NetIndex ix(g);
  for (auto& n : ix.nodes) {
    if ((n.ref.root == i || n.ref.root == j) && !n.ref.path.empty()) {
      int stay = n.ref.root;
      int moved = n.ref.root == i ? n1 : n1 + 1;
      m[n.ref] = n.ref.path[0] == 'L' ? NodeRef{stay, n.ref.path.substr(1)}
                                      : NodeRef{moved, n.ref.path.substr(1)};
    }
  }
  remap_net_data(tmp, m, out);
  return out;
}

GNet reduce_quant_cut(const GNet& g, int ci) {
  auto [i, j] = g.sequent.cuts[ci];
  if (g.sequent.formulas[i]->tag != Conn::Forall) std::swap(i, j);
  const FormulaPtr& fa = g.sequent.formulas[i];  // all X.A
  const std::string& x = fa->var;
  FormulaPtr wit = g.witnesses.at(NodeRef{j, ""});

  NetIndex ix(g);

  // occurrences of the eigenvariable: leaves of the forall premise, paired
  // up by axioms
  std::vector<std::pair<NodeRef, NodeRef>> xpairs;
  for (auto& [p, q] : g.axioms) {
    const NetNode* a = &ix.at(p);
    if (a->var == x && (a->tag == Conn::Atom || a->tag == Conn::NegAtom)) {
      NodeRef pos = a->tag == Conn::Atom ? p : q;
      NodeRef neg = a->tag == Conn::Atom ? q : p;
      xpairs.emplace_back(pos, neg);
    }
  }

  bool wit_quantified = !bound_vars(wit).empty();
  bool x_in_witnesses = false;
  for (auto& [k, w] : g.witnesses)
    if (k != NodeRef{j, ""} && occurs_free(w, x)) x_in_witnesses = true;
  if (wit_quantified && x_in_witnesses)
    throw std::runtime_error("quantified witness combined with eigenvariable jumps");

  GNet out;
  out.sequent.formulas = g.sequent.formulas;
  for (int c = 0; c < static_cast<int>(g.sequent.cuts.size()); c++)
    if (c != ci) out.sequent.cuts.push_back(g.sequent.cuts[c]);
  out.sequent.cuts.emplace_back(i, j);

  // forall side: unfold to the instantiated premise
  std::set<std::string> used = net_names(g);
  std::map<std::string, FormulaPtr> copy_at;  // positive x-leaf relative path -> copy
  FormulaPtr body = fa->body;
  if (!wit_quantified) {
    body = substitute(body, x, wit);
  } else {
    for (auto& [pos, neg] : xpairs) {
      (void)neg;
      FormulaPtr bk = cleaned_formula(wit, used);
      copy_at[pos.path] = bk;
    }
  }
  out.sequent.formulas[j] = substitute(g.sequent.formulas[j]->body,
                                       g.sequent.formulas[j]->var, wit);

  RefMap m;
  for (auto& n : ix.nodes) {
    if (n.ref.root == i) {
      if (n.ref.path.empty()) continue;
      m[n.ref] = NodeRef{i, n.ref.path.substr(1)};
    } else if (n.ref.root == j) {
      if (n.ref.path.empty()) continue;
      m[n.ref] = NodeRef{j, n.ref.path.substr(1)};
    }
  }

  GNet tmp = g;
  tmp.witnesses.erase(NodeRef{j, ""});
  // the witness may mention the eigenvariable of an outer link; after the
  // step every witness formula sees the substitution as well
  for (auto& [k, w] : tmp.witnesses)
    if (occurs_free(w, x)) w = substitute(w, x, wit);
  // axioms on the eigenvariable turn into identity bundles between the
  // substituted copies
  tmp.axioms.erase(std::remove_if(tmp.axioms.begin(), tmp.axioms.end(),
                                  [&](const Edge& e) {
                                    const NetNode& n = ix.at(e.first);
                                    return n.var == x && (n.tag == Conn::Atom || n.tag == Conn::NegAtom);
                                  }),
                   tmp.axioms.end());
  retarget_thinning(tmp, NodeRef{i, ""}, NodeRef{i, "B"});
  retarget_thinning(tmp, NodeRef{j, ""}, NodeRef{j, "B"});
  remap_net_data(tmp, m, out);

  if (!wit_quantified) {
    out.sequent.formulas[i] = body;
    for (auto& [pos, neg] : xpairs) {
      NodeRef p = m.count(pos) ? m.at(pos) : pos;
      NodeRef n = m.count(neg) ? m.at(neg) : neg;
      wire_identity(wit, p, n, out);
    }
  } else {
    // rebuild the body with the per-pair copies
    FormulaPtr nb = fa->body;
    for (auto& [pos, neg] : xpairs) {
      std::string prel = pos.path.substr(1);
      std::string nrel = neg.path.substr(1);
      FormulaPtr bk = copy_at.at(pos.path);
      nb = replace_at(nb, prel, bk);
      nb = replace_at(nb, nrel, dual(bk));
      NodeRef p = m.count(pos) ? m.at(pos) : pos;
      NodeRef n = m.count(neg) ? m.at(neg) : neg;
      wire_identity(bk, p, n, out);
    }
    out.sequent.formulas[i] = nb;
  }
  return out;
}

}  // namespace

std::optional<GNet> gnet_reduce_step(const GNet& g) {
  if (g.sequent.cuts.empty()) return std::nullopt;
  auto [i, j] = g.sequent.cuts[0];
  Conn ti = g.sequent.formulas[i]->tag;
  Conn tj = g.sequent.formulas[j]->tag;
  if ((ti == Conn::Atom && tj == Conn::NegAtom) || (ti == Conn::NegAtom && tj == Conn::Atom))
    return reduce_axiom_cut(g, 0);
  if ((ti == Conn::One && tj == Conn::Bot) || (ti == Conn::Bot && tj == Conn::One))
    return reduce_unit_cut(g, 0);
  if ((ti == Conn::Tensor && tj == Conn::Par) || (ti == Conn::Par && tj == Conn::Tensor))
    return reduce_mult_cut(g, 0);
  if ((ti == Conn::Forall && tj == Conn::Exists) || (ti == Conn::Exists && tj == Conn::Forall))
    return reduce_quant_cut(g, 0);
  throw std::runtime_error("malformed cut pair");
}

GNet gnet_reduce(const GNet& g) {
  GNet cur = g;
  for (int steps = 0; steps < 100000; steps++) {
    auto next = gnet_reduce_step(cur);
    if (!next) return cur;
    cur = *next;
  }
  throw std::runtime_error("cut elimination did not terminate");
}

// ---------------------------------------------------------- Yoneda templates

namespace {

struct YoParts {
  FormulaPtr quant;    // all X.A, cleaned
  FormulaPtr body;     // A
  YonedaDecomposition dec;
  FormulaPtr trans;    // D[L[1]]
  std::string hole;    // hole path relative to the D part (body->right)
  std::string slot;    // slot path relative to the spine (body->left)
};

YoParts yo_parts(const FormulaPtr& a) {
  if (a->tag != Conn::Forall) throw NotInFragment("yo nets expect a universal formula");
  Sequent s;
  s.formulas = {a};
  FormulaPtr q = cleaned(s).formulas[0];
  auto dec = yoneda_decompose(q);
  if (!dec) throw NotInFragment("not Yoneda: " + render(a));
  if (!bound_vars(q->body).empty())
    throw NotInFragment("yo template needs quantifier-free components: " + render(a));
  YoParts p;
  p.quant = q;
  p.body = q->body;
  p.dec = *dec;
  p.trans = yoneda_translate_formula(q);
  p.hole = dec->hole_path.substr(1);
  p.slot = dec->slot_path.substr(1);
  return p;
}

// mirror axioms between dual quantifier-free trees at two positions
void mirror_edges(const FormulaPtr& shape, const NodeRef& a, const NodeRef& b, GNet& g,
                  const std::string& skip = "\x01") {
  for (auto& [lp, leaf] : leaf_paths(shape)) {
    if (lp.compare(0, skip.size(), skip) == 0) continue;
    if (leaf->is_atom())
      g.axioms.push_back(mk_edge(NodeRef{a.root, a.path + lp}, NodeRef{b.root, b.path + lp}));
  }
}

}  // namespace

GNet yo1_net(const FormulaPtr& a) {
  YoParts p = yo_parts(a);
  GNet g;
  g.sequent.formulas = {dual(p.trans), p.quant};

  FormulaPtr dpart = p.body->right;
  FormulaPtr spine = p.body->left;

  // D context: conclusion 0 mirrors the D part of the body, holes excluded
  mirror_edges(dpart, NodeRef{0, ""}, NodeRef{1, "BR"}, g, p.hole);
  // side formulas: the translated hole content mirrors the spine at BL
  mirror_edges(spine, NodeRef{0, p.hole}, NodeRef{1, "BL"}, g, p.slot);
  // eigenvariable axiom inside all X.A
  g.axioms.push_back(mk_edge(NodeRef{1, "BL" + p.slot}, NodeRef{1, "BR" + p.hole}));
  // the bot of the translated side attaches to the spine of A
  g.thinning[NodeRef{0, p.hole + p.slot}] = NodeRef{1, "BL"};
  return g;
}

GNet yo2_net(const FormulaPtr& a) {
  YoParts p = yo_parts(a);
  GNet g;
  FormulaPtr edual = dual(p.quant);  // ex X.~A
  // keep the bound variable distinct from the forall side
  std::set<std::string> used = all_vars(p.quant);
  {
    Sequent s;
    s.formulas = {edual};
    std::set<std::string> u2 = used;
    edual = cleaned_formula(edual, u2);
  }
  g.sequent.formulas = {p.trans, edual};

  FormulaPtr content = subformula_at(p.trans, p.hole);  // L[1]
  g.witnesses[NodeRef{1, ""}] = content;

  FormulaPtr dpart = p.body->right;
  FormulaPtr spine = p.body->left;

  // factor 1 of the premise: the dual spine against its witness copy
  mirror_edges(spine, NodeRef{1, "BL" + p.slot}, NodeRef{1, "BL"}, g, p.slot);
  // D contexts: conclusion 0 against factor 2
  mirror_edges(dpart, NodeRef{0, ""}, NodeRef{1, "BR"}, g, p.hole);
  // hole contents: conclusion 0's copy against the premise's dual copy
  mirror_edges(spine, NodeRef{0, p.hole}, NodeRef{1, "BR" + p.hole}, g, p.slot);
  // the bot inside the premise attaches to the one of conclusion 0
  g.thinning[NodeRef{1, "BR" + p.hole + p.slot}] = NodeRef{0, p.hole + p.slot};
  return g;
}

}  // namespace yonet
