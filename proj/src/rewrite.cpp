#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "yonet/rewrite.hpp"

namespace yonet {

namespace {

std::string witness_key(const ELinking& l) {
  std::ostringstream os;
  for (auto& [k, t] : l.witness) os << k.str() << ">" << t.str() << ";";
  return os.str();
}

void all_nodes_rec(const FormulaPtr& f, NodeRef at, std::vector<std::pair<NodeRef, FormulaPtr>>& out) {
  out.emplace_back(at, f);
  if (f->is_binary()) {
    all_nodes_rec(f->left, NodeRef{at.root, at.path + "L"}, out);
    all_nodes_rec(f->right, NodeRef{at.root, at.path + "R"}, out);
  } else if (f->is_quant()) {
    all_nodes_rec(f->body, NodeRef{at.root, at.path + "B"}, out);
  }
}

std::vector<std::pair<NodeRef, FormulaPtr>> all_nodes(const Sequent& s) {
  std::vector<std::pair<NodeRef, FormulaPtr>> out;
  for (int i = 0; i < static_cast<int>(s.formulas.size()); i++)
    all_nodes_rec(s.formulas[i], NodeRef{i, ""}, out);
  return out;
}

bool exists_free(const FormulaPtr& f) {
  if (f->tag == Conn::Exists) return false;
  if (f->is_binary()) return exists_free(f->left) && exists_free(f->right);
  if (f->is_quant()) return exists_free(f->body);
  return true;
}

// expansion handles targets that are existential-free or the closed unit
bool admissible_target(const FormulaPtr& f) {
  return exists_free(f) || is_unit_exists(f);
}

bool same_sequent(const ELinking& a, const ELinking& b) {
  if (a.sequent.formulas.size() != b.sequent.formulas.size()) return false;
  for (size_t i = 0; i < a.sequent.formulas.size(); i++)
    if (!alpha_equal(a.sequent.formulas[i], b.sequent.formulas[i])) return false;
  return a.sequent.cuts == b.sequent.cuts;
}

std::vector<Edge> norm_edges(const ELinking& l) {
  std::vector<Edge> e = l.edges;
  for (auto& x : e) x = mk_edge(x.first, x.second);
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

ELinking apply_move(const ELinking& l, const Move& m) {
  ELinking out = l;
  if (m.kind == Move::Kind::Retarget) {
    out.witness[m.coedge] = m.to;
  } else {
    out.witness[m.other] = l.witness.at(m.coedge);
    out.witness[m.coedge] = m.to;
  }
  return out;
}

std::vector<Move> all_moves(const ELinking& l) {
  std::vector<Move> out;
  auto cs = coedges(l.sequent);
  std::set<NodeRef> occupied;
  for (auto& [k, t] : l.witness) {
    (void)k;
    occupied.insert(t);
  }
  auto nodes = all_nodes(l.sequent);

  // moving one witness edge onto a free node
  for (auto& c : cs) {
    NodeRef cur = l.witness.at(c.exists);
    for (auto& [r, f] : nodes) {
      if (r == cur || occupied.count(r)) continue;
      if (!admissible_target(f)) continue;
      out.push_back(Move{Move::Kind::Retarget, c.exists, r, NodeRef{}});
    }
  }

  // switching two consecutive witness edges: W(c1) lies in c2, afterwards c2
  // points where c1 did and c1 points at a leaf of... the moved chain turns
  // around: W'(c2) := W(c1)'s old target is taken by c2's former role.
  for (auto& c1 : cs) {
    NodeRef t1 = l.witness.at(c1.exists);
    for (auto& c2 : cs) {
      if (c1.exists == c2.exists) continue;
      if (t1 != c2.pos && t1 != c2.neg) continue;
      for (const NodeRef& leaf : {c1.pos, c1.neg}) {
        // W'(c1) := W(c2), W'(c2) := leaf of c1
        Move m{Move::Kind::Swap, c1.exists, leaf, c2.exists};
        ELinking trial = apply_move(l, m);
        std::set<NodeRef> tg;
        bool inj = true;
        for (auto& [k, t] : trial.witness) {
          (void)k;
          inj = inj && tg.insert(t).second;
        }
        if (inj) out.push_back(m);
      }
    }
  }
  return out;
}

std::vector<ELinking> neighbors(const ELinking& l, long cap) {
  std::vector<ELinking> out;
  std::set<std::string> seen;
  for (auto& m : all_moves(l)) {
    ELinking cand = apply_move(l, m);
    std::string key = witness_key(cand);
    if (seen.count(key)) continue;
    if (is_correct_elinking(cand, cap)) {
      seen.insert(key);
      out.push_back(std::move(cand));
    }
  }
  return out;
}

namespace {

// breadth-first closure of the class of l, stopping early when `goal`
// returns true; returns the matching linking or nullopt on exhaustion
std::optional<ELinking> bfs_class(const ELinking& l, long max_states,
                                  const std::function<bool(const ELinking&)>& goal,
                                  std::map<std::string, ELinking>* clazz = nullptr) {
  std::deque<ELinking> queue{l};
  std::set<std::string> seen{witness_key(l)};
  if (goal(l)) return l;
  while (!queue.empty()) {
    ELinking cur = queue.front();
    queue.pop_front();
    if (clazz) (*clazz)[witness_key(cur)] = cur;
    for (auto& nb : neighbors(cur)) {
      std::string key = witness_key(nb);
      if (!seen.insert(key).second) continue;
      if (goal(nb)) return nb;
      if (static_cast<long>(seen.size()) > max_states)
        throw std::runtime_error("equivalence search exceeded the state cap");
      queue.push_back(nb);
    }
  }
  if (clazz)
    for (auto& q : queue) (*clazz)[witness_key(q)] = q;
  return std::nullopt;
}

}  // namespace

bool equivalent(const ELinking& l1, const ELinking& l2, long max_states) {
  if (!same_sequent(l1, l2))
    throw SequentMismatch("equivalence compares linkings over one sequent");
  if (norm_edges(l1) != norm_edges(l2)) return false;
  std::string target = witness_key(l2);
  auto hit = bfs_class(l1, max_states,
                       [&](const ELinking& x) { return witness_key(x) == target; });
  return hit.has_value();
}

ELinking canonicalize(const ELinking& l, long max_states) {
  std::map<std::string, ELinking> clazz;
  bfs_class(l, max_states, [](const ELinking&) { return false; }, &clazz);
  clazz[witness_key(l)] = l;
  return clazz.begin()->second;
}

bool is_ready(const ELinking& l) {
  std::set<int> cut_roots;
  for (auto& [i, j] : l.sequent.cuts) {
    cut_roots.insert(i);
    cut_roots.insert(j);
  }
  for (auto& [k, t] : l.witness) {
    (void)k;
    if (cut_roots.count(t.root)) return false;
  }
  return true;
}

namespace {

// After a cut has been introduced over a copied subtree, the copy's dual in
// the cut is wired leafwise onto a unique node of the original net; moving
// the witness back onto that node undoes the construction exactly.
std::optional<NodeRef> unexpansion_target(const ELinking& l, const NodeRef& cur) {
  // cur points at one member of a cut pair; the mirror member is wired
  // leafwise against the candidate node
  int mirror = -1;
  for (auto& [i, j] : l.sequent.cuts) {
    if (cur.root == i && cur.path.empty()) mirror = j;
    if (cur.root == j && cur.path.empty()) mirror = i;
  }
  if (mirror < 0) return std::nullopt;
  std::map<NodeRef, NodeRef> partner;
  for (auto& [p, q] : l.edges) {
    partner[p] = q;
    partner[q] = p;
  }
  FormulaPtr shape = l.sequent.formulas[mirror];
  std::vector<std::pair<NodeRef, FormulaPtr>> leaves;
  all_nodes_rec(shape, NodeRef{mirror, ""}, leaves);
  std::optional<NodeRef> cand;
  for (auto& [r, f] : leaves) {
    if (!f->is_atom()) continue;
    auto it = partner.find(r);
    if (it == partner.end()) return std::nullopt;  // existential leaf in the copy
    const NodeRef& p = it->second;
    std::string suffix = r.path;  // leaf path within the mirror copy
    if (p.path.size() < suffix.size()) return std::nullopt;
    if (p.path.compare(p.path.size() - suffix.size(), suffix.size(), suffix) != 0)
      return std::nullopt;
    NodeRef base{p.root, p.path.substr(0, p.path.size() - suffix.size())};
    if (cand && !(*cand == base)) return std::nullopt;
    cand = base;
  }
  return cand;
}

std::set<int> cut_root_set(const ELinking& l) {
  std::set<int> out;
  for (auto& [i, j] : l.sequent.cuts) {
    out.insert(i);
    out.insert(j);
  }
  return out;
}

std::set<NodeRef> occupied_set(const ELinking& l) {
  std::set<NodeRef> out;
  for (auto& [k, t] : l.witness) {
    (void)k;
    out.insert(t);
  }
  return out;
}

// Moves one witness edge until its target leaves the cut formulas; the
// path may pass through cut-internal positions, as the bot-existential
// moves of the ready lemma do.
std::optional<ELinking> rewire_off_cuts(const ELinking& l, const NodeRef& ce) {
  auto cuts = cut_root_set(l);
  auto nodes = all_nodes(l.sequent);
  std::deque<ELinking> queue{l};
  std::set<NodeRef> seen{l.witness.at(ce)};
  while (!queue.empty()) {
    ELinking cur = queue.front();
    queue.pop_front();
    auto occ = occupied_set(cur);
    for (auto& [t, f] : nodes) {
      if (seen.count(t) || occ.count(t) || !admissible_target(f)) continue;
      ELinking trial = cur;
      trial.witness[ce] = t;
      if (!is_correct_elinking(trial)) continue;
      seen.insert(t);
      if (!cuts.count(t.root)) return trial;
      queue.push_back(trial);
    }
  }
  return std::nullopt;
}

// widening conclusion attached next to the stuck co-edge
ELinking widen(const ELinking& l, const CoEdge& stuck) {
  ELinking out = l;
  std::set<std::string> used;
  for (auto& f : out.sequent.formulas) {
    auto v = all_vars(f);
    used.insert(v.begin(), v.end());
  }
  std::string y = fresh_name("Y", used);
  out.sequent.formulas.push_back(
      Formula::exists(y, Formula::tensor(Formula::atom(y), Formula::natom(y))));
  int idx = static_cast<int>(out.sequent.formulas.size()) - 1;
  out.auxiliary.push_back(idx);

  auto occ = occupied_set(l);
  for (auto& t : {stuck.neg, stuck.pos}) {
    if (occ.count(t)) continue;
    out.witness[NodeRef{idx, ""}] = t;
    if (is_correct_elinking(out)) return out;
  }
  out.witness.erase(NodeRef{idx, ""});
  out.auxiliary.pop_back();
  out.sequent.formulas.pop_back();
  return l;  // caller detects no progress
}

}  // namespace

ELinking make_ready(const ELinking& l, long max_states) {
  if (is_ready(l)) return l;
  ELinking cur = l;

  // exact un-expansion retargets, undoing the cuts pi-cut introduces
  {
    bool changed = true;
    while (changed && !is_ready(cur)) {
      changed = false;
      auto cuts = cut_root_set(cur);
      auto occ = occupied_set(cur);
      for (auto& [k, t] : cur.witness) {
        if (!cuts.count(t.root)) continue;
        auto back = unexpansion_target(cur, t);
        if (!back || occ.count(*back)) continue;
        ELinking trial = cur;
        trial.witness[k] = *back;
        if (is_correct_elinking(trial)) {
          cur = trial;
          changed = true;
          break;
        }
      }
    }
    if (is_ready(cur)) return cur;
  }

  // per stuck co-edge: a plain retarget when one exists, otherwise the
  // widening choreography: park the witness on the fresh conclusion through
  // a switch of consecutive edges, then rewire the auxiliary outwards
  int guard = 4 * static_cast<int>(cur.witness.size()) + 8;
  while (guard-- > 0) {
    if (is_ready(cur)) return cur;
    auto cuts = cut_root_set(cur);
    std::optional<CoEdge> stuck;
    for (auto& c : coedges(cur.sequent))
      if (cuts.count(cur.witness.at(c.exists).root)) {
        stuck = c;
        break;
      }
    if (!stuck) throw std::runtime_error("make_ready: inconsistent state");

    bool progressed = false;
    if (auto direct = rewire_off_cuts(cur, stuck->exists)) {
      cur = *direct;
      progressed = true;
    }
    if (progressed) continue;

    ELinking wider = widen(cur, *stuck);
    if (wider.sequent.formulas.size() > cur.sequent.formulas.size()) {
      int aux_idx = wider.auxiliary.back();
      auto aux = coedges(wider.sequent);
      CoEdge aux_edge;
      for (auto& c : aux)
        if (c.exists == NodeRef{aux_idx, ""}) aux_edge = c;
      NodeRef cut_target = wider.witness.at(stuck->exists);
      for (auto& leaf : {aux_edge.pos, aux_edge.neg}) {
        // switch the consecutive pair, then lift the parked edge onto the
        // widening conclusion itself
        ELinking swapped = wider;
        swapped.witness[stuck->exists] = leaf;
        swapped.witness[aux_edge.exists] = cut_target;
        if (!is_correct_elinking(swapped)) continue;
        ELinking parked = swapped;
        parked.witness[stuck->exists] = aux_edge.exists;
        if (!is_correct_elinking(parked)) continue;
        if (auto moved = rewire_off_cuts(parked, aux_edge.exists)) {
          cur = *moved;
          progressed = true;
          break;
        }
      }
    }
    if (!progressed) break;
  }
  if (is_ready(cur)) return cur;

  // exhaustive fallback
  int rounds = 2 * static_cast<int>(cur.witness.size()) + 2;
  for (int round = 0; round < rounds; round++) {
    auto hit = bfs_class(cur, max_states, [](const ELinking& x) { return is_ready(x); });
    if (hit) return *hit;
    auto cuts = cut_root_set(cur);
    std::optional<CoEdge> stuck;
    for (auto& c : coedges(cur.sequent))
      if (cuts.count(cur.witness.at(c.exists).root)) {
        stuck = c;
        break;
      }
    if (!stuck) throw std::runtime_error("make_ready: inconsistent state");
    ELinking wider = widen(cur, *stuck);
    if (wider.sequent.formulas.size() == cur.sequent.formulas.size())
      throw std::runtime_error("make_ready: no widening attachment");
    cur = wider;
  }
  throw std::runtime_error("make_ready did not converge");
}

// ------------------------------------------------------------ cut reduction

int s_of(const ELinking& l) {
  int total = 0;
  for (auto& [i, j] : l.sequent.cuts)
    total += s_measure(l.sequent.formulas[i]) + s_measure(l.sequent.formulas[j]) + 1;
  return total;
}

namespace {

using RefRewrite = std::function<std::optional<NodeRef>(const NodeRef&)>;

ELinking rebuild(const ELinking& l, const std::vector<FormulaPtr>& formulas,
                 const std::vector<std::pair<int, int>>& cuts, const std::vector<int>& aux,
                 const RefRewrite& rw) {
  ELinking out;
  out.sequent.formulas = formulas;
  out.sequent.cuts = cuts;
  out.auxiliary = aux;
  for (auto& [p, q] : l.edges) {
    auto a = rw(p), b = rw(q);
    if (a.has_value() != b.has_value())
      throw std::runtime_error("cut reduction dropped half an edge");
    if (a) out.edges.push_back(mk_edge(*a, *b));
  }
  for (auto& [k, t] : l.witness) {
    auto kk = rw(k);
    if (!kk) continue;
    auto tt = rw(t);
    if (!tt) throw std::runtime_error("cut reduction dropped a witness target");
    out.witness[*kk] = *tt;
  }
  return out;
}

std::vector<int> shift_aux(const std::vector<int>& aux, int removed_a, int removed_b) {
  std::vector<int> out;
  for (int a : aux) {
    if (a == removed_a || a == removed_b) continue;
    out.push_back(a - (a > removed_a) - (a > removed_b));
  }
  return out;
}

ELinking reduce_axax(const ELinking& l, int ci) {
  auto [i, j] = l.sequent.cuts[ci];
  NodeRef ri{i, ""}, rj{j, ""};
  NodeRef u, v;
  bool fu = false, fv = false;
  for (auto& [p, q] : l.edges) {
    if (p == ri || q == ri) { u = (p == ri) ? q : p; fu = true; }
    if (p == rj || q == rj) { v = (p == rj) ? q : p; fv = true; }
  }
  if (!fu || !fv) throw std::runtime_error("axiom cut without partner edges");
  if (u == rj || v == ri) throw std::runtime_error("closed axiom cut");

  int a = std::min(i, j), b = std::max(i, j);
  std::vector<FormulaPtr> fs;
  for (int k = 0; k < static_cast<int>(l.sequent.formulas.size()); k++)
    if (k != a && k != b) fs.push_back(l.sequent.formulas[k]);
  std::vector<std::pair<int, int>> cuts;
  for (int c = 0; c < static_cast<int>(l.sequent.cuts.size()); c++) {
    if (c == ci) continue;
    auto [x, y] = l.sequent.cuts[c];
    cuts.emplace_back(x - (x > a) - (x > b), y - (y > a) - (y > b));
  }
  ELinking trimmed = l;
  trimmed.edges.erase(std::remove_if(trimmed.edges.begin(), trimmed.edges.end(),
                                     [&](const Edge& e) {
                                       return e.first == ri || e.second == ri || e.first == rj ||
                                              e.second == rj;
                                     }),
                      trimmed.edges.end());
  ELinking out = rebuild(
      trimmed, fs, cuts, shift_aux(l.auxiliary, a, b),
      [&](const NodeRef& r) -> std::optional<NodeRef> {
        if (r.root == i || r.root == j) return std::nullopt;
        return NodeRef{r.root - (r.root > a) - (r.root > b), r.path};
      });
  NodeRef uu{u.root - (u.root > a) - (u.root > b), u.path};
  NodeRef vv{v.root - (v.root > a) - (v.root > b), v.path};
  out.edges.push_back(mk_edge(uu, vv));
  return out;
}

ELinking reduce_multiplicative(const ELinking& l, int ci) {
  auto [i, j] = l.sequent.cuts[ci];
  if (l.sequent.formulas[i]->tag != Conn::Tensor) std::swap(i, j);
  const FormulaPtr& ft = l.sequent.formulas[i];
  const FormulaPtr& fp = l.sequent.formulas[j];

  std::vector<FormulaPtr> fs = l.sequent.formulas;
  fs[i] = ft->left;
  fs[j] = fp->left;
  int n1 = static_cast<int>(fs.size());
  fs.push_back(ft->right);
  fs.push_back(fp->right);
  std::vector<std::pair<int, int>> cuts;
  for (int c = 0; c < static_cast<int>(l.sequent.cuts.size()); c++)
    if (c != ci) cuts.push_back(l.sequent.cuts[c]);
  cuts.emplace_back(i, j);
  cuts.emplace_back(n1, n1 + 1);

  return rebuild(l, fs, cuts, l.auxiliary, [&](const NodeRef& r) -> std::optional<NodeRef> {
    if (r.root == i || r.root == j) {
      if (r.path.empty()) throw std::runtime_error("reference to a split cut root");
      int stay = r.root;
      int moved = r.root == i ? n1 : n1 + 1;
      return r.path[0] == 'L' ? NodeRef{stay, r.path.substr(1)}
                              : NodeRef{moved, r.path.substr(1)};
    }
    return r;
  });
}

ELinking reduce_unit_quant(const ELinking& l, int ci) {
  auto [i, j] = l.sequent.cuts[ci];
  if (l.sequent.formulas[i]->tag != Conn::Forall) std::swap(i, j);

  int a = std::min(i, j), b = std::max(i, j);
  std::vector<FormulaPtr> fs;
  for (int k = 0; k < static_cast<int>(l.sequent.formulas.size()); k++)
    if (k != a && k != b) fs.push_back(l.sequent.formulas[k]);
  std::vector<std::pair<int, int>> cuts;
  for (int c = 0; c < static_cast<int>(l.sequent.cuts.size()); c++) {
    if (c == ci) continue;
    auto [x, y] = l.sequent.cuts[c];
    cuts.emplace_back(x - (x > a) - (x > b), y - (y > a) - (y > b));
  }
  return rebuild(l, fs, cuts, shift_aux(l.auxiliary, a, b),
                 [&](const NodeRef& r) -> std::optional<NodeRef> {
                   if (r.root == i || r.root == j) return std::nullopt;
                   return NodeRef{r.root - (r.root > a) - (r.root > b), r.path};
                 });
}

ELinking reduce_quant(const ELinking& l, int ci) {
  auto [i, j] = l.sequent.cuts[ci];
  if (l.sequent.formulas[i]->tag != Conn::Forall) std::swap(i, j);
  const FormulaPtr fi = l.sequent.formulas[i];
  const FormulaPtr fj = l.sequent.formulas[j];
  auto di = yoneda_decompose(fi);
  auto dj = yoneda_decompose(fj);
  if (!di || !dj) throw NotInFragment("cut formulas outside the fragment");

  std::set<std::string> used;
  for (auto& f : l.sequent.formulas) {
    auto v = all_vars(f);
    used.insert(v.begin(), v.end());
  }
  std::string zf = fresh_name("Z", used);
  used.insert(zf);
  std::string zg = fresh_name("Z", used);
  FormulaPtr one_e = Formula::forall(zf, Formula::par(Formula::natom(zf), Formula::atom(zf)));
  FormulaPtr bot_e = Formula::exists(zg, Formula::tensor(Formula::atom(zg), Formula::natom(zg)));

  // forall side: D[ L[one_e] ]
  FormulaPtr spine_i = fi->body->left;
  FormulaPtr dpart_i = fi->body->right;
  std::string sl_i = di->slot_path.substr(1);
  std::string h_i = di->hole_path.substr(1);
  FormulaPtr content_i = replace_at(spine_i, sl_i, one_e);
  FormulaPtr new_i = replace_at(dpart_i, h_i, content_i);

  // exists side: D'[ L'[bot_e] ]
  FormulaPtr spine_j = fj->body->left;
  FormulaPtr dpart_j = fj->body->right;
  std::string sl_j = dj->slot_path.substr(1);
  std::string h_j = dj->hole_path.substr(1);
  FormulaPtr content_j = replace_at(spine_j, sl_j, bot_e);
  FormulaPtr new_j = replace_at(dpart_j, h_j, content_j);

  std::vector<FormulaPtr> fs = l.sequent.formulas;
  fs[i] = new_i;
  fs[j] = new_j;

  NodeRef old_eigen_slot{i, "BL" + sl_i};
  NodeRef old_eigen_hole{i, "BR" + h_i};
  NodeRef old_coedge{j, ""};

  ELinking out =
      rebuild(l, fs, l.sequent.cuts, l.auxiliary, [&](const NodeRef& r) -> std::optional<NodeRef> {
        if (r == old_eigen_slot || r == old_eigen_hole) return std::nullopt;
        if (r == old_coedge) return std::nullopt;
        if (r.root == i) {
          if (r.path.compare(0, 2, "BR") == 0) return NodeRef{i, r.path.substr(2)};
          if (r.path.compare(0, 2, "BL") == 0) return NodeRef{i, h_i + r.path.substr(2)};
          throw std::runtime_error("reference to the cut quantifier");
        }
        if (r.root == j) {
          if (r.path.compare(0, 2, "BR") == 0) return NodeRef{j, r.path.substr(2)};
          if (r.path.compare(0, 2, "BL") == 0) return NodeRef{j, h_j + r.path.substr(2)};
          throw std::runtime_error("reference to the cut quantifier");
        }
        return r;
      });

  // the old eigen edge vanished together with the bound pair of the exists
  // side; the fresh unit quantifiers restore both patterns
  out.edges.push_back(mk_edge(NodeRef{i, h_i + sl_i + "BL"}, NodeRef{i, h_i + sl_i + "BR"}));
  out.witness[NodeRef{j, h_j + sl_j}] = l.witness.at(old_coedge);
  // the witness target may itself sit inside the rewritten cut trees; ready
  // linkings never do this, which reduce_step checks beforehand
  return out;
}

}  // namespace

ELinking reduce_step(const ELinking& l) {
  if (l.sequent.cuts.empty()) throw NoCut("no cut to reduce");
  if (!is_ready(l)) throw NotReady("linking is not ready");

  auto kind = [&](int c) {
    auto [i, j] = l.sequent.cuts[c];
    Conn ti = l.sequent.formulas[i]->tag;
    Conn tj = l.sequent.formulas[j]->tag;
    if ((ti == Conn::Atom && tj == Conn::NegAtom) || (ti == Conn::NegAtom && tj == Conn::Atom))
      return 'a';
    if ((ti == Conn::Tensor && tj == Conn::Par) || (ti == Conn::Par && tj == Conn::Tensor))
      return 'b';
    bool unit = (is_unit_forall(l.sequent.formulas[i]) && is_unit_exists(l.sequent.formulas[j])) ||
                (is_unit_forall(l.sequent.formulas[j]) && is_unit_exists(l.sequent.formulas[i]));
    if (unit) return 'd';
    if ((ti == Conn::Forall && tj == Conn::Exists) || (ti == Conn::Exists && tj == Conn::Forall))
      return 'c';
    throw std::runtime_error("malformed cut pair");
  };

  for (char want : {'a', 'b', 'd', 'c'})
    for (int c = 0; c < static_cast<int>(l.sequent.cuts.size()); c++)
      if (kind(c) == want) {
        switch (want) {
          case 'a': return reduce_axax(l, c);
          case 'b': return reduce_multiplicative(l, c);
          case 'd': return reduce_unit_quant(l, c);
          default: return reduce_quant(l, c);
        }
      }
  throw std::runtime_error("unreachable");
}

ELinking normalize(const ELinking& l, std::vector<TraceEntry>* trace, long max_states) {
  ELinking cur = l;
  int step = 0;
  auto rule_name = [&](const ELinking& x) {
    auto [i, j] = x.sequent.cuts[0];
    Conn ti = x.sequent.formulas[i]->tag;
    if (ti == Conn::Atom || ti == Conn::NegAtom) return std::string("ax");
    if (ti == Conn::Tensor || ti == Conn::Par) return std::string("mult");
    bool unit = is_unit_forall(x.sequent.formulas[i]) || is_unit_exists(x.sequent.formulas[i]);
    return unit ? std::string("unit") : std::string("quant");
  };

  while (!cur.sequent.cuts.empty()) {
    cur = make_ready(cur, max_states);
    if (cur.sequent.cuts.empty()) break;
    int before = s_of(cur);
    std::string rn = rule_name(cur);
    cur = reduce_step(cur);
    int after = s_of(cur);
    if (after >= before) throw std::runtime_error("s measure failed to decrease");
    if (trace) trace->push_back(TraceEntry{step, rn, 0, before, after});
    step++;
  }

  // absorb the widening conclusions by cutting each against a fresh unit
  // universal and erasing the unit pair
  for (int guard = 0; guard < 1000 && !cur.auxiliary.empty(); guard++) {
    std::sort(cur.auxiliary.begin(), cur.auxiliary.end());
    int k = cur.auxiliary.back();
    cur.auxiliary.pop_back();
    std::set<std::string> used;
    for (auto& f : cur.sequent.formulas) {
      auto v = all_vars(f);
      used.insert(v.begin(), v.end());
    }
    std::string z = fresh_name("Z", used);
    cur.sequent.formulas.push_back(
        Formula::forall(z, Formula::par(Formula::natom(z), Formula::atom(z))));
    int unit_idx = static_cast<int>(cur.sequent.formulas.size()) - 1;
    cur.edges.push_back(mk_edge(NodeRef{unit_idx, "BL"}, NodeRef{unit_idx, "BR"}));
    cur.sequent.cuts.emplace_back(unit_idx, k);

    while (!cur.sequent.cuts.empty()) {
      cur = make_ready(cur, max_states);
      if (cur.sequent.cuts.empty()) break;
      int before = s_of(cur);
      std::string rn = rule_name(cur);
      cur = reduce_step(cur);
      int after = s_of(cur);
      if (after >= before) throw std::runtime_error("s measure failed to decrease");
      if (trace) trace->push_back(TraceEntry{step, rn, 0, before, after});
      step++;
    }
  }
  return cur;
}

}  // namespace yonet
