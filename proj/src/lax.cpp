#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "yonet/lax.hpp"
#include "yonet/rewrite.hpp"
#include "json.hpp"

namespace yonet {

namespace {

void node_list(const FormulaPtr& f, NodeRef at, std::vector<std::pair<NodeRef, FormulaPtr>>& out) {
  out.emplace_back(at, f);
  if (f->is_binary()) {
    node_list(f->left, NodeRef{at.root, at.path + "L"}, out);
    node_list(f->right, NodeRef{at.root, at.path + "R"}, out);
  } else if (f->is_quant()) {
    node_list(f->body, NodeRef{at.root, at.path + "B"}, out);
  }
}

std::vector<std::pair<NodeRef, FormulaPtr>> node_list(const Sequent& s) {
  std::vector<std::pair<NodeRef, FormulaPtr>> out;
  for (int i = 0; i < static_cast<int>(s.formulas.size()); i++)
    node_list(s.formulas[i], NodeRef{i, ""}, out);
  return out;
}

std::string thinning_key(const LaxLinking& k) {
  std::ostringstream os;
  for (auto& [b, t] : k.thinning) os << b.str() << ">" << t.str() << ";";
  return os.str();
}

}  // namespace

void validate_lax(const LaxLinking& k) {
  for (auto& [r, f] : node_list(k.sequent))
    if (f->is_quant())
      throw ValidationError(NetFault::DirtySequent, "lax linking with quantifier at " + r.str());
  validate_structure(k.as_net());
}

bool is_correct_lax(const LaxLinking& k, long cap) {
  validate_lax(k);
  return is_correct_gnet(k.as_net(), cap);
}

LaxLinking lax_identity(const FormulaPtr& f) {
  LaxLinking out;
  out.sequent.formulas = {dual(f), f};
  std::function<void(const FormulaPtr&, const std::string&)> rec =
      [&](const FormulaPtr& g, const std::string& at) {
        switch (g->tag) {
          case Conn::Atom:
          case Conn::NegAtom:
            out.edges.push_back(mk_edge(NodeRef{0, at}, NodeRef{1, at}));
            break;
          case Conn::One:  // dual side holds the bot
            out.thinning[NodeRef{0, at}] = NodeRef{1, at};
            break;
          case Conn::Bot:
            out.thinning[NodeRef{1, at}] = NodeRef{0, at};
            break;
          case Conn::Tensor:
          case Conn::Par:
            rec(g->left, at + "L");
            rec(g->right, at + "R");
            break;
          default:
            throw ValidationError(NetFault::DirtySequent, "lax identity over a quantifier");
        }
      };
  rec(f, "");
  return out;
}

std::vector<LaxLinking> lax_neighbors(const LaxLinking& k, long cap) {
  std::vector<LaxLinking> out;
  auto nodes = node_list(k.sequent);
  for (auto& [b, t] : k.thinning) {
    for (auto& [r, f] : nodes) {
      (void)f;
      if (r == t || r == b) continue;
      LaxLinking cand = k;
      cand.thinning[b] = r;
      try {
        if (is_correct_lax(cand, cap)) out.push_back(std::move(cand));
      } catch (const ValidationError&) {
      }
    }
  }
  return out;
}

bool lax_equivalent(const LaxLinking& k1, const LaxLinking& k2, long max_states) {
  if (k1.sequent.formulas.size() != k2.sequent.formulas.size())
    throw SequentMismatch("lax equivalence compares linkings over one sequent");
  for (size_t i = 0; i < k1.sequent.formulas.size(); i++)
    if (!alpha_equal(k1.sequent.formulas[i], k2.sequent.formulas[i]))
      throw SequentMismatch("lax equivalence compares linkings over one sequent");
  auto norm = [](const LaxLinking& k) {
    std::vector<Edge> e = k.edges;
    for (auto& x : e) x = mk_edge(x.first, x.second);
    std::sort(e.begin(), e.end());
    return e;
  };
  if (norm(k1) != norm(k2)) return false;

  std::string target = thinning_key(k2);
  std::deque<LaxLinking> queue{k1};
  std::set<std::string> seen{thinning_key(k1)};
  if (thinning_key(k1) == target) return true;
  while (!queue.empty()) {
    LaxLinking cur = queue.front();
    queue.pop_front();
    for (auto& nb : lax_neighbors(cur)) {
      std::string key = thinning_key(nb);
      if (!seen.insert(key).second) continue;
      if (key == target) return true;
      if (static_cast<long>(seen.size()) > max_states)
        throw std::runtime_error("rewiring search exceeded the state cap");
      queue.push_back(nb);
    }
  }
  return false;
}

// ------------------------------------------------------- Yoneda translation

LaxLinking elink_yoneda(const ELinking& l) {
  validate_elinking(l);
  if (!l.sequent.cuts.empty())
    throw std::runtime_error("the Yoneda translation expects a cut-free linking");

  std::vector<FormulaPtr> trees = l.sequent.formulas;
  std::vector<Edge> edges = l.edges;
  std::map<NodeRef, NodeRef> thin;

  // remaining witness edges, keyed by the current position of their co-edge
  std::map<NodeRef, NodeRef> wit = l.witness;

  // dependents first, so no remaining witness edge can point into the
  // subtree a step is about to rewrite
  DependencyGraph dg = dependency_graph(l);
  int n = static_cast<int>(dg.coedges.size());
  std::vector<std::vector<int>> outs(n);
  std::vector<int> indeg(n, 0);
  for (auto& [a, b] : dg.arcs) {
    outs[a].push_back(b);
    indeg[b]++;
  }
  std::vector<int> order, ready;
  for (int i = 0; i < n; i++)
    if (indeg[i] == 0) ready.push_back(i);
  std::sort(ready.begin(), ready.end());
  while (!ready.empty()) {
    int v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int w : outs[v])
      if (--indeg[w] == 0) ready.push_back(w);
    std::sort(ready.begin(), ready.end());
  }
  if (static_cast<int>(order.size()) != n) throw CyclicWitness("witnessing function is cyclic");

  std::map<NodeRef, NodeRef> pos_of;  // original exists ref -> current
  for (auto& c : dg.coedges) pos_of[c.exists] = c.exists;

  // Rewrites the quantified occurrence at `at` into its translation,
  // remapping every tracked reference. Deleted nodes forward to `sink`.
  // Returns the fresh unit leaf and the shifted image of `sink`.
  auto apply_step = [&](const NodeRef& at, bool existential,
                        const NodeRef& sink) -> std::pair<NodeRef, NodeRef> {
    FormulaPtr f = subformula_at(trees[at.root], at.path);
    auto d = yoneda_decompose(f);
    if (!d) throw NotInFragment("translation outside the fragment: " + render(f));
    std::string sl = d->slot_path.substr(1);
    std::string h = d->hole_path.substr(1);
    FormulaPtr unit = existential ? Formula::bot() : Formula::one();
    FormulaPtr content = replace_at(f->body->left, sl, unit);
    FormulaPtr newt = replace_at(f->body->right, h, content);
    trees[at.root] = replace_at(trees[at.root], at.path, newt);

    NodeRef unit_ref{at.root, at.path + h + sl};
    std::set<NodeRef> deleted{NodeRef{at.root, at.path + "BL" + sl},
                              NodeRef{at.root, at.path + "BR" + h},
                              NodeRef{at.root, at.path + "B"}};
    auto shift = [&](const NodeRef& r) -> NodeRef {
      if (!at.is_prefix_of(r)) return r;
      std::string rest = r.path.substr(at.path.size());
      if (rest.empty()) return r;  // translated occurrence keeps its root
      if (rest.compare(0, 2, "BR") == 0) return NodeRef{at.root, at.path + rest.substr(2)};
      if (rest.compare(0, 2, "BL") == 0) return NodeRef{at.root, at.path + h + rest.substr(2)};
      throw std::runtime_error("reference to a consumed node at " + r.str());
    };
    NodeRef moved_sink = deleted.count(sink) ? unit_ref : shift(sink);
    auto remap = [&](NodeRef& r) {
      if (deleted.count(r)) {
        r = existential ? moved_sink : unit_ref;
        return;
      }
      r = shift(r);
    };
    for (auto& e : edges) {
      remap(e.first);
      remap(e.second);
    }
    std::map<NodeRef, NodeRef> thin2;
    for (auto& kv : thin) {
      NodeRef b = kv.first, t = kv.second;
      remap(b);
      remap(t);
      thin2[b] = t;
    }
    thin = thin2;
    std::map<NodeRef, NodeRef> wit2;
    for (auto& kv : wit) {
      NodeRef k = kv.first, t = kv.second;
      remap(k);
      remap(t);
      wit2[k] = t;
    }
    wit = wit2;
    for (auto& [orig, cur] : pos_of) {
      (void)orig;
      if (!deleted.count(cur)) cur = shift(cur);
    }
    return {unit_ref, moved_sink};
  };

  // step 1: existential occurrences, their witness edge becomes a thinning
  for (int oi : order) {
    NodeRef at = pos_of.at(dg.coedges[oi].exists);
    NodeRef target = wit.at(at);
    auto [bot_ref, moved_target] = apply_step(at, true, target);
    wit.erase(at);  // consumed; the translated root keeps the ref `at`
    thin[bot_ref] = moved_target;
  }

  // step 2: universal occurrences, the eigen edge disappears
  bool progress = true;
  while (progress) {
    progress = false;
    for (int i = 0; i < static_cast<int>(trees.size()) && !progress; i++) {
      std::vector<std::pair<NodeRef, FormulaPtr>> nodes;
      node_list(trees[i], NodeRef{i, ""}, nodes);
      for (auto& [r, f] : nodes) {
        if (f->tag != Conn::Forall) continue;
        auto d = yoneda_decompose(f);
        if (!d) throw NotInFragment("translation outside the fragment: " + render(f));
        NodeRef slot{r.root, r.path + "B" + d->slot_path};
        NodeRef hole{r.root, r.path + "B" + d->hole_path};
        Edge eigen = mk_edge(slot, hole);
        auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) {
          return mk_edge(e.first, e.second) == eigen;
        });
        if (it == edges.end()) throw std::runtime_error("missing eigen edge at " + r.str());
        edges.erase(it);
        apply_step(r, false, r);
        progress = true;
        break;
      }
    }
  }

  LaxLinking out;
  out.sequent.formulas = trees;
  out.edges = edges;
  out.thinning = thin;
  return out;
}

// --------------------------------------------------------------------- JSON

std::string to_json(const LaxLinking& k) {
  nlohmann::json j;
  j["sequent"] = nlohmann::json::array();
  for (auto& f : k.sequent.formulas) j["sequent"].push_back(render(f));
  j["edges"] = nlohmann::json::array();
  for (auto& [p, q] : k.edges) j["edges"].push_back({p.str(), q.str()});
  j["thinning"] = nlohmann::json::object();
  for (auto& [b, t] : k.thinning) j["thinning"][b.str()] = t.str();
  return j.dump(2);
}

LaxLinking lax_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LaxLinking k;
  for (auto& s : j.at("sequent")) k.sequent.formulas.push_back(parse_formula(s.get<std::string>()));
  for (auto& e : j.at("edges"))
    k.edges.push_back(mk_edge(NodeRef::parse(e.at(0).get<std::string>()),
                              NodeRef::parse(e.at(1).get<std::string>())));
  if (j.contains("thinning"))
    for (auto& [key, v] : j["thinning"].items())
      k.thinning[NodeRef::parse(key)] = NodeRef::parse(v.get<std::string>());
  return k;
}

std::string to_dot(const LaxLinking& k) {
  GNet g = k.as_net();
  return yonet::to_dot(g);
}

}  // namespace yonet
