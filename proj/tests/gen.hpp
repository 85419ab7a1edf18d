#ifndef YONET_TESTS_GEN_HPP
#define YONET_TESTS_GEN_HPP

#include <random>
#include <vector>

#include "yonet/elink.hpp"
#include "yonet/formula.hpp"
#include "yonet/rewrite.hpp"

// Deterministic generators for property tests: fragment formulas, correct
// linkings (random rewitnessing walks from identities), and cut-carrying
// joins.

namespace yonet::gen {

using Rng = std::mt19937;

inline FormulaPtr atom_pool(Rng& rng) {
  static const char* names[] = {"Y", "Z", "W", "V"};
  auto f = Formula::atom(names[rng() % 4]);
  return rng() % 2 ? f : dual(f);
}

// quantifier-free multiplicative formula
inline FormulaPtr random_mll(Rng& rng, int depth) {
  if (depth <= 0 || rng() % 3 == 0) return atom_pool(rng);
  FormulaPtr l = random_mll(rng, depth - 1);
  FormulaPtr r = random_mll(rng, depth - 1);
  return rng() % 2 ? Formula::tensor(l, r) : Formula::par(l, r);
}

// formula of the Yoneda fragment, quantified with some probability
inline FormulaPtr random_fragment(Rng& rng, int depth, int quant_budget = 2) {
  if (quant_budget > 0 && depth > 0 && rng() % 3 == 0) {
    // all X.((C1 * ... * ~X) @ D[X]) or its dual
    std::string x = "X" + std::to_string(rng() % 1000);
    int n = static_cast<int>(rng() % 2);
    FormulaPtr spine = Formula::natom(x);
    for (int i = 0; i < n; i++)
      spine = Formula::tensor(random_fragment(rng, depth - 1, quant_budget - 1), spine);
    // D with one positive hole
    FormulaPtr hole = Formula::atom(x);
    FormulaPtr dpart = hole;
    if (rng() % 2) {
      FormulaPtr side = random_fragment(rng, depth - 1, quant_budget - 1);
      dpart = rng() % 2 ? Formula::par(side, hole) : Formula::par(hole, side);
    }
    FormulaPtr body = Formula::par(spine, dpart);
    FormulaPtr all = Formula::forall(x, body);
    return rng() % 2 ? all : dual(all);
  }
  if (depth <= 0 || rng() % 3 == 0) return atom_pool(rng);
  FormulaPtr l = random_fragment(rng, depth - 1, quant_budget);
  FormulaPtr r = random_fragment(rng, depth - 1, quant_budget);
  return rng() % 2 ? Formula::tensor(l, r) : Formula::par(l, r);
}

// correct cut-free linking: identity over a random fragment formula, walked
// through a few random rewitnessing moves
inline ELinking random_linking(Rng& rng, int depth = 2, int walk = 2) {
  FormulaPtr a = random_fragment(rng, depth);
  ELinking l = identity_linking(a);
  for (int i = 0; i < walk; i++) {
    auto nb = neighbors(l);
    if (nb.empty()) break;
    l = nb[rng() % nb.size()];
  }
  return l;
}

// joins n. linkings into a chain with cuts, without normalizing
inline ELinking join_chain(const std::vector<ELinking>& parts) {
  ELinking out = parts.at(0);
  for (size_t i = 1; i < parts.size(); i++) {
    const ELinking& nxt = parts[i];
    std::set<std::string> used;
    for (auto& f : out.sequent.formulas) {
      auto v = all_vars(f);
      used.insert(v.begin(), v.end());
    }
    ELinking r = nxt;
    for (auto& f : r.sequent.formulas) f = cleaned_formula(f, used);
    int off = static_cast<int>(out.sequent.formulas.size());
    for (auto& f : r.sequent.formulas) out.sequent.formulas.push_back(f);
    for (auto& [a, b] : r.sequent.cuts) out.sequent.cuts.emplace_back(a + off, b + off);
    for (auto& [p, q] : r.edges)
      out.edges.push_back(mk_edge(NodeRef{p.root + off, p.path}, NodeRef{q.root + off, q.path}));
    for (auto& [k, t] : r.witness)
      out.witness[NodeRef{k.root + off, k.path}] = NodeRef{t.root + off, t.path};
  }
  return out;
}

// chain of identity linkings over one formula, composed by cuts and walked
// through random rewitnessing moves (which may unready the witnesses)
inline ELinking random_cut_chain(Rng& rng, int depth, int ncuts, int walk = 2) {
  FormulaPtr a = random_fragment(rng, depth);
  std::vector<ELinking> parts;
  for (int i = 0; i <= ncuts; i++) parts.push_back(identity_linking(a));
  ELinking joined = join_chain(parts);
  for (int i = 0; i < ncuts; i++) joined.sequent.cuts.emplace_back(2 * i + 1, 2 * i + 2);
  for (int i = 0; i < walk; i++) {
    auto nb = neighbors(joined);
    if (nb.empty()) break;
    joined = nb[rng() % nb.size()];
  }
  return joined;
}

}  // namespace yonet::gen

#endif
