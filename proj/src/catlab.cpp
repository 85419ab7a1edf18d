#include <algorithm>
#include <functional>

#include "yonet/catlab.hpp"
#include "json.hpp"

namespace yonet {

namespace {

std::set<std::string> names_of(const ELinking& l) {
  std::set<std::string> out;
  for (auto& f : l.sequent.formulas) {
    auto v = all_vars(f);
    out.insert(v.begin(), v.end());
  }
  return out;
}

ELinking rename_binders(const ELinking& l, std::set<std::string>& used) {
  ELinking out = l;
  for (auto& f : out.sequent.formulas) f = cleaned_formula(f, used);
  return out;
}

void check_morphism(const ELinking& l, const char* who) {
  if (l.sequent.formulas.size() != 2 || !l.sequent.cuts.empty())
    throw TypeMismatch(std::string(who) + " expects linkings of two conclusions");
}

struct Placement {
  int root;
  std::string prefix;
};

// copies l's edges and witnesses with each of its two roots re-rooted
void graft(const ELinking& l, const Placement& p0, const Placement& p1, ELinking& out) {
  auto fix = [&](const NodeRef& r) {
    const Placement& p = r.root == 0 ? p0 : p1;
    return NodeRef{p.root, p.prefix + r.path};
  };
  for (auto& [a, b] : l.edges) out.edges.push_back(mk_edge(fix(a), fix(b)));
  for (auto& [k, t] : l.witness) out.witness[fix(k)] = fix(t);
}

}  // namespace

ELinking compose(const ELinking& l1, const ELinking& l2, long max_states) {
  check_morphism(l1, "compose");
  check_morphism(l2, "compose");
  if (!alpha_equal(dual(l1.sequent.formulas[1]), l2.sequent.formulas[0]))
    throw TypeMismatch("middle formulas are not dual: " + render(l1.sequent.formulas[1]) +
                       " vs " + render(l2.sequent.formulas[0]));
  std::set<std::string> used = names_of(l1);
  ELinking r2 = rename_binders(l2, used);

  ELinking joined;
  joined.sequent.formulas = {l1.sequent.formulas[0], r2.sequent.formulas[1],
                             l1.sequent.formulas[1], r2.sequent.formulas[0]};
  joined.sequent.cuts = {{2, 3}};
  graft(l1, Placement{0, ""}, Placement{2, ""}, joined);
  graft(r2, Placement{3, ""}, Placement{1, ""}, joined);
  return normalize(joined, nullptr, max_states);
}

ELinking tensor_linking(const ELinking& l1, const ELinking& l2) {
  check_morphism(l1, "tensor");
  check_morphism(l2, "tensor");
  std::set<std::string> used = names_of(l1);
  ELinking r2 = rename_binders(l2, used);
  ELinking out;
  out.sequent.formulas = {Formula::par(l1.sequent.formulas[0], r2.sequent.formulas[0]),
                          Formula::tensor(l1.sequent.formulas[1], r2.sequent.formulas[1])};
  graft(l1, Placement{0, "L"}, Placement{1, "L"}, out);
  graft(r2, Placement{0, "R"}, Placement{1, "R"}, out);
  return out;
}

// ------------------------------------------------------------ co-wedge data

ELinking omega(const FormulaPtr& fa, const FormulaPtr& b) {
  ELinking id = identity_linking(fa);
  FormulaPtr q = id.sequent.formulas[1];  // cleaned all X.A
  auto dec = yoneda_decompose(q);
  if (!dec) throw NotInFragment("omega expects a Yoneda universal");

  std::set<std::string> used = names_of(id);
  FormulaPtr b1 = cleaned_formula(b, used);
  FormulaPtr b2 = cleaned_formula(b, used);

  ELinking out;
  out.sequent.formulas = {id.sequent.formulas[0], nullptr};
  FormulaPtr inst = replace_at(q->body, dec->slot_path, dual(b1));
  inst = replace_at(inst, dec->hole_path, b2);
  out.sequent.formulas[1] = inst;

  // identity wiring, with the universal side unwrapped to its instance
  Edge old_eigen = mk_edge(NodeRef{1, "B" + dec->slot_path}, NodeRef{1, "B" + dec->hole_path});
  for (auto& e : id.edges) {
    Edge fixed = e;
    for (NodeRef* r : {&fixed.first, &fixed.second})
      if (r->root == 1) r->path = r->path.substr(1);  // strip the B step
    if (mk_edge(e.first, e.second) == old_eigen) continue;
    out.edges.push_back(fixed);
  }
  for (auto& [k, t] : id.witness) {
    NodeRef kk = k.root == 1 ? NodeRef{1, k.path.substr(1)} : k;
    NodeRef tt = t.root == 1 ? NodeRef{1, t.path.substr(1)} : t;
    out.witness[kk] = tt;
  }
  // the slot and hole now carry dual copies of the instance
  identity_wiring(NodeRef{1, dec->slot_path}, dual(b1), NodeRef{1, dec->hole_path}, b2, {}, out);
  out.sequent = cleaned(out.sequent);
  return out;
}

namespace {

struct YoParts {
  FormulaPtr quant;  // cleaned all X.A
  YonedaDecomposition dec;
  std::vector<std::string> side_paths;  // spine-relative paths of the C_i
};

YoParts parts_of(const FormulaPtr& fa) {
  if (fa->tag != Conn::Forall) throw NotInFragment("expected a universal formula");
  Sequent s;
  s.formulas = {fa};
  FormulaPtr q = cleaned(s).formulas[0];
  auto dec = yoneda_decompose(q);
  if (!dec) throw NotInFragment("not Yoneda: " + render(fa));
  YoParts p;
  p.quant = q;
  p.dec = *dec;
  std::string at;
  for (size_t i = 0; i < dec->sides.size(); i++) {
    p.side_paths.push_back(at + "L");
    at += "R";
  }
  return p;
}

}  // namespace

ELinking fmap_cov(const FormulaPtr& fa, const ELinking& l) {
  check_morphism(l, "fmap");
  YoParts p = parts_of(fa);
  std::set<std::string> used = all_vars(p.quant);
  ELinking lr = rename_binders(l, used);
  FormulaPtr e_pos = cleaned_formula(dual(lr.sequent.formulas[0]), used);  // E
  FormulaPtr e_neg = cleaned_formula(lr.sequent.formulas[0], used);        // ~E

  FormulaPtr body = p.quant->body;
  // conclusion 0: dual body, slot := E, hole := grafted ~E side of l
  FormulaPtr c0 = dual(body);
  c0 = replace_at(c0, p.dec.slot_path, e_pos);
  c0 = replace_at(c0, p.dec.hole_path, lr.sequent.formulas[0]);
  // conclusion 1: body, slot := ~E copy, hole := grafted F side of l
  FormulaPtr c1 = body;
  c1 = replace_at(c1, p.dec.slot_path, e_neg);
  c1 = replace_at(c1, p.dec.hole_path, lr.sequent.formulas[1]);

  ELinking out;
  out.sequent.formulas = {c0, c1};
  identity_wiring(NodeRef{0, ""}, c0, NodeRef{1, ""}, c1,
                  {p.dec.slot_path, p.dec.hole_path}, out);
  identity_wiring(NodeRef{0, p.dec.slot_path}, e_pos, NodeRef{1, p.dec.slot_path}, e_neg, {},
                  out);
  graft(lr, Placement{0, p.dec.hole_path}, Placement{1, p.dec.hole_path}, out);
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking fmap_contra(const FormulaPtr& fa, const ELinking& l) {
  check_morphism(l, "fmap");
  YoParts p = parts_of(fa);
  std::set<std::string> used = all_vars(p.quant);
  ELinking lr = rename_binders(l, used);
  FormulaPtr f_pos = cleaned_formula(lr.sequent.formulas[1], used);        // F
  FormulaPtr f_neg = cleaned_formula(dual(lr.sequent.formulas[1]), used);  // ~F

  FormulaPtr body = p.quant->body;
  // conclusion 0: dual body, slot := grafted F side, hole := ~F copy
  FormulaPtr c0 = dual(body);
  c0 = replace_at(c0, p.dec.slot_path, lr.sequent.formulas[1]);
  c0 = replace_at(c0, p.dec.hole_path, f_neg);
  // conclusion 1: body, slot := grafted ~E side, hole := F copy
  FormulaPtr c1 = body;
  c1 = replace_at(c1, p.dec.slot_path, lr.sequent.formulas[0]);
  c1 = replace_at(c1, p.dec.hole_path, f_pos);

  ELinking out;
  out.sequent.formulas = {c0, c1};
  identity_wiring(NodeRef{0, ""}, c0, NodeRef{1, ""}, c1,
                  {p.dec.slot_path, p.dec.hole_path}, out);
  identity_wiring(NodeRef{0, p.dec.hole_path}, f_neg, NodeRef{1, p.dec.hole_path}, f_pos, {},
                  out);
  graft(lr, Placement{1, p.dec.slot_path}, Placement{0, p.dec.slot_path}, out);
  out.sequent = cleaned(out.sequent);
  return out;
}

// --------------------------------------------------------- Yoneda linkings

FormulaPtr one_exists_formula(const std::string& v) {
  return Formula::forall(v, Formula::par(Formula::natom(v), Formula::atom(v)));
}

FormulaPtr bot_exists_formula(const std::string& v) {
  return Formula::exists(v, Formula::tensor(Formula::atom(v), Formula::natom(v)));
}

FormulaPtr unit_translate(const FormulaPtr& f) {
  FormulaPtr t = yoneda_translate_formula(f);
  std::set<std::string> used = all_vars(f);
  int counter = 0;
  std::function<FormulaPtr(const FormulaPtr&)> rec = [&](const FormulaPtr& g) -> FormulaPtr {
    switch (g->tag) {
      case Conn::One: {
        std::string v = fresh_name("U" + std::to_string(counter++), used);
        used.insert(v);
        return one_exists_formula(v);
      }
      case Conn::Bot: {
        std::string v = fresh_name("U" + std::to_string(counter++), used);
        used.insert(v);
        return bot_exists_formula(v);
      }
      case Conn::Tensor: return Formula::tensor(rec(g->left), rec(g->right));
      case Conn::Par: return Formula::par(rec(g->left), rec(g->right));
      default: return g;
    }
  };
  return rec(t);
}

ELinking yo1_linking(const FormulaPtr& fa) {
  YoParts p = parts_of(fa);
  std::set<std::string> used = all_vars(p.quant);
  std::string zf = fresh_name("U", used);
  used.insert(zf);

  FormulaPtr spine = p.quant->body->left;
  FormulaPtr dpart = p.quant->body->right;
  std::string sl = p.dec.slot_path.substr(1);
  std::string h = p.dec.hole_path.substr(1);
  FormulaPtr trans_u = replace_at(dpart, h, replace_at(spine, sl, one_exists_formula(zf)));

  ELinking out;
  FormulaPtr f0 = cleaned_formula(dual(trans_u), used);
  out.sequent.formulas = {f0, p.quant};

  // contexts of the D part, holes excluded
  identity_wiring(NodeRef{0, ""}, f0, NodeRef{1, "BR"}, dpart, {h}, out);
  // side formulas against the translated copies
  for (auto& cp : p.side_paths)
    identity_wiring(NodeRef{0, h + cp}, subformula_at(f0, h + cp), NodeRef{1, "BL" + cp},
                    subformula_at(spine, cp), {}, out);
  // eigen edge of the universal side
  out.edges.push_back(
      mk_edge(NodeRef{1, "BL" + sl}, NodeRef{1, "BR" + h}));
  // the bot-existential of the translated side witnesses the slot variable
  out.witness[NodeRef{0, h + sl}] = NodeRef{1, "BL" + sl};
  return out;
}

ELinking yo2_linking(const FormulaPtr& fa) {
  YoParts p = parts_of(fa);
  std::set<std::string> used = all_vars(p.quant);
  std::string zf = fresh_name("U", used);
  used.insert(zf);

  FormulaPtr spine = p.quant->body->left;
  FormulaPtr dpart = p.quant->body->right;
  std::string sl = p.dec.slot_path.substr(1);
  std::string h = p.dec.hole_path.substr(1);
  FormulaPtr trans_u = replace_at(dpart, h, replace_at(spine, sl, one_exists_formula(zf)));
  FormulaPtr f0 = cleaned_formula(dual(p.quant), used);

  ELinking out;
  out.sequent.formulas = {f0, trans_u};

  identity_wiring(NodeRef{0, "BR"}, f0->body->right, NodeRef{1, ""}, trans_u, {h}, out);
  for (auto& cp : p.side_paths)
    identity_wiring(NodeRef{0, "BL" + cp}, subformula_at(f0->body->left, cp),
                    NodeRef{1, h + cp}, subformula_at(spine, cp), {}, out);
  // internal edge of the quantified unit
  out.edges.push_back(mk_edge(NodeRef{1, h + sl + "BL"}, NodeRef{1, h + sl + "BR"}));
  // the co-edge of the existential side witnesses the whole unit instance
  out.witness[NodeRef{0, ""}] = NodeRef{1, h};
  return out;
}

// ------------------------------------------------------ structural linkings

namespace {

std::pair<FormulaPtr, FormulaPtr> copies(const FormulaPtr& a, std::set<std::string>& used) {
  FormulaPtr n = cleaned_formula(dual(a), used);
  FormulaPtr q = cleaned_formula(a, used);
  return {n, q};
}

}  // namespace

ELinking lambda_linking(const FormulaPtr& a) {
  std::set<std::string> used = all_vars(a);
  std::string v = fresh_name("U", used);
  used.insert(v);
  auto [an, ap] = copies(a, used);
  ELinking out;
  out.sequent.formulas = {Formula::par(bot_exists_formula(v), an), ap};
  identity_wiring(NodeRef{0, "R"}, an, NodeRef{1, ""}, ap, {}, out);
  out.witness[NodeRef{0, "L"}] = NodeRef{1, ""};
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking lambda_inv_linking(const FormulaPtr& a) {
  std::set<std::string> used = all_vars(a);
  std::string v = fresh_name("U", used);
  used.insert(v);
  auto [an, ap] = copies(a, used);
  ELinking out;
  out.sequent.formulas = {an, Formula::tensor(one_exists_formula(v), ap)};
  identity_wiring(NodeRef{0, ""}, an, NodeRef{1, "R"}, ap, {}, out);
  out.edges.push_back(mk_edge(NodeRef{1, "LBL"}, NodeRef{1, "LBR"}));
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking rho_linking(const FormulaPtr& a) {
  std::set<std::string> used = all_vars(a);
  std::string v = fresh_name("U", used);
  used.insert(v);
  auto [an, ap] = copies(a, used);
  ELinking out;
  out.sequent.formulas = {Formula::par(an, bot_exists_formula(v)), ap};
  identity_wiring(NodeRef{0, "L"}, an, NodeRef{1, ""}, ap, {}, out);
  out.witness[NodeRef{0, "R"}] = NodeRef{1, ""};
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking rho_inv_linking(const FormulaPtr& a) {
  std::set<std::string> used = all_vars(a);
  std::string v = fresh_name("U", used);
  used.insert(v);
  auto [an, ap] = copies(a, used);
  ELinking out;
  out.sequent.formulas = {an, Formula::tensor(ap, one_exists_formula(v))};
  identity_wiring(NodeRef{0, ""}, an, NodeRef{1, "L"}, ap, {}, out);
  out.edges.push_back(mk_edge(NodeRef{1, "RBL"}, NodeRef{1, "RBR"}));
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking alpha_linking(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c) {
  std::set<std::string> used;
  for (auto& f : {a, b, c}) {
    auto v = all_vars(f);
    used.insert(v.begin(), v.end());
  }
  auto [an, ap] = copies(a, used);
  auto [bn, bp] = copies(b, used);
  auto [cn, cp] = copies(c, used);
  ELinking out;
  out.sequent.formulas = {Formula::par(an, Formula::par(bn, cn)),
                          Formula::tensor(Formula::tensor(ap, bp), cp)};
  identity_wiring(NodeRef{0, "L"}, an, NodeRef{1, "LL"}, ap, {}, out);
  identity_wiring(NodeRef{0, "RL"}, bn, NodeRef{1, "LR"}, bp, {}, out);
  identity_wiring(NodeRef{0, "RR"}, cn, NodeRef{1, "R"}, cp, {}, out);
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking alpha_inv_linking(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c) {
  std::set<std::string> used;
  for (auto& f : {a, b, c}) {
    auto v = all_vars(f);
    used.insert(v.begin(), v.end());
  }
  auto [an, ap] = copies(a, used);
  auto [bn, bp] = copies(b, used);
  auto [cn, cp] = copies(c, used);
  ELinking out;
  out.sequent.formulas = {Formula::par(Formula::par(an, bn), cn),
                          Formula::tensor(ap, Formula::tensor(bp, cp))};
  identity_wiring(NodeRef{0, "LL"}, an, NodeRef{1, "L"}, ap, {}, out);
  identity_wiring(NodeRef{0, "LR"}, bn, NodeRef{1, "RL"}, bp, {}, out);
  identity_wiring(NodeRef{0, "R"}, cn, NodeRef{1, "RR"}, cp, {}, out);
  out.sequent = cleaned(out.sequent);
  return out;
}

ELinking sigma_linking(const FormulaPtr& a, const FormulaPtr& b) {
  std::set<std::string> used;
  for (auto& f : {a, b}) {
    auto v = all_vars(f);
    used.insert(v.begin(), v.end());
  }
  auto [an, ap] = copies(a, used);
  auto [bn, bp] = copies(b, used);
  ELinking out;
  out.sequent.formulas = {Formula::par(an, bn), Formula::tensor(bp, ap)};
  identity_wiring(NodeRef{0, "L"}, an, NodeRef{1, "R"}, ap, {}, out);
  identity_wiring(NodeRef{0, "R"}, bn, NodeRef{1, "L"}, bp, {}, out);
  out.sequent = cleaned(out.sequent);
  return out;
}

// ------------------------------------------------------------ the test suite

SuiteReport coherence_suite(const std::vector<FormulaPtr>& atoms, long max_states) {
  SuiteReport rep;
  auto run = [&](const std::string& name, const std::function<bool()>& f) {
    SuiteCheck c{name, false, ""};
    try {
      c.pass = f();
      if (!c.pass) c.detail = "equivalence check failed";
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    rep.checks.push_back(c);
  };

  for (auto& a : atoms) {
    std::string an = render(a);
    run("lambda." + an, [&] {
      ELinking left = compose(lambda_inv_linking(a), lambda_linking(a), max_states);
      return equivalent(left, identity_linking(a), max_states);
    });
    run("lambda-unit." + an, [&] {
      ELinking left = compose(lambda_linking(a), lambda_inv_linking(a), max_states);
      ELinking id = identity_linking(left.sequent.formulas[1]);
      return equivalent(left, id, max_states);
    });
    run("rho." + an, [&] {
      ELinking left = compose(rho_inv_linking(a), rho_linking(a), max_states);
      return equivalent(left, identity_linking(a), max_states);
    });
  }

  for (auto& a : atoms)
    for (auto& b : atoms) {
      std::string nm = render(a) + "," + render(b);
      run("sigma." + nm, [&] {
        ELinking left = compose(sigma_linking(a, b), sigma_linking(b, a), max_states);
        return equivalent(left, identity_linking(Formula::tensor(a, b)), max_states);
      });
    }

  if (atoms.size() >= 3) {
    const FormulaPtr &a = atoms[0], &b = atoms[1], &c = atoms[2];
    run("alpha", [&] {
      ELinking left = compose(alpha_linking(a, b, c), alpha_inv_linking(a, b, c), max_states);
      return equivalent(
          left, identity_linking(Formula::tensor(a, Formula::tensor(b, c))), max_states);
    });
    run("triangle", [&] {
      std::set<std::string> used;
      std::string v = fresh_name("U", used);
      FormulaPtr unit = one_exists_formula(v);
      ELinking lhs = compose(alpha_linking(a, unit, b),
                             tensor_linking(rho_linking(a), identity_linking(b)), max_states);
      ELinking rhs = tensor_linking(identity_linking(a), lambda_linking(b));
      for (size_t i = 0; i < rhs.sequent.formulas.size(); i++)
        rhs.sequent.formulas[i] = lhs.sequent.formulas[i];
      return equivalent(lhs, rhs, max_states);
    });
    run("hexagon", [&] {
      ELinking lhs = compose(
          compose(alpha_linking(a, b, c), sigma_linking(Formula::tensor(a, b), c), max_states),
          alpha_linking(c, a, b), max_states);
      ELinking rhs = compose(
          compose(tensor_linking(identity_linking(a), sigma_linking(b, c)),
                  alpha_linking(a, c, b), max_states),
          tensor_linking(sigma_linking(a, c), identity_linking(b)), max_states);
      for (size_t i = 0; i < rhs.sequent.formulas.size(); i++)
        rhs.sequent.formulas[i] = lhs.sequent.formulas[i];
      return equivalent(lhs, rhs, max_states);
    });
  }

  // Yoneda pairs over the atoms
  std::vector<FormulaPtr> quants;
  {
    std::string x = "X";
    quants.push_back(Formula::forall(x, Formula::par(Formula::natom(x), Formula::atom(x))));
    for (auto& a : atoms)
      quants.push_back(Formula::forall(
          x, Formula::par(Formula::tensor(a, Formula::natom(x)), Formula::atom(x))));
  }
  for (auto& q : quants) {
    std::string nm = render(q);
    run("yoneda." + nm, [&] {
      ELinking fwd = compose(yo2_linking(q), yo1_linking(q), max_states);
      ELinking id = identity_linking(q);
      for (size_t i = 0; i < id.sequent.formulas.size(); i++)
        id.sequent.formulas[i] = fwd.sequent.formulas[i];
      return equivalent(fwd, id, max_states);
    });
    run("yoneda-lax." + nm, [&] {
      ELinking rev = compose(yo1_linking(q), yo2_linking(q), max_states);
      LaxLinking img = elink_yoneda(rev);
      LaxLinking id = lax_identity(yoneda_translate_formula(q));
      for (size_t i = 0; i < id.sequent.formulas.size(); i++)
        id.sequent.formulas[i] = img.sequent.formulas[i];
      return lax_equivalent(img, id, max_states);
    });
  }
  return rep;
}

std::string to_json(const SuiteReport& r) {
  nlohmann::json j;
  j["all_pass"] = r.all_pass();
  j["checks"] = nlohmann::json::array();
  for (auto& c : r.checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j.dump(2);
}

}  // namespace yonet
