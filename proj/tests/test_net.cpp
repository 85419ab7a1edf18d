#include "doctest.h"

#include <algorithm>
#include <functional>

#include "gen.hpp"
#include "yonet/elink.hpp"
#include "yonet/net.hpp"

using namespace yonet;

namespace {

GNet axiom_net() {
  return gnet_from_json(R"json({"sequent":["~X","X"],"axioms":[["0:","1:"]],"witnesses":{}})json");
}

// the two nets of the running example: instantiations of
// ex X.((~Y @ X) * ~X), all X.((Y * ~X) @ X) with witnesses X and Y
GNet example_net_left() {
  return gnet_from_json(R"json({
    "sequent": ["ex X.((~Y @ X) * ~X)", "all X.((Y * ~X) @ X)"],
    "axioms": [["0:BLL","1:BLL"], ["0:BLR","1:BLR"], ["0:BR","1:BR"]],
    "witnesses": {"0:": "X"}
  })json");
}

GNet example_net_right() {
  return gnet_from_json(R"json({
    "sequent": ["ex X.((~Y @ X) * ~X)", "all X.((Y * ~X) @ X)"],
    "axioms": [["0:BLL","0:BLR"], ["0:BR","1:BLL"], ["1:BLR","1:BR"]],
    "witnesses": {"0:": "Y"}
  })json");
}

}  // namespace

TEST_CASE("validation of structures") {
  GNet ax = axiom_net();
  CHECK_NOTHROW(validate_structure(ax));

  GNet left = example_net_left();
  CHECK_NOTHROW(validate_structure(left));
  auto js = jumps(left);
  REQUIRE(js.count(NodeRef{1, ""}) == 1);
  CHECK(js.at(NodeRef{1, ""}).size() == 1);
  CHECK(js.at(NodeRef{1, ""})[0] == NodeRef{0, ""});

  GNet right = example_net_right();
  CHECK_NOTHROW(validate_structure(right));
  CHECK(jumps(right).at(NodeRef{1, ""}).empty());

  GNet dangling = ax;
  dangling.axioms.clear();
  CHECK_THROWS_AS(validate_structure(dangling), ValidationError);

  GNet badwit = left;
  badwit.witnesses.clear();
  CHECK_THROWS_AS(validate_structure(badwit), ValidationError);
}

TEST_CASE("switching correctness") {
  CHECK(is_correct_gnet(axiom_net()));
  CHECK(is_correct_gnet(example_net_left()));
  CHECK(is_correct_gnet(example_net_right()));

  // crossing axioms between two pars: some switching disconnects
  GNet crossing = gnet_from_json(R"json({
    "sequent": ["(~X @ X)", "(~X @ X)"],
    "axioms": [["0:L","1:R"], ["0:R","1:L"]],
    "witnesses": {}
  })json");
  CHECK_NOTHROW(validate_structure(crossing));
  CHECK(!is_correct_gnet(crossing));

  // a tensor closing its own axiom: cyclic
  GNet cyc = gnet_from_json(R"json({
    "sequent": ["(X * ~X)"],
    "axioms": [["0:L","0:R"]],
    "witnesses": {}
  })json");
  CHECK(!is_correct_gnet(cyc));
}

TEST_CASE("frame of a net") {
  GNet ax = axiom_net();
  GNet f0 = frame(ax);
  CHECK(f0.sequent.formulas.size() == 2);
  CHECK(f0.axioms.size() == 1);

  GNet left = example_net_left();
  GNet fr = frame(left);
  // quantifiers are gone, one fresh axiom encodes the jump
  for (auto& f : fr.sequent.formulas) CHECK(bound_vars(f).empty());
  CHECK(fr.axioms.size() == left.axioms.size() + 1);
  CHECK(is_correct_gnet(fr));

  GNet right = example_net_right();
  GNet fr2 = frame(right);
  CHECK(fr2.axioms.size() == right.axioms.size());
  CHECK(is_correct_gnet(fr2));
}

TEST_CASE("frames of correct nets are correct") {
  gen::Rng rng(101);
  for (int i = 0; i < 25; i++) {
    ELinking l = gen::random_linking(rng, 2, 1);
    GNet g = expand(l);
    if (!is_correct_gnet(g)) continue;
    GNet fr = frame(g);
    for (auto& f : fr.sequent.formulas) CHECK(bound_vars(f).empty());
    CHECK(is_correct_gnet(fr));
  }
}

TEST_CASE("sequentialization of the examples") {
  Derivation d0 = sequentialize(axiom_net());
  CHECK(d0.rule == Rule::Ax);
  CHECK(gnet_iso(net_of_derivation(d0), axiom_net()));

  GNet left = example_net_left();
  Derivation dl = sequentialize(left);
  CHECK(gnet_iso(net_of_derivation(dl), left));

  GNet right = example_net_right();
  Derivation dr = sequentialize(right);
  CHECK(gnet_iso(net_of_derivation(dr), right));

  GNet crossing = gnet_from_json(R"json({
    "sequent": ["(~X @ X)", "(~X @ X)"],
    "axioms": [["0:L","1:R"], ["0:R","1:L"]],
    "witnesses": {}
  })json");
  CHECK_THROWS_AS(sequentialize(crossing), NotSequentializable);
}

TEST_CASE("sequentialization round trips on expansions") {
  gen::Rng rng(55);
  for (int i = 0; i < 25; i++) {
    ELinking l = gen::random_linking(rng, 2, 1);
    GNet g = expand(l);
    Derivation d = sequentialize(g);
    CHECK(gnet_iso(net_of_derivation(d), g));
  }
}

TEST_CASE("correctness agrees with sequentialization on small structures") {
  // all matchings over a pool of small sequents
  std::vector<std::vector<std::string>> pool = {
      {"(~X @ X)", "(X * ~X)"},
      {"((~X @ X) * Y)", "~Y"},
      {"(~X @ ~Y)", "(X * Y)"},
      {"(~X @ X)", "(~Y @ Y)"},
  };
  for (auto& seq : pool) {
    GNet base;
    for (auto& f : seq) base.sequent.formulas.push_back(parse_formula(f));
    // enumerate perfect matchings of the leaves by brute force
    std::vector<std::pair<NodeRef, FormulaPtr>> pos, neg;
    std::function<void(const FormulaPtr&, NodeRef)> walk = [&](const FormulaPtr& f, NodeRef at) {
      if (f->tag == Conn::Atom) pos.emplace_back(at, f);
      else if (f->tag == Conn::NegAtom) neg.emplace_back(at, f);
      else if (f->is_binary()) {
        walk(f->left, NodeRef{at.root, at.path + "L"});
        walk(f->right, NodeRef{at.root, at.path + "R"});
      }
    };
    for (int i = 0; i < static_cast<int>(base.sequent.formulas.size()); i++)
      walk(base.sequent.formulas[i], NodeRef{i, ""});
    REQUIRE(pos.size() == neg.size());
    std::vector<int> perm(pos.size());
    for (size_t i = 0; i < perm.size(); i++) perm[i] = static_cast<int>(i);
    int tested = 0;
    do {
      GNet g = base;
      bool ok = true;
      for (size_t i = 0; i < perm.size(); i++) {
        if (pos[i].second->var != neg[perm[i]].second->var) {
          ok = false;
          break;
        }
        g.axioms.push_back(mk_edge(pos[i].first, neg[perm[i]].first));
      }
      if (!ok) continue;
      tested++;
      bool correct = is_correct_gnet(g);
      CHECK(correct == is_correct_gnet_enumerated(g));
      bool seq = true;
      try {
        Derivation d = sequentialize(g);
        CHECK(gnet_iso(net_of_derivation(d), g));
      } catch (const NotSequentializable&) {
        seq = false;
      }
      CHECK(correct == seq);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(tested > 0);
  }
}

TEST_CASE("net cut elimination: axiom chain") {
  GNet chain = gnet_from_json(R"json({
    "sequent": ["~X", "X", "~X", "X"],
    "cuts": [[1, 2]],
    "axioms": [["0:","1:"], ["2:","3:"]],
    "witnesses": {}
  })json");
  CHECK_NOTHROW(validate_structure(chain));
  GNet red = gnet_reduce(chain);
  CHECK(red.sequent.cuts.empty());
  CHECK(gnet_iso(red, axiom_net()));
}

TEST_CASE("net cut elimination: multiplicative and quantifier cuts") {
  // identity expansions cut against each other normalize to a cut-free net
  gen::Rng rng(77);
  for (int i = 0; i < 12; i++) {
    FormulaPtr a = gen::random_fragment(rng, 2);
    GNet g1 = expand(identity_linking(a));
    GNet g2 = expand(identity_linking(a));
    GNet joined = join_cut(g1, 1, g2, 0);
    REQUIRE(is_correct_gnet(joined));
    GNet cur = joined;
    while (auto next = gnet_reduce_step(cur)) {
      cur = *next;
      CHECK(is_correct_gnet(cur));
    }
    CHECK(cur.sequent.cuts.empty());
    CHECK(cur.sequent.formulas.size() == 2);
    CHECK(alpha_equal(cur.sequent.formulas[0], dual(a)));
  }
}

TEST_CASE("yoneda template nets") {
  std::vector<std::string> bodies = {"(~X @ X)", "((Y * ~X) @ X)", "((Y * (Z * ~X)) @ (W @ X))"};
  for (auto& btext : bodies) {
    FormulaPtr body = parse_formula(btext);
    FormulaPtr a = Formula::forall("X", body);
    GNet y1 = yo1_net(a);
    GNet y2 = yo2_net(a);
    CHECK_NOTHROW(validate_structure(y1));
    CHECK_NOTHROW(validate_structure(y2));
    CHECK(is_correct_gnet(y1));
    CHECK(is_correct_gnet(y2));
    CHECK(alpha_equal(y1.sequent.formulas[0], dual(yoneda_translate_formula(a))));
    CHECK(alpha_equal(y2.sequent.formulas[0], yoneda_translate_formula(a)));
    CHECK(alpha_equal(y2.sequent.formulas[1], dual(a)));
  }

  // the unit case: conclusions bot, all X.(~X @ X) with one thinning edge
  GNet y1u = yo1_net(parse_formula("all X.(~X @ X)"));
  CHECK(y1u.sequent.formulas[0]->tag == Conn::Bot);
  CHECK(y1u.thinning.size() == 1);

  gen::Rng rng(13);
  int done = 0;
  for (int i = 0; i < 40 && done < 10; i++) {
    FormulaPtr body = gen::random_fragment(rng, 2, 0);
    std::string x = "X";
    FormulaPtr spine = rng() % 2 ? Formula::natom(x)
                                 : Formula::tensor(gen::random_mll(rng, 1), Formula::natom(x));
    FormulaPtr hole = Formula::atom(x);
    FormulaPtr dpart = rng() % 2 ? hole : Formula::par(gen::random_mll(rng, 1), hole);
    FormulaPtr a = Formula::forall(x, Formula::par(spine, dpart));
    GNet y1 = yo1_net(a);
    GNet y2 = yo2_net(a);
    CHECK(is_correct_gnet(y1));
    CHECK(is_correct_gnet(y2));
    done++;
  }
  CHECK(done == 10);
}

TEST_CASE("yo pair composite reduces to a correct non-identity net") {
  FormulaPtr a = Formula::forall("X", parse_formula("(~X @ X)"));
  GNet y1 = yo1_net(a);
  GNet y2 = yo2_net(a);
  // cut the translated conclusions: the composite lives over ex/all
  GNet joined = join_cut(y2, 0, y1, 0);
  REQUIRE(is_correct_gnet(joined));
  GNet red = gnet_reduce(joined);
  CHECK(red.sequent.cuts.empty());
  CHECK(is_correct_gnet(red));
  REQUIRE(red.sequent.formulas.size() == 2);
  CHECK(alpha_equal(red.sequent.formulas[0], dual(a)));
  CHECK(alpha_equal(red.sequent.formulas[1], a));
  GNet idnet = expand(identity_linking(a));
  CHECK(!gnet_iso(red, idnet));
}

TEST_CASE("contraction agrees with switching enumeration") {
  gen::Rng rng(211);
  int checked = 0;
  for (int i = 0; i < 60; i++) {
    ELinking l = gen::random_linking(rng, 2, 2);
    GNet g = expand(l);
    CHECK(is_correct_gnet(g) == is_correct_gnet_enumerated(g));
    checked++;
    // also probe some broken variants: drop an axiom pair into a swap
    if (g.axioms.size() >= 2) {
      GNet bad = g;
      auto e1 = bad.axioms[0];
      auto e2 = bad.axioms[1];
      FormulaPtr a1 = NetIndex(bad).at(e1.first).formula;
      FormulaPtr a2 = NetIndex(bad).at(e2.first).formula;
      if (a1->var == a2->var && a1->tag == a2->tag) {
        bad.axioms[0] = mk_edge(e1.first, e2.second);
        bad.axioms[1] = mk_edge(e2.first, e1.second);
        try {
          validate_structure(bad);
          CHECK(is_correct_gnet(bad) == is_correct_gnet_enumerated(bad));
        } catch (const ValidationError&) {
        }
      }
    }
  }
  CHECK(checked == 60);
}
