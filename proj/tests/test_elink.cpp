#include <algorithm>
#include <functional>

#include "doctest.h"
#include "gen.hpp"
#include "yonet/elink.hpp"
#include "yonet/net.hpp"

using namespace yonet;

namespace {

// Fig-style linkings over ex X.((~Y @ X) * ~X), all X.((Y * ~X) @ X)
ELinking example_linking(const std::string& target) {
  ELinking l;
  l.sequent.formulas = {parse_formula("ex X.((~Y @ X) * ~X)"),
                        parse_formula("all X1.((Y * ~X1) @ X1)")};
  l.edges = {mk_edge(NodeRef{0, "BLL"}, NodeRef{1, "BLL"}),
             mk_edge(NodeRef{1, "BLR"}, NodeRef{1, "BR"})};
  l.witness[NodeRef{0, ""}] = NodeRef::parse(target);
  return l;
}

GNet example_net_left() {
  return gnet_from_json(R"json({
    "sequent": ["ex X.((~Y @ X) * ~X)", "all X1.((Y * ~X1) @ X1)"],
    "axioms": [["0:BLL","1:BLL"], ["0:BLR","1:BLR"], ["0:BR","1:BR"]],
    "witnesses": {"0:": "X1"}
  })json");
}

GNet example_net_right() {
  return gnet_from_json(R"json({
    "sequent": ["ex X.((~Y @ X) * ~X)", "all X1.((Y * ~X1) @ X1)"],
    "axioms": [["0:BLL","0:BLR"], ["0:BR","1:BLL"], ["1:BLR","1:BR"]],
    "witnesses": {"0:": "Y"}
  })json");
}

}  // namespace

TEST_CASE("co-edges of a sequent") {
  Sequent s1;
  s1.formulas = {parse_formula("ex X.(X * ~X)")};
  CHECK(coedges(s1).size() == 1);
  CHECK(coedges(s1)[0].pos == NodeRef{0, "BL"});
  CHECK(coedges(s1)[0].neg == NodeRef{0, "BR"});

  Sequent s2;
  s2.formulas = {parse_formula("~Y"), parse_formula("Y")};
  CHECK(coedges(s2).empty());

  Sequent s3;
  s3.formulas = {parse_formula("ex X.((~Y @ X) * ~X)"), parse_formula("all X1.((Y * ~X1) @ X1)")};
  auto cs = coedges(s3);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].exists == NodeRef{0, ""});
}

TEST_CASE("linking validation") {
  ELinking l = example_linking("1:BR");
  CHECK_NOTHROW(validate_elinking(l));

  ELinking no_wit = l;
  no_wit.witness.clear();
  CHECK_THROWS_AS(validate_elinking(no_wit), ValidationError);

  ELinking missing_edge = l;
  missing_edge.edges.pop_back();
  CHECK_THROWS_AS(validate_elinking(missing_edge), ValidationError);
}

TEST_CASE("dependency graph and ground witnesses") {
  // two existential formulas, one witness inside the other's body
  ELinking l;
  l.sequent.formulas = {parse_formula("ex P.((~Y @ P) * ~P)"), parse_formula("ex Q.((~Z @ Q) * ~Q)"),
                        parse_formula("Y"), parse_formula("Z")};
  l.edges = {mk_edge(NodeRef{0, "BLL"}, NodeRef{2, ""}),
             mk_edge(NodeRef{1, "BLL"}, NodeRef{3, ""})};
  l.witness[NodeRef{0, ""}] = NodeRef{1, "BL"};  // (~Z @ Q): depends on Q
  l.witness[NodeRef{1, ""}] = NodeRef{2, ""};    // ground: Y
  CHECK_NOTHROW(validate_elinking(l));

  DependencyGraph d = dependency_graph(l);
  REQUIRE(d.arcs.size() == 1);
  CHECK(d.coedges[d.arcs[0].first].exists == NodeRef{0, ""});
  CHECK(d.coedges[d.arcs[0].second].exists == NodeRef{1, ""});
  CHECK(is_acyclic(l));

  CHECK(render(ground_witness(l, d.coedges[1])) == "Y");
  CHECK(render(ground_witness(l, d.coedges[0])) == "(~Z @ Y)");

  // a two-cycle of witnesses
  ELinking c = l;
  c.witness[NodeRef{0, ""}] = NodeRef{1, "BL"};
  c.witness[NodeRef{1, ""}] = NodeRef{0, "BL"};
  CHECK(!is_acyclic(c));
  CHECK_THROWS_AS(ground_witness(c, d.coedges[0]), CyclicWitness);
  CHECK(!is_correct_elinking(c));
}

TEST_CASE("expansion reproduces the example nets") {
  ELinking left = example_linking("1:BR");
  GNet gl = expand(left);
  CHECK_NOTHROW(validate_structure(gl));
  CHECK(gnet_iso(gl, example_net_left()));
  CHECK(is_correct_elinking(left));

  ELinking right = example_linking("1:BLL");
  GNet gr = expand(right);
  CHECK(gnet_iso(gr, example_net_right()));
  CHECK(is_correct_elinking(right));
}

TEST_CASE("some witness target makes the example incorrect") {
  // enumerate every node as a target; the two figure targets are correct,
  // and at least one other target must fail
  ELinking base = example_linking("1:BR");
  std::vector<NodeRef> nodes;
  std::function<void(const FormulaPtr&, NodeRef)> walk = [&](const FormulaPtr& f, NodeRef at) {
    nodes.push_back(at);
    if (f->is_binary()) {
      walk(f->left, NodeRef{at.root, at.path + "L"});
      walk(f->right, NodeRef{at.root, at.path + "R"});
    } else if (f->is_quant()) {
      walk(f->body, NodeRef{at.root, at.path + "B"});
    }
  };
  for (int i = 0; i < 2; i++) walk(base.sequent.formulas[i], NodeRef{i, ""});

  int correct = 0, incorrect = 0;
  for (auto& t : nodes) {
    ELinking cand = base;
    cand.witness[NodeRef{0, ""}] = t;
    if (is_correct_elinking(cand)) correct++;
    else incorrect++;
  }
  CHECK(correct >= 2);
  CHECK(incorrect >= 1);
}

TEST_CASE("identity linkings") {
  ELinking idy = identity_linking(parse_formula("Y"));
  CHECK(idy.edges.size() == 1);
  CHECK(idy.witness.empty());
  CHECK(is_correct_elinking(idy));

  FormulaPtr a = Formula::forall("X", parse_formula("((Y * ~X) @ X)"));
  ELinking ida = identity_linking(a);
  REQUIRE(ida.witness.size() == 1);
  CHECK(ida.witness.count(NodeRef{0, ""}) == 1);
  CHECK(ida.witness.at(NodeRef{0, ""}) == NodeRef{1, "BR"});
  CHECK(ida.edges.size() == 2);
  CHECK(is_correct_elinking(ida));
  // the expansion is the left example net up to the bound name
  CHECK(gnet_iso(expand(ida), example_net_left()));

  // nested quantifiers in a side formula
  FormulaPtr inner = Formula::forall("W", parse_formula("((Z * ~W) @ W)"));
  FormulaPtr big = Formula::forall(
      "X", Formula::par(Formula::tensor(inner, Formula::natom("X")), Formula::atom("X")));
  ELinking idb = identity_linking(big);
  CHECK(is_correct_elinking(idb));
}

TEST_CASE("random identities expand to correct nets") {
  gen::Rng rng(3);
  for (int i = 0; i < 30; i++) {
    FormulaPtr a = gen::random_fragment(rng, 3);
    ELinking l = identity_linking(a);
    CHECK(is_correct_elinking(l));
  }
}

TEST_CASE("json round trip") {
  ELinking l = example_linking("1:BR");
  ELinking back = elinking_from_json(to_json(l));
  CHECK(back == l);
}
