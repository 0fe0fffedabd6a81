#include <gtest/gtest.h>

#include <array>
#include <map>

#include "test_util.hpp"

using namespace hsplab;
using namespace hsplab::testing;

namespace {

// Independent permutation arithmetic on image arrays (0-based), left action.
using Img = std::vector<std::size_t>;
Img compose(const Img& g, const Img& h) {
  Img out(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) out[x] = g[h[x]];
  return out;
}
Img images_of(const BlackBoxGroup& G, const Element& e, std::size_t n) {
  // Read images back through the text form "(a b ...)(...)" with 1-based points.
  const std::string s = G.format(e);
  Img img(n);
  for (std::size_t i = 0; i < n; ++i) img[i] = i;
  std::vector<std::size_t> cyc;
  std::size_t num = 0;
  bool in_num = false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      num = num * 10 + static_cast<std::size_t>(c - '0');
      in_num = true;
      continue;
    }
    if (in_num) {
      cyc.push_back(num - 1);
      num = 0;
      in_num = false;
    }
    if (c == ')') {
      for (std::size_t i = 0; i < cyc.size(); ++i) img[cyc[i]] = cyc[(i + 1) % cyc.size()];
      cyc.clear();
    }
  }
  return img;
}

std::vector<Img> all_perms(std::size_t n) {
  Img p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::vector<Img> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<BlackBoxGroup> backend_zoo() {
  std::vector<BlackBoxGroup> zoo;
  zoo.push_back(S(5, {"(1 2 3 4 5)", "(1 2)"}));
  zoo.push_back(make_group(GroupSpec{"gl3", Gf2MatrixSpec{3, {Gf2MatrixBackend::parse_rows("110/010/001", 3),
                                                                Gf2MatrixBackend::parse_rows("001/100/010", 3)}},
                                     {}}));
  zoo.push_back(make_group(affine_spec(4, "0001/1000/0100/0011")));
  zoo.push_back(make_group(wreath_spec(3)));
  zoo.push_back(make_group(extraspecial_spec(3)));
  zoo.push_back(make_group(extraspecial_spec(5, ExtraSpecialVariant::metacyclic)));
  zoo.push_back(make_group(abelian_spec({4, 6})));
  GroupSpec prod{"prod", ProductSpec{{permutation_spec(3, {"(1 2 3)", "(1 2)"}), abelian_spec({5})}}, {}};
  zoo.push_back(make_group(prod));
  // Quotient view: D8 modulo its center.
  const BlackBoxGroup d8 = dihedral(4);
  const Element z = d8.parse("(1 3)(2 4)");
  auto qv = std::make_shared<QuotientViewBackend>(d8, std::vector<Element>{z});
  zoo.emplace_back(qv, d8.generators(), "D8/Z");
  return zoo;
}

}  // namespace

TEST(Multiply, IdentityLaw) {
  const auto G = S(3, {"(1 2 3)", "(1 2)"});
  for (const auto& g : enumerate_closure(G, G.generators())) EXPECT_EQ(G.multiply(G.identity(), g), g);
}

TEST(Multiply, LeftActionConvention) {
  const auto G = S(3, {"(1 2 3)", "(1 2)"});
  EXPECT_EQ(G.multiply(perm(G, "(1 2)"), perm(G, "(1 3)")), perm(G, "(1 3 2)"));
}

TEST(Multiply, FullS3TableAgreesWithBruteForce) {
  const auto G = S(3, {"(1 2 3)", "(1 2)"});
  const auto elems = enumerate_closure(G, G.generators());
  ASSERT_EQ(elems.size(), 6u);
  for (const auto& a : elems) {
    for (const auto& b : elems) {
      EXPECT_EQ(images_of(G, G.multiply(a, b), 3), compose(images_of(G, a, 3), images_of(G, b, 3)));
    }
  }
}

TEST(Multiply, ElementaryAbelianIsXor) {
  const auto G = make_group(abelian_spec({2, 2, 2, 2}));
  EXPECT_EQ(G.multiply(G.parse("0b0110"), G.parse("0b0011")), G.parse("0b0101"));
}

TEST(Multiply, RejectsMalformedEncodings) {
  const auto G = S(3, {"(1 2 3)"});
  Bits junk(G.encoding_length());
  for (std::size_t i = 0; i < junk.size(); ++i) junk.set(i, true);
  try {
    G.multiply(junk, G.identity());
    FAIL() << "expected InvalidEncoding";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidEncoding);
  }
  EXPECT_THROW(G.invert(Bits(G.encoding_length() + 1)), Error);
}

TEST(Invert, Examples) {
  const auto G = S(3, {"(1 2 3)", "(1 2)"});
  EXPECT_EQ(G.invert(G.identity()), G.identity());
  EXPECT_EQ(G.invert(perm(G, "(1 2 3)")), perm(G, "(1 3 2)"));
  const auto Z = make_group(abelian_spec({2, 2, 2, 2, 2}));
  for (const auto& g : enumerate_closure(Z, Z.generators())) EXPECT_EQ(Z.invert(g), g);
}

TEST(Invert, AgreesWithBruteForceOverS4) {
  const auto G = S(4, {"(1 2 3 4)", "(1 2)"});
  Img id{0, 1, 2, 3};
  for (const auto& g : enumerate_closure(G, G.generators())) {
    EXPECT_EQ(compose(images_of(G, G.invert(g), 4), images_of(G, g, 4)), id);
  }
}

TEST(Power, Examples) {
  const auto G = S(3, {"(1 2 3)", "(1 2)"});
  const auto g = perm(G, "(1 2 3)");
  EXPECT_EQ(G.power(g, 0), G.identity());
  EXPECT_EQ(G.power(g, 3), G.identity());
  EXPECT_EQ(G.power(g, -1), G.invert(g));
  EXPECT_EQ(G.power(g, 7), g);
  EXPECT_EQ(G.power(g, -4), G.invert(g));
  EXPECT_EQ(G.power(g, std::numeric_limits<std::int64_t>::min()), G.power(g, 1));  // -2^63 = 1 mod 3
}

TEST(MakeGroup, FamilyOrders) {
  EXPECT_EQ(enumerate_closure(make_group(wreath_spec(2)), make_group(wreath_spec(2)).generators()).size(), 32u);
  const auto E = make_group(extraspecial_spec(3));
  EXPECT_EQ(enumerate_closure(E, E.generators()).size(), 27u);
  const auto P = S(4, {"(1 2)"});
  EXPECT_EQ(enumerate_closure(P, P.generators()).size(), 2u);
  const auto W3 = make_group(wreath_spec(3));
  EXPECT_EQ(enumerate_closure(W3, W3.generators()).size(), 128u);
  const auto M = make_group(extraspecial_spec(3, ExtraSpecialVariant::metacyclic));
  EXPECT_EQ(enumerate_closure(M, M.generators()).size(), 27u);
}

TEST(MakeGroup, ExtraSpecialCommutatorIsCenterOfOrderP) {
  for (auto v : {ExtraSpecialVariant::heisenberg, ExtraSpecialVariant::metacyclic}) {
    for (std::uint64_t p : {3u, 5u}) {
      const auto G = make_group(extraspecial_spec(p, v));
      const auto elems = enumerate_closure(G, G.generators());
      // Brute-force G' (generated by all commutators) and Z(G).
      std::vector<Element> comms;
      for (const auto& a : elems) {
        for (const auto& b : elems) comms.push_back(G.commutator(a, b));
      }
      const auto derived = key_set(G, comms);
      std::vector<Element> center;
      for (const auto& a : elems) {
        bool central = true;
        for (const auto& s : G.generators()) central = central && G.commute(a, s);
        if (central) center.push_back(a);
      }
      EXPECT_EQ(derived.size(), p);
      EXPECT_EQ(derived, key_set_of_elements(G, center));
    }
  }
}

TEST(MakeGroup, AffineFamilyOrder) {
  // Companion matrix of x^4 + x + 1 has order 15; |G| = 15 * 16.
  const auto G = make_group(affine_spec(4, "0001/1001/0100/0010"));
  EXPECT_EQ(enumerate_closure(G, G.generators()).size(), 240u);
  EXPECT_EQ(G.declared_normal().size(), 4u);
}

TEST(MakeGroup, RejectsBadSpecs) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::UnsupportedInstance;
  };
  EXPECT_EQ(code_of([] { make_group(affine_spec(3, "110/110/001")); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { make_group(extraspecial_spec(4)); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { make_group(extraspecial_spec(2)); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { parse_group_spec("kind = permutation\ndegree = 0\n"); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { parse_group_spec("kind = klein\n"); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { parse_group_spec("degree = 3\n"); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { parse_group_spec("kind = permutation\ndegree = 3\ngen = (1 4)\n"); }), ErrorCode::BadSpec);
  EXPECT_EQ(code_of([] { parse_group_spec("kind permutation\n"); }), ErrorCode::BadSpec);
}

TEST(GroupSpec, TextRoundTrip) {
  std::vector<GroupSpec> specs{permutation_spec(4, {"(1 2 3 4)", "(1 3)"}, "D8"), wreath_spec(3), extraspecial_spec(5),
                               affine_spec(4, "0001/1001/0100/0010"), abelian_spec({4, 6}),
                               GroupSpec{"p", ProductSpec{{wreath_spec(2), abelian_spec({3})}}, {}}};
  for (const auto& s : specs) {
    const std::string text = write_group_spec(s);
    EXPECT_EQ(parse_group_spec(text), s) << text;
  }
}

TEST(GroupSpec, CommentsAndNormalLines) {
  const auto spec = parse_group_spec(
      "# the Klein group inside S4\n"
      "kind = permutation   # trailing comment\n"
      "degree = 4\n"
      "gen = (1 2)(3 4)\n"
      "gen = (1 3)(2 4)\n"
      "normal = (1 2)(3 4)\n");
  const auto G = make_group(spec);
  EXPECT_EQ(enumerate_closure(G, G.generators()).size(), 4u);
  ASSERT_EQ(G.declared_normal().size(), 1u);
  EXPECT_EQ(G.declared_normal()[0], perm(G, "(1 2)(3 4)"));
}

TEST(Parse, HexAndBinaryForms) {
  const auto G = make_group(abelian_spec({4, 6}));
  const Element x = G.parse("(3, 5)");
  EXPECT_EQ(G.parse("0x" + x.to_hex()), x);
  EXPECT_EQ(G.parse("0b" + x.to_binary()), x);
  EXPECT_EQ(G.format(x), "(3,5)");
}

TEST(Closure, Examples) {
  const auto G = S(3, {"(1 2 3)", "(1 2)"});
  const auto e = enumerate_closure(G, std::vector<Element>{});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0], G.identity());
  EXPECT_EQ(enumerate_closure(G, std::vector<Element>{perm(G, "(1 2)"), perm(G, "(1 3)")}).size(), 6u);
  const auto Z = make_group(abelian_spec({2, 2, 2, 2}));
  EXPECT_EQ(enumerate_closure(Z, std::vector<Element>{Z.parse("0b0011")}).size(), 2u);
}

TEST(Closure, BoundExceeded) {
  const auto G = S(6, {"(1 2 3 4 5 6)", "(1 2)"});
  try {
    enumerate_closure(G, G.generators(), 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundExceeded);
  }
}

TEST(Closure, AgreesWithBruteForceSymmetricGroup) {
  const auto G = S(5, {"(1 2 3 4 5)", "(1 2)"});
  EXPECT_EQ(enumerate_closure(G, G.generators()).size(), all_perms(5).size());
}

TEST(Closure, ExtendMatchesFullClosure) {
  const auto G = dihedral(6);
  ElementSet s;
  s.insert(G, G.identity());
  std::vector<Element> gens;
  extend_closure(G, s, gens, perm(G, "(1 3 5)(2 4 6)"));
  EXPECT_EQ(s.size(), 3u);
  extend_closure(G, s, gens, perm(G, "(1 6)(2 5)(3 4)"));
  EXPECT_EQ(s, closure_set(G, gens));
  EXPECT_EQ(s.size(), 6u);
}

TEST(Axioms, ThousandRandomTriplesPerBackend) {
  Rng rng(2024);
  for (const auto& G : backend_zoo()) {
    const auto elems = enumerate_closure(G, G.generators());
    for (int t = 0; t < 1000; ++t) {
      const auto& a = elems[rng.below(elems.size())];
      const auto& b = elems[rng.below(elems.size())];
      const auto& c = elems[rng.below(elems.size())];
      ASSERT_TRUE(G.equal(G.multiply(G.multiply(a, b), c), G.multiply(a, G.multiply(b, c)))) << G.name();
      ASSERT_TRUE(G.equal(G.multiply(G.identity(), a), a)) << G.name();
      ASSERT_TRUE(G.equal(G.multiply(a, G.identity()), a)) << G.name();
      ASSERT_TRUE(G.is_identity(G.multiply(G.invert(a), a))) << G.name();
      if (G.unique_encoding()) {
        ASSERT_EQ(G.equal(a, b), a == b);
      }
    }
  }
}

TEST(QuotientView, NonUniqueEncodingsWitnessed) {
  const BlackBoxGroup d8 = dihedral(4);
  const Element z = d8.parse("(1 3)(2 4)");
  const Element r = d8.parse("(1 2 3 4)");
  auto qv = std::make_shared<QuotientViewBackend>(d8, std::vector<Element>{z});
  const BlackBoxGroup Q(qv, d8.generators(), "D8/Z");
  EXPECT_FALSE(Q.unique_encoding());
  const Element r3 = d8.multiply(r, z);
  EXPECT_NE(r, r3);
  EXPECT_TRUE(Q.equal(r, r3));
  EXPECT_TRUE(Q.is_identity(z));
  EXPECT_EQ(closure_set(Q, Q.generators()).size(), 4u);
  // A hiding oracle on the quotient respects the equality oracle.
  HidingOracle f(Q, std::vector<Element>{}, 7);
  EXPECT_EQ(f.eval(r), f.eval(r3));
  EXPECT_THROW(QuotientViewBackend(d8, std::vector<Element>{d8.parse("(1 3)")}), Error);
}

TEST(HidingOracle, Examples) {
  const auto G = S(4, {"(1 2 3 4)", "(1 2)"});
  const auto elems = enumerate_closure(G, G.generators());
  auto count_labels = [&](HidingOracle& f) {
    std::set<Label> ls;
    for (const auto& g : elems) ls.insert(f.eval(g));
    return ls.size();
  };
  HidingOracle whole(G, G.generators(), 1);
  EXPECT_EQ(count_labels(whole), 1u);
  HidingOracle trivial(G, std::vector<Element>{}, 1);
  EXPECT_EQ(count_labels(trivial), 24u);

  const auto Z4 = make_group(abelian_spec({4}));
  HidingOracle f(Z4, std::vector<Element>{Z4.parse("(2)")}, 3);
  const auto e = [&](int i) { return f.eval(Z4.parse("(" + std::to_string(i) + ")")); };
  EXPECT_EQ(e(0), e(2));
  EXPECT_EQ(e(1), e(3));
  EXPECT_NE(e(0), e(1));
}

TEST(HidingOracle, ExhaustiveCosetPropertyOnAllBackends) {
  Rng rng(77);
  for (const auto& G : backend_zoo()) {
    const auto elems = enumerate_closure(G, G.generators());
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Element> hg{elems[rng.below(elems.size())]};
      if (trial == 2) hg.push_back(elems[rng.below(elems.size())]);
      const ElementSet H = closure_set(G, hg);
      HidingOracle f(G, hg, rng.next());
      std::vector<Label> labels;
      for (const auto& g : elems) labels.push_back(f.peek(g));
      for (std::size_t i = 0; i < elems.size(); ++i) {
        for (std::size_t j = 0; j < elems.size(); ++j) {
          const bool same = H.contains(G, G.multiply(G.invert(elems[i]), elems[j]));
          ASSERT_EQ(labels[i] == labels[j], same) << G.name();
        }
      }
    }
  }
}

TEST(HidingOracle, QueryCountIsOnePerCall) {
  const auto G = make_group(wreath_spec(2));
  const auto elems = enumerate_closure(G, G.generators());
  HidingOracle f(G, std::vector<Element>{G.generators()[0]}, 5);
  for (std::size_t i = 0; i < 17; ++i) f.eval(elems[i]);
  EXPECT_EQ(f.query_count(), 17u);
  f.query(elems);  // one superposed call
  EXPECT_EQ(f.query_count(), 18u);
  f.simulate(elems);
  f.peek(elems[0]);
  EXPECT_EQ(f.query_count(), 18u);
  EXPECT_EQ(f.sim_count(), 17u + 2 * elems.size() + 1);
}

TEST(HidingOracle, ScramblingHidesRawMinimum) {
  const auto G = make_group(abelian_spec({2, 2, 2, 2}));
  HidingOracle plain(G, std::vector<Element>{G.parse("0b0011")}, 9, false);
  HidingOracle scrambled(G, std::vector<Element>{G.parse("0b0011")}, 9, true);
  EXPECT_EQ(plain.eval(G.parse("0b0011")), G.identity());
  EXPECT_NE(scrambled.eval(G.identity()), G.identity());
  LabelScrambler s(123);
  std::set<Bits> images;
  for (std::uint64_t v = 0; v < 256; ++v) {
    Bits b(8);
    b.set_field(0, 8, v);
    images.insert(s(b));
  }
  EXPECT_EQ(images.size(), 256u);  // a bijection
}

TEST(Bits, HexBinaryRoundTripAndOrder) {
  const Bits b = Bits::from_binary("1011001");
  EXPECT_EQ(b.to_binary(), "1011001");
  EXPECT_EQ(Bits::from_hex(b.to_hex(), 7), b);
  EXPECT_LT(Bits::from_binary("0111"), Bits::from_binary("1000"));
}

TEST(Rng, DerivedSeedsAreDeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(1, 5), derive_seed(1, 5));
  EXPECT_NE(derive_seed(1, 5), derive_seed(1, 6));
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.below(1000), b.below(1000));
  EXPECT_EQ(a.draws(), 100u);
}
