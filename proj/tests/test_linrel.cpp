#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "opennet/linrel.hpp"
#include "test_util.hpp"

using namespace opennet;
using namespace opennet::testing;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Subspace span(Index n, std::initializer_list<std::initializer_list<double>> cols) {
  MatrixXd m(n, static_cast<Index>(cols.size()));
  Index j = 0;
  for (const auto& c : cols) {
    Index i = 0;
    for (double x : c) m(i++, j) = x;
    ++j;
  }
  return subspace_from_spanning(static_cast<std::size_t>(n), m);
}

// {(phi_x, iota, phi_y, iota) : iota = c (phi_y - phi_x)}.
LinearRelation resistor_relation(double c) {
  MatrixXd v(4, 2);
  v << 1, 0, -c, c, 0, 1, -c, c;
  return relation_from(2, 2, v);
}

LinearRelation random_relation(Rng& rng, std::size_t src, std::size_t tgt, std::size_t dim) {
  return relation_from(src, tgt, random_matrix(rng, static_cast<Index>(src + tgt), static_cast<Index>(dim)));
}

std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

TEST(Subspace, SpanningExamples) {
  EXPECT_EQ(span(2, {{1, 0}, {2, 0}}).dim(), 1u);
  EXPECT_TRUE(subspace_equal(span(2, {{1, 0}, {2, 0}}), span(2, {{1, 0}})));
  EXPECT_EQ(subspace_from_spanning(3, MatrixXd(3, 0)).dim(), 0u);
  EXPECT_EQ(span(2, {{1, 0}, {0, 1}}).dim(), 2u);
}

TEST(Subspace, BasisIsOrthonormalAndCanonical) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixXd v = random_matrix(rng, 6, 3);
    const Subspace a = subspace_from_spanning(v);
    const Subspace b = subspace_from_spanning(v * random_matrix(rng, 3, 3));
    EXPECT_LT((a.basis().transpose() * a.basis() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((a.basis() - b.basis()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Subspace, EqualityExamples) {
  const Subspace a = span(3, {{1, 2, 3}, {0, 1, 0}});
  EXPECT_TRUE(subspace_equal(a, a));
  EXPECT_FALSE(subspace_equal(span(2, {{1, 0}}), span(2, {{0, 1}})));
  EXPECT_TRUE(subspace_equal(span(2, {{1, 1}}), span(2, {{2, 2 + 1e-15}}), 1e-9));
  EXPECT_LT(subspace_distance(span(2, {{1, 1}}), span(2, {{2, 2 + 1e-15}})), 1e-15);
  EXPECT_FALSE(subspace_equal(span(2, {{1, 0}}), Subspace::full(2)));
}

TEST(Compose, GraphsComposeLikeMatrices) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd a = random_matrix(rng, 4, 3);
    const MatrixXd b = random_matrix(rng, 2, 4);
    EXPECT_LT(relation_distance(compose_relations(graph_of(a), graph_of(b)), graph_of(b * a)), 1e-10);
  }
}

TEST(Compose, SeriesResistors) {
  const double c1 = 2.0, c2 = 3.0;
  const LinearRelation series = compose_relations(resistor_relation(c1), resistor_relation(c2));
  EXPECT_EQ(series.dim(), 2u);
  EXPECT_LT(relation_distance(series, resistor_relation(c1 * c2 / (c1 + c2))), 1e-12);
}

TEST(Compose, IdentityIsNeutral) {
  Rng rng(43);
  const LinearRelation r = random_relation(rng, 3, 2, 2);
  EXPECT_LT(relation_distance(compose_relations(identity_relation(3), r), r), 1e-12);
  EXPECT_LT(relation_distance(compose_relations(r, identity_relation(2)), r), 1e-12);
}

TEST(Compose, Associativity) {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t u = draw(rng, 0, 4), v = draw(rng, 0, 4), w = draw(rng, 0, 4), z = draw(rng, 0, 4);
    const auto a = random_relation(rng, u, v, draw(rng, 0, u + v));
    const auto b = random_relation(rng, v, w, draw(rng, 0, v + w));
    const auto c = random_relation(rng, w, z, draw(rng, 0, w + z));
    const auto left = compose_relations(compose_relations(a, b), c);
    const auto right = compose_relations(a, compose_relations(b, c));
    EXPECT_TRUE(relation_equal(left, right, 1e-8));
  }
}

TEST(Compose, TransposeIsContravariant) {
  Rng rng(45);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t u = draw(rng, 0, 4), v = draw(rng, 0, 4), w = draw(rng, 0, 4);
    const auto a = random_relation(rng, u, v, draw(rng, 0, u + v));
    const auto b = random_relation(rng, v, w, draw(rng, 0, v + w));
    const auto lhs = transpose_relation(compose_relations(a, b));
    const auto rhs = compose_relations(transpose_relation(b), transpose_relation(a));
    EXPECT_TRUE(relation_equal(lhs, rhs, 1e-8));
  }
}

TEST(Compose, DimensionMismatchThrows) {
  EXPECT_ANY_THROW(compose_relations(identity_relation(2), identity_relation(3)));
}

TEST(Oplus, Examples) {
  EXPECT_LT(relation_distance(oplus(identity_relation(2), identity_relation(3)), identity_relation(5)), 1e-12);
  Rng rng(46);
  const auto a = random_relation(rng, 2, 3, 2);
  const auto b = random_relation(rng, 1, 2, 3);
  const auto s = oplus(a, b);
  EXPECT_EQ(s.source_dim(), 3u);
  EXPECT_EQ(s.target_dim(), 5u);
  EXPECT_EQ(s.dim(), 5u);
  const LinearRelation zero(0, 0, Subspace::zero(0));
  EXPECT_LT(relation_distance(oplus(zero, a), a), 1e-12);
}

TEST(Transpose, Examples) {
  Rng rng(47);
  const auto r = random_relation(rng, 2, 3, 3);
  EXPECT_LT(relation_distance(transpose_relation(transpose_relation(r)), r), 1e-14);
  const MatrixXd a = random_matrix(rng, 3, 3) + 3 * MatrixXd::Identity(3, 3);
  EXPECT_LT(relation_distance(transpose_relation(graph_of(a)), graph_of(a.inverse())), 1e-10);

  // Seen from the other side the resistor is the same, with the current reversed.
  const auto t = transpose_relation(resistor_relation(2.5));
  MatrixXd swapped(4, 2);
  swapped << 1, 0, 2.5, -2.5, 0, 1, 2.5, -2.5;
  EXPECT_LT(relation_distance(t, relation_from(2, 2, swapped)), 1e-12);
}

TEST(PortRelation, SinglePoint) {
  const std::vector<std::size_t> i{0}, o{0};
  const auto s = port_relation(i, o, 1);
  EXPECT_EQ(s.source_dim(), 2u);
  EXPECT_EQ(s.target_dim(), 4u);
  EXPECT_EQ(s.dim(), 3u);
  // (psi, iota, psi'_X, iota'_X, psi'_Y, iota'_Y)
  VectorXd v(6);
  v << 1.5, 2.0 - 0.5, 1.5, 0.5, 1.5, 2.0;
  EXPECT_TRUE(s.space().contains(v));
  v(1) = 0.0;
  EXPECT_FALSE(s.space().contains(v));
}

TEST(PortRelation, InjectiveDisjointIsAnIsomorphism) {
  const std::vector<std::size_t> i{1}, o{0, 2};
  const auto s = port_relation(i, o, 3);
  EXPECT_EQ(s.dim(), 6u);
  // Functional in both directions: no kernel, no indeterminacy.
  EXPECT_EQ(apply_relation_to_subspace(s, Subspace::zero(6)).dim(), 0u);
  EXPECT_EQ(apply_relation_to_subspace(transpose_relation(s), Subspace::zero(6)).dim(), 0u);
  VectorXd v(12);
  v << 1, 2, 3, 10, 20, 30, 2, -20, 1, 3, 10, 30;
  EXPECT_TRUE(s.space().contains(v));
}

TEST(PortRelation, TwoInputsOnOneTerminal) {
  const std::vector<std::size_t> i{0, 0}, o{};
  const auto s = port_relation(i, o, 1);
  EXPECT_EQ(s.source_dim(), 2u);
  EXPECT_EQ(s.target_dim(), 4u);
  EXPECT_EQ(s.dim(), 3u);
  VectorXd v(6);
  v << 0.7, -(1.0 + 2.0), 0.7, 0.7, 1.0, 2.0;
  EXPECT_TRUE(s.space().contains(v));
}

TEST(ApplyRelation, Examples) {
  Rng rng(48);
  const Subspace s = subspace_from_spanning(random_matrix(rng, 3, 2));
  EXPECT_LT(subspace_distance(apply_relation_to_subspace(identity_relation(3), s), s), 1e-12);
  const MatrixXd a = random_matrix(rng, 4, 3);
  EXPECT_LT(subspace_distance(apply_relation_to_subspace(graph_of(a), s), subspace_from_spanning(a * s.basis())),
            1e-10);

  // Single resistor: graph of the DtN map, pushed through S[i,o].
  const double c = 2.0;
  MatrixXd dtn(2, 2);
  dtn << c, -c, -c, c;
  const std::vector<std::size_t> in{0}, out{1};
  const Subspace behavior = apply_relation_to_subspace(port_relation(in, out, 2), graph_of(dtn).space());
  MatrixXd expected(4, 2);
  expected << 1, 0, -c, c, 0, 1, -c, c;
  EXPECT_LT(subspace_distance(behavior, subspace_from_spanning(expected)), 1e-12);
}

TEST(ApplyRelation, MonotoneUnderInclusion) {
  Rng rng(49);
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = random_relation(rng, 4, 3, 3);
    const MatrixXd big = random_matrix(rng, 4, 3);
    const Subspace small_s = subspace_from_spanning(big.leftCols(1));
    const Subspace big_s = subspace_from_spanning(big);
    const Subspace small_img = apply_relation_to_subspace(r, small_s);
    const Subspace big_img = apply_relation_to_subspace(r, big_s);
    EXPECT_LE(small_img.dim(), big_img.dim());
    for (Index k = 0; k < small_img.basis().cols(); ++k) EXPECT_TRUE(big_img.contains(small_img.basis().col(k), 1e-8));
    const std::size_t kernel = apply_relation_to_subspace(r, Subspace::zero(4)).dim();
    EXPECT_LE(big_img.dim(), big_s.dim() + kernel);
  }
}

TEST(Alpha, Examples) {
  EXPECT_LT(relation_distance(alpha(VectorXd::Ones(3)), identity_relation(6)), 1e-15);
  VectorXd q(2);
  q << 2, 1;
  VectorXd u(4), w(4);
  u << 1, 1, 5, 7;
  w << 2, 1, 5, 7;
  VectorXd pair(8);
  pair << u, w;
  EXPECT_TRUE(alpha(q).space().contains(pair, 1e-14));
  EXPECT_LT(relation_distance(compose_relations(alpha_inverse(q), alpha(q)), identity_relation(4)), 1e-14);
  EXPECT_LT(relation_distance(alpha_inverse(q), alpha(q.cwiseInverse())), 1e-15);
}

TEST(Alpha, PreservesTheSymplecticStructure) {
  EXPECT_TRUE(symplectic_preserved_by_alpha(VectorXd::Ones(4)));
  Rng rng(50);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd q = random_vector(rng, 5, std::log(0.1), std::log(10.0)).array().exp();
    EXPECT_LT(alpha_symplectic_deviation(q, 100, trial + 1), 1e-12);
  }
  VectorXd q(2);
  q << 2, 1;
  VectorXd u = VectorXd::Zero(4), v = VectorXd::Zero(4);
  u(0) = 1;
  v(2) = 1;
  EXPECT_DOUBLE_EQ(SymplecticForm::standard(2)(u, v), 1.0);
  VectorXd au = u, av = v;
  au(0) = 2;
  EXPECT_DOUBLE_EQ(SymplecticForm(q)(au, av), 1.0);
}

TEST(Lagrangian, Examples) {
  VectorXd w(2);
  w << 0.5, 3.0;
  EXPECT_TRUE(is_lagrangian(identity_relation(4), w, w));

  MatrixXd two_state(4, 2);
  two_state << 1, 0, -3, 6, 0, 1, -3, 6;
  EXPECT_TRUE(is_lagrangian(relation_from(2, 2, two_state), VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 1.0)));

  const LinearRelation full(2, 2, Subspace::full(4));
  EXPECT_FALSE(is_lagrangian(full, VectorXd::Ones(1), VectorXd::Ones(1)));
}

TEST(Lagrangian, ClosedUnderCompositionAndSum) {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t x = draw(rng, 0, 3), y = draw(rng, 0, 3), z = draw(rng, 0, 3);
    const auto a = random_lagrangian(rng, x, y);
    const auto b = random_lagrangian(rng, y, z);
    const VectorXd wx = VectorXd::Ones(static_cast<Index>(x));
    const VectorXd wy = VectorXd::Ones(static_cast<Index>(y));
    const VectorXd wz = VectorXd::Ones(static_cast<Index>(z));
    ASSERT_TRUE(is_lagrangian(a, wx, wy));
    ASSERT_TRUE(is_lagrangian(b, wy, wz));
    EXPECT_TRUE(is_lagrangian(compose_relations(a, b), wx, wz));

    // oplus keeps source blocks (position, momentum) of each factor together, so
    // reorder into (positions, momenta) before testing.
    const auto s = oplus(a, b);
    const std::size_t src = 2 * (x + y), tgt = 2 * (y + z);
    std::vector<std::size_t> order;
    auto block = [&](std::size_t start, std::size_t n1, std::size_t n2) {
      for (std::size_t k = 0; k < n1; ++k) order.push_back(start + k);
      for (std::size_t k = 0; k < n2; ++k) order.push_back(start + 2 * n1 + k);
      for (std::size_t k = 0; k < n1; ++k) order.push_back(start + n1 + k);
      for (std::size_t k = 0; k < n2; ++k) order.push_back(start + 2 * n1 + n2 + k);
    };
    block(0, x, y);
    block(src, y, z);
    const auto p = permute_relation(s, order, src);
    EXPECT_EQ(p.target_dim(), tgt);
    VectorXd ws(static_cast<Index>(x + y)), wt(static_cast<Index>(y + z));
    ws.setOnes();
    wt.setOnes();
    EXPECT_TRUE(is_lagrangian(p, ws, wt));
  }
}
