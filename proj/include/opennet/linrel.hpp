#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace opennet {

/// Rank decisions everywhere in this module: singular values below
/// tol * max(1, sigma_max) count as zero.
inline constexpr double default_rank_tol = 1e-10;

/// A linear subspace of R^n stored as an orthonormal basis (one column per
/// basis vector). Bases produced by subspace_from_spanning are canonical:
/// they depend only on the subspace, not on the spanning set.
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::size_t ambient_dim, Eigen::MatrixXd basis);

  static Subspace zero(std::size_t ambient_dim);
  static Subspace full(std::size_t ambient_dim);

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// Distance of v from the subspace relative to |v|.
  double residual(const Eigen::VectorXd& v) const;
  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const { return residual(v) <= tol; }

 private:
  std::size_t ambient_ = 0;
  Eigen::MatrixXd basis_{0, 0};
};

/// Columns of `vectors` span the result. Rank is decided by SVD with
/// relative threshold `tol`; the basis is then canonicalised (reduced row
/// echelon form followed by Gram-Schmidt).
Subspace subspace_from_spanning(const Eigen::MatrixXd& vectors, double tol = default_rank_tol);
Subspace subspace_from_spanning(std::size_t ambient_dim, const Eigen::MatrixXd& vectors,
                                double tol = default_rank_tol);

/// Largest principal angle between equal-dimension subspaces, computed as
/// asin of |(I - A A^T) B|_2. Returns pi/2 when the dimensions differ.
double subspace_distance(const Subspace& a, const Subspace& b);
bool subspace_equal(const Subspace& a, const Subspace& b, double tol = 1e-9);

/// A relation U ~> V as a subspace of U + V, source block first.
class LinearRelation {
 public:
  LinearRelation() = default;
  LinearRelation(std::size_t source_dim, std::size_t target_dim, Subspace space);

  std::size_t source_dim() const { return source_; }
  std::size_t target_dim() const { return target_; }
  std::size_t dim() const { return space_.dim(); }
  const Subspace& space() const { return space_; }

  auto source_block() const { return space_.basis().topRows(static_cast<Eigen::Index>(source_)); }
  auto target_block() const { return space_.basis().bottomRows(static_cast<Eigen::Index>(target_)); }

 private:
  std::size_t source_ = 0;
  std::size_t target_ = 0;
  Subspace space_;
};

double relation_distance(const LinearRelation& a, const LinearRelation& b);
bool relation_equal(const LinearRelation& a, const LinearRelation& b, double tol = 1e-9);

/// The graph {(u, A u)} of a linear map A : R^cols -> R^rows.
LinearRelation graph_of(const Eigen::MatrixXd& map);
LinearRelation identity_relation(std::size_t dim);

/// second o first = {(u, w) : exists v, (u, v) in first and (v, w) in second}.
/// Note the argument order: `first` is applied first.
LinearRelation compose_relations(const LinearRelation& first, const LinearRelation& second,
                                 double tol = default_rank_tol);

/// Block direct sum: source is (source(a), source(b)), target is
/// (target(a), target(b)).
LinearRelation oplus(const LinearRelation& a, const LinearRelation& b);

/// Relational transpose (the dagger): swaps source and target blocks.
LinearRelation transpose_relation(const LinearRelation& r);

/// Reorders the coordinates of the relation's ambient space:
/// new coordinate k is old coordinate order[k]. Source/target split is
/// given afresh.
LinearRelation permute_relation(const LinearRelation& r, std::span<const std::size_t> order,
                                std::size_t source_dim);

/// S[i,o] : R^T + R^T ~> R^X + R^X + R^Y + R^Y. Ambient coordinate order is
/// (psi, iota, psi'_X, iota'_X, psi'_Y, iota'_Y). Constraints:
///   psi'_X = psi o i,  psi'_Y = psi o o,
///   iota(n) = sum_{y in o^-1(n)} iota'_Y(y) - sum_{x in i^-1(n)} iota'_X(x).
/// `inputs` and `outputs` hold terminal slots in [0, terminal_count).
LinearRelation port_relation(std::span<const std::size_t> inputs, std::span<const std::size_t> outputs,
                             std::size_t terminal_count);

/// {y : exists x in s, (x, y) in r}.
Subspace apply_relation_to_subspace(const LinearRelation& r, const Subspace& s,
                                    double tol = default_rank_tol);

/// Graph of (phi, iota) -> (q phi, iota) on R^X + R^X.
LinearRelation alpha(const Eigen::VectorXd& q);
LinearRelation alpha_inverse(const Eigen::VectorXd& q);

/// omega((a, b), (a', b')) = <b', a>_w - <b, a'>_w with <u, v>_w = sum u_k v_k / w_k.
/// Weights of one give the standard form; weights q give omega_q.
class SymplecticForm {
 public:
  explicit SymplecticForm(Eigen::VectorXd weights);
  static SymplecticForm standard(std::size_t half_dim);

  std::size_t dim() const { return 2 * static_cast<std::size_t>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::MatrixXd gram() const;
  double operator()(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

 private:
  Eigen::VectorXd weights_;
};

/// max |B^T Omega B| / max|Omega| for Omega = (-omega_source) + omega_target.
double isotropy_residual(const LinearRelation& r, const Eigen::VectorXd& source_weights,
                         const Eigen::VectorXd& target_weights);

/// Lagrangian in conj(source) + target: half-dimensional and isotropic.
bool is_lagrangian(const LinearRelation& r, const Eigen::VectorXd& source_weights,
                   const Eigen::VectorXd& target_weights, double tol = 1e-8);

/// Largest |omega_q(alpha u, alpha v) - omega(u, v)| over random pairs.
double alpha_symplectic_deviation(const Eigen::VectorXd& q, int trials, std::uint64_t seed);
bool symplectic_preserved_by_alpha(const Eigen::VectorXd& q, double tol = 1e-12, int trials = 100,
                                   std::uint64_t seed = 1);

}  // namespace opennet
