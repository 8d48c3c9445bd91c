#include "opennet/linrel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "opennet/errors.hpp"

namespace opennet {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Index as_index(std::size_t n) { return static_cast<Index>(n); }

// Canonical orthonormal basis of the column span of an orthonormal U: the
// leading columns of a column-pivoted QR of the projector U U^T, with the
// signs fixed so that diag(R) > 0. The projector depends only on the
// subspace, so the result does too (up to ties in the pivot order).
MatrixXd canonical_basis(const MatrixXd& u) {
  const Index n = u.rows();
  const Index k = u.cols();
  if (k == 0 || k == n) {
    return k == 0 ? MatrixXd(n, 0) : MatrixXd(MatrixXd::Identity(n, n));
  }
  const MatrixXd projector = u * u.transpose();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(projector);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, k);
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

double rank_threshold(const Eigen::VectorXd& singular_values, double tol) {
  const double smax = singular_values.size() ? singular_values.maxCoeff() : 0.0;
  return tol * std::max(1.0, smax);
}

// Orthonormal basis of {c : m c = 0}.
MatrixXd null_space(const MatrixXd& m, double tol) {
  const Index cols = m.cols();
  if (m.rows() == 0 || cols == 0) return MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  const double thresh = rank_threshold(s, tol);
  Index rank = 0;
  for (Index j = 0; j < s.size(); ++j) {
    if (s(j) > thresh) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace

Subspace::Subspace(std::size_t ambient_dim, MatrixXd basis) : ambient_(ambient_dim), basis_(std::move(basis)) {
  if (basis_.rows() != as_index(ambient_)) {
    if (basis_.cols() == 0) {
      basis_.resize(as_index(ambient_), 0);
    } else {
      throw InvalidNetwork("subspace basis has wrong ambient dimension");
    }
  }
  if (basis_.cols() > 0) {
    const MatrixXd gram = basis_.transpose() * basis_;
    const double err = (gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-9) throw NumericalError("subspace basis is not orthonormal");
  }
}

Subspace Subspace::zero(std::size_t ambient_dim) { return Subspace(ambient_dim, MatrixXd(as_index(ambient_dim), 0)); }

Subspace Subspace::full(std::size_t ambient_dim) {
  return Subspace(ambient_dim, MatrixXd::Identity(as_index(ambient_dim), as_index(ambient_dim)));
}

double Subspace::residual(const VectorXd& v) const {
  const double norm = v.norm();
  if (norm == 0.0) return 0.0;
  const VectorXd r = v - basis_ * (basis_.transpose() * v);
  return r.norm() / norm;
}

Subspace subspace_from_spanning(const MatrixXd& vectors, double tol) {
  return subspace_from_spanning(static_cast<std::size_t>(vectors.rows()), vectors, tol);
}

Subspace subspace_from_spanning(std::size_t ambient_dim, const MatrixXd& vectors, double tol) {
  if (vectors.cols() == 0) return Subspace::zero(ambient_dim);
  if (vectors.rows() != as_index(ambient_dim)) {
    throw PreconditionError("spanning vectors do not share the ambient dimension");
  }
  if (ambient_dim == 0) return Subspace::zero(0);
  Eigen::JacobiSVD<MatrixXd> svd(vectors, Eigen::ComputeThinU);
  const VectorXd& s = svd.singularValues();
  const double thresh = rank_threshold(s, tol);
  Index rank = 0;
  for (Index j = 0; j < s.size(); ++j) {
    if (s(j) > thresh) ++rank;
  }
  return Subspace(ambient_dim, canonical_basis(svd.matrixU().leftCols(rank)));
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return std::numbers::pi / 2;
  if (a.dim() == 0) return 0.0;
  const MatrixXd d = b.basis() - a.basis() * (a.basis().transpose() * b.basis());
  Eigen::JacobiSVD<MatrixXd> svd(d);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

bool subspace_equal(const Subspace& a, const Subspace& b, double tol) {
  if (a.ambient_dim() != b.ambient_dim()) throw PreconditionError("subspace_equal: ambient dimensions differ");
  return a.dim() == b.dim() && subspace_distance(a, b) < tol;
}

LinearRelation::LinearRelation(std::size_t source_dim, std::size_t target_dim, Subspace space)
    : source_(source_dim), target_(target_dim), space_(std::move(space)) {
  if (space_.ambient_dim() != source_ + target_) {
    throw InvalidNetwork("relation subspace does not live in source + target");
  }
}

double relation_distance(const LinearRelation& a, const LinearRelation& b) {
  if (a.source_dim() != b.source_dim() || a.target_dim() != b.target_dim()) return std::numbers::pi / 2;
  return subspace_distance(a.space(), b.space());
}

bool relation_equal(const LinearRelation& a, const LinearRelation& b, double tol) {
  return a.source_dim() == b.source_dim() && a.target_dim() == b.target_dim() && a.dim() == b.dim() &&
         relation_distance(a, b) < tol;
}

LinearRelation graph_of(const MatrixXd& map) {
  const Index n = map.cols();
  const Index m = map.rows();
  MatrixXd span(n + m, n);
  span.topRows(n) = MatrixXd::Identity(n, n);
  span.bottomRows(m) = map;
  return LinearRelation(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                        subspace_from_spanning(static_cast<std::size_t>(n + m), span));
}

LinearRelation identity_relation(std::size_t dim) { return graph_of(MatrixXd::Identity(as_index(dim), as_index(dim))); }

LinearRelation compose_relations(const LinearRelation& first, const LinearRelation& second, double tol) {
  if (first.target_dim() != second.source_dim()) {
    throw PreconditionError("compose_relations: target dimension " + std::to_string(first.target_dim()) +
                            " does not match source dimension " + std::to_string(second.source_dim()));
  }
  const std::size_t u = first.source_dim();
  const std::size_t w = second.target_dim();
  const Index k1 = as_index(first.dim());
  const Index k2 = as_index(second.dim());
  if (k1 + k2 == 0) return LinearRelation(u, w, Subspace::zero(u + w));

  // Coefficient pairs (a, b) with first_V a = second_V b.
  MatrixXd coupling(as_index(first.target_dim()), k1 + k2);
  coupling.leftCols(k1) = first.target_block();
  coupling.rightCols(k2) = -second.source_block();
  const MatrixXd coeffs = null_space(coupling, tol);

  MatrixXd images(as_index(u + w), coeffs.cols());
  images.topRows(as_index(u)) = first.source_block() * coeffs.topRows(k1);
  images.bottomRows(as_index(w)) = second.target_block() * coeffs.bottomRows(k2);
  return LinearRelation(u, w, subspace_from_spanning(u + w, images, tol));
}

LinearRelation oplus(const LinearRelation& a, const LinearRelation& b) {
  const Index sa = as_index(a.source_dim()), sb = as_index(b.source_dim());
  const Index ta = as_index(a.target_dim()), tb = as_index(b.target_dim());
  const Index ka = as_index(a.dim()), kb = as_index(b.dim());
  MatrixXd basis = MatrixXd::Zero(sa + sb + ta + tb, ka + kb);
  basis.block(0, 0, sa, ka) = a.source_block();
  basis.block(sa, ka, sb, kb) = b.source_block();
  basis.block(sa + sb, 0, ta, ka) = a.target_block();
  basis.block(sa + sb + ta, ka, tb, kb) = b.target_block();
  const std::size_t ambient = static_cast<std::size_t>(sa + sb + ta + tb);
  return LinearRelation(static_cast<std::size_t>(sa + sb), static_cast<std::size_t>(ta + tb),
                        subspace_from_spanning(ambient, basis));
}

LinearRelation transpose_relation(const LinearRelation& r) {
  const Index s = as_index(r.source_dim());
  const Index t = as_index(r.target_dim());
  MatrixXd basis(s + t, as_index(r.dim()));
  basis.topRows(t) = r.target_block();
  basis.bottomRows(s) = r.source_block();
  return LinearRelation(r.target_dim(), r.source_dim(), subspace_from_spanning(r.source_dim() + r.target_dim(), basis));
}

LinearRelation permute_relation(const LinearRelation& r, std::span<const std::size_t> order, std::size_t source_dim) {
  const std::size_t n = r.source_dim() + r.target_dim();
  if (order.size() != n || source_dim > n) throw PreconditionError("permute_relation: bad coordinate order");
  std::vector<bool> used(n, false);
  MatrixXd basis(as_index(n), as_index(r.dim()));
  for (std::size_t k = 0; k < n; ++k) {
    if (order[k] >= n || used[order[k]]) throw PreconditionError("permute_relation: order is not a permutation");
    used[order[k]] = true;
    basis.row(as_index(k)) = r.space().basis().row(as_index(order[k]));
  }
  return LinearRelation(source_dim, n - source_dim, subspace_from_spanning(n, basis));
}

LinearRelation port_relation(std::span<const std::size_t> inputs, std::span<const std::size_t> outputs,
                             std::size_t terminal_count) {
  const Index t = as_index(terminal_count);
  const Index x = as_index(inputs.size());
  const Index y = as_index(outputs.size());
  const Index psi = 0, iota = t, psi_x = 2 * t, iota_x = 2 * t + x, psi_y = 2 * t + 2 * x,
              iota_y = 2 * t + 2 * x + y;
  const Index ambient = 2 * (t + x + y);

  // Free parameters: psi, iota'_X, iota'_Y.
  MatrixXd span = MatrixXd::Zero(ambient, t + x + y);
  for (Index n = 0; n < t; ++n) span(psi + n, n) = 1.0;
  for (Index k = 0; k < x; ++k) {
    const Index n = as_index(inputs[static_cast<std::size_t>(k)]);
    if (n >= t) throw PreconditionError("port_relation: input maps outside the terminal set");
    span(psi_x + k, n) = 1.0;
    span(iota_x + k, t + k) = 1.0;
    span(iota + n, t + k) = -1.0;
  }
  for (Index k = 0; k < y; ++k) {
    const Index n = as_index(outputs[static_cast<std::size_t>(k)]);
    if (n >= t) throw PreconditionError("port_relation: output maps outside the terminal set");
    span(psi_y + k, n) = 1.0;
    span(iota_y + k, t + x + k) = 1.0;
    span(iota + n, t + x + k) = 1.0;
  }
  return LinearRelation(static_cast<std::size_t>(2 * t), static_cast<std::size_t>(2 * (x + y)),
                        subspace_from_spanning(static_cast<std::size_t>(ambient), span));
}

Subspace apply_relation_to_subspace(const LinearRelation& r, const Subspace& s, double tol) {
  if (s.ambient_dim() != r.source_dim()) {
    throw PreconditionError("apply_relation_to_subspace: subspace does not live in the relation's source");
  }
  const LinearRelation from_zero(0, s.ambient_dim(), s);
  return compose_relations(from_zero, r, tol).space();
}

LinearRelation alpha(const VectorXd& q) {
  if ((q.array() <= 0.0).any() || !q.allFinite()) throw PreconditionError("alpha: populations must be positive");
  const Index n = q.size();
  VectorXd diag(2 * n);
  diag << q, VectorXd::Ones(n);
  return graph_of(diag.asDiagonal().toDenseMatrix());
}

LinearRelation alpha_inverse(const VectorXd& q) {
  if ((q.array() <= 0.0).any() || !q.allFinite()) throw PreconditionError("alpha: populations must be positive");
  return alpha(q.cwiseInverse());
}

SymplecticForm::SymplecticForm(VectorXd weights) : weights_(std::move(weights)) {
  if ((weights_.array() <= 0.0).any() || !weights_.allFinite()) {
    throw PreconditionError("symplectic weights must be positive and finite");
  }
}

SymplecticForm SymplecticForm::standard(std::size_t half_dim) {
  return SymplecticForm(VectorXd::Ones(as_index(half_dim)));
}

MatrixXd SymplecticForm::gram() const {
  const Index n = weights_.size();
  MatrixXd omega = MatrixXd::Zero(2 * n, 2 * n);
  for (Index k = 0; k < n; ++k) {
    omega(k, n + k) = 1.0 / weights_(k);
    omega(n + k, k) = -1.0 / weights_(k);
  }
  return omega;
}

double SymplecticForm::operator()(const VectorXd& u, const VectorXd& v) const {
  const Index n = weights_.size();
  if (u.size() != 2 * n || v.size() != 2 * n) throw PreconditionError("symplectic form: dimension mismatch");
  double sum = 0.0;
  for (Index k = 0; k < n; ++k) sum += (v(n + k) * u(k) - u(n + k) * v(k)) / weights_(k);
  return sum;
}

double isotropy_residual(const LinearRelation& r, const VectorXd& source_weights, const VectorXd& target_weights) {
  if (r.source_dim() != 2 * static_cast<std::size_t>(source_weights.size()) ||
      r.target_dim() != 2 * static_cast<std::size_t>(target_weights.size())) {
    throw PreconditionError("isotropy_residual: weights do not match the relation's half-dimensions");
  }
  if (r.dim() == 0) return 0.0;
  const Index s = as_index(r.source_dim());
  const Index t = as_index(r.target_dim());
  MatrixXd omega = MatrixXd::Zero(s + t, s + t);
  if (s) omega.topLeftCorner(s, s) = -SymplecticForm(source_weights).gram();
  if (t) omega.bottomRightCorner(t, t) = SymplecticForm(target_weights).gram();
  const double scale = omega.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const MatrixXd& b = r.space().basis();
  return (b.transpose() * omega * b).cwiseAbs().maxCoeff() / scale;
}

bool is_lagrangian(const LinearRelation& r, const VectorXd& source_weights, const VectorXd& target_weights,
                   double tol) {
  if (r.source_dim() % 2 || r.target_dim() % 2) {
    throw PreconditionError("is_lagrangian: source and target dimensions must be even");
  }
  if (2 * r.dim() != r.source_dim() + r.target_dim()) return false;
  return isotropy_residual(r, source_weights, target_weights) <= tol;
}

double alpha_symplectic_deviation(const VectorXd& q, int trials, std::uint64_t seed) {
  const Index n = q.size();
  const SymplecticForm omega = SymplecticForm::standard(static_cast<std::size_t>(n));
  const SymplecticForm omega_q(q);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  auto draw = [&] {
    VectorXd v(2 * n);
    for (Index k = 0; k < 2 * n; ++k) v(k) = coord(rng);
    return v;
  };
  auto apply_alpha = [&](VectorXd v) {
    v.head(n) = v.head(n).cwiseProduct(q);
    return v;
  };
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const VectorXd u = draw();
    const VectorXd v = draw();
    worst = std::max(worst, std::abs(omega_q(apply_alpha(u), apply_alpha(v)) - omega(u, v)));
  }
  return worst;
}

bool symplectic_preserved_by_alpha(const VectorXd& q, double tol, int trials, std::uint64_t seed) {
  return alpha_symplectic_deviation(q, trials, seed) < tol;
}

}  // namespace opennet
