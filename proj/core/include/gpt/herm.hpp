#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace gpt {

/// Small dense Hermitian matrix (dim <= 8 in practice). Construction rejects
/// non-square, non-finite, or non-Hermitian input (tolerance 1e-12 on the
/// anti-Hermitian part).
class HermMat {
 public:
  explicit HermMat(Eigen::MatrixXcd m);

  static HermMat zero(int dim);
  static HermMat identity(int dim);
  /// Rank-1 projector |v><v| / <v|v>.
  static HermMat projector(const Eigen::VectorXcd& v);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXcd& mat() const { return mat_; }

  double trace() const { return mat_.trace().real(); }

  HermMat scaled(double factor) const;
  HermMat plus(const HermMat& other, double factor = 1.0) const;

 private:
  Eigen::MatrixXcd mat_;
};

/// Hilbert-Schmidt inner product Tr{AB} of two Hermitian matrices; the
/// imaginary residue must vanish within 1e-12.
double hs_inner(const HermMat& a, const HermMat& b);

/// Raw variant used internally; throws if |Im Tr{AB}| > 1e-12.
double hs_inner_raw(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

HermMat kron(const HermMat& a, const HermMat& b);

struct EigResult {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXcd eigenvectors; // columns, matching order
};

/// Eigendecomposition A = sum_i lambda_i v_i v_i^dagger with reconstruction
/// residual <= 1e-10.
EigResult eig_herm(const HermMat& a);

/// Orthonormal Hermitian operator basis for dimension d: element 0 is
/// I/sqrt(d), the rest are traceless generalized Gell-Mann matrices, all
/// orthonormal under Tr{B_i B_j}. Vectorizing against it turns density
/// matrices into real coordinate vectors of length d^2.
class HermitianBasis {
 public:
  explicit HermitianBasis(int d);

  int matrix_dim() const { return d_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const HermMat& element(int i) const { return elements_.at(i); }

  Eigen::VectorXd coords(const HermMat& rho) const;
  HermMat matrix(const Eigen::VectorXd& coords) const;

 private:
  int d_;
  std::vector<HermMat> elements_;
};

}  // namespace gpt
