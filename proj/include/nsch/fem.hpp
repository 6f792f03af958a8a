#pragma once

// Reference-element machinery, CSR containers, element-loop assembly and
// Dirichlet elimination.

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "nsch/mesh.hpp"

namespace nsch {

using Vector = std::vector<double>;
using Bary = std::array<double, 3>;

// ---------------------------------------------------------------------------
// Reference element

struct P2Basis {
  std::array<double, 6> value{};
  std::array<std::array<double, 2>, 6> grad{};  // d/dxi, d/deta on the reference triangle
};

/// Quadratic Lagrange basis at barycentric coordinates (l0, l1, l2) of the
/// reference triangle (0,0), (1,0), (0,1). Nodes: vertices 0..2, then the
/// midpoints of the edges opposite vertex 0, 1, 2.
P2Basis p2_basis(const Bary& bary);

/// Barycentric coordinates of the six P2 nodes.
const std::array<Bary, 6>& p2_nodes();

struct QuadratureRule {
  std::vector<Bary> points;
  std::vector<double> weights;  // sum to 1; multiply by the triangle area
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Symmetric rule with positive weights, exact for polynomials of at least
/// the requested degree (1..8). Throws std::invalid_argument otherwise.
QuadratureRule quadrature(int degree);

/// Affine map of a mesh triangle.
struct ElementMap {
  ElementMap(const Mesh& mesh, int t);

  Point map(const Bary& b) const;
  std::array<double, 2> physical_grad(const std::array<double, 2>& ref) const {
    return {inv[0][0] * ref[0] + inv[1][0] * ref[1], inv[0][1] * ref[0] + inv[1][1] * ref[1]};
  }
  double area() const { return 0.5 * det; }

  Point origin;
  double jac[2][2];
  double det;
  double inv[2][2];
};

// ---------------------------------------------------------------------------
// Containers

/// Square CSR matrix.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int n, std::vector<int> row_ptr, std::vector<int> col_idx);
  static SparseMatrix from_triplets(int n, std::span<const std::array<int, 2>> ij,
                                    std::span<const double> v);

  int rows() const { return n_; }
  int nnz() const { return static_cast<int>(col_idx_.size()); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Index into values() of entry (i, j), or -1 if not in the pattern.
  int find(int i, int j) const;
  double coeff(int i, int j) const;
  void add(int i, int j, double v);

  void set_zero();
  /// Drop stored entries with |v| <= tol.
  void prune(double tol = 0.0);
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;
  double norm_inf() const;
  bool structurally_symmetric() const;
  std::vector<double> to_dense() const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Assembly

/// Geometry and basis values of one element at every quadrature point.
struct ElementValues {
  int element = -1;
  std::array<int, 6> dofs{};
  std::vector<double> jxw;                               // weight * area
  std::vector<Point> x;                                  // physical points
  std::vector<std::array<double, 6>> phi;                // basis values
  std::vector<std::array<std::array<double, 2>, 6>> grad;  // physical gradients

  void reinit(const P2Space& space, const QuadratureRule& rule, int t);
};

/// Dense local system; local index = field * 6 + node.
struct LocalSystem {
  explicit LocalSystem(int num_fields);
  int size() const { return n; }
  void clear();
  double& A(int i, int j) { return mat[static_cast<std::size_t>(i) * n + j]; }

  int n;
  bool want_matrix = true;
  bool want_vector = true;
  std::vector<double> vec;
  std::vector<double> mat;
};

/// Element kernel: fills the local vector and/or matrix.
using ElementKernel = std::function<void(const ElementValues&, LocalSystem&)>;

/// Block sparsity for `num_fields` P2 fields stacked field-major
/// (global index = field * N + dof), coupling every pair of dofs that share
/// an element. Holds per-element scatter offsets.
class AssemblyPattern {
 public:
  AssemblyPattern(std::shared_ptr<const P2Space> space, int num_fields);

  const P2Space& space() const { return *space_; }
  std::shared_ptr<const P2Space> space_ptr() const { return space_; }
  int num_fields() const { return fields_; }
  int size() const { return fields_ * space_->num_dofs(); }
  int nnz() const { return row_start_.back(); }
  /// Zero matrix with the full pattern.
  SparseMatrix make_matrix() const;
  /// Position in values() of local entry (fi, a) x (fj, b) of element t.
  int position(int t, int fi, int a, int fj, int b) const {
    const int i = space_->element_dofs(t)[a];
    const int deg = degree_[i];
    return row_start_[fi * space_->num_dofs() + i] + fj * deg +
           local_offset_[36 * static_cast<std::size_t>(t) + 6 * a + b];
  }

 private:
  std::shared_ptr<const P2Space> space_;
  int fields_;
  std::vector<int> degree_;             // scalar neighbours per dof
  std::vector<std::vector<int>> adj_;   // sorted scalar neighbours
  std::vector<int> row_start_;          // CSR row starts of the block matrix
  std::vector<int> local_offset_;       // 36 per element
};

enum class Exec { serial, parallel };

/// Number of threads used by Exec::parallel: NSCH_THREADS if set, else 1.
int assembly_threads();
void set_assembly_threads(int n);

/// Sum element contributions into `matrix` and/or `vector` (either may be
/// null). Both are zeroed first. The serial path is the reference. The
/// parallel path evaluates element kernels for a batch of elements across
/// threads and then scatters the batch in element order, so it reproduces the
/// serial sums bit for bit whatever the thread count.
void assemble(const AssemblyPattern& pattern, const QuadratureRule& rule,
              const ElementKernel& kernel, SparseMatrix* matrix, Vector* vector,
              Exec exec = Exec::parallel);

/// Scalar mass and stiffness matrices.
SparseMatrix assemble_mass(const AssemblyPattern& scalar, const QuadratureRule& rule);
SparseMatrix assemble_stiffness(const AssemblyPattern& scalar, const QuadratureRule& rule);

// ---------------------------------------------------------------------------
// Dirichlet elimination

struct ReducedSystem {
  SparseMatrix matrix;
  Vector rhs;
  std::vector<int> free_dofs;      // reduced index -> full index
  std::vector<int> reduced_index;  // full index -> reduced index or -1
  Vector prescribed;               // full-length, constrained values in place

  /// Full-length vector with the reduced solution scattered in and the
  /// prescribed values at constrained dofs.
  Vector expand(std::span<const double> reduced) const;
};

/// Eliminate rows and columns of constrained dofs; the right-hand side is
/// corrected with the constrained columns. `dofs` need not be sorted.
ReducedSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> rhs,
                              std::span<const int> dofs, std::span<const double> values);

// ---------------------------------------------------------------------------
// Sparse direct solve

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(int pivot, const std::string& what)
      : std::runtime_error(what), pivot_(pivot) {}
  /// Column (unknown) index where a zero pivot appeared.
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// LU factorisation with partial pivoting. The symbolic analysis is kept and
/// reused while the sparsity pattern stays the same.
class SparseLU {
 public:
  SparseLU();
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  void factor(const SparseMatrix& a);
  Vector solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve_sparse(const SparseMatrix& a, std::span<const double> b);

/// Factor and solve a P2 mass matrix on an 8 x 8 mesh with a known solution.
/// False when the BLAS underneath the sparse LU returns wrong results (seen
/// with OpenBLAS 0.3.20 on AVX-512 cores).
bool blas_self_check();

/// Run blas_self_check(); if it fails and OPENBLAS_CORETYPE is unset, set it
/// to Haswell and re-execute the program. Throws if BLAS stays broken.
void ensure_working_blas(char** argv);

}  // namespace nsch
