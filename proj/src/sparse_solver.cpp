#include <umfpack.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "nsch/fem.hpp"
#include "nsch/mesh.hpp"

// UMFPACK works on compressed columns. A CSR matrix is the CSC storage of its
// transpose, so we hand the arrays over unchanged and solve with UMFPACK_At.

namespace nsch {

struct SparseLU::Impl {
  void* symbolic = nullptr;
  void* numeric = nullptr;
  int n = 0;
  std::vector<int> row_ptr, col_idx;  // pattern the symbolic object belongs to
  std::vector<double> values;
  double control[UMFPACK_CONTROL];

  Impl() {
    umfpack_di_defaults(control);
    // Nested dissection fills far less than AMD on the coupled P2 systems.
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
  }
  ~Impl() { release(); }

  void release_numeric() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    numeric = nullptr;
  }
  void release() {
    release_numeric();
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    symbolic = nullptr;
  }

  // Column of the original matrix where the factorisation broke down.
  int singular_column() const {
    int nrow, ncol, nz_udiag, lnz, unz, do_recip;
    umfpack_di_get_lunz(&lnz, &unz, &nrow, &ncol, &nz_udiag, numeric);
    std::vector<int> P(n), Q(n);
    std::vector<double> udiag(n), rs(n);
    umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, P.data(),
                           Q.data(), udiag.data(), &do_recip, rs.data(), numeric);
    // Rows of the CSR matrix are columns of the factored transpose.
    for (int k = 0; k < n; ++k) {
      if (udiag[k] == 0.0 || !std::isfinite(udiag[k])) return P[k];
    }
    return -1;
  }
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factor(const SparseMatrix& a) {
  Impl& s = *impl_;
  const bool same_pattern = s.symbolic && s.n == a.rows() && s.row_ptr == a.row_ptr() &&
                            s.col_idx == a.col_idx();
  s.release_numeric();
  if (!same_pattern) {
    s.release();
    s.n = a.rows();
    s.row_ptr = a.row_ptr();
    s.col_idx = a.col_idx();
    int status = umfpack_di_symbolic(s.n, s.n, s.row_ptr.data(), s.col_idx.data(),
                                     a.values().data(), &s.symbolic, s.control, nullptr);
    if (status != UMFPACK_OK) {
      s.release();
      throw std::runtime_error("SparseLU: symbolic analysis failed, status " +
                               std::to_string(status));
    }
  }
  s.values = a.values();
  int status = umfpack_di_numeric(s.row_ptr.data(), s.col_idx.data(), s.values.data(), s.symbolic,
                                  &s.numeric, s.control, nullptr);
  if (status == UMFPACK_WARNING_singular_matrix) {
    int col = s.singular_column();
    s.release_numeric();
    std::ostringstream os;
    os << "SparseLU: matrix is singular (zero pivot at unknown " << col << ")";
    throw SingularMatrixError(col, os.str());
  }
  if (status == UMFPACK_ERROR_out_of_memory) {
    s.release_numeric();
    throw std::runtime_error("SparseLU: out of memory factoring a system of size " +
                             std::to_string(s.n) + " with " + std::to_string(a.nnz()) +
                             " nonzeros");
  }
  if (status != UMFPACK_OK) {
    s.release_numeric();
    throw std::runtime_error("SparseLU: numeric factorisation failed, status " +
                             std::to_string(status));
  }
}

Vector SparseLU::solve(std::span<const double> b) const {
  const Impl& s = *impl_;
  if (!s.numeric) throw std::logic_error("SparseLU::solve called before factor");
  if (static_cast<int>(b.size()) != s.n) throw std::invalid_argument("SparseLU::solve: size");
  Vector x(s.n);
  int status = umfpack_di_solve(UMFPACK_At, s.row_ptr.data(), s.col_idx.data(), s.values.data(),
                                x.data(), b.data(), s.numeric, s.control, nullptr);
  if (status != UMFPACK_OK) {
    throw std::runtime_error("SparseLU: solve failed, status " + std::to_string(status));
  }
  return x;
}

Vector solve_sparse(const SparseMatrix& a, std::span<const double> b) {
  SparseLU lu;
  lu.factor(a);
  return lu.solve(b);
}

bool blas_self_check() {
  auto space = build_p2_space(std::make_shared<const Mesh>(build_rect_mesh(8, 8)));
  const SparseMatrix m = assemble_mass(AssemblyPattern(space, 1), quadrature(4));
  Vector x0(m.rows());
  for (int i = 0; i < m.rows(); ++i) x0[i] = 1.0 + 0.25 * std::sin(0.37 * i);
  const Vector b = m * x0;
  try {
    const Vector x = solve_sparse(m, b);
    for (int i = 0; i < m.rows(); ++i) {
      if (!(std::abs(x[i] - x0[i]) < 1e-8)) return false;
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

void ensure_working_blas(char** argv) {
  static bool checked = false;
  if (checked) return;
  if (blas_self_check()) {
    checked = true;
    return;
  }
  __builtin_cpu_init();
  if (!std::getenv("OPENBLAS_CORETYPE") && __builtin_cpu_supports("avx2")) {
    ::setenv("OPENBLAS_CORETYPE", "Haswell", 1);
    ::execv("/proc/self/exe", argv);
  }
  throw std::runtime_error(
      "sparse LU self-check failed: the BLAS library returns wrong results "
      "(for OpenBLAS try OPENBLAS_CORETYPE=Haswell)");
}

}  // namespace nsch
