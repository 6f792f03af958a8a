#include "nsch/fem.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace nsch {

// ---------------------------------------------------------------------------
// Reference element

P2Basis p2_basis(const Bary& l) {
  static constexpr double dl[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  P2Basis b;
  for (int i = 0; i < 3; ++i) {
    b.value[i] = l[i] * (2.0 * l[i] - 1.0);
    b.grad[i] = {(4.0 * l[i] - 1.0) * dl[i][0], (4.0 * l[i] - 1.0) * dl[i][1]};
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    b.value[3 + i] = 4.0 * l[j] * l[k];
    b.grad[3 + i] = {4.0 * (l[k] * dl[j][0] + l[j] * dl[k][0]),
                     4.0 * (l[k] * dl[j][1] + l[j] * dl[k][1])};
  }
  return b;
}

const std::array<Bary, 6>& p2_nodes() {
  static const std::array<Bary, 6> nodes{{{1, 0, 0},
                                          {0, 1, 0},
                                          {0, 0, 1},
                                          {0, 0.5, 0.5},
                                          {0.5, 0, 0.5},
                                          {0.5, 0.5, 0}}};
  return nodes;
}

namespace {

void orbit3(QuadratureRule& q, double w) {
  q.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  q.weights.push_back(w);
}

void orbit21(QuadratureRule& q, double w, double a, double b) {
  q.points.push_back({a, b, b});
  q.points.push_back({b, a, b});
  q.points.push_back({b, b, a});
  q.weights.insert(q.weights.end(), 3, w);
}

void orbit111(QuadratureRule& q, double w, double a, double b, double c) {
  for (const Bary& p : {Bary{a, b, c}, Bary{a, c, b}, Bary{b, a, c}, Bary{b, c, a},
                        Bary{c, a, b}, Bary{c, b, a}}) {
    q.points.push_back(p);
  }
  q.weights.insert(q.weights.end(), 6, w);
}

}  // namespace

QuadratureRule quadrature(int degree) {
  QuadratureRule q;
  switch (degree) {
    case 1:
    case 2:
      q.degree = 2;
      orbit21(q, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0);
      break;
    case 3:
    case 4:
      q.degree = 4;
      orbit21(q, 0.223381589678011, 0.108103018168070, 0.445948490915965);
      orbit21(q, 0.109951743655322, 0.816847572980459, 0.091576213509771);
      break;
    case 5: {
      q.degree = 5;
      const double r = std::sqrt(15.0);
      orbit3(q, 0.225);
      const double b1 = (6.0 - r) / 21.0, b2 = (6.0 + r) / 21.0;
      orbit21(q, (155.0 - r) / 1200.0, 1.0 - 2.0 * b1, b1);
      orbit21(q, (155.0 + r) / 1200.0, 1.0 - 2.0 * b2, b2);
      break;
    }
    case 6:
      q.degree = 6;
      orbit21(q, 0.116786275726379, 0.501426509658179, 0.249286745170910);
      orbit21(q, 0.050844906370207, 0.873821971016996, 0.063089014491502);
      orbit111(q, 0.082851075618374, 0.053145049844817, 0.310352451033784, 0.636502499121399);
      break;
    case 7:
    case 8:
      q.degree = 8;
      orbit3(q, 0.144315607677787);
      orbit21(q, 0.095091634267285, 0.081414823414554, 0.459292588292723);
      orbit21(q, 0.103217370534718, 0.658861384496480, 0.170569307751760);
      orbit21(q, 0.032458497623198, 0.898905543365938, 0.050547228317031);
      orbit111(q, 0.027230314174435, 0.008394777409958, 0.263112829634638, 0.728492392955404);
      break;
    default:
      throw std::invalid_argument("quadrature: degree must lie in 1..8, got " +
                                  std::to_string(degree));
  }
  return q;
}

ElementMap::ElementMap(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  origin = v[tri[0]];
  jac[0][0] = v[tri[1]].x - origin.x;
  jac[0][1] = v[tri[2]].x - origin.x;
  jac[1][0] = v[tri[1]].y - origin.y;
  jac[1][1] = v[tri[2]].y - origin.y;
  det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
  inv[0][0] = jac[1][1] / det;
  inv[0][1] = -jac[0][1] / det;
  inv[1][0] = -jac[1][0] / det;
  inv[1][1] = jac[0][0] / det;
}

Point ElementMap::map(const Bary& b) const {
  return {origin.x + jac[0][0] * b[1] + jac[0][1] * b[2],
          origin.y + jac[1][0] * b[1] + jac[1][1] * b[2]};
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(int n, std::vector<int> row_ptr, std::vector<int> col_idx)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)) {
  if (static_cast<int>(row_ptr_.size()) != n + 1 ||
      row_ptr_.back() != static_cast<int>(col_idx_.size())) {
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  }
  values_.assign(col_idx_.size(), 0.0);
}

SparseMatrix SparseMatrix::from_triplets(int n, std::span<const std::array<int, 2>> ij,
                                         std::span<const double> v) {
  std::vector<std::size_t> order(ij.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ij[a] < ij[b]; });
  std::vector<int> rp(n + 1, 0), ci;
  std::vector<double> vals;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& e = ij[order[k]];
    if (e[0] < 0 || e[0] >= n || e[1] < 0 || e[1] >= n) {
      throw std::out_of_range("SparseMatrix::from_triplets: index out of range");
    }
    if (k > 0 && ij[order[k - 1]] == e) {
      vals.back() += v[order[k]];
      continue;
    }
    ci.push_back(e[1]);
    vals.push_back(v[order[k]]);
    ++rp[e[0] + 1];
  }
  for (int i = 0; i < n; ++i) rp[i + 1] += rp[i];
  SparseMatrix m(n, std::move(rp), std::move(ci));
  m.values_ = std::move(vals);
  return m;
}

int SparseMatrix::find(int i, int j) const {
  auto b = col_idx_.begin() + row_ptr_[i], e = col_idx_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? static_cast<int>(it - col_idx_.begin()) : -1;
}

double SparseMatrix::coeff(int i, int j) const {
  int k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

void SparseMatrix::add(int i, int j, double v) {
  int k = find(i, j);
  if (k < 0) throw std::out_of_range("SparseMatrix::add: entry not in pattern");
  values_[k] += v;
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SparseMatrix::prune(double tol) {
  std::vector<int> rp(n_ + 1, 0), ci;
  std::vector<double> vals;
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (std::abs(values_[k]) > tol) {
        ci.push_back(col_idx_[k]);
        vals.push_back(values_[k]);
      }
    }
    rp[i + 1] = static_cast<int>(ci.size());
  }
  row_ptr_ = std::move(rp);
  col_idx_ = std::move(ci);
  values_ = std::move(vals);
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(n_);
  multiply(x, y);
  return y;
}

double SparseMatrix::norm_inf() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(values_[k]);
    m = std::max(m, s);
  }
  return m;
}

bool SparseMatrix::structurally_symmetric() const {
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (find(col_idx_[k], i) < 0) return false;
    }
  }
  return true;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(std::size_t(n_) * n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[std::size_t(i) * n_ + col_idx_[k]] = values_[k];
  }
  return d;
}

// ---------------------------------------------------------------------------
// Assembly

void ElementValues::reinit(const P2Space& space, const QuadratureRule& rule, int t) {
  static thread_local std::vector<Bary> cached_points;
  static thread_local std::vector<P2Basis> ref;
  if (cached_points != rule.points) {
    ref.clear();
    for (const auto& p : rule.points) ref.push_back(p2_basis(p));
    cached_points = rule.points;
  }
  element = t;
  auto d = space.element_dofs(t);
  std::copy(d.begin(), d.end(), dofs.begin());
  ElementMap map(space.mesh(), t);
  const std::size_t nq = rule.size();
  jxw.resize(nq);
  x.resize(nq);
  phi.resize(nq);
  grad.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    jxw[q] = rule.weights[q] * map.area();
    x[q] = map.map(rule.points[q]);
    phi[q] = ref[q].value;
    for (int i = 0; i < 6; ++i) grad[q][i] = map.physical_grad(ref[q].grad[i]);
  }
}

LocalSystem::LocalSystem(int num_fields)
    : n(6 * num_fields), vec(n, 0.0), mat(std::size_t(n) * n, 0.0) {}

void LocalSystem::clear() {
  if (want_vector) std::fill(vec.begin(), vec.end(), 0.0);
  if (want_matrix) std::fill(mat.begin(), mat.end(), 0.0);
}

AssemblyPattern::AssemblyPattern(std::shared_ptr<const P2Space> space, int num_fields)
    : space_(std::move(space)), fields_(num_fields) {
  if (fields_ < 1) throw std::invalid_argument("AssemblyPattern: need at least one field");
  const int n = space_->num_dofs();
  const int ne = space_->num_elements();
  adj_.assign(n, {});
  for (int t = 0; t < ne; ++t) {
    auto d = space_->element_dofs(t);
    for (int a = 0; a < 6; ++a) adj_[d[a]].insert(adj_[d[a]].end(), d.begin(), d.end());
  }
  degree_.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& a = adj_[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    degree_[i] = static_cast<int>(a.size());
  }
  row_start_.resize(std::size_t(fields_) * n + 1);
  row_start_[0] = 0;
  for (int f = 0; f < fields_; ++f) {
    for (int i = 0; i < n; ++i) {
      std::size_t r = std::size_t(f) * n + i;
      row_start_[r + 1] = row_start_[r] + fields_ * degree_[i];
    }
  }
  local_offset_.resize(36 * std::size_t(ne));
  for (int t = 0; t < ne; ++t) {
    auto d = space_->element_dofs(t);
    for (int a = 0; a < 6; ++a) {
      const auto& row = adj_[d[a]];
      for (int b = 0; b < 6; ++b) {
        local_offset_[36 * std::size_t(t) + 6 * a + b] =
            static_cast<int>(std::lower_bound(row.begin(), row.end(), d[b]) - row.begin());
      }
    }
  }
}

SparseMatrix AssemblyPattern::make_matrix() const {
  const int n = space_->num_dofs();
  std::vector<int> ci;
  ci.reserve(row_start_.back());
  for (int f = 0; f < fields_; ++f) {
    for (int i = 0; i < n; ++i) {
      for (int g = 0; g < fields_; ++g) {
        for (int j : adj_[i]) ci.push_back(g * n + j);
      }
    }
  }
  return SparseMatrix(size(), row_start_, std::move(ci));
}

namespace {

std::atomic<int> g_threads{0};

int threads_from_env() {
  const char* s = std::getenv("NSCH_THREADS");
  if (!s) return 1;
  int n = std::atoi(s);
  return n > 0 ? n : 1;
}

void scatter(const AssemblyPattern& pattern, int t, const LocalSystem& loc, SparseMatrix* matrix,
             Vector* vector) {
  const int nf = pattern.num_fields();
  const int n = pattern.space().num_dofs();
  auto d = pattern.space().element_dofs(t);
  if (vector) {
    for (int f = 0; f < nf; ++f) {
      for (int a = 0; a < 6; ++a) (*vector)[std::size_t(f) * n + d[a]] += loc.vec[6 * f + a];
    }
  }
  if (matrix) {
    auto& v = matrix->values();
    for (int fi = 0; fi < nf; ++fi) {
      for (int a = 0; a < 6; ++a) {
        const double* row = &loc.mat[std::size_t(6 * fi + a) * loc.n];
        for (int fj = 0; fj < nf; ++fj) {
          for (int b = 0; b < 6; ++b) v[pattern.position(t, fi, a, fj, b)] += row[6 * fj + b];
        }
      }
    }
  }
}

}  // namespace

int assembly_threads() {
  int n = g_threads.load();
  if (n == 0) {
    n = threads_from_env();
    g_threads.store(n);
  }
  return n;
}

void set_assembly_threads(int n) { g_threads.store(n > 0 ? n : 1); }

void assemble(const AssemblyPattern& pattern, const QuadratureRule& rule,
              const ElementKernel& kernel, SparseMatrix* matrix, Vector* vector, Exec exec) {
  const P2Space& space = pattern.space();
  const int ne = space.num_elements();
  if (matrix) {
    if (matrix->rows() != pattern.size() || matrix->nnz() != pattern.nnz()) {
      *matrix = pattern.make_matrix();
    } else {
      matrix->set_zero();
    }
  }
  if (vector) vector->assign(pattern.size(), 0.0);

  const int nthreads = exec == Exec::serial ? 1 : assembly_threads();
  if (nthreads <= 1) {
    ElementValues ev;
    LocalSystem loc(pattern.num_fields());
    loc.want_matrix = matrix != nullptr;
    loc.want_vector = vector != nullptr;
    for (int t = 0; t < ne; ++t) {
      ev.reinit(space, rule, t);
      loc.clear();
      kernel(ev, loc);
      scatter(pattern, t, loc, matrix, vector);
    }
    return;
  }

  const int batch = std::min(ne, 64 * nthreads);
  std::vector<LocalSystem> locals(batch, LocalSystem(pattern.num_fields()));
  for (auto& l : locals) {
    l.want_matrix = matrix != nullptr;
    l.want_vector = vector != nullptr;
  }
  for (int first = 0; first < ne; first += batch) {
    const int count = std::min(batch, ne - first);
#pragma omp parallel num_threads(nthreads)
    {
      ElementValues ev;
#pragma omp for schedule(static)
      for (int k = 0; k < count; ++k) {
        ev.reinit(space, rule, first + k);
        locals[k].clear();
        kernel(ev, locals[k]);
      }
    }
    for (int k = 0; k < count; ++k) scatter(pattern, first + k, locals[k], matrix, vector);
  }
}

SparseMatrix assemble_mass(const AssemblyPattern& scalar, const QuadratureRule& rule) {
  SparseMatrix m;
  assemble(
      scalar, rule,
      [](const ElementValues& ev, LocalSystem& loc) {
        for (std::size_t q = 0; q < ev.jxw.size(); ++q) {
          for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) loc.A(a, b) += ev.jxw[q] * ev.phi[q][a] * ev.phi[q][b];
          }
        }
      },
      &m, nullptr, Exec::serial);
  return m;
}

SparseMatrix assemble_stiffness(const AssemblyPattern& scalar, const QuadratureRule& rule) {
  SparseMatrix m;
  assemble(
      scalar, rule,
      [](const ElementValues& ev, LocalSystem& loc) {
        for (std::size_t q = 0; q < ev.jxw.size(); ++q) {
          for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
              loc.A(a, b) += ev.jxw[q] * (ev.grad[q][a][0] * ev.grad[q][b][0] +
                                          ev.grad[q][a][1] * ev.grad[q][b][1]);
            }
          }
        }
      },
      &m, nullptr, Exec::serial);
  return m;
}

// ---------------------------------------------------------------------------
// Dirichlet elimination

Vector ReducedSystem::expand(std::span<const double> reduced) const {
  Vector full = prescribed;
  for (std::size_t k = 0; k < free_dofs.size(); ++k) full[free_dofs[k]] = reduced[k];
  return full;
}

ReducedSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> rhs,
                              std::span<const int> dofs, std::span<const double> values) {
  if (dofs.size() != values.size()) throw std::invalid_argument("apply_dirichlet: size mismatch");
  const int n = a.rows();
  ReducedSystem r;
  r.prescribed.assign(n, 0.0);
  r.reduced_index.assign(n, 0);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    if (dofs[k] < 0 || dofs[k] >= n) throw std::out_of_range("apply_dirichlet: dof out of range");
    r.reduced_index[dofs[k]] = -1;
    r.prescribed[dofs[k]] = values[k];
  }
  for (int i = 0; i < n; ++i) {
    if (r.reduced_index[i] < 0) continue;
    r.reduced_index[i] = static_cast<int>(r.free_dofs.size());
    r.free_dofs.push_back(i);
  }
  const int m = static_cast<int>(r.free_dofs.size());
  std::vector<int> rp(m + 1, 0), ci;
  std::vector<double> vals;
  r.rhs.resize(m);
  const auto& arp = a.row_ptr();
  const auto& aci = a.col_idx();
  const auto& av = a.values();
  for (int k = 0; k < m; ++k) {
    const int i = r.free_dofs[k];
    double b = rhs[i];
    for (int p = arp[i]; p < arp[i + 1]; ++p) {
      const int j = r.reduced_index[aci[p]];
      if (j < 0) {
        b -= av[p] * r.prescribed[aci[p]];
      } else {
        ci.push_back(j);
        vals.push_back(av[p]);
      }
    }
    r.rhs[k] = b;
    rp[k + 1] = static_cast<int>(ci.size());
  }
  r.matrix = SparseMatrix(m, std::move(rp), std::move(ci));
  r.matrix.values() = std::move(vals);
  return r;
}

}  // namespace nsch
