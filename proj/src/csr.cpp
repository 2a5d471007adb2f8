#include "crbt/csr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crbt/rng.hpp"
#include "crbt/text_io.hpp"

namespace crbt {

bool CsrMatrix::is_valid() const {
  if (n_rows < 0 || n_cols < 0) return false;
  if (row_offsets.size() != static_cast<std::size_t>(n_rows) + 1) return false;
  if (row_offsets[0] != 0) return false;
  if (col_indices.size() != values.size()) return false;
  if (row_offsets[n_rows] != nnz()) return false;
  for (int i = 0; i < n_rows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) return false;
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] < 0 || col_indices[k] >= n_cols) return false;
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
        return false;
      if (!std::isfinite(values[k])) return false;
    }
  }
  return true;
}

CsrMatrix csr_from_triplets(int n_rows, int n_cols,
                            std::vector<Triplet> triplets) {
  if (n_rows < 0 || n_cols < 0)
    throw std::invalid_argument("csr_from_triplets: negative dimensions");
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw std::invalid_argument("csr_from_triplets: index out of range");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("csr_from_triplets: non-finite value");
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  CsrMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_offsets.assign(n_rows + 1, 0);
  m.col_indices.reserve(triplets.size());
  m.values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size();) {
    const int r = triplets[k].row, c = triplets[k].col;
    double acc = 0.0;
    while (k < triplets.size() && triplets[k].row == r &&
           triplets[k].col == c) {
      acc += triplets[k].value;
      ++k;
    }
    m.col_indices.push_back(c);
    m.values.push_back(acc);
    m.row_offsets[r + 1] += 1;
  }
  for (int i = 0; i < n_rows; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
  return m;
}

CsrMatrix csr_from_dense(const std::vector<std::vector<double>>& rows) {
  const int n_rows = static_cast<int>(rows.size());
  const int n_cols = n_rows > 0 ? static_cast<int>(rows[0].size()) : 0;
  std::vector<Triplet> ts;
  for (int i = 0; i < n_rows; ++i) {
    if (static_cast<int>(rows[i].size()) != n_cols)
      throw std::invalid_argument("csr_from_dense: ragged rows");
    for (int j = 0; j < n_cols; ++j)
      if (rows[i][j] != 0.0) ts.push_back({i, j, rows[i][j]});
  }
  return csr_from_triplets(n_rows, n_cols, std::move(ts));
}

CsrMatrix csr_identity(int n) {
  CsrMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.resize(n + 1);
  m.col_indices.resize(n);
  m.values.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) m.row_offsets[i] = i;
  for (int i = 0; i < n; ++i) m.col_indices[i] = i;
  return m;
}

CsrMatrix transpose(const CsrMatrix& a) {
  CsrMatrix t;
  t.n_rows = a.n_cols;
  t.n_cols = a.n_rows;
  t.row_offsets.assign(a.n_cols + 1, 0);
  t.col_indices.resize(a.values.size());
  t.values.resize(a.values.size());
  for (int k = 0; k < a.nnz(); ++k) t.row_offsets[a.col_indices[k] + 1] += 1;
  for (int j = 0; j < a.n_cols; ++j) t.row_offsets[j + 1] += t.row_offsets[j];
  std::vector<int> next(t.row_offsets.begin(), t.row_offsets.end() - 1);
  for (int i = 0; i < a.n_rows; ++i) {
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
      const int pos = next[a.col_indices[k]]++;
      t.col_indices[pos] = i;  // rows visited in order, so columns stay sorted
      t.values[pos] = a.values[k];
    }
  }
  return t;
}

namespace {

void check_matvec_dims(const CsrMatrix& a, const Vector& x, bool transposed) {
  const std::size_t want =
      static_cast<std::size_t>(transposed ? a.n_rows : a.n_cols);
  if (x.size() != want)
    throw std::invalid_argument(transposed
                                    ? "matvec_transpose: dimension mismatch"
                                    : "matvec: dimension mismatch");
}

}  // namespace

Vector matvec(const CsrMatrix& a, const Vector& x) {
  check_matvec_dims(a, x, false);
  Vector out(a.n_rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.n_rows; ++i) {
    double acc = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      acc += a.values[k] * x[a.col_indices[k]];
    out[i] = acc;
  }
  return out;
}

Vector matvec_serial(const CsrMatrix& a, const Vector& x) {
  check_matvec_dims(a, x, false);
  Vector out(a.n_rows);
  for (int i = 0; i < a.n_rows; ++i) {
    double acc = 0.0;
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      acc += a.values[k] * x[a.col_indices[k]];
    out[i] = acc;
  }
  return out;
}

Vector matvec_transpose(const CsrMatrix& a, const Vector& x) {
  check_matvec_dims(a, x, true);
  Vector out(a.n_cols, 0.0);
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      out[a.col_indices[k]] += a.values[k] * x[i];
  return out;
}

double operator_norm_estimate(const CsrMatrix& a, int iterations,
                              std::uint64_t seed) {
  if (iterations < 1)
    throw std::invalid_argument("operator_norm_estimate: iterations < 1");
  if (a.n_rows == 0 || a.n_cols == 0 || a.nnz() == 0) return 0.0;

  Vector v(a.n_cols);
  for (int i = 0; i < a.n_cols; ++i)
    v[i] = 2.0 * counter_uniform(seed, static_cast<std::uint64_t>(i)) - 1.0;
  const double nv0 = norm2(v);
  if (nv0 == 0.0) return 0.0;
  v = scaled(v, 1.0 / nv0);

  for (int it = 0; it < iterations; ++it) {
    const Vector u = matvec(a, v);
    const Vector z = matvec_transpose(a, u);
    const double nz = norm2(z);
    if (nz == 0.0) return 0.0;
    v = scaled(z, 1.0 / nz);
  }
  // Rayleigh-quotient square root: a certified lower bound on ||A||_2.
  return norm2(matvec(a, v)) / norm2(v);
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n_rows << " " << a.n_cols << " " << a.nnz() << "\n";
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      out << (i + 1) << " " << (a.col_indices[k] + 1) << " "
          << format_g17(a.values[k]) << "\n";
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

CsrMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty Matrix Market file: " + path);
  {
    std::istringstream hs(line);
    std::string banner, object, fmt, field, symmetry;
    hs >> banner >> object >> fmt >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" ||
        fmt != "coordinate" || field != "real" || symmetry != "general")
      throw std::runtime_error("unsupported Matrix Market header: " + line);
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  long long n_rows = -1, n_cols = -1, nnz = -1;
  {
    std::istringstream ds(line);
    if (!(ds >> n_rows >> n_cols >> nnz) || n_rows < 0 || n_cols < 0 ||
        nnz < 0)
      throw std::runtime_error("bad Matrix Market size line: " + line);
  }
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long r = 0, c = 0;
    std::string tok;
    if (!(in >> r >> c >> tok))
      throw std::runtime_error("truncated Matrix Market entries: " + path);
    if (r < 1 || r > n_rows || c < 1 || c > n_cols)
      throw std::runtime_error("Matrix Market index out of range: " + path);
    ts.push_back({static_cast<int>(r - 1), static_cast<int>(c - 1),
                  parse_double_strict(tok)});
  }
  return csr_from_triplets(static_cast<int>(n_rows), static_cast<int>(n_cols),
                           std::move(ts));
}

}  // namespace crbt
