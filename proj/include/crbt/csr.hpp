#pragma once

#include <cstdint>
#include <string>

#include "crbt/vector.hpp"

namespace crbt {

// Compressed sparse row matrix. Within each row the column indices are
// sorted and unique; all stored values are finite.
struct CsrMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_offsets;  // length n_rows + 1, row_offsets[0] == 0
  std::vector<int> col_indices;  // length nnz
  std::vector<double> values;    // length nnz

  int nnz() const { return static_cast<int>(values.size()); }
  bool is_valid() const;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Duplicate (row, col) entries are summed; indices are validated.
CsrMatrix csr_from_triplets(int n_rows, int n_cols,
                            std::vector<Triplet> triplets);
CsrMatrix csr_from_dense(const std::vector<std::vector<double>>& rows);
CsrMatrix csr_identity(int n);
CsrMatrix transpose(const CsrMatrix& a);

// y = A x. The default kernel partitions rows across OpenMP threads; each
// output entry is accumulated by exactly one thread in index order, so the
// result is bit-identical to matvec_serial for any thread count.
Vector matvec(const CsrMatrix& a, const Vector& x);
Vector matvec_serial(const CsrMatrix& a, const Vector& x);

// y = A^T x via a sequential scatter. Hot paths should transpose() once and
// use the row-parallel matvec on the transposed matrix instead.
Vector matvec_transpose(const CsrMatrix& a, const Vector& x);

// Power iteration on A^T A from a seeded start vector. The returned value
// never exceeds the true spectral norm; the zero matrix yields 0.
double operator_norm_estimate(const CsrMatrix& a, int iterations = 100,
                              std::uint64_t seed = 1);

// Matrix Market "coordinate real general" with 1-based indices.
void write_matrix_market(const CsrMatrix& a, const std::string& path);
CsrMatrix read_matrix_market(const std::string& path);

}  // namespace crbt
