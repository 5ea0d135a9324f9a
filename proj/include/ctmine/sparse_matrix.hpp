#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ctmine::cooc {

// Row-addressable sparse count matrix (CSR, column ids sorted within each
// row) so a row/row cosine is a linear merge. Immutable once built.
class SparseCountMatrix {
public:
    SparseCountMatrix() = default;
    SparseCountMatrix(std::uint32_t rows, std::uint32_t cols,
                      std::vector<std::uint64_t> row_offsets, std::vector<std::uint32_t> col_ids,
                      std::vector<std::uint32_t> values);

    std::uint32_t rows() const { return rows_; }
    std::uint32_t cols() const { return cols_; }
    std::uint64_t nnz() const { return col_ids_.size(); }

    std::span<const std::uint32_t> row_cols(std::uint32_t r) const;
    std::span<const std::uint32_t> row_values(std::uint32_t r) const;

    // L2 norm of a row's count vector.
    double row_norm(std::uint32_t r) const;

    // Dot product of two rows (sorted-column merge).
    double row_dot(std::uint32_t i, std::uint32_t j) const;

    // Cosine of two rows in [0, 1]; 0 when either row is all-zero.
    double cosine_rows(std::uint32_t i, std::uint32_t j) const;

    SparseCountMatrix transpose() const;

    // Binary container: 8-byte magic, u32 rows, u32 cols, u64 nnz, then nnz
    // coordinate triplets (u32 row, u32 col, u32 value) sorted row-major.
    void save(const std::string& path) const;
    static SparseCountMatrix load(const std::string& path);

    // "row,col,value" rows for desk-scale inspection.
    void export_csv(const std::string& path) const;

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<std::uint64_t> row_offsets_;  // rows_ + 1 entries
    std::vector<std::uint32_t> col_ids_;
    std::vector<std::uint32_t> values_;
    std::vector<double> row_norms_;

    void compute_norms();
};

// Accumulates (row, col) increments, then sorts and merges duplicates into a
// SparseCountMatrix. Append order does not matter.
class SparseMatrixBuilder {
public:
    SparseMatrixBuilder(std::uint32_t rows, std::uint32_t cols);

    void add(std::uint32_t row, std::uint32_t col, std::uint32_t count = 1);

    // Merges a shard built over a disjoint slice of documents.
    void merge(SparseMatrixBuilder&& other);

    SparseCountMatrix finalize();

private:
    std::uint32_t rows_ = 0;
    std::uint32_t cols_ = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pending_;
};

}  // namespace ctmine::cooc
