#include "ctmine/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "ctmine/csv.hpp"

namespace ctmine::cooc {

namespace {
constexpr char kMagic[8] = {'C', 'T', 'S', 'P', 'M', 'A', 'T', '1'};
}

SparseCountMatrix::SparseCountMatrix(std::uint32_t rows, std::uint32_t cols,
                                     std::vector<std::uint64_t> row_offsets,
                                     std::vector<std::uint32_t> col_ids,
                                     std::vector<std::uint32_t> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_ids_(std::move(col_ids)),
      values_(std::move(values)) {
    if (row_offsets_.size() != static_cast<std::size_t>(rows_) + 1)
        throw std::invalid_argument("SparseCountMatrix: bad row offsets");
    if (col_ids_.size() != values_.size())
        throw std::invalid_argument("SparseCountMatrix: cols/values size mismatch");
    compute_norms();
}

void SparseCountMatrix::compute_norms() {
    row_norms_.assign(rows_, 0.0);
    for (std::uint32_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::uint64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const double v = static_cast<double>(values_[k]);
            s += v * v;
        }
        row_norms_[r] = std::sqrt(s);
    }
}

std::span<const std::uint32_t> SparseCountMatrix::row_cols(std::uint32_t r) const {
    if (r >= rows_) throw std::out_of_range("SparseCountMatrix: row out of range");
    return {col_ids_.data() + row_offsets_[r],
            static_cast<std::size_t>(row_offsets_[r + 1] - row_offsets_[r])};
}

std::span<const std::uint32_t> SparseCountMatrix::row_values(std::uint32_t r) const {
    if (r >= rows_) throw std::out_of_range("SparseCountMatrix: row out of range");
    return {values_.data() + row_offsets_[r],
            static_cast<std::size_t>(row_offsets_[r + 1] - row_offsets_[r])};
}

double SparseCountMatrix::row_norm(std::uint32_t r) const {
    if (r >= rows_) throw std::out_of_range("SparseCountMatrix: row out of range");
    return row_norms_[r];
}

double SparseCountMatrix::row_dot(std::uint32_t i, std::uint32_t j) const {
    const auto ci = row_cols(i);
    const auto vi = row_values(i);
    const auto cj = row_cols(j);
    const auto vj = row_values(j);

    double dot = 0.0;
    std::size_t a = 0, b = 0;
    while (a < ci.size() && b < cj.size()) {
        if (ci[a] == cj[b]) {
            dot += static_cast<double>(vi[a]) * static_cast<double>(vj[b]);
            ++a;
            ++b;
        } else if (ci[a] < cj[b]) {
            ++a;
        } else {
            ++b;
        }
    }
    return dot;
}

double SparseCountMatrix::cosine_rows(std::uint32_t i, std::uint32_t j) const {
    const double ni = row_norm(i);
    const double nj = row_norm(j);
    if (ni == 0.0 || nj == 0.0) return 0.0;
    return row_dot(i, j) / (ni * nj);
}

SparseCountMatrix SparseCountMatrix::transpose() const {
    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(cols_) + 1, 0);
    for (std::uint32_t c : col_ids_) ++offsets[c + 1];
    for (std::size_t c = 1; c < offsets.size(); ++c) offsets[c] += offsets[c - 1];

    std::vector<std::uint32_t> tcols(col_ids_.size());
    std::vector<std::uint32_t> tvals(values_.size());
    std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t r = 0; r < rows_; ++r) {
        for (std::uint64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const std::uint64_t dst = cursor[col_ids_[k]]++;
            tcols[dst] = r;
            tvals[dst] = values_[k];
        }
    }
    // row-major traversal emits each transposed row already sorted
    return SparseCountMatrix(cols_, rows_, std::move(offsets), std::move(tcols),
                             std::move(tvals));
}

void SparseCountMatrix::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write matrix file: " + path);
    out.write(kMagic, sizeof(kMagic));
    const std::uint64_t nnz_count = nnz();
    out.write(reinterpret_cast<const char*>(&rows_), sizeof(rows_));
    out.write(reinterpret_cast<const char*>(&cols_), sizeof(cols_));
    out.write(reinterpret_cast<const char*>(&nnz_count), sizeof(nnz_count));
    for (std::uint32_t r = 0; r < rows_; ++r) {
        for (std::uint64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            out.write(reinterpret_cast<const char*>(&r), sizeof(r));
            out.write(reinterpret_cast<const char*>(&col_ids_[k]), sizeof(std::uint32_t));
            out.write(reinterpret_cast<const char*>(&values_[k]), sizeof(std::uint32_t));
        }
    }
    if (!out) throw std::runtime_error("short write on matrix file: " + path);
}

SparseCountMatrix SparseCountMatrix::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read matrix file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("bad matrix file magic: " + path);

    std::uint32_t rows = 0, cols = 0;
    std::uint64_t nnz = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    in.read(reinterpret_cast<char*>(&nnz), sizeof(nnz));
    if (!in) throw std::runtime_error("truncated matrix header: " + path);

    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<std::uint32_t> col_ids(nnz);
    std::vector<std::uint32_t> values(nnz);
    std::uint32_t prev_row = 0;
    for (std::uint64_t k = 0; k < nnz; ++k) {
        std::uint32_t r = 0, c = 0, v = 0;
        in.read(reinterpret_cast<char*>(&r), sizeof(r));
        in.read(reinterpret_cast<char*>(&c), sizeof(c));
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!in) throw std::runtime_error("truncated matrix body: " + path);
        if (r >= rows || c >= cols || r < prev_row)
            throw std::runtime_error("corrupt matrix triplet order: " + path);
        prev_row = r;
        ++offsets[r + 1];
        col_ids[k] = c;
        values[k] = v;
    }
    for (std::size_t r = 1; r < offsets.size(); ++r) offsets[r] += offsets[r - 1];
    return SparseCountMatrix(rows, cols, std::move(offsets), std::move(col_ids),
                             std::move(values));
}

void SparseCountMatrix::export_csv(const std::string& path) const {
    csv::Writer w(path);
    w.row({"row", "col", "value"});
    for (std::uint32_t r = 0; r < rows_; ++r)
        for (std::uint64_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            w.row({std::to_string(r), std::to_string(col_ids_[k]), std::to_string(values_[k])});
}

SparseMatrixBuilder::SparseMatrixBuilder(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), pending_(rows) {}

void SparseMatrixBuilder::add(std::uint32_t row, std::uint32_t col, std::uint32_t count) {
    if (row >= rows_ || col >= cols_) throw std::out_of_range("SparseMatrixBuilder: add out of range");
    pending_[row].emplace_back(col, count);
}

void SparseMatrixBuilder::merge(SparseMatrixBuilder&& other) {
    if (other.rows_ != rows_ || other.cols_ != cols_)
        throw std::invalid_argument("SparseMatrixBuilder: merge shape mismatch");
    for (std::uint32_t r = 0; r < rows_; ++r) {
        auto& dst = pending_[r];
        auto& src = other.pending_[r];
        dst.insert(dst.end(), src.begin(), src.end());
        src.clear();
        src.shrink_to_fit();
    }
}

SparseCountMatrix SparseMatrixBuilder::finalize() {
    std::uint64_t nnz = 0;
    for (auto& row : pending_) {
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        // merge duplicate columns in place
        std::size_t w = 0;
        for (std::size_t r = 0; r < row.size(); ++r) {
            if (w > 0 && row[w - 1].first == row[r].first) {
                row[w - 1].second += row[r].second;
            } else {
                row[w++] = row[r];
            }
        }
        row.resize(w);
        nnz += w;
    }

    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(rows_) + 1, 0);
    std::vector<std::uint32_t> col_ids;
    std::vector<std::uint32_t> values;
    col_ids.reserve(nnz);
    values.reserve(nnz);
    for (std::uint32_t r = 0; r < rows_; ++r) {
        offsets[r + 1] = offsets[r] + pending_[r].size();
        for (const auto& [c, v] : pending_[r]) {
            col_ids.push_back(c);
            values.push_back(v);
        }
        pending_[r].clear();
        pending_[r].shrink_to_fit();
    }
    pending_.clear();
    return SparseCountMatrix(rows_, cols_, std::move(offsets), std::move(col_ids),
                             std::move(values));
}

}  // namespace ctmine::cooc
