#pragma once

#include <cstddef>
#include <vector>

namespace vhrd {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Square sparse matrix in compressed sparse row form. Column indices are
/// sorted within each row and duplicates are coalesced at construction.
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(int n, std::vector<Triplet> entries);

    int dim() const { return n_; }
    std::size_t nnz() const { return vals_.size(); }

    /// y = A x
    void apply(const double* x, double* y) const;
    std::vector<double> apply(const std::vector<double>& x) const;

    std::vector<double> diagonal() const;
    std::vector<double> row_sums() const;

    /// Maximum absolute row sum.
    double inf_norm() const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return cols_; }
    const std::vector<double>& values() const { return vals_; }

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> cols_;
    std::vector<double> vals_;
};

/// diag(d) - A, the resolvent-style shift used all over this project.
SparseOperator diag_minus(const std::vector<double>& d, const SparseOperator& a);

/// diag(d) + A
SparseOperator diag_plus(const std::vector<double>& d, const SparseOperator& a);

} // namespace vhrd
