#include "vhrd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vhrd {

SparseOperator SparseOperator::from_triplets(int n, std::vector<Triplet> entries) {
    if (n <= 0) throw std::invalid_argument("sparse operator dimension must be positive");
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw std::invalid_argument("triplet index out of bounds");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseOperator op;
    op.n_ = n;
    op.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    op.cols_.reserve(entries.size());
    op.vals_.reserve(entries.size());

    std::size_t k = 0;
    for (int r = 0; r < n; ++r) {
        while (k < entries.size() && entries[k].row == r) {
            int c = entries[k].col;
            double v = entries[k].value;
            ++k;
            while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
                v += entries[k].value;
                ++k;
            }
            op.cols_.push_back(c);
            op.vals_.push_back(v);
        }
        op.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<int>(op.cols_.size());
    }
    return op;
}

void SparseOperator::apply(const double* x, double* y) const {
    for (int r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            acc += vals_[static_cast<std::size_t>(k)] * x[cols_[static_cast<std::size_t>(k)]];
        y[r] = acc;
    }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("sparse apply: size mismatch");
    std::vector<double> y(x.size());
    apply(x.data(), y.data());
    return y;
}

std::vector<double> SparseOperator::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r)
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (cols_[static_cast<std::size_t>(k)] == r)
                d[static_cast<std::size_t>(r)] = vals_[static_cast<std::size_t>(k)];
    return d;
}

std::vector<double> SparseOperator::row_sums() const {
    std::vector<double> s(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            acc += vals_[static_cast<std::size_t>(k)];
        s[static_cast<std::size_t>(r)] = acc;
    }
    return s;
}

double SparseOperator::inf_norm() const {
    double m = 0.0;
    for (int r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            acc += std::abs(vals_[static_cast<std::size_t>(k)]);
        m = std::max(m, acc);
    }
    return m;
}

namespace {

SparseOperator combine_diag(const std::vector<double>& d, const SparseOperator& a, double sign) {
    if (static_cast<int>(d.size()) != a.dim())
        throw std::invalid_argument("diag/operator size mismatch");
    std::vector<Triplet> trip;
    trip.reserve(a.nnz() + d.size());
    const auto& rp = a.row_ptr();
    const auto& cols = a.cols();
    const auto& vals = a.values();
    for (int r = 0; r < a.dim(); ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            trip.push_back({r, cols[static_cast<std::size_t>(k)], sign * vals[static_cast<std::size_t>(k)]});
    for (int r = 0; r < a.dim(); ++r)
        trip.push_back({r, r, d[static_cast<std::size_t>(r)]});
    return SparseOperator::from_triplets(a.dim(), std::move(trip));
}

} // namespace

SparseOperator diag_minus(const std::vector<double>& d, const SparseOperator& a) {
    return combine_diag(d, a, -1.0);
}

SparseOperator diag_plus(const std::vector<double>& d, const SparseOperator& a) {
    return combine_diag(d, a, 1.0);
}

} // namespace vhrd
