#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tsinr/errors.hpp"

namespace tsinr {

struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;

    bool operator==(const Shape&) const = default;
    std::size_t size() const { return rows * cols; }
    std::string str() const { return std::to_string(rows) + "x" + std::to_string(cols); }
};

// Dense row-major 2-D tensor of doubles. Vectors are rows x 1 or 1 x cols,
// scalars 1 x 1.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape s) : shape_(s), data_(s.size(), 0.0) {}
    Tensor(Shape s, std::vector<double> data) : shape_(s), data_(std::move(data)) {
        if (shape_.size() != data_.size())
            throw ValidationError("Tensor: shape " + shape_.str() + " does not match buffer of " +
                                  std::to_string(data_.size()));
    }

    static Tensor zeros(std::size_t r, std::size_t c) { return Tensor(Shape{r, c}); }
    static Tensor full(std::size_t r, std::size_t c, double v) {
        Tensor t(Shape{r, c});
        for (double& x : t.data_) x = v;
        return t;
    }
    static Tensor scalar(double v) { return full(1, 1, v); }
    static Tensor row(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor(Shape{1, n}, std::move(v));
    }
    static Tensor column(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor(Shape{n, 1}, std::move(v));
    }

    const Shape& shape() const { return shape_; }
    std::size_t rows() const { return shape_.rows; }
    std::size_t cols() const { return shape_.cols; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row_ptr(std::size_t r) { return data_.data() + r * shape_.cols; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * shape_.cols; }

    void fill(double v) {
        for (double& x : data_) x = v;
    }

    bool all_finite() const {
        for (double x : data_)
            if (!std::isfinite(x)) return false;
        return true;
    }

private:
    Shape shape_;
    std::vector<double> data_;
};

namespace linalg {

// C = A * B, with A (ra x ca) and B (ca x cb), all row-major raw views.
// Accumulation over k is in ascending order for every output element, so any
// two call sites produce identical rounding.
inline void matmul_into(double* c, const double* a, std::size_t ra, std::size_t ca,
                        const double* b, std::size_t cb) {
    for (std::size_t i = 0; i < ra; ++i) {
        double* crow = c + i * cb;
        for (std::size_t j = 0; j < cb; ++j) crow[j] = 0.0;
        const double* arow = a + i * ca;
        for (std::size_t k = 0; k < ca; ++k) {
            const double aik = arow[k];
            const double* brow = b + k * cb;
            for (std::size_t j = 0; j < cb; ++j) crow[j] += aik * brow[j];
        }
    }
}

// C += A * B^T, A (ra x ca), B (rb x ca). Used for dX_a = dC * B^T in matmul backward.
inline void matmul_nt_accum(double* c, const double* a, std::size_t ra, std::size_t ca,
                            const double* b, std::size_t rb) {
    for (std::size_t i = 0; i < ra; ++i) {
        const double* arow = a + i * ca;
        double* crow = c + i * rb;
        for (std::size_t j = 0; j < rb; ++j) {
            const double* brow = b + j * ca;
            double acc = 0.0;
            for (std::size_t k = 0; k < ca; ++k) acc += arow[k] * brow[k];
            crow[j] += acc;
        }
    }
}

// C += A^T * B, A (ra x ca), B (ra x cb). Used for dX_b = A^T * dC.
inline void matmul_tn_accum(double* c, const double* a, std::size_t ra, std::size_t ca,
                            const double* b, std::size_t cb) {
    for (std::size_t k = 0; k < ra; ++k) {
        const double* arow = a + k * ca;
        const double* brow = b + k * cb;
        for (std::size_t i = 0; i < ca; ++i) {
            const double aki = arow[i];
            double* crow = c + i * cb;
            for (std::size_t j = 0; j < cb; ++j) crow[j] += aki * brow[j];
        }
    }
}

} // namespace linalg

} // namespace tsinr
