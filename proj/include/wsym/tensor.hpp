#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace wsym {

/// Dense row-major shape. Every dim is >= 1 and the total element count
/// must fit in std::size_t.
struct Shape {
    std::vector<std::size_t> dims;

    Shape() = default;
    Shape(std::initializer_list<std::size_t> d) : dims(d) { validate(); }
    explicit Shape(std::vector<std::size_t> d) : dims(std::move(d)) { validate(); }

    std::size_t rank() const { return dims.size(); }
    std::size_t numel() const;
    std::string str() const;

    bool operator==(const Shape&) const = default;

private:
    void validate() const;
};

/// Minimal dense array of 64-bit floats, row-major. This is the substrate
/// for weight entries, network signals and layer coefficient blocks.
/// All operations on tensors are pure; a tensor is never mutated once it
/// has left the code that built it.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape);  // zero-filled
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
    static Tensor vector(std::vector<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Tensor identity(std::size_t n);

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.rank(); }
    std::size_t dim(std::size_t i) const { return shape_.dims.at(i); }
    std::size_t numel() const { return data_.size(); }

    double operator[](std::size_t flat) const { return data_[flat]; }
    double& operator[](std::size_t flat) { return data_[flat]; }

    const double& at(std::size_t i) const;
    const double& at(std::size_t i, std::size_t j) const;
    const double& at(std::size_t i, std::size_t j, std::size_t k) const;
    double& at(std::size_t i);
    double& at(std::size_t i, std::size_t j);
    double& at(std::size_t i, std::size_t j, std::size_t k);

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool all_finite() const;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// c_ij = sum_l a_il * b_lj for a [m x k] and b [k x n].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Matrix times rank-1 vector, y_i = sum_j a_ij * x_j.
Tensor matvec(const Tensor& a, const Tensor& x);

/// Valid (no padding) 1-D convolution, y_i = sum_j kernel_j * signal_{i+j-1}
/// in 1-based index notation; output length n - m + 1.
Tensor conv1d_valid(const Tensor& kernel, const Tensor& signal);

enum class Elementwise { Relu, Sin, Tanh, Abs, Square };

Tensor elementwise(Elementwise op, const Tensor& t);
double apply_scalar(Elementwise op, double x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

double sum(const Tensor& t);
double max_abs(const Tensor& t);

}  // namespace wsym
