#include "wsym/tensor.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wsym {

void Shape::validate() const {
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) {
            throw std::invalid_argument("Shape: every dim must be >= 1, got " + str());
        }
        if (d > std::numeric_limits<std::size_t>::max() / total) {
            throw std::invalid_argument("Shape: element count overflows, " + str());
        }
        total *= d;
    }
}

std::size_t Shape::numel() const {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    return total;
}

std::string Shape::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) os << "x";
        os << dims[i];
    }
    os << "]";
    return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(shape_.numel(), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
        throw std::invalid_argument("Tensor: data length " + std::to_string(data_.size()) +
                                    " does not match shape " + shape_.str());
    }
}

Tensor Tensor::vector(std::vector<double> values) {
    Shape s{values.size()};
    return Tensor(std::move(s), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return Tensor(Shape{rows, cols}, std::move(values));
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t(Shape{n, n});
    for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

namespace {
void require_rank(const Tensor& t, std::size_t r, const char* what) {
    if (t.rank() != r) {
        throw std::invalid_argument(std::string(what) + ": expected rank " + std::to_string(r) +
                                    " tensor, got shape " + t.shape().str());
    }
}
}  // namespace

const double& Tensor::at(std::size_t i) const { return data_[i]; }
const double& Tensor::at(std::size_t i, std::size_t j) const {
    return data_[i * shape_.dims[1] + j];
}
const double& Tensor::at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_.dims[1] + j) * shape_.dims[2] + k];
}
double& Tensor::at(std::size_t i) { return data_[i]; }
double& Tensor::at(std::size_t i, std::size_t j) { return data_[i * shape_.dims[1] + j]; }
double& Tensor::at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_.dims[1] + j) * shape_.dims[2] + k];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank(a, 2, "matmul");
    require_rank(b, 2, "matmul");
    if (a.dim(1) != b.dim(0)) {
        throw std::invalid_argument("matmul: inner dims differ, " + a.shape().str() + " vs " +
                                    b.shape().str());
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor c(Shape{m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double ail = a.at(i, l);
            for (std::size_t j = 0; j < n; ++j) {
                c.at(i, j) += ail * b.at(l, j);
            }
        }
    }
    return c;
}

Tensor matvec(const Tensor& a, const Tensor& x) {
    require_rank(a, 2, "matvec");
    require_rank(x, 1, "matvec");
    if (a.dim(1) != x.dim(0)) {
        throw std::invalid_argument("matvec: inner dims differ, " + a.shape().str() + " vs " +
                                    x.shape().str());
    }
    Tensor y(Shape{a.dim(0)});
    for (std::size_t i = 0; i < a.dim(0); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.dim(1); ++j) acc += a.at(i, j) * x.at(j);
        y.at(i) = acc;
    }
    return y;
}

Tensor conv1d_valid(const Tensor& kernel, const Tensor& signal) {
    require_rank(kernel, 1, "conv1d_valid");
    require_rank(signal, 1, "conv1d_valid");
    const std::size_t m = kernel.dim(0), n = signal.dim(0);
    if (n < m) {
        throw std::invalid_argument("conv1d_valid: signal " + signal.shape().str() +
                                    " shorter than kernel " + kernel.shape().str());
    }
    Tensor y(Shape{n - m + 1});
    for (std::size_t i = 0; i + m <= n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += kernel.at(j) * signal.at(i + j);
        y.at(i) = acc;
    }
    return y;
}

double apply_scalar(Elementwise op, double x) {
    switch (op) {
        case Elementwise::Relu: return x > 0.0 ? x : 0.0;
        case Elementwise::Sin: return std::sin(x);
        case Elementwise::Tanh: return std::tanh(x);
        case Elementwise::Abs: return std::fabs(x);
        case Elementwise::Square: return x * x;
    }
    throw std::invalid_argument("elementwise: unknown op");
}

Tensor elementwise(Elementwise op, const Tensor& t) {
    Tensor out = t;
    for (double& v : out.data()) v = apply_scalar(op, v);
    return out;
}

namespace {
void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!(a.shape() == b.shape())) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch, " + a.shape().str() +
                                    " vs " + b.shape().str());
    }
}
}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] += b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= b[i];
    return out;
}

Tensor scale(const Tensor& a, double factor) {
    Tensor out = a;
    for (double& v : out.data()) v *= factor;
    return out;
}

double sum(const Tensor& t) {
    double acc = 0.0;
    for (double v : t.data()) acc += v;
    return acc;
}

double max_abs(const Tensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace wsym
