#include "wsym/network_eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "wsym/rng.hpp"

namespace wsym {

const char* activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::Sin: return "sin";
        case ActivationKind::Tanh: return "tanh";
    }
    return "?";
}

ActivationKind activation_from_name(const std::string& name) {
    if (name == "relu") return ActivationKind::ReLU;
    if (name == "sin") return ActivationKind::Sin;
    if (name == "tanh") return ActivationKind::Tanh;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

Elementwise elementwise_for(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::ReLU: return Elementwise::Relu;
        case ActivationKind::Sin: return Elementwise::Sin;
        case ActivationKind::Tanh: return Elementwise::Tanh;
    }
    throw std::invalid_argument("unknown activation");
}

SubgroupKind matching_subgroup(ActivationKind kind) {
    return kind == ActivationKind::ReLU ? SubgroupKind::Positive : SubgroupKind::SignFlip;
}

namespace {

Tensor forward_fcnn(const WeightSpacePoint& point, ActivationKind activation, const Tensor& x) {
    const WeightSpaceSpec& spec = point.spec;
    if (!spec.is_fcnn()) {
        throw std::invalid_argument("forward: FCNN evaluation needs w_i = b_i = 1");
    }
    if (x.rank() != 1 || static_cast<int>(x.dim(0)) != spec.channels[0]) {
        throw std::invalid_argument("forward: input shape " + x.shape().str() +
                                    " does not match n_0 = " + std::to_string(spec.channels[0]));
    }
    const Elementwise op = elementwise_for(activation);
    Tensor signal = x;
    for (int i = 1; i <= spec.layers(); ++i) {
        const Tensor& w = point.weights[i - 1];
        const Tensor& b = point.biases[i - 1];
        Tensor next(Shape{w.dim(0)});
        for (std::size_t j = 0; j < w.dim(0); ++j) {
            double acc = b.at(j, 0);
            for (std::size_t k = 0; k < w.dim(1); ++k) acc += w.at(j, k, 0) * signal.at(k);
            next.at(j) = acc;
        }
        if (i < spec.layers()) next = elementwise(op, next);
        signal = std::move(next);
    }
    return signal;
}

Tensor forward_cnn(const WeightSpacePoint& point, const NetworkKind& kind,
                   ActivationKind activation, const Tensor& x) {
    const WeightSpaceSpec& spec = point.spec;
    for (int i = 1; i <= spec.layers(); ++i) {
        if (spec.bias_dims[i - 1] != 1) {
            throw std::invalid_argument("forward: CNN evaluation needs b_i = 1, layer " +
                                        std::to_string(i) + " has b = " +
                                        std::to_string(spec.bias_dims[i - 1]));
        }
    }
    if (x.rank() != 2 || static_cast<int>(x.dim(0)) != spec.channels[0] ||
        static_cast<int>(x.dim(1)) != kind.input_len) {
        throw std::invalid_argument("forward: CNN input must have shape [n_0, input_len]");
    }
    const Elementwise op = elementwise_for(activation);

    // signals[k] is the k-th channel at the current layer
    std::vector<Tensor> signals;
    signals.reserve(spec.channels[0]);
    for (int k = 0; k < spec.channels[0]; ++k) {
        Tensor chan(Shape{static_cast<std::size_t>(kind.input_len)});
        for (int t = 0; t < kind.input_len; ++t) chan.at(t) = x.at(k, t);
        signals.push_back(std::move(chan));
    }

    for (int i = 1; i <= spec.layers(); ++i) {
        const Tensor& w = point.weights[i - 1];
        const Tensor& b = point.biases[i - 1];
        const int in_len = static_cast<int>(signals[0].dim(0));
        const int out_len = in_len - spec.weight_dims[i - 1] + 1;
        if (out_len < 1) {
            throw std::invalid_argument("forward: CNN signal shrinks below length 1 at layer " +
                                        std::to_string(i));
        }
        std::vector<Tensor> next;
        next.reserve(w.dim(0));
        for (std::size_t j = 0; j < w.dim(0); ++j) {
            Tensor chan(Shape{static_cast<std::size_t>(out_len)});
            for (int t = 0; t < out_len; ++t) chan.at(t) = b.at(j, 0);
            for (std::size_t k = 0; k < w.dim(1); ++k) {
                Tensor kernel(Shape{w.dim(2)});
                for (std::size_t f = 0; f < w.dim(2); ++f) kernel.at(f) = w.at(j, k, f);
                chan = add(chan, conv1d_valid(kernel, signals[k]));
            }
            if (i < spec.layers() || kind.outer_activation) chan = elementwise(op, chan);
            next.push_back(std::move(chan));
        }
        signals = std::move(next);
    }

    const std::size_t out_len = signals[0].dim(0);
    Tensor out(Shape{signals.size() * out_len});
    std::size_t pos = 0;
    for (const Tensor& chan : signals) {
        for (std::size_t t = 0; t < out_len; ++t) out.at(pos++) = chan.at(t);
    }
    return out;
}

}  // namespace

Tensor forward(const WeightSpacePoint& point, const NetworkKind& kind, ActivationKind activation,
               const Tensor& x) {
    point.validate();
    return kind.type == NetworkKind::Type::FCNN ? forward_fcnn(point, activation, x)
                                                : forward_cnn(point, kind, activation, x);
}

InvarianceReport check_invariance(const WeightSpacePoint& point, const NetworkKind& kind,
                                  ActivationKind activation, SubgroupKind subgroup, int trials,
                                  std::uint64_t seed, double scale_lo, double scale_hi, int jobs) {
    point.validate();
    const WeightSpaceSpec& spec = point.spec;

    Tensor base_probe;  // shape template for per-trial probes
    if (kind.type == NetworkKind::Type::FCNN) {
        base_probe = Tensor(Shape{static_cast<std::size_t>(spec.channels[0])});
    } else {
        base_probe = Tensor(Shape{static_cast<std::size_t>(spec.channels[0]),
                                  static_cast<std::size_t>(kind.input_len)});
    }

    struct Worst {
        double abs_dev = 0.0;
        double rel_dev = 0.0;
        int trial = -1;
    };

    auto run_trial = [&](int trial) {
        SplitMix64 rng(seed + static_cast<std::uint64_t>(trial));
        SampleOptions opts;
        opts.lo = scale_lo;
        opts.hi = scale_hi;
        GroupElement g = sample_group(subgroup, spec.channels, rng.next(), opts);
        Tensor probe = base_probe;
        for (double& v : probe.data()) v = rng.uniform(-2.0, 2.0);
        const Tensor y = forward(point, kind, activation, probe);
        const Tensor y_acted = forward(act_weights(g, point), kind, activation, probe);
        const double abs_dev = max_abs(sub(y_acted, y));
        const double rel_dev = abs_dev / std::max(1.0, max_abs(y));
        return std::pair<double, double>{abs_dev, rel_dev};
    };

    auto reduce_range = [&](int begin, int end) {
        Worst w;
        for (int t = begin; t < end; ++t) {
            auto [abs_dev, rel_dev] = run_trial(t);
            if (rel_dev > w.rel_dev || w.trial < 0) {
                w.rel_dev = rel_dev;
                w.trial = t;
            }
            w.abs_dev = std::max(w.abs_dev, abs_dev);
        }
        return w;
    };

    Worst worst;
    if (jobs <= 1 || trials < 2) {
        worst = reduce_range(0, trials);
    } else {
        const int n_threads = std::min(jobs, trials);
        std::vector<Worst> partial(n_threads);
        std::vector<std::thread> threads;
        for (int t = 0; t < n_threads; ++t) {
            const int begin = trials * t / n_threads;
            const int end = trials * (t + 1) / n_threads;
            threads.emplace_back([&, t, begin, end] { partial[t] = reduce_range(begin, end); });
        }
        for (std::thread& th : threads) th.join();
        for (const Worst& w : partial) {
            if (w.trial < 0) continue;
            if (worst.trial < 0 || w.rel_dev > worst.rel_dev ||
                (w.rel_dev == worst.rel_dev && w.trial < worst.trial)) {
                worst.rel_dev = w.rel_dev;
                worst.trial = w.trial;
            }
            worst.abs_dev = std::max(worst.abs_dev, w.abs_dev);
        }
    }

    InvarianceReport report;
    report.trials = trials;
    report.max_abs_dev = worst.abs_dev;
    report.max_rel_dev = worst.rel_dev;
    report.argmax_trial = worst.trial;
    return report;
}

}  // namespace wsym
