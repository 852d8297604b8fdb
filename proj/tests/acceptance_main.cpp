// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsym/cli.hpp"
#include "wsym/equivariant.hpp"
#include "wsym/invariant.hpp"
#include "wsym/json_io.hpp"
#include "wsym/network_eval.hpp"
#include "wsym/preservation.hpp"
#include "wsym/rng.hpp"
#include "wsym/train.hpp"

using namespace wsym;
using nlohmann::json;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const Outcome& outcome, double seconds) {
    std::printf("[%s] criterion %d: %s (%.1fs)%s\n", outcome.ok ? "PASS" : "FAIL", id,
                name.c_str(), seconds, outcome.detail.str().empty()
                                           ? ""
                                           : ("  -- " + outcome.detail.str()).c_str());
    if (!outcome.ok) ++g_failures;
}

template <typename Fn>
void criterion(int id, const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        fn(outcome);
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.detail << "exception: " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, name, outcome, seconds);
}

void expect(Outcome& o, bool cond, const std::string& what) {
    if (!cond) {
        o.ok = false;
        o.detail << what << "; ";
    }
}

// ---------------------------------------------------------------- 1 ----

void check_preservation_exhaustive(Outcome& o) {
    const std::vector<double> grid{-2, -1, -0.5, 0.5, 1, 2};
    int misclassified = 0;
    long long checked = 0;
    for (int n : {2, 3}) {
        std::vector<int> image(n);
        for (int i = 0; i < n; ++i) image[i] = i;
        std::vector<std::vector<int>> perms;
        do {
            perms.push_back(image);
        } while (std::next_permutation(image.begin(), image.end()));

        std::vector<int> pick(n, 0);
        while (true) {
            for (const std::vector<int>& perm : perms) {
                Tensor m(Shape{static_cast<std::size_t>(n), static_cast<std::size_t>(n)});
                bool positive = true, unit = true;
                for (int i = 0; i < n; ++i) {
                    const double v = grid[pick[i]];
                    m.at(i, perm[i]) = v;
                    positive = positive && v > 0.0;
                    unit = unit && (v == 1.0 || v == -1.0);
                }
                ++checked;
                if (is_preserved(m, ActivationKind::ReLU, 8, 1).preserved != positive) {
                    ++misclassified;
                }
                if (is_preserved(m, ActivationKind::Sin, 8, 1).preserved != unit) ++misclassified;
                if (is_preserved(m, ActivationKind::Tanh, 8, 1).preserved != unit) ++misclassified;
            }
            int pos = 0;
            while (pos < n && ++pick[pos] == static_cast<int>(grid.size())) pick[pos++] = 0;
            if (pos == n) break;
        }
    }
    o.detail << checked << " monomials checked";
    expect(o, misclassified == 0, std::to_string(misclassified) + " misclassifications");
}

// ---------------------------------------------------------------- 2 ----

WeightSpaceSpec random_net_spec(SplitMix64& rng, bool cnn) {
    const int L = 2 + static_cast<int>(rng.below(3));
    std::vector<int> channels(L + 1);
    for (int& c : channels) c = 1 + static_cast<int>(rng.below(5));
    std::vector<int> wd(L, 1), bd(L, 1);
    if (cnn) {
        for (int& w : wd) w = 1 + static_cast<int>(rng.below(3));
    }
    return WeightSpaceSpec(channels, wd, bd);
}

NetworkKind net_kind_for(const WeightSpaceSpec& spec, bool cnn, SplitMix64& rng) {
    if (!cnn) return NetworkKind::fcnn();
    int needed = 1;
    for (int w : spec.weight_dims) needed += w - 1;
    return NetworkKind::cnn(needed + static_cast<int>(rng.below(4)));
}

double conforming_invariance_max(ActivationKind sigma, SubgroupKind subgroup, bool cnn,
                                 double lo, double hi, int total_trials, std::uint64_t seed) {
    SplitMix64 rng(seed);
    double worst = 0.0;
    int done = 0;
    while (done < total_trials) {
        const WeightSpaceSpec spec = random_net_spec(rng, cnn);
        const NetworkKind kind = net_kind_for(spec, cnn, rng);
        const WeightSpacePoint u = random_point(spec, rng.next(), 1.0);
        const int chunk = std::min(5, total_trials - done);
        const InvarianceReport r =
            check_invariance(u, kind, sigma, subgroup, chunk, rng.next(), lo, hi);
        worst = std::max(worst, r.max_rel_dev);
        done += chunk;
    }
    return worst;
}

// Adversarial mismatched-subgroup trial: small positive network so a flip /
// scaling visibly moves the output.
double negative_control_fraction(ActivationKind sigma, SubgroupKind subgroup, bool cnn,
                                 int trials, std::uint64_t seed) {
    SplitMix64 rng(seed);
    int exceeded = 0;
    for (int t = 0; t < trials; ++t) {
        const WeightSpaceSpec spec =
            cnn ? WeightSpaceSpec({1, 2, 1}, {2, 1}, {1, 1}) : WeightSpaceSpec::fcnn({1, 2, 1});
        WeightSpacePoint u = WeightSpacePoint::zeros(spec);
        for (Tensor& w : u.weights) {
            for (double& v : w.data()) v = rng.uniform(0.5, 1.5);
        }
        for (Tensor& b : u.biases) {
            for (double& v : b.data()) v = rng.uniform(0.5, 1.5);
        }
        GroupElement g = GroupElement::identity(spec.channels);
        if (subgroup == SubgroupKind::SignFlip) {
            std::vector<double> d{-1.0, rng.pick_sign()};
            g.layers[1] = MonomialElement(DiagonalScaling(d), Permutation::identity(2));
        } else {
            std::vector<double> d{rng.uniform(2.0, 4.0), rng.uniform(2.0, 4.0)};
            g.layers[1] = MonomialElement(DiagonalScaling(d), Permutation::identity(2));
        }
        const NetworkKind kind = cnn ? NetworkKind::cnn(4) : NetworkKind::fcnn();
        Tensor x = cnn ? Tensor(Shape{1, 4}) : Tensor(Shape{1});
        for (double& v : x.data()) v = rng.uniform(0.5, 1.5);
        const Tensor base = forward(u, kind, sigma, x);
        const Tensor acted = forward(act_weights(g, u), kind, sigma, x);
        const double rel = max_abs(sub(acted, base)) / std::max(1.0, max_abs(base));
        if (rel > 1e-3) ++exceeded;
    }
    return static_cast<double>(exceeded) / trials;
}

void check_network_invariance(Outcome& o) {
    const std::vector<std::pair<ActivationKind, SubgroupKind>> pairs{
        {ActivationKind::ReLU, SubgroupKind::Positive},
        {ActivationKind::Sin, SubgroupKind::SignFlip},
        {ActivationKind::Tanh, SubgroupKind::SignFlip},
    };
    std::uint64_t seed = 1000;
    for (const auto& [sigma, subgroup] : pairs) {
        for (bool cnn : {false, true}) {
            const double worst =
                conforming_invariance_max(sigma, subgroup, cnn, 0.1, 10.0, 1000, seed++);
            expect(o, worst <= 1e-10,
                   std::string(activation_name(sigma)) + (cnn ? "/cnn" : "/fcnn") +
                       " moderate scales worst " + std::to_string(worst));
        }
    }
    for (bool cnn : {false, true}) {
        const double worst = conforming_invariance_max(ActivationKind::ReLU,
                                                       SubgroupKind::Positive, cnn, 1.0, 1e6,
                                                       1000, seed++);
        expect(o, worst <= 1e-6,
               std::string("relu wide scales ") + (cnn ? "cnn" : "fcnn") + " worst " +
                   std::to_string(worst));
    }
    const struct {
        ActivationKind sigma;
        SubgroupKind subgroup;
        bool cnn;
    } negatives[] = {
        {ActivationKind::ReLU, SubgroupKind::SignFlip, false},
        {ActivationKind::ReLU, SubgroupKind::SignFlip, true},
        {ActivationKind::Tanh, SubgroupKind::Positive, false},
        {ActivationKind::Sin, SubgroupKind::Positive, true},
    };
    for (const auto& neg : negatives) {
        const double fraction =
            negative_control_fraction(neg.sigma, neg.subgroup, neg.cnn, 200, seed++);
        expect(o, fraction >= 0.95,
               std::string("negative control ") + activation_name(neg.sigma) +
                   (neg.cnn ? "/cnn" : "/fcnn") + " fraction " + std::to_string(fraction));
    }
}

// ---------------------------------------------------------------- 3 ----

WeightSpaceSpec random_layer_spec(SplitMix64& rng, LayerFamily family) {
    const int L = family == LayerFamily::Positive ? 2 + static_cast<int>(rng.below(3))
                                                  : 3 + static_cast<int>(rng.below(2));
    std::vector<int> channels(L + 1);
    for (int& c : channels) c = 1 + static_cast<int>(rng.below(5));
    std::vector<int> wd(L), bd(L);
    for (int& w : wd) w = 1 + static_cast<int>(rng.below(3));
    for (int& b : bd) b = 1 + static_cast<int>(rng.below(3));
    return WeightSpaceSpec(channels, wd, bd);
}

void check_layer_equivariance(Outcome& o) {
    for (LayerFamily family : {LayerFamily::Positive, LayerFamily::SignFlip}) {
        SplitMix64 rng(family == LayerFamily::Positive ? 2000 : 3000);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const WeightSpaceSpec spec = random_layer_spec(rng, family);
            const EquivariantParams params =
                EquivariantParams::random(family, spec, spec, rng.next());
            const WeightSpacePoint u = random_point(spec, rng.next(), 1.0);
            const GroupElement g =
                sample_group(subgroup_for(family), spec.channels, rng.next(), {0.1, 10.0});
            const WeightSpacePoint left = apply(params, act_weights(g, u));
            const WeightSpacePoint base = apply(params, u);
            const WeightSpacePoint right = act_weights(g, base);
            const double rel = max_abs_diff(left, right) /
                               (condition_ratio(g) * std::max(max_abs(base), 1e-12));
            worst = std::max(worst, rel);
        }
        o.detail << family_name(family) << " worst " << worst << "; ";
        expect(o, worst <= 1e-9, std::string(family_name(family)) + " exceeded 1e-9");
    }
}

// ---------------------------------------------------------------- 4 ----

void check_completeness(Outcome& o) {
    struct Case {
        WeightSpaceSpec source;
        WeightSpaceSpec target;
        LayerFamily family;
    };
    const WeightSpaceSpec tiny = WeightSpaceSpec::fcnn({1, 2, 2, 1});
    std::vector<Case> cases;
    cases.push_back({tiny, tiny, LayerFamily::Positive});
    cases.push_back({WeightSpaceSpec::fcnn({2, 3, 2}), WeightSpaceSpec::fcnn({2, 3, 2}),
                     LayerFamily::Positive});
    cases.push_back({WeightSpaceSpec::fcnn({1, 2, 1}), WeightSpaceSpec::fcnn({1, 2, 1}),
                     LayerFamily::Positive});
    cases.push_back({WeightSpaceSpec({1, 2, 3, 1}, {2, 1, 2}, {1, 1, 1}),
                     WeightSpaceSpec({1, 2, 3, 1}, {2, 1, 2}, {1, 1, 1}),
                     LayerFamily::Positive});
    cases.push_back({WeightSpaceSpec({2, 2, 2}, {1, 2}, {2, 1}),
                     WeightSpaceSpec({2, 2, 2}, {2, 1}, {1, 2}), LayerFamily::Positive});
    cases.push_back({WeightSpaceSpec::fcnn({2, 2, 2, 2}), WeightSpaceSpec::fcnn({2, 2, 2, 2}),
                     LayerFamily::Positive});

    cases.push_back({tiny, tiny, LayerFamily::SignFlip});
    cases.push_back({WeightSpaceSpec::fcnn({2, 2, 2, 2}), WeightSpaceSpec::fcnn({2, 2, 2, 2}),
                     LayerFamily::SignFlip});
    cases.push_back({WeightSpaceSpec::fcnn({1, 3, 2, 1}), WeightSpaceSpec::fcnn({1, 3, 2, 1}),
                     LayerFamily::SignFlip});
    cases.push_back({WeightSpaceSpec({1, 2, 2, 1}, {1, 2, 1}, {1, 1, 1}),
                     WeightSpaceSpec({1, 2, 2, 1}, {1, 2, 1}, {1, 1, 1}),
                     LayerFamily::SignFlip});
    cases.push_back({tiny, WeightSpaceSpec({1, 2, 2, 1}, {2, 1, 1}, {1, 2, 1}),
                     LayerFamily::SignFlip});
    cases.push_back({WeightSpaceSpec::fcnn({1, 2, 2, 2, 1}), WeightSpaceSpec::fcnn({1, 2, 2, 2, 1}),
                     LayerFamily::SignFlip});

    std::uint64_t seed = 4000;
    for (const Case& c : cases) {
        const auto start = std::chrono::steady_clock::now();
        const long long expected = param_count(c.source, c.target, c.family);
        const long long oracle = completeness_dimension(c.source, c.target, c.family, 40, seed++);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        expect(o, oracle == expected,
               std::string(family_name(c.family)) + " spec oracle " + std::to_string(oracle) +
                   " != count " + std::to_string(expected));
        expect(o, seconds < 60.0, "spec took " + std::to_string(seconds) + "s");
    }
    expect(o, param_count(tiny, tiny, LayerFamily::Positive) == 9, "relu tiny count != 9");
    expect(o, param_count(tiny, tiny, LayerFamily::SignFlip) == 11, "sintanh tiny count != 11");
    o.detail << cases.size() << " spec pairs";
}

// ---------------------------------------------------------------- 5 ----

void check_param_scaling(Outcome& o) {
    auto ours = [](int L) {
        std::vector<int> channels(L + 1, 3);
        const WeightSpaceSpec spec = WeightSpaceSpec::fcnn(channels);
        return param_count(spec, spec, LayerFamily::Positive);
    };
    const long long delta1 = ours(8) - ours(4);
    const long long delta2 = ours(12) - ours(8);
    expect(o, delta1 == delta2,
           "middle-layer delta not constant: " + std::to_string(delta1) + " vs " +
               std::to_string(delta2));

    // quadratic baselines: second differences strictly positive
    auto baseline_np = [](long long L) { return L * L; };  // c = c' = 1 at unit dims
    auto baseline_hnp = [](long long L) { return (L + 6) * (L + 6); };
    expect(o,
           baseline_np(12) - baseline_np(8) > baseline_np(8) - baseline_np(4) &&
               baseline_hnp(12) - baseline_hnp(8) > baseline_hnp(8) - baseline_hnp(4),
           "baselines did not grow quadratically");
    o.detail << "delta " << delta1;
}

// ---------------------------------------------------------------- 6 ----

void check_invariant_pipeline(Outcome& o) {
    for (LayerFamily family : {LayerFamily::Positive, LayerFamily::SignFlip}) {
        SplitMix64 rng(family == LayerFamily::Positive ? 6000 : 7000);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const WeightSpaceSpec spec = random_layer_spec(rng, family);
            const InvariantPipelineConfig config =
                InvariantPipelineConfig::make_default(family, spec, {6}, 3, rng.next());
            const WeightSpacePoint u = random_point(spec, rng.next(), 1.0);
            const GroupElement g =
                sample_group(subgroup_for(family), spec.channels, rng.next(), {0.1, 10.0});
            const Tensor a = apply_invariant(config, u);
            const Tensor b = apply_invariant(config, act_weights(g, u));
            worst = std::max(worst, max_abs(sub(a, b)) / std::max(1.0, max_abs(a)));
        }
        o.detail << family_name(family) << " worst " << worst << "; ";
        expect(o, worst <= 1e-9, std::string(family_name(family)) + " exceeded 1e-9");
    }
}

// ---------------------------------------------------------------- 7 ----

void check_pooling_fixture(Outcome& o) {
    Tensor w1(Shape{2, 1, 3}, {1, 0, 1, 2, 3, 1});
    Tensor w2(Shape{3, 2, 2}, {2, 1, 2, 3, 2, 3, 0, -1, -1, 1, 0, -1});
    Tensor w3(Shape{1, 3, 3}, {-1, 1, 0, 0, 0, 1, -1, 0, 2});
    const std::vector<Tensor> pooled = normalize_average_pool({w1, w2, w3});
    const std::vector<std::vector<double>> want{
        {11.0 / 28.0, 9.0 / 28.0, 8.0 / 28.0},
        {249.0 / 780.0, 531.0 / 780.0},
        {7.0 / 30.0, 5.0 / 30.0, 18.0 / 30.0},
    };
    for (std::size_t layer = 0; layer < want.size(); ++layer) {
        for (std::size_t f = 0; f < want[layer].size(); ++f) {
            expect(o, std::fabs(pooled[layer].at(f) - want[layer][f]) <= 1e-12,
                   "layer " + std::to_string(layer + 1) + " slot " + std::to_string(f));
        }
        expect(o, std::fabs(sum(pooled[layer]) - 1.0) <= 1e-12,
               "layer " + std::to_string(layer + 1) + " does not sum to 1");
    }
}

// ---------------------------------------------------------------- 8 ----

void check_toy_training(Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    const ToyTrainConfig config;  // defaults: 500 steps
    const ToyTrainResult result = train_toy(config);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << "loss " << result.initial_loss << " -> " << result.final_loss << ", aug dev "
             << result.holdout_aug_max_rel_dev;
    expect(o, !result.aborted_nonfinite, "training aborted on non-finite loss");
    expect(o, result.final_loss <= 0.5 * result.initial_loss, "MSE not halved in 500 steps");
    expect(o, result.holdout_aug_max_rel_dev <= 1e-7, "augmented holdout predictions diverge");
    expect(o, seconds < 300.0, "took " + std::to_string(seconds) + "s");
}

// ---------------------------------------------------------------- 9 ----

struct CommandRun {
    int code = 0;
    std::string report;           // stdout with elapsed_ms removed
    std::vector<std::string> files;  // bytes of every produced file
};

CommandRun run_command(const std::vector<std::string>& args,
                       const std::vector<std::string>& produced_files) {
    std::ostringstream out, err;
    CommandRun run;
    run.code = run_cli(args, out, err);
    json j = json::parse(out.str());
    j.erase("elapsed_ms");
    run.report = j.dump(2);
    for (const std::string& path : produced_files) run.files.push_back(read_text_file(path));
    return run;
}

void check_determinism(Outcome& o) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "wsym_acceptance";
    fs::create_directories(dir);
    const std::string weights = (dir / "w.json").string();
    const std::string matrix = (dir / "m.json").string();
    write_text_file(matrix, "{\"matrix\": [[0, 2], [3, 0]]}");

    struct Command {
        std::vector<std::string> args;
        std::vector<std::string> files;
    };
    const std::string prefix = (dir / "aug").string();
    const std::vector<Command> commands{
        {{"gen", "--channels", "1,2,2,1", "--seed", "5", "--output", weights}, {weights}},
        {{"augment", "--input", weights, "--subgroup", "positive", "--range", "1:1000000",
          "--count", "2", "--seed", "6", "--output", prefix},
         {prefix + ".000.json", prefix + ".000.group.json", prefix + ".001.json",
          prefix + ".001.group.json"}},
        {{"audit", "invariance", "--sigma", "relu", "--subgroup", "positive", "--channels",
          "2,3,2", "--trials", "60", "--seed", "7"},
         {}},
        {{"audit", "equivariance", "--family", "sintanh", "--channels", "1,2,2,1", "--trials",
          "30", "--seed", "8"},
         {}},
        {{"audit", "preserve", "--matrix", matrix, "--sigma", "relu", "--seed", "9"}, {}},
        {{"audit", "inv-layer", "--family", "relu", "--channels", "1,2,1", "--trials", "30",
          "--seed", "9"},
         {}},
        {{"params", "--channels", "1,2,2,1", "--family", "sintanh"}, {}},
        {{"pool", "--input", weights}, {}},
        {{"completeness", "--channels", "1,2,1", "--family", "relu", "--samples", "12", "--seed",
          "10"},
         {}},
        {{"train-toy", "--steps", "5", "--seed", "11"}, {}},
    };

    for (const Command& cmd : commands) {
        const CommandRun first = run_command(cmd.args, cmd.files);
        const CommandRun second = run_command(cmd.args, cmd.files);
        const std::string label = cmd.args.front() + (cmd.args.size() > 1 ? " " + cmd.args[1] : "");
        expect(o, first.code == second.code, label + ": exit codes differ");
        expect(o, first.report == second.report, label + ": reports differ");
        expect(o, first.files == second.files, label + ": emitted files differ");
    }
    o.detail << commands.size() << " commands, two runs each";
}

}  // namespace

int main() {
    criterion(1, "activation preservation, exhaustive grid", check_preservation_exhaustive);
    criterion(2, "network invariance under sampled group actions", check_network_invariance);
    criterion(3, "equivariant layer identity E(gU) = gE(U)", check_layer_equivariance);
    criterion(4, "completeness: oracle dimension equals parameter count", check_completeness);
    criterion(5, "parameter count grows linearly in depth", check_param_scaling);
    criterion(6, "invariant pipeline I(gU) = I(U)", check_invariant_pipeline);
    criterion(7, "normalize-then-average pooling fixture", check_pooling_fixture);
    criterion(8, "toy training halves MSE and stays invariant", check_toy_training);
    criterion(9, "seeded commands reproduce byte-identical reports", check_determinism);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
