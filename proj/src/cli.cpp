#include "wsym/cli.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsym/equivariant.hpp"
#include "wsym/invariant.hpp"
#include "wsym/json_io.hpp"
#include "wsym/network_eval.hpp"
#include "wsym/preservation.hpp"
#include "wsym/rng.hpp"
#include "wsym/train.hpp"

namespace wsym {

using nlohmann::json;

namespace {

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": expected comma-separated integers");
        }
    }
    if (out.empty()) {
        throw CLI::ValidationError(std::string(what) + ": empty list");
    }
    return out;
}

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError("--range: expected lo:hi");
    }
    try {
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--range: expected lo:hi with numeric bounds");
    }
}

std::string join_args(const std::vector<std::string>& args) {
    std::string out = "wsym";
    for (const std::string& a : args) {
        out += ' ';
        out += a;
    }
    return out;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void emit(const json& report, const std::string& output_path, std::ostream& out) {
    const std::string text = report.dump(2) + "\n";
    out << text;
    if (!output_path.empty()) write_text_file(output_path, text);
}

struct Worst {
    double abs_dev = 0.0;
    double rel_dev = 0.0;
    int trial = -1;
};

/// Order-independent max reduction over trials; ties resolve to the lowest
/// trial index so parallel runs match the sequential result.
template <typename Fn>
Worst reduce_trials(int trials, int jobs, Fn&& trial_fn) {
    auto run_range = [&](int begin, int end) {
        Worst w;
        for (int t = begin; t < end; ++t) {
            const auto [abs_dev, rel_dev] = trial_fn(t);
            if (w.trial < 0 || rel_dev > w.rel_dev) {
                w.rel_dev = rel_dev;
                w.trial = t;
            }
            w.abs_dev = std::max(w.abs_dev, abs_dev);
        }
        return w;
    };
    if (jobs <= 1 || trials < 2) return run_range(0, trials);
    const int n_threads = std::min(jobs, trials);
    std::vector<Worst> partial(n_threads);
    std::vector<std::thread> threads;
    for (int t = 0; t < n_threads; ++t) {
        const int begin = trials * t / n_threads;
        const int end = trials * (t + 1) / n_threads;
        threads.emplace_back([&, t, begin, end] { partial[t] = run_range(begin, end); });
    }
    for (std::thread& th : threads) th.join();
    Worst worst;
    for (const Worst& w : partial) {
        if (w.trial < 0) continue;
        if (worst.trial < 0 || w.rel_dev > worst.rel_dev ||
            (w.rel_dev == worst.rel_dev && w.trial < worst.trial)) {
            worst.rel_dev = w.rel_dev;
            worst.trial = w.trial;
        }
        worst.abs_dev = std::max(worst.abs_dev, w.abs_dev);
    }
    return worst;
}

WeightSpaceSpec spec_from_flags(const std::string& channels, const std::string& weight_dims,
                                const std::string& bias_dims) {
    const std::vector<int> ch = parse_int_list(channels, "--channels");
    const std::size_t L = ch.size() - 1;
    std::vector<int> wd(L, 1), bd(L, 1);
    if (!weight_dims.empty()) wd = parse_int_list(weight_dims, "--weight-dims");
    if (!bias_dims.empty()) bd = parse_int_list(bias_dims, "--bias-dims");
    return WeightSpaceSpec(ch, wd, bd);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"weight-space symmetry toolkit"};
    app.fallthrough(true);

    std::uint64_t seed = 0;
    double tol = 1e-9;
    int jobs = 1;
    std::string output_path;
    app.add_option("--seed", seed, "RNG seed; every command is deterministic in it");
    app.add_option("--tol", tol, "pass/fail tolerance on the relative deviation");
    app.add_option("--jobs", jobs, "worker threads for trial loops");
    app.add_option("--output", output_path, "also write the report / generated files here");

    // ---- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a random weights file");
    std::string gen_channels, gen_wd, gen_bd;
    double gen_scale = 1.0;
    gen->add_option("--channels", gen_channels, "channel counts n0,..,nL")->required();
    gen->add_option("--weight-dims", gen_wd, "per-layer weight dims w1,..,wL (default all 1)");
    gen->add_option("--bias-dims", gen_bd, "per-layer bias dims b1,..,bL (default all 1)");
    gen->add_option("--scale", gen_scale, "entries are uniform in [-scale, scale]");

    // ---- augment ------------------------------------------------------
    auto* augment = app.add_subcommand("augment", "write group-transformed copies of a weights file");
    std::string aug_input, aug_subgroup = "positive", aug_range = "0.5:2", aug_sigma;
    int aug_count = 1;
    bool aug_log_uniform = false;
    augment->add_option("--input", aug_input, "weights file")->required();
    augment->add_option("--subgroup", aug_subgroup, "positive|signflip|permonly|full|trivial");
    augment->add_option("--range", aug_range, "scale range lo:hi");
    augment->add_option("--count", aug_count, "number of augmented copies");
    augment->add_option("--sigma", aug_sigma, "declared activation, for mismatch warnings");
    augment->add_flag("--log-uniform", aug_log_uniform, "sample scales log-uniformly");

    // ---- audit --------------------------------------------------------
    auto* audit = app.add_subcommand("audit", "numeric symmetry audits");
    std::string audit_kind;
    audit->add_option("kind", audit_kind, "invariance|equivariance|preserve|inv-layer")
        ->required();
    std::string au_input, au_sigma = "relu", au_subgroup, au_channels, au_wd, au_bd;
    std::string au_family = "relu", au_range = "0.5:2", au_network = "fcnn", au_matrix;
    std::string au_target_wd, au_target_bd;
    int au_trials = 200, au_input_len = 8;
    bool au_outer = false;
    audit->add_option("--input", au_input, "weights file (invariance)");
    audit->add_option("--sigma,--activation", au_sigma, "activation relu|sin|tanh");
    audit->add_option("--subgroup", au_subgroup, "subgroup to sample (default: matches sigma)");
    audit->add_option("--channels", au_channels, "spec channels when no --input is given");
    audit->add_option("--weight-dims", au_wd, "spec weight dims");
    audit->add_option("--bias-dims", au_bd, "spec bias dims");
    audit->add_option("--target-weight-dims", au_target_wd, "target weight dims (equivariance)");
    audit->add_option("--target-bias-dims", au_target_bd, "target bias dims (equivariance)");
    audit->add_option("--family", au_family, "relu|sintanh (equivariance, inv-layer)");
    audit->add_option("--trials", au_trials, "number of random trials");
    audit->add_option("--range", au_range, "scale range lo:hi");
    audit->add_option("--network", au_network, "fcnn|cnn (invariance)");
    audit->add_option("--input-len", au_input_len, "CNN input length");
    audit->add_flag("--outer-activation", au_outer, "CNN: apply activation after the last layer");
    audit->add_option("--matrix", au_matrix, "matrix file (preserve)");

    // ---- params -------------------------------------------------------
    auto* params_cmd = app.add_subcommand("params", "parameter count report");
    std::string pa_channels, pa_wd, pa_bd, pa_target_wd, pa_target_bd, pa_family = "relu";
    params_cmd->add_option("--channels", pa_channels)->required();
    params_cmd->add_option("--weight-dims", pa_wd);
    params_cmd->add_option("--bias-dims", pa_bd);
    params_cmd->add_option("--target-weight-dims", pa_target_wd);
    params_cmd->add_option("--target-bias-dims", pa_target_bd);
    params_cmd->add_option("--family", pa_family, "relu|sintanh");

    // ---- pool ---------------------------------------------------------
    auto* pool_cmd = app.add_subcommand("pool", "normalize-then-average pooling of a weights file");
    std::string pool_input;
    pool_cmd->add_option("--input", pool_input, "weights file")->required();

    // ---- completeness -------------------------------------------------
    auto* comp = app.add_subcommand("completeness", "brute-force equivariant map dimension");
    std::string co_channels, co_wd, co_bd, co_target_wd, co_target_bd, co_family = "relu";
    int co_samples = 40;
    comp->add_option("--channels", co_channels)->required();
    comp->add_option("--weight-dims", co_wd);
    comp->add_option("--bias-dims", co_bd);
    comp->add_option("--target-weight-dims", co_target_wd);
    comp->add_option("--target-bias-dims", co_target_bd);
    comp->add_option("--family", co_family, "relu|sintanh");
    comp->add_option("--samples", co_samples, "sampled group elements");

    // ---- train-toy ----------------------------------------------------
    auto* train = app.add_subcommand("train-toy", "finite-difference training of a small stack");
    std::string tr_channels = "1,2,1", tr_mlp = "8";
    int tr_depth = 1, tr_steps = 500, tr_train_size = 24, tr_holdout = 8;
    int tr_feature_wdim = 3, tr_feature_bdim = 3;
    double tr_lr = 0.05, tr_scale = 1.0;
    long long tr_budget = 2000;
    train->add_option("--channels", tr_channels, "FCNN spec channels");
    train->add_option("--feature-weight-dim", tr_feature_wdim,
                      "weight feature dim of the stack's internal space");
    train->add_option("--feature-bias-dim", tr_feature_bdim,
                      "bias feature dim of the stack's internal space");
    train->add_option("--depth", tr_depth, "number of stacked equivariant layers");
    train->add_option("--mlp", tr_mlp, "hidden widths of the head MLP");
    train->add_option("--lr", tr_lr, "learning rate");
    train->add_option("--steps", tr_steps, "gradient steps");
    train->add_option("--train-size", tr_train_size, "training points");
    train->add_option("--holdout-size", tr_holdout, "held-out points");
    train->add_option("--scale", tr_scale, "data scale");
    train->add_option("--budget", tr_budget, "parameter budget");

    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("wsym");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    const std::string command_echo = join_args(args);
    Timer timer;

    try {
        if (gen->parsed()) {
            const WeightSpaceSpec spec = spec_from_flags(gen_channels, gen_wd, gen_bd);
            if (output_path.empty()) {
                err << "gen: --output file is required\n";
                return 2;
            }
            const WeightSpacePoint point = random_point(spec, seed, gen_scale);
            write_text_file(output_path, serialize(point) + "\n");
            json report{{"command", command_echo},
                        {"seed", seed},
                        {"file", output_path},
                        {"dimension", spec.dimension()},
                        {"elapsed_ms", timer.elapsed_ms()}};
            out << report.dump(2) << "\n";
            return 0;
        }

        if (augment->parsed()) {
            if (output_path.empty()) {
                err << "augment: --output prefix is required\n";
                return 2;
            }
            const WeightSpacePoint point = deserialize(read_text_file(aug_input));
            const SubgroupKind kind = subgroup_from_name(aug_subgroup);
            if (!aug_sigma.empty() &&
                matching_subgroup(activation_from_name(aug_sigma)) != kind) {
                err << "warning: subgroup '" << aug_subgroup
                    << "' does not match the invariance subgroup of activation '" << aug_sigma
                    << "'\n";
            }
            const auto [lo, hi] = parse_range(aug_range);
            SampleOptions opts;
            opts.lo = lo;
            opts.hi = hi;
            opts.log_uniform = aug_log_uniform;
            json files = json::array();
            for (int c = 0; c < aug_count; ++c) {
                char suffix[16];
                std::snprintf(suffix, sizeof(suffix), ".%03d", c);
                const GroupElement g = sample_group(kind, point.spec.channels,
                                                    seed + static_cast<std::uint64_t>(c), opts);
                const std::string weights_path = output_path + suffix + ".json";
                const std::string group_path = output_path + suffix + ".group.json";
                write_text_file(weights_path, serialize(act_weights(g, point)) + "\n");
                write_text_file(group_path, group_to_json(g).dump(2) + "\n");
                files.push_back(weights_path);
                files.push_back(group_path);
            }
            json report{{"command", command_echo},
                        {"seed", seed},
                        {"count", aug_count},
                        {"subgroup", aug_subgroup},
                        {"files", std::move(files)},
                        {"elapsed_ms", timer.elapsed_ms()}};
            out << report.dump(2) << "\n";
            return 0;
        }

        if (audit->parsed()) {
            json report{{"command", command_echo}, {"seed", seed}, {"tol", tol}};
            bool pass = false;

            if (audit_kind == "invariance") {
                const ActivationKind sigma = activation_from_name(au_sigma);
                const SubgroupKind kind = au_subgroup.empty() ? matching_subgroup(sigma)
                                                              : subgroup_from_name(au_subgroup);
                if (kind != matching_subgroup(sigma)) {
                    err << "warning: subgroup '" << subgroup_name(kind)
                        << "' does not match the invariance subgroup of activation '" << au_sigma
                        << "'\n";
                }
                WeightSpacePoint point =
                    au_input.empty()
                        ? random_point(spec_from_flags(au_channels.empty() ? "2,3,3,2"
                                                                           : au_channels,
                                                       au_wd, au_bd),
                                       seed ^ 0x5eedULL, 1.0)
                        : deserialize(read_text_file(au_input));
                const auto [lo, hi] = parse_range(au_range);
                NetworkKind net = NetworkKind::fcnn();
                if (au_network == "cnn") {
                    net = NetworkKind::cnn(au_input_len, au_outer);
                } else if (au_network != "fcnn") {
                    err << "audit: unknown network '" << au_network << "'\n";
                    return 2;
                }
                const InvarianceReport r =
                    check_invariance(point, net, sigma, kind, au_trials, seed, lo, hi, jobs);
                pass = r.max_rel_dev <= tol;
                report["trials"] = r.trials;
                report["max_abs_dev"] = r.max_abs_dev;
                report["max_rel_dev"] = r.max_rel_dev;
                report["argmax_trial"] = r.argmax_trial;
            } else if (audit_kind == "equivariance") {
                const LayerFamily family = family_from_name(au_family);
                const std::string channels =
                    au_channels.empty()
                        ? (family == LayerFamily::Positive ? "2,3,2" : "2,3,3,2")
                        : au_channels;
                const WeightSpaceSpec source = spec_from_flags(channels, au_wd, au_bd);
                WeightSpaceSpec target = source;
                if (!au_target_wd.empty() || !au_target_bd.empty()) {
                    target = spec_from_flags(channels, au_target_wd, au_target_bd);
                }
                const auto [lo, hi] = parse_range(au_range);
                SampleOptions opts;
                opts.lo = lo;
                opts.hi = hi;
                const Worst worst = reduce_trials(au_trials, jobs, [&](int t) {
                    SplitMix64 rng(seed + static_cast<std::uint64_t>(t));
                    const EquivariantParams p =
                        EquivariantParams::random(family, source, target, rng.next());
                    const WeightSpacePoint u = random_point(source, rng.next(), 1.0);
                    const GroupElement g =
                        sample_group(subgroup_for(family), source.channels, rng.next(), opts);
                    const WeightSpacePoint left = apply(p, act_weights(g, u));
                    const WeightSpacePoint base = apply(p, u);
                    const WeightSpacePoint right = act_weights(g, base);
                    const double abs_dev = max_abs_diff(left, right);
                    const double denom =
                        condition_ratio(g) * std::max(max_abs(base), 1e-12);
                    return std::pair<double, double>{abs_dev, abs_dev / denom};
                });
                pass = worst.rel_dev <= tol;
                report["trials"] = au_trials;
                report["max_abs_dev"] = worst.abs_dev;
                report["max_rel_dev"] = worst.rel_dev;
                report["argmax_trial"] = worst.trial;
            } else if (audit_kind == "preserve") {
                if (au_matrix.empty()) {
                    err << "audit preserve: --matrix file is required\n";
                    return 2;
                }
                const Tensor a = matrix_from_json(json::parse(read_text_file(au_matrix)));
                const PreservationVerdict verdict =
                    is_preserved(a, activation_from_name(au_sigma), au_trials, seed);
                pass = verdict.preserved;
                report["trials"] = au_trials;
                report["preserved"] = verdict.preserved;
                report["max_abs_dev"] = verdict.witness ? verdict.witness->deviation : 0.0;
                report["max_rel_dev"] = verdict.witness ? verdict.witness->deviation : 0.0;
                if (verdict.witness) {
                    report["witness"] = json{{"x", tensor_to_json(verdict.witness->x)},
                                             {"deviation", verdict.witness->deviation}};
                }
                const MonomialClassification mc = classify_monomial(a);
                report["monomial"] = mc.monomial;
                if (mc.monomial) report["monomial_kind"] = subgroup_name(mc.kind);
            } else if (audit_kind == "inv-layer") {
                const LayerFamily family = family_from_name(au_family);
                const WeightSpaceSpec spec = spec_from_flags(
                    au_channels.empty() ? "2,3,3,2" : au_channels, au_wd, au_bd);
                const InvariantPipelineConfig config =
                    InvariantPipelineConfig::make_default(family, spec, {4}, 3, seed ^ 0xA1FAULL);
                const auto [lo, hi] = parse_range(au_range);
                SampleOptions opts;
                opts.lo = lo;
                opts.hi = hi;
                const Worst worst = reduce_trials(au_trials, jobs, [&](int t) {
                    SplitMix64 rng(seed + static_cast<std::uint64_t>(t));
                    const WeightSpacePoint u = random_point(spec, rng.next(), 1.0);
                    const GroupElement g =
                        sample_group(subgroup_for(family), spec.channels, rng.next(), opts);
                    const Tensor base = apply_invariant(config, u);
                    const Tensor acted = apply_invariant(config, act_weights(g, u));
                    const double abs_dev = max_abs(sub(acted, base));
                    return std::pair<double, double>{abs_dev,
                                                     abs_dev / std::max(1.0, max_abs(base))};
                });
                pass = worst.rel_dev <= tol;
                report["trials"] = au_trials;
                report["max_abs_dev"] = worst.abs_dev;
                report["max_rel_dev"] = worst.rel_dev;
                report["argmax_trial"] = worst.trial;
            } else {
                err << "audit: unknown kind '" << audit_kind << "'\n";
                return 2;
            }

            report["pass"] = pass;
            report["elapsed_ms"] = timer.elapsed_ms();
            emit(report, output_path, out);
            return pass ? 0 : 1;
        }

        if (params_cmd->parsed()) {
            const LayerFamily family = family_from_name(pa_family);
            const WeightSpaceSpec source = spec_from_flags(pa_channels, pa_wd, pa_bd);
            const WeightSpaceSpec target =
                (pa_target_wd.empty() && pa_target_bd.empty())
                    ? source
                    : spec_from_flags(pa_channels, pa_target_wd, pa_target_bd);
            const long long exact = param_count(source, target, family);
            const int L = source.layers();
            long long c = 1, ct = 1;
            for (int i = 0; i < L; ++i) {
                c = std::max({c, static_cast<long long>(source.weight_dims[i]),
                              static_cast<long long>(source.bias_dims[i])});
                ct = std::max({ct, static_cast<long long>(target.weight_dims[i]),
                               static_cast<long long>(target.bias_dims[i])});
            }
            const long long boundary = source.channels[0] + source.channels[L];
            const long long baseline_np = c * ct * L * L;
            const long long baseline_hnp = c * ct * (L + boundary) * (L + boundary);
            json report{{"command", command_echo},
                        {"exact", exact},
                        {"asymptotic", "O(c c' (L + n0 + nL))"},
                        {"baseline_np", baseline_np},
                        {"baseline_np_asymptotic", "O(c c' L^2)"},
                        {"baseline_hnp", baseline_hnp},
                        {"baseline_hnp_asymptotic", "O(c c' (L + n0 + nL)^2)"},
                        {"ratio", static_cast<double>(baseline_hnp) / static_cast<double>(exact)},
                        {"elapsed_ms", timer.elapsed_ms()}};
            emit(report, output_path, out);
            return 0;
        }

        if (pool_cmd->parsed()) {
            const WeightSpacePoint point = deserialize(read_text_file(pool_input));
            const std::vector<Tensor> pooled = normalize_average_pool(point.weights);
            json layers = json::array();
            for (const Tensor& t : pooled) layers.push_back(tensor_to_json(t));
            json report{{"command", command_echo},
                        {"pooled", std::move(layers)},
                        {"elapsed_ms", timer.elapsed_ms()}};
            emit(report, output_path, out);
            return 0;
        }

        if (comp->parsed()) {
            const LayerFamily family = family_from_name(co_family);
            const WeightSpaceSpec source = spec_from_flags(co_channels, co_wd, co_bd);
            const WeightSpaceSpec target =
                (co_target_wd.empty() && co_target_bd.empty())
                    ? source
                    : spec_from_flags(co_channels, co_target_wd, co_target_bd);
            const long long expected = param_count(source, target, family);
            const long long oracle =
                completeness_dimension(source, target, family, co_samples, seed);
            const bool match = expected == oracle;
            json report{{"command", command_echo},
                        {"seed", seed},
                        {"samples", co_samples},
                        {"param_count", expected},
                        {"oracle_dimension", oracle},
                        {"match", match},
                        {"elapsed_ms", timer.elapsed_ms()}};
            emit(report, output_path, out);
            return match ? 0 : 1;
        }

        if (train->parsed()) {
            ToyTrainConfig config;
            config.channels = parse_int_list(tr_channels, "--channels");
            config.feature_weight_dim = tr_feature_wdim;
            config.feature_bias_dim = tr_feature_bdim;
            config.stack_depth = tr_depth;
            config.mlp_hidden = parse_int_list(tr_mlp, "--mlp");
            config.learning_rate = tr_lr;
            config.steps = tr_steps;
            config.train_size = tr_train_size;
            config.holdout_size = tr_holdout;
            config.data_scale = tr_scale;
            config.seed = seed;
            config.param_budget = tr_budget;
            const ToyTrainResult result = train_toy(config);
            json report{{"command", command_echo},
                        {"seed", seed},
                        {"parameter_count", result.parameter_count},
                        {"steps_run", result.steps_run},
                        {"initial_loss", result.initial_loss},
                        {"final_loss", result.final_loss},
                        {"halved", result.final_loss <= 0.5 * result.initial_loss},
                        {"aborted_nonfinite", result.aborted_nonfinite},
                        {"holdout_aug_max_rel_dev", result.holdout_aug_max_rel_dev},
                        {"losses", result.losses},
                        {"elapsed_ms", timer.elapsed_ms()}};
            emit(report, output_path, out);
            return result.aborted_nonfinite ? 1 : 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    err << "no subcommand given\n";
    return 2;
}

}  // namespace wsym
