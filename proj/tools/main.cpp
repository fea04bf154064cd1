// lpv-ssid: stable-by-design LPV state-space identification toolkit.
//
// Subcommands: gen-data, train, baseline-train, eval, simulate, sweep,
// grad-check, stability-check, fit-init. Exit codes: 0 success, 1 usage
// error, 2 data error, 3 numeric failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpvss/checkpoint.hpp"
#include "lpvss/checks.hpp"
#include "lpvss/eval.hpp"
#include "lpvss/parallel.hpp"
#include "lpvss/svg.hpp"

namespace {

using namespace lpvss;

struct SplitFlags {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
};

struct ArchFlags {
    std::vector<std::size_t> enc_hidden{32};
    std::vector<std::size_t> gen_hidden{32, 32};
    std::string activation = "sigmoid";
    double eps_tilde = 0.0;
    bool freeze_eps = false;

    NnssSpec spec() const {
        NnssSpec s;
        s.encoder_hidden = enc_hidden;
        s.generator_hidden = gen_hidden;
        s.hidden_activation = activation_from_name(activation);
        s.eps_tilde_init = eps_tilde;
        s.train_eps = !freeze_eps;
        return s;
    }
};

void add_config_flags(CLI::App* cmd, TrainConfig& cfg, std::string& loss_norm) {
    cmd->add_option("--order", cfg.order_n, "Model order n");
    cmd->add_option("--L", cfg.window_length, "Trajectory window length L");
    cmd->add_option("--stride", cfg.stride, "Sliding-window stride s");
    cmd->add_option("--batch", cfg.batch_size, "Mini-batch size |Z|");
    cmd->add_option("--lr", cfg.learning_rate, "Adam learning rate");
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--lambda", cfg.lambda, "State-consistency weight");
    cmd->add_option("--seed", cfg.seed, "Random seed");
    cmd->add_option("--gamma", cfg.gamma, "Stability disk radius gamma in (0,1]");
    cmd->add_option("--patience", cfg.patience, "Early-stopping patience (0 disables)");
    cmd->add_option("--loss-norm", loss_norm, "Loss normalization: printed|natural")
        ->check(CLI::IsMember({"printed", "natural"}));
    cmd->set_config("--config", "", "Config file with key=value lines (flag names as keys)");
}

void add_split_flags(CLI::App* cmd, SplitFlags& s) {
    cmd->add_option("--split-train", s.train, "Chronological train fraction");
    cmd->add_option("--split-val", s.val, "Chronological validation fraction");
    cmd->add_option("--split-test", s.test, "Chronological test fraction");
}

void add_arch_flags(CLI::App* cmd, ArchFlags& a, bool with_generator) {
    cmd->add_option("--enc-hidden", a.enc_hidden, "Encoder hidden widths")->delimiter(',');
    if (with_generator) {
        cmd->add_option("--gen-hidden", a.gen_hidden, "Generator hidden widths")->delimiter(',');
        cmd->add_option("--activation", a.activation, "Generator hidden activation")
            ->check(CLI::IsMember({"sigmoid", "tanh", "relu"}));
    }
    cmd->add_option("--eps-tilde", a.eps_tilde, "Initial eps_tilde");
    cmd->add_flag("--freeze-eps", a.freeze_eps, "Keep eps_tilde fixed during training");
}

struct PreparedData {
    RawSeries raw;
    Normalizer normalizer;
    SplitSeries splits;  // normalized
};

PreparedData prepare(const std::string& path, const SplitFlags& fracs, std::size_t min_rows) {
    PreparedData d;
    d.raw = load_csv(path);
    SplitSeries raw_splits = chrono_split(d.raw, fracs.train, fracs.val, fracs.test, min_rows);
    d.normalizer = Normalizer::fit(d.raw, raw_splits.train.rows());
    RawSeries normalized = d.normalizer.apply(d.raw);
    d.splits = chrono_split(normalized, fracs.train, fracs.val, fracs.test, min_rows);
    for (std::size_t c : d.normalizer.constant_channels)
        std::fprintf(stderr, "warning: channel %zu is constant; sigma set to 1\n", c + 1);
    return d;
}

void write_report_csv(const TrainReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write '" + path + "'");
    std::fprintf(f, "epoch,train_loss,val_rmse\n");
    for (std::size_t e = 0; e < report.train_loss.size(); ++e)
        std::fprintf(f, "%zu,%.17g,%.17g\n", e + 1, report.train_loss[e], report.val_rmse[e]);
    std::fclose(f);
}

void print_split_eval(const char* name, const SplitEval& e) {
    std::printf("%s: rmse", name);
    for (double v : e.per_channel_rmse) std::printf(" %.6g", v);
    std::printf(" (avg %.6g), spectral radius in [%.4g, %.4g]\n", e.averaged_rmse, e.radius_min,
                e.radius_max);
}

template <typename Model>
int finish_training(Model& model, const TrainReport& report, const PreparedData& data,
                    const TrainConfig& cfg, const std::string& out,
                    const std::string& report_path, const std::string& pred_path,
                    const std::string& plot_path) {
    std::printf("epochs run: %zu%s, best epoch %zu (val rmse %.6g)\n", report.train_loss.size(),
                report.stopped_early ? " (stopped early)" : "", report.best_epoch,
                report.best_val_rmse);
    std::printf("audited spectral radius max: %.6g (gamma %.4g)\n", report.audit_max_radius,
                cfg.gamma);

    print_split_eval("train", simulate_and_report(model, data.splits.train));
    print_split_eval("val", simulate_and_report(model, data.splits.val));
    Mat predictions;
    const SplitEval test_eval = simulate_and_report(model, data.splits.test, nullptr, &predictions);
    print_split_eval("test", test_eval);

    CheckpointMeta meta;
    meta.seed = cfg.seed;
    meta.config = cfg;
    save_checkpoint(model, &data.normalizer, meta, out);
    std::printf("checkpoint written to %s\n", out.c_str());

    if (!report_path.empty()) write_report_csv(report, report_path);
    if (!pred_path.empty()) write_prediction_csv(data.splits.test.outputs, predictions, pred_path);
    if (!plot_path.empty()) write_comparison_svg(data.splits.test.outputs, predictions, plot_path);
    return 0;
}

std::vector<std::uint64_t> parse_seed_list(const std::vector<std::uint64_t>& v) { return v; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable-by-design LPV neural state-space identification"};
    app.require_subcommand(1);

    // ---- gen-data ----
    auto* gen = app.add_subcommand("gen-data", "Generate the synthetic two-tank benchmark CSV");
    struct {
        std::size_t steps = 4000;
        std::uint64_t seed = 1;
        std::string out = "tank.csv";
        double noise_std = 0.01;
        std::string input = "prbs";
        std::size_t hold = 50;
        double level_min = 0.0, level_max = 2.0;
        std::size_t sines = 5;
        double amplitude = 0.8, offset = 1.0;
    } gd;
    gen->add_option("--steps", gd.steps, "Number of samples");
    gen->add_option("--seed", gd.seed, "Random seed");
    gen->add_option("--out", gd.out, "Output CSV path")->required();
    gen->add_option("--noise-std", gd.noise_std, "Output noise standard deviation");
    gen->add_option("--input", gd.input, "Input kind: prbs|multisine")
        ->check(CLI::IsMember({"prbs", "multisine"}));
    gen->add_option("--hold", gd.hold, "Hold length for piecewise-constant levels");
    gen->add_option("--level-min", gd.level_min, "Minimum input level");
    gen->add_option("--level-max", gd.level_max, "Maximum input level");
    gen->add_option("--sines", gd.sines, "Multisine component count");
    gen->add_option("--amp", gd.amplitude, "Multisine total amplitude");
    gen->add_option("--offset", gd.offset, "Multisine offset");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "Train the NN-SS model on a data CSV");
    struct {
        std::string data, out = "model.json", report, pred, plot;
        TrainConfig cfg;
        std::string loss_norm = "printed";
        SplitFlags splits;
        ArchFlags arch;
    } tr;
    train_cmd->add_option("--data", tr.data, "Input CSV")->required();
    train_cmd->add_option("--out", tr.out, "Checkpoint path");
    train_cmd->add_option("--report", tr.report, "Training report CSV");
    train_cmd->add_option("--pred", tr.pred, "Test-split prediction CSV");
    train_cmd->add_option("--plot", tr.plot, "Test-split comparison SVG");
    add_config_flags(train_cmd, tr.cfg, tr.loss_norm);
    add_split_flags(train_cmd, tr.splits);
    add_arch_flags(train_cmd, tr.arch, true);

    // ---- baseline-train ----
    auto* base_cmd =
        app.add_subcommand("baseline-train", "Train the constant-matrix Schur-stable baseline");
    struct {
        std::string data, out = "baseline.json", report, pred, plot, init_a;
        TrainConfig cfg;
        std::string loss_norm = "printed";
        SplitFlags splits;
        ArchFlags arch;
    } bl;
    base_cmd->add_option("--data", bl.data, "Input CSV")->required();
    base_cmd->add_option("--out", bl.out, "Checkpoint path");
    base_cmd->add_option("--report", bl.report, "Training report CSV");
    base_cmd->add_option("--pred", bl.pred, "Test-split prediction CSV");
    base_cmd->add_option("--plot", bl.plot, "Test-split comparison SVG");
    base_cmd->add_option("--init-A", bl.init_a, "CSV holding an n x n matrix to initialize A from");
    add_config_flags(base_cmd, bl.cfg, bl.loss_norm);
    add_split_flags(base_cmd, bl.splits);
    add_arch_flags(base_cmd, bl.arch, false);

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a data CSV");
    struct {
        std::string checkpoint, data, out, pred, plot, pred_split = "test";
        SplitFlags splits;
        bool denormalize = false;
    } ev;
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint path")->required();
    eval_cmd->add_option("--data", ev.data, "Input CSV")->required();
    eval_cmd->add_option("--out", ev.out, "Report CSV (order,seed,split,channel,rmse)");
    eval_cmd->add_option("--pred", ev.pred, "Prediction CSV for --pred-split");
    eval_cmd->add_option("--plot", ev.plot, "Comparison SVG for --pred-split");
    eval_cmd->add_option("--pred-split", ev.pred_split, "Split to export: train|val|test")
        ->check(CLI::IsMember({"train", "val", "test"}));
    eval_cmd->add_flag("--denormalize", ev.denormalize, "Report RMSE in physical units");
    add_split_flags(eval_cmd, ev.splits);

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "Free-running simulation over a whole CSV");
    struct {
        std::string checkpoint, data, out, plot;
        bool denormalize = false;
    } sm;
    sim_cmd->add_option("--checkpoint", sm.checkpoint, "Checkpoint path")->required();
    sim_cmd->add_option("--data", sm.data, "Input CSV")->required();
    sim_cmd->add_option("--out", sm.out, "Prediction CSV");
    sim_cmd->add_option("--plot", sm.plot, "Comparison SVG");
    sim_cmd->add_flag("--denormalize", sm.denormalize, "Report in physical units");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate an order x seed grid");
    struct {
        std::string data, out = "sweep.csv", model = "nnss", init_a;
        std::vector<std::size_t> orders{2};
        std::vector<std::uint64_t> seeds{1};
        TrainConfig cfg;
        std::string loss_norm = "printed";
        SplitFlags splits;
        ArchFlags arch;
    } sw;
    sweep_cmd->add_option("--data", sw.data, "Input CSV")->required();
    sweep_cmd->add_option("--out", sw.out, "Results CSV");
    sweep_cmd->add_option("--orders", sw.orders, "Model orders")->delimiter(',');
    sweep_cmd->add_option("--seeds", sw.seeds, "Training seeds")->delimiter(',');
    sweep_cmd->add_option("--model", sw.model, "Model family: nnss|constant")
        ->check(CLI::IsMember({"nnss", "constant"}));
    sweep_cmd->add_option("--init-A", sw.init_a, "Baseline A-matrix init CSV");
    add_config_flags(sweep_cmd, sw.cfg, sw.loss_norm);
    add_split_flags(sweep_cmd, sw.splits);
    add_arch_flags(sweep_cmd, sw.arch, true);

    // ---- grad-check ----
    auto* grad_cmd = app.add_subcommand("grad-check", "Finite-difference gradient validation");
    struct {
        std::uint64_t seed = 1;
        std::size_t cases = 20;
    } gc;
    grad_cmd->add_option("--seed", gc.seed, "Random seed");
    grad_cmd->add_option("--cases", gc.cases, "Cases per battery");

    // ---- stability-check ----
    auto* stab_cmd = app.add_subcommand("stability-check", "Sample the stability guarantee");
    struct {
        std::size_t samples = 10000;
        std::size_t n = 4;
        double gamma = 0.9;
        std::uint64_t seed = 1;
    } sc;
    stab_cmd->add_option("--samples", sc.samples, "Number of random factor draws");
    stab_cmd->add_option("--n", sc.n, "Model order");
    stab_cmd->add_option("--gamma", sc.gamma, "Stability disk radius");
    stab_cmd->add_option("--seed", sc.seed, "Random seed");

    // ---- fit-init ----
    auto* fit_cmd = app.add_subcommand("fit-init", "Frobenius-fit the parameterization to a matrix");
    struct {
        std::string target, out;
        double gamma = 0.99;
        std::uint64_t seed = 1;
        std::size_t iters = 5000;
    } fi;
    fit_cmd->add_option("--target", fi.target, "CSV holding the square target matrix")->required();
    fit_cmd->add_option("--out", fi.out, "Write fitted factors JSON here");
    fit_cmd->add_option("--gamma", fi.gamma, "Stability disk radius");
    fit_cmd->add_option("--seed", fi.seed, "Random seed");
    fit_cmd->add_option("--iters", fi.iters, "Iteration cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit 0, every usage problem exits 1
    }

    try {
        if (*gen) {
            TwoTankInput input;
            input.kind = gd.input == "multisine" ? TwoTankInput::Kind::multisine
                                                 : TwoTankInput::Kind::piecewise_constant;
            input.hold = gd.hold;
            input.level_min = gd.level_min;
            input.level_max = gd.level_max;
            input.sines = gd.sines;
            input.amplitude = gd.amplitude;
            input.offset = gd.offset;
            RawSeries series = synth_two_tank(gd.steps, input, gd.noise_std, gd.seed);
            save_csv(series, gd.out);
            std::printf("wrote %zu rows (header y1,u1) to %s\n", series.rows(), gd.out.c_str());
            return 0;
        }

        if (*train_cmd) {
            tr.cfg.loss_norm = tr.loss_norm == "natural" ? LossNorm::natural : LossNorm::printed;
            tr.cfg.validate();
            PreparedData data = prepare(tr.data, tr.splits, tr.cfg.window_length);
            std::vector<TrajectoryWindow> windows =
                make_windows(data.splits.train, tr.cfg.window_length, tr.cfg.stride);
            std::printf("training NN-SS: %zu windows, order %zu, seed %llu, %zu worker(s)\n",
                        windows.size(), tr.cfg.order_n,
                        static_cast<unsigned long long>(tr.cfg.seed), worker_count());
            NnssModel model = make_nnss(tr.cfg.order_n, data.raw.m(), data.raw.r(), tr.arch.spec(),
                                        tr.cfg.gamma, tr.cfg.seed);
            TrainReport report = fit(model, windows, data.splits.val, tr.cfg);
            return finish_training(model, report, data, tr.cfg, tr.out, tr.report, tr.pred, tr.plot);
        }

        if (*base_cmd) {
            bl.cfg.loss_norm = bl.loss_norm == "natural" ? LossNorm::natural : LossNorm::printed;
            bl.cfg.validate();
            PreparedData data = prepare(bl.data, bl.splits, bl.cfg.window_length);
            std::vector<TrajectoryWindow> windows =
                make_windows(data.splits.train, bl.cfg.window_length, bl.cfg.stride);
            std::printf("training baseline: %zu windows, order %zu, seed %llu\n", windows.size(),
                        bl.cfg.order_n, static_cast<unsigned long long>(bl.cfg.seed));

            Mat init_a;
            const Mat* init_ptr = nullptr;
            if (!bl.init_a.empty()) {
                init_a = load_matrix_csv(bl.init_a);
                init_ptr = &init_a;
                const double rho = spectral_radius(init_a).spectral_radius;
                if (rho >= bl.cfg.gamma)
                    std::fprintf(stderr,
                                 "warning: init target has spectral radius %.4g >= gamma %.4g; "
                                 "the fit keeps a floor residual\n",
                                 rho, bl.cfg.gamma);
            }
            std::vector<std::size_t> enc_widths{data.raw.m()};
            enc_widths.insert(enc_widths.end(), bl.arch.enc_hidden.begin(), bl.arch.enc_hidden.end());
            enc_widths.push_back(bl.cfg.order_n);
            ConstantSsModel model = make_baseline(bl.cfg.order_n, data.raw.m(), data.raw.r(),
                                                  enc_widths, bl.cfg.gamma, bl.cfg.seed, init_ptr);
            model.factors.eps_tilde = bl.arch.eps_tilde;
            model.train_eps = !bl.arch.freeze_eps;
            TrainReport report = fit(model, windows, data.splits.val, bl.cfg);
            return finish_training(model, report, data, bl.cfg, bl.out, bl.report, bl.pred, bl.plot);
        }

        if (*eval_cmd) {
            LoadedCheckpoint ckpt = load_checkpoint(ev.checkpoint);
            if (!ckpt.normalizer) throw DataError("checkpoint has no normalizer; use simulate");
            RawSeries raw = load_csv(ev.data);
            RawSeries normalized = ckpt.normalizer->apply(raw);
            SplitSeries splits = chrono_split(normalized, ev.splits.train, ev.splits.val,
                                              ev.splits.test, 2);

            const Normalizer* denorm = ev.denormalize ? &*ckpt.normalizer : nullptr;
            SweepCell cell;
            cell.order = ckpt.kind == ModelKind::nnss ? ckpt.nnss.n : ckpt.constant.n;
            cell.seed = ckpt.meta.seed;
            Mat pred_train, pred_val, pred_test;
            if (ckpt.kind == ModelKind::nnss) {
                cell.report.train = simulate_and_report(ckpt.nnss, splits.train, denorm, &pred_train);
                cell.report.val = simulate_and_report(ckpt.nnss, splits.val, denorm, &pred_val);
                cell.report.test = simulate_and_report(ckpt.nnss, splits.test, denorm, &pred_test);
            } else {
                cell.report.train =
                    simulate_and_report(ckpt.constant, splits.train, denorm, &pred_train);
                cell.report.val = simulate_and_report(ckpt.constant, splits.val, denorm, &pred_val);
                cell.report.test = simulate_and_report(ckpt.constant, splits.test, denorm, &pred_test);
            }
            print_split_eval("train", cell.report.train);
            print_split_eval("val", cell.report.val);
            print_split_eval("test", cell.report.test);

            if (!ev.out.empty()) write_sweep_csv({cell}, raw.m(), ev.out);

            const RawSeries* split = &splits.test;
            Mat* pred = &pred_test;
            if (ev.pred_split == "train") split = &splits.train, pred = &pred_train;
            if (ev.pred_split == "val") split = &splits.val, pred = &pred_val;
            Mat measured = denorm ? denorm->invert_outputs(split->outputs) : split->outputs;
            if (!ev.pred.empty()) write_prediction_csv(measured, *pred, ev.pred);
            if (!ev.plot.empty()) write_comparison_svg(measured, *pred, ev.plot);
            return 0;
        }

        if (*sim_cmd) {
            LoadedCheckpoint ckpt = load_checkpoint(sm.checkpoint);
            RawSeries raw = load_csv(sm.data);
            RawSeries series = ckpt.normalizer ? ckpt.normalizer->apply(raw) : raw;
            const Normalizer* denorm =
                sm.denormalize && ckpt.normalizer ? &*ckpt.normalizer : nullptr;

            Mat predictions;
            SplitEval eval;
            if (ckpt.kind == ModelKind::nnss)
                eval = simulate_and_report(ckpt.nnss, series, denorm, &predictions);
            else
                eval = simulate_and_report(ckpt.constant, series, denorm, &predictions);
            print_split_eval("simulation", eval);

            Mat measured = denorm ? denorm->invert_outputs(series.outputs) : series.outputs;
            if (!sm.out.empty()) write_prediction_csv(measured, predictions, sm.out);
            if (!sm.plot.empty()) write_comparison_svg(measured, predictions, sm.plot);
            return 0;
        }

        if (*sweep_cmd) {
            sw.cfg.loss_norm = sw.loss_norm == "natural" ? LossNorm::natural : LossNorm::printed;
            sw.cfg.validate();
            PreparedData data = prepare(sw.data, sw.splits, sw.cfg.window_length);

            SweepOptions opts;
            opts.orders = sw.orders;
            opts.seeds = parse_seed_list(sw.seeds);
            opts.config = sw.cfg;
            opts.kind = sw.model == "constant" ? ModelKind::constant : ModelKind::nnss;
            opts.spec = sw.arch.spec();
            Mat init_a;
            if (!sw.init_a.empty()) {
                init_a = load_matrix_csv(sw.init_a);
                opts.baseline_init = &init_a;
            }

            std::vector<SweepCell> cells = sweep(data.splits, opts);
            write_sweep_csv(cells, data.raw.m(), sw.out);
            for (const auto& cell : cells) {
                if (cell.failed)
                    std::fprintf(stderr, "cell order=%zu seed=%llu failed: %s\n", cell.order,
                                 static_cast<unsigned long long>(cell.seed), cell.error.c_str());
                else
                    std::printf("order=%zu seed=%llu test rmse %.6g\n", cell.order,
                                static_cast<unsigned long long>(cell.seed),
                                cell.report.test.averaged_rmse);
            }
            std::printf("results written to %s\n", sw.out.c_str());
            return 0;
        }

        if (*grad_cmd) {
            double worst = 0.0;
            auto run = [&](const char* name, GradCheckResult r) {
                std::printf("%-28s max rel err %.3e over %zu derivatives\n", name, r.max_rel_err,
                            r.checked);
                worst = std::max(worst, r.max_rel_err);
            };
            run("schur backward", check_schur_backward(2, 0.95, gc.seed, gc.cases));
            run("net backward", check_net_backward(gc.seed, gc.cases));
            run("rollout backward (n=2,L=5)",
                check_rollout_backward(2, 1, 1, 5, 0.01, gc.seed));
            run("rollout backward (n=3,L=8)",
                check_rollout_backward(3, 2, 2, 8, 0.1, gc.seed + 1));
            std::printf("max relative error: %.3e\n", worst);
            if (worst >= 1e-5) {
                std::fprintf(stderr, "gradient check failed the 1e-5 bound\n");
                return 3;
            }
            return 0;
        }

        if (*stab_cmd) {
            StabilityCheckResult r = stability_check(sc.samples, sc.n, sc.gamma, sc.seed);
            std::printf("samples: %zu\n", r.samples);
            std::printf("violations: %zu\n", r.violations);
            std::printf("singular failures: %zu\n", r.singular_failures);
            std::printf("max rho(A)/gamma: %.6f\n", r.max_radius_ratio);
            return r.violations == 0 && r.singular_failures == 0 ? 0 : 3;
        }

        if (*fit_cmd) {
            Mat target = load_matrix_csv(fi.target);
            FitResult result = fit_to_target(target, fi.gamma, fi.seed, fi.iters);
            if (result.target_unstable)
                std::fprintf(stderr,
                             "warning: target spectral radius >= gamma; residual floor %.6g\n",
                             result.residual);
            std::printf("residual %.9g after %zu iterations\n", result.residual, result.iterations);
            if (!fi.out.empty()) {
                nlohmann::json j;
                j["W"] = result.factors.W.raw();
                j["V"] = result.factors.V.raw();
                j["n"] = result.factors.order();
                j["eps_tilde"] = result.factors.eps_tilde;
                j["gamma"] = result.factors.gamma;
                j["residual"] = result.residual;
                std::ofstream out(fi.out);
                if (!out) throw DataError("cannot write '" + fi.out + "'");
                out << j.dump(1) << '\n';
            }
            return 0;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
