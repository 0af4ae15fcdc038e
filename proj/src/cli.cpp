#include "handpose/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "handpose/ablation.hpp"
#include "handpose/config.hpp"
#include "handpose/datagen/dataset.hpp"
#include "handpose/datagen/model_io.hpp"
#include "handpose/nn/build.hpp"
#include "handpose/pipeline.hpp"

namespace handpose {

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 0;
    int epochs = -1;
    int batch_size = -1;
    double lr = -1.0;
    int pca_k = -1;
    bool quiet = false;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* epochs_opt = nullptr;
    CLI::Option* batch_opt = nullptr;
    CLI::Option* lr_opt = nullptr;
    CLI::Option* k_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration JSON");
        seed_opt = cmd->add_option("--seed", seed, "rng seed (overrides config)");
        threads_opt = cmd->add_option("--threads", threads, "worker thread cap");
        epochs_opt = cmd->add_option("--epochs", epochs, "training epochs");
        batch_opt = cmd->add_option("--batch-size", batch_size, "minibatch size");
        lr_opt = cmd->add_option("--lr", lr, "ADAM learning rate");
        k_opt = cmd->add_option("--pca-k", pca_k, "prior dimensionality");
        cmd->add_flag("--quiet", quiet, "suppress progress lines (not the summary)");
    }

    // Precedence: explicit flag > config file > built-in default.
    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
        if (seed_opt && seed_opt->count() > 0) cfg.seed = seed;
        if (threads_opt && threads_opt->count() > 0) {
            cfg.threads = threads;
        } else if (const char* env = std::getenv("HANDPOSE_THREADS")) {
            cfg.threads = std::max(1, std::atoi(env));
        }
        if (epochs_opt && epochs_opt->count() > 0) cfg.epochs = epochs;
        if (batch_opt && batch_opt->count() > 0) cfg.batch_size = batch_size;
        if (lr_opt && lr_opt->count() > 0) cfg.learning_rate = lr;
        if (k_opt && k_opt->count() > 0) cfg.pca_k = pca_k;
        return cfg;
    }

    nn::ProgressFn progress(const char* tag) const {
        if (quiet) return nullptr;
        const std::string prefix(tag);
        return [prefix](int epoch, int total, double loss, double sec) {
            std::printf("%s epoch %d/%d loss %.6f sec %.2f\n", prefix.c_str(), epoch, total, loss,
                        sec);
            std::fflush(stdout);
        };
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataFormatError("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataFormatError("write failed for " + path);
}

nlohmann::json pose_to_json(const Pose3D& p) {
    nlohmann::json joints = nlohmann::json::array();
    for (const Vec3& j : p.joints) joints.push_back({j.x, j.y, j.z});
    return joints;
}

ReportFormat format_for(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return ReportFormat::Json;
    return ReportFormat::Csv;
}

int cmd_generate_data(const CommonFlags& common, int frames, int subjects, int subject_base,
                      const std::string& out) {
    const RunConfig cfg = common.resolve();
    const datagen::Dataset ds =
        datagen::generate_dataset(frames, subjects, cfg.scene, cfg.seed, subject_base, cfg.threads);
    datagen::save_dataset(ds, out);
    std::printf("generate-data: %zu frames, %d subjects (base %d) -> %s\n", ds.size(), subjects,
                subject_base, out.c_str());
    return 0;
}

int cmd_fit_prior(const CommonFlags& common, const std::string& data, const std::string& out,
                  bool no_augmented) {
    RunConfig cfg = common.resolve();
    if (no_augmented) cfg.prior_from_augmented = false;
    const datagen::Dataset ds = datagen::load_dataset(data);

    PcaPrior prior;
    if (cfg.prior_from_augmented && cfg.aug.any_enabled()) {
        prior = fit_robust_prior(ds.poses, cfg.aug, cfg.prior_samples, cfg.pca_k, cfg.cube_size_mm,
                                 mix_seed(cfg.seed, 0x7072696full));
    } else {
        std::vector<std::vector<double>> rows;
        rows.reserve(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i)
            rows.push_back(
                normalize_joints(ds.poses[i], CropCube{ds.poses[i].joints.at(0), cfg.cube_size_mm}));
        prior = fit_pca(rows, cfg.pca_k);
    }

    nlohmann::json components = nlohmann::json::array();
    for (int c = 0; c < prior.k(); ++c)
        components.push_back(std::vector<double>(
            prior.components.begin() + static_cast<std::ptrdiff_t>(c) * prior.dim(),
            prior.components.begin() + static_cast<std::ptrdiff_t>(c + 1) * prior.dim()));
    const nlohmann::json j = {{"mean", prior.mean},
                              {"components", components},
                              {"eigenvalues", prior.eigenvalues}};
    write_text(out, j.dump(2) + "\n");
    std::printf("fit-prior: k=%d dim=%d -> %s\n", prior.k(), prior.dim(), out.c_str());
    return 0;
}

PcaPrior load_prior_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open prior " + path);
    nlohmann::json j;
    in >> j;
    PcaPrior prior;
    prior.mean = j.at("mean").get<std::vector<double>>();
    prior.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    for (const auto& row : j.at("components")) {
        const auto r = row.get<std::vector<double>>();
        prior.components.insert(prior.components.end(), r.begin(), r.end());
    }
    return prior;
}

int cmd_train(const CommonFlags& common, const std::string& data, const std::string& out,
              const std::string& prior_path) {
    const RunConfig cfg = common.resolve();
    const datagen::Dataset ds = datagen::load_dataset(data);

    TrainedPose trained;
    if (!prior_path.empty()) {
        trained.prior = load_prior_json(prior_path);
        RunConfig c2 = cfg;
        const nn::PoseNetOptions opt = c2.posenet_options(ds.joint_count());
        trained.net = nn::build_posenet<float>(opt, trained.prior, cfg.seed);
        StreamConfig sc;
        sc.aug = cfg.aug;
        sc.cube_size = cfg.cube_size_mm;
        sc.resolution = cfg.patch_resolution;
        sc.seed = mix_seed(cfg.seed, 0x73747265ull);
        std::vector<Vec3> centers(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) centers[i] = ds.poses[i].joints.at(0);
        const TrainingStream stream(ds.frames, ds.poses, std::move(centers), ds.intrinsics, sc);
        trained.history =
            nn::train(trained.net, stream, cfg.train_config(cfg.seed, cfg.epochs),
                      common.progress("train"));
    } else {
        trained = train_posenet_on(ds, cfg, cfg.seed, cfg.epochs, common.progress("train"));
    }

    datagen::SavedModel model;
    model.kind = "pose";
    model.joints = ds.joint_count();
    model.pca_k = cfg.pca_k;
    model.config_fingerprint = cfg.fingerprint();
    model.net = std::move(trained.net);
    model.prior = std::move(trained.prior);
    save_model(model, out);

    const double final_loss = trained.history.epoch_loss.empty()
                                  ? -1.0
                                  : trained.history.epoch_loss.back();
    std::printf("train: %d epochs, final loss %.6f -> %s\n", cfg.epochs, final_loss, out.c_str());
    return 0;
}

int cmd_train_refiner(const CommonFlags& common, const std::string& data, const std::string& out) {
    RunConfig cfg = common.resolve();
    if (common.epochs_opt && common.epochs_opt->count() > 0) cfg.refiner_epochs = cfg.epochs;
    const datagen::Dataset ds = datagen::load_dataset(data);
    nn::Network<float> net = train_refiner_on(ds, cfg, cfg.seed, common.progress("train-refiner"));

    datagen::SavedModel model;
    model.kind = "refine";
    model.joints = 0;
    model.pca_k = 0;
    model.config_fingerprint = cfg.fingerprint();
    model.net = std::move(net);
    save_model(model, out);
    std::printf("train-refiner: %d epochs -> %s\n", cfg.refiner_epochs, out.c_str());
    return 0;
}

int cmd_localize(const CommonFlags& common, const std::string& data, const std::string& refiner_path,
                 const std::string& mode_str, const std::string& out) {
    const RunConfig cfg = common.resolve();
    const datagen::Dataset ds = datagen::load_dataset(data);

    datagen::SavedModel refiner;
    nn::Network<float>* refiner_net = nullptr;
    LocMode mode = loc_mode_from_string(mode_str);
    if (!refiner_path.empty()) {
        refiner = datagen::load_model(refiner_path, "refine");
        refiner_net = &refiner.net;
        if (mode == LocMode::CenterOfMass) mode = LocMode::Refined;
    }

    const LocalizationResult loc = localize_dataset(ds, mode, cfg, refiner_net);
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < ds.size(); ++i)
        frames.push_back({{"index", i},
                          {"center", {loc.centers[i].x, loc.centers[i].y, loc.centers[i].z}},
                          {"error_mm", loc.errors_mm[i]}});
    const nlohmann::json j = {{"mode", to_string(mode)},
                              {"mean_error_mm", loc.mean_error_mm},
                              {"frames", frames}};
    if (!out.empty()) write_text(out, j.dump(2) + "\n");
    std::printf("localize: mode %s, mean error %.2fmm over %zu frames\n", to_string(mode).c_str(),
                loc.mean_error_mm, ds.size());
    return 0;
}

int cmd_predict(const CommonFlags& common, const std::string& model_path, const std::string& data,
                const std::string& refiner_path, const std::string& mode_str,
                const std::string& out) {
    const RunConfig cfg = common.resolve();
    const datagen::Dataset ds = datagen::load_dataset(data);
    datagen::SavedModel model = datagen::load_model(model_path, "pose");

    datagen::SavedModel refiner;
    nn::Network<float>* refiner_net = nullptr;
    if (!refiner_path.empty()) {
        refiner = datagen::load_model(refiner_path, "refine");
        refiner_net = &refiner.net;
    }

    const LocMode mode = loc_mode_from_string(mode_str);
    const LocalizationResult loc = localize_dataset(ds, mode, cfg, refiner_net);
    const std::vector<Pose3D> preds = predict_dataset(model.net, ds, loc.centers, cfg);

    nlohmann::json frames = nlohmann::json::array();
    for (const Pose3D& p : preds) frames.push_back(pose_to_json(p));
    const nlohmann::json j = {{"mode", to_string(mode)}, {"poses", frames}};
    if (!out.empty()) write_text(out, j.dump() + "\n");
    std::printf("predict: %zu frames (localization %s) -> %s\n", preds.size(),
                to_string(mode).c_str(), out.c_str());
    return 0;
}

int cmd_evaluate(const CommonFlags& common, const std::string& model_path, const std::string& data,
                 const std::string& refiner_path, const std::string& mode_str,
                 const std::string& out) {
    const RunConfig cfg = common.resolve();
    const datagen::Dataset ds = datagen::load_dataset(data);
    datagen::SavedModel model = datagen::load_model(model_path, "pose");

    datagen::SavedModel refiner;
    nn::Network<float>* refiner_net = nullptr;
    if (!refiner_path.empty()) {
        refiner = datagen::load_model(refiner_path, "refine");
        refiner_net = &refiner.net;
    }

    const EvalReport report =
        evaluate_dataset(model.net, ds, loc_mode_from_string(mode_str), cfg, refiner_net);
    if (!out.empty()) export_report(report, out, format_for(out));
    std::printf("evaluate: average 3D error %.2fmm over %zu frames", report.average_error_mm,
                report.frame_count);
    if (report.loc_error_mm >= 0.0) std::printf(", localization error %.2fmm", report.loc_error_mm);
    std::printf("\n");
    return 0;
}

int cmd_ablate(const CommonFlags& common, const std::string& preset, const std::string& train_path,
               const std::string& test_path, int seeds, const std::string& out) {
    const RunConfig cfg = common.resolve();
    datagen::Dataset train_ds, test_ds;
    if (!train_path.empty() && !test_path.empty()) {
        train_ds = datagen::load_dataset(train_path);
        test_ds = datagen::load_dataset(test_path);
    } else {
        if (!common.quiet) std::printf("ablate: generating synthetic train/test datasets\n");
        train_ds = datagen::generate_dataset(cfg.train_frames, cfg.train_subjects, cfg.scene,
                                             cfg.seed, 0, cfg.threads);
        test_ds = datagen::generate_dataset(cfg.test_frames, cfg.test_subjects, cfg.scene,
                                            mix_seed(cfg.seed, 0x74657374ull), cfg.train_subjects,
                                            cfg.threads);
    }

    const std::vector<AblationCellSpec> cells = ablation_preset(preset, cfg.aug);
    const std::vector<AblationCellResult> rows =
        ablate(train_ds, test_ds, cells, cfg, seeds, common.quiet ? nullptr : &std::cout);

    const std::string table = format_ablation_table(rows);
    std::fputs(table.c_str(), stdout);
    if (!out.empty()) write_text(out, ablation_to_json(rows).dump(2) + "\n");
    for (const auto& r : rows)
        if (r.failed) return 3;
    return 0;
}

int cmd_benchmark(const CommonFlags& common, const std::string& model_path,
                  const std::string& refiner_path, int frames, int warmup, const std::string& out) {
    const RunConfig cfg = common.resolve();
    datagen::SavedModel model = datagen::load_model(model_path, "pose");

    datagen::SavedModel refiner;
    nn::Network<float>* refiner_net = nullptr;
    if (!refiner_path.empty()) {
        refiner = datagen::load_model(refiner_path, "refine");
        refiner_net = &refiner.net;
    }

    const datagen::Dataset ds =
        datagen::generate_dataset(frames, 1, cfg.scene, cfg.seed, 0, cfg.threads);
    const FpsResult fps =
        fps_benchmark(model.net, refiner_net, ds.frames, ds.intrinsics, cfg, warmup);

    std::printf("benchmark: %.1f fps (std %.2f over %zu runs, %d frames, warmup %d)\n",
                fps.mean_fps, fps.std_fps, fps.run_fps.size(), frames, warmup);
    if (!out.empty()) {
        const nlohmann::json j = {{"mean_fps", fps.mean_fps},
                                  {"std_fps", fps.std_fps},
                                  {"run_fps", fps.run_fps},
                                  {"frames", frames},
                                  {"warmup", warmup}};
        write_text(out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_export_curves(const std::string& report_path, const std::string& out) {
    const EvalReport report = import_report(report_path);
    export_report(report, out, format_for(out));
    std::printf("export-curves: %s -> %s\n", report_path.c_str(), out.c_str());
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"depth-image 3D hand pose estimation toolkit"};
    app.require_subcommand(1);

    // generate-data
    auto* gen = app.add_subcommand("generate-data", "render a synthetic labeled dataset");
    CommonFlags gen_common;
    gen_common.attach(gen);
    int gen_frames = 1000, gen_subjects = 8, gen_base = 0;
    std::string gen_out;
    gen->add_option("--frames", gen_frames, "number of frames");
    gen->add_option("--subjects", gen_subjects, "number of subjects");
    gen->add_option("--subject-base", gen_base, "first subject id");
    gen->add_option("--out", gen_out, "output dataset path")->required();

    // fit-prior
    auto* fit = app.add_subcommand("fit-prior", "fit the PCA pose prior");
    CommonFlags fit_common;
    fit_common.attach(fit);
    std::string fit_data, fit_out;
    bool fit_no_aug = false;
    fit->add_option("--data", fit_data, "training dataset")->required();
    fit->add_option("--out", fit_out, "output prior JSON")->required();
    fit->add_flag("--no-augmented", fit_no_aug, "fit on raw poses instead of augmented samples");

    // train
    auto* train_cmd = app.add_subcommand("train", "train the pose network");
    CommonFlags train_common;
    train_common.attach(train_cmd);
    std::string train_data, train_out, train_prior;
    train_cmd->add_option("--data", train_data, "training dataset")->required();
    train_cmd->add_option("--out", train_out, "output model path")->required();
    train_cmd->add_option("--prior", train_prior, "pre-fitted prior JSON (optional)");

    // train-refiner
    auto* refiner_cmd = app.add_subcommand("train-refiner", "train the localization refiner");
    CommonFlags refiner_common;
    refiner_common.attach(refiner_cmd);
    std::string refiner_data, refiner_out;
    refiner_cmd->add_option("--data", refiner_data, "training dataset")->required();
    refiner_cmd->add_option("--out", refiner_out, "output model path")->required();

    // localize
    auto* loc_cmd = app.add_subcommand("localize", "run hand localization over a dataset");
    CommonFlags loc_common;
    loc_common.attach(loc_cmd);
    std::string loc_data, loc_refiner, loc_mode = "com", loc_out;
    loc_cmd->add_option("--data", loc_data, "dataset")->required();
    loc_cmd->add_option("--refiner", loc_refiner, "refiner model");
    loc_cmd->add_option("--mode", loc_mode, "com|refined|ground_truth|ground_truth_noisy");
    loc_cmd->add_option("--out", loc_out, "output JSON");

    // predict
    auto* pred_cmd = app.add_subcommand("predict", "predict 3D poses for a dataset");
    CommonFlags pred_common;
    pred_common.attach(pred_cmd);
    std::string pred_model, pred_data, pred_refiner, pred_mode = "com", pred_out;
    pred_cmd->add_option("--model", pred_model, "pose model")->required();
    pred_cmd->add_option("--data", pred_data, "dataset")->required();
    pred_cmd->add_option("--refiner", pred_refiner, "refiner model");
    pred_cmd->add_option("--loc", pred_mode, "localization mode");
    pred_cmd->add_option("--out", pred_out, "output JSON");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a model on a dataset");
    CommonFlags eval_common;
    eval_common.attach(eval_cmd);
    std::string eval_model, eval_data, eval_refiner, eval_mode = "ground_truth", eval_out;
    eval_cmd->add_option("--model", eval_model, "pose model")->required();
    eval_cmd->add_option("--data", eval_data, "test dataset")->required();
    eval_cmd->add_option("--refiner", eval_refiner, "refiner model");
    eval_cmd->add_option("--loc", eval_mode, "localization mode");
    eval_cmd->add_option("--out", eval_out, "report path (.csv or .json)");

    // ablate
    auto* abl_cmd = app.add_subcommand("ablate", "run an ablation table preset");
    CommonFlags abl_common;
    abl_common.attach(abl_cmd);
    std::string abl_preset, abl_train, abl_test, abl_out;
    int abl_seeds = 3;
    abl_cmd->add_option("--preset", abl_preset, "table4|table5|table6")->required();
    abl_cmd->add_option("--train", abl_train, "training dataset (generated if omitted)");
    abl_cmd->add_option("--test", abl_test, "test dataset (generated if omitted)");
    abl_cmd->add_option("--seeds", abl_seeds, "seeds per cell");
    abl_cmd->add_option("--out", abl_out, "output JSON");

    // benchmark
    auto* bench_cmd = app.add_subcommand("benchmark", "measure track->predict throughput");
    CommonFlags bench_common;
    bench_common.attach(bench_cmd);
    std::string bench_model, bench_refiner, bench_out;
    int bench_frames = 100, bench_warmup = 10;
    bench_cmd->add_option("--model", bench_model, "pose model")->required();
    bench_cmd->add_option("--refiner", bench_refiner, "refiner model (enables tracking)");
    bench_cmd->add_option("--frames", bench_frames, "frames in the loop");
    bench_cmd->add_option("--warmup", bench_warmup, "warmup frames");
    bench_cmd->add_option("--out", bench_out, "output JSON");

    // export-curves
    auto* exp_cmd = app.add_subcommand("export-curves", "convert a report between formats");
    std::string exp_report, exp_out;
    exp_cmd->add_option("--report", exp_report, "input report (.csv or .json)")->required();
    exp_cmd->add_option("--out", exp_out, "output path (.csv or .json)")->required();

    std::vector<const char*> argv;
    argv.push_back("handpose");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_generate_data(gen_common, gen_frames, gen_subjects, gen_base,
                                                    gen_out);
        if (fit->parsed()) return cmd_fit_prior(fit_common, fit_data, fit_out, fit_no_aug);
        if (train_cmd->parsed()) return cmd_train(train_common, train_data, train_out, train_prior);
        if (refiner_cmd->parsed()) return cmd_train_refiner(refiner_common, refiner_data,
                                                            refiner_out);
        if (loc_cmd->parsed()) return cmd_localize(loc_common, loc_data, loc_refiner, loc_mode,
                                                   loc_out);
        if (pred_cmd->parsed()) return cmd_predict(pred_common, pred_model, pred_data, pred_refiner,
                                                   pred_mode, pred_out);
        if (eval_cmd->parsed()) return cmd_evaluate(eval_common, eval_model, eval_data,
                                                    eval_refiner, eval_mode, eval_out);
        if (abl_cmd->parsed()) return cmd_ablate(abl_common, abl_preset, abl_train, abl_test,
                                                 abl_seeds, abl_out);
        if (bench_cmd->parsed()) return cmd_benchmark(bench_common, bench_model, bench_refiner,
                                                      bench_frames, bench_warmup, bench_out);
        if (exp_cmd->parsed()) return cmd_export_curves(exp_report, exp_out);
    } catch (const TrainingError& e) {
        std::fprintf(stderr, "training error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}

}  // namespace handpose
