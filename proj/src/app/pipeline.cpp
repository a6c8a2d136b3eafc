#include "scr/app/pipeline.hpp"

#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"
#include "scr/core/log.hpp"
#include "scr/eval/metrics.hpp"
#include "scr/io/model_files.hpp"
#include "scr/nn/dropout.hpp"
#include "scr/nn/gradcheck.hpp"
#include "scr/textenc/lr_baseline.hpp"

#include <cmath>
#include <fstream>

namespace scr::app {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    return out;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_curve(const fs::path& path, const std::string& manifest_hash, const textenc::LossCurve& curve,
                 const std::string& extra = {})
{
    auto out = open_output(path);
    out << "# manifest " << manifest_hash << '\n';
    if (!extra.empty())
        out << "# " << extra << '\n';
    out << "epoch\tloss\n";
    for (std::size_t e = 0; e < curve.epoch_loss.size(); ++e)
        out << e + 1 << '\t' << format_double(curve.epoch_loss[e]) << '\n';
}

vae::ProfileSpec profile_spec(const RunManifest& m, vae::ProfileSpec spec)
{
    spec.k = m.config.k;
    spec.seed = derive_seed(m.config.seed, "profile");
    return spec;
}

void check_data_matches(const RunManifest& m, const PreparedData& d)
{
    if (m.clicks_checksum != d.clicks_checksum || m.embeddings_checksum != d.embeddings_checksum ||
        m.labels_checksum != d.labels_checksum)
        throw DataError("data files differ from the ones this run was trained on (checksum mismatch)");
    if (d.dataset.clicks.num_items() != m.items || d.dataset.clicks.num_users() != m.users)
        throw DataError("filtered data shape differs from the run manifest");
}

textenc::TextTrainConfig text_train_config(const RunConfig& c)
{
    return {.epochs = c.epochs_text, .batch_size = c.text_batch, .adam = {.learning_rate = c.text_lr}};
}

std::string model_name(const LoadedRun& run) { return run.model.conditioned() ? "scr" : "vae-cf"; }

void write_matrix_rows(std::ostream& out, const std::vector<std::string>& ids, const nn::Tensor2& m)
{
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << ids[r] << '\t';
        for (std::size_t c = 0; c < m.cols(); ++c)
            out << (c ? "," : "") << format_double(m(r, c));
        out << '\n';
    }
}

} // namespace

data::SynthDataset run_synth(const data::SynthConfig& config, std::uint64_t seed, const fs::path& dir)
{
    ensure_dir(dir);
    Rng rng = stage_rng(seed, "synth");
    auto ds = data::synth_generate(config, rng);
    const auto paths = DataPaths::in_dir(dir);
    {
        auto out = open_output(paths.clicks);
        data::write_clicks(out, ds.clicks);
    }
    {
        auto out = open_output(paths.embeddings);
        data::write_embeddings(out, ds.embeddings);
    }
    {
        auto out = open_output(paths.labels);
        data::write_labels(out, ds.labels);
    }
    {
        auto out = open_output(dir / "user_styles.tsv");
        write_matrix_rows(out, ds.clicks.user_ids(), ds.preferences);
    }
    {
        auto out = open_output(dir / "item_styles.tsv");
        write_matrix_rows(out, ds.clicks.item_ids(), ds.item_styles);
    }
    return ds;
}

data::ClickMatrix PreparedData::fold_in_matrix() const
{
    std::vector<std::string> ids;
    for (std::size_t u : split.heldout_users)
        ids.push_back(dataset.clicks.user_ids()[u]);
    return data::ClickMatrix(ids, dataset.clicks.item_ids(), split.fold_in);
}

PreparedData prepare_data(const RunConfig& config, const DataPaths& paths)
{
    validate(config);
    PreparedData p;
    p.clicks_checksum = hex64(data::file_checksum(paths.clicks));
    p.embeddings_checksum = hex64(data::file_checksum(paths.embeddings));
    p.labels_checksum = hex64(data::file_checksum(paths.labels));
    const auto raw = data::load_dataset(paths.clicks, paths.embeddings, paths.labels);
    auto filtered = data::filter_interactions(raw.clicks, config.min_items_per_user, config.min_users_per_item);
    if (filtered.num_users() != raw.clicks.num_users() || filtered.num_items() != raw.clicks.num_items())
        log::info("filter kept " + std::to_string(filtered.num_users()) + " of " +
                  std::to_string(raw.clicks.num_users()) + " users and " + std::to_string(filtered.num_items()) +
                  " of " + std::to_string(raw.clicks.num_items()) + " items");
    p.dataset = data::restrict_to_clicks(raw, std::move(filtered));
    const auto users = p.dataset.clicks.num_users();
    const auto heldout = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config.heldout_frac * static_cast<double>(users))));
    Rng rng = stage_rng(config.seed, "split");
    p.split = data::holdout_split(p.dataset.clicks, heldout, config.mask_fraction, rng);
    return p;
}

namespace {

data::LabelPropConfig labelprop_config(const RunConfig& c, std::size_t repeats)
{
    return {.k = c.k,
            .repeats = repeats,
            .rule = c.strict_threshold ? data::ThresholdRule::strictly_greater : data::ThresholdRule::at_least};
}

} // namespace

data::LabeledProfileDataset training_profiles(const RunConfig& config, const PreparedData& data)
{
    Rng rng = stage_rng(config.seed, "labelprop");
    return data::build_labelprop_dataset(data.split.train, data.dataset.labels, data.dataset.embeddings,
                                         labelprop_config(config, config.labelprop_repeats), rng);
}

data::LabeledProfileDataset validation_profiles(const RunConfig& config, const PreparedData& data)
{
    Rng rng = stage_rng(config.seed, "validation");
    return data::build_labelprop_dataset(data.fold_in_matrix(), data.dataset.labels, data.dataset.embeddings,
                                         labelprop_config(config, 1), rng);
}

TrainSummary run_train(const RunConfig& config, const DataPaths& paths, const fs::path& run_dir)
{
    validate(config);
    ensure_dir(run_dir);
    const PreparedData data = prepare_data(config, paths);

    TrainSummary summary;
    RunManifest& m = summary.manifest;
    m.config = config;
    if (!config.no_condition) {
        m.styles = data.dataset.labels.style_names();
        if (m.styles.empty())
            log::warn("no style labels; training the unconditioned model only");
    }
    m.clicks_checksum = data.clicks_checksum;
    m.embeddings_checksum = data.embeddings_checksum;
    m.labels_checksum = data.labels_checksum;
    m.users = data.dataset.clicks.num_users();
    m.items = data.dataset.clicks.num_items();
    save_manifest(run_dir / "manifest.json", m);
    const std::string hash = m.hash();

    std::optional<textenc::TextEncoderModel> text;
    if (!m.styles.empty()) {
        const auto profiles = training_profiles(config, data);
        Rng rng = stage_rng(config.seed, "text");
        text = textenc::TextEncoderModel::initialized({.input_dim = data.dataset.embeddings.dim(),
                                                       .hidden1 = config.text_hidden1,
                                                       .hidden2 = config.text_hidden2,
                                                       .styles = m.styles.size(),
                                                       .input_dropout = config.text_dropout,
                                                       .variant = config.text_variant},
                                                      m.styles, rng);
        try {
            summary.text_curve = textenc::train_text_encoder(*text, profiles, text_train_config(config), rng);
        } catch (const NumericError&) {
            io::save_text_encoder(run_dir / "text_encoder.ckpt", *text, hash);
            throw;
        }
        io::save_text_encoder(run_dir / "text_encoder.ckpt", *text, hash);
        write_curve(run_dir / "text_loss.tsv", hash, *summary.text_curve);
    }

    Rng rng = stage_rng(config.seed, "vae");
    auto model = vae::ClickVaeModel::initialized({.items = m.items,
                                                  .styles = m.styles.size(),
                                                  .hidden = config.vae_hidden,
                                                  .latent = config.latent,
                                                  .decoder_dropout = config.decoder_dropout},
                                                 m.styles, rng);
    const vae::VaeTrainConfig vcfg{.beta = config.beta,
                                   .k = config.k,
                                   .epochs = config.epochs_vae,
                                   .batch_size = config.vae_batch,
                                   .adam = {.learning_rate = config.vae_lr},
                                   .beta_warmup = config.beta_warmup};
    try {
        summary.vae_report = vae::train_click_vae(model, data.split.train, text ? &*text : nullptr,
                                                  data.dataset.embeddings, vcfg, rng);
    } catch (const NumericError&) {
        io::save_click_vae(run_dir / "click_vae.ckpt", model, hash);
        throw;
    }
    io::save_click_vae(run_dir / "click_vae.ckpt", model, hash);
    const auto& r = summary.vae_report;
    write_curve(run_dir / "vae_loss.tsv", hash, r.curve,
                "steps " + std::to_string(r.steps) + " min_kl " + format_double(r.min_kl) + " max_row_sum_error " +
                    format_double(r.max_row_sum_error) + " text_hash_before " + hex64(r.text_hash_before) +
                    " text_hash_after " + hex64(r.text_hash_after));
    return summary;
}

LoadedRun load_run(const fs::path& run_dir)
{
    LoadedRun run{.manifest = load_manifest(run_dir / "manifest.json"), .manifest_hash = {}, .text = {}, .model = {}};
    run.manifest_hash = run.manifest.hash();
    if (!run.manifest.styles.empty())
        run.text = io::load_text_encoder(run_dir / "text_encoder.ckpt", run.manifest_hash);
    run.model = io::load_click_vae(run_dir / "click_vae.ckpt", run.manifest_hash);
    if (run.model.items() != run.manifest.items || run.model.style_names != run.manifest.styles ||
        (run.text && run.text->style_names != run.manifest.styles))
        throw DataError("checkpoints in '" + run_dir.string() + "' do not match its manifest");
    return run;
}

EvalSummary run_eval(const fs::path& run_dir, const std::optional<fs::path>& ablation_dir, const DataPaths& paths,
                     const fs::path& out_dir, const EvalOptions& options)
{
    const LoadedRun run = load_run(run_dir);
    const RunConfig& cfg = run.manifest.config;
    const PreparedData data = prepare_data(cfg, paths);
    check_data_matches(run.manifest, data);
    ensure_dir(out_dir);
    const eval::ReportStamp stamp{cfg.seed, run.manifest_hash};
    const auto spec = profile_spec(run.manifest, options.profile);

    EvalSummary summary;
    summary.rankings.push_back(
        eval::evaluate_ranking(model_name(run), run.model, run.text_ptr(), data.split, data.dataset.embeddings, spec));
    if (ablation_dir) {
        const LoadedRun ab = load_run(*ablation_dir);
        const RunConfig& ac = ab.manifest.config;
        if (ab.manifest.clicks_checksum != run.manifest.clicks_checksum ||
            ab.manifest.embeddings_checksum != run.manifest.embeddings_checksum ||
            ab.manifest.labels_checksum != run.manifest.labels_checksum || ac.seed != cfg.seed ||
            ac.min_items_per_user != cfg.min_items_per_user || ac.min_users_per_item != cfg.min_users_per_item ||
            ac.heldout_frac != cfg.heldout_frac || ac.mask_fraction != cfg.mask_fraction)
            throw DataError("ablation run '" + ablation_dir->string() +
                            "' was trained on different data, seed or split settings");
        auto name = model_name(ab);
        if (name == summary.rankings.front().model)
            name += "-ablation";
        summary.rankings.push_back(
            eval::evaluate_ranking(name, ab.model, ab.text_ptr(), data.split, data.dataset.embeddings, spec));
    }
    for (const auto& r : summary.rankings) {
        auto out = open_output(out_dir / ("ranking_" + r.model + ".tsv"));
        eval::write_ranking_tsv(out, stamp, r, data.dataset.clicks.user_ids());
    }
    {
        auto out = open_output(out_dir / "ranking_summary.tsv");
        eval::write_ranking_summary(out, stamp, summary.rankings);
    }

    if (run.text) {
        const auto train = training_profiles(cfg, data);
        const auto valid = validation_profiles(cfg, data);
        eval::StyleReport sr;
        sr.style_names = run.manifest.styles;
        sr.encoder = textenc::auc_report(textenc::encode_batch(*run.text, valid.vectors), valid);
        if (options.lr_baseline) {
            Rng rng = stage_rng(cfg.seed, "lr");
            auto lr = textenc::make_lr_baseline(data.dataset.embeddings.dim(), sr.style_names);
            textenc::train_lr_baseline(lr, train, text_train_config(cfg), rng);
            sr.baseline = textenc::auc_report(textenc::lr_predict(lr, valid.vectors), valid);
        }
        sr.prevalence = eval::style_distribution_report(train);
        nn::Tensor2 profiles(data.split.fold_in.size(), sr.style_names.size());
        for (std::size_t h = 0; h < data.split.fold_in.size(); ++h) {
            const auto p = vae::learned_profile(run.text_ptr(), data.split.fold_in[h], data.dataset.embeddings, spec);
            std::copy(p.begin(), p.end(), profiles.row(h).begin());
        }
        sr.correlation = eval::pearson_matrix(profiles);
        auto out = open_output(out_dir / "style_report.tsv");
        eval::write_style_tsv(out, stamp, sr);
        summary.styles = std::move(sr);
    }

    Rng rng = stage_rng(cfg.seed, "variance");
    summary.variances = eval::variance_vs_k_study(data.dataset.embeddings, data.dataset.clicks, options.variance_k, rng);
    auto out = open_output(out_dir / "variance.tsv");
    eval::write_variance_tsv(out, stamp, options.variance_k, summary.variances);
    return summary;
}

std::size_t style_index(const std::vector<std::string>& vocabulary, const std::string& name)
{
    for (std::size_t s = 0; s < vocabulary.size(); ++s)
        if (vocabulary[s] == name)
            return s;
    std::string known;
    for (const auto& v : vocabulary)
        known += (known.empty() ? "" : ", ") + v;
    throw ConfigError("unknown style '" + name + "'; known styles: " + known);
}

std::vector<double> read_target_profile(const fs::path& path, const std::vector<std::string>& vocabulary)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open target profile '" + path.string() + "'");
    std::vector<double> profile(vocabulary.size(), 0.0);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto parts = split(t, '\t');
        const auto value = parts.size() == 2 ? parse_double(parts[1]) : std::nullopt;
        if (!value || *value < 0.0 || *value > 1.0)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'style<TAB>value' with value in [0, 1]");
        profile[style_index(vocabulary, std::string(trim(parts[0])))] = *value;
    }
    return profile;
}

InjectSummary run_inject(const fs::path& run_dir, const DataPaths& paths, const fs::path& out_dir,
                         const InjectOptions& options)
{
    const LoadedRun run = load_run(run_dir);
    if (!run.text)
        throw ConfigError("style injection needs a conditioned run");
    const RunConfig& cfg = run.manifest.config;
    const PreparedData data = prepare_data(cfg, paths);
    check_data_matches(run.manifest, data);
    ensure_dir(out_dir);
    const eval::ReportStamp stamp{cfg.seed, run.manifest_hash};
    const auto& styles = run.manifest.styles;
    const auto spec = profile_spec(run.manifest, options.shift.profile);

    std::size_t users = data.split.heldout_users.size();
    if (options.max_users)
        users = std::min(users, options.max_users);
    const std::vector<std::vector<std::size_t>> folds(data.split.fold_in.begin(),
                                                      data.split.fold_in.begin() + static_cast<std::ptrdiff_t>(users));

    std::vector<std::pair<std::string, std::vector<double>>> targets;
    bool all = false;
    if (options.target_profile) {
        if (options.target_profile->size() != styles.size())
            throw ConfigError("target profile has " + std::to_string(options.target_profile->size()) +
                              " entries for " + std::to_string(styles.size()) + " styles");
        targets.emplace_back("custom", *options.target_profile);
    } else {
        all = options.styles.size() == 1 && options.styles.front() == "all";
        if (all) {
            for (std::size_t s = 0; s < styles.size(); ++s)
                targets.emplace_back(styles[s], inject::one_hot(styles.size(), s));
        } else {
            for (const auto& name : options.styles)
                targets.emplace_back(name, inject::one_hot(styles.size(), style_index(styles, name)));
        }
    }

    InjectSummary summary;
    const auto& item_ids = data.dataset.clicks.item_ids();
    {
        auto out = open_output(out_dir / "injected_lists.tsv");
        out << "# manifest " << run.manifest_hash << " seed " << cfg.seed << '\n';
        out << "user\tinjected\titems\n";
        for (std::size_t h = 0; h < users; ++h) {
            const auto& user = data.dataset.clicks.user_ids()[data.split.heldout_users[h]];
            for (const auto& [name, target] : targets) {
                const auto list = inject::inject_style(run.model, *run.text, folds[h], data.dataset.embeddings,
                                                       {target, options.shift.top_n}, spec);
                out << user << '\t' << name << '\t';
                for (std::size_t i = 0; i < list.size(); ++i)
                    out << (i ? "," : "") << item_ids[list[i]];
                out << '\n';
                ++summary.lists;
            }
        }
    }
    if (all) {
        inject::ShiftConfig sc = options.shift;
        sc.profile = spec;
        summary.shift = inject::measure_injection_shift(run.model, *run.text, folds, data.dataset.embeddings, sc,
                                                        derive_seed(cfg.seed, "inject"));
        auto out = open_output(out_dir / "shift_matrix.tsv");
        eval::write_shift_tsv(out, stamp, *summary.shift);
    }
    return summary;
}

namespace {

nn::Tensor2 normal_tensor(std::size_t r, std::size_t c, Rng& rng)
{
    std::normal_distribution<double> n;
    nn::Tensor2 t(r, c);
    for (double& v : t.values())
        v = n(rng);
    return t;
}

std::vector<double> concat(const std::vector<std::span<const double>>& spans)
{
    std::vector<double> out;
    for (auto s : spans)
        out.insert(out.end(), s.begin(), s.end());
    return out;
}

nn::GradCheckReport check(const std::vector<nn::ParamRef>& params, const std::vector<double>& analytic,
                          const std::function<double()>& loss, double tolerance)
{
    const auto start = nn::flatten(params);
    nn::ScalarLoss f = [&](std::span<const double> flat) {
        nn::unflatten(flat, params);
        return loss();
    };
    auto report = nn::grad_check(f, start, analytic, tolerance);
    nn::unflatten(start, params);
    return report;
}

} // namespace

std::vector<GradCheckLine> run_grad_checks(std::uint64_t seed, double tolerance)
{
    std::vector<GradCheckLine> lines;
    Rng rng = stage_rng(seed, "grad-check");
    const nn::Tensor2 style_targets{{1, 0, 1}, {0, 0, 1}, {1, 1, 0}};

    for (auto variant : {textenc::EncoderVariant::plain, textenc::EncoderVariant::gaussian_prior}) {
        auto m = textenc::TextEncoderModel::initialized(
            {.input_dim = 4, .hidden1 = 6, .hidden2 = 5, .styles = 3, .input_dropout = 0.25, .variant = variant},
            {"a", "b", "c"}, rng);
        const auto x = normal_tensor(3, 4, rng);
        const auto mask = nn::dropout_mask(3, 4, 0.25, rng);
        const auto noise = normal_tensor(3, 3, rng);
        const nn::Tensor2* eps = variant == textenc::EncoderVariant::gaussian_prior ? &noise : nullptr;
        textenc::TextEncoderGrads g(m);
        textenc::text_encoder_loss(m, x, style_targets, &mask, eps, &g);
        lines.push_back({"text encoder (" + std::string(textenc::to_string(variant)) + ")",
                         check(m.parameters(), concat(g.spans()),
                               [&] { return textenc::text_encoder_loss(m, x, style_targets, &mask, eps, nullptr); },
                               tolerance)});
    }

    for (std::size_t styles : {std::size_t{2}, std::size_t{0}}) {
        std::vector<std::string> names;
        for (std::size_t s = 0; s < styles; ++s)
            names.push_back("s" + std::to_string(s));
        auto m = vae::ClickVaeModel::initialized({.items = 10, .styles = styles, .hidden = 6, .latent = 3}, names, rng);
        const std::vector<std::vector<std::size_t>> rows{{0, 3, 4}, {9}, {1, 2, 5, 8}};
        const auto targets = vae::binary_clicks(rows, 10);
        nn::Tensor2 cond(3, styles);
        std::uniform_real_distribution<double> u;
        for (double& v : cond.values())
            v = u(rng);
        const auto eps = normal_tensor(3, 3, rng);
        const auto mask = nn::dropout_mask(3, 3, 0.5, rng);
        vae::ClickVaeGrads g(m);
        vae::cvae_batch_loss(m, targets, cond, &eps, &mask, 0.17, &g);
        lines.push_back(
            {styles ? "click CVAE (conditioned)" : "click VAE (unconditioned)",
             check(m.parameters(), concat(g.spans()),
                   [&] { return vae::cvae_batch_loss(m, targets, cond, &eps, &mask, 0.17, nullptr).loss; },
                   tolerance)});
    }

    {
        auto m = textenc::make_lr_baseline(4, {"a", "b", "c"});
        m.layer = nn::DenseLayer::glorot(4, 3, nn::Activation::sigmoid, rng);
        const auto x = normal_tensor(3, 4, rng);
        nn::DenseGrads g(m.layer);
        textenc::lr_loss(m, x, style_targets, &g);
        std::vector<std::span<const double>> spans;
        nn::append_grads(spans, g);
        lines.push_back({"logistic baseline", check(m.parameters(), concat(spans),
                                                    [&] { return textenc::lr_loss(m, x, style_targets, nullptr); },
                                                    tolerance)});
    }
    return lines;
}

} // namespace scr::app
