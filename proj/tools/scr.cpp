#include "scr/app/pipeline.hpp"
#include "scr/core/errors.hpp"
#include "scr/core/format.hpp"
#include "scr/core/log.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace scr;

namespace {

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numeric = 3 };

struct DataFlags {
    std::string dir;
    std::string clicks;
    std::string embeddings;
    std::string labels;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--data", dir, "Directory holding clicks.tsv, embeddings.tsv and labels.tsv");
        cmd.add_option("--clicks", clicks, "Click file (overrides --data)");
        cmd.add_option("--embeddings", embeddings, "Item embedding file (overrides --data)");
        cmd.add_option("--labels", labels, "Item style label file (overrides --data)");
    }

    app::DataPaths resolve() const
    {
        app::DataPaths p = dir.empty() ? app::DataPaths{} : app::DataPaths::in_dir(dir);
        if (!clicks.empty())
            p.clicks = clicks;
        if (!embeddings.empty())
            p.embeddings = embeddings;
        if (!labels.empty())
            p.labels = labels;
        if (p.clicks.empty() || p.embeddings.empty() || p.labels.empty())
            throw ConfigError("input files missing: pass --data DIR or all of --clicks, --embeddings, --labels");
        return p;
    }
};

void add_config_file(CLI::App& cmd, std::string& path)
{
    cmd.add_option("--config", path, "key=value file of long option names; command-line flags win");
}

/// Fills options not given on the command line from a key=value file.
void apply_config_file(CLI::App& cmd, const std::string& path)
{
    if (path.empty())
        return;
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto eq = t.find('=');
        const std::string where = path + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos)
            throw ConfigError(where + "expected key=value");
        std::string key(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        if (!key.starts_with("--"))
            key = "--" + key;
        auto* opt = cmd.get_option_no_throw(key);
        if (opt == nullptr || key == "--config")
            throw ConfigError(where + "unknown option '" + key + "'");
        if (opt->count() > 0)
            continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError(where + e.what());
        }
    }
}

void require_set(const std::string& value, const std::string& flag)
{
    if (value.empty())
        throw ConfigError(flag + " is required");
}

void add_run_config(CLI::App& cmd, app::RunConfig& c, std::string& variant)
{
    cmd.add_option("--seed", c.seed, "Master seed")->capture_default_str();
    cmd.add_option("--min-items-per-user", c.min_items_per_user)->capture_default_str();
    cmd.add_option("--min-users-per-item", c.min_users_per_item)->capture_default_str();
    cmd.add_option("--heldout-frac", c.heldout_frac, "Share of users held out for evaluation")->capture_default_str();
    cmd.add_option("--mask-fraction", c.mask_fraction, "Share of a held-out user's clicks masked")
        ->capture_default_str();
    cmd.add_option("--k", c.k, "Items sampled per content profile")->capture_default_str();
    cmd.add_option("--labelprop-repeats", c.labelprop_repeats, "Label-propagation draws per user")
        ->capture_default_str();
    cmd.add_flag("--strict-threshold", c.strict_threshold, "Require label frequency strictly above 0.5");
    cmd.add_option("--epochs-text", c.epochs_text)->capture_default_str();
    cmd.add_option("--text-hidden1", c.text_hidden1)->capture_default_str();
    cmd.add_option("--text-hidden2", c.text_hidden2)->capture_default_str();
    cmd.add_option("--text-dropout", c.text_dropout, "Input dropout of the text encoder")->capture_default_str();
    cmd.add_option("--text-variant", variant, "Text encoder head")
        ->check(CLI::IsMember({"plain", "gaussian-prior"}))
        ->capture_default_str();
    cmd.add_option("--text-batch", c.text_batch)->capture_default_str();
    cmd.add_option("--text-lr", c.text_lr)->capture_default_str();
    cmd.add_option("--epochs-vae", c.epochs_vae)->capture_default_str();
    cmd.add_option("--beta", c.beta, "KL weight")->capture_default_str();
    cmd.add_flag("--beta-warmup", c.beta_warmup, "Ramp beta linearly over the first 20% of steps");
    cmd.add_option("--vae-hidden", c.vae_hidden)->capture_default_str();
    cmd.add_option("--latent", c.latent)->capture_default_str();
    cmd.add_option("--decoder-dropout", c.decoder_dropout)->capture_default_str();
    cmd.add_option("--vae-batch", c.vae_batch)->capture_default_str();
    cmd.add_option("--vae-lr", c.vae_lr)->capture_default_str();
    cmd.add_flag("--no-condition", c.no_condition, "Train the unconditioned VAE-CF ablation");
}

void add_synth_config(CLI::App& cmd, data::SynthConfig& c)
{
    cmd.add_option("--users", c.users)->capture_default_str();
    cmd.add_option("--items", c.items)->capture_default_str();
    cmd.add_option("--styles", c.styles)->capture_default_str();
    cmd.add_option("--dim", c.dim, "Embedding dimension")->capture_default_str();
    cmd.add_option("--density", c.density, "Mean clicks per user divided by items")->capture_default_str();
    cmd.add_option("--noise", c.noise, "Embedding noise stddev")->capture_default_str();
    cmd.add_option("--multi-style-rate", c.multi_style_rate, "Share of items with several styles")
        ->capture_default_str();
    cmd.add_option("--label-fraction", c.label_fraction, "Share of items with style labels")->capture_default_str();
    cmd.add_option("--second-style-rate", c.second_style_rate, "Share of users with two dominant styles")
        ->capture_default_str();
    cmd.add_option("--background", c.background, "Preference weight of non-dominant styles")
        ->capture_default_str();
    cmd.add_option("--secondary-weight", c.secondary_weight)->capture_default_str();
    cmd.add_option("--popularity-sigma", c.popularity_sigma, "Log-normal spread of item popularity")
        ->capture_default_str();
}

void add_mode_option(CLI::App& cmd, std::string& mode)
{
    cmd.add_option("--mode", mode, "How content profiles pick fold-in items")
        ->check(CLI::IsMember({"sample-k", "last-k"}))
        ->capture_default_str();
}

std::string na(std::optional<double> v) { return v ? std::to_string(*v) : "NA"; }

int grad_check(std::uint64_t seed, double tolerance)
{
    bool ok = true;
    for (const auto& line : app::run_grad_checks(seed, tolerance)) {
        std::cout << (line.report.passed ? "PASS" : "FAIL") << '\t' << line.name << "\tmax_rel_err "
                  << line.report.max_relative_error << '\n';
        ok = ok && line.report.passed;
    }
    return ok ? exit_ok : exit_numeric;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App cli{"Style-conditioned click recommender"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", std::string(app::software_version));

    std::uint64_t synth_seed = 1;
    std::string synth_out;
    data::SynthConfig synth;
    auto* synth_cmd = cli.add_subcommand("synth", "Generate a synthetic dataset with planted styles");
    std::string synth_config;
    add_config_file(*synth_cmd, synth_config);
    synth_cmd->add_option("--seed", synth_seed)->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output directory");
    add_synth_config(*synth_cmd, synth);

    app::RunConfig run_config;
    std::string variant = "plain";
    std::string train_out;
    DataFlags train_data;
    auto* train_cmd = cli.add_subcommand("train", "Train the text encoder, then the click VAE");
    std::string train_config;
    add_config_file(*train_cmd, train_config);
    train_data.add_to(*train_cmd);
    train_cmd->add_option("--out", train_out, "Run directory");
    add_run_config(*train_cmd, run_config, variant);

    std::string eval_run, eval_ablation, eval_out, eval_mode = "sample-k";
    bool no_baseline = false;
    DataFlags eval_data;
    auto* eval_cmd = cli.add_subcommand("eval", "Ranking, style and variance reports for a trained run");
    std::string eval_config;
    add_config_file(*eval_cmd, eval_config);
    eval_data.add_to(*eval_cmd);
    eval_cmd->add_option("--run", eval_run, "Run directory");
    eval_cmd->add_option("--ablation", eval_ablation, "Run directory of a model to compare against");
    eval_cmd->add_option("--out", eval_out, "Report directory");
    eval_cmd->add_flag("--no-baseline", no_baseline, "Skip the logistic-regression style baseline");
    add_mode_option(*eval_cmd, eval_mode);

    std::string inject_run, inject_out, inject_mode = "sample-k", target_file;
    std::vector<std::string> inject_styles{"all"};
    app::InjectOptions inject;
    DataFlags inject_data;
    auto* inject_cmd = cli.add_subcommand("inject", "Recommend with a replaced style profile");
    std::string inject_config;
    add_config_file(*inject_cmd, inject_config);
    inject_data.add_to(*inject_cmd);
    inject_cmd->add_option("--run", inject_run, "Run directory");
    inject_cmd->add_option("--out", inject_out, "Report directory");
    auto* style_opt = inject_cmd->add_option("--style", inject_styles, "Style name(s) to inject, or 'all'")
                          ->capture_default_str();
    inject_cmd->add_option("--target-profile", target_file, "File of 'style<TAB>value' lines")->excludes(style_opt);
    inject_cmd->add_option("--top-n", inject.shift.top_n, "List length")->capture_default_str();
    inject_cmd->add_option("--max-users", inject.max_users, "Held-out users to process (0 = all)")
        ->capture_default_str();
    add_mode_option(*inject_cmd, inject_mode);

    std::uint64_t gc_seed = 1;
    double gc_tolerance = 1e-4;
    auto* gc_cmd = cli.add_subcommand("grad-check", "Finite-difference check of every training loss");
    gc_cmd->add_option("--seed", gc_seed)->capture_default_str();
    gc_cmd->add_option("--tolerance", gc_tolerance, "Maximum relative error")->capture_default_str();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        for (auto [cmd, path] : {std::pair{synth_cmd, &synth_config}, std::pair{train_cmd, &train_config},
                                 std::pair{eval_cmd, &eval_config}, std::pair{inject_cmd, &inject_config}})
            if (*cmd)
                apply_config_file(*cmd, *path);
        if (*synth_cmd) {
            require_set(synth_out, "--out");
            const auto ds = app::run_synth(synth, synth_seed, synth_out);
            std::cout << "wrote " << ds.clicks.num_users() << " users, " << ds.clicks.num_items() << " items, "
                      << ds.labels.num_styles() << " styles to " << synth_out << '\n';
        } else if (*train_cmd) {
            require_set(train_out, "--out");
            run_config.text_variant = textenc::variant_from_string(variant);
            const auto summary = app::run_train(run_config, train_data.resolve(), train_out);
            std::cout << "manifest " << summary.manifest.hash() << '\n';
            if (summary.text_curve)
                std::cout << "text encoder loss " << summary.text_curve->head_mean() << " -> "
                          << summary.text_curve->tail_mean() << '\n';
            std::cout << "click VAE loss " << summary.vae_report.curve.head_mean() << " -> "
                      << summary.vae_report.curve.tail_mean() << " over " << summary.vae_report.steps
                      << " steps\n";
        } else if (*eval_cmd) {
            require_set(eval_run, "--run");
            require_set(eval_out, "--out");
            app::EvalOptions options;
            options.profile.mode = vae::profile_mode_from_string(eval_mode);
            options.lr_baseline = !no_baseline;
            std::optional<std::filesystem::path> ablation;
            if (!eval_ablation.empty())
                ablation = eval_ablation;
            const auto summary = app::run_eval(eval_run, ablation, eval_data.resolve(), eval_out, options);
            for (const auto& r : summary.rankings)
                std::cout << r.model << "\tNDCG@20 " << r.ndcg20 << "\tRecall@20 " << r.recall20 << "\tusers "
                          << r.users.size() << '\n';
            if (summary.styles) {
                std::cout << "style AUC " << na(summary.styles->encoder.average);
                if (summary.styles->baseline)
                    std::cout << " (baseline " << na(summary.styles->baseline->average) << ")";
                std::cout << '\n';
            }
        } else if (*inject_cmd) {
            require_set(inject_run, "--run");
            require_set(inject_out, "--out");
            inject.shift.profile.mode = vae::profile_mode_from_string(inject_mode);
            inject.styles = inject_styles;
            if (!target_file.empty()) {
                const auto run = app::load_run(inject_run);
                inject.target_profile = app::read_target_profile(target_file, run.manifest.styles);
            }
            const auto summary = app::run_inject(inject_run, inject_data.resolve(), inject_out, inject);
            std::cout << "wrote " << summary.lists << " lists";
            if (summary.shift)
                std::cout << "; mean relative presence increase " << summary.shift->mean_relative_increase();
            std::cout << '\n';
        } else if (*gc_cmd) {
            return grad_check(gc_seed, gc_tolerance);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_ok;
}
