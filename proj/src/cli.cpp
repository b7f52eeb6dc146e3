#include "bsb/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <vector>

#include "CLI11.hpp"

#include "bsb/analyzer.hpp"
#include "bsb/auth.hpp"
#include "bsb/codec.hpp"
#include "bsb/error.hpp"
#include "bsb/pnm.hpp"
#include "bsb/store_io.hpp"
#include "bsb/training.hpp"

namespace bsb {
namespace {

// Bad content in a user-supplied file (maps to the I/O-or-format exit code).
class FormatFailure : public Error {
public:
    using Error::Error;
};

// Bad command-line value detected after parsing.
class UsageFailure : public Error {
public:
    using Error::Error;
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ParamFlags {
    BsbParams params;
    std::vector<CLI::Option*> options;

    void attach(CLI::App* cmd) {
        options = {
            cmd->add_option("--gamma", params.gamma, "Feedback gain on the evolving state")
                ->capture_default_str(),
            cmd->add_option("--eta", params.eta, "Gain on W x + b")->capture_default_str(),
            cmd->add_option("--theta", params.theta, "Persistence gain of the original probe")
                ->capture_default_str(),
            cmd->add_option("--max-iters", params.max_iters, "Recall iteration limit")
                ->capture_default_str(),
            cmd->add_option("--tol", params.convergence_tol,
                            "Convergence tolerance (max-norm change)")
                ->capture_default_str(),
        };
    }

    // Values given on the command line replace those in `base`.
    BsbParams overlay(BsbParams base) const {
        if (options[0]->count()) base.gamma = params.gamma;
        if (options[1]->count()) base.eta = params.eta;
        if (options[2]->count()) base.theta = params.theta;
        if (options[3]->count()) base.max_iters = params.max_iters;
        if (options[4]->count()) base.convergence_tol = params.convergence_tol;
        return base;
    }
};

struct TrainingFlags {
    TrainingConfig config;
    bool keep_diagonal = false;
    bool asymmetric_mask = false;
    double bias_eps = 0.0;
    bool suppress_negatives = false;
    CLI::Option* bias_eps_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lr", config.lr, "Hebbian learning rate")->capture_default_str();
        cmd->add_option("--connectivity", config.connectivity,
                        "Fraction of off-diagonal weights kept, in (0, 1]")
            ->capture_default_str();
        cmd->add_option("--mask-seed", config.mask_seed, "Seed of the connectivity mask")
            ->capture_default_str();
        cmd->add_flag("--keep-diagonal", keep_diagonal, "Keep self-connections (default: zeroed)");
        cmd->add_flag("--asymmetric-mask", asymmetric_mask,
                      "Draw the mask per entry instead of per pair");
        bias_eps_opt = cmd->add_option("--bias-eps", bias_eps,
                                       "Set b = eps * sum of patterns (default: b = 0)");
        cmd->add_flag("--suppress-negatives", suppress_negatives,
                      "Shorthand for --bias-eps 0.3*lr");
    }

    TrainingConfig resolved() const {
        TrainingConfig t = config;
        t.zero_diagonal = !keep_diagonal;
        t.symmetric_mask = !asymmetric_mask;
        return t;
    }

    std::optional<double> eps() const {
        if (bias_eps_opt->count()) return bias_eps;
        if (suppress_negatives) return kSuppressionEpsFactor * config.lr;
        return std::nullopt;
    }
};

Secret load_secret(const std::string& password, const std::string& image_path) {
    if (!image_path.empty()) return ImageSecret{read_image(image_path)};
    return TextSecret{password};
}

int run_enroll(const std::string& store_path, const std::string& user, const std::string& password,
               const std::string& image_path, std::size_t width, int threshold,
               const TrainingFlags& training, const ParamFlags& params, std::ostream& out) {
    CredentialStore store;
    if (std::filesystem::exists(store_path)) store = load_store(store_path);

    EnrollConfig config;
    config.text_width = width;
    config.threshold = threshold;
    config.training = training.resolved();
    config.params = params.params;
    config.bias_eps = training.eps();

    const Secret secret = load_secret(password, image_path);
    const UserRecord& record = enroll(store, user, secret, config);
    save_store(store, store_path);
    out << "enrolled " << record.username << " (dimension " << record.encoding.width << ")\n";
    return kExitOk;
}

int run_verify(const std::string& store_path, const std::string& user, const std::string& password,
               const std::string& image_path, std::size_t tolerance, bool verbose,
               std::ostream& out) {
    const CredentialStore store = load_store(store_path);
    const Secret candidate = load_secret(password, image_path);
    const VerifyResult result = verify(store, user, candidate, VerifyOptions{tolerance});
    out << (result.accepted() ? "accept" : "reject") << '\n';
    if (verbose) {
        out << "reason " << to_string(result.reason) << '\n'
            << "hamming " << result.hamming << '\n'
            << "converged " << (result.converged ? "true" : "false") << '\n'
            << "iterations " << result.iterations << '\n';
    }
    return result.accepted() ? kExitOk : kExitReject;
}

BipolarVector load_pattern_arg(const std::string& pattern, const std::string& pattern_file) {
    try {
        if (!pattern_file.empty()) return parse_bipolar(read_text_file(pattern_file));
        return parse_bipolar(pattern);
    } catch (const EncodingError& e) {
        throw FormatFailure(std::string("pattern: ") + e.what());
    }
}

int run_recall(const std::string& network_path, const std::string& pattern,
               const std::string& pattern_file, const ParamFlags& overrides, std::ostream& out) {
    const TrainedNetwork network = load_network(network_path);
    const BipolarVector probe = load_pattern_arg(pattern, pattern_file);
    if (probe.size() != network.net.dimension()) {
        throw UsageFailure("pattern has dimension " + std::to_string(probe.size()) +
                           ", network has " + std::to_string(network.net.dimension()));
    }
    const RecallTrace trace = recall(probe, network.net, overrides.overlay(network.params));
    out << format_bipolar(trace.final_state) << '\n'
        << "converged " << (trace.converged ? "true" : "false") << '\n'
        << "iterations " << trace.iterations_used << '\n';
    return trace.converged ? kExitOk : kExitReject;
}

int run_convert_image(const std::string& input, int threshold, const std::string& output,
                      std::ostream& out) {
    const RgbImage image = read_image(input);
    const BinaryMatrix bits = image_to_binary(image, threshold);
    const BipolarVector v = binary_to_bipolar(bits);
    std::ostringstream text;
    for (std::size_t r = 0; r < bits.rows(); ++r) {
        for (std::size_t c = 0; c < bits.cols(); ++c) {
            if (c) text << ' ';
            text << (v[r * bits.cols() + c] > 0 ? "+1" : "-1");
        }
        text << '\n';
    }
    if (output.empty()) {
        out << text.str();
    } else {
        std::ofstream file(output, std::ios::binary | std::ios::trunc);
        if (!(file << text.str())) throw IoError("cannot write '" + output + "'");
    }
    return kExitOk;
}

PatternSet load_pattern_file(const std::string& path) {
    try {
        return PatternSet(parse_pattern_lines(read_text_file(path)));
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw FormatFailure("patterns file '" + path + "': " + e.what());
    }
}

struct AnalyzeArgs {
    std::string network_path;
    std::string patterns_path;
    std::string json_path;
    std::size_t max_d = kMaxEnumerationDim;
    bool basins = false;
    std::size_t samples = 0;
    std::size_t noise_flips = 0;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

int run_analyze(const AnalyzeArgs& args, const ParamFlags& overrides, std::ostream& out) {
    const TrainedNetwork network = load_network(args.network_path);
    const BsbParams params = overrides.overlay(network.params);
    std::optional<PatternSet> patterns;
    if (!args.patterns_path.empty()) {
        patterns = load_pattern_file(args.patterns_path);
        if (patterns->dimension() != network.net.dimension()) {
            throw UsageFailure("patterns and network dimensions differ");
        }
    }

    if (args.samples > 0) {
        if (!patterns) throw UsageFailure("--samples needs --patterns");
        const SampleStats stats = sample_basins(network.net, params, *patterns, args.samples,
                                                args.noise_flips, args.seed);
        out << "samples " << stats.samples << '\n'
            << "successes " << stats.successes << '\n'
            << "converged " << stats.converged << '\n'
            << "success_fraction " << stats.success_fraction << '\n';
        return kExitOk;
    }

    const PatternIndex index = patterns ? PatternIndex(*patterns) : PatternIndex(network.pattern_digests);
    const AnalysisOptions options{args.workers};
    const AttractorCensus census =
        args.basins ? basin_map(network.net, params, index, options, args.max_d)
                    : enumerate_fixed_points(network.net, params, index, options, args.max_d);
    out << census_to_text(census);
    if (!args.json_path.empty()) {
        std::ofstream file(args.json_path, std::ios::binary | std::ios::trunc);
        if (!(file << census_to_json(census) << '\n')) {
            throw IoError("cannot write '" + args.json_path + "'");
        }
    }
    return kExitOk;
}

int run_train(const std::string& patterns_path, const std::string& output,
              const TrainingFlags& training, const ParamFlags& params, std::ostream& out) {
    const PatternSet set = load_pattern_file(patterns_path);
    const TrainingConfig config = training.resolved();
    params.params.validate();
    WeightMatrix net = train(set, config);
    if (auto eps = training.eps()) net = set_bias(net, pattern_sum_bias(set, *eps));

    std::vector<Digest> digests;
    for (const auto& p : set.patterns()) digests.push_back(pattern_digest(p));
    save_network(TrainedNetwork{std::move(net), params.params, config, std::move(digests)}, output);
    out << "trained " << set.size() << " patterns of dimension " << set.dimension() << " -> "
        << output << '\n';
    return kExitOk;
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Brain-State-in-a-Box associative memory and password authentication", "bsb"};
    app.require_subcommand(1);

    std::string store_path, user, password, image_path, network_path, pattern, pattern_file,
        input, output, patterns_path;
    std::size_t width = kDefaultTextWidth;
    int threshold = kDefaultImageThreshold;
    std::size_t tolerance = 0;
    bool verbose = false;

    auto add_secret = [&](CLI::App* cmd) {
        auto* pw = cmd->add_option("--password", password, "Text password");
        auto* img = cmd->add_option("--image", image_path, "Plain PPM/PGM image password");
        pw->excludes(img);
        img->excludes(pw);
        cmd->add_option("--width", width, "Encoded bits for text passwords (8 per character)")
            ->capture_default_str();
        cmd->add_option("--threshold", threshold, "Luminance threshold for images, 0-255")
            ->capture_default_str();
        return std::pair{pw, img};
    };

    auto* enroll_cmd = app.add_subcommand("enroll", "Train a per-user network on a password");
    enroll_cmd->add_option("--store", store_path, "Credential store file")->required();
    enroll_cmd->add_option("--user", user, "Username")->required();
    auto [enroll_pw, enroll_img] = add_secret(enroll_cmd);
    TrainingFlags enroll_training;
    enroll_training.attach(enroll_cmd);
    ParamFlags enroll_params;
    enroll_params.attach(enroll_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "Check a password against a store");
    verify_cmd->add_option("--store", store_path, "Credential store file")->required();
    verify_cmd->add_option("--user", user, "Username")->required();
    auto [verify_pw, verify_img] = add_secret(verify_cmd);
    verify_cmd->add_option("--tolerance", tolerance,
                           "Accepted bit distance between candidate and recalled pattern")
        ->capture_default_str();
    verify_cmd->add_flag("--verbose", verbose, "Print the reject reason and recall diagnostics");

    auto* recall_cmd = app.add_subcommand("recall", "Run the dynamics from a pattern");
    recall_cmd->add_option("--network", network_path, "Trained network file")->required();
    auto* pat = recall_cmd->add_option("--pattern", pattern, "Pattern as +1/-1 tokens");
    auto* pat_file = recall_cmd->add_option("--pattern-file", pattern_file, "File with one pattern");
    pat->excludes(pat_file);
    ParamFlags recall_params;
    recall_params.attach(recall_cmd);

    auto* convert_cmd = app.add_subcommand("convert-image", "Print a PPM/PGM image as bipolar rows");
    convert_cmd->add_option("--input", input, "Plain PPM (P3) or PGM (P2) file")->required();
    convert_cmd->add_option("--threshold", threshold, "Luminance threshold, 0-255")
        ->capture_default_str();
    convert_cmd->add_option("--output", output, "Output file (default: stdout)");

    AnalyzeArgs analyze_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "Attractor census of a saved network");
    analyze_cmd->add_option("--network", analyze_args.network_path, "Trained network file")
        ->required();
    analyze_cmd->add_option("--max-d", analyze_args.max_d, "Refuse networks above this dimension")
        ->capture_default_str();
    analyze_cmd->add_flag("--basins", analyze_args.basins,
                          "Run recall from every saturated state (d <= 20)");
    analyze_cmd->add_option("--patterns", analyze_args.patterns_path,
                            "Classify against this patterns file instead of stored digests");
    analyze_cmd->add_option("--json", analyze_args.json_path, "Also write the census as JSON");
    analyze_cmd->add_option("--samples", analyze_args.samples,
                            "Monte-Carlo recall test instead of enumeration (needs --patterns)");
    analyze_cmd->add_option("--noise-flips", analyze_args.noise_flips, "Bits flipped per sample")
        ->capture_default_str();
    analyze_cmd->add_option("--seed", analyze_args.seed, "Sampling seed")->capture_default_str();
    analyze_cmd->add_option("--workers", analyze_args.workers, "Threads (0: all cores)")
        ->capture_default_str();
    ParamFlags analyze_params;
    analyze_params.attach(analyze_cmd);

    auto* train_cmd = app.add_subcommand("train", "Train a network from a patterns file");
    train_cmd->add_option("--patterns", patterns_path, "One pattern of +1/-1 tokens per line")
        ->required();
    train_cmd->add_option("--output", output, "Network file to write")->required();
    TrainingFlags train_training;
    train_training.attach(train_cmd);
    ParamFlags train_params;
    train_params.attach(train_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name

    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto selected = app.get_subcommands();
        err << (selected.empty() ? app.help() : selected.front()->help());
        return kExitUsage;
    }

    auto require_secret = [&](CLI::Option* pw, CLI::Option* img) {
        if (!pw->count() && !img->count()) throw UsageFailure("one of --password or --image is required");
    };

    try {
        if (enroll_cmd->parsed()) {
            require_secret(enroll_pw, enroll_img);
            return run_enroll(store_path, user, password, image_path, width, threshold,
                              enroll_training, enroll_params, out);
        }
        if (verify_cmd->parsed()) {
            require_secret(verify_pw, verify_img);
            return run_verify(store_path, user, password, image_path, tolerance, verbose, out);
        }
        if (recall_cmd->parsed()) {
            if (!pat->count() && !pat_file->count()) {
                throw UsageFailure("one of --pattern or --pattern-file is required");
            }
            return run_recall(network_path, pattern, pattern_file, recall_params, out);
        }
        if (convert_cmd->parsed()) return run_convert_image(input, threshold, output, out);
        if (analyze_cmd->parsed()) return run_analyze(analyze_args, analyze_params, out);
        if (train_cmd->parsed()) return run_train(patterns_path, output, train_training, train_params, out);
    } catch (const UsageFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const EnumerationBoundError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFormat;
    } catch (const StoreError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFormat;
    } catch (const PnmError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFormat;
    } catch (const FormatFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFormat;
    } catch (const Error& e) {
        // Remaining library errors stem from argument values (bad gains,
        // unencodable password, duplicate user, ...).
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoFormat;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace bsb
