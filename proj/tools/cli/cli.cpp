#include "cli/cli.hpp"

#include <CLI11.hpp>

#include "radfed/error.hpp"

namespace radfed::cli {

namespace {

template <class T>
void optional_option(CLI::App& app, const std::string& name, std::optional<T>& target,
                     const std::string& help) {
    app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Federated learning simulator with delayed aggregation", "radfed"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic Gaussian-mixture dataset");
    gen_cmd->add_option("--classes", gen.classes, "Number of classes")->capture_default_str();
    gen_cmd->add_option("--features", gen.features, "Numeric feature count")->capture_default_str();
    gen_cmd->add_option("--separation", gen.separation, "Distance between class means")
        ->capture_default_str();
    gen_cmd->add_option("--samples,-n", gen.samples, "Sample count")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    gen_cmd->add_option("--categorical", gen.categorical, "Arity of each categorical column");
    gen_cmd->add_option("--out,-o", gen.out, "Output CSV")->required();
    optional_option(*gen_cmd, "--schema-out", gen.schema_out, "Schema JSON path");

    PartitionOptions part;
    auto* part_cmd = app.add_subcommand("partition", "Split a dataset into non-IID clients");
    optional_option(*part_cmd, "--config", part.config, "Manifest supplying defaults");
    optional_option(*part_cmd, "--input", part.input, "Dataset CSV");
    optional_option(*part_cmd, "--schema", part.schema, "Schema JSON for the dataset");
    optional_option(*part_cmd, "--label-col", part.label_col, "Label column");
    optional_option(*part_cmd, "--categorical", part.categorical, "Categorical columns");
    optional_option(*part_cmd, "--clients", part.clients, "Client count T");
    optional_option(*part_cmd, "--mu", part.mu, "Size concentration");
    optional_option(*part_cmd, "--lambda", part.lambda, "Class concentration");
    optional_option(*part_cmd, "--theta", part.theta, "Feature concentration");
    optional_option(*part_cmd, "--features", part.features,
                    "Categorical columns for the configuration objective");
    optional_option(*part_cmd, "--burn-in", part.burn_in, "Random-walk burn-in steps P");
    optional_option(*part_cmd, "--steps", part.steps, "Recorded random-walk steps Q");
    optional_option(*part_cmd, "--xi", part.xi, "Random-walk step bound");
    optional_option(*part_cmd, "--seed", part.seed, "Master seed");
    part_cmd->add_option("--out,-o", part.out, "Output directory")->required();

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run the seeds x folds x algorithms grid");
    run_cmd->add_option("--config", run.config, "Experiment manifest")->required();
    run_cmd->add_option("--partition", run.partition, "partition.json from `partition`")
        ->required();
    run_cmd->add_option("--algorithm,--algorithms", run.algorithms,
                        "Algorithms to run (overrides the manifest)")
        ->delimiter(',');
    optional_option(*run_cmd, "--seed", run.seed, "Run a single seed");
    optional_option(*run_cmd, "--out-dir", run.out_dir, "Output directory");

    MetricsOptions met;
    auto* met_cmd = app.add_subcommand("metrics", "Emit DL/DC series from a run directory");
    met_cmd->add_option("--run-dir", met.run_dir, "Directory written by `run`")->required();
    optional_option(*met_cmd, "--out,-o", met.out, "Output CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (*gen_cmd) {
            return cmd_gen(gen, out);
        }
        if (*part_cmd) {
            return cmd_partition(part, out);
        }
        if (*run_cmd) {
            return cmd_run(run, out);
        }
        return cmd_metrics(met, out);
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return kInfeasible;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IngestionError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace radfed::cli
