// Command line front end: phantom generation, projection, reconstruction,
// scoring, and parameter tuning over the shared volume container.

#include "CLI11.hpp"

#include "spectune/errors.hpp"
#include "spectune/pipeline.hpp"
#include "spectune/volume_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace spectune;

std::string fmt(const char* format, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, format, value);
    return buffer;
}

std::string f6(double value) { return fmt("%.6f", value); }

// Sidecar metadata rides next to the binary container as <path>.meta.
std::string meta_path(const std::string& data_path) { return data_path + ".meta"; }

std::map<std::string, std::string> read_meta_if_present(const std::string& data_path) {
    std::ifstream probe(meta_path(data_path));
    if (!probe)
        return {};
    return read_config(meta_path(data_path));
}

void require_kind(const std::map<std::string, std::string>& meta,
                  const std::string& path, const std::string& expected) {
    const auto it = meta.find("kind");
    if (it != meta.end() && it->second != expected)
        throw input_error(path + ": expected a " + expected + " file, sidecar says '" +
                          it->second + "'");
}

int parse_int(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw input_error("config: " + key + ": expected an integer, got '" + text + "'");
    }
    if (used != text.size())
        throw input_error("config: " + key + ": expected an integer, got '" + text + "'");
    return value;
}

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw input_error("config: " + key + ": expected a number, got '" + text + "'");
    }
    if (used != text.size())
        throw input_error("config: " + key + ": expected a number, got '" + text + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1")
        return true;
    if (text == "false" || text == "0")
        return false;
    throw input_error("config: " + key + ": expected true or false, got '" + text + "'");
}

BetaKind parse_schedule(const std::string& name) {
    if (name == "constant")
        return BetaKind::Constant;
    if (name == "increasing")
        return BetaKind::Increasing;
    if (name == "decreasing")
        return BetaKind::Decreasing;
    throw input_error("schedule must be constant, increasing, or decreasing, got '" +
                      name + "'");
}

KernelFamily parse_kernel(const std::string& name) {
    if (name == "gaussian")
        return KernelFamily::Gaussian;
    if (name == "matern")
        return KernelFamily::Matern;
    throw input_error("kernel must be gaussian or matern, got '" + name + "'");
}

Points parse_init(const std::string& name) {
    if (name == "empty")
        return Points(0, 2);
    if (name == "single" || name == "four" || name == "nine")
        return init_preset(name);
    throw input_error("init must be single, four, nine, or empty, got '" + name + "'");
}

// Reconstruction size: explicit flag first, sidecar second.
int resolve_size(int flag_size, const std::map<std::string, std::string>& meta,
                 const std::string& path) {
    if (flag_size > 0)
        return flag_size;
    const auto it = meta.find("size");
    if (it != meta.end())
        return parse_int("size", it->second);
    throw input_error(path + ": reconstruction size unknown; pass --size or keep the "
                            "sidecar written by the radon step");
}

void add_noise(GrayImage& image, std::mt19937& rng, double sigma) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (Eigen::Index row = 0; row < image.rows(); ++row)
        for (Eigen::Index col = 0; col < image.cols(); ++col)
            image(row, col) += gauss(rng);
}

std::string landscape_csv(const GridOracleResult& oracle) {
    std::string text = "rho,omega0,pique\n";
    for (Eigen::Index i = 0; i < oracle.rho_axis.size(); ++i)
        for (Eigen::Index j = 0; j < oracle.omega_axis.size(); ++j)
            text += f6(oracle.rho_axis(i)) + "," + f6(oracle.omega_axis(j)) + "," +
                    f6(-oracle.values(i, j)) + "\n";
    return text;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw io_error(path + ": cannot open for writing", 0);
    out << text;
    if (!out)
        throw io_error(path + ": write failed", 0);
}

// ----- phantom ---------------------------------------------------------------

struct PhantomOptions {
    std::string kind;
    int size = 0;
    int slices = 1;
    double noise = 0.0;
    unsigned seed = 0;
    std::string out;
};

void run_phantom(const PhantomOptions& opt) {
    if (opt.slices < 1)
        throw input_error("phantom: slices must be positive");
    if (opt.noise < 0.0)
        throw input_error("phantom: noise must be nonnegative");

    Volume volume;
    if (opt.kind == "shepp-logan") {
        const GrayImage slice = shepp_logan(opt.size);
        volume.slices.assign(static_cast<std::size_t>(opt.slices), slice);
    } else if (opt.kind == "spheres") {
        volume = jaszczak_phantom(opt.size, opt.slices);
    } else {
        throw input_error("phantom: kind must be shepp-logan or spheres");
    }
    if (opt.noise > 0.0) {
        std::mt19937 rng(opt.seed);
        for (GrayImage& slice : volume.slices)
            add_noise(slice, rng, opt.noise);
    }
    write_volume(opt.out, volume);
    write_config(meta_path(opt.out), {{"kind", "volume"},
                                      {"source", opt.kind},
                                      {"size", std::to_string(opt.size)},
                                      {"slices", std::to_string(opt.slices)}});
    std::cout << "wrote " << opt.out << " (" << volume.nx() << "x" << volume.ny()
              << "x" << volume.nz() << ")\n";
}

// ----- radon -----------------------------------------------------------------

struct RadonOptions {
    std::string in;
    int angles = 0;
    double noise_frac = 0.0;
    unsigned seed = 0;
    std::string out;
};

void run_radon(const RadonOptions& opt) {
    if (opt.noise_frac < 0.0)
        throw input_error("radon: noise-frac must be nonnegative");
    require_kind(read_meta_if_present(opt.in), opt.in, "volume");

    const Volume volume = read_volume(opt.in);
    std::vector<Sinogram> sinos;
    sinos.reserve(volume.slices.size());
    for (const GrayImage& slice : volume.slices)
        sinos.push_back(radon(slice, opt.angles));

    if (opt.noise_frac > 0.0) {
        double peak = 0.0;
        for (const Sinogram& sino : sinos)
            peak = std::max(peak, sino.data.cwiseAbs().maxCoeff());
        std::mt19937 rng(opt.seed);
        for (Sinogram& sino : sinos)
            add_noise(sino.data, rng, opt.noise_frac * peak);
    }
    write_sinograms(opt.out, sinos);
    write_config(meta_path(opt.out),
                 {{"kind", "sinogram"},
                  {"size", std::to_string(volume.nx())},
                  {"angles", std::to_string(opt.angles)},
                  {"offsets", std::to_string(sinos.front().offsets.size())},
                  {"slices", std::to_string(volume.nz())}});
    std::cout << "wrote " << opt.out << " (" << sinos.front().offsets.size()
              << " offsets x " << opt.angles << " angles x " << volume.nz()
              << " slices)\n";
}

// ----- fbp -------------------------------------------------------------------

struct FbpOptions {
    std::string in;
    double rho = 0.0;
    double omega0 = 0.0;
    int size = 0;
    std::string out;
};

void run_fbp(const FbpOptions& opt) {
    const auto meta = read_meta_if_present(opt.in);
    require_kind(meta, opt.in, "sinogram");
    const int size = resolve_size(opt.size, meta, opt.in);

    FilterParams params;
    params.rho = opt.rho;
    params.omega0 = opt.omega0;
    validate(params);

    const std::vector<Sinogram> sinos = read_sinograms(opt.in);
    const Volume recon = fbp_volume(sinos, params, size);
    write_volume(opt.out, recon);
    write_config(meta_path(opt.out), {{"kind", "volume"},
                                      {"source", "fbp"},
                                      {"size", std::to_string(size)},
                                      {"rho", f6(params.rho)},
                                      {"omega0", f6(params.omega0)}});
    std::cout << "wrote " << opt.out << " (" << size << "x" << size << "x"
              << recon.nz() << ")\n";
}

// ----- pique -----------------------------------------------------------------

struct PiqueOptions {
    std::string in;
    std::string csv;
};

void run_pique(const PiqueOptions& opt) {
    require_kind(read_meta_if_present(opt.in), opt.in, "volume");
    const Volume volume = read_volume(opt.in);

    std::string text = "slice,pique\n";
    double sum = 0.0;
    for (std::size_t z = 0; z < volume.slices.size(); ++z) {
        const double score = pique_score(volume.slices[z]);
        sum += score;
        text += std::to_string(z) + "," + f6(score) + "\n";
    }
    text += "mean," + f6(sum / static_cast<double>(volume.slices.size())) + "\n";

    std::cout << text;
    if (!opt.csv.empty())
        write_text(opt.csv, text);
}

// ----- export ----------------------------------------------------------------

struct ExportOptions {
    std::string in;
    int slice = 0;
    std::string out;
};

void run_export(const ExportOptions& opt) {
    const Volume volume = read_volume(opt.in);
    if (opt.slice < 0 || opt.slice >= static_cast<int>(volume.slices.size()))
        throw input_error("export: slice " + std::to_string(opt.slice) +
                          " out of range, volume has " +
                          std::to_string(volume.slices.size()) + " slices");
    write_pgm(opt.out, volume.slices[static_cast<std::size_t>(opt.slice)]);
    std::cout << "wrote " << opt.out << "\n";
}

// ----- grid ------------------------------------------------------------------

struct GridOptions {
    std::string in;
    int coarse = 15;
    int size = 0;
    std::string out;
};

void run_grid(const GridOptions& opt) {
    const auto meta = read_meta_if_present(opt.in);
    require_kind(meta, opt.in, "sinogram");
    const int size = resolve_size(opt.size, meta, opt.in);

    ObjectiveContext ctx;
    ctx.sinograms = read_sinograms(opt.in);
    ctx.reconstruction_size = size;
    ctx.quantize_float32 = true;

    const GridOracleResult oracle = grid_oracle(ctx, opt.coarse);
    write_text(opt.out, landscape_csv(oracle));
    if (!oracle.complete)
        throw input_error("grid: sweep aborted, partial landscape written to " + opt.out);
    std::cout << "wrote " << opt.out << "\n"
              << "best_rho=" << f6(oracle.best.rho) << "\n"
              << "best_omega0=" << f6(oracle.best.omega0) << "\n"
              << "best_pique=" << f6(-oracle.best_value) << "\n";
}

// ----- tune ------------------------------------------------------------------

struct TuneOptions {
    std::string in;
    std::string out_dir;
    std::string config;
    std::string schedule = "increasing";
    std::string init = "single";
    std::string kernel = "matern";
    double lambda = 0.9;
    double epsilon = 0.1;
    int budget = 20;
    int grid = 1000;
    int oracle = 0;
    int size = 0;
    bool no_export_recons = false;
};

// Config file keys mirror the long flags; explicit flags win.
void apply_config_file(TuneOptions& opt) {
    const auto entries = read_config(opt.config);
    for (const auto& [key, value] : entries) {
        if (key == "schedule")
            opt.schedule = value;
        else if (key == "init")
            opt.init = value;
        else if (key == "kernel")
            opt.kernel = value;
        else if (key == "lambda")
            opt.lambda = parse_double(key, value);
        else if (key == "epsilon")
            opt.epsilon = parse_double(key, value);
        else if (key == "budget")
            opt.budget = parse_int(key, value);
        else if (key == "grid")
            opt.grid = parse_int(key, value);
        else if (key == "oracle")
            opt.oracle = parse_int(key, value);
        else if (key == "size")
            opt.size = parse_int(key, value);
        else if (key == "export_recons")
            opt.no_export_recons = !parse_bool(key, value);
        else
            throw input_error(opt.config + ": unknown key '" + key + "'");
    }
}

void run_tune(const TuneOptions& opt) {
    // Assemble and validate the whole optimizer configuration before touching
    // the projection data, so configuration mistakes never cost a reconstruction.
    BoConfig config;
    config.kernel = Kernel(parse_kernel(opt.kernel), opt.epsilon);
    config.schedule.kind = parse_schedule(opt.schedule);
    config.schedule.lambda = opt.lambda;
    config.init_set = parse_init(opt.init);
    config.budget = opt.budget;
    if (opt.grid < 2)
        throw input_error("tune: grid must have at least 2 points per axis");
    const GridDomain domain = GridDomain::make(opt.grid);
    config.candidate_grid = candidate_matrix(domain);
    // Half the cell diagonal: every in-domain init point snaps to some node.
    const double rho_step = domain.rho_axis(1) - domain.rho_axis(0);
    const double omega_step = domain.omega_axis(1) - domain.omega_axis(0);
    config.snap_tolerance = 0.5 * std::hypot(rho_step, omega_step);
    validate(config);
    if (opt.oracle != 0 && opt.oracle < 2)
        throw input_error("tune: oracle grid must have at least 2 points per axis");

    const auto meta = read_meta_if_present(opt.in);
    require_kind(meta, opt.in, "sinogram");
    const int size = resolve_size(opt.size, meta, opt.in);

    ObjectiveContext ctx;
    ctx.sinograms = read_sinograms(opt.in);
    ctx.reconstruction_size = size;
    ctx.quantize_float32 = true;

    std::filesystem::create_directories(opt.out_dir);
    const auto out_path = [&](const std::string& name) {
        return (std::filesystem::path(opt.out_dir) / name).string();
    };

    GridOracleResult oracle;
    if (opt.oracle > 0) {
        oracle = grid_oracle(ctx, opt.oracle);
        write_text(out_path("landscape.csv"), landscape_csv(oracle));
        if (!oracle.complete)
            throw input_error("tune: oracle sweep aborted, partial landscape written");
    }

    const TuningReport report = opt.oracle > 0 ? tune(ctx, config, oracle, opt.init)
                                               : tune(ctx, config, opt.init);

    std::string trace = "step,rho,omega0,pique,beta_m,schedule,init_preset\n";
    for (const TraceRow& row : report.trace)
        trace += std::to_string(row.observation) + "," + f6(row.rho) + "," +
                 f6(row.omega0) + "," + f6(row.pique) + "," + f6(row.beta) + "," +
                 report.schedule + "," + report.init_name + "\n";
    write_text(out_path("trace.csv"), trace);

    std::string summary;
    summary += "best_rho=" + f6(report.best_params.rho) + "\n";
    summary += "best_omega0=" + f6(report.best_params.omega0) + "\n";
    summary += "best_pique=" + f6(report.best_pique) + "\n";
    summary += "wall_seconds=" + fmt("%.3f", report.wall_seconds) + "\n";
    summary += "schedule=" + report.schedule + "\n";
    summary += "init_preset=" + report.init_name + "\n";
    summary += "budget=" + std::to_string(opt.budget) + "\n";
    summary += "evaluations=" + std::to_string(report.trace.size()) + "\n";
    summary += "reconstructions=" + std::to_string(ctx.reconstructions) + "\n";
    if (report.has_regret) {
        summary += "oracle_best_pique=" + f6(-oracle.best_value) + "\n";
        summary += "final_simple_regret=" + f6(report.simple_regret_curve.back()) + "\n";
        summary += "cumulative_regret=" + f6(report.cumulative_regret) + "\n";
    }
    write_text(out_path("summary.txt"), summary);

    if (!opt.no_export_recons) {
        for (const TraceRow& row : report.trace) {
            FilterParams params;
            params.rho = row.rho;
            params.omega0 = row.omega0;
            char name[32];
            std::snprintf(name, sizeof name, "recon_step_%02d.svol", row.observation);
            write_volume(out_path(name), fbp_volume(ctx.sinograms, params, size));
        }
    }

    std::cout << "best_rho=" << f6(report.best_params.rho) << "\n"
              << "best_omega0=" << f6(report.best_params.omega0) << "\n"
              << "best_pique=" << f6(report.best_pique) << "\n"
              << "wall_seconds=" << fmt("%.3f", report.wall_seconds) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tomographic reconstruction and filter parameter tuning"};
    app.require_subcommand(1);

    PhantomOptions phantom_opt;
    CLI::App* phantom = app.add_subcommand("phantom", "Generate a test volume");
    phantom->add_option("--kind", phantom_opt.kind, "shepp-logan or spheres")->required();
    phantom->add_option("--size", phantom_opt.size, "slice width in pixels")->required();
    phantom->add_option("--slices", phantom_opt.slices, "number of z slices");
    phantom->add_option("--noise", phantom_opt.noise, "additive Gaussian sigma");
    phantom->add_option("--seed", phantom_opt.seed, "noise seed");
    phantom->add_option("--out", phantom_opt.out, "output volume file")->required();

    RadonOptions radon_opt;
    CLI::App* radon_cmd = app.add_subcommand("radon", "Project a volume to sinograms");
    radon_cmd->add_option("--in", radon_opt.in, "input volume file")->required();
    radon_cmd->add_option("--angles", radon_opt.angles, "number of projection angles")
        ->required();
    radon_cmd->add_option("--noise-frac", radon_opt.noise_frac,
                          "Gaussian sigma as a fraction of the sinogram peak");
    radon_cmd->add_option("--seed", radon_opt.seed, "noise seed");
    radon_cmd->add_option("--out", radon_opt.out, "output sinogram file")->required();

    FbpOptions fbp_opt;
    CLI::App* fbp_cmd = app.add_subcommand("fbp", "Filtered back-projection");
    fbp_cmd->add_option("--in", fbp_opt.in, "input sinogram file")->required();
    fbp_cmd->add_option("--rho", fbp_opt.rho, "filter order parameter")->required();
    fbp_cmd->add_option("--omega0", fbp_opt.omega0, "filter cutoff parameter")->required();
    fbp_cmd->add_option("--size", fbp_opt.size, "reconstruction size (default: sidecar)");
    fbp_cmd->add_option("--out", fbp_opt.out, "output volume file")->required();

    PiqueOptions pique_opt;
    CLI::App* pique_cmd = app.add_subcommand("pique", "Score a volume slice by slice");
    pique_cmd->add_option("--in", pique_opt.in, "input volume file")->required();
    pique_cmd->add_option("--csv", pique_opt.csv, "also write the scores to this file");

    ExportOptions export_opt;
    CLI::App* export_cmd = app.add_subcommand("export", "Write one slice as binary PGM");
    export_cmd->add_option("--in", export_opt.in, "input volume file")->required();
    export_cmd->add_option("--slice", export_opt.slice, "slice index");
    export_cmd->add_option("--out", export_opt.out, "output PGM file")->required();

    GridOptions grid_opt;
    CLI::App* grid_cmd = app.add_subcommand("grid", "Exhaustive coarse landscape sweep");
    grid_cmd->add_option("--in", grid_opt.in, "input sinogram file")->required();
    grid_cmd->add_option("--coarse", grid_opt.coarse, "points per axis");
    grid_cmd->add_option("--size", grid_opt.size, "reconstruction size (default: sidecar)");
    grid_cmd->add_option("--out", grid_opt.out, "output landscape csv")->required();

    TuneOptions tune_opt;
    CLI::App* tune_cmd = app.add_subcommand("tune", "Optimize the filter parameters");
    tune_cmd->add_option("--in", tune_opt.in, "input sinogram file")->required();
    tune_cmd->add_option("--out-dir", tune_opt.out_dir, "output directory")->required();
    tune_cmd->add_option("--config", tune_opt.config, "key=value settings file");
    tune_cmd->add_option("--schedule", tune_opt.schedule,
                         "constant, increasing, or decreasing");
    tune_cmd->add_option("--init", tune_opt.init, "single, four, nine, or empty");
    tune_cmd->add_option("--kernel", tune_opt.kernel, "gaussian or matern");
    tune_cmd->add_option("--lambda", tune_opt.lambda, "decay of the decreasing schedule");
    tune_cmd->add_option("--epsilon", tune_opt.epsilon, "kernel shape parameter");
    tune_cmd->add_option("--budget", tune_opt.budget, "total objective evaluations");
    tune_cmd->add_option("--grid", tune_opt.grid, "candidate grid points per axis");
    tune_cmd->add_option("--oracle", tune_opt.oracle,
                         "coarse oracle points per axis (0 disables)");
    tune_cmd->add_option("--size", tune_opt.size, "reconstruction size (default: sidecar)");
    tune_cmd->add_flag("--no-export-recons", tune_opt.no_export_recons,
                       "skip the per-step reconstruction volumes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*tune_cmd) {
            if (tune_cmd->count("--config")) {
                // Flags win over the file: stash flag values, load the file,
                // then re-apply every flag that was given explicitly.
                const TuneOptions from_flags = tune_opt;
                apply_config_file(tune_opt);
                if (tune_cmd->count("--schedule"))
                    tune_opt.schedule = from_flags.schedule;
                if (tune_cmd->count("--init"))
                    tune_opt.init = from_flags.init;
                if (tune_cmd->count("--kernel"))
                    tune_opt.kernel = from_flags.kernel;
                if (tune_cmd->count("--lambda"))
                    tune_opt.lambda = from_flags.lambda;
                if (tune_cmd->count("--epsilon"))
                    tune_opt.epsilon = from_flags.epsilon;
                if (tune_cmd->count("--budget"))
                    tune_opt.budget = from_flags.budget;
                if (tune_cmd->count("--grid"))
                    tune_opt.grid = from_flags.grid;
                if (tune_cmd->count("--oracle"))
                    tune_opt.oracle = from_flags.oracle;
                if (tune_cmd->count("--size"))
                    tune_opt.size = from_flags.size;
                if (tune_cmd->count("--no-export-recons"))
                    tune_opt.no_export_recons = from_flags.no_export_recons;
            }
            run_tune(tune_opt);
        } else if (*phantom) {
            run_phantom(phantom_opt);
        } else if (*radon_cmd) {
            run_radon(radon_opt);
        } else if (*fbp_cmd) {
            run_fbp(fbp_opt);
        } else if (*pique_cmd) {
            run_pique(pique_opt);
        } else if (*export_cmd) {
            run_export(export_opt);
        } else if (*grid_cmd) {
            run_grid(grid_opt);
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const conditioning_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        // input_error, state_error, evaluation_error, and anything else that
        // boils down to a bad request.
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
