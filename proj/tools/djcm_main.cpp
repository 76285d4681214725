// djcm — figure-data front end for the driven Jaynes-Cummings model.
//
//   djcm inversion  --omega-c 0.4 --omega-eg 0.9 --g 1 --zeta 0.7 --xi 0.2 \
//                   --nbar 0.1 --t-max 20 --samples 2000 --output fig2b.csv
//   djcm lineshape  --g 1 --zeta 0.7 --nbar 0.1,4,15 --delta 0:15:300 ...
//   djcm surface    --g 1 --zeta 0.7 --nbar-range 0:20:100 --delta 0:15:150 ...
//   djcm validate   --omega-c 0.4 --omega-eg 0.9 --g 1 --zeta 0.7 --xi 0.2 \
//                   --nbar 0.1 --t-max 20 --samples 2000
//
// Exit codes: 0 ok, 2 config/validation error, 3 numeric/truncation failure,
// 4 analytic/numeric deviation beyond --tol.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "djcm/analytic.hpp"
#include "djcm/io.hpp"
#include "djcm/model.hpp"
#include "djcm/oracle.hpp"
#include "djcm/version.hpp"

namespace {

using namespace djcm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitTolerance = 4;

// emitted value outside the bounds the engine guarantees
struct BoundsViolation : Error {
    using Error::Error;
};

struct CommonOptions {
    double omega_c = 0.4;
    double omega_eg = 0.9;
    double g = 1.0;
    double zeta = 0.0;
    double xi = 0.0;
    double omega_0 = std::numeric_limits<double>::quiet_NaN();

    std::string nbar_list;
    std::string fock_list;

    double epsilon = 1e-12;
    std::size_t max_terms = 4096;

    std::string t_grid_spec;  // assembled from --t-max/--samples
    double t_max = 0.0;
    std::size_t samples = 0;
    std::string delta_spec;

    bool oracle = false;
    int cutoff = 0;  // 0 = auto
    double tol = 0.0;  // 0 = per-command default

    std::string output;
    std::string format = "csv";
};

TruncationPolicy policy_of(const CommonOptions& opt) {
    TruncationPolicy policy;
    policy.epsilon = opt.epsilon;
    policy.max_terms = opt.max_terms;
    policy.validate();
    return policy;
}

ModelParams params_of(const CommonOptions& opt) {
    ModelParams p;
    p.omega_c = opt.omega_c;
    p.omega_eg = opt.omega_eg;
    p.g = opt.g;
    p.zeta = opt.zeta;
    p.xi = opt.xi;
    p.omega_0 = opt.omega_0;
    return validate_params(p);
}

// One FieldSpec per value of --nbar / --fock (exactly one list may be given;
// the default is the vacuum thermal field).
std::vector<FieldSpec> fields_of(const CommonOptions& opt) {
    if (!opt.nbar_list.empty() && !opt.fock_list.empty()) {
        throw Error("give either --nbar or --fock, not both");
    }
    std::vector<FieldSpec> fields;
    if (!opt.fock_list.empty()) {
        for (double v : io::parse_list(opt.fock_list)) {
            if (v < 0.0 || v != std::floor(v)) {
                throw Error("--fock values must be nonnegative integers");
            }
            fields.push_back(FieldSpec::fock(static_cast<int>(v)));
        }
    } else if (!opt.nbar_list.empty()) {
        for (double v : io::parse_list(opt.nbar_list)) {
            fields.push_back(FieldSpec::thermal(v));
        }
    } else {
        fields.push_back(FieldSpec::thermal(0.0));
    }
    return fields;
}

std::string field_suffix(const FieldSpec& field) {
    char buf[48];
    if (field.is_thermal()) {
        std::snprintf(buf, sizeof(buf), "_nbar%g", field.n_bar);
    } else {
        std::snprintf(buf, sizeof(buf), "_k%d", field.k);
    }
    return buf;
}

std::string suffixed_path(const std::string& path, const std::string& suffix) {
    const std::size_t slash = path.find_last_of('/');
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

void emit_table(const io::DataTable& table, const std::string& path,
                const std::string& format) {
    const auto write = [&](std::ostream& out) {
        if (format == "json") {
            io::write_json(table, out);
        } else {
            io::write_csv(table, out);
        }
    };
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open output file '" + path + "'");
    }
    write(out);
}

void add_param_meta(io::DataTable& table, const ModelParams& p) {
    table.add_meta("omega_c", p.omega_c);
    table.add_meta("omega_eg", p.omega_eg);
    table.add_meta("g", p.g);
    table.add_meta("zeta", p.zeta);
    table.add_meta("xi", p.xi);
    table.add_meta("omega_0", p.omega_0);
}

void add_policy_meta(io::DataTable& table, const TruncationPolicy& policy) {
    table.add_meta("epsilon", policy.epsilon);
    table.add_meta("max_terms", std::to_string(policy.max_terms));
}

void check_inversion_value(double v, double slack) {
    if (!(v >= -1.0 - slack) || !(v <= 1.0 + slack)) {
        throw BoundsViolation("emitted <sigma_z> = " + std::to_string(v) +
                              " outside [-1, 1]");
    }
}

void check_lineshape_value(double w, double slack) {
    if (!(w >= -slack) || !(w < 1.0 + slack)) {
        throw BoundsViolation("emitted W = " + std::to_string(w) +
                              " outside [0, 1)");
    }
}

// chunk-free parallel map over an index range; results land in caller arrays
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// Model parameters that realize a bare atom-cavity detuning delta with the
// requested drive strength: xi = 0 keeps the constriction trivial, so the
// transformed frame sees delta_c = 0 and delta_eg = delta.
ModelParams lineshape_oracle_params(double g, double zeta, double delta) {
    ModelParams p;
    p.omega_c = 1.0 + std::max(0.0, -delta);
    p.omega_eg = p.omega_c + delta;
    p.g = g;
    p.zeta = zeta;
    p.xi = 0.0;
    return validate_params(p);
}

// -------------------------------- inversion ---------------------------------

int cmd_inversion(const CommonOptions& opt) {
    const TruncationPolicy policy = policy_of(opt);
    const ModelParams params = params_of(opt);
    const std::vector<FieldSpec> fields = fields_of(opt);
    if (!(opt.t_max >= 0.0)) {
        throw Error("--t-max must be >= 0");
    }
    if (opt.samples < 1) {
        throw Error("--samples must be >= 1");
    }
    const std::vector<double> t_grid =
        io::linspace(0.0, opt.t_max, opt.samples);
    if (fields.size() > 1 && opt.output.empty()) {
        throw Error("multiple field values need --output for fan-out");
    }
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-5;

    int exit_code = kExitOk;
    for (const FieldSpec& field : fields) {
        const InversionSeries analytic =
            inversion_series(params, field, t_grid, policy);

        std::optional<InversionSeries> numeric;
        double deviation = 0.0;
        int cutoff = 0;
        if (opt.oracle) {
            const DerivedParams d = derive(params);
            cutoff = opt.cutoff > 0
                         ? opt.cutoff
                         : oracle::auto_cutoff(field, d.alpha, policy);
            numeric = oracle::inversion_numeric(params, field, t_grid, cutoff,
                                                policy);
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                deviation = std::max(
                    deviation,
                    std::abs(analytic.values[i] - numeric->values[i]));
            }
        }

        io::DataTable table;
        table.add_meta("generator", std::string("djcm ") + kVersion);
        table.add_meta("command", "inversion");
        add_param_meta(table, params);
        table.add_meta("field", field.label());
        add_policy_meta(table, policy);
        table.add_meta("t_max", opt.t_max);
        table.add_meta("samples", std::to_string(opt.samples));
        table.add_meta("truncation_terms",
                       std::to_string(analytic.truncation.terms_used));
        table.add_meta("truncation_tail", analytic.truncation.tail_bound);
        table.columns = {"t", "g_t", "sigma_z_analytic"};
        if (numeric) {
            table.add_meta("oracle_cutoff", std::to_string(cutoff));
            table.add_meta("oracle_leakage", numeric->leakage);
            table.add_meta("oracle_norm_drift", numeric->norm_drift);
            table.add_meta("oracle_deviation", deviation);
            table.columns.push_back("sigma_z_numeric");
        }
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            check_inversion_value(analytic.values[i], 0.0);
            std::vector<double> row = {t_grid[i], params.g * t_grid[i],
                                       analytic.values[i]};
            if (numeric) {
                check_inversion_value(numeric->values[i], 1e-6);
                row.push_back(numeric->values[i]);
            }
            table.rows.push_back(std::move(row));
        }

        const std::string path =
            fields.size() > 1 ? suffixed_path(opt.output, field_suffix(field))
                              : opt.output;
        emit_table(table, path, opt.format);
        if (numeric && deviation > tol) {
            std::cerr << "djcm inversion: analytic/numeric deviation "
                      << io::format_sci(deviation) << " exceeds tol "
                      << io::format_sci(tol) << "\n";
            exit_code = kExitTolerance;
        }
    }
    return exit_code;
}

// -------------------------------- lineshape ---------------------------------

int cmd_lineshape(const CommonOptions& opt) {
    const TruncationPolicy policy = policy_of(opt);
    if (!(opt.g > 0.0)) {
        throw NonPositiveCoupling("lineshape requires --g > 0");
    }
    if (opt.zeta < 0.0) {
        throw NegativeRate("--zeta must be >= 0");
    }
    const double alpha = opt.zeta / opt.g;
    const std::vector<FieldSpec> fields = fields_of(opt);
    if (opt.delta_spec.empty()) {
        throw Error("lineshape needs --delta start:stop:count");
    }
    const std::vector<double> deltas = io::parse_grid(opt.delta_spec);
    if (fields.size() > 1 && opt.output.empty()) {
        throw Error("multiple field values need --output for fan-out");
    }
    const double tol = opt.tol > 0.0 ? opt.tol : 5e-3;
    const double window = opt.t_max > 0.0 ? opt.t_max : 2000.0 / opt.g;
    const std::size_t avg_samples = opt.samples > 0 ? opt.samples : 200000;

    int exit_code = kExitOk;
    for (const FieldSpec& field : fields) {
        const LineshapeCurve curve =
            sweep_lineshape(field, opt.g, alpha, deltas, policy);

        std::vector<double> numeric;
        double deviation = 0.0;
        double leakage = 0.0;
        int cutoff = 0;
        if (opt.oracle) {
            cutoff = opt.cutoff > 0
                         ? opt.cutoff
                         : oracle::auto_cutoff(field, alpha, policy);
            numeric.assign(deltas.size(), 0.0);
            std::vector<double> leaks(deltas.size(), 0.0);
            const std::vector<double> avg_grid =
                io::linspace(0.0, window, avg_samples);
            parallel_for(deltas.size(), [&](std::size_t i) {
                const ModelParams p =
                    lineshape_oracle_params(opt.g, opt.zeta, deltas[i]);
                const InversionSeries series = oracle::inversion_numeric(
                    p, field, avg_grid, cutoff, policy);
                numeric[i] = oracle::time_average_numeric(series, window);
                leaks[i] = series.leakage;
            });
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                deviation =
                    std::max(deviation, std::abs(curve.values[i] - numeric[i]));
                leakage = std::max(leakage, leaks[i]);
            }
        }

        io::DataTable table;
        table.add_meta("generator", std::string("djcm ") + kVersion);
        table.add_meta("command", "lineshape");
        table.add_meta("g", opt.g);
        table.add_meta("zeta", opt.zeta);
        table.add_meta("alpha", alpha);
        table.add_meta("field", field.label());
        add_policy_meta(table, policy);
        table.add_meta("delta_grid", opt.delta_spec);
        table.add_meta("truncation_terms",
                       std::to_string(curve.truncation.terms_used));
        table.add_meta("truncation_tail", curve.truncation.tail_bound);
        table.columns = {"delta", "W_analytic"};
        if (opt.oracle) {
            table.add_meta("oracle_cutoff", std::to_string(cutoff));
            table.add_meta("oracle_window", window);
            table.add_meta("oracle_samples", std::to_string(avg_samples));
            table.add_meta("oracle_leakage", leakage);
            table.add_meta("oracle_deviation", deviation);
            table.columns.push_back("W_numeric");
        }
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            check_lineshape_value(curve.values[i], 0.0);
            std::vector<double> row = {deltas[i], curve.values[i]};
            if (opt.oracle) {
                check_lineshape_value(numeric[i], 1e-2);
                row.push_back(numeric[i]);
            }
            table.rows.push_back(std::move(row));
        }

        const std::string path =
            fields.size() > 1 ? suffixed_path(opt.output, field_suffix(field))
                              : opt.output;
        emit_table(table, path, opt.format);
        if (opt.oracle && deviation > tol) {
            std::cerr << "djcm lineshape: analytic/numeric deviation "
                      << io::format_sci(deviation) << " exceeds tol "
                      << io::format_sci(tol) << "\n";
            exit_code = kExitTolerance;
        }
    }
    return exit_code;
}

// --------------------------------- surface ----------------------------------

int cmd_surface(const CommonOptions& opt, const std::string& nbar_range,
                const std::string& zeta_range, double fixed_nbar) {
    const TruncationPolicy policy = policy_of(opt);
    if (!(opt.g > 0.0)) {
        throw NonPositiveCoupling("surface requires --g > 0");
    }
    if (nbar_range.empty() == zeta_range.empty()) {
        throw Error("surface needs exactly one of --nbar-range / --zeta-range");
    }
    if (opt.delta_spec.empty()) {
        throw Error("surface needs --delta start:stop:count");
    }
    const std::vector<double> deltas = io::parse_grid(opt.delta_spec);
    const bool sweep_nbar = !nbar_range.empty();
    const std::vector<double> axis =
        io::parse_grid(sweep_nbar ? nbar_range : zeta_range);

    std::vector<LineshapeCurve> curves(axis.size());
    parallel_for(axis.size(), [&](std::size_t i) {
        if (sweep_nbar) {
            const double alpha = opt.zeta / opt.g;
            curves[i] = sweep_lineshape(FieldSpec::thermal(axis[i]), opt.g,
                                        alpha, deltas, policy);
        } else {
            if (axis[i] < 0.0) {
                throw NegativeRate("--zeta-range values must be >= 0");
            }
            const double alpha = axis[i] / opt.g;
            curves[i] = sweep_lineshape(FieldSpec::thermal(fixed_nbar), opt.g,
                                        alpha, deltas, policy);
        }
    });

    io::DataTable table;
    table.add_meta("generator", std::string("djcm ") + kVersion);
    table.add_meta("command", "surface");
    table.add_meta("g", opt.g);
    if (sweep_nbar) {
        table.add_meta("zeta", opt.zeta);
        table.add_meta("axis", "n_bar");
        table.add_meta("nbar_range", nbar_range);
    } else {
        table.add_meta("n_bar", fixed_nbar);
        table.add_meta("axis", "zeta");
        table.add_meta("zeta_range", zeta_range);
    }
    add_policy_meta(table, policy);
    table.add_meta("delta_grid", opt.delta_spec);
    table.columns = {"delta", sweep_nbar ? "n_bar" : "zeta", "W_analytic"};
    for (std::size_t a = 0; a < axis.size(); ++a) {
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            check_lineshape_value(curves[a].values[i], 0.0);
            table.rows.push_back({deltas[i], axis[a], curves[a].values[i]});
        }
    }
    emit_table(table, opt.output, opt.format);
    return kExitOk;
}

// --------------------------------- validate ---------------------------------

int cmd_validate(const CommonOptions& opt) {
    const TruncationPolicy policy = policy_of(opt);
    const ModelParams params = params_of(opt);
    const std::vector<FieldSpec> fields = fields_of(opt);
    if (fields.size() != 1) {
        throw Error("validate takes a single --nbar or --fock value");
    }
    const FieldSpec field = fields.front();
    const DerivedParams d = derive(params);
    const bool lineshape_mode = !opt.delta_spec.empty();

    io::DataTable table;
    table.add_meta("generator", std::string("djcm ") + kVersion);
    table.add_meta("command", "validate");
    add_param_meta(table, params);
    table.add_meta("field", field.label());
    add_policy_meta(table, policy);

    double deviation = 0.0;
    double tol = opt.tol;
    TruncationReport truncation;
    double leakage = 0.0;
    double norm_drift = 0.0;
    int cutoff = opt.cutoff > 0 ? opt.cutoff
                                : oracle::auto_cutoff(field, d.alpha, policy);

    if (lineshape_mode) {
        if (tol <= 0.0) {
            tol = 5e-3;
        }
        const std::vector<double> deltas = io::parse_grid(opt.delta_spec);
        const double window = opt.t_max > 0.0 ? opt.t_max : 2000.0 / params.g;
        const std::size_t samples = opt.samples > 0 ? opt.samples : 200000;
        const LineshapeCurve curve =
            sweep_lineshape(field, params.g, d.alpha, deltas, policy);
        truncation = curve.truncation;
        std::vector<double> numeric(deltas.size(), 0.0);
        std::vector<double> leaks(deltas.size(), 0.0);
        const std::vector<double> avg_grid = io::linspace(0.0, window, samples);
        parallel_for(deltas.size(), [&](std::size_t i) {
            const ModelParams p =
                lineshape_oracle_params(params.g, params.zeta, deltas[i]);
            const InversionSeries series =
                oracle::inversion_numeric(p, field, avg_grid, cutoff, policy);
            numeric[i] = oracle::time_average_numeric(series, window);
            leaks[i] = series.leakage;
        });
        table.columns = {"delta", "W_analytic", "W_numeric"};
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            deviation =
                std::max(deviation, std::abs(curve.values[i] - numeric[i]));
            leakage = std::max(leakage, leaks[i]);
            table.rows.push_back({deltas[i], curve.values[i], numeric[i]});
        }
        table.add_meta("scenario", "lineshape");
        table.add_meta("oracle_window", window);
    } else {
        if (tol <= 0.0) {
            tol = 1e-5;
        }
        const double t_max = opt.t_max > 0.0 ? opt.t_max : 20.0;
        const std::size_t samples = opt.samples > 0 ? opt.samples : 2000;
        const std::vector<double> t_grid = io::linspace(0.0, t_max, samples);
        const InversionSeries analytic =
            inversion_series(params, field, t_grid, policy);
        truncation = analytic.truncation;
        const InversionSeries numeric =
            oracle::inversion_numeric(params, field, t_grid, cutoff, policy);
        leakage = numeric.leakage;
        norm_drift = numeric.norm_drift;
        table.columns = {"t", "sigma_z_analytic", "sigma_z_numeric"};
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            deviation = std::max(
                deviation, std::abs(analytic.values[i] - numeric.values[i]));
            table.rows.push_back(
                {t_grid[i], analytic.values[i], numeric.values[i]});
        }
        table.add_meta("scenario", "inversion");
        if (params.zeta == 0.0 && field.is_thermal()) {
            // without the drive the general path must collapse to the
            // undriven closed form
            double reduction = 0.0;
            for (std::size_t i = 0; i < t_grid.size(); ++i) {
                reduction = std::max(
                    reduction,
                    std::abs(analytic.values[i] -
                             inversion_undriven(params, field.n_bar,
                                                t_grid[i], policy)));
            }
            std::cout << "undriven_agreement: " << io::format_sci(reduction)
                      << "\n";
            table.add_meta("undriven_agreement", reduction);
        }
    }

    const bool pass = deviation <= tol;
    std::cout << "scenario: " << (lineshape_mode ? "lineshape" : "inversion")
              << " " << field.label() << "\n"
              << "cutoff: " << cutoff << "\n"
              << "sup_deviation: " << io::format_sci(deviation) << "\n"
              << "truncation_terms: " << truncation.terms_used << "\n"
              << "truncation_tail: " << io::format_sci(truncation.tail_bound)
              << "\n"
              << "leakage: " << io::format_sci(leakage) << "\n"
              << "norm_drift: " << io::format_sci(norm_drift) << "\n"
              << "tolerance: " << io::format_sci(tol) << "\n"
              << "result: " << (pass ? "PASS" : "FAIL") << "\n";

    if (!opt.output.empty()) {
        table.add_meta("oracle_cutoff", std::to_string(cutoff));
        table.add_meta("oracle_deviation", deviation);
        table.add_meta("oracle_leakage", leakage);
        table.add_meta("oracle_norm_drift", norm_drift);
        emit_table(table, opt.output, opt.format);
    }
    return pass ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven Jaynes-Cummings model: atomic inversion and "
                 "power-broadened lineshapes"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string nbar_range;
    std::string zeta_range;
    double fixed_nbar = 1.0;

    const auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--omega-c", opt.omega_c, "cavity frequency");
        cmd->add_option("--omega-eg", opt.omega_eg, "atomic transition frequency");
        cmd->add_option("--g", opt.g, "atom-cavity coupling");
        cmd->add_option("--zeta", opt.zeta, "classical-field-atom coupling");
        cmd->add_option("--xi", opt.xi, "classical-field-cavity coupling");
        cmd->add_option("--omega-0", opt.omega_0,
                        "drive frequency (consistency check only)");
    };
    const auto add_field_flags = [&](CLI::App* cmd) {
        cmd->add_option("--nbar", opt.nbar_list,
                        "thermal mean photon number(s), comma separated");
        cmd->add_option("--fock", opt.fock_list,
                        "Fock photon number(s), comma separated");
    };
    const auto add_policy_flags = [&](CLI::App* cmd) {
        cmd->add_option("--epsilon", opt.epsilon, "series tail tolerance");
        cmd->add_option("--max-terms", opt.max_terms, "series hard cap");
    };
    const auto add_output_flags = [&](CLI::App* cmd) {
        cmd->add_option("--output", opt.output, "output file (default stdout)");
        cmd->add_option("--format", opt.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };
    const auto add_oracle_flags = [&](CLI::App* cmd) {
        cmd->add_flag("--oracle", opt.oracle,
                      "add the numeric verification column");
        cmd->add_option("--cutoff", opt.cutoff, "oracle Fock cutoff (0 = auto)");
        cmd->add_option("--tol", opt.tol, "analytic/numeric tolerance");
    };

    CLI::App* inversion =
        app.add_subcommand("inversion", "atomic inversion <sigma_z>(t)");
    add_model_flags(inversion);
    add_field_flags(inversion);
    add_policy_flags(inversion);
    add_oracle_flags(inversion);
    add_output_flags(inversion);
    inversion->add_option("--t-max", opt.t_max, "trace end time")->required();
    inversion->add_option("--samples", opt.samples, "number of samples")
        ->default_val(2000);

    CLI::App* lineshape = app.add_subcommand(
        "lineshape", "time-averaged inversion W(delta) over a detuning grid");
    lineshape->add_option("--g", opt.g, "atom-cavity coupling")->required();
    lineshape->add_option("--zeta", opt.zeta, "classical-field-atom coupling");
    add_field_flags(lineshape);
    add_policy_flags(lineshape);
    add_oracle_flags(lineshape);
    add_output_flags(lineshape);
    lineshape->add_option("--delta", opt.delta_spec,
                          "detuning grid start:stop:count");
    lineshape->add_option("--t-max", opt.t_max,
                          "oracle averaging window (default 2000/g)");
    lineshape->add_option("--samples", opt.samples,
                          "oracle averaging samples (default 200000)");

    CLI::App* surface = app.add_subcommand(
        "surface", "W(delta) against a second axis (n_bar or zeta)");
    surface->add_option("--g", opt.g, "atom-cavity coupling")->required();
    surface->add_option("--zeta", opt.zeta,
                        "fixed drive coupling for the n_bar sweep");
    surface->add_option("--nbar", fixed_nbar,
                        "fixed mean photon number for the zeta sweep");
    surface->add_option("--nbar-range", nbar_range, "n_bar grid start:stop:count");
    surface->add_option("--zeta-range", zeta_range, "zeta grid start:stop:count");
    add_policy_flags(surface);
    add_output_flags(surface);
    surface->add_option("--delta", opt.delta_spec,
                        "detuning grid start:stop:count");

    CLI::App* validate = app.add_subcommand(
        "validate", "compare the closed forms against the numeric evolution");
    add_model_flags(validate);
    add_field_flags(validate);
    add_policy_flags(validate);
    add_oracle_flags(validate);
    add_output_flags(validate);
    validate->add_option("--t-max", opt.t_max,
                         "trace end time / averaging window");
    validate->add_option("--samples", opt.samples, "number of samples");
    validate->add_option("--delta", opt.delta_spec,
                         "detuning grid: validates lineshapes instead of the "
                         "inversion trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (inversion->parsed()) {
            return cmd_inversion(opt);
        }
        if (lineshape->parsed()) {
            return cmd_lineshape(opt);
        }
        if (surface->parsed()) {
            // zeta = 0.7 is the figure default for the n_bar sweep
            if (surface->count("--zeta") == 0) {
                opt.zeta = 0.7;
            }
            return cmd_surface(opt, nbar_range, zeta_range, fixed_nbar);
        }
        return cmd_validate(opt);
    } catch (const NonPositiveCoupling& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NegativeRate& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConstrictionViolated& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TruncationCapExceeded& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const CutoffTooSmall& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const NormDrift& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const LeakageExceeded& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const InsufficientSamples& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const BoundsViolation& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "djcm: " << e.what() << "\n";
        return kExitNumeric;
    }
}
