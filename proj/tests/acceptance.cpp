// acceptance.cpp — end-to-end acceptance suite. Runs each criterion at its
// pinned tolerance and prints one pass/fail line per criterion; exits nonzero
// if any fail. An optional list of criterion numbers selects a subset:
//
//   ./acceptance          # run all ten
//   ./acceptance 3 7      # run criteria 3 and 7

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "djcm/analytic.hpp"
#include "djcm/io.hpp"
#include "djcm/model.hpp"
#include "djcm/oracle.hpp"

namespace {

using namespace djcm;
namespace orc = djcm::oracle;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string sci(double v) { return io::format_sci(v); }

ModelParams paper_set() {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = 0.7;
    p.xi = 0.2;
    return validate_params(p);
}

ModelParams detuned_params(double g, double zeta, double delta) {
    ModelParams p;
    p.omega_c = 1.0 + std::max(0.0, -delta);
    p.omega_eg = p.omega_c + delta;
    p.g = g;
    p.zeta = zeta;
    p.xi = 0.0;
    return validate_params(p);
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(
        std::max(1u, std::thread::hardware_concurrency()), count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
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

// 1. inversion_* at t = 0 equals 1 within 1e-10 over 200 random valid sets
Outcome criterion_t0_normalization() {
    std::mt19937 rng(20250808);
    std::uniform_real_distribution<double> freq(0.1, 2.5);
    std::uniform_real_distribution<double> g_dist(0.1, 3.0);
    std::uniform_real_distribution<double> zeta_dist(0.0, 3.0);
    std::uniform_real_distribution<double> xi_dist(0.0, 1.0);
    std::uniform_real_distribution<double> nbar_dist(0.0, 20.0);
    std::uniform_int_distribution<int> fock_dist(0, 30);

    TruncationPolicy policy;
    policy.max_terms = 16384;  // covers alpha up to zeta/g = 30

    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        ModelParams p;
        p.omega_c = freq(rng);
        p.omega_eg = freq(rng);
        p.g = g_dist(rng);
        p.zeta = zeta_dist(rng);
        p.xi = xi_dist(rng);
        const ModelParams v = validate_params(p);
        if (trial % 2 == 0) {
            const double n_bar = nbar_dist(rng);
            worst = std::max(
                worst,
                std::abs(inversion_thermal(v, n_bar, 0.0, policy) - 1.0));
            worst = std::max(
                worst,
                std::abs(inversion_undriven(v, n_bar, 0.0, policy) - 1.0));
        } else {
            const int k = fock_dist(rng);
            worst = std::max(
                worst, std::abs(inversion_fock(v, k, 0.0, policy) - 1.0));
        }
    }
    return {worst <= 1e-10, "max |<sz>(0) - 1| = " + sci(worst)};
}

// 2. inversion_thermal(alpha = 0) vs inversion_undriven, 1e-12 sup-norm
Outcome criterion_alpha_zero_reduction() {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    const ModelParams v = validate_params(p);
    const std::vector<double> grid = io::linspace(0.0, 50.0, 501);
    double worst = 0.0;
    for (double n_bar : {0.0, 0.1, 4.0, 15.0}) {
        for (double t : grid) {
            worst = std::max(worst, std::abs(inversion_thermal(v, n_bar, t) -
                                             inversion_undriven(v, n_bar, t)));
        }
    }
    return {worst <= 1e-12, "sup |driven(a=0) - undriven| = " + sci(worst)};
}

// 3. lineshape_fock(g=1, alpha=0, k, d) == d^2/(d^2 + 4(k+1)) within 1e-12
Outcome criterion_vacuum_fock_lineshape() {
    const std::vector<double> grid = io::linspace(0.0, 15.0, 101);
    double worst = 0.0;
    for (int k = 0; k <= 10; ++k) {
        for (double delta : grid) {
            const double closed =
                delta * delta /
                (delta * delta + 4.0 * static_cast<double>(k + 1));
            worst = std::max(
                worst, std::abs(lineshape_fock(1.0, 0.0, k, delta) - closed));
        }
    }
    return {worst <= 1e-12, "max deviation from closed form = " + sci(worst)};
}

// 4. W(d) = W(-d) within 1e-14 and 0 <= W < 1 across field specs and alphas
Outcome criterion_symmetry_and_bounds() {
    const std::vector<double> grid = io::linspace(-15.0, 15.0, 121);
    const std::vector<FieldSpec> fields = {
        FieldSpec::thermal(0.1), FieldSpec::thermal(4.0),
        FieldSpec::thermal(15.0), FieldSpec::fock(0),
        FieldSpec::fock(10),     FieldSpec::fock(20)};
    double worst_asym = 0.0;
    bool bounds_ok = true;
    for (double alpha : {0.0, 0.7, 2.0}) {
        for (const FieldSpec& field : fields) {
            const LineshapeCurve c = sweep_lineshape(field, 1.0, alpha, grid);
            const std::size_t n = c.values.size();
            for (std::size_t i = 0; i < n; ++i) {
                bounds_ok = bounds_ok && c.values[i] >= 0.0 &&
                            c.values[i] < 1.0;
                worst_asym = std::max(
                    worst_asym,
                    std::abs(c.values[i] - c.values[n - 1 - i]));
            }
        }
    }
    return {worst_asym <= 1e-14 && bounds_ok,
            "max |W(d) - W(-d)| = " + sci(worst_asym) +
                (bounds_ok ? ", bounds ok" : ", BOUNDS VIOLATED")};
}

// 5. displaced_number_overlap vs |displacement_matrix entry|^2, 1e-10
Outcome criterion_specfun_cross_oracle() {
    double worst = 0.0;
    for (double alpha : {0.7, 2.0}) {
        const orc::OperatorMatrix d = orc::displacement_matrix(alpha, 120);
        for (long m = 0; m <= 40; ++m) {
            for (long k = 0; k <= 40; ++k) {
                worst = std::max(
                    worst, std::abs(std::norm(d(m, k)) -
                                    displaced_number_overlap(m, k, alpha)));
            }
        }
    }
    return {worst <= 1e-10, "max |matrix - kernel| = " + sci(worst)};
}

// 6. evolve_lab vs evolve_transformed <sigma_z>, < 1e-6 after convergence
Outcome criterion_transformation_chain() {
    const ModelParams p = paper_set();
    const std::vector<double> grid = io::linspace(0.0, 20.0, 201);
    double worst = 0.0;
    std::string detail;
    for (int k : {0, 3}) {
        const int N = orc::auto_cutoff(FieldSpec::fock(k), derive(p).alpha);
        const auto initial = orc::QuantumStateVector::fock_excited(k, N);
        const auto exact = orc::evolve_transformed(p, initial, grid);
        std::vector<double> exact_sz(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            exact_sz[i] = orc::sigma_z_expectation(exact[i]);
        }
        orc::EvolveOptions opt;
        double diff = 1.0;
        for (opt.max_phase_per_step = 0.05; opt.max_phase_per_step > 0.003;
             opt.max_phase_per_step *= 0.5) {
            const auto lab = orc::evolve_lab(p, initial, grid, opt);
            diff = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                diff = std::max(diff,
                                std::abs(orc::sigma_z_expectation(lab[i]) -
                                         exact_sz[i]));
            }
            if (diff < 1e-6) {
                break;
            }
        }
        worst = std::max(worst, diff);
        detail += (detail.empty() ? "" : ", ") + std::string("|k=") +
                  std::to_string(k) + "> diff " + sci(diff);
    }
    return {worst < 1e-6, detail};
}

// 7. analytic Eq.-of-motion trace vs numeric trace on the paper set, < 1e-5;
//    driven oscillation amplitude at n_bar = 0.1 below the undriven one
Outcome criterion_fig2_reproduction() {
    const ModelParams p = paper_set();
    const std::vector<double> grid = io::linspace(0.0, 20.0, 2001);
    double worst = 0.0;
    for (double n_bar : {0.1, 4.0}) {
        const FieldSpec field = FieldSpec::thermal(n_bar);
        const InversionSeries analytic = inversion_series(p, field, grid);
        const int N = orc::auto_cutoff(field, derive(p).alpha);
        const InversionSeries numeric =
            orc::inversion_numeric(p, field, grid, N);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            worst = std::max(
                worst, std::abs(analytic.values[i] - numeric.values[i]));
        }
    }

    ModelParams bare = p;
    bare.zeta = 0.0;
    bare.xi = 0.0;
    bare.omega_0 = std::numeric_limits<double>::quiet_NaN();
    bare = validate_params(bare);
    const auto amplitude = [&](const ModelParams& params) {
        const InversionSeries s =
            inversion_series(params, FieldSpec::thermal(0.1), grid);
        const auto [lo, hi] =
            std::minmax_element(s.values.begin(), s.values.end());
        return *hi - *lo;
    };
    const double amp_driven = amplitude(p);
    const double amp_undriven = amplitude(bare);
    const bool damped = amp_driven < amp_undriven;
    return {worst < 1e-5 && damped,
            "sup |analytic - numeric| = " + sci(worst) + ", amplitude " +
                sci(amp_driven) + " (driven) < " + sci(amp_undriven) +
                " (undriven): " + (damped ? "yes" : "NO")};
}

// 8. analytic lineshapes vs numeric time averages (T = 2000/g) within 5e-3;
//    monotone thermal ordering at delta = 5
Outcome criterion_fig3_reproduction() {
    const double g = 1.0;
    const double window = 2000.0;
    const std::vector<double> avg_grid = io::linspace(0.0, window, 200000);
    const std::vector<double> deltas = {0.5, 2.0, 5.0, 10.0};
    const std::vector<double> nbars = {0.1, 4.0};
    const std::vector<double> alphas = {0.0, 0.7};

    struct Scenario {
        double delta, n_bar, alpha;
    };
    std::vector<Scenario> scenarios;
    for (double alpha : alphas) {
        for (double n_bar : nbars) {
            for (double delta : deltas) {
                scenarios.push_back({delta, n_bar, alpha});
            }
        }
    }

    TruncationPolicy oracle_policy;
    oracle_policy.epsilon = 1e-9;  // mixture-tail bias far below 5e-3

    std::vector<double> deviations(scenarios.size(), 0.0);
    parallel_for(scenarios.size(), [&](std::size_t i) {
        const Scenario& sc = scenarios[i];
        const double analytic =
            lineshape_thermal(g, sc.alpha, sc.n_bar, sc.delta);
        const ModelParams p = detuned_params(g, sc.alpha * g, sc.delta);
        const FieldSpec field = FieldSpec::thermal(sc.n_bar);
        const int N = orc::auto_cutoff(field, sc.alpha, oracle_policy);
        const InversionSeries series =
            orc::inversion_numeric(p, field, avg_grid, N, oracle_policy);
        const double numeric = orc::time_average_numeric(series, window);
        deviations[i] = std::abs(analytic - numeric);
    });
    const double worst =
        *std::max_element(deviations.begin(), deviations.end());

    bool ordered = true;
    for (double alpha : alphas) {
        const double w01 = lineshape_thermal(g, alpha, 0.1, 5.0);
        const double w4 = lineshape_thermal(g, alpha, 4.0, 5.0);
        const double w15 = lineshape_thermal(g, alpha, 15.0, 5.0);
        ordered = ordered && w01 > w4 && w4 > w15;
    }
    return {worst <= 5e-3 && ordered,
            "max |analytic - averaged| = " + sci(worst) +
                ", n_bar ordering at delta=5: " + (ordered ? "yes" : "NO")};
}

// 9. zeta sweep: zeta = 0 row equals the undriven curve to 1e-12; W at
//    delta = 3 non-increasing in zeta
Outcome criterion_fig5_edge() {
    const std::vector<double> grid = io::linspace(0.0, 15.0, 151);
    const std::size_t idx3 = 30;  // delta = 3.0
    const FieldSpec field = FieldSpec::thermal(1.0);
    double worst = 0.0;
    double prev = 2.0;
    bool monotone = true;
    for (double zeta : {0.0, 0.7, 2.0, 4.0, 6.0}) {
        const LineshapeCurve c = sweep_lineshape(field, 1.0, zeta, grid);
        if (zeta == 0.0) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                worst = std::max(
                    worst, std::abs(c.values[i] -
                                    lineshape_undriven(1.0, 1.0, grid[i])));
            }
        }
        monotone = monotone && c.values[idx3] <= prev;
        prev = c.values[idx3];
    }
    return {worst <= 1e-12 && monotone,
            "sup |zeta=0 - undriven| = " + sci(worst) +
                ", W(3) non-increasing in zeta: " + (monotone ? "yes" : "NO")};
}

// 10. identical CLI configs produce byte-identical files
Outcome criterion_determinism() {
    const fs::path dir =
        fs::temp_directory_path() / "djcm_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = DJCM_CLI_PATH;
    const auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    };
    const std::vector<std::string> commands = {
        "inversion --omega-c 0.4 --omega-eg 0.9 --g 1 --zeta 0.7 --xi 0.2 "
        "--nbar 0.1 --t-max 10 --samples 200",
        "lineshape --g 1 --zeta 0.7 --nbar 4 --delta 0:10:51",
        "surface --g 1 --nbar 1.0 --zeta-range 0:2:5 --delta 0:6:13",
        "lineshape --g 1 --zeta 0.7 --fock 10 --delta 0:10:51 --format json"};
    bool all_equal = true;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const fs::path a = dir / ("a" + std::to_string(i));
        const fs::path b = dir / ("b" + std::to_string(i));
        const std::string run_a =
            cli + " " + commands[i] + " --output " + a.string();
        const std::string run_b =
            cli + " " + commands[i] + " --output " + b.string();
        if (std::system(run_a.c_str()) != 0 ||
            std::system(run_b.c_str()) != 0) {
            fs::remove_all(dir);
            return {false, "CLI run failed for: " + commands[i]};
        }
        const std::string bytes_a = slurp(a);
        all_equal = all_equal && !bytes_a.empty() && bytes_a == slurp(b);
    }
    fs::remove_all(dir);
    return {all_equal, all_equal ? "4 command configs byte-identical"
                                 : "outputs differ between runs"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "t0-normalization", 5.0, criterion_t0_normalization},
        {2, "alpha-zero-reduction", 5.0, criterion_alpha_zero_reduction},
        {3, "vacuum-fock-lineshape", 1.0, criterion_vacuum_fock_lineshape},
        {4, "symmetry-and-bounds", 10.0, criterion_symmetry_and_bounds},
        {5, "specfun-cross-oracle", 10.0, criterion_specfun_cross_oracle},
        {6, "transformation-chain", 60.0, criterion_transformation_chain},
        {7, "fig2-inversion-traces", 120.0, criterion_fig2_reproduction},
        {8, "fig3-lineshape-averages", 600.0, criterion_fig3_reproduction},
        {9, "fig5-zeta-sweep-edge", 30.0, criterion_fig5_edge},
        {10, "cli-determinism", 60.0, criterion_determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.push_back(std::atoi(argv[i]));
    }

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) ==
                selected.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        const bool in_time = elapsed < c.limit_seconds;
        const bool pass = outcome.pass && in_time;
        all_pass = all_pass && pass;
        std::printf("[%s] %02d %-26s %7.2fs (limit %4.0fs)  %s%s\n",
                    pass ? "PASS" : "FAIL", c.id, c.name, elapsed,
                    c.limit_seconds, outcome.detail.c_str(),
                    in_time ? "" : "  [OVER TIME LIMIT]");
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
