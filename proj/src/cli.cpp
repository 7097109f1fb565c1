#include "ddmet/cli.hpp"

#include "ddmet/ddcond.hpp"
#include "ddmet/ddt.hpp"
#include "ddmet/error.hpp"
#include "ddmet/oracle.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

namespace ddmet::cli {

namespace {

constexpr std::string_view kWhitespace = " \t\r";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(kWhitespace);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(kWhitespace);
    return s.substr(first, last - first + 1);
}

// Collects problems instead of stopping at the first one, so a single
// validate call reports everything wrong with a file.
class Diagnostics {
public:
    void add(std::size_t line, std::string field, std::string message) {
        items_.push_back({line, std::move(field), std::move(message)});
    }
    bool empty() const { return items_.empty(); }
    std::vector<Diagnostic> take() { return std::move(items_); }

private:
    std::vector<Diagnostic> items_;
};

std::optional<double> parse_double(std::string_view v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x)) return std::nullopt;
    return x;
}

std::optional<std::uint64_t> parse_unsigned(std::string_view v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) return std::nullopt;
    return x;
}

std::optional<Scenario> parse_scenario(std::string_view v) {
    static const std::map<std::string_view, Scenario> names{
        {"fig1", Scenario::Fig1},
        {"fig2", Scenario::Fig2},
        {"fig3", Scenario::Fig3},
        {"theorem-demo", Scenario::TheoremDemo},
        {"oracle-convergence", Scenario::OracleConvergence},
        {"custom", Scenario::Custom},
    };
    const auto it = names.find(v);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

using Setter = std::function<std::optional<std::string>(RunConfig&, std::string_view)>;

Setter real(double RunConfig::*field) {
    return [field](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        const auto x = parse_double(v);
        if (!x) return "expected a finite number, got '" + std::string(v) + "'";
        c.*field = *x;
        return std::nullopt;
    };
}

template <class Get>
Setter real_at(Get get) {
    return [get](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        const auto x = parse_double(v);
        if (!x) return "expected a finite number, got '" + std::string(v) + "'";
        get(c) = *x;
        return std::nullopt;
    };
}

template <class Get>
Setter count_at(Get get) {
    return [get](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        const auto x = parse_unsigned(v);
        if (!x) return "expected a non-negative integer, got '" + std::string(v) + "'";
        get(c) = static_cast<std::size_t>(*x);
        return std::nullopt;
    };
}

Setter optional_real(std::optional<double> RunConfig::*field, std::string_view unset_word) {
    return [field, unset_word](RunConfig& c, std::string_view v) -> std::optional<std::string> {
        if (v == unset_word) {
            c.*field = std::nullopt;
            return std::nullopt;
        }
        const auto x = parse_double(v);
        if (!x) {
            return "expected a finite number or '" + std::string(unset_word) + "', got '" +
                   std::string(v) + "'";
        }
        c.*field = *x;
        return std::nullopt;
    };
}

const std::vector<std::pair<std::string_view, Setter>>& setters() {
    static const std::vector<std::pair<std::string_view, Setter>> table{
        {"scenario",
         [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
             const auto s = parse_scenario(v);
             if (!s) {
                 return "unknown scenario '" + std::string(v) +
                        "' (fig1, fig2, fig3, theorem-demo, oracle-convergence, custom)";
             }
             c.scenario = *s;
             return std::nullopt;
         }},
        {"reservoir.lambda", real_at([](RunConfig& c) -> double& { return c.reservoir.lambda; })},
        {"reservoir.gamma0", real_at([](RunConfig& c) -> double& { return c.reservoir.gamma0; })},
        {"reservoir.delta", real_at([](RunConfig& c) -> double& { return c.reservoir.delta; })},
        {"reservoir.omega0", real_at([](RunConfig& c) -> double& { return c.reservoir.omega0; })},
        {"schedule.period", optional_real(&RunConfig::schedule_period, "none")},
        {"grid.t_min", real(&RunConfig::t_min)},
        {"grid.t_max", real(&RunConfig::t_max)},
        {"grid.n_points", count_at([](RunConfig& c) -> std::size_t& { return c.n_points; })},
        {"qfi_mode",
         [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
             if (v == "full") {
                 c.qfi_mode = jc::QfiMode::Full;
             } else if (v == "phase-only") {
                 c.qfi_mode = jc::QfiMode::PhaseOnly;
             } else {
                 return "expected 'full' or 'phase-only', got '" + std::string(v) + "'";
             }
             return std::nullopt;
         }},
        {"seed",
         [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
             const auto x = parse_unsigned(v);
             if (!x) return "expected a non-negative integer, got '" + std::string(v) + "'";
             c.seed = *x;
             return std::nullopt;
         }},
        {"output_dir",
         [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
             if (v.empty()) return "must not be empty";
             c.output_dir = std::string(v);
             return std::nullopt;
         }},
        {"time_unit", optional_real(&RunConfig::time_unit, "1/lambda")},
        {"fd_step", optional_real(&RunConfig::fd_step, "auto")},
        {"oracle.dt", real_at([](RunConfig& c) -> double& { return c.oracle.dt; })},
        {"oracle.modes",
         [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
             std::vector<std::size_t> modes;
             while (true) {
                 const auto comma = v.find(',');
                 const auto item = trim(v.substr(0, comma));
                 const auto x = parse_unsigned(item);
                 if (!x) return "expected a comma-separated list of mode counts";
                 modes.push_back(static_cast<std::size_t>(*x));
                 if (comma == std::string_view::npos) break;
                 v.remove_prefix(comma + 1);
             }
             c.oracle.modes = std::move(modes);
             return std::nullopt;
         }},
        {"oracle.window", real_at([](RunConfig& c) -> double& { return c.oracle.window; })},
        {"theorem.samples", count_at([](RunConfig& c) -> std::size_t& { return c.theorem.samples; })},
        {"theorem.tolerance", real_at([](RunConfig& c) -> double& { return c.theorem.tolerance; })},
        {"theorem.controls", count_at([](RunConfig& c) -> std::size_t& { return c.theorem.controls; })},
    };
    return table;
}

const Setter* find_setter(std::string_view key) {
    for (const auto& [name, setter] : setters()) {
        if (name == key) return &setter;
    }
    return nullptr;
}

void validate(const RunConfig& c, const std::map<std::string, std::size_t, std::less<>>& lines,
              Diagnostics& diag) {
    auto line_of = [&](std::string_view key) -> std::size_t {
        const auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    auto require = [&](bool ok, std::string_view key, std::string message) {
        if (!ok) diag.add(line_of(key), std::string(key), std::move(message));
    };

    require(c.reservoir.lambda > 0.0, "reservoir.lambda", "must be > 0");
    require(c.reservoir.gamma0 >= 0.0, "reservoir.gamma0", "must be >= 0");
    require(c.t_min >= 0.0, "grid.t_min", "must be >= 0");
    require(c.t_max > c.t_min, "grid.t_max", "must be greater than grid.t_min");
    require(c.n_points >= 2, "grid.n_points", "must be >= 2");
    if (c.schedule_period) require(*c.schedule_period > 0.0, "schedule.period", "must be > 0");
    if (c.time_unit) require(*c.time_unit > 0.0, "time_unit", "must be > 0");
    if (c.fd_step) require(*c.fd_step > 0.0, "fd_step", "must be > 0");
    require(c.oracle.dt > 0.0, "oracle.dt", "must be > 0");
    require(c.oracle.window >= 10.0, "oracle.window", "must be >= 10 (units of lambda)");
    require(!c.oracle.modes.empty() && std::is_sorted(c.oracle.modes.begin(), c.oracle.modes.end()) &&
                std::adjacent_find(c.oracle.modes.begin(), c.oracle.modes.end()) == c.oracle.modes.end(),
            "oracle.modes", "must be strictly increasing");
    for (std::size_t k : c.oracle.modes) {
        require(k >= 50, "oracle.modes", "every mode count must be >= 50");
    }
    require(c.theorem.samples >= 20, "theorem.samples", "must be >= 20");
    require(c.theorem.tolerance > 0.0, "theorem.tolerance", "must be > 0");
    require(c.theorem.controls >= 2, "theorem.controls", "must be >= 2");

    if (c.scenario == Scenario::Fig3 && !c.schedule_period) {
        diag.add(0, "schedule.period", "required for scenario fig3");
    }
    if (c.scenario == Scenario::OracleConvergence && c.reservoir.lambda > 0.0 && c.oracle.dt > 0.0 &&
        c.t_max > 0.0 && (!c.time_unit || *c.time_unit > 0.0)) {
        // The Volterra march samples t_max exactly with steps dt, 2 dt and 4 dt.
        const double steps = c.t_max * c.time_scale() / (4.0 * c.oracle.dt);
        require(std::abs(steps - std::round(steps)) <= 1e-6 && steps >= 1.0, "grid.t_max",
                "grid.t_max * time_unit must be a multiple of 4 * oracle.dt for oracle-convergence");
    }
}

// ---------------------------------------------------------------------------
// Execution helpers

// Runs body(0..n-1) on a fixed pool. Each index writes only its own slot, so
// the result does not depend on the thread count; the first failure by index
// is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    std::vector<std::exception_ptr> failures(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const unsigned pool = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    {
        std::vector<std::jthread> workers;
        for (unsigned k = 1; k < pool; ++k) workers.emplace_back(worker);
        worker();
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

struct Column {
    std::string name;
    std::function<double(double)> value;  // argument: time in configuration units
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

constexpr std::size_t kChunk = 25;

Table tabulate(const std::vector<double>& grid, const std::vector<Column>& columns, unsigned threads) {
    const std::size_t chunks = (grid.size() + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> values(columns.size(), std::vector<double>(grid.size()));
    parallel_for(columns.size() * chunks, threads, [&](std::size_t job) {
        const std::size_t col = job / chunks;
        const std::size_t begin = (job % chunks) * kChunk;
        const std::size_t end = std::min(grid.size(), begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) values[col][i] = columns[col].value(grid[i]);
    });

    Table table;
    table.header.push_back("t");
    for (const auto& c : columns) table.header.push_back(c.name);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& v : values) row.push_back(v[i]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j) out += ',';
        out += table.header[j];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_number(row[j]);
        }
        out += '\n';
    }
    return out;
}

std::vector<double> time_grid(const RunConfig& c) {
    std::vector<double> grid(c.n_points);
    const double step = (c.t_max - c.t_min) / static_cast<double>(c.n_points - 1);
    for (std::size_t i = 0; i < c.n_points; ++i) grid[i] = c.t_min + step * static_cast<double>(i);
    grid.back() = c.t_max;
    return grid;
}

jc::AmplitudeFn noiseless_amplitude() {
    return [](const jc::ReservoirParams&, double) { return Complex(jc::kProbeAmplitude, 0.0); };
}

Column qfi_column(const RunConfig& c, std::string name, jc::AmplitudeFn amp) {
    const double u = c.time_scale();
    return {std::move(name), [&c, u, amp = std::move(amp)](double t) {
                try {
                    return jc::qfi(c.reservoir, t * u, amp, c.qfi_mode, c.fd_step) / (u * u);
                } catch (const AmplitudeVanishedError&) {
                    return std::nan("");
                }
            }};
}

Column decay_column(const RunConfig& c) {
    const double u = c.time_scale();
    return {"decay_rate", [&c, u](double t) {
                try {
                    return jc::decay_rate(c.reservoir, t * u) * u;
                } catch (const AmplitudeVanishedError&) {
                    return std::nan("");
                }
            }};
}

ddt::PulseSchedule physical_schedule(const RunConfig& c) {
    ddt::PulseSchedule s;
    s.period = *c.schedule_period * c.time_scale();
    s.validate();
    return s;
}

std::vector<Column> qfi_columns(const RunConfig& c) {
    std::vector<Column> cols;
    cols.push_back(qfi_column(c, "qfi_noiseless", noiseless_amplitude()));
    cols.push_back(qfi_column(c, "qfi_noisy", jc::closed_form_amplitude()));
    if (c.schedule_period) cols.push_back(qfi_column(c, "qfi_ddt", ddt::ddt_amplitude(physical_schedule(c))));
    return cols;
}

// Writes files into the output directory and records them for the manifest.
class Sink {
public:
    explicit Sink(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& contents) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out) throw std::runtime_error("cannot write " + path.string());
        outputs_.push_back({name, sha256_file(path), std::filesystem::file_size(path)});
    }

    std::vector<OutputFile>& outputs() { return outputs_; }

private:
    std::filesystem::path dir_;
    std::vector<OutputFile> outputs_;
};

std::string theorem_demo_report(const RunConfig& c) {
    using namespace ddcond;
    const Dims qubits{2, 2};
    CheckOptions opts;
    opts.n_env_samples = c.theorem.samples;
    opts.seed = c.seed;
    opts.tolerance = c.theorem.tolerance;

    const ComplexMatrix hs = pauli::z();
    const ComplexMatrix hse = kron(pauli::x(), pauli::x());
    const ComplexMatrix counter = kron(pauli::z(), pauli::x());

    std::ostringstream out;
    out << "schema = theorem_demo_v1\n";
    out << "\n# corollary: H_S = sigma_z, H_SE = sigma_x (x) sigma_x\n";
    out << to_text(check_corollary(hs, hse, qubits, opts));

    const std::vector<ComplexVector> basis{{1.0, 0.0}, {0.0, 1.0}};
    const MixedUnitaryChannel pinch = pinching_channel(basis);
    out << "\n# theorem: pinching in the sigma_z eigenbasis\n";
    out << to_text(check_theorem(hs, hse, qubits, pinch, opts));

    const auto controls = discretize_channel(pinch, c.theorem.controls);
    const auto eff = ddt::effective_hamiltonians(hs, hse, controls);
    const auto counts = rounded_counts(pinch, c.theorem.controls);
    out << "\n# pipeline: pinching -> discretization -> averaged Hamiltonians\n";
    out << "pipeline.controls = " << controls.size() << '\n';
    out << "pipeline.counts = ";
    for (std::size_t k = 0; k < counts.size(); ++k) out << (k ? "," : "") << counts[k];
    out << '\n';
    out << "pipeline.h_se_eff_max_abs = " << format_number(eff.h_se.max_abs()) << '\n';
    out << "pipeline.h_s_eff_deviation = " << format_number(max_abs_diff(eff.h_s, hs)) << '\n';

    out << "\n# counterexample: H_S = sigma_z, H_SE = sigma_z (x) sigma_x\n";
    out << to_text(check_corollary(hs, counter, qubits, opts));
    return out.str();
}

void oracle_convergence(const RunConfig& c, unsigned threads, Sink& sink) {
    const jc::ReservoirParams& p = c.reservoir;
    const double t_end = c.t_max * c.time_scale();

    // Volterra march at 4 dt, 2 dt, dt against the closed form.
    const std::vector<double> steps{4.0 * c.oracle.dt, 2.0 * c.oracle.dt, c.oracle.dt};
    std::vector<double> abs_err(steps.size()), rel_err(steps.size());
    std::vector<double> bath_err(c.oracle.modes.size());
    const std::size_t jobs = steps.size() + c.oracle.modes.size();

    // Bath comparison times: about 200 nodes of the dt lattice.
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / c.oracle.dt));
    const std::size_t stride = std::max<std::size_t>(1, n_steps / 200);
    std::vector<double> bath_times;
    for (std::size_t k = stride; k <= n_steps; k += stride) {
        bath_times.push_back(static_cast<double>(k) * c.oracle.dt);
    }

    parallel_for(jobs, threads, [&](std::size_t job) {
        if (job < steps.size()) {
            const auto tr = oracle::volterra_ce(p, t_end, steps[job]);
            double worst_abs = 0.0, worst_rel = 0.0;
            for (std::size_t k = 0; k < tr.times.size(); ++k) {
                const Complex ref = jc::ce_closed_form(p, tr.times[k]);
                worst_abs = std::max(worst_abs, std::abs(tr.ce[k] - ref));
                worst_rel = std::max(worst_rel, std::abs(std::abs(tr.ce[k]) - std::abs(ref)) / std::abs(ref));
            }
            abs_err[job] = worst_abs;
            rel_err[job] = worst_rel;
            return;
        }
        const std::size_t m = job - steps.size();
        const auto bath = oracle::sample_bath(p, c.oracle.modes[m], c.oracle.window * p.lambda);
        oracle::GlobalOptions opts;
        opts.dt = c.oracle.dt;
        const auto traj = oracle::discrete_global_trajectory(bath, p, bath_times, std::nullopt, opts);
        double worst = 0.0;
        for (const auto& g : traj) {
            worst = std::max(worst, std::abs(std::abs(g.rotating_ce(p.omega0)) -
                                             std::abs(jc::ce_closed_form(p, g.t))));
        }
        bath_err[m] = worst;
    });

    Table volterra;
    volterra.header = {"dt", "max_abs_error", "max_rel_error", "error_ratio"};
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const double ratio = k == 0 ? std::nan("") : abs_err[k - 1] / abs_err[k];
        volterra.rows.push_back({steps[k], abs_err[k], rel_err[k], ratio});
    }
    sink.write("volterra_convergence.csv", to_csv(volterra));

    Table bath;
    bath.header = {"modes", "max_abs_error"};
    for (std::size_t m = 0; m < bath_err.size(); ++m) {
        bath.rows.push_back({static_cast<double>(c.oracle.modes[m]), bath_err[m]});
    }
    sink.write("bath_convergence.csv", to_csv(bath));
}

void execute(const RunConfig& c, unsigned threads, Sink& sink) {
    switch (c.scenario) {
    case Scenario::Fig1:
    case Scenario::Fig3:
        sink.write(std::string(to_string(c.scenario)) + ".csv",
                   to_csv(tabulate(time_grid(c), qfi_columns(c), threads)));
        break;
    case Scenario::Fig2:
        sink.write("fig2.csv", to_csv(tabulate(time_grid(c), {decay_column(c)}, threads)));
        break;
    case Scenario::Custom:
        sink.write("qfi.csv", to_csv(tabulate(time_grid(c), qfi_columns(c), threads)));
        sink.write("decay_rate.csv", to_csv(tabulate(time_grid(c), {decay_column(c)}, threads)));
        break;
    case Scenario::TheoremDemo:
        sink.write("theorem_demo.txt", theorem_demo_report(c));
        break;
    case Scenario::OracleConvergence:
        oracle_convergence(c, threads, sink);
        break;
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({{0, "", "cannot read " + path.string()}});
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
    case Scenario::Fig1: return "fig1";
    case Scenario::Fig2: return "fig2";
    case Scenario::Fig3: return "fig3";
    case Scenario::TheoremDemo: return "theorem-demo";
    case Scenario::OracleConvergence: return "oracle-convergence";
    case Scenario::Custom: return "custom";
    }
    return "unknown";
}

std::string_view to_string(jc::QfiMode m) noexcept {
    return m == jc::QfiMode::Full ? "full" : "phase-only";
}

std::string format(const Diagnostic& d, std::string_view source) {
    std::string out(source);
    if (d.line > 0) out += ":" + std::to_string(d.line);
    out += ": ";
    if (!d.field.empty()) out += d.field + ": ";
    out += d.message;
    return out;
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(diagnostics.empty() ? "invalid configuration"
                                             : format(diagnostics.front(), "config")),
      diagnostics_(std::move(diagnostics)) {}

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    Diagnostics diag;
    std::map<std::string, std::size_t, std::less<>> lines;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            diag.add(line_no, "", "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const Setter* setter = find_setter(key);
        if (!setter) {
            diag.add(line_no, key, "unknown key");
            continue;
        }
        if (const auto it = lines.find(key); it != lines.end()) {
            diag.add(line_no, key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
            continue;
        }
        lines.emplace(key, line_no);
        if (auto err = (*setter)(config, value)) diag.add(line_no, key, std::move(*err));
    }

    if (!lines.contains("scenario")) diag.add(0, "scenario", "required");
    validate(config, lines, diag);
    if (!diag.empty()) throw ConfigError(diag.take());
    return config;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& c) {
    std::string modes;
    for (std::size_t k = 0; k < c.oracle.modes.size(); ++k) {
        if (k) modes += ',';
        modes += std::to_string(c.oracle.modes[k]);
    }
    return {
        {"scenario", std::string(to_string(c.scenario))},
        {"reservoir.lambda", format_number(c.reservoir.lambda)},
        {"reservoir.gamma0", format_number(c.reservoir.gamma0)},
        {"reservoir.delta", format_number(c.reservoir.delta)},
        {"reservoir.omega0", format_number(c.reservoir.omega0)},
        {"schedule.period", c.schedule_period ? format_number(*c.schedule_period) : "none"},
        {"grid.t_min", format_number(c.t_min)},
        {"grid.t_max", format_number(c.t_max)},
        {"grid.n_points", std::to_string(c.n_points)},
        {"qfi_mode", std::string(to_string(c.qfi_mode))},
        {"seed", std::to_string(c.seed)},
        {"output_dir", c.output_dir},
        {"time_unit", c.time_unit ? format_number(*c.time_unit) : "1/lambda"},
        {"fd_step", c.fd_step ? format_number(*c.fd_step) : "auto"},
        {"oracle.dt", format_number(c.oracle.dt)},
        {"oracle.modes", modes},
        {"oracle.window", format_number(c.oracle.window)},
        {"theorem.samples", std::to_string(c.theorem.samples)},
        {"theorem.tolerance", format_number(c.theorem.tolerance)},
        {"theorem.controls", std::to_string(c.theorem.controls)},
    };
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 unavailable");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

RunManifest run(const RunConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);

    RunManifest manifest;
    Sink sink(dir);
    try {
        execute(config, std::max(1u, options.threads), sink);
    } catch (const Error& e) {
        manifest.status = "failed";
        manifest.error = e.what();
    }
    manifest.outputs = std::move(sink.outputs());
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : resolved_entries(config)) cfg[k] = v;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : manifest.outputs) {
        files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    nlohmann::ordered_json doc{
        {"schema", kManifestSchema},
        {"tool", "ddmet"},
        {"version", kVersion},
        {"status", manifest.status},
        {"scenario", to_string(config.scenario)},
        {"config", cfg},
        {"time_unit",
         {{"setting", config.time_unit ? "explicit" : "1/lambda"}, {"physical_time", config.time_scale()}}},
        {"threads", std::max(1u, options.threads)},
        {"wall_time_seconds", manifest.wall_time_seconds},
        {"outputs", files},
    };
    if (!manifest.error.empty()) doc["error"] = manifest.error;

    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    return manifest;
}

} // namespace ddmet::cli
