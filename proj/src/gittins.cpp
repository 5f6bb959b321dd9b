#include "banditlab/gittins.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "banditlab/errors.hpp"

namespace banditlab {

namespace {

void validate_params(const GittinsParams& par) {
    if (!(par.gamma > 0.0 && par.gamma < 1.0)) {
        throw std::invalid_argument("gittins: gamma must lie in (0,1)");
    }
    if (par.max_pulls < 0) throw std::invalid_argument("gittins: max_pulls must be >= 0");
    if (par.horizon <= par.max_pulls) {
        // States on the truncation diagonal have no continuation value; a
        // table row there would silently read as "always retire".
        throw std::invalid_argument("gittins: horizon must exceed max_pulls");
    }
    if (!(par.lambda_step > 0.0 && par.lambda_step <= 1.0)) {
        throw std::invalid_argument("gittins: lambda_step must lie in (0,1]");
    }
}

long grid_points(const GittinsParams& par) {
    return std::lround(1.0 / par.lambda_step);  // grid g = 0..G, lambda = g*step
}

// Continuation and retirement arithmetic shared by every evaluation route,
// so swept tables and the per-state oracle produce identical doubles.
inline double continuation(double p, double gamma, double v_succ, double v_fail) {
    return p * (1.0 + gamma * v_succ) + (1.0 - p) * (gamma * v_fail);
}

inline double diag_success_prob(int alpha_slot, int depth) {
    // alpha = alpha_slot + 1, alpha + beta = depth + 2.
    return (1.0 + alpha_slot) / (depth + 2.0);
}

// One backward induction of the retirement problem at a fixed rate lambda
// over the full triangle, recording for every tabulated state whether
// continuation is weakly preferred.
void preference_sweep(const GittinsParams& par, double lambda, std::uint8_t* preferred) {
    const double retire = lambda / (1.0 - par.gamma);
    std::vector<double> next(static_cast<std::size_t>(par.horizon) + 1, retire);
    std::vector<double> cur(static_cast<std::size_t>(par.horizon) + 1);
    for (int d = par.horizon - 1; d >= 0; --d) {
        for (int i = 0; i <= d; ++i) {
            const double p = diag_success_prob(i, d);
            const double cont = continuation(p, par.gamma, next[i + 1], next[i]);
            const bool keep = cont >= retire;
            cur[i] = keep ? cont : retire;
            if (d <= par.max_pulls) preferred[tri::offset(d) + i] = keep ? 1 : 0;
        }
        std::swap(cur, next);
    }
}

// Same recursion restricted to the subtree rooted at (alpha, beta) with the
// identical absolute truncation depth; returns the root preference only.
bool continuation_preferred_at(const GittinsParams& par, double lambda, int alpha, int beta) {
    const double retire = lambda / (1.0 - par.gamma);
    const int base = alpha + beta - 2;
    const int levels = par.horizon - base;
    std::vector<double> next(static_cast<std::size_t>(levels) + 1, retire);
    std::vector<double> cur(static_cast<std::size_t>(levels) + 1);
    bool preferred = false;
    for (int rd = levels - 1; rd >= 0; --rd) {
        const int d = base + rd;
        for (int i = 0; i <= rd; ++i) {
            const double p = diag_success_prob(alpha - 1 + i, d);
            const double cont = continuation(p, par.gamma, next[i + 1], next[i]);
            const bool keep = cont >= retire;
            cur[i] = keep ? cont : retire;
            if (rd == 0) preferred = keep;
        }
        std::swap(cur, next);
    }
    return preferred;
}

GittinsTable compute_table_impl(const GittinsParams& par, std::uint64_t budget, bool parallel) {
    validate_params(par);
    const long G = grid_points(par);
    const std::uint64_t per_sweep =
        static_cast<std::uint64_t>(par.horizon) * (par.horizon + 1) / 2;
    const std::uint64_t work = static_cast<std::uint64_t>(G + 1) * per_sweep;
    if (work > budget) {
        throw std::invalid_argument(
            "gittins: grid x state-space work " + std::to_string(work) +
            " exceeds the budget of " + std::to_string(budget) + " state updates");
    }

    const std::size_t n_states = tri::size(par.max_pulls);
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(G + 1) * n_states, 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long g = 0; g <= G; ++g) {
        preference_sweep(par, g * par.lambda_step, flags.data() + g * n_states);
    }
#ifndef _OPENMP
    (void)parallel;
#endif

    // Largest grid rate still preferring continuation, per state. The scan
    // order is fixed, so the result does not depend on thread scheduling.
    GittinsTable table{par, std::vector<double>(n_states, 0.0)};
    for (std::size_t s = 0; s < n_states; ++s) {
        long best = -1;
        for (long g = 0; g <= G; ++g) {
            if (flags[static_cast<std::size_t>(g) * n_states + s]) best = g;
        }
        table.values[s] = best < 0 ? 0.0 : best * par.lambda_step;
    }
    return table;
}

void check_state(int alpha, int beta, int max_depth, const char* what) {
    if (alpha < 1 || beta < 1 || alpha + beta - 2 > max_depth) {
        throw std::out_of_range(std::string(what) + ": state (alpha=" + std::to_string(alpha) +
                                ", beta=" + std::to_string(beta) +
                                ") outside the tabulated triangle (max depth " +
                                std::to_string(max_depth) + ")");
    }
}

}

double GittinsTable::at(int alpha, int beta) const {
    check_state(alpha, beta, params.max_pulls, "gittins table");
    return values[tri::offset(alpha + beta - 2) + (alpha - 1)];
}

GittinsTable compute_gittins_table(const GittinsParams& params, std::uint64_t budget) {
    return compute_table_impl(params, budget, true);
}

GittinsTable compute_gittins_table_serial(const GittinsParams& params, std::uint64_t budget) {
    return compute_table_impl(params, budget, false);
}

double gittins_index_bisection(int alpha, int beta, const GittinsParams& par) {
    validate_params(par);
    check_state(alpha, beta, par.max_pulls, "gittins bisection");
    const long G = grid_points(par);
    auto preferred = [&](long g) {
        return continuation_preferred_at(par, g * par.lambda_step, alpha, beta);
    };
    if (!preferred(0)) return 0.0;
    if (preferred(G)) return G * par.lambda_step;
    long lo = 0, hi = G;  // preference is monotone: preferred(lo), !preferred(hi)
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        (preferred(mid) ? lo : hi) = mid;
    }
    return lo * par.lambda_step;
}

double gittins_index(const GittinsTable& table, const ArmPosterior& arm) {
    return table.at(arm.alpha, arm.beta);
}

GittinsIndex::GittinsIndex(std::shared_ptr<const GittinsTable> table)
    : table_(std::move(table)) {
    if (!table_) throw std::invalid_argument("GittinsIndex: null table");
}

double GittinsIndex::index(const ArmPosterior& arm, int) const {
    return table_->at(arm.alpha, arm.beta);
}

double GittinsIndex::bonus(const ArmPosterior& arm, int t) const {
    return index(arm, t) - success_probability(arm);
}

std::string GittinsIndex::name() const {
    std::string g = std::to_string(table_->params.gamma);
    g.erase(g.find_last_not_of('0') + 1);
    if (!g.empty() && g.back() == '.') g.pop_back();
    return "gittins(" + g + ")";
}

void save_table(const GittinsTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    char buf[64];
    out << "#gittins-table v1\n";
    std::snprintf(buf, sizeof buf, "%.17g", table.params.gamma);
    out << "gamma=" << buf << ",horizon=" << table.params.horizon;
    std::snprintf(buf, sizeof buf, "%.17g", table.params.lambda_step);
    out << ",step=" << buf << ",max_pulls=" << table.params.max_pulls << "\n";
    for (int d = 0; d <= table.params.max_pulls; ++d) {
        for (int i = 0; i <= d; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", table.values[tri::offset(d) + i]);
            out << (1 + i) << ',' << (1 + d - i) << ',' << buf << '\n';
        }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

std::map<std::string, std::string> parse_header_fields(const std::string& line,
                                                       const std::string& path) {
    std::map<std::string, std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw IoError(path + ":2: malformed header field '" + item + "'");
        }
        fields[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return fields;
}

}

GittinsTable load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != "#gittins-table v1") {
        throw IoError(path + ":1: expected '#gittins-table v1'");
    }
    if (!std::getline(in, line)) throw IoError(path + ":2: missing parameter line");
    const auto fields = parse_header_fields(line, path);
    GittinsParams par;
    try {
        par.gamma = std::stod(fields.at("gamma"));
        par.horizon = std::stoi(fields.at("horizon"));
        par.lambda_step = std::stod(fields.at("step"));
        par.max_pulls = std::stoi(fields.at("max_pulls"));
    } catch (const std::exception&) {
        throw IoError(path + ":2: parameter line needs gamma, horizon, step, max_pulls");
    }
    validate_params(par);

    GittinsTable table{par, std::vector<double>(tri::size(par.max_pulls), 0.0)};
    int line_no = 2;
    for (int d = 0; d <= par.max_pulls; ++d) {
        for (int i = 0; i <= d; ++i) {
            ++line_no;
            if (!std::getline(in, line)) {
                throw IoError(path + ":" + std::to_string(line_no) +
                              ": truncated table (expected " +
                              std::to_string(tri::size(par.max_pulls)) + " rows)");
            }
            int alpha = 0, beta = 0;
            double value = 0.0;
            char extra;
            std::stringstream row(line);
            char c1, c2;
            if (!(row >> alpha >> c1 >> beta >> c2 >> value) || c1 != ',' || c2 != ',' ||
                (row >> extra)) {
                throw IoError(path + ":" + std::to_string(line_no) + ": malformed row '" +
                              line + "'");
            }
            if (alpha != 1 + i || beta != 1 + d - i) {
                throw IoError(path + ":" + std::to_string(line_no) +
                              ": unexpected state order (alpha=" + std::to_string(alpha) +
                              ", beta=" + std::to_string(beta) + ")");
            }
            table.values[tri::offset(d) + i] = value;
        }
    }
    return table;
}

GittinsTable load_table(const std::string& path, const GittinsParams& expected) {
    GittinsTable table = load_table(path);
    if (!(table.params == expected)) {
        std::ostringstream msg;
        msg << path << ": header parameters (gamma=" << table.params.gamma
            << ", horizon=" << table.params.horizon << ", step=" << table.params.lambda_step
            << ", max_pulls=" << table.params.max_pulls << ") do not match the requested"
            << " (gamma=" << expected.gamma << ", horizon=" << expected.horizon
            << ", step=" << expected.lambda_step << ", max_pulls=" << expected.max_pulls << ")";
        throw IoError(msg.str());
    }
    return table;
}

}
