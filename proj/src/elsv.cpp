#include "banditlab/elsv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "banditlab/errors.hpp"

namespace banditlab {

BonusSpec zero_bonus() {
    return BonusSpec{"zero", [](int, int, int) { return 0.0; }};
}

BonusSpec ucb_bonus(double ucb_alpha) {
    UcbIndex idx(UcbParams{ucb_alpha});
    return BonusSpec{idx.name(), [params = UcbParams{ucb_alpha}](int alpha, int beta, int t) {
                         return ucb_bonus_value(ArmPosterior{alpha, beta}, t, params);
                     }};
}

BonusSpec gittins_bonus(std::shared_ptr<const GittinsTable> table) {
    if (!table) throw std::invalid_argument("gittins_bonus: null table");
    GittinsIndex idx(table);
    return BonusSpec{idx.name(), [table](int alpha, int beta, int) {
                         const ArmPosterior arm{alpha, beta};
                         return table->at(alpha, beta) - success_probability(arm);
                     }};
}

BonusSpec index_bonus(std::shared_ptr<const IndexFunction> index) {
    if (!index) throw std::invalid_argument("index_bonus: null index");
    return BonusSpec{index->name(), [index](int alpha, int beta, int t) {
                         return index->bonus(ArmPosterior{alpha, beta}, t);
                     }};
}

double ValueTable::at(int alpha, int beta) const {
    if (alpha < 1 || beta < 1 || alpha + beta - 2 > max_depth()) {
        throw std::out_of_range("value table (t=" + std::to_string(t) + "): state (alpha=" +
                                std::to_string(alpha) + ", beta=" + std::to_string(beta) +
                                ") outside the triangle");
    }
    return values[tri::offset(alpha + beta - 2) + (alpha - 1)];
}

ValueTable compute_value_table(int t, const BonusFn& bonus) {
    return compute_value_table(t, bonus, t);
}

ValueTable compute_value_table(int t, const BonusFn& bonus, int bonus_time) {
    if (t < 1) throw std::invalid_argument("compute_value_table: t must be >= 1");
    if (!bonus) throw std::invalid_argument("compute_value_table: empty bonus");
    ValueTable table;
    table.t = t;
    table.bonus_time = bonus_time;
    table.values.assign(tri::size(t - 1), 0.0);  // outermost diagonal stays 0
    for (int d = t - 2; d >= 0; --d) {
        const std::size_t row = tri::offset(d);
        const std::size_t next = tri::offset(d + 1);
        for (int i = 0; i <= d; ++i) {
            const double b = bonus(1 + i, 1 + d - i, bonus_time);
            if (!std::isfinite(b)) {
                throw ComputationError("bonus is not finite at (alpha=" + std::to_string(1 + i) +
                                       ", beta=" + std::to_string(1 + d - i) + ", t=" +
                                       std::to_string(bonus_time) + ")");
            }
            const double p = (1.0 + i) / (d + 2.0);
            table.values[row + i] =
                p * table.values[next + i + 1] + (1.0 - p) * table.values[next + i] - b;
            ++table.updates;
        }
    }
    return table;
}

double separable_value(const TableList& tables, std::span<const ArmPosterior> arms) {
    if (tables.size() != arms.size()) {
        throw std::invalid_argument("separable_value: " + std::to_string(tables.size()) +
                                    " tables for " + std::to_string(arms.size()) + " arms");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
        if (!tables[i]) throw std::invalid_argument("separable_value: null table");
        total += tables[i]->at(arms[i].alpha, arms[i].beta);
    }
    return total;
}

double separable_value(const TableList& tables, const BanditState& state) {
    return separable_value(tables, std::span<const ArmPosterior>(state.arms));
}

ValueTable normalize_for_plot(const ValueTable& table, double success_reward) {
    if (!(success_reward > 0.0)) {
        throw std::invalid_argument("normalize_for_plot: success reward must be positive");
    }
    ValueTable shifted = table;
    if (table.t < 2) return shifted;  // no interior states, nothing to satisfy

    // Largest one-step surplus mean*reward + (E[v(S')] - v(s)) over interior
    // states; shifting each diagonal up by that much per step inwards makes
    // the displayed table dominate its own one-step backups.
    double delta = -std::numeric_limits<double>::infinity();
    for (int d = 0; d <= table.t - 2; ++d) {
        const std::size_t row = tri::offset(d);
        const std::size_t next = tri::offset(d + 1);
        for (int i = 0; i <= d; ++i) {
            const double p = (1.0 + i) / (d + 2.0);
            const double expected =
                p * table.values[next + i + 1] + (1.0 - p) * table.values[next + i];
            const double implied_bonus = expected - table.values[row + i];
            delta = std::max(delta, p * success_reward + implied_bonus);
        }
    }
    for (int d = 0; d <= table.t - 1; ++d) {
        const double offset = delta * (table.t - 1 - d);
        const std::size_t row = tri::offset(d);
        for (int i = 0; i <= d; ++i) shifted.values[row + i] = table.values[row + i] + offset;
    }
    return shifted;
}

void export_contour_csv(const ValueTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "mean,pulls,value\n";
    char buf[64];
    for (int d = 0; d <= table.max_depth(); ++d) {
        for (int i = 0; i <= d; ++i) {
            const double mean = (1.0 + i) / (d + 2.0);
            std::snprintf(buf, sizeof buf, "%.17g", mean);
            out << buf << ',' << d << ',';
            std::snprintf(buf, sizeof buf, "%.17g", table.values[tri::offset(d) + i]);
            out << buf << '\n';
        }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

void save_value_table(const ValueTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "#elsv-table v1\n";
    out << "t=" << table.t << ",bonus_time=" << table.bonus_time
        << ",bonus_name=" << table.bonus_name << "\n";
    char buf[64];
    for (int d = 0; d <= table.max_depth(); ++d) {
        for (int i = 0; i <= d; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", table.values[tri::offset(d) + i]);
            out << (1 + i) << ',' << (1 + d - i) << ',' << buf << '\n';
        }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

ValueTable load_value_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != "#elsv-table v1") {
        throw IoError(path + ":1: expected '#elsv-table v1'");
    }
    if (!std::getline(in, line)) throw IoError(path + ":2: missing parameter line");

    ValueTable table;
    {
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw IoError(path + ":2: malformed header field '" + item + "'");
            }
            const std::string key = item.substr(0, eq);
            const std::string value = item.substr(eq + 1);
            try {
                if (key == "t") {
                    table.t = std::stoi(value);
                } else if (key == "bonus_time") {
                    table.bonus_time = std::stoi(value);
                } else if (key == "bonus_name") {
                    table.bonus_name = value;
                } else {
                    throw IoError(path + ":2: unknown header field '" + key + "'");
                }
            } catch (const IoError&) {
                throw;
            } catch (const std::exception&) {
                throw IoError(path + ":2: malformed value for '" + key + "'");
            }
        }
    }
    if (table.t < 1) throw IoError(path + ":2: header needs t >= 1");

    table.values.assign(tri::size(table.t - 1), 0.0);
    int line_no = 2;
    for (int d = 0; d <= table.max_depth(); ++d) {
        for (int i = 0; i <= d; ++i) {
            ++line_no;
            if (!std::getline(in, line)) {
                throw IoError(path + ":" + std::to_string(line_no) + ": truncated table");
            }
            int alpha = 0, beta = 0;
            double value = 0.0;
            char c1, c2, extra;
            std::stringstream row(line);
            if (!(row >> alpha >> c1 >> beta >> c2 >> value) || c1 != ',' || c2 != ',' ||
                (row >> extra)) {
                throw IoError(path + ":" + std::to_string(line_no) + ": malformed row '" +
                              line + "'");
            }
            if (alpha != 1 + i || beta != 1 + d - i) {
                throw IoError(path + ":" + std::to_string(line_no) + ": unexpected state order");
            }
            table.values[tri::offset(d) + i] = value;
        }
    }
    return table;
}

TableCache::TableCache(BonusSpec bonus, int prior_extra_depth)
    : bonus_(std::move(bonus)), extra_(prior_extra_depth) {
    if (!bonus_.fn) throw std::invalid_argument("TableCache: empty bonus");
    if (extra_ < 0) throw std::invalid_argument("TableCache: negative prior depth");
}

std::shared_ptr<const ValueTable> TableCache::decision_table(int t) {
    if (t < 1) throw std::invalid_argument("decision_table: t must be >= 1");
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    // Triangle one step past the deepest reachable arm state at time t,
    // bonus pinned to the decision step itself.
    auto table = std::make_shared<ValueTable>(
        compute_value_table(t + 1 + extra_, bonus_.fn, t));
    table->bonus_name = bonus_.name;
    cache_.emplace(t, table);
    return table;
}

TableList TableCache::decision_tables(int t, int n_arms) {
    if (n_arms < 1) throw std::invalid_argument("decision_tables: need at least one arm");
    return TableList(static_cast<std::size_t>(n_arms), decision_table(t));
}

}
