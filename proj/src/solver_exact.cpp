#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fueltreat/solver.hpp"

namespace fueltreat {

std::string_view to_string(ExactStatus status) {
    return status == ExactStatus::optimal ? "optimal" : "infeasible";
}

namespace {

class BranchAndBound {
public:
    BranchAndBound(const Landscape& landscape, const SettingSpec& setting, int horizon, long limit)
        : land_(landscape),
          setting_(setting),
          horizon_(horizon),
          n_(landscape.size()),
          limit_area_(budget_limit(landscape, setting)),
          slack_(1e-9 * std::max(1.0, limit_area_)),
          incumbent_(limit),
          current_(landscape.size(), horizon),
          ages_(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(landscape.size())),
          decided_(static_cast<std::size_t>(landscape.size()), 0),
          order_(static_cast<std::size_t>(landscape.size())) {
        for (int i = 0; i < n_; ++i) ages_[static_cast<std::size_t>(i)] = land_.cell(i).initial_age;
    }

    void run() { year(1, 0); }

    bool found() const { return found_; }
    long objective() const { return incumbent_; }
    const Schedule& best() const { return best_; }
    long nodes() const { return nodes_; }

private:
    int age(int i, int t) const {
        return ages_[static_cast<std::size_t>(t) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)];
    }
    int& age(int i, int t) {
        return ages_[static_cast<std::size_t>(t) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)];
    }

    // Would cell i be mature at t if left untreated?
    bool matures_untreated(int i, int t) const { return age(i, t - 1) + 1 >= land_.cell(i).mature_threshold; }
    bool old_before(int i, int t) const { return age(i, t - 1) >= land_.cell(i).max_tfi; }

    void year(int t, long partial) {
        ++nodes_;
        if (partial >= incumbent_) return;
        if (t > horizon_) {
            incumbent_ = partial;
            best_ = current_;
            found_ = true;
            return;
        }
        // Branch order for this year: oldest first, ties by index.
        std::vector<int> order(static_cast<std::size_t>(n_));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return age(a, t - 1) > age(b, t - 1); });
        std::swap(order, order_);
        std::fill(decided_.begin(), decided_.end(), 0);
        choose(t, 0, 0.0, partial);
        std::swap(order, order_);
    }

    // decided_: 0 undecided, 1 treated, 2 untreated.
    bool skip_breaks_forced(int c, int t) const {
        const bool c_old = old_before(c, t);
        const bool c_mature = matures_untreated(c, t);
        for (int j : land_.neighbors(c)) {
            if (decided_[static_cast<std::size_t>(j)] != 2) continue;
            if (c_old && matures_untreated(j, t)) return true;
            if (c_mature && old_before(j, t)) return true;
        }
        return false;
    }

    void choose(int t, std::size_t pos, double used, long partial) {
        ++nodes_;
        if (pos == order_.size()) {
            complete(t, partial);
            return;
        }
        const int c = order_[pos];
        const auto& cell = land_.cell(c);
        auto& slot = decided_[static_cast<std::size_t>(c)];
        if (age(c, t - 1) >= cell.min_tfi && used + cell.area <= limit_area_ + slack_) {
            slot = 1;
            current_.set(c, t, true);
            choose(t, pos + 1, used + cell.area, partial);
            current_.set(c, t, false);
        }
        if (!skip_breaks_forced(c, t)) {
            slot = 2;
            choose(t, pos + 1, used, partial);
        }
        slot = 0;
    }

    void complete(int t, long partial) {
        for (int i = 0; i < n_; ++i) age(i, t) = current_.treated(i, t) ? 0 : age(i, t - 1) + 1;
        auto mature = [&](int i) { return age(i, t) >= land_.cell(i).mature_threshold; };
        auto high = [&](int i) { return age(i, t) >= land_.cell(i).high_threshold; };

        for (int i = 0; i < n_; ++i) {
            const auto nb = land_.neighbors(i);
            const bool any_mature = std::any_of(nb.begin(), nb.end(), mature);
            if (current_.treated(i, t)) {
                if (setting_.require_neighbor_habitat && !any_mature) return;
            } else if (!nb.empty() && old_before(i, t) && any_mature) {
                return;
            }
        }
        int habitat = 0;
        int high_pairs = 0;
        for (const auto& [i, j] : land_.connection_pairs()) {
            habitat += (mature(i) && mature(j)) ? 1 : 0;
            high_pairs += (high(i) && high(j)) ? 1 : 0;
        }
        if (habitat < setting_.target(t)) return;
        const auto saved = decided_;
        year(t + 1, partial + high_pairs);
        decided_ = saved;
    }

    const Landscape& land_;
    const SettingSpec& setting_;
    const int horizon_;
    const int n_;
    const double limit_area_;
    const double slack_;
    long incumbent_;
    bool found_ = false;
    long nodes_ = 0;
    Schedule current_;
    Schedule best_;
    std::vector<int> ages_;
    std::vector<std::uint8_t> decided_;
    std::vector<int> order_;
};

}  // namespace

ExactResult solve_exact(const Landscape& landscape, const SettingSpec& setting, int horizon,
                        const ExactOptions& options) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    setting.validate();
    if (setting.horizon() != horizon) throw std::invalid_argument("setting horizon does not match");
    const long size = static_cast<long>(landscape.size()) * horizon;
    if (size > options.cap) {
        throw std::invalid_argument("instance too large for exact search: cells x horizon = " +
                                    std::to_string(size) + " > cap " + std::to_string(options.cap));
    }
    const long limit = options.incumbent_limit.value_or(std::numeric_limits<long>::max());
    BranchAndBound bb(landscape, setting, horizon, limit);
    bb.run();

    ExactResult result;
    result.nodes = bb.nodes();
    if (bb.found()) {
        result.schedule = bb.best();
        result.objective = bb.objective();
        result.status = ExactStatus::optimal;
    } else {
        result.schedule = Schedule(landscape.size(), horizon);
        result.status = ExactStatus::infeasible;
    }
    return result;
}

}  // namespace fueltreat
