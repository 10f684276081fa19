#include "fueltreat/incremental_eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace fueltreat {

IncrementalEvaluator::IncrementalEvaluator(const Landscape& landscape, const SettingSpec& setting, Schedule schedule)
    : land_(landscape),
      setting_(setting),
      schedule_(std::move(schedule)),
      n_(landscape.size()),
      horizon_(schedule_.horizon()) {
    if (schedule_.cells() != n_ || setting_.horizon() != horizon_) {
        throw std::invalid_argument("schedule, setting and landscape dimensions differ");
    }
    const auto slots = static_cast<std::size_t>(n_) * static_cast<std::size_t>(horizon_ + 1);
    age_.resize(slots);
    stamp_.assign(slots, 0);
    high_conn_.assign(static_cast<std::size_t>(horizon_ + 1), 0);
    habitat_conn_.assign(static_cast<std::size_t>(horizon_ + 1), 0);
    area_.assign(static_cast<std::size_t>(horizon_ + 1), 0.0);
    for (int i = 0; i < n_; ++i) age_[at(i, 0)] = land_.cell(i).initial_age;
    for (int t = 1; t <= horizon_; ++t) {
        for (int i = 0; i < n_; ++i) {
            const bool x = schedule_.treated(i, t);
            age_[at(i, t)] = x ? 0 : age_[at(i, t - 1)] + 1;
            if (x) area_[static_cast<std::size_t>(t)] += land_.cell(i).area;
        }
    }
    for (int t = 1; t <= horizon_; ++t) {
        for (const auto& [i, j] : land_.connection_pairs()) {
            const int hc = (high(i, t) && high(j, t)) ? 1 : 0;
            high_conn_[static_cast<std::size_t>(t)] += hc;
            objective_ += hc;
            habitat_conn_[static_cast<std::size_t>(t)] += (mature(i, t) && mature(j, t)) ? 1 : 0;
        }
        target_ += shortfall(t);
        for (int i = 0; i < n_; ++i) {
            double nh = 0.0;
            forced_ += local_rows(i, t, nh);
            neighbor_habitat_ += nh;
        }
    }
}

double IncrementalEvaluator::local_rows(int i, int t, double& habitat_part) const {
    const auto nb = land_.neighbors(i);
    int mature_nb = 0;
    for (int j : nb) mature_nb += mature(j, t) ? 1 : 0;
    const bool x = schedule_.treated(i, t);
    habitat_part = (setting_.require_neighbor_habitat && x && mature_nb == 0) ? 1.0 : 0.0;
    if (!x && !nb.empty() && old(i, t - 1) && mature_nb > 0) {
        return static_cast<double>(mature_nb) / static_cast<double>(nb.size());
    }
    return 0.0;
}

double IncrementalEvaluator::shortfall(int t) const {
    return static_cast<double>(std::max(0, setting_.target(t) - habitat_conn_[static_cast<std::size_t>(t)]));
}

void IncrementalEvaluator::pair_counts(int i, int t, int sign) {
    const bool hi = high(i, t);
    const bool mi = mature(i, t);
    for (int j : land_.neighbors(i)) {
        const int hc = (hi && high(j, t)) ? sign : 0;
        high_conn_[static_cast<std::size_t>(t)] += hc;
        objective_ += hc;
        habitat_conn_[static_cast<std::size_t>(t)] += (mi && mature(j, t)) ? sign : 0;
    }
}

void IncrementalEvaluator::flip(int cell, int year) {
    // Ages of `cell` change on [year, last]; from its next treatment on they agree again.
    int last = horizon_;
    for (int s = year + 1; s <= horizon_; ++s) {
        if (schedule_.treated(cell, s)) {
            last = s - 1;
            break;
        }
    }

    if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
    }
    touched_.clear();
    auto touch = [&](int i, int t) {
        auto& s = stamp_[at(i, t)];
        if (s != epoch_) {
            s = epoch_;
            touched_.emplace_back(i, t);
        }
    };
    for (int t = year; t <= std::min(last + 1, horizon_); ++t) touch(cell, t);
    for (int t = year; t <= last; ++t) {
        for (int j : land_.neighbors(cell)) touch(j, t);
    }

    auto accumulate = [&](double sign) {
        for (const auto& [i, t] : touched_) {
            double nh = 0.0;
            forced_ += sign * local_rows(i, t, nh);
            neighbor_habitat_ += sign * nh;
        }
        for (int t = year; t <= last; ++t) target_ += sign * shortfall(t);
    };

    accumulate(-1.0);
    for (int t = year; t <= last; ++t) pair_counts(cell, t, -1);

    const double a = land_.cell(cell).area;
    area_[static_cast<std::size_t>(year)] += schedule_.treated(cell, year) ? -a : a;
    schedule_.flip(cell, year);
    for (int t = year; t <= last; ++t) {
        age_[at(cell, t)] = schedule_.treated(cell, t) ? 0 : age_[at(cell, t - 1)] + 1;
    }

    for (int t = year; t <= last; ++t) pair_counts(cell, t, +1);
    accumulate(+1.0);

    // Fractional forced-treatment magnitudes accumulate rounding error; the
    // count-valued terms are exact.
    if (forced_ < 1e-9) forced_ = 0.0;
}

}  // namespace fueltreat
